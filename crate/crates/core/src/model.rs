//! Linear features, pseudo-gradients, and the exact TD fixed point.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mdp::{mixing_estimate, Mdp, MixingEstimate, StationaryDist, Transition};

const FEATURE_NORM_SLACK: f64 = 1e-12;
const SINGULARITY_THRESHOLD: f64 = 1e12;

/// The `n_states × d` feature matrix, rows bounded by 1 in Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    n_states: usize,
    d: usize,
    /// Row-major.
    phi: Vec<f64>,
}

impl FeatureMap {
    /// Accepts an already-normalized matrix; rejects rows with norm above 1.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let map = Self::from_rows(rows)?;
        for s in 0..map.n_states {
            let norm = dot(map.row(s), map.row(s)).sqrt();
            if norm > 1.0 + FEATURE_NORM_SLACK {
                return Err(Error::invalid(format!("phi[{s}]"), format!("row norm {norm} exceeds 1")));
            }
        }
        Ok(map)
    }

    /// Builds a map without the norm check. Only for probing what happens
    /// when the boundedness assumption is violated.
    pub fn unchecked(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }

    fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_states = rows.len();
        if n_states == 0 {
            return Err(Error::invalid("phi", "feature matrix has no rows"));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::invalid("phi[0]", "feature dimension must be positive"));
        }
        if d > n_states {
            return Err(Error::invalid("phi", format!("dimension {d} exceeds the number of states {n_states}")));
        }
        let mut phi = Vec::with_capacity(n_states * d);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::invalid(format!("phi[{s}]"), format!("expected {d} columns, got {}", row.len())));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("phi[{s}][{j}]"), "feature must be finite"));
            }
            phi.extend_from_slice(row);
        }
        Ok(Self { n_states, d, phi })
    }

    /// Parses a feature file: either a bare nested array, or
    /// `{"phi": [[...]], "pre_normalized": bool}`. Unless `pre_normalized`
    /// is set, the matrix goes through [`normalize_features`].
    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum FeatureFile {
            Bare(Vec<Vec<f64>>),
            Tagged {
                phi: Vec<Vec<f64>>,
                #[serde(default)]
                pre_normalized: bool,
            },
        }
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: FeatureFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::invalid(e.path().to_string(), e.inner().to_string()))?;
        match file {
            FeatureFile::Bare(rows) => normalize_features(rows),
            FeatureFile::Tagged { phi, pre_normalized: true } => Self::new(phi),
            FeatureFile::Tagged { phi, .. } => normalize_features(phi),
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.phi[s * self.d..(s + 1) * self.d]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_states).map(|s| self.row(s).to_vec()).collect()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_states, self.d, &self.phi)
    }

    /// TD error `δ = r + γ φ(s')ᵀθ − φ(s)ᵀθ`.
    #[inline]
    pub fn td_error(&self, x: &Transition, gamma: f64, theta: &[f64]) -> f64 {
        let f = self.row(x.s);
        let f_next = self.row(x.s_next);
        let mut acc = x.r;
        for i in 0..self.d {
            acc += (gamma * f_next[i] - f[i]) * theta[i];
        }
        acc
    }

    /// Writes `g_x(θ) = A_x θ + b_x = δ φ(s)` into `out` without forming `A_x`.
    #[inline]
    pub fn pseudo_gradient_into(&self, x: &Transition, gamma: f64, theta: &[f64], out: &mut [f64]) {
        let delta = self.td_error(x, gamma, theta);
        for (o, f) in out.iter_mut().zip(self.row(x.s)) {
            *o = f * delta;
        }
    }

    /// `A_x = φ(s)(γφ(s') − φ(s))ᵀ`, materialized.
    pub fn sample_matrix(&self, x: &Transition, gamma: f64) -> DMatrix<f64> {
        let f = DVector::from_row_slice(self.row(x.s));
        let f_next = DVector::from_row_slice(self.row(x.s_next));
        &f * (f_next * gamma - &f).transpose()
    }

    /// Spectral norm of the rank-one `A_x`: `‖φ(s)‖ · ‖γφ(s') − φ(s)‖`.
    pub fn sample_matrix_norm(&self, x: &Transition, gamma: f64) -> f64 {
        let f = self.row(x.s);
        let f_next = self.row(x.s_next);
        let diff: f64 = f.iter().zip(f_next).map(|(a, b)| (gamma * b - a).powi(2)).sum();
        dot(f, f).sqrt() * diff.sqrt()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales every row by one global factor so the largest row norm is 1.
pub fn normalize_features(raw: Vec<Vec<f64>>) -> Result<FeatureMap> {
    let mut map = FeatureMap::from_rows(raw)?;
    let max_norm = (0..map.n_states)
        .map(|s| dot(map.row(s), map.row(s)).sqrt())
        .fold(0.0, f64::max);
    if max_norm == 0.0 {
        return Err(Error::DegenerateFeatures);
    }
    map.phi.iter_mut().for_each(|x| *x /= max_norm);
    Ok(map)
}

/// A TD increment, `A_x θ + b_x` or `Aθ + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoGradient(pub Vec<f64>);

impl PseudoGradient {
    pub fn norm_squared(&self) -> f64 {
        dot(&self.0, &self.0)
    }
}

/// Sample pseudo-gradient `g_x(θ)`.
pub fn sample_pseudo_gradient(x: &Transition, features: &FeatureMap, gamma: f64, theta: &[f64]) -> PseudoGradient {
    let mut out = vec![0.0; features.dim()];
    features.pseudo_gradient_into(x, gamma, theta, &mut out);
    PseudoGradient(out)
}

/// Mean quantities of linear TD on one chain: `A`, `b`, the fixed point and
/// the spectral constant.
#[derive(Debug, Clone)]
pub struct TdModel {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub theta_star: DVector<f64>,
    /// `|λ_max(A + Aᵀ)|`.
    pub lambda_a: f64,
    pub mix: MixingEstimate,
    pub gamma: f64,
    pub r_max: f64,
    /// `σ_max(A) / σ_min(A)`.
    pub condition: f64,
}

impl TdModel {
    /// `A = Σ_s μ(s) φ(s)(γ Σ_s' p(s'|s)φ(s') − φ(s))ᵀ`, `b = Σ_s μ(s) r(s) φ(s)`,
    /// `θ* = −A⁻¹b`.
    pub fn compute(mdp: &Mdp, mu: &StationaryDist, features: &FeatureMap) -> Result<Self> {
        let n = mdp.n_states();
        if features.n_states() != n {
            return Err(Error::Dimension {
                expected: n,
                got: features.n_states(),
            });
        }
        let d = features.dim();
        let gamma = mdp.gamma();
        let mut a = DMatrix::<f64>::zeros(d, d);
        let mut b = DVector::<f64>::zeros(d);
        let mut expected_next = vec![0.0; d];
        for s in 0..n {
            let w = mu.probs()[s];
            let f = features.row(s);
            expected_next.iter_mut().for_each(|x| *x = 0.0);
            for (t, p) in mdp.row(s).iter().enumerate() {
                if *p != 0.0 {
                    for (e, ft) in expected_next.iter_mut().zip(features.row(t)) {
                        *e += p * ft;
                    }
                }
            }
            for i in 0..d {
                for j in 0..d {
                    a[(i, j)] += w * f[i] * (gamma * expected_next[j] - f[j]);
                }
                b[i] += w * mdp.expected_reward()[s] * f[i];
            }
        }

        let sv = a.singular_values();
        let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), v| (hi.max(*v), lo.min(*v)));
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= SINGULARITY_THRESHOLD) {
            return Err(Error::Singular { condition });
        }
        let theta_star = a
            .clone()
            .lu()
            .solve(&(-&b))
            .ok_or(Error::Singular { condition })?;

        let sym = &a + a.transpose();
        let top = sym.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(top < 0.0) {
            return Err(Error::NotNegativeDefinite { eigenvalue: top });
        }
        let mix = mixing_estimate(mdp, mu)?;
        Ok(Self {
            a,
            b,
            theta_star,
            lambda_a: top.abs(),
            mix,
            gamma,
            r_max: mdp.r_max(),
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// The variant with the extra factor 2, `2|λ_max(A + Aᵀ)|`. The theorem
    /// constants in [`crate::theory`] use [`TdModel::lambda_a`] instead.
    pub fn lambda_a_doubled(&self) -> f64 {
        2.0 * self.lambda_a
    }

    pub fn theta_star_slice(&self) -> &[f64] {
        self.theta_star.as_slice()
    }

    /// `‖Aθ* + b‖₂`.
    pub fn residual(&self) -> f64 {
        (&self.a * &self.theta_star + &self.b).norm()
    }
}

/// Convenience wrapper for [`TdModel::compute`].
pub fn compute_model(mdp: &Mdp, mu: &StationaryDist, features: &FeatureMap) -> Result<TdModel> {
    TdModel::compute(mdp, mu, features)
}

/// `g(θ) = Aθ + b`.
pub fn mean_pseudo_gradient(model: &TdModel, theta: &[f64]) -> PseudoGradient {
    let t = DVector::from_column_slice(theta);
    let g = &model.a * t + &model.b;
    PseudoGradient(g.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::stationary_distribution;

    fn scalar_model(gamma: f64, r: f64) -> (Mdp, FeatureMap, TdModel) {
        let mdp = Mdp::new(vec![vec![1.0]], vec![r], gamma, None).unwrap();
        let mu = stationary_distribution(&mdp).unwrap();
        let f = FeatureMap::new(vec![vec![1.0]]).unwrap();
        let m = TdModel::compute(&mdp, &mu, &f).unwrap();
        (mdp, f, m)
    }

    #[test]
    fn normalize_examples() {
        let f = normalize_features(vec![vec![3.0, 4.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(f.row(0), &[0.6, 0.8]);
        assert_eq!(f.row(1), &[0.0, 0.2]);
        let already = vec![vec![1.0, 0.0], vec![0.0, 0.5]];
        assert_eq!(normalize_features(already.clone()).unwrap().rows(), already);
        assert!(matches!(normalize_features(vec![vec![0.0, 0.0]; 3]), Err(Error::DegenerateFeatures)));
    }

    #[test]
    fn rejects_wide_or_unbounded_features() {
        assert!(FeatureMap::new(vec![vec![0.1, 0.1]]).is_err());
        assert!(FeatureMap::new(vec![vec![2.0], vec![0.0]]).is_err());
    }

    #[test]
    fn feature_file_forms() {
        let f = FeatureMap::from_json_str("[[3, 4], [0, 1]]").unwrap();
        assert_eq!(f.row(0), &[0.6, 0.8]);
        let f = FeatureMap::from_json_str(r#"{"phi": [[0.5, 0.5], [0, 1]], "pre_normalized": true}"#).unwrap();
        assert_eq!(f.row(0), &[0.5, 0.5]);
        assert!(FeatureMap::from_json_str(r#"{"phi": [[3, 4], [0, 1]], "pre_normalized": true}"#).is_err());
    }

    #[test]
    fn scalar_fixed_point() {
        let (_, _, m) = scalar_model(0.5, 1.0);
        assert_eq!(m.a[(0, 0)], -0.5);
        assert_eq!(m.b[0], 1.0);
        assert!((m.theta_star[0] - 2.0).abs() < 1e-15);
        assert!((m.lambda_a - 1.0).abs() < 1e-15);
        assert!((m.lambda_a_doubled() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_reward_fixed_point() {
        let mdp = Mdp::new(vec![vec![0.3, 0.7], vec![0.6, 0.4]], vec![0.0, 0.0], 0.9, None).unwrap();
        let mu = stationary_distribution(&mdp).unwrap();
        let f = FeatureMap::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let m = TdModel::compute(&mdp, &mu, &f).unwrap();
        assert_eq!(m.b.norm(), 0.0);
        assert_eq!(m.theta_star.norm(), 0.0);
    }

    #[test]
    fn singular_model_is_rejected() {
        let mdp = Mdp::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![1.0, 0.0], 0.9, None).unwrap();
        let mu = stationary_distribution(&mdp).unwrap();
        let f = FeatureMap::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(TdModel::compute(&mdp, &mu, &f), Err(Error::Singular { .. })));
    }

    #[test]
    fn sample_gradient_examples() {
        let f = FeatureMap::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let x = Transition { s: 0, r: 1.0, s_next: 1 };
        assert_eq!(sample_pseudo_gradient(&x, &f, 0.5, &[2.0, 3.0]).0, vec![0.5, 0.0]);

        let (_, f1, m) = scalar_model(0.5, 1.0);
        let x = Transition { s: 0, r: 1.0, s_next: 0 };
        assert_eq!(sample_pseudo_gradient(&x, &f1, 0.5, m.theta_star_slice()).0, vec![0.0]);

        let f = FeatureMap::new(vec![vec![0.6, 0.8], vec![0.0, 1.0]]).unwrap();
        let x = Transition { s: 0, r: 2.0, s_next: 0 };
        assert_eq!(sample_pseudo_gradient(&x, &f, 0.0, &[0.0, 0.0]).0, vec![1.2, 1.6]);
    }

    #[test]
    fn rank_one_matches_materialized() {
        let f = FeatureMap::new(vec![vec![0.3, 0.4], vec![0.6, -0.2]]).unwrap();
        let x = Transition { s: 1, r: 0.7, s_next: 0 };
        let theta = [1.5, -2.0];
        let ax = f.sample_matrix(&x, 0.9);
        let full = &ax * DVector::from_row_slice(&theta) + DVector::from_row_slice(f.row(1)) * 0.7;
        let fast = sample_pseudo_gradient(&x, &f, 0.9, &theta);
        for i in 0..2 {
            assert!((full[i] - fast.0[i]).abs() < 1e-15);
        }
        let sv = ax.singular_values().max();
        assert!((sv - f.sample_matrix_norm(&x, 0.9)).abs() < 1e-14);
    }

    #[test]
    fn mean_gradient_linearity_at_fixed_point() {
        let (_, _, m) = scalar_model(0.5, 1.0);
        assert!(mean_pseudo_gradient(&m, &[2.0]).norm_squared() < 1e-30);
        assert_eq!(mean_pseudo_gradient(&m, &[3.0]).0, vec![-0.5]);
    }
}
