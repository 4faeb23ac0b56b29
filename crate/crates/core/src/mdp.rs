//! Finite Markov chains induced by a fixed policy, and sampling from them.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-12;
const POWER_ITERATION_CAP: usize = 100_000;
const POWER_ITERATION_TOL: f64 = 1e-12;
/// Horizon over which the mixing envelope is certified.
pub const MIXING_HORIZON: usize = 200;
/// Total-variation values below this are treated as round-off when fitting κ.
pub const TV_FLOOR: f64 = 1e-12;

fn check_distribution(row: &[f64], path: &str) -> Result<()> {
    if let Some(i) = row.iter().position(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::invalid(
            format!("{path}[{i}]"),
            format!("probability must be finite and non-negative, got {}", row[i]),
        ));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::invalid(path, format!("row sums to {sum}, expected 1")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("gamma", format!("discount must lie in (0, 1), got {gamma}")));
    }
    Ok(())
}

/// An MDP together with the policy being evaluated.
#[derive(Debug, Clone)]
pub struct ControlledMdp {
    n_states: usize,
    n_actions: usize,
    /// `[s][a][s']`, flattened.
    kernel: Vec<f64>,
    /// `[s][a][s']`, flattened.
    reward: Vec<f64>,
    /// `[s][a]`, flattened.
    policy: Vec<f64>,
    gamma: f64,
    r_max: f64,
}

impl ControlledMdp {
    /// Validates shapes and probabilities. `r_max` defaults to the largest
    /// absolute reward.
    pub fn new(
        kernel: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<Vec<f64>>>,
        policy: Vec<Vec<f64>>,
        gamma: f64,
        r_max: Option<f64>,
    ) -> Result<Self> {
        let n_states = kernel.len();
        if n_states == 0 {
            return Err(Error::invalid("kernel", "at least one state is required"));
        }
        let n_actions = kernel[0].len();
        if n_actions == 0 {
            return Err(Error::invalid("kernel[0]", "at least one action is required"));
        }
        check_gamma(gamma)?;
        if reward.len() != n_states {
            return Err(Error::invalid("reward", format!("expected {n_states} states, got {}", reward.len())));
        }
        if policy.len() != n_states {
            return Err(Error::invalid("policy", format!("expected {n_states} states, got {}", policy.len())));
        }

        let mut flat_kernel = Vec::with_capacity(n_states * n_actions * n_states);
        let mut flat_reward = Vec::with_capacity(n_states * n_actions * n_states);
        let mut flat_policy = Vec::with_capacity(n_states * n_actions);
        for s in 0..n_states {
            if kernel[s].len() != n_actions {
                return Err(Error::invalid(format!("kernel[{s}]"), format!("expected {n_actions} actions")));
            }
            if reward[s].len() != n_actions {
                return Err(Error::invalid(format!("reward[{s}]"), format!("expected {n_actions} actions")));
            }
            if policy[s].len() != n_actions {
                return Err(Error::invalid(format!("policy[{s}]"), format!("expected {n_actions} actions")));
            }
            check_distribution(&policy[s], &format!("policy[{s}]"))?;
            flat_policy.extend_from_slice(&policy[s]);
            for a in 0..n_actions {
                let row = &kernel[s][a];
                if row.len() != n_states {
                    return Err(Error::invalid(format!("kernel[{s}][{a}]"), format!("expected {n_states} entries")));
                }
                check_distribution(row, &format!("kernel[{s}][{a}]"))?;
                flat_kernel.extend_from_slice(row);
                let rrow = &reward[s][a];
                if rrow.len() != n_states {
                    return Err(Error::invalid(format!("reward[{s}][{a}]"), format!("expected {n_states} entries")));
                }
                if let Some(i) = rrow.iter().position(|r| !r.is_finite()) {
                    return Err(Error::invalid(format!("reward[{s}][{a}][{i}]"), "reward must be finite"));
                }
                flat_reward.extend_from_slice(rrow);
            }
        }

        let observed = flat_reward.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let r_max = r_max.unwrap_or(observed);
        if observed > r_max {
            return Err(Error::invalid("r_max", format!("reward magnitude {observed} exceeds r_max {r_max}")));
        }
        Ok(Self {
            n_states,
            n_actions,
            kernel: flat_kernel,
            reward: flat_reward,
            policy: flat_policy,
            gamma,
            r_max,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    fn at(&self, s: usize, a: usize, next: usize) -> usize {
        (s * self.n_actions + a) * self.n_states + next
    }

    /// Marginalizes the actions out under the policy.
    ///
    /// The per-transition rewards collapse to their conditional expectation
    /// `r^π(s)`; sampled transitions then carry that value without noise.
    pub fn fold_policy(&self) -> Result<Mdp> {
        let n = self.n_states;
        let mut kernel = vec![vec![0.0; n]; n];
        let mut expected_reward = vec![0.0; n];
        for s in 0..n {
            for a in 0..self.n_actions {
                let pi = self.policy[s * self.n_actions + a];
                for next in 0..n {
                    let p = self.kernel[self.at(s, a, next)];
                    kernel[s][next] += pi * p;
                    expected_reward[s] += pi * p * self.reward[self.at(s, a, next)];
                }
            }
        }
        Mdp::new(kernel, expected_reward, self.gamma, Some(self.r_max))
    }
}

/// Convenience wrapper for [`ControlledMdp::fold_policy`].
pub fn fold_policy(cmdp: &ControlledMdp) -> Result<Mdp> {
    cmdp.fold_policy()
}

/// The Markov reward process `p(s'|s)`, `r^π(s)` seen by policy evaluation.
#[derive(Debug, Clone)]
pub struct Mdp {
    n_states: usize,
    kernel: Vec<f64>,
    expected_reward: Vec<f64>,
    gamma: f64,
    r_max: f64,
    rows: Vec<WeightedIndex<f64>>,
}

impl Mdp {
    /// Validates the kernel and checks that the chain is irreducible and
    /// aperiodic.
    pub fn new(kernel: Vec<Vec<f64>>, expected_reward: Vec<f64>, gamma: f64, r_max: Option<f64>) -> Result<Self> {
        let n = kernel.len();
        if n == 0 {
            return Err(Error::invalid("kernel", "at least one state is required"));
        }
        check_gamma(gamma)?;
        if expected_reward.len() != n {
            return Err(Error::invalid(
                "expected_reward",
                format!("expected {n} entries, got {}", expected_reward.len()),
            ));
        }
        let mut flat = Vec::with_capacity(n * n);
        let mut rows = Vec::with_capacity(n);
        for (s, row) in kernel.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!("kernel[{s}]"), format!("expected {n} entries, got {}", row.len())));
            }
            check_distribution(row, &format!("kernel[{s}]"))?;
            flat.extend_from_slice(row);
            rows.push(WeightedIndex::new(row).map_err(|e| Error::invalid(format!("kernel[{s}]"), e.to_string()))?);
        }
        if let Some(i) = expected_reward.iter().position(|r| !r.is_finite()) {
            return Err(Error::invalid(format!("expected_reward[{i}]"), "reward must be finite"));
        }
        let observed = expected_reward.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let r_max = r_max.unwrap_or(observed);
        if !(r_max >= 0.0) || observed > r_max {
            return Err(Error::invalid("r_max", format!("reward magnitude {observed} exceeds r_max {r_max}")));
        }
        let mdp = Self {
            n_states: n,
            kernel: flat,
            expected_reward,
            gamma,
            r_max,
            rows,
        };
        mdp.check_ergodic()?;
        Ok(mdp)
    }

    /// Parses the JSON description format (`n_states`, `kernel`,
    /// `expected_reward`, `gamma`, optional `r_max`).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: MdpFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::invalid(e.path().to_string(), e.inner().to_string()))?;
        file.into_mdp()
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn expected_reward(&self) -> &[f64] {
        &self.expected_reward
    }

    /// Row `s` of the kernel.
    pub fn row(&self, s: usize) -> &[f64] {
        &self.kernel[s * self.n_states..(s + 1) * self.n_states]
    }

    pub fn p(&self, s: usize, next: usize) -> f64 {
        self.kernel[s * self.n_states + next]
    }

    pub fn kernel_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_states, self.n_states, &self.kernel)
    }

    pub fn to_file(&self) -> MdpFile {
        MdpFile {
            n_states: self.n_states,
            kernel: (0..self.n_states).map(|s| self.row(s).to_vec()).collect(),
            expected_reward: self.expected_reward.clone(),
            gamma: self.gamma,
            r_max: Some(self.r_max),
        }
    }

    /// Returns a copy with a different discount.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma, ..self.clone() })
    }

    fn check_ergodic(&self) -> Result<()> {
        let n = self.n_states;
        let forward = |s: usize| (0..n).filter(move |&t| self.p(s, t) > 0.0);
        let backward = |s: usize| (0..n).filter(move |&t| self.p(t, s) > 0.0);
        let reach_fwd = bfs_levels(n, forward);
        if let Some(s) = reach_fwd.iter().position(Option::is_none) {
            return Err(Error::NotErgodic(format!("state {s} is unreachable from state 0")));
        }
        if let Some(s) = bfs_levels(n, backward).iter().position(Option::is_none) {
            return Err(Error::NotErgodic(format!("state 0 is unreachable from state {s}")));
        }
        // Period of an irreducible chain: gcd of level(u) + 1 - level(v) over edges.
        let mut period = 0usize;
        for u in 0..n {
            let lu = reach_fwd[u].unwrap();
            for v in forward(u) {
                let lv = reach_fwd[v].unwrap();
                period = gcd(period, (lu + 1).abs_diff(lv));
            }
        }
        if period != 1 {
            return Err(Error::NotErgodic(format!("chain is periodic with period {period}")));
        }
        Ok(())
    }
}

fn bfs_levels<I: Iterator<Item = usize>>(n: usize, next: impl Fn(usize) -> I) -> Vec<Option<usize>> {
    let mut level = vec![None; n];
    level[0] = Some(0);
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let l = level[u].unwrap();
        for v in next(u) {
            if level[v].is_none() {
                level[v] = Some(l + 1);
                queue.push_back(v);
            }
        }
    }
    level
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// On-disk MDP description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpFile {
    pub n_states: usize,
    pub kernel: Vec<Vec<f64>>,
    pub expected_reward: Vec<f64>,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

impl MdpFile {
    pub fn into_mdp(self) -> Result<Mdp> {
        if self.kernel.len() != self.n_states {
            return Err(Error::invalid(
                "kernel",
                format!("expected {} rows, got {}", self.n_states, self.kernel.len()),
            ));
        }
        Mdp::new(self.kernel, self.expected_reward, self.gamma, self.r_max)
    }
}

/// One observed transition `(s, r, s')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub s: usize,
    pub r: f64,
    pub s_next: usize,
}

/// The stationary distribution `μ` of a chain.
#[derive(Debug, Clone)]
pub struct StationaryDist {
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl StationaryDist {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }

    /// `max_s |(μP)(s) − μ(s)|`.
    pub fn residual(&self, mdp: &Mdp) -> f64 {
        let n = mdp.n_states();
        (0..n)
            .map(|t| {
                let flow: f64 = (0..n).map(|s| self.probs[s] * mdp.p(s, t)).sum();
                (flow - self.probs[t]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Power iteration from the uniform vector.
pub fn stationary_distribution(mdp: &Mdp) -> Result<StationaryDist> {
    let n = mdp.n_states();
    let mut mu = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut converged = false;
    for _ in 0..POWER_ITERATION_CAP {
        next.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..n {
            let w = mu[s];
            for (t, p) in mdp.row(s).iter().enumerate() {
                next[t] += w * p;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change = mu.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut mu, &mut next);
        if change < POWER_ITERATION_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotErgodic(format!(
            "power iteration did not converge within {POWER_ITERATION_CAP} iterations"
        )));
    }
    let sampler = WeightedIndex::new(&mu).map_err(|e| Error::NotErgodic(e.to_string()))?;
    Ok(StationaryDist { probs: mu, sampler })
}

/// Draws `s ~ μ`, `s' ~ p(·|s)`, with the noiseless reward `r^π(s)`.
pub fn sample_iid<R: Rng + ?Sized>(mdp: &Mdp, mu: &StationaryDist, rng: &mut R) -> Transition {
    let s = mu.sample(rng);
    let s_next = mdp.rows[s].sample(rng);
    Transition {
        s,
        r: mdp.expected_reward[s],
        s_next,
    }
}

/// Advances a trajectory by one step from `s`.
pub fn sample_trajectory_step<R: Rng + ?Sized>(mdp: &Mdp, s: usize, rng: &mut R) -> (Transition, usize) {
    let s_next = mdp.rows[s].sample(rng);
    (
        Transition {
            s,
            r: mdp.expected_reward[s],
            s_next,
        },
        s_next,
    )
}

/// Geometric-ergodicity envelope `sup_s d_TV(P^t(·|s), μ) ≤ κ ρ^t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingEstimate {
    /// Second-largest eigenvalue modulus of the kernel.
    pub rho: f64,
    pub kappa: f64,
}

impl MixingEstimate {
    pub fn envelope(&self, t: usize) -> f64 {
        self.kappa * self.rho.powi(t as i32)
    }
}

/// `sup_s d_TV(P^t(·|s), μ)` for `t = 0..=horizon`, by explicit matrix powering.
pub fn tv_to_stationary(mdp: &Mdp, mu: &StationaryDist, horizon: usize) -> Vec<f64> {
    let n = mdp.n_states();
    let p = mdp.kernel_matrix();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        if t > 0 {
            power = &power * &p;
        }
        let sup = (0..n)
            .map(|s| 0.5 * (0..n).map(|j| (power[(s, j)] - mu.probs[j]).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        out.push(sup);
    }
    out
}

/// ρ from the spectrum; κ as the smallest constant making `κρ^t` dominate the
/// observed total-variation curve up to [`MIXING_HORIZON`] (ignoring values
/// at round-off level).
pub fn mixing_estimate(mdp: &Mdp, mu: &StationaryDist) -> Result<MixingEstimate> {
    let n = mdp.n_states();
    let rho = if n == 1 {
        0.0
    } else {
        let eig = mdp.kernel_matrix().complex_eigenvalues();
        let mut moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
        // Drop the Perron eigenvalue (the one closest to 1).
        let perron = eig
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1.0).norm().total_cmp(&(b.1 - 1.0).norm()))
            .map(|(i, _)| i)
            .unwrap();
        moduli.remove(perron);
        moduli.into_iter().fold(0.0, f64::max)
    };
    if !(rho < 1.0) {
        return Err(Error::NotErgodic(format!("second eigenvalue modulus {rho} is not below 1")));
    }
    let tv = tv_to_stationary(mdp, mu, MIXING_HORIZON);
    let mut kappa = 0.0f64;
    for (t, d) in tv.iter().enumerate() {
        if t > 0 && *d <= TV_FLOOR {
            continue;
        }
        let scale = rho.powi(t as i32);
        if scale > 0.0 {
            kappa = kappa.max(d / scale);
        }
    }
    if kappa == 0.0 {
        // Single-state chain: the envelope is vacuous, any positive κ works.
        kappa = 1.0;
    }
    Ok(MixingEstimate { rho, kappa })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Lane};

    fn two_state(a: f64, b: f64) -> Mdp {
        Mdp::new(vec![vec![1.0 - a, a], vec![b, 1.0 - b]], vec![0.0, 1.0], 0.9, None).unwrap()
    }

    #[test]
    fn folds_degenerate_chain() {
        let c = ControlledMdp::new(vec![vec![vec![1.0]]], vec![vec![vec![1.0]]], vec![vec![1.0]], 0.5, None).unwrap();
        let m = c.fold_policy().unwrap();
        assert_eq!(m.row(0), &[1.0]);
        assert_eq!(m.expected_reward(), &[1.0]);
    }

    #[test]
    fn folds_two_actions() {
        // Action 0 goes to state 0 with reward 0, action 1 goes to state 1 with reward 2.
        let kernel = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]; 2];
        let reward = vec![vec![vec![0.0, 0.0], vec![0.0, 2.0]]; 2];
        let policy = vec![vec![0.5, 0.5]; 2];
        let m = ControlledMdp::new(kernel, reward, policy, 0.9, None).unwrap().fold_policy().unwrap();
        assert_eq!(m.row(0), &[0.5, 0.5]);
        assert_eq!(m.expected_reward()[0], 1.0);
    }

    #[test]
    fn folded_random_rows_are_stochastic() {
        use rand::Rng;
        let mut rng = stream(11, 0, Lane::Environment);
        let (n, k) = (3, 2);
        let mut random_dist = |len: usize| {
            let v: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let kernel: Vec<Vec<Vec<f64>>> = (0..n).map(|_| (0..k).map(|_| random_dist(n)).collect()).collect();
        let policy: Vec<Vec<f64>> = (0..n).map(|_| random_dist(k)).collect();
        let reward = vec![vec![vec![0.5; n]; k]; n];
        let m = ControlledMdp::new(kernel, reward, policy, 0.9, None).unwrap().fold_policy().unwrap();
        for s in 0..n {
            assert!((m.row(s).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_shape_mismatch() {
        let err = ControlledMdp::new(
            vec![vec![vec![1.0]]],
            vec![vec![vec![1.0]]],
            vec![vec![0.5, 0.5]],
            0.5,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid { ref path, .. } if path == "policy[0]"), "{err}");
    }

    #[test]
    fn rejects_bad_rows_and_gamma() {
        assert!(Mdp::new(vec![vec![0.5, 0.6], vec![0.5, 0.5]], vec![0.0; 2], 0.9, None).is_err());
        assert!(Mdp::new(vec![vec![1.0]], vec![0.0], 1.0, None).is_err());
        assert!(Mdp::new(vec![vec![1.0]], vec![2.0], 0.5, Some(1.0)).is_err());
    }

    #[test]
    fn rejects_periodic_and_reducible() {
        let periodic = Mdp::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.0; 2], 0.9, None);
        assert!(matches!(periodic, Err(Error::NotErgodic(_))));
        let reducible = Mdp::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]], vec![0.0; 2], 0.9, None);
        assert!(matches!(reducible, Err(Error::NotErgodic(_))));
    }

    #[test]
    fn stationary_examples() {
        let mu = stationary_distribution(&two_state(0.5, 0.5)).unwrap();
        assert!((mu.probs()[0] - 0.5).abs() < 1e-12);
        let m = two_state(0.1, 0.2);
        let mu = stationary_distribution(&m).unwrap();
        assert!((mu.probs()[0] - 2.0 / 3.0).abs() < 1e-10);
        assert!((mu.probs()[1] - 1.0 / 3.0).abs() < 1e-10);
        assert!(mu.residual(&m) < 1e-10);
        let again = stationary_distribution(&m).unwrap();
        assert_eq!(mu.probs(), again.probs());
    }

    #[test]
    fn mixing_examples() {
        let m = two_state(0.5, 0.5);
        let mu = stationary_distribution(&m).unwrap();
        let mix = mixing_estimate(&m, &mu).unwrap();
        assert!(mix.rho.abs() < 1e-12);

        let m = two_state(0.1, 0.2);
        let mu = stationary_distribution(&m).unwrap();
        let mix = mixing_estimate(&m, &mu).unwrap();
        assert!((mix.rho - 0.7).abs() < 1e-12, "{}", mix.rho);
        for (t, d) in tv_to_stationary(&m, &mu, MIXING_HORIZON).into_iter().enumerate() {
            assert!(d <= mix.envelope(t) + TV_FLOOR);
        }
    }

    #[test]
    fn iid_sampler_on_single_state() {
        let m = Mdp::new(vec![vec![1.0]], vec![3.0], 0.5, None).unwrap();
        let mu = stationary_distribution(&m).unwrap();
        let mut rng = stream(1, 0, Lane::Samples);
        for _ in 0..10 {
            assert_eq!(sample_iid(&m, &mu, &mut rng), Transition { s: 0, r: 3.0, s_next: 0 });
        }
    }

    #[test]
    fn deterministic_row_has_unique_successor() {
        let m = Mdp::new(vec![vec![0.0, 1.0], vec![0.5, 0.5]], vec![0.0, 1.0], 0.9, None).unwrap();
        let mut rng = stream(2, 0, Lane::Samples);
        for _ in 0..20 {
            let (x, next) = sample_trajectory_step(&m, 0, &mut rng);
            assert_eq!((x.s_next, next), (1, 1));
        }
    }

    #[test]
    fn json_errors_name_the_path() {
        let err = Mdp::from_json_str(r#"{"n_states": 1, "kernel": [[1.0]], "gamma": 0.5}"#).unwrap_err();
        assert!(err.to_string().contains("expected_reward"), "{err}");
        let err = Mdp::from_json_str(r#"{"n_states": 2, "kernel": [[1.0, 0.0], [0.5, "x"]], "expected_reward": [0, 0], "gamma": 0.5}"#)
            .unwrap_err();
        assert!(err.to_string().contains("kernel[1][1]"), "{err}");
    }
}
