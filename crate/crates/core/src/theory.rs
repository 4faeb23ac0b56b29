//! Closed-form convergence constants, complexity schedules, the bias bound,
//! the per-sample norm audit, and the conditional-moment counter-example.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Transition;
use crate::model::{dot, FeatureMap, TdModel};

/// The problem-dependent inputs every bound needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub lambda_a: f64,
    pub gamma: f64,
    pub r_max: f64,
    pub kappa: f64,
    pub rho: f64,
}

impl ProblemConstants {
    /// `(1+γ)²`.
    pub fn q(&self) -> f64 {
        (1.0 + self.gamma).powi(2)
    }
}

impl From<&TdModel> for ProblemConstants {
    fn from(m: &TdModel) -> Self {
        Self {
            lambda_a: m.lambda_a,
            gamma: m.gamma,
            r_max: m.r_max,
            kappa: m.mix.kappa,
            rho: m.mix.rho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Iid,
    Markov,
}

/// One admissibility inequality, rendered with its numeric sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub description: String,
    pub holds: bool,
}

impl Condition {
    fn less(name: &str, formula: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            description: format!("{formula}: {lhs:.6e} < {rhs:.6e}"),
            holds: lhs < rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub variant: Variant,
    pub alpha: f64,
    pub batch_size: u64,
    pub radius: f64,
    pub g: f64,
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    /// Per-epoch contraction factor of the squared error (equals `c1`).
    pub contraction_coeff: f64,
    /// Asymptotic error floor; infinite when the denominators are not positive.
    pub error_floor: f64,
    pub admissible: bool,
    pub conditions: Vec<Condition>,
}

impl TheoryConstants {
    /// Bound on `E‖θ̃_m − θ*‖²` after `epochs` epochs.
    pub fn bound_after(&self, epochs: u64, theta0_error: f64) -> f64 {
        self.c1.powf(epochs as f64) * theta0_error + self.error_floor
    }

    pub fn violated(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| !c.holds).collect()
    }
}

fn check_inputs(alpha: f64, batch_size: u64, radius: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    if batch_size == 0 {
        return Err(Error::Precondition("batch size must be positive".into()));
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Precondition(format!("radius must be finite and non-negative, got {radius}")));
    }
    Ok(())
}

fn shared(p: &ProblemConstants, radius: f64) -> (f64, f64, f64) {
    let q = p.q();
    let g = (1.0 + p.gamma) * radius + p.r_max;
    let d1 = 2.0 * q;
    let d2 = 4.0 * (q * radius * radius + p.r_max * p.r_max);
    (g, d1, d2)
}

/// Constants for VRTD with independent samples.
pub fn theorem1_constants(alpha: f64, batch_size: u64, model: &TdModel, radius: f64) -> Result<TheoryConstants> {
    theorem1_from(alpha, batch_size, &ProblemConstants::from(model), radius)
}

pub fn theorem1_from(alpha: f64, batch_size: u64, p: &ProblemConstants, radius: f64) -> Result<TheoryConstants> {
    check_inputs(alpha, batch_size, radius)?;
    let q = p.q();
    let lam = p.lambda_a;
    let m = batch_size as f64;
    let (g, d1, d2) = shared(p, radius);

    let denom = lam - 4.0 * alpha * q;
    let (c1, floor) = if denom > 0.0 {
        let c1 = (4.0 * alpha * q + (4.0 * q * alpha * alpha + 1.0) / (alpha * m)) / denom;
        let floor = if c1 < 1.0 {
            2.0 * d2 * alpha / ((1.0 - c1) * denom * m)
        } else {
            f64::INFINITY
        };
        (c1, floor)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    let m_denom = alpha * (lam - 8.0 * alpha * q);
    let m_bound = if m_denom > 0.0 {
        (4.0 * q * alpha * alpha + 1.0) / m_denom
    } else {
        f64::INFINITY
    };
    let conditions = vec![
        Condition::less("stepsize", "alpha < lambda_A/(8(1+gamma)^2)", alpha, lam / (8.0 * q)),
        Condition {
            name: "batch".into(),
            description: format!(
                "M > (4(1+gamma)^2 alpha^2 + 1)/(alpha(lambda_A - 8 alpha (1+gamma)^2)): {m} > {m_bound:.6e}"
            ),
            holds: m > m_bound,
        },
        Condition::less("contraction", "C1 < 1", c1, 1.0),
    ];
    let admissible = conditions.iter().all(|c| c.holds);
    Ok(TheoryConstants {
        variant: Variant::Iid,
        alpha,
        batch_size,
        radius,
        g,
        d1,
        d2,
        c1,
        c2: None,
        c3: None,
        c4: None,
        contraction_coeff: c1,
        error_floor: floor,
        admissible,
        conditions,
    })
}

/// Constants for VRTD along a single trajectory.
pub fn theorem2_constants(alpha: f64, batch_size: u64, model: &TdModel, radius: f64) -> Result<TheoryConstants> {
    theorem2_from(alpha, batch_size, &ProblemConstants::from(model), radius)
}

pub fn theorem2_from(alpha: f64, batch_size: u64, p: &ProblemConstants, radius: f64) -> Result<TheoryConstants> {
    check_inputs(alpha, batch_size, radius)?;
    if !(p.rho >= 0.0 && p.rho < 1.0) {
        return Err(Error::Precondition(format!("rho must lie in [0, 1), got {}", p.rho)));
    }
    let q = p.q();
    let lam = p.lambda_a;
    let m = batch_size as f64;
    let (g, d1, d2) = shared(p, radius);
    let (rho, kappa) = (p.rho, p.kappa);

    let c2 = 16.0 * (1.0 + (kappa - 1.0) * rho) * (radius * radius * q + p.r_max * p.r_max) / (1.0 - rho);
    let c4 = g * g + 2.0 * rho * kappa * g * g / (1.0 - rho);
    let half = 0.5 * lam - 3.0 * alpha * q;
    let c3 = if half > 0.0 { 3.0 * alpha / half } else { f64::INFINITY };

    let c1_denom = 0.5 * alpha * lam - 3.0 * alpha * alpha * q;
    let c1 = if c1_denom > 0.0 {
        (1.0 / m + 3.0 * alpha * alpha * q) / c1_denom
    } else {
        f64::INFINITY
    };
    let floor = if c1 < 1.0 && half > 0.0 {
        (3.0 * c4 * alpha + c2 / lam) / ((1.0 - c1) * half * m)
    } else {
        f64::INFINITY
    };

    let m_denom = 0.5 * alpha * lam - 6.0 * alpha * alpha * q;
    let m_bound = if m_denom > 0.0 { 1.0 / m_denom } else { f64::INFINITY };
    let conditions = vec![
        Condition::less("stepsize", "alpha < lambda_A/(12(1+gamma)^2)", alpha, lam / (12.0 * q)),
        Condition {
            name: "batch".into(),
            description: format!("M > 1/(0.5 alpha lambda_A - 6 alpha^2 (1+gamma)^2): {m} > {m_bound:.6e}"),
            holds: m > m_bound,
        },
        Condition::less("contraction", "C1 < 1", c1, 1.0),
    ];
    let admissible = conditions.iter().all(|c| c.holds);
    Ok(TheoryConstants {
        variant: Variant::Markov,
        alpha,
        batch_size,
        radius,
        g,
        d1,
        d2,
        c1,
        c2: Some(c2),
        c3: Some(c3),
        c4: Some(c4),
        contraction_coeff: c1,
        error_floor: floor,
        admissible,
        conditions,
    })
}

/// Upper bound on the expected bias `E[(θ−θ*)ᵀ(g_M(θ) − g(θ))]` of a
/// length-`M` trajectory batch at a fixed `θ` in the radius-`R` ball.
pub fn lemma1_bias_bound(p: &ProblemConstants, theta_error: f64, batch_size: u64, radius: f64) -> f64 {
    let q = p.q();
    p.lambda_a / 4.0 * theta_error
        + 8.0 * (1.0 + (p.kappa - 1.0) * p.rho) / (p.lambda_a * (1.0 - p.rho) * batch_size as f64)
            * (radius * radius * q + p.r_max * p.r_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleVariant {
    VrtdIid,
    VrtdMarkov,
    TdIid,
    TdMarkov,
}

impl ScheduleVariant {
    pub const ALL: [ScheduleVariant; 4] = [Self::VrtdIid, Self::VrtdMarkov, Self::TdIid, Self::TdMarkov];

    pub fn name(self) -> &'static str {
        match self {
            Self::VrtdIid => "vrtd_iid",
            Self::VrtdMarkov => "vrtd_markov",
            Self::TdIid => "td_iid",
            Self::TdMarkov => "td_markov",
        }
    }
}

/// Unspecified constants in the vanilla TD error bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdConstants {
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
}

impl Default for TdConstants {
    fn default() -> Self {
        Self { c5: 1.0, c6: 1.0, c7: 1.0 }
    }
}

/// Stepsize and iteration budget reaching `E‖θ − θ*‖² ≤ ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub variant: ScheduleVariant,
    pub epsilon: f64,
    pub alpha: f64,
    /// `None` for vanilla TD.
    pub batch_size: Option<u64>,
    /// Epochs for VRTD, plain iterations for TD.
    pub iterations: u64,
    pub total_pseudo_gradients: u64,
    pub c1: Option<f64>,
    pub notes: Vec<String>,
}

/// Solves `M ≥ rhs(M)` for the smallest admissible integer `M ≥ lo`.
///
/// `rhs` is non-increasing in `M` because `C1` falls with `M`, so the
/// predicate is monotone and bisection applies.
fn smallest_consistent_m(lo: u64, ok: impl Fn(u64) -> bool) -> Result<u64> {
    let lo = lo.max(1);
    if ok(lo) {
        return Ok(lo);
    }
    let mut hi = lo;
    let mut bad = lo;
    loop {
        hi = hi.checked_mul(2).ok_or_else(|| {
            Error::Precondition("no admissible batch size below 2^64; epsilon too small".into())
        })?;
        if ok(hi) {
            break;
        }
        bad = hi;
    }
    while hi - bad > 1 {
        let mid = bad + (hi - bad) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            bad = mid;
        }
    }
    Ok(hi)
}

fn epochs_for(theta0_error: f64, epsilon: f64, c1: f64) -> u64 {
    let ratio = 2.0 * theta0_error / epsilon;
    if ratio <= 1.0 || c1 <= 0.0 {
        return 0;
    }
    (ratio.ln() / (1.0 / c1).ln()).ceil().max(0.0) as u64
}

fn ceil_u64(x: f64) -> u64 {
    if x <= 0.0 {
        0
    } else {
        x.ceil() as u64
    }
}

/// Complexity schedule for the requested method.
///
/// The batch-size formulas for VRTD involve `C1`, which itself depends on
/// `M`. The returned `M` is the smallest integer that satisfies the formula
/// with `C1` evaluated at that same `M`.
pub fn corollary_schedule(
    epsilon: f64,
    variant: ScheduleVariant,
    p: &ProblemConstants,
    radius: f64,
    theta0_error: f64,
    td: TdConstants,
) -> Result<Schedule> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(theta0_error >= 0.0 && theta0_error.is_finite()) {
        return Err(Error::Precondition(format!("initial error must be finite, got {theta0_error}")));
    }
    let q = p.q();
    let lam = p.lambda_a;
    let mut notes = Vec::new();
    match variant {
        ScheduleVariant::VrtdIid => {
            let alpha = lam / (16.0 * q);
            let lo = ceil_u64(33.0 * q / (lam * lam));
            let m = smallest_consistent_m(lo, |m| {
                let Ok(k) = theorem1_from(alpha, m, p, radius) else { return false };
                k.admissible && m as f64 >= k.d2 / (3.0 * (1.0 - k.c1) * epsilon)
            })?;
            let k = theorem1_from(alpha, m, p, radius)?;
            let epochs = epochs_for(theta0_error, epsilon, k.c1);
            Ok(Schedule {
                variant,
                epsilon,
                alpha,
                batch_size: Some(m),
                iterations: epochs,
                total_pseudo_gradients: 2 * epochs * m,
                c1: Some(k.c1),
                notes,
            })
        }
        ScheduleVariant::VrtdMarkov => {
            let alpha = lam / (24.0 * q);
            let probe = theorem2_from(alpha, 1, p, radius)?;
            let (c2, c4) = (probe.c2.unwrap_or(0.0), probe.c4.unwrap_or(0.0));
            let scale = (1.0 / epsilon).max(1.0 / (epsilon * lam * lam));
            let m = smallest_consistent_m(1, |m| {
                let Ok(k) = theorem2_from(alpha, m, p, radius) else { return false };
                k.admissible && m as f64 >= ((32.0 * c2 + 4.0 * c4) / (3.0 * (1.0 - k.c1)) + 100.0 * q) * scale
            })?;
            let k = theorem2_from(alpha, m, p, radius)?;
            let epochs = epochs_for(theta0_error, epsilon, k.c1);
            Ok(Schedule {
                variant,
                epsilon,
                alpha,
                batch_size: Some(m),
                iterations: epochs,
                total_pseudo_gradients: 2 * epochs * m,
                c1: Some(k.c1),
                notes,
            })
        }
        ScheduleVariant::TdIid => {
            let alpha = (lam / (4.0 * q)).min(2.0 / lam).min(epsilon * lam / (4.0 * td.c5));
            let ratio = 2.0 * theta0_error / epsilon;
            let t = if ratio > 1.0 { ceil_u64(2.0 / (lam * alpha) * ratio.ln()) } else { 0 };
            Ok(Schedule {
                variant,
                epsilon,
                alpha,
                batch_size: None,
                iterations: t,
                total_pseudo_gradients: t,
                c1: None,
                notes,
            })
        }
        ScheduleVariant::TdMarkov => {
            let c8 = lam * (1.0 / td.c6).min(1.0 / (6.0 * td.c7));
            let alpha = if c8 * epsilon < 1.0 {
                (c8 * epsilon / (1.0 / (c8 * epsilon)).ln()).min(1.0 / lam)
            } else {
                notes.push(format!("C8*epsilon = {:.6e} >= 1; using alpha = 1/lambda_A", c8 * epsilon));
                1.0 / lam
            };
            let ratio = 3.0 * theta0_error / epsilon;
            let t = if ratio > 1.0 { ceil_u64(2.0 / (lam * alpha) * ratio.ln()) } else { 0 };
            Ok(Schedule {
                variant,
                epsilon,
                alpha,
                batch_size: None,
                iterations: t,
                total_pseudo_gradients: t,
                c1: None,
                notes,
            })
        }
    }
}

/// Outcome of the per-sample norm audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaAudit {
    pub a_norm: f64,
    pub a_bound: f64,
    pub b_norm: f64,
    pub b_bound: f64,
    pub g_norm: f64,
    pub g_bound: f64,
    pub g_norm_sq: f64,
    pub g_sq_bound: f64,
    pub failures: Vec<String>,
}

impl LemmaAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

const AUDIT_SLACK: f64 = 1e-12;

/// Checks the four per-sample bounds: `‖A_x‖ ≤ 1+γ`, `‖b_x‖ ≤ r_max`,
/// `‖g_x(θ)‖ ≤ G` and `‖g_x(θ)‖² ≤ D1‖θ−θ*‖² + D2`.
///
/// Both `θ` and `θ*` must lie in the radius-`R` ball.
pub fn lemma_bound_check(
    x: &Transition,
    features: &FeatureMap,
    gamma: f64,
    theta: &[f64],
    theta_star: &[f64],
    radius: f64,
    r_max: f64,
) -> Result<LemmaAudit> {
    let d = features.dim();
    if theta.len() != d {
        return Err(Error::Dimension { expected: d, got: theta.len() });
    }
    if theta_star.len() != d {
        return Err(Error::Dimension { expected: d, got: theta_star.len() });
    }
    let norm = dot(theta, theta).sqrt();
    if norm > radius * (1.0 + AUDIT_SLACK) {
        return Err(Error::Precondition(format!("|theta| = {norm} exceeds radius {radius}")));
    }
    let star_norm = dot(theta_star, theta_star).sqrt();
    if star_norm > radius * (1.0 + AUDIT_SLACK) {
        return Err(Error::Precondition(format!("|theta*| = {star_norm} exceeds radius {radius}")));
    }
    let q = (1.0 + gamma).powi(2);
    let a_norm = features.sample_matrix_norm(x, gamma);
    let b_norm = x.r.abs() * dot(features.row(x.s), features.row(x.s)).sqrt();
    let mut g = vec![0.0; d];
    features.pseudo_gradient_into(x, gamma, theta, &mut g);
    let g_norm_sq = dot(&g, &g);
    let err: f64 = theta.iter().zip(theta_star).map(|(a, b)| (a - b) * (a - b)).sum();

    let a_bound = 1.0 + gamma;
    let b_bound = r_max;
    let g_bound = (1.0 + gamma) * radius + r_max;
    let g_sq_bound = 2.0 * q * err + 4.0 * (q * radius * radius + r_max * r_max);
    let mut failures = Vec::new();
    let mut check = |name: &str, v: f64, bound: f64| {
        if v > bound + AUDIT_SLACK * (1.0 + bound) {
            failures.push(format!("{name}: {v:.6e} > {bound:.6e}"));
        }
    };
    check("|A_x| <= 1+gamma", a_norm, a_bound);
    check("|b_x| <= r_max", b_norm, b_bound);
    check("|g_x| <= G", g_norm_sq.sqrt(), g_bound);
    check("|g_x|^2 <= D1|theta-theta*|^2 + D2", g_norm_sq, g_sq_bound);
    Ok(LemmaAudit {
        a_norm,
        a_bound,
        b_norm,
        b_bound,
        g_norm: g_norm_sq.sqrt(),
        g_bound,
        g_norm_sq,
        g_sq_bound,
        failures,
    })
}

pub type Rational = Ratio<i64>;

/// The fixed scenario: a batch of three draws of `v ~ U[−3, 3]`.
pub const COUNTEREXAMPLE_BATCH: [i64; 3] = [1, 2, -3];
pub const COUNTEREXAMPLE_SUPPORT: (i64, i64) = (-3, 3);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub batch: [i64; 3],
    /// `E v` under the sampling distribution.
    pub mean: Rational,
    /// `E v²` under the sampling distribution.
    pub second_moment: Rational,
    /// Mean of the batch.
    pub batch_mean: Rational,
    /// Mean of the squared batch entries.
    pub batch_second_moment: Rational,
    /// `batch_second_moment − second_moment`.
    pub coefficient: Rational,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
}

/// Evaluates `(E(v²|F) − E v²)·δ² ≤ 0` on the fixed scenario.
///
/// The inequality would hold if the batch moments matched the population
/// moments; here they do not, so it fails for every `δ ≠ 0`.
pub fn counterexample_eval(delta: f64) -> Counterexample {
    let (a, b) = COUNTEREXAMPLE_SUPPORT;
    let (a, b) = (Rational::from(a), Rational::from(b));
    let mean = (a + b) / 2;
    let second_moment = (a * a + a * b + b * b) / 3;
    let n = COUNTEREXAMPLE_BATCH.len() as i64;
    let batch_mean = COUNTEREXAMPLE_BATCH.iter().map(|&v| Rational::from(v)).sum::<Rational>() / n;
    let batch_second_moment = COUNTEREXAMPLE_BATCH.iter().map(|&v| Rational::from(v * v)).sum::<Rational>() / n;
    let coefficient = batch_second_moment - second_moment;
    let coef_f = *coefficient.numer() as f64 / *coefficient.denom() as f64;
    let lhs = coef_f * delta * delta;
    let rhs = 0.0;
    let violated = coefficient > Rational::from(0) && delta.abs() > 0.0;
    Counterexample {
        batch: COUNTEREXAMPLE_BATCH,
        mean,
        second_moment,
        batch_mean,
        batch_second_moment,
        coefficient,
        delta,
        lhs,
        rhs,
        violated,
    }
}

impl Counterexample {
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: v ~ U[{}, {}], batch {:?}", COUNTEREXAMPLE_SUPPORT.0, COUNTEREXAMPLE_SUPPORT.1, self.batch);
        let _ = writeln!(s, "E v          = {}", self.mean);
        let _ = writeln!(s, "E v^2        = {}", self.second_moment);
        let _ = writeln!(s, "E(v | F)     = {}", self.batch_mean);
        let _ = writeln!(s, "E(v^2 | F)   = {}", self.batch_second_moment);
        let _ = writeln!(s, "delta        = {:.16e}", self.delta);
        let _ = writeln!(s, "lhs          = ({}) * delta^2 = {:.16e}", self.coefficient, self.lhs);
        let _ = writeln!(s, "rhs          = {:.16e}", self.rhs);
        let verdict = if self.violated { "inequality violated" } else { "inequality holds" };
        let _ = writeln!(s, "verdict      = {verdict}");
        s
    }
}

/// Everything the `bounds` command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub problem: ProblemConstants,
    pub theorem1: TheoryConstants,
    pub theorem2: TheoryConstants,
    pub lemma1_bias_bound: f64,
    pub schedules: Vec<Schedule>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.16e}"))
}

impl BoundsReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let p = &self.problem;
        let _ = writeln!(s, "{:<14} {:<58} value", "constant", "formula");
        let mut row = |name: &str, formula: &str, value: String| {
            let _ = writeln!(s, "{name:<14} {formula:<58} {value}");
        };
        row("lambda_A", "|lambda_max(A + A^T)|", format!("{:.16e}", p.lambda_a));
        row("gamma", "discount", format!("{:.16e}", p.gamma));
        row("r_max", "max |r(s)|", format!("{:.16e}", p.r_max));
        row("rho", "second-largest eigenvalue modulus of P", format!("{:.16e}", p.rho));
        row("kappa", "max_t sup_s d_TV(P^t(s,.), mu) / rho^t", format!("{:.16e}", p.kappa));
        for k in [&self.theorem1, &self.theorem2] {
            let tag = match k.variant {
                Variant::Iid => "iid",
                Variant::Markov => "markov",
            };
            row(&format!("[{tag}] alpha"), "stepsize", format!("{:.16e}", k.alpha));
            row(&format!("[{tag}] M"), "batch size", k.batch_size.to_string());
            row(&format!("[{tag}] R"), "projection radius", format!("{:.16e}", k.radius));
            row(&format!("[{tag}] G"), "(1+gamma)R + r_max", format!("{:.16e}", k.g));
            row(&format!("[{tag}] D1"), "2(1+gamma)^2", format!("{:.16e}", k.d1));
            row(&format!("[{tag}] D2"), "4((1+gamma)^2 R^2 + r_max^2)", format!("{:.16e}", k.d2));
            let c1_formula = match k.variant {
                Variant::Iid => "(4aq + (4qa^2+1)/(aM)) / (lambda_A - 4aq), q=(1+gamma)^2",
                Variant::Markov => "(1/M + 3a^2 q) / (0.5 a lambda_A - 3a^2 q)",
            };
            row(&format!("[{tag}] C1"), c1_formula, format!("{:.16e}", k.c1));
            if k.variant == Variant::Markov {
                row(&format!("[{tag}] C2"), "16[1+(kappa-1)rho][R^2 q + r_max^2]/(1-rho)", fmt_opt(k.c2));
                row(&format!("[{tag}] C3"), "3a/(0.5 lambda_A - 3aq)", fmt_opt(k.c3));
                row(&format!("[{tag}] C4"), "G^2 + 2 rho kappa G^2/(1-rho)", fmt_opt(k.c4));
            }
            let floor_formula = match k.variant {
                Variant::Iid => "2 D2 a / ((1-C1)(lambda_A - 4aq) M)",
                Variant::Markov => "(3 C4 a + C2/lambda_A) / ((1-C1)(0.5 lambda_A - 3aq) M)",
            };
            row(&format!("[{tag}] floor"), floor_formula, format!("{:.16e}", k.error_floor));
            row(&format!("[{tag}] verdict"), "admissible iff every condition holds", if k.admissible { "admissible" } else { "INADMISSIBLE" }.into());
            for c in &k.conditions {
                let mark = if c.holds { "ok" } else { "VIOLATED" };
                row(&format!("[{tag}]   {}", c.name), &c.description, mark.into());
            }
        }
        row(
            "bias bound",
            "(lambda_A/4)|theta-theta*|^2 + 8[1+(kappa-1)rho]/(lambda_A(1-rho)M)[..]",
            format!("{:.16e}", self.lemma1_bias_bound),
        );
        for sch in &self.schedules {
            let m = sch.batch_size.map_or_else(|| "-".into(), |m| m.to_string());
            let _ = writeln!(
                s,
                "schedule {:<12} eps={:.3e} alpha={:.6e} M={} iterations={} total={}",
                sch.variant.name(),
                sch.epsilon,
                sch.alpha,
                m,
                sch.iterations,
                sch.total_pseudo_gradients
            );
            for n in &sch.notes {
                let _ = writeln!(s, "  note: {n}");
            }
        }
        s
    }
}
