//! Closed-form mixing and lifting bounds, and a one-chain comparison report.
//!
//! Evaluators (natural logarithms throughout):
//!
//! - conductance sandwich: `1/(4Φ) ≤ τ ≤ (32/(γΦ²)) · log(4/π*) · log(2/√β)`,
//!   the upper half valid for `1/2`-lazy chains with `Φ ≤ 1/4` and a
//!   certified `(β, γ)` pair;
//! - square-root lift lower bounds
//!   `τ̂ ≥ √γ / (16 √(2 log(4/π*) log(2/√β))) · √τ` (the `16√2` form) and
//!   `τ̂ ≥ √γ / (32 √(log(4/π*) log(2/√β))) · √τ` (the `32` form) — the two
//!   constants disagree by `√2` and both are reported, never reconciled;
//! - the classical lift lower bound
//!   `τ̂ ≥ (1/(10√30)) √(−1/log(min_x π(x))) · √τ`, whose coefficient decays
//!   with the state-space size.
//!
//! A `log(√β/2)` factor appears in some statements of the sandwich and of
//! the `32`-form bound; since `√β/2 < 1` that factor is negative as
//! printed, so every evaluator here uses its positive mirror `log(2/√β)`.
//! The report discloses this reading.

use crate::chain::{mixing_profile, FiniteChain};
use crate::conductance::{conductance_exact, conductance_sweep, CutMethod};
use crate::decomposition::{
    certify_beta_gamma, pi_star, CertifiedConstants, CertifyMode, KernelDecomposition,
};
use crate::{Error, Result};

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidParameter(format!("{name} = {v} outside (0,1]")));
    }
    Ok(())
}

/// Evolving-set upper bound `(32/(γΦ²)) log(4/π*) log(2/√β)` with its
/// `Φ ≤ 1/4` applicability flag.
#[derive(Debug, Clone, Copy)]
pub struct UpperBound {
    pub value: f64,
    /// The hypothesis `Φ ≤ 1/4` holds; when false the value is only
    /// meaningful under an explicit waiver.
    pub applicable: bool,
}

/// Upper half of the conductance sandwich.
pub fn evolving_set_upper_bound(
    phi: f64,
    gamma: f64,
    beta: f64,
    pi_star: f64,
) -> Result<UpperBound> {
    check_unit("phi", phi)?;
    check_unit("gamma", gamma)?;
    check_unit("beta", beta)?;
    check_unit("pi_star", pi_star)?;
    let value = 32.0 / (gamma * phi * phi) * (4.0 / pi_star).ln() * (2.0 / beta.sqrt()).ln();
    Ok(UpperBound { value, applicable: phi <= 0.25 })
}

/// Lift lower bound, `16√2` form: `√γ √τ / (16 √(2 log(4/π*) log(2/√β)))`.
pub fn lift_lower_bound_thm1(tau: f64, gamma: f64, beta: f64, pi_star: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::InvalidParameter(format!("tau = {tau} negative")));
    }
    check_unit("gamma", gamma)?;
    check_unit("beta", beta)?;
    check_unit("pi_star", pi_star)?;
    let denom = 16.0 * (2.0 * (4.0 / pi_star).ln() * (2.0 / beta.sqrt()).ln()).sqrt();
    Ok(gamma.sqrt() / denom * tau.sqrt())
}

/// Lift lower bound, `32` form: `√γ √τ / (32 √(log(4/π*) log(2/√β)))`.
/// Always `1/√2` times the `16√2` form; both are reported side by side.
pub fn lift_lower_bound_thm3(tau: f64, gamma: f64, beta: f64, pi_star: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::InvalidParameter(format!("tau = {tau} negative")));
    }
    check_unit("gamma", gamma)?;
    check_unit("beta", beta)?;
    check_unit("pi_star", pi_star)?;
    let denom = 32.0 * ((4.0 / pi_star).ln() * (2.0 / beta.sqrt()).ln()).sqrt();
    Ok(gamma.sqrt() / denom * tau.sqrt())
}

/// Classical lift lower bound `√τ √(−1/log(min_pi)) / (10√30)`.
pub fn clp_lower_bound(tau: f64, min_pi: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::InvalidParameter(format!("tau = {tau} negative")));
    }
    if !(min_pi > 0.0 && min_pi < 1.0) {
        return Err(Error::InvalidParameter(format!("min_pi = {min_pi} outside (0,1)")));
    }
    Ok(tau.sqrt() * (-1.0 / min_pi.ln()).sqrt() / (10.0 * 30.0f64.sqrt()))
}

/// Options for [`compare_bounds`].
#[derive(Debug, Clone)]
pub struct BoundOptions {
    /// β at which to certify γ.
    pub beta: f64,
    pub certify_mode: CertifyMode,
    /// State cap for exact conductance; larger chains fall back to the
    /// sweep heuristic (flagged).
    pub max_exact_states: usize,
    /// Iteration cap for the mixing time.
    pub iteration_cap: usize,
    /// Evaluate bounds even when laziness or the `Φ ≤ 1/4` hypothesis fail.
    pub waive_assumptions: bool,
    /// Sweep budget when falling back to heuristic conductance.
    pub sweep_budget: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            beta: 0.25,
            certify_mode: CertifyMode::Exact,
            max_exact_states: crate::DEFAULT_MAX_EXACT_STATES,
            iteration_cap: crate::DEFAULT_ITERATION_CAP,
            waive_assumptions: false,
            sweep_budget: 10_000,
        }
    }
}

/// Everything [`compare_bounds`] measured and evaluated on one chain.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: usize,
    pub lazy_level: f64,
    pub reversible: bool,
    /// Exact mixing time; `None` if the iteration cap was hit (see `notes`).
    pub tau: Option<usize>,
    pub phi: f64,
    pub phi_method: CutMethod,
    pub pi_star: f64,
    pub min_pi: f64,
    pub certificate: CertifiedConstants,
    /// `1/(4Φ)`.
    pub conductance_lower: f64,
    /// Upper sandwich bound; absent when assumptions failed without waiver.
    pub evolving_set_upper: Option<f64>,
    /// Laziness `δ ≥ 1/2` holds.
    pub lazy_ok: bool,
    /// `Φ ≤ 1/4` holds.
    pub phi_condition_ok: bool,
    pub waived: bool,
    /// Lift lower bounds evaluated at the measured τ (`16√2` and `32`
    /// forms), absent without a τ or under failed, unwaived assumptions.
    pub thm1_lower: Option<f64>,
    pub thm3_lower: Option<f64>,
    /// Classical bound at the measured τ.
    pub clp_lower: Option<f64>,
    /// Per-√τ coefficients of the three lift bounds (τ-independent).
    pub thm1_coefficient: f64,
    pub thm3_coefficient: f64,
    pub clp_coefficient: f64,
    /// Supplied measured mixing time of a lift, if any.
    pub lift_tau: Option<f64>,
    /// Failed checks: sandwich violations, lift lower bounds exceeding the
    /// measured τ̂. Empty means every requested check passed.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn all_passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluate every bound on one chain: measure τ and Φ, certify `(β, γ)`,
/// take `π*` from the supplied representation, and cross-check the sandwich.
/// When `lift_tau` (a measured mixing time of some lift) is supplied, any
/// lift lower bound exceeding it is recorded as a violation.
pub fn compare_bounds(
    chain: &FiniteChain,
    decomp: &KernelDecomposition,
    lift_tau: Option<f64>,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    let n = chain.n();
    let mut notes = Vec::new();
    let mut violations = Vec::new();

    let pi = chain.stationary_distribution();
    let ps = pi_star(decomp, &pi)?;
    let min_pi = chain.stationary().iter().cloned().fold(f64::INFINITY, f64::min);
    let cert = certify_beta_gamma(chain, opts.beta, opts.certify_mode)?;
    if cert.vacuous {
        notes.push(format!(
            "certificate at β = {} is vacuous (no nonempty set fits); γ = 1",
            opts.beta
        ));
    }

    let cut = match conductance_exact(chain, opts.max_exact_states) {
        Ok(c) => c,
        Err(Error::TooManyStates { .. }) => {
            notes.push("conductance via sweep heuristic (upper bound)".into());
            conductance_sweep(chain, &[], opts.sweep_budget)?
        }
        Err(e) => return Err(e),
    };
    let phi = cut.value;

    let tau = match mixing_profile(chain, 0.25, opts.iteration_cap) {
        Ok(p) => Some(p.tau),
        Err(Error::NotMixed { cap, last_tv }) => {
            notes.push(format!("mixing time not reached within {cap} steps (TV {last_tv})"));
            None
        }
        Err(e) => return Err(e),
    };

    let lazy_ok = chain.lazy_level() >= 0.5 - 1e-12;
    let upper = evolving_set_upper_bound(phi, cert.gamma, cert.beta, ps)?;
    let phi_condition_ok = upper.applicable;
    let assumptions_ok = lazy_ok && phi_condition_ok;
    if !lazy_ok {
        notes.push(format!("laziness δ = {} < 1/2", chain.lazy_level()));
    }
    if !phi_condition_ok {
        notes.push(format!("Φ = {phi} > 1/4"));
    }

    let conductance_lower = 1.0 / (4.0 * phi);
    let evolving_set_upper = if assumptions_ok || opts.waive_assumptions {
        Some(upper.value)
    } else {
        None
    };

    if let (Some(t), Some(u)) = (tau, evolving_set_upper) {
        let t = t as f64;
        if conductance_lower > t {
            violations.push(format!("sandwich lower failed: 1/(4Φ) = {conductance_lower} > τ = {t}"));
        }
        if t > u {
            violations.push(format!("sandwich upper failed: τ = {t} > bound = {u}"));
        }
    }

    let thm1_coefficient = lift_lower_bound_thm1(1.0, cert.gamma, cert.beta, ps)?;
    let thm3_coefficient = lift_lower_bound_thm3(1.0, cert.gamma, cert.beta, ps)?;
    let clp_coefficient = clp_lower_bound(1.0, min_pi)?;

    let (thm1_lower, thm3_lower, clp_lower_v) = match tau {
        Some(t) if assumptions_ok || opts.waive_assumptions => {
            let t = t as f64;
            (
                Some(lift_lower_bound_thm1(t, cert.gamma, cert.beta, ps)?),
                Some(lift_lower_bound_thm3(t, cert.gamma, cert.beta, ps)?),
                Some(clp_lower_bound(t, min_pi)?),
            )
        }
        Some(t) => {
            let t = t as f64;
            (None, None, Some(clp_lower_bound(t, min_pi)?))
        }
        None => (None, None, None),
    };

    if let Some(measured) = lift_tau {
        for (name, bound) in
            [("16√2-form", thm1_lower), ("32-form", thm3_lower), ("classical", clp_lower_v)]
        {
            if let Some(b) = bound {
                if measured < b {
                    violations.push(format!(
                        "lift lower bound violated: measured τ̂ = {measured} < {name} bound {b}"
                    ));
                }
            }
        }
    }

    Ok(BoundReport {
        n,
        lazy_level: chain.lazy_level(),
        reversible: chain.is_reversible(),
        tau,
        phi,
        phi_method: cut.method,
        pi_star: ps,
        min_pi,
        certificate: cert,
        conductance_lower,
        evolving_set_upper,
        lazy_ok,
        phi_condition_ok,
        waived: opts.waive_assumptions,
        thm1_lower,
        thm3_lower,
        clp_lower: clp_lower_v,
        thm1_coefficient,
        thm3_coefficient,
        clp_coefficient,
        lift_tau,
        violations,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{lazy_ball_walk, two_state};
    use crate::decomposition::canonical_decomposition;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn upper_bound_formula_and_scaling() {
        // Doubling γ halves the bound.
        let b1 = evolving_set_upper_bound(0.1, 0.25, 0.1, 0.2).unwrap().value;
        let b2 = evolving_set_upper_bound(0.1, 0.5, 0.1, 0.2).unwrap().value;
        assert_relative_eq!(b1, 2.0 * b2, max_relative = 1e-12);
        // π* ≤ 1 keeps the log factor at least log 4.
        let floor = evolving_set_upper_bound(0.25, 1.0, 1.0, 1.0).unwrap().value;
        assert!(floor >= 32.0 / (0.25 * 0.25) * 4.0f64.ln() * (2.0f64).ln() - 1e-9);
        assert!(!evolving_set_upper_bound(0.3, 0.5, 0.1, 0.2).unwrap().applicable);
        assert!(evolving_set_upper_bound(0.25, 0.5, 0.1, 0.2).unwrap().applicable);
    }

    #[test]
    fn thm1_coefficient_ball_walk_constants() {
        // γ = 3/4, π* = 1/8, β = 1/192 give coefficient ≈ 0.0113:
        // √0.75 / (16·√(2·ln 32·ln(2√192))).
        let c = lift_lower_bound_thm1(1.0, 0.75, 1.0 / 192.0, 0.125).unwrap();
        assert_abs_diff_eq!(c, 0.0113, epsilon = 5e-5);
        assert_eq!(lift_lower_bound_thm1(0.0, 0.75, 1.0 / 192.0, 0.125).unwrap(), 0.0);
    }

    #[test]
    fn thm1_coefficient_decreases_with_pi_star() {
        let big = lift_lower_bound_thm1(1.0, 0.5, 0.01, 0.5).unwrap();
        let small = lift_lower_bound_thm1(1.0, 0.5, 0.01, 0.05).unwrap();
        assert!(small < big);
    }

    #[test]
    fn thm3_is_fixed_multiple_of_thm1() {
        // 16√2 vs 32: the 32-form is exactly 1/√2 of the 16√2-form.
        for (tau, gamma, beta, ps) in
            [(100.0, 0.75, 1.0 / 192.0, 0.125), (7.0, 0.3, 0.02, 0.4), (1.0, 1.0, 1.0, 1.0)]
        {
            let t1 = lift_lower_bound_thm1(tau, gamma, beta, ps).unwrap();
            let t3 = lift_lower_bound_thm3(tau, gamma, beta, ps).unwrap();
            assert_relative_eq!(t3, t1 / 2.0f64.sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn both_lift_bounds_scale_as_sqrt_tau() {
        for f in [
            lift_lower_bound_thm1 as fn(f64, f64, f64, f64) -> Result<f64>,
            lift_lower_bound_thm3,
        ] {
            let b1 = f(25.0, 0.5, 0.01, 0.3).unwrap();
            let b4 = f(100.0, 0.5, 0.01, 0.3).unwrap();
            assert_abs_diff_eq!(b4, 2.0 * b1, epsilon = 1e-12);
        }
    }

    #[test]
    fn clp_bound_examples() {
        // min_pi = 1/16, τ = 100: 10·√(1/ln 16)/(10√30) ≈ 0.1097.
        let v = clp_lower_bound(100.0, 1.0 / 16.0).unwrap();
        assert_abs_diff_eq!(v, 0.1097, epsilon = 5e-5);
        assert_eq!(clp_lower_bound(0.0, 0.2).unwrap(), 0.0);
        assert!(clp_lower_bound(10.0, 1.0).is_err());
        // Coefficient decays as the state space blows up.
        assert!(clp_lower_bound(1.0, 1e-9).unwrap() < clp_lower_bound(1.0, 1e-2).unwrap());
    }

    #[test]
    fn compare_bounds_two_state_sandwich() {
        let chain = two_state(0.25);
        let decomp = canonical_decomposition(&chain).unwrap();
        let opts = BoundOptions { beta: 0.5, ..Default::default() };
        let report = compare_bounds(&chain, &decomp, None, &opts).unwrap();
        assert_eq!(report.tau, Some(2));
        assert_abs_diff_eq!(report.phi, 0.25);
        assert!(report.phi_condition_ok);
        assert!(report.lazy_ok);
        assert!(report.all_passed(), "violations: {:?}", report.violations);
        let upper = report.evolving_set_upper.unwrap();
        assert!(report.conductance_lower <= 2.0 && 2.0 <= upper);
    }

    #[test]
    fn compare_bounds_flags_lift_violation() {
        let chain = lazy_ball_walk(16, 1).unwrap();
        let decomp = canonical_decomposition(&chain).unwrap();
        let opts = BoundOptions { beta: 1.0 / 16.0, ..Default::default() };
        // An absurdly small measured lift mixing time must be flagged.
        let report = compare_bounds(&chain, &decomp, Some(1e-6), &opts).unwrap();
        assert!(!report.all_passed());
    }
}
