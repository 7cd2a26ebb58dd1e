//! Lifted chains: exact verification of the defining projection identity,
//! the momentum lift of the cycle walk, and the conductance contraction
//! check.
//!
//! A chain `(Ω̂, K̂, π̂)` with a total projection `f : Ω̂ → Ω` is a lift of
//! `(Ω, K, π)` when starting from the restriction of `π̂` to any fiber
//! bundle and taking one step projects to one step of the base chain. On
//! finite spaces this reduces, by linearity in the set indicators, to the
//! per-pair fiber-sum identity
//!
//! ```text
//! Σ_{x̂ ∈ f⁻¹(s)} π̂(x̂) K̂(x̂, f⁻¹(y)) = π(s) K(s, y)   for all s, y ∈ Ω,
//! ```
//!
//! together with the marginal condition `π(s) = π̂(f⁻¹(s))`. Both residuals
//! are checked exhaustively over all `(s, y)` pairs.
//!
//! Conductance can only shrink under lifting: `Φ̂ ≤ Φ`. The check computes
//! the base conductance exactly and the lift side either exactly (small
//! lifts) or as a heuristic upper bound `Û ≥ Φ̂`; `Û ≤ Φ` still certifies
//! the contraction, while `Û > Φ` is inconclusive and reported as such.

use crate::chain::{lazy_cycle, FiniteChain};
use crate::conductance::{
    conductance_exact, conductance_sweep, set_conductance, CutMethod, SweepFamily,
};
use crate::{Error, Result};

/// A chain on a larger space together with its projection onto a base chain.
#[derive(Debug, Clone)]
pub struct LiftedChain {
    pub hat: FiniteChain,
    pub base: FiniteChain,
    /// `projection[x̂]` is the base-state index of hat state `x̂`; total by
    /// construction.
    pub projection: Vec<usize>,
}

impl LiftedChain {
    pub fn new(hat: FiniteChain, base: FiniteChain, projection: Vec<usize>) -> Result<Self> {
        if projection.len() != hat.n() {
            return Err(Error::Dimension(format!(
                "projection has {} entries for {} hat states",
                projection.len(),
                hat.n()
            )));
        }
        if let Some(&bad) = projection.iter().find(|&&s| s >= base.n()) {
            return Err(Error::Dimension(format!("projection target {bad} out of range")));
        }
        Ok(LiftedChain { hat, base, projection })
    }

    /// Hat states of the fiber `f⁻¹(s)`.
    pub fn fiber(&self, s: usize) -> Vec<usize> {
        (0..self.hat.n()).filter(|&x| self.projection[x] == s).collect()
    }

    /// Preimage of a base subset.
    pub fn fiber_set(&self, base_states: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.base.n()];
        for &s in base_states {
            member[s] = true;
        }
        (0..self.hat.n()).filter(|&x| member[self.projection[x]]).collect()
    }
}

/// Residuals of the lift identity.
#[derive(Debug, Clone, Copy)]
pub struct LiftCheck {
    /// `max_{s,y} |Σ_{x̂∈f⁻¹(s)} π̂(x̂) K̂(x̂, f⁻¹(y)) − π(s) K(s,y)|`.
    pub flow_residual: f64,
    /// `max_s |π(s) − π̂(f⁻¹(s))|`.
    pub marginal_residual: f64,
    pub pass: bool,
}

/// Exhaustively verify the fiber-sum and marginal identities; `pass` iff
/// both residuals are at most `tol`. Errors when some base state with
/// positive mass has an empty fiber (the projection is not onto).
pub fn verify_lift(lift: &LiftedChain, tol: f64) -> Result<LiftCheck> {
    let nb = lift.base.n();
    let nh = lift.hat.n();
    let pi = lift.base.stationary();
    let pi_hat = lift.hat.stationary();

    let mut fiber_mass = vec![0.0; nb];
    let mut fiber_of: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for x in 0..nh {
        let s = lift.projection[x];
        fiber_mass[s] += pi_hat[x];
        fiber_of[s].push(x);
    }
    for s in 0..nb {
        if pi[s] > 0.0 && fiber_of[s].is_empty() {
            return Err(Error::ProjectionNotOnto(lift.base.states()[s].clone()));
        }
    }

    let marginal_residual = (0..nb)
        .map(|s| (pi[s] - fiber_mass[s]).abs())
        .fold(0.0, f64::max);

    let mut flow_residual: f64 = 0.0;
    for s in 0..nb {
        for y in 0..nb {
            let mut lhs = 0.0;
            for &xh in &fiber_of[s] {
                let mut to_fiber = 0.0;
                for &yh in &fiber_of[y] {
                    to_fiber += lift.hat.prob(xh, yh);
                }
                lhs += pi_hat[xh] * to_fiber;
            }
            let rhs = pi[s] * lift.base.prob(s, y);
            flow_residual = flow_residual.max((lhs - rhs).abs());
        }
    }

    Ok(LiftCheck {
        flow_residual,
        marginal_residual,
        pass: flow_residual <= tol && marginal_residual <= tol,
    })
}

/// The identity lift of a chain: `Ω̂ = Ω`, `f = id`, `K̂ = K`.
pub fn identity_lift(chain: &FiniteChain) -> LiftedChain {
    LiftedChain {
        hat: chain.clone(),
        base: chain.clone(),
        projection: (0..chain.n()).collect(),
    }
}

/// Momentum lift of the lazy cycle walk on `Z_n` (the construction used to
/// beat diffusive mixing on the cycle): states `(i, σ)` with direction
/// `σ ∈ {+, −}`, holding 1/2, a forward move `(i, σ) → (i+σ, σ)` with
/// probability `(1/2)(1 − 1/n)`, and a reversing move `(i, σ) → (i−σ, −σ)`
/// with probability `1/(2n)`. The stationary vector is uniform on the `2n`
/// states and the walk projects exactly onto the lazy cycle walk
/// (hold 1/2, 1/4 to each neighbor).
pub fn dhn_lifted_cycle(n: usize) -> Result<LiftedChain> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle lift needs n ≥ 3, got {n}")));
    }
    let base = lazy_cycle(n)?;
    let nh = 2 * n;
    // Hat state layout: index 2i is (i,+), index 2i+1 is (i,−); arcs of hat
    // indices are then fibers of base arcs, which the sweep families exploit.
    let idx = |i: usize, sigma: usize| 2 * ((i + n) % n) + sigma;
    let forward = 0.5 * (1.0 - 1.0 / n as f64);
    let reverse = 1.0 / (2.0 * n as f64);
    let mut rows = vec![vec![0.0; nh]; nh];
    for i in 0..n {
        let plus = idx(i, 0);
        rows[plus][plus] = 0.5;
        rows[plus][idx(i + 1, 0)] += forward;
        rows[plus][idx(i + n - 1, 1)] += reverse;

        let minus = idx(i, 1);
        rows[minus][minus] = 0.5;
        rows[minus][idx(i + n - 1, 1)] += forward;
        rows[minus][idx(i + 1, 0)] += reverse;
    }
    let states = (0..nh)
        .map(|x| format!("{}{}", x / 2, if x % 2 == 0 { "+" } else { "-" }))
        .collect();
    let hat = FiniteChain::new(states, rows, Some(vec![1.0 / nh as f64; nh]))?;
    let projection = (0..nh).map(|x| x / 2).collect();
    LiftedChain::new(hat, base, projection)
}

/// Verdict of the conductance contraction check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionVerdict {
    /// `Φ̂ ≤ Φ` certified (exactly, or through a heuristic upper bound that
    /// already sits below `Φ`).
    Pass,
    /// Only a heuristic upper bound on `Φ̂` is available and it exceeds `Φ`;
    /// nothing is certified either way.
    Inconclusive,
    /// Exact `Φ̂` exceeds exact `Φ`.
    Fail,
}

/// Result of [`verify_conductance_contraction`].
#[derive(Debug, Clone)]
pub struct ContractionReport {
    /// Exact `Φ̂`, or a heuristic upper bound on it (see `hat_method`).
    pub hat_phi: f64,
    pub hat_method: CutMethod,
    /// Exact base conductance.
    pub base_phi: f64,
    pub verdict: ContractionVerdict,
}

/// Check `Φ̂ ≤ Φ`. The base side is always exact (so the base must fit
/// under the enumeration ceiling); the lift side is exact when the hat
/// space has at most `hat_exact_cap` states, and otherwise the minimum of
/// the sweep families plus the fibers of good base cuts, which upper-bounds
/// `Φ̂`.
pub fn verify_conductance_contraction(
    lift: &LiftedChain,
    hat_exact_cap: usize,
) -> Result<ContractionReport> {
    let base_phi = conductance_exact(&lift.base, crate::conductance::MAX_ENUMERABLE_STATES)?.value;

    let (hat_phi, hat_method) = if lift.hat.n() <= hat_exact_cap {
        let cut = conductance_exact(&lift.hat, hat_exact_cap)?;
        (cut.value, CutMethod::Exact)
    } else {
        let sweep = conductance_sweep(&lift.hat, &[], 10_000)?;
        // Fibers of good base cuts: Φ̂(f⁻¹(S)) = Φ(S), so the best base cut
        // is always a candidate.
        let base_cut = conductance_exact(&lift.base, crate::conductance::MAX_ENUMERABLE_STATES)?;
        let fiber = lift.fiber_set(&base_cut.witness);
        let fiber_phi = set_conductance(&lift.hat, &fiber)?;
        (sweep.value.min(fiber_phi), CutMethod::Heuristic)
    };

    let verdict = if hat_phi <= base_phi + 1e-12 {
        ContractionVerdict::Pass
    } else if hat_method == CutMethod::Exact {
        ContractionVerdict::Fail
    } else {
        ContractionVerdict::Inconclusive
    };
    Ok(ContractionReport { hat_phi, hat_method, base_phi, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{mixing_time, two_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_lift_has_zero_residuals() {
        let lift = identity_lift(&two_state(0.25));
        let check = verify_lift(&lift, 1e-12).unwrap();
        assert_eq!(check.flow_residual, 0.0);
        assert_eq!(check.marginal_residual, 0.0);
        assert!(check.pass);
    }

    #[test]
    fn dhn_construction_entries() {
        let lift = dhn_lifted_cycle(4).unwrap();
        // K̂((0,+),(1,+)) = (1/2)(1 − 1/4) = 0.375.
        let from = lift.hat.state_index("0+").unwrap();
        let to = lift.hat.state_index("1+").unwrap();
        assert_abs_diff_eq!(lift.hat.prob(from, to), 0.375, epsilon = 1e-15);
        // Reversing move lands in the other sheet at rate 1/(2n).
        let back = lift.hat.state_index("3-").unwrap();
        assert_abs_diff_eq!(lift.hat.prob(from, back), 0.125, epsilon = 1e-15);
        for &w in lift.hat.stationary() {
            assert_abs_diff_eq!(w, 1.0 / 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dhn_fiber_sum_hand_value() {
        // For s = 0, y = 1: (1/8)(3/8 + 1/8) = 1/16 = π(0)K(0,1).
        let lift = dhn_lifted_cycle(4).unwrap();
        let fiber0 = lift.fiber(0);
        let fiber1 = lift.fiber(1);
        let pi_hat = lift.hat.stationary();
        let mut lhs = 0.0;
        for &x in &fiber0 {
            let mut p = 0.0;
            for &y in &fiber1 {
                p += lift.hat.prob(x, y);
            }
            lhs += pi_hat[x] * p;
        }
        assert_abs_diff_eq!(lhs, 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lhs, lift.base.stationary()[0] * lift.base.prob(0, 1), epsilon = 1e-15);
    }

    #[test]
    fn dhn_passes_verification_for_various_sizes() {
        for n in [3, 4, 5, 8, 16] {
            let lift = dhn_lifted_cycle(n).unwrap();
            let check = verify_lift(&lift, 1e-12).unwrap();
            assert!(check.pass, "n = {n}: {check:?}");
        }
        assert!(dhn_lifted_cycle(2).is_err());
    }

    #[test]
    fn perturbed_lift_fails_with_matching_residual() {
        let lift = dhn_lifted_cycle(4).unwrap();
        let mut rows: Vec<Vec<f64>> = lift.hat.matrix().rows().map(|r| r.to_vec()).collect();
        // Shift 1e-3 of mass within one row; rows stay stochastic but the
        // projected flow is off by about 1e-3.
        rows[0][0] += 1e-3;
        rows[0][2] -= 1e-3;
        let states = lift.hat.states().to_vec();
        let hat = FiniteChain::new(states, rows, None).unwrap();
        let bad = LiftedChain::new(hat, lift.base.clone(), lift.projection.clone()).unwrap();
        let check = verify_lift(&bad, 1e-12).unwrap();
        assert!(!check.pass);
        assert!(check.flow_residual > 1e-4 && check.flow_residual < 1e-2);
    }

    #[test]
    fn hat_stationary_projects_to_base_stationary() {
        for n in [3, 8, 16] {
            let lift = dhn_lifted_cycle(n).unwrap();
            let pi_hat = lift.hat.stationary();
            for s in 0..n {
                let mass: f64 = lift.fiber(s).iter().map(|&x| pi_hat[x]).sum();
                assert_abs_diff_eq!(mass, lift.base.stationary()[s], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn residual_invariant_under_consistent_relabeling() {
        let lift = dhn_lifted_cycle(5).unwrap();
        let check = verify_lift(&lift, 1e-12).unwrap();

        // Rotate the base labels by 2 and the hat states accordingly.
        let nb = lift.base.n();
        let nh = lift.hat.n();
        let bperm: Vec<usize> = (0..nb).map(|s| (s + 2) % nb).collect();
        let hperm: Vec<usize> = (0..nh).map(|x| 2 * bperm[x / 2] + x % 2).collect();
        let permute = |chain: &FiniteChain, perm: &[usize]| {
            let n = chain.n();
            let mut rows = vec![vec![0.0; n]; n];
            let mut pi = vec![0.0; n];
            let mut states = vec![String::new(); n];
            for i in 0..n {
                states[perm[i]] = chain.states()[i].clone();
                pi[perm[i]] = chain.stationary()[i];
                for j in 0..n {
                    rows[perm[i]][perm[j]] = chain.prob(i, j);
                }
            }
            FiniteChain::new(states, rows, Some(pi)).unwrap()
        };
        let hat = permute(&lift.hat, &hperm);
        let base = permute(&lift.base, &bperm);
        let mut projection = vec![0usize; nh];
        for x in 0..nh {
            projection[hperm[x]] = bperm[lift.projection[x]];
        }
        let relabeled = LiftedChain::new(hat, base, projection).unwrap();
        let check2 = verify_lift(&relabeled, 1e-12).unwrap();
        assert_abs_diff_eq!(check.flow_residual, check2.flow_residual, epsilon = 1e-14);
        assert_abs_diff_eq!(check.marginal_residual, check2.marginal_residual, epsilon = 1e-14);
    }

    #[test]
    fn contraction_identity_lift_is_equality() {
        let lift = identity_lift(&two_state(0.25));
        let report = verify_conductance_contraction(&lift, 20).unwrap();
        assert_eq!(report.verdict, ContractionVerdict::Pass);
        assert_abs_diff_eq!(report.hat_phi, report.base_phi, epsilon = 1e-15);
    }

    #[test]
    fn contraction_dhn_z8_exact() {
        let lift = dhn_lifted_cycle(8).unwrap();
        let report = verify_conductance_contraction(&lift, 20).unwrap();
        assert_eq!(report.hat_method, CutMethod::Exact);
        assert_eq!(report.verdict, ContractionVerdict::Pass);
        assert!(report.hat_phi <= report.base_phi + 1e-12);
    }

    #[test]
    fn contraction_large_dhn_heuristic_still_certifies() {
        let lift = dhn_lifted_cycle(24).unwrap(); // 48 hat states, beyond enumeration
        let report = verify_conductance_contraction(&lift, 32).unwrap();
        assert_eq!(report.hat_method, CutMethod::Heuristic);
        assert_eq!(report.verdict, ContractionVerdict::Pass);
    }

    #[test]
    fn dhn_mixes_faster_than_base() {
        let lift = dhn_lifted_cycle(16).unwrap();
        let tau_hat = mixing_time(&lift.hat).unwrap();
        let tau = mixing_time(&lift.base).unwrap();
        assert!(tau_hat < tau, "τ̂ = {tau_hat} should beat τ = {tau}");
    }
}
