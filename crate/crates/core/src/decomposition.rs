//! Holding/jump representations of lazy kernels and their certificates.
//!
//! A kernel with positive holding probabilities can be written per state as
//! `K(x,·) = α_x δ_x + (1−α_x) Σ_U K_{x,U} π|_U(·)`: hold with weight `α_x`,
//! otherwise pick a jump set `U` and land inside it with the stationary
//! proportions. Two constants extracted from this representation drive the
//! mixing bounds:
//!
//! - `π*`, the smallest stationary mass of any jump set actually used
//!   (the holding atom `α_x` is not a jump set and does not count);
//! - a `(β, γ)` pair certifying that mass does not pile up on any single
//!   state from a small set: `Q(S,y)/π(y) ≤ 1 − γ` for all `S` with
//!   `π(S) ≤ β` and all `y`.

use crate::chain::{Distribution, FiniteChain};
use crate::subset::mask_mass;
use crate::{Error, Result, TOL_STRUCTURAL};

/// One jump set with its selection weight.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSet {
    /// State indices of `U`, ascending.
    pub set: Vec<usize>,
    /// Selection weight `K_{x,U} ≥ 0`.
    pub weight: f64,
}

/// Per-state holding weight and jump mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDecomposition {
    /// Holding weight `α_x ∈ [0,1]`. (`α_x = 1` only for degenerate states.)
    pub alpha: f64,
    pub jumps: Vec<JumpSet>,
    /// Set when the state has no jump mass at all (`K(x,x) = 1`).
    pub degenerate: bool,
}

/// Holding/jump representation of a kernel, one record per state.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecomposition {
    pub per_state: Vec<StateDecomposition>,
}

impl KernelDecomposition {
    pub fn n(&self) -> usize {
        self.per_state.len()
    }

    /// Check the representation invariants against a stationary vector:
    /// jump weights sum to 1 (unless degenerate), every set is nonempty with
    /// positive mass.
    pub fn check(&self, pi: &[f64]) -> Result<()> {
        for (x, sd) in self.per_state.iter().enumerate() {
            if !(0.0..=1.0).contains(&sd.alpha) {
                return Err(Error::InvalidParameter(format!(
                    "state {x}: alpha = {} outside [0,1]",
                    sd.alpha
                )));
            }
            if sd.degenerate {
                if !sd.jumps.is_empty() {
                    return Err(Error::InvalidParameter(format!(
                        "state {x}: degenerate but has jump sets"
                    )));
                }
                continue;
            }
            let total: f64 = sd.jumps.iter().map(|j| j.weight).sum();
            if (total - 1.0).abs() > TOL_STRUCTURAL {
                return Err(Error::InvalidParameter(format!(
                    "state {x}: jump weights sum to {total}"
                )));
            }
            for (r, j) in sd.jumps.iter().enumerate() {
                if j.weight < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "state {x}, jump {r}: negative weight"
                    )));
                }
                if j.set.is_empty() {
                    return Err(Error::InvalidParameter(format!("state {x}, jump {r}: empty set")));
                }
                let mass: f64 = j.set.iter().map(|&i| pi[i]).sum();
                if mass <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "state {x}, jump {r}: zero-mass set"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest holding weight over all states.
    pub fn alpha_sup(&self) -> f64 {
        self.per_state.iter().map(|s| s.alpha).fold(0.0, f64::max)
    }
}

/// The canonical representation of a chain with positive holding mass:
/// `α_x = K(x,x)` and one singleton jump per off-diagonal target, weighted
/// proportionally to `K(x,y)`. States with `K(x,x) = 1` have no jump mass
/// and are flagged degenerate.
pub fn canonical_decomposition(chain: &FiniteChain) -> Result<KernelDecomposition> {
    let n = chain.n();
    let mut per_state = Vec::with_capacity(n);
    for x in 0..n {
        let alpha = chain.prob(x, x);
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "state {x}: K(x,x) = {alpha}, canonical representation needs positive holding"
            )));
        }
        if alpha >= 1.0 - TOL_STRUCTURAL {
            per_state.push(StateDecomposition { alpha: 1.0, jumps: Vec::new(), degenerate: true });
            continue;
        }
        let rest = 1.0 - alpha;
        let jumps = (0..n)
            .filter(|&y| y != x && chain.prob(x, y) > 0.0)
            .map(|y| JumpSet { set: vec![y], weight: chain.prob(x, y) / rest })
            .collect();
        per_state.push(StateDecomposition { alpha, jumps, degenerate: false });
    }
    Ok(KernelDecomposition { per_state })
}

/// Rebuild the transition matrix from a representation and a stationary
/// vector: `K(x,y) = α_x 1_{y=x} + (1−α_x) Σ_{U∋y} K_{x,U} π(y)/π(U)`.
pub fn reconstruct(decomp: &KernelDecomposition, pi: &Distribution) -> Result<FiniteChain> {
    let n = decomp.n();
    if pi.len() != n {
        return Err(Error::Dimension(format!(
            "decomposition has {n} states, distribution has {}",
            pi.len()
        )));
    }
    decomp.check(pi.weights())?;
    let w = pi.weights();
    let mut rows = vec![vec![0.0; n]; n];
    for (x, sd) in decomp.per_state.iter().enumerate() {
        rows[x][x] = sd.alpha;
        if sd.degenerate {
            continue;
        }
        for jump in &sd.jumps {
            let mass: f64 = jump.set.iter().map(|&i| w[i]).sum();
            for &y in &jump.set {
                rows[x][y] += (1.0 - sd.alpha) * jump.weight * w[y] / mass;
            }
        }
    }
    FiniteChain::from_matrix(rows, Some(w.to_vec()))
}

/// Reconstruction residual `max_{x,y} |K_rebuilt(x,y) − K(x,y)|` without
/// requiring the rebuilt matrix to pass chain validation.
pub fn reconstruction_residual(
    decomp: &KernelDecomposition,
    chain: &FiniteChain,
) -> Result<f64> {
    let n = decomp.n();
    if chain.n() != n {
        return Err(Error::Dimension("decomposition/chain size mismatch".into()));
    }
    let w = chain.stationary();
    let mut res: f64 = 0.0;
    for (x, sd) in decomp.per_state.iter().enumerate() {
        let mut row = vec![0.0; n];
        row[x] = sd.alpha;
        for jump in &sd.jumps {
            let mass: f64 = jump.set.iter().map(|&i| w[i]).sum();
            for &y in &jump.set {
                row[y] += (1.0 - sd.alpha) * jump.weight * w[y] / mass;
            }
        }
        for y in 0..n {
            res = res.max((row[y] - chain.prob(x, y)).abs());
        }
    }
    Ok(res)
}

/// `π* = min π(U)` over all jump sets with positive selection weight.
/// The holding atom is not counted. Errors when no state has any
/// positively-weighted jump set.
pub fn pi_star(decomp: &KernelDecomposition, pi: &Distribution) -> Result<f64> {
    let w = pi.weights();
    let mut best: Option<f64> = None;
    for sd in &decomp.per_state {
        for jump in &sd.jumps {
            if jump.weight > 0.0 {
                let mass: f64 = jump.set.iter().map(|&i| w[i]).sum();
                best = Some(best.map_or(mass, |b: f64| b.min(mass)));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no jump set with positive weight".into()))
}

// ---------------------------------------------------------------------------
// (β, γ) certification
// ---------------------------------------------------------------------------

/// Requested certification mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyMode {
    /// Exact supremum by 0/1 knapsack over states. Needs the stationary
    /// weights to sit on a small common denominator; falls back to
    /// `Relaxation` (with a flag) otherwise.
    Exact,
    /// Fractional-knapsack upper bound on the supremum; the resulting γ is
    /// conservative (never larger than the exact one) and still a valid
    /// certificate.
    Relaxation,
}

/// A certified `(β, γ)` pair.
#[derive(Debug, Clone)]
pub struct CertifiedConstants {
    pub beta: f64,
    /// Largest certified γ with `Q(S,y)/π(y) ≤ 1 − γ` for all feasible `S`.
    pub gamma: f64,
    /// `π*` of the representation that accompanied the certification, when
    /// one was supplied.
    pub pi_star: Option<f64>,
    /// Method actually used (exact mode may fall back to relaxation).
    pub method: CertifyMode,
    /// No nonempty set satisfies `π(S) ≤ β`; the condition holds vacuously
    /// and γ = 1.
    pub vacuous: bool,
    /// The worst `Q(S,y)/π(y)` found (an upper bound in relaxation mode).
    pub worst_ratio: f64,
}

/// Certify the largest γ with `Q(S,y)/π(y) ≤ 1 − γ` over all sets `S` with
/// `π(S) ≤ beta` and all states `y`.
///
/// Exact mode solves, for each target `y`, a 0/1 knapsack maximizing
/// `Σ_{x∈S} Q(x,y)` subject to `Σ_{x∈S} π(x) ≤ β`, after rescaling `π` to
/// integer weights on a common denominator (≤ 10^6; uniform and grid chains
/// stay exact). Relaxation mode replaces each knapsack by its fractional
/// upper bound.
pub fn certify_beta_gamma(
    chain: &FiniteChain,
    beta: f64,
    mode: CertifyMode,
) -> Result<CertifiedConstants> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} outside (0,1]")));
    }
    let n = chain.n();
    let pi = chain.stationary();

    // Q(x,y) = π(x) K(x,y).
    let q = |x: usize, y: usize| pi[x] * chain.prob(x, y);

    let min_pi = pi.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_pi > beta + TOL_STRUCTURAL {
        return Ok(CertifiedConstants {
            beta,
            gamma: 1.0,
            pi_star: None,
            method: mode,
            vacuous: true,
            worst_ratio: 0.0,
        });
    }

    let (method, worst_ratio) = match mode {
        CertifyMode::Exact => match rationalize(pi) {
            Some((weights, denom)) if n * (beta * denom as f64) as usize * n <= 200_000_000 => {
                let cap = ((beta * denom as f64) + 1e-9).floor() as u64;
                let mut worst: f64 = 0.0;
                for y in 0..n {
                    let values: Vec<f64> = (0..n).map(|x| q(x, y)).collect();
                    let best = knapsack_max(&values, &weights, cap);
                    worst = worst.max(best / pi[y]);
                }
                (CertifyMode::Exact, worst)
            }
            _ => (CertifyMode::Relaxation, fractional_worst(chain, beta)),
        },
        CertifyMode::Relaxation => (CertifyMode::Relaxation, fractional_worst(chain, beta)),
    };

    let gamma = (1.0 - worst_ratio).clamp(0.0, 1.0);
    Ok(CertifiedConstants {
        beta,
        gamma,
        pi_star: None,
        method,
        vacuous: false,
        worst_ratio,
    })
}

/// Warm-start minorization certificate for a holding/jump representation:
/// a γ that bounds the restricted jump flow plus the worst holding weight
/// for every set with `π(S) ≤ β`. Computed as `β/π* + sup_x α_x`, which
/// dominates `Σ_{x∈S} Σ_U K_{x,U} π(x)/π(U) + sup α` since every jump set
/// has mass at least `π*`.
///
/// This is the constant the discretization pipeline tracks per resolution;
/// for the torus interval walk it evaluates to `β/(2c) + 1/2`.
pub fn gamma_certificate(beta: f64, pi_star: f64, alpha_sup: f64) -> f64 {
    beta / pi_star + alpha_sup
}

/// Express the stationary weights as integers over a common denominator
/// `D ≤ 10^6` when possible. Each weight is rationalized by continued
/// fractions with denominator ≤ 10^4 and the denominators are combined by lcm.
fn rationalize(pi: &[f64]) -> Option<(Vec<u64>, u64)> {
    const MAX_SINGLE_DEN: u64 = 10_000;
    const MAX_COMMON_DEN: u64 = 1_000_000;
    let mut denom: u64 = 1;
    for &w in pi {
        let d = best_denominator(w, MAX_SINGLE_DEN)?;
        denom = lcm(denom, d);
        if denom > MAX_COMMON_DEN {
            return None;
        }
    }
    let mut weights = Vec::with_capacity(pi.len());
    let mut total = 0u64;
    for &w in pi {
        let scaled = w * denom as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 {
            return None;
        }
        let r = rounded as u64;
        weights.push(r);
        total += r;
    }
    if total != denom {
        return None;
    }
    Some((weights, denom))
}

/// Smallest denominator `d ≤ max_den` with `|w − round(w·d)/d| ≤ 1e-9/d`,
/// found by the Stern–Brocot walk.
fn best_denominator(w: f64, max_den: u64) -> Option<u64> {
    let (mut lo_n, mut lo_d, mut hi_n, mut hi_d) = (0u64, 1u64, 1u64, 0u64);
    // Invariant: lo_n/lo_d ≤ w ≤ hi_n/hi_d (hi starts at 1/0 = ∞).
    for _ in 0..200 {
        let med_n = lo_n + hi_n;
        let med_d = lo_d + hi_d;
        if med_d > max_den {
            return None;
        }
        let med = med_n as f64 / med_d as f64;
        if (w - med).abs() <= 1e-9 / med_d as f64 {
            return Some(med_d);
        }
        if w > med {
            lo_n = med_n;
            lo_d = med_d;
        } else {
            hi_n = med_n;
            hi_d = med_d;
        }
    }
    None
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// 0/1 knapsack: max Σ value over subsets with Σ weight ≤ cap.
fn knapsack_max(values: &[f64], weights: &[u64], cap: u64) -> f64 {
    let cap = cap as usize;
    let mut dp = vec![0.0f64; cap + 1];
    for (v, &w) in values.iter().zip(weights) {
        let w = w as usize;
        if w > cap || *v <= 0.0 {
            continue;
        }
        for c in (w..=cap).rev() {
            let cand = dp[c - w] + v;
            if cand > dp[c] {
                dp[c] = cand;
            }
        }
    }
    dp[cap]
}

/// Fractional-knapsack upper bound on `sup Q(S,y)/π(y)` over `π(S) ≤ β`.
fn fractional_worst(chain: &FiniteChain, beta: f64) -> f64 {
    let n = chain.n();
    let pi = chain.stationary();
    let mut worst: f64 = 0.0;
    for y in 0..n {
        // Sort donors by flow density Q(x,y)/π(x) = K(x,y), descending.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            chain
                .prob(b, y)
                .partial_cmp(&chain.prob(a, y))
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut remaining = beta;
        let mut acc = 0.0;
        for &x in &order {
            if remaining <= 0.0 {
                break;
            }
            let take = pi[x].min(remaining);
            acc += take * chain.prob(x, y);
            remaining -= take;
        }
        worst = worst.max(acc / pi[y]);
    }
    worst
}

/// Exhaustive oracle for the certified γ on bitmask-sized chains: enumerate
/// every subset with `π(S) ≤ β` directly. Intended for tests and
/// cross-checks.
pub fn certify_exhaustive(chain: &FiniteChain, beta: f64) -> Result<CertifiedConstants> {
    let n = chain.n();
    if n > crate::subset::MAX_MASK_STATES {
        return Err(Error::TooManyStates { n, cap: crate::subset::MAX_MASK_STATES });
    }
    let pi = chain.stationary();
    let mut worst: f64 = 0.0;
    let mut any = false;
    for mask in 1u64..crate::subset::full_mask(n) {
        if mask_mass(mask, pi) > beta + TOL_STRUCTURAL {
            continue;
        }
        any = true;
        for y in 0..n {
            let mut acc = 0.0;
            let mut m = mask;
            while m != 0 {
                let x = m.trailing_zeros() as usize;
                acc += pi[x] * chain.prob(x, y);
                m &= m - 1;
            }
            worst = worst.max(acc / pi[y]);
        }
    }
    Ok(CertifiedConstants {
        beta,
        gamma: if any { (1.0 - worst).clamp(0.0, 1.0) } else { 1.0 },
        pi_star: None,
        method: CertifyMode::Exact,
        vacuous: !any,
        worst_ratio: worst,
    })
}
