//! The evolving-set process and its numerically checked properties.
//!
//! Given a chain with stationary vector `π` and ergodic flow `Q`, the
//! evolving-set process is a Markov chain on subsets: from `S`, draw a
//! uniform threshold `U ∈ (0,1)` and move to the level set
//! `{y : Q(S,y)/π(y) ≥ U}`. Both `∅` and the full space are absorbing.
//!
//! From a fixed `S` there are at most `n + 1` distinct outcomes (the level
//! sets of `Q(S,·)/π(·)` plus `∅`), each with probability equal to the
//! length of its threshold interval. That makes the following quantities
//! exactly computable on small spaces:
//!
//! - the full set-chain distribution at time `T` (breadth-first expansion);
//! - the transition identity `K^t(S,y) = (π(y)/π(S)) P_S[y ∈ S_t]`;
//! - the martingale property `E[π(S_{t+1}) | S_t] = π(S_t)`;
//! - the one-step ratio decay `E[√(π(M_{t+1})/π(M_t)) | S_t] ≤ 1 − Φ²/2`,
//!   where `M` is the smaller side of the current set.
//!
//! The absorption bound `P[M_{B(A+1)} = ∅] ≥ 1 − e^{-C}` is checked by
//! seeded Monte-Carlo simulation.
//!
//! Thresholds are drawn from the open interval `(0,1)`: the endpoints have
//! probability zero, and excluding `u = 0` keeps `∅` absorbing in floating
//! point.

use crate::chain::FiniteChain;
use crate::conductance::conductance_exact;
use crate::subset::{full_mask, mask_mass, mask_to_indices, MAX_MASK_STATES};
use crate::{Error, Result, DEFAULT_SET_STATE_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Precomputed level coefficients for a chain: `coef[y][x] = Q(x,y)/π(y)`,
/// so the level of `y` given `S` is `Σ_{x∈S} coef[y][x]`.
pub struct SetProcess<'a> {
    chain: &'a FiniteChain,
    n: usize,
    coef: Vec<f64>,
}

impl<'a> SetProcess<'a> {
    pub fn new(chain: &'a FiniteChain) -> Result<Self> {
        let n = chain.n();
        if n > MAX_MASK_STATES {
            return Err(Error::TooManyStates { n, cap: MAX_MASK_STATES });
        }
        let pi = chain.stationary();
        let mut coef = vec![0.0; n * n];
        for y in 0..n {
            if pi[y] <= 0.0 {
                continue; // zero-mass states never enter a level set
            }
            for x in 0..n {
                coef[y * n + x] = pi[x] * chain.prob(x, y) / pi[y];
            }
        }
        Ok(SetProcess { chain, n, coef })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> u64 {
        full_mask(self.n)
    }

    pub fn mass(&self, mask: u64) -> f64 {
        mask_mass(mask, self.chain.stationary())
    }

    /// `Q(S,y)/π(y)` for every `y`.
    pub fn levels(&self, mask: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (y, o) in out.iter_mut().enumerate() {
            let row = &self.coef[y * self.n..(y + 1) * self.n];
            let mut m = mask;
            let mut acc = 0.0;
            while m != 0 {
                let x = m.trailing_zeros() as usize;
                acc += row[x];
                m &= m - 1;
            }
            *o = acc;
        }
        out
    }

    /// One transition at threshold `u`.
    pub fn step(&self, mask: u64, u: f64) -> u64 {
        let levels = self.levels(mask);
        let mut next = 0u64;
        for (y, &l) in levels.iter().enumerate() {
            if l >= u {
                next |= 1u64 << y;
            }
        }
        next
    }

    /// The exact one-step law from `mask`: every distinct outcome with its
    /// threshold-interval length. Equal levels merge into one outcome.
    pub fn one_step_outcomes(&self, mask: u64) -> Vec<(u64, f64)> {
        let levels = self.levels(mask);
        let mut pos: Vec<(f64, usize)> = levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0.0)
            .map(|(y, &l)| (l, y))
            .collect();
        // Descending level order; accumulate level sets from the top.
        pos.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut outcomes = Vec::new();
        let mut acc = 0u64;
        let mut i = 0;
        while i < pos.len() {
            let level = pos[i].0;
            while i < pos.len() && pos[i].0 == level {
                acc |= 1u64 << pos[i].1;
                i += 1;
            }
            let lower = if i < pos.len() { pos[i].0 } else { 0.0 };
            let width = (level.min(1.0) - lower).max(0.0);
            if width > 0.0 {
                outcomes.push((acc, width));
            }
        }
        let top = pos.first().map_or(0.0, |p| p.0.min(1.0));
        if top < 1.0 {
            outcomes.push((0u64, 1.0 - top));
        }
        outcomes
    }
}

/// One transition of the evolving-set process at threshold `u ∈ (0,1)`.
pub fn evolve_step(chain: &FiniteChain, mask: u64, u: f64) -> Result<u64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("threshold u = {u} outside (0,1)")));
    }
    Ok(SetProcess::new(chain)?.step(mask, u))
}

/// A sampled trajectory: the visited sets and the thresholds that produced
/// them (`uniforms[t]` moved `sets[t]` to `sets[t+1]`).
#[derive(Debug, Clone)]
pub struct SetTrajectory {
    pub seed: u64,
    pub sets: Vec<u64>,
    pub uniforms: Vec<f64>,
}

/// Draw from the open interval `(0,1)`.
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Sample a trajectory of `t` steps from `s0`, reproducible from `seed`
/// (ChaCha12 keystream).
pub fn evolve_trajectory(
    chain: &FiniteChain,
    s0: u64,
    t: usize,
    seed: u64,
) -> Result<SetTrajectory> {
    let proc = SetProcess::new(chain)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sets = Vec::with_capacity(t + 1);
    let mut uniforms = Vec::with_capacity(t);
    let mut current = s0;
    sets.push(current);
    for _ in 0..t {
        let u = open_unit(&mut rng);
        current = proc.step(current, u);
        uniforms.push(u);
        sets.push(current);
    }
    Ok(SetTrajectory { seed, sets, uniforms })
}

/// Exact distribution of the set chain at time `t`.
#[derive(Debug, Clone)]
pub struct SetDistribution {
    /// Probability per subset bitmask.
    pub probs: BTreeMap<u64, f64>,
    pub time: usize,
}

impl SetDistribution {
    /// `P[y ∈ S_t]` for every state `y`.
    pub fn membership_marginals(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&mask, &p) in &self.probs {
            let mut m = mask;
            while m != 0 {
                let y = m.trailing_zeros() as usize;
                out[y] += p;
                m &= m - 1;
            }
        }
        out
    }
}

/// Exact set-chain distribution at time `t` by breadth-first expansion with
/// per-set outcome lists; errors if the reachable set space exceeds
/// `state_cap`.
pub fn set_chain_distribution(
    chain: &FiniteChain,
    s0: u64,
    t: usize,
    state_cap: usize,
) -> Result<SetDistribution> {
    let proc = SetProcess::new(chain)?;
    let mut current: BTreeMap<u64, f64> = BTreeMap::new();
    current.insert(s0, 1.0);
    let mut outcome_cache: BTreeMap<u64, Vec<(u64, f64)>> = BTreeMap::new();
    for _ in 0..t {
        let mut next: BTreeMap<u64, f64> = BTreeMap::new();
        for (&mask, &p) in &current {
            let outcomes = outcome_cache
                .entry(mask)
                .or_insert_with(|| proc.one_step_outcomes(mask));
            for &(out, w) in outcomes.iter() {
                *next.entry(out).or_insert(0.0) += p * w;
            }
        }
        if next.len() > state_cap {
            return Err(Error::SetStateCap { frontier: next.len(), cap: state_cap });
        }
        current = next;
    }
    Ok(SetDistribution { probs: current, time: t })
}

/// Residual of the transition identity
/// `K^t(S,y) = (π(y)/π(S)) P_{S_0=S}[y ∈ S_t]`,
/// with `K^t(S,y) = (1/π(S)) Σ_{x∈S} π(x) K^t(x,y)`, maximized over `y`.
pub fn verify_transition_identity(chain: &FiniteChain, s0: u64, t: usize) -> Result<f64> {
    let n = chain.n();
    let pi = chain.stationary();
    let pi_s = mask_mass(s0, pi);
    if pi_s <= 0.0 {
        return Err(Error::EmptyRestriction);
    }
    let dist = set_chain_distribution(chain, s0, t, DEFAULT_SET_STATE_CAP)?;
    let marginals = dist.membership_marginals(n);
    let kt = chain.step_power(t);
    let members = mask_to_indices(s0);
    let mut residual: f64 = 0.0;
    for y in 0..n {
        let kst: f64 = members.iter().map(|&x| pi[x] * kt.get(x, y)).sum::<f64>() / pi_s;
        let rhs = pi[y] / pi_s * marginals[y];
        residual = residual.max((kst - rhs).abs());
    }
    Ok(residual)
}

/// Residual `|E[π(S_1)] − π(S)|` of the bounded-martingale property,
/// computed from the exact one-step outcome list.
pub fn verify_martingale(chain: &FiniteChain, s: u64) -> Result<f64> {
    let proc = SetProcess::new(chain)?;
    let expected: f64 = proc
        .one_step_outcomes(s)
        .iter()
        .map(|&(mask, p)| p * proc.mass(mask))
        .sum();
    Ok((expected - proc.mass(s)).abs())
}

/// Outcome of the one-step ratio-decay check.
#[derive(Debug, Clone, Copy)]
pub struct RatioDecay {
    /// `E[√(π(M_1)/π(M_0)) | S_0 = S]`, exact.
    pub expectation: f64,
    /// `1 − Φ²/2`.
    pub bound: f64,
    /// `bound − expectation`; the inequality holds when ≥ 0 (tolerance
    /// `-1e-12`).
    pub slack: f64,
    /// `π(M_0) = 0`, so the conditional expectation is undefined and the
    /// inequality holds vacuously.
    pub vacuous: bool,
}

/// Check `E[√(π(M_1)/π(M_0))] ≤ 1 − Φ²/2` from `S`, where `M` is the
/// smaller-mass side (`S` itself when `π(S) ≤ 1/2`, its complement
/// otherwise) and `phi` is the exact conductance.
pub fn verify_ratio_decay(chain: &FiniteChain, s: u64, phi: f64) -> Result<RatioDecay> {
    let proc = SetProcess::new(chain)?;
    let full = proc.full();
    let side = |mask: u64| -> u64 {
        if proc.mass(mask) <= 0.5 {
            mask
        } else {
            !mask & full
        }
    };
    let bound = 1.0 - phi * phi / 2.0;
    let m0 = proc.mass(side(s));
    if m0 <= 0.0 {
        return Ok(RatioDecay { expectation: 0.0, bound, slack: bound, vacuous: true });
    }
    let expectation: f64 = proc
        .one_step_outcomes(s)
        .iter()
        .map(|&(mask, p)| {
            let m1 = proc.mass(side(mask));
            p * (m1 / m0).sqrt()
        })
        .sum();
    Ok(RatioDecay { expectation, bound, slack: bound - expectation, vacuous: false })
}

/// Result of the Monte-Carlo absorption check.
#[derive(Debug, Clone)]
pub struct NullnessCheck {
    /// Empirical `P[M_{B(A+1)} = ∅]` from the worst-case start.
    pub estimate: f64,
    /// `1 − e^{-C}`.
    pub bound: f64,
    /// Binomial standard error of the estimate.
    pub sigma: f64,
    /// `estimate ≥ bound − 3σ`.
    pub pass: bool,
    /// Block length `A + 1` with `A = ⌈log(√β/2)/log(1 − Φ²/2)⌉`.
    pub block_len: usize,
    /// Number of blocks `B = ⌈2C/γ⌉`.
    pub blocks: usize,
    /// Simulation horizon `B(A+1)`.
    pub horizon: usize,
    /// Worst-case starting set (mass closest to 1/2).
    pub start: u64,
    pub trials: usize,
}

/// Monte-Carlo check of the absorption bound `P[M_{B(A+1)} = ∅] ≥ 1 − e^{-C}`
/// for a certified `(β, γ)` pair. The start set maximizes
/// `min(π(S), 1 − π(S))` (ties to the smallest bitmask); `Φ` is computed
/// exactly. Trials run in parallel with per-trial ChaCha12 streams derived
/// from `seed`, so results are reproducible.
pub fn verify_nullness_bound(
    chain: &FiniteChain,
    beta: f64,
    gamma: f64,
    c: f64,
    trials: usize,
    seed: u64,
) -> Result<NullnessCheck> {
    if !(beta > 0.0 && beta <= 1.0) || !(gamma > 0.0 && gamma <= 1.0) || c <= 0.0 {
        return Err(Error::InvalidParameter(
            "need β ∈ (0,1], γ ∈ (0,1], C > 0".into(),
        ));
    }
    let bound = 1.0 - (-c).exp();
    let worst_sigma = 3.0 * 0.5 / (trials as f64).sqrt();
    if worst_sigma >= (-c).exp() {
        return Err(Error::InsufficientTrials { trials, margin: (-c).exp() });
    }
    let proc = SetProcess::new(chain)?;
    let phi = conductance_exact(chain, crate::DEFAULT_MAX_EXACT_STATES)?.value;
    let a = ((beta.sqrt() / 2.0).ln() / (1.0 - phi * phi / 2.0).ln()).ceil() as usize;
    let blocks = (2.0 * c / gamma).ceil() as usize;
    let block_len = a + 1;
    let horizon = blocks * block_len;

    let full = proc.full();
    let pi = chain.stationary();
    let start = (1..full)
        .map(|mask| {
            let m = mask_mass(mask, pi);
            (mask, m.min(1.0 - m))
        })
        .fold((0u64, f64::NEG_INFINITY), |best, (mask, v)| {
            if v > best.1 {
                (mask, v)
            } else {
                best
            }
        })
        .0;

    let absorbed: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha12Rng::seed_from_u64(splitmix(seed, trial as u64));
            let mut s = start;
            for _ in 0..horizon {
                if s == 0 || s == full {
                    break;
                }
                s = proc.step(s, open_unit(&mut rng));
            }
            usize::from(s == 0 || s == full)
        })
        .sum();

    let estimate = absorbed as f64 / trials as f64;
    let sigma = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(NullnessCheck {
        estimate,
        bound,
        sigma,
        pass: estimate >= bound - 3.0 * sigma,
        block_len,
        blocks,
        horizon,
        start,
        trials,
    })
}

fn splitmix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
