//! Ergodic flow, set conductance, and the global conductance
//! `Φ = inf { Q(S,Sᶜ)/π(S) : 0 < π(S) ≤ 1/2 }`.
//!
//! Small spaces (≤ 32 states) are handled exactly by enumerating every
//! subset in Gray-code order with O(degree) incremental boundary updates;
//! larger spaces fall back to sweep-cut heuristics (contiguous intervals,
//! spectral sweep, local search) whose minimum is an upper bound on `Φ`
//! and is flagged as such.

use crate::chain::FiniteChain;
use crate::subset::{full_mask, mask_to_indices};
use crate::{Error, Result, DEFAULT_MAX_EXACT_STATES, TOL_STRUCTURAL};
use rayon::prelude::*;

/// Hard ceiling on exact enumeration (2^32 subsets, a few seconds in
/// parallel). The default cap is far lower; see
/// [`DEFAULT_MAX_EXACT_STATES`].
pub const MAX_ENUMERABLE_STATES: usize = 32;

/// How the cut was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutMethod {
    /// Exhaustive minimum over all feasible subsets.
    Exact,
    /// Minimum over a heuristic candidate family; upper bound on `Φ`.
    Heuristic,
}

/// A conductance value with its witnessing subset.
#[derive(Debug, Clone)]
pub struct CutResult {
    pub value: f64,
    /// States of the witness, ascending.
    pub witness: Vec<usize>,
    pub method: CutMethod,
}

/// Ergodic flow `Q(A,B) = Σ_{x∈A, y∈B} π(x) K(x,y)`; zero when either set
/// is empty. `A` and `B` may overlap.
pub fn ergodic_flow(chain: &FiniteChain, a: &[usize], b: &[usize]) -> f64 {
    let pi = chain.stationary();
    let mut total = 0.0;
    for &x in a {
        for &y in b {
            total += pi[x] * chain.prob(x, y);
        }
    }
    total
}

/// Set conductance `Φ(S) = Q(S, Sᶜ)/π(S)`.
pub fn set_conductance(chain: &FiniteChain, s: &[usize]) -> Result<f64> {
    let n = chain.n();
    let pi = chain.stationary();
    let mut member = vec![false; n];
    for &x in s {
        if x >= n {
            return Err(Error::Dimension(format!("state index {x} out of range")));
        }
        member[x] = true;
    }
    let mass: f64 = (0..n).filter(|&x| member[x]).map(|x| pi[x]).sum();
    if mass <= 0.0 {
        return Err(Error::EmptyRestriction);
    }
    let mut boundary = 0.0;
    for x in 0..n {
        if !member[x] {
            continue;
        }
        for y in 0..n {
            if !member[y] {
                boundary += pi[x] * chain.prob(x, y);
            }
        }
    }
    Ok(boundary / mass)
}

// ---------------------------------------------------------------------------
// Incremental cut bookkeeping
// ---------------------------------------------------------------------------

/// Sparse ergodic-flow matrix with row and column adjacency.
struct FlowGraph {
    n: usize,
    pi: Vec<f64>,
    /// Outgoing flows per state: (target, Q(x,y)).
    rows: Vec<Vec<(u32, f64)>>,
    /// Incoming flows per state: (source, Q(x,y)).
    cols: Vec<Vec<(u32, f64)>>,
    /// Q(x,x).
    diag: Vec<f64>,
}

impl FlowGraph {
    fn new(chain: &FiniteChain) -> Self {
        let n = chain.n();
        let pi = chain.stationary().to_vec();
        let mut rows = vec![Vec::new(); n];
        let mut cols = vec![Vec::new(); n];
        let mut diag = vec![0.0; n];
        for x in 0..n {
            for y in 0..n {
                let q = pi[x] * chain.prob(x, y);
                if q == 0.0 {
                    continue;
                }
                if x == y {
                    diag[x] = q;
                }
                rows[x].push((y as u32, q));
                cols[y].push((x as u32, q));
            }
        }
        FlowGraph { n, pi, rows, cols, diag }
    }
}

/// A subset with maintained boundary flow `B = Q(S,Sᶜ)` and mass `π(S)`,
/// supporting O(degree) membership toggles.
struct CutState<'a> {
    g: &'a FlowGraph,
    member: Vec<bool>,
    /// `in_row[u] = Σ_{y∈S} Q(u,y)`.
    in_row: Vec<f64>,
    /// `in_col[u] = Σ_{x∈S} Q(x,u)`.
    in_col: Vec<f64>,
    boundary: f64,
    mass: f64,
    size: usize,
}

impl<'a> CutState<'a> {
    fn empty(g: &'a FlowGraph) -> Self {
        CutState {
            g,
            member: vec![false; g.n],
            in_row: vec![0.0; g.n],
            in_col: vec![0.0; g.n],
            boundary: 0.0,
            mass: 0.0,
            size: 0,
        }
    }

    fn phi(&self) -> f64 {
        self.boundary / self.mass
    }

    /// Boundary and mass if `v` were toggled, without applying.
    fn peek_toggle(&self, v: usize) -> (f64, f64) {
        let g = self.g;
        if self.member[v] {
            (
                self.boundary - g.pi[v] + self.in_row[v] + self.in_col[v] - g.diag[v],
                self.mass - g.pi[v],
            )
        } else {
            (
                self.boundary + g.pi[v] - g.diag[v] - self.in_row[v] - self.in_col[v],
                self.mass + g.pi[v],
            )
        }
    }

    fn toggle(&mut self, v: usize) {
        let (b, m) = self.peek_toggle(v);
        let sign = if self.member[v] { -1.0 } else { 1.0 };
        self.member[v] = !self.member[v];
        self.size = if sign > 0.0 { self.size + 1 } else { self.size - 1 };
        self.boundary = b;
        self.mass = m;
        for &(u, q) in &self.g.cols[v] {
            self.in_row[u as usize] += sign * q;
        }
        for &(u, q) in &self.g.rows[v] {
            self.in_col[u as usize] += sign * q;
        }
    }
}

fn feasible(mass: f64, _size: usize) -> bool {
    mass > 0.0 && mass <= 0.5 + TOL_STRUCTURAL
}

/// At exact half mass both `S` and `Sᶜ` are feasible; keep only the
/// lexicographically smaller bitmask.
fn half_tie_keep(mask: u64, n: usize, mass: f64) -> bool {
    (mass - 0.5).abs() > TOL_STRUCTURAL || mask < (!mask & full_mask(n))
}

// ---------------------------------------------------------------------------
// Exact enumeration
// ---------------------------------------------------------------------------

/// Slack for collecting near-minimal cuts before the fresh re-evaluation
/// pass; generously above the ~1e-13 drift of the incremental updates.
const TIE_WINDOW: f64 = 1e-11;

/// Exhaustive conductance over all `2^n − 2` proper nonempty subsets with
/// `π(S) ≤ 1/2`, enumerated in Gray-code order with incremental boundary
/// updates, in parallel chunks. Ties break to the lexicographically
/// smallest bitmask. Refuses spaces larger than `max_states`.
///
/// Runs two passes: the first finds the minimum with incremental sums, the
/// second re-evaluates every cut within [`TIE_WINDOW`] of it from scratch,
/// so the reported value carries no incremental drift and the witness
/// tie-break is deterministic.
pub fn conductance_exact(chain: &FiniteChain, max_states: usize) -> Result<CutResult> {
    let n = chain.n();
    let cap = max_states.min(MAX_ENUMERABLE_STATES);
    if n > cap {
        return Err(Error::TooManyStates { n, cap });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 states".into()));
    }
    let g = FlowGraph::new(chain);
    let total: u64 = 1u64 << n;
    let chunk: u64 = 1u64 << 20;
    let num_chunks = total.div_ceil(chunk);

    // Walk one chunk in Gray-code order, feeding every feasible (phi, mask)
    // pair to `visit`.
    let scan_chunk = |ci: u64, visit: &mut dyn FnMut(f64, u64)| {
        let start = ci * chunk;
        let end = (start + chunk).min(total);
        let mut cut = CutState::empty(&g);
        let mut mask = start ^ (start >> 1);
        for i in mask_to_indices(mask) {
            cut.toggle(i);
        }
        let mut counter = start;
        loop {
            if cut.size > 0 && feasible(cut.mass, cut.size) && half_tie_keep(mask, n, cut.mass) {
                visit(cut.phi(), mask);
            }
            counter += 1;
            if counter >= end {
                break;
            }
            let bit = counter.trailing_zeros() as usize;
            cut.toggle(bit);
            mask ^= 1u64 << bit;
        }
    };

    let min_phi = (0..num_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut best = f64::INFINITY;
            scan_chunk(ci, &mut |phi, _| {
                if phi < best {
                    best = phi;
                }
            });
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    if !min_phi.is_finite() {
        return Err(Error::InvalidParameter("no feasible subset".into()));
    }

    let best = (0..num_chunks)
        .into_par_iter()
        .map(|ci| {
            let mut best = (f64::INFINITY, u64::MAX);
            scan_chunk(ci, &mut |phi, mask| {
                if phi <= min_phi + TIE_WINDOW {
                    let fresh = set_conductance_mask(&g, mask);
                    if fresh < best.0 || (fresh == best.0 && mask < best.1) {
                        best = (fresh, mask);
                    }
                }
            });
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let witness = mask_to_indices(best.1);
    let value = set_conductance(chain, &witness)?;
    Ok(CutResult { value, witness, method: CutMethod::Exact })
}

/// Fresh `Φ(S)` for a bitmask subset, summing boundary flows in ascending
/// state order exactly as [`set_conductance`] does.
fn set_conductance_mask(g: &FlowGraph, mask: u64) -> f64 {
    let member = |i: u32| mask & (1u64 << i) != 0;
    let mut mass = 0.0;
    let mut boundary = 0.0;
    for x in 0..g.n {
        if !member(x as u32) {
            continue;
        }
        mass += g.pi[x];
        for &(y, q) in &g.rows[x] {
            if !member(y) {
                boundary += q;
            }
        }
    }
    boundary / mass
}

// ---------------------------------------------------------------------------
// Sweep heuristics
// ---------------------------------------------------------------------------

/// Candidate families for the sweep heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    /// Contiguous index windows (arcs, in the circular ordering of the
    /// states). Matches the one-dimensional structure of cycle walks and
    /// grid chains.
    Intervals,
    /// Prefixes of the second-eigenvector ordering of the additive
    /// reversibilization.
    Fiedler,
    /// Best-improvement single-state flips, seeded with the best candidate
    /// found by the other families.
    LocalSearch,
}

/// Minimum `Φ(S)` over the requested candidate families. The result is an
/// upper bound on the true conductance and is flagged
/// [`CutMethod::Heuristic`]. `budget` caps the number of local-search
/// evaluations.
pub fn conductance_sweep(
    chain: &FiniteChain,
    families: &[SweepFamily],
    budget: usize,
) -> Result<CutResult> {
    let n = chain.n();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 states".into()));
    }
    let g = FlowGraph::new(chain);
    let mut best: Option<(f64, Vec<usize>)> = None;
    fn consider(best: &mut Option<(f64, Vec<usize>)>, phi: f64, witness: Vec<usize>) {
        if best.as_ref().is_none_or(|(b, w)| phi < *b || (phi == *b && witness < *w)) {
            *best = Some((phi, witness));
        }
    }

    let families = if families.is_empty() {
        &[SweepFamily::Intervals, SweepFamily::Fiedler, SweepFamily::LocalSearch][..]
    } else {
        families
    };

    if families.contains(&SweepFamily::Intervals) {
        let per_start: Vec<(f64, Vec<usize>)> = (0..n)
            .into_par_iter()
            .map(|s| {
                let mut cut = CutState::empty(&g);
                let mut local: Option<(f64, Vec<usize>)> = None;
                for len in 1..n {
                    cut.toggle((s + len - 1) % n);
                    if feasible(cut.mass, cut.size) {
                        let phi = cut.phi();
                        if local.as_ref().is_none_or(|(b, _)| phi < *b) {
                            let mut w: Vec<usize> = (0..len).map(|j| (s + j) % n).collect();
                            w.sort_unstable();
                            local = Some((phi, w));
                        }
                    }
                }
                local.unwrap_or((f64::INFINITY, Vec::new()))
            })
            .collect();
        for (phi, w) in per_start {
            if phi.is_finite() {
                consider(&mut best, phi, w);
            }
        }
    }

    if families.contains(&SweepFamily::Fiedler) {
        let order = fiedler_order(chain);
        let mut cut = CutState::empty(&g);
        for (k, &v) in order.iter().enumerate().take(n - 1) {
            cut.toggle(v);
            if feasible(cut.mass, cut.size) {
                let phi = cut.phi();
                let mut w: Vec<usize> = order[..=k].to_vec();
                w.sort_unstable();
                consider(&mut best, phi, w);
            }
        }
    }

    if families.contains(&SweepFamily::LocalSearch) {
        let seed = best
            .as_ref()
            .map(|(_, w)| w.clone())
            .unwrap_or_else(|| vec![0]);
        let mut cut = CutState::empty(&g);
        for &v in &seed {
            cut.toggle(v);
        }
        let mut evals = 0usize;
        loop {
            let current = if feasible(cut.mass, cut.size) { cut.phi() } else { f64::INFINITY };
            let mut improve: Option<(f64, usize)> = None;
            for v in 0..n {
                if evals >= budget {
                    break;
                }
                evals += 1;
                let (b, m) = cut.peek_toggle(v);
                let size = if cut.member[v] { cut.size - 1 } else { cut.size + 1 };
                if size == 0 || size == n || !feasible(m, size) {
                    continue;
                }
                let phi = b / m;
                if phi < current - 1e-15 && improve.as_ref().is_none_or(|(p, _)| phi < *p) {
                    improve = Some((phi, v));
                }
            }
            match improve {
                Some((_, v)) if evals < budget => cut.toggle(v),
                _ => break,
            }
        }
        if feasible(cut.mass, cut.size) {
            let w: Vec<usize> = (0..n).filter(|&v| cut.member[v]).collect();
            let phi = cut.phi();
            consider(&mut best, phi, w);
        }
    }

    let (_, witness) = best.ok_or_else(|| Error::InvalidParameter("no feasible cut".into()))?;
    let value = set_conductance(chain, &witness)?;
    Ok(CutResult { value, witness, method: CutMethod::Heuristic })
}

/// Ordering of states by the second eigenvector of the symmetrized,
/// π-normalized flow operator, computed by deflated power iteration with a
/// fixed start vector and iteration count (deterministic).
fn fiedler_order(chain: &FiniteChain) -> Vec<usize> {
    let n = chain.n();
    let pi = chain.stationary();
    let sqrt_pi: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    // s[i][j] = (Q(i,j)+Q(j,i)) / (2 √(π_i π_j)); top eigenvector is √π.
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let q = 0.5 * (pi[i] * chain.prob(i, j) + pi[j] * chain.prob(j, i));
            if sqrt_pi[i] > 0.0 && sqrt_pi[j] > 0.0 {
                s[i * n + j] = q / (sqrt_pi[i] * sqrt_pi[j]);
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sin()).collect();
    // Shift by +1 to make the spectrum nonnegative so the power iteration
    // converges to the second-largest eigenvalue after deflation.
    for _ in 0..300 {
        let dot: f64 = v.iter().zip(&sqrt_pi).map(|(a, b)| a * b).sum();
        for i in 0..n {
            v[i] -= dot * sqrt_pi[i];
        }
        let mut next = vec![0.0; n];
        for i in 0..n {
            let mut acc = v[i]; // identity shift
            let row = &s[i * n..(i + 1) * n];
            for j in 0..n {
                acc += row[j] * v[j];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            break;
        }
        for x in next.iter_mut() {
            *x /= norm;
        }
        v = next;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let va = v[a] / sqrt_pi[a].max(1e-300);
        let vb = v[b] / sqrt_pi[b].max(1e-300);
        va.partial_cmp(&vb).unwrap().then(a.cmp(&b))
    });
    order
}

/// Conductance lower bound on the mixing time: `τ ≥ 1/(4Φ)`.
pub fn mixing_lower_bound_from_conductance(phi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi <= 1.0) {
        return Err(Error::InvalidParameter(format!("phi = {phi} outside (0,1]")));
    }
    Ok(1.0 / (4.0 * phi))
}

/// Exact conductance with the default state cap.
pub fn conductance_exact_default(chain: &FiniteChain) -> Result<CutResult> {
    conductance_exact(chain, DEFAULT_MAX_EXACT_STATES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{complete_uniform, lazy_ball_walk, lazy_cycle, mixing_time, two_state};
    use crate::subset::mask_mass;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ergodic_flow_examples() {
        let chain = two_state(0.25);
        assert_abs_diff_eq!(ergodic_flow(&chain, &[0], &[1]), 0.125);
        assert_eq!(ergodic_flow(&chain, &[], &[0, 1]), 0.0);
        assert_abs_diff_eq!(ergodic_flow(&chain, &[0, 1], &[0, 1]), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ergodic_flow_symmetric_for_reversible() {
        let chain = lazy_ball_walk(8, 2).unwrap();
        for (a, b) in [(vec![0, 1], vec![3, 4, 5]), (vec![2], vec![0, 7]), (vec![0, 2, 4], vec![1, 3])]
        {
            let f = ergodic_flow(&chain, &a, &b);
            let r = ergodic_flow(&chain, &b, &a);
            assert_abs_diff_eq!(f, r, epsilon = 1e-12);
        }
    }

    #[test]
    fn set_conductance_examples() {
        let chain = two_state(0.25);
        assert_abs_diff_eq!(set_conductance(&chain, &[0]).unwrap(), 0.25);

        let z4 = lazy_cycle(4).unwrap();
        // Two boundary crossings of 1/16 each over π(S) = 1/2.
        assert_abs_diff_eq!(set_conductance(&z4, &[0, 1]).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            set_conductance(&z4, &[0, 1, 2, 3]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn set_conductance_mass_balance() {
        // Φ(S) = 1 − Q(S,S)/π(S).
        let chain = lazy_ball_walk(10, 3).unwrap();
        let s = vec![0, 1, 2, 5];
        let phi = set_conductance(&chain, &s).unwrap();
        let pi_s: f64 = s.iter().map(|&x| chain.stationary()[x]).sum();
        let inner = ergodic_flow(&chain, &s, &s);
        assert_abs_diff_eq!(phi, 1.0 - inner / pi_s, epsilon = 1e-12);
    }

    // Independent oracle: plain descending-mask enumeration with fresh
    // boundary sums, no incremental updates.
    fn brute_conductance(chain: &FiniteChain) -> (f64, u64) {
        let n = chain.n();
        let mut best = (f64::INFINITY, u64::MAX);
        for mask in (1..full_mask(n)).rev() {
            let mass = mask_mass(mask, chain.stationary());
            if mass <= 0.0 || mass > 0.5 + TOL_STRUCTURAL {
                continue;
            }
            if (mass - 0.5).abs() <= TOL_STRUCTURAL && mask > (!mask & full_mask(n)) {
                continue;
            }
            let s = mask_to_indices(mask);
            let phi = set_conductance(chain, &s).unwrap();
            if phi < best.0 || (phi == best.0 && mask < best.1) {
                best = (phi, mask);
            }
        }
        best
    }

    #[test]
    fn exact_two_state() {
        let cut = conductance_exact(&two_state(0.25), 20).unwrap();
        assert_abs_diff_eq!(cut.value, 0.25);
        assert_eq!(cut.witness, vec![0]);
        assert_eq!(cut.method, CutMethod::Exact);
    }

    #[test]
    fn exact_lazy_cycle_adjacent_pair() {
        let cut = conductance_exact(&lazy_cycle(4).unwrap(), 20).unwrap();
        assert_abs_diff_eq!(cut.value, 0.25, epsilon = 1e-15);
        assert_eq!(cut.witness, vec![0, 1]);
    }

    #[test]
    fn exact_complete_uniform() {
        // Q(S,Sᶜ) = π(S)π(Sᶜ), so Φ = 1/2 at any half split.
        let cut = conductance_exact(&complete_uniform(4), 20).unwrap();
        assert_abs_diff_eq!(cut.value, 0.5, epsilon = 1e-15);
        assert_eq!(cut.witness, vec![0, 1]);
    }

    #[test]
    fn exact_matches_brute_enumeration() {
        for chain in [
            two_state(0.25),
            lazy_cycle(5).unwrap(),
            lazy_ball_walk(8, 2).unwrap(),
            lazy_ball_walk(12, 3).unwrap(),
            complete_uniform(6),
            FiniteChain::from_matrix(vec![vec![0.9, 0.1], vec![0.3, 0.7]], None).unwrap(),
        ] {
            let fast = conductance_exact(&chain, 20).unwrap();
            let (phi, mask) = brute_conductance(&chain);
            assert_abs_diff_eq!(fast.value, phi, epsilon = 1e-12);
            assert_eq!(fast.witness, mask_to_indices(mask));
        }
    }

    #[test]
    fn exact_refuses_oversized() {
        let chain = lazy_ball_walk(24, 2).unwrap();
        assert!(matches!(
            conductance_exact(&chain, 20),
            Err(Error::TooManyStates { n: 24, cap: 20 })
        ));
    }

    #[test]
    fn sweep_upper_bounds_exact() {
        for chain in [
            lazy_cycle(6).unwrap(),
            lazy_ball_walk(12, 3).unwrap(),
            complete_uniform(5),
        ] {
            let exact = conductance_exact(&chain, 20).unwrap();
            let sweep = conductance_sweep(&chain, &[], 10_000).unwrap();
            assert!(sweep.value >= exact.value - 1e-12);
            assert_eq!(sweep.method, CutMethod::Heuristic);
        }
    }

    #[test]
    fn sweep_arcs_find_exact_cut_on_ball_walks() {
        // The interval family attains the exact minimum for cycle ball walks.
        for (m, k) in [(8, 1), (12, 2), (12, 3), (16, 4)] {
            let chain = lazy_ball_walk(m, k).unwrap();
            let exact = conductance_exact(&chain, 20).unwrap();
            let sweep = conductance_sweep(&chain, &[SweepFamily::Intervals], 0).unwrap();
            assert_abs_diff_eq!(sweep.value, exact.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn sweep_complete_uniform() {
        let cut = conductance_sweep(&complete_uniform(4), &[], 1000).unwrap();
        assert_abs_diff_eq!(cut.value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn lower_bound_formula_and_ordering() {
        assert_abs_diff_eq!(mixing_lower_bound_from_conductance(0.25).unwrap(), 1.0);
        assert!(mixing_lower_bound_from_conductance(0.0).is_err());
        assert!(mixing_lower_bound_from_conductance(-0.1).is_err());

        // 1/(4Φ) ≤ τ on the two-state chain and a cycle.
        let chain = two_state(0.25);
        let phi = conductance_exact(&chain, 20).unwrap().value;
        let tau = mixing_time(&chain).unwrap();
        assert!(mixing_lower_bound_from_conductance(phi).unwrap() <= tau as f64);

        let z = lazy_cycle(16).unwrap();
        let phi = conductance_exact(&z, 20).unwrap().value;
        let tau = mixing_time(&z).unwrap();
        assert!(mixing_lower_bound_from_conductance(phi).unwrap() <= tau as f64);
    }

    #[test]
    fn exact_conductance_is_global_minimum_over_arcs() {
        let chain = lazy_ball_walk(10, 2).unwrap();
        let exact = conductance_exact(&chain, 20).unwrap();
        for s in 0..10usize {
            for len in 1..=5usize {
                let arc: Vec<usize> = (0..len).map(|j| (s + j) % 10).collect();
                let mass: f64 = arc.iter().map(|&x| chain.stationary()[x]).sum();
                if mass > 0.5 + 1e-12 {
                    continue;
                }
                assert!(exact.value <= set_conductance(&chain, &arc).unwrap() + 1e-12);
            }
        }
    }
}
