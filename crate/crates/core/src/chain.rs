//! Finite Markov chains: validation, stationary distributions, matrix powers,
//! total variation, and exact mixing profiles.
//!
//! A [`FiniteChain`] owns a labeled row-stochastic matrix `K` (row `x` is the
//! distribution `K(x,·)`) together with a stationary distribution `π`, either
//! supplied and verified or computed by a deterministic linear solve. The
//! mixing profile `τ(ε)` is the first `t` at which the worst-start
//! total-variation distance to `π` falls strictly below `ε`; by convention
//! the mixing time is `τ(1/4)`.

use crate::{Error, Result, DEFAULT_ITERATION_CAP, TOL_FIXED_POINT, TOL_STRUCTURAL};
use rayon::prelude::*;

/// Strictness slack for the `τ(ε)` comparison. The infimum in the mixing
/// profile uses a strict `<`; we require `TV < ε − STRICT_TOL` so the
/// boundary case `TV = ε` (which occurs exactly, e.g. at `t = 1` for the
/// symmetric two-state chain with `ε = 1/4`) resolves the same way in
/// floating point on every platform.
pub const STRICT_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Dense square matrices
// ---------------------------------------------------------------------------

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    /// `self * other`, naive ikj product.
    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * src[j];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &SquareMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

/// A probability vector: nonnegative entries summing to 1 within
/// [`TOL_STRUCTURAL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::NotDistribution("empty vector".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < -TOL_STRUCTURAL {
                return Err(Error::NotDistribution(format!("entry {i} = {w}")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL_STRUCTURAL {
            return Err(Error::NotDistribution(format!("sum = {sum}")));
        }
        Ok(Distribution(weights))
    }

    /// Point mass at state `i`.
    pub fn point(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Distribution(w)
    }

    /// Uniform distribution on `n` states.
    pub fn uniform(n: usize) -> Self {
        Distribution(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.0
    }
}

/// Total variation distance `(1/2) Σ_x |μ(x) − ν(x)|`.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::Dimension(format!(
            "distributions have lengths {} and {}",
            mu.len(),
            nu.len()
        )));
    }
    Ok(tv_slices(mu.weights(), nu.weights()))
}

pub(crate) fn tv_slices(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Renormalized restriction `μ|_S`: zero outside `S`, `μ(x)/μ(S)` inside.
pub fn restrict(mu: &Distribution, subset: &[usize]) -> Result<Distribution> {
    let mut mask = vec![false; mu.len()];
    for &i in subset {
        if i >= mu.len() {
            return Err(Error::Dimension(format!("state index {i} out of range")));
        }
        mask[i] = true;
    }
    let mass: f64 = mu
        .weights()
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(w, _)| w)
        .sum();
    if mass <= 0.0 {
        return Err(Error::EmptyRestriction);
    }
    let w = mu
        .weights()
        .iter()
        .zip(&mask)
        .map(|(&w, &m)| if m { w / mass } else { 0.0 })
        .collect();
    Ok(Distribution(w))
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Result of checking the chain invariants on raw matrix data.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub n: usize,
    /// Every entry in `[0,1]` and every row sums to 1 within tolerance.
    pub stochastic: bool,
    /// Largest `|row sum − 1|`.
    pub max_row_residual: f64,
    /// `min_x K(x,x)`, the holding (laziness) level δ.
    pub lazy_level: f64,
    /// Detailed balance `π(x)K(x,y) = π(y)K(y,x)` within tolerance, when a
    /// stationary vector is available to check against.
    pub reversible: Option<bool>,
    /// Largest detailed-balance residual, when checked.
    pub reversibility_residual: Option<f64>,
    /// Largest `|  (πK)(y) − π(y) |`, when a stationary vector was supplied.
    pub stationary_residual: Option<f64>,
    /// Human-readable description of every violated invariant.
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Check raw data without constructing a chain. `tol` bounds the
    /// row-sum/entry residuals; the stationary fixed-point check uses
    /// `max(tol, TOL_FIXED_POINT)`.
    pub fn check(matrix: &[Vec<f64>], stationary: Option<&[f64]>, tol: f64) -> Result<Self> {
        let n = matrix.len();
        if n == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        if let Some(pi) = stationary {
            if pi.len() != n {
                return Err(Error::Dimension(format!(
                    "stationary vector has {} entries, expected {n}",
                    pi.len()
                )));
            }
        }

        let mut violations = Vec::new();
        let mut max_row_residual: f64 = 0.0;
        let mut entries_ok = true;
        for (i, row) in matrix.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < -tol || v > 1.0 + tol {
                    entries_ok = false;
                    violations.push(format!("entry ({i},{j}) = {v} outside [0,1]"));
                }
            }
            let sum: f64 = row.iter().sum();
            let res = (sum - 1.0).abs();
            if res > tol {
                violations.push(format!("row {i} sums to {sum}"));
            }
            max_row_residual = max_row_residual.max(res);
        }
        let stochastic = entries_ok && max_row_residual <= tol;
        let lazy_level = (0..n).map(|i| matrix[i][i]).fold(f64::INFINITY, f64::min);

        let fixed_tol = tol.max(TOL_FIXED_POINT);
        let mut stationary_residual = None;
        let mut reversible = None;
        let mut reversibility_residual = None;
        if let Some(pi) = stationary {
            let mass: f64 = pi.iter().sum();
            if pi.iter().any(|&w| !w.is_finite() || w < -tol) || (mass - 1.0).abs() > tol {
                violations.push(format!("stationary vector is not a distribution (sum {mass})"));
            }
            let mut res: f64 = 0.0;
            for y in 0..n {
                let mut acc = 0.0;
                for x in 0..n {
                    acc += pi[x] * matrix[x][y];
                }
                res = res.max((acc - pi[y]).abs());
            }
            stationary_residual = Some(res);
            if res > fixed_tol {
                violations.push(format!("πK = π residual {res:e} exceeds {fixed_tol:e}"));
            }
            let mut rev_res: f64 = 0.0;
            for x in 0..n {
                for y in (x + 1)..n {
                    rev_res = rev_res.max((pi[x] * matrix[x][y] - pi[y] * matrix[y][x]).abs());
                }
            }
            reversibility_residual = Some(rev_res);
            reversible = Some(rev_res <= tol.max(TOL_STRUCTURAL));
        }

        Ok(ValidationReport {
            n,
            stochastic,
            max_row_residual,
            lazy_level,
            reversible,
            reversibility_residual,
            stationary_residual,
            violations,
        })
    }
}

// ---------------------------------------------------------------------------
// FiniteChain
// ---------------------------------------------------------------------------

/// A finite Markov chain: ordered state labels, a row-stochastic transition
/// matrix, and a stationary distribution.
#[derive(Debug, Clone)]
pub struct FiniteChain {
    states: Vec<String>,
    matrix: SquareMatrix,
    stationary: Vec<f64>,
    lazy_level: f64,
    reversible: bool,
}

impl FiniteChain {
    /// Build a chain from labeled rows. If `stationary` is `None` it is
    /// computed by a linear solve (requires irreducibility); if supplied it
    /// is verified to satisfy `πK = π` within [`TOL_FIXED_POINT`].
    pub fn new(
        states: Vec<String>,
        matrix: Vec<Vec<f64>>,
        stationary: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n = states.len();
        if matrix.len() != n {
            return Err(Error::Dimension(format!(
                "{} states but {} matrix rows",
                n,
                matrix.len()
            )));
        }
        let report = ValidationReport::check(&matrix, stationary.as_deref(), TOL_STRUCTURAL)?;
        if !report.stochastic {
            return Err(Error::NotStochastic(report.violations.join("; ")));
        }
        let mat = SquareMatrix::from_rows(&matrix)?;
        let pi = match stationary {
            Some(pi) => {
                let res = report.stationary_residual.unwrap_or(f64::INFINITY);
                if res > TOL_FIXED_POINT {
                    return Err(Error::NotStationary { residual: res, tol: TOL_FIXED_POINT });
                }
                Distribution::new(pi)?.into_weights()
            }
            None => solve_stationary(&mat)?,
        };
        let lazy_level = report.lazy_level;
        let mut rev_res: f64 = 0.0;
        for x in 0..n {
            for y in (x + 1)..n {
                rev_res = rev_res.max((pi[x] * mat.get(x, y) - pi[y] * mat.get(y, x)).abs());
            }
        }
        Ok(FiniteChain {
            states,
            matrix: mat,
            stationary: pi,
            lazy_level,
            reversible: rev_res <= TOL_STRUCTURAL,
        })
    }

    /// Build from a matrix with numeric labels `"0", "1", …`.
    pub fn from_matrix(matrix: Vec<Vec<f64>>, stationary: Option<Vec<f64>>) -> Result<Self> {
        let states = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::new(states, matrix, stationary)
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.matrix.get(x, y)
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn stationary_distribution(&self) -> Distribution {
        Distribution(self.stationary.clone())
    }

    /// Holding level `δ = min_x K(x,x)`.
    pub fn lazy_level(&self) -> f64 {
        self.lazy_level
    }

    /// Detailed balance holds within [`TOL_STRUCTURAL`].
    pub fn is_reversible(&self) -> bool {
        self.reversible
    }

    /// Re-run the invariant checks on this chain.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let rows: Vec<Vec<f64>> = self.matrix.rows().map(|r| r.to_vec()).collect();
        ValidationReport::check(&rows, Some(&self.stationary), tol)
            .expect("dimensions are consistent by construction")
    }

    /// Exact `t`-step kernel `K^t` by binary exponentiation; `K^0` is the
    /// identity.
    pub fn step_power(&self, t: usize) -> SquareMatrix {
        let mut result = SquareMatrix::identity(self.n());
        let mut base = self.matrix.clone();
        let mut e = t;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// One step of a distribution vector: `μ ← μK`.
    pub fn step_distribution(&self, mu: &[f64], out: &mut [f64]) {
        let n = self.n();
        out.iter_mut().for_each(|v| *v = 0.0);
        for x in 0..n {
            let w = mu[x];
            if w == 0.0 {
                continue;
            }
            let row = self.matrix.row(x);
            for y in 0..n {
                out[y] += w * row[y];
            }
        }
    }
}

/// Solve `πK = π`, `Σπ = 1` by Gaussian elimination after confirming the
/// transition graph is strongly connected (otherwise the solution is not
/// unique and we refuse).
pub fn solve_stationary(matrix: &SquareMatrix) -> Result<Vec<f64>> {
    let n = matrix.n();
    if !strongly_connected(matrix) {
        return Err(Error::Reducible(
            "transition graph is not strongly connected".into(),
        ));
    }
    // Rows of A: (K^T − I) with the last equation replaced by Σπ = 1.
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = matrix.get(j, i) - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    b[n - 1] = 1.0;

    // LU with partial pivoting, solving in place.
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if piv_abs < 1e-14 {
            return Err(Error::Reducible("singular stationary system".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut pi = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a[i * n + j] * pi[j];
        }
        pi[i] = acc / a[i * n + i];
    }
    // Clean tiny negative round-off and renormalize.
    for v in pi.iter_mut() {
        if *v < 0.0 && *v > -1e-12 {
            *v = 0.0;
        }
    }
    let total: f64 = pi.iter().sum();
    for v in pi.iter_mut() {
        *v /= total;
    }
    // Residual check against the fixed-point tolerance.
    let mut res: f64 = 0.0;
    for y in 0..n {
        let mut acc = 0.0;
        for x in 0..n {
            acc += pi[x] * matrix.get(x, y);
        }
        res = res.max((acc - pi[y]).abs());
    }
    if res > TOL_FIXED_POINT {
        return Err(Error::NotStationary { residual: res, tol: TOL_FIXED_POINT });
    }
    Ok(pi)
}

fn strongly_connected(matrix: &SquareMatrix) -> bool {
    let n = matrix.n();
    let reach = |transpose: bool| -> usize {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let w = if transpose { matrix.get(v, u) } else { matrix.get(u, v) };
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    };
    reach(false) == n && reach(true) == n
}

// ---------------------------------------------------------------------------
// Mixing
// ---------------------------------------------------------------------------

/// Exact mixing profile: `tau` is the first `t` with worst-start TV strictly
/// below `ε`; `trace[t]` is the worst-start TV at step `t` for `t = 0..=tau`.
#[derive(Debug, Clone)]
pub struct MixingProfile {
    pub tau: usize,
    pub trace: Vec<f64>,
}

/// Compute `τ(ε)` by iterating one distribution vector per start state in
/// lockstep (`O(n·nnz)` per step), recording the worst-case TV trace.
///
/// Chains that have not mixed after `cap` steps yield [`Error::NotMixed`]
/// carrying the last trace value, so non-ergodic inputs (e.g. the identity
/// chain) terminate with a diagnostic.
pub fn mixing_profile(chain: &FiniteChain, eps: f64, cap: usize) -> Result<MixingProfile> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0,1)")));
    }
    let n = chain.n();
    let pi = chain.stationary();

    // Sparse row storage: (col, val) pairs per row.
    let rows: Vec<Vec<(u32, f64)>> = (0..n)
        .map(|x| {
            chain
                .matrix()
                .row(x)
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(y, &v)| (y as u32, v))
                .collect()
        })
        .collect();

    let mut dists: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut d = vec![0.0; n];
            d[x] = 1.0;
            d
        })
        .collect();

    let worst = |ds: &[Vec<f64>]| -> f64 {
        ds.par_iter()
            .map(|d| tv_slices(d, pi))
            .reduce(|| 0.0, f64::max)
    };

    let mut trace = vec![worst(&dists)];
    if trace[0] < eps - STRICT_TOL {
        return Ok(MixingProfile { tau: 0, trace });
    }
    for t in 1..=cap {
        let next: Vec<Vec<f64>> = dists
            .par_iter()
            .map(|d| {
                let mut nd = vec![0.0; n];
                for (x, &w) in d.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    for &(y, v) in &rows[x] {
                        nd[y as usize] += w * v;
                    }
                }
                nd
            })
            .collect();
        dists = next;
        let w = worst(&dists);
        trace.push(w);
        if w < eps - STRICT_TOL {
            return Ok(MixingProfile { tau: t, trace });
        }
    }
    Err(Error::NotMixed { cap, last_tv: *trace.last().unwrap() })
}

/// Mixing time `τ = τ(1/4)` with the default iteration cap.
pub fn mixing_time(chain: &FiniteChain) -> Result<usize> {
    Ok(mixing_profile(chain, 0.25, DEFAULT_ITERATION_CAP)?.tau)
}

// ---------------------------------------------------------------------------
// Named chains
// ---------------------------------------------------------------------------

/// Symmetric two-state chain holding with probability `1 − p`.
pub fn two_state(p: f64) -> FiniteChain {
    FiniteChain::from_matrix(
        vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
        Some(vec![0.5, 0.5]),
    )
    .expect("valid two-state chain")
}

/// Lazy simple random walk on the cycle `Z_n`: hold 1/2, step 1/4 to each
/// neighbor. Requires `n ≥ 3`.
pub fn lazy_cycle(n: usize) -> Result<FiniteChain> {
    lazy_ball_walk(n, 1)
}

/// Lazy ball walk on the cycle `Z_m`: hold 1/2, jump `1/(4k)` to each state
/// within graph distance `k`. This is the row-stochastic walk whose
/// holding/jump representation has a single radius-`k` ball jump set per
/// state. Requires `3 ≤ 2k + 1 ≤ m`.
pub fn lazy_ball_walk(m: usize, k: usize) -> Result<FiniteChain> {
    if k == 0 || 2 * k + 1 > m {
        return Err(Error::InvalidParameter(format!(
            "ball walk needs 2k+1 ≤ m, got m={m}, k={k}"
        )));
    }
    let mut rows = vec![vec![0.0; m]; m];
    let step = 1.0 / (4.0 * k as f64);
    for i in 0..m {
        rows[i][i] = 0.5;
        for d in 1..=k {
            rows[i][(i + d) % m] += step;
            rows[i][(i + m - d % m) % m] += step;
        }
    }
    FiniteChain::from_matrix(rows, Some(vec![1.0 / m as f64; m]))
}

/// Complete uniform chain `K(x,y) = 1/n`.
pub fn complete_uniform(n: usize) -> FiniteChain {
    FiniteChain::from_matrix(
        vec![vec![1.0 / n as f64; n]; n],
        Some(vec![1.0 / n as f64; n]),
    )
    .expect("valid complete chain")
}

/// Identity chain with uniform stationary vector (reducible; useful only to
/// exercise diagnostics).
pub fn identity_chain(n: usize) -> FiniteChain {
    let rows = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    FiniteChain::from_matrix(rows, Some(vec![1.0 / n as f64; n])).expect("valid identity chain")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn validate_two_state() {
        let chain = two_state(0.25);
        let report = chain.validate(1e-12);
        assert!(report.is_valid());
        assert_eq!(report.lazy_level, 0.75);
        assert_eq!(report.reversible, Some(true));
    }

    #[test]
    fn validate_flags_bad_row_sum() {
        let report =
            ValidationReport::check(&[vec![0.6, 0.5], vec![0.5, 0.5]], None, 1e-12).unwrap();
        assert!(!report.stochastic);
        assert!(report.violations.iter().any(|v| v.contains("row 0 sums to 1.1")));
    }

    #[test]
    fn validate_identity() {
        let chain = identity_chain(3);
        let report = chain.validate(1e-12);
        assert!(report.is_valid());
        assert_eq!(report.lazy_level, 1.0);
        assert_eq!(report.reversible, Some(true));
    }

    #[test]
    fn validate_dimension_mismatch_is_structural_error() {
        let err = ValidationReport::check(&[vec![0.5, 0.5], vec![1.0]], None, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn stationary_symmetric_cases() {
        let chain = two_state(0.25);
        assert_eq!(chain.stationary(), &[0.5, 0.5]);
        let cycle = lazy_cycle(4).unwrap();
        for &w in cycle.stationary() {
            assert_abs_diff_eq!(w, 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn stationary_solved_matches_hand_solution() {
        // πK = π for [[0.9,0.1],[0.3,0.7]]: balance 0.1·π0 = 0.3·π1 → π = (3/4, 1/4).
        let chain = FiniteChain::from_matrix(vec![vec![0.9, 0.1], vec![0.3, 0.7]], None).unwrap();
        assert_abs_diff_eq!(chain.stationary()[0], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(chain.stationary()[1], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn stationary_rejects_reducible() {
        let err = FiniteChain::from_matrix(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Reducible(_)));
    }

    #[test]
    fn step_power_base_cases() {
        let chain = two_state(0.25);
        assert_eq!(chain.step_power(0), SquareMatrix::identity(2));
        assert_eq!(chain.step_power(1), *chain.matrix());
        // Hand square: 0.75² + 0.25² = 0.625.
        let k2 = chain.step_power(2);
        assert_abs_diff_eq!(k2.get(0, 0), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(k2.get(0, 1), 0.375, epsilon = 1e-15);
        for row in k2.rows() {
            Distribution::new(row.to_vec()).unwrap();
        }
    }

    #[test]
    fn tv_examples() {
        let point = Distribution::point(2, 0);
        let unif = Distribution::uniform(2);
        assert_abs_diff_eq!(tv_distance(&point, &unif).unwrap(), 0.5);
        assert_eq!(tv_distance(&unif, &unif).unwrap(), 0.0);
        let mu = Distribution::new(vec![0.75, 0.25]).unwrap();
        assert_abs_diff_eq!(tv_distance(&mu, &unif).unwrap(), 0.25);
        assert!(tv_distance(&unif, &Distribution::uniform(3)).is_err());
    }

    #[test]
    fn restrict_examples() {
        let u4 = Distribution::uniform(4);
        let r = restrict(&u4, &[0, 1]).unwrap();
        assert_eq!(r.weights(), &[0.5, 0.5, 0.0, 0.0]);

        let point = Distribution::point(2, 0);
        assert_eq!(restrict(&point, &[0]).unwrap(), point);
        assert!(matches!(restrict(&point, &[1]), Err(Error::EmptyRestriction)));

        // Normalize (0.1,0.2,0.3,0.4) on {1,3} by 0.6.
        let mu = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let r = restrict(&mu, &[1, 3]).unwrap();
        assert_abs_diff_eq!(r.weights()[1], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights()[3], 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(r.weights()[0], 0.0);
    }

    // Oracle: worst-start TV at time t from explicitly accumulated matrix
    // powers, independent of the iteration in `mixing_profile`.
    fn brute_worst_tv(chain: &FiniteChain, t: usize) -> f64 {
        let mut p = SquareMatrix::identity(chain.n());
        for _ in 0..t {
            p = p.mul(chain.matrix());
        }
        (0..chain.n())
            .map(|x| tv_slices(p.row(x), chain.stationary()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn mixing_profile_two_state_boundary() {
        let chain = two_state(0.25);
        // Oracle values: TV(1) = 0.25 exactly (strict inequality fails),
        // TV(2) = 0.125.
        assert_abs_diff_eq!(brute_worst_tv(&chain, 1), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(brute_worst_tv(&chain, 2), 0.125, epsilon = 1e-15);
        let profile = mixing_profile(&chain, 0.25, 1000).unwrap();
        assert_eq!(profile.tau, 2);
        assert_abs_diff_eq!(profile.trace[1], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(profile.trace[2], 0.125, epsilon = 1e-15);
        assert_eq!(mixing_time(&chain).unwrap(), 2);
    }

    #[test]
    fn mixing_profile_complete_chain_one_step() {
        let chain = complete_uniform(4);
        assert_eq!(mixing_profile(&chain, 0.25, 10).unwrap().tau, 1);
    }

    #[test]
    fn mixing_profile_identity_hits_cap() {
        let chain = identity_chain(3);
        match mixing_profile(&chain, 0.25, 50) {
            Err(Error::NotMixed { cap, last_tv }) => {
                assert_eq!(cap, 50);
                assert!(last_tv > 0.25);
            }
            other => panic!("expected NotMixed, got {other:?}"),
        }
    }

    #[test]
    fn mixing_trace_matches_power_oracle() {
        let chain = lazy_cycle(5).unwrap();
        let profile = mixing_profile(&chain, 0.25, 1000).unwrap();
        for (t, &tv) in profile.trace.iter().enumerate() {
            assert_abs_diff_eq!(tv, brute_worst_tv(&chain, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn cycle_mixing_ratio_is_diffusive() {
        let t8 = mixing_time(&lazy_cycle(8).unwrap()).unwrap();
        let t16 = mixing_time(&lazy_cycle(16).unwrap()).unwrap();
        let ratio = t16 as f64 / t8 as f64;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} (τ8={t8}, τ16={t16})");
    }

    #[test]
    fn worst_tv_nonincreasing_for_lazy_reversible() {
        for chain in [two_state(0.25), lazy_cycle(6).unwrap(), lazy_ball_walk(12, 2).unwrap()] {
            let profile = mixing_profile(&chain, 0.25, 10_000).unwrap();
            for w in profile.trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "trace increased: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn power_semigroup_property() {
        let chain = lazy_ball_walk(9, 2).unwrap();
        for (t, s) in [(1, 1), (2, 3), (4, 2)] {
            let lhs = chain.step_power(t + s);
            let rhs = chain.step_power(t).mul(&chain.step_power(s));
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
    }

    #[test]
    fn stationary_is_fixed_point_of_step() {
        for chain in [two_state(0.25), lazy_ball_walk(8, 2).unwrap(), complete_uniform(5)] {
            let mut out = vec![0.0; chain.n()];
            chain.step_distribution(chain.stationary(), &mut out);
            for (a, b) in out.iter().zip(chain.stationary()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
