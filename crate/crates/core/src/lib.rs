//! # mixlift
//!
//! Exact analysis of mixing for finite Markov chains, and of how much a
//! *lift* (a chain on a larger state space that projects back onto the
//! original one) can speed that mixing up.
//!
//! The toolkit is organized around a handful of objects:
//!
//! - [`chain::FiniteChain`]: a labeled row-stochastic matrix with its
//!   stationary distribution. Everything downstream is an exact linear-algebra
//!   computation on this object: matrix powers, total-variation distance,
//!   mixing profiles ([`chain::mixing_profile`]).
//! - [`decomposition::KernelDecomposition`]: a holding/jump representation
//!   `K(x,·) = α_x δ_x + (1−α_x) Σ_U K_{x,U} π|_U` of a lazy kernel. Its
//!   smallest jump-set mass `π*` replaces `min_x π(x)` in the mixing bounds,
//!   and the `(β, γ)` certificates quantify how quickly mass escapes small
//!   sets.
//! - [`conductance`]: ergodic flow `Q(A,B)`, set conductance `Φ(S)`, the
//!   global conductance `Φ` by exhaustive bitmask enumeration (small spaces)
//!   or sweep-cut heuristics (large ones).
//! - [`evolving`]: the evolving-set process `S_{t+1} = {y : Q(S_t,y)/π(y) ≥ U}`,
//!   with exact set-chain distributions on tiny spaces and numerical checks
//!   of its transition identity, martingale property, ratio decay, and
//!   absorption bound.
//! - [`bounds`]: closed-form evaluators for the conductance sandwich on the
//!   mixing time and for the square-root lower bounds on the mixing time of
//!   any lift.
//! - [`lifting::LiftedChain`]: a chain together with a projection map, checked
//!   exactly against the defining fiber-sum identity; includes the
//!   Diaconis–Holmes–Neal lifted cycle walk.
//! - [`continuous`]: mixture-of-uniforms kernels on a torus or box, their
//!   grid discretizations (proposal, Metropolis correction, covering map),
//!   approximation diagnostics, and the Fourier character bound for the
//!   torus walk.
//!
//! Probability arithmetic is plain `f64` with explicit tolerances; exact
//! rational arithmetic is out of scope. See [`TOL_STRUCTURAL`] and
//! [`TOL_FIXED_POINT`].

pub mod bounds;
pub mod chain;
pub mod conductance;
pub mod continuous;
pub mod decomposition;
pub mod evolving;
pub mod io;
pub mod lifting;
pub mod subset;

/// Tolerance for structural identities that hold to rounding error:
/// row sums, probability normalization, reversibility, reconstruction.
pub const TOL_STRUCTURAL: f64 = 1e-12;

/// Tolerance for fixed-point and solver residuals (`πK = π`, reversibility
/// of Metropolis chains), where a linear solve or O(n) accumulation sits
/// between the inputs and the check.
pub const TOL_FIXED_POINT: f64 = 1e-10;

/// Default cap on mixing-time iteration; chains that have not mixed by this
/// many steps report [`Error::NotMixed`] instead of looping forever.
pub const DEFAULT_ITERATION_CAP: usize = 1_000_000;

/// Default cap on state count for exhaustive subset enumeration
/// (`2^n` subsets; ~10^6 at the default).
pub const DEFAULT_MAX_EXACT_STATES: usize = 20;

/// Default cap on the number of reachable sets in the exact set-chain
/// expansion of the evolving-set process.
pub const DEFAULT_SET_STATE_CAP: usize = 4096;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),
    #[error("stationary distribution is not unique: chain is reducible ({0})")]
    Reducible(String),
    #[error("supplied vector is not a distribution: {0}")]
    NotDistribution(String),
    #[error("stationary check failed: max |πK − π| = {residual:e} exceeds {tol:e}")]
    NotStationary { residual: f64, tol: f64 },
    #[error("not mixed within cap of {cap} steps (last worst-case TV = {last_tv})")]
    NotMixed { cap: usize, last_tv: f64 },
    #[error("restriction undefined: the subset has zero mass")]
    EmptyRestriction,
    #[error("state space too large for exact enumeration: {n} states > cap {cap}; use the sweep heuristic")]
    TooManyStates { n: usize, cap: usize },
    #[error("set-chain expansion exceeded the cap: frontier holds {frontier} sets (cap {cap})")]
    SetStateCap { frontier: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quadrature mass check failed: total cell mass {total} deviates from 1 by more than {tol:e}")]
    QuadratureMass { total: f64, tol: f64 },
    #[error("empty discretized jump set for state {state} (jump rule {rule}): no grid point carries mass")]
    EmptyJumpSet { state: String, rule: usize },
    #[error("not enough trials: {trials} cannot resolve the margin {margin:e} at 3σ")]
    InsufficientTrials { trials: usize, margin: f64 },
    #[error("projection is not onto: base state {0} has positive mass but an empty fiber")]
    ProjectionNotOnto(String),
    #[error("json: {0}")]
    Json(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
