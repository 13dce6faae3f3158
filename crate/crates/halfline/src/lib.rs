//! Solver for nonlinear integral equations on the half line with a
//! Volterra memory term and an exponentially weighted tail term.
//!
//! The equation couples each value `x(t)` to its past through an integral
//! over `[0, t]` with weight `e^{a1 s - a2 t}` and to its future through
//! an integral over `[t, inf)` with weight `e^{-b s + g t}`. Under a
//! Lipschitz budget `q = Lf/|a1| + Lg/b < 1` the discretized and
//! truncated system is a contraction, so successive substitution
//! converges with a computable error certificate.
//!
//! The crate provides the closed-form quadrature weights
//! ([`weights`]), the truncated node system with its critical-tail
//! reweighting ([`system`]), the certified fixed-point driver
//! ([`solver`]), oracle-grade verification tools and a problem catalog
//! ([`verify`]), and a deterministic batch front-end ([`cli`]).
//!
//! ```
//! use std::sync::Arc;
//! use halfline::{solve, Constants, Grid, HalfLineProblem, KernelPair, RegularityData};
//!
//! // Linear problem whose solution is the constant 1: both integral
//! // terms contribute 0.125 each in the limit, and the forcing term
//! // supplies the remaining 0.75.
//! let problem = HalfLineProblem {
//!     dim: 1,
//!     constants: Constants { alpha1: 1.0, alpha2: 1.0, beta: 1.0, gamma: 0.0 },
//!     regularity: RegularityData {
//!         lf: 0.25,
//!         lg: 0.25,
//!         cf: 0.375,
//!         cg: 0.375,
//!         ..Default::default()
//!     },
//!     kernels: KernelPair::scalar(|_, _, x| 0.25 * x, |_, _, x| 0.25 * x),
//!     x0: Arc::new(|_| vec![0.75]),
//!     x0_sup: 0.75,
//! };
//! let sol = solve(&problem, Grid::new(0.1, 200).unwrap(), 1e-10, 10_000).unwrap();
//! assert!(sol.report.converged);
//! assert!((sol.value(10)[0] - 1.0).abs() < 1e-6);
//! ```

pub mod cli;
pub mod error;
pub mod problem;
pub mod solver;
pub mod system;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use problem::{Constants, ForcingFn, HalfLineProblem, KernelFn, KernelPair, RegularityData};
pub use solver::{picard_solve, solve, solve_system, GridSolution, SolveReport, DEFAULT_MAX_ITER};
pub use system::{CaseTag, NodeSequence, TruncatedSystem, CRITICAL_TAIL_THRESHOLD};
pub use weights::{select_delta, DeltaParams, Grid};
