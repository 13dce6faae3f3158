//! Built-in example problems.
//!
//! Five fixed instances cover the qualitatively distinct regimes the
//! solver handles: linear problems with constant solution under both tail
//! regimes, a nonlinear problem with a manufactured forcing term, a
//! coupled system produced by the memory reduction, and a decay
//! benchmark. Their metadata is chosen so that every declared bound
//! genuinely holds on the invariant ball it induces.

use std::sync::Arc;

use super::quad::QuadOptions;
use super::{manufacture, ManufacturedProblem};
use crate::error::{Error, Result};
use crate::problem::{
    from_memory_ide, Constants, ForcingFn, HalfLineProblem, KernelPair, RegularityData,
};

/// Identifiers accepted by [`entry`], in catalog order.
pub fn ids() -> [&'static str; 5] {
    ["p1", "p1-crit", "p2", "p3", "p4"]
}

/// One catalog item: the problem, a short description, and the exact
/// solution when one is known.
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub problem: HalfLineProblem,
    pub exact: Option<ForcingFn>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("id", &self.id)
            .field("summary", &self.summary)
            .field("problem", &self.problem)
            .finish_non_exhaustive()
    }
}

/// Looks up a catalog problem by identifier (case-insensitive).
pub fn entry(id: &str) -> Result<CatalogEntry> {
    match id.to_ascii_lowercase().as_str() {
        "p1" => {
            let m = p1();
            Ok(CatalogEntry {
                id: "p1",
                summary: "linear scalar problem, solution constant 1, decaying tail weight",
                problem: m.problem,
                exact: Some(m.exact),
            })
        }
        "p1-crit" => {
            let m = p1_crit();
            Ok(CatalogEntry {
                id: "p1-crit",
                summary: "linear scalar problem, solution constant 1, critical tail weight",
                problem: m.problem,
                exact: Some(m.exact),
            })
        }
        "p2" => {
            let m = p2()?;
            Ok(CatalogEntry {
                id: "p2",
                summary: "nonlinear scalar problem, solution e^-t, forcing built by quadrature",
                problem: m.problem,
                exact: Some(m.exact),
            })
        }
        "p3" => Ok(CatalogEntry {
            id: "p3",
            summary: "two-dimensional system from the unbounded-memory reduction",
            problem: p3()?,
            exact: None,
        }),
        "p4" => Ok(CatalogEntry {
            id: "p4",
            summary: "decay benchmark with strictly decaying forcing and weights",
            problem: p4(),
            exact: None,
        }),
        other => Err(Error::RejectedInput(format!(
            "unknown catalog id {other:?}; available: {}",
            ids().join(", ")
        ))),
    }
}

// Sup bounds for the linear 0.25 x kernels: the smallest self-consistent
// declaration satisfies C = 0.25 (0.75 + 2 C), giving C = 0.375 and an
// invariant ball of radius 1.5.
fn linear_quarter_regularity() -> RegularityData {
    RegularityData {
        lf: 0.25,
        lg: 0.25,
        cf: 0.375,
        cg: 0.375,
        df: Some(0.0),
        dg: Some(0.0),
        ef: Some(0.0),
        eg: Some(0.0),
    }
}

/// Linear scalar problem with decaying tail weight whose solution is the
/// constant 1: both integral terms of the constant sum to 0.25, and the
/// forcing supplies the remaining 0.75 at every time.
pub fn p1() -> ManufacturedProblem {
    ManufacturedProblem {
        problem: HalfLineProblem {
            dim: 1,
            constants: Constants {
                alpha1: 1.0,
                alpha2: 1.0,
                beta: 1.0,
                gamma: 0.0,
            },
            regularity: linear_quarter_regularity(),
            kernels: KernelPair::scalar(|_, _, x| 0.25 * x, |_, _, x| 0.25 * x),
            x0: Arc::new(|_| vec![0.75]),
            x0_sup: 0.75,
        },
        exact: Arc::new(|_| vec![1.0]),
    }
}

/// The same linear problem with the tail weight at its critical setting
/// `b = g`, where the solver switches to the reweighted variables. The
/// forcing `0.5 + 0.25 e^{-t}` keeps the constant 1 exact.
pub fn p1_crit() -> ManufacturedProblem {
    ManufacturedProblem {
        problem: HalfLineProblem {
            dim: 1,
            constants: Constants {
                alpha1: 1.0,
                alpha2: 1.0,
                beta: 1.0,
                gamma: 1.0,
            },
            regularity: linear_quarter_regularity(),
            kernels: KernelPair::scalar(|_, _, x| 0.25 * x, |_, _, x| 0.25 * x),
            x0: Arc::new(|t| vec![0.5 + 0.25 * (-t).exp()]),
            x0_sup: 0.75,
        },
        exact: Arc::new(|_| vec![1.0]),
    }
}

/// Nonlinear scalar problem with exact solution `e^{-t}`.
///
/// The kernels are globally bounded and Lipschitz, so the declared
/// constants hold on any ball. The forcing term is produced by
/// [`manufacture`], which charges the two integrals of the exact solution
/// to oracle quadrature on every evaluation.
pub fn p2() -> Result<ManufacturedProblem> {
    manufacture(
        1,
        Constants {
            alpha1: 1.0,
            alpha2: 1.0,
            beta: 1.0,
            gamma: 0.0,
        },
        RegularityData {
            lf: 0.3,
            lg: 0.3,
            cf: 0.3,
            cg: 0.3,
            df: Some(0.0),
            dg: Some(0.15),
            ef: Some(0.3),
            eg: Some(0.15),
        },
        KernelPair::scalar(
            |_, s, x| 0.3 * x.sin() / (1.0 + s),
            |t, s, x| 0.3 * x.cos() * (-(s - t) / 2.0).exp(),
        ),
        Arc::new(|t: f64| vec![(-t).exp()]),
        Some(1.0),
        &QuadOptions::default(),
    )
}

/// Coupled system from an initial value problem with unbounded memory:
/// the state `u` obeys `du/dt = 0.15 e^t sin(u + v)` for `t <= 0` with
/// `u(0) = 0.4`, driven by the memory functional
/// `v(t) = int_{-inf}^t 0.2 e^{s - t/2} cos(u(s)) ds`.
///
/// The growth profiles of both right hand sides match the declared
/// constants exactly, so the wrapped kernels are bounded; the exponential
/// factors cancel analytically and leave `-0.15 sin(x_1 + x_2)` and
/// `0.2 cos(x_1)` up to roundoff.
pub fn p3() -> Result<HalfLineProblem> {
    from_memory_ide(
        |s, u, v| vec![0.15 * s.exp() * (u[0] + v[0]).sin()],
        |t, s, u| vec![0.2 * (s - 0.5 * t).exp() * u[0].cos()],
        vec![0.4],
        Constants {
            alpha1: -1.0,
            alpha2: 0.0,
            beta: 1.0,
            gamma: 0.5,
        },
        RegularityData {
            lf: 0.3,
            lg: 0.2,
            cf: 0.15,
            cg: 0.2,
            df: Some(0.0),
            dg: Some(0.0),
            ef: Some(0.0),
            eg: Some(0.0),
        },
    )
}

/// Decay benchmark: every ingredient of the node bound decays, so the
/// solution must die out along the grid. The kernels are globally bounded
/// by 0.2 with Lipschitz constant 0.2.
pub fn p4() -> HalfLineProblem {
    HalfLineProblem {
        dim: 1,
        constants: Constants {
            alpha1: 1.0,
            alpha2: 2.0,
            beta: 1.0,
            gamma: 0.0,
        },
        regularity: RegularityData {
            lf: 0.2,
            lg: 0.2,
            cf: 0.2,
            cg: 0.2,
            df: Some(0.0),
            dg: Some(0.0),
            ef: Some(0.0),
            eg: Some(0.0),
        },
        kernels: KernelPair::scalar(|_, _, x| 0.2 * x.sin(), |_, _, x| 0.2 * x.cos()),
        x0: Arc::new(|t| vec![(-t).exp()]),
        x0_sup: 1.0,
    }
}
