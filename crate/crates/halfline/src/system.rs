//! Truncated discrete systems on a uniform grid.
//!
//! Discretizing the equation with the closed-form cell weights and cutting
//! the tail sum at the last grid node turns the problem into a fixed point
//! equation for the node values `x_0 .. x_N`:
//!
//! ```text
//! x_i = b_i + sum_{j<i} w_ij f(t_i, t_j, x_j) + sum_{j=i}^N v_ij g(t_i, t_j, x_j).
//! ```
//!
//! When the tail weights keep a decay margin (`b > g`) this system is
//! solved as written. Without a margin the truncated tail transfers its
//! full mass to every node and the truncation analysis needs the
//! reweighted variables `y_i = e^{-i delta} x_i`; [`TruncatedSystem`]
//! performs the substitution internally and exposes both coordinate
//! systems through [`TruncatedSystem::transform`] and
//! [`TruncatedSystem::untransform`].

use crate::error::{Error, Result};
use crate::problem::HalfLineProblem;
use crate::weights::{select_delta, tail_weight, volterra_weight, DeltaParams, Grid};

/// Tail margins `b - g` at or below this threshold are treated as zero,
/// switching the system to the reweighted formulation.
pub const CRITICAL_TAIL_THRESHOLD: f64 = 1e-12;

// Largest admissible `N * delta`; beyond it `e^{N delta}` leaves f64 range.
const MAX_NODE_EXPONENT: f64 = 600.0;

/// Values attached to grid nodes, stored flat as `nodes * dim` numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSequence {
    dim: usize,
    data: Vec<f64>,
}

impl NodeSequence {
    pub fn zeros(nodes: usize, dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; nodes * dim],
        }
    }

    /// Repeats one vector at every node.
    pub fn constant(nodes: usize, value: &[f64]) -> Self {
        let mut s = Self::zeros(nodes, value.len());
        for i in 0..nodes {
            s.node_mut(i).copy_from_slice(value);
        }
        s
    }

    /// Fills node `i` with `f(i)`, rejecting vectors of the wrong length.
    pub fn from_fn(nodes: usize, dim: usize, f: impl Fn(usize) -> Vec<f64>) -> Result<Self> {
        let mut s = Self::zeros(nodes, dim);
        for i in 0..nodes {
            let v = f(i);
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            s.node_mut(i).copy_from_slice(&v);
        }
        Ok(s)
    }

    pub fn nodes(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn node_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Max norm of the node vector at `i`.
    pub fn node_norm(&self, i: usize) -> f64 {
        self.node(i).iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Max norm over all nodes and components.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `max_i |self_i - other_i|` in the max norm.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max_i scale(i) |self_i - other_i|`, the distance in a node-weighted
    /// norm.
    pub fn scaled_sup_distance(&self, other: &Self, scale: impl Fn(usize) -> f64) -> f64 {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.data.len(), other.data.len());
        let mut m = 0.0_f64;
        for i in 0..self.nodes() {
            let d = self
                .node(i)
                .iter()
                .zip(other.node(i))
                .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
            m = m.max(scale(i) * d);
        }
        m
    }
}

/// Which formulation the truncated system uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `b > g`: plain node variables, the truncated tail loses mass
    /// geometrically in the node index.
    TailDecaying,
    /// `b = g` up to [`CRITICAL_TAIL_THRESHOLD`]: reweighted node
    /// variables with a positive exponent from
    /// [`select_delta`](crate::weights::select_delta).
    TailCritical,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::TailDecaying => "tail-decaying",
            CaseTag::TailCritical => "tail-critical",
        }
    }
}

/// The discrete fixed point operator on a finite grid.
///
/// In the critical case the operator acts on the reweighted variables;
/// [`apply`](Self::apply) then reads
///
/// ```text
/// (T y)_i = e^{-i delta} b(t_i)
///         + e^{-i delta} [ sum_{j<i} w_ij f(t_i, t_j, e^{j delta} y_j)
///                        + sum_{j>=i} v_ij g(t_i, t_j, e^{j delta} y_j) ],
/// ```
///
/// which is conjugate to the plain operator: scaling the input up, the
/// output down, and the forcing accordingly leaves the fixed point set in
/// exact correspondence.
pub struct TruncatedSystem {
    problem: HalfLineProblem,
    grid: Grid,
    case: CaseTag,
    delta: Option<DeltaParams>,
    /// Forcing in system variables (scaled by `e^{-i delta}` when critical).
    forcing: NodeSequence,
    /// `e^{i delta}` per node; all ones in the decaying case.
    scale_up: Vec<f64>,
    /// `e^{-i delta}` per node; all ones in the decaying case.
    scale_down: Vec<f64>,
}

impl std::fmt::Debug for TruncatedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TruncatedSystem")
            .field("problem", &self.problem)
            .field("grid", &self.grid)
            .field("case", &self.case)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

impl TruncatedSystem {
    /// Validates the problem, classifies the tail, selects a reweighting
    /// exponent when needed, and evaluates the forcing at the nodes.
    pub fn assemble(problem: &HalfLineProblem, grid: Grid) -> Result<Self> {
        let report = problem.validate();
        if !report.passed() {
            return Err(Error::InvalidProblem {
                failures: report.failures(),
            });
        }
        let c = problem.constants;
        let critical = c.beta - c.gamma <= CRITICAL_TAIL_THRESHOLD;
        let delta = if critical {
            let params = select_delta(grid.h(), &c, &problem.regularity, None)?;
            let total = grid.last_index() as f64 * params.delta;
            if total > MAX_NODE_EXPONENT {
                return Err(Error::RejectedInput(format!(
                    "grid too long for the reweighted formulation: N * delta = {total} \
                     exceeds {MAX_NODE_EXPONENT} and e^{{N delta}} would overflow"
                )));
            }
            Some(params)
        } else {
            None
        };

        let nodes = grid.nodes();
        let d = delta.map_or(0.0, |p| p.delta);
        let scale_up: Vec<f64> = (0..nodes).map(|i| (i as f64 * d).exp()).collect();
        let scale_down: Vec<f64> = (0..nodes).map(|i| (-(i as f64) * d).exp()).collect();

        let mut forcing = NodeSequence::zeros(nodes, problem.dim);
        for i in 0..nodes {
            let t = grid.time(i);
            let b = (problem.x0)(t);
            if b.len() != problem.dim {
                return Err(Error::DimensionMismatch {
                    expected: problem.dim,
                    got: b.len(),
                });
            }
            if b.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalBreakdown(format!(
                    "forcing term is not finite at t = {t}"
                )));
            }
            let dst = forcing.node_mut(i);
            for (k, v) in b.iter().enumerate() {
                dst[k] = scale_down[i] * v;
            }
        }

        Ok(Self {
            problem: problem.clone(),
            grid,
            case: if critical {
                CaseTag::TailCritical
            } else {
                CaseTag::TailDecaying
            },
            delta,
            forcing,
            scale_up,
            scale_down,
        })
    }

    pub fn problem(&self) -> &HalfLineProblem {
        &self.problem
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn delta_params(&self) -> Option<DeltaParams> {
        self.delta
    }

    /// Forcing in system variables.
    pub fn forcing(&self) -> &NodeSequence {
        &self.forcing
    }

    /// Contraction factor of the operator in system variables: the plain
    /// budget `q` in the decaying case, `theta` in the critical case.
    pub fn system_contraction(&self) -> f64 {
        match self.delta {
            Some(p) => p.theta,
            None => self.problem.contraction(),
        }
    }

    /// `e^{i delta}` (identity in the decaying case).
    pub fn node_scale_up(&self, i: usize) -> f64 {
        self.scale_up[i]
    }

    /// Maps original node values to system variables.
    pub fn transform(&self, x: &NodeSequence) -> Result<NodeSequence> {
        self.check_shape(x)?;
        Ok(self.rescale(x, &self.scale_down))
    }

    /// Maps system variables back to original node values.
    pub fn untransform(&self, y: &NodeSequence) -> Result<NodeSequence> {
        self.check_shape(y)?;
        Ok(self.rescale(y, &self.scale_up))
    }

    fn rescale(&self, s: &NodeSequence, factors: &[f64]) -> NodeSequence {
        let mut out = s.clone();
        for i in 0..out.nodes() {
            for v in out.node_mut(i) {
                *v *= factors[i];
            }
        }
        out
    }

    fn check_shape(&self, s: &NodeSequence) -> Result<()> {
        if s.dim() != self.problem.dim {
            return Err(Error::DimensionMismatch {
                expected: self.problem.dim,
                got: s.dim(),
            });
        }
        if s.nodes() != self.grid.nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.nodes(),
                got: s.nodes(),
            });
        }
        Ok(())
    }

    /// One application of the fixed point operator in system variables.
    pub fn apply(&self, state: &NodeSequence) -> Result<NodeSequence> {
        self.check_shape(state)?;
        let c = self.problem.constants;
        let h = self.grid.h();
        let nodes = self.grid.nodes();
        let dim = self.problem.dim;

        // kernel arguments live in the original variables
        let args = self.rescale(state, &self.scale_up);

        let f = &self.problem.kernels.f;
        let g = &self.problem.kernels.g;
        let mut out = self.forcing.clone();
        let mut acc = vec![0.0; dim];
        for i in 0..nodes {
            let t = self.grid.time(i);
            acc.iter_mut().for_each(|a| *a = 0.0);
            for j in 0..i {
                let w = volterra_weight(&c, h, i, j);
                let fv = f(t, self.grid.time(j), args.node(j));
                accumulate(&mut acc, &fv, w, dim)?;
            }
            for j in i..nodes {
                let v = tail_weight(&c, h, i, j);
                let gv = g(t, self.grid.time(j), args.node(j));
                accumulate(&mut acc, &gv, v, dim)?;
            }
            let dst = out.node_mut(i);
            for (k, a) in acc.iter().enumerate() {
                dst[k] += self.scale_down[i] * a;
            }
            if dst.iter().any(|v| !v.is_finite()) {
                return Err(Error::NumericalBreakdown(format!(
                    "operator output is not finite at node {i} (t = {t})"
                )));
            }
        }
        Ok(out)
    }

    /// Sup norm of `T(state) - state` in system variables.
    pub fn residual(&self, state: &NodeSequence) -> Result<f64> {
        Ok(self.apply(state)?.sup_distance(state))
    }

    /// Bound on the tail mass cut off at node `i` by truncating the sum at
    /// the last grid node: `(Cg/b) e^{(-b (N+1) + g i) h}`. The bound is
    /// exact for the weight mass and lives in the original variables.
    pub fn dropped_tail_bound(&self, i: usize) -> f64 {
        assert!(i < self.grid.nodes());
        let c = self.problem.constants;
        let r = self.problem.regularity;
        let np1 = (self.grid.last_index() + 1) as f64;
        r.cg / c.beta * ((-c.beta * np1 + c.gamma * i as f64) * self.grid.h()).exp()
    }

    /// Largest [`dropped_tail_bound`](Self::dropped_tail_bound) over the grid.
    pub fn dropped_tail_sup(&self) -> f64 {
        let worst = if self.problem.constants.gamma >= 0.0 {
            self.grid.last_index()
        } else {
            0
        };
        self.dropped_tail_bound(worst)
    }
}

fn accumulate(acc: &mut [f64], term: &[f64], weight: f64, expected: usize) -> Result<()> {
    if term.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: term.len(),
        });
    }
    for (a, v) in acc.iter_mut().zip(term) {
        *a += weight * v;
    }
    Ok(())
}
