//! Closed-form quadrature weights on a uniform grid, their sum identities,
//! and the node reweighting used when the tail weight has no decay margin.
//!
//! On the grid `t_i = i h` the two integral terms are discretized with a
//! left endpoint rule whose cell integrals of the exponential factors are
//! known in closed form:
//!
//! ```text
//! w_ij = int_{jh}^{(j+1)h} e^{a1 s - a2 i h} ds
//!      = (1/a1) e^{(a1 j - a2 i) h} (e^{a1 h} - 1),        0 <= j <= i-1,
//! v_ij = int_{jh}^{(j+1)h} e^{-b s + g i h} ds
//!      = (1/b) e^{(-b j + g i) h} (1 - e^{-b h}),          j >= i.
//! ```
//!
//! Both families are nonnegative and O(h) uniformly in the indices, and
//! their row sums have closed forms that bound the discrete operator:
//! `sum_j w_ij <= 1/|a1|` and `sum_j v_ij <= 1/b`, with equality of the
//! tail sum to `1/b` at every node exactly when `b = g`.
//!
//! The difference factors are evaluated through `exp_m1`, which keeps the
//! weights accurate in relative terms down to very small step sizes.
//!
//! When `b = g` the truncated tail loses no mass from node to node and the
//! plain truncation argument degrades; the system is then solved in the
//! reweighted variables `y_i = e^{-i delta} x_i`. Here `delta` is a
//! per-node exponent: it shifts the per-step products `a1 h` and `b h`
//! rather than the rates themselves. [`theta`] gives the contraction
//! factor of the reweighted operator and [`select_delta`] picks a feasible
//! exponent by halving.

use crate::error::{Error, Result};
use crate::problem::{contraction_q, Constants, RegularityData};

/// Uniform grid `t_i = i h` for `i = 0..=n`.
///
/// The construction enforces `h > 0` and `n >= 1`; node `0` is an ordinary
/// unknown with an empty Volterra sum and a full tail sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    h: f64,
    n: usize,
}

impl Grid {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::RejectedInput(format!(
                "grid step h = {h} violates the grid invariant h > 0"
            )));
        }
        if n == 0 {
            return Err(Error::RejectedInput(
                "grid needs at least one step (N >= 1)".to_string(),
            ));
        }
        Ok(Self { h, n })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Index of the last node, so the grid holds `last_index() + 1` nodes.
    pub fn last_index(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

/// Reweighting exponent for the critical tail case, with the contraction
/// factor it achieves.
///
/// `delta` acts per node: transformed values are `y_i = e^{-i delta} x_i`.
/// A feasible exponent satisfies `delta > 0`, keeps `a1 h + delta` on the
/// same side of zero as `a1`, and stays below both `b h` and `g h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaParams {
    pub delta: f64,
    pub theta: f64,
}

/// `(1/a1)(e^{a1 h} - 1)`, the step factor of the Volterra weights.
fn volterra_step_factor(alpha1: f64, h: f64) -> f64 {
    (alpha1 * h).exp_m1() / alpha1
}

/// `(1/b)(1 - e^{-b h})`, the step factor of the tail weights.
fn tail_step_factor(beta: f64, h: f64) -> f64 {
    -(-beta * h).exp_m1() / beta
}

/// Weight of cell `[jh, (j+1)h]` in the Volterra sum of node `i`.
///
/// Requires `j < i`; node 0 has no Volterra cells.
pub fn volterra_weight(c: &Constants, h: f64, i: usize, j: usize) -> f64 {
    assert!(j < i, "volterra weight needs j < i, got i = {i}, j = {j}");
    let exponent = (c.alpha1 * j as f64 - c.alpha2 * i as f64) * h;
    exponent.exp() * volterra_step_factor(c.alpha1, h)
}

/// Weight of cell `[jh, (j+1)h]` in the tail sum of node `i`.
///
/// Requires `j >= i`.
pub fn tail_weight(c: &Constants, h: f64, i: usize, j: usize) -> f64 {
    assert!(j >= i, "tail weight needs j >= i, got i = {i}, j = {j}");
    let exponent = (-c.beta * j as f64 + c.gamma * i as f64) * h;
    exponent.exp() * tail_step_factor(c.beta, h)
}

/// Closed form of `sum_{j=0}^{i-1} w_ij`, which telescopes to
/// `(1/a1)(e^{(a1 - a2) i h} - e^{-a2 i h})`. The empty sum at `i = 0`
/// is zero, and the value never exceeds `1/|a1|`.
pub fn volterra_prefix_sum(c: &Constants, h: f64, i: usize) -> f64 {
    if i == 0 {
        return 0.0;
    }
    let a1ih = c.alpha1 * i as f64 * h;
    let a2ih = c.alpha2 * i as f64 * h;
    if a1ih.abs() <= 30.0 {
        // difference form with full relative accuracy for small products
        (-a2ih).exp() * a1ih.exp_m1() / c.alpha1
    } else {
        // the two exponentials are orders of magnitude apart; no cancellation
        (((a1ih - a2ih).exp()) - (-a2ih).exp()) / c.alpha1
    }
}

/// Closed form of `sum_{j=i}^inf v_ij = (1/b) e^{-(b - g) i h}`.
///
/// Equals `1/b` for every `i` exactly when `b = g`.
pub fn tail_weight_sum(c: &Constants, h: f64, i: usize) -> f64 {
    (-(c.beta - c.gamma) * i as f64 * h).exp() / c.beta
}

/// Checks feasibility of a reweighting exponent: `delta > 0`,
/// `a1 h + delta` on the same side of zero as `a1`, `b h - delta > 0`
/// and `g h - delta > 0`.
pub fn check_delta(delta: f64, h: f64, c: &Constants) -> Result<()> {
    let fail = |msg: String| Err(Error::RejectedInput(msg));
    if !(delta.is_finite() && delta > 0.0) {
        return fail(format!("reweighting exponent delta = {delta} must be > 0"));
    }
    let shifted = c.alpha1 * h + delta;
    if shifted.signum() != c.alpha1.signum() || shifted == 0.0 {
        return fail(format!(
            "delta = {delta} flips the sign of alpha1 h + delta (alpha1 = {}, h = {h})",
            c.alpha1
        ));
    }
    if c.beta * h - delta <= 0.0 {
        return fail(format!(
            "delta = {delta} must stay below beta h = {}",
            c.beta * h
        ));
    }
    if c.gamma * h - delta <= 0.0 {
        return fail(format!(
            "delta = {delta} must stay below gamma h = {}",
            c.gamma * h
        ));
    }
    Ok(())
}

/// Contraction factor of the reweighted operator,
///
/// ```text
/// theta = (Lf/|a1|) (e^{a1 h} - 1)/(e^{a1 h + delta} - 1)
///       + (Lg/b)    (1 - e^{-b h})/(1 - e^{-(b h - delta)}).
/// ```
///
/// As `delta -> 0` both ratios tend to 1 and `theta` recovers the plain
/// budget `q`. Rejects exponents that fail [`check_delta`].
pub fn theta(delta: f64, h: f64, c: &Constants, r: &RegularityData) -> Result<f64> {
    check_delta(delta, h, c)?;
    let a1h = c.alpha1 * h;
    let bh = c.beta * h;
    let volterra_ratio = a1h.exp_m1() / (a1h + delta).exp_m1();
    let tail_ratio = (-bh).exp_m1() / (delta - bh).exp_m1();
    Ok(r.lf / c.alpha1.abs() * volterra_ratio + r.lg / c.beta * tail_ratio)
}

// Ceiling on halvings before select_delta gives up. Feasibility is reached
// after finitely many halvings whenever q < 1, so hitting the cap means the
// caps themselves are degenerate (for example denormal products b h).
const MAX_HALVINGS: u32 = 60;

/// Picks a feasible reweighting exponent.
///
/// Starts from `delta0` when given, otherwise from half the smallest of
/// the applicable caps (`b h`, `g h`, and `|a1| h` when `a1 < 0`), and
/// halves until the sign conditions hold and `theta < 1`. Requires the
/// plain budget `q < 1`; otherwise no exponent can help and the
/// configuration is reported as unsolvable.
///
/// The returned parameters always satisfy [`check_delta`] and carry
/// `theta < 1`; this is re-verified on the way out rather than trusted
/// from the loop.
pub fn select_delta(
    h: f64,
    c: &Constants,
    r: &RegularityData,
    delta0: Option<f64>,
) -> Result<DeltaParams> {
    let q = contraction_q(r, c);
    if !(q < 1.0) {
        return Err(Error::Unsolvable(format!(
            "Lf/|alpha1| + Lg/beta = {q} leaves no contraction margin (need < 1)"
        )));
    }
    if c.gamma <= 0.0 {
        return Err(Error::Unsolvable(format!(
            "tail reweighting needs gamma > 0, got gamma = {}",
            c.gamma
        )));
    }
    if let Some(d0) = delta0 {
        if !(d0.is_finite() && d0 > 0.0) {
            return Err(Error::RejectedInput(format!(
                "initial guess delta0 = {d0} must be > 0"
            )));
        }
    }
    let mut cap = (c.beta * h).min(c.gamma * h);
    if c.alpha1 < 0.0 {
        cap = cap.min(-c.alpha1 * h);
    }
    let mut delta = delta0.unwrap_or(0.5 * cap);
    for _ in 0..=MAX_HALVINGS {
        if check_delta(delta, h, c).is_ok() {
            let th = theta(delta, h, c, r)?;
            if th < 1.0 {
                let params = DeltaParams { delta, theta: th };
                check_delta(params.delta, h, c)?;
                debug_assert!(params.theta < 1.0);
                return Ok(params);
            }
        }
        delta *= 0.5;
    }
    Err(Error::Unsolvable(format!(
        "no feasible reweighting exponent found after {MAX_HALVINGS} halvings (last tried {delta})"
    )))
}
