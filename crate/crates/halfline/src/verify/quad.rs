//! Adaptive quadrature used as an independent oracle.
//!
//! The verification layer never reuses the closed-form cell weights it is
//! supposed to check; finite integrals go through adaptive Simpson
//! refinement and half-line integrals through a cutoff chosen from a
//! declared exponential decay rate plus an analytic remainder bound. The
//! reported [`QuadResult::error`] accumulates the accepted panel estimates
//! and, for tails, the cutoff remainder.

use crate::error::{Error, Result};

/// Tolerances and limits of the adaptive scheme.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth before the refinement gives up.
    pub max_depth: u32,
    /// Target size of the neglected tail mass relative to the decay scale.
    pub tail_eps: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_depth: 48,
            tail_eps: 1e-12,
        }
    }
}

/// Value and accumulated error estimate of a quadrature run.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

fn eval(f: &impl Fn(f64) -> f64, s: f64) -> Result<f64> {
    let v = f(s);
    if !v.is_finite() {
        return Err(Error::Quadrature(format!(
            "integrand is not finite at s = {s}"
        )));
    }
    Ok(v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    opts: &QuadOptions,
    out: &mut QuadResult,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * eps || depth >= opts.max_depth {
        if depth >= opts.max_depth && delta.abs() > 15.0 * eps {
            return Err(Error::Quadrature(format!(
                "refinement limit {} reached near s = {m} (panel defect {delta:e})",
                opts.max_depth
            )));
        }
        // one extrapolation order for free on accepted panels
        out.value += left + right + delta / 15.0;
        out.error += delta.abs() / 15.0;
        return Ok(());
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1, opts, out)?;
    refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1, opts, out)
}

/// Integrates `f` over the finite interval `[a, b]`; a reversed interval
/// flips the sign. Fails on non-finite endpoints or integrand values, and
/// when the refinement depth limit is hit before the local tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!(
            "integration endpoints must be finite, got [{a}, {b}]"
        )));
    }
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
    };
    if a == b {
        return Ok(out);
    }
    let fa = eval(&f, a)?;
    let fb = eval(&f, b)?;
    let m = 0.5 * (a + b);
    let fm = eval(&f, m)?;
    let whole = simpson(a, b, fa, fm, fb);
    let eps = opts.abs_tol.max(opts.rel_tol * whole.abs());
    refine(&f, a, b, fa, fm, fb, whole, eps, 0, opts, &mut out)?;
    Ok(out)
}

/// Integrates `f` over `[a, inf)` for an integrand bounded by a multiple
/// of `e^{-decay s}`.
///
/// The cutoff is placed where the declared envelope has shrunk to
/// `tail_eps * decay`, and the neglected mass is charged to the error
/// estimate as `|f(T)| / decay`.
pub fn integrate_tail(
    f: impl Fn(f64) -> f64,
    a: f64,
    decay: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(decay.is_finite() && decay > 0.0) {
        return Err(Error::Quadrature(format!(
            "tail integration needs a positive decay rate, got {decay}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::Quadrature(format!(
            "tail integration start must be finite, got {a}"
        )));
    }
    let reach = (1.0 / (opts.tail_eps * decay)).ln() / decay;
    let cutoff = a + reach.max(0.0);
    let mut out = integrate(&f, a, cutoff, opts)?;
    out.error += eval(&f, cutoff)?.abs() / decay;
    Ok(out)
}
