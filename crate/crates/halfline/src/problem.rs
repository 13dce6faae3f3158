//! Problem description and constructors.
//!
//! A problem instance represents the equation
//!
//! ```text
//! x(t) = x0(t) + int_0^t   e^{a1 s - a2 t} f(t, s, x(s)) ds
//!               + int_t^inf e^{-b s + g t}  g(t, s, x(s)) ds,      t >= 0,
//! ```
//!
//! for an unknown x with values in R^dim, under the sign constraints
//! `a1 != 0`, `a2 >= 0`, `a1 <= a2`, `b > 0`, `b >= g`. The exponential
//! factors encode the admissible growth of the kernels; `f` and `g`
//! themselves are expected to be bounded and Lipschitz in their state
//! argument on the invariant ball described by [`safe_radius`].
//!
//! Norms are always the max norm on R^dim, both for vectors and for
//! Lipschitz constants.
//!
//! Besides direct construction, two reductions are provided:
//! [`time_reverse`] maps an equation posed on the negative half line onto
//! this template, and [`from_memory_ide`] rewrites an initial value problem
//! with unbounded memory as a coupled system of twice the dimension.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Vector-valued kernel evaluator: arguments are `(t, s, x)`.
pub type KernelFn = Arc<dyn Fn(f64, f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Vector-valued function of time, used for forcing terms and exact solutions.
pub type ForcingFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// Growth exponents of the two integral terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// User-declared bounds on the kernels over the invariant ball.
///
/// `lf`, `lg` are Lipschitz constants in the state argument, `cf`, `cg`
/// are sup bounds. The optional fields bound the partial derivatives in
/// `t` (`df`, `dg`) and `s` (`ef`, `eg`); they are metadata only and are
/// echoed in reports when present.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegularityData {
    pub lf: f64,
    pub lg: f64,
    pub cf: f64,
    pub cg: f64,
    pub df: Option<f64>,
    pub dg: Option<f64>,
    pub ef: Option<f64>,
    pub eg: Option<f64>,
}

/// The two kernels of a problem instance.
#[derive(Clone)]
pub struct KernelPair {
    pub f: KernelFn,
    pub g: KernelFn,
}

impl KernelPair {
    pub fn new(
        f: impl Fn(f64, f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        g: impl Fn(f64, f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            g: Arc::new(g),
        }
    }

    /// Wraps scalar kernels as one-dimensional vector kernels.
    pub fn scalar(
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(
            move |t, s, x| vec![f(t, s, x[0])],
            move |t, s, x| vec![g(t, s, x[0])],
        )
    }

    /// Linear kernels `f(t,s,x) = A x` and `g(t,s,x) = B x` for square
    /// matrices of matching size, given in row-major rows.
    pub fn linear(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 || b.len() != n {
            return Err(Error::RejectedInput(format!(
                "linear kernels need square matrices of equal size, got {}x? and {}x?",
                a.len(),
                b.len()
            )));
        }
        for row in a.iter().chain(b.iter()) {
            if row.len() != n {
                return Err(Error::RejectedInput(format!(
                    "linear kernel rows must have length {n}, got {}",
                    row.len()
                )));
            }
        }
        let apply = |m: &[Vec<f64>], x: &[f64]| -> Vec<f64> {
            m.iter()
                .map(|row| row.iter().zip(x).map(|(c, v)| c * v).sum())
                .collect()
        };
        Ok(Self::new(
            move |_t, _s, x| apply(&a, x),
            move |_t, _s, x| apply(&b, x),
        ))
    }

    /// Kernels that are identically zero in every component.
    pub fn zero() -> Self {
        Self::new(|_, _, x| vec![0.0; x.len()], |_, _, x| vec![0.0; x.len()])
    }
}

/// A full problem instance.
///
/// Cloning is cheap; the evaluators are shared.
#[derive(Clone)]
pub struct HalfLineProblem {
    pub dim: usize,
    pub constants: Constants,
    pub regularity: RegularityData,
    pub kernels: KernelPair,
    pub x0: ForcingFn,
    /// Declared bound on `sup_t |x0(t)|` in the max norm.
    pub x0_sup: f64,
}

impl std::fmt::Debug for HalfLineProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HalfLineProblem")
            .field("dim", &self.dim)
            .field("constants", &self.constants)
            .field("regularity", &self.regularity)
            .field("x0_sup", &self.x0_sup)
            .finish_non_exhaustive()
    }
}

impl HalfLineProblem {
    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Lipschitz budget `lf/|a1| + lg/b` of the fixed point operator.
    pub fn contraction(&self) -> f64 {
        contraction_q(&self.regularity, &self.constants)
    }

    /// Radius of the ball that the fixed point operator maps into itself.
    pub fn safe_radius(&self) -> f64 {
        safe_radius(self.x0_sup, &self.regularity, &self.constants)
    }
}

/// One validation check with a human-readable outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate`]: one entry per structural invariant.
///
/// Validation never aborts; callers that need a hard failure inspect
/// [`ValidationReport::passed`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Lipschitz budget of the operator, also reported in summaries.
    pub q: f64,
    pub safe_radius: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Names and details of the failed checks.
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect()
    }
}

/// Checks every structural invariant of the problem metadata and reports
/// the result of each, together with the contraction budget `q`.
pub fn validate(p: &HalfLineProblem) -> ValidationReport {
    let c = &p.constants;
    let r = &p.regularity;
    let q = contraction_q(r, c);
    let mut checks = Vec::new();
    let mut push = |name: &'static str, passed: bool, detail: String| {
        checks.push(Check {
            name,
            passed,
            detail,
        })
    };

    push(
        "dim_positive",
        p.dim >= 1,
        format!("dim = {} (must be >= 1)", p.dim),
    );
    push(
        "alpha1_nonzero",
        c.alpha1 != 0.0 && c.alpha1.is_finite(),
        format!("alpha1 = {} (must be finite and nonzero)", c.alpha1),
    );
    push(
        "alpha2_nonnegative",
        c.alpha2 >= 0.0 && c.alpha2.is_finite(),
        format!("alpha2 = {} (must be finite and >= 0)", c.alpha2),
    );
    push(
        "alpha1_le_alpha2",
        c.alpha1 <= c.alpha2,
        format!("alpha1 = {} must not exceed alpha2 = {}", c.alpha1, c.alpha2),
    );
    push(
        "beta_positive",
        c.beta > 0.0 && c.beta.is_finite(),
        format!("beta = {} (must be finite and > 0)", c.beta),
    );
    push(
        "beta_ge_gamma",
        c.beta >= c.gamma && c.gamma.is_finite(),
        format!("beta = {} must be at least gamma = {}", c.beta, c.gamma),
    );
    let lip_ok = r.lf >= 0.0 && r.lg >= 0.0 && r.lf.is_finite() && r.lg.is_finite();
    push(
        "lipschitz_nonnegative",
        lip_ok,
        format!("Lf = {}, Lg = {} (must be finite and >= 0)", r.lf, r.lg),
    );
    let bounds_ok = r.cf >= 0.0 && r.cg >= 0.0 && r.cf.is_finite() && r.cg.is_finite();
    push(
        "kernel_bounds_nonnegative",
        bounds_ok,
        format!("Cf = {}, Cg = {} (must be finite and >= 0)", r.cf, r.cg),
    );
    let deriv_ok = [r.df, r.dg, r.ef, r.eg]
        .iter()
        .flatten()
        .all(|v| *v >= 0.0 && v.is_finite());
    push(
        "derivative_bounds_nonnegative",
        deriv_ok,
        "optional derivative bounds must be finite and >= 0 when present".to_string(),
    );
    push(
        "x0_sup_nonnegative",
        p.x0_sup >= 0.0 && p.x0_sup.is_finite(),
        format!("x0_sup = {} (must be finite and >= 0)", p.x0_sup),
    );
    push(
        "contraction_condition",
        q < 1.0,
        format!("Lf/|alpha1| + Lg/beta = {q} (must be < 1)"),
    );

    ValidationReport {
        checks,
        q,
        safe_radius: safe_radius(p.x0_sup, r, c),
    }
}

/// Lipschitz budget `lf/|a1| + lg/b` of the fixed point operator.
///
/// Returns a non-finite value when the constants are degenerate; validation
/// reports that case instead of aborting.
pub fn contraction_q(r: &RegularityData, c: &Constants) -> f64 {
    r.lf / c.alpha1.abs() + r.lg / c.beta
}

/// Radius `x0_sup + cf/|a1| + cg/b` of the invariant ball.
pub fn safe_radius(x0_sup: f64, r: &RegularityData, c: &Constants) -> f64 {
    x0_sup + r.cf / c.alpha1.abs() + r.cg / c.beta
}

/// Rewrites an equation posed for t <= 0,
///
/// ```text
/// z(t) = z0(t) + int_0^t F(t, s, z(s)) ds + int_{-inf}^t G(t, s, z(s)) ds,
/// ```
///
/// as a half-line instance in the reversed time `tau = -t`. Substituting
/// `Z(tau) = z(-tau)` flips the sign of the Volterra term and turns the
/// unbounded history integral into a tail integral:
///
/// ```text
/// Z(tau) = z0(-tau) - int_0^tau F(-tau, -sigma, Z(sigma)) dsigma
///                   + int_tau^inf G(-tau, -sigma, Z(sigma)) dsigma.
/// ```
///
/// The supplied growth constants are factored out of the reversed kernels,
/// so the wrapped `f` is `-F(-t, -s, x) e^{-a1 s + a2 t}` and the wrapped
/// `g` is `G(-t, -s, x) e^{b s - g t}`. The regularity data must describe
/// these wrapped kernels; the constructor rejects metadata that fails
/// validation.
pub fn time_reverse(
    z0: ForcingFn,
    big_f: KernelFn,
    big_g: KernelFn,
    dim: usize,
    constants: Constants,
    regularity: RegularityData,
    x0_sup: f64,
) -> Result<HalfLineProblem> {
    let c = constants;
    let f: KernelFn = Arc::new(move |t: f64, s: f64, x: &[f64]| {
        let scale = (-c.alpha1 * s + c.alpha2 * t).exp();
        big_f(-t, -s, x).into_iter().map(|v| -v * scale).collect()
    });
    let g: KernelFn = Arc::new(move |t: f64, s: f64, x: &[f64]| {
        let scale = (c.beta * s - c.gamma * t).exp();
        big_g(-t, -s, x).into_iter().map(|v| v * scale).collect()
    });
    let x0: ForcingFn = Arc::new(move |t: f64| z0(-t));
    let problem = HalfLineProblem {
        dim,
        constants,
        regularity,
        kernels: KernelPair { f, g },
        x0,
        x0_sup,
    };
    let report = problem.validate();
    if !report.passed() {
        return Err(Error::InvalidProblem {
            failures: report.failures(),
        });
    }
    Ok(problem)
}

/// Builds a half-line instance from an initial value problem with
/// unbounded memory, posed for t <= 0:
///
/// ```text
/// du/dt = f1(t, u(t), v(t)),   u(0) = u0,
/// v(t)  = int_{-inf}^t g1(t, s, u(s)) ds.
/// ```
///
/// Integrating the first line and stacking `z = [u, v]` gives a coupled
/// system of dimension `2 n` that [`time_reverse`] then maps onto the
/// half-line template. The metadata must describe the wrapped block
/// kernels, exactly as for [`time_reverse`].
pub fn from_memory_ide(
    f1: impl Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    g1: impl Fn(f64, f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    u0: Vec<f64>,
    constants: Constants,
    regularity: RegularityData,
) -> Result<HalfLineProblem> {
    let n = u0.len();
    if n == 0 {
        return Err(Error::RejectedInput("u0 must be nonempty".to_string()));
    }
    let x0_sup = u0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let z0: ForcingFn = Arc::new(move |_t: f64| {
        let mut z = vec![0.0; 2 * n];
        z[..n].copy_from_slice(&u0);
        z
    });
    // u block: the integrated right hand side, which depends on the inner
    // time only. v block of F is zero.
    let big_f: KernelFn = Arc::new(move |_t: f64, s: f64, z: &[f64]| {
        let mut out = vec![0.0; 2 * n];
        let fu = f1(s, &z[..n], &z[n..]);
        assert_eq!(fu.len(), n, "f1 must return vectors of length {n}");
        out[..n].copy_from_slice(&fu);
        out
    });
    // v block: the memory kernel applied to the u components.
    let big_g: KernelFn = Arc::new(move |t: f64, s: f64, z: &[f64]| {
        let mut out = vec![0.0; 2 * n];
        let gv = g1(t, s, &z[..n]);
        assert_eq!(gv.len(), n, "g1 must return vectors of length {n}");
        out[n..].copy_from_slice(&gv);
        out
    });
    time_reverse(z0, big_f, big_g, 2 * n, constants, regularity, x0_sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn metadata_only_problem(c: Constants, r: RegularityData, x0_sup: f64) -> HalfLineProblem {
        HalfLineProblem {
            dim: 1,
            constants: c,
            regularity: r,
            kernels: KernelPair::zero(),
            x0: Arc::new(move |_| vec![0.0]),
            x0_sup,
        }
    }

    #[test]
    fn validate_passes_on_sound_metadata() {
        let p = metadata_only_problem(
            Constants {
                alpha1: 1.0,
                alpha2: 1.0,
                beta: 1.0,
                gamma: 0.0,
            },
            RegularityData {
                lf: 0.25,
                lg: 0.25,
                cf: 0.25,
                cg: 0.25,
                ..Default::default()
            },
            0.75,
        );
        let report = p.validate();
        assert!(report.passed(), "failures: {:?}", report.failures());
        assert_relative_eq!(report.q, 0.5);
        assert_relative_eq!(report.safe_radius, 1.25);
    }

    #[test]
    fn validate_flags_zero_alpha1() {
        let p = metadata_only_problem(
            Constants {
                alpha1: 0.0,
                alpha2: 1.0,
                beta: 1.0,
                gamma: 0.0,
            },
            RegularityData::default(),
            0.0,
        );
        let report = p.validate();
        assert!(!report.passed());
        assert!(report.failures().iter().any(|m| m.contains("alpha1_nonzero")));
    }

    #[test]
    fn validate_flags_contraction_violation() {
        // 0.3/1 + 0.4/0.5 = 1.1
        let p = metadata_only_problem(
            Constants {
                alpha1: 1.0,
                alpha2: 2.0,
                beta: 0.5,
                gamma: 0.0,
            },
            RegularityData {
                lf: 0.3,
                lg: 0.4,
                cf: 0.1,
                cg: 0.1,
                ..Default::default()
            },
            0.0,
        );
        let report = p.validate();
        assert!(!report.passed());
        assert!(report
            .failures()
            .iter()
            .any(|m| m.contains("contraction_condition")));
        assert_relative_eq!(report.q, 1.1, max_relative = 1e-12);
    }

    #[test]
    fn contraction_q_cases() {
        let r = |lf, lg| RegularityData {
            lf,
            lg,
            ..Default::default()
        };
        let c = |alpha1, beta| Constants {
            alpha1,
            alpha2: alpha1.max(0.0) + 1.0,
            beta,
            gamma: 0.0,
        };
        assert_relative_eq!(contraction_q(&r(0.25, 0.25), &c(1.0, 1.0)), 0.5);
        assert_relative_eq!(
            contraction_q(&r(0.3, 0.25), &c(-2.0, 0.5)),
            0.65,
            max_relative = 1e-15
        );
        assert_relative_eq!(contraction_q(&r(0.0, 0.0), &c(1.0, 1.0)), 0.0);
    }

    #[test]
    fn safe_radius_cases() {
        let c = Constants {
            alpha1: 0.5,
            alpha2: 1.0,
            beta: 2.0,
            gamma: 0.0,
        };
        let r = RegularityData {
            lf: 0.1,
            lg: 0.1,
            cf: 1.0,
            cg: 2.0,
            ..Default::default()
        };
        // 1 + 1/0.5 + 2/2
        assert_relative_eq!(safe_radius(1.0, &r, &c), 4.0);
        assert_relative_eq!(
            safe_radius(
                0.0,
                &RegularityData::default(),
                &Constants {
                    alpha1: 1.0,
                    alpha2: 1.0,
                    beta: 1.0,
                    gamma: 0.0
                }
            ),
            0.0
        );
    }

    fn reversal_fixture() -> (Constants, RegularityData) {
        let c = Constants {
            alpha1: -1.0,
            alpha2: 0.0,
            beta: 1.0,
            gamma: 0.5,
        };
        let r = RegularityData {
            lf: 0.3,
            lg: 0.2,
            cf: 0.2,
            cg: 0.2,
            ..Default::default()
        };
        (c, r)
    }

    #[test]
    fn time_reverse_wraps_kernels_with_growth_factors() {
        let (c, r) = reversal_fixture();
        let big_f: KernelFn = Arc::new(|t, s, x: &[f64]| vec![(0.3 * t).exp() + 0.1 * s + x[0]]);
        let big_g: KernelFn = Arc::new(|t, s, x: &[f64]| vec![0.2 * t - s + 0.5 * x[0]]);
        let p = time_reverse(
            Arc::new(|_| vec![0.1]),
            big_f.clone(),
            big_g.clone(),
            1,
            c,
            r,
            0.1,
        )
        .unwrap();

        let (tau, sigma) = (1.0, 0.5);
        let x = [0.0];
        let want_f = -big_f(-tau, -sigma, &x)[0] * (-c.alpha1 * sigma + c.alpha2 * tau).exp();
        let got_f = (p.kernels.f)(tau, sigma, &x)[0];
        assert_relative_eq!(got_f, want_f, max_relative = 1e-14);

        let want_g = big_g(-tau, -sigma, &x)[0] * (c.beta * sigma - c.gamma * tau).exp();
        let got_g = (p.kernels.g)(tau, sigma, &x)[0];
        assert_relative_eq!(got_g, want_g, max_relative = 1e-14);
    }

    #[test]
    fn time_reverse_twice_restores_kernel_values() {
        let (c, r) = reversal_fixture();
        let big_f: KernelFn = Arc::new(|t, s, x: &[f64]| vec![0.1 * (t - 2.0 * s).sin() + 0.2 * x[0]]);
        let big_g: KernelFn = Arc::new(|t, s, x: &[f64]| vec![0.05 * t + 0.1 * (s + x[0]).cos()]);
        let z0: ForcingFn = Arc::new(|t| vec![0.3 * (0.2 * t).cos()]);
        let once = time_reverse(z0.clone(), big_f.clone(), big_g.clone(), 1, c, r, 0.3).unwrap();
        let twice = time_reverse(
            once.x0.clone(),
            once.kernels.f.clone(),
            once.kernels.g.clone(),
            1,
            c,
            r,
            0.3,
        )
        .unwrap();

        for &(t, s, v) in &[(0.5, 0.25, 0.1), (2.0, 1.5, -0.2), (4.0, 4.0, 0.0)] {
            let x = [v];
            assert_relative_eq!(
                (twice.kernels.f)(t, s, &x)[0],
                big_f(t, s, &x)[0],
                max_relative = 1e-13,
                epsilon = 1e-15
            );
            assert_relative_eq!(
                (twice.kernels.g)(t, s, &x)[0],
                big_g(t, s, &x)[0],
                max_relative = 1e-13,
                epsilon = 1e-15
            );
            assert_relative_eq!((twice.x0)(t)[0], z0(t)[0], max_relative = 1e-14);
        }
    }

    #[test]
    fn time_reverse_rejects_invalid_metadata() {
        let (c, _) = reversal_fixture();
        let bad = RegularityData {
            lf: 2.0,
            lg: 2.0,
            cf: 0.1,
            cg: 0.1,
            ..Default::default()
        };
        let err = time_reverse(
            Arc::new(|_| vec![0.0]),
            KernelPair::zero().f,
            KernelPair::zero().g,
            1,
            c,
            bad,
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidProblem { .. }));
    }

    #[test]
    fn memory_ide_doubles_dimension() {
        let (c, r) = reversal_fixture();
        let p = from_memory_ide(
            |_s, u, _v| vec![0.1 * u[0], 0.1 * u[1]],
            |_t, s, u| vec![0.1 * s.exp() * u[0], 0.1 * s.exp() * u[1]],
            vec![0.2, -0.1],
            c,
            r,
        )
        .unwrap();
        assert_eq!(p.dim, 4);
        assert_relative_eq!(p.x0_sup, 0.2);
        // forcing carries u0 in the u block and zeros in the v block
        let z = (p.x0)(1.5);
        assert_eq!(z, vec![0.2, -0.1, 0.0, 0.0]);
    }

    #[test]
    fn memory_ide_block_kernels_match_hand_assembly() {
        let (c, r) = reversal_fixture();
        let p = from_memory_ide(
            |s, u, v| vec![0.15 * s.exp() * (u[0] + v[0]).sin()],
            |t, s, u| vec![0.2 * (s - 0.5 * t).exp() * u[0].cos()],
            vec![0.4],
            c,
            r,
        )
        .unwrap();
        let (tau, sigma) = (0.7_f64, 0.3_f64);
        let z = [0.2_f64, -0.1];
        // u block of f: -f1(-sigma, z_u, z_v) e^{-a1 sigma + a2 tau}
        let want_u = -(0.15 * (-sigma).exp() * (z[0] + z[1]).sin())
            * (-c.alpha1 * sigma + c.alpha2 * tau).exp();
        let got = (p.kernels.f)(tau, sigma, &z);
        assert_relative_eq!(got[0], want_u, max_relative = 1e-14);
        assert_eq!(got[1], 0.0);
        // v block of g: g1(-tau, -sigma, z_u) e^{b sigma - g tau}
        let want_v = 0.2 * (-sigma - 0.5 * (-tau)).exp() * z[0].cos()
            * (c.beta * sigma - c.gamma * tau).exp();
        let got = (p.kernels.g)(tau, sigma, &z);
        assert_eq!(got[0], 0.0);
        assert_relative_eq!(got[1], want_v, max_relative = 1e-14);
    }
}
