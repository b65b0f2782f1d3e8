//! Particular solutions `u0` of the equation at `lambda = lambda0`, regular at
//! the origin with `u0 ~ x^(l+1)`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::expr::Expr;
use crate::grid::{Grid, GridFunction};
use crate::powers::{compute_y, log_bound, PowerOptions};
use crate::problem::{ProblemSpec, SampledProblem};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum U0Source {
    Analytic,
    Series,
    Shifted,
    /// Obtained by evaluating a previous series at a new center.
    Chained,
}

/// Result of [`check_nonvanishing`].
#[derive(Debug, Clone, PartialEq)]
pub struct NonvanishingReport {
    pub nonvanishing: bool,
    /// Smallest `|u0(x)| / x^(l+1)` over `x > 0` nodes.
    pub min_scaled: f64,
    /// Node closest to a detected zero.
    pub zero_near: Option<f64>,
    /// For real nonnegative potentials: whether `u0 >= x^(l+1)` held.
    pub lower_bound_holds: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ParticularSolution {
    pub u0: GridFunction,
    pub du0: GridFunction,
    pub lambda0: Complex64,
    pub source: U0Source,
    /// Estimated truncation error of the series at `x = a`, when known.
    pub tail: Option<f64>,
    pub report: NonvanishingReport,
}

/// Default tolerance on the relative tail of a series-built `u0`.
pub const SERIES_TAIL_TOL: f64 = 1e-10;

impl ParticularSolution {
    pub fn grid(&self) -> &Arc<Grid> {
        self.u0.grid()
    }

    pub fn nonvanishing(&self) -> bool {
        self.report.nonvanishing
    }

    /// Wraps precomputed samples, e.g. a series evaluated at a new center.
    pub fn from_samples(l: f64, u0: GridFunction, du0: GridFunction, lambda0: Complex64, source: U0Source) -> Self {
        let report = scan_zeros(l, &u0);
        ParticularSolution {
            u0,
            du0,
            lambda0,
            source,
            tail: None,
            report,
        }
    }
}

/// `(l+1) x^l` at the origin; the placeholder 0 is used when it is infinite.
fn du0_at_origin(l: f64) -> Complex64 {
    if l == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        ZERO
    }
}

fn check_asymptotics(l: f64, u0: &GridFunction) -> Result<()> {
    let x = u0.grid().nodes();
    let upto = 10.min(x.len() - 1);
    for j in 1..=upto {
        let r = u0.values()[j] / x[j].powf(l + 1.0);
        if (r - 1.0).norm() > 0.05 {
            return Err(Error::ParticularSolution(format!(
                "u0(x)/x^(l+1) = {r} at x = {}; expected 1 near the origin",
                x[j]
            )));
        }
    }
    Ok(())
}

/// Samples analytic expressions for `u0` and `u0'`.
pub fn build_u0_analytic(spec: &ProblemSpec, u0: &Expr, du0: &Expr, grid: Arc<Grid>) -> Result<ParticularSolution> {
    build_u0_from_fn(spec, grid, |x| {
        let a = u0.eval(x).map_err(|e| Error::ParticularSolution(format!("u0: {e}")))?;
        let b = du0
            .eval(x)
            .map_err(|e| Error::ParticularSolution(format!("du0: {e}")))?;
        Ok((a, b))
    })
}

/// Samples a closure returning `(u0(x), u0'(x))` for `x > 0`.
pub fn build_u0_from_fn(
    spec: &ProblemSpec,
    grid: Arc<Grid>,
    mut f: impl FnMut(f64) -> Result<(Complex64, Complex64)>,
) -> Result<ParticularSolution> {
    let nodes = grid.nodes();
    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    u.push(ZERO);
    du.push(du0_at_origin(spec.l));
    for &x in &nodes[1..] {
        let (a, b) = f(x)?;
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::ParticularSolution(format!("non-finite value at x = {x}")));
        }
        u.push(a);
        du.push(b);
    }
    let u0 = GridFunction::from_raw(grid.clone(), u);
    let du0 = GridFunction::from_raw(grid, du);
    check_asymptotics(spec.l, &u0)?;
    let mut sol = ParticularSolution::from_samples(spec.l, u0, du0, ZERO, U0Source::Analytic);
    sol.report.lower_bound_holds = corollary_check(spec, &sol);
    Ok(sol)
}

/// `u0 = x^(l+1) sum Y(2k)` with the derivative assembled from the same powers.
pub fn build_u0_series(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    n: usize,
    opts: &PowerOptions,
) -> Result<ParticularSolution> {
    build_from_y(spec, sampled, ZERO, n, opts, SERIES_TAIL_TOL)
}

/// Particular solution at `lambda0` from the shifted `Y` recursion. For real
/// `q`, `r1` and `lambda0` a lower bound of `q` (with `r0 = 1`), it is free
/// of zeros on `(0, a]`.
pub fn build_u0_shifted(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    lambda0: Complex64,
    n: usize,
    opts: &PowerOptions,
) -> Result<ParticularSolution> {
    build_from_y(spec, sampled, lambda0, n, opts, SERIES_TAIL_TOL)
}

pub(crate) fn build_from_y(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    lambda0: Complex64,
    n: usize,
    opts: &PowerOptions,
    tail_tol: f64,
) -> Result<ParticularSolution> {
    let set = compute_y(spec, sampled, lambda0, n, opts)?;
    let grid = sampled.grid.clone();
    let x = grid.nodes();
    let l = spec.l;
    let p = set.pfun.values();
    let len = grid.len();
    let mut u = alloc::vec![ZERO; len];
    let mut du = alloc::vec![ZERO; len];
    du[0] = du0_at_origin(l);
    for j in 1..len {
        let mut even = ZERO;
        let mut odd = ZERO;
        for k in (0..=n).rev() {
            even += set.powers[2 * k].values()[j];
            if k >= 1 {
                odd += set.powers[2 * k - 1].values()[j];
            }
        }
        let tl = sampled.x_lp1[j];
        u[j] = even * tl;
        du[j] = even * ((l + 1.0) * tl / x[j]) + odd / (p[j] * tl);
    }
    // tail of the even bounds at x = a
    let tail = if lambda0 == ZERO || sampled.r1_zero {
        let a = grid.a();
        let mut sum = 0.0;
        for k in n + 1..n + 400 {
            let term = match log_bound(&set, 2 * k) {
                Some((c0, c1)) => (c0 + c1 * a.ln()).exp(),
                None => 0.0,
            };
            sum += term;
            if term <= 1e-18 * sum || term == 0.0 {
                break;
            }
        }
        Some(sum * a.powf(l + 1.0))
    } else {
        None
    };
    let u0 = GridFunction::from_raw(grid.clone(), u);
    let du0 = GridFunction::from_raw(grid, du);
    if let Some(t) = tail {
        let scale = u0.max_abs();
        if !(t <= tail_tol * scale) {
            return Err(Error::SeriesTail { tail: t / scale });
        }
    }
    let source = if lambda0 == ZERO {
        U0Source::Series
    } else {
        U0Source::Shifted
    };
    let mut sol = ParticularSolution::from_samples(l, u0, du0, lambda0, source);
    sol.tail = tail;
    if lambda0 == ZERO {
        sol.report.lower_bound_holds = corollary_check(spec, &sol);
    } else if sampled.r1_zero && spec.r0_is_one() && lambda0.im == 0.0 {
        sol.report.lower_bound_holds = shifted_corollary_check(spec, sampled, &sol);
    }
    Ok(sol)
}

/// Scans `u0 / x^(l+1)` for zeros: tiny modulus or a jump in argument of more
/// than a quarter turn between neighbouring nodes.
fn scan_zeros(l: f64, u0: &GridFunction) -> NonvanishingReport {
    let x = u0.grid().nodes();
    let v = u0.values();
    let scaled: Vec<Complex64> = (1..x.len()).map(|j| v[j] / x[j].powf(l + 1.0)).collect();
    let max = scaled.iter().fold(0.0f64, |m, s| m.max(s.norm()));
    let mut min = f64::INFINITY;
    let mut at = 0;
    for (i, s) in scaled.iter().enumerate() {
        if s.norm() < min {
            min = s.norm();
            at = i;
        }
    }
    let mut zero_near = None;
    if !(min > 1e-12 * max) || !min.is_finite() {
        zero_near = Some(x[at + 1]);
    } else {
        for i in 1..scaled.len() {
            let (a, b) = (scaled[i - 1], scaled[i]);
            // Re(a conj b) <= 0 means the argument turned by at least 90 degrees
            if (a * b.conj()).re <= 0.0 {
                zero_near = Some(if a.norm() < b.norm() { x[i] } else { x[i + 1] });
                break;
            }
        }
    }
    NonvanishingReport {
        nonvanishing: zero_near.is_none(),
        min_scaled: min,
        zero_near,
        lower_bound_holds: None,
    }
}

fn corollary_check(spec: &ProblemSpec, sol: &ParticularSolution) -> Option<bool> {
    let x = sol.grid().nodes();
    for &t in &x[1..] {
        let q = spec.q.eval(t).ok()?;
        if q.im != 0.0 || q.re < 0.0 {
            return None;
        }
    }
    Some(lower_bound_ok(spec.l, sol))
}

fn shifted_corollary_check(spec: &ProblemSpec, sampled: &SampledProblem, sol: &ParticularSolution) -> Option<bool> {
    let w = sampled.q.values();
    for j in 1..w.len() {
        let d = w[j] - sol.lambda0;
        if d.im != 0.0 || d.re < 0.0 {
            return None;
        }
    }
    Some(lower_bound_ok(spec.l, sol))
}

fn lower_bound_ok(l: f64, sol: &ParticularSolution) -> bool {
    let x = sol.grid().nodes();
    sol.u0.values()[1..]
        .iter()
        .zip(&x[1..])
        .all(|(u, &t)| u.im == 0.0 && u.re >= t.powf(l + 1.0) * (1.0 - 1e-13))
}

/// Re-runs the zero scan and, for real nonnegative potentials, the lower-bound
/// check `u0 >= x^(l+1)`.
pub fn check_nonvanishing(spec: &ProblemSpec, sol: &ParticularSolution) -> NonvanishingReport {
    let mut r = scan_zeros(spec.l, &sol.u0);
    r.lower_bound_holds = if sol.lambda0 == ZERO {
        corollary_check(spec, sol)
    } else {
        sol.report.lower_bound_holds
    };
    r
}
