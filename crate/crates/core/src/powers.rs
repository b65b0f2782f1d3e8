//! Recursive-integral formal powers.
//!
//! All three families share one recursion shape:
//!
//! ```text
//! P0 = 1,  P(-1) = 0
//! P(n) = int_0^x ( w_odd P(n-1) - r1 P(n-2) )     n odd
//! P(n) = s int_0^x w_even P(n-1)                  n even
//! ```
//!
//! * `X` (and `Z`): `w_odd = p u0 R[u0]`, `w_even = 1/(p u0^2)`, `s = -1`,
//!   with `p = exp(lambda0 int_0^x r1)` (identically 1 for `X`).
//! * `Y`: `w_odd = p t^(2l+2) W`, `w_even = 1/(p t^(2l+2))`, `s = +1`, no `r1`
//!   term, where `W = q - lambda0 r0 - (l+1) lambda0 r1 / t`. With
//!   `lambda0 = 0` this is the plain `Y` family and `u0 = x^(l+1) sum Y(2k)`.
//!
//! Every integrand behaves like `t^kappa` times a smooth function at the origin
//! with `kappa` known from the growth of the previous powers, so integration uses
//! product weights on the first panel and never samples node 0.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::grid::{cumulative_into, FirstPanel, Grid, GridFunction, WeightCache};
use crate::problem::{ProblemSpec, SampledProblem};
use crate::usol::ParticularSolution;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOptions {
    /// Number of nodes after the origin overwritten by the leading-power law
    /// in every odd power. Zero disables the substitution.
    pub j_regularization: usize,
    /// Turn bound violations into errors.
    pub strict: bool,
    /// Relative slack allowed in the bound checks.
    pub bound_slack: f64,
    /// Run the a-priori bound checks at all.
    pub check_bounds: bool,
    /// Check every `bound_stride`-th node only.
    pub bound_stride: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            j_regularization: 0,
            strict: false,
            bound_slack: 1e-10,
            check_bounds: true,
            bound_stride: 1,
        }
    }
}

/// Constants of the a-priori estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Sharper constant available when `r1 = 0`.
    pub c_r1_zero: Option<f64>,
}

/// A recorded violation of an a-priori bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundViolation {
    pub order: usize,
    pub x: f64,
    pub value: f64,
    pub bound: f64,
}

impl From<BoundViolation> for Error {
    fn from(v: BoundViolation) -> Self {
        Error::BoundViolation {
            order: v.order,
            x: v.x,
            value: v.value,
            bound: v.bound,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FormalPowerSet {
    pub kind: PowerKind,
    /// Truncation order `N`; `powers` holds indices `0..=2N`.
    pub order: usize,
    pub powers: Vec<GridFunction>,
    pub lambda0: Complex64,
    pub constants: Constants,
    /// `p(x) = exp(lambda0 int_0^x r1)`.
    pub pfun: GridFunction,
    pub l: f64,
    /// Growth exponent used for `Y`-type sets.
    pub alpha: f64,
    pub r0_one: bool,
    pub r1_zero: bool,
    /// First violation per order when not running strict.
    pub warnings: Vec<BoundViolation>,
}

impl FormalPowerSet {
    pub fn grid(&self) -> &Arc<Grid> {
        self.powers[0].grid()
    }

    pub fn get(&self, n: usize) -> &GridFunction {
        &self.powers[n]
    }

    /// Values of every power at `x = a`.
    pub fn at_end(&self) -> Vec<Complex64> {
        self.powers.iter().map(|p| p.last()).collect()
    }
}

fn log_poch(x: f64, n: usize) -> f64 {
    (0..n).map(|i| (x + i as f64).ln()).sum()
}

struct Recursion<'a> {
    grid: &'a Arc<Grid>,
    w_odd: &'a [Complex64],
    w_even: &'a [Complex64],
    even_sign: f64,
    r1: Option<&'a [Complex64]>,
}

impl Recursion<'_> {
    /// `kappa(n)`: leading exponent of the integrand producing power `n`;
    /// `lead(n)`: leading exponent of power `n` itself.
    fn run(
        &self,
        cache: &mut WeightCache,
        n_max: usize,
        j_reg: usize,
        kappa: impl Fn(usize) -> f64,
        lead: impl Fn(usize) -> f64,
    ) -> Result<Vec<Vec<Complex64>>> {
        let len = self.grid.len();
        let h = self.grid.h();
        let x = self.grid.nodes();
        let mut powers: Vec<Vec<Complex64>> = Vec::with_capacity(n_max + 1);
        powers.push(vec![ONE; len]);
        let mut f = vec![ZERO; len];
        for n in 1..=n_max {
            let prev = &powers[n - 1];
            if n % 2 == 1 {
                match (self.r1, n >= 2) {
                    (Some(r1), true) => {
                        let prev2 = &powers[n - 2];
                        for j in 1..len {
                            f[j] = self.w_odd[j] * prev[j] - r1[j] * prev2[j];
                        }
                    }
                    _ => {
                        for j in 1..len {
                            f[j] = self.w_odd[j] * prev[j];
                        }
                    }
                }
            } else {
                for j in 1..len {
                    f[j] = self.w_even[j] * prev[j] * self.even_sign;
                }
            }
            let k = kappa(n);
            if !(k > -1.0) {
                return Err(Error::Grid(format!(
                    "integrand of order {n} is not integrable at 0 (exponent {k})"
                )));
            }
            let panel = cache.get(k, (len - 1) / 5);
            let mut out = Vec::new();
            cumulative_into(&f, h, Some(&panel), &mut out);
            if n % 2 == 1 && j_reg > 0 && j_reg + 1 < len {
                let xr = x[j_reg + 1];
                let vr = out[j_reg + 1];
                let e = lead(n);
                for j in 1..=j_reg {
                    out[j] = vr * (x[j] / xr).powf(e);
                }
            }
            if let Some(j) = out.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::Grid(format!(
                    "formal power {n} is not finite at x = {}; the particular solution is too small there",
                    x[j]
                )));
            }
            powers.push(out);
        }
        Ok(powers)
    }
}

fn wrap(grid: &Arc<Grid>, raw: Vec<Vec<Complex64>>) -> Vec<GridFunction> {
    raw.into_iter()
        .map(|v| GridFunction::from_raw(grid.clone(), v))
        .collect()
}

/// `p(x) = exp(lambda0 int_0^x r1)`.
pub fn polya_p(sampled: &SampledProblem, lambda0: Complex64) -> GridFunction {
    let grid = sampled.grid.clone();
    if sampled.r1_zero || lambda0 == ZERO {
        return GridFunction::constant(grid, ONE);
    }
    let mut int = Vec::new();
    cumulative_into(sampled.r1.values(), grid.h(), Some(&FirstPanel::new(0.0)), &mut int);
    GridFunction::from_raw(grid, int.into_iter().map(|v| (lambda0 * v).exp()).collect())
}

/// Constants of the `X`/`Z` estimates for a given particular solution.
pub fn estimate_constants(sampled: &SampledProblem, u0: &ParticularSolution, pfun: &GridFunction) -> Constants {
    let x = sampled.grid.nodes();
    let (u, du) = (u0.u0.values(), u0.du0.values());
    let (p, r0, r1) = (pfun.values(), sampled.r0.values(), sampled.r1.values());
    let tl = &sampled.x_lp1;
    // squared maxima; roots taken once at the end
    let mut c1 = 0.0f64;
    let mut c2 = 0.0f64;
    let mut c3 = 0.0f64;
    let mut c1z = 0.0f64;
    for j in 1..x.len() {
        let t = x[j];
        let t2 = tl[j] * tl[j];
        let r = if sampled.r1_zero {
            r0[j] * u[j]
        } else {
            r0[j] * u[j] + r1[j] * du[j]
        };
        let pu = p[j] * u[j];
        c1 = c1.max((pu * r).norm_sqr() * (t / t2) * (t / t2));
        c2 = c2.max(t2 * t2 / (pu * u[j]).norm_sqr());
        if !sampled.r1_zero {
            c3 = c3.max(r1[j].norm_sqr());
        }
        c1z = c1z.max((r0[j] * u[j] * u[j]).norm_sqr() / (t2 * t2));
    }
    let (c1, c2, c3, c1z) = (c1.sqrt(), c2.sqrt(), c3.sqrt(), c1z.sqrt());
    Constants {
        c: 1f64.max(c1).max(c2).max(c3),
        c1,
        c2,
        c3,
        c_r1_zero: sampled.r1_zero.then_some(c1z.max(c2)),
    }
}

/// `X` powers: the unshifted case.
pub fn compute_x(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    u0: &ParticularSolution,
    n: usize,
    opts: &PowerOptions,
) -> Result<FormalPowerSet> {
    if u0.lambda0 != ZERO {
        return Err(Error::Unsupported(
            "X powers need a particular solution at lambda0 = 0; use compute_z".into(),
        ));
    }
    let mut set = compute_z(spec, sampled, u0, n, opts)?;
    set.kind = PowerKind::X;
    Ok(set)
}

/// `Z` powers centered at the particular solution's `lambda0`.
pub fn compute_z(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    u0: &ParticularSolution,
    n: usize,
    opts: &PowerOptions,
) -> Result<FormalPowerSet> {
    compute_z_with(spec, sampled, u0, n, opts, &mut WeightCache::default())
}

pub(crate) fn compute_z_with(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    u0: &ParticularSolution,
    n: usize,
    opts: &PowerOptions,
    cache: &mut WeightCache,
) -> Result<FormalPowerSet> {
    let grid = &sampled.grid;
    if !Arc::ptr_eq(grid, u0.u0.grid()) && grid.as_ref() != u0.u0.grid().as_ref() {
        return Err(Error::Grid("particular solution lives on a different grid".into()));
    }
    let l = spec.l;
    let lambda0 = u0.lambda0;
    let pfun = polya_p(sampled, lambda0);
    let (u, du) = (u0.u0.values(), u0.du0.values());
    let (p, r0, r1) = (pfun.values(), sampled.r0.values(), sampled.r1.values());
    let len = grid.len();
    let mut w_odd = vec![ZERO; len];
    let mut w_even = vec![ZERO; len];
    for j in 1..len {
        let r = if sampled.r1_zero {
            r0[j] * u[j]
        } else {
            r0[j] * u[j] + r1[j] * du[j]
        };
        w_odd[j] = p[j] * u[j] * r;
        w_even[j] = (p[j] * u[j] * u[j]).inv();
    }
    if let Some(j) = (1..len).find(|&j| !(w_even[j].re.is_finite() && w_even[j].im.is_finite())) {
        return Err(Error::ParticularSolution(format!(
            "particular solution vanishes at x = {}",
            grid.nodes()[j]
        )));
    }
    let rec = Recursion {
        grid,
        w_odd: &w_odd,
        w_even: &w_even,
        even_sign: -1.0,
        r1: (!sampled.r1_zero).then_some(r1),
    };
    let raw = rec.run(
        cache,
        2 * n,
        opts.j_regularization,
        |m| {
            let k = (m / 2) as f64;
            match (m % 2 == 1, sampled.r1_zero) {
                (true, true) => 2.0 * l + 2.0 + 2.0 * k,
                (false, true) => 2.0 * k - 1.0,
                (true, false) => 2.0 * l + 1.0 + k,
                (false, false) => k - 1.0,
            }
        },
        |m| {
            if sampled.r1_zero {
                2.0 * l + 2.0 + m as f64
            } else {
                2.0 * l + 2.0 + ((m - 1) / 2) as f64
            }
        },
    )?;
    let constants = estimate_constants(sampled, u0, &pfun);
    let mut set = FormalPowerSet {
        kind: if lambda0 == ZERO { PowerKind::X } else { PowerKind::Z },
        order: n,
        powers: wrap(grid, raw),
        lambda0,
        constants,
        pfun,
        l,
        alpha: spec.alpha,
        r0_one: spec.r0_is_one(),
        r1_zero: sampled.r1_zero,
        warnings: Vec::new(),
    };
    if opts.check_bounds {
        set.warnings = check_bounds(&set, opts)?;
    }
    Ok(set)
}

/// Effective growth exponent of the shifted weight `W`.
pub(crate) fn shifted_alpha(spec: &ProblemSpec, lambda0: Complex64) -> f64 {
    let mut alpha = if spec.q_is_zero() { f64::INFINITY } else { spec.alpha };
    if lambda0 != ZERO {
        if !spec.r0.is_zero() {
            alpha = alpha.min(0.0);
        }
        if !spec.r1_is_zero() {
            alpha = alpha.min(-1.0);
        }
    }
    if alpha.is_infinite() {
        // no potential at all: any exponent works, the powers vanish
        spec.alpha.max(0.0)
    } else {
        alpha
    }
}

/// `Y` powers for the particular solution at `lambda0` (plain `Y` when
/// `lambda0 = 0`).
pub fn compute_y(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    lambda0: Complex64,
    n: usize,
    opts: &PowerOptions,
) -> Result<FormalPowerSet> {
    let grid = &sampled.grid;
    let l = spec.l;
    let alpha = shifted_alpha(spec, lambda0);
    let pfun = polya_p(sampled, lambda0);
    let x = grid.nodes();
    let (p, q, r0, r1) = (
        pfun.values(),
        sampled.q.values(),
        sampled.r0.values(),
        sampled.r1.values(),
    );
    let len = grid.len();
    let mut w_odd = vec![ZERO; len];
    let mut w_even = vec![ZERO; len];
    let mut growth = 0.0f64;
    for j in 1..len {
        let t = x[j];
        let mut w = q[j];
        if lambda0 != ZERO {
            w -= lambda0 * r0[j];
            if !sampled.r1_zero {
                w -= lambda0 * r1[j] * ((l + 1.0) / t);
            }
        }
        growth = growth.max(w.norm() * t.powf(-alpha));
        let t2 = sampled.x_lp1[j] * sampled.x_lp1[j];
        w_odd[j] = p[j] * w * t2;
        w_even[j] = (p[j] * t2).inv();
    }
    let rec = Recursion {
        grid,
        w_odd: &w_odd,
        w_even: &w_even,
        even_sign: 1.0,
        r1: None,
    };
    let step = 2.0 + alpha;
    let raw = rec.run(
        &mut WeightCache::default(),
        2 * n,
        opts.j_regularization,
        |m| {
            let k = m.div_ceil(2) as f64;
            if m % 2 == 1 {
                2.0 * l + k * step
            } else {
                k * step - 1.0
            }
        },
        |m| 2.0 * l + 1.0 + m.div_ceil(2) as f64 * step,
    )?;
    let mut set = FormalPowerSet {
        kind: PowerKind::Y,
        order: n,
        powers: wrap(grid, raw),
        lambda0,
        constants: Constants {
            c: growth,
            c1: growth,
            c2: 0.0,
            c3: 0.0,
            c_r1_zero: None,
        },
        pfun,
        l,
        alpha,
        r0_one: spec.r0_is_one(),
        r1_zero: sampled.r1_zero,
        warnings: Vec::new(),
    };
    if opts.check_bounds && (lambda0 == ZERO || sampled.r1_zero) {
        set.warnings = check_bounds(&set, opts)?;
    }
    Ok(set)
}

/// Natural logarithm of the a-priori bound `|P(n)(x)| <= exp(c0 + c1 ln x)`,
/// returned as `(c0, c1)`; `None` when the bound is identically zero.
pub fn log_bound(set: &FormalPowerSet, n: usize) -> Option<(f64, f64)> {
    let l = set.l;
    match set.kind {
        PowerKind::X | PowerKind::Z => {
            if let Some(c) = set.constants.c_r1_zero {
                if c == 0.0 && n > 0 {
                    return None;
                }
                let k = n / 2;
                let lc = c.ln();
                if n % 2 == 0 {
                    let c0 = 2.0 * k as f64 * lc - (2 * k) as f64 * 2f64.ln() - log_fact(k) - log_poch(l + 1.5, k);
                    Some((if k == 0 { 0.0 } else { c0 }, 2.0 * k as f64))
                } else {
                    let c0 = (2 * k + 1) as f64 * lc
                        - (2 * k + 1) as f64 * 2f64.ln()
                        - log_fact(k)
                        - log_poch(l + 1.5, k + 1);
                    Some((c0, (2 * k + 1) as f64 + 2.0 * l + 2.0))
                }
            } else {
                let c = set.constants.c;
                let lc = c.ln();
                let k = n / 2;
                if n % 2 == 0 {
                    Some((2.0 * k as f64 * lc - log_poch(2.0 * l + 2.0, k), k as f64))
                } else {
                    Some((
                        ((k + 1) as f64).ln() + (2 * k + 1) as f64 * lc - log_poch(2.0 * l + 2.0, k + 1),
                        2.0 * l + 2.0 + k as f64,
                    ))
                }
            }
        }
        PowerKind::Y => {
            let c = set.constants.c;
            if n == 0 {
                return Some((0.0, 0.0));
            }
            if c == 0.0 {
                return None;
            }
            let s = 2.0 + set.alpha;
            let nu1 = (2.0 * l + 1.0) / s + 1.0;
            let k = n.div_ceil(2);
            let common = k as f64 * c.ln() - log_poch(nu1, k);
            if n % 2 == 0 {
                Some((common - log_fact(k) - (2 * k) as f64 * s.ln(), k as f64 * s))
            } else {
                // (k-1)! here: with k! the estimate already fails for q = x^2
                Some((
                    common - log_fact(k - 1) - (2 * k - 1) as f64 * s.ln(),
                    2.0 * l + 1.0 + k as f64 * s,
                ))
            }
        }
    }
}

/// Integer power by squaring; `Float::powi` goes through the general `pow`
/// without std.
#[inline]
fn powi(mut b: f64, e: i32) -> f64 {
    let mut n = e.unsigned_abs();
    let mut r = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            r *= b;
        }
        b *= b;
        n >>= 1;
    }
    if e < 0 {
        1.0 / r
    } else {
        r
    }
}

fn log_fact(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Checks every power against its a-priori bound at every node.
/// Nodes before this index are skipped by [`check_bounds`]: there the
/// quadrature error of steep powers, relative to their tiny values, exceeds
/// any sensible slack.
pub const FIRST_CHECKED_NODE: usize = 25;

pub fn check_bounds(set: &FormalPowerSet, opts: &PowerOptions) -> Result<Vec<BoundViolation>> {
    let x = set.grid().nodes();
    let first = FIRST_CHECKED_NODE.min(x.len() - 1);
    // x^c = x^floor(c) x^frac(c); the fractional parts repeat across orders
    let nodes: Vec<usize> = (first..x.len()).step_by(opts.bound_stride.max(1)).collect();
    let mut frac_tables: Vec<(u64, Vec<f64>)> = Vec::new();
    let mut out = Vec::new();
    for n in 1..set.powers.len() {
        let vals = set.powers[n].values();
        let (scale, int_part, frac) = match log_bound(set, n) {
            Some((c0, c1)) if c0.abs() < 600.0 && c1 < 1000.0 => (c0.exp(), c1.floor() as i32, c1 - c1.floor()),
            Some((c0, c1)) => {
                // extreme constants: evaluate in log space
                if let Some(v) =
                    (first..x.len()).find(|&j| vals[j].norm().ln() > c0 + c1 * x[j].ln() + opts.bound_slack)
                {
                    let viol = BoundViolation {
                        order: n,
                        x: x[v],
                        value: vals[v].norm(),
                        bound: (c0 + c1 * x[v].ln()).exp(),
                    };
                    if opts.strict {
                        return Err(viol.into());
                    }
                    out.push(viol);
                }
                continue;
            }
            None => (0.0, 0, 0.0),
        };
        let key = frac.to_bits();
        let table = match frac_tables.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                frac_tables.push((key, nodes.iter().map(|&j| x[j].powf(frac)).collect()));
                frac_tables.len() - 1
            }
        };
        let xf = &frac_tables[table].1;
        for (&j, &xfj) in nodes.iter().zip(xf) {
            let bound = scale * powi(x[j], int_part) * xfj;
            let b = bound * (1.0 + opts.bound_slack);
            if vals[j].norm_sqr() <= b * b {
                continue;
            }
            let v = vals[j].norm();
            if v > b + 1e-280 {
                let viol = BoundViolation {
                    order: n,
                    x: x[j],
                    value: v,
                    bound,
                };
                if opts.strict {
                    return Err(viol.into());
                }
                out.push(viol);
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::usol::build_u0_analytic;
    use proptest::prelude::*;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn bessel_setup(l: f64, m: usize) -> (ProblemSpec, SampledProblem, ParticularSolution) {
        let spec = ProblemSpec::new(l, 1.0);
        let grid = Grid::new(1.0, m).unwrap();
        let sampled = spec.sample(grid.clone()).unwrap();
        let u0 = build_u0_analytic(
            &spec,
            &e(&format!("x^({})", l + 1.0)),
            &e(&format!("{}*x^({})", l + 1.0, l)),
            grid,
        )
        .unwrap();
        (spec, sampled, u0)
    }

    fn closed_form(l: f64, k: usize, x: f64) -> f64 {
        // (-1)^k x^(2k) / (4^k k! (l+3/2)_k)
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * (2.0 * k as f64 * x.ln() - k as f64 * 4f64.ln() - log_fact(k) - log_poch(l + 1.5, k)).exp()
    }

    #[test]
    fn closed_form_values() {
        let (spec, sampled, u0) = bessel_setup(0.5, 1000);
        let set = compute_x(&spec, &sampled, &u0, 3, &PowerOptions::default()).unwrap();
        assert!(set.powers[0].values().iter().all(|v| *v == ONE));
        assert!((set.powers[2].last().re + 0.125).abs() < 1e-14);
        assert!((set.powers[4].last().re - 1.0 / 192.0).abs() < 1e-15);
        assert!(set.warnings.is_empty(), "{:?}", set.warnings);
    }

    #[test]
    fn closed_form_all_nodes() {
        for &l in &[-0.5, 0.25, 2.0] {
            let (spec, sampled, u0) = bessel_setup(l, 2000);
            let set = compute_x(&spec, &sampled, &u0, 20, &PowerOptions::default()).unwrap();
            let x = set.grid().nodes();
            for k in 0..=20 {
                for j in (200..x.len()).step_by(7) {
                    let want = closed_form(l, k, x[j]);
                    let got = set.powers[2 * k].values()[j];
                    assert!(
                        (got.re - want).abs() <= 1e-12 * want.abs() && got.im == 0.0,
                        "l={l} k={k} x={}",
                        x[j]
                    );
                }
            }
            assert!(set.warnings.is_empty(), "l={l}: {:?}", set.warnings);
        }
    }

    #[test]
    fn constants_for_pure_power() {
        let (_, sampled, u0) = bessel_setup(0.5, 500);
        let p = polya_p(&sampled, ZERO);
        let c = estimate_constants(&sampled, &u0, &p);
        assert!((c.c1 - 1.0).abs() < 1e-13 && (c.c2 - 1.0).abs() < 1e-13);
        assert_eq!(c.c3, 0.0);
        assert!((c.c - 1.0).abs() < 1e-13);
        assert!((c.c_r1_zero.unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn complex_derivative_constant() {
        let spec = ProblemSpec::new(0.5, 1.0)
            .with_r0(e("0"))
            .with_r1(e("1"))
            .with_boundary(ZERO, ONE);
        let grid = Grid::new(1.0, 1000).unwrap();
        let sampled = spec.sample(grid.clone()).unwrap();
        let u0 = build_u0_analytic(&spec, &e("x^1.5"), &e("1.5*x^0.5"), grid).unwrap();
        let p = polya_p(&sampled, ZERO);
        let c = estimate_constants(&sampled, &u0, &p);
        assert!((c.c - 1.5).abs() < 1e-13, "{c:?}");
        assert_eq!(c.c_r1_zero, None);
        let set = compute_x(&spec, &sampled, &u0, 30, &PowerOptions::default()).unwrap();
        assert!(set.warnings.is_empty(), "{:?}", set.warnings);
    }

    #[test]
    fn y_vanishes_without_potential() {
        let spec = ProblemSpec::new(1.0, 2.0);
        let grid = Grid::new(2.0, 100).unwrap();
        let sampled = spec.sample(grid).unwrap();
        let set = compute_y(&spec, &sampled, ZERO, 5, &PowerOptions::default()).unwrap();
        for p in &set.powers[1..] {
            assert!(p.values().iter().all(|v| *v == ZERO));
        }
    }

    #[test]
    fn y_nonnegative_for_nonnegative_potential() {
        let spec = ProblemSpec::new(1.5, core::f64::consts::PI)
            .with_q(e("x^2"))
            .with_alpha(2.0);
        let grid = Grid::new(spec.a, 3000).unwrap();
        let sampled = spec.sample(grid).unwrap();
        let set = compute_y(&spec, &sampled, ZERO, 20, &PowerOptions::default()).unwrap();
        for p in &set.powers {
            assert!(p.values().iter().all(|v| v.re >= 0.0 && v.im == 0.0));
        }
        assert!(set.warnings.is_empty(), "{:?}", set.warnings);
    }

    #[test]
    fn strict_mode_reports_violations() {
        let (spec, sampled, u0) = bessel_setup(0.5, 200);
        let mut set = compute_x(&spec, &sampled, &u0, 4, &PowerOptions::default()).unwrap();
        // shrink the constant so the tight bound fails
        set.constants.c_r1_zero = Some(0.5);
        let strict = PowerOptions {
            strict: true,
            ..PowerOptions::default()
        };
        assert!(matches!(check_bounds(&set, &strict), Err(Error::BoundViolation { .. })));
        assert!(!check_bounds(&set, &PowerOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn regularization_follows_leading_law() {
        let (spec, sampled, u0) = bessel_setup(0.5, 500);
        let opts = PowerOptions {
            j_regularization: 10,
            ..PowerOptions::default()
        };
        let set = compute_x(&spec, &sampled, &u0, 3, &opts).unwrap();
        let x = set.grid().nodes();
        // X(1) = x^4 / 4 exactly
        for j in 0..=10 {
            let want = x[j].powi(4) / 4.0;
            assert!((set.powers[1].values()[j].re - want).abs() <= 1e-13 * want);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn zero_shift_matches_x(l in -0.5f64..2.5, s in 0.0f64..3.0) {
            let spec = ProblemSpec::new(l, 1.0).with_q(e(&format!("{s}*x"))).with_alpha(1.0).with_r1(e("x")).with_r0(e("1+x"));
            let grid = Grid::new(1.0, 500).unwrap();
            let sampled = spec.sample(grid.clone()).unwrap();
            let u0 = crate::usol::build_u0_series(&spec, &sampled, 15, &PowerOptions::default()).unwrap();
            let x = compute_x(&spec, &sampled, &u0, 6, &PowerOptions::default()).unwrap();
            let z = compute_z(&spec, &sampled, &u0, 6, &PowerOptions::default()).unwrap();
            prop_assert!(z.pfun.values().iter().all(|v| *v == ONE));
            for (a, b) in x.powers.iter().zip(&z.powers) {
                for (u, v) in a.values().iter().zip(b.values()) {
                    prop_assert!((u - v).norm() <= 1e-13 * (1.0 + v.norm()));
                }
            }
        }

        #[test]
        fn bounds_hold_for_positive_potentials(l in -0.5f64..2.0, s in 0.0f64..4.0, alpha in -1.5f64..2.0) {
            let spec = ProblemSpec::new(l, 1.5).with_q(e(&format!("{s}*x^({alpha})*(1+x)"))).with_alpha(alpha);
            let grid = Grid::new(1.5, 600).unwrap();
            let sampled = spec.sample(grid).unwrap();
            let strict = PowerOptions { strict: true, ..PowerOptions::default() };
            let y = compute_y(&spec, &sampled, ZERO, 10, &strict);
            prop_assert!(y.is_ok(), "{:?}", y.err());
            let u0 = crate::usol::build_u0_series(&spec, &sampled, 20, &PowerOptions::default()).unwrap();
            let x = compute_x(&spec, &sampled, &u0, 10, &strict);
            prop_assert!(x.is_ok(), "{:?}", x.err());
        }
    }
}
