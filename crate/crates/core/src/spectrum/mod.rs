//! Characteristic polynomial, its roots, Rouché trust radii and the
//! spectral-shift drivers.

mod roots;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub use roots::{aberth, polish, Root, RESIDUAL_TOL};

use crate::expr::Expr;
use crate::grid::WeightCache;
use crate::grid::{Grid, GridFunction};
use crate::powers::{compute_z_with, FormalPowerSet, PowerOptions};
use crate::problem::{ProblemSpec, SampledProblem};
use crate::spps::{exp_tail, SppsSolution};
use crate::usol::{
    build_u0_analytic, build_u0_from_fn, build_u0_series, build_u0_shifted, ParticularSolution, U0Source,
};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

type KFn = dyn Fn(usize) -> f64;

/// Bound used for `|Phi - Phi_N|` on a circle of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    /// `(|beta| + |gamma|) max|u0| (e^z - sum_{k<=N} z^k/k!)`, `z = C^2 r a`.
    Exponential,
    /// Coefficientwise majorant from the bounds on the even and odd powers.
    Majorant,
    /// No tail: every root counts as trusted.
    None,
}

/// Characteristic polynomial `Phi_N` in powers of `lambda - center`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub center: Complex64,
    pub coeffs: Vec<Complex64>,
    pub tail_c: f64,
    pub tail_c_r1_zero: Option<f64>,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub a: f64,
    pub l: f64,
    pub u0_a: Complex64,
    pub du0_a: Complex64,
    pub p_a: Complex64,
    pub max_u0: f64,
}

/// A root of `Phi_N` in the spectral variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootInfo {
    pub lambda: Complex64,
    pub residual: f64,
    pub converged: bool,
}

impl CharPoly {
    pub fn new(spec: &ProblemSpec, powers: &FormalPowerSet, u0: &ParticularSolution) -> Result<Self> {
        let u0_a = u0.u0.last();
        let du0_a = u0.du0.last();
        let p_a = powers.pfun.last();
        let c0 = spec.beta * u0_a + spec.gamma * du0_a;
        let has_gamma = spec.gamma != ZERO;
        if has_gamma && u0_a == ZERO {
            return Err(Error::ParticularSolution("u0(a) = 0".into()));
        }
        let g = if has_gamma { spec.gamma / (p_a * u0_a) } else { ZERO };
        let end = powers.at_end();
        let mut coeffs = Vec::with_capacity(powers.order + 1);
        coeffs.push(c0);
        for k in 1..=powers.order {
            coeffs.push(c0 * end[2 * k] - g * end[2 * k - 1]);
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Nonconvergence(
                "characteristic coefficients are not finite".into(),
            ));
        }
        Ok(CharPoly {
            center: powers.lambda0,
            coeffs,
            tail_c: powers.constants.c,
            tail_c_r1_zero: powers.constants.c_r1_zero,
            beta: spec.beta,
            gamma: spec.gamma,
            a: spec.a,
            l: spec.l,
            u0_a,
            du0_a,
            p_a,
            max_u0: u0.u0.max_abs(),
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mu = lambda - self.center;
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * mu + c)
    }

    /// Upper bound for `|Phi - Phi_N|` on `|lambda - center| = r`.
    pub fn tail_bound(&self, model: TailModel, r: f64) -> f64 {
        let n = self.degree();
        match model {
            TailModel::None => 0.0,
            TailModel::Exponential => {
                let c = self.tail_c;
                (self.beta.norm() + self.gamma.norm()) * self.max_u0 * exp_tail(c * c * r * self.a, n)
            }
            TailModel::Majorant => {
                let c0 = self.coeffs[0].norm();
                let g = if self.gamma == ZERO {
                    0.0
                } else {
                    (self.gamma / (self.p_a * self.u0_a)).norm()
                };
                let (l, a) = (self.l, self.a);
                let a_odd = a.powf(2.0 * l + 1.0);
                // A_k: bound of the even power; the odd power is A_k times `odd(k)`
                let (ratio, odd): (Box<KFn>, Box<KFn>) = match self.tail_c_r1_zero {
                    Some(c) => (
                        Box::new(move |k| c * c * a * a * r / (4.0 * k as f64 * (l + 0.5 + k as f64))),
                        Box::new(move |k| 2.0 * k as f64 * a_odd / c),
                    ),
                    None => {
                        let c = self.tail_c;
                        (
                            Box::new(move |k| c * c * a * r / (2.0 * l + 1.0 + k as f64)),
                            Box::new(move |k| k as f64 * a_odd / c),
                        )
                    }
                };
                let mut ak = 1.0;
                for k in 1..=n {
                    ak *= ratio(k);
                }
                let mut sum = 0.0;
                let mut k = n + 1;
                loop {
                    let prev = ak * (c0 + g * odd(k.max(2) - 1));
                    ak *= ratio(k);
                    let term = ak * (c0 + g * odd(k));
                    if !term.is_finite() {
                        return f64::INFINITY;
                    }
                    sum += term;
                    if term == 0.0 || (term <= 1e-17 * sum && term < prev) || k > n + 1_000_000 {
                        break;
                    }
                    k += 1;
                }
                sum
            }
        }
    }

    /// All roots of `Phi_N`.
    pub fn roots(&self) -> Vec<RootInfo> {
        let nz: Vec<usize> = (0..self.coeffs.len()).filter(|&k| self.coeffs[k] != ZERO).collect();
        if nz.len() < 2 {
            return Vec::new();
        }
        let (i, j) = (nz[0], nz[nz.len() - 1]);
        let ln_rho = (self.coeffs[i].norm().ln() - self.coeffs[j].norm().ln()) / (j - i) as f64;
        // a power of two keeps the rescaled coefficients exact
        let e = (ln_rho / core::f64::consts::LN_2).round() as i64;
        let rho = mul_pow2(1.0, e);
        let scaled: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let s = k as i64 * e;
                Complex64::new(mul_pow2(c.re, s), mul_pow2(c.im, s))
            })
            .collect();
        let found = aberth(&scaled, 2000);
        let mus: Vec<Complex64> = found.iter().map(|r| r.z * rho).collect();
        found
            .iter()
            .enumerate()
            .map(|(i, r)| {
                // refine against the unscaled coefficients, staying well
                // inside the gap to the nearest other root
                let gap = mus
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(f64::INFINITY, |g, (_, m)| g.min((m - mus[i]).norm()));
                let mu = polish(&self.coeffs, mus[i], 0.25 * gap).unwrap_or(mus[i]);
                RootInfo {
                    lambda: self.center + mu,
                    residual: r.residual,
                    converged: r.converged,
                }
            })
            .collect()
    }

    /// Largest radius `r` with `min |Phi_N| > tail(r)` on `|lambda - center| = r`,
    /// sampled at `angles` points. Infinite when the tail vanishes.
    pub fn rouche_radius(&self, model: TailModel, angles: usize) -> f64 {
        if model == TailModel::None || self.tail_bound(model, 1.0) == 0.0 {
            return f64::INFINITY;
        }
        let angles = angles.max(8);
        let circle: Vec<Complex64> = (0..angles)
            .map(|t| Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (t as f64 + 0.5) / angles as f64))
            .collect();
        let extremes = |r: f64| {
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for w in &circle {
                let v = self.eval(self.center + w * r).norm();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (lo, hi)
        };
        let factor = 1.01;
        let mut r = 1e-8;
        let mut last = None;
        while r < 1e12 {
            let (lo, hi) = extremes(r);
            let tail = self.tail_bound(model, r);
            if lo > tail {
                last = Some(r);
            }
            if tail > hi {
                break;
            }
            r *= factor;
        }
        let Some(mut good) = last else { return 0.0 };
        let mut bad = good * factor;
        for _ in 0..40 {
            let mid = 0.5 * (good + bad);
            if extremes(mid).0 > self.tail_bound(model, mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    }
}

/// `v 2^e`, exact unless the result leaves the normal range.
fn mul_pow2(mut v: f64, mut e: i64) -> f64 {
    while e != 0 && v != 0.0 && v.is_finite() {
        let step = e.clamp(-1000, 1000);
        v *= f64::from_bits(((1023 + step) as u64) << 52);
        e -= step;
    }
    v
}

/// Closure returning `(u0(x), u0'(x))`.
#[derive(Clone)]
pub struct U0Fn(pub Arc<dyn Fn(f64) -> (Complex64, Complex64) + Send + Sync>);

impl fmt::Debug for U0Fn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("U0Fn(..)")
    }
}

/// How the particular solution for the first center is obtained.
#[derive(Debug, Clone)]
pub enum U0Choice {
    /// Series; if it has a zero and `q` is real and bounded below, the
    /// shifted series at the lower bound.
    Auto,
    Series,
    Shifted {
        lambda0: Complex64,
    },
    Analytic {
        u0: Expr,
        du0: Expr,
    },
    Function(U0Fn),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// One center at the particular solution's `lambda0`.
    Single,
    /// Centers `offset + n step`, `n = 0, 1, ...`.
    LinearSchedule { step: Complex64, offset: Complex64 },
    /// Next center is the last accepted eigenvalue plus `delta`.
    AdaptiveChain { delta: Complex64 },
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub n: usize,
    pub m: usize,
    pub num_eigenvalues: usize,
    pub strategy: Strategy,
    /// Keep only (numerically) real roots.
    pub real_mode: bool,
    pub u0: U0Choice,
    /// Truncation order of a series-built `u0`; defaults to `n`.
    pub u0_order: Option<usize>,
    pub powers: PowerOptions,
    pub tail_model: TailModel,
    pub rouche_angles: usize,
    /// Compute trust radii at every center.
    pub trust_radii: bool,
    pub eigenfunctions: bool,
    pub max_centers: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            n: 40,
            m: 50_000,
            num_eigenvalues: 10,
            strategy: Strategy::Single,
            real_mode: false,
            u0: U0Choice::Auto,
            u0_order: None,
            powers: PowerOptions::default(),
            tail_model: TailModel::Exponential,
            rouche_angles: 128,
            trust_radii: true,
            eigenfunctions: false,
            max_centers: 5000,
        }
    }
}

/// Eigenfunction samples at an accepted eigenvalue.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub u: GridFunction,
    pub du: GridFunction,
    /// `|beta u(a) + gamma u'(a)| / (max(|beta|, |gamma|) max|u|)`.
    pub boundary_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Eigenvalue {
    pub lambda: Complex64,
    pub residual: f64,
    /// Position in the shift chain of the center that produced it.
    pub shift_index: usize,
    pub center: Complex64,
    pub trusted: bool,
    pub trust_radius: f64,
    pub eigenfunction: Option<Eigenfunction>,
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<Eigenvalue>,
    /// Centers in the order they were used.
    pub chain: Vec<Complex64>,
    pub n: usize,
    pub m: usize,
    pub strategy: Strategy,
    pub real_mode: bool,
    pub u0_source: U0Source,
    pub warnings: Vec<String>,
}

/// Everything computed at one center.
#[derive(Debug, Clone)]
pub struct CenterAnalysis {
    pub sol: SppsSolution,
    pub poly: CharPoly,
    pub roots: Vec<RootInfo>,
    pub trust_radius: f64,
}

impl CenterAnalysis {
    pub fn center(&self) -> Complex64 {
        self.poly.center
    }
}

fn real_tol(z: Complex64) -> bool {
    z.im.abs() <= 1e-6 * (1.0 + z.re.abs())
}

fn dedup_close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-6 * (1.0 + a.norm())
}

/// Particular solution for the first center.
pub fn build_base_u0(spec: &ProblemSpec, sampled: &SampledProblem, settings: &Settings) -> Result<ParticularSolution> {
    let grid = sampled.grid.clone();
    let order = settings.u0_order.unwrap_or(settings.n);
    let sol = match &settings.u0 {
        U0Choice::Analytic { u0, du0 } => build_u0_analytic(spec, u0, du0, grid)?,
        U0Choice::Function(f) => build_u0_from_fn(spec, grid, |x| Ok((f.0)(x)))?,
        U0Choice::Series => build_u0_series(spec, sampled, order, &settings.powers)?,
        U0Choice::Shifted { lambda0 } => build_u0_shifted(spec, sampled, *lambda0, order, &settings.powers)?,
        U0Choice::Auto => {
            let sol = build_u0_series(spec, sampled, order, &settings.powers)?;
            if sol.nonvanishing() {
                sol
            } else {
                match real_lower_bound(sampled) {
                    Some(q0) => build_u0_shifted(spec, sampled, Complex64::new(q0, 0.0), order, &settings.powers)?,
                    None => sol,
                }
            }
        }
    };
    if !sol.nonvanishing() {
        return Err(Error::ParticularSolution(format!(
            "particular solution has a zero near x = {}",
            sol.report.zero_near.unwrap_or(f64::NAN)
        )));
    }
    Ok(sol)
}

fn real_lower_bound(sampled: &SampledProblem) -> Option<f64> {
    let q = sampled.q.values();
    if q[1..].iter().any(|v| v.im != 0.0) || sampled.r1.values()[1..].iter().any(|v| v.im != 0.0) {
        return None;
    }
    let m = q[1..].iter().fold(f64::INFINITY, |m, v| m.min(v.re));
    (m.is_finite() && m > -1e6).then_some(m.min(0.0))
}

/// Powers, polynomial, roots and trust radius at the center of `u0`.
pub fn analyze_center(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    u0: ParticularSolution,
    settings: &Settings,
) -> Result<CenterAnalysis> {
    analyze_center_with(spec, sampled, u0, settings, &mut WeightCache::default())
}

fn analyze_center_with(
    spec: &ProblemSpec,
    sampled: &SampledProblem,
    u0: ParticularSolution,
    settings: &Settings,
    cache: &mut WeightCache,
) -> Result<CenterAnalysis> {
    let chained = u0.source == U0Source::Chained;
    let opts = if chained {
        // the base center already checked every node on this grid
        PowerOptions {
            bound_stride: settings.powers.bound_stride.max(5),
            ..settings.powers.clone()
        }
    } else {
        settings.powers.clone()
    };
    let powers = compute_z_with(spec, sampled, &u0, settings.n, &opts, cache)?;
    let poly = CharPoly::new(spec, &powers, &u0)?;
    let roots = poly.roots();
    let trust_radius = if settings.trust_radii {
        poly.rouche_radius(settings.tail_model, settings.rouche_angles)
    } else {
        0.0
    };
    Ok(CenterAnalysis {
        sol: SppsSolution::new(powers, u0)?,
        poly,
        roots,
        trust_radius,
    })
}

/// Particular solution at `lambda` obtained from the series at the current center.
pub fn shift_to(spec: &ProblemSpec, sol: &SppsSolution, lambda: Complex64) -> Result<ParticularSolution> {
    let (u, du) = sol.evaluate(lambda)?;
    let ps = ParticularSolution::from_samples(spec.l, u, du, lambda, U0Source::Chained);
    if !ps.nonvanishing() {
        return Err(Error::ParticularSolution(format!(
            "solution at lambda0 = {lambda} vanishes near x = {}; choose a different shift",
            ps.report.zero_near.unwrap_or(f64::NAN)
        )));
    }
    Ok(ps)
}

fn note_bounds(at: &CenterAnalysis, out: &mut Vec<String>) {
    if let Some(v) = at.sol.powers.warnings.first() {
        out.push(format!(
            "center {}: power {} exceeds its a-priori bound at x = {} ({:e} > {:e}); the grid may be too coarse",
            at.center(),
            v.order,
            v.x,
            v.value,
            v.bound
        ));
    }
}

struct Collector<'a> {
    spec: &'a ProblemSpec,
    settings: &'a Settings,
    accepted: Vec<Eigenvalue>,
}

impl Collector<'_> {
    fn claimed(&self, z: Complex64) -> Option<usize> {
        self.accepted.iter().position(|e| dedup_close(e.lambda, z))
    }

    fn accept(&mut self, at: &CenterAnalysis, shift_index: usize, root: &RootInfo) -> Result<()> {
        let mut root = *root;
        if self.settings.real_mode {
            root.lambda.im = 0.0;
        }
        let trusted = (root.lambda - at.center()).norm() < at.trust_radius;
        let eigenfunction = if self.settings.eigenfunctions {
            let (u, du) = at.sol.evaluate(root.lambda)?;
            let bc = self.spec.beta * u.last() + self.spec.gamma * du.last();
            let scale = self.spec.beta.norm().max(self.spec.gamma.norm()) * u.max_abs();
            Some(Eigenfunction {
                boundary_residual: bc.norm() / scale,
                u,
                du,
            })
        } else {
            None
        };
        let ev = Eigenvalue {
            lambda: root.lambda,
            residual: root.residual,
            shift_index,
            center: at.center(),
            trusted,
            trust_radius: at.trust_radius,
            eigenfunction,
        };
        match self.claimed(root.lambda) {
            Some(i) if self.accepted[i].residual <= ev.residual => {}
            Some(i) => self.accepted[i] = ev,
            None => self.accepted.push(ev),
        }
        Ok(())
    }
}

/// Runs the full method: particular solution, shift chain, roots, trust radii.
pub fn solve(spec: &ProblemSpec, settings: &Settings) -> Result<EigenResult> {
    spec.validate()?;
    if settings.n < 1 {
        return Err(Error::validation("N", "truncation order must be at least 1"));
    }
    let grid = Grid::new(spec.a, settings.m)?;
    let sampled = spec.sample(grid)?;
    let base = build_base_u0(spec, &sampled, settings)?;
    let u0_source = base.source;
    let mut cache = WeightCache::default();
    let mut chain = Vec::new();
    let mut warnings = Vec::new();
    let mut col = Collector {
        spec,
        settings,
        accepted: Vec::new(),
    };
    let wanted = settings.num_eigenvalues;

    match &settings.strategy {
        Strategy::Single => {
            let at = analyze_center_with(spec, &sampled, base, settings, &mut cache)?;
            note_bounds(&at, &mut warnings);
            chain.push(at.center());
            let mut cands: Vec<RootInfo> = at
                .roots
                .iter()
                .filter(|r| r.converged && (!settings.real_mode || real_tol(r.lambda)))
                .copied()
                .collect();
            cands.sort_by(|a, b| {
                (a.lambda - at.center())
                    .norm()
                    .total_cmp(&(b.lambda - at.center()).norm())
            });
            for r in cands.iter() {
                if col.accepted.len() >= wanted {
                    break;
                }
                col.accept(&at, 0, r)?;
            }
        }
        Strategy::LinearSchedule { step, offset } => {
            if *step == ZERO {
                return Err(Error::validation("shift", "schedule step must be nonzero"));
            }
            let index_of = |z: Complex64| -> f64 {
                if settings.real_mode && step.re != 0.0 {
                    (z.re - offset.re) / step.re
                } else {
                    ((z - offset) * step.conj()).re / step.norm_sqr()
                }
            };
            let mut at = analyze_center_with(spec, &sampled, base, settings, &mut cache)?;
            let mut n = 0usize;
            loop {
                let center = offset + step * n as f64;
                if at.center() != center {
                    let u0 = shift_to(spec, &at.sol, center)?;
                    drop(at);
                    at = analyze_center_with(spec, &sampled, u0, settings, &mut cache)?;
                }
                note_bounds(&at, &mut warnings);
                chain.push(center);
                let hits: Vec<RootInfo> = at
                    .roots
                    .iter()
                    .filter(|r| r.converged && (!settings.real_mode || real_tol(r.lambda)))
                    .filter(|r| {
                        let t = index_of(r.lambda);
                        let idx = if t < 0.5 { 0 } else { (t + 0.5).floor() as usize };
                        idx == n
                    })
                    .copied()
                    .collect();
                for r in &hits {
                    col.accept(&at, n, r)?;
                }
                if col.accepted.len() >= wanted {
                    break;
                }
                n += 1;
                if n >= settings.max_centers {
                    warnings.push(format!(
                        "stopped after {n} centers with {} eigenvalues",
                        col.accepted.len()
                    ));
                    break;
                }
            }
        }
        Strategy::AdaptiveChain { delta } => {
            let mut at = analyze_center_with(spec, &sampled, base, settings, &mut cache)?;
            let mut step = 0usize;
            loop {
                note_bounds(&at, &mut warnings);
                chain.push(at.center());
                let c = at.center();
                let pick = at
                    .roots
                    .iter()
                    .filter(|r| r.converged && (!settings.real_mode || real_tol(r.lambda)))
                    .filter(|r| col.claimed(r.lambda).is_none())
                    .min_by(|a, b| {
                        let (da, db) = ((a.lambda - c).norm(), (b.lambda - c).norm());
                        if (da - db).abs() <= 1e-12 * (1.0 + da) {
                            // tie: prefer the larger imaginary part
                            b.lambda.im.total_cmp(&a.lambda.im)
                        } else {
                            da.total_cmp(&db)
                        }
                    })
                    .copied();
                let Some(r) = pick else {
                    warnings.push(format!("no unclaimed root at center {c}"));
                    break;
                };
                col.accept(&at, step, &r)?;
                if col.accepted.len() >= wanted {
                    break;
                }
                step += 1;
                if step >= settings.max_centers {
                    warnings.push(format!("stopped after {step} centers"));
                    break;
                }
                let u0 = shift_to(spec, &at.sol, r.lambda + delta)?;
                drop(at);
                at = analyze_center_with(spec, &sampled, u0, settings, &mut cache)?;
            }
        }
    }

    let mut eigenvalues = col.accepted;
    if settings.real_mode {
        eigenvalues.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re));
    } else {
        eigenvalues.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
    }
    eigenvalues.truncate(wanted);
    if eigenvalues.iter().any(|e| e.residual > RESIDUAL_TOL) {
        return Err(Error::Nonconvergence(
            "an accepted root did not reach the residual threshold".into(),
        ));
    }
    Ok(EigenResult {
        eigenvalues,
        chain,
        n: settings.n,
        m: settings.m,
        strategy: settings.strategy.clone(),
        real_mode: settings.real_mode,
        u0_source,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn poly(coeffs: &[f64]) -> CharPoly {
        CharPoly {
            center: ZERO,
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            tail_c: 1.0,
            tail_c_r1_zero: None,
            beta: Complex64::new(1.0, 0.0),
            gamma: ZERO,
            a: 1.0,
            l: 0.0,
            u0_a: Complex64::new(1.0, 0.0),
            du0_a: Complex64::new(1.0, 0.0),
            p_a: Complex64::new(1.0, 0.0),
            max_u0: 1.0,
        }
    }

    #[test]
    fn exact_polynomial_has_infinite_radius() {
        let p = poly(&[-1.0, 0.0, 1.0]);
        assert_eq!(p.rouche_radius(TailModel::None, 64), f64::INFINITY);
        let mut r: Vec<f64> = p.roots().iter().map(|r| r.lambda.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 1.0).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radius_stops_at_first_dip_region() {
        // Phi_N = 1 - lambda/5 with a tiny tail: radius ends near the root at 5
        let mut p = poly(&[1.0, -0.2]);
        p.max_u0 = 1e-12;
        let r = p.rouche_radius(TailModel::Exponential, 256);
        assert!(r > 4.0 && r < 30.0, "{r}");
        assert!(p.tail_bound(TailModel::Majorant, 0.0) == 0.0);
    }

    #[test]
    fn dirichlet_coefficients_and_center_value() {
        let spec = ProblemSpec::new(0.25, 1.0);
        let grid = Grid::new(1.0, 1000).unwrap();
        let sampled = spec.sample(grid.clone()).unwrap();
        let u0 = build_u0_analytic(&spec, &e("x^(5/4)"), &e("5/4*x^(1/4)"), grid).unwrap();
        let settings = Settings {
            n: 20,
            ..Settings::default()
        };
        let at = analyze_center(&spec, &sampled, u0.clone(), &settings).unwrap();
        let end = at.sol.powers.at_end();
        for k in 0..=20 {
            assert!((at.poly.coeffs[k] - u0.u0.last() * end[2 * k]).norm() < 1e-300 + 1e-15 * at.poly.coeffs[k].norm());
        }
        assert_eq!(at.poly.eval(ZERO), u0.u0.last());
        let mut best = at.roots.clone();
        best.sort_by(|a, b| a.lambda.norm().total_cmp(&b.lambda.norm()));
        assert!((best[0].lambda.re - 12.1871394680951).abs() < 1e-8);
    }

    #[test]
    fn conjugate_symmetry_for_real_problems() {
        let spec = ProblemSpec::new(0.0, 1.0).with_q(e("-1/x")).with_alpha(-1.0);
        let grid = Grid::new(1.0, 2000).unwrap();
        let sampled = spec.sample(grid).unwrap();
        let settings = Settings {
            n: 25,
            u0: U0Choice::Series,
            ..Settings::default()
        };
        let u0 = build_base_u0(&spec, &sampled, &settings).unwrap();
        let at = analyze_center(&spec, &sampled, u0, &settings).unwrap();
        for r in &at.roots {
            let has_mate = at
                .roots
                .iter()
                .any(|s| (s.lambda - r.lambda.conj()).norm() <= 1e-6 * (1.0 + r.lambda.norm()));
            assert!(has_mate, "{}", r.lambda);
        }
    }
}
