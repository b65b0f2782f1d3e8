//! Uniform grids and sixth-order cumulative integration.
//!
//! Nodes are grouped into six-point panels `[5p, 5p+5]` that share endpoints.
//! Inside a panel the integrand is replaced by its degree-5 interpolant and the
//! interpolant is integrated exactly up to every node, which gives the
//! indefinite integral at all nodes, not only at panel ends. Panels are
//! chained with compensated summation.
//!
//! Integrands that behave like `t^kappa g(t)` at the origin (with `kappa > -1`,
//! possibly unbounded) are handled by product integration: `g` is
//! interpolated and `t^kappa` is integrated exactly on the first panel
//! (through nodes `1..=6`, so node 0 is never read) and by Gauss-Legendre on
//! the following panels, as long as `t^kappa` is steep on the panel scale.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Cumulative Newton-Cotes weights: row `j` integrates the six Lagrange basis
/// polynomials of the panel from the panel start to node `j`, in units of
/// `h / 1440`.
const PANEL_WEIGHTS: [[f64; 6]; 5] = [
    [475.0, 1427.0, -798.0, 482.0, -173.0, 27.0],
    [448.0, 2064.0, 224.0, 224.0, -96.0, 16.0],
    [459.0, 1971.0, 1026.0, 1026.0, -189.0, 27.0],
    [448.0, 2048.0, 768.0, 2048.0, 448.0, 0.0],
    [475.0, 1875.0, 1250.0, 1250.0, 1875.0, 475.0],
];
const PANEL_DENOM: f64 = 1440.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    m: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    /// `m + 1` equally spaced nodes on `[0, a]`; `m` must be a positive
    /// multiple of 5.
    pub fn new(a: f64, m: usize) -> Result<Arc<Grid>> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Grid(format!("endpoint must be positive and finite, got {a}")));
        }
        if m == 0 || m % 5 != 0 {
            return Err(Error::Grid(format!(
                "node count M = {m} must be a positive multiple of 5"
            )));
        }
        let mf = m as f64;
        let nodes = (0..=m).map(|j| a * (j as f64 / mf)).collect();
        Ok(Arc::new(Grid { a, m, h: a / mf, nodes }))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Complex samples on a grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl PartialEq for GridFunction {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid) && self.values == other.values
    }
}

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || (a.a == b.a && a.m == b.m)
}

/// Pointwise binary operation selector for [`GridFunction::pointwise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Right-hand side of a pointwise operation.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Function(&'a GridFunction),
    Scalar(Complex64),
}

/// Result of a pointwise operation. `flagged` lists nodes where a division
/// denominator underflowed; their values are set to zero and the caller is
/// expected to substitute the correct limit.
#[derive(Debug, Clone)]
pub struct Pointwise {
    pub value: GridFunction,
    pub flagged: Vec<usize>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} samples for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Grid(format!("non-finite sample at node {j}")));
        }
        Ok(GridFunction { grid, values })
    }

    /// Unchecked constructor for internal hot paths.
    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        GridFunction { grid, values }
    }

    pub fn constant(grid: Arc<Grid>, c: Complex64) -> Self {
        let values = vec![c; grid.len()];
        GridFunction { grid, values }
    }

    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn last(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Nodewise arithmetic with underflow flagging on division.
    pub fn pointwise(&self, op: PointwiseOp, rhs: Operand<'_>) -> Result<Pointwise> {
        let rhs_at = |j: usize| match rhs {
            Operand::Function(g) => g.values[j],
            Operand::Scalar(c) => c,
        };
        if let Operand::Function(g) = rhs {
            if !same_grid(&self.grid, &g.grid) {
                return Err(Error::Grid("operands live on different grids".into()));
            }
        }
        let mut flagged = Vec::new();
        let values = (0..self.values.len())
            .map(|j| {
                let a = self.values[j];
                let b = rhs_at(j);
                match op {
                    PointwiseOp::Add => a + b,
                    PointwiseOp::Sub => a - b,
                    PointwiseOp::Mul => a * b,
                    PointwiseOp::Div => {
                        if b.norm() < f64::MIN_POSITIVE {
                            flagged.push(j);
                            Complex64::new(0.0, 0.0)
                        } else {
                            a / b
                        }
                    }
                }
            })
            .collect();
        Ok(Pointwise {
            value: GridFunction {
                grid: self.grid.clone(),
                values,
            },
            flagged,
        })
    }

    /// `F(x_j) = int_0^{x_j} f`, using the sample at node 0.
    pub fn cumulative_integral(&self) -> GridFunction {
        let mut out = Vec::new();
        cumulative_into(&self.values, self.grid.h, None, &mut out);
        GridFunction {
            grid: self.grid.clone(),
            values: out,
        }
    }

    /// Cumulative integral of an integrand behaving like `t^kappa` at the
    /// origin. The node-0 sample is ignored.
    pub fn cumulative_integral_singular(&self, kappa: f64) -> Result<GridFunction> {
        if !(kappa > -1.0) {
            return Err(Error::Grid(format!("leading exponent {kappa} is not integrable")));
        }
        if self.grid.m < 10 {
            return Err(Error::Grid("product integration needs M >= 10".into()));
        }
        let mut out = Vec::new();
        let w = FirstPanel::new(kappa);
        cumulative_into(&self.values, self.grid.h, Some(&w), &mut out);
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: out,
        })
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&GridFunction> for &GridFunction {
            type Output = GridFunction;
            fn $method(self, rhs: &GridFunction) -> GridFunction {
                assert!(same_grid(&self.grid, &rhs.grid), "grid mismatch");
                GridFunction {
                    grid: self.grid.clone(),
                    values: self.values.iter().zip(&rhs.values).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr<Complex64> for &GridFunction {
            type Output = GridFunction;
            fn $method(self, rhs: Complex64) -> GridFunction {
                self.map(|a| a $op rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|a| -a)
    }
}

/// Product-integration weights for `t^kappa g(t)`.
///
/// On the first panel `g` is interpolated through nodes 1..=6 (row `j - 1`
/// gives `F(x_j) / h` from `f(x_1) .. f(x_6)`). On the next panels, while
/// `t^kappa` is too steep for plain Newton-Cotes, `g` is interpolated through
/// the panel's own nodes and `t^kappa` is integrated by composite
/// Gauss-Legendre. Weights are stored as ratios `(t / t_i)^kappa` so they
/// multiply the samples `f(t_i)` directly and nothing underflows.
#[derive(Debug, Clone)]
pub(crate) struct FirstPanel {
    w: [[f64; 6]; 5],
    later: Vec<[[f64; 6]; 5]>,
}

/// Product weights are used on panel `p` while `kappa / (5p) > STEEP`.
const STEEP: f64 = 0.01;

impl FirstPanel {
    pub(crate) fn new(kappa: f64) -> Self {
        Self::with_limit(kappa, usize::MAX)
    }

    /// Weights for at most `max_panels` panels in total.
    pub(crate) fn with_limit(kappa: f64, max_panels: usize) -> Self {
        let mut w = [[0.0; 6]; 5];
        for (i, node) in (1..=6).enumerate() {
            // Lagrange basis for node `node` over {1..6}, monomial coefficients
            let mut poly = [0.0f64; 6];
            poly[0] = 1.0;
            let mut deg = 0;
            let mut denom = 1.0;
            for other in 1..=6 {
                if other == node {
                    continue;
                }
                // multiply by (s - other)
                for k in (0..=deg).rev() {
                    poly[k + 1] += poly[k];
                    poly[k] *= -(other as f64);
                }
                deg += 1;
                denom *= (node - other) as f64;
            }
            for (jrow, row) in w.iter_mut().enumerate() {
                let j = (jrow + 1) as f64;
                // Taylor coefficients of the basis polynomial about s = j
                let mut shifted = poly;
                for k in 0..6 {
                    for r in (k..5).rev() {
                        shifted[r] += j * shifted[r + 1];
                    }
                }
                // int_0^j s^kappa (s - j)^m ds = (-1)^m j^(kappa+m+1) m! / prod_{r=1}^{m+1} (kappa + r)
                let mut acc = 0.0;
                let mut ratio = 1.0 / (kappa + 1.0);
                let jk = j.powf(kappa + 1.0);
                let mut jm = 1.0;
                for (m, c) in shifted.iter().enumerate() {
                    if m > 0 {
                        ratio *= -(m as f64) / (kappa + m as f64 + 1.0);
                        jm *= j;
                    }
                    acc += c * ratio * jm;
                }
                // divide by node^kappa: samples are f = t^kappa g
                row[i] = jk * acc / denom / (node as f64).powf(kappa);
            }
        }
        let mut later = Vec::new();
        if kappa != 0.0 {
            let rules = [gauss_legendre(8), gauss_legendre(12), gauss_legendre(20)];
            let mut p = 1;
            while p < max_panels && kappa.abs() / (5.0 * p as f64) > STEEP {
                later.push(panel_product_weights(kappa, 5.0 * p as f64, &rules));
                p += 1;
            }
        }
        FirstPanel { w, later }
    }
}

/// Product weights shared between integrations with the same exponent.
#[derive(Debug, Default)]
pub(crate) struct WeightCache {
    entries: Vec<(u64, usize, Arc<FirstPanel>)>,
}

impl WeightCache {
    pub(crate) fn get(&mut self, kappa: f64, max_panels: usize) -> Arc<FirstPanel> {
        let key = kappa.to_bits();
        if let Some((_, _, w)) = self.entries.iter().find(|(k, m, _)| *k == key && *m == max_panels) {
            return w.clone();
        }
        let w = Arc::new(FirstPanel::with_limit(kappa, max_panels));
        self.entries.push((key, max_panels, w.clone()));
        w
    }
}

/// Lagrange basis over `0..=5` at `u`.
fn lagrange6(u: f64) -> [f64; 6] {
    const DENOM: [f64; 6] = [-120.0, 24.0, -12.0, 12.0, -24.0, 120.0];
    let mut out = [0.0; 6];
    for (i, o) in out.iter_mut().enumerate() {
        let mut v = 1.0;
        for k in 0..6 {
            if k != i {
                v *= u - k as f64;
            }
        }
        *o = v / DENOM[i];
    }
    out
}

/// `int_0^j ((c+u)/(c+i))^kappa L_i(u) du` for `j = 1..=5`.
fn panel_product_weights(kappa: f64, c: f64, rules: &[(Vec<f64>, Vec<f64>); 3]) -> [[f64; 6]; 5] {
    // the weight varies like e^(rate u); split unit steps so rate * len <= 4
    let rate = kappa.abs() / c;
    let sub = ((rate / 4.0).ceil() as usize).max(1);
    let (gx, gw) = match rate {
        r if r <= 0.1 => &rules[0],
        r if r <= 1.0 => &rules[1],
        _ => &rules[2],
    };
    let len = 1.0 / sub as f64;
    let mid = (c + 2.5).ln();
    // (c+u)^kappa / (c+i)^kappa = e^(kappa (ln(c+u) - mid)) * e^(kappa (mid - ln(c+i)))
    let rel: [f64; 6] = core::array::from_fn(|i| (kappa * (mid - (c + i as f64).ln())).exp());
    let mut w = [[0.0; 6]; 5];
    let mut acc = [0.0; 6];
    for j in 0..5 {
        for s in 0..sub {
            let lo = j as f64 + s as f64 * len;
            for (&x, &wt) in gx.iter().zip(gw) {
                let u = lo + 0.5 * len * (x + 1.0);
                let e = 0.5 * len * wt * (kappa * ((c + u).ln() - mid)).exp();
                let basis = lagrange6(u);
                for i in 0..6 {
                    acc[i] += e * rel[i] * basis[i];
                }
            }
        }
        w[j] = acc;
    }
    w
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy)]
struct Accumulator {
    re: f64,
    im: f64,
    cre: f64,
    cim: f64,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            re: 0.0,
            im: 0.0,
            cre: 0.0,
            cim: 0.0,
        }
    }

    #[inline]
    fn add(&mut self, v: Complex64) {
        let (s, e) = two_sum(self.re, v.re);
        self.re = s;
        self.cre += e;
        let (s, e) = two_sum(self.im, v.im);
        self.im = s;
        self.cim += e;
    }

    #[inline]
    fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.cre, self.im + self.cim)
    }
}

/// Core cumulative integration over raw slices.
pub(crate) fn cumulative_into(f: &[Complex64], h: f64, first: Option<&FirstPanel>, out: &mut Vec<Complex64>) {
    let m = f.len() - 1;
    debug_assert!(m % 5 == 0);
    out.clear();
    out.reserve(f.len());
    let scale = h / PANEL_DENOM;
    let mut acc = Accumulator::new();
    out.push(Complex64::new(0.0, 0.0));
    let mut start_panel = 0;
    if let Some(fp) = first {
        for row in &fp.w {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..6 {
                s += f[i + 1] * row[i];
            }
            out.push(s * h);
        }
        acc.add(out[5]);
        start_panel = 1;
    }
    for p in start_panel..m / 5 {
        let b = 5 * p;
        let seg = &f[b..b + 6];
        let base = acc.value();
        let mut last = Complex64::new(0.0, 0.0);
        let (rows, sc) = match first.and_then(|fp| fp.later.get(p - 1)) {
            Some(w) => (w, h),
            None => (&PANEL_WEIGHTS, scale),
        };
        for row in rows.iter() {
            let mut re = 0.0;
            let mut im = 0.0;
            for i in 0..6 {
                re += seg[i].re * row[i];
                im += seg[i].im * row[i];
            }
            let inc = Complex64::new(re * sc, im * sc);
            out.push(base + inc);
            last = inc;
        }
        acc.add(last);
        out[b + 5] = acc.value();
    }
}
