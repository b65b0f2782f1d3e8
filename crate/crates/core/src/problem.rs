//! Problem definition: `-u'' + (l(l+1)/x^2 + q) u = lambda (r1 u' + r0 u)` on
//! `(0, a]` with `beta u(a) + gamma u'(a) = 0`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::expr::Expr;
use crate::grid::{Grid, GridFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub l: f64,
    pub a: f64,
    pub q: Expr,
    pub r0: Expr,
    pub r1: Expr,
    /// Declared growth exponent: `|q(x)| <= C x^alpha` near 0.
    pub alpha: f64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

/// Outcome of [`ProblemSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Mesh estimate of `sup |q(x)| x^(-alpha)`.
    pub growth_constant: f64,
    /// `q` is real and nonnegative on the validation mesh.
    pub q_nonnegative: bool,
    /// Infimum of `q` on the mesh when `q` is real there.
    pub q_lower_bound: Option<f64>,
    /// `q`, `r0`, `r1`, `beta`, `gamma` all real on the mesh.
    pub real_coefficients: bool,
}

impl ProblemSpec {
    /// Unperturbed Bessel problem with Dirichlet condition at `a`; refine it with
    /// the `with_*` builders.
    pub fn new(l: f64, a: f64) -> Self {
        ProblemSpec {
            l,
            a,
            q: Expr::constant(0.0),
            r0: Expr::constant(1.0),
            r1: Expr::constant(0.0),
            alpha: 0.0,
            beta: Complex64::new(1.0, 0.0),
            gamma: Complex64::new(0.0, 0.0),
        }
    }

    pub fn with_q(mut self, q: Expr) -> Self {
        self.q = q;
        self
    }

    pub fn with_r0(mut self, r0: Expr) -> Self {
        self.r0 = r0;
        self
    }

    pub fn with_r1(mut self, r1: Expr) -> Self {
        self.r1 = r1;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_boundary(mut self, beta: Complex64, gamma: Complex64) -> Self {
        self.beta = beta;
        self.gamma = gamma;
        self
    }

    pub fn r1_is_zero(&self) -> bool {
        self.r1.is_zero()
    }

    pub fn r0_is_one(&self) -> bool {
        self.r0.as_constant() == Some(Complex64::new(1.0, 0.0))
    }

    pub fn q_is_zero(&self) -> bool {
        self.q.is_zero()
    }

    /// Checks the structural invariants and estimates the growth constant of
    /// `q`. Evaluation never touches `x = 0`.
    pub fn validate(&self) -> Result<ValidationReport> {
        if !self.l.is_finite() || self.l < -0.5 {
            return Err(Error::validation("l", format!("l below -1/2 (got {})", self.l)));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::validation(
                "a",
                format!("endpoint must be positive (got {})", self.a),
            ));
        }
        if !self.alpha.is_finite() || self.alpha <= -2.0 {
            return Err(Error::validation(
                "alpha",
                format!("alpha must exceed -2 (got {})", self.alpha),
            ));
        }
        if self.beta.norm() + self.gamma.norm() == 0.0 || !finite(self.beta) || !finite(self.gamma) {
            return Err(Error::validation(
                "beta/gamma",
                "boundary pair must be finite and not both zero",
            ));
        }

        // Logarithmic mesh toward the origin plus a uniform mesh over (0, a].
        let mut mesh: Vec<f64> = (1..=48).map(|j| self.a * 10f64.powf(-(j as f64) / 4.0)).collect();
        mesh.extend((1..=400).map(|j| self.a * j as f64 / 400.0));

        let mut growth = 0.0f64;
        let mut near_zero = 0.0f64;
        let mut real = finite_real(self.beta) && finite_real(self.gamma);
        let mut q_min = f64::INFINITY;
        for &x in &mesh {
            let q = self.q.eval(x).map_err(|e| Error::validation("q", format!("{e}")))?;
            let r0 = self.r0.eval(x).map_err(|e| Error::validation("r0", format!("{e}")))?;
            let r1 = self.r1.eval(x).map_err(|e| Error::validation("r1", format!("{e}")))?;
            if q.im != 0.0 || r0.im != 0.0 || r1.im != 0.0 {
                real = false;
            }
            q_min = q_min.min(q.re);
            let g = q.norm() * x.powf(-self.alpha);
            growth = growth.max(g);
            if x < self.a * 1e-8 {
                near_zero = near_zero.max(g);
            }
        }
        let q_real = mesh
            .iter()
            .all(|&x| self.q.eval(x).map(|v| v.im == 0.0).unwrap_or(false));
        // the smallest scales must not dominate the rest by orders of magnitude
        let body = mesh
            .iter()
            .filter(|&&x| x >= self.a * 1e-3)
            .map(|&x| self.q.eval(x).map(|v| v.norm() * x.powf(-self.alpha)).unwrap_or(0.0))
            .fold(0.0f64, f64::max);
        if near_zero > 1e4 * body.max(1.0) {
            return Err(Error::validation(
                "alpha",
                format!("|q(x)| x^(-alpha) is unbounded near 0 (reaches {near_zero:e}); declared alpha too large"),
            ));
        }
        Ok(ValidationReport {
            growth_constant: growth,
            q_nonnegative: q_real && q_min >= 0.0,
            q_lower_bound: q_real.then_some(q_min),
            real_coefficients: real,
        })
    }

    /// Samples the coefficients on a grid.
    pub fn sample(&self, grid: Arc<Grid>) -> Result<SampledProblem> {
        let q = sample_expr(&self.q, "q", &grid)?;
        let r0 = sample_expr(&self.r0, "r0", &grid)?;
        let r1 = sample_expr(&self.r1, "r1", &grid)?;
        let x_lp1 = grid.nodes().iter().map(|t| t.powf(self.l + 1.0)).collect();
        Ok(SampledProblem {
            x_lp1,
            grid,
            q,
            r0,
            r1,
            r1_zero: self.r1_is_zero(),
        })
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn finite_real(z: Complex64) -> bool {
    finite(z) && z.im == 0.0
}

/// Node 0 receives the value at the origin when defined and zero otherwise;
/// the integrators never read it for singular integrands.
fn sample_expr(e: &Expr, name: &'static str, grid: &Arc<Grid>) -> Result<GridFunction> {
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    values.push(e.eval(0.0).unwrap_or(Complex64::new(0.0, 0.0)));
    for &x in &nodes[1..] {
        values.push(e.eval(x).map_err(|err| Error::validation(name, format!("{err}")))?);
    }
    Ok(GridFunction::from_raw(grid.clone(), values))
}

/// Coefficients of a problem sampled on a grid.
#[derive(Debug, Clone)]
pub struct SampledProblem {
    pub grid: Arc<Grid>,
    pub q: GridFunction,
    pub r0: GridFunction,
    pub r1: GridFunction,
    pub r1_zero: bool,
    /// `x^(l+1)` at every node.
    pub x_lp1: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn rejects_bad_fields() {
        let err = ProblemSpec::new(-0.75, 1.0).validate().unwrap_err();
        assert!(matches!(err, Error::Validation { field: "l", .. }));
        assert!(format!("{err}").contains("below -1/2"));

        let err = ProblemSpec::new(0.0, 1.0)
            .with_q(e("5/16/x^2"))
            .with_alpha(-2.0)
            .validate()
            .unwrap_err();
        assert!(matches!(err, Error::Validation { field: "alpha", .. }));
        assert!(format!("{err}").contains("must exceed -2"));

        let zero = Complex64::new(0.0, 0.0);
        let err = ProblemSpec::new(0.0, 1.0)
            .with_boundary(zero, zero)
            .validate()
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Validation {
                field: "beta/gamma",
                ..
            }
        ));
        assert!(ProblemSpec::new(0.0, -1.0).validate().is_err());
    }

    #[test]
    fn boyd_growth_constant() {
        let p = ProblemSpec::new(0.0, 1.0).with_q(e("-1/x")).with_alpha(-1.0);
        let r = p.validate().unwrap();
        assert!((r.growth_constant - 1.0).abs() < 1e-12);
        assert!(!r.q_nonnegative);
        assert!(r.q_lower_bound.unwrap() < -1e11);
        assert!(r.real_coefficients);
    }

    #[test]
    fn detects_understated_singularity() {
        let p = ProblemSpec::new(0.0, 1.0).with_q(e("1/x")).with_alpha(0.0);
        assert!(matches!(p.validate(), Err(Error::Validation { field: "alpha", .. })));
    }

    #[test]
    fn validate_is_deterministic() {
        let p = ProblemSpec::new(1.0, 3.0).with_q(e("sin(x)")).with_alpha(1.0);
        let a = p.validate().unwrap();
        assert_eq!(a, p.validate().unwrap());
        assert!(a.q_nonnegative);
        assert!((a.growth_constant - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sampling_skips_the_pole() {
        let g = Grid::new(1.0, 10).unwrap();
        let p = ProblemSpec::new(0.0, 1.0).with_q(e("-1/x")).with_alpha(-1.0);
        let s = p.sample(g).unwrap();
        assert_eq!(s.q.values()[0], Complex64::new(0.0, 0.0));
        assert!((s.q.values()[10].re + 1.0).abs() < 1e-15);
        assert!(s.r1_zero);
    }
}
