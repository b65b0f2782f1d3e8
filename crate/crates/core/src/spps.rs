//! Evaluation of the truncated series `u = u0 sum (lambda - lambda0)^k P(2k)`,
//! its derivative, truncation bounds and images of powers under the
//! transmutation operator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::grid::GridFunction;
use crate::powers::{FormalPowerSet, PowerKind};
use crate::usol::ParticularSolution;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone)]
pub struct SppsSolution {
    pub powers: FormalPowerSet,
    pub u0: ParticularSolution,
}

/// `sum_{k>N} z^k / k!` without cancellation.
pub fn exp_tail(z: f64, n: usize) -> f64 {
    series_tail(n, |k, prev| prev * z / k as f64, 1.0)
}

/// Sums `t_k` for `k > n`, with `t_0 = first` and `t_k = next(k, t_(k-1))`.
fn series_tail(n: usize, next: impl Fn(usize, f64) -> f64, first: f64) -> f64 {
    let mut t = first;
    for k in 1..=n {
        t = next(k, t);
    }
    let mut sum = 0.0;
    let mut k = n + 1;
    loop {
        let prev = t;
        t = next(k, t);
        if !t.is_finite() {
            return f64::INFINITY;
        }
        sum += t;
        // past the peak the terms decay faster than geometrically
        if (t <= 1e-17 * sum && t < prev) || t == 0.0 || k > n + 1_000_000 {
            break;
        }
        k += 1;
    }
    sum
}

impl SppsSolution {
    pub fn new(powers: FormalPowerSet, u0: ParticularSolution) -> Result<Self> {
        if powers.kind == PowerKind::Y {
            return Err(Error::Unsupported("the series needs X or Z powers, not Y".into()));
        }
        if powers.lambda0 != u0.lambda0 {
            return Err(Error::Unsupported(format!(
                "powers centered at {} but particular solution at {}",
                powers.lambda0, u0.lambda0
            )));
        }
        Ok(SppsSolution { powers, u0 })
    }

    pub fn order(&self) -> usize {
        self.powers.order
    }

    pub fn lambda0(&self) -> Complex64 {
        self.powers.lambda0
    }

    /// `(u, u')` at `lambda` on every node.
    pub fn evaluate(&self, lambda: Complex64) -> Result<(GridFunction, GridFunction)> {
        let n = self.order();
        let mu = lambda - self.lambda0();
        let grid = self.powers.grid().clone();
        let len = grid.len();
        let mut even = vec![ZERO; len];
        let mut odd = vec![ZERO; len];
        // Horner over k, nodewise
        for k in (0..=n).rev() {
            let pe = self.powers.powers[2 * k].values();
            for j in 0..len {
                even[j] = even[j] * mu + pe[j];
            }
            if k >= 1 {
                let po = self.powers.powers[2 * k - 1].values();
                for j in 0..len {
                    odd[j] = odd[j] * mu + po[j];
                }
            }
        }
        // odd now holds sum_{k>=1} mu^(k-1) P(2k-1)
        let u0 = self.u0.u0.values();
        let du0 = self.u0.du0.values();
        let p = self.powers.pfun.values();
        let mut u = vec![ZERO; len];
        let mut du = vec![ZERO; len];
        for j in 0..len {
            u[j] = u0[j] * even[j];
            du[j] = if j == 0 {
                du0[0]
            } else {
                du0[j] * even[j] - odd[j] * mu / (p[j] * u0[j])
            };
        }
        if let Some(j) = (0..len)
            .find(|&j| !(u[j].re.is_finite() && u[j].im.is_finite() && du[j].re.is_finite() && du[j].im.is_finite()))
        {
            return Err(Error::Nonconvergence(format!(
                "series overflow at x = {} for lambda = {lambda}; use a spectral shift closer to lambda",
                grid.nodes()[j]
            )));
        }
        Ok((
            GridFunction::from_raw(grid.clone(), u),
            GridFunction::from_raw(grid, du),
        ))
    }

    /// Bound on `|u(x) - u_N(x)|` at `lambda`. Uses the sharper estimate when
    /// `r1 = 0`.
    pub fn truncation_bound(&self, lambda: Complex64, x: f64) -> f64 {
        let mu = (lambda - self.lambda0()).norm();
        if mu == 0.0 {
            return 0.0;
        }
        let x = x.clamp(0.0, self.powers.grid().a());
        let umax = self.max_u0_upto(x);
        let l = self.powers.l;
        let n = self.order();
        let tail = match self.powers.constants.c_r1_zero {
            Some(c) => {
                let z = mu * c * c * x * x;
                series_tail(n, |k, prev| prev * z / (4.0 * k as f64 * (l + 0.5 + k as f64)), 1.0)
            }
            None => {
                let c = self.powers.constants.c;
                let z = mu * c * c * x;
                series_tail(n, |k, prev| prev * z / (2.0 * l + 1.0 + k as f64), 1.0)
            }
        };
        umax * tail
    }

    /// The looser general estimate `max|u0| (e^z - sum_{k<=N} z^k/k!)`,
    /// `z = C^2 |lambda - lambda0| x`.
    pub fn truncation_bound_exponential(&self, lambda: Complex64, x: f64) -> f64 {
        let mu = (lambda - self.lambda0()).norm();
        let x = x.clamp(0.0, self.powers.grid().a());
        let c = self.powers.constants.c;
        self.max_u0_upto(x) * exp_tail(c * c * mu * x, self.order())
    }

    fn max_u0_upto(&self, x: f64) -> f64 {
        let nodes = self.powers.grid().nodes();
        let v = self.u0.u0.values();
        let mut m = 0.0f64;
        for (t, u) in nodes.iter().zip(v) {
            if *t > x * (1.0 + 1e-15) {
                break;
            }
            m = m.max(u.norm());
        }
        m
    }

    /// `T[x^(2k+l+1)] = (-1)^k 2^(2k) k! (l+3/2)_k u0 X(2k)`.
    pub fn transmute_power(&self, k: usize) -> Result<GridFunction> {
        if !(self.powers.r0_one && self.powers.r1_zero) || self.lambda0() != ZERO {
            return Err(Error::Unsupported(
                "transmutation images need r0 = 1, r1 = 0 and unshifted powers".into(),
            ));
        }
        if k > self.order() {
            return Err(Error::Unsupported(format!(
                "k = {k} exceeds the computed order {}",
                self.order()
            )));
        }
        let l = self.powers.l;
        let mut factor = if k % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..k {
            factor *= 4.0 * (i + 1) as f64 * (l + 1.5 + i as f64);
        }
        let x2k = &self.powers.powers[2 * k];
        let vals: Vec<Complex64> = self
            .u0
            .u0
            .values()
            .iter()
            .zip(x2k.values())
            .map(|(u, x)| u * x * factor)
            .collect();
        Ok(GridFunction::from_raw(x2k.grid().clone(), vals))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::grid::Grid;
    use crate::powers::{compute_x, PowerOptions};
    use crate::problem::ProblemSpec;
    use crate::usol::build_u0_analytic;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn bessel(l: f64, n: usize, m: usize) -> SppsSolution {
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
        let powers = compute_x(&spec, &sampled, &u0, n, &PowerOptions::default()).unwrap();
        SppsSolution::new(powers, u0).unwrap()
    }

    #[test]
    fn evaluation_at_center_is_u0() {
        let s = bessel(0.5, 10, 100);
        let (u, du) = s.evaluate(ZERO).unwrap();
        assert_eq!(u, s.u0.u0);
        assert_eq!(du, s.u0.du0);
        assert_eq!(s.truncation_bound(ZERO, 1.0), 0.0);
    }

    #[test]
    fn half_integer_bessel_solution() {
        // l = 0: u = sin(sqrt(lambda) x) / sqrt(lambda)
        let s = bessel(0.0, 30, 1000);
        let lambda = Complex64::new(20.0, 3.0);
        let (u, du) = s.evaluate(lambda).unwrap();
        let k = lambda.sqrt();
        for (j, &x) in s.powers.grid().nodes().iter().enumerate() {
            let want = (k * x).sin() / k;
            let dwant = (k * x).cos();
            assert!((u.values()[j] - want).norm() < 1e-13, "x={x}");
            assert!((du.values()[j] - dwant).norm() < 1e-12, "x={x}");
        }
        assert_eq!(u.values()[0], ZERO);
    }

    #[test]
    fn bounds_are_monotone_and_valid() {
        let lo = bessel(0.5, 8, 500);
        let hi = bessel(0.5, 30, 500);
        let lambda = Complex64::new(30.0, -10.0);
        let (ul, _) = lo.evaluate(lambda).unwrap();
        let (uh, _) = hi.evaluate(lambda).unwrap();
        for (j, &x) in lo.powers.grid().nodes().iter().enumerate().step_by(25) {
            let diff = (ul.values()[j] - uh.values()[j]).norm();
            assert!(diff <= lo.truncation_bound(lambda, x) * (1.0 + 1e-9) + 1e-15);
            assert!(lo.truncation_bound(lambda, x) <= lo.truncation_bound_exponential(lambda, x) + 1e-300);
        }
        let mut prev = f64::INFINITY;
        for n in [2usize, 5, 10, 20] {
            let s = bessel(0.5, n, 50);
            let b = s.truncation_bound(lambda, 1.0);
            assert!(b <= prev);
            prev = b;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn transmutation_is_identity_without_potential() {
        let s = bessel(0.75, 12, 1000);
        for k in 0..=12 {
            let img = s.transmute_power(k).unwrap();
            for (j, &x) in s.powers.grid().nodes().iter().enumerate() {
                let want = x.powf(2.0 * k as f64 + 1.75);
                assert!(
                    (img.values()[j].re - want).abs() <= 1e-12 * want.max(1e-300),
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn exp_tail_matches_direct_sum() {
        let z: f64 = 3.0;
        let direct = z.exp() - (1.0 + z + z * z / 2.0);
        assert!((exp_tail(z, 2) - direct).abs() < 1e-14 * direct);
        assert_eq!(exp_tail(0.0, 3), 0.0);
    }
}
