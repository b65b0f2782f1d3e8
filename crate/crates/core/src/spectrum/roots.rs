//! Simultaneous polynomial root finding (Aberth-Ehrlich).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const EPS: f64 = f64::EPSILON;

/// A root together with its backward residual
/// `|p(z)| / (max_k |c_k| max(1, |z|)^N)` in the scaled variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub z: Complex64,
    pub residual: f64,
    pub converged: bool,
}

/// Residual threshold on the normalized residual.
pub const RESIDUAL_TOL: f64 = 1e-13;

/// `p(z) / p'(z)` and `|p(z)|`, the value in double-double. For `|z| > 1`
/// the reversed polynomial is used so nothing overflows.
fn newton_step(c: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let n = c.len() - 1;
    if z.norm() <= 1.0 {
        let (p, dp) = horner_dd(n, |k| c[n - k], z);
        (p / dp, p.norm())
    } else {
        let y = z.inv();
        let (r, dr) = horner_dd(n, |k| c[k], y);
        // p'/p = (N - y r'/r) y
        let ratio = (Complex64::new(n as f64, 0.0) - y * dr / r) * y;
        (ratio.inv(), r.norm())
    }
}

/// Evaluates the normalized residual at `z`.
pub fn residual(c: &[Complex64], z: Complex64) -> f64 {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    newton_step(c, z).1 / scale
}

/// Error bound of the compensated Horner scheme, same normalization as
/// `residual`.
fn rounding_level(c: &[Complex64], z: Complex64) -> f64 {
    let n = c.len() - 1;
    let a = z.norm();
    let mut s = 0.0;
    if a <= 1.0 {
        for k in (0..=n).rev() {
            s = s * a + c[k].norm();
        }
    } else {
        let y = 1.0 / a;
        for k in 0..=n {
            s = s * y + c[k].norm();
        }
    }
    let g = 4.0 * (n as f64 + 1.0) * EPS;
    g * g * s
}

/// Double-double number `hi + lo`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// Exact product `a b = p + e` (Dekker).
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    fn new(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn mul_f(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::new(p, e + self.lo * b)
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        Dd::new(s, e + self.lo + o.lo)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// Horner's scheme over `coef(0), coef(1), .., coef(n)` (leading first):
/// the value in twice the working precision, the derivative in working
/// precision.
fn horner_dd(n: usize, coef: impl Fn(usize) -> Complex64, z: Complex64) -> (Complex64, Complex64) {
    let lead = coef(0);
    let mut re = Dd { hi: lead.re, lo: 0.0 };
    let mut im = Dd { hi: lead.im, lo: 0.0 };
    let mut dp = ZERO;
    for k in 1..=n {
        let ck = coef(k);
        dp = dp * z + Complex64::new(re.hi, im.hi);
        let nr = re.mul_f(z.re).add(im.mul_f(z.im).neg()).add(Dd { hi: ck.re, lo: 0.0 });
        let ni = re.mul_f(z.im).add(im.mul_f(z.re)).add(Dd { hi: ck.im, lo: 0.0 });
        re = nr;
        im = ni;
    }
    (Complex64::new(re.hi + re.lo, im.hi + im.lo), dp)
}

fn eval_compensated(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let n = c.len() - 1;
    horner_dd(n, |k| c[n - k], z)
}

/// Newton refinement of a root of `sum c_k z^k` with the value computed in
/// double-double, for polynomials whose evaluation cancels many digits near
/// the root. Returns `None` if the iteration leaves the disk of radius
/// `reach` around `z0` or produces non-finite values.
pub fn polish(c: &[Complex64], z0: Complex64, reach: f64) -> Option<Complex64> {
    if c.len() < 2 {
        return Some(z0);
    }
    let mut z = z0;
    let mut best = eval_compensated(c, z).0.norm();
    for _ in 0..10 {
        let (p, dp) = eval_compensated(c, z);
        if p == ZERO {
            break;
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        let cand = z - step;
        let val = eval_compensated(c, cand).0.norm();
        if !val.is_finite() || val > best {
            break;
        }
        best = val;
        z = cand;
        if step.norm() <= 2.0 * EPS * z.norm() {
            break;
        }
    }
    ((z - z0).norm() < reach && z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Initial guesses from the upper convex hull of `(k, ln|c_k|)`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(k, v)| (k as f64, v.norm().ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut z = Vec::with_capacity(n);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (i, j) = (w[0].0 as usize, w[1].0 as usize);
        let m = j - i;
        let r = ((w[0].1 - w[1].1) / m as f64).exp();
        for t in 0..m {
            let th = 2.0 * PI * t as f64 / m as f64 + 2.0 * PI * i as f64 / n as f64 + sigma;
            z.push(Complex64::from_polar(r, th));
        }
    }
    z
}

/// All roots of `sum c_k z^k`. Exact zero leading coefficients are dropped
/// and exact zero roots split off first.
pub fn aberth(c: &[Complex64], max_iter: usize) -> Vec<Root> {
    let mut hi = c.len();
    while hi > 0 && c[hi - 1] == ZERO {
        hi -= 1;
    }
    if hi <= 1 {
        return Vec::new();
    }
    let mut lo = 0;
    while c[lo] == ZERO {
        lo += 1;
    }
    let mut roots: Vec<Root> = (0..lo)
        .map(|_| Root {
            z: ZERO,
            residual: 0.0,
            converged: true,
        })
        .collect();
    let scale = c[lo..hi].iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let p: Vec<Complex64> = c[lo..hi].iter().map(|v| v / scale).collect();
    let n = p.len() - 1;
    if n == 0 {
        return roots;
    }
    if n == 1 {
        let z = -p[0] / p[1];
        roots.push(Root {
            z,
            residual: residual(&p, z),
            converged: true,
        });
        return roots;
    }
    let mut z = initial_guesses(&p);
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (w, res) = newton_step(&p, z[i]);
            if res <= rounding_level(&p, z[i]) {
                done[i] = true;
                continue;
            }
            let mut s = ZERO;
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                if step.norm() <= 2.0 * EPS * z[i].norm() {
                    done[i] = true;
                }
            } else {
                // perturb out of a coincidence
                z[i] *= Complex64::new(1.0 + 1e-8, 1e-8);
            }
            all = false;
        }
        if all {
            break;
        }
    }
    // two Newton polishing steps
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (w, res) = newton_step(&p, *zi);
            if res == 0.0 || !(w.re.is_finite() && w.im.is_finite()) {
                break;
            }
            let cand = *zi - w;
            if newton_step(&p, cand).1 <= res {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    for zi in z {
        let r = residual(&p, zi);
        roots.push(Root {
            z: zi,
            residual: r,
            converged: r <= RESIDUAL_TOL,
        });
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn expand(roots: &[Complex64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![ZERO; c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                next[k + 1] += v;
                next[k] -= v * r;
            }
            c = next;
        }
        c
    }

    fn matches(found: &[Root], want: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; found.len()];
        want.iter().all(|w| {
            let best = (0..found.len())
                .filter(|&i| !used[i])
                .min_by(|&a, &b| (found[a].z - w).norm().total_cmp(&(found[b].z - w).norm()));
            match best {
                Some(i) if (found[i].z - w).norm() <= tol * (1.0 + w.norm()) => {
                    used[i] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn quadratic() {
        let c = [Complex64::new(-1.0, 0.0), ZERO, Complex64::new(1.0, 0.0)];
        let r = aberth(&c, 200);
        assert!(matches(
            &r,
            &[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            1e-15
        ));
    }

    #[test]
    fn constructed_quintic() {
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(3.0, 4.0),
            Complex64::new(0.0, -1.0),
        ];
        let r = aberth(&expand(&want), 500);
        assert_eq!(r.len(), 5);
        assert!(matches(&r, &want, 1e-12));
        assert!(r.iter().all(|x| x.converged));
    }

    #[test]
    fn zero_roots_and_trailing_zeros() {
        let c = [
            ZERO,
            ZERO,
            Complex64::new(-4.0, 0.0),
            ZERO,
            Complex64::new(1.0, 0.0),
            ZERO,
        ];
        let r = aberth(&c, 200);
        assert_eq!(r.len(), 4);
        let want = [ZERO, ZERO, Complex64::new(2.0, 0.0), Complex64::new(-2.0, 0.0)];
        assert!(matches(&r, &want, 1e-14));
    }

    #[test]
    fn widely_spread_magnitudes() {
        let want: Vec<Complex64> = (0..12)
            .map(|k| Complex64::new(10f64.powi(k - 4), 0.5 * k as f64))
            .collect();
        let r = aberth(&expand(&want), 1000);
        assert!(matches(&r, &want, 1e-9));
    }

    proptest! {
        #[test]
        fn recovers_random_roots(re in proptest::collection::vec(-5.0f64..5.0, 2..12), seed in 0u64..1000) {
            let want: Vec<Complex64> = re.iter().enumerate()
                .map(|(k, &x)| Complex64::new(x, ((seed as f64 + 1.7 * k as f64).sin()) * 4.0))
                .collect();
            let found = aberth(&expand(&want), 1000);
            prop_assert_eq!(found.len(), want.len());
            for r in &found {
                prop_assert!(r.residual <= RESIDUAL_TOL);
            }
        }
    }
}
