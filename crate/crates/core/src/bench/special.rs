//! Gamma and Bessel functions used as oracles and for closed-form particular
//! solutions. Power series are summed in double-double arithmetic so the
//! cancellation in oscillatory ranges does not eat the result.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (poles return infinity).
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        return (1..(x as u64)).fold(1.0, |acc, k| acc * k as f64);
    }
    let x = x - 1.0;
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * s
}

/// Rising factorial `(x)_n`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x + i as f64))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let s = Dd::two_sum(s.hi, s.lo + t.hi);
        Dd::two_sum(s.hi, s.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::two_prod(self.hi, o.hi);
        let lo = p.lo + (self.hi * o.lo + self.lo * o.hi);
        Dd::two_sum(p.hi, lo)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::two_prod(q1, d).neg());
        let q2 = r.hi / d;
        Dd::two_sum(q1, q2)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    fn from(z: Complex64) -> Self {
        CDd {
            re: Dd::new(z.re),
            im: Dd::new(z.im),
        }
    }

    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn div_f64(self, d: f64) -> CDd {
        CDd {
            re: self.re.div_f64(d),
            im: self.im.div_f64(d),
        }
    }

    fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    fn norm_approx(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

/// `sum_k w^k / (k! (nu+1)_k)` in double-double.
fn bessel_series(nu: f64, w: Complex64) -> Result<Complex64> {
    let w = {
        // w itself is rounded once; carry it exactly from here on
        CDd::from(w)
    };
    let mut term = CDd::from(Complex64::new(1.0, 0.0));
    let mut sum = term;
    for k in 1..2000 {
        let kf = k as f64;
        term = term.mul(w).div_f64(kf).div_f64(kf + nu);
        sum = sum.add(term);
        if term.norm_approx() < 1e-34 * sum.norm_approx() || term.norm_approx() == 0.0 {
            return Ok(sum.value());
        }
    }
    Err(Error::Nonconvergence("Bessel series did not converge".into()))
}

/// `a_k(nu)` of the Hankel expansions.
fn hankel_coeffs(nu: f64, out: &mut [f64]) {
    let mu = 4.0 * nu * nu;
    out[0] = 1.0;
    for k in 1..out.len() {
        let odd = (2 * k - 1) as f64;
        out[k] = out[k - 1] * (mu - odd * odd) / (k as f64 * 8.0);
    }
}

/// `J_nu(x)` for `x >= 0` and `nu > -1`.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if x < 0.0 || nu <= -1.0 {
        return Err(Error::Unsupported("bessel_j needs x >= 0 and nu > -1".into()));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x < 25.0 {
        let s = bessel_series(nu, Complex64::new(-x * x / 4.0, 0.0))?;
        return Ok(s.re * (x / 2.0).powf(nu) / gamma(nu + 1.0));
    }
    let mut a = [0.0; 80];
    hankel_coeffs(nu, &mut a);
    let mut p = 0.0;
    let mut q = 0.0;
    let mut last = f64::INFINITY;
    for (k, &ak) in a.iter().enumerate() {
        let t = ak / x.powi(k as i32);
        if t.abs() > last {
            break;
        }
        last = t.abs();
        match k % 4 {
            0 => p += t,
            1 => q += t,
            2 => p -= t,
            _ => q -= t,
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    Ok((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// `I_nu(z)` for complex `z` (principal branch) and `nu > -1`.
pub fn bessel_i(nu: f64, z: Complex64) -> Result<Complex64> {
    if nu <= -1.0 {
        return Err(Error::Unsupported("bessel_i needs nu > -1".into()));
    }
    if z.norm() == 0.0 {
        return Ok(if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    if z.norm() < 35.0 {
        let s = bessel_series(nu, z * z / 4.0)?;
        return Ok(s * (z / 2.0).powf(nu) / gamma(nu + 1.0));
    }
    // two-exponential asymptotic form, valid uniformly in the principal sector
    let mut a = [0.0; 80];
    hankel_coeffs(nu, &mut a);
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for (k, &ak) in a.iter().enumerate() {
        let t = zk * ak;
        if t.norm() > last {
            break;
        }
        last = t.norm();
        s2 += t;
        s1 += if k % 2 == 0 { t } else { -t };
        zk /= z;
    }
    let pref = (2.0 * PI * z).sqrt().inv();
    let sign = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let rot = Complex64::new(0.0, sign) * Complex64::from_polar(1.0, sign * nu * PI);
    Ok(pref * (z.exp() * s1 + rot * (-z).exp() * s2))
}

/// `k`-th positive zero of `J_nu`.
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Unsupported("zeros are numbered from 1".into()));
    }
    let step = 0.05;
    let mut x = step;
    let mut fx = bessel_j(nu, x)?;
    let mut found = 0;
    while x < 1e5 {
        let y = x + step;
        let fy = bessel_j(nu, y)?;
        if fx == 0.0 || fx.signum() != fy.signum() {
            found += 1;
            if found == k {
                let (mut lo, mut hi, mut flo) = (x, y, fx);
                if fx == 0.0 {
                    return Ok(x);
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = bessel_j(nu, mid)?;
                    if fm == 0.0 {
                        return Ok(mid);
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(0.5 * (lo + hi));
            }
        }
        x = y;
        fx = fy;
    }
    Err(Error::Nonconvergence("zero scan range exhausted".into()))
}

/// Exact characteristic function of `-u'' + 2/x^2 u = lambda u'`, `u'(1) = 0`:
/// `-(2 e^(-lambda/2)/lambda) ((1+lambda) I_1(lambda/2) - lambda I_0(lambda/2))`.
pub fn exact_phi_ex6(lambda: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if lambda.norm() < 60.0 {
        // series of I_1(z)/z and I_0(z) with z = lambda/2; regular at 0
        let w = lambda * lambda / 16.0;
        let s1 = bessel_series(1.0, w)?;
        let s0 = bessel_series(0.0, w)?;
        return Ok(-2.0 * (-lambda / 2.0).exp() * ((one + lambda) * s1 / 4.0 - s0));
    }
    let z = lambda / 2.0;
    let i1 = bessel_i(1.0, z)?;
    let i0 = bessel_i(0.0, z)?;
    Ok(-(2.0 * (-z).exp() / lambda) * ((one + lambda) * i1 - lambda * i0))
}
