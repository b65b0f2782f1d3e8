//! Literals in and numbers out.

use spps_core::Complex64;

use crate::{CliError, Result};

/// Significant digits of every printed value.
pub const DIGITS: usize = 15;

/// `v` with [`DIGITS`] significant digits; fixed notation for moderate
/// magnitudes, scientific otherwise.
pub fn sig(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let e = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&e) {
        return format!("{:.*e}", DIGITS - 1, v);
    }
    let dec = (DIGITS as i32 - 1 - e).max(0) as usize;
    let s = format!("{:.*}", dec, v);
    // rounding can carry into an extra leading digit (9.99.. -> 10.0..)
    if dec > 0 && significant_digits(&s) > DIGITS {
        format!("{:.*}", dec - 1, v)
    } else {
        s
    }
}

fn significant_digits(s: &str) -> usize {
    s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count()
}

/// `a+bi` form, or just `a` when the imaginary part is zero.
pub fn complex(z: Complex64) -> String {
    if z.im == 0.0 {
        return sig(z.re);
    }
    let im = sig(z.im.abs());
    let sign = if z.im < 0.0 { '-' } else { '+' };
    if z.re == 0.0 {
        format!("{}{im}i", if z.im < 0.0 { "-" } else { "" })
    } else {
        format!("{}{sign}{im}i", sig(z.re))
    }
}

/// Shortest round-trip form, for inputs such as shift centers.
pub fn short(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format!("{}", z.re),
        (true, false) => format!("{}i", z.im),
        (false, false) => format!("{}{}{}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs()),
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; `j` is accepted for `i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::parse(format!("bad complex literal `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that does not belong to an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// `"s,d"` as a pair of reals.
pub fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let bad = || CliError::parse(format!("expected `s,d`, got `{text}`"));
    let (s, d) = text.split_once(',').ok_or_else(bad)?;
    let s = s.trim().parse::<f64>().map_err(|_| bad())?;
    let d = d.trim().parse::<f64>().map_err(|_| bad())?;
    Ok((s, d))
}

/// `"1,3,5..8"` as a sorted list of positive indices.
pub fn parse_indices(text: &str) -> Result<Vec<usize>> {
    let bad = || CliError::parse(format!("bad index list `{text}`"));
    let one = |t: &str| t.trim().parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(bad);
    let mut out = Vec::new();
    for part in text.split(',') {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let hi = hi.strip_prefix('=').unwrap_or(hi);
                let (lo, hi) = (one(lo)?, one(hi)?);
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(one(part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(sig(12.1871394680951), "12.1871394680951");
        assert_eq!(sig(24797.222775294), "24797.2227752940");
        assert_eq!(sig(-0.5), "-0.500000000000000");
        assert_eq!(sig(9.9999999999999999), "10.0000000000000");
        assert_eq!(sig(1.5e-9), "1.50000000000000e-9");
        assert_eq!(sig(0.0), "0");
    }

    #[test]
    fn complex_literals() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("0.5i").unwrap(), c(0.0, 0.5));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("50+2i").unwrap(), c(50.0, 2.0));
        assert_eq!(parse_complex("1e-3 - 2.5E+2j").unwrap(), c(1e-3, -250.0));
        assert_eq!(parse_complex("-1e-3-i").unwrap(), c(-1e-3, -1.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn complex_round_trip() {
        for z in [
            Complex64::new(4.47123493371, 6.7648174748),
            Complex64::new(0.0, -1.0),
            Complex64::new(3.0, -0.25),
        ] {
            let back = parse_complex(&complex(z)).unwrap();
            assert!((back - z).norm() <= 1e-14 * z.norm());
        }
    }

    #[test]
    fn short_form() {
        assert_eq!(short(Complex64::new(50.0, 2.0)), "50+2i");
        assert_eq!(short(Complex64::new(0.0, -1.0)), "-1i");
        assert_eq!(short(Complex64::new(0.0, 0.0)), "0");
        assert_eq!(
            parse_complex(&short(Complex64::new(1.25, -0.5))).unwrap(),
            Complex64::new(1.25, -0.5)
        );
    }

    #[test]
    fn index_lists() {
        assert_eq!(parse_indices("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_indices("5,1..=2,2").unwrap(), vec![1, 2, 5]);
        assert!(parse_indices("0").is_err());
        assert!(parse_indices("3..1").is_err());
        assert_eq!(parse_pair("50, 2").unwrap(), (50.0, 2.0));
    }
}
