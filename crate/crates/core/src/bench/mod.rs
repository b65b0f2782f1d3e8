//! Built-in benchmark problems with reference eigenvalues.

pub mod special;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::expr::Expr;
use crate::problem::ProblemSpec;
use crate::spectrum::{solve, EigenResult, Settings, Strategy, U0Choice, U0Fn};
use crate::Result;

pub use special::{bessel_i, bessel_j, bessel_zero, exact_phi_ex6, gamma, pochhammer};

/// Which quantity a reference table lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Lambda,
    SqrtLambda,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub n: usize,
    pub value: Complex64,
    pub source: &'static str,
    pub tol: Tolerance,
}

#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub id: &'static str,
    pub title: &'static str,
    pub problem: ProblemSpec,
    pub quantity: Quantity,
    pub references: Vec<Reference>,
    pub settings: Settings,
}

/// Optional changes to a case's recommended settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub num_eigenvalues: Option<usize>,
    pub eigenfunctions: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub n: usize,
    pub computed: Option<Complex64>,
    pub reference: Complex64,
    pub source: &'static str,
    pub error: f64,
    pub tol: Tolerance,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub id: &'static str,
    pub quantity: Quantity,
    pub rows: Vec<Comparison>,
    pub result: EigenResult,
}

impl BenchReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

pub const CASE_IDS: [&str; 7] = [
    "bessel-5-16",
    "boyd",
    "harmonic-bessel",
    "hydrogen",
    "hydrogen-edge",
    "sin-perturbed",
    "complex-derivative",
];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn refs(source: &'static str, rows: &[(usize, f64)], tol: impl Fn(usize) -> Tolerance) -> Vec<Reference> {
    rows.iter()
        .map(|&(n, v)| Reference {
            n,
            value: c(v),
            source,
            tol: tol(n),
        })
        .collect()
}

fn expr(s: &str) -> Expr {
    Expr::parse(s).expect("built-in expression")
}

/// `u0 = sqrt(x) J_1(2 sqrt(x))`, `u0' = J_0(2 sqrt(x))`.
pub fn boyd_u0() -> U0Fn {
    U0Fn(Arc::new(|x: f64| {
        let s = 2.0 * x.sqrt();
        let j1 = bessel_j(1.0, s).unwrap_or(f64::NAN);
        let j0 = bessel_j(0.0, s).unwrap_or(f64::NAN);
        (c(x.sqrt() * j1), c(j0))
    }))
}

fn linear(step: Complex64, offset: Complex64) -> Strategy {
    Strategy::LinearSchedule { step, offset }
}

pub fn case(id: &str) -> Option<BenchmarkCase> {
    let pi = core::f64::consts::PI;
    let i = Complex64::new(0.0, 1.0);
    let base = Settings {
        n: 40,
        m: 50_000,
        real_mode: true,
        trust_radii: false,
        ..Settings::default()
    };
    let case = match id {
        "bessel-5-16" => BenchmarkCase {
            id: "bessel-5-16",
            title: "-u'' + (5/16)/x^2 u = lambda u, u(1) = 0",
            problem: ProblemSpec::new(0.25, 1.0),
            quantity: Quantity::Lambda,
            references: refs(
                "squares of zeros of J_3/4",
                &[
                    (1, 12.1871394680951),
                    (2, 44.257559403502),
                    (3, 96.071604838843),
                    (4, 167.62571242058),
                    (5, 258.91930035744),
                    (6, 369.95220926235),
                    (7, 500.72438147579),
                    (8, 651.23579210254),
                    (9, 821.48642898238),
                    (10, 1011.47628560802),
                    (30, 8956.5077203636),
                    (50, 24797.222775294),
                ],
                |n| Tolerance::Relative(if n <= 10 { 1e-11 } else { 1e-9 }),
            ),
            settings: Settings {
                num_eigenvalues: 50,
                strategy: linear(c(50.0) + 2.0 * i, c(0.0)),
                u0: U0Choice::Analytic {
                    u0: expr("x^(5/4)"),
                    du0: expr("5/4*x^(1/4)"),
                },
                ..base.clone()
            },
        },
        "boyd" => BenchmarkCase {
            id: "boyd",
            title: "-u'' - u/x = lambda u, u(1) = 0",
            problem: ProblemSpec::new(0.0, 1.0).with_q(expr("-1/x")).with_alpha(-1.0),
            quantity: Quantity::Lambda,
            references: refs(
                "Whittaker characteristic equation",
                &[
                    (1, 7.3739850151751),
                    (2, 36.3360195952318),
                    (3, 85.292582094137),
                    (4, 154.098623739767),
                    (5, 242.705559362911),
                    (6, 351.091167129418),
                    (8, 627.155044324564),
                    (10, 982.239093680188),
                    (13, 1662.98063088578),
                    (20, 3942.42966385102),
                    (28, 7732.02180519214),
                    (30, 8876.82700072941),
                    (35, 12084.29442705875),
                    (40, 15785.2626475007),
                    (50, 24667.683593313),
                ],
                |n| Tolerance::Relative(if n == 1 { 1e-10 } else { 1e-9 }),
            ),
            settings: Settings {
                num_eigenvalues: 50,
                strategy: linear(c(50.0) + 2.0 * i, 0.5 * i),
                u0: U0Choice::Function(boyd_u0()),
                ..base.clone()
            },
        },
        "harmonic-bessel" => BenchmarkCase {
            id: "harmonic-bessel",
            title: "-u'' + (15/4/x^2 + x^2) u = lambda u, u(pi) = 0",
            problem: ProblemSpec::new(1.5, pi).with_q(expr("x^2")).with_alpha(2.0),
            quantity: Quantity::SqrtLambda,
            references: refs(
                "Whittaker characteristic equation",
                &[
                    (1, 2.4629499739740),
                    (2, 3.2883529299426),
                    (3, 4.1498642187448),
                    (4, 5.0636688237341),
                    (5, 6.0075814581160),
                    (7, 7.9397373768993),
                    (10, 10.8861250916173),
                    (15, 15.8426318195682),
                    (20, 20.8202301908124),
                    (30, 30.7973502195868),
                    (50, 50.77867680951),
                ],
                |n| Tolerance::Relative(if n == 1 { 1e-10 } else { 1e-9 }),
            ),
            settings: Settings {
                n: 50,
                num_eigenvalues: 50,
                strategy: linear(c(10.0) + i, i),
                u0: U0Choice::Series,
                ..base.clone()
            },
        },
        "hydrogen" => BenchmarkCase {
            id: "hydrogen",
            title: "-u'' + (6/x^2 + 1/x) u = lambda u, u(pi) = 0",
            problem: ProblemSpec::new(2.0, pi).with_q(expr("1/x")).with_alpha(-1.0),
            quantity: Quantity::SqrtLambda,
            references: refs(
                "Whittaker characteristic equation",
                &[
                    (1, 1.97027445061572),
                    (2, 3.00436042551857),
                    (3, 4.01515351791736),
                    (4, 5.0193472218612),
                    (5, 6.0210053515488),
                    (7, 8.0215089715478),
                    (10, 11.0202653559399),
                    (15, 16.0176675547294),
                    (20, 21.0155251794156),
                    (30, 31.0125189152597),
                    (50, 51.00916429551),
                ],
                |n| {
                    Tolerance::Relative(match n {
                        1 => 1e-10,
                        50 => 1e-8,
                        _ => 1e-9,
                    })
                },
            ),
            settings: Settings {
                num_eigenvalues: 50,
                strategy: linear(c(10.0) + i, i),
                u0: U0Choice::Series,
                ..base.clone()
            },
        },
        "hydrogen-edge" => BenchmarkCase {
            id: "hydrogen-edge",
            title: "-u'' + (-1/4/x^2 + 1/x) u = lambda u, u(pi) = 0",
            problem: ProblemSpec::new(-0.5, pi).with_q(expr("1/x")).with_alpha(-1.0),
            quantity: Quantity::Lambda,
            references: refs(
                "independent Frobenius-series shooting",
                &[
                    (1, 1.513315514598292),
                    (2, 4.367823666350947),
                    (3, 9.056245117942927),
                    (4, 15.67721301669797),
                    (5, 24.26477697991749),
                    (6, 34.8330691116016),
                    (7, 47.38898068836468),
                    (8, 61.93631016123712),
                    (9, 78.4773519655595),
                    (10, 97.0135916229298),
                    (20, 392.2446506090779),
                    (30, 887.376455487147),
                ],
                |_| Tolerance::Absolute(1e-6),
            ),
            settings: Settings {
                m: 200_000,
                num_eigenvalues: 30,
                strategy: linear(c(10.0) + i, i),
                u0: U0Choice::Series,
                ..base.clone()
            },
        },
        "sin-perturbed" => BenchmarkCase {
            id: "sin-perturbed",
            title: "-u'' + (2/x^2 + sin x) u = lambda u, u(pi) = 0",
            problem: ProblemSpec::new(1.0, pi).with_q(expr("sin(x)")).with_alpha(1.0),
            quantity: Quantity::SqrtLambda,
            references: refs(
                "cross-method values (MATSLISE)",
                &[
                    (1, 1.69965392162512),
                    (2, 2.60438727880111),
                    (3, 3.56972957088910),
                    (4, 4.55232022604096),
                    (5, 5.54189892161906),
                    (7, 7.53001773432606),
                    (10, 10.5211087141255),
                    (15, 15.5141539227760),
                    (20, 20.5106568768319),
                    (30, 30.5071385063018),
                    (50, 50.5043027452760),
                ],
                |_| Tolerance::Relative(1e-9),
            ),
            settings: Settings {
                num_eigenvalues: 50,
                strategy: linear(c(10.0) + i, i),
                u0: U0Choice::Series,
                ..base.clone()
            },
        },
        "complex-derivative" => BenchmarkCase {
            id: "complex-derivative",
            title: "-u'' + 2/x^2 u = lambda u', u'(1) = 0",
            problem: ProblemSpec::new(0.5, 1.0)
                .with_r0(expr("0"))
                .with_r1(expr("1"))
                .with_boundary(c(0.0), c(1.0)),
            quantity: Quantity::Lambda,
            references: [
                (1, 4.47123493371, 6.76481747480),
                (2, 5.63553225515, 13.37799928396),
                (3, 6.35749327947, 19.82515033081),
                (4, 6.88515095992, 26.20887598266),
                (5, 7.30184486294, 32.56088281579),
                (10, 8.62739882786, 64.14303168978),
                (20, 9.98333956726, 127.0816376257),
                (30, 10.7844002552, 189.9555609955),
                (50, 11.7983559297, 315.6569255437),
                (75, 12.6055406452, 472.7574366509),
                (100, 13.1790674160, 629.8482784850),
            ]
            .iter()
            .map(|&(n, re, im)| Reference {
                n,
                value: Complex64::new(re, im),
                source: "exact characteristic function",
                tol: Tolerance::Absolute(1e-8),
            })
            .collect(),
            settings: Settings {
                n: 50,
                m: 200_000,
                num_eigenvalues: 10,
                real_mode: false,
                strategy: Strategy::AdaptiveChain { delta: -i },
                u0: U0Choice::Analytic {
                    u0: expr("x^(3/2)"),
                    du0: expr("3/2*x^(1/2)"),
                },
                ..base
            },
        },
        _ => return None,
    };
    Some(case)
}

pub fn all_cases() -> Vec<BenchmarkCase> {
    CASE_IDS.iter().filter_map(|id| case(id)).collect()
}

/// Error of `computed` against `reference` under `tol`, in the table's quantity.
pub fn compare(quantity: Quantity, computed: Complex64, reference: Complex64, tol: Tolerance) -> (f64, bool) {
    let value = match quantity {
        Quantity::Lambda => computed,
        Quantity::SqrtLambda => computed.sqrt(),
    };
    let err = match tol {
        Tolerance::Relative(_) => (value - reference).norm() / reference.norm(),
        Tolerance::Absolute(_) => (value - reference).norm(),
    };
    let bound = match tol {
        Tolerance::Relative(t) | Tolerance::Absolute(t) => t,
    };
    (err, err <= bound)
}

/// Solves a case with its recommended settings and compares against the
/// references that fall within the computed range.
pub fn run_benchmark(id: &str, overrides: &Overrides) -> Result<BenchReport> {
    let case = case(id).ok_or_else(|| crate::Error::Unsupported(format!("unknown benchmark `{id}`")))?;
    let mut settings = case.settings.clone();
    if let Some(n) = overrides.n {
        settings.n = n;
    }
    if let Some(m) = overrides.m {
        settings.m = m;
    }
    if let Some(k) = overrides.num_eigenvalues {
        settings.num_eigenvalues = k;
    }
    if let Some(e) = overrides.eigenfunctions {
        settings.eigenfunctions = e;
    }
    let result = solve(&case.problem, &settings)?;
    let rows = case
        .references
        .iter()
        .filter(|r| r.n <= settings.num_eigenvalues)
        .map(|r| {
            let computed = result.eigenvalues.get(r.n - 1).map(|e| e.lambda);
            let (error, pass) = match computed {
                Some(v) => compare(case.quantity, v, r.value, r.tol),
                None => (f64::INFINITY, false),
            };
            Comparison {
                n: r.n,
                computed,
                reference: r.value,
                source: r.source,
                error,
                tol: r.tol,
                pass,
            }
        })
        .collect();
    Ok(BenchReport {
        id: case.id,
        quantity: case.quantity,
        rows,
        result,
    })
}

/// One-line description of a case for listings.
pub fn describe(case: &BenchmarkCase) -> String {
    format!("{:<20} {}", case.id, case.title)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_is_valid() {
        for case in all_cases() {
            assert!(!case.references.is_empty());
            case.problem.validate().unwrap();
        }
        assert!(case("nope").is_none());
    }

    #[test]
    fn zeros_reproduce_bessel_references() {
        let case = case("bessel-5-16").unwrap();
        for r in &case.references {
            let j = bessel_zero(0.75, r.n).unwrap();
            assert!((j * j - r.value.re).abs() <= 1e-12 * r.value.re, "n = {}", r.n);
        }
    }

    #[test]
    fn exact_phi_vanishes_at_references() {
        let case = case("complex-derivative").unwrap();
        for r in &case.references {
            let f = exact_phi_ex6(r.value).unwrap();
            let h = 1e-6 * (1.0 + r.value.norm());
            let d = (exact_phi_ex6(r.value + h).unwrap() - exact_phi_ex6(r.value - h).unwrap()) / (2.0 * h);
            // table values carry 11-12 digits
            assert!(
                f.norm() <= 1e-9 * d.norm() * (1.0 + r.value.norm()),
                "n = {}: {}",
                r.n,
                f.norm() / d.norm()
            );
        }
    }

    #[test]
    fn compare_in_table_quantity() {
        let (e, ok) = compare(Quantity::SqrtLambda, c(4.0), c(2.0), Tolerance::Relative(1e-15));
        assert!(ok && e == 0.0);
        let (_, ok) = compare(Quantity::Lambda, c(1.0 + 2e-6), c(1.0), Tolerance::Absolute(1e-6));
        assert!(!ok);
    }
}
