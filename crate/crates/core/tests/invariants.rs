use proptest::prelude::*;
use spps_core::bench::{self, bessel_i, bessel_j, gamma};
use spps_core::grid::{Operand, PointwiseOp};
use spps_core::powers::{check_bounds, compute_x, compute_z};
use spps_core::prelude::*;
use spps_core::spectrum::{solve, CharPoly, Strategy, TailModel, U0Choice, RESIDUAL_TOL};
use spps_core::usol::{build_u0_analytic, build_u0_series, build_u0_shifted, check_nonvanishing};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn expr(s: &str) -> Expr {
    Expr::parse(s).unwrap()
}

fn setup(spec: &ProblemSpec, m: usize) -> SampledProblem {
    spec.sample(Grid::new(spec.a, m).unwrap()).unwrap()
}

#[test]
fn boyd_series_u0_matches_bessel_form() {
    let case = bench::case("boyd").unwrap();
    let sampled = setup(&case.problem, 50_000);
    let u0 = build_u0_series(&case.problem, &sampled, 40, &PowerOptions::default()).unwrap();
    let x = sampled.grid.nodes();
    let mut worst = 0.0f64;
    let mut worst_d = 0.0f64;
    for j in 1..x.len() {
        let s = 2.0 * x[j].sqrt();
        let exact = x[j].sqrt() * bessel_j(1.0, s).unwrap();
        let dexact = bessel_j(0.0, s).unwrap();
        worst = worst.max((u0.u0.values()[j] - exact).norm());
        worst_d = worst_d.max((u0.du0.values()[j] - dexact).norm());
    }
    assert!(worst <= 1e-12, "u0 {worst:e}");
    assert!(worst_d <= 1e-12, "u0' {worst_d:e}");
}

#[test]
fn harmonic_series_u0_matches_bessel_form() {
    let case = bench::case("harmonic-bessel").unwrap();
    let sampled = setup(&case.problem, 50_000);
    let u0 = build_u0_series(&case.problem, &sampled, 50, &PowerOptions::default()).unwrap();
    for (&x, v) in sampled.grid.nodes().iter().zip(u0.u0.values()) {
        let exact = 4.0 * x.sqrt() * bessel_i(1.0, c(x * x / 2.0, 0.0)).unwrap();
        assert!((v - exact).norm() <= 1e-12, "x = {x}: {v} vs {exact}");
    }
}

/// `Gamma(nu+1) (2+alpha)^nu C^(-nu/2) sqrt(x) I_nu(2 sqrt(C x^(2+alpha)) / (2+alpha))`,
/// `nu = (2l+1)/(2+alpha)`.
fn u0_majorant(l: f64, alpha: f64, cq: f64, x: f64) -> f64 {
    let nu = (2.0 * l + 1.0) / (2.0 + alpha);
    let arg = 2.0 * (cq * x.powf(2.0 + alpha)).sqrt() / (2.0 + alpha);
    gamma(nu + 1.0) * (2.0 + alpha).powf(nu) * cq.powf(-nu / 2.0) * x.sqrt() * bessel_i(nu, c(arg, 0.0)).unwrap().re
}

#[test]
fn series_u0_obeys_its_a_priori_estimate() {
    for id in ["boyd", "harmonic-bessel", "hydrogen", "sin-perturbed", "hydrogen-edge"] {
        let case = bench::case(id).unwrap();
        let spec = &case.problem;
        let cq = spec.validate().unwrap().growth_constant.max(1e-300);
        let sampled = setup(spec, 5_000);
        let u0 = build_u0_series(spec, &sampled, 40, &PowerOptions::default()).unwrap();
        for (&x, v) in sampled.grid.nodes().iter().zip(u0.u0.values()).skip(1) {
            let bound = u0_majorant(spec.l, spec.alpha, cq, x);
            assert!(
                v.norm() <= bound * (1.0 + 1e-10),
                "{id}: x = {x}: |u0| = {} > {bound}",
                v.norm()
            );
        }
    }
}

#[test]
fn nonnegative_potential_gives_u0_above_leading_term() {
    let case = bench::case("harmonic-bessel").unwrap();
    let sampled = setup(&case.problem, 5_000);
    let u0 = build_u0_series(&case.problem, &sampled, 40, &PowerOptions::default()).unwrap();
    let report = check_nonvanishing(&case.problem, &u0);
    assert!(report.nonvanishing);
    assert_eq!(report.lower_bound_holds, Some(true));
}

#[test]
fn shifted_u0_below_potential_is_nonvanishing() {
    // -u'' + (2/x^2 + x^2 - 3) u = 0 at lambda0 = -3 < inf q
    let spec = ProblemSpec::new(1.0, 3.0).with_q(expr("x^2")).with_alpha(2.0);
    let sampled = setup(&spec, 5_000);
    let u0 = build_u0_shifted(&spec, &sampled, c(-3.0, 0.0), 40, &PowerOptions::default()).unwrap();
    assert!(u0.nonvanishing());
    let x = sampled.grid.nodes();
    for j in 1..x.len() {
        assert!(u0.u0.values()[j].re >= x[j].powi(2) * (1.0 - 1e-13));
    }
}

#[test]
fn truncation_bound_covers_higher_order_difference() {
    let spec = bench::case("sin-perturbed").unwrap().problem;
    let sampled = setup(&spec, 5_000);
    let opts = PowerOptions::default();
    let u0 = build_u0_series(&spec, &sampled, 40, &opts).unwrap();
    let lo = SppsSolution::new(compute_x(&spec, &sampled, &u0, 8, &opts).unwrap(), u0.clone()).unwrap();
    let hi = SppsSolution::new(compute_x(&spec, &sampled, &u0, 30, &opts).unwrap(), u0).unwrap();
    let x = sampled.grid.nodes();
    for lambda in [c(1.0, 0.0), c(-4.0, 1.0), c(3.0, -3.0), c(10.0, 0.0)] {
        let (ul, _) = lo.evaluate(lambda).unwrap();
        let (uh, _) = hi.evaluate(lambda).unwrap();
        for j in (0..x.len()).step_by(250) {
            let diff = (ul.values()[j] - uh.values()[j]).norm();
            let bound = lo.truncation_bound(lambda, x[j]);
            assert!(
                diff <= bound * (1.0 + 1e-8) + 1e-14,
                "lambda {lambda}, x {}: {diff:e} > {bound:e}",
                x[j]
            );
        }
    }
}

#[test]
fn shifted_and_unshifted_series_agree() {
    let spec = bench::case("hydrogen").unwrap().problem;
    let sampled = setup(&spec, 10_000);
    let opts = PowerOptions::default();
    let u0 = build_u0_series(&spec, &sampled, 40, &opts).unwrap();
    let base = SppsSolution::new(compute_x(&spec, &sampled, &u0, 40, &opts).unwrap(), u0).unwrap();
    let center = c(4.0, 1.0);
    let u0s = spps_core::spectrum::shift_to(&spec, &base, center).unwrap();
    let shifted = SppsSolution::new(compute_z(&spec, &sampled, &u0s, 40, &opts).unwrap(), u0s).unwrap();
    for lambda in [c(3.0, 0.0), c(5.0, 2.0), c(4.0, 1.0)] {
        let (a, _) = base.evaluate(lambda).unwrap();
        let (b, _) = shifted.evaluate(lambda).unwrap();
        let scale = a.max_abs();
        for (u, v) in a.values().iter().zip(b.values()) {
            assert!((u - v).norm() <= 1e-10 * scale, "lambda {lambda}: {u} vs {v}");
        }
    }
}

#[test]
fn smooth_integrands_converge_at_sixth_order() {
    let err = |m: usize, f: fn(f64) -> f64, big_f: fn(f64) -> f64| {
        let g = Grid::new(1.0, m).unwrap();
        let v = GridFunction::from_fn(g.clone(), |t| c(f(t), 0.0)).cumulative_integral();
        g.nodes()
            .iter()
            .zip(v.values())
            .map(|(x, v)| (v.re - big_f(*x)).abs())
            .fold(0.0f64, f64::max)
    };
    let cases: [(fn(f64) -> f64, fn(f64) -> f64); 2] = [
        (|t| t.exp(), |t| t.exp() - 1.0),
        (|t| (3.0 * t).cos(), |t| (3.0 * t).sin() / 3.0),
    ];
    for (f, big_f) in cases {
        for m in [20, 40] {
            let order = (err(m, f, big_f) / err(2 * m, f, big_f)).log2();
            assert!(order >= 5.95, "observed order {order} at M = {m}");
        }
    }
    assert!(err(50_000, |t| t.exp(), |t| t.exp() - 1.0) <= 1e-13);
}

#[test]
fn pointwise_division_flags_zero_denominators() {
    let g = Grid::new(1.0, 10).unwrap();
    let num = GridFunction::from_fn(g.clone(), |t| c(t.powi(3), 0.0));
    let den = GridFunction::from_fn(g.clone(), |t| c(t.powi(2), 0.0));
    let q = num.pointwise(PointwiseOp::Div, Operand::Function(&den)).unwrap();
    assert_eq!(q.flagged, vec![0]);
    for (x, v) in g.nodes().iter().zip(q.value.values()).skip(1) {
        assert!((v.re - x).abs() <= 1e-15);
    }
    let zero = num.pointwise(PointwiseOp::Sub, Operand::Function(&num)).unwrap();
    assert_eq!(zero.value.max_abs(), 0.0);
}

#[test]
fn rouche_root_count_is_stable_in_n() {
    let case = bench::case("complex-derivative").unwrap();
    let spec = &case.problem;
    let grid = Grid::new(1.0, 20_000).unwrap();
    let sampled = spec.sample(grid.clone()).unwrap();
    let u0 = build_u0_analytic(spec, &expr("x^(3/2)"), &expr("3/2*x^(1/2)"), grid).unwrap();
    let poly = |n: usize| {
        let set = compute_x(spec, &sampled, &u0, n, &PowerOptions::default()).unwrap();
        let mut p = CharPoly::new(spec, &set, &u0).unwrap();
        p.tail_c = 1.5;
        p
    };
    let (a, b) = (poly(50), poly(60));
    let r = a.rouche_radius(TailModel::Exponential, 256);
    assert!(r > 5.0);
    let inside = |p: &CharPoly| {
        let mut v: Vec<Complex64> = p
            .roots()
            .into_iter()
            .map(|x| x.lambda)
            .filter(|z| z.norm() < r)
            .collect();
        v.sort_by(|x, y| (x.im, x.re).partial_cmp(&(y.im, y.re)).unwrap());
        v
    };
    let (ra, rb) = (inside(&a), inside(&b));
    assert_eq!(ra.len(), rb.len());
    for (x, y) in ra.iter().zip(&rb) {
        assert!((x - y).norm() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn accepted_eigenvalues_meet_residual_threshold() {
    let case = bench::case("sin-perturbed").unwrap();
    let settings = Settings {
        num_eigenvalues: 6,
        m: 10_000,
        ..case.settings.clone()
    };
    let res = solve(&case.problem, &settings).unwrap();
    assert_eq!(res.eigenvalues.len(), 6);
    for e in &res.eigenvalues {
        assert!(e.residual <= RESIDUAL_TOL);
        assert!(e.lambda.im == 0.0, "real mode keeps real values: {}", e.lambda);
    }
    assert!(res.eigenvalues.windows(2).all(|w| w[0].lambda.re < w[1].lambda.re));
}

#[test]
fn solve_is_deterministic() {
    let case = bench::case("boyd").unwrap();
    let settings = Settings {
        num_eigenvalues: 3,
        m: 5_000,
        ..case.settings.clone()
    };
    let a = solve(&case.problem, &settings).unwrap();
    let b = solve(&case.problem, &settings).unwrap();
    let bits = |r: &spps_core::spectrum::EigenResult| -> Vec<(u64, u64)> {
        r.eigenvalues
            .iter()
            .map(|e| (e.lambda.re.to_bits(), e.lambda.im.to_bits()))
            .collect()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn single_center_bessel_without_shift() {
    let spec = ProblemSpec::new(0.25, 1.0).with_alpha(0.0);
    let settings = Settings {
        n: 40,
        m: 10_000,
        num_eigenvalues: 3,
        strategy: Strategy::Single,
        real_mode: true,
        u0: U0Choice::Analytic {
            u0: expr("x^(5/4)"),
            du0: expr("5/4*x^(1/4)"),
        },
        ..Settings::default()
    };
    let res = solve(&spec, &settings).unwrap();
    for (k, e) in res.eigenvalues.iter().enumerate() {
        let z = bench::bessel_zero(0.75, k + 1).unwrap();
        assert!((e.lambda.re - z * z).abs() <= 1e-9 * z * z, "{} vs {}", e.lambda, z * z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn free_bessel_powers_match_closed_form(l in -0.5f64..3.0) {
        let spec = ProblemSpec::new(l, 1.0);
        let grid = Grid::new(1.0, 2_000).unwrap();
        let sampled = spec.sample(grid.clone()).unwrap();
        let u0 = build_u0_analytic(
            &spec,
            &expr(&format!("x^({})", l + 1.0)),
            &expr(&format!("{}*x^({})", l + 1.0, l)),
            grid.clone(),
        )
        .unwrap();
        let set = compute_x(&spec, &sampled, &u0, 12, &PowerOptions::default()).unwrap();
        let mut denom = 1.0;
        for n in 0..=12usize {
            if n > 0 {
                denom *= -4.0 * n as f64 * (l + 0.5 + n as f64);
            }
            for (j, &x) in grid.nodes().iter().enumerate().filter(|(_, &x)| x >= 0.1) {
                let exact = x.powi(2 * n as i32) / denom;
                let got = set.powers[2 * n].values()[j];
                prop_assert!((got.re - exact).abs() <= 1e-11 * exact.abs(), "n = {}, x = {}", n, x);
            }
        }
    }

    #[test]
    fn powers_respect_a_priori_bounds(l in -0.5f64..2.5, k in 0u32..4, amp in -3.0f64..3.0) {
        let spec = ProblemSpec::new(l, 1.0)
            .with_q(expr(&format!("{amp}*x^{k}")))
            .with_alpha(k as f64);
        let sampled = spec.sample(Grid::new(1.0, 2_000).unwrap()).unwrap();
        let opts = PowerOptions::default();
        let u0 = build_u0_series(&spec, &sampled, 30, &opts).unwrap();
        prop_assume!(u0.nonvanishing());
        let set = compute_x(&spec, &sampled, &u0, 15, &opts).unwrap();
        prop_assert!(check_bounds(&set, &opts).unwrap().is_empty());
    }

    #[test]
    fn real_problems_have_conjugate_root_pairs(amp in -5.0f64..5.0, beta in -1.0f64..1.0) {
        let spec = ProblemSpec::new(0.5, 1.0)
            .with_q(expr(&format!("{amp}*sin(x)")))
            .with_alpha(1.0)
            .with_boundary(c(beta, 0.0), c(1.0, 0.0));
        let sampled = spec.sample(Grid::new(1.0, 1_000).unwrap()).unwrap();
        let opts = PowerOptions::default();
        let u0 = build_u0_series(&spec, &sampled, 20, &opts).unwrap();
        prop_assume!(u0.nonvanishing());
        let set = compute_x(&spec, &sampled, &u0, 20, &opts).unwrap();
        let poly = CharPoly::new(&spec, &set, &u0).unwrap();
        let roots: Vec<Complex64> = poly.roots().into_iter().map(|r| r.lambda).collect();
        for z in &roots {
            let near = roots.iter().map(|w| (w - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(near <= 1e-6 * (1.0 + z.norm()), "{} has no conjugate partner", z);
        }
    }

    #[test]
    fn validation_is_deterministic(amp in 0.1f64..10.0, alpha in -1.5f64..2.0) {
        let spec = ProblemSpec::new(0.5, 2.0)
            .with_q(expr(&format!("{amp}*x^({alpha})")))
            .with_alpha(alpha);
        let a = spec.validate().unwrap();
        let b = spec.validate().unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn expression_evaluation_is_pure(x in 0.01f64..10.0) {
        let e = expr("x^2 + sin(x)*exp(-x) - sqrt(x)/(1+x) + 2i*ln(x)");
        let a = e.eval(x).unwrap();
        let b = e.eval(x).unwrap();
        prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
        prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
