use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use spps_core::bench::{self, BenchReport, Quantity, Tolerance};
use spps_core::grid::{Grid, GridFunction};
use spps_core::powers::{compute_x, compute_z, FormalPowerSet, PowerKind};
use spps_core::prelude::{EigenResult, Settings, SppsSolution, Strategy, U0Choice};
use spps_core::spectrum::build_base_u0;
use spps_core::usol::ParticularSolution;
use spps_core::Complex64;

use crate::cli::{
    BenchArgs, Cli, Command, Format, Overrides, PowersArgs, SolveArgs, StrategyArg, TransmuteArgs, ValidateArgs,
};
use crate::file::{self, ProblemFile, StrategyKind};
use crate::format::{complex, parse_complex, parse_indices, parse_pair, short, sig};
use crate::{CliError, Result};

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Solve(a) => solve(a, out, err),
        Command::Bench(a) => bench(a, out),
        Command::Powers(a) => powers(a, out),
        Command::Transmute(a) => transmute(a, out),
        Command::Validate(a) => validate(a, out),
    }
}

fn apply(settings: &mut Settings, o: &Overrides) {
    if let Some(n) = o.n {
        settings.n = n;
    }
    if let Some(m) = o.m {
        settings.m = m;
    }
    if let Some(j) = o.j {
        settings.powers.j_regularization = j;
    }
    if o.strict {
        settings.powers.strict = true;
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Problem file with the command-line overrides merged in.
fn solve_setup(a: &SolveArgs) -> Result<(ProblemFile, Settings)> {
    let mut f = file::read(&a.path)?;
    apply(&mut f.settings, &a.overrides);
    if a.real_mode {
        f.settings.real_mode = true;
    }
    if let Some(k) = a.count {
        f.settings.num_eigenvalues = k;
    }
    let st = &mut f.strategy;
    if let Some(s) = &a.shift {
        st.shift = Some(parse_pair(s)?);
        st.kind = Some(StrategyKind::Linear);
    }
    if let Some(o) = &a.offset {
        st.offset = parse_complex(o)?;
    }
    if let Some(d) = &a.delta {
        st.delta = Some(parse_complex(d)?);
        st.kind = Some(StrategyKind::Adaptive);
    }
    if let Some(s) = a.strategy {
        st.kind = Some(match s {
            StrategyArg::Single => StrategyKind::Single,
            StrategyArg::Linear => StrategyKind::Linear,
            StrategyArg::Adaptive => StrategyKind::Adaptive,
        });
    }
    let mut settings = f.resolved_settings()?;
    if a.eigenfunctions.is_some() {
        settings.eigenfunctions = true;
    }
    Ok((f, settings))
}

fn solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let wanted = a.eigenfunctions.as_deref().map(parse_indices).transpose()?;
    let (f, mut settings) = solve_setup(a)?;
    if let Some(max) = wanted.as_ref().and_then(|w| w.last()) {
        settings.num_eigenvalues = settings.num_eigenvalues.max(*max);
    }
    f.spec.validate()?;
    let result = spps_core::prelude::solve(&f.spec, &settings)?;
    for w in &result.warnings {
        let _ = writeln!(err, "warning: {w}");
    }

    let text = match a.format {
        Format::Table => eigen_table(&result),
        Format::Json => serde_json::to_string_pretty(&eigen_json(&result)).expect("json") + "\n",
        Format::Csv => eigen_csv(&result),
    };
    emit(out, &text)?;

    let needs_dir = a.out_dir.is_some() || wanted.is_some() || a.dump_powers;
    if !needs_dir {
        return Ok(());
    }
    let dir = a.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    if a.out_dir.is_some() {
        write_file(&dir.join("eigenvalues.txt"), &eigen_table(&result))?;
        let json = serde_json::to_string_pretty(&eigen_json(&result)).expect("json") + "\n";
        write_file(&dir.join("eigenvalues.json"), &json)?;
    }
    for &k in wanted.iter().flatten() {
        match result.eigenvalues.get(k - 1).and_then(|e| e.eigenfunction.as_ref()) {
            Some(ef) => write_file(
                &dir.join(format!("eigenfunction_{k}.csv")),
                &columns_csv(&["u", "du"], &[&ef.u, &ef.du], 1),
            )?,
            None => {
                let _ = writeln!(
                    err,
                    "warning: eigenfunction {k} not available ({} eigenvalues found)",
                    result.eigenvalues.len()
                );
            }
        }
    }
    if a.dump_powers {
        let (set, _) = first_center(&f, &settings)?;
        write_file(&dir.join("powers.csv"), &powers_csv(&set, 1))?;
    }
    Ok(())
}

fn strategy_text(s: &Strategy) -> String {
    match s {
        Strategy::Single => "single".into(),
        Strategy::LinearSchedule { step, offset } => {
            format!("linear(step {}, offset {})", short(*step), short(*offset))
        }
        Strategy::AdaptiveChain { delta } => format!("adaptive(delta {})", short(*delta)),
    }
}

pub fn eigen_table(r: &EigenResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# N = {}, M = {}, strategy = {}, u0 = {:?}, centers = {}",
        r.n,
        r.m,
        strategy_text(&r.strategy),
        r.u0_source,
        r.chain.len()
    );
    let _ = writeln!(
        s,
        "{:>4}  {:>22}  {:>22}  {:>9}  {:>9}  {:<16} trusted",
        "n", "re(lambda)", "im(lambda)", "residual", "trust", "center"
    );
    for (i, e) in r.eigenvalues.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>4}  {:>22}  {:>22}  {:>9.2e}  {:>9.2e}  {:<16} {}",
            i + 1,
            sig(e.lambda.re),
            sig(e.lambda.im),
            e.residual,
            e.trust_radius,
            short(e.center),
            if e.trusted { "yes" } else { "no" }
        );
    }
    s
}

fn num(v: f64) -> Value {
    // the json crate maps non-finite values to null
    json!(v)
}

pub fn eigen_json(r: &EigenResult) -> Value {
    let eigenvalues: Vec<Value> = r
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, e)| {
            json!({
                "index": i + 1,
                "re": num(e.lambda.re),
                "im": num(e.lambda.im),
                "residual": num(e.residual),
                "center": [num(e.center.re), num(e.center.im)],
                "shift_index": e.shift_index,
                "trusted": e.trusted,
                "trust_radius": num(e.trust_radius),
                "boundary_residual": e.eigenfunction.as_ref().map(|f| num(f.boundary_residual)),
            })
        })
        .collect();
    json!({
        "N": r.n,
        "M": r.m,
        "strategy": strategy_text(&r.strategy),
        "real_mode": r.real_mode,
        "u0_source": format!("{:?}", r.u0_source),
        "centers": r.chain.iter().map(|c| json!([num(c.re), num(c.im)])).collect::<Vec<_>>(),
        "eigenvalues": eigenvalues,
        "warnings": r.warnings,
    })
}

pub fn eigen_csv(r: &EigenResult) -> String {
    let mut s = String::from("index,re,im,residual,center_re,center_im,trusted,trust_radius\n");
    for (i, e) in r.eigenvalues.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{:.3e},{},{},{},{:.3e}",
            i + 1,
            sig(e.lambda.re),
            sig(e.lambda.im),
            e.residual,
            sig(e.center.re),
            sig(e.center.im),
            e.trusted,
            e.trust_radius
        );
    }
    s
}

/// `x` followed by the real and imaginary parts of each column.
fn columns_csv(names: &[&str], cols: &[&GridFunction], every: usize) -> String {
    let mut s = String::from("x");
    for n in names {
        let _ = write!(s, ",re_{n},im_{n}");
    }
    s.push('\n');
    let Some(first) = cols.first() else {
        return s;
    };
    let x = first.grid().nodes();
    for j in (0..x.len()).step_by(every.max(1)) {
        s.push_str(&sig(x[j]));
        for c in cols {
            let v = c.values()[j];
            let _ = write!(s, ",{},{}", sig(v.re), sig(v.im));
        }
        s.push('\n');
    }
    s
}

fn powers_csv(set: &FormalPowerSet, every: usize) -> String {
    let letter = match set.kind {
        PowerKind::X => "X",
        PowerKind::Y => "Y",
        PowerKind::Z => "Z",
    };
    let names: Vec<String> = (0..set.powers.len()).map(|n| format!("{letter}{n}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let cols: Vec<&GridFunction> = set.powers.iter().collect();
    columns_csv(&names, &cols, every)
}

/// Formal powers at the particular solution the solver would start from.
fn first_center(f: &ProblemFile, settings: &Settings) -> Result<(FormalPowerSet, ParticularSolution)> {
    f.spec.validate()?;
    let grid = Grid::new(f.spec.a, settings.m)?;
    let sampled = f.spec.sample(grid)?;
    let u0 = build_base_u0(&f.spec, &sampled, settings)?;
    let set = if u0.lambda0 == Complex64::new(0.0, 0.0) {
        compute_x(&f.spec, &sampled, &u0, settings.n, &settings.powers)?
    } else {
        compute_z(&f.spec, &sampled, &u0, settings.n, &settings.powers)?
    };
    Ok((set, u0))
}

fn to_output(path: Option<&PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => emit(out, text),
    }
}

fn powers(a: &PowersArgs, out: &mut dyn Write) -> Result<()> {
    let mut f = file::read(&a.path)?;
    apply(&mut f.settings, &a.overrides);
    let (set, _) = first_center(&f, &f.settings)?;
    to_output(a.output.as_ref(), &powers_csv(&set, a.every), out)
}

fn transmute(a: &TransmuteArgs, out: &mut dyn Write) -> Result<()> {
    let mut f = file::read(&a.path)?;
    if let Some(m) = a.m {
        f.settings.m = m;
    }
    f.settings.n = a.kmax.max(1);
    // images are defined through the unshifted powers
    if !matches!(f.settings.u0, U0Choice::Analytic { .. }) {
        f.settings.u0 = U0Choice::Series;
    }
    let (set, u0) = first_center(&f, &f.settings)?;
    let sol = SppsSolution::new(set, u0)?;
    let images = (0..=a.kmax)
        .map(|k| sol.transmute_power(k))
        .collect::<spps_core::Result<Vec<_>>>()?;
    let names: Vec<String> = (0..=a.kmax).map(|k| format!("T{k}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let cols: Vec<&GridFunction> = images.iter().collect();
    to_output(a.output.as_ref(), &columns_csv(&names, &cols, a.every), out)
}

fn validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<()> {
    let f = file::read(&a.path)?;
    let report = f.spec.validate()?;
    let settings = f.resolved_settings()?;
    if settings.n == 0 {
        return Err(spps_core::Error::Validation {
            field: "N",
            message: "truncation order must be at least 1".into(),
        }
        .into());
    }
    Grid::new(f.spec.a, settings.m)?;
    let mut s = String::new();
    let _ = writeln!(s, "ok");
    let _ = writeln!(
        s,
        "l = {}, a = {}, alpha = {}",
        sig(f.spec.l),
        sig(f.spec.a),
        sig(f.spec.alpha)
    );
    let _ = writeln!(s, "growth constant = {}", sig(report.growth_constant));
    let _ = writeln!(s, "q nonnegative = {}", report.q_nonnegative);
    if let Some(q0) = report.q_lower_bound {
        let _ = writeln!(s, "q lower bound = {}", sig(q0));
    }
    let _ = writeln!(s, "real coefficients = {}", report.real_coefficients);
    let _ = writeln!(
        s,
        "N = {}, M = {}, strategy = {}",
        settings.n,
        settings.m,
        strategy_text(&settings.strategy)
    );
    emit(out, &s)
}

fn tol_text(t: Tolerance) -> String {
    match t {
        Tolerance::Relative(v) => format!("rel {v:.0e}"),
        Tolerance::Absolute(v) => format!("abs {v:.0e}"),
    }
}

fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    if a.id == "list" {
        let text: String = bench::all_cases().iter().map(|c| bench::describe(c) + "\n").collect();
        return emit(out, &text);
    }
    let ids: Vec<&str> = if a.id == "all" {
        bench::CASE_IDS.to_vec()
    } else if bench::CASE_IDS.contains(&a.id.as_str()) {
        vec![a.id.as_str()]
    } else {
        return Err(CliError::parse(format!(
            "unknown benchmark `{}`; one of: all, {}",
            a.id,
            bench::CASE_IDS.join(", ")
        )));
    };
    let overrides = bench::Overrides {
        n: a.n,
        m: a.m,
        num_eigenvalues: a.count,
        eigenfunctions: None,
    };
    let mut outcomes: Vec<(&str, std::result::Result<BenchReport, spps_core::Error>)> = Vec::new();
    for id in ids {
        outcomes.push((id, bench::run_benchmark(id, &overrides)));
    }
    let text = match a.format {
        Format::Table => bench_table(&outcomes),
        Format::Csv => bench_csv(&outcomes),
        Format::Json => serde_json::to_string_pretty(&bench_json(&outcomes)).expect("json") + "\n",
    };
    emit(out, &text)?;
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|(_, r)| !r.as_ref().is_ok_and(BenchReport::pass))
        .map(|(id, _)| *id)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Bench(format!("benchmark failed: {}", failed.join(", "))))
    }
}

type Outcome<'a> = (&'a str, std::result::Result<BenchReport, spps_core::Error>);

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Lambda => "lambda",
        Quantity::SqrtLambda => "sqrt(lambda)",
    }
}

fn shown(q: Quantity, v: Complex64) -> Complex64 {
    match q {
        Quantity::Lambda => v,
        Quantity::SqrtLambda => v.sqrt(),
    }
}

fn bench_table(outcomes: &[Outcome<'_>]) -> String {
    let mut s = String::new();
    for (id, r) in outcomes {
        let title = bench::case(id).map(|c| c.title).unwrap_or("");
        let _ = writeln!(s, "== {id}: {title}");
        match r {
            Err(e) => {
                let _ = writeln!(s, "error: {e}");
            }
            Ok(rep) => {
                let _ = writeln!(
                    s,
                    "{:>4}  {:>36}  {:>36}  {:>9}  {:>9}  status",
                    "n",
                    format!("computed {}", quantity_name(rep.quantity)),
                    "reference",
                    "error",
                    "tol"
                );
                for row in &rep.rows {
                    let _ = writeln!(
                        s,
                        "{:>4}  {:>36}  {:>36}  {:>9.2e}  {:>9}  {}",
                        row.n,
                        row.computed
                            .map(|v| complex(shown(rep.quantity, v)))
                            .unwrap_or_else(|| "-".into()),
                        complex(row.reference),
                        row.error,
                        tol_text(row.tol),
                        if row.pass { "PASS" } else { "FAIL" }
                    );
                }
            }
        }
        s.push('\n');
    }
    let passed = outcomes
        .iter()
        .filter(|(_, r)| r.as_ref().is_ok_and(BenchReport::pass))
        .count();
    let _ = writeln!(s, "summary: {passed}/{} cases passed", outcomes.len());
    for (id, r) in outcomes {
        let status = match r {
            Ok(rep) if rep.pass() => "PASS".to_string(),
            Ok(rep) => format!(
                "FAIL ({}/{} rows within tolerance)",
                rep.rows.iter().filter(|r| r.pass).count(),
                rep.rows.len()
            ),
            Err(_) => "FAIL (error)".to_string(),
        };
        let _ = writeln!(s, "  {id:<20} {status}");
    }
    s
}

fn bench_csv(outcomes: &[Outcome<'_>]) -> String {
    let mut s =
        String::from("case,n,quantity,computed_re,computed_im,reference_re,reference_im,error,tolerance,pass\n");
    for (id, r) in outcomes {
        let Ok(rep) = r else {
            let _ = writeln!(s, "{id},,,,,,,,,false");
            continue;
        };
        for row in &rep.rows {
            let c = row.computed.map(|v| shown(rep.quantity, v));
            let _ = writeln!(
                s,
                "{id},{},{},{},{},{},{},{:.3e},{},{}",
                row.n,
                quantity_name(rep.quantity),
                c.map(|v| sig(v.re)).unwrap_or_default(),
                c.map(|v| sig(v.im)).unwrap_or_default(),
                sig(row.reference.re),
                sig(row.reference.im),
                row.error,
                tol_text(row.tol),
                row.pass
            );
        }
    }
    s
}

fn bench_json(outcomes: &[Outcome<'_>]) -> Value {
    let cases: Vec<Value> = outcomes
        .iter()
        .map(|(id, r)| match r {
            Err(e) => json!({ "id": id, "pass": false, "error": e.to_string() }),
            Ok(rep) => json!({
                "id": id,
                "pass": rep.pass(),
                "quantity": quantity_name(rep.quantity),
                "rows": rep.rows.iter().map(|row| {
                    let c = row.computed.map(|v| shown(rep.quantity, v));
                    json!({
                        "n": row.n,
                        "computed": c.map(|v| json!([num(v.re), num(v.im)])),
                        "reference": [num(row.reference.re), num(row.reference.im)],
                        "error": num(row.error),
                        "tolerance": tol_text(row.tol),
                        "pass": row.pass,
                    })
                }).collect::<Vec<_>>(),
            }),
        })
        .collect();
    json!({ "cases": cases })
}
