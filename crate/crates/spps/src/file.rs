//! Problem files.
//!
//! ```text
//! # -u'' + (5/16)/x^2 u = lambda u,  u(1) = 0
//! l = 0.25
//! a = 1
//! q = 0
//! beta = 1
//! gamma = 0
//! solver.N = 40
//! solver.M = 50000
//! solver.strategy = linear
//! solver.shift = 50,2
//! ```
//!
//! The same keys may be given as a JSON object, with the solver keys either
//! nested under `"solver"` or spelled with the `solver.` prefix.

use std::collections::BTreeMap;

use spps_core::expr::Expr;
use spps_core::prelude::{ProblemSpec, Settings, Strategy, TailModel, U0Choice};
use spps_core::Complex64;

use crate::format::{parse_complex, parse_pair};
use crate::{CliError, Result};

const KEYS: [&str; 10] = ["l", "a", "alpha", "q", "r0", "r1", "beta", "gamma", "u0", "du0"];

const SOLVER_KEYS: [&str; 14] = [
    "N",
    "M",
    "strategy",
    "shift",
    "offset",
    "delta",
    "lambda0",
    "real_mode",
    "J_regularization",
    "strict",
    "num_eigenvalues",
    "tail_model",
    "u0_order",
    "trust_radii",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Single,
    Linear,
    Adaptive,
}

impl std::str::FromStr for StrategyKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(StrategyKind::Single),
            "linear" | "linear-schedule" => Ok(StrategyKind::Linear),
            "adaptive" | "adaptive-chain" => Ok(StrategyKind::Adaptive),
            _ => Err(CliError::parse(format!(
                "unknown strategy `{s}` (single, linear, adaptive)"
            ))),
        }
    }
}

/// Shift strategy as written; resolved once flags have been merged in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StrategyParams {
    pub kind: Option<StrategyKind>,
    /// `(s, d)`: centers `offset + n (s + d i)`.
    pub shift: Option<(f64, f64)>,
    pub offset: Complex64,
    pub delta: Option<Complex64>,
}

impl StrategyParams {
    pub fn resolve(&self) -> Result<Strategy> {
        let kind = self.kind.unwrap_or(if self.shift.is_some() {
            StrategyKind::Linear
        } else if self.delta.is_some() {
            StrategyKind::Adaptive
        } else {
            StrategyKind::Single
        });
        Ok(match kind {
            StrategyKind::Single => Strategy::Single,
            StrategyKind::Linear => {
                let (s, d) = self
                    .shift
                    .ok_or_else(|| CliError::parse("linear strategy needs a shift `s,d`"))?;
                Strategy::LinearSchedule {
                    step: Complex64::new(s, d),
                    offset: self.offset,
                }
            }
            StrategyKind::Adaptive => Strategy::AdaptiveChain {
                delta: self
                    .delta
                    .ok_or_else(|| CliError::parse("adaptive strategy needs a delta"))?,
            },
        })
    }
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub spec: ProblemSpec,
    /// Strategy is left at `Single`; see [`ProblemFile::strategy`].
    pub settings: Settings,
    pub strategy: StrategyParams,
}

impl ProblemFile {
    /// Settings with the strategy resolved.
    pub fn resolved_settings(&self) -> Result<Settings> {
        Ok(Settings {
            strategy: self.strategy.resolve()?,
            ..self.settings.clone()
        })
    }
}

/// Reads either format; JSON is recognised by a leading `{`.
pub fn parse(text: &str) -> Result<ProblemFile> {
    let pairs = if text.trim_start().starts_with('{') {
        json_pairs(text)?
    } else {
        kv_pairs(text)?
    };
    build(&pairs)
}

pub fn read(path: &std::path::Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text)
}

fn insert(map: &mut BTreeMap<String, String>, key: String, value: String) -> Result<()> {
    let known = match key.strip_prefix("solver.") {
        Some(k) => SOLVER_KEYS.contains(&k),
        None => KEYS.contains(&key.as_str()),
    };
    if !known {
        return Err(CliError::parse(format!("unknown key `{key}`")));
    }
    if map.contains_key(&key) {
        return Err(CliError::parse(format!("duplicate key `{key}`")));
    }
    map.insert(key, value);
    Ok(())
}

fn kv_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("line {}: expected `key = value`", i + 1)))?;
        let v = v.trim();
        let v = v.strip_prefix('"').and_then(|v| v.strip_suffix('"')).unwrap_or(v);
        insert(&mut map, k.trim().to_string(), v.to_string())
            .map_err(|e| CliError::parse(format!("line {}: {}", i + 1, strip_prefix(e))))?;
    }
    Ok(map)
}

fn strip_prefix(e: CliError) -> String {
    match e {
        CliError::Parse(m) => m,
        other => other.to_string(),
    }
}

fn json_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    use serde_json::Value;
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::parse(format!("json: {e}")))?;
    let Value::Object(top) = doc else {
        return Err(CliError::parse("json: expected an object"));
    };
    let scalar = |key: &str, v: &Value| -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            Value::Bool(b) => Ok(b.to_string()),
            _ => Err(CliError::parse(format!(
                "json: `{key}` must be a string, number or boolean"
            ))),
        }
    };
    let mut map = BTreeMap::new();
    for (k, v) in &top {
        if k == "solver" {
            let Value::Object(solver) = v else {
                return Err(CliError::parse("json: `solver` must be an object"));
            };
            for (sk, sv) in solver {
                let key = format!("solver.{sk}");
                let value = scalar(&key, sv)?;
                insert(&mut map, key, value)?;
            }
        } else {
            insert(&mut map, k.clone(), scalar(k, v)?)?;
        }
    }
    Ok(map)
}

fn get<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Option<&'a str> {
    map.get(key).map(String::as_str)
}

fn real(map: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    get(map, key)
        .map(|v| {
            // allow simple constant expressions such as `5/16` or `pi`
            let z = Expr::parse(v)
                .ok()
                .and_then(|e| e.as_constant())
                .ok_or_else(|| CliError::parse(format!("`{key}`: expected a real constant, got `{v}`")))?;
            if z.im != 0.0 {
                return Err(CliError::parse(format!("`{key}` must be real")));
            }
            Ok(z.re)
        })
        .transpose()
}

fn count(map: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>> {
    get(map, key)
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| CliError::parse(format!("`{key}`: expected a nonnegative integer, got `{v}`")))
        })
        .transpose()
}

fn flag(map: &BTreeMap<String, String>, key: &str) -> Result<Option<bool>> {
    get(map, key)
        .map(|v| match v {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(CliError::parse(format!("`{key}`: expected true or false, got `{v}`"))),
        })
        .transpose()
}

fn cplx(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Complex64>> {
    get(map, key)
        .map(|v| parse_complex(v).map_err(|e| CliError::parse(format!("`{key}`: {}", strip_prefix(e)))))
        .transpose()
}

fn expr(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Expr>> {
    get(map, key)
        .map(|v| Expr::parse(v).map_err(|e| CliError::parse(format!("`{key}`: {e}"))))
        .transpose()
}

fn build(map: &BTreeMap<String, String>) -> Result<ProblemFile> {
    let l = real(map, "l")?.ok_or_else(|| CliError::parse("missing key `l`"))?;
    let a = real(map, "a")?.ok_or_else(|| CliError::parse("missing key `a`"))?;
    let mut spec = ProblemSpec::new(l, a);
    if let Some(q) = expr(map, "q")? {
        spec.q = q;
    }
    if let Some(r0) = expr(map, "r0")? {
        spec.r0 = r0;
    }
    if let Some(r1) = expr(map, "r1")? {
        spec.r1 = r1;
    }
    if let Some(alpha) = real(map, "alpha")? {
        spec.alpha = alpha;
    }
    if let Some(beta) = cplx(map, "beta")? {
        spec.beta = beta;
    }
    if let Some(gamma) = cplx(map, "gamma")? {
        spec.gamma = gamma;
    }

    let mut settings = Settings::default();
    match (expr(map, "u0")?, expr(map, "du0")?) {
        (Some(u0), Some(du0)) => settings.u0 = U0Choice::Analytic { u0, du0 },
        (None, None) => {}
        _ => return Err(CliError::parse("`u0` and `du0` must be given together")),
    }
    if let Some(lambda0) = cplx(map, "solver.lambda0")? {
        if matches!(settings.u0, U0Choice::Analytic { .. }) {
            return Err(CliError::parse("`solver.lambda0` conflicts with an analytic `u0`"));
        }
        settings.u0 = U0Choice::Shifted { lambda0 };
    }
    if let Some(n) = count(map, "solver.N")? {
        settings.n = n;
    }
    if let Some(m) = count(map, "solver.M")? {
        settings.m = m;
    }
    if let Some(k) = count(map, "solver.num_eigenvalues")? {
        settings.num_eigenvalues = k;
    }
    if let Some(k) = count(map, "solver.u0_order")? {
        settings.u0_order = Some(k);
    }
    if let Some(j) = count(map, "solver.J_regularization")? {
        settings.powers.j_regularization = j;
    }
    if let Some(b) = flag(map, "solver.strict")? {
        settings.powers.strict = b;
    }
    if let Some(b) = flag(map, "solver.real_mode")? {
        settings.real_mode = b;
    }
    if let Some(b) = flag(map, "solver.trust_radii")? {
        settings.trust_radii = b;
    }
    if let Some(t) = get(map, "solver.tail_model") {
        settings.tail_model = match t {
            "exponential" => TailModel::Exponential,
            "majorant" => TailModel::Majorant,
            "none" => TailModel::None,
            _ => return Err(CliError::parse(format!("unknown tail model `{t}`"))),
        };
    }

    let strategy = StrategyParams {
        kind: get(map, "solver.strategy").map(str::parse).transpose()?,
        shift: get(map, "solver.shift").map(parse_pair).transpose()?,
        offset: cplx(map, "solver.offset")?.unwrap_or_default(),
        delta: cplx(map, "solver.delta")?,
    };
    // surface a missing shift or delta while reading the file
    strategy.resolve()?;
    Ok(ProblemFile {
        spec,
        settings,
        strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BESSEL: &str = "
        # comment
        l = 0.25
        a = 1
        q = 0      # unperturbed
        solver.N = 40
        solver.strategy = linear
        solver.shift = 50,2
    ";

    #[test]
    fn flat_file() {
        let f = parse(BESSEL).unwrap();
        assert_eq!(f.spec.l, 0.25);
        assert_eq!(f.settings.n, 40);
        assert_eq!(
            f.resolved_settings().unwrap().strategy,
            Strategy::LinearSchedule {
                step: Complex64::new(50.0, 2.0),
                offset: Complex64::new(0.0, 0.0)
            }
        );
    }

    #[test]
    fn json_matches_flat() {
        let j = r#"{"l": 0.25, "a": 1, "q": "0", "solver": {"N": 40, "strategy": "linear", "shift": "50,2"}}"#;
        let a = parse(BESSEL).unwrap();
        let b = parse(j).unwrap();
        assert_eq!(a.spec, b.spec);
        assert_eq!(a.strategy, b.strategy);
        assert_eq!(a.settings.n, b.settings.n);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(parse("l = 0\na = 1\nfoo = 2"), Err(CliError::Parse(m)) if m.contains("foo")));
        assert!(matches!(parse("l = 0\na = 1\nsolver.n = 2"), Err(CliError::Parse(_))));
        assert!(matches!(parse("l = 0\nl = 1\na = 1"), Err(CliError::Parse(m)) if m.contains("duplicate")));
        assert!(parse(r#"{"l": 0, "a": 1, "solver": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn constants_and_literals() {
        let f = parse("l = 5/4 - 1\na = pi\nbeta = 0\ngamma = 1-0.5i\nsolver.delta = -i").unwrap();
        assert_eq!(f.spec.l, 0.25);
        assert!((f.spec.a - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(f.spec.gamma, Complex64::new(1.0, -0.5));
        assert_eq!(
            f.resolved_settings().unwrap().strategy,
            Strategy::AdaptiveChain {
                delta: Complex64::new(0.0, -1.0)
            }
        );
    }

    #[test]
    fn expression_errors_carry_offsets() {
        let e = parse("l = 0\na = 1\nq = 1/(x+").unwrap_err();
        assert!(e.to_string().contains("byte"), "{e}");
        assert_eq!(e.exit_code(), crate::exit::PARSE);
    }

    #[test]
    fn missing_pieces() {
        assert!(parse("a = 1").is_err());
        assert!(parse("l = 0\na = 1\nsolver.strategy = linear").is_err());
        assert!(parse("l = 0\na = 1\nu0 = x").is_err());
    }
}
