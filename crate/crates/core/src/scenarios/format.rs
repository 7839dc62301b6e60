//! Scenario file format.
//!
//! ```text
//! # comment
//! name = my-scenario
//! ambient_m = 2
//! declared_ranks = 4, 1          # or: none
//!
//! [chart]
//! builtin = twisted-graph        # or: kind = polynomial, k = <n>
//! params = 1, 0.3, ...           # builtin parameters, in catalog order
//! domain = -1, 1, -1, 1, ...     # lo, hi per chart axis
//! term = <output>, <coef>, <e1>, ..., <ek>   # polynomial monomial, repeatable
//!
//! [grid]
//! counts = 3, 3, 3, 3, 3
//! margin = 0.25
//!
//! [tolerances]
//! verdict = 1e-6
//! identity = 1e-5
//! curvature = 1e-5
//!
//! [leaf_charts]
//! d = 0, 1, 2, 3                 # or: none
//! dperp = 4
//! ```
//!
//! Keys may also be written with their section as a dotted prefix at top
//! level (`chart.builtin = qr-linear`). A file naming a builtin starts from
//! that builtin's defaults; every other key overrides them.

use std::fmt::Write as _;

use thiserror::Error;

use super::catalog::{builtin, family};
use super::{leaf, ChartSpec, GridSpec, PolyTerm, ScenarioSpec, ToleranceOverrides};
use crate::crgeom::Distribution;
use crate::fd::FdConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for '{field}': {message}")]
    Semantic { field: String, message: String },
}

fn semantic(field: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Semantic {
        field: field.to_string(),
        message: message.into(),
    }
}

const SECTIONS: [&str; 4] = ["chart", "grid", "tolerances", "leaf_charts"];

const KEYS: [&str; 16] = [
    "name",
    "ambient_m",
    "declared_ranks",
    "chart.builtin",
    "chart.kind",
    "chart.k",
    "chart.params",
    "chart.domain",
    "chart.term",
    "grid.counts",
    "grid.margin",
    "tolerances.verdict",
    "tolerances.identity",
    "tolerances.curvature",
    "leaf_charts.d",
    "leaf_charts.dperp",
];

struct Entry {
    key: String,
    value: String,
}

fn lex(text: &str) -> Result<Vec<Entry>, ScenarioError> {
    let mut section: Option<String> = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ScenarioError::Syntax {
                    line: line_no,
                    column: indent + trimmed.len(),
                    message: "section header must end with ']'".into(),
                });
            };
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(ScenarioError::Syntax {
                    line: line_no,
                    column: indent + 2,
                    message: format!("unknown section '{name}'"),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ScenarioError::Syntax {
                line: line_no,
                column: indent + 1,
                message: "expected 'key = value'".into(),
            });
        };
        let key = line[..eq].trim();
        if key.is_empty() {
            return Err(ScenarioError::Syntax {
                line: line_no,
                column: eq + 1,
                message: "missing key before '='".into(),
            });
        }
        if let Some(pos) = key
            .chars()
            .position(|c| !(c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-'))
        {
            return Err(ScenarioError::Syntax {
                line: line_no,
                column: indent + pos + 1,
                message: format!("invalid character in key '{key}'"),
            });
        }
        let value = line[eq + 1..].trim();
        if value.is_empty() {
            return Err(ScenarioError::Syntax {
                line: line_no,
                column: eq + 2,
                message: "missing value after '='".into(),
            });
        }
        let full = match &section {
            Some(s) if !key.contains('.') => format!("{s}.{key}"),
            _ => key.to_string(),
        };
        out.push(Entry {
            key: full,
            value: value.to_string(),
        });
    }
    Ok(out)
}

fn parse_f64(field: &str, s: &str) -> Result<f64, ScenarioError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| semantic(field, format!("'{}' is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(semantic(field, "value must be finite"));
    }
    Ok(v)
}

fn parse_usize(field: &str, s: &str) -> Result<usize, ScenarioError> {
    s.trim()
        .parse()
        .map_err(|_| semantic(field, format!("'{}' is not a non-negative integer", s.trim())))
}

fn list<T>(field: &str, s: &str, f: fn(&str, &str) -> Result<T, ScenarioError>) -> Result<Vec<T>, ScenarioError> {
    s.split(',').map(|x| f(field, x)).collect()
}

fn positive(field: &str, s: &str) -> Result<f64, ScenarioError> {
    let v = parse_f64(field, s)?;
    if v <= 0.0 {
        return Err(semantic(field, "value must be positive"));
    }
    Ok(v)
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let entries = lex(text)?;
    let mut seen: Vec<&str> = Vec::new();
    for e in &entries {
        if !KEYS.contains(&e.key.as_str()) {
            return Err(semantic(&e.key, "unknown key"));
        }
        if e.key != "chart.term" {
            if seen.contains(&e.key.as_str()) {
                return Err(semantic(&e.key, "key given more than once"));
            }
            seen.push(&e.key);
        }
    }
    let get = |k: &str| entries.iter().find(|e| e.key == k).map(|e| e.value.as_str());
    let terms: Vec<&str> = entries
        .iter()
        .filter(|e| e.key == "chart.term")
        .map(|e| e.value.as_str())
        .collect();

    let mut spec = match (get("chart.builtin"), get("chart.kind")) {
        (Some(name), None) | (Some(name), Some("builtin")) => {
            builtin(name).ok_or_else(|| semantic("chart.builtin", format!("unknown builtin '{name}'")))?
        }
        (None, Some("polynomial")) => {
            let m = parse_usize(
                "ambient_m",
                get("ambient_m").ok_or_else(|| semantic("ambient_m", "required"))?,
            )?;
            let k = parse_usize(
                "chart.k",
                get("chart.k").ok_or_else(|| semantic("chart.k", "required"))?,
            )?;
            if k == 0 {
                return Err(semantic("chart.k", "must be at least 1"));
            }
            ScenarioSpec {
                name: "polynomial".into(),
                ambient_m: m,
                chart: ChartSpec::Polynomial { k, terms: Vec::new() },
                domain: vec![(-1.0, 1.0); k],
                grid: GridSpec {
                    counts: vec![if k <= 2 { 7 } else { 3 }; k],
                    margin: 0.25,
                },
                declared_ranks: None,
                leaf_charts: Vec::new(),
                tolerances: ToleranceOverrides::default(),
            }
        }
        (Some(_), Some(_)) => return Err(semantic("chart.kind", "a builtin chart cannot also set kind")),
        (None, Some(other)) => return Err(semantic("chart.kind", format!("unknown chart kind '{other}'"))),
        (None, None) => {
            return Err(semantic(
                "chart",
                "either chart.builtin or chart.kind = polynomial is required",
            ))
        }
    };
    let builtin_chart = matches!(spec.chart, ChartSpec::Builtin { .. });

    if let Some(v) = get("name") {
        spec.name = v.to_string();
    }
    if let Some(v) = get("ambient_m") {
        let m = parse_usize("ambient_m", v)?;
        if builtin_chart && m != spec.ambient_m {
            return Err(semantic("ambient_m", format!("builtin lives in H^{}", spec.ambient_m)));
        }
        spec.ambient_m = m;
    }
    if spec.ambient_m == 0 {
        return Err(semantic("ambient_m", "must be at least 1"));
    }
    if let Some(v) = get("declared_ranks") {
        spec.declared_ranks = if v == "none" {
            None
        } else {
            let r = list("declared_ranks", v, parse_usize)?;
            if r.len() != 2 {
                return Err(semantic("declared_ranks", "expected two integers: rank D, rank D-perp"));
            }
            Some((r[0], r[1]))
        };
    }
    if let Some(v) = get("chart.k") {
        if builtin_chart {
            return Err(semantic("chart.k", "only polynomial charts set k"));
        }
        let _ = parse_usize("chart.k", v)?;
    }
    if let Some(v) = get("chart.params") {
        let ChartSpec::Builtin { family: name, params } = &mut spec.chart else {
            return Err(semantic("chart.params", "only builtin charts take parameters"));
        };
        let fam = family(name).expect("builtin resolved above");
        let p = if v == "none" {
            Vec::new()
        } else {
            list("chart.params", v, parse_f64)?
        };
        if p.len() != fam.params.len() {
            return Err(semantic(
                "chart.params",
                format!("'{}' takes {} parameters, got {}", fam.name, fam.params.len(), p.len()),
            ));
        }
        *params = p;
    }
    let k = spec.k();
    if let Some(v) = get("chart.domain") {
        let d = list("chart.domain", v, parse_f64)?;
        if d.len() != 2 * k {
            return Err(semantic(
                "chart.domain",
                format!("expected {} numbers (lo, hi per axis)", 2 * k),
            ));
        }
        let pairs: Vec<(f64, f64)> = d.chunks(2).map(|c| (c[0], c[1])).collect();
        if pairs.iter().any(|(lo, hi)| lo >= hi) {
            return Err(semantic("chart.domain", "every interval needs lo < hi"));
        }
        spec.domain = pairs;
    }
    if !terms.is_empty() {
        let ChartSpec::Polynomial { terms: out, .. } = &mut spec.chart else {
            return Err(semantic("chart.term", "only polynomial charts take terms"));
        };
        for t in terms {
            let parts: Vec<&str> = t.split(',').collect();
            if parts.len() != k + 2 {
                return Err(semantic(
                    "chart.term",
                    format!("expected output, coef and {k} exponents"),
                ));
            }
            let output = parse_usize("chart.term", parts[0])?;
            if output >= 4 * spec.ambient_m {
                return Err(semantic(
                    "chart.term",
                    format!("output index {output} outside H^{}", spec.ambient_m),
                ));
            }
            let coef = parse_f64("chart.term", parts[1])?;
            let exponents = parts[2..]
                .iter()
                .map(|e| parse_usize("chart.term", e).map(|x| x as u32))
                .collect::<Result<_, _>>()?;
            out.push(PolyTerm {
                output,
                coef,
                exponents,
            });
        }
    }
    if let Some(v) = get("grid.counts") {
        let c = list("grid.counts", v, parse_usize)?;
        if c.len() != k || c.contains(&0) {
            return Err(semantic("grid.counts", format!("expected {k} positive counts")));
        }
        spec.grid.counts = c;
    }
    if let Some(v) = get("grid.margin") {
        spec.grid.margin = parse_f64("grid.margin", v)?;
    }
    let reach = FdConfig::default().reach();
    if spec.grid.margin < reach {
        return Err(semantic(
            "grid.margin",
            format!(
                "margin {} is below the finite-difference reach {reach}",
                spec.grid.margin
            ),
        ));
    }
    if spec.domain.iter().any(|(lo, hi)| hi - lo < 2.0 * spec.grid.margin) {
        return Err(semantic("grid.margin", "margin leaves no room inside the domain"));
    }
    if let Some(v) = get("tolerances.verdict") {
        spec.tolerances.verdict = Some(positive("tolerances.verdict", v)?);
    }
    if let Some(v) = get("tolerances.identity") {
        spec.tolerances.identity = Some(positive("tolerances.identity", v)?);
    }
    if let Some(v) = get("tolerances.curvature") {
        spec.tolerances.curvature = Some(positive("tolerances.curvature", v)?);
    }
    for (key, which) in [
        ("leaf_charts.d", Distribution::D),
        ("leaf_charts.dperp", Distribution::Dperp),
    ] {
        if let Some(v) = get(key) {
            spec.leaf_charts.retain(|l| l.distribution != which);
            if v != "none" {
                let coords = list(key, v, parse_usize)?;
                if coords.is_empty() || coords.iter().any(|&c| c >= k) {
                    return Err(semantic(key, format!("coordinates must lie in 0..{k}")));
                }
                spec.leaf_charts.push(leaf(which, &coords));
            }
        }
    }
    spec.leaf_charts.sort_by_key(|l| l.distribution == Distribution::Dperp);
    if let Some((d, dp)) = spec.declared_ranks {
        if !d.is_multiple_of(4) || d + dp != k {
            return Err(semantic(
                "declared_ranks",
                format!("rank D must be a multiple of 4 and the ranks must add up to {k}"),
            ));
        }
    }
    Ok(spec)
}

fn join<T: std::fmt::Debug>(xs: &[T]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Writes a spec in the scenario file format; `parse_scenario` of the output
/// reproduces the spec exactly.
pub fn serialize(spec: &ScenarioSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", spec.name);
    let _ = writeln!(s, "ambient_m = {}", spec.ambient_m);
    match spec.declared_ranks {
        Some((d, p)) => {
            let _ = writeln!(s, "declared_ranks = {d}, {p}");
        }
        None => {
            let _ = writeln!(s, "declared_ranks = none");
        }
    }
    s.push_str("\n[chart]\n");
    match &spec.chart {
        ChartSpec::Builtin { family, params } => {
            let _ = writeln!(s, "builtin = {family}");
            if params.is_empty() {
                s.push_str("params = none\n");
            } else {
                let _ = writeln!(s, "params = {}", join(params));
            }
        }
        ChartSpec::Polynomial { k, terms } => {
            let _ = writeln!(s, "kind = polynomial");
            let _ = writeln!(s, "k = {k}");
            for t in terms {
                let _ = writeln!(s, "term = {}, {:?}, {}", t.output, t.coef, join(&t.exponents));
            }
        }
    }
    let flat: Vec<f64> = spec.domain.iter().flat_map(|&(a, b)| [a, b]).collect();
    let _ = writeln!(s, "domain = {}", join(&flat));
    s.push_str("\n[grid]\n");
    let _ = writeln!(s, "counts = {}", join(&spec.grid.counts));
    let _ = writeln!(s, "margin = {:?}", spec.grid.margin);
    let t = &spec.tolerances;
    if t.verdict.is_some() || t.identity.is_some() || t.curvature.is_some() {
        s.push_str("\n[tolerances]\n");
        for (k, v) in [
            ("verdict", t.verdict),
            ("identity", t.identity),
            ("curvature", t.curvature),
        ] {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v:?}");
            }
        }
    }
    s.push_str("\n[leaf_charts]\n");
    for (k, which) in [("d", Distribution::D), ("dperp", Distribution::Dperp)] {
        match spec.leaf_charts.iter().find(|l| l.distribution == which) {
            Some(l) => {
                let _ = writeln!(s, "{k} = {}", join(&l.coords));
            }
            None => {
                let _ = writeln!(s, "{k} = none");
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_builtin_file() {
        let spec = parse_scenario("chart.builtin = qr-linear\n").unwrap();
        assert_eq!(spec, builtin("qr-linear").unwrap());
    }

    #[test]
    fn section_form_and_overrides() {
        let text = "name = x\n[chart]\nbuiltin = circle\nparams = 2.0 # radius\n[grid]\ncounts = 5\n";
        let spec = parse_scenario(text).unwrap();
        assert_eq!(spec.name, "x");
        assert_eq!(spec.grid.counts, vec![5]);
        assert_eq!(
            spec.chart,
            ChartSpec::Builtin {
                family: "circle".into(),
                params: vec![2.0]
            }
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_scenario("chart.builtin = plane\n  oops\n").unwrap_err();
        assert_eq!(
            e,
            ScenarioError::Syntax {
                line: 2,
                column: 3,
                message: "expected 'key = value'".into()
            }
        );
        let e = parse_scenario("[charts]\n").unwrap_err();
        assert!(matches!(e, ScenarioError::Syntax { line: 1, column: 2, .. }));
        let e = parse_scenario("na$me = 3\n").unwrap_err();
        assert!(matches!(e, ScenarioError::Syntax { line: 1, column: 3, .. }));
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let field = |t: &str| match parse_scenario(t).unwrap_err() {
            ScenarioError::Semantic { field, .. } => field,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(field("chart.builtin = plane\ngrid.margin = 0.001\n"), "grid.margin");
        assert_eq!(field("chart.builtin = plane\ncolour = red\n"), "colour");
        assert_eq!(field("chart.builtin = nope\n"), "chart.builtin");
        assert_eq!(field("chart.builtin = circle\nchart.params = inf\n"), "chart.params");
        assert_eq!(field("name = a\n"), "chart");
        assert_eq!(field("chart.builtin = plane\n[leaf_charts]\nd = 7\n"), "leaf_charts.d");
    }

    #[test]
    fn polynomial_round_trip() {
        let text = "name = p\nambient_m = 1\n[chart]\nkind = polynomial\nk = 2\nterm = 0, 1, 1, 0\nterm = 1, 1, 0, 1\nterm = 2, 0.5, 2, 0\n";
        let spec = parse_scenario(text).unwrap();
        let again = parse_scenario(&serialize(&spec)).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn builtin_round_trip_without_leaves() {
        let mut spec = builtin("q-times-circle").unwrap();
        spec.leaf_charts.clear();
        spec.declared_ranks = None;
        spec.tolerances.identity = Some(3e-5);
        assert_eq!(parse_scenario(&serialize(&spec)).unwrap(), spec);
    }
}
