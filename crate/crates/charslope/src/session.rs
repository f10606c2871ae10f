//! Session input parsing/validation and command execution. JSON is the single
//! interchange format; all numeric invariants are emitted as exact rational
//! strings, never floats.

use crate::error::{Error, Result};
use crate::field::{FElem, FieldSpec};
use crate::geometry::{enumerate_coord_points, Center, Chart, CoordPoint, DivisorEntry, DivisorLedger};
use crate::order::rat_string;
use crate::order::ExtOrder;
use crate::poly::Poly;
use crate::presentation::PPresentation;
use crate::rees::{monomial_order_at, resolve_monomial};
use crate::transform::{
    blowup_presentation, lift_and_resolve, monomial_contact_check, strong_monomial_test,
    well_adapted_after_transform_check, ChartState,
};
use crate::verify::verify_suite;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A field coefficient in the input: an integer mod p for m = 1, or the
/// coefficient vector over the modulus basis for m > 1.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum CoefIn {
    Int(u32),
    Vector(Vec<u32>),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct TermIn {
    pub c: CoefIn,
    pub exp: Vec<u32>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DivisorIn {
    pub var: String,
    pub h: u64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct LedgerIn {
    pub s: u64,
    pub divisors: Vec<DivisorIn>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PipelineCmd {
    pub cmd: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SessionInput {
    pub p: u32,
    #[serde(default = "default_m")]
    pub m: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
    pub e: u32,
    pub vars: Vec<String>,
    #[serde(default = "default_z")]
    pub z: String,
    /// keys "1" ... "p^e"; omitted coefficients are zero
    pub coeffs: BTreeMap<String, Vec<TermIn>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger: Option<LedgerIn>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipeline: Vec<PipelineCmd>,
}

fn default_m() -> u32 {
    1
}

fn default_z() -> String {
    "z".into()
}

pub fn parse_input(text: &str) -> Result<SessionInput> {
    let session: SessionInput = serde_json::from_str(text).map_err(|err| Error::Parse {
        location: format!("line {} column {}", err.line(), err.column()),
        message: err.to_string(),
    })?;
    validate(&session)?;
    Ok(session)
}

fn parse_err(location: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn validate(s: &SessionInput) -> Result<()> {
    // field validity (primality, modulus irreducibility) is checked by the
    // field constructors; surface their diagnostics with locations
    build_field(s).map_err(|err| parse_err("/p", err.to_string()))?;
    if s.e == 0 {
        return Err(parse_err("/e", "e must be at least 1"));
    }
    let pe = (s.p as u64).checked_pow(s.e).filter(|&v| v <= 256);
    let pe = pe.ok_or_else(|| parse_err("/e", "p^e too large for desk scale (max 256)"))?;
    if s.vars.is_empty() {
        return Err(parse_err("/vars", "at least one downstairs variable"));
    }
    let mut names = s.vars.clone();
    names.push(s.z.clone());
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != names.len() {
        return Err(parse_err("/vars", "variable names must be unique"));
    }
    for (key, terms) in &s.coeffs {
        let loc = format!("/coeffs/{}", key);
        let idx: u64 = key
            .parse()
            .map_err(|_| parse_err(&loc, "coefficient index must be an integer"))?;
        if idx == 0 || idx > pe {
            return Err(parse_err(&loc, format!("index out of range 1..={}", pe)));
        }
        for (t, term) in terms.iter().enumerate() {
            if term.exp.len() != s.vars.len() {
                return Err(parse_err(
                    &format!("{}/{}/exp", loc, t),
                    format!("expected {} exponents", s.vars.len()),
                ));
            }
            if let CoefIn::Vector(v) = &term.c {
                if v.len() > s.m as usize {
                    return Err(parse_err(
                        &format!("{}/{}/c", loc, t),
                        "coefficient vector longer than the field degree",
                    ));
                }
            }
        }
    }
    if let Some(ledger) = &s.ledger {
        if ledger.s == 0 {
            return Err(parse_err("/ledger/s", "s must be positive"));
        }
        for (i, d) in ledger.divisors.iter().enumerate() {
            if !s.vars.contains(&d.var) {
                return Err(parse_err(
                    &format!("/ledger/divisors/{}/var", i),
                    format!("unknown variable {:?}", d.var),
                ));
            }
        }
    }
    for (i, cmd) in s.pipeline.iter().enumerate() {
        let known = [
            "analyze",
            "clean",
            "blowup",
            "resolve",
            "resolve-monomial",
            "verify",
        ];
        if !known.contains(&cmd.cmd.as_str()) {
            return Err(parse_err(
                &format!("/pipeline/{}/cmd", i),
                format!("unknown command {:?}", cmd.cmd),
            ));
        }
    }
    Ok(())
}

fn build_field(s: &SessionInput) -> Result<Arc<FieldSpec>> {
    match (&s.modulus, s.m) {
        (None, 1) => FieldSpec::prime(s.p),
        (None, _) => Err(Error::BadModulus(s.m)),
        (Some(modulus), m) => FieldSpec::new(s.p, m, modulus.clone()),
    }
}

fn coef_elem(field: &Arc<FieldSpec>, c: &CoefIn) -> FElem {
    match c {
        CoefIn::Int(n) => field.from_u32(*n),
        CoefIn::Vector(v) => field.from_coeffs(v),
    }
}

/// Materialize the validated session as a chart state.
pub fn to_state(s: &SessionInput) -> Result<ChartState> {
    let field = build_field(s)?;
    let pe = (s.p as u64).pow(s.e) as usize;
    let nvars = s.vars.len();
    let mut coeffs = vec![Poly::zero(&field, nvars); pe];
    for (key, terms) in &s.coeffs {
        let idx: usize = key.parse().unwrap();
        let mut poly = Poly::zero(&field, nvars);
        for term in terms {
            let t = Poly::term(&field, nvars, coef_elem(&field, &term.c), term.exp.clone());
            poly = poly.add(&t)?;
        }
        coeffs[idx - 1] = poly;
    }
    let pres = PPresentation::new(&field, s.e, nvars, coeffs)?;
    let ledger = match &s.ledger {
        None => DivisorLedger::empty(pe as u64),
        Some(l) => DivisorLedger {
            s: l.s,
            entries: l
                .divisors
                .iter()
                .enumerate()
                .map(|(i, d)| DivisorEntry {
                    id: i as u64,
                    carrier: Some(s.vars.iter().position(|v| *v == d.var).unwrap()),
                    h: d.h,
                })
                .collect(),
        },
    };
    let chart = Chart::new(0, s.vars.clone(), s.z.clone())?;
    Ok(ChartState {
        chart,
        pres,
        ledger,
    })
}

pub fn parse_point(state: &ChartState, names: &[String]) -> Result<CoordPoint> {
    let mut vars = Vec::new();
    for n in names {
        let i = state
            .chart
            .vars
            .iter()
            .position(|v| v == n)
            .ok_or_else(|| Error::Precondition(format!("unknown variable {:?}", n)))?;
        vars.push(i);
    }
    if vars.is_empty() {
        return Err(Error::Precondition("a point needs at least one variable".into()));
    }
    Ok(CoordPoint::new(vars))
}

pub fn parse_center(state: &ChartState, names: &[String]) -> Result<Center> {
    let mut include_z = false;
    let mut vars = Vec::new();
    for n in names {
        if *n == state.chart.z_name {
            include_z = true;
            continue;
        }
        let i = state
            .chart
            .vars
            .iter()
            .position(|v| v == n)
            .ok_or_else(|| Error::Precondition(format!("unknown variable {:?}", n)))?;
        vars.push(i);
    }
    Ok(Center::new(include_z, vars))
}

fn point_row(state: &ChartState, pt: &CoordPoint) -> Result<Value> {
    let (cleaned, _) = state.pres.clean_at(pt)?;
    let slope = cleaned.slope_at(pt);
    let case = cleaned.adaptation_case(pt)?;
    let singular = slope >= ExtOrder::int(1);
    let mut row = json!({
        "point": pt.label(&state.chart.vars),
        "slope": slope.to_string(),
        "case": format!("{:?}", case),
        "singular": singular,
        "monomial_order": rat_string(&monomial_order_at(&state.ledger, pt)),
    });
    if singular {
        row["v_ord"] = Value::String(slope.to_string());
        if pt.is_origin(state.pres.nvars) {
            if let Ok(verdict) = strong_monomial_test(&cleaned, &state.ledger, pt) {
                row["smc"] = serde_json::to_value(&verdict).unwrap();
            }
        }
    }
    Ok(row)
}

pub fn run_analyze(state: &ChartState, point: Option<&CoordPoint>) -> Result<Value> {
    let pts: Vec<CoordPoint> = match point {
        Some(p) => vec![p.clone()],
        None => enumerate_coord_points(state.pres.nvars),
    };
    let mut rows = Vec::new();
    for pt in &pts {
        rows.push(point_row(state, pt)?);
    }
    let (minimal, origin_singular) = state.pres.sing_locus()?;
    Ok(json!({
        "command": "analyze",
        "chart": state.chart.id,
        "rows": rows,
        "sing_locus": minimal
            .iter()
            .map(|p| p.label(&state.chart.vars))
            .collect::<Vec<_>>(),
        "origin_singular": origin_singular,
    }))
}

pub fn run_clean(state: &ChartState, point: Option<&CoordPoint>) -> Result<(ChartState, Value)> {
    let origin = CoordPoint::origin(state.pres.nvars);
    let pt = point.cloned().unwrap_or(origin);
    let (cleaned, log) = state.pres.clean_at(&pt)?;
    let passes: Vec<Value> = log
        .iter()
        .map(|pass| {
            json!({
                "case": format!("{:?}", pass.case),
                "alpha": pass.alpha.display(&state.chart.vars),
                "slope_before": pass.slope_before.to_string(),
                "slope_after": pass.slope_after.to_string(),
            })
        })
        .collect();
    let value = json!({
        "command": "clean",
        "point": pt.label(&state.chart.vars),
        "passes": passes,
        "coefficients": render_coeffs(&cleaned, &state.chart.vars),
        "final_case": format!("{:?}", cleaned.adaptation_case(&pt)?),
    });
    let new_state = ChartState {
        chart: state.chart.clone(),
        pres: cleaned,
        ledger: state.ledger.clone(),
    };
    Ok((new_state, value))
}

fn render_coeffs(pres: &PPresentation, names: &[String]) -> Value {
    let mut map = serde_json::Map::new();
    for (i, a) in pres.coeffs.iter().enumerate() {
        if !a.is_zero() {
            map.insert(format!("{}", i + 1), Value::String(a.display(names)));
        }
    }
    Value::Object(map)
}

fn render_ledger(ledger: &DivisorLedger, names: &[String]) -> Value {
    json!({
        "s": ledger.s,
        "divisors": ledger
            .entries
            .iter()
            .map(|e| {
                json!({
                    "id": e.id,
                    "carrier": e.carrier.map(|v| names[v].clone()),
                    "h": e.h,
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn run_blowup(
    state: &ChartState,
    center: &Center,
) -> Result<(Vec<ChartState>, Value)> {
    let mut next_id = state.chart.id + 1;
    let (children, record) = blowup_presentation(state, center, &mut next_id)?;
    let mut charts = Vec::new();
    for child in &children {
        let cv = child.chart.history.last().unwrap().chart_var;
        let exc = CoordPoint::new(vec![cv]);
        let contact = monomial_contact_check(&child.pres, &child.ledger)?;
        charts.push(json!({
            "chart": child.chart.id,
            "chart_var": child.chart.vars[cv],
            "coefficients": render_coeffs(&child.pres, &child.chart.vars),
            "ledger": render_ledger(&child.ledger, &child.chart.vars),
            "slope_at_exceptional": child.pres.slope_at(&exc).to_string(),
            "well_adapted_and_slope_drop":
                well_adapted_after_transform_check(child, cv, record.slope_value)?,
            "monomial_contact": contact.pass,
        }));
    }
    let value = json!({
        "command": "blowup",
        "record": serde_json::to_value(&record).unwrap(),
        "charts": charts,
    });
    Ok((children, value))
}

pub fn run_resolve(state: &ChartState) -> Result<Value> {
    let report = lift_and_resolve(state)?;
    Ok(json!({
        "command": "resolve",
        "centers": report
            .centers
            .iter()
            .map(|vars| center_label(state, vars))
            .collect::<Vec<_>>(),
        "records": serde_json::to_value(&report.records).unwrap(),
        "leaves": serde_json::to_value(&report.leaves).unwrap(),
    }))
}

fn center_label(state: &ChartState, vars: &[usize]) -> String {
    let mut parts = vec![state.chart.z_name.clone()];
    parts.extend(vars.iter().map(|&v| state.chart.vars[v].clone()));
    format!("<{}>", parts.join(","))
}

pub fn run_resolve_monomial(state: &ChartState) -> Result<Value> {
    let res = resolve_monomial(&state.ledger)?;
    Ok(json!({
        "command": "resolve-monomial",
        "steps": res
            .steps
            .iter()
            .map(|step| {
                json!({
                    "chart_path": step.chart_path,
                    "center": step
                        .center_vars
                        .iter()
                        .map(|&v| state.chart.vars[v].clone())
                        .collect::<Vec<_>>(),
                })
            })
            .collect::<Vec<_>>(),
        "leaves": res
            .leaves
            .iter()
            .map(|(path, ledger)| {
                json!({
                    "chart_path": path,
                    "ledger": render_ledger(ledger, &state.chart.vars),
                })
            })
            .collect::<Vec<_>>(),
    }))
}

/// Returns the report and whether every instance passed.
pub fn run_verify(suite: &str, seed: u64, count: usize) -> Result<(Value, bool)> {
    let rep = verify_suite(suite, seed, count)?;
    let ok = rep.ok();
    Ok((
        json!({
            "command": "verify",
            "report": serde_json::to_value(&rep).unwrap(),
        }),
        ok,
    ))
}

/// Execute the session's scripted pipeline: state-changing commands (clean,
/// blowup, resolve) update the working set of charts; the rest report on it.
pub fn run_pipeline(session: &SessionInput) -> Result<(Value, bool)> {
    let mut states = vec![to_state(session)?];
    let mut fragments = Vec::new();
    let mut all_ok = true;
    for cmd in &session.pipeline {
        match cmd.cmd.as_str() {
            "analyze" => {
                for st in &states {
                    let pt = match &cmd.point {
                        Some(names) => Some(parse_point(st, names)?),
                        None => None,
                    };
                    fragments.push(run_analyze(st, pt.as_ref())?);
                }
            }
            "clean" => {
                let mut next = Vec::new();
                for st in &states {
                    let pt = match &cmd.point {
                        Some(names) => Some(parse_point(st, names)?),
                        None => None,
                    };
                    let (st2, value) = run_clean(st, pt.as_ref())?;
                    fragments.push(value);
                    next.push(st2);
                }
                states = next;
            }
            "blowup" => {
                let names = cmd.center.as_ref().ok_or_else(|| {
                    Error::Precondition("blowup needs a center".into())
                })?;
                let mut next = Vec::new();
                for st in &states {
                    let center = parse_center(st, names)?;
                    let (children, value) = run_blowup(st, &center)?;
                    fragments.push(value);
                    next.extend(children);
                }
                states = next;
            }
            "resolve" => {
                for st in &states {
                    fragments.push(run_resolve(st)?);
                }
            }
            "resolve-monomial" => {
                for st in &states {
                    fragments.push(run_resolve_monomial(st)?);
                }
            }
            "verify" => {
                let suite = cmd.suite.as_deref().ok_or_else(|| {
                    Error::Precondition("verify needs a suite name".into())
                })?;
                let (value, ok) =
                    run_verify(suite, cmd.seed.unwrap_or(42), cmd.count.unwrap_or(100))?;
                all_ok &= ok;
                fragments.push(value);
            }
            other => {
                return Err(Error::Precondition(format!("unknown command {:?}", other)))
            }
        }
    }
    Ok((
        json!({ "command": "pipeline", "fragments": fragments }),
        all_ok,
    ))
}

/// Derived human-readable rendering of a report value; never parsed back.
pub fn render_text(value: &Value) -> String {
    let mut out = String::new();
    render_text_inner(value, 0, &mut out);
    out
}

fn render_text_inner(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{}{}:\n", pad, k));
                        render_text_inner(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{}{}: {}\n", pad, k, scalar(v))),
                }
            }
        }
        Value::Array(items) => {
            for v in items {
                match v {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{}-\n", pad));
                        render_text_inner(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{}- {}\n", pad, scalar(v))),
                }
            }
        }
        other => out.push_str(&format!("{}{}\n", pad, scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUSP: &str = r#"{
        "p": 2, "e": 1, "vars": ["x"],
        "coeffs": { "2": [ { "c": 1, "exp": [3] } ] }
    }"#;

    #[test]
    fn parse_minimal_cusp() {
        let s = parse_input(CUSP).unwrap();
        let st = to_state(&s).unwrap();
        assert_eq!(st.pres.coeffs.len(), 2);
        let v = run_analyze(&st, None).unwrap();
        let row = &v["rows"][0];
        assert_eq!(row["slope"], "3/2");
        assert_eq!(row["case"], "B1");
        assert_eq!(row["v_ord"], "3/2");
        assert_eq!(row["singular"], true);
    }

    #[test]
    fn rejects_bad_inputs() {
        let nonprime = r#"{"p": 4, "e": 1, "vars": ["x"], "coeffs": {}}"#;
        assert!(matches!(parse_input(nonprime), Err(Error::Parse { .. })));
        let badledger = r#"{
            "p": 2, "e": 1, "vars": ["x"],
            "coeffs": { "2": [ { "c": 1, "exp": [3] } ] },
            "ledger": { "s": 2, "divisors": [ { "var": "w", "h": 1 } ] }
        }"#;
        assert!(matches!(parse_input(badledger), Err(Error::Parse { .. })));
        let badidx = r#"{"p": 2, "e": 1, "vars": ["x"], "coeffs": {"3": []}}"#;
        assert!(matches!(parse_input(badidx), Err(Error::Parse { .. })));
        let badarity = r#"{
            "p": 2, "e": 1, "vars": ["x"],
            "coeffs": { "2": [ { "c": 1, "exp": [3, 1] } ] }
        }"#;
        assert!(matches!(parse_input(badarity), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_serialization() {
        let s = parse_input(CUSP).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let again = parse_input(&text).unwrap();
        assert_eq!(
            serde_json::to_value(&s).unwrap(),
            serde_json::to_value(&again).unwrap()
        );
    }

    #[test]
    fn blowup_command_on_cusp() {
        let s = parse_input(CUSP).unwrap();
        let st = to_state(&s).unwrap();
        let center = parse_center(&st, &["z".into(), "x".into()]).unwrap();
        let (children, value) = run_blowup(&st, &center).unwrap();
        assert_eq!(children.len(), 1);
        assert_eq!(value["charts"][0]["slope_at_exceptional"], "1/2");
        assert_eq!(value["charts"][0]["well_adapted_and_slope_drop"], true);
        assert_eq!(value["charts"][0]["monomial_contact"], true);
    }

    #[test]
    fn no_floats_in_reports() {
        let s = parse_input(CUSP).unwrap();
        let st = to_state(&s).unwrap();
        let v = run_analyze(&st, None).unwrap();
        fn scan(v: &Value) {
            match v {
                Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "float leaked: {}", n),
                Value::Array(items) => items.iter().for_each(scan),
                Value::Object(map) => map.values().for_each(scan),
                Value::String(s) => {
                    assert!(!s.contains("e-") && !s.contains("e+"), "sci notation: {}", s)
                }
                _ => {}
            }
        }
        scan(&v);
    }
}
