//! Browser bindings for the `lcabs` library. The plain functions take and
//! return JSON strings so they can be tested natively; the `wasm` module
//! exports them to JavaScript.

use std::collections::BTreeMap;

use lcabs::cli::{load_system, System};
use lcabs::interval::Interval;
use lcabs::lcomplete::approximate_system;
use lcabs::quantizer::{Mode, QuantizerSpec};
use lcabs::relations::{build_rl, recent_pasts_of_length};
use lcabs::simcheck::similarity_report;
use lcabs::windows::extract_windows;
use serde_json::{json, Value};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_mode(mode: &str) -> Result<Option<Mode>, String> {
    if mode.is_empty() {
        Ok(None)
    } else {
        mode.parse().map(Some).map_err(err)
    }
}

fn load(input: &str, mode: &str) -> Result<System, String> {
    load_system(input, parse_mode(mode)?).map_err(err)
}

fn interval_json(i: &Interval) -> Value {
    let f = |r: &lcabs::interval::Rational| *r.numer() as f64 / *r.denom() as f64;
    json!({ "lo": f(&i.lo), "hi": f(&i.hi), "lo_closed": i.lo_closed, "hi_closed": i.hi_closed })
}

fn machine_json(m: &lcabs::Fsm) -> Value {
    json!({
        "states": m.states(),
        "initial": m.initial_names(),
        "transitions": m.transitions().map(|(s, a, d)| [s, a.as_str(), d]).collect::<Vec<_>>(),
    })
}

/// Compiles a quantizer spec and lists its windows, its recent-past sets of
/// length `l` and the signal values they stand for.
pub fn quantize(spec_json: &str, mode: &str, l: usize) -> Result<String, String> {
    let mut spec: QuantizerSpec = serde_json::from_str(spec_json).map_err(err)?;
    if let Some(m) = parse_mode(mode)? {
        spec.mode = m;
    }
    let sys = load(&serde_json::to_string(&spec).map_err(err)?, "")?;
    let cs = sys.compiled.expect("quantizer input");
    let symbols: BTreeMap<String, Value> =
        spec.symbols.iter().map(|(g, i)| (g.to_string(), interval_json(i))).collect();
    let reach: BTreeMap<String, String> = recent_pasts_of_length(&cs.fsm, l)
        .iter()
        .map(|(past, states)| (past.to_string(), cs.concretize_set(states).to_string()))
        .collect();
    let out = json!({
        "domain": interval_json(&spec.domain),
        "symbols": symbols,
        "machine": machine_json(&cs.fsm),
        "concretization": cs.concretize.iter().map(|(k, v)| (k.clone(), v.to_string())).collect::<BTreeMap<_, _>>(),
        "windows": extract_windows(&cs.fsm, l),
        "reach": reach,
    });
    serde_json::to_string(&out).map_err(err)
}

/// The l-complete approximation of a machine or quantizer spec, with the
/// relation `R_l` linking system states to approximation states.
pub fn approximate(input_json: &str, mode: &str, l: usize) -> Result<String, String> {
    let sys = load(input_json, mode)?;
    let approx = approximate_system(&sys.fsm, l).map_err(err)?;
    let rl = build_rl(&sys.fsm, &approx).map_err(err)?;
    let out = json!({
        "system": machine_json(&sys.fsm),
        "approximation": machine_json(approx.fsm()),
        "dot": approx.fsm().to_dot(),
        "rl": rl.pairs,
    });
    serde_json::to_string(&out).map_err(err)
}

/// Checks every similarity claim between the system and its approximation.
pub fn report(input_json: &str, mode: &str, l: usize) -> Result<String, String> {
    let sys = load(input_json, mode)?;
    let report = similarity_report(&sys.fsm, l).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    fn js(r: Result<String, String>) -> Result<String, JsError> {
        r.map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen]
    pub fn quantize(spec_json: &str, mode: &str, l: usize) -> Result<String, JsError> {
        js(super::quantize(spec_json, mode, l))
    }

    #[wasm_bindgen]
    pub fn approximate(input_json: &str, mode: &str, l: usize) -> Result<String, JsError> {
        js(super::approximate(input_json, mode, l))
    }

    #[wasm_bindgen]
    pub fn report(input_json: &str, mode: &str, l: usize) -> Result<String, JsError> {
        js(super::report(input_json, mode, l))
    }
}
