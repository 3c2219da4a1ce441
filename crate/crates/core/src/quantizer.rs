//! Event-triggered interval quantization of a continuous scalar signal,
//! compiled to a finite machine.
//!
//! A continuous signal can leave the interval of its current symbol only
//! through an exit endpoint; that value triggers the next event and the next
//! symbol is any other symbol whose interval contains it. In [`Mode::Point`]
//! the machine state is the signal value at the event instant. In
//! [`Mode::Set`] the state covers the whole step between two events, so it
//! stands for every value of the current symbol's interval.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automata::{Fsm, StateSet};
use crate::error::{Error, Result};
use crate::interval::{format_rational, rational_serde, Interval, IntervalSet, Rational};
use crate::relations::{reach_past_at_indices, recent_past_indices};
use crate::word::{Symbol, Word};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Point-to-point time scale: one instant per external step.
    #[default]
    Point,
    /// Set-to-point time scale: a whole time interval per external step.
    Set,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "point" => Ok(Mode::Point),
            "set" => Ok(Mode::Set),
            other => Err(Error::Invalid(format!("unknown mode `{other}` (expected point or set)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub domain: Interval,
    pub symbols: BTreeMap<Symbol, Interval>,
    #[serde(serialize_with = "ser_values", deserialize_with = "de_values")]
    pub initial_values: Vec<Rational>,
    #[serde(default)]
    pub mode: Mode,
}

fn ser_values<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(rational_serde::to_value).collect::<Vec<_>>().serialize(s)
}

fn de_values<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
    let raw = Vec::<serde_json::Value>::deserialize(d)?;
    raw.iter().map(|v| rational_serde::from_value(v).map_err(serde::de::Error::custom)).collect()
}

impl QuantizerSpec {
    /// Symbols whose interval contains `v`.
    pub fn symbols_at(&self, v: &Rational) -> Vec<Symbol> {
        self.symbols.iter().filter(|(_, i)| i.contains(v)).map(|(s, _)| s.clone()).collect()
    }

    fn interval(&self, g: &Symbol) -> Result<&Interval> {
        self.symbols.get(g).ok_or_else(|| Error::UnknownSymbol(g.to_string()))
    }

    /// Endpoints through which a continuous signal in `I_g` can leave it.
    /// A closed endpoint on the closed boundary of the domain is not an
    /// exit: the signal cannot go beyond it.
    pub fn exit_points(&self, g: &Symbol) -> Result<Vec<Rational>> {
        let i = self.interval(g)?;
        let d = &self.domain;
        let mut exits = Vec::new();
        if d.contains(&i.lo) && (!i.lo_closed || i.lo != d.lo) {
            exits.push(i.lo);
        }
        if i.hi != i.lo && d.contains(&i.hi) && (!i.hi_closed || i.hi != d.hi) {
            exits.push(i.hi);
        }
        Ok(exits)
    }
}

/// Structural problems that would block compilation. Empty means the spec
/// is usable.
pub fn validate(spec: &QuantizerSpec) -> Vec<String> {
    let mut diags = Vec::new();
    if spec.symbols.is_empty() {
        diags.push("no symbols declared".to_string());
    }
    for (g, i) in &spec.symbols {
        if !spec.domain.contains_interval(i) {
            diags.push(format!("symbol `{g}`: interval {i} is not inside the domain {}", spec.domain));
        }
    }
    if spec.initial_values.is_empty() {
        diags.push("no initial values".to_string());
    }
    for v in &spec.initial_values {
        if !spec.domain.contains(v) {
            diags.push(format!("initial value {} lies outside the domain", format_rational(v)));
        } else if spec.symbols_at(v).is_empty() {
            diags.push(format!("initial value {} is covered by no symbol", format_rational(v)));
        }
    }
    let mut any_exit = false;
    for g in spec.symbols.keys() {
        for e in spec.exit_points(g).unwrap_or_default() {
            any_exit = true;
            if !spec.symbols.iter().any(|(h, i)| h != g && i.contains(&e)) {
                diags.push(format!(
                    "symbol `{g}`: exit point {} is not covered by any other symbol interval",
                    format_rational(&e)
                ));
            }
        }
    }
    if !any_exit && !spec.symbols.is_empty() {
        diags.push("no exit endpoints: external behavior has no events".to_string());
    }
    diags
}

/// `(exit value, next symbol)` pairs for leaving `I_g`.
pub fn exit_successors(spec: &QuantizerSpec, g: &Symbol) -> Result<BTreeSet<(Rational, Symbol)>> {
    let mut out = BTreeSet::new();
    for e in spec.exit_points(g)? {
        for (h, i) in &spec.symbols {
            if h != g && i.contains(&e) {
                out.insert((e, h.clone()));
            }
        }
    }
    Ok(out)
}

/// A quantizer compiled to a trimmed machine, with the set of signal values
/// each machine state stands for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledSystem {
    pub fsm: Fsm,
    pub concretize: BTreeMap<String, IntervalSet>,
    pub mode: Mode,
}

impl CompiledSystem {
    pub fn concretize_set(&self, set: &StateSet) -> IntervalSet {
        set.iter()
            .filter_map(|&s| self.concretize.get(self.fsm.state_name(s)).cloned())
            .collect()
    }
}

/// Compiles a validated spec. Transition labels are the symbol current
/// during the step, so the path language is the external behavior.
pub fn compile(spec: &QuantizerSpec) -> Result<CompiledSystem> {
    let diags = validate(spec);
    if !diags.is_empty() {
        return Err(Error::Blocking(diags));
    }
    let alphabet: Vec<Symbol> = spec.symbols.keys().cloned().collect();
    let mut edges: BTreeSet<(String, Symbol, String)> = BTreeSet::new();
    let mut concretize = BTreeMap::new();
    let initial: BTreeSet<String>;
    match spec.mode {
        Mode::Point => {
            let mut seen: BTreeSet<Rational> = spec.initial_values.iter().copied().collect();
            let mut queue: VecDeque<Rational> = seen.iter().copied().collect();
            initial = seen.iter().map(format_rational).collect();
            while let Some(v) = queue.pop_front() {
                concretize.insert(format_rational(&v), IntervalSet::points([v]));
                for g in spec.symbols_at(&v) {
                    for (e, _) in exit_successors(spec, &g)? {
                        edges.insert((format_rational(&v), g.clone(), format_rational(&e)));
                        if seen.insert(e) {
                            queue.push_back(e);
                        }
                    }
                }
            }
        }
        Mode::Set => {
            let start: BTreeSet<Symbol> = spec.initial_values.iter().flat_map(|v| spec.symbols_at(v)).collect();
            initial = start.iter().map(|g| g.to_string()).collect();
            let mut seen = start.clone();
            let mut queue: VecDeque<Symbol> = start.into_iter().collect();
            while let Some(g) = queue.pop_front() {
                concretize.insert(g.to_string(), IntervalSet::from_parts(vec![*spec.interval(&g)?]));
                for (_, h) in exit_successors(spec, &g)? {
                    edges.insert((g.to_string(), g.clone(), h.to_string()));
                    if seen.insert(h.clone()) {
                        queue.push_back(h);
                    }
                }
            }
        }
    }
    let raw = Fsm::new(alphabet, concretize.keys().cloned(), initial, edges)?;
    let fsm = raw.trim()?;
    concretize.retain(|name, _| fsm.state_index(name).is_some());
    Ok(CompiledSystem { fsm, concretize, mode: spec.mode })
}

/// `X^ζ` concretized: signal values compatible with the recent past `ζ`
/// at some step `k ≥ |ζ|`.
pub fn reach_past(cs: &CompiledSystem, zeta: &Word) -> Result<IntervalSet> {
    Ok(cs.concretize_set(&recent_past_indices(&cs.fsm, zeta)?))
}

/// `X^{k,ζ}` concretized.
pub fn reach_past_at(cs: &CompiledSystem, k: usize, zeta: &Word) -> Result<IntervalSet> {
    Ok(cs.concretize_set(&reach_past_at_indices(&cs.fsm, k, zeta)?))
}
