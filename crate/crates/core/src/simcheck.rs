//! Simulation checking between finite machines with unit time scales, and
//! the combined report relating a system to its l-complete approximation.
//!
//! For machines the step condition of a simulation relation reduces to the
//! familiar one: whenever `(x₁, x₂) ∈ R` and `x₁ -σ-> x₁'`, some
//! `x₂ -σ-> x₂'` has `(x₁', x₂') ∈ R`. The state property of machine
//! behaviors lets any matching continuation be stitched onto the shared
//! past, so checking single steps is enough. The flavors differ only in
//! which states must be covered by the relation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automata::{Fsm, Lasso, StateSet};
use crate::error::{Error, Result};
use crate::lcomplete::{approximate_system, is_l_complete, ApproxMachine, Completeness};
use crate::relations::{build_r0, build_rl, build_rx, Relation};
use crate::word::{Symbol, Word};
use crate::Status;

/// Which states a simulation relation has to cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimFlavor {
    /// Every reachable state.
    Asynchronous,
    /// Every state occupied at step `k`, by a state occupied at step `k`.
    ExternallySynchronous,
    /// Same as externally synchronous when both time scales are the identity.
    Synchronous,
    /// States occupied at step `l`.
    Initial(usize),
}

impl fmt::Display for SimFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimFlavor::Asynchronous => f.write_str("async"),
            SimFlavor::ExternallySynchronous => f.write_str("e-sync"),
            SimFlavor::Synchronous => f.write_str("sync"),
            SimFlavor::Initial(l) => write!(f, "{l}-initial"),
        }
    }
}

impl FromStr for SimFlavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "async" | "asynchronous" => Ok(SimFlavor::Asynchronous),
            "e-sync" | "esync" | "externally-synchronous" => Ok(SimFlavor::ExternallySynchronous),
            "sync" | "synchronous" => Ok(SimFlavor::Synchronous),
            other => other
                .strip_suffix("-initial")
                .and_then(|n| n.parse().ok())
                .map(SimFlavor::Initial)
                .ok_or_else(|| Error::Invalid(format!("unknown simulation flavor `{other}`"))),
        }
    }
}

impl Serialize for SimFlavor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SimFlavor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// The left state makes a move the right state cannot match inside `R`.
    Step,
    /// The left state is not covered by any admissible right state.
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: ViolationKind,
    pub left: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Symbol>,
    /// Word leading the left machine from an initial state to `left`.
    pub replay: Word,
    /// Word leading the right machine from an initial state to `right`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_replay: Option<Word>,
    /// External step at which coverage fails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<SimFlavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Relation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn pass(relation: &Relation, flavor: Option<SimFlavor>) -> Self {
        Verdict { status: Status::Pass, flavor, certificate: Some(relation.clone()), counterexample: None }
    }

    fn fail(cx: Counterexample, flavor: Option<SimFlavor>) -> Self {
        Verdict { status: Status::Fail, flavor, certificate: None, counterexample: Some(cx) }
    }
}

/// Pairs of `R` by index, rejecting unknown and unreachable states.
fn resolve(r: &Relation, sys1: &Fsm, sys2: &Fsm) -> Result<BTreeSet<(usize, usize)>> {
    let reach1 = sys1.reachable();
    let reach2 = sys2.reachable();
    let lookup = |m: &Fsm, reach: &StateSet, name: &str| -> Result<usize> {
        let ix = m.state_index(name).ok_or_else(|| Error::UnknownState(name.to_string()))?;
        if !reach.contains(&ix) {
            return Err(Error::UnreachableState(name.to_string()));
        }
        Ok(ix)
    };
    r.pairs
        .iter()
        .map(|(a, b)| Ok((lookup(sys1, &reach1, a)?, lookup(sys2, &reach2, b)?)))
        .collect()
}

/// Checks the step condition at every pair. Violations are searched
/// symbol by symbol, then by pair, so the reported one is the first in that
/// order.
pub fn check_step(r: &Relation, sys1: &Fsm, sys2: &Fsm) -> Result<Verdict> {
    let pairs = resolve(r, sys1, sys2)?;
    let mut ordered: Vec<(usize, usize)> = pairs.iter().copied().collect();
    ordered.sort_by(|a, b| {
        (sys1.state_name(a.0), sys2.state_name(a.1)).cmp(&(sys1.state_name(b.0), sys2.state_name(b.1)))
    });
    for (a, sym) in sys1.alphabet().iter().enumerate() {
        let b = sys2.symbol_index(sym);
        for &(x1, x2) in &ordered {
            let targets2: StateSet = b.map(|b| sys2.post(&[x2].into(), b)).unwrap_or_default();
            let unmatched = sys1
                .post(&[x1].into(), a)
                .into_iter()
                .any(|y1| !targets2.iter().any(|&y2| pairs.contains(&(y1, y2))));
            if unmatched {
                let cx = Counterexample {
                    kind: ViolationKind::Step,
                    left: sys1.state_name(x1).to_string(),
                    right: Some(sys2.state_name(x2).to_string()),
                    symbol: Some(sym.clone()),
                    replay: sys1.shortest_word_to(x1).expect("reachable"),
                    right_replay: sys2.shortest_word_to(x2),
                    step: None,
                };
                return Ok(Verdict::fail(cx, None));
            }
        }
    }
    Ok(Verdict::pass(r, None))
}

fn coverage_failure(
    pairs: &BTreeSet<(usize, usize)>,
    sys1: &Fsm,
    left: &StateSet,
    right: &StateSet,
) -> Option<usize> {
    let mut uncovered: Vec<usize> = left
        .iter()
        .copied()
        .filter(|&x1| !right.iter().any(|&x2| pairs.contains(&(x1, x2))))
        .collect();
    uncovered.sort_by_key(|&x| sys1.state_name(x).to_string());
    uncovered.first().copied()
}

/// Checks the covering condition of `flavor`.
pub fn check_initial(r: &Relation, sys1: &Fsm, sys2: &Fsm, flavor: SimFlavor) -> Result<Verdict> {
    let pairs = resolve(r, sys1, sys2)?;
    let coverage = |x1: usize, step: Option<usize>| Counterexample {
        kind: ViolationKind::Coverage,
        left: sys1.state_name(x1).to_string(),
        right: None,
        symbol: None,
        replay: match step {
            Some(k) => sys1.word_reaching_at(x1, k).expect("occupied at step"),
            None => sys1.shortest_word_to(x1).expect("reachable"),
        },
        right_replay: None,
        step,
    };
    match flavor {
        SimFlavor::Initial(l) => {
            let left = sys1.reachable_at_indices(l);
            let right = sys2.reachable_at_indices(l);
            if let Some(x1) = coverage_failure(&pairs, sys1, &left, &right) {
                return Ok(Verdict::fail(coverage(x1, Some(l)), Some(flavor)));
            }
        }
        SimFlavor::Asynchronous => {
            if let Some(x1) = coverage_failure(&pairs, sys1, &sys1.reachable(), &sys2.reachable()) {
                return Ok(Verdict::fail(coverage(x1, None), Some(flavor)));
            }
        }
        SimFlavor::ExternallySynchronous | SimFlavor::Synchronous => {
            // (X¹_k, X²_k) is eventually periodic; one lasso covers every k.
            let lasso = Lasso::detect((sys1.initial().clone(), sys2.initial().clone()), |(a, b)| {
                (sys1.post_any(a), sys2.post_any(b))
            });
            for (k, (left, right)) in lasso.values().iter().enumerate() {
                if let Some(x1) = coverage_failure(&pairs, sys1, left, right) {
                    return Ok(Verdict::fail(coverage(x1, Some(k)), Some(flavor)));
                }
            }
        }
    }
    Ok(Verdict::pass(r, Some(flavor)))
}

/// Coverage for `flavor` together with the step condition.
pub fn check_relation(r: &Relation, sys1: &Fsm, sys2: &Fsm, flavor: SimFlavor) -> Result<Verdict> {
    let init = check_initial(r, sys1, sys2, flavor)?;
    if !init.passed() {
        return Ok(init);
    }
    let mut step = check_step(r, sys1, sys2)?;
    step.flavor = Some(flavor);
    Ok(step)
}

/// Largest relation over reachable states satisfying the step condition.
pub fn greatest_simulation(sys1: &Fsm, sys2: &Fsm) -> Relation {
    let reach2 = sys2.reachable();
    let mut rel: HashSet<(usize, usize)> =
        sys1.reachable().iter().flat_map(|&a| reach2.iter().map(move |&b| (a, b))).collect();
    let sym_map: Vec<Option<usize>> = sys1.alphabet().iter().map(|s| sys2.symbol_index(s)).collect();
    loop {
        let doomed: Vec<(usize, usize)> = rel
            .iter()
            .copied()
            .filter(|&(x1, x2)| {
                sys1.outgoing(x1).iter().any(|&(a, y1)| match sym_map[a] {
                    None => true,
                    Some(b) => !sys2.outgoing(x2).iter().any(|&(c, y2)| c == b && rel.contains(&(y1, y2))),
                })
            })
            .collect();
        if doomed.is_empty() {
            break;
        }
        for p in doomed {
            rel.remove(&p);
        }
    }
    Relation::custom(rel.into_iter().map(|(a, b)| (sys1.state_name(a).to_string(), sys2.state_name(b).to_string())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemResult {
    pub item: String,
    pub claim: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Relation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Word of the approximation the system cannot produce.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Word>,
}

impl ItemResult {
    fn from_verdict(item: &str, claim: String, v: &Verdict) -> Self {
        ItemResult {
            item: item.to_string(),
            claim,
            status: v.status,
            certificate: v.certificate.clone(),
            counterexample: v.counterexample.clone(),
            witness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Premises {
    pub l_complete: Completeness,
    /// `R_X` as an l-initial simulation of the system by itself.
    pub rx: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub l: usize,
    pub approximation: ApproxMachine,
    pub items: Vec<ItemResult>,
    pub premises: Premises,
    /// `R_l⁻¹` checked directly from the approximation to the system.
    pub rl_inverse: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SimilarityReport {
    pub fn item(&self, id: &str) -> Option<&ItemResult> {
        self.items.iter().find(|i| i.item == id)
    }

    pub fn statuses(&self) -> BTreeMap<String, Status> {
        self.items.iter().map(|i| (i.item.clone(), i.status)).collect()
    }
}

/// Builds the approximation and the canonical relations for a trimmed
/// system and checks every similarity claim between them.
///
/// Errors with [`Error::InternalInconsistency`] when
/// `complete ∧ R_X ∈ SR_l` and `R_l⁻¹ ∈ SR_l` disagree.
pub fn similarity_report(sys: &Fsm, l: usize) -> Result<SimilarityReport> {
    let approx = approximate_system(sys, l)?;
    let am = approx.fsm();
    let r0 = build_r0(sys, &approx)?;
    let rl = build_rl(sys, &approx)?;
    let rx = build_rx(sys, l);

    let mut items = Vec::new();
    for (id, flavor) in [
        ("i", SimFlavor::Initial(0)),
        ("ii", SimFlavor::ExternallySynchronous),
        ("iii", SimFlavor::Asynchronous),
        ("iv", SimFlavor::Synchronous),
    ] {
        let v = check_relation(&r0, sys, am, flavor)?;
        items.push(ItemResult::from_verdict(id, format!("R0 is a {flavor} simulation relation"), &v));
    }
    let rl_v = check_relation(&rl, sys, am, SimFlavor::Initial(l))?;
    items.push(ItemResult::from_verdict("v", format!("Rl is a {l}-initial simulation relation"), &rl_v));

    let complete = is_l_complete(sys, l)?;
    let rx_v = check_relation(&rx, sys, sys, SimFlavor::Initial(l))?;
    let rl_inv = check_relation(&rl.inverse(), am, sys, SimFlavor::Initial(l))?;
    let premise = complete.status == Status::Pass && rx_v.passed();
    if premise != rl_inv.passed() {
        return Err(Error::InternalInconsistency(format!(
            "l = {l}: completeness {:?} and RX {:?}, but inverse Rl {:?}",
            complete.status, rx_v.status, rl_inv.status
        )));
    }
    let bisim = premise && rl_v.passed();
    items.push(ItemResult {
        item: "vi".into(),
        claim: format!("system and approximation are {l}-initially bisimilar via Rl"),
        status: if bisim { Status::Pass } else { Status::Fail },
        certificate: bisim.then(|| rl.clone()),
        counterexample: rx_v.counterexample.clone().or_else(|| rl_inv.counterexample.clone()),
        witness: complete.witness.clone(),
    });

    let mut notes = Vec::new();
    if complete.status == Status::Pass && !rx_v.passed() {
        notes.push(format!(
            "behavior is {l}-complete, but states sharing a recent past of length {l} do not share their futures"
        ));
    }
    if complete.status == Status::Fail {
        notes.push(format!("behavior is not {l}-complete; the approximation adds behavior"));
    }
    Ok(SimilarityReport {
        l,
        approximation: approx,
        items,
        premises: Premises { l_complete: complete, rx: rx_v },
        rl_inverse: rl_inv,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::word::w;

    fn setup() -> (Fsm, Fsm, Relation) {
        let sys = fork();
        let approx = approximate_system(&sys, 1).unwrap();
        let rl = build_rl(&sys, &approx).unwrap();
        (sys, approx.into_fsm(), rl)
    }

    #[test]
    fn rl_passes_step() {
        let (sys, approx, rl) = setup();
        assert!(check_step(&rl, &sys, &approx).unwrap().passed());
    }

    #[test]
    fn inverse_rl_fails_at_a_x3_b() {
        let (sys, approx, rl) = setup();
        let v = check_step(&rl.inverse(), &approx, &sys).unwrap();
        let cx = v.counterexample.unwrap();
        assert_eq!((cx.left.as_str(), cx.right.as_deref()), ("a", Some("x3")));
        assert_eq!(cx.symbol.unwrap().as_str(), "b");
        assert_eq!(cx.replay, w("a"));
        assert_eq!(cx.right_replay, Some(w("a")));
    }

    #[test]
    fn identity_self_simulation() {
        for m in [fork(), fork_approx(), quantizer_approx(), aab_cycle()] {
            let id = Relation::custom(m.states().iter().map(|s| (s.clone(), s.clone())));
            assert!(check_step(&id, &m, &m).unwrap().passed());
        }
    }

    #[test]
    fn initial_coverage() {
        let (sys, approx, rl) = setup();
        assert!(check_initial(&rl, &sys, &approx, SimFlavor::Initial(1)).unwrap().passed());
        let v = check_initial(&Relation::custom([]), &sys, &approx, SimFlavor::Initial(1)).unwrap();
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.kind, ViolationKind::Coverage);
        assert_eq!(cx.left, "x1");
        assert_eq!(cx.step, Some(1));
    }

    #[test]
    fn inverse_rl_is_not_a_one_initial_simulation() {
        let (sys, approx, rl) = setup();
        assert!(!check_relation(&rl.inverse(), &approx, &sys, SimFlavor::Initial(1)).unwrap().passed());
        assert!(check_relation(&rl, &sys, &approx, SimFlavor::Initial(1)).unwrap().passed());
    }

    #[test]
    fn unknown_and_unreachable_states_rejected() {
        let (sys, approx, _) = setup();
        let bad = Relation::from_strs(&[("x9", "a")]);
        assert!(matches!(check_step(&bad, &sys, &approx), Err(Error::UnknownState(_))));
        let extended = Fsm::from_strs(
            &["a", "b", "c"],
            &["x1", "x2", "x3", "x4"],
            &["x2"],
            &[("x2", "a", "x1"), ("x1", "b", "x2"), ("x2", "a", "x3"), ("x3", "c", "x2"), ("x4", "a", "x2")],
        )
        .unwrap();
        let r = Relation::from_strs(&[("x4", "a")]);
        assert!(matches!(check_step(&r, &extended, &approx), Err(Error::UnreachableState(_))));
    }

    #[test]
    fn greatest_simulation_examples() {
        let (sys, approx, rl) = setup();
        assert!(rl.is_subset(&greatest_simulation(&sys, &approx)));
        let back = greatest_simulation(&approx, &sys);
        assert!(!back.contains("a", "x3"));
        let m = quantizer_approx();
        let id = Relation::custom(m.states().iter().map(|s| (s.clone(), s.clone())));
        assert!(id.is_subset(&greatest_simulation(&m, &m)));
    }

    #[test]
    fn report_on_fork() {
        let report = similarity_report(&fork(), 1).unwrap();
        for id in ["i", "ii", "iii", "iv", "v"] {
            assert_eq!(report.item(id).unwrap().status, Status::Pass, "item {id}");
        }
        let vi = report.item("vi").unwrap();
        assert_eq!(vi.status, Status::Fail);
        assert_eq!(report.premises.l_complete.status, Status::Pass);
        let cx = vi.counterexample.as_ref().unwrap();
        assert_eq!((cx.left.as_str(), cx.right.as_deref()), ("x1", Some("x3")));
    }

    #[test]
    fn report_on_aab_cycle() {
        let one = similarity_report(&aab_cycle(), 1).unwrap();
        assert_eq!(one.item("vi").unwrap().status, Status::Fail);
        assert_eq!(one.premises.l_complete.status, Status::Fail);
        assert_eq!(one.item("vi").unwrap().witness, Some(w("a a a")));
        let two = similarity_report(&aab_cycle(), 2).unwrap();
        assert_eq!(two.item("vi").unwrap().status, Status::Pass);
        assert!(two.statuses().values().all(|s| *s == Status::Pass));
    }

    #[test]
    fn flavor_strings() {
        for f in [SimFlavor::Asynchronous, SimFlavor::ExternallySynchronous, SimFlavor::Synchronous, SimFlavor::Initial(3)] {
            assert_eq!(f.to_string().parse::<SimFlavor>().unwrap(), f);
        }
        assert!("bogus".parse::<SimFlavor>().is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let (sys, approx, rl) = setup();
        let v = check_step(&rl.inverse(), &approx, &sys).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["status"], "fail");
        assert_eq!(json["counterexample"]["left"], "a");
        assert_eq!(json["counterexample"]["right"], "x3");
        assert_eq!(json["counterexample"]["symbol"], "b");
        assert_eq!(json["counterexample"]["replay"], "a");
    }
}
