//! Recent-past state sets and the canonical relations `R₀`, `R_l`, `R_X`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::automata::{Fsm, StateSet};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::lcomplete::ApproxMachine;
use crate::quantizer::CompiledSystem;
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    R0,
    Rl,
    RX,
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub flavor: Flavor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Set when the pairs were swapped relative to `flavor`'s definition.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inverse: bool,
    pub pairs: BTreeSet<(String, String)>,
    /// Signal values of the system-side states, when the system came from a
    /// quantizer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concretization: Option<BTreeMap<String, IntervalSet>>,
}

impl Relation {
    pub fn custom(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        Relation { flavor: Flavor::Custom, l: None, inverse: false, pairs: pairs.into_iter().collect(), concretization: None }
    }

    pub fn from_strs(pairs: &[(&str, &str)]) -> Self {
        Relation::custom(pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())))
    }

    pub fn inverse(&self) -> Relation {
        Relation {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            inverse: !self.inverse,
            ..self.clone()
        }
    }

    pub fn contains(&self, left: &str, right: &str) -> bool {
        self.pairs.contains(&(left.to_string(), right.to_string()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Attaches the signal values of the system-side states.
    pub fn with_concretization(mut self, cs: &CompiledSystem) -> Self {
        let side: BTreeSet<&String> =
            self.pairs.iter().map(|(a, b)| if self.inverse { b } else { a }).collect();
        self.concretization = Some(
            cs.concretize.iter().filter(|(k, _)| side.contains(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        );
        self
    }

    /// Right-hand states grouped with the union of the concretizations of
    /// their left partners.
    pub fn concretized_by_right(&self) -> BTreeMap<String, IntervalSet> {
        let Some(conc) = &self.concretization else { return BTreeMap::new() };
        let mut out: BTreeMap<String, IntervalSet> = BTreeMap::new();
        for (a, b) in &self.pairs {
            if let Some(v) = conc.get(a) {
                let entry = out.entry(b.clone()).or_default();
                *entry = entry.union(v);
            }
        }
        out
    }
}

/// `X^{k,ζ}` by index.
pub fn reach_past_at_indices(m: &Fsm, k: usize, zeta: &Word) -> Result<StateSet> {
    if k < zeta.len() {
        return Err(Error::Invalid(format!("step {k} is shorter than the past `{zeta}`")));
    }
    let start = m.reachable_at_indices(k - zeta.len());
    m.post_word(&start, zeta)
}

/// `X^{k,ζ}`: states occupied at step `k` right after reading `ζ`.
pub fn reach_past_at(m: &Fsm, k: usize, zeta: &Word) -> Result<BTreeSet<String>> {
    Ok(m.names(&reach_past_at_indices(m, k, zeta)?))
}

/// `X^ζ = ⋃_{k ≥ |ζ|} X^{k,ζ}` by index. The union over `k` is taken over
/// one lasso of the sequence `k ↦ X_k`.
pub fn recent_past_indices(m: &Fsm, zeta: &Word) -> Result<StateSet> {
    let lasso = m.reach_lasso();
    let occupied: StateSet = lasso.values().iter().flatten().copied().collect();
    m.post_word(&occupied, zeta)
}

pub fn recent_past(m: &Fsm, zeta: &Word) -> Result<BTreeSet<String>> {
    Ok(m.names(&recent_past_indices(m, zeta)?))
}

/// `X^ζ` for every `ζ` of length `l` that has a nonempty one.
pub fn recent_pasts_of_length(m: &Fsm, l: usize) -> BTreeMap<Word, StateSet> {
    let mut layer: BTreeSet<(Vec<usize>, usize)> = m.reachable().into_iter().map(|s| (Vec::new(), s)).collect();
    for _ in 0..l {
        layer = layer
            .iter()
            .flat_map(|(labels, s)| {
                m.outgoing(*s).iter().map(move |&(a, d)| {
                    let mut next = labels.clone();
                    next.push(a);
                    (next, d)
                })
            })
            .collect();
    }
    let mut out: BTreeMap<Word, StateSet> = BTreeMap::new();
    for (labels, s) in layer {
        let word = Word::from_symbols(labels.into_iter().map(|a| m.symbol(a).clone()).collect());
        out.entry(word).or_default().insert(s);
    }
    out
}

/// `R₀`: anchored approximation states pair with the states reached at
/// exactly that step; steady ones with every state sharing their past.
pub fn build_r0(sys: &Fsm, approx: &ApproxMachine) -> Result<Relation> {
    let mut pairs = BTreeSet::new();
    for (id, rp) in approx.pasts() {
        let related = if rp.anchored {
            reach_past_at_indices(sys, rp.past.len(), &rp.past)?
        } else {
            recent_past_indices(sys, &rp.past)?
        };
        pairs.extend(related.into_iter().map(|s| (sys.state_name(s).to_string(), id.clone())));
    }
    Ok(Relation { flavor: Flavor::R0, l: Some(approx.l()), inverse: false, pairs, concretization: None })
}

/// `R_l`: the part of `R₀` on approximation states with a past of length `l`.
pub fn build_rl(sys: &Fsm, approx: &ApproxMachine) -> Result<Relation> {
    let r0 = build_r0(sys, approx)?;
    let l = approx.l();
    let pairs = r0
        .pairs
        .into_iter()
        .filter(|(_, z)| approx.recent_past(z).is_some_and(|rp| rp.past.len() == l))
        .collect();
    Ok(Relation { flavor: Flavor::Rl, l: Some(l), inverse: false, pairs, concretization: None })
}

/// `R_X`: pairs of system states that share some recent past of length `l`.
pub fn build_rx(sys: &Fsm, l: usize) -> Relation {
    let mut pairs = BTreeSet::new();
    for states in recent_pasts_of_length(sys, l).values() {
        for &a in states {
            for &b in states {
                pairs.insert((sys.state_name(a).to_string(), sys.state_name(b).to_string()));
            }
        }
    }
    Relation { flavor: Flavor::RX, l: Some(l), inverse: false, pairs, concretization: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;
    use crate::lcomplete::approximate_system;
    use crate::quantizer::{compile, Mode};
    use crate::word::w;

    fn names(list: &[&str]) -> BTreeSet<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn reach_past_at_examples() {
        let m = fork();
        assert_eq!(reach_past_at(&m, 0, &Word::empty()).unwrap(), names(&["x2"]));
        assert_eq!(reach_past_at(&m, 1, &w("a")).unwrap(), names(&["x1", "x3"]));
        let cs = compile(&example_quantizer(Mode::Point)).unwrap();
        assert_eq!(reach_past_at(&cs.fsm, 1, &w("m2")).unwrap(), names(&["-4"]));
        assert!(reach_past_at(&m, 0, &w("a")).is_err());
    }

    #[test]
    fn recent_past_is_union_over_steps() {
        let m = fork();
        for z in ["a", "b", "c", "a b", "b a"] {
            let union: BTreeSet<String> =
                (w(z).len()..12).flat_map(|k| reach_past_at(&m, k, &w(z)).unwrap()).collect();
            assert_eq!(recent_past(&m, &w(z)).unwrap(), union, "ζ = {z}");
        }
    }

    #[test]
    fn r0_on_fork() {
        let m = fork();
        let approx = approximate_system(&m, 1).unwrap();
        let r0 = build_r0(&m, &approx).unwrap();
        let expected = Relation::from_strs(&[("x2", "^"), ("x1", "a"), ("x3", "a"), ("x2", "b"), ("x2", "c")]);
        assert_eq!(r0.pairs, expected.pairs);
    }

    #[test]
    fn r0_at_zero_pairs_everything_with_empty_past() {
        let m = fork();
        let approx = approximate_system(&m, 0).unwrap();
        let r0 = build_r0(&m, &approx).unwrap();
        let expected = Relation::from_strs(&[("x2", "^"), ("x1", "^+"), ("x2", "^+"), ("x3", "^+")]);
        assert_eq!(r0.pairs, expected.pairs);
        assert_eq!(build_rl(&m, &approx).unwrap().pairs, r0.pairs);
    }

    #[test]
    fn r0_on_point_quantizer() {
        let cs = compile(&example_quantizer(Mode::Point)).unwrap();
        let approx = approximate_system(&cs.fsm, 1).unwrap();
        let r0 = build_r0(&cs.fsm, &approx).unwrap();
        for (a, b) in [("-10", "^"), ("10", "^"), ("-4", "m2"), ("4", "p2")] {
            assert!(r0.contains(a, b), "missing ({a}, {b})");
        }
    }

    #[test]
    fn rl_examples() {
        let cs = compile(&example_quantizer(Mode::Point)).unwrap();
        let approx = approximate_system(&cs.fsm, 1).unwrap();
        let rl = build_rl(&cs.fsm, &approx).unwrap();
        let expected =
            Relation::from_strs(&[("-4", "m2"), ("-6", "m1"), ("1", "m1"), ("-1", "p1"), ("6", "p1"), ("4", "p2")]);
        assert_eq!(rl.pairs, expected.pairs);

        let m = fork();
        let rl = build_rl(&m, &approximate_system(&m, 1).unwrap()).unwrap();
        assert_eq!(rl.pairs, Relation::from_strs(&[("x1", "a"), ("x3", "a"), ("x2", "b"), ("x2", "c")]).pairs);
    }

    #[test]
    fn rl_on_set_quantizer_concretizes() {
        let cs = compile(&example_quantizer(Mode::Set)).unwrap();
        let approx = approximate_system(&cs.fsm, 1).unwrap();
        let rl = build_rl(&cs.fsm, &approx).unwrap().with_concretization(&cs);
        let by_right: BTreeMap<String, String> =
            rl.concretized_by_right().into_iter().map(|(k, v)| (k, v.to_string())).collect();
        assert_eq!(by_right["m2"], "(-6, 1)");
        assert_eq!(by_right["m1"], "[-10, -4) ∪ (-1, 6)");
        assert_eq!(by_right["p1"], "(-6, 1) ∪ (4, 10]");
        assert_eq!(by_right["p2"], "(-1, 6)");
    }

    #[test]
    fn rx_examples() {
        let rx = build_rx(&fork(), 1);
        let expected = Relation::from_strs(&[("x1", "x1"), ("x1", "x3"), ("x3", "x1"), ("x3", "x3"), ("x2", "x2")]);
        assert_eq!(rx.pairs, expected.pairs);

        let cs = compile(&example_quantizer(Mode::Set)).unwrap();
        let rx = build_rx(&cs.fsm, 1);
        let expected = Relation::from_strs(&[
            ("m1", "m1"),
            ("m2", "m2"),
            ("m2", "p1"),
            ("p1", "m2"),
            ("p1", "p1"),
            ("m1", "p2"),
            ("p2", "m1"),
            ("p2", "p2"),
        ]);
        assert_eq!(rx.pairs, expected.pairs);
    }

    #[test]
    fn double_inverse_is_identity() {
        let rl = build_rl(&fork(), &approximate_system(&fork(), 1).unwrap()).unwrap();
        assert_eq!(rl.inverse().inverse(), rl);
        assert_ne!(rl.inverse(), rl);
    }

    #[test]
    fn json_shape() {
        let rl = build_rl(&fork(), &approximate_system(&fork(), 1).unwrap()).unwrap();
        let text = serde_json::to_string(&rl).unwrap();
        assert_eq!(text, r#"{"flavor":"Rl","l":1,"pairs":[["x1","a"],["x2","b"],["x2","c"],["x3","a"]]}"#);
        assert_eq!(serde_json::from_str::<Relation>(&text).unwrap(), rl);
    }
}
