//! Finite state machines `(X, W, δ, X₀)` and the language-level operations the
//! rest of the crate is built on.
//!
//! A machine stands for the set of its infinite labeled paths. After
//! [`Fsm::trim`] every state is reachable and lies on an infinite path, so
//! the finite path language is exactly the set of prefixes of the infinite
//! behavior, and two trimmed machines have the same infinite behavior iff
//! their prefix languages agree.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Symbol, Word};

/// Set of state indices.
pub type StateSet = BTreeSet<usize>;

/// Default node budget for the brute-force oracles.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// A finite state machine with string state ids.
///
/// States and symbols are kept sorted; indices into [`Fsm::states`] and
/// [`Fsm::alphabet`] are stable for the lifetime of the value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FsmJson", into = "FsmJson")]
pub struct Fsm {
    alphabet: Vec<Symbol>,
    states: Vec<String>,
    initial: StateSet,
    transitions: BTreeSet<(usize, usize, usize)>,
    out: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FsmJson {
    alphabet: Vec<Symbol>,
    states: Vec<String>,
    initial: Vec<String>,
    transitions: Vec<(String, Symbol, String)>,
}

impl TryFrom<FsmJson> for Fsm {
    type Error = Error;
    fn try_from(raw: FsmJson) -> Result<Self> {
        Fsm::new(raw.alphabet, raw.states, raw.initial, raw.transitions)
    }
}

impl From<Fsm> for FsmJson {
    fn from(m: Fsm) -> Self {
        FsmJson {
            alphabet: m.alphabet.clone(),
            states: m.states.clone(),
            initial: m.initial.iter().map(|&i| m.states[i].clone()).collect(),
            transitions: m
                .transitions
                .iter()
                .map(|&(s, a, d)| (m.states[s].clone(), m.alphabet[a].clone(), m.states[d].clone()))
                .collect(),
        }
    }
}

impl Fsm {
    pub fn new(
        alphabet: impl IntoIterator<Item = Symbol>,
        states: impl IntoIterator<Item = String>,
        initial: impl IntoIterator<Item = String>,
        transitions: impl IntoIterator<Item = (String, Symbol, String)>,
    ) -> Result<Self> {
        let alphabet: Vec<Symbol> = alphabet.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let states: Vec<String> = states.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(bad) = states.iter().find(|s| s.is_empty()) {
            return Err(Error::Invalid(format!("empty state id {bad:?}")));
        }
        let state_ix = |s: &str| -> Result<usize> {
            states
                .binary_search_by(|x| x.as_str().cmp(s))
                .map_err(|_| Error::UnknownState(s.to_string()))
        };
        let initial = initial.into_iter().map(|s| state_ix(&s)).collect::<Result<StateSet>>()?;
        if initial.is_empty() {
            return Err(Error::Invalid("machine has no initial state".into()));
        }
        let mut edges = BTreeSet::new();
        for (src, sym, dst) in transitions {
            let a = alphabet
                .binary_search(&sym)
                .map_err(|_| Error::UnknownSymbol(sym.to_string()))?;
            edges.insert((state_ix(&src)?, a, state_ix(&dst)?));
        }
        Ok(Self::from_indices(alphabet, states, initial, edges))
    }

    /// Convenience constructor over string slices.
    pub fn from_strs(
        alphabet: &[&str],
        states: &[&str],
        initial: &[&str],
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let alphabet = alphabet.iter().map(|s| Symbol::new(*s)).collect::<Result<Vec<_>>>()?;
        let transitions = transitions
            .iter()
            .map(|(s, a, d)| Ok((s.to_string(), Symbol::new(*a)?, d.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Fsm::new(
            alphabet,
            states.iter().map(|s| s.to_string()),
            initial.iter().map(|s| s.to_string()),
            transitions,
        )
    }

    fn from_indices(
        alphabet: Vec<Symbol>,
        states: Vec<String>,
        initial: StateSet,
        transitions: BTreeSet<(usize, usize, usize)>,
    ) -> Self {
        let mut out = vec![Vec::new(); states.len()];
        for &(s, a, d) in &transitions {
            out[s].push((a, d));
        }
        Fsm { alphabet, states, initial, transitions, out }
    }

    pub fn alphabet(&self) -> &[Symbol] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn initial_names(&self) -> BTreeSet<String> {
        self.names(&self.initial)
    }

    pub fn state_name(&self, ix: usize) -> &str {
        &self.states[ix]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.binary_search_by(|x| x.as_str().cmp(name)).ok()
    }

    pub fn symbol_index(&self, symbol: &Symbol) -> Option<usize> {
        self.alphabet.binary_search(symbol).ok()
    }

    pub fn symbol(&self, ix: usize) -> &Symbol {
        &self.alphabet[ix]
    }

    /// Transitions as `(source, symbol, target)` index triples, sorted.
    pub fn transition_indices(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.transitions
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Transitions by name, sorted.
    pub fn transitions(&self) -> impl Iterator<Item = (&str, &Symbol, &str)> + '_ {
        self.transitions
            .iter()
            .map(|&(s, a, d)| (self.states[s].as_str(), &self.alphabet[a], self.states[d].as_str()))
    }

    /// Outgoing `(symbol, target)` pairs of a state, sorted.
    pub fn outgoing(&self, state: usize) -> &[(usize, usize)] {
        &self.out[state]
    }

    pub fn enabled(&self, state: usize) -> BTreeSet<usize> {
        self.out[state].iter().map(|&(a, _)| a).collect()
    }

    pub fn names(&self, set: &StateSet) -> BTreeSet<String> {
        set.iter().map(|&i| self.states[i].clone()).collect()
    }

    pub fn indices<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<StateSet> {
        names
            .into_iter()
            .map(|n| self.state_index(n).ok_or_else(|| Error::UnknownState(n.to_string())))
            .collect()
    }

    /// Successors of `set` under symbol `a`.
    pub fn post(&self, set: &StateSet, a: usize) -> StateSet {
        set.iter()
            .flat_map(|&s| self.out[s].iter().filter(move |&&(b, _)| b == a).map(|&(_, d)| d))
            .collect()
    }

    /// Successors of `set` under any symbol.
    pub fn post_any(&self, set: &StateSet) -> StateSet {
        set.iter().flat_map(|&s| self.out[s].iter().map(|&(_, d)| d)).collect()
    }

    /// States reached from `set` by reading `word`.
    pub fn post_word(&self, set: &StateSet, word: &Word) -> Result<StateSet> {
        let mut cur = set.clone();
        for sym in word.symbols() {
            let a = self.symbol_index(sym).ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
            cur = self.post(&cur, a);
        }
        Ok(cur)
    }

    /// States reached from the initial states by reading `word`.
    pub fn run(&self, word: &Word) -> Result<StateSet> {
        self.post_word(&self.initial, word)
    }

    pub fn accepts_prefix(&self, word: &Word) -> bool {
        self.run(word).map(|s| !s.is_empty()).unwrap_or(false)
    }

    /// All states reachable from the initial states.
    pub fn reachable(&self) -> StateSet {
        let mut seen = self.initial.clone();
        let mut stack: Vec<usize> = seen.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(_, d) in &self.out[s] {
                if seen.insert(d) {
                    stack.push(d);
                }
            }
        }
        seen
    }

    /// Largest sub-machine whose states are all reachable and live.
    pub fn trim(&self) -> Result<Fsm> {
        // Greatest fixpoint of "has a successor inside the set".
        let mut live: StateSet = (0..self.states.len()).collect();
        loop {
            let next: StateSet = live
                .iter()
                .copied()
                .filter(|&s| self.out[s].iter().any(|(_, d)| live.contains(d)))
                .collect();
            if next.len() == live.len() {
                break;
            }
            live = next;
        }
        let init: StateSet = self.initial.intersection(&live).copied().collect();
        if init.is_empty() {
            return Err(Error::EmptyAfterTrim);
        }
        let mut keep = init.clone();
        let mut stack: Vec<usize> = init.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(_, d) in &self.out[s] {
                if live.contains(&d) && keep.insert(d) {
                    stack.push(d);
                }
            }
        }
        let names: Vec<String> = keep.iter().map(|&i| self.states[i].clone()).collect();
        let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let transitions = self
            .transitions
            .iter()
            .filter_map(|&(s, a, d)| Some((*remap.get(&s)?, a, *remap.get(&d)?)))
            .collect();
        let initial = init.iter().map(|i| remap[i]).collect();
        Ok(Fsm::from_indices(self.alphabet.clone(), names, initial, transitions))
    }

    pub fn is_trim(&self) -> bool {
        self.reachable().len() == self.states.len() && self.out.iter().all(|o| !o.is_empty())
    }

    /// Copy of the machine over a larger alphabet.
    pub fn with_alphabet(&self, alphabet: &[Symbol]) -> Result<Fsm> {
        let mut all: BTreeSet<Symbol> = alphabet.iter().cloned().collect();
        all.extend(self.alphabet.iter().cloned());
        Fsm::new(
            all,
            self.states.clone(),
            self.initial_names(),
            self.transitions().map(|(s, a, d)| (s.to_string(), a.clone(), d.to_string())),
        )
    }

    /// `X_k`: states occupied at step `k`.
    pub fn reachable_at(&self, k: usize) -> BTreeSet<String> {
        self.names(&self.reachable_at_indices(k))
    }

    pub fn reachable_at_indices(&self, k: usize) -> StateSet {
        let seq = self.reach_lasso();
        seq.at(k).clone()
    }

    /// The eventually periodic sequence `k ↦ X_k` as a lasso.
    pub fn reach_lasso(&self) -> Lasso<StateSet> {
        Lasso::detect(self.initial.clone(), |s| self.post_any(s))
    }

    pub fn reach_sequence(&self) -> StateSetSequence {
        let lasso = self.reach_lasso();
        StateSetSequence {
            prefix: lasso.prefix().iter().map(|s| self.names(s)).collect(),
            period: lasso.period().iter().map(|s| self.names(s)).collect(),
        }
    }

    /// Shortest (then lexicographically least) word leading from an initial
    /// state to `target`.
    pub fn shortest_word_to(&self, target: usize) -> Option<Word> {
        let mut parent: BTreeMap<usize, Option<(usize, usize)>> = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &i in &self.initial {
            parent.insert(i, None);
            queue.push_back(i);
        }
        while let Some(s) = queue.pop_front() {
            if s == target {
                return Some(self.unwind(&parent, s));
            }
            for &(a, d) in &self.out[s] {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(d) {
                    e.insert(Some((s, a)));
                    queue.push_back(d);
                }
            }
        }
        None
    }

    fn unwind(&self, parent: &BTreeMap<usize, Option<(usize, usize)>>, mut s: usize) -> Word {
        let mut syms = Vec::new();
        while let Some(Some((p, a))) = parent.get(&s) {
            syms.push(self.alphabet[*a].clone());
            s = *p;
        }
        syms.reverse();
        Word::from_symbols(syms)
    }

    /// A word of length exactly `k` that leads from an initial state to
    /// `target`, if one exists.
    pub fn word_reaching_at(&self, target: usize, k: usize) -> Option<Word> {
        let mut layers: Vec<BTreeMap<usize, Option<(usize, usize)>>> = Vec::with_capacity(k + 1);
        layers.push(self.initial.iter().map(|&i| (i, None)).collect());
        for step in 0..k {
            let mut next = BTreeMap::new();
            for &s in layers[step].keys() {
                for &(a, d) in &self.out[s] {
                    next.entry(d).or_insert(Some((s, a)));
                }
            }
            layers.push(next);
        }
        layers[k].get(&target)?;
        let mut syms = Vec::with_capacity(k);
        let mut s = target;
        for step in (1..=k).rev() {
            let (p, a) = layers[step][&s].expect("non-initial layer has parents");
            syms.push(self.alphabet[a].clone());
            s = p;
        }
        syms.reverse();
        Some(Word::from_symbols(syms))
    }

    /// Graphviz rendering; initial states get an edge from an invisible node.
    pub fn to_dot(&self) -> String {
        let q = |s: &str| format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""));
        let mut dot = String::from("digraph fsm {\n  rankdir=LR;\n");
        for (n, &i) in self.initial.iter().enumerate() {
            let _ = writeln!(dot, "  \"__init{n}\" [shape=point, style=invis];");
            let _ = writeln!(dot, "  \"__init{n}\" -> {};", q(&self.states[i]));
        }
        for s in &self.states {
            let _ = writeln!(dot, "  {} [shape=circle];", q(s));
        }
        for (s, a, d) in self.transitions() {
            let _ = writeln!(dot, "  {} -> {} [label={}];", q(s), q(d), q(a.as_str()));
        }
        dot.push_str("}\n");
        dot
    }

    /// Structure of the machine with states renumbered in breadth-first
    /// order from the initial states (symbols in alphabet order).
    ///
    /// For deterministic machines with one initial state two machines are
    /// isomorphic iff their canonical forms are equal.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut number: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for &i in &self.initial {
            number.insert(i, number.len());
            queue.push_back(i);
        }
        while let Some(s) = queue.pop_front() {
            for &(_, d) in &self.out[s] {
                if !number.contains_key(&d) {
                    number.insert(d, number.len());
                    queue.push_back(d);
                }
            }
        }
        let mut transitions: Vec<(usize, Symbol, usize)> = self
            .transitions
            .iter()
            .filter_map(|&(s, a, d)| Some((*number.get(&s)?, self.alphabet[a].clone(), *number.get(&d)?)))
            .collect();
        transitions.sort();
        CanonicalForm {
            states: number.len(),
            initial: self.initial.iter().map(|i| number[i]).collect(),
            transitions,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() <= 1
            && self.out.iter().all(|o| o.windows(2).all(|p| p[0].0 != p[1].0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub states: usize,
    pub initial: BTreeSet<usize>,
    pub transitions: Vec<(usize, Symbol, usize)>,
}

/// An eventually periodic sequence `prefix · period^ω`, found by iterating a
/// map until a value repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso<T> {
    items: Vec<T>,
    loop_start: usize,
}

impl<T: Clone + Eq + std::hash::Hash> Lasso<T> {
    pub fn detect(start: T, mut step: impl FnMut(&T) -> T) -> Self {
        let mut seen: HashMap<T, usize> = HashMap::new();
        let mut items = Vec::new();
        let mut cur = start;
        loop {
            if let Some(&ix) = seen.get(&cur) {
                return Lasso { items, loop_start: ix };
            }
            seen.insert(cur.clone(), items.len());
            let next = step(&cur);
            items.push(cur);
            cur = next;
        }
    }
}

impl<T> Lasso<T> {
    pub fn prefix(&self) -> &[T] {
        &self.items[..self.loop_start]
    }

    pub fn period(&self) -> &[T] {
        &self.items[self.loop_start..]
    }

    /// Every distinct value of the sequence, in order of first occurrence.
    pub fn values(&self) -> &[T] {
        &self.items
    }

    pub fn at(&self, k: usize) -> &T {
        if k < self.items.len() {
            &self.items[k]
        } else {
            let q = self.items.len() - self.loop_start;
            &self.items[self.loop_start + (k - self.loop_start) % q]
        }
    }
}

/// `k ↦ X_k` for a machine, by state name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSetSequence {
    pub prefix: Vec<BTreeSet<String>>,
    pub period: Vec<BTreeSet<String>>,
}

impl StateSetSequence {
    pub fn at(&self, k: usize) -> &BTreeSet<String> {
        if k < self.prefix.len() {
            &self.prefix[k]
        } else {
            &self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }
}

/// Relationship between the prefix languages of two machines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "kebab-case")]
pub enum LanguageOrder {
    Equal,
    /// The first language is strictly contained in the second; `witness`
    /// is accepted only by the second machine.
    LeftStrictSubset { witness: Word },
    /// The second language is strictly contained in the first.
    RightStrictSubset { witness: Word },
    Incomparable { only_left: Word, only_right: Word },
}

impl LanguageOrder {
    pub fn left_included(&self) -> bool {
        matches!(self, LanguageOrder::Equal | LanguageOrder::LeftStrictSubset { .. })
    }
}

fn check_alphabets(m1: &Fsm, m2: &Fsm) -> Result<()> {
    if m1.alphabet != m2.alphabet {
        return Err(Error::AlphabetMismatch {
            left: m1.alphabet.iter().map(|s| s.to_string()).collect(),
            right: m2.alphabet.iter().map(|s| s.to_string()).collect(),
        });
    }
    Ok(())
}

/// Compares the prefix-closed path languages of two machines by a
/// breadth-first walk over pairs of determinized states. Witnesses are
/// shortest, then lexicographically least.
pub fn prefix_language_compare(m1: &Fsm, m2: &Fsm) -> Result<LanguageOrder> {
    check_alphabets(m1, m2)?;
    let start = (m1.initial.clone(), m2.initial.clone());
    let mut seen: HashSet<(StateSet, StateSet)> = HashSet::new();
    let mut queue: VecDeque<((StateSet, StateSet), Word)> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back((start, Word::empty()));
    let mut only_left: Option<Word> = None;
    let mut only_right: Option<Word> = None;
    while let Some(((s1, s2), word)) = queue.pop_front() {
        for a in 0..m1.alphabet.len() {
            let n1 = m1.post(&s1, a);
            let n2 = m2.post(&s2, a);
            match (n1.is_empty(), n2.is_empty()) {
                (true, true) => {}
                (false, true) => {
                    only_left.get_or_insert_with(|| word.push(m1.alphabet[a].clone()));
                }
                (true, false) => {
                    only_right.get_or_insert_with(|| word.push(m1.alphabet[a].clone()));
                }
                (false, false) => {
                    let key = (n1, n2);
                    if seen.insert(key.clone()) {
                        queue.push_back((key, word.push(m1.alphabet[a].clone())));
                    }
                }
            }
        }
        if only_left.is_some() && only_right.is_some() {
            break;
        }
    }
    Ok(match (only_left, only_right) {
        (None, None) => LanguageOrder::Equal,
        (None, Some(w)) => LanguageOrder::LeftStrictSubset { witness: w },
        (Some(w), None) => LanguageOrder::RightStrictSubset { witness: w },
        (Some(l), Some(r)) => LanguageOrder::Incomparable { only_left: l, only_right: r },
    })
}

/// All label sequences of length at most `depth` along paths from initial
/// states, by exhaustive unrolling. Test oracle; not used by the
/// decision procedures.
pub fn enumerate_paths(m: &Fsm, depth: usize, budget: usize) -> Result<BTreeSet<Word>> {
    let mut words = BTreeSet::new();
    let mut layer: BTreeSet<(Vec<usize>, usize)> = m.initial.iter().map(|&s| (Vec::new(), s)).collect();
    let mut nodes = layer.len();
    words.insert(Word::empty());
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for (labels, s) in &layer {
            for &(a, d) in m.outgoing(*s) {
                let mut l = labels.clone();
                l.push(a);
                next.insert((l, d));
            }
        }
        nodes += next.len();
        if nodes > budget {
            return Err(Error::DepthBudgetExceeded { budget });
        }
        for (labels, _) in &next {
            words.insert(Word::from_symbols(labels.iter().map(|&a| m.alphabet[a].clone()).collect()));
        }
        layer = next;
    }
    Ok(words)
}
