//! The strongest asynchronous l-complete approximation as a finite machine
//! whose states remember the most recent `l` external symbols.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::automata::{prefix_language_compare, Fsm, LanguageOrder};
use crate::error::{Error, Result};
use crate::windows::{extract_windows, WindowSet};
use crate::word::{Symbol, Word, EMPTY_WORD};
use crate::Status;

/// State id of the steady empty past when `l = 0` and it differs from the
/// start state.
pub const STEADY_EMPTY: &str = "^+";

/// What an approximation state remembers.
///
/// Anchored states are occupied only at step `|past|`: the prefixes of
/// initial windows of length at most `l`. Steady states carry a past of
/// length exactly `l` and may be occupied at any later step. An anchored
/// state of length `l` is merged into the steady state with the same past
/// when both allow the same next symbols, so it only survives when the
/// initial windows are stricter than the recurring ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecentPast {
    pub past: Word,
    pub anchored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ApproxJson", into = "ApproxJson")]
pub struct ApproxMachine {
    fsm: Fsm,
    l: usize,
    pasts: BTreeMap<String, RecentPast>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ApproxJson {
    #[serde(flatten)]
    fsm: Fsm,
    l: usize,
}

impl TryFrom<ApproxJson> for ApproxMachine {
    type Error = Error;
    fn try_from(raw: ApproxJson) -> Result<Self> {
        ApproxMachine::from_fsm(raw.fsm, raw.l)
    }
}

impl From<ApproxMachine> for ApproxJson {
    fn from(m: ApproxMachine) -> Self {
        ApproxJson { fsm: m.fsm, l: m.l }
    }
}

/// Ids: pasts print as words. An unmerged anchored past of full length `l`
/// gets a `^` prefix; the steady empty past is `^+` unless the start state
/// merged into it.
fn state_id(rp: &RecentPast, l: usize, start_merged: bool) -> String {
    match (rp.anchored, rp.past.is_empty()) {
        (false, true) if !start_merged => STEADY_EMPTY.to_string(),
        (true, false) if rp.past.len() == l => format!("{EMPTY_WORD}{}", rp.past),
        _ => rp.past.to_string(),
    }
}

fn parse_state_id(name: &str, l: usize, has_steady_empty: bool) -> Result<RecentPast> {
    let bad = || Error::Invalid(format!("state `{name}` is not a recent past of length ≤ {l}"));
    let rp = if name == STEADY_EMPTY {
        RecentPast { past: Word::empty(), anchored: false }
    } else if name == EMPTY_WORD {
        RecentPast { past: Word::empty(), anchored: l > 0 || has_steady_empty }
    } else if let Some(rest) = name.strip_prefix(EMPTY_WORD) {
        let past: Word = rest.parse().map_err(|_| bad())?;
        if past.len() != l {
            return Err(bad());
        }
        RecentPast { past, anchored: true }
    } else {
        let past: Word = name.parse()?;
        RecentPast { anchored: past.len() < l, past }
    };
    if rp.past.len() > l || (!rp.anchored && rp.past.len() != l) {
        return Err(bad());
    }
    Ok(rp)
}

impl ApproxMachine {
    /// Reinterprets a machine whose state ids are recent pasts.
    pub fn from_fsm(fsm: Fsm, l: usize) -> Result<Self> {
        let has_steady_empty = fsm.state_index(STEADY_EMPTY).is_some();
        let mut pasts = BTreeMap::new();
        for name in fsm.states() {
            pasts.insert(name.clone(), parse_state_id(name, l, has_steady_empty)?);
        }
        Ok(ApproxMachine { fsm, l, pasts })
    }

    pub fn fsm(&self) -> &Fsm {
        &self.fsm
    }

    pub fn into_fsm(self) -> Fsm {
        self.fsm
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn recent_past(&self, state: &str) -> Option<&RecentPast> {
        self.pasts.get(state)
    }

    pub fn pasts(&self) -> &BTreeMap<String, RecentPast> {
        &self.pasts
    }

    /// State sequence of the unique run on `word`, if the word is accepted.
    pub fn run_states(&self, word: &Word) -> Option<Vec<String>> {
        let m = &self.fsm;
        let mut cur = *m.initial().iter().next()?;
        let mut seq = vec![m.state_name(cur).to_string()];
        for sym in word.symbols() {
            let a = m.symbol_index(sym)?;
            cur = m.outgoing(cur).iter().find(|&&(b, _)| b == a)?.1;
            seq.push(m.state_name(cur).to_string());
        }
        Some(seq)
    }
}

/// Realizes `B^{l↑}` from its windows.
///
/// Anchored states walk through the prefixes of the initial windows, steady
/// states shift through the recurring ones (see [`RecentPast`]). The result
/// is trimmed and deterministic, its alphabet is the set of symbols that
/// occur in the windows.
pub fn approximate(ws: &WindowSet) -> Result<ApproxMachine> {
    let alphabet: BTreeSet<Symbol> = ws
        .initial
        .iter()
        .chain(&ws.recurring)
        .flat_map(|d| d.symbols().iter().cloned())
        .collect();
    build(ws, alphabet)
}

/// `approximate(extract_windows(m, l))` over `m`'s full alphabet.
pub fn approximate_system(m: &Fsm, l: usize) -> Result<ApproxMachine> {
    let ws = extract_windows(m, l);
    let mut alphabet: BTreeSet<Symbol> = m.alphabet().iter().cloned().collect();
    alphabet.extend(ws.recurring.iter().flat_map(|d| d.symbols().iter().cloned()));
    build(&ws, alphabet)
}

fn build(ws: &WindowSet, alphabet: BTreeSet<Symbol>) -> Result<ApproxMachine> {
    let l = ws.l;
    if ws.initial.is_empty() {
        return Err(Error::EmptyWindows);
    }
    if let Some(d) = ws.initial.iter().chain(&ws.recurring).find(|d| d.len() != l + 1) {
        return Err(Error::Invalid(format!("window `{d}` does not have length {}", l + 1)));
    }
    let anchored = |past: Word| RecentPast { past, anchored: true };
    let steady = |past: Word| RecentPast { past, anchored: false };

    let next_symbols = |set: &BTreeSet<Word>, past: &Word| -> BTreeSet<Symbol> {
        set.iter().filter(|d| d.prefix(l) == *past).map(|d| d.symbols()[l].clone()).collect()
    };
    let heads: BTreeSet<Word> = ws.initial.iter().map(|d| d.prefix(l)).collect();
    let merged: BTreeSet<Word> = heads
        .into_iter()
        .filter(|h| next_symbols(&ws.initial, h) == next_symbols(&ws.recurring, h))
        .collect();
    let full = |past: Word| if merged.contains(&past) { steady(past) } else { anchored(past) };

    let mut edges: BTreeSet<(RecentPast, Symbol, RecentPast)> = BTreeSet::new();
    for d in &ws.initial {
        for r in 0..l {
            let target = if r + 1 < l { anchored(d.prefix(r + 1)) } else { full(d.prefix(l)) };
            edges.insert((anchored(d.prefix(r)), d.symbols()[r].clone(), target));
        }
        edges.insert((full(d.prefix(l)), d.symbols()[l].clone(), steady(d.tail())));
    }
    for d in &ws.recurring {
        edges.insert((steady(d.prefix(l)), d.symbols()[l].clone(), steady(d.tail())));
    }

    let start_merged = l == 0 && merged.contains(&Word::empty());
    let id = |rp: &RecentPast| state_id(rp, l, start_merged);
    let start = if l == 0 { full(Word::empty()) } else { anchored(Word::empty()) };
    let mut pasts: BTreeMap<String, RecentPast> = BTreeMap::new();
    pasts.insert(id(&start), start.clone());
    for (s, _, d) in &edges {
        pasts.insert(id(s), s.clone());
        pasts.insert(id(d), d.clone());
    }
    let raw = Fsm::new(
        alphabet,
        pasts.keys().cloned(),
        [id(&start)],
        edges.iter().map(|(s, a, d)| (id(s), a.clone(), id(d))),
    )?;
    let fsm = raw.trim().map_err(|e| match e {
        Error::EmptyAfterTrim => Error::EmptyWindows,
        other => other,
    })?;
    pasts.retain(|name, _| fsm.state_index(name).is_some());
    Ok(ApproxMachine { fsm, l, pasts })
}

/// `z(k)` for `k = 0..=|γ|`: the whole prefix while shorter than `l`, then
/// the last `l` symbols.
pub fn z_trajectory(gamma: &Word, l: usize) -> Vec<Word> {
    (0..=gamma.len())
        .map(|k| if k < l { gamma.prefix(k) } else { Word::from_symbols(gamma.symbols()[k - l..k].to_vec()) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completeness {
    pub l: usize,
    pub status: Status,
    /// Shortest word of the approximation that the system cannot produce.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Word>,
}

/// Decides asynchronous l-completeness of a trimmed machine as equality
/// with its strongest l-complete approximation.
pub fn is_l_complete(m: &Fsm, l: usize) -> Result<Completeness> {
    let approx = approximate_system(m, l)?;
    match prefix_language_compare(m, approx.fsm())? {
        LanguageOrder::Equal => Ok(Completeness { l, status: Status::Pass, witness: None }),
        LanguageOrder::LeftStrictSubset { witness } => {
            Ok(Completeness { l, status: Status::Fail, witness: Some(witness) })
        }
        other => Err(Error::InternalInconsistency(format!(
            "behavior is not contained in its {l}-complete approximation: {other:?}"
        ))),
    }
}
