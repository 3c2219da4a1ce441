//! Initial and recurring length-`(l+1)` windows of a machine's behavior.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::automata::{Fsm, StateSet};
use crate::error::{Error, Result};
use crate::word::Word;

/// `B|[0,l]` and `⋃_k B|[k,k+l]` for one `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSet {
    pub l: usize,
    pub initial: BTreeSet<Word>,
    pub recurring: BTreeSet<Word>,
}

impl WindowSet {
    /// Lists violated structural invariants; empty for windows extracted
    /// from a trimmed machine.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (family, set) in [("initial", &self.initial), ("recurring", &self.recurring)] {
            for d in set.iter().filter(|d| d.len() != self.l + 1) {
                out.push(format!("{family} window `{d}` has length {} instead of {}", d.len(), self.l + 1));
            }
        }
        for d in self.initial.difference(&self.recurring) {
            out.push(format!("initial window `{d}` is not recurring"));
        }
        for d in &self.recurring {
            let overlap = d.tail();
            if !self.recurring.iter().any(|e| e.prefix(self.l) == overlap) {
                out.push(format!("recurring window `{d}` has no continuation"));
            }
        }
        out
    }
}

fn labels_from(m: &Fsm, starts: &StateSet, len: usize) -> BTreeSet<Vec<usize>> {
    let mut layer: BTreeSet<(usize, Vec<usize>)> = starts.iter().map(|&s| (s, Vec::new())).collect();
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|(s, labels)| {
                m.outgoing(*s).iter().map(move |&(a, d)| {
                    let mut l = labels.clone();
                    l.push(a);
                    (d, l)
                })
            })
            .collect();
    }
    layer.into_iter().map(|(_, l)| l).collect()
}

fn to_words(m: &Fsm, labels: BTreeSet<Vec<usize>>) -> BTreeSet<Word> {
    labels
        .into_iter()
        .map(|l| Word::from_symbols(l.into_iter().map(|a| m.symbol(a).clone()).collect()))
        .collect()
}

/// Windows of a trimmed machine: initial windows start in an initial
/// state, recurring windows in any reachable state.
pub fn extract_windows(m: &Fsm, l: usize) -> WindowSet {
    WindowSet {
        l,
        initial: to_words(m, labels_from(m, m.initial(), l + 1)),
        recurring: to_words(m, labels_from(m, &m.reachable(), l + 1)),
    }
}

/// Recomputes the windows by unrolling every path of length `horizon` and
/// slicing each `γ|[k, k+l]`. Only windows on paths that survive to the full
/// horizon are kept. Agrees with [`extract_windows`] on trimmed machines
/// once `horizon ≥ |X|·(l+1) + l + 1`.
pub fn windows_oracle(m: &Fsm, l: usize, horizon: usize, budget: usize) -> Result<WindowSet> {
    if horizon < l + 1 {
        return Err(Error::Invalid(format!("horizon {horizon} is shorter than a window ({})", l + 1)));
    }
    // Node: (state, last ≤ l+1 labels). One layer per depth.
    type Node = (usize, Vec<usize>);
    let mut layers: Vec<Vec<Node>> = Vec::with_capacity(horizon + 1);
    let mut edges: Vec<Vec<Vec<usize>>> = Vec::with_capacity(horizon);
    layers.push(m.initial().iter().map(|&s| (s, Vec::new())).collect());
    let mut nodes = layers[0].len();
    for depth in 0..horizon {
        let mut index: std::collections::BTreeMap<Node, usize> = Default::default();
        let mut next: Vec<Node> = Vec::new();
        let mut succ = Vec::with_capacity(layers[depth].len());
        for (s, recent) in &layers[depth] {
            let mut targets = Vec::new();
            for &(a, d) in m.outgoing(*s) {
                let mut r = recent.clone();
                r.push(a);
                if r.len() > l + 1 {
                    r.remove(0);
                }
                let node = (d, r);
                let ix = *index.entry(node.clone()).or_insert_with(|| {
                    next.push(node);
                    next.len() - 1
                });
                targets.push(ix);
            }
            succ.push(targets);
        }
        nodes += next.len();
        if nodes > budget {
            return Err(Error::DepthBudgetExceeded { budget });
        }
        edges.push(succ);
        layers.push(next);
    }
    let mut alive: Vec<Vec<bool>> = layers.iter().map(|layer| vec![false; layer.len()]).collect();
    alive[horizon].iter_mut().for_each(|a| *a = true);
    for depth in (0..horizon).rev() {
        for (i, targets) in edges[depth].iter().enumerate() {
            alive[depth][i] = targets.iter().any(|&t| alive[depth + 1][t]);
        }
    }
    let mut initial = BTreeSet::new();
    let mut recurring = BTreeSet::new();
    for depth in l + 1..=horizon {
        for (i, (_, recent)) in layers[depth].iter().enumerate() {
            if alive[depth][i] {
                if depth == l + 1 {
                    initial.insert(recent.clone());
                }
                recurring.insert(recent.clone());
            }
        }
    }
    Ok(WindowSet { l, initial: to_words(m, initial), recurring: to_words(m, recurring) })
}

/// Horizon at which [`windows_oracle`] is guaranteed to see every window.
pub fn oracle_horizon(m: &Fsm, l: usize) -> usize {
    m.num_states() * (l + 1) + l + 1
}
