#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use lcabs::automata::Fsm;
use lcabs::relations::Relation;
use lcabs::simcheck::{Counterexample, SimFlavor, Verdict, ViolationKind};
use lcabs::Status;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYMBOLS: [&str; 3] = ["a", "b", "c"];

/// Builds and trims a machine from raw edge choices; `None` if nothing is
/// left after trimming.
pub fn machine_from(n: usize, k: usize, edges: &[(usize, usize, usize)], init: &[usize]) -> Option<Fsm> {
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let alphabet: Vec<&str> = SYMBOLS[..k].to_vec();
    let state_refs: Vec<&str> = states.iter().map(String::as_str).collect();
    let init: Vec<&str> = init.iter().map(|&i| state_refs[i % n]).collect();
    let edges: Vec<(&str, &str, &str)> =
        edges.iter().map(|&(s, a, d)| (state_refs[s % n], alphabet[a % k], state_refs[d % n])).collect();
    Fsm::from_strs(&alphabet, &state_refs, &init, &edges).ok()?.trim().ok()
}

pub fn random_machine(rng: &mut impl Rng) -> Fsm {
    loop {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=3);
        let density = rng.gen_range(0.15..0.5);
        let mut edges = Vec::new();
        for s in 0..n {
            for a in 0..k {
                for d in 0..n {
                    if rng.gen_bool(density) {
                        edges.push((s, a, d));
                    }
                }
            }
        }
        let init: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        if let Some(m) = machine_from(n, k, &edges, &init) {
            return m;
        }
    }
}

/// The fixed 200-machine corpus, each with its l in 0..=3.
pub fn corpus() -> Vec<(Fsm, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1c0_ffee);
    (0..200).map(|i| (random_machine(&mut rng), i % 4)).collect()
}

pub fn random_relation(rng: &mut impl Rng, m1: &Fsm, m2: &Fsm) -> Relation {
    let p = rng.gen_range(0.2..0.9);
    let mut pairs = Vec::new();
    for a in m1.states() {
        for b in m2.states() {
            if rng.gen_bool(p) {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    Relation::custom(pairs)
}

type Edges = HashSet<(String, String, String)>;

fn edges(m: &Fsm) -> Edges {
    m.transitions().map(|(s, a, d)| (s.to_string(), a.to_string(), d.to_string())).collect()
}

/// States occupied after exactly `k` steps, computed from the edge list.
fn occupied(m: &Fsm, k: usize) -> BTreeSet<String> {
    let e = edges(m);
    let mut cur = m.initial_names();
    for _ in 0..k {
        cur = e.iter().filter(|(s, _, _)| cur.contains(s)).map(|(_, _, d)| d.clone()).collect();
    }
    cur
}

fn reachable(m: &Fsm) -> BTreeSet<String> {
    let e = edges(m);
    let mut seen = m.initial_names();
    loop {
        let next: BTreeSet<String> =
            e.iter().filter(|(s, _, _)| seen.contains(s)).map(|(_, _, d)| d.clone()).collect();
        if next.is_subset(&seen) {
            return seen;
        }
        seen.extend(next);
    }
}

fn covers(r: &Relation, left: &BTreeSet<String>, right: &BTreeSet<String>) -> bool {
    left.iter().all(|x| right.iter().any(|y| r.contains(x, y)))
}

/// Independent check of the step condition from the raw edge lists.
pub fn step_holds(r: &Relation, m1: &Fsm, m2: &Fsm) -> bool {
    let (e1, e2) = (edges(m1), edges(m2));
    r.pairs.iter().all(|(x, y)| {
        e1.iter().filter(|(s, _, _)| s == x).all(|(_, a, x2)| {
            e2.iter().any(|(s, b, y2)| s == y && b == a && r.contains(x2, y2))
        })
    })
}

/// Independent check of the covering condition.
pub fn coverage_holds(r: &Relation, m1: &Fsm, m2: &Fsm, flavor: SimFlavor) -> bool {
    match flavor {
        SimFlavor::Initial(l) => covers(r, &occupied(m1, l), &occupied(m2, l)),
        SimFlavor::Asynchronous => covers(r, &reachable(m1), &reachable(m2)),
        SimFlavor::ExternallySynchronous | SimFlavor::Synchronous => {
            let (e1, e2) = (edges(m1), edges(m2));
            let step = |e: &Edges, cur: &BTreeSet<String>| -> BTreeSet<String> {
                e.iter().filter(|(s, _, _)| cur.contains(s)).map(|(_, _, d)| d.clone()).collect()
            };
            let mut seen = HashSet::new();
            let mut cur = (m1.initial_names(), m2.initial_names());
            while seen.insert(cur.clone()) {
                if !covers(r, &cur.0, &cur.1) {
                    return false;
                }
                cur = (step(&e1, &cur.0), step(&e2, &cur.1));
            }
            true
        }
    }
}

fn run_names(m: &Fsm, word: &lcabs::Word) -> BTreeSet<String> {
    let e = edges(m);
    let mut cur = m.initial_names();
    for sym in word.symbols() {
        cur = e.iter().filter(|(s, a, _)| cur.contains(s) && a == sym.as_str()).map(|(_, _, d)| d.clone()).collect();
    }
    cur
}

/// Replays a counterexample on both machines and confirms it is a genuine
/// violation of `r`.
pub fn replays(cx: &Counterexample, r: &Relation, m1: &Fsm, m2: &Fsm, flavor: Option<SimFlavor>) -> bool {
    if !run_names(m1, &cx.replay).contains(&cx.left) {
        return false;
    }
    match cx.kind {
        ViolationKind::Step => {
            let (Some(right), Some(sym)) = (&cx.right, &cx.symbol) else { return false };
            if !r.contains(&cx.left, right) {
                return false;
            }
            if let Some(rr) = &cx.right_replay {
                if !run_names(m2, rr).contains(right) {
                    return false;
                }
            }
            let (e1, e2) = (edges(m1), edges(m2));
            let lefts: Vec<&String> =
                e1.iter().filter(|(s, a, _)| *s == cx.left && a == sym.as_str()).map(|(_, _, d)| d).collect();
            !lefts.is_empty()
                && lefts.iter().any(|x2| {
                    !e2.iter().any(|(s, a, y2)| s == right && a == sym.as_str() && r.contains(x2, y2))
                })
        }
        ViolationKind::Coverage => {
            let right = match (flavor, cx.step) {
                (Some(SimFlavor::Asynchronous), _) => reachable(m2),
                (_, Some(k)) => {
                    if cx.replay.len() != k {
                        return false;
                    }
                    occupied(m2, k)
                }
                _ => return false,
            };
            !right.iter().any(|y| r.contains(&cx.left, y))
        }
    }
}

/// Re-verifies a verdict: pass certificates must satisfy the step and
/// covering conditions, fail counterexamples must replay.
pub fn verdict_sound(v: &Verdict, r: &Relation, m1: &Fsm, m2: &Fsm) -> bool {
    match v.status {
        Status::Pass => {
            let cert = v.certificate.as_ref().expect("pass verdict carries a certificate");
            step_holds(cert, m1, m2) && v.flavor.is_none_or(|f| coverage_holds(cert, m1, m2, f))
        }
        Status::Fail => {
            let cx = v.counterexample.as_ref().expect("fail verdict carries a counterexample");
            replays(cx, r, m1, m2, v.flavor)
        }
    }
}
