//! Small reference machines and quantizer specs used by tests, the CLI docs
//! and the browser demo.

use crate::automata::Fsm;
use crate::quantizer::{Mode, QuantizerSpec};

/// Three-state machine over `{a, b, c}`: `x2 -a-> x1 -b-> x2`, `x2 -a-> x3 -c-> x2`.
pub fn fork() -> Fsm {
    Fsm::from_strs(
        &["a", "b", "c"],
        &["x1", "x2", "x3"],
        &["x2"],
        &[("x2", "a", "x1"), ("x1", "b", "x2"), ("x2", "a", "x3"), ("x3", "c", "x2")],
    )
    .expect("valid machine")
}

/// The recent-past machine of [`fork`] for `l = 1`.
pub fn fork_approx() -> Fsm {
    Fsm::from_strs(
        &["a", "b", "c"],
        &["^", "a", "b", "c"],
        &["^"],
        &[("^", "a", "a"), ("a", "b", "b"), ("a", "c", "c"), ("b", "a", "a"), ("c", "a", "a")],
    )
    .expect("valid machine")
}

/// The five-state recent-past machine of the interval quantizer for `l = 1`.
pub fn quantizer_approx() -> Fsm {
    Fsm::from_strs(
        &["m1", "m2", "p1", "p2"],
        &["^", "m1", "m2", "p1", "p2"],
        &["^"],
        &[
            ("^", "m2", "m2"),
            ("^", "p2", "p2"),
            ("m2", "m1", "m1"),
            ("m1", "p1", "p1"),
            ("p1", "p2", "p2"),
            ("p2", "p1", "p1"),
            ("p1", "m1", "m1"),
            ("m1", "m2", "m2"),
        ],
    )
    .expect("valid machine")
}

/// The cycle `s0 -a-> s1 -a-> s2 -b-> s0`, whose behavior is `(aab)^ω`.
pub fn aab_cycle() -> Fsm {
    Fsm::from_strs(
        &["a", "b"],
        &["s0", "s1", "s2"],
        &["s0"],
        &[("s0", "a", "s1"), ("s1", "a", "s2"), ("s2", "b", "s0")],
    )
    .expect("valid machine")
}

/// JSON of the four-symbol interval quantizer on `[-10, 10]` with signals
/// starting at `±10`.
pub const EXAMPLE_QUANTIZER_JSON: &str = r#"{
  "domain": {"lo": -10, "hi": 10, "lo_closed": true, "hi_closed": true},
  "symbols": {
    "m2": {"lo": -10, "hi": -4, "lo_closed": true, "hi_closed": false},
    "m1": {"lo": -6, "hi": 1, "lo_closed": false, "hi_closed": false},
    "p1": {"lo": -1, "hi": 6, "lo_closed": false, "hi_closed": false},
    "p2": {"lo": 4, "hi": 10, "lo_closed": false, "hi_closed": true}
  },
  "initial_values": [-10, 10],
  "mode": "point"
}"#;

pub fn example_quantizer(mode: Mode) -> QuantizerSpec {
    let mut spec: QuantizerSpec = serde_json::from_str(EXAMPLE_QUANTIZER_JSON).expect("valid spec");
    spec.mode = mode;
    spec
}
