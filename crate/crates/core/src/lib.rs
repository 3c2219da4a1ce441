//! Finite abstractions of external behaviors by strongest asynchronous
//! l-complete approximation, and mechanical checks of the simulation and
//! bisimulation relations between a system and its abstraction.
//!
//! The pipeline: a [`automata::Fsm`] (given directly, or compiled from an
//! interval [`quantizer`]) yields its [`windows`], which determine the
//! recent-past machine built by [`lcomplete::approximate`]. The canonical
//! relations of [`relations`] are then checked by [`simcheck`].

pub mod automata;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod interval;
pub mod lcomplete;
pub mod quantizer;
pub mod relations;
pub mod simcheck;
pub mod windows;
pub mod word;

use serde::{Deserialize, Serialize};

pub use automata::{prefix_language_compare, Fsm, LanguageOrder};
pub use error::{Error, Result};
pub use lcomplete::{approximate, approximate_system, is_l_complete, ApproxMachine};
pub use relations::{build_r0, build_rl, build_rx, Relation};
pub use simcheck::{check_relation, check_step, similarity_report, SimFlavor, Verdict};
pub use windows::{extract_windows, WindowSet};
pub use word::{Symbol, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}
