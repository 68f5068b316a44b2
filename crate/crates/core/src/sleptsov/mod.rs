//! Sleptsov nets: Petri nets whose transitions fire at maximal multiplicity.

pub mod compile;
pub mod net;
pub mod templates;
pub mod text;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};
use serde::Serialize;

pub use compile::{compile, CompileOptions};
pub use net::{Edge, Marking, Net, Reachability, RunOutcome, RunStatus, Step, Transition};
pub use templates::{
    build_adder_net, build_lamp_net, build_maj_net, eval_adder_net, maj_net_eval, maj_net_eval_with, template,
    threshold_classify, LampScenario, MajNetOptions, NetBuilder, Template, MAJ_THRESHOLD, MAJ_WEIGHTS,
};
pub use text::{format_net, format_trace, parse_net};

/// Token counts. Any unsigned primitive integer works.
pub trait Token: PrimInt + Unsigned + Hash + Debug + Display + FromStr + Serialize + Send + Sync + 'static {}

impl<T> Token for T where T: PrimInt + Unsigned + Hash + Debug + Display + FromStr + Serialize + Send + Sync + 'static {}

/// Default state-count cap for exploration.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;
