pub mod circuits;
pub mod engine;
pub mod render;

pub use engine::{local_rule, Lattice, RuleBS};
