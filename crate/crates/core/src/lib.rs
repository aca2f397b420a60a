pub mod bounds;
pub mod corpus;
pub mod eliminate;
pub mod formula;
pub mod normalize;
pub mod prover;
pub mod semantics;
pub mod suites;

pub use formula::{parse, Formula};
