//! Brute-force semantic oracle: finite Heyting algebras of downsets,
//! evaluation with fixed points computed by iteration, and equivalence and
//! closure-ordinal measurement over every valuation.

mod algebra;
mod eval;
pub mod lemmas;
mod poset;

use thiserror::Error;

pub use algebra::{algebras_up_to, AlgebraError, DownsetAlgebra, Elem, MAX_CARRIER};
pub use eval::{
    check_equiv, eval, find_countermodel, find_entailment_countermodel, for_each_assignment,
    gfp_trace, lfp_trace, measure_closure_ordinal, EvalError, Program, Valuation,
};
pub use poset::{
    enumerate_posets, posets_up_to, FinitePoset, PosetError, MAX_ENUMERATED_SIZE, MAX_POSET_SIZE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
