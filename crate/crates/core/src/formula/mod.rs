//! Formulas of the intuitionistic propositional mu-calculus.
//!
//! A [`Formula`] is an immutable tree over propositional variables, the
//! Heyting connectives and the two fixed-point binders. Concrete syntax is
//! handled by [`parse`] and the [`Display`](std::fmt::Display) impl, JSON by
//! [`json`].

mod analysis;
pub mod json;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;

pub use analysis::{
    analyze, well_formed, BinderDiagnostic, Occurrence, OccurrenceClass, OccurrencePath,
    Polarity, Step, VariableReport, WellFormedness,
};
pub use parse::{parse, ParseError};
pub use subst::{fresh_name, iterate_subst, substitute, substitute_many};

/// An IPCμ formula.
///
/// Binder names may shadow each other; every analysis in this crate only
/// looks at free occurrences relative to the node it is called on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn imp(antecedent: Formula, consequent: Formula) -> Self {
        Formula::Imp(Box::new(antecedent), Box::new(consequent))
    }

    /// `φ → ⊥`
    pub fn neg(f: Formula) -> Self {
        Formula::imp(f, Formula::Bot)
    }

    pub fn mu(binder: impl Into<String>, body: Formula) -> Self {
        Formula::Mu(binder.into(), Box::new(body))
    }

    pub fn nu(binder: impl Into<String>, body: Formula) -> Self {
        Formula::Nu(binder.into(), Box::new(body))
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    pub fn is_var(&self, name: &str) -> bool {
        matches!(self, Formula::Var(v) if v == name)
    }

    /// Free variables, in name order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(v) => {
                if !bound.contains(&v.as_str()) {
                    out.insert(v.clone());
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Mu(x, body) | Formula::Nu(x, body) => {
                bound.push(x);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Whether `x` has a free occurrence.
    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Formula::Var(v) => v == x,
            Formula::Top | Formula::Bot => false,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.occurs_free(x) || r.occurs_free(x)
            }
            Formula::Mu(b, body) | Formula::Nu(b, body) => b != x && body.occurs_free(x),
        }
    }

    /// Every variable name appearing anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Var(v) | Formula::Mu(v, _) | Formula::Nu(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// True when no `μ`/`ν` appears.
    pub fn is_fixed_point_free(&self) -> bool {
        let mut free = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Mu(..) | Formula::Nu(..)) {
                free = false;
            }
        });
        free
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                1 + l.depth().max(r.depth())
            }
            Formula::Mu(_, b) | Formula::Nu(_, b) => 1 + b.depth(),
        }
    }

    /// Maximum number of fixed-point binders along a root-to-leaf path.
    pub fn fixed_point_nesting(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.fixed_point_nesting().max(r.fixed_point_nesting())
            }
            Formula::Mu(_, b) | Formula::Nu(_, b) => 1 + b.fixed_point_nesting(),
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Mu(_, b) | Formula::Nu(_, b) => b.visit(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_respect_binders() {
        let f = parse("mu x. (x -> a) \\/ nu y. y /\\ x").unwrap();
        let fv: Vec<_> = f.free_vars().into_iter().collect();
        assert_eq!(fv, vec!["a".to_string()]);
        assert!(!f.occurs_free("x"));
        assert!(f.occurs_free("a"));
    }

    #[test]
    fn shadowed_binder_is_not_free() {
        let f = Formula::and(Formula::var("x"), Formula::mu("x", Formula::var("x")));
        assert!(f.occurs_free("x"));
        assert_eq!(f.fixed_point_nesting(), 1);
    }

    #[test]
    fn empty_conj_and_disj() {
        assert_eq!(Formula::conj(vec![]), Formula::Top);
        assert_eq!(Formula::disj(vec![]), Formula::Bot);
        assert_eq!(
            Formula::conj(vec![Formula::var("a"), Formula::var("b")]),
            Formula::and(Formula::var("a"), Formula::var("b"))
        );
    }
}
