//! Upper bounds on closure ordinals, computed along the elimination trace.
//!
//! A bound `n` for `μx.φ` means `φⁿ(⊥)` is already the least fixed point
//! in every Heyting algebra, under every valuation.

use std::fmt::{self, Write as _};

use crate::eliminate::{mu_eliminate_traced, EliminateError, WnDecomposition};
use crate::formula::Formula;
use crate::normalize::{Conjunct, DisjunctiveTerm};

/// Which fact justified one factor of a bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundRule {
    /// `|Head| + 1` for a disjunctive term.
    Disjunctive { head: usize },
    /// A conjunct without `x` is constant: one step.
    Constant,
    /// `n + 1` for a weakly negative formula with `n` antecedent parts.
    WeaklyNegative { parts: usize },
    /// No weakly negative part: one step.
    NoWeaklyNegative,
    /// `n + m − 1` for the meet of two strong maps.
    Conj,
    /// `n · m` for the diagonal of a two-argument map.
    Diag,
    /// `n + 1` for the rolled composite.
    Roll,
    /// `(n + 1)(m + 1) − 1` for a pair of equations.
    Bekic,
}

impl fmt::Display for BoundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundRule::Disjunctive { head } => write!(f, "disjunctive term, |Head| = {head}: |Head| + 1"),
            BoundRule::Constant => write!(f, "x-free conjunct: constant map"),
            BoundRule::WeaklyNegative { parts } => write!(f, "weakly negative, {parts} antecedent part(s): n + 1"),
            BoundRule::NoWeaklyNegative => write!(f, "no weakly negative occurrence"),
            BoundRule::Conj => write!(f, "meet of strong maps: n + m - 1"),
            BoundRule::Diag => write!(f, "diagonal: n * m"),
            BoundRule::Roll => write!(f, "rolling: n + 1"),
            BoundRule::Bekic => write!(f, "pair of equations: (n + 1)(m + 1) - 1"),
        }
    }
}

/// A bound with the derivation that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceBound {
    pub value: usize,
    pub rule: BoundRule,
    /// What the bound is about, e.g. the conjunct it was computed for.
    pub subject: String,
    pub children: Vec<ConvergenceBound>,
}

impl ConvergenceBound {
    fn leaf(value: usize, rule: BoundRule, subject: impl Into<String>) -> Self {
        ConvergenceBound {
            value,
            rule,
            subject: subject.into(),
            children: Vec::new(),
        }
    }

    /// Indented derivation, one line per node.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s, 0);
        s
    }

    fn render_into(&self, s: &mut String, depth: usize) {
        let _ = write!(s, "{}{}  [{}]", "  ".repeat(depth), self.value, self.rule);
        if !self.subject.is_empty() {
            let _ = write!(s, "  {}", self.subject);
        }
        s.push('\n');
        for c in &self.children {
            c.render_into(s, depth + 1);
        }
    }
}

pub fn roll_bound(n: usize) -> usize {
    n + 1
}

/// `n + m − 1`. The lemma assumes `n, m ≥ 1`; a map converging in zero
/// steps also converges in one, so zero is treated as one.
pub fn conj_bound(n: usize, m: usize) -> usize {
    n.max(1) + m.max(1) - 1
}

pub fn diag_bound(n: usize, m: usize) -> usize {
    n * m
}

pub fn bekic_bound(n: usize, m: usize) -> usize {
    (n + 1) * (m + 1) - 1
}

pub fn bound_disjunctive(d: &DisjunctiveTerm) -> ConvergenceBound {
    ConvergenceBound::leaf(
        d.head.len() + 1,
        BoundRule::Disjunctive { head: d.head.len() },
        d.formula.to_string(),
    )
}

pub fn bound_weakly_negative(dec: &WnDecomposition) -> ConvergenceBound {
    let parts: Vec<String> = dec.parts.iter().map(|p| p.to_string()).collect();
    ConvergenceBound::leaf(
        dec.n() + 1,
        BoundRule::WeaklyNegative { parts: dec.n() },
        format!("parts [{}]", parts.join(", ")),
    )
}

fn combine(rule: BoundRule, a: ConvergenceBound, b: ConvergenceBound, subject: String) -> ConvergenceBound {
    let value = match rule {
        BoundRule::Conj => conj_bound(a.value, b.value),
        BoundRule::Diag => diag_bound(a.value, b.value),
        BoundRule::Bekic => bekic_bound(a.value, b.value),
        _ => unreachable!("binary combinators only"),
    };
    ConvergenceBound {
        value,
        rule,
        subject,
        children: vec![a, b],
    }
}

/// Bound for `μx.φ`, following the elimination of `μx.φ` step by step:
/// the strongly positive part is bounded conjunct-wise and folded with the
/// meet rule, then composed with the weakly negative part by the diagonal
/// rule.
pub fn bound_mu(phi: &Formula, x: &str) -> Result<ConvergenceBound, EliminateError> {
    let trace = mu_eliminate_traced(phi, x)?;
    let mut parts = trace.normal_form.conjuncts.iter().map(|c| match c {
        Conjunct::Disjunctive(d) => bound_disjunctive(d),
        Conjunct::XFree(f) => ConvergenceBound::leaf(1, BoundRule::Constant, f.to_string()),
    });
    let first = parts
        .next()
        .unwrap_or_else(|| ConvergenceBound::leaf(1, BoundRule::Constant, "T"));
    let strong = parts.fold(first, |acc, b| combine(BoundRule::Conj, acc, b, String::new()));
    let weak = match &trace.decomposition {
        Some(dec) => bound_weakly_negative(dec),
        None => ConvergenceBound::leaf(1, BoundRule::NoWeaklyNegative, ""),
    };
    Ok(combine(BoundRule::Diag, strong, weak, format!("mu {x}. {phi}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::phi_family;
    use crate::eliminate::decompose_weakly_negative;
    use crate::formula::parse;
    use crate::normalize::parse_disjunctive;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn combinators() {
        assert_eq!(roll_bound(2), 3);
        assert_eq!(conj_bound(1, 1), 1);
        assert_eq!(conj_bound(3, 2), 4);
        assert_eq!(diag_bound(2, 3), 6);
        assert_eq!(bekic_bound(1, 2), 5);
    }

    #[test]
    fn disjunctive_bounds() {
        assert_eq!(bound_disjunctive(&parse_disjunctive(&phi_family(2), "x").unwrap()).value, 3);
        assert_eq!(bound_disjunctive(&parse_disjunctive(&p("x"), "x").unwrap()).value, 1);
        assert_eq!(bound_disjunctive(&parse_disjunctive(&p("b \\/ x"), "x").unwrap()).value, 1);
    }

    #[test]
    fn weakly_negative_bounds() {
        let d = decompose_weakly_negative(&p("(x -> a) -> b"), "x").unwrap();
        assert_eq!(bound_weakly_negative(&d).value, 2);
        let d = decompose_weakly_negative(&p("T"), "x").unwrap();
        assert_eq!(bound_weakly_negative(&d).value, 1);
        let d = decompose_weakly_negative(&p("((x -> a) -> b) /\\ ((x -> c) -> d)"), "x").unwrap();
        assert_eq!(bound_weakly_negative(&d).value, 3);
    }

    #[test]
    fn mu_bounds() {
        for n in 1..=5 {
            assert_eq!(bound_mu(&phi_family(n), "x").unwrap().value, n + 1);
        }
        assert_eq!(bound_mu(&p("x"), "x").unwrap().value, 1);
        assert_eq!(bound_mu(&p("(x -> a) -> b"), "x").unwrap().value, 2);
    }

    #[test]
    fn render_shows_derivation() {
        let b = bound_mu(&p("(a -> x) /\\ ((x -> a) -> b)"), "x").unwrap();
        let r = b.render();
        assert!(r.starts_with(&format!("{}  [diagonal", b.value)), "{r}");
        assert!(r.contains("\n  "), "{r}");
        assert!(r.contains("weakly negative"), "{r}");
    }
}
