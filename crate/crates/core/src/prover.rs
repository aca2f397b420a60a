//! Decision procedure for IPC: the contraction-free sequent calculus G4ip.
//!
//! Invertible rules are applied eagerly; only right disjunction and the
//! `(C → D) → B` left rule branch. Every premise is smaller in the G4ip
//! multiset order, so search terminates; the node budget only guards
//! against exponential blow-up on large inputs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("proof search exceeded the budget of {0} nodes")]
    BudgetExceeded(usize),
    #[error("sequent contains a fixed point: {0}")]
    FixedPoint(Formula),
}

/// `Γ ⊢ φ` with `Γ` a multiset; treated as a set during search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub antecedents: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedents: Vec<Formula>, succedent: Formula) -> Self {
        Sequent {
            antecedents,
            succedent,
        }
    }

    /// `⊢ φ`
    pub fn theorem(succedent: Formula) -> Self {
        Self::new(Vec::new(), succedent)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ants: Vec<String> = self.antecedents.iter().map(|a| a.to_string()).collect();
        write!(f, "{} |- {}", ants.join(", "), self.succedent)
    }
}

type Context = BTreeSet<Formula>;

struct Search {
    budget: usize,
    nodes: usize,
    memo: HashMap<(Context, Formula), bool>,
}

/// Outcome of a single invertible left step.
enum LeftStep {
    Closed,
    Replace(Formula, Vec<Formula>),
    Split(Formula, Formula, Formula),
}

impl Search {
    fn tick(&mut self) -> Result<(), ProverError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(ProverError::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }

    fn invertible_left(gamma: &Context) -> Option<LeftStep> {
        use Formula::*;
        for f in gamma {
            let step = match f {
                Bot => LeftStep::Closed,
                Top => LeftStep::Replace(f.clone(), vec![]),
                And(a, b) => LeftStep::Replace(f.clone(), vec![(**a).clone(), (**b).clone()]),
                Or(a, b) => LeftStep::Split(f.clone(), (**a).clone(), (**b).clone()),
                Imp(a, b) => match &**a {
                    Var(_) if gamma.contains(a) => LeftStep::Replace(f.clone(), vec![(**b).clone()]),
                    Top => LeftStep::Replace(f.clone(), vec![(**b).clone()]),
                    Bot => LeftStep::Replace(f.clone(), vec![]),
                    And(c, d) => LeftStep::Replace(
                        f.clone(),
                        vec![Formula::imp((**c).clone(), Formula::imp((**d).clone(), (**b).clone()))],
                    ),
                    Or(c, d) => LeftStep::Replace(
                        f.clone(),
                        vec![
                            Formula::imp((**c).clone(), (**b).clone()),
                            Formula::imp((**d).clone(), (**b).clone()),
                        ],
                    ),
                    _ => continue,
                },
                _ => continue,
            };
            return Some(step);
        }
        None
    }

    fn prove(&mut self, mut gamma: Context, goal: Formula) -> Result<bool, ProverError> {
        use Formula::*;
        self.tick()?;
        // Invertible right rules.
        match goal {
            Top => return Ok(true),
            And(a, b) => return Ok(self.prove(gamma.clone(), *a)? && self.prove(gamma, *b)?),
            Imp(a, b) => {
                gamma.insert(*a);
                return self.prove(gamma, *b);
            }
            Mu(..) | Nu(..) => return Err(ProverError::FixedPoint(goal)),
            _ => {}
        }
        // Invertible left rules.
        match Self::invertible_left(&gamma) {
            Some(LeftStep::Closed) => return Ok(true),
            Some(LeftStep::Replace(old, new)) => {
                gamma.remove(&old);
                gamma.extend(new);
                return self.prove(gamma, goal);
            }
            Some(LeftStep::Split(old, l, r)) => {
                gamma.remove(&old);
                let mut gl = gamma.clone();
                gl.insert(l);
                if !self.prove(gl, goal.clone())? {
                    return Ok(false);
                }
                gamma.insert(r);
                return self.prove(gamma, goal);
            }
            None => {}
        }
        if let Some(fp) = gamma.iter().find(|f| matches!(f, Mu(..) | Nu(..))) {
            return Err(ProverError::FixedPoint(fp.clone()));
        }
        if matches!(goal, Var(_)) && gamma.contains(&goal) {
            return Ok(true);
        }
        let key = (gamma, goal);
        if let Some(&known) = self.memo.get(&key) {
            return Ok(known);
        }
        let (gamma, goal) = key;
        let result = self.prove_branching(&gamma, &goal)?;
        self.memo.insert((gamma, goal), result);
        Ok(result)
    }

    /// Non-invertible rules: right disjunction and `(C → D) → B` on the left.
    fn prove_branching(&mut self, gamma: &Context, goal: &Formula) -> Result<bool, ProverError> {
        if let Formula::Or(a, b) = goal {
            if self.prove(gamma.clone(), (**a).clone())? || self.prove(gamma.clone(), (**b).clone())? {
                return Ok(true);
            }
        }
        for f in gamma {
            let Formula::Imp(cd, b) = f else { continue };
            let Formula::Imp(c, d) = &**cd else { continue };
            let mut rest = gamma.clone();
            rest.remove(f);
            let mut left = rest.clone();
            left.insert(Formula::imp((**d).clone(), (**b).clone()));
            if !self.prove(left, Formula::imp((**c).clone(), (**d).clone()))? {
                continue;
            }
            rest.insert((**b).clone());
            if self.prove(rest, goal.clone())? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Whether `s` is derivable in IPC, exploring at most `budget` nodes.
pub fn provable(s: &Sequent, budget: usize) -> Result<bool, ProverError> {
    let mut search = Search {
        budget,
        nodes: 0,
        memo: HashMap::new(),
    };
    search.prove(s.antecedents.iter().cloned().collect(), s.succedent.clone())
}

/// `f ⊢ g` and `g ⊢ f`.
pub fn equivalent(f: &Formula, g: &Formula, budget: usize) -> Result<bool, ProverError> {
    Ok(provable(&Sequent::new(vec![f.clone()], g.clone()), budget)?
        && provable(&Sequent::new(vec![g.clone()], f.clone()), budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::FormulaGen;
    use crate::formula::parse;
    use crate::semantics::{algebras_up_to, find_entailment_countermodel};

    fn thm(s: &str) -> bool {
        provable(&Sequent::theorem(parse(s).unwrap()), DEFAULT_BUDGET).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        assert!(thm("a -> a"));
        assert!(!thm("a \\/ ~a"));
        assert!(!thm("~~a -> a"));
        assert!(thm("a -> ~~a"));
        assert!(thm("~~(a \\/ ~a)"));
        assert!(!thm("((a -> b) -> a) -> a"));
        assert!(thm("(a /\\ b -> c) -> a -> b -> c"));
        assert!(thm("F -> a"));
        assert!(!thm("F"));
        assert!(thm("T"));
    }

    #[test]
    fn equivalences() {
        let eq = |a: &str, b: &str| equivalent(&parse(a).unwrap(), &parse(b).unwrap(), DEFAULT_BUDGET).unwrap();
        assert!(eq("a -> b /\\ c", "(a -> b) /\\ (a -> c)"));
        assert!(eq("a1 -> a2 -> b", "(a1 /\\ a2) -> b"));
        assert!(eq("(a \\/ b) -> c", "(a -> c) /\\ (b -> c)"));
        assert!(!eq("~~a", "a"));
        assert!(eq("~~~a", "~a"));
    }

    #[test]
    fn budget_is_reported() {
        let f = parse("((a -> b) -> c) -> ((b -> a) -> c) -> c").unwrap();
        assert_eq!(
            provable(&Sequent::theorem(f), 2),
            Err(ProverError::BudgetExceeded(2))
        );
    }

    #[test]
    fn fixed_points_rejected() {
        let f = parse("mu x. x").unwrap();
        assert!(matches!(
            provable(&Sequent::theorem(f), DEFAULT_BUDGET),
            Err(ProverError::FixedPoint(_))
        ));
    }

    #[test]
    fn agrees_with_small_algebras() {
        // Sound: proved ⇒ no countermodel. Complete on this sample: every
        // refuted sequent is unprovable and every unprovable one is refuted
        // by some algebra of at most 4 points (the formulas are tiny).
        let algs = algebras_up_to(3).unwrap();
        let mut gen = FormulaGen::new(17);
        for _ in 0..300 {
            let f = gen.plain(&["a", "b"], 4);
            let proved = thm_f(&f);
            let refuted = algs
                .iter()
                .any(|alg| find_entailment_countermodel(&[], &f, alg).unwrap().is_some());
            assert_eq!(proved, !refuted, "{f}");
        }
    }

    fn thm_f(f: &Formula) -> bool {
        provable(&Sequent::theorem(f.clone()), DEFAULT_BUDGET).unwrap()
    }
}
