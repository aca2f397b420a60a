//! Splitting a positive formula into its strongly positive and weakly
//! negative parts, and the normal form of disjunctive conjuncts.

use std::fmt;

use thiserror::Error;

use crate::formula::{analyze, fresh_name, substitute, Formula, OccurrenceClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("{x} is not positive in {formula}")]
    NotPositive { x: String, formula: Formula },
    #[error("{x} has a weakly negative occurrence in {formula}")]
    NotStronglyPositive { x: String, formula: Formula },
    #[error("expected a fixed-point-free formula, found {0}")]
    FixedPoint(Formula),
    #[error("not disjunctive in {x} at {position}: {reason}")]
    NotDisjunctive {
        x: String,
        reason: String,
        position: String,
    },
    #[error("internal error: normal form conjunct {conjunct} is not disjunctive ({cause})")]
    Internal { conjunct: Formula, cause: String },
}

/// `φ(x) = ψ(x, x/y)`: every weakly negative occurrence of `x` renamed `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenamedPair {
    pub psi: Formula,
    pub x: String,
    pub y: String,
}

impl RenamedPair {
    /// Whether any occurrence was renamed.
    pub fn uses_y(&self) -> bool {
        self.psi.occurs_free(&self.y)
    }

    /// Substitutes `x` back for `y`, recovering the input.
    pub fn restore(&self) -> Formula {
        substitute(&self.psi, &self.y, &Formula::var(self.x.clone()))
    }
}

/// Renames the weakly negative occurrences of `x` to a fresh helper
/// variable, which is outside the parser's name space.
pub fn rename_weakly_negative(phi: &Formula, x: &str) -> Result<RenamedPair, NormalizeError> {
    if !phi.is_fixed_point_free() {
        return Err(NormalizeError::FixedPoint(phi.clone()));
    }
    if !analyze(phi, x).polarity.is_positive() {
        return Err(NormalizeError::NotPositive {
            x: x.to_string(),
            formula: phi.clone(),
        });
    }
    let y = fresh_name("_y", &phi.all_names());
    fn go(f: &Formula, x: &str, y: &str, under: bool) -> Formula {
        match f {
            Formula::Var(v) if v == x && under => Formula::var(y),
            Formula::And(a, b) => Formula::and(go(a, x, y, under), go(b, x, y, under)),
            Formula::Or(a, b) => Formula::or(go(a, x, y, under), go(b, x, y, under)),
            Formula::Imp(a, b) => Formula::imp(go(a, x, y, true), go(b, x, y, under)),
            other => other.clone(),
        }
    }
    Ok(RenamedPair {
        psi: go(phi, x, &y, false),
        x: x.to_string(),
        y,
    })
}

/// Parse tree of a term in the grammar `x | β∨φ | φ∨β | α→φ | φ∨φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisjTree {
    Var,
    SideLeft(Formula, Box<DisjTree>),
    SideRight(Box<DisjTree>, Formula),
    Guard(Formula, Box<DisjTree>),
    Join(Box<DisjTree>, Box<DisjTree>),
}

/// A disjunctive term in `x` with its head (`α`) and side (`β`) leaves,
/// deduplicated in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjunctiveTerm {
    pub formula: Formula,
    pub x: String,
    pub tree: DisjTree,
    pub head: Vec<Formula>,
    pub side: Vec<Formula>,
}

pub fn parse_disjunctive(f: &Formula, x: &str) -> Result<DisjunctiveTerm, NormalizeError> {
    let mut head = Vec::new();
    let mut side = Vec::new();
    let tree = disj_tree(f, x, "root", &mut head, &mut side)?;
    Ok(DisjunctiveTerm {
        formula: f.clone(),
        x: x.to_string(),
        tree,
        head,
        side,
    })
}

fn push_unique(v: &mut Vec<Formula>, f: &Formula) {
    if !v.contains(f) {
        v.push(f.clone());
    }
}

fn disj_tree(
    f: &Formula,
    x: &str,
    pos: &str,
    head: &mut Vec<Formula>,
    side: &mut Vec<Formula>,
) -> Result<DisjTree, NormalizeError> {
    let fail = |reason: String| NormalizeError::NotDisjunctive {
        x: x.to_string(),
        reason,
        position: pos.to_string(),
    };
    match f {
        Formula::Var(v) if v == x => Ok(DisjTree::Var),
        _ if !f.occurs_free(x) => Err(fail(format!("{f} does not contain {x}"))),
        Formula::Or(a, b) => match (a.occurs_free(x), b.occurs_free(x)) {
            (true, true) => Ok(DisjTree::Join(
                Box::new(disj_tree(a, x, &format!("{pos}.L"), head, side)?),
                Box::new(disj_tree(b, x, &format!("{pos}.R"), head, side)?),
            )),
            (true, false) => {
                let t = disj_tree(a, x, &format!("{pos}.L"), head, side)?;
                push_unique(side, b);
                Ok(DisjTree::SideRight(Box::new(t), (**b).clone()))
            }
            _ => {
                push_unique(side, a);
                let t = disj_tree(b, x, &format!("{pos}.R"), head, side)?;
                Ok(DisjTree::SideLeft((**a).clone(), Box::new(t)))
            }
        },
        Formula::Imp(a, b) => {
            if a.occurs_free(x) {
                return Err(fail(format!("antecedent {a} contains {x}")));
            }
            push_unique(head, a);
            let t = disj_tree(b, x, &format!("{pos}.C"), head, side)?;
            Ok(DisjTree::Guard((**a).clone(), Box::new(t)))
        }
        Formula::And(..) => Err(fail(format!("conjunction {f} contains {x}"))),
        _ => Err(fail(format!("{f} is outside the grammar"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Conjunct {
    XFree(Formula),
    Disjunctive(DisjunctiveTerm),
}

impl Conjunct {
    pub fn formula(&self) -> &Formula {
        match self {
            Conjunct::XFree(f) => f,
            Conjunct::Disjunctive(d) => &d.formula,
        }
    }
}

/// A conjunction of `x`-free and disjunctive conjuncts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub x: String,
    pub conjuncts: Vec<Conjunct>,
}

impl NormalForm {
    pub fn to_formula(&self) -> Formula {
        Formula::conj(self.conjuncts.iter().map(|c| c.formula().clone()))
    }

    pub fn disjunctive(&self) -> impl Iterator<Item = &DisjunctiveTerm> {
        self.conjuncts.iter().filter_map(|c| match c {
            Conjunct::Disjunctive(d) => Some(d),
            Conjunct::XFree(_) => None,
        })
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " ; ")?;
            }
            write!(f, "{}", c.formula())?;
        }
        Ok(())
    }
}

/// Distributes `→` over `∧` in consequents and `∨` over `∧`, then splits the
/// top-level conjunction.
///
/// Computed structurally: the conjunct list of `a ∧ b` is the concatenation,
/// of `a ∨ b` the pairwise disjunctions, of `α → b` the guarded conjuncts of
/// `b`. This is the fixed point of the two rewrite families and terminates
/// by construction.
pub fn to_normal_form(psi: &Formula, x: &str) -> Result<NormalForm, NormalizeError> {
    if !psi.is_fixed_point_free() {
        return Err(NormalizeError::FixedPoint(psi.clone()));
    }
    let report = analyze(psi, x);
    if report.count(OccurrenceClass::WeaklyNegative) > 0 {
        return Err(NormalizeError::NotStronglyPositive {
            x: x.to_string(),
            formula: psi.clone(),
        });
    }
    let mut conjuncts = Vec::new();
    for c in split(psi, x) {
        if !c.occurs_free(x) {
            conjuncts.push(Conjunct::XFree(c));
            continue;
        }
        match parse_disjunctive(&c, x) {
            Ok(d) => conjuncts.push(Conjunct::Disjunctive(d)),
            Err(e) => {
                return Err(NormalizeError::Internal {
                    conjunct: c,
                    cause: e.to_string(),
                })
            }
        }
    }
    Ok(NormalForm {
        x: x.to_string(),
        conjuncts,
    })
}

fn split(f: &Formula, x: &str) -> Vec<Formula> {
    if !f.occurs_free(x) {
        return vec![f.clone()];
    }
    match f {
        Formula::And(a, b) => {
            let mut out = split(a, x);
            out.extend(split(b, x));
            out
        }
        Formula::Or(a, b) => {
            let (l, r) = (split(a, x), split(b, x));
            l.iter()
                .flat_map(|p| r.iter().map(move |q| Formula::or(p.clone(), q.clone())))
                .collect()
        }
        Formula::Imp(a, b) => split(b, x)
            .into_iter()
            .map(|c| Formula::imp((**a).clone(), c))
            .collect(),
        _ => vec![f.clone()],
    }
}
