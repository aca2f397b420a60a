//! Fixed-point elimination: closed forms for `μ` of disjunctive and weakly
//! negative formulas, `ν` by substituting `⊤`, and the recursive driver.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{analyze, fresh_name, substitute, substitute_many, well_formed, Formula, OccurrenceClass};
use crate::normalize::{
    rename_weakly_negative, to_normal_form, Conjunct, DisjunctiveTerm, NormalForm, NormalizeError, RenamedPair,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EliminateError {
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("{x} is not positive in {formula}")]
    NotPositive { x: String, formula: Formula },
    #[error("expected a fixed-point-free formula, found {0}")]
    FixedPoint(Formula),
    #[error("{x} occurs strongly positively in {formula}")]
    StronglyPositive { x: String, formula: Formula },
    #[error("formula is not well formed: {0}")]
    IllFormed(String),
}

fn require_positive_fp_free(phi: &Formula, x: &str) -> Result<(), EliminateError> {
    if !phi.is_fixed_point_free() {
        return Err(EliminateError::FixedPoint(phi.clone()));
    }
    if !analyze(phi, x).polarity.is_positive() {
        return Err(EliminateError::NotPositive {
            x: x.to_string(),
            formula: phi.clone(),
        });
    }
    Ok(())
}

/// Bottom-up unit laws:
/// `⊤∧φ = φ`, `φ∧⊥ = ⊥`, `⊥∨φ = φ`, `φ∨⊤ = ⊤`, `⊤→φ = φ`, `φ→⊤ = ⊤`,
/// `⊥→φ = ⊤`, `φ→φ = ⊤`, each in both orientations where it applies.
pub fn simplify(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        And(a, b) => match (simplify(a), simplify(b)) {
            (Top, g) | (g, Top) => g,
            (Bot, _) | (_, Bot) => Bot,
            (a, b) => Formula::and(a, b),
        },
        Or(a, b) => match (simplify(a), simplify(b)) {
            (Bot, g) | (g, Bot) => g,
            (Top, _) | (_, Top) => Top,
            (a, b) => Formula::or(a, b),
        },
        Imp(a, b) => match (simplify(a), simplify(b)) {
            (Top, g) => g,
            (_, Top) | (Bot, _) => Top,
            (a, b) if a == b => Top,
            (a, b) => Formula::imp(a, b),
        },
        Mu(x, body) => Formula::mu(x.clone(), simplify(body)),
        Nu(x, body) => Formula::nu(x.clone(), simplify(body)),
        _ => f.clone(),
    }
}

/// `μx.d = (⋀ Head) → (⋁ Side)`, simplified.
pub fn mu_disjunctive(d: &DisjunctiveTerm) -> Formula {
    simplify(&Formula::imp(
        Formula::conj(d.head.iter().cloned()),
        Formula::disj(d.side.iter().cloned()),
    ))
}

/// `φ(x) = ψ₀(ψ₁(x), …, ψₙ(x))`, one helper `yᵢ` per distinct outermost
/// antecedent that contains `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WnDecomposition {
    pub x: String,
    pub psi0: Formula,
    pub vars: Vec<String>,
    pub parts: Vec<Formula>,
}

impl WnDecomposition {
    pub fn n(&self) -> usize {
        self.parts.len()
    }

    /// `ψ₀(ψ₁, …, ψₙ)`, which is the decomposed formula again.
    pub fn recompose(&self) -> Formula {
        substitute_many(&self.psi0, &self.assign(&self.parts))
    }

    fn assign(&self, values: &[Formula]) -> BTreeMap<String, Formula> {
        self.vars.iter().cloned().zip(values.iter().cloned()).collect()
    }

    /// The right-hand sides `gᵢ(ȳ) = ψᵢ(ψ₀(ȳ))` of the greatest-solution system.
    pub fn system(&self) -> EquationSystem {
        let rhs = self
            .parts
            .iter()
            .map(|p| substitute(p, &self.x, &self.psi0))
            .collect();
        EquationSystem {
            vars: self.vars.clone(),
            rhs,
        }
    }
}

/// `yᵢ = gᵢ(y₁, …, yₙ)`, each `gᵢ` monotone in every `yⱼ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub vars: Vec<String>,
    pub rhs: Vec<Formula>,
}

pub fn decompose_weakly_negative(phi: &Formula, x: &str) -> Result<WnDecomposition, EliminateError> {
    require_positive_fp_free(phi, x)?;
    if analyze(phi, x).count(OccurrenceClass::StronglyPositive) > 0 {
        return Err(EliminateError::StronglyPositive {
            x: x.to_string(),
            formula: phi.clone(),
        });
    }
    let mut avoid = phi.all_names();
    let mut vars = Vec::new();
    let mut parts = Vec::new();
    fn go(
        f: &Formula,
        x: &str,
        avoid: &mut std::collections::BTreeSet<String>,
        vars: &mut Vec<String>,
        parts: &mut Vec<Formula>,
    ) -> Formula {
        match f {
            Formula::And(a, b) => Formula::and(go(a, x, avoid, vars, parts), go(b, x, avoid, vars, parts)),
            Formula::Or(a, b) => Formula::or(go(a, x, avoid, vars, parts), go(b, x, avoid, vars, parts)),
            Formula::Imp(a, b) => {
                let ante = if a.occurs_free(x) {
                    // Identical antecedents share a helper.
                    if let Some(i) = parts.iter().position(|p| p == &**a) {
                        return Formula::imp(Formula::var(vars[i].clone()), go(b, x, avoid, vars, parts));
                    }
                    let y = fresh_name(&format!("_w{}", vars.len() + 1), avoid);
                    avoid.insert(y.clone());
                    vars.push(y.clone());
                    parts.push((**a).clone());
                    Formula::var(y)
                } else {
                    (**a).clone()
                };
                Formula::imp(ante, go(b, x, avoid, vars, parts))
            }
            other => other.clone(),
        }
    }
    let psi0 = go(phi, x, &mut avoid, &mut vars, &mut parts);
    Ok(WnDecomposition {
        x: x.to_string(),
        psi0,
        vars,
        parts,
    })
}

/// `ν̄ = (ȳ ↦ ⟨ψᵢ(ψ₀(ȳ))⟩ᵢ)ⁿ(⊤, …, ⊤)`, simplified after every round.
pub fn solve_greatest_system(dec: &WnDecomposition) -> Vec<Formula> {
    let mut nu = vec![Formula::Top; dec.n()];
    for _ in 0..dec.n() {
        let inner = simplify(&substitute_many(&dec.psi0, &dec.assign(&nu)));
        let next: Vec<Formula> = dec
            .parts
            .iter()
            .map(|p| simplify(&substitute(p, &dec.x, &inner)))
            .collect();
        // A syntactically stable iterate is stable for good.
        if next == nu {
            break;
        }
        nu = next;
    }
    nu
}

/// `μx.φ = ψ₀(ν̄)` for `φ` weakly negative in `x`.
pub fn mu_weakly_negative(phi: &Formula, x: &str) -> Result<Formula, EliminateError> {
    let dec = decompose_weakly_negative(phi, x)?;
    Ok(mu_weakly_negative_from(&dec))
}

fn mu_weakly_negative_from(dec: &WnDecomposition) -> Formula {
    let nu = solve_greatest_system(dec);
    simplify(&substitute_many(&dec.psi0, &dec.assign(&nu)))
}

/// Every intermediate of one `μ` elimination; used to derive bounds.
#[derive(Debug, Clone)]
pub struct MuTrace {
    pub renamed: RenamedPair,
    pub normal_form: NormalForm,
    /// `μx` of each conjunct: the closed form for disjunctive ones, the
    /// conjunct itself for `x`-free ones.
    pub conjunct_results: Vec<Formula>,
    /// `⋀ ψ′ᵢ(y)`, weakly negative in `y`.
    pub combined: Formula,
    /// Present when `y` occurs in `combined`.
    pub decomposition: Option<WnDecomposition>,
    pub result: Formula,
}

pub fn mu_eliminate_traced(phi: &Formula, x: &str) -> Result<MuTrace, EliminateError> {
    require_positive_fp_free(phi, x)?;
    let renamed = rename_weakly_negative(phi, x)?;
    let normal_form = to_normal_form(&renamed.psi, x)?;
    let conjunct_results: Vec<Formula> = normal_form
        .conjuncts
        .iter()
        .map(|c| match c {
            Conjunct::XFree(f) => f.clone(),
            Conjunct::Disjunctive(d) => mu_disjunctive(d),
        })
        .collect();
    let mut distinct: Vec<Formula> = Vec::new();
    for r in &conjunct_results {
        if !distinct.contains(r) {
            distinct.push(r.clone());
        }
    }
    let combined = simplify(&Formula::conj(distinct));
    let (decomposition, result) = if combined.occurs_free(&renamed.y) {
        let dec = decompose_weakly_negative(&combined, &renamed.y)?;
        let r = mu_weakly_negative_from(&dec);
        (Some(dec), r)
    } else {
        (None, combined.clone())
    };
    Ok(MuTrace {
        renamed,
        normal_form,
        conjunct_results,
        combined,
        decomposition,
        result,
    })
}

/// A fixed-point-free formula equivalent to `μx.φ`.
pub fn mu_eliminate(phi: &Formula, x: &str) -> Result<Formula, EliminateError> {
    Ok(mu_eliminate_traced(phi, x)?.result)
}

/// `νx.φ = φ(⊤)`, simplified.
pub fn nu_eliminate(phi: &Formula, x: &str) -> Result<Formula, EliminateError> {
    require_positive_fp_free(phi, x)?;
    Ok(simplify(&substitute(phi, x, &Formula::Top)))
}

/// Eliminates every fixed point, innermost first.
pub fn eliminate_all(chi: &Formula) -> Result<Formula, EliminateError> {
    require_well_formed(chi)?;
    go_collect(chi, &mut None)
}

fn require_well_formed(chi: &Formula) -> Result<(), EliminateError> {
    let wf = well_formed(chi);
    if wf.ok {
        return Ok(());
    }
    let msg = wf
        .diagnostics
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    Err(EliminateError::IllFormed(msg))
}

/// Post-order elimination; with `obligations`, records for every binder
/// `σx.φ` the pair `(φ′[x := r], r)` where `φ′` is the eliminated body and
/// `r` the result.
fn go_collect(f: &Formula, obligations: &mut Option<Vec<(Formula, Formula)>>) -> Result<Formula, EliminateError> {
    Ok(match f {
        Formula::And(a, b) => Formula::and(go_collect(a, obligations)?, go_collect(b, obligations)?),
        Formula::Or(a, b) => Formula::or(go_collect(a, obligations)?, go_collect(b, obligations)?),
        Formula::Imp(a, b) => Formula::imp(go_collect(a, obligations)?, go_collect(b, obligations)?),
        Formula::Mu(x, body) | Formula::Nu(x, body) => {
            let body = go_collect(body, obligations)?;
            let r = if matches!(f, Formula::Mu(..)) {
                mu_eliminate(&body, x)?
            } else {
                nu_eliminate(&body, x)?
            };
            if let Some(obs) = obligations {
                obs.push((substitute(&body, x, &r), r.clone()));
            }
            r
        }
        _ => f.clone(),
    })
}

/// Equivalences that hold iff every eliminated binder yields a fixed point
/// of its (eliminated) body. All are fixed-point free, so a propositional
/// prover can discharge them.
pub fn fixed_point_obligations(chi: &Formula) -> Result<Vec<(Formula, Formula)>, EliminateError> {
    require_well_formed(chi)?;
    let mut obligations = Some(Vec::new());
    go_collect(chi, &mut obligations)?;
    Ok(obligations.unwrap_or_default())
}
