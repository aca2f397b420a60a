use std::fmt;

use super::Formula;

/// One edge from a node to a child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Left,
    Right,
    Antecedent,
    Consequent,
    Body,
}

/// Root-to-leaf address of a variable occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OccurrencePath {
    pub path: Vec<Step>,
    /// Number of implication nodes on the path entered through the antecedent.
    pub crossings: usize,
}

impl fmt::Display for OccurrencePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            return f.write_str("<root>");
        }
        let parts: Vec<&str> = self
            .path
            .iter()
            .map(|s| match s {
                Step::Left => "L",
                Step::Right => "R",
                Step::Antecedent => "A",
                Step::Consequent => "C",
                Step::Body => "B",
            })
            .collect();
        write!(f, "{} ({} crossings)", parts.join("."), self.crossings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
    Mixed,
    Absent,
}

impl Polarity {
    /// Absent variables are vacuously positive.
    pub fn is_positive(self) -> bool {
        matches!(self, Polarity::Positive | Polarity::Absent)
    }

    pub fn is_negative(self) -> bool {
        matches!(self, Polarity::Negative | Polarity::Absent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OccurrenceClass {
    /// Not inside any implication antecedent.
    StronglyPositive,
    WeaklyNegative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub path: OccurrencePath,
    pub class: OccurrenceClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableReport {
    pub variable: String,
    pub polarity: Polarity,
    pub occurrences: Vec<Occurrence>,
}

impl VariableReport {
    pub fn count(&self, class: OccurrenceClass) -> usize {
        self.occurrences.iter().filter(|o| o.class == class).count()
    }

    pub fn all_strongly_positive(&self) -> bool {
        self.occurrences
            .iter()
            .all(|o| o.class == OccurrenceClass::StronglyPositive)
    }

    pub fn all_weakly_negative(&self) -> bool {
        self.occurrences
            .iter()
            .all(|o| o.class == OccurrenceClass::WeaklyNegative)
    }
}

fn collect(f: &Formula, x: &str, path: &mut Vec<Step>, crossings: usize, out: &mut Vec<Occurrence>) {
    let mut go = |child: &Formula, step: Step, crossings: usize, out: &mut Vec<Occurrence>| {
        path.push(step);
        collect(child, x, path, crossings, out);
        path.pop();
    };
    match f {
        Formula::Var(v) if v == x => out.push(Occurrence {
            path: OccurrencePath {
                path: path.clone(),
                crossings,
            },
            class: if crossings == 0 {
                OccurrenceClass::StronglyPositive
            } else {
                OccurrenceClass::WeaklyNegative
            },
        }),
        Formula::Var(_) | Formula::Top | Formula::Bot => {}
        Formula::And(l, r) | Formula::Or(l, r) => {
            go(l, Step::Left, crossings, out);
            go(r, Step::Right, crossings, out);
        }
        Formula::Imp(a, c) => {
            go(a, Step::Antecedent, crossings + 1, out);
            go(c, Step::Consequent, crossings, out);
        }
        Formula::Mu(b, body) | Formula::Nu(b, body) => {
            if b != x {
                go(body, Step::Body, crossings, out);
            }
        }
    }
}

/// Occurrence paths, polarity and strongly-positive / weakly-negative
/// classification of the free occurrences of `x` in `f`.
pub fn analyze(f: &Formula, x: &str) -> VariableReport {
    let mut occurrences = Vec::new();
    collect(f, x, &mut Vec::new(), 0, &mut occurrences);
    let even = occurrences.iter().filter(|o| o.path.crossings % 2 == 0).count();
    let polarity = if occurrences.is_empty() {
        Polarity::Absent
    } else if even == occurrences.len() {
        Polarity::Positive
    } else if even == 0 {
        Polarity::Negative
    } else {
        Polarity::Mixed
    };
    VariableReport {
        variable: x.to_string(),
        polarity,
        occurrences,
    }
}

/// A binder whose variable has a negative occurrence in its body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinderDiagnostic {
    /// Path from the root of the checked formula to the binder node.
    pub binder_path: Vec<Step>,
    pub binder: String,
    /// Offending occurrence, relative to the binder's body.
    pub occurrence: OccurrencePath,
}

impl fmt::Display for BinderDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "binder `{}` occurs negatively in its body at {}",
            self.binder, self.occurrence
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellFormedness {
    pub ok: bool,
    pub diagnostics: Vec<BinderDiagnostic>,
}

fn check_binders(f: &Formula, path: &mut Vec<Step>, out: &mut Vec<BinderDiagnostic>) {
    match f {
        Formula::Var(_) | Formula::Top | Formula::Bot => {}
        Formula::And(l, r) | Formula::Or(l, r) => {
            path.push(Step::Left);
            check_binders(l, path, out);
            path.pop();
            path.push(Step::Right);
            check_binders(r, path, out);
            path.pop();
        }
        Formula::Imp(a, c) => {
            path.push(Step::Antecedent);
            check_binders(a, path, out);
            path.pop();
            path.push(Step::Consequent);
            check_binders(c, path, out);
            path.pop();
        }
        Formula::Mu(x, body) | Formula::Nu(x, body) => {
            let report = analyze(body, x);
            for occ in report.occurrences {
                if occ.path.crossings % 2 == 1 {
                    out.push(BinderDiagnostic {
                        binder_path: path.clone(),
                        binder: x.clone(),
                        occurrence: occ.path,
                    });
                }
            }
            path.push(Step::Body);
            check_binders(body, path, out);
            path.pop();
        }
    }
}

/// Every `μ`/`ν` binder must occur only positively in its body.
pub fn well_formed(f: &Formula) -> WellFormedness {
    let mut diagnostics = Vec::new();
    check_binders(f, &mut Vec::new(), &mut diagnostics);
    WellFormedness {
        ok: diagnostics.is_empty(),
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn double_crossing_is_positive_but_weakly_negative() {
        let r = analyze(&p("(x -> a) -> b"), "x");
        assert_eq!(r.polarity, Polarity::Positive);
        assert_eq!(r.occurrences.len(), 1);
        assert_eq!(r.occurrences[0].path.crossings, 2);
        assert_eq!(r.occurrences[0].path.path, vec![Step::Antecedent, Step::Antecedent]);
        assert_eq!(r.occurrences[0].class, OccurrenceClass::WeaklyNegative);
    }

    #[test]
    fn consequent_occurrence_is_strongly_positive() {
        let r = analyze(&p("b \\/ (a -> x)"), "x");
        assert_eq!(r.polarity, Polarity::Positive);
        assert!(r.all_strongly_positive());
    }

    #[test]
    fn antecedent_occurrence_is_negative() {
        let r = analyze(&p("x -> a"), "x");
        assert_eq!(r.polarity, Polarity::Negative);
        assert!(r.all_weakly_negative());
    }

    #[test]
    fn mixed_and_absent() {
        assert_eq!(analyze(&p("x -> x"), "x").polarity, Polarity::Mixed);
        let r = analyze(&p("a /\\ b"), "x");
        assert_eq!(r.polarity, Polarity::Absent);
        assert!(r.polarity.is_positive() && r.polarity.is_negative());
    }

    #[test]
    fn bound_occurrences_are_ignored() {
        let r = analyze(&p("x /\\ (mu x. x -> a)"), "x");
        assert_eq!(r.occurrences.len(), 1);
    }

    #[test]
    fn well_formedness() {
        let bad = well_formed(&Formula::mu("x", p("x -> a")));
        assert!(!bad.ok);
        assert_eq!(bad.diagnostics[0].binder, "x");
        assert_eq!(bad.diagnostics[0].occurrence.crossings, 1);
        assert!(well_formed(&Formula::mu("x", p("(x -> a) -> b"))).ok);
        assert!(well_formed(&Formula::nu("x", Formula::Top)).ok);
        // A nested binder is checked on its own body.
        let nested = p("mu x. a /\\ (nu y. y -> x)");
        let wf = well_formed(&nested);
        assert!(!wf.ok);
        assert_eq!(wf.diagnostics.len(), 1);
        assert_eq!(wf.diagnostics[0].binder, "y");
        assert_eq!(wf.diagnostics[0].binder_path, vec![Step::Body, Step::Right]);
    }
}
