use std::fmt;

use super::Formula;

// Binding strengths; higher binds tighter.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Imp(_, c) if **c == Formula::Bot => UNARY,
        Formula::Imp(..) => IMP,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        Formula::Mu(..) | Formula::Nu(..) => 0,
        Formula::Var(_) | Formula::Top | Formula::Bot => UNARY,
    }
}

fn is_binary(f: &Formula) -> bool {
    matches!(strength(f), IMP | OR | AND)
}

/// Writes `f` in a context that needs at least binding strength `min`.
/// `tail` is true when nothing follows `f` before the enclosing group ends,
/// which is the only place a binder may appear without parentheses.
fn write(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8, tail: bool) -> fmt::Result {
    let s = strength(f);
    let binder = matches!(f, Formula::Mu(..) | Formula::Nu(..));
    if (binder && !tail) || (!binder && s < min) {
        out.write_str("(")?;
        write(out, f, 0, true)?;
        return out.write_str(")");
    }
    match f {
        Formula::Var(v) => out.write_str(v),
        Formula::Top => out.write_str("T"),
        Formula::Bot => out.write_str("F"),
        Formula::Imp(a, c) if **c == Formula::Bot => {
            out.write_str("~")?;
            write(out, a, UNARY, tail)
        }
        Formula::Imp(a, c) => {
            // Compound antecedents are always parenthesised for readability.
            if is_binary(a) {
                out.write_str("(")?;
                write(out, a, 0, true)?;
                out.write_str(")")?;
            } else {
                write(out, a, IMP + 1, false)?;
            }
            out.write_str(" -> ")?;
            write(out, c, IMP, tail)
        }
        Formula::Or(l, r) => {
            write(out, l, OR, false)?;
            out.write_str(" \\/ ")?;
            write(out, r, OR + 1, tail)
        }
        Formula::And(l, r) => {
            write(out, l, AND, false)?;
            out.write_str(" /\\ ")?;
            write(out, r, AND + 1, tail)
        }
        Formula::Mu(x, b) => {
            write!(out, "mu {x}. ")?;
            write(out, b, 0, true)
        }
        Formula::Nu(x, b) => {
            write!(out, "nu {x}. ")?;
            write(out, b, 0, true)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write(f, self, 0, true)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn right_assoc_implication_needs_no_parens() {
        let f = Formula::imp(v("a"), Formula::imp(v("b"), v("c")));
        assert_eq!(f.to_string(), "a -> b -> c");
        let g = Formula::imp(Formula::imp(v("a"), v("b")), v("c"));
        assert_eq!(g.to_string(), "(a -> b) -> c");
    }

    #[test]
    fn or_inside_and_is_parenthesised() {
        let f = Formula::and(Formula::or(v("a"), v("b")), v("c"));
        assert_eq!(f.to_string(), "(a \\/ b) /\\ c");
    }

    #[test]
    fn binder_at_the_tail() {
        let f = Formula::mu("x", Formula::or(v("b"), Formula::imp(v("a"), v("x"))));
        assert_eq!(f.to_string(), "mu x. b \\/ (a -> x)");
        let g = Formula::and(Formula::mu("x", v("x")), v("a"));
        assert_eq!(g.to_string(), "(mu x. x) /\\ a");
        let h = Formula::and(v("a"), Formula::mu("x", v("x")));
        assert_eq!(h.to_string(), "a /\\ mu x. x");
    }

    #[test]
    fn compound_antecedent_is_parenthesised() {
        let f = Formula::imp(Formula::and(v("a1"), v("a2")), v("b"));
        assert_eq!(f.to_string(), "(a1 /\\ a2) -> b");
    }

    #[test]
    fn negation_sugar() {
        let f = Formula::or(v("a"), Formula::neg(v("a")));
        assert_eq!(f.to_string(), "a \\/ ~a");
        let g = Formula::neg(Formula::imp(v("a"), v("b")));
        assert_eq!(g.to_string(), "~(a -> b)");
        assert_eq!(parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn same_level_associativity_is_preserved() {
        for f in [
            Formula::or(v("a"), Formula::or(v("b"), v("c"))),
            Formula::and(Formula::and(v("a"), v("b")), v("c")),
            Formula::and(v("a"), Formula::and(v("b"), v("c"))),
            Formula::or(Formula::mu("x", v("x")), Formula::nu("y", v("y"))),
            Formula::neg(Formula::mu("x", v("x"))),
            Formula::and(Formula::neg(Formula::mu("x", v("x"))), v("c")),
        ] {
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{f}");
        }
    }
}
