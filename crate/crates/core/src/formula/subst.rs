use std::collections::{BTreeMap, BTreeSet};

use super::Formula;

/// First of `base`, `base'`, `base''`, ... not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Capture-avoiding substitution of `g` for the free occurrences of `x` in `f`.
pub fn substitute(f: &Formula, x: &str, g: &Formula) -> Formula {
    let mut map = BTreeMap::new();
    map.insert(x.to_string(), g.clone());
    substitute_many(f, &map)
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute_many(f: &Formula, map: &BTreeMap<String, Formula>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    let incoming: BTreeSet<String> = map.values().flat_map(|g| g.free_vars()).collect();
    subst_rec(f, map, &incoming)
}

fn subst_rec(
    f: &Formula,
    map: &BTreeMap<String, Formula>,
    incoming: &BTreeSet<String>,
) -> Formula {
    match f {
        Formula::Var(v) => map.get(v).cloned().unwrap_or_else(|| f.clone()),
        Formula::Top | Formula::Bot => f.clone(),
        Formula::And(l, r) => Formula::and(subst_rec(l, map, incoming), subst_rec(r, map, incoming)),
        Formula::Or(l, r) => Formula::or(subst_rec(l, map, incoming), subst_rec(r, map, incoming)),
        Formula::Imp(l, r) => Formula::imp(subst_rec(l, map, incoming), subst_rec(r, map, incoming)),
        Formula::Mu(b, body) | Formula::Nu(b, body) => {
            let rebuild = |b: String, body: Formula| match f {
                Formula::Mu(..) => Formula::mu(b, body),
                _ => Formula::nu(b, body),
            };
            // Drop mappings the binder shadows, and those with nothing to replace.
            let inner: BTreeMap<String, Formula> = map
                .iter()
                .filter(|(k, _)| *k != b && body.occurs_free(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            if inner.is_empty() {
                return f.clone();
            }
            if incoming.contains(b) {
                let mut avoid = incoming.clone();
                avoid.extend(body.all_names());
                avoid.extend(inner.keys().cloned());
                let renamed = fresh_name(b, &avoid);
                let body = substitute(body, b, &Formula::Var(renamed.clone()));
                rebuild(renamed, subst_rec(&body, &inner, incoming))
            } else {
                rebuild(b.clone(), subst_rec(body, &inner, incoming))
            }
        }
    }
}

/// `fⁿ(base)`: `base` for `n = 0`, otherwise `f[x := fⁿ⁻¹(base)]`.
pub fn iterate_subst(f: &Formula, x: &str, n: usize, base: &Formula) -> Formula {
    (0..n).fold(base.clone(), |acc, _| substitute(f, x, &acc))
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn plain_substitution() {
        assert_eq!(substitute(&p("a -> x"), "x", &Formula::Bot), p("a -> F"));
        let g = p("b /\\ c");
        assert_eq!(substitute(&Formula::var("x"), "x", &g), g);
    }

    #[test]
    fn binder_is_renamed_to_avoid_capture() {
        let f = Formula::mu("x", p("x \\/ y"));
        let out = substitute(&f, "y", &Formula::var("x"));
        assert_eq!(out, Formula::mu("x'", p("x' \\/ x")));
    }

    #[test]
    fn bound_occurrences_are_untouched() {
        let f = p("x /\\ mu x. x \\/ a");
        assert_eq!(substitute(&f, "x", &p("b")), p("b /\\ mu x. x \\/ a"));
    }

    #[test]
    fn simultaneous_substitution_does_not_chain() {
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), p("b"));
        m.insert("b".to_string(), p("a"));
        assert_eq!(substitute_many(&p("a -> b"), &m), p("b -> a"));
    }

    #[test]
    fn iterates() {
        assert_eq!(iterate_subst(&p("a -> x"), "x", 2, &Formula::Bot), p("a -> a -> F"));
        assert_eq!(iterate_subst(&p("a -> x"), "x", 0, &Formula::Bot), Formula::Bot);
        assert_eq!(
            iterate_subst(&p("b \\/ (a -> x)"), "x", 1, &Formula::Bot),
            p("b \\/ (a -> F)")
        );
    }

    #[test]
    fn fresh_names_skip_taken() {
        let avoid: BTreeSet<String> = ["x", "x'"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fresh_name("x", &avoid), "x''");
        assert_eq!(fresh_name("y", &avoid), "y");
    }
}
