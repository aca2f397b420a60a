//! Fixed-point identities checked on tabulated maps over a finite algebra.
//!
//! A "polynomial" here is the map `h ↦ ⟦φ⟧(v[x ↦ h])` for a random
//! fixed-point-free `φ` with `x` positive and a random valuation `v` of its
//! parameters. Polynomials are tabulated once and the identities are then
//! checked by iterating the tables.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use super::algebra::{DownsetAlgebra, Elem};
use super::eval::{EvalError, Program, Valuation};
use crate::corpus::FormulaGen;
use crate::formula::Formula;

const PARAMS: [&str; 3] = ["a", "b", "c"];
const POLY_DEPTH: usize = 4;

/// A map `H → H` given by its table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryMap(pub Vec<Elem>);

impl UnaryMap {
    pub fn from_fn(alg: &DownsetAlgebra, f: impl Fn(Elem) -> Elem) -> Self {
        UnaryMap(alg.elements().map(f).collect())
    }

    /// Tabulates `φ` as a function of `x`, parameters taken from `v`.
    pub fn of_formula(alg: &DownsetAlgebra, f: &Formula, x: &str, v: &Valuation) -> Result<Self, EvalError> {
        let p = Program::compile(f, &[x]);
        let mut env = p.env(&v.clone().with(x, alg.bottom()))?;
        let mut t = Vec::with_capacity(alg.size());
        for h in alg.elements() {
            env[0] = h;
            t.push(p.run(alg, &mut env)?);
        }
        Ok(UnaryMap(t))
    }

    #[inline]
    pub fn apply(&self, h: Elem) -> Elem {
        self.0[h.index()]
    }

    pub fn compose(&self, inner: &UnaryMap) -> UnaryMap {
        UnaryMap(inner.0.iter().map(|&h| self.apply(h)).collect())
    }

    pub fn is_monotone(&self, alg: &DownsetAlgebra) -> bool {
        alg.elements()
            .all(|a| alg.elements().all(|b| !alg.leq(a, b) || alg.leq(self.apply(a), self.apply(b))))
    }

    pub fn is_inflating(&self, alg: &DownsetAlgebra) -> bool {
        alg.elements().all(|h| alg.leq(h, self.apply(h)))
    }

    /// Least fixed point and closure ordinal, iterating from the bottom.
    pub fn lfp(&self, alg: &DownsetAlgebra) -> (Elem, usize) {
        iterate(alg.bottom(), alg.size(), |h| self.apply(h))
    }

    /// Greatest fixed point and step count, iterating from the top.
    pub fn gfp(&self, alg: &DownsetAlgebra) -> (Elem, usize) {
        iterate(alg.top(), alg.size(), |h| self.apply(h))
    }

    /// Prefixed points `{p | f(p) ≤ p}`.
    pub fn prefixed_points(&self, alg: &DownsetAlgebra) -> Vec<Elem> {
        alg.elements().filter(|&p| alg.leq(self.apply(p), p)).collect()
    }
}

/// A map `H × H → H` given by its table, `f(x, y)` at `x * m + y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMap {
    m: usize,
    table: Vec<Elem>,
}

impl BinaryMap {
    pub fn of_formula(
        alg: &DownsetAlgebra,
        f: &Formula,
        x: &str,
        y: &str,
        v: &Valuation,
    ) -> Result<Self, EvalError> {
        let p = Program::compile(f, &[x, y]);
        let mut env = p.env(&v.clone().with(x, alg.bottom()).with(y, alg.bottom()))?;
        let mut table = Vec::with_capacity(alg.size() * alg.size());
        for hx in alg.elements() {
            for hy in alg.elements() {
                env[0] = hx;
                env[1] = hy;
                table.push(p.run(alg, &mut env)?);
            }
        }
        Ok(BinaryMap { m: alg.size(), table })
    }

    #[inline]
    pub fn apply(&self, x: Elem, y: Elem) -> Elem {
        self.table[x.index() * self.m + y.index()]
    }

    /// `y ↦ f(p, y)`
    pub fn fix_first(&self, p: Elem) -> UnaryMap {
        UnaryMap((0..self.m as u16).map(|y| self.apply(p, Elem(y))).collect())
    }

    /// `x ↦ f(x, p)`
    pub fn fix_second(&self, p: Elem) -> UnaryMap {
        UnaryMap((0..self.m as u16).map(|x| self.apply(Elem(x), p)).collect())
    }

    pub fn diagonal(&self) -> UnaryMap {
        UnaryMap((0..self.m as u16).map(|x| self.apply(Elem(x), Elem(x))).collect())
    }
}

/// Iterates `f` from `start` until it stabilizes; returns the fixed point
/// and the least `k` with `fᵏ(start) = fᵏ⁺¹(start)`.
///
/// Panics if no fixed point is reached within `bound + 1` steps, which
/// cannot happen for a monotone map on a lattice with `bound` elements.
pub fn iterate(start: Elem, bound: usize, f: impl Fn(Elem) -> Elem) -> (Elem, usize) {
    let mut cur = start;
    for k in 0..=bound {
        let next = f(cur);
        if next == cur {
            return (cur, k);
        }
        cur = next;
    }
    panic!("iteration did not stabilize; map is not monotone")
}

/// Least solution of `x = f(x, y), y = g(x, y)` by simultaneous iteration
/// from `(⊥, ⊥)`, with its step count.
pub fn lfp_pair(alg: &DownsetAlgebra, f: &BinaryMap, g: &BinaryMap) -> ((Elem, Elem), usize) {
    let mut cur = (alg.bottom(), alg.bottom());
    for k in 0..=2 * alg.size() {
        let next = (f.apply(cur.0, cur.1), g.apply(cur.0, cur.1));
        if next == cur {
            return (cur, k);
        }
        cur = next;
    }
    panic!("pair iteration did not stabilize")
}

/// A uniformly random monotone map: `h ↦ ⋁_{g ≤ h} r(g)` for random `r`.
/// Typically not strong, which makes it useful for checking that the three
/// strength conditions stand or fall together.
pub fn random_monotone_map(alg: &DownsetAlgebra, rng: &mut impl Rng) -> UnaryMap {
    let r: Vec<Elem> = alg
        .elements()
        .map(|_| Elem(rng.gen_range(0..alg.size() as u16)))
        .collect();
    UnaryMap::from_fn(alg, |h| {
        alg.elements()
            .filter(|&g| alg.leq(g, h))
            .fold(alg.bottom(), |acc, g| alg.join(acc, r[g.index()]))
    })
}

/// Which identity a check exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    /// `μ(f∘g) = f(μ(g∘f))`
    Roll,
    /// `μₓ f(x,x) = μₓ μ_y f(x,y)`
    Diag,
    /// Simultaneous least solution of `⟨f, g⟩` via nested fixed points.
    Bekic,
    /// `x ∧ f(y) ≤ f(x ∧ y)`
    StrongConj,
    /// `f(x → y) ≤ x → f(y)`
    StrongImpl,
    /// `x → y ≤ f(x) → f(y)`
    StrongEnriched,
    /// The three strength conditions agree on arbitrary monotone maps.
    StrongEquivalence,
    /// Disjunctive terms denote inflating maps.
    Inflating,
    /// `Pre(f ∨ g) = Pre(f ∘ g)` for inflating `f`, `g`.
    Circvee,
    /// `μ(a → f) = a → μf`
    FixrImpl,
    /// `μ(a ∧ f) = a ∧ μf`
    FixrConj,
    /// `μ(f₁ ∧ f₂) = μf₁ ∧ μf₂`
    DistrConj,
    /// `f(f(⊤)) = f(⊤) = νf`
    PhiTop,
    /// `h ≤ h'` implies `f(h) ≤ f(h')` for `x` positive.
    Monotone,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub const ALL_LAWS: [Law; 14] = [
    Law::Roll,
    Law::Diag,
    Law::Bekic,
    Law::StrongConj,
    Law::StrongImpl,
    Law::StrongEnriched,
    Law::StrongEquivalence,
    Law::Inflating,
    Law::Circvee,
    Law::FixrImpl,
    Law::FixrConj,
    Law::DistrConj,
    Law::PhiTop,
    Law::Monotone,
];

#[derive(Debug, Clone)]
pub struct LemmaFailure {
    pub law: Law,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaReport {
    pub algebra_size: usize,
    pub checks: BTreeMap<Law, usize>,
    pub failures: Vec<LemmaFailure>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, law: Law, ok: bool, detail: impl FnOnce() -> String) {
        *self.checks.entry(law).or_default() += 1;
        if !ok {
            self.failures.push(LemmaFailure {
                law,
                detail: detail(),
            });
        }
    }

    pub fn merge(&mut self, other: LemmaReport) {
        for (law, n) in other.checks {
            *self.checks.entry(law).or_default() += n;
        }
        self.failures.extend(other.failures);
    }
}

struct Sample {
    formula: Formula,
    params: Valuation,
}

impl Sample {
    fn describe(&self, alg: &DownsetAlgebra) -> String {
        format!("{} with {}", self.formula, self.params.describe(alg))
    }
}

fn random_params(alg: &DownsetAlgebra, rng: &mut impl Rng) -> Valuation {
    let mut v = Valuation::new();
    for p in PARAMS {
        v.set(p, Elem(rng.gen_range(0..alg.size() as u16)));
    }
    v
}

/// The three strength conditions of `f`, each checked for all `x`, `y`.
pub fn strength_conditions(alg: &DownsetAlgebra, f: &UnaryMap) -> [bool; 3] {
    let mut out = [true; 3];
    for x in alg.elements() {
        for y in alg.elements() {
            out[0] &= alg.leq(alg.meet(x, f.apply(y)), f.apply(alg.meet(x, y)));
            out[1] &= alg.leq(f.apply(alg.imp(x, y)), alg.imp(x, f.apply(y)));
            out[2] &= alg.leq(alg.imp(x, y), alg.imp(f.apply(x), f.apply(y)));
        }
    }
    out
}

/// Checks every [`Law`] on `samples` freshly drawn polynomials over `alg`.
/// Deterministic in `seed`.
pub fn check_lemma_properties(alg: &DownsetAlgebra, samples: usize, seed: u64) -> LemmaReport {
    let mut report = LemmaReport {
        algebra_size: alg.size(),
        ..LemmaReport::default()
    };
    for i in 0..samples as u64 {
        let mut gen = FormulaGen::for_item(seed, i);
        check_sample(alg, &mut gen, &mut report).expect("sampled formulas are closed over their parameters");
    }
    report
}

fn check_sample(alg: &DownsetAlgebra, gen: &mut FormulaGen, report: &mut LemmaReport) -> Result<(), EvalError> {
    let draw1 = |gen: &mut FormulaGen| -> Result<(Sample, UnaryMap), EvalError> {
        let formula = gen.polynomial(&["x"], &PARAMS, POLY_DEPTH);
        let params = random_params(alg, gen.rng());
        let map = UnaryMap::of_formula(alg, &formula, "x", &params)?;
        Ok((Sample { formula, params }, map))
    };
    let (sf, f) = draw1(gen)?;
    let (sg, g) = draw1(gen)?;

    report.record(Law::Monotone, f.is_monotone(alg), || sf.describe(alg));

    // Roll
    let (mu_fg, _) = f.compose(&g).lfp(alg);
    let (mu_gf, _) = g.compose(&f).lfp(alg);
    report.record(Law::Roll, mu_fg == f.apply(mu_gf), || {
        format!("f = {}; g = {}", sf.describe(alg), sg.describe(alg))
    });

    // Strength on polynomials, and the equivalence on arbitrary monotone maps.
    let conds = strength_conditions(alg, &f);
    report.record(Law::StrongConj, conds[0], || sf.describe(alg));
    report.record(Law::StrongImpl, conds[1], || sf.describe(alg));
    report.record(Law::StrongEnriched, conds[2], || sf.describe(alg));
    let r = random_monotone_map(alg, gen.rng());
    let rc = strength_conditions(alg, &r);
    report.record(Law::StrongEquivalence, rc[0] == rc[1] && rc[1] == rc[2], || {
        format!("monotone table {:?}: conditions {rc:?}", r.0)
    });

    // fixrimpl, both equations.
    let a = Elem(gen.rng().gen_range(0..alg.size() as u16));
    let (mu_f, _) = f.lfp(alg);
    let a_imp_f = UnaryMap::from_fn(alg, |h| alg.imp(a, f.apply(h)));
    let a_and_f = UnaryMap::from_fn(alg, |h| alg.meet(a, f.apply(h)));
    report.record(Law::FixrImpl, a_imp_f.lfp(alg).0 == alg.imp(a, mu_f), || {
        format!("a = {}; f = {}", alg.show(a), sf.describe(alg))
    });
    report.record(Law::FixrConj, a_and_f.lfp(alg).0 == alg.meet(a, mu_f), || {
        format!("a = {}; f = {}", alg.show(a), sf.describe(alg))
    });

    // distrconj
    let f_and_g = UnaryMap::from_fn(alg, |h| alg.meet(f.apply(h), g.apply(h)));
    report.record(Law::DistrConj, f_and_g.lfp(alg).0 == alg.meet(mu_f, g.lfp(alg).0), || {
        format!("f = {}; g = {}", sf.describe(alg), sg.describe(alg))
    });

    // phitop
    let f_top = f.apply(alg.top());
    report.record(
        Law::PhiTop,
        f.apply(f_top) == f_top && f.gfp(alg).0 == f_top,
        || sf.describe(alg),
    );

    // Diag and Bekic on two-variable polynomials.
    let draw2 = |gen: &mut FormulaGen| -> Result<(Sample, BinaryMap), EvalError> {
        let formula = gen.polynomial(&["x", "y"], &PARAMS, POLY_DEPTH);
        let params = random_params(alg, gen.rng());
        let map = BinaryMap::of_formula(alg, &formula, "x", "y", &params)?;
        Ok((Sample { formula, params }, map))
    };
    let (sh, h) = draw2(gen)?;
    let (sk, k) = draw2(gen)?;
    let inner = UnaryMap::from_fn(alg, |x| h.fix_first(x).lfp(alg).0);
    report.record(Law::Diag, h.diagonal().lfp(alg).0 == inner.lfp(alg).0, || sh.describe(alg));

    let ((s1, s2), _) = lfp_pair(alg, &h, &k);
    // μ₁ = μx. h(x, μy. k(x, y)),  μ₂ = μy. k(μ₁, y)
    let k_sol = UnaryMap::from_fn(alg, |x| k.fix_first(x).lfp(alg).0);
    let mu1 = UnaryMap::from_fn(alg, |x| h.apply(x, k_sol.apply(x))).lfp(alg).0;
    let mu2 = k.fix_first(mu1).lfp(alg).0;
    report.record(Law::Bekic, (s1, s2) == (mu1, mu2), || {
        format!("f = {}; g = {}", sh.describe(alg), sk.describe(alg))
    });

    // Inflating disjunctive terms and circvee.
    let params = random_params(alg, gen.rng());
    let d1 = gen.disjunctive("x", &PARAMS, 4, 2);
    let d2 = gen.disjunctive("x", &PARAMS, 4, 2);
    let m1 = UnaryMap::of_formula(alg, &d1, "x", &params)?;
    let m2 = UnaryMap::of_formula(alg, &d2, "x", &params)?;
    let show = || format!("f = {d1}; g = {d2}; {}", params.describe(alg));
    report.record(Law::Inflating, m1.is_inflating(alg) && m2.is_inflating(alg), show);
    let join = UnaryMap::from_fn(alg, |h| alg.join(m1.apply(h), m2.apply(h)));
    let comp = m1.compose(&m2);
    report.record(Law::Circvee, join.prefixed_points(alg) == comp.prefixed_points(alg), show);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::algebra::algebras_up_to;
    use super::super::poset::FinitePoset;
    use super::*;
    use crate::formula::parse;

    #[test]
    fn identity_is_strong() {
        for alg in algebras_up_to(3).unwrap() {
            let id = UnaryMap::from_fn(&alg, |h| h);
            assert_eq!(strength_conditions(&alg, &id), [true; 3]);
        }
    }

    #[test]
    fn circvee_for_guard_and_side() {
        // f(x) = a → x, g(x) = b ∨ x, compared by enumerating every element.
        for alg in algebras_up_to(4).unwrap() {
            for a in alg.elements() {
                for b in alg.elements() {
                    let v = Valuation::new().with("a", a).with("b", b);
                    let f = UnaryMap::of_formula(&alg, &parse("a -> x").unwrap(), "x", &v).unwrap();
                    let g = UnaryMap::of_formula(&alg, &parse("b \\/ x").unwrap(), "x", &v).unwrap();
                    let pre_join: Vec<Elem> = alg
                        .elements()
                        .filter(|&p| alg.leq(alg.join(f.apply(p), g.apply(p)), p))
                        .collect();
                    let pre_comp: Vec<Elem> = alg
                        .elements()
                        .filter(|&p| alg.leq(f.apply(g.apply(p)), p))
                        .collect();
                    assert_eq!(pre_join, pre_comp);
                }
            }
        }
    }

    #[test]
    fn diag_of_meet_is_bottom() {
        for alg in algebras_up_to(3).unwrap() {
            let m = BinaryMap::of_formula(&alg, &parse("x /\\ y").unwrap(), "x", "y", &Valuation::new()).unwrap();
            assert_eq!(m.diagonal().lfp(&alg).0, alg.bottom());
            let inner = UnaryMap::from_fn(&alg, |x| m.fix_first(x).lfp(&alg).0);
            assert_eq!(inner.lfp(&alg).0, alg.bottom());
        }
    }

    #[test]
    fn random_monotone_maps_are_monotone() {
        let alg = crate::semantics::DownsetAlgebra::new(FinitePoset::antichain(3).unwrap()).unwrap();
        let mut gen = FormulaGen::new(9);
        for _ in 0..50 {
            assert!(random_monotone_map(&alg, gen.rng()).is_monotone(&alg));
        }
    }

    #[test]
    fn some_random_monotone_map_is_not_strong() {
        let alg = crate::semantics::DownsetAlgebra::new(FinitePoset::antichain(2).unwrap()).unwrap();
        let mut gen = FormulaGen::new(11);
        let found = (0..200).any(|_| strength_conditions(&alg, &random_monotone_map(&alg, gen.rng())) == [false; 3]);
        assert!(found, "the equivalence check would be vacuous");
    }

    #[test]
    fn all_laws_hold_on_small_algebras() {
        for alg in algebras_up_to(3).unwrap() {
            let r = check_lemma_properties(&alg, 60, 5);
            assert!(r.passed(), "{:?}", r.failures.first());
            for law in ALL_LAWS {
                assert_eq!(r.checks[&law], 60, "{law}");
            }
        }
    }
}
