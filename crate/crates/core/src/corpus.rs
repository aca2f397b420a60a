//! Seeded random generators for formulas, polynomials and disjunctive terms.
//!
//! Everything here is deterministic in the seed (ChaCha8), so a failing case
//! can always be reproduced from `(seed, index)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;

/// Shape limits for generated IPCμ formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusConfig {
    pub max_depth: usize,
    pub free_vars: Vec<String>,
    pub max_nesting: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_depth: 5,
            free_vars: vec!["a".into(), "b".into(), "c".into()],
            max_nesting: 2,
        }
    }
}

const BINDERS: [&str; 4] = ["x", "y", "z", "w"];

pub struct FormulaGen {
    rng: ChaCha8Rng,
}

/// A variable in scope that may only be used at a fixed parity.
#[derive(Clone)]
struct Scoped {
    name: String,
    /// Parity of antecedent crossings at which the variable was bound.
    parity: bool,
}

impl FormulaGen {
    pub fn new(seed: u64) -> Self {
        FormulaGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for item `index` of a run seeded with `seed`.
    pub fn for_item(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17))
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A well-formed IPCμ formula. The root is a fixed point most of the time.
    pub fn formula(&mut self, cfg: &CorpusConfig) -> Formula {
        let mut scope = Vec::new();
        if cfg.max_nesting > 0 && cfg.max_depth > 1 && self.rng.gen_bool(0.7) {
            return self.binder(cfg.max_depth, false, &mut scope, cfg, 0);
        }
        self.gen(cfg.max_depth, false, &mut scope, cfg, 0)
    }

    /// A well-formed formula in which `x` is free and positive.
    pub fn monotone_formula(&mut self, x: &str, cfg: &CorpusConfig) -> Formula {
        let mut scope = vec![Scoped {
            name: x.to_string(),
            parity: false,
        }];
        self.gen(cfg.max_depth, false, &mut scope, cfg, 0)
    }

    /// A fixed-point-free formula positive in every name of `positive`,
    /// over parameters `params`.
    pub fn polynomial(&mut self, positive: &[&str], params: &[&str], depth: usize) -> Formula {
        let cfg = CorpusConfig {
            max_depth: depth,
            free_vars: params.iter().map(|s| s.to_string()).collect(),
            max_nesting: 0,
        };
        let mut scope: Vec<Scoped> = positive
            .iter()
            .map(|n| Scoped {
                name: n.to_string(),
                parity: false,
            })
            .collect();
        self.gen(depth, false, &mut scope, &cfg, 0)
    }

    /// A fixed-point-free formula over `vars` with no polarity constraint.
    pub fn plain(&mut self, vars: &[&str], depth: usize) -> Formula {
        let cfg = CorpusConfig {
            max_depth: depth,
            free_vars: vars.iter().map(|s| s.to_string()).collect(),
            max_nesting: 0,
        };
        self.gen(depth, false, &mut Vec::new(), &cfg, 0)
    }

    /// A term of the disjunctive grammar in `x`, with `x`-free leaves over
    /// `params` of depth at most `leaf_depth`.
    pub fn disjunctive(&mut self, x: &str, params: &[&str], depth: usize, leaf_depth: usize) -> Formula {
        if depth <= 1 {
            return Formula::var(x);
        }
        match self.rng.gen_range(0..6) {
            0 => Formula::var(x),
            1 => {
                let beta = self.plain(params, leaf_depth);
                Formula::or(beta, self.disjunctive(x, params, depth - 1, leaf_depth))
            }
            2 => {
                let inner = self.disjunctive(x, params, depth - 1, leaf_depth);
                Formula::or(inner, self.plain(params, leaf_depth))
            }
            3 | 4 => {
                let alpha = self.plain(params, leaf_depth);
                Formula::imp(alpha, self.disjunctive(x, params, depth - 1, leaf_depth))
            }
            _ => {
                let l = self.disjunctive(x, params, depth - 1, leaf_depth);
                Formula::or(l, self.disjunctive(x, params, depth - 1, leaf_depth))
            }
        }
    }

    fn leaf(&mut self, parity: bool, scope: &[Scoped], cfg: &CorpusConfig) -> Formula {
        let usable: Vec<&Scoped> = visible(scope)
            .into_iter()
            .filter(|s| s.parity == parity)
            .collect();
        if !usable.is_empty() && self.rng.gen_bool(0.55) {
            let s = usable.choose(&mut self.rng).expect("non-empty");
            return Formula::var(s.name.clone());
        }
        let roll = self.rng.gen_range(0..10);
        if roll == 0 || cfg.free_vars.is_empty() && roll < 5 {
            Formula::Top
        } else if roll == 1 || cfg.free_vars.is_empty() {
            Formula::Bot
        } else {
            Formula::var(cfg.free_vars.choose(&mut self.rng).expect("non-empty").clone())
        }
    }

    fn gen(
        &mut self,
        depth: usize,
        parity: bool,
        scope: &mut Vec<Scoped>,
        cfg: &CorpusConfig,
        nesting: usize,
    ) -> Formula {
        if depth <= 1 || self.rng.gen_bool(0.2) {
            return self.leaf(parity, scope, cfg);
        }
        let can_bind = nesting < cfg.max_nesting;
        match self.rng.gen_range(0..if can_bind { 8 } else { 7 }) {
            0 | 1 => Formula::and(
                self.gen(depth - 1, parity, scope, cfg, nesting),
                self.gen(depth - 1, parity, scope, cfg, nesting),
            ),
            2 | 3 => Formula::or(
                self.gen(depth - 1, parity, scope, cfg, nesting),
                self.gen(depth - 1, parity, scope, cfg, nesting),
            ),
            4..=6 => Formula::imp(
                self.gen(depth - 1, !parity, scope, cfg, nesting),
                self.gen(depth - 1, parity, scope, cfg, nesting),
            ),
            _ => self.binder(depth, parity, scope, cfg, nesting),
        }
    }

    fn binder(
        &mut self,
        depth: usize,
        parity: bool,
        scope: &mut Vec<Scoped>,
        cfg: &CorpusConfig,
        nesting: usize,
    ) -> Formula {
        let name = BINDERS
            .iter()
            .find(|b| !scope.iter().any(|s| s.name == **b))
            .unwrap_or(&BINDERS[BINDERS.len() - 1])
            .to_string();
        scope.push(Scoped {
            name: name.clone(),
            parity,
        });
        let body = self.gen(depth - 1, parity, scope, cfg, nesting + 1);
        scope.pop();
        if self.rng.gen_bool(0.6) {
            Formula::mu(name, body)
        } else {
            Formula::nu(name, body)
        }
    }
}

/// Innermost binding of each name.
fn visible(scope: &[Scoped]) -> Vec<&Scoped> {
    let mut out: Vec<&Scoped> = Vec::new();
    for s in scope.iter().rev() {
        if !out.iter().any(|o| o.name == s.name) {
            out.push(s);
        }
    }
    out
}

/// `n` corpus formulas for `seed`.
pub fn corpus(seed: u64, n: usize, cfg: &CorpusConfig) -> Vec<Formula> {
    (0..n as u64)
        .map(|i| FormulaGen::for_item(seed, i).formula(cfg))
        .collect()
}

/// `b ∨ (a₁ → x) ∨ … ∨ (aₙ → x)`, the family whose closure ordinal is
/// exactly `n + 1`.
pub fn phi_family(n: usize) -> Formula {
    (1..=n).fold(Formula::var("b"), |acc, i| {
        Formula::or(acc, Formula::imp(Formula::var(format!("a{i}")), Formula::var("x")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{analyze, well_formed};

    #[test]
    fn corpus_is_well_formed_and_within_limits() {
        let cfg = CorpusConfig::default();
        let fs = corpus(7, 300, &cfg);
        for f in &fs {
            assert!(well_formed(f).ok, "{f}");
            assert!(f.depth() <= cfg.max_depth, "{f}");
            assert!(f.fixed_point_nesting() <= cfg.max_nesting, "{f}");
            assert!(f.free_vars().len() <= 3);
        }
        let with_fp = fs.iter().filter(|f| !f.is_fixed_point_free()).count();
        assert!(with_fp > 150, "only {with_fp} formulas have fixed points");
    }

    #[test]
    fn corpus_is_deterministic() {
        let cfg = CorpusConfig::default();
        assert_eq!(corpus(42, 50, &cfg), corpus(42, 50, &cfg));
        assert_ne!(corpus(42, 50, &cfg), corpus(43, 50, &cfg));
    }

    #[test]
    fn polynomials_are_positive() {
        let mut g = FormulaGen::new(1);
        for _ in 0..200 {
            let f = g.polynomial(&["x", "y"], &["a", "b"], 4);
            assert!(f.is_fixed_point_free());
            assert!(analyze(&f, "x").polarity.is_positive(), "{f}");
            assert!(analyze(&f, "y").polarity.is_positive(), "{f}");
        }
    }

    #[test]
    fn monotone_formulas_keep_x_positive() {
        let mut g = FormulaGen::new(3);
        for _ in 0..200 {
            let f = g.monotone_formula("x", &CorpusConfig::default());
            assert!(analyze(&f, "x").polarity.is_positive(), "{f}");
            assert!(well_formed(&f).ok, "{f}");
        }
    }

    #[test]
    fn phi_family_shape() {
        assert_eq!(phi_family(0), Formula::var("b"));
        assert_eq!(
            phi_family(2).to_string(),
            "b \\/ (a1 -> x) \\/ (a2 -> x)"
        );
    }
}
