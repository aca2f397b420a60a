//! Property suites run against the semantic and syntactic oracles.
//!
//! Each suite returns a [`SuiteReport`]; the command-line `selftest` and
//! the acceptance tests both drive these.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{bekic_bound, bound_mu, conj_bound, diag_bound, roll_bound};
use crate::corpus::{corpus, phi_family, CorpusConfig, FormulaGen};
use crate::eliminate::{eliminate_all, simplify};
use crate::formula::{substitute, Formula};
use crate::prover::{equivalent, provable, ProverError, Sequent};
use crate::semantics::lemmas::{check_lemma_properties, lfp_pair, BinaryMap, UnaryMap};
use crate::semantics::{
    algebras_up_to, check_equiv, find_countermodel, find_entailment_countermodel, lfp_trace,
    measure_closure_ordinal, DownsetAlgebra, Elem, FinitePoset, SemanticsError, Valuation,
};

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub max_poset_size: usize,
    pub seed: u64,
    pub corpus_size: usize,
    pub lemma_samples: usize,
    pub budget: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_poset_size: 4,
            seed: 42,
            corpus_size: 500,
            lemma_samples: 200,
            budget: crate::prover::DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    /// Free-form counters, e.g. how many sequents were proved.
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    fn absorb(&mut self, (checks, failures): (usize, Vec<String>)) {
        self.checks += checks;
        self.failures.extend(failures);
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} checks, {} failures, {:.1}s",
            self.name,
            self.checks,
            self.failures.len(),
            self.elapsed.as_secs_f64()
        );
        for n in &self.notes {
            s.push_str(&format!("; {n}"));
        }
        s
    }
}

fn timed(mut r: SuiteReport, start: Instant) -> SuiteReport {
    r.elapsed = start.elapsed();
    r
}

/// Short description of the poset underlying an algebra.
pub fn describe_algebra(alg: &DownsetAlgebra) -> String {
    let covers: Vec<String> = alg
        .poset()
        .covers()
        .into_iter()
        .map(|(i, j)| format!("{i}<{j}"))
        .collect();
    format!("{}-point poset [{}]", alg.poset().size(), covers.join(" "))
}

/// The downset algebra of `P({1..n})` with the valuation under which
/// `μx.φₙ` needs exactly `n + 1` steps: `b = {∅}`, `aᵢ = {s | i ∉ s}`.
pub fn phi_witness(n: usize) -> Result<(DownsetAlgebra, Valuation), SemanticsError> {
    let alg = DownsetAlgebra::new(FinitePoset::powerset(n)?)?;
    let subsets = 1usize << n;
    let elem = |mask: u32| {
        alg.element_of(mask)
            .expect("witness sets are downward closed")
    };
    let mut v = Valuation::new().with("b", elem(1));
    for i in 1..=n {
        let mask = (0..subsets)
            .filter(|s| s >> (i - 1) & 1 == 0)
            .fold(0u32, |m, s| m | 1 << s);
        v.set(format!("a{i}"), elem(mask));
    }
    Ok((alg, v))
}

/// `(a₁ ∧ … ∧ aₙ) → b`
pub fn phi_family_closed_form(n: usize) -> Formula {
    Formula::imp(
        Formula::conj((1..=n).map(|i| Formula::var(format!("a{i}")))),
        Formula::var("b"),
    )
}

fn equiv_on_all(f: &Formula, g: &Formula, algs: &[DownsetAlgebra]) -> Result<(), String> {
    for alg in algs {
        match find_countermodel(f, g, alg) {
            Ok(None) => {}
            Ok(Some(v)) => {
                return Err(format!(
                    "{f} and {g} differ on {} at {}",
                    describe_algebra(alg),
                    v.describe(alg)
                ))
            }
            Err(e) => return Err(format!("evaluating {f} / {g}: {e}")),
        }
    }
    Ok(())
}

/// Elimination of `μx.φₙ` against the closed form, by both oracles, and
/// exact closure ordinals on the witness algebras.
pub fn phi_family_suite(algs: &[DownsetAlgebra], budget: usize, max_n: usize, tight_n: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("phi-family");
    for n in 1..=max_n {
        let mu = Formula::mu("x", phi_family(n));
        let expected = phi_family_closed_form(n);
        let out = match eliminate_all(&mu) {
            Ok(f) => f,
            Err(e) => {
                r.check(false, || format!("n={n}: elimination failed: {e}"));
                continue;
            }
        };
        match equivalent(&out, &expected, budget) {
            Ok(ok) => r.check(ok, || format!("n={n}: prover rejects {out} = {expected}")),
            Err(e) => r.check(false, || format!("n={n}: prover: {e}")),
        }
        let sem = equiv_on_all(&out, &expected, algs).and_then(|_| equiv_on_all(&mu, &expected, algs));
        r.check(sem.is_ok(), || format!("n={n}: {}", sem.unwrap_err()));
    }
    for n in 1..=tight_n {
        let outcome = phi_witness(n).map_err(|e| e.to_string()).and_then(|(alg, v)| {
            lfp_trace(&phi_family(n), "x", &alg, &v).map_err(|e| e.to_string())
        });
        match outcome {
            Ok((_, steps)) => {
                r.check(steps == n + 1, || format!("n={n}: measured {steps} steps, expected {}", n + 1));
                r.notes.push(format!("phi_{n} converges in {steps}"));
            }
            Err(e) => r.check(false, || format!("n={n}: {e}")),
        }
    }
    timed(r, start)
}

/// Random well-formed formulas: elimination output is fixed-point free,
/// free of helper names, and equal to the input on every algebra.
pub fn round_trip_suite(algs: &[DownsetAlgebra], seed: u64, count: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("round-trip");
    let fs = corpus(seed, count, &CorpusConfig::default());
    let results: Vec<(usize, Vec<String>)> = fs
        .par_iter()
        .map(|f| {
            let out = match eliminate_all(f) {
                Ok(o) => o,
                Err(e) => return (1, vec![format!("{f}: {e}")]),
            };
            let mut fails = Vec::new();
            if !out.is_fixed_point_free() {
                fails.push(format!("{f}: output {out} still has fixed points"));
            }
            if out.all_names().iter().any(|n| n.starts_with('_')) {
                fails.push(format!("{f}: output {out} mentions helper names"));
            }
            if let Err(e) = equiv_on_all(f, &out, algs) {
                fails.push(e);
            }
            (1, fails)
        })
        .collect();
    for x in results {
        r.absorb(x);
    }
    let with_fp = fs.iter().filter(|f| !f.is_fixed_point_free()).count();
    r.notes.push(format!("{with_fp} of {count} inputs contain fixed points"));
    timed(r, start)
}

/// `φ(φ(⊤)) = φ(⊤) = νx.φ` for formulas monotone in `x`.
pub fn nu_one_step_suite(algs: &[DownsetAlgebra], seed: u64, count: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("nu-one-step");
    let cfg = CorpusConfig::default();
    let results: Vec<(usize, Vec<String>)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let phi = FormulaGen::for_item(seed ^ 0x5EED_0001, i).monotone_formula("x", &cfg);
            let once = substitute(&phi, "x", &Formula::Top);
            let twice = substitute(&phi, "x", &once);
            let nu = Formula::nu("x", phi.clone());
            let mut fails = Vec::new();
            if let Err(e) = equiv_on_all(&twice, &once, algs) {
                fails.push(format!("phi = {phi}: {e}"));
            }
            if let Err(e) = equiv_on_all(&once, &nu, algs) {
                fails.push(format!("phi = {phi}: {e}"));
            }
            (2, fails)
        })
        .collect();
    for x in results {
        r.absorb(x);
    }
    timed(r, start)
}

/// Fixed-point identities on sampled polynomials, per algebra.
pub fn lemma_suite(algs: &[DownsetAlgebra], seed: u64, samples: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("lemmas");
    let reports: Vec<_> = algs
        .par_iter()
        .enumerate()
        .map(|(i, alg)| (i, check_lemma_properties(alg, samples, seed.wrapping_add(i as u64))))
        .collect();
    let mut per_law = std::collections::BTreeMap::new();
    for (i, rep) in reports {
        for (law, n) in &rep.checks {
            *per_law.entry(*law).or_insert(0usize) += n;
            r.checks += n;
        }
        for f in rep.failures {
            r.failures
                .push(format!("{} on {}: {}", f.law, describe_algebra(&algs[i]), f.detail));
        }
    }
    let min = per_law.values().min().copied().unwrap_or(0);
    r.notes.push(format!("{} laws, at least {min} samples each", per_law.len()));
    timed(r, start)
}

/// Every `μ` in the corpus (and a batch of dedicated `μ`-formulas)
/// converges within its computed bound on every algebra.
pub fn bound_soundness_suite(algs: &[DownsetAlgebra], seed: u64, count: usize) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new("bound-soundness");
    let cfg = CorpusConfig::default();
    let mut targets: Vec<(String, Formula)> = Vec::new();
    for f in corpus(seed, count, &cfg) {
        f.visit(&mut |g| {
            if let Formula::Mu(x, body) = g {
                targets.push((x.clone(), (**body).clone()));
            }
        });
    }
    for i in 0..count as u64 {
        let body = FormulaGen::for_item(seed ^ 0x5EED_0002, i).monotone_formula("x", &cfg);
        targets.push(("x".into(), body));
    }
    let results: Vec<(usize, Vec<String>, usize)> = targets
        .par_iter()
        .map(|(x, body)| {
            let bound = eliminate_all(body).map_err(|e| e.to_string()).and_then(|b| {
                bound_mu(&b, x).map_err(|e| e.to_string())
            });
            let bound = match bound {
                Ok(b) => b.value,
                Err(e) => return (1, vec![format!("mu {x}. {body}: {e}")], 0),
            };
            let mut fails = Vec::new();
            let mut worst = 0;
            for alg in algs {
                match measure_closure_ordinal(body, x, alg) {
                    Ok(m) => {
                        worst = worst.max(m);
                        if m > bound {
                            fails.push(format!(
                                "mu {x}. {body}: measured {m} > bound {bound} on {}",
                                describe_algebra(alg)
                            ));
                        }
                    }
                    Err(e) => fails.push(format!("mu {x}. {body}: {e}")),
                }
            }
            (algs.len(), fails, bound - worst.min(bound))
        })
        .collect();
    let mut slack_total = 0;
    for (c, f, slack) in results {
        r.absorb((c, f));
        slack_total += slack;
    }
    r.notes.push(format!(
        "{} mu-formulas, mean slack {:.2}",
        targets.len(),
        slack_total as f64 / targets.len().max(1) as f64
    ));
    let comb = combinator_checks(algs, seed, count.min(200));
    r.notes.push(format!("{} combinator checks", comb.0));
    r.absorb(comb);
    timed(r, start)
}

fn conv(alg: &DownsetAlgebra, f: &UnaryMap) -> usize {
    f.lfp(alg).1
}

/// Measured convergence of composites against the combinator bounds, on
/// tabulated polynomial maps.
fn combinator_checks(algs: &[DownsetAlgebra], seed: u64, samples: usize) -> (usize, Vec<String>) {
    const PARAMS: [&str; 3] = ["a", "b", "c"];
    let results: Vec<(usize, Vec<String>)> = algs
        .par_iter()
        .enumerate()
        .map(|(ai, alg)| {
            let mut checks = 0;
            let mut fails = Vec::new();
            let mut check = |ok: bool, what: String| {
                checks += 1;
                if !ok {
                    fails.push(format!("{what} on {}", describe_algebra(alg)));
                }
            };
            for i in 0..samples as u64 {
                let mut gen = FormulaGen::for_item(seed ^ 0x5EED_0003 ^ (ai as u64) << 32, i);
                let params = |gen: &mut FormulaGen| {
                    let mut v = Valuation::new();
                    for p in PARAMS {
                        v.set(p, Elem(gen.rng().gen_range(0..alg.size() as u16)));
                    }
                    v
                };
                let sf = gen.polynomial(&["x"], &PARAMS, 4);
                let sg = gen.polynomial(&["x"], &PARAMS, 4);
                let v = params(&mut gen);
                let f = UnaryMap::of_formula(alg, &sf, "x", &v).expect("closed polynomial");
                let g = UnaryMap::of_formula(alg, &sg, "x", &v).expect("closed polynomial");
                let (n, m) = (conv(alg, &f), conv(alg, &g));

                let fg = conv(alg, &f.compose(&g));
                let gf = conv(alg, &g.compose(&f));
                check(gf <= roll_bound(fg), format!("roll: f = {sf}, g = {sg}: {gf} > {}", roll_bound(fg)));

                let meet = UnaryMap::from_fn(alg, |h| alg.meet(f.apply(h), g.apply(h)));
                let c = conv(alg, &meet);
                check(
                    c <= conj_bound(n, m),
                    format!("conj: f = {sf}, g = {sg}: {c} > {}", conj_bound(n, m)),
                );

                let sh = gen.polynomial(&["x", "y"], &PARAMS, 4);
                let sk = gen.polynomial(&["x", "y"], &PARAMS, 4);
                let v = params(&mut gen);
                let h = BinaryMap::of_formula(alg, &sh, "x", "y", &v).expect("closed polynomial");
                let k = BinaryMap::of_formula(alg, &sk, "x", "y", &v).expect("closed polynomial");

                // Diagonal: inner convergence uniform in x, outer of x ↦ μy.h(x, y).
                let inner_n = alg.elements().map(|p| conv(alg, &h.fix_first(p))).max().unwrap_or(0);
                let outer = UnaryMap::from_fn(alg, |p| h.fix_first(p).lfp(alg).0);
                let outer_m = conv(alg, &outer);
                let d = conv(alg, &h.diagonal());
                check(
                    d <= diag_bound(inner_n, outer_m),
                    format!("diag: f = {sh}: {d} > {}", diag_bound(inner_n, outer_m)),
                );

                // Pair ⟨h, k⟩: m bounds μy.k(x, y), n bounds μx.h(x, μy.k(x, y)).
                let m2 = alg.elements().map(|p| conv(alg, &k.fix_first(p))).max().unwrap_or(0);
                let k_sol = UnaryMap::from_fn(alg, |p| k.fix_first(p).lfp(alg).0);
                let n2 = conv(alg, &UnaryMap::from_fn(alg, |p| h.apply(p, k_sol.apply(p))));
                let (_, pair_steps) = lfp_pair(alg, &h, &k);
                check(
                    pair_steps <= bekic_bound(n2, m2),
                    format!("bekic: f = {sh}, g = {sk}: {pair_steps} > {}", bekic_bound(n2, m2)),
                );
            }
            (checks, fails)
        })
        .collect();
    results.into_iter().fold((0, Vec::new()), |(c, mut f), (c2, f2)| {
        f.extend(f2);
        (c + c2, f)
    })
}

/// One-sided agreement of the prover with the algebras: proved sequents
/// have no countermodel, refuted ones are not proved.
pub fn oracle_agreement_suite(algs: &[DownsetAlgebra], seed: u64, count: usize, budget: usize) -> SuiteReport {
    const VARS: [&str; 4] = ["a", "b", "c", "d"];
    let start = Instant::now();
    let mut r = SuiteReport::new("oracle-agreement");
    let results: Vec<(usize, Vec<String>, usize, usize)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut gen = FormulaGen::for_item(seed ^ 0x5EED_0004, i);
            let f = gen.plain(&VARS, 6);
            let g = gen.plain(&VARS, 6);
            let sequents = [
                Sequent::new(vec![f.clone()], g.clone()),
                Sequent::new(vec![f.clone()], Formula::or(g.clone(), f.clone())),
                Sequent::new(vec![f.clone(), g.clone()], Formula::and(g.clone(), f.clone())),
                Sequent::theorem(f.clone()),
            ];
            let (mut checks, mut fails, mut proved, mut refuted) = (0, Vec::new(), 0, 0);
            for s in &sequents {
                checks += 1;
                let verdict = match provable(s, budget) {
                    Ok(b) => b,
                    Err(e) => {
                        fails.push(format!("{s}: {e}"));
                        continue;
                    }
                };
                let counter = algs.iter().find_map(|alg| {
                    find_entailment_countermodel(&s.antecedents, &s.succedent, alg)
                        .ok()
                        .flatten()
                        .map(|v| format!("{} at {}", describe_algebra(alg), v.describe(alg)))
                });
                proved += verdict as usize;
                refuted += counter.is_some() as usize;
                if let (true, Some(c)) = (verdict, &counter) {
                    fails.push(format!("{s} proved but refuted on {c}"));
                }
            }
            // Equivalence, including a pair that is always equivalent.
            for (p, q) in [(f.clone(), g.clone()), (f.clone(), simplify(&f))] {
                checks += 1;
                let sem_equal = algs.iter().all(|alg| check_equiv(&p, &q, alg).unwrap_or(false));
                match equivalent(&p, &q, budget) {
                    Ok(eq) if eq && !sem_equal => fails.push(format!("{p} = {q} proved but refuted")),
                    Ok(_) => {}
                    Err(ProverError::BudgetExceeded(b)) => fails.push(format!("{p} = {q}: budget {b} exceeded")),
                    Err(e) => fails.push(format!("{p} = {q}: {e}")),
                }
            }
            (checks, fails, proved, refuted)
        })
        .collect();
    let (mut proved, mut refuted) = (0, 0);
    for (c, f, p, q) in results {
        r.absorb((c, f));
        proved += p;
        refuted += q;
    }
    r.notes.push(format!("{proved} sequents proved, {refuted} refuted"));
    timed(r, start)
}

/// All suites with one configuration, in a fixed order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>, SemanticsError> {
    let algs = algebras_up_to(cfg.max_poset_size)?;
    Ok(vec![
        phi_family_suite(&algs, cfg.budget, 4, 3),
        round_trip_suite(&algs, cfg.seed, cfg.corpus_size),
        nu_one_step_suite(&algs, cfg.seed, cfg.corpus_size),
        lemma_suite(&algs, cfg.seed, cfg.lemma_samples),
        bound_soundness_suite(&algs, cfg.seed, cfg.corpus_size),
        oracle_agreement_suite(&algs, cfg.seed, cfg.corpus_size, cfg.budget),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_valuation() {
        let (alg, v) = phi_witness(2).unwrap();
        assert_eq!(alg.size(), 6);
        assert_eq!(alg.show(v.get("b").unwrap()), "{0}");
        assert_eq!(alg.show(v.get("a1").unwrap()), "{0,2}");
        assert_eq!(alg.show(v.get("a2").unwrap()), "{0,1}");
    }

    #[test]
    fn small_runs_pass() {
        let algs = algebras_up_to(3).unwrap();
        for r in [
            phi_family_suite(&algs, 100_000, 2, 2),
            round_trip_suite(&algs, 1, 30),
            nu_one_step_suite(&algs, 1, 30),
            lemma_suite(&algs, 1, 10),
            bound_soundness_suite(&algs, 1, 20),
            oracle_agreement_suite(&algs, 1, 20, 100_000),
        ] {
            assert!(r.passed(), "{}: {:?}", r.summary(), r.failures.first());
        }
    }
}
