use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use thiserror::Error;

use super::algebra::{DownsetAlgebra, Elem};
use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value for free variable `{0}`")]
    MissingVariable(String),
    #[error("iteration for `{0}` did not stabilize; is the binder positive in its body?")]
    NoFixedPoint(String),
}

/// Assignment of algebra elements to variable names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<String, Elem>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: Elem) -> Self {
        self.0.insert(name.into(), value);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: Elem) {
        self.0.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<Elem> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Elem)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `a ↦ {0,1}, b ↦ {}` using the algebra's downset listing.
    pub fn describe(&self, alg: &DownsetAlgebra) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| format!("{k} ↦ {}", alg.show(*v)))
            .collect();
        parts.join(", ")
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k} ↦ {v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Slot(usize),
    Top,
    Bot,
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    Mu(usize, usize),
    Nu(usize, usize),
}

/// A formula compiled against a slot layout: free variables occupy slots
/// `0..free.len()` and each binder gets a private slot after them.
#[derive(Debug, Clone)]
pub struct Program {
    nodes: Vec<Node>,
    root: usize,
    free: Vec<String>,
    binders: Vec<String>,
}

impl Program {
    /// Compiles `f`; names in `leading` get the first slots (whether or not
    /// they occur), the remaining free variables follow in name order.
    pub fn compile(f: &Formula, leading: &[&str]) -> Self {
        let mut free: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
        for v in f.free_vars() {
            if !free.contains(&v) {
                free.push(v);
            }
        }
        let mut p = Program {
            nodes: Vec::with_capacity(f.size()),
            root: 0,
            free,
            binders: Vec::new(),
        };
        let mut scope = Vec::new();
        p.root = p.emit(f, &mut scope);
        p
    }

    fn emit(&mut self, f: &Formula, scope: &mut Vec<(String, usize)>) -> usize {
        let node = match f {
            Formula::Var(v) => {
                let slot = scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, s)| *s)
                    .or_else(|| self.free.iter().position(|n| n == v))
                    .expect("free variables are registered before emission");
                Node::Slot(slot)
            }
            Formula::Top => Node::Top,
            Formula::Bot => Node::Bot,
            Formula::And(l, r) => Node::And(self.emit(l, scope), self.emit(r, scope)),
            Formula::Or(l, r) => Node::Or(self.emit(l, scope), self.emit(r, scope)),
            Formula::Imp(l, r) => Node::Imp(self.emit(l, scope), self.emit(r, scope)),
            Formula::Mu(x, body) | Formula::Nu(x, body) => {
                let slot = self.free.len() + self.binders.len();
                self.binders.push(x.clone());
                scope.push((x.clone(), slot));
                let b = self.emit(body, scope);
                scope.pop();
                if matches!(f, Formula::Mu(..)) {
                    Node::Mu(slot, b)
                } else {
                    Node::Nu(slot, b)
                }
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Names bound to slots `0..free_vars().len()`.
    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// Size of the environment [`Program::run`] expects.
    pub fn slots(&self) -> usize {
        self.free.len() + self.binders.len()
    }

    /// Fresh environment with free slots taken from `v`.
    pub fn env(&self, v: &Valuation) -> Result<Vec<Elem>, EvalError> {
        let mut env = vec![Elem(0); self.slots()];
        for (i, name) in self.free.iter().enumerate() {
            env[i] = v
                .get(name)
                .ok_or_else(|| EvalError::MissingVariable(name.clone()))?;
        }
        Ok(env)
    }

    /// Evaluates with the free slots of `env` already filled.
    pub fn run(&self, alg: &DownsetAlgebra, env: &mut [Elem]) -> Result<Elem, EvalError> {
        if self.binders.is_empty() {
            const STACK: usize = 256;
            if self.nodes.len() <= STACK {
                let mut vals = [Elem(0); STACK];
                return Ok(self.run_linear(alg, env, &mut vals));
            }
            return Ok(self.run_linear(alg, env, &mut vec![Elem(0); self.nodes.len()]));
        }
        self.eval_node(self.root, alg, env)
    }

    /// Fixed-point-free programs: nodes are in post-order, so one pass
    /// over them computes every subformula.
    fn run_linear(&self, alg: &DownsetAlgebra, env: &[Elem], vals: &mut [Elem]) -> Elem {
        for (i, node) in self.nodes.iter().enumerate() {
            vals[i] = match *node {
                Node::Slot(s) => env[s],
                Node::Top => alg.top(),
                Node::Bot => alg.bottom(),
                Node::And(l, r) => alg.meet(vals[l], vals[r]),
                Node::Or(l, r) => alg.join(vals[l], vals[r]),
                Node::Imp(l, r) => alg.imp(vals[l], vals[r]),
                Node::Mu(..) | Node::Nu(..) => unreachable!("no binders"),
            };
        }
        vals[self.root]
    }

    fn eval_node(&self, n: usize, alg: &DownsetAlgebra, env: &mut [Elem]) -> Result<Elem, EvalError> {
        Ok(match self.nodes[n] {
            Node::Slot(s) => env[s],
            Node::Top => alg.top(),
            Node::Bot => alg.bottom(),
            Node::And(l, r) => {
                let a = self.eval_node(l, alg, env)?;
                alg.meet(a, self.eval_node(r, alg, env)?)
            }
            Node::Or(l, r) => {
                let a = self.eval_node(l, alg, env)?;
                alg.join(a, self.eval_node(r, alg, env)?)
            }
            Node::Imp(l, r) => {
                let a = self.eval_node(l, alg, env)?;
                alg.imp(a, self.eval_node(r, alg, env)?)
            }
            Node::Mu(s, b) => self.iterate(s, b, alg.bottom(), alg, env)?,
            Node::Nu(s, b) => self.iterate(s, b, alg.top(), alg, env)?,
        })
    }

    fn iterate(
        &self,
        slot: usize,
        body: usize,
        start: Elem,
        alg: &DownsetAlgebra,
        env: &mut [Elem],
    ) -> Result<Elem, EvalError> {
        let mut cur = start;
        // A monotone chain in a finite lattice is no longer than its carrier.
        for _ in 0..=alg.size() {
            env[slot] = cur;
            let next = self.eval_node(body, alg, env)?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
        let binder = &self.binders[slot - self.free.len()];
        Err(EvalError::NoFixedPoint(binder.clone()))
    }
}

/// Calls `f` on every assignment of `k` slots over a carrier of size `m`,
/// in odometer order (first slot varies slowest).
pub fn for_each_assignment<B>(
    m: usize,
    k: usize,
    mut f: impl FnMut(&[Elem]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let mut cur = vec![Elem(0); k];
    loop {
        f(&cur)?;
        let mut i = k;
        loop {
            if i == 0 {
                return ControlFlow::Continue(());
            }
            i -= 1;
            if cur[i].index() + 1 < m {
                cur[i].0 += 1;
                break;
            }
            cur[i] = Elem(0);
        }
    }
}

/// Value of `f` under `v`; fixed points are computed by iteration.
pub fn eval(f: &Formula, alg: &DownsetAlgebra, v: &Valuation) -> Result<Elem, EvalError> {
    let p = Program::compile(f, &[]);
    let mut env = p.env(v)?;
    p.run(alg, &mut env)
}

/// Iterates `h ↦ f[x := h]` from the bottom. Returns the least fixed point
/// and the least `k` such that the `k`-th and `(k+1)`-th iterates agree.
pub fn lfp_trace(
    f: &Formula,
    x: &str,
    alg: &DownsetAlgebra,
    v: &Valuation,
) -> Result<(Elem, usize), EvalError> {
    let p = Program::compile(f, &[x]);
    let mut env = p.env(&v.clone().with(x, alg.bottom()))?;
    trace_from(&p, alg, &mut env, alg.bottom(), x)
}

/// Dual of [`lfp_trace`], iterating from the top.
pub fn gfp_trace(
    f: &Formula,
    x: &str,
    alg: &DownsetAlgebra,
    v: &Valuation,
) -> Result<(Elem, usize), EvalError> {
    let p = Program::compile(f, &[x]);
    let mut env = p.env(&v.clone().with(x, alg.top()))?;
    trace_from(&p, alg, &mut env, alg.top(), x)
}

/// Iterates slot 0 of `p` from `start`.
fn trace_from(
    p: &Program,
    alg: &DownsetAlgebra,
    env: &mut [Elem],
    start: Elem,
    x: &str,
) -> Result<(Elem, usize), EvalError> {
    let mut cur = start;
    for k in 0..=alg.size() {
        env[0] = cur;
        let next = p.run(alg, env)?;
        if next == cur {
            return Ok((cur, k));
        }
        cur = next;
    }
    Err(EvalError::NoFixedPoint(x.to_string()))
}

/// Largest [`lfp_trace`] step count over all valuations of the other free
/// variables.
pub fn measure_closure_ordinal(f: &Formula, x: &str, alg: &DownsetAlgebra) -> Result<usize, EvalError> {
    let p = Program::compile(f, &[x]);
    let k = p.free_vars().len() - 1;
    let mut env = vec![Elem(0); p.slots()];
    let mut worst = 0;
    let mut error = None;
    let _ = for_each_assignment(alg.size(), k, |params| {
        env[1..=k].copy_from_slice(params);
        match trace_from(&p, alg, &mut env, alg.bottom(), x) {
            Ok((_, steps)) => {
                worst = worst.max(steps);
                ControlFlow::Continue(())
            }
            Err(e) => {
                error = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

/// A valuation of the combined free variables on which `f` and `g` differ.
pub fn find_countermodel(
    f: &Formula,
    g: &Formula,
    alg: &DownsetAlgebra,
) -> Result<Option<Valuation>, EvalError> {
    let mut vars: Vec<String> = f.free_vars().into_iter().collect();
    for v in g.free_vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let names: Vec<&str> = vars.iter().map(String::as_str).collect();
    let pf = Program::compile(f, &names);
    let pg = Program::compile(g, &names);
    let k = names.len();
    let mut ef = vec![Elem(0); pf.slots()];
    let mut eg = vec![Elem(0); pg.slots()];
    let mut result = Ok(None);
    let _ = for_each_assignment(alg.size(), k, |vals| {
        ef[..k].copy_from_slice(vals);
        eg[..k].copy_from_slice(vals);
        match (pf.run(alg, &mut ef), pg.run(alg, &mut eg)) {
            (Ok(a), Ok(b)) if a == b => ControlFlow::Continue(()),
            (Ok(_), Ok(_)) => {
                let mut v = Valuation::new();
                for (name, e) in names.iter().zip(vals) {
                    v.set(*name, *e);
                }
                result = Ok(Some(v));
                ControlFlow::Break(())
            }
            (Err(e), _) | (_, Err(e)) => {
                result = Err(e);
                ControlFlow::Break(())
            }
        }
    });
    result
}

/// Whether `f` and `g` agree on every valuation over `alg`.
pub fn check_equiv(f: &Formula, g: &Formula, alg: &DownsetAlgebra) -> Result<bool, EvalError> {
    find_countermodel(f, g, alg).map(|c| c.is_none())
}

/// Whether `⋀ antecedents ≤ succedent` under every valuation over `alg`;
/// returns the first violating valuation.
pub fn find_entailment_countermodel(
    antecedents: &[Formula],
    succedent: &Formula,
    alg: &DownsetAlgebra,
) -> Result<Option<Valuation>, EvalError> {
    let lhs = Formula::conj(antecedents.iter().cloned());
    // a ≤ b iff a ∧ b = a.
    find_countermodel(&Formula::and(lhs.clone(), succedent.clone()), &lhs, alg)
}

#[cfg(test)]
mod tests {
    use super::super::algebra::algebras_up_to;
    use super::super::poset::FinitePoset;
    use super::*;
    use crate::formula::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn chain2() -> DownsetAlgebra {
        DownsetAlgebra::new(FinitePoset::chain(2).unwrap()).unwrap()
    }

    #[test]
    fn self_implication_is_top() {
        for alg in algebras_up_to(3).unwrap() {
            for a in alg.elements() {
                let v = Valuation::new().with("a", a);
                assert_eq!(eval(&p("a -> a"), &alg, &v).unwrap(), alg.top());
            }
        }
    }

    #[test]
    fn mu_x_x_is_bottom_and_nu_x_x_is_top() {
        let alg = chain2();
        assert_eq!(eval(&p("mu x. x"), &alg, &Valuation::new()).unwrap(), alg.bottom());
        assert_eq!(eval(&p("nu x. x"), &alg, &Valuation::new()).unwrap(), alg.top());
    }

    #[test]
    fn missing_variable_is_an_error() {
        let alg = chain2();
        assert_eq!(
            eval(&p("a /\\ b"), &alg, &Valuation::new().with("a", alg.top())),
            Err(EvalError::MissingVariable("b".into()))
        );
    }

    #[test]
    fn non_monotone_binder_reports_no_fixed_point() {
        let alg = DownsetAlgebra::new(FinitePoset::chain(1).unwrap()).unwrap();
        // ¬x oscillates between ⊥ and ⊤ on the two-element algebra.
        assert_eq!(
            eval(&p("mu x. ~x"), &alg, &Valuation::new()),
            Err(EvalError::NoFixedPoint("x".into()))
        );
    }

    #[test]
    fn excluded_middle_fails_on_two_chain() {
        let alg = chain2();
        let c = find_countermodel(&p("a \\/ ~a"), &Formula::Top, &alg).unwrap().unwrap();
        assert_eq!(alg.show(c.get("a").unwrap()), "{0}");
        assert!(!check_equiv(&p("a \\/ ~a"), &Formula::Top, &alg).unwrap());
    }

    #[test]
    fn distributivity_of_implication() {
        for alg in algebras_up_to(3).unwrap() {
            assert!(check_equiv(&p("a -> b /\\ c"), &p("(a -> b) /\\ (a -> c)"), &alg).unwrap());
        }
    }

    #[test]
    fn lfp_trace_identity() {
        let alg = chain2();
        assert_eq!(lfp_trace(&p("x"), "x", &alg, &Valuation::new()).unwrap(), (alg.bottom(), 0));
    }

    #[test]
    fn phi_two_converges_in_three_steps() {
        let alg = DownsetAlgebra::new(FinitePoset::powerset(2).unwrap()).unwrap();
        // b ↦ {∅}; aᵢ ↦ subsets not containing i.
        let b = alg.element_of(0b0001).unwrap();
        let a1 = alg.element_of(0b0101).unwrap(); // ∅ and {2}
        let a2 = alg.element_of(0b0011).unwrap(); // ∅ and {1}
        let v = Valuation::new().with("b", b).with("a1", a1).with("a2", a2);
        let f = p("b \\/ (a1 -> x) \\/ (a2 -> x)");
        let (_, steps) = lfp_trace(&f, "x", &alg, &v).unwrap();
        assert_eq!(steps, 3);
    }

    #[test]
    fn side_disjunct_converges_in_one_step() {
        for alg in algebras_up_to(3).unwrap() {
            assert!(measure_closure_ordinal(&p("b \\/ x"), "x", &alg).unwrap() <= 1);
        }
    }

    #[test]
    fn closure_ordinals_of_trivial_maps() {
        for alg in algebras_up_to(4).unwrap() {
            assert_eq!(measure_closure_ordinal(&p("x"), "x", &alg).unwrap(), 0);
            assert_eq!(measure_closure_ordinal(&p("a /\\ x"), "x", &alg).unwrap(), 0);
        }
    }

    #[test]
    fn gfp_trace_matches_nu_eval() {
        let alg = DownsetAlgebra::new(FinitePoset::antichain(2).unwrap()).unwrap();
        for a in alg.elements() {
            let v = Valuation::new().with("a", a);
            let (g, _) = gfp_trace(&p("a -> x"), "x", &alg, &v).unwrap();
            assert_eq!(g, eval(&p("nu x. a -> x"), &alg, &v).unwrap());
        }
    }

    #[test]
    fn entailment_countermodel() {
        let alg = chain2();
        assert!(find_entailment_countermodel(&[p("a"), p("a -> b")], &p("b"), &alg)
            .unwrap()
            .is_none());
        assert!(find_entailment_countermodel(&[p("~~a")], &p("a"), &alg).unwrap().is_some());
    }

    #[test]
    fn assignment_enumeration_covers_all() {
        let mut n = 0;
        let _ = for_each_assignment::<()>(3, 2, |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(n, 9);
        let mut z = 0;
        let _ = for_each_assignment::<()>(3, 0, |_| {
            z += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(z, 1);
    }
}
