use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use serde_json::{json, Value};

use ipcmu::bounds::{bound_mu, ConvergenceBound};
use ipcmu::eliminate::{eliminate_all, fixed_point_obligations, EliminateError};
use ipcmu::formula::{json::to_json, parse as parse_formula, well_formed, Formula};
use ipcmu::prover::{equivalent, ProverError};
use ipcmu::semantics::{
    algebras_up_to, find_countermodel, for_each_assignment, DownsetAlgebra, Elem, FinitePoset, Program, Valuation,
};
use ipcmu::suites::{describe_algebra, run_all, SuiteConfig};

use crate::{CliError, Config, Outcome};

/// Powersets `P({1..k})` always included when measuring, for `k` up to this.
const MEASURED_POWERSETS: usize = 3;

struct Named {
    label: String,
    alg: DownsetAlgebra,
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn algebras(cfg: &Config) -> Result<Vec<Named>, CliError> {
    Ok(algebras_up_to(cfg.max_poset_size as usize)
        .map_err(internal)?
        .into_iter()
        .map(|alg| Named {
            label: describe_algebra(&alg),
            alg,
        })
        .collect())
}

/// The size-capped algebras followed by the downsets of `P({1..k})`.
fn algebras_with_powersets(cfg: &Config) -> Result<Vec<Named>, CliError> {
    let mut out = algebras(cfg)?;
    for k in 1..=MEASURED_POWERSETS {
        let poset = FinitePoset::powerset(k).map_err(internal)?;
        let alg = DownsetAlgebra::new(poset).map_err(internal)?;
        let set: Vec<String> = (1..=k).map(|i| i.to_string()).collect();
        out.push(Named {
            label: format!("P({{{}}}), {}", set.join(","), describe_algebra(&alg)),
            alg,
        });
    }
    Ok(out)
}

fn read(text: &str) -> Result<Formula, CliError> {
    let f = parse_formula(text.trim())?;
    let wf = well_formed(&f);
    if !wf.ok {
        let msg: Vec<String> = wf.diagnostics.iter().map(|d| d.to_string()).collect();
        return Err(CliError::IllFormed(msg.join("; ")));
    }
    Ok(f)
}

fn eliminate_error(e: EliminateError) -> CliError {
    match e {
        EliminateError::IllFormed(m) => CliError::IllFormed(m),
        e @ EliminateError::NotPositive { .. } => CliError::IllFormed(e.to_string()),
        e => internal(e),
    }
}

fn prover_error(e: ProverError) -> CliError {
    match e {
        e @ ProverError::BudgetExceeded(_) => CliError::Budget(e),
        e => internal(e),
    }
}

fn valuation_json(v: &Valuation, alg: &DownsetAlgebra) -> Value {
    v.iter().map(|(k, e)| (k.to_string(), json!(alg.show(e)))).collect::<serde_json::Map<_, _>>().into()
}

struct Countermodel {
    label: String,
    valuation: String,
    json: Value,
}

/// First algebra (in order) with a valuation separating `f` and `g`.
fn semantic_countermodel(algs: &[Named], f: &Formula, g: &Formula) -> Result<Option<Countermodel>, CliError> {
    for n in algs {
        if let Some(v) = find_countermodel(f, g, &n.alg).map_err(internal)? {
            return Ok(Some(Countermodel {
                label: n.label.clone(),
                valuation: v.describe(&n.alg),
                json: json!({ "algebra": n.label, "valuation": valuation_json(&v, &n.alg) }),
            }));
        }
    }
    Ok(None)
}

/// `mu x. phi` split into binder and body, with fixed points inside the
/// body eliminated first.
fn mu_input(f: &Formula, notices: &mut Vec<String>) -> Result<(String, Formula), CliError> {
    let Formula::Mu(x, body) = f else {
        return Err(CliError::Usage(format!("expected a formula of the form `mu x. phi`, got {f}")));
    };
    if body.is_fixed_point_free() {
        return Ok((x.clone(), (**body).clone()));
    }
    let flat = eliminate_all(body).map_err(eliminate_error)?;
    notices.push(format!("eliminated nested fixed points: body is now {flat}"));
    Ok((x.clone(), flat))
}

pub fn parse(_cfg: &Config, text: &str) -> Result<Outcome, CliError> {
    let f = parse_formula(text.trim())?;
    let wf = well_formed(&f);
    let diagnostics: Vec<String> = wf.diagnostics.iter().map(|d| d.to_string()).collect();
    let free: Vec<String> = f.free_vars().into_iter().collect();
    let mut s = format!("{f}\n");
    let _ = writeln!(s, "free variables: {}", free.join(", "));
    let _ = writeln!(s, "well formed: {}", if wf.ok { "yes" } else { "no" });
    for d in &diagnostics {
        let _ = writeln!(s, "  {d}");
    }
    let j = json!({
        "formula": to_json(&f),
        "text": f.to_string(),
        "free_vars": free,
        "well_formed": wf.ok,
        "diagnostics": diagnostics,
    });
    let mut out = Outcome::ok(s, j);
    if !wf.ok {
        out.failure = Some(CliError::IllFormed(diagnostics.join("; ")));
    }
    Ok(out)
}

pub fn eliminate(cfg: &Config, text: &str, verify: bool) -> Result<Outcome, CliError> {
    let f = read(text)?;
    let out = eliminate_all(&f).map_err(eliminate_error)?;
    let mut s = format!("{out}\n");
    let mut j = json!({
        "input": to_json(&f),
        "output": to_json(&out),
        "text": out.to_string(),
        "verification": Value::Null,
    });
    if !verify {
        return Ok(Outcome::ok(s, j));
    }

    let algs = algebras(cfg)?;
    let counter = semantic_countermodel(&algs, &f, &out)?;
    // A fixed-point-free input is compared directly; otherwise each binder's
    // result must be a fixed point of its body, and leastness/greatestness
    // is left to the semantic check.
    let obligations = if f.is_fixed_point_free() {
        vec![(f.clone(), out.clone())]
    } else {
        fixed_point_obligations(&f).map_err(eliminate_error)?
    };
    let mut failed = None;
    let mut budget = None;
    for (i, (a, b)) in obligations.iter().enumerate() {
        match equivalent(a, b, cfg.budget) {
            Ok(true) => {}
            Ok(false) => {
                failed = Some(i);
                break;
            }
            Err(e) => {
                budget = Some(prover_error(e));
                break;
            }
        }
    }

    match &counter {
        None => {
            let _ = writeln!(s, "semantic: equivalent on all {} algebras", algs.len());
        }
        Some(c) => {
            let _ = writeln!(s, "semantic: differs on {}: {}", c.label, c.valuation);
        }
    }
    let prover_status = match (failed, &budget) {
        (_, Some(_)) => "budget exceeded",
        (Some(_), _) => "refuted",
        (None, None) => "proved",
    };
    let _ = writeln!(s, "prover: {} obligation(s) {prover_status}", obligations.len());
    if let Some(i) = failed {
        let (a, b) = &obligations[i];
        let _ = writeln!(s, "  unprovable: {a} <-> {b}");
    }
    j["verification"] = json!({
        "algebras": algs.len(),
        "countermodel": counter.as_ref().map(|c| c.json.clone()),
        "obligations": obligations.len(),
        "prover": prover_status,
        "ok": counter.is_none() && failed.is_none() && budget.is_none(),
    });

    let failure = if let Some(c) = counter {
        Some(CliError::Verification(format!("result differs from input on {}", c.label)))
    } else if let Some(i) = failed {
        Some(CliError::Verification(format!("obligation {} is not provable", i + 1)))
    } else {
        budget
    };
    Ok(Outcome { text: s, json: j, failure })
}

pub fn equiv(cfg: &Config, left: &str, right: &str) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let mut flat = |text: &str, which: &str| -> Result<Formula, CliError> {
        let f = read(text)?;
        if f.is_fixed_point_free() {
            return Ok(f);
        }
        let g = eliminate_all(&f).map_err(eliminate_error)?;
        notices.push(format!("{which} formula contains fixed points; compared as {g}"));
        Ok(g)
    };
    let f = flat(left, "first")?;
    let g = flat(right, "second")?;

    let algs = algebras(cfg)?;
    let counter = semantic_countermodel(&algs, &f, &g)?;
    let proved = equivalent(&f, &g, cfg.budget);

    let (verdict, agree, failure) = match (&proved, &counter) {
        (Ok(true), None) => ("equivalent", true, None),
        (Ok(false), _) => ("not equivalent", true, None),
        (Ok(true), Some(c)) => (
            "oracles disagree",
            false,
            Some(CliError::Verification(format!("proved equivalent but differs on {}", c.label))),
        ),
        // The semantic verdict stands, but the exhausted budget still sets
        // the exit status.
        (Err(e), Some(_)) => ("not equivalent", true, Some(prover_error(e.clone()))),
        (Err(e), None) => ("unknown", true, Some(prover_error(e.clone()))),
    };

    let mut s = String::new();
    for n in &notices {
        let _ = writeln!(s, "note: {n}");
    }
    let _ = writeln!(s, "{verdict}");
    let prover_text = match &proved {
        Ok(true) => "equivalent".to_string(),
        Ok(false) => "not equivalent".to_string(),
        Err(e) => e.to_string(),
    };
    let _ = writeln!(s, "prover: {prover_text}");
    match &counter {
        None => {
            let _ = writeln!(s, "semantic: no countermodel on {} algebras", algs.len());
        }
        Some(c) => {
            let _ = writeln!(s, "semantic: countermodel on {}: {}", c.label, c.valuation);
        }
    }
    let _ = writeln!(s, "oracles {}", if agree { "agree" } else { "disagree" });

    let j = json!({
        "left": to_json(&f),
        "right": to_json(&g),
        "notices": notices,
        "verdict": verdict,
        "prover": match &proved {
            Ok(true) => json!("equivalent"),
            Ok(false) => json!("not equivalent"),
            Err(_) => json!("budget exceeded"),
        },
        "algebras": algs.len(),
        "countermodel": counter.as_ref().map(|c| c.json.clone()),
        "agree": agree,
    });
    Ok(Outcome { text: s, json: j, failure })
}

fn bound_json(b: &ConvergenceBound) -> Value {
    json!({
        "value": b.value,
        "rule": b.rule.to_string(),
        "subject": b.subject,
        "children": b.children.iter().map(bound_json).collect::<Vec<_>>(),
    })
}

pub fn bound(cfg: &Config, text: &str, measure: bool) -> Result<Outcome, CliError> {
    let f = read(text)?;
    let mut notices = Vec::new();
    let (x, body) = mu_input(&f, &mut notices)?;
    let b = bound_mu(&body, &x).map_err(eliminate_error)?;

    let mut s = String::new();
    for n in &notices {
        let _ = writeln!(s, "note: {n}");
    }
    let _ = writeln!(s, "bound: {}", b.value);
    s.push_str(&b.render());
    let mut j = json!({
        "formula": to_json(&f),
        "notices": notices,
        "bound": b.value,
        "derivation": bound_json(&b),
        "measured": Value::Null,
    });
    if !measure {
        return Ok(Outcome::ok(s, j));
    }

    let Formula::Mu(_, original) = &f else { unreachable!("checked by mu_input") };
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let _ = writeln!(s, "measured:");
    for n in algebras_with_powersets(cfg)? {
        let k = ipcmu::semantics::measure_closure_ordinal(original, &x, &n.alg).map_err(internal)?;
        let _ = writeln!(s, "  {k}  {}", n.label);
        if k > b.value {
            violations.push(n.label.clone());
        }
        rows.push(json!({ "algebra": n.label, "measured": k }));
    }
    let worst = rows.iter().filter_map(|r| r["measured"].as_u64()).max().unwrap_or(0);
    let _ = writeln!(s, "max measured: {worst} (bound {})", b.value);
    j["measured"] = Value::Array(rows);
    j["sound"] = json!(violations.is_empty());
    let failure = (!violations.is_empty()).then(|| {
        CliError::Verification(format!("measured ordinal exceeds the bound on {}", violations.join("; ")))
    });
    Ok(Outcome { text: s, json: j, failure })
}

/// Per-algebra statistics of `h ↦ phi[x := h]` iterated from the bottom.
struct IterationStats {
    valuations: usize,
    histogram: BTreeMap<usize, usize>,
    fixed_points: BTreeMap<u16, usize>,
}

fn iteration_stats(p: &Program, alg: &DownsetAlgebra, x: &str) -> Result<IterationStats, CliError> {
    let params = p.free_vars().len() - 1;
    let mut env = vec![Elem(0); p.slots()];
    let mut stats = IterationStats {
        valuations: 0,
        histogram: BTreeMap::new(),
        fixed_points: BTreeMap::new(),
    };
    let mut error = None;
    let _ = for_each_assignment(alg.size(), params, |vals| {
        env[1..=params].copy_from_slice(vals);
        let mut cur = alg.bottom();
        for k in 0..=alg.size() {
            env[0] = cur;
            let next = match p.run(alg, &mut env) {
                Ok(e) => e,
                Err(e) => {
                    error = Some(internal(e));
                    return ControlFlow::Break(());
                }
            };
            if next == cur {
                stats.valuations += 1;
                *stats.histogram.entry(k).or_default() += 1;
                *stats.fixed_points.entry(cur.0).or_default() += 1;
                return ControlFlow::Continue(());
            }
            cur = next;
        }
        error = Some(internal(format!("iteration for `{x}` did not stabilize")));
        ControlFlow::Break(())
    });
    match error {
        Some(e) => Err(e),
        None => Ok(stats),
    }
}

pub fn iterate(cfg: &Config, text: &str) -> Result<Outcome, CliError> {
    let f = read(text)?;
    let Formula::Mu(x, body) = &f else {
        return Err(CliError::Usage(format!("expected a formula of the form `mu x. phi`, got {f}")));
    };
    let p = Program::compile(body, &[x.as_str()]);
    let mut s = String::new();
    let mut rows = Vec::new();
    let mut overall = 0;
    for n in algebras_with_powersets(cfg)? {
        let st = iteration_stats(&p, &n.alg, x)?;
        let max = st.histogram.keys().next_back().copied().unwrap_or(0);
        overall = overall.max(max);
        let hist: Vec<String> = st.histogram.iter().map(|(k, c)| format!("{k}:{c}")).collect();
        let top = st.fixed_points.get(&n.alg.top().0).copied().unwrap_or(0);
        let _ = writeln!(
            s,
            "k={max}  {}  [{} valuations; steps {}; {} distinct fixed points, {} at top]",
            n.label,
            st.valuations,
            hist.join(" "),
            st.fixed_points.len(),
            top
        );
        rows.push(json!({
            "algebra": n.label,
            "carrier": n.alg.size(),
            "max_steps": max,
            "valuations": st.valuations,
            "steps": st.histogram.iter().map(|(k, c)| (k.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
            "distinct_fixed_points": st.fixed_points.len(),
            "fixed_points_at_top": top,
        }));
    }
    let _ = writeln!(s, "max steps: {overall}");
    let j = json!({ "formula": to_json(&f), "algebras": rows, "max_steps": overall });
    Ok(Outcome::ok(s, j))
}

pub fn selftest(cfg: &Config) -> Result<Outcome, CliError> {
    let suite_cfg = SuiteConfig {
        max_poset_size: cfg.max_poset_size as usize,
        seed: cfg.seed,
        corpus_size: cfg.corpus,
        budget: cfg.budget,
        ..SuiteConfig::default()
    };
    let reports = run_all(&suite_cfg).map_err(internal)?;
    let mut s = String::new();
    let mut failed = Vec::new();
    for r in &reports {
        let _ = writeln!(s, "[{}] {}", if r.passed() { "PASS" } else { "FAIL" }, r.summary());
        for f in r.failures.iter().take(5) {
            let _ = writeln!(s, "    {f}");
        }
        if !r.passed() {
            failed.push(r.name);
        }
    }
    let j = json!({
        "passed": failed.is_empty(),
        "suites": reports.iter().map(|r| json!({
            "name": r.name,
            "passed": r.passed(),
            "checks": r.checks,
            "failures": r.failures,
            "notes": r.notes,
            "elapsed_secs": r.elapsed.as_secs_f64(),
        })).collect::<Vec<_>>(),
    });
    let failure = (!failed.is_empty()).then(|| CliError::Verification(format!("failing suites: {}", failed.join(", "))));
    Ok(Outcome { text: s, json: j, failure })
}
