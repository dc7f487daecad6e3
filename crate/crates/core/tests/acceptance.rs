//! The acceptance suite. Runs every criterion in turn, prints one PASS/FAIL
//! line each and exits non-zero if any failed.
//!
//! Run with `cargo test -p ppl-core --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ppl_core::batch::{adams_suite, collapse_suite, conservativeness_suite, galois_suite, sample_instances, Instance};
use ppl_core::calculus::{apply_admissible, check_derivation, fixtures, lifted_derivation, parse_script, Admissible, Derivation};
use ppl_core::dist::AdamsPool;
use ppl_core::exec::Execution;
use ppl_core::parse::{parse_ppl, parse_prop};
use ppl_core::pool::{all_formulas, random_formula, rng, sample_pool};
use ppl_core::ppl::sampling::satisfying_pairs;
use ppl_core::ppl::{ppl_sat, PplFormula, Term};
use ppl_core::pq::{hailperin_entails, pq_entails, ThresholdPair};
use ppl_core::prop::{entails_c, models_over, PropFormula, Scope};
use ppl_core::rational::rat;
use ppl_core::rcof::{a_ppl, counter_model, decide_universal_linear, run_external, BackendConfig, DecisionOutcome};

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn run(n: usize, name: &str, limit: Duration, body: impl FnOnce() -> ppl_core::Result<Outcome>) -> bool {
    let start = Instant::now();
    let outcome = body().unwrap_or_else(|e| fail(format!("error: {e}")));
    let elapsed = start.elapsed();
    let ok = outcome.ok && elapsed <= limit;
    let timing = format!("{:.2}s / limit {}s", elapsed.as_secs_f64(), limit.as_secs());
    println!(
        "criterion {n} {name}: {} ({}; {timing})",
        if ok { "PASS" } else { "FAIL" },
        outcome.detail
    );
    ok
}

fn small_pool() -> Vec<PropFormula> {
    sample_pool(&[1, 2], 3, 200, SEED)
}

/// Every `(∅, α)`, then sampled instances with `|Δ| ≤ 2`.
fn small_instances() -> ppl_core::Result<Vec<Instance>> {
    let pool = small_pool();
    let mut out: Vec<Instance> = pool.iter().map(|a| Instance { delta: Vec::new(), alpha: a.clone() }).collect();
    out.extend(sample_instances(&pool, 2, 4800, SEED)?);
    Ok(out)
}

fn adams() -> ppl_core::Result<Outcome> {
    let formulas = sample_pool(&[1, 2, 3], 3, 300, SEED);
    let scope = Scope::from_indices([1, 2, 3]);
    let mut tables = BTreeSet::new();
    for f in &formulas {
        tables.insert(models_over(f, &scope)?);
    }
    // Prob_V depends only on the truth table over {1, 2, 3}, so covering
    // every table reached at depth 3 stands in for the whole space
    let mut reachable = BTreeSet::new();
    for f in &all_formulas(&[1, 2, 3], 3) {
        reachable.insert(models_over(f, &scope)?);
    }
    if tables != reachable {
        return Ok(fail(format!("pool covers {} of {} truth tables", tables.len(), reachable.len())));
    }
    let pool = AdamsPool::new(formulas)?;
    let s = adams_suite(&pool, &[1, 2, 3], 500, SEED, Execution::Parallel)?;
    let detail = format!(
        "{} valuations, {} formulas covering all {} depth-3 truth tables, {} entailing and {} contradictory pairs, {} violations",
        s.valuations,
        s.pool_size,
        tables.len(),
        s.entailing_pairs,
        s.contradictory_pairs,
        s.violations.len()
    );
    Ok(if s.violations.is_empty() { pass(detail) } else { fail(detail) })
}

fn galois() -> ppl_core::Result<Outcome> {
    let probe = sample_pool(&[1, 2, 3], 2, 60, SEED);
    let (a, b) = galois_suite(&[1, 2, 3], &probe, 200, SEED, Execution::Parallel)?;
    let detail = format!("200 instances, {a} svp(psv(V)) mismatches, {b} psv(svp(P)) mismatches");
    Ok(if a == 0 && b == 0 { pass(detail) } else { fail(detail) })
}

fn thresholds() -> ppl_core::Result<Vec<ThresholdPair>> {
    [(1, 1, 1, 1), (3, 4, 1, 2), (1, 2, 1, 2), (1, 10, 1, 10)]
        .into_iter()
        .map(|(a, b, c, d)| ThresholdPair::new(rat(a, b), rat(c, d)))
        .collect()
}

fn collapse() -> ppl_core::Result<Outcome> {
    let inst = small_instances()?;
    let entailing = inst.iter().filter(|i| entails_c(&i.delta, &i.alpha).unwrap_or(false)).count();
    let bad = collapse_suite(&inst, &thresholds()?, Execution::Parallel)?;
    let detail = format!("{} instances ({entailing} entailing) x 4 thresholds, {} disagreements", inst.len(), bad.len());
    Ok(if bad.is_empty() { pass(detail) } else { fail(format!("{detail}; first: {:?}", bad[0])) })
}

fn hailperin() -> ppl_core::Result<Outcome> {
    let b1 = PropFormula::atom(1);
    let bottom = PropFormula::bottom();
    let (p, q) = (rat(1, 2), rat(1, 4));
    let joint = hailperin_entails(&[PropFormula::and(b1.clone(), PropFormula::not(b1.clone()))], &bottom, &p, &q)?;
    let split = hailperin_entails(&[b1.clone(), PropFormula::not(b1.clone())], &bottom, &p, &q)?;
    let pq = pq_entails(&[b1.clone(), PropFormula::not(b1)], &bottom, &ThresholdPair::new(p, q)?)?;
    let detail = format!("{{B1 & !B1}}: {joint}, {{B1, !B1}}: {split}, pq on {{B1, !B1}}: {pq}");
    Ok(if joint && !split && pq { pass(detail) } else { fail(detail) })
}

fn figures() -> ppl_core::Result<Outcome> {
    let config = BackendConfig { solver: None, ..BackendConfig::default() };
    let mut accepted = 0;
    for src in [fixtures::FIG1, fixtures::FIG2, fixtures::FIG3] {
        let report = check_derivation(&parse_script(src)?, &config);
        if report.accepted() {
            accepted += 1;
        } else {
            return Ok(fail(format!("rejected: {}", report.to_json())));
        }
    }
    Ok(pass(format!("{accepted}/3 derivations accepted, internal decider only")))
}

fn a_ppl_examples() -> ppl_core::Result<Outcome> {
    let config = BackendConfig::default();
    let mut r = rng(SEED);
    let mut problems = Vec::new();
    for _ in 0..20 {
        let alpha = random_formula(&mut r, &[1, 2, 3], 3);
        let f = PplFormula::le(alpha, Term::one())?;
        if !a_ppl(&f, &config)?.is_valid() {
            problems.push(format!("{f} not valid"));
        }
    }
    let marginal = parse_ppl("P(B1 & !B2) = x1 & P(B1 & B2) = x2 -> P(B1) = x1 + x2")?;
    if !a_ppl(&marginal, &config)?.is_valid() {
        problems.push("marginal implication not valid".into());
    }
    for _ in 0..10 {
        let a = random_formula(&mut r, &[1, 2, 3], 2);
        let b = random_formula(&mut r, &[1, 2, 3], 2);
        let f = parse_ppl(&format!(
            "P({a}) = x1 & P({b}) = x2 & P(({a}) & ({b})) = x3 -> P(({a}) | ({b})) = x1 + x2 - x3"
        ))?;
        if !a_ppl(&f, &config)?.is_valid() {
            problems.push(format!("{f} not valid"));
        }
    }
    let half = parse_ppl("P(B1) < 1/2")?;
    let witness = match a_ppl(&half, &config)? {
        DecisionOutcome::Invalid(rho) => {
            let (v, numbers) = counter_model(&half, &rho)?;
            let refutes = !ppl_sat(&v, &numbers, &half)?;
            if !refutes {
                problems.push("witness does not refute P(B1) < 1/2".into());
            }
            format!("P(B1) = {} under the witness", v.prob(&PropFormula::atom(1))?)
        }
        other => {
            problems.push(format!("P(B1) < 1/2 gave {}", other.label()));
            String::new()
        }
    };
    let detail = format!("20 bounds, marginal, 10 additivity instances valid; P(B1) < 1/2 invalid, {witness}");
    Ok(if problems.is_empty() { pass(detail) } else { fail(problems.join("; ")) })
}

fn conservativeness() -> ppl_core::Result<Outcome> {
    let inst = small_instances()?;
    let bad = conservativeness_suite(&inst, &BackendConfig::default(), Execution::Parallel)?;
    let detail = format!("{} instances, {} disagreements", inst.len(), bad.len());
    Ok(if bad.is_empty() { pass(detail) } else { fail(format!("{detail}; first: {:?}", bad[0])) })
}

fn linear_oracle() -> ppl_core::Result<Outcome> {
    let config = BackendConfig::default();
    let solver = common::solver();
    let mut r = rng(SEED);
    let (mut invalid, mut grid_bad, mut smt_bad, mut smt_checked) = (0, 0, 0, 0);
    let mut first = None;
    for _ in 0..100 {
        let (f, n) = common::random_linear_sentence(&mut r, 4);
        let internal = decide_universal_linear(&f, &config)?;
        let refuted = matches!(internal, DecisionOutcome::Invalid(_));
        invalid += usize::from(refuted);
        if internal.is_valid() == common::grid_refutes(&f, n) || !(refuted || internal.is_valid()) {
            grid_bad += 1;
            first.get_or_insert_with(|| format!("{f}: internal {}", internal.label()));
        }
        if let Some(s) = &solver {
            smt_checked += 1;
            let external = run_external(&f, s, Duration::from_secs(10))?;
            if external.label() != internal.label() {
                smt_bad += 1;
                first.get_or_insert_with(|| format!("{f}: internal {}, external {}", internal.label(), external.label()));
            }
        }
    }
    let smt = match &solver {
        Some(s) => format!("{smt_checked} checked against {} with {smt_bad} disagreements", s.display()),
        None => "no external solver found".into(),
    };
    let detail = format!("100 sentences ({invalid} invalid), {grid_bad} grid disagreements, {smt}");
    Ok(if grid_bad == 0 && smt_bad == 0 {
        pass(detail)
    } else {
        fail(format!("{detail}; first: {}", first.unwrap_or_default()))
    })
}

fn corpus() -> ppl_core::Result<Vec<(String, Derivation)>> {
    let mut out = Vec::new();
    for (name, src) in [("fig1", fixtures::FIG1), ("fig2", fixtures::FIG2), ("fig3", fixtures::FIG3)] {
        out.push((name.to_string(), parse_script(src)?));
    }
    out.push((
        "mp*".into(),
        apply_admissible(&Admissible::MpStar(parse_ppl("P(B1 | B2) = 1")?, parse_ppl("P((B1 | B2) -> B3) = 1")?))?,
    ));
    out.push(("taut*".into(), apply_admissible(&Admissible::TautStar(parse_prop("(B1 -> B2) | (B2 -> B1)")?))?));
    let pool = small_pool();
    for inst in sample_instances(&pool, 2, 40, SEED ^ 1)? {
        if !inst.delta.is_empty() && entails_c(&inst.delta, &inst.alpha)? {
            out.push((format!("lifted {:?} |= {}", inst.delta.iter().map(|d| d.to_string()).collect::<Vec<_>>(), inst.alpha), lifted_derivation(&inst.delta, &inst.alpha)?));
        }
        if out.len() >= 12 {
            break;
        }
    }
    Ok(out)
}

fn soundness() -> ppl_core::Result<Outcome> {
    let config = BackendConfig::default();
    let mut checked = 0;
    let mut problems = Vec::new();
    let derivations = corpus()?;
    for (i, (name, d)) in derivations.iter().enumerate() {
        if !check_derivation(d, &config).accepted() {
            problems.push(format!("{name} not accepted"));
            continue;
        }
        let scope = d.steps.iter().fold(Scope::from_indices([1]), |s, st| s.union(&st.formula.prop_atoms()));
        let pairs = satisfying_pairs(&d.hypotheses, &scope, 100, SEED + i as u64, 50_000)?;
        if pairs.len() < 100 {
            problems.push(format!("{name}: only {} satisfying pairs found", pairs.len()));
        }
        let conclusion = d.conclusion().expect("non-empty derivation");
        for (v, rho) in &pairs {
            checked += 1;
            if !ppl_sat(v, rho, conclusion)? {
                problems.push(format!("{name}: conclusion fails at {}", rho.to_json()));
                break;
            }
        }
    }
    let detail = format!("{} derivations, {checked} (V, rho) pairs, conclusions hold", derivations.len());
    Ok(if problems.is_empty() { pass(detail) } else { fail(problems.join("; ")) })
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "adams", secs(10), adams),
        run(2, "galois round-trip", secs(5), galois),
        run(3, "collapse", secs(60), collapse),
        run(4, "hailperin counterexample", secs(1), hailperin),
        run(5, "figures", secs(5), figures),
        run(6, "a_ppl examples", secs(30), a_ppl_examples),
        run(7, "conservativeness", secs(60), conservativeness),
        run(8, "linear oracle", secs(60), linear_oracle),
        run(9, "soundness", secs(30), soundness),
    ];
    let passed = results.iter().filter(|ok| **ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
