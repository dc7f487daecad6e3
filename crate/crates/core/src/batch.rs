//! Batch suites over formula pools. Each item is independent, so every suite
//! takes an [`Execution`] and can run sequentially or on the rayon pool.

use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::dist::{
    check_adams, psv, svp, AdamsPool, AdamsViolation, ProbAssignment, StochasticValuation, TableAssignment,
    ValuationAssignment,
};
use crate::exec::Execution;
use crate::pool::{random_dist, random_valuation, rng};
use crate::pq::{pq_entails, ThresholdPair};
use crate::ppl::PplFormula;
use crate::prop::{entails_c, models_over, phi, PropFormula, Scope};
use crate::rcof::{a_ppl, BackendConfig, DecisionOutcome};
use crate::{Error, Rational, Result};

/// A classical entailment question `Δ ⊨ α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub delta: Vec<PropFormula>,
    pub alpha: PropFormula,
}

/// `n` instances with `|Δ| ≤ max_delta` drawn from `pool`. About half pick
/// `α` among the pool formulas that `Δ` entails, so both answers are well
/// represented.
pub fn sample_instances(pool: &[PropFormula], max_delta: usize, n: usize, seed: u64) -> Result<Vec<Instance>> {
    if pool.is_empty() {
        return Ok(Vec::new());
    }
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = r.gen_range(0..=max_delta);
        let delta: Vec<PropFormula> = pool.choose_multiple(&mut r, k).cloned().collect();
        let alpha = if r.gen_bool(0.5) {
            let mut entailed = Vec::new();
            for f in pool {
                if entails_c(&delta, f)? {
                    entailed.push(f);
                }
            }
            entailed.choose(&mut r).map(|f| (*f).clone())
        } else {
            None
        };
        let alpha = alpha.unwrap_or_else(|| pool.choose(&mut r).expect("non-empty pool").clone());
        out.push(Instance { delta, alpha });
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct AdamsSummary {
    pub valuations: usize,
    pub pool_size: usize,
    pub entailing_pairs: usize,
    pub contradictory_pairs: usize,
    pub violations: Vec<AdamsViolation>,
}

/// `check_adams` for `n` random valuations over subsets of `atoms`.
pub fn adams_suite(pool: &AdamsPool, atoms: &[u32], n: usize, seed: u64, exec: Execution) -> Result<AdamsSummary> {
    let seeds: Vec<u64> = (0..n as u64).map(|i| seed.wrapping_add(i)).collect();
    let reports = exec.map(&seeds, |s| -> Result<Vec<AdamsViolation>> {
        let v = random_valuation(&mut rng(*s), atoms)?;
        Ok(check_adams(&ValuationAssignment(v), pool).violations)
    });
    let mut violations = Vec::new();
    for r in reports {
        violations.extend(r?);
    }
    Ok(AdamsSummary {
        valuations: n,
        pool_size: pool.formulas().len(),
        entailing_pairs: pool.entailing_pair_count(),
        contradictory_pairs: pool.contradictory_pair_count(),
        violations,
    })
}

/// Counts of `svp(psv(V)) ≠ V` and `psv(svp(P)) ≠ P` over `n` random
/// instances. Each `P` is a finite table over `probe` and the point
/// conjunctions of `atoms`, compared entry by entry.
pub fn galois_suite(atoms: &[u32], probe: &[PropFormula], n: usize, seed: u64, exec: Execution) -> Result<(usize, usize)> {
    let seeds: Vec<u64> = (0..n as u64).map(|i| seed.wrapping_add(i)).collect();
    let results = exec.map(&seeds, |s| -> Result<(bool, bool)> {
        let mut r = rng(*s);
        let v = random_valuation(&mut r, atoms)?;
        let back = svp(&psv(&v), v.carrier())?;
        let first = back == v;
        // a table assignment on `probe` and the point conjunctions, with each
        // value summed directly from random weights over the carrier
        let scope = Scope::from_indices(atoms.iter().copied());
        let weights = random_dist(&mut r, &scope)?;
        let mut table = TableAssignment::default();
        for u in 0..scope.subset_count() {
            table.insert(phi(&scope, u)?, weights.mass(u));
        }
        for f in probe {
            let mut total = Rational::zero();
            for u in models_over(f, &scope)? {
                total += weights.mass(u);
            }
            table.insert(f.clone(), total);
        }
        let q = psv(&svp(&table, &scope)?);
        let mut second = true;
        for (f, value) in &table.0 {
            if q.value(f).as_ref() != Some(value) {
                second = false;
            }
        }
        Ok((first, second))
    });
    let mut bad = (0, 0);
    for r in results {
        let (a, b) = r?;
        bad.0 += usize::from(!a);
        bad.1 += usize::from(!b);
    }
    Ok(bad)
}

/// An instance where two deciders disagree.
#[derive(Clone, Debug)]
pub struct Disagreement {
    pub instance: Instance,
    pub threshold: Option<(String, String)>,
    pub expected: bool,
    pub actual: String,
}

/// `pq_entails(Δ, α, t)` against `entails_c(Δ, α)` for every instance and
/// threshold.
pub fn collapse_suite(instances: &[Instance], thresholds: &[ThresholdPair], exec: Execution) -> Result<Vec<Disagreement>> {
    let jobs: Vec<(&Instance, &ThresholdPair)> =
        instances.iter().flat_map(|i| thresholds.iter().map(move |t| (i, t))).collect();
    let results = exec.map(&jobs, |(inst, t)| -> Result<Option<Disagreement>> {
        let expected = entails_c(&inst.delta, &inst.alpha)?;
        let actual = pq_entails(&inst.delta, &inst.alpha, t)?;
        Ok((expected != actual).then(|| Disagreement {
            instance: (*inst).clone(),
            threshold: Some((t.p().to_string(), t.q().to_string())),
            expected,
            actual: actual.to_string(),
        }))
    });
    collect(results)
}

/// `a_ppl(⋀Δ* → α*)` against `entails_c(Δ, α)`, where `α*` is `⟨α⟩ = 1`.
pub fn conservativeness_suite(instances: &[Instance], config: &BackendConfig, exec: Execution) -> Result<Vec<Disagreement>> {
    let results = exec.map(instances, |inst| -> Result<Option<Disagreement>> {
        let expected = entails_c(&inst.delta, &inst.alpha)?;
        let outcome = a_ppl(&lift(inst), config)?;
        let actual = match outcome {
            DecisionOutcome::Valid => Some(true),
            DecisionOutcome::Invalid(_) => Some(false),
            DecisionOutcome::Unsupported(_) => None,
        };
        Ok((actual != Some(expected)).then(|| Disagreement {
            instance: inst.clone(),
            threshold: None,
            expected,
            actual: outcome.label().to_string(),
        }))
    });
    collect(results)
}

/// `⋀Δ* → α*`.
pub fn lift(inst: &Instance) -> PplFormula {
    PplFormula::implies(
        PplFormula::conj(inst.delta.iter().cloned().map(PplFormula::certain)),
        PplFormula::certain(inst.alpha.clone()),
    )
}

fn collect(results: Vec<Result<Option<Disagreement>>>) -> Result<Vec<Disagreement>> {
    let mut out = Vec::new();
    for r in results {
        if let Some(d) = r? {
            out.push(d);
        }
    }
    Ok(out)
}

/// Random valuations over `atoms`, for benches.
pub fn valuations(atoms: &[u32], n: usize, seed: u64) -> Result<Vec<StochasticValuation>> {
    if atoms.is_empty() {
        return Err(Error::EmptyScope);
    }
    let mut r = rng(seed);
    (0..n).map(|_| random_valuation(&mut r, atoms)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::sample_pool;
    use crate::rational::rat;

    #[test]
    fn small_suites_are_clean_in_both_modes() {
        let formulas = sample_pool(&[1, 2], 2, 30, 1);
        let pool = AdamsPool::new(formulas.clone()).unwrap();
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert!(adams_suite(&pool, &[1, 2], 20, 5, exec).unwrap().violations.is_empty());
            assert_eq!(galois_suite(&[1, 2], &formulas, 10, 5, exec).unwrap(), (0, 0));
        }
        let inst = sample_instances(&formulas, 2, 20, 3).unwrap();
        assert!(inst.iter().any(|i| entails_c(&i.delta, &i.alpha).unwrap()));
        assert!(inst.iter().any(|i| !entails_c(&i.delta, &i.alpha).unwrap()));
        let t = [ThresholdPair::new(rat(3, 4), rat(1, 2)).unwrap()];
        assert!(collapse_suite(&inst, &t, Execution::Parallel).unwrap().is_empty());
        assert!(conservativeness_suite(&inst, &BackendConfig::default(), Execution::Parallel).unwrap().is_empty());
    }
}
