//! Random `(V, ρ)` pairs satisfying a set of hypotheses, for soundness
//! checks.
//!
//! Hypotheses of the form `⟨α⟩ = 1` restrict the support of the joint to the
//! models of `α`; hypotheses `⟨α⟩ = x_k` fix `ρ(x_k)` to `Prob_V(α)`. Every
//! other variable is drawn at random and the pair is kept only if it
//! satisfies all hypotheses.

use std::collections::BTreeMap;

use num::One;
use rand::Rng;

use super::{ppl_sat, Assignment, Cmp, PplFormula, Term};
use crate::dist::{FinDist, StochasticValuation};
use crate::pool::rng;
use crate::prop::{models_over, PropFormula, Scope};
use crate::rational::rat;
use crate::{Rational, Result};

/// Up to `n` pairs satisfying every formula of `gamma`, over the atoms of
/// `gamma` together with `scope`. Gives up after `max_attempts` draws.
pub fn satisfying_pairs(
    gamma: &[PplFormula],
    scope: &Scope,
    n: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Vec<(StochasticValuation, Assignment)>> {
    let scope = gamma.iter().fold(scope.clone(), |s, g| s.union(&g.prop_atoms()));
    let scope = if scope.is_empty() { Scope::from_indices([1]) } else { scope };

    let mut certain = Vec::new();
    let mut pinned: Vec<(u32, &PropFormula)> = Vec::new();
    let mut vars = std::collections::BTreeSet::new();
    let mut forms = std::collections::BTreeSet::new();
    for g in gamma {
        if let super::PplFormula::Atom(a) = g {
            if a.cmp == Cmp::Eq {
                match &a.term {
                    Term::Const(c) if c.is_one() => certain.push(a.alpha.clone()),
                    Term::Var(k) => pinned.push((*k, &a.alpha)),
                    _ => {}
                }
            }
        }
        for a in g.atoms() {
            a.term.collect_vars(&mut vars, &mut forms);
        }
    }
    let support = models_over(&PropFormula::conj(certain), &scope)?;
    if support.is_empty() {
        return Ok(Vec::new());
    }

    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..max_attempts {
        if out.len() >= n {
            break;
        }
        let mut mass = BTreeMap::new();
        let weights: Vec<i64> = support.iter().map(|_| if r.gen_bool(0.3) { 0 } else { r.gen_range(1..=9) }).collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        for (u, w) in support.iter().zip(weights) {
            mass.insert(*u, rat(w, total));
        }
        let v = StochasticValuation::new(FinDist::new(scope.clone(), mass)?);
        let mut rho = Assignment::new();
        for k in &vars {
            rho.set_num(*k, random_value(&mut r));
        }
        for (k, alpha) in &pinned {
            rho.set_num(*k, v.prob(alpha)?);
        }
        let mut ok = true;
        for g in gamma {
            if !ppl_sat(&v, &rho, g)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.push((v, rho));
        }
    }
    Ok(out)
}

fn random_value<R: Rng>(r: &mut R) -> Rational {
    match r.gen_range(0..4) {
        0 => rat(0, 1),
        1 => rat(1, 1),
        _ => rat(r.gen_range(-2..=14), 12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ppl;

    #[test]
    fn pairs_satisfy_hypotheses() {
        let gamma = [
            parse_ppl("P(B1) = 1").unwrap(),
            parse_ppl("P(B1 -> B2) = 1").unwrap(),
            parse_ppl("P(B1 & !B2) = x1").unwrap(),
        ];
        let pairs = satisfying_pairs(&gamma, &Scope::default(), 50, 3, 2000).unwrap();
        assert_eq!(pairs.len(), 50);
        for (v, rho) in &pairs {
            assert!(gamma.iter().all(|g| ppl_sat(v, rho, g).unwrap()));
        }
    }

    #[test]
    fn contradictory_certainties_give_nothing() {
        let gamma = [parse_ppl("P(B1) = 1").unwrap(), parse_ppl("P(!B1) = 1").unwrap()];
        assert!(satisfying_pairs(&gamma, &Scope::default(), 5, 0, 100).unwrap().is_empty());
    }
}
