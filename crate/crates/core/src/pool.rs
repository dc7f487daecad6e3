//! Formula pools and random instances for test suites and benches. All
//! randomness is seeded ChaCha, so pools are reproducible.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{FinDist, StochasticValuation};
use crate::prop::{models_over, PropFormula, Scope};
use crate::rational::rat;
use crate::{Rational, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every formula over `atoms` built from `¬` and `→` with depth at most
/// `depth` (atoms have depth 0), shallowest first.
pub fn all_formulas(atoms: &[u32], depth: usize) -> Vec<PropFormula> {
    let mut levels: Vec<PropFormula> = atoms.iter().map(|j| PropFormula::atom(*j)).collect();
    for _ in 0..depth {
        let prev = levels.clone();
        let mut next: Vec<PropFormula> = atoms.iter().map(|j| PropFormula::atom(*j)).collect();
        next.extend(prev.iter().map(|a| PropFormula::not(a.clone())));
        for a in &prev {
            for b in &prev {
                next.push(PropFormula::implies(a.clone(), b.clone()));
            }
        }
        levels = next;
    }
    levels.sort_by_key(PropFormula::depth);
    levels
}

/// Up to `n` distinct formulas of depth at most `depth` over `atoms`, chosen
/// by a seeded shuffle that first takes one formula per truth table and
/// then fills up with the rest.
pub fn sample_pool(atoms: &[u32], depth: usize, n: usize, seed: u64) -> Vec<PropFormula> {
    let mut all = all_formulas(atoms, depth);
    all.shuffle(&mut rng(seed));
    let scope = Scope::from_indices(atoms.iter().copied());
    let mut seen_tables = BTreeSet::new();
    let mut chosen = Vec::new();
    let mut rest = Vec::new();
    for f in all {
        let table = models_over(&f, &scope).expect("pool atoms are in scope");
        if chosen.len() < n && seen_tables.insert(table) {
            chosen.push(f);
        } else {
            rest.push(f);
        }
    }
    let mut picked: BTreeSet<PropFormula> = chosen.iter().cloned().collect();
    for f in rest {
        if chosen.len() >= n {
            break;
        }
        if picked.insert(f.clone()) {
            chosen.push(f);
        }
    }
    chosen
}

/// A random formula of depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[u32], depth: usize) -> PropFormula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return PropFormula::atom(atoms[rng.gen_range(0..atoms.len())]);
    }
    if rng.gen_bool(0.4) {
        PropFormula::not(random_formula(rng, atoms, depth - 1))
    } else {
        PropFormula::implies(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))
    }
}

/// A random joint over `scope` with small integer weights, normalized.
pub fn random_dist<R: Rng>(rng: &mut R, scope: &Scope) -> Result<FinDist> {
    let n = scope.subset_count() as usize;
    let mut weights: Vec<i64> = (0..n)
        .map(|_| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(1..=12) })
        .collect();
    if weights.iter().all(|w| *w == 0) {
        weights[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = weights.iter().sum();
    let mass: BTreeMap<u64, Rational> = weights
        .into_iter()
        .enumerate()
        .map(|(u, w)| (u as u64, rat(w, total)))
        .collect();
    FinDist::new(scope.clone(), mass)
}

/// A random valuation whose carrier is a non-empty subset of `atoms`.
pub fn random_valuation<R: Rng>(rng: &mut R, atoms: &[u32]) -> Result<StochasticValuation> {
    let mut carrier: Vec<u32> = atoms.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
    if carrier.is_empty() {
        carrier.push(atoms[rng.gen_range(0..atoms.len())]);
    }
    Ok(StochasticValuation::new(random_dist(rng, &Scope::from_indices(carrier))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts() {
        // depth ≤ 1 over two atoms: 2 atoms, 2 negations, 4 implications
        assert_eq!(all_formulas(&[1, 2], 1).len(), 8);
        assert_eq!(all_formulas(&[1, 2], 2).len(), 2 + 8 + 64);
        assert!(all_formulas(&[1, 2], 3).iter().all(|f| f.depth() <= 3));
    }

    #[test]
    fn samples_are_reproducible_and_distinct() {
        let a = sample_pool(&[1, 2], 3, 60, 7);
        assert_eq!(a, sample_pool(&[1, 2], 3, 60, 7));
        assert_eq!(a.iter().collect::<BTreeSet<_>>().len(), 60);
        // 15 of the 16 truth tables over two atoms are reachable at depth 3
        let scope = Scope::from_indices([1, 2]);
        let tables: BTreeSet<_> = a.iter().map(|f| models_over(f, &scope).unwrap()).collect();
        assert_eq!(tables.len(), 15);
    }

    #[test]
    fn random_dists_are_distributions() {
        let mut r = rng(1);
        for _ in 0..20 {
            let v = random_valuation(&mut r, &[1, 2, 3]).unwrap();
            assert!(!v.carrier().is_empty());
        }
    }
}
