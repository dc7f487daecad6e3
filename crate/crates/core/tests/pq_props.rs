mod common;

use common::prop_formula;
use num::Zero;
use ppl_core::pq::{hailperin_entails, pq_counterexample, pq_entails, PqLimits, ThresholdPair};
use ppl_core::prop::{models_over, PropFormula, Scope};
use ppl_core::rational::rat;
use ppl_core::Rational;
use proptest::prelude::*;

fn threshold() -> impl Strategy<Value = ThresholdPair> {
    (1i64..=8, 1i64..=8).prop_map(|(a, b)| {
        let (p, q) = if a >= b { (a, b) } else { (b, a) };
        ThresholdPair::new(rat(p, 8), rat(q, 8)).unwrap()
    })
}

fn eighths() -> impl Strategy<Value = Rational> {
    (0i64..=8).prop_map(|k| rat(k, 8))
}

/// Every joint over four points with masses in `(1/8)ℤ`.
fn grid_joints() -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in 0..=8 {
        for b in 0..=8 - a {
            for c in 0..=8 - a - b {
                out.push([a, b, c, 8 - a - b - c]);
            }
        }
    }
    out
}

/// Whether `premise` at `p` entails `alpha` at `q` over joints on `{B1, B2}`
/// by searching the 1/8 grid.
///
/// The grid is exact here when `p ∈ (1/8)ℤ`: with `S` the models of the
/// premise and `T` those of `alpha`, the least `y(T)` subject to `y(S) ≥ p`
/// is 0 (mass on `S ∖ T`), `p` (mass `p` on `S`, the rest off `T`) or 1,
/// and each is attained at a grid joint.
fn grid_entails(premise: &PropFormula, alpha: &PropFormula, p: &Rational, q: &Rational) -> bool {
    let scope = Scope::from_indices([1, 2]);
    let s = models_over(premise, &scope).unwrap();
    let t = models_over(alpha, &scope).unwrap();
    let mass = |y: &[i64; 4], set: &[u64]| set.iter().fold(Rational::zero(), |acc, u| acc + rat(y[*u as usize], 8));
    !grid_joints().iter().any(|y| mass(y, &s) >= *p && mass(y, &t) < *q)
}

fn subsets<T: Clone>(xs: &[T]) -> Vec<Vec<T>> {
    (0..1u32 << xs.len())
        .map(|bits| xs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn monotone_in_the_premises(
        delta in proptest::collection::vec(prop_formula(3, 2), 0..3),
        extra in prop_formula(3, 2),
        alpha in prop_formula(3, 2),
        t in threshold(),
    ) {
        if pq_entails(&delta, &alpha, &t).unwrap() {
            let mut wider = delta.clone();
            wider.push(extra);
            prop_assert!(pq_entails(&wider, &alpha, &t).unwrap());
        }
    }

    #[test]
    fn extensive(delta in proptest::collection::vec(prop_formula(3, 2), 1..3), t in threshold(), pick in 0usize..3) {
        let alpha = delta[pick % delta.len()].clone();
        prop_assert!(pq_entails(&delta, &alpha, &t).unwrap());
    }

    #[test]
    fn whole_premise_set_suffices(
        delta in proptest::collection::vec(prop_formula(3, 2), 0..4),
        alpha in prop_formula(3, 2),
        t in threshold(),
    ) {
        let any_subset = subsets(&delta).iter().any(|phi| {
            let conj = PropFormula::conj(phi.iter().cloned());
            hailperin_entails(&[conj], &alpha, t.p(), t.q()).unwrap()
        });
        prop_assert_eq!(pq_entails(&delta, &alpha, &t).unwrap(), any_subset);
    }

    #[test]
    fn singletons_agree(delta in prop_formula(3, 3), alpha in prop_formula(3, 3), t in threshold()) {
        prop_assert_eq!(
            hailperin_entails(std::slice::from_ref(&delta), &alpha, t.p(), t.q()).unwrap(),
            pq_entails(&[delta], &alpha, &t).unwrap()
        );
    }

    #[test]
    fn counterexamples_refute(delta in proptest::collection::vec(prop_formula(3, 2), 0..3), alpha in prop_formula(3, 2), t in threshold()) {
        if let Some(v) = pq_counterexample(&delta, &alpha, &t, PqLimits::default()).unwrap() {
            prop_assert!(v.prob(&PropFormula::conj(delta.iter().cloned())).unwrap() >= *t.p());
            prop_assert!(v.prob(&alpha).unwrap() < *t.q());
        } else {
            prop_assert!(pq_entails(&delta, &alpha, &t).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lp_matches_grid_search(
        delta in proptest::collection::vec(prop_formula(2, 3), 0..3),
        alpha in prop_formula(2, 3),
        t in threshold(),
        p in eighths(),
        q in eighths(),
    ) {
        let conj = PropFormula::conj(delta.iter().cloned());
        prop_assert_eq!(pq_entails(&delta, &alpha, &t).unwrap(), grid_entails(&conj, &alpha, t.p(), t.q()));
        prop_assert_eq!(
            hailperin_entails(std::slice::from_ref(&conj), &alpha, &p, &q).unwrap(),
            grid_entails(&conj, &alpha, &p, &q)
        );
    }
}
