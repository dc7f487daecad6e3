//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use ppl_core::dist::{FinDist, StochasticValuation};
use ppl_core::ppl::{Assignment, Cmp, PplFormula, RcofFormula, Term};
use ppl_core::prop::{PropFormula, Scope};
use ppl_core::rational::{int, rat};
use proptest::prelude::*;
use rand::Rng;

/// Formulas over `B1..B{atoms}` built with all four connectives.
pub fn prop_formula(atoms: u32, depth: u32) -> impl Strategy<Value = PropFormula> {
    let leaf = (1..=atoms).prop_map(PropFormula::atom);
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(PropFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| PropFormula::or(a, b)),
        ]
    })
}

/// Non-empty scopes inside `B1..B{atoms}`.
pub fn scope(atoms: u32) -> impl Strategy<Value = Scope> {
    (1u64..1 << atoms).prop_map(move |bits| Scope::from_indices((1..=atoms).filter(|j| bits >> (j - 1) & 1 == 1)))
}

/// A joint over `scope` from small integer weights.
pub fn dist_over(scope: Scope) -> impl Strategy<Value = FinDist> {
    let n = scope.subset_count() as usize;
    proptest::collection::vec(0i64..6, n)
        .prop_filter("some mass", |w| w.iter().any(|x| *x > 0))
        .prop_map(move |w| {
            let total: i64 = w.iter().sum();
            let mass: BTreeMap<u64, _> = w.iter().enumerate().map(|(u, x)| (u as u64, rat(*x, total))).collect();
            FinDist::new(scope.clone(), mass).expect("weights normalize to a distribution")
        })
}

/// Valuations whose carrier lies inside `B1..B{atoms}`.
pub fn valuation(atoms: u32) -> impl Strategy<Value = StochasticValuation> {
    scope(atoms).prop_flat_map(dist_over).prop_map(StochasticValuation::new)
}

/// Small rational constants in `[-1/4, 5/4]`.
pub fn small_rational() -> impl Strategy<Value = Term> {
    (-1i64..=5).prop_map(|n| Term::constant(rat(n, 4)))
}

/// PPL formulas over `B1..B{atoms}` with linear terms in `x1, x2`.
pub fn ppl_formula(atoms: u32, depth: u32) -> impl Strategy<Value = PplFormula> {
    let term = prop_oneof![small_rational(), (1u32..=2).prop_map(Term::var)];
    let leaf = (prop_formula(atoms, 2), prop_oneof![Just(Cmp::Eq), Just(Cmp::Lt)], term)
        .prop_map(|(a, c, t)| PplFormula::atom(a, c, t).expect("no formula variables"));
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(PplFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PplFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PplFormula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| PplFormula::or(a, b)),
        ]
    })
}

/// `PPL_SOLVER` if set, else `z3` from `PATH`.
pub fn solver() -> Option<PathBuf> {
    if let Some(s) = std::env::var_os("PPL_SOLVER").filter(|s| !s.is_empty()) {
        return Some(PathBuf::from(s));
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join("z3")).find(|p| p.is_file())
}

/// Grid step for [`grid_refutes`]: every atom generated below is a
/// difference constraint `x_i - x_j ∘ c` or a bound `x_i ∘ c` with integer
/// `c`, and the antecedent is the box `[0, 1]^n`. A clause of such
/// constraints over at most four variables that has a real solution has one
/// on the 1/8 grid, because strict edges can be tightened by 1/8 without
/// closing a cycle of at most five edges with positive integer weight.
pub const GRID: i64 = 8;

fn var(k: u32) -> Term {
    Term::var(k)
}

fn random_atom<R: Rng>(r: &mut R, nvars: u32) -> RcofFormula {
    let i = r.gen_range(1..=nvars);
    let lhs = if nvars > 1 && r.gen_bool(0.6) {
        let mut j = r.gen_range(1..=nvars);
        while j == i {
            j = r.gen_range(1..=nvars);
        }
        Term::sub(var(i), var(j))
    } else {
        var(i)
    };
    let c = Term::constant(int(r.gen_range(-1..=1)));
    let (a, b) = if r.gen_bool(0.5) { (lhs, c) } else { (c, lhs) };
    match r.gen_range(0..3) {
        0 => RcofFormula::Eq(a, b),
        1 => RcofFormula::Lt(a, b),
        _ => RcofFormula::Le(a, b),
    }
}

fn random_matrix<R: Rng>(r: &mut R, nvars: u32, depth: u32) -> RcofFormula {
    if depth == 0 || r.gen_bool(0.3) {
        return random_atom(r, nvars);
    }
    match r.gen_range(0..4) {
        0 => RcofFormula::not(random_matrix(r, nvars, depth - 1)),
        1 => RcofFormula::implies(random_matrix(r, nvars, depth - 1), random_matrix(r, nvars, depth - 1)),
        2 => RcofFormula::And(vec![random_matrix(r, nvars, depth - 1), random_matrix(r, nvars, depth - 1)]),
        _ => RcofFormula::Or(vec![random_matrix(r, nvars, depth - 1), random_matrix(r, nvars, depth - 1)]),
    }
}

/// `∀((0 ≤ x_i ≤ 1 for all i) → M)` over `x_1..x_n`, `n ≤ max_vars`,
/// returned with `n`.
pub fn random_linear_sentence<R: Rng>(r: &mut R, max_vars: u32) -> (RcofFormula, u32) {
    let n = r.gen_range(1..=max_vars);
    let mut bounds = Vec::new();
    for k in 1..=n {
        bounds.push(RcofFormula::Le(Term::zero(), var(k)));
        bounds.push(RcofFormula::Le(var(k), Term::one()));
    }
    let m = random_matrix(r, n, 3);
    (RcofFormula::forall(RcofFormula::implies(RcofFormula::And(bounds), m)), n)
}

/// Whether some point of the 1/8 grid on `[0, 1]^n` falsifies the matrix.
pub fn grid_refutes(f: &RcofFormula, n: u32) -> bool {
    let steps = GRID + 1;
    let total = (steps as u64).pow(n);
    let matrix = f.matrix();
    (0..total).any(|mut code| {
        let mut rho = Assignment::new();
        for k in 1..=n {
            rho.set_num(k, rat((code % steps as u64) as i64, GRID));
            code /= steps as u64;
        }
        !matrix.eval(&rho)
    })
}
