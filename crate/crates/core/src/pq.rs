//! p-satisfaction, Hailperin entailment and pq-entailment.
//!
//! "Every stochastic valuation" is reduced to "every joint over the union
//! scope `A` of the formulas involved": probabilities of those formulas only
//! depend on the marginal over `A`, and every distribution over `A` is the
//! marginal of the valuation with carrier `A`. The question is then whether
//!
//! ```text
//! y_U ≥ 0,  Σ y_U = 1,  Σ_{U ⊨ δ} y_U ≥ p (δ ∈ Δ),  Σ_{U ⊨ α} y_U < q
//! ```
//!
//! is infeasible, which the exact linear decider answers. A feasible point is
//! a counter-model.

use num::{One, Signed};

use crate::dist::{FinDist, StochasticValuation};
use crate::linear::{feasible, Feasibility, LinRel, LinearAtom, LinearExpr, DEFAULT_CONSTRAINT_CAP};
use crate::prop::{atoms_of, entails_c, models_over, PropFormula, Scope};
use crate::rational::{format_rational, in_unit_interval};
use crate::{Error, Rational, Result};

/// Largest union scope the LP is built for (`2^8` unknowns).
pub const DEFAULT_PQ_SCOPE_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThresholdPair {
    p: Rational,
    q: Rational,
}

impl ThresholdPair {
    /// Requires `0 < q ≤ p ≤ 1`.
    pub fn new(p: Rational, q: Rational) -> Result<Self> {
        if q.is_positive() && q <= p && p <= Rational::one() {
            Ok(ThresholdPair { p, q })
        } else {
            Err(Error::InvalidThreshold { p: format_rational(&p), q: format_rational(&q) })
        }
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PqLimits {
    pub scope_cap: usize,
    pub constraint_cap: usize,
}

impl Default for PqLimits {
    fn default() -> Self {
        PqLimits { scope_cap: DEFAULT_PQ_SCOPE_CAP, constraint_cap: DEFAULT_CONSTRAINT_CAP }
    }
}

fn check_range(r: &Rational) -> Result<()> {
    if in_unit_interval(r) {
        Ok(())
    } else {
        Err(Error::ThresholdRange(format_rational(r)))
    }
}

/// `V ⊨_p α`, i.e. `Prob_V(α) ≥ p`.
pub fn p_satisfies(v: &StochasticValuation, alpha: &PropFormula, p: &Rational) -> Result<bool> {
    check_range(p)?;
    Ok(v.prob(alpha)? >= *p)
}

/// A valuation giving every `δ ∈ Δ` probability at least `p` and `α` less
/// than `q`, if there is one.
pub fn hailperin_counterexample(
    delta: &[PropFormula],
    alpha: &PropFormula,
    p: &Rational,
    q: &Rational,
    limits: PqLimits,
) -> Result<Option<StochasticValuation>> {
    check_range(p)?;
    check_range(q)?;
    let scope = delta.iter().fold(atoms_of(alpha), |s, d| s.union(&atoms_of(d)));
    scope.check_cap(limits.scope_cap)?;
    let n = scope.subset_count() as usize;
    let sum_over = |models: Vec<u64>| {
        models
            .into_iter()
            .fold(LinearExpr::default(), |e, u| e.add(&LinearExpr::var(u as usize)))
    };

    let mut atoms = Vec::with_capacity(n + delta.len() + 2);
    for u in 0..n {
        atoms.push(LinearAtom::new(LinearExpr::default(), LinRel::Le, &LinearExpr::var(u)));
    }
    atoms.push(LinearAtom::new(sum_over((0..n as u64).collect()), LinRel::Eq, &LinearExpr::constant(Rational::one())));
    for d in delta {
        let lhs = LinearExpr::constant(p.clone());
        atoms.push(LinearAtom::new(lhs, LinRel::Le, &sum_over(models_over(d, &scope)?)));
    }
    atoms.push(LinearAtom::new(sum_over(models_over(alpha, &scope)?), LinRel::Lt, &LinearExpr::constant(q.clone())));

    match feasible(&atoms, n, limits.constraint_cap) {
        Feasibility::Infeasible => Ok(None),
        Feasibility::TooLarge(m) => Err(Error::TooLarge(m)),
        Feasibility::Feasible(y) => {
            let v = StochasticValuation::new(FinDist::from_dense(scope, y)?);
            for d in delta {
                if v.prob(d)? < *p {
                    return Err(Error::Internal(format!("counter-model gives {d} less than the threshold")));
                }
            }
            if v.prob(alpha)? >= *q {
                return Err(Error::Internal(format!("counter-model gives {alpha} at least the threshold")));
            }
            Ok(Some(v))
        }
    }
}

/// Hailperin's form: every valuation p-satisfying each `δ ∈ Δ` q-satisfies
/// `α`. Any `p, q ∈ [0, 1]` are accepted.
pub fn hailperin_entails(delta: &[PropFormula], alpha: &PropFormula, p: &Rational, q: &Rational) -> Result<bool> {
    Ok(hailperin_counterexample(delta, alpha, p, q, PqLimits::default())?.is_none())
}

/// pq-entailment for finite `Δ`.
///
/// The definition asks for some finite `Φ ⊆ Δ` with `⊨_p ⋀Φ ⟹ ⊨_q α`. Taking
/// `Φ = Δ` is enough: `⋀Δ ⊨ ⋀Φ`, so by monotonicity `Prob(⋀Δ) ≤ Prob(⋀Φ)` and
/// every valuation p-satisfying `⋀Δ` also p-satisfies `⋀Φ`. If some `Φ`
/// works, `Δ` works too. `⋀∅` is `⊤`.
pub fn pq_entails(delta: &[PropFormula], alpha: &PropFormula, t: &ThresholdPair) -> Result<bool> {
    pq_entails_with(delta, alpha, t, PqLimits::default())
}

pub fn pq_entails_with(delta: &[PropFormula], alpha: &PropFormula, t: &ThresholdPair, limits: PqLimits) -> Result<bool> {
    Ok(pq_counterexample(delta, alpha, t, limits)?.is_none())
}

pub fn pq_counterexample(
    delta: &[PropFormula],
    alpha: &PropFormula,
    t: &ThresholdPair,
    limits: PqLimits,
) -> Result<Option<StochasticValuation>> {
    let conj = PropFormula::conj(delta.iter().cloned());
    hailperin_counterexample(&[conj], alpha, &t.p, &t.q, limits)
}

/// `(Δ ⊨_c α, Δ ⊩_{p,q} α)`; the two agree for every valid threshold pair.
pub fn collapse_check(delta: &[PropFormula], alpha: &PropFormula, t: &ThresholdPair) -> Result<(bool, bool)> {
    Ok((entails_c(delta, alpha)?, pq_entails(delta, alpha, t)?))
}

/// The union scope of a pq question, for callers that need its size.
pub fn union_scope(delta: &[PropFormula], alpha: &PropFormula) -> Scope {
    delta.iter().fold(atoms_of(alpha), |s, d| s.union(&atoms_of(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_prop;
    use crate::rational::{int, rat};

    fn p(s: &str) -> PropFormula {
        parse_prop(s).unwrap()
    }

    fn tp(a: Rational, b: Rational) -> ThresholdPair {
        ThresholdPair::new(a, b).unwrap()
    }

    #[test]
    fn threshold_validation() {
        assert!(ThresholdPair::new(rat(1, 4), rat(3, 4)).is_err());
        assert!(ThresholdPair::new(int(1), int(0)).is_err());
        assert!(ThresholdPair::new(rat(3, 2), int(1)).is_err());
        assert!(ThresholdPair::new(int(1), int(1)).is_ok());
    }

    #[test]
    fn p_satisfaction() {
        let v = StochasticValuation::new(FinDist::uniform(Scope::from_indices([1])).unwrap());
        assert!(p_satisfies(&v, &p("B1"), &rat(1, 2)).unwrap());
        assert!(!p_satisfies(&v, &p("F"), &rat(1, 100)).unwrap());
        assert!(p_satisfies(&v, &p("F"), &int(0)).unwrap());
        assert!(p_satisfies(&v, &p("B1"), &int(2)).is_err());
    }

    #[test]
    fn hailperin_counterexample_pair() {
        let (half, quarter) = (rat(1, 2), rat(1, 4));
        assert!(hailperin_entails(&[p("B1 & !B1")], &p("F"), &half, &quarter).unwrap());
        assert!(!hailperin_entails(&[p("B1"), p("!B1")], &p("F"), &half, &quarter).unwrap());
        let cx = hailperin_counterexample(&[p("B1"), p("!B1")], &p("F"), &half, &quarter, PqLimits::default())
            .unwrap()
            .unwrap();
        assert_eq!(cx.prob(&p("B1")).unwrap(), half);
        assert!(pq_entails(&[p("B1"), p("!B1")], &p("F"), &tp(half.clone(), quarter.clone())).unwrap());
        assert!(hailperin_entails(&[], &p("T"), &int(1), &int(1)).unwrap());
    }

    #[test]
    fn extensivity_needs_p_at_least_q() {
        assert!(!hailperin_entails(&[p("B1")], &p("B1"), &rat(1, 4), &rat(3, 4)).unwrap());
        for (a, b) in [(int(1), int(1)), (rat(1, 2), rat(1, 3)), (rat(1, 10), rat(1, 10))] {
            assert!(pq_entails(&[p("B1")], &p("B1"), &tp(a, b)).unwrap());
        }
    }

    #[test]
    fn collapse_examples() {
        assert_eq!(collapse_check(&[p("B1")], &p("B1 | B2"), &tp(int(1), int(1))).unwrap(), (true, true));
        assert_eq!(collapse_check(&[p("B1 | B2")], &p("B1"), &tp(rat(1, 2), rat(1, 2))).unwrap(), (false, false));
    }

    #[test]
    fn scope_cap_is_reported() {
        let big = PropFormula::conj((1..=10).map(PropFormula::atom));
        assert!(matches!(hailperin_entails(&[big], &p("B1"), &int(1), &int(1)), Err(Error::ScopeCap { .. })));
    }
}
