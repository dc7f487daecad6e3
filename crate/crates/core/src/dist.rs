//! Finite-carrier stochastic valuations, probability assignments and the two
//! maps between them.
//!
//! A [`StochasticValuation`] is a joint distribution over the subsets of a
//! finite carrier. Atoms outside the carrier behave as independent fair
//! bits, so the marginal over any finite scope `A` is
//!
//! ```text
//! mass_A(U') = 2^-|A \ carrier| · Σ { joint(U) : U ∩ A = U' ∩ carrier }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use serde_json::Value;

use crate::prop::{atoms_of, phi, PropFormula, Scope, Valuation, MAX_ENUMERATION};
use crate::rational::{format_rational, in_unit_interval, inverse_power_of_two, parse_rational};
use crate::{Error, Rational, Result};

/// An exact distribution over the subsets of a non-empty scope. Only
/// non-zero masses are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinDist {
    scope: Scope,
    mass: BTreeMap<u64, Rational>,
}

impl FinDist {
    /// Validates that every mask lies inside the scope, every value lies in
    /// `[0, 1]` and the values sum to exactly 1.
    pub fn new(scope: Scope, mass: BTreeMap<u64, Rational>) -> Result<Self> {
        scope.require_non_empty()?;
        scope.check_cap(MAX_ENUMERATION)?;
        let mut total = Rational::zero();
        for (u, m) in &mass {
            if *u > scope.full_mask() {
                return Err(Error::NotADistribution(format!("subset {u} is not a subset of {scope}")));
            }
            if !in_unit_interval(m) {
                return Err(Error::NotADistribution(format!("mass {} outside [0, 1]", format_rational(m))));
            }
            total += m;
        }
        if !total.is_one() {
            return Err(Error::NotADistribution(format!("masses sum to {}", format_rational(&total))));
        }
        let mass = mass.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(FinDist { scope, mass })
    }

    pub fn uniform(scope: Scope) -> Result<Self> {
        scope.require_non_empty()?;
        scope.check_cap(MAX_ENUMERATION)?;
        let each = inverse_power_of_two(scope.len());
        let mass = (0..scope.subset_count()).map(|u| (u, each.clone())).collect();
        Self::new(scope, mass)
    }

    /// All mass on the subset `u`.
    pub fn point(scope: Scope, u: u64) -> Result<Self> {
        Self::new(scope, BTreeMap::from([(u, Rational::one())]))
    }

    /// `values[u]` is the mass of subset `u`; missing trailing entries are 0.
    pub fn from_dense(scope: Scope, values: Vec<Rational>) -> Result<Self> {
        let mass = values.into_iter().enumerate().map(|(u, m)| (u as u64, m)).collect();
        Self::new(scope, mass)
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn mass(&self, u: u64) -> Rational {
        self.mass.get(&u).cloned().unwrap_or_else(Rational::zero)
    }

    /// Subsets with non-zero mass, ascending.
    pub fn support(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.mass.iter().map(|(u, m)| (*u, m))
    }

    pub fn to_json(&self) -> String {
        let carrier: Vec<String> = self.scope.atoms().iter().map(|a| a.0.to_string()).collect();
        let mass: Vec<String> = self
            .mass
            .iter()
            .map(|(u, m)| format!("\"{u}\":\"{}\"", format_rational(m)))
            .collect();
        format!("{{\"carrier\":[{}],\"mass\":{{{}}}}}", carrier.join(","), mass.join(","))
    }

    /// Reads `{"carrier":[1,2],"mass":{"0":"1/4",...}}`. Keys are decimal
    /// bitmasks, bit `k` being the `k`-th smallest carrier atom; missing keys
    /// mean 0.
    pub fn from_json(src: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(src)?;
        let bad = |m: &str| Error::NotADistribution(m.to_string());
        let carrier = v
            .get("carrier")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"carrier\" array"))?;
        let mut atoms = Vec::with_capacity(carrier.len());
        for a in carrier {
            let j = a
                .as_u64()
                .and_then(|j| u32::try_from(j).ok())
                .ok_or_else(|| bad("carrier entries must be atom indices"))?;
            atoms.push(j);
        }
        let scope = Scope::from_indices(atoms.iter().copied());
        if scope.len() != atoms.len() {
            return Err(bad("duplicate carrier atom"));
        }
        let entries = v
            .get("mass")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing \"mass\" object"))?;
        let mut mass = BTreeMap::new();
        for (k, m) in entries {
            let u: u64 = k.parse().map_err(|_| bad(&format!("mass key {k:?} is not a decimal bitmask")))?;
            let value = match m {
                Value::String(s) => parse_rational(s)?,
                Value::Number(n) if n.is_u64() => Rational::from_integer(n.as_u64().unwrap_or(0).into()),
                _ => return Err(bad("mass values must be rational strings")),
            };
            mass.insert(u, value);
        }
        Self::new(scope, mass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StochasticValuation {
    joint: FinDist,
}

impl StochasticValuation {
    pub fn new(joint: FinDist) -> Self {
        StochasticValuation { joint }
    }

    pub fn carrier(&self) -> &Scope {
        self.joint.scope()
    }

    pub fn joint(&self) -> &FinDist {
        &self.joint
    }

    /// The finite-dimensional distribution over `scope`.
    pub fn marginal(&self, scope: &Scope) -> Result<FinDist> {
        scope.require_non_empty()?;
        scope.check_cap(MAX_ENUMERATION)?;
        let carrier = self.carrier();
        let outside = scope.difference(carrier);
        let outside_mask = scope.mask_of(outside.atoms().iter().copied())?;
        let factor = inverse_power_of_two(outside.len());
        let mut mass: BTreeMap<u64, Rational> = BTreeMap::new();
        for (u, m) in self.joint.support() {
            let base = carrier.project(u, scope);
            let share = m * &factor;
            for w in submasks(outside_mask) {
                *mass.entry(base | w).or_insert_with(Rational::zero) += &share;
            }
        }
        FinDist::new(scope.clone(), mass)
    }

    /// `Prob_V(α)`: the marginal mass of the models of `α` over its own atoms.
    pub fn prob(&self, alpha: &PropFormula) -> Result<Rational> {
        let own = atoms_of(alpha);
        let carrier = self.carrier();
        let outside = own.difference(carrier);
        let scope = carrier.union(&own);
        scope.check_cap(MAX_ENUMERATION)?;
        let compiled = alpha.compile(&scope)?;
        let lift = crate::prop::Projection::new(carrier, &scope);
        let outside_mask = scope.mask_of(outside.atoms().iter().copied())?;
        let mut total = Rational::zero();
        for (u, m) in self.joint.support() {
            let base = lift.apply(u);
            let hits = submasks(outside_mask).filter(|w| compiled.eval(base | w)).count();
            if hits > 0 {
                total += m * Rational::from_integer(hits.into());
            }
        }
        Ok(total * inverse_power_of_two(outside.len()))
    }
}

/// Every submask of `mask`, including 0 and `mask` itself.
fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

// ---------------------------------------------------------------------------
// Marginal consistency

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyViolation {
    /// Index of the distribution over the larger scope.
    pub larger: usize,
    /// Index of the distribution over the smaller scope.
    pub smaller: usize,
    /// The subset of the smaller scope at which the sums disagree.
    pub subset: u64,
    pub expected: Rational,
    pub actual: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub violations: Vec<ConsistencyViolation>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the marginal condition between every pair of distributions whose
/// scopes are nested.
pub fn check_consistency(family: &[FinDist]) -> ConsistencyReport {
    let mut violations = Vec::new();
    for (i, big) in family.iter().enumerate() {
        for (j, small) in family.iter().enumerate() {
            if i == j || !small.scope().is_subset(big.scope()) {
                continue;
            }
            let mut summed: BTreeMap<u64, Rational> = BTreeMap::new();
            for (u, m) in big.support() {
                *summed.entry(big.scope().project(u, small.scope())).or_insert_with(Rational::zero) += m;
            }
            for u in 0..small.scope().subset_count() {
                let expected = summed.remove(&u).unwrap_or_else(Rational::zero);
                let actual = small.mass(u);
                if expected != actual {
                    violations.push(ConsistencyViolation { larger: i, smaller: j, subset: u, expected, actual });
                }
            }
        }
    }
    ConsistencyReport { violations }
}

// ---------------------------------------------------------------------------
// Probability assignments

/// A map from formulas to rationals. `None` means the assignment does not
/// cover the formula (only possible for finite tables).
pub trait ProbAssignment {
    fn value(&self, alpha: &PropFormula) -> Option<Rational>;
}

/// `α ↦ Prob_V(α)`.
#[derive(Clone, Debug)]
pub struct ValuationAssignment(pub StochasticValuation);

impl ProbAssignment for ValuationAssignment {
    fn value(&self, alpha: &PropFormula) -> Option<Rational> {
        self.0.prob(alpha).ok()
    }
}

/// A finite table of values keyed by formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableAssignment(pub BTreeMap<PropFormula, Rational>);

impl TableAssignment {
    pub fn insert(&mut self, alpha: PropFormula, value: Rational) {
        self.0.insert(alpha, value);
    }
}

impl FromIterator<(PropFormula, Rational)> for TableAssignment {
    fn from_iter<I: IntoIterator<Item = (PropFormula, Rational)>>(iter: I) -> Self {
        TableAssignment(iter.into_iter().collect())
    }
}

impl ProbAssignment for TableAssignment {
    fn value(&self, alpha: &PropFormula) -> Option<Rational> {
        self.0.get(alpha).cloned()
    }
}

pub fn psv(v: &StochasticValuation) -> ValuationAssignment {
    ValuationAssignment(v.clone())
}

/// The stochastic valuation with carrier `carrier` whose joint reads
/// `P(phi(carrier, U))` for every `U`.
pub fn svp(p: &dyn ProbAssignment, carrier: &Scope) -> Result<StochasticValuation> {
    carrier.require_non_empty()?;
    carrier.check_cap(MAX_ENUMERATION)?;
    let mut mass = BTreeMap::new();
    let mut total = Rational::zero();
    for u in 0..carrier.subset_count() {
        let point = phi(carrier, u)?;
        let value = p
            .value(&point)
            .ok_or_else(|| Error::NotAProbabilityAssignment(format!("no value for {point}")))?;
        if !in_unit_interval(&value) {
            return Err(Error::NotAProbabilityAssignment(format!(
                "P({point}) = {} outside [0, 1]",
                format_rational(&value)
            )));
        }
        total += &value;
        mass.insert(u, value);
    }
    if !total.is_one() {
        return Err(Error::NotAProbabilityAssignment(format!(
            "point formulas over {carrier} sum to {}",
            format_rational(&total)
        )));
    }
    Ok(StochasticValuation::new(FinDist::new(carrier.clone(), mass)?))
}

/// The point-mass valuation at `v ∩ carrier`. Atoms outside `v`'s scope
/// count as false.
pub fn induced_from_valuation(v: &Valuation, carrier: &Scope) -> Result<StochasticValuation> {
    let true_atoms = v.true_atoms().into_iter().filter(|a| carrier.contains(*a));
    let u = carrier.mask_of(true_atoms)?;
    Ok(StochasticValuation::new(FinDist::point(carrier.clone(), u)?))
}

// ---------------------------------------------------------------------------
// Adams axioms

/// A formula pool with its classical relations precomputed, so that many
/// assignments can be checked against it cheaply.
#[derive(Clone, Debug)]
pub struct AdamsPool {
    formulas: Vec<PropFormula>,
    tautologies: Vec<usize>,
    /// `(i, j)` with `i ≠ j` and `formulas[i] ⊨ formulas[j]`.
    entailing: Vec<(usize, usize)>,
    /// `(i, j, β ∨ α)` with `i < j` and `⊨ ¬(formulas[i] ∧ formulas[j])`.
    contradictory: Vec<(usize, usize, PropFormula)>,
}

impl AdamsPool {
    pub fn new(formulas: Vec<PropFormula>) -> Result<Self> {
        let scope = formulas.iter().fold(Scope::default(), |s, f| s.union(&atoms_of(f)));
        let models: Vec<BTreeSet<u64>> = if scope.is_empty() {
            Vec::new()
        } else {
            formulas
                .iter()
                .map(|f| crate::prop::models_over(f, &scope).map(|m| m.into_iter().collect()))
                .collect::<Result<_>>()?
        };
        let all = scope.subset_count() as usize;
        let mut tautologies = Vec::new();
        let mut entailing = Vec::new();
        let mut contradictory = Vec::new();
        for (i, mi) in models.iter().enumerate() {
            if mi.len() == all {
                tautologies.push(i);
            }
            for (j, mj) in models.iter().enumerate() {
                if i == j {
                    continue;
                }
                if mi.is_subset(mj) {
                    entailing.push((i, j));
                }
                if i < j && mi.is_disjoint(mj) {
                    contradictory.push((i, j, PropFormula::or(formulas[i].clone(), formulas[j].clone())));
                }
            }
        }
        Ok(AdamsPool { formulas, tautologies, entailing, contradictory })
    }

    pub fn formulas(&self) -> &[PropFormula] {
        &self.formulas
    }

    pub fn tautology_count(&self) -> usize {
        self.tautologies.len()
    }

    pub fn entailing_pair_count(&self) -> usize {
        self.entailing.len()
    }

    pub fn contradictory_pair_count(&self) -> usize {
        self.contradictory.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdamsViolation {
    /// P1: the value lies outside `[0, 1]`.
    Range { formula: PropFormula, value: Rational },
    /// P2: a tautology does not get 1.
    Tautology { formula: PropFormula, value: Rational },
    /// P3: `premise ⊨ conclusion` but `P(premise) > P(conclusion)`.
    Monotonicity { premise: PropFormula, conclusion: PropFormula, premise_value: Rational, conclusion_value: Rational },
    /// P4: contradictory `β`, `α` with `P(β ∨ α) ≠ P(β) + P(α)`.
    Additivity { left: PropFormula, right: PropFormula, left_value: Rational, right_value: Rational, disjunction_value: Rational },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdamsReport {
    pub violations: Vec<AdamsViolation>,
    /// Formulas the assignment has no value for; checks needing them are
    /// skipped.
    pub undefined: Vec<PropFormula>,
}

impl AdamsReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks P1 on every formula, P2 on every tautology, P3 on every entailing
/// pair and P4 on every contradictory pair of the pool.
pub fn check_adams(p: &dyn ProbAssignment, pool: &AdamsPool) -> AdamsReport {
    let mut report = AdamsReport::default();
    let values: Vec<Option<Rational>> = pool.formulas.iter().map(|f| p.value(f)).collect();
    for (f, v) in pool.formulas.iter().zip(&values) {
        match v {
            None => report.undefined.push(f.clone()),
            Some(v) if !in_unit_interval(v) => report.violations.push(AdamsViolation::Range { formula: f.clone(), value: v.clone() }),
            Some(_) => {}
        }
    }
    for &i in &pool.tautologies {
        if let Some(v) = &values[i] {
            if !v.is_one() {
                report
                    .violations
                    .push(AdamsViolation::Tautology { formula: pool.formulas[i].clone(), value: v.clone() });
            }
        }
    }
    for &(i, j) in &pool.entailing {
        if let (Some(vi), Some(vj)) = (&values[i], &values[j]) {
            if vi > vj {
                report.violations.push(AdamsViolation::Monotonicity {
                    premise: pool.formulas[i].clone(),
                    conclusion: pool.formulas[j].clone(),
                    premise_value: vi.clone(),
                    conclusion_value: vj.clone(),
                });
            }
        }
    }
    for (i, j, disjunction) in &pool.contradictory {
        let (Some(vi), Some(vj)) = (&values[*i], &values[*j]) else { continue };
        match p.value(disjunction) {
            None => report.undefined.push(disjunction.clone()),
            Some(vd) if vd != vi + vj => report.violations.push(AdamsViolation::Additivity {
                left: pool.formulas[*i].clone(),
                right: pool.formulas[*j].clone(),
                left_value: vi.clone(),
                right_value: vj.clone(),
                disjunction_value: vd,
            }),
            Some(_) => {}
        }
    }
    report
}
