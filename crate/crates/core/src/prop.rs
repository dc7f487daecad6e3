//! Classical propositional formulas over the atoms `B_j`, their truth-table
//! semantics over finite scopes, and the `phi(A, U)` / DNF constructors.
//!
//! Formulas are stored over `¬` and `→` only. The derived connectives desugar
//! on construction:
//!
//! | sugar     | stored as          |
//! |-----------|--------------------|
//! | `a ∧ b`   | `¬(a → ¬b)`        |
//! | `a ∨ b`   | `¬a → b`           |
//! | `a ↔ b`   | `(a → b) ∧ (b → a)`|
//! | `⊤`       | `B1 ∨ ¬B1`         |
//! | `⊥`       | `B1 ∧ ¬B1`         |
//!
//! and [`fmt::Display`] re-sugars, so printing then parsing is the identity.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// Largest scope any operation will enumerate, regardless of configuration.
pub const MAX_ENUMERATION: usize = 24;

/// Default cap for configurable entry points.
pub const DEFAULT_SCOPE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomIndex(pub u32);

impl fmt::Display for AtomIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropFormula {
    Atom(AtomIndex),
    Not(Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(j: u32) -> Self {
        PropFormula::Atom(AtomIndex(j))
    }

    pub fn not(a: PropFormula) -> Self {
        PropFormula::Not(Box::new(a))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        Self::not(Self::implies(a, Self::not(b)))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        Self::implies(Self::not(a), b)
    }

    pub fn iff(a: PropFormula, b: PropFormula) -> Self {
        Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a))
    }

    /// `B1 ∨ ¬B1`
    pub fn top() -> Self {
        Self::or(Self::atom(1), Self::not(Self::atom(1)))
    }

    /// `B1 ∧ ¬B1`
    pub fn bottom() -> Self {
        Self::and(Self::atom(1), Self::not(Self::atom(1)))
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj<I: IntoIterator<Item = PropFormula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Self::and)
            .unwrap_or_else(Self::top)
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disj<I: IntoIterator<Item = PropFormula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Self::or)
            .unwrap_or_else(Self::bottom)
    }

    pub fn depth(&self) -> usize {
        match self {
            PropFormula::Atom(_) => 0,
            PropFormula::Not(a) => 1 + a.depth(),
            PropFormula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomIndex>) {
        match self {
            PropFormula::Atom(j) => {
                out.insert(*j);
            }
            PropFormula::Not(a) => a.collect_atoms(out),
            PropFormula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under the scope-relative bitmask `mask`.
    pub fn eval_mask(&self, scope: &Scope, mask: u64) -> Result<bool> {
        Ok(self.compile(scope)?.eval(mask))
    }

    pub(crate) fn compile(&self, scope: &Scope) -> Result<Compiled> {
        Ok(match self {
            PropFormula::Atom(j) => Compiled::Bit(scope.position(*j).ok_or(Error::OutOfScope(*j))? as u32),
            PropFormula::Not(a) => Compiled::Not(Box::new(a.compile(scope)?)),
            PropFormula::Implies(a, b) => {
                Compiled::Implies(Box::new(a.compile(scope)?), Box::new(b.compile(scope)?))
            }
        })
    }
}

/// A formula with atoms resolved to bit positions of a fixed scope.
#[derive(Clone, Debug)]
pub(crate) enum Compiled {
    Bit(u32),
    Not(Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn eval(&self, mask: u64) -> bool {
        match self {
            Compiled::Bit(k) => mask >> k & 1 == 1,
            Compiled::Not(a) => !a.eval(mask),
            Compiled::Implies(a, b) => !a.eval(mask) || b.eval(mask),
        }
    }
}

/// A finite set of atoms, kept sorted. Subsets are bitmasks where bit `k`
/// stands for the `k`-th smallest atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scope(Vec<AtomIndex>);

impl Scope {
    pub fn new<I: IntoIterator<Item = AtomIndex>>(atoms: I) -> Self {
        let set: BTreeSet<AtomIndex> = atoms.into_iter().collect();
        Scope(set.into_iter().collect())
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        Self::new(indices.into_iter().map(AtomIndex))
    }

    pub fn atoms(&self) -> &[AtomIndex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, atom: AtomIndex) -> bool {
        self.0.binary_search(&atom).is_ok()
    }

    pub fn position(&self, atom: AtomIndex) -> Option<usize> {
        self.0.binary_search(&atom).ok()
    }

    pub fn is_subset(&self, other: &Scope) -> bool {
        self.0.iter().all(|a| other.contains(*a))
    }

    pub fn union(&self, other: &Scope) -> Scope {
        Scope::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn intersection(&self, other: &Scope) -> Scope {
        Scope::new(self.0.iter().copied().filter(|a| other.contains(*a)))
    }

    pub fn difference(&self, other: &Scope) -> Scope {
        Scope::new(self.0.iter().copied().filter(|a| !other.contains(*a)))
    }

    /// Number of subsets, `2^len`.
    pub fn subset_count(&self) -> u64 {
        1u64 << self.0.len()
    }

    pub fn full_mask(&self) -> u64 {
        self.subset_count() - 1
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        let cap = cap.min(MAX_ENUMERATION);
        if self.len() > cap {
            return Err(Error::ScopeCap { size: self.len(), cap });
        }
        Ok(())
    }

    pub fn require_non_empty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyScope)
        } else {
            Ok(())
        }
    }

    pub fn mask_of<I: IntoIterator<Item = AtomIndex>>(&self, atoms: I) -> Result<u64> {
        atoms.into_iter().try_fold(0u64, |m, a| {
            let k = self.position(a).ok_or(Error::OutOfScope(a))?;
            Ok(m | 1 << k)
        })
    }

    pub fn atoms_of_mask(&self, mask: u64) -> Vec<AtomIndex> {
        self.0
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| *a)
            .collect()
    }

    /// Re-expresses a subset of `self` as a subset of `target`, keeping only
    /// the atoms both scopes share.
    pub fn project(&self, mask: u64, target: &Scope) -> u64 {
        Projection::new(self, target).apply(mask)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Precomputed bit mapping between two scopes.
#[derive(Clone, Debug)]
pub(crate) struct Projection {
    pairs: Vec<(u32, u32)>,
}

impl Projection {
    pub(crate) fn new(from: &Scope, to: &Scope) -> Self {
        let pairs = from
            .atoms()
            .iter()
            .enumerate()
            .filter_map(|(k, a)| to.position(*a).map(|t| (k as u32, t as u32)))
            .collect();
        Projection { pairs }
    }

    pub(crate) fn apply(&self, mask: u64) -> u64 {
        self.pairs
            .iter()
            .fold(0, |m, &(from, to)| m | (mask >> from & 1) << to)
    }
}

/// A classical valuation restricted to a finite scope, identified with the
/// set of atoms it makes true.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Valuation {
    scope: Scope,
    mask: u64,
}

impl Valuation {
    pub fn new<I: IntoIterator<Item = AtomIndex>>(scope: Scope, true_atoms: I) -> Result<Self> {
        let mask = scope.mask_of(true_atoms)?;
        Ok(Valuation { scope, mask })
    }

    pub fn from_mask(scope: Scope, mask: u64) -> Self {
        let mask = mask & scope.full_mask();
        Valuation { scope, mask }
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn true_atoms(&self) -> Vec<AtomIndex> {
        self.scope.atoms_of_mask(self.mask)
    }

    pub fn is_true(&self, atom: AtomIndex) -> bool {
        self.scope.position(atom).is_some_and(|k| self.mask >> k & 1 == 1)
    }
}

/// A conjunction mentioning every atom of its scope exactly once: the shape
/// of `phi(A, U)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjunctionOfLiterals {
    scope: Scope,
    positive: u64,
}

impl ConjunctionOfLiterals {
    pub fn new(scope: Scope, positive: u64) -> Result<Self> {
        scope.require_non_empty()?;
        let positive = positive & scope.full_mask();
        Ok(ConjunctionOfLiterals { scope, positive })
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    /// Atoms that occur positively, as a mask over the scope.
    pub fn positive_mask(&self) -> u64 {
        self.positive
    }

    /// `(atom, sign)` pairs in ascending atom order.
    pub fn literals(&self) -> Vec<(AtomIndex, bool)> {
        self.scope
            .atoms()
            .iter()
            .enumerate()
            .map(|(k, a)| (*a, self.positive >> k & 1 == 1))
            .collect()
    }

    pub fn to_formula(&self) -> PropFormula {
        PropFormula::conj(self.literals().into_iter().map(|(a, sign)| {
            let atom = PropFormula::Atom(a);
            if sign {
                atom
            } else {
                PropFormula::not(atom)
            }
        }))
    }
}

/// The atoms occurring in `alpha` after desugaring.
pub fn atoms_of(alpha: &PropFormula) -> Scope {
    let mut set = BTreeSet::new();
    alpha.collect_atoms(&mut set);
    Scope(set.into_iter().collect())
}

pub fn eval(v: &Valuation, alpha: &PropFormula) -> Result<bool> {
    alpha.eval_mask(&v.scope, v.mask)
}

/// Subsets `U ⊆ A` (as masks, ascending) whose `A`-valuation satisfies `alpha`.
pub fn models_over(alpha: &PropFormula, scope: &Scope) -> Result<Vec<u64>> {
    scope.check_cap(MAX_ENUMERATION)?;
    let compiled = alpha.compile(scope)?;
    Ok((0..scope.subset_count()).filter(|m| compiled.eval(*m)).collect())
}

/// Classical entailment by truth table over the union of all atoms.
pub fn entails_c(delta: &[PropFormula], alpha: &PropFormula) -> Result<bool> {
    let scope = delta
        .iter()
        .chain(std::iter::once(alpha))
        .fold(Scope::default(), |s, f| s.union(&atoms_of(f)));
    scope.check_cap(MAX_ENUMERATION)?;
    let hyps = delta
        .iter()
        .map(|d| d.compile(&scope))
        .collect::<Result<Vec<_>>>()?;
    let concl = alpha.compile(&scope)?;
    Ok((0..scope.subset_count()).all(|m| !hyps.iter().all(|h| h.eval(m)) || concl.eval(m)))
}

pub fn is_tautology(alpha: &PropFormula) -> Result<bool> {
    entails_c(&[], alpha)
}

/// `phi(A, U)`: the conjunction of literals over `A`, ascending by atom
/// index, that is true exactly on the `A`-valuation `U`.
pub fn phi(scope: &Scope, subset: u64) -> Result<PropFormula> {
    Ok(ConjunctionOfLiterals::new(scope.clone(), subset)?.to_formula())
}

/// `phi(A, U)` with `U` given as a set of atoms.
pub fn phi_of(scope: &Scope, subset: &[AtomIndex]) -> Result<PropFormula> {
    phi(scope, scope.mask_of(subset.iter().copied())?)
}

/// DNF of `alpha` over `scope` by model enumeration: one `phi(A, U)` per
/// model, sorted by mask. The disjuncts are pairwise contradictory.
pub fn dnf(alpha: &PropFormula, scope: &Scope) -> Result<Vec<ConjunctionOfLiterals>> {
    scope.require_non_empty()?;
    models_over(alpha, scope)?
        .into_iter()
        .map(|m| ConjunctionOfLiterals::new(scope.clone(), m))
        .collect()
}

/// An adequate set of DNF-conjuncts for `alphas`: the shared scope (the union
/// of their atoms) and one model-enumeration DNF per formula over it.
pub fn adequate_dnf_set(alphas: &[PropFormula]) -> Result<(Scope, Vec<Vec<ConjunctionOfLiterals>>)> {
    if alphas.is_empty() {
        return Err(Error::Precondition("adequate DNF set of an empty list".into()));
    }
    let scope = alphas
        .iter()
        .fold(Scope::default(), |s, a| s.union(&atoms_of(a)));
    let lists = alphas
        .iter()
        .map(|a| dnf(a, &scope))
        .collect::<Result<Vec<_>>>()?;
    Ok((scope, lists))
}

// ---------------------------------------------------------------------------
// Printing

/// The re-sugared reading of a stored node.
enum Sugar<'a> {
    Atom(AtomIndex),
    Top,
    Bottom,
    Not(&'a PropFormula),
    And(&'a PropFormula, &'a PropFormula),
    Or(&'a PropFormula, &'a PropFormula),
    Iff(&'a PropFormula, &'a PropFormula),
    Implies(&'a PropFormula, &'a PropFormula),
}

fn is_top(f: &PropFormula) -> bool {
    matches!(f, PropFormula::Implies(a, b)
        if matches!(&**a, PropFormula::Not(x) if **x == PropFormula::atom(1)) && a == b)
}

fn is_bottom(f: &PropFormula) -> bool {
    *f == PropFormula::bottom()
}

fn sugar(f: &PropFormula) -> Sugar<'_> {
    match f {
        PropFormula::Atom(j) => Sugar::Atom(*j),
        _ if is_top(f) => Sugar::Top,
        _ if is_bottom(f) => Sugar::Bottom,
        PropFormula::Not(inner) => match &**inner {
            PropFormula::Implies(a, nb) => match &**nb {
                PropFormula::Not(b) => {
                    if let (PropFormula::Implies(p, q), PropFormula::Implies(r, s)) = (&**a, &**b) {
                        if p == s && q == r {
                            return Sugar::Iff(p, q);
                        }
                    }
                    Sugar::And(a, b)
                }
                _ => Sugar::Not(inner),
            },
            _ => Sugar::Not(inner),
        },
        PropFormula::Implies(na, b) => match &**na {
            PropFormula::Not(a) => Sugar::Or(a, b),
            _ => Sugar::Implies(na, b),
        },
    }
}

// Binding levels: <-> 0, -> 1, | 2, & 3, ! and atoms 4.
fn write_prop(f: &PropFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let (level, body): (u8, Box<dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result + '_>) = match sugar(f) {
        Sugar::Atom(j) => (4, Box::new(move |o| write!(o, "{j}"))),
        Sugar::Top => (4, Box::new(|o| write!(o, "T"))),
        Sugar::Bottom => (4, Box::new(|o| write!(o, "F"))),
        Sugar::Not(a) => (
            4,
            Box::new(move |o| {
                write!(o, "!")?;
                write_prop(a, 4, o)
            }),
        ),
        Sugar::And(a, b) => (3, Box::new(move |o| binary(a, b, " & ", 3, 4, o))),
        Sugar::Or(a, b) => (2, Box::new(move |o| binary(a, b, " | ", 2, 3, o))),
        Sugar::Implies(a, b) => (1, Box::new(move |o| binary(a, b, " -> ", 2, 1, o))),
        Sugar::Iff(a, b) => (0, Box::new(move |o| binary(a, b, " <-> ", 0, 1, o))),
    };
    if level < min {
        write!(out, "(")?;
        body(out)?;
        write!(out, ")")
    } else {
        body(out)
    }
}

fn binary(
    a: &PropFormula,
    b: &PropFormula,
    op: &str,
    left: u8,
    right: u8,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    write_prop(a, left, out)?;
    out.write_str(op)?;
    write_prop(b, right, out)
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prop(self, 0, f)
    }
}
