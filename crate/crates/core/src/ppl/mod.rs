//! The probabilistic propositional logic PPL: probability atoms
//! `⟨α⟩ ∘ t` with `∘ ∈ {=, <}` closed under implication.
//!
//! As with classical formulas, only atoms and `→` are stored. The sugar
//!
//! * `¬φ` is `φ → (⟨⊤⟩ < 1)`,
//! * `φ ∧ ψ` is `¬(φ → ¬ψ)`, `φ ∨ ψ` is `¬φ → ψ`, `φ ↔ ψ` is `(φ → ψ) ∧ (ψ → φ)`,
//! * `⟨α⟩ ≤ t` is `(⟨α⟩ = t) ∨ (⟨α⟩ < t)` and `⟨α⟩ ≥ t` is `¬(⟨α⟩ < t)`,
//!
//! is expanded by the constructors and recovered by [`fmt::Display`].

use std::collections::BTreeSet;
use std::fmt;

use crate::dist::StochasticValuation;
use crate::prop::{atoms_of, PropFormula, Scope};
use crate::{Error, Result};

mod rcof;
pub mod sampling;
mod term;

pub use rcof::{build_q, translate, RcofFormula};
pub use term::{eval_term, Assignment, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cmp {
    Eq,
    Lt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Eq => "=",
            Cmp::Lt => "<",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PplAtom {
    pub alpha: PropFormula,
    pub cmp: Cmp,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PplFormula {
    Atom(PplAtom),
    Implies(Box<PplFormula>, Box<PplFormula>),
}

impl PplFormula {
    /// `⟨α⟩ ∘ t`; the term must not mention formula variables.
    pub fn atom(alpha: PropFormula, cmp: Cmp, term: Term) -> Result<Self> {
        if term.has_formula_var() {
            return Err(Error::Shape(format!("term {term} mentions a formula variable")));
        }
        Ok(PplFormula::Atom(PplAtom { alpha, cmp, term }))
    }

    fn atom_unchecked(alpha: PropFormula, cmp: Cmp, term: Term) -> Self {
        PplFormula::Atom(PplAtom { alpha, cmp, term })
    }

    pub fn eq(alpha: PropFormula, term: Term) -> Result<Self> {
        Self::atom(alpha, Cmp::Eq, term)
    }

    pub fn lt(alpha: PropFormula, term: Term) -> Result<Self> {
        Self::atom(alpha, Cmp::Lt, term)
    }

    pub fn le(alpha: PropFormula, term: Term) -> Result<Self> {
        Ok(Self::or(Self::eq(alpha.clone(), term.clone())?, Self::lt(alpha, term)?))
    }

    pub fn ge(alpha: PropFormula, term: Term) -> Result<Self> {
        Ok(Self::not(Self::lt(alpha, term)?))
    }

    /// `α*`, i.e. `⟨α⟩ = 1`.
    pub fn certain(alpha: PropFormula) -> Self {
        Self::atom_unchecked(alpha, Cmp::Eq, Term::one())
    }

    /// `⟨⊤⟩ < 1`, the always-false atom used to express negation.
    pub fn falsum() -> Self {
        Self::atom_unchecked(PropFormula::top(), Cmp::Lt, Term::one())
    }

    pub fn implies(a: PplFormula, b: PplFormula) -> Self {
        PplFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: PplFormula) -> Self {
        Self::implies(a, Self::falsum())
    }

    pub fn and(a: PplFormula, b: PplFormula) -> Self {
        Self::not(Self::implies(a, Self::not(b)))
    }

    pub fn or(a: PplFormula, b: PplFormula) -> Self {
        Self::implies(Self::not(a), b)
    }

    pub fn iff(a: PplFormula, b: PplFormula) -> Self {
        Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a))
    }

    /// Left-nested conjunction; the empty conjunction is `⟨⊤⟩ = 1`.
    pub fn conj<I: IntoIterator<Item = PplFormula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Self::and)
            .unwrap_or_else(|| Self::certain(PropFormula::top()))
    }

    /// Probability atoms in order of first occurrence, duplicates removed.
    pub fn atoms(&self) -> Vec<&PplAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        let mut seen = BTreeSet::new();
        out.retain(|a| seen.insert(*a));
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a PplAtom>) {
        match self {
            PplFormula::Atom(a) => out.push(a),
            PplFormula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// The propositional formulas under probability atoms, in order of first
    /// occurrence, duplicates removed.
    pub fn prop_formulas(&self) -> Vec<PropFormula> {
        let mut seen = BTreeSet::new();
        self.atoms()
            .into_iter()
            .filter(|a| seen.insert(&a.alpha))
            .map(|a| a.alpha.clone())
            .collect()
    }

    /// Every propositional symbol occurring in the formula.
    pub fn prop_atoms(&self) -> Scope {
        self.atoms()
            .iter()
            .fold(Scope::default(), |s, a| s.union(&atoms_of(&a.alpha)))
    }
}

pub fn ppl_sat(v: &StochasticValuation, rho: &Assignment, phi: &PplFormula) -> Result<bool> {
    Ok(match phi {
        PplFormula::Atom(a) => {
            let lhs = v.prob(&a.alpha)?;
            let rhs = eval_term(&a.term, rho)?;
            match a.cmp {
                Cmp::Eq => lhs == rhs,
                Cmp::Lt => lhs < rhs,
            }
        }
        PplFormula::Implies(a, b) => !ppl_sat(v, rho, a)? || ppl_sat(v, rho, b)?,
    })
}

/// `⋀Γ → φ`, whose validity is `Γ ⊨ φ` for finite `Γ`.
pub fn ppl_entails_reduction(gamma: &[PplFormula], phi: &PplFormula) -> PplFormula {
    PplFormula::implies(PplFormula::conj(gamma.iter().cloned()), phi.clone())
}

// ---------------------------------------------------------------------------
// Re-sugaring

/// A comparison `⟨α⟩ rel t` recognized through the `≤` / `≥` abbreviations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison<'a> {
    pub alpha: &'a PropFormula,
    pub rel: Relation,
    pub term: &'a Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Lt,
    Le,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

pub(crate) enum Sugar<'a> {
    Cmp(Comparison<'a>),
    Not(&'a PplFormula),
    And(&'a PplFormula, &'a PplFormula),
    Or(&'a PplFormula, &'a PplFormula),
    Iff(&'a PplFormula, &'a PplFormula),
    Implies(&'a PplFormula, &'a PplFormula),
}

pub(crate) fn is_falsum(f: &PplFormula) -> bool {
    matches!(f, PplFormula::Atom(a) if a.cmp == Cmp::Lt && a.term == Term::one() && a.alpha == PropFormula::top())
}

/// `Some(x)` when `f` is `¬x`.
fn negated(f: &PplFormula) -> Option<&PplFormula> {
    match f {
        PplFormula::Implies(a, b) if is_falsum(b) => Some(a),
        _ => None,
    }
}

impl PplFormula {
    /// Reads `self` as a single comparison, including the `≤` and `≥` forms.
    pub fn as_comparison(&self) -> Option<Comparison<'_>> {
        match self {
            PplFormula::Atom(a) => Some(Comparison {
                alpha: &a.alpha,
                rel: match a.cmp {
                    Cmp::Eq => Relation::Eq,
                    Cmp::Lt => Relation::Lt,
                },
                term: &a.term,
            }),
            PplFormula::Implies(lhs, rhs) => {
                // ≥: (⟨α⟩ < t) → ⊥
                if is_falsum(rhs) {
                    if let PplFormula::Atom(a) = &**lhs {
                        if a.cmp == Cmp::Lt {
                            return Some(Comparison { alpha: &a.alpha, rel: Relation::Ge, term: &a.term });
                        }
                    }
                }
                // ≤: ¬(⟨α⟩ = t) → (⟨α⟩ < t)
                if let (Some(PplFormula::Atom(e)), PplFormula::Atom(l)) = (negated(lhs), &**rhs) {
                    if e.cmp == Cmp::Eq && l.cmp == Cmp::Lt && e.alpha == l.alpha && e.term == l.term {
                        return Some(Comparison { alpha: &e.alpha, rel: Relation::Le, term: &e.term });
                    }
                }
                None
            }
        }
    }

    /// Splits a conjunction built with the `∧` abbreviation into its
    /// conjuncts (comparisons are never split).
    pub fn conjuncts(&self) -> Vec<&PplFormula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a PplFormula, out: &mut Vec<&'a PplFormula>) {
            if f.as_comparison().is_none() {
                if let Sugar::And(a, b) = f.sugar() {
                    go(a, out);
                    go(b, out);
                    return;
                }
            }
            out.push(f);
        }
        go(self, &mut out);
        out
    }

    pub(crate) fn sugar(&self) -> Sugar<'_> {
        if let Some(c) = self.as_comparison() {
            return Sugar::Cmp(c);
        }
        let PplFormula::Implies(lhs, rhs) = self else {
            unreachable!("atoms are comparisons")
        };
        if let Some(inner) = negated(self) {
            if let PplFormula::Implies(a, nb) = inner {
                if let Some(b) = negated(nb) {
                    if let (PplFormula::Implies(p, q), PplFormula::Implies(r, s)) = (&**a, b) {
                        if p == s && q == r {
                            return Sugar::Iff(p, q);
                        }
                    }
                    return Sugar::And(a, b);
                }
            }
            return Sugar::Not(inner);
        }
        // `¬a → b` reads as `a ∨ b` unless `¬a` is itself a conjunction or
        // biconditional, which read better as antecedents
        if let (Some(a), Sugar::Not(_)) = (negated(lhs), lhs.sugar()) {
            return Sugar::Or(a, rhs);
        }
        Sugar::Implies(lhs, rhs)
    }
}

// Binding levels: <-> 0, -> 1, | 2, & 3, ! and atoms 4.
fn write_ppl(f: &PplFormula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let sugar = f.sugar();
    let level = match sugar {
        Sugar::Cmp(_) | Sugar::Not(_) => 4,
        Sugar::And(..) => 3,
        Sugar::Or(..) => 2,
        Sugar::Implies(..) => 1,
        Sugar::Iff(..) => 0,
    };
    if level < min {
        write!(out, "(")?;
    }
    match sugar {
        Sugar::Cmp(c) => write!(out, "P({}) {} {}", c.alpha, c.rel.symbol(), c.term)?,
        Sugar::Not(a) => {
            write!(out, "!")?;
            // keep `!(P(a) = t)` readable
            let min = if a.as_comparison().is_some() { 5 } else { 4 };
            write_ppl(a, min, out)?;
        }
        Sugar::And(a, b) => binary(a, b, " & ", 3, 4, out)?,
        Sugar::Or(a, b) => binary(a, b, " | ", 2, 3, out)?,
        Sugar::Implies(a, b) => binary(a, b, " -> ", 2, 1, out)?,
        Sugar::Iff(a, b) => binary(a, b, " <-> ", 0, 1, out)?,
    }
    if level < min {
        write!(out, ")")?;
    }
    Ok(())
}

fn binary(a: &PplFormula, b: &PplFormula, op: &str, left: u8, right: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    write_ppl(a, left, out)?;
    out.write_str(op)?;
    write_ppl(b, right, out)
}

impl fmt::Display for PplFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ppl(self, 0, f)
    }
}
