//! Derivations in the PPL calculus: TAUT, RR and MP, with hypotheses.
//!
//! Proof scripts are plain text:
//!
//! ```text
//! # comment
//! hyp: P(B1) = 1
//! 1. P(B1) = 1 ; HYP
//! 2. P(T) = 1 ; RR
//! 3. ... ; MP 1 2
//! ```
//!
//! Steps are numbered from 1. `MP i j` needs step `j` to be
//! `(step i) → (this step)`, with `i` and `j` earlier than this step.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::parse::{parse_ppl, strip_comment};
use crate::ppl::{build_q, is_falsum, Cmp, Comparison, PplAtom, PplFormula, RcofFormula, Relation, Term};
use crate::prop::{atoms_of, entails_c, is_tautology, PropFormula, Scope};
use crate::rcof::{decide, BackendConfig, DecisionOutcome};
use crate::{Error, Result};

/// Most distinct probability atoms `check_taut` will truth-table.
pub const TAUT_ATOM_CAP: usize = 16;

pub mod fixtures {
    //! The shipped example derivations and theory files.
    pub const FIG1: &str = include_str!("../fixtures/fig1.ppl-proof");
    pub const FIG2: &str = include_str!("../fixtures/fig2.ppl-proof");
    pub const FIG3: &str = include_str!("../fixtures/fig3.ppl-proof");
    pub const OBLIVIOUS_TRANSFER: &str = include_str!("../fixtures/oblivious-transfer.ppl");
    pub const OBLIVIOUS_TRANSFER_INITIAL: &str = include_str!("../fixtures/oblivious-transfer-initial.ppl");
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Justification {
    Hyp,
    Taut,
    Rr,
    /// 1-based step numbers of `φ` and `φ → ψ`.
    Mp(usize, usize),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Hyp => write!(f, "HYP"),
            Justification::Taut => write!(f, "TAUT"),
            Justification::Rr => write!(f, "RR"),
            Justification::Mp(i, j) => write!(f, "MP {i} {j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub formula: PplFormula,
    pub justification: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Derivation {
    pub hypotheses: Vec<PplFormula>,
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&PplFormula> {
        self.steps.last().map(|s| &s.formula)
    }

    /// Appends a step and returns its 1-based number.
    pub fn push(&mut self, formula: PplFormula, justification: Justification) -> usize {
        self.steps.push(Step { formula, justification });
        self.steps.len()
    }

    fn formula(&self, n: usize) -> &PplFormula {
        &self.steps[n - 1].formula
    }

    /// A `HYP` step for `h`, adding it to the hypotheses if needed.
    pub fn hyp(&mut self, h: PplFormula) -> usize {
        if !self.hypotheses.contains(&h) {
            self.hypotheses.push(h.clone());
        }
        self.push(h, Justification::Hyp)
    }

    /// Derives `⟨α⟩ = 1` for a classical tautology `α`:
    /// `⟨⊤⟩ = 1` by RR, `(⟨⊤⟩ = 1) → (⟨α⟩ = 1)` by RR, then MP.
    pub fn taut_star(&mut self, alpha: &PropFormula) -> Result<usize> {
        if !is_tautology(alpha)? {
            return Err(Error::Precondition(format!("{alpha} is not a tautology")));
        }
        let top = PplFormula::certain(PropFormula::top());
        let target = PplFormula::certain(alpha.clone());
        let a = self.push(top.clone(), Justification::Rr);
        let b = self.push(PplFormula::implies(top, target.clone()), Justification::Rr);
        Ok(self.push(target, Justification::Mp(a, b)))
    }

    /// From steps `⟨α₁⟩ = 1` and `⟨α₁ → α₂⟩ = 1`, derives `⟨α₂⟩ = 1` in five
    /// more steps.
    pub fn mp_star(&mut self, first: usize, second: usize) -> Result<usize> {
        let a = self.formula(first).clone();
        let b = self.formula(second).clone();
        let alpha2 = match (certainty(&a), certainty(&b)) {
            (Some(a1), Some(PropFormula::Implies(p, q))) if **p == *a1 => (**q).clone(),
            _ => {
                return Err(Error::Precondition(format!("MP* needs P(a) = 1 and P(a -> b) = 1, got {a} and {b}")));
            }
        };
        let both = PplFormula::and(a.clone(), b.clone());
        let c = PplFormula::certain(alpha2);
        let tail = PplFormula::implies(b, both.clone());
        let s3 = self.push(PplFormula::implies(a, tail.clone()), Justification::Taut);
        let s4 = self.push(tail, Justification::Mp(first, s3));
        let s5 = self.push(both.clone(), Justification::Mp(second, s4));
        let s6 = self.push(PplFormula::implies(both, c.clone()), Justification::Rr);
        Ok(self.push(c, Justification::Mp(s5, s6)))
    }

    pub fn to_script(&self) -> String {
        let mut out = String::new();
        for h in &self.hypotheses {
            out.push_str(&format!("hyp: {h}\n"));
        }
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!("{}. {} ; {}\n", i + 1, s.formula, s.justification));
        }
        out
    }
}

/// `Some(α)` when `f` is `⟨α⟩ = 1`.
fn certainty(f: &PplFormula) -> Option<&PropFormula> {
    match f {
        PplFormula::Atom(a) if a.cmp == Cmp::Eq && a.term == Term::one() => Some(&a.alpha),
        _ => None,
    }
}

pub fn parse_script(src: &str) -> Result<Derivation> {
    let mut d = Derivation::default();
    for (lineno, raw) in src.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let at = |message: String| Error::Parse { offset: lineno + 1, message: format!("line {}: {message}", lineno + 1) };
        if let Some(h) = line.strip_prefix("hyp:") {
            d.hypotheses.push(parse_ppl(h.trim()).map_err(|e| at(e.to_string()))?);
            continue;
        }
        let (num, rest) = line.split_once('.').ok_or_else(|| at("expected `n. formula ; rule`".into()))?;
        let n: usize = num.trim().parse().map_err(|_| at(format!("bad step number {num:?}")))?;
        if n != d.steps.len() + 1 {
            return Err(at(format!("step {n} out of sequence")));
        }
        let (formula, rule) = rest.rsplit_once(';').ok_or_else(|| at("missing `; rule`".into()))?;
        let formula = parse_ppl(formula.trim()).map_err(|e| at(e.to_string()))?;
        let words: Vec<&str> = rule.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).collect();
        let justification = match words.as_slice() {
            ["HYP"] => Justification::Hyp,
            ["TAUT"] => Justification::Taut,
            ["RR"] => Justification::Rr,
            ["MP", i, j] => {
                let i = i.parse().map_err(|_| at(format!("bad MP index {i:?}")))?;
                let j = j.parse().map_err(|_| at(format!("bad MP index {j:?}")))?;
                Justification::Mp(i, j)
            }
            _ => return Err(at(format!("unknown rule {:?}", rule.trim()))),
        };
        d.push(formula, justification);
    }
    Ok(d)
}

/// Whether `phi` is a propositional tautology over its probability atoms.
///
/// Distinct atoms become distinct letters, except the atom `⟨⊤⟩ < 1` used
/// by the negation abbreviation, which is read as false.
pub fn check_taut(phi: &PplFormula) -> Result<bool> {
    let letters: Vec<&PplAtom> = phi
        .atoms()
        .into_iter()
        .filter(|a| !is_falsum(&PplFormula::Atom((*a).clone())))
        .collect();
    if letters.len() > TAUT_ATOM_CAP {
        return Err(Error::AbstractionCap { size: letters.len(), cap: TAUT_ATOM_CAP });
    }
    let index: BTreeMap<&PplAtom, usize> = letters.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    fn eval(f: &PplFormula, index: &BTreeMap<&PplAtom, usize>, mask: u32) -> bool {
        match f {
            PplFormula::Atom(a) => index.get(a).is_some_and(|k| mask >> k & 1 == 1),
            PplFormula::Implies(a, b) => !eval(a, index, mask) || eval(b, index, mask),
        }
    }
    Ok((0..1u32 << letters.len()).all(|m| eval(phi, &index, m)))
}

/// The parts of an RR instance: antecedent comparisons and the consequent.
fn rr_shape(phi: &PplFormula) -> Result<(Vec<Comparison<'_>>, Comparison<'_>)> {
    if let Some(c) = phi.as_comparison() {
        return Ok((Vec::new(), c));
    }
    let shape_error = || Error::Shape(format!("{phi} is not (c1 & ... & ck) -> c for comparisons c"));
    let PplFormula::Implies(lhs, rhs) = phi else {
        return Err(shape_error());
    };
    let consequent = rhs.as_comparison().ok_or_else(shape_error)?;
    let antecedents = lhs
        .conjuncts()
        .into_iter()
        .map(|c| c.as_comparison().ok_or_else(shape_error))
        .collect::<Result<Vec<_>>>()?;
    Ok((antecedents, consequent))
}

fn comparison_formula(c: &Comparison<'_>) -> RcofFormula {
    let x = Term::formula_var(c.alpha.clone());
    let t = c.term.clone();
    match c.rel {
        Relation::Eq => RcofFormula::Eq(x, t),
        Relation::Lt => RcofFormula::Lt(x, t),
        Relation::Le => RcofFormula::Le(x, t),
        Relation::Ge => RcofFormula::Le(t, x),
    }
}

/// The RCOF sentence behind an RR instance:
/// `∀((Q ∧ ⋀ x_{α_j} rel_j p_j) → x_{α_{k+1}} rel p)` with `Q` over the
/// union of the atoms of all `α_j`.
pub fn rr_sentence(phi: &PplFormula) -> Result<RcofFormula> {
    let (antecedents, consequent) = rr_shape(phi)?;
    let mut alphas: Vec<PropFormula> = Vec::new();
    for c in antecedents.iter().chain(std::iter::once(&consequent)) {
        if !alphas.contains(c.alpha) {
            alphas.push(c.alpha.clone());
        }
    }
    let scope = alphas.iter().fold(Scope::default(), |s, a| s.union(&atoms_of(a)));
    let mut conjuncts = vec![build_q(&alphas, &scope)?];
    conjuncts.extend(antecedents.iter().map(comparison_formula));
    Ok(RcofFormula::forall(RcofFormula::implies(
        RcofFormula::And(conjuncts),
        comparison_formula(&consequent),
    )))
}

/// Decides whether `phi` is an instance of the RR axiom schema.
pub fn check_rr(phi: &PplFormula, config: &BackendConfig) -> Result<DecisionOutcome> {
    let size = phi.prop_atoms().len();
    if size > config.scope_cap {
        return Err(Error::ScopeCap { size, cap: config.scope_cap });
    }
    decide(&rr_sentence(phi)?, config)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepVerdict {
    pub index: usize,
    pub formula: String,
    pub justification: String,
    pub ok: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationReport {
    pub steps: Vec<StepVerdict>,
    /// 1-based number of the first rejected step.
    pub first_failure: Option<usize>,
}

impl DerivationReport {
    pub fn accepted(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "accepted": self.accepted(),
            "first_failure": self.first_failure,
            "steps": self.steps.iter().map(|s| json!({
                "index": s.index,
                "formula": s.formula,
                "justification": s.justification,
                "ok": s.ok,
                "detail": s.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

fn check_step(d: &Derivation, n: usize, config: &BackendConfig) -> std::result::Result<(), String> {
    let step = &d.steps[n - 1];
    let f = &step.formula;
    match step.justification {
        Justification::Hyp => {
            if d.hypotheses.contains(f) {
                Ok(())
            } else {
                Err("not among the hypotheses".into())
            }
        }
        Justification::Taut => match check_taut(f) {
            Ok(true) => Ok(()),
            Ok(false) => Err("not a tautology over its probability atoms".into()),
            Err(e) => Err(e.to_string()),
        },
        Justification::Rr => match check_rr(f, config) {
            Ok(DecisionOutcome::Valid) => Ok(()),
            Ok(DecisionOutcome::Invalid(rho)) => Err(format!("side condition fails at {}", rho.to_json())),
            Ok(DecisionOutcome::Unsupported(why)) => Err(format!("side condition undecided: {why}")),
            Err(e) => Err(e.to_string()),
        },
        Justification::Mp(i, j) => {
            if i == 0 || j == 0 || i >= n || j >= n {
                return Err(format!("MP {i} {j} must cite earlier steps"));
            }
            let expected = PplFormula::implies(d.formula(i).clone(), f.clone());
            if *d.formula(j) == expected {
                Ok(())
            } else {
                Err(format!("step {j} is not step {i} -> this step"))
            }
        }
    }
}

/// Checks every step and reports the first failure.
pub fn check_derivation(d: &Derivation, config: &BackendConfig) -> DerivationReport {
    let mut steps = Vec::with_capacity(d.steps.len());
    let mut first_failure = None;
    for n in 1..=d.steps.len() {
        let result = check_step(d, n, config);
        if result.is_err() && first_failure.is_none() {
            first_failure = Some(n);
        }
        let s = &d.steps[n - 1];
        steps.push(StepVerdict {
            index: n,
            formula: s.formula.to_string(),
            justification: s.justification.to_string(),
            ok: result.is_ok(),
            detail: result.err(),
        });
    }
    DerivationReport { steps, first_failure }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissible {
    /// From `⟨α₁⟩ = 1` and `⟨α₁ → α₂⟩ = 1` infer `⟨α₂⟩ = 1`.
    MpStar(PplFormula, PplFormula),
    /// `⟨α⟩ = 1` for a classical tautology `α`.
    TautStar(PropFormula),
}

/// The derivation template for an admissible rule.
pub fn apply_admissible(rule: &Admissible) -> Result<Derivation> {
    let mut d = Derivation::default();
    match rule {
        Admissible::MpStar(a, b) => {
            let i = d.hyp(a.clone());
            let j = d.hyp(b.clone());
            d.mp_star(i, j)?;
        }
        Admissible::TautStar(alpha) => {
            d.taut_star(alpha)?;
        }
    }
    Ok(d)
}

/// A derivation of `α*` from `Δ*` when `Δ ⊨ α`: TAUT* on
/// `δ₁ → (δ₂ → … → α)`, then one MP* per hypothesis.
pub fn lifted_derivation(delta: &[PropFormula], alpha: &PropFormula) -> Result<Derivation> {
    if !entails_c(delta, alpha)? {
        return Err(Error::Precondition(format!("the hypotheses do not entail {alpha}")));
    }
    let gamma = delta
        .iter()
        .rev()
        .fold(alpha.clone(), |acc, d| PropFormula::implies(d.clone(), acc));
    let mut d = Derivation::default();
    let mut current = d.taut_star(&gamma)?;
    for h in delta {
        let k = d.hyp(PplFormula::certain(h.clone()));
        current = d.mp_star(k, current)?;
    }
    Ok(d)
}
