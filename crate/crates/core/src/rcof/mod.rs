//! Deciding universal sentences over the ordered real field.
//!
//! Sentences whose terms are all linear go to an exact internal decider
//! (negate, disjunctive normal form, Fourier–Motzkin per clause). Anything
//! else is handed to an external SMT solver if one is configured.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use num::{One, Zero};

use crate::dist::{FinDist, StochasticValuation};
use crate::linear::{feasible, Feasibility, LinRel, LinearAtom, LinearExpr, DEFAULT_CONSTRAINT_CAP};
use crate::ppl::{build_q, ppl_sat, translate, Assignment, PplFormula, RcofFormula, Term};
use crate::prop::{phi, PropFormula, Scope, DEFAULT_SCOPE_CAP};
use crate::rational::format_rational;
use crate::{Error, Rational, Result};

mod smt;

pub use smt::{emit_smtlib, run_external};

/// Environment variable naming an SMT solver executable.
pub const SOLVER_ENV: &str = "PPL_SOLVER";
pub const DEFAULT_CLAUSE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendConfig {
    /// External solver for nonlinear sentences; `None` disables that path.
    pub solver: Option<PathBuf>,
    pub timeout: Duration,
    pub scope_cap: usize,
    /// Maximum number of clauses in the normal form of a negated matrix.
    pub clause_cap: usize,
    /// Maximum number of live inequalities during elimination.
    pub constraint_cap: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            solver: None,
            timeout: Duration::from_secs(10),
            scope_cap: DEFAULT_SCOPE_CAP,
            clause_cap: DEFAULT_CLAUSE_CAP,
            constraint_cap: DEFAULT_CONSTRAINT_CAP,
        }
    }
}

impl BackendConfig {
    /// Defaults, with the solver taken from `PPL_SOLVER` when set.
    pub fn from_env() -> Self {
        let solver = std::env::var_os(SOLVER_ENV).filter(|s| !s.is_empty()).map(PathBuf::from);
        BackendConfig { solver, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecisionOutcome {
    Valid,
    /// Values for the free variables under which the matrix is false.
    Invalid(Assignment),
    Unsupported(String),
}

impl DecisionOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, DecisionOutcome::Valid)
    }

    pub fn label(&self) -> &'static str {
        match self {
            DecisionOutcome::Valid => "valid",
            DecisionOutcome::Invalid(_) => "invalid",
            DecisionOutcome::Unsupported(_) => "unsupported",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Linear,
    Nonlinear,
}

/// The free variables of a sentence, numbered for the linear decider:
/// `x_k` first in ascending `k`, then the `x_α` in formula order.
#[derive(Clone, Debug, Default)]
pub(crate) struct VarTable {
    nums: BTreeMap<u32, usize>,
    forms: BTreeMap<PropFormula, usize>,
}

impl VarTable {
    pub(crate) fn of(f: &RcofFormula) -> Self {
        let (nums, forms) = f.free_vars();
        let nums: BTreeMap<u32, usize> = nums.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
        let base = nums.len();
        let forms = forms.into_iter().enumerate().map(|(i, a)| (a, base + i)).collect();
        VarTable { nums, forms }
    }

    pub(crate) fn len(&self) -> usize {
        self.nums.len() + self.forms.len()
    }

    fn assignment(&self, point: &[Rational]) -> Assignment {
        let mut rho = Assignment::new();
        for (k, i) in &self.nums {
            rho.set_num(*k, point[*i].clone());
        }
        for (a, i) in &self.forms {
            rho.set_formula(a.clone(), point[*i].clone());
        }
        rho
    }

    fn linearize(&self, t: &Term) -> Option<LinearExpr> {
        Some(match t {
            Term::Const(c) => LinearExpr::constant(c.clone()),
            Term::Var(k) => LinearExpr::var(self.nums[k]),
            Term::FormulaVar(a) => LinearExpr::var(self.forms[a]),
            Term::Neg(a) => self.linearize(a)?.neg(),
            Term::Add(a, b) => self.linearize(a)?.add(&self.linearize(b)?),
            Term::Mul(a, b) => {
                let (a, b) = (self.linearize(a)?, self.linearize(b)?);
                if a.is_constant() {
                    b.scale(&a.constant)
                } else if b.is_constant() {
                    a.scale(&b.constant)
                } else {
                    return None;
                }
            }
        })
    }
}

/// Linear iff every term is of degree at most one once constant factors are
/// multiplied out.
pub fn classify(f: &RcofFormula) -> Class {
    let table = VarTable::of(f);
    let mut linear = true;
    f.visit_terms(&mut |t| linear &= table.linearize(t).is_some());
    if linear {
        Class::Linear
    } else {
        Class::Nonlinear
    }
}

// Negation normal form over linear atoms.
enum Nnf {
    True,
    False,
    Lit(LinearAtom),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

fn literal(atom: LinearAtom) -> Nnf {
    match atom.constant_truth() {
        Some(true) => Nnf::True,
        Some(false) => Nnf::False,
        None => Nnf::Lit(atom),
    }
}

fn nnf(f: &RcofFormula, positive: bool, table: &VarTable) -> Result<Nnf> {
    let lin = |t: &Term| table.linearize(t).ok_or_else(|| Error::Internal(format!("nonlinear term {t}")));
    let cmp = |a: &Term, b: &Term, rel: LinRel| -> Result<Nnf> {
        let atom = LinearAtom::new(lin(a)?, rel, &lin(b)?);
        Ok(if positive {
            literal(atom)
        } else {
            let parts: Vec<Nnf> = atom.negate().into_iter().map(literal).collect();
            if parts.len() == 1 {
                parts.into_iter().next().expect("one part")
            } else {
                Nnf::Or(parts)
            }
        })
    };
    let all = |xs: &[RcofFormula], pol: bool| xs.iter().map(|x| nnf(x, pol, table)).collect::<Result<Vec<_>>>();
    Ok(match f {
        RcofFormula::True => if positive { Nnf::True } else { Nnf::False },
        RcofFormula::False => if positive { Nnf::False } else { Nnf::True },
        RcofFormula::Eq(a, b) => cmp(a, b, LinRel::Eq)?,
        RcofFormula::Lt(a, b) => cmp(a, b, LinRel::Lt)?,
        RcofFormula::Le(a, b) => cmp(a, b, LinRel::Le)?,
        RcofFormula::Not(a) => nnf(a, !positive, table)?,
        RcofFormula::Implies(a, b) => {
            let (a, b) = (nnf(a, !positive, table)?, nnf(b, positive, table)?);
            if positive { Nnf::Or(vec![a, b]) } else { Nnf::And(vec![a, b]) }
        }
        RcofFormula::And(xs) => {
            let xs = all(xs, positive)?;
            if positive { Nnf::And(xs) } else { Nnf::Or(xs) }
        }
        RcofFormula::Or(xs) => {
            let xs = all(xs, positive)?;
            if positive { Nnf::Or(xs) } else { Nnf::And(xs) }
        }
        RcofFormula::ForAll(_) => {
            return Err(Error::Shape("universal closure below the top of the sentence".into()));
        }
    })
}

enum Walk {
    Continue,
    Stop,
}

// Depth-first enumeration of the clauses of the disjunctive normal form.
fn walk<'a>(
    pending: &mut Vec<&'a Nnf>,
    clause: &mut Vec<&'a LinearAtom>,
    visit: &mut dyn FnMut(&[&'a LinearAtom]) -> Walk,
) -> Walk {
    let Some(node) = pending.pop() else {
        return visit(clause);
    };
    let result = match node {
        Nnf::True => walk(pending, clause, visit),
        Nnf::False => Walk::Continue,
        Nnf::Lit(a) => {
            clause.push(a);
            let r = walk(pending, clause, visit);
            clause.pop();
            r
        }
        Nnf::And(xs) => {
            let mark = pending.len();
            pending.extend(xs.iter().rev());
            let r = walk(pending, clause, visit);
            pending.truncate(mark);
            r
        }
        Nnf::Or(xs) => {
            let mut r = Walk::Continue;
            for x in xs {
                pending.push(x);
                r = walk(pending, clause, visit);
                pending.pop();
                if let Walk::Stop = r {
                    break;
                }
            }
            r
        }
    };
    pending.push(node);
    result
}

/// Decides the universal closure of `f`'s matrix when all of its terms are
/// linear.
pub fn decide_universal_linear(f: &RcofFormula, config: &BackendConfig) -> Result<DecisionOutcome> {
    let matrix = f.matrix();
    if classify(matrix) != Class::Linear {
        return Ok(DecisionOutcome::Unsupported("sentence has nonlinear terms".into()));
    }
    let table = VarTable::of(matrix);
    let negated = nnf(matrix, false, &table)?;
    let n = table.len();

    let mut clauses = 0usize;
    let mut outcome: Option<DecisionOutcome> = None;
    let mut visit = |clause: &[&LinearAtom]| -> Walk {
        clauses += 1;
        if clauses > config.clause_cap {
            outcome = Some(DecisionOutcome::Unsupported(format!(
                "normal form of the negation exceeds {} clauses",
                config.clause_cap
            )));
            return Walk::Stop;
        }
        let atoms: Vec<LinearAtom> = clause.iter().map(|a| (*a).clone()).collect();
        match feasible(&atoms, n, config.constraint_cap) {
            Feasibility::Infeasible => Walk::Continue,
            Feasibility::Feasible(point) => {
                outcome = Some(DecisionOutcome::Invalid(table.assignment(&point)));
                Walk::Stop
            }
            Feasibility::TooLarge(m) => {
                outcome = Some(DecisionOutcome::Unsupported(m));
                Walk::Stop
            }
        }
    };
    walk(&mut vec![&negated], &mut Vec::new(), &mut visit);
    let outcome = outcome.unwrap_or(DecisionOutcome::Valid);
    if let DecisionOutcome::Invalid(rho) = &outcome {
        if matrix.eval(rho) {
            return Err(Error::Internal(format!("recovered witness does not refute {matrix}")));
        }
    }
    Ok(outcome)
}

/// Linear sentences go to the internal decider, others to the configured
/// external solver.
pub fn decide(f: &RcofFormula, config: &BackendConfig) -> Result<DecisionOutcome> {
    match classify(f.matrix()) {
        Class::Linear => decide_universal_linear(f, config),
        Class::Nonlinear => match &config.solver {
            Some(solver) => run_external(f, solver, config.timeout),
            None => Ok(DecisionOutcome::Unsupported("nonlinear sentence and no external solver configured".into())),
        },
    }
}

/// The valuation with carrier `scope` whose joint reads the point variables
/// `x_{phi(scope, U)}` of `rho`, after checking the range and sum-to-one
/// conjuncts of the Q-formula.
pub fn valuation_from_assignment(rho: &Assignment, scope: &Scope) -> Result<StochasticValuation> {
    scope.require_non_empty()?;
    scope.check_cap(crate::prop::MAX_ENUMERATION)?;
    let mut mass = BTreeMap::new();
    let mut total = Rational::zero();
    for u in 0..scope.subset_count() {
        let point = phi(scope, u)?;
        let v = rho.formula(&point);
        if v < Rational::zero() || v > Rational::one() {
            return Err(Error::QViolation(format!("(i) 0 <= x[{point}] <= 1 fails with value {}", format_rational(&v))));
        }
        total += &v;
        mass.insert(u, v);
    }
    if !total.is_one() {
        return Err(Error::QViolation(format!("(ii) point variables sum to {}", format_rational(&total))));
    }
    Ok(StochasticValuation::new(FinDist::new(scope.clone(), mass)?))
}

/// The sentence `∀(Q → ψ)` that decides validity of `phi`, with the scope
/// used for `Q`.
pub fn validity_sentence(phi: &PplFormula, config: &BackendConfig) -> Result<(RcofFormula, Scope)> {
    let scope = phi.prop_atoms();
    if scope.is_empty() {
        return Err(Error::Internal("PPL formula without probability atoms".into()));
    }
    scope.check_cap(config.scope_cap)?;
    let alphas = phi.prop_formulas();
    let q = build_q(&alphas, &scope)?;
    Ok((RcofFormula::forall(RcofFormula::implies(q, translate(phi))), scope))
}

/// Validity of a PPL formula: build `Q` over the atoms of `phi`, translate
/// `phi` to `ψ` and decide `∀(Q → ψ)`.
pub fn a_ppl(phi: &PplFormula, config: &BackendConfig) -> Result<DecisionOutcome> {
    let (sentence, _) = validity_sentence(phi, config)?;
    decide(&sentence, config)
}

/// Turns an invalidity witness of `a_ppl(phi)` into a valuation and
/// assignment refuting `phi`, and checks that they do.
pub fn counter_model(phi: &PplFormula, rho: &Assignment) -> Result<(StochasticValuation, Assignment)> {
    let v = valuation_from_assignment(rho, &phi.prop_atoms())?;
    let numbers = Assignment { nums: rho.nums.clone(), formulas: BTreeMap::new() };
    if ppl_sat(&v, &numbers, phi)? {
        return Err(Error::Internal(format!("counter-model satisfies {phi}")));
    }
    Ok((v, numbers))
}
