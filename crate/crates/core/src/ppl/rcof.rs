//! Quantifier-free formulas over the ordered-field language, the Q-formula
//! constructor and the translation from PPL.

use std::collections::BTreeSet;
use std::fmt;

use super::{Assignment, Cmp, PplFormula, Term};
use crate::prop::{dnf, phi, PropFormula, Scope};
use crate::Result;

/// A first-order formula over field terms. `ForAll` is the universal closure
/// of its body over every free variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RcofFormula {
    True,
    False,
    Eq(Term, Term),
    Lt(Term, Term),
    /// `t₁ ≤ t₂`, shorthand for `(t₁ < t₂) ∨ (t₁ = t₂)`.
    Le(Term, Term),
    Not(Box<RcofFormula>),
    Implies(Box<RcofFormula>, Box<RcofFormula>),
    And(Vec<RcofFormula>),
    Or(Vec<RcofFormula>),
    ForAll(Box<RcofFormula>),
}

impl RcofFormula {
    pub fn implies(a: RcofFormula, b: RcofFormula) -> Self {
        RcofFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: RcofFormula) -> Self {
        RcofFormula::Not(Box::new(a))
    }

    pub fn forall(a: RcofFormula) -> Self {
        RcofFormula::ForAll(Box::new(a))
    }

    /// The body under any leading universal closures.
    pub fn matrix(&self) -> &RcofFormula {
        match self {
            RcofFormula::ForAll(b) => b.matrix(),
            other => other,
        }
    }

    pub fn eval(&self, rho: &Assignment) -> bool {
        match self {
            RcofFormula::True => true,
            RcofFormula::False => false,
            RcofFormula::Eq(a, b) => a.eval_extended(rho) == b.eval_extended(rho),
            RcofFormula::Lt(a, b) => a.eval_extended(rho) < b.eval_extended(rho),
            RcofFormula::Le(a, b) => a.eval_extended(rho) <= b.eval_extended(rho),
            RcofFormula::Not(a) => !a.eval(rho),
            RcofFormula::Implies(a, b) => !a.eval(rho) || b.eval(rho),
            RcofFormula::And(xs) => xs.iter().all(|x| x.eval(rho)),
            RcofFormula::Or(xs) => xs.iter().any(|x| x.eval(rho)),
            // an assignment fixes every variable; the closure is evaluated
            // pointwise
            RcofFormula::ForAll(b) => b.eval(rho),
        }
    }

    /// Free numbered variables and formula variables.
    pub fn free_vars(&self) -> (BTreeSet<u32>, BTreeSet<PropFormula>) {
        let mut nums = BTreeSet::new();
        let mut forms = BTreeSet::new();
        self.visit_terms(&mut |t| t.collect_vars(&mut nums, &mut forms));
        (nums, forms)
    }

    pub(crate) fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            RcofFormula::True | RcofFormula::False => {}
            RcofFormula::Eq(a, b) | RcofFormula::Lt(a, b) | RcofFormula::Le(a, b) => {
                f(a);
                f(b);
            }
            RcofFormula::Not(a) | RcofFormula::ForAll(a) => a.visit_terms(f),
            RcofFormula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            RcofFormula::And(xs) | RcofFormula::Or(xs) => xs.iter().for_each(|x| x.visit_terms(f)),
        }
    }
}

impl fmt::Display for RcofFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, xs: &[RcofFormula], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            RcofFormula::True => write!(f, "true"),
            RcofFormula::False => write!(f, "false"),
            RcofFormula::Eq(a, b) => write!(f, "{a} = {b}"),
            RcofFormula::Lt(a, b) => write!(f, "{a} < {b}"),
            RcofFormula::Le(a, b) => write!(f, "{a} <= {b}"),
            RcofFormula::Not(a) => write!(f, "!({a})"),
            RcofFormula::Implies(a, b) => write!(f, "({a}) -> ({b})"),
            RcofFormula::And(xs) if xs.is_empty() => write!(f, "true"),
            RcofFormula::Or(xs) if xs.is_empty() => write!(f, "false"),
            RcofFormula::And(xs) => list(f, xs, "&"),
            RcofFormula::Or(xs) => list(f, xs, "|"),
            RcofFormula::ForAll(b) => write!(f, "forall. {b}"),
        }
    }
}

/// The Q-formula for `alphas` over `scope`:
///
/// 1. `0 ≤ x_{φ^U} ≤ 1` for every `U ⊆ scope`,
/// 2. `Σ_U x_{φ^U} = 1`,
/// 3. `x_{α_j} = Σ_ℓ x_{α_jℓ}` for every `j`, where the `α_jℓ` are the
///    model-enumeration DNF conjuncts of `α_j` over `scope`.
///
/// Each `α_jℓ` is itself some `φ^U`, so conjunct 3 shares its variables with
/// conjuncts 1 and 2.
pub fn build_q(alphas: &[PropFormula], scope: &Scope) -> Result<RcofFormula> {
    scope.require_non_empty()?;
    let points = (0..scope.subset_count())
        .map(|u| phi(scope, u).map(Term::formula_var))
        .collect::<Result<Vec<_>>>()?;
    let mut conjuncts = Vec::with_capacity(2 * points.len() + 1 + alphas.len());
    for x in &points {
        conjuncts.push(RcofFormula::Le(Term::zero(), x.clone()));
        conjuncts.push(RcofFormula::Le(x.clone(), Term::one()));
    }
    conjuncts.push(RcofFormula::Eq(Term::sum(points.iter().cloned()), Term::one()));
    for alpha in alphas {
        let disjuncts = dnf(alpha, scope)?;
        let sum = Term::sum(disjuncts.iter().map(|c| Term::formula_var(c.to_formula())));
        conjuncts.push(RcofFormula::Eq(Term::formula_var(alpha.clone()), sum));
    }
    Ok(RcofFormula::And(conjuncts))
}

/// Replaces every `⟨α⟩ ∘ t` by `x_α ∘ t`, keeping the implication structure.
pub fn translate(phi: &PplFormula) -> RcofFormula {
    match phi {
        PplFormula::Atom(a) => {
            let x = Term::formula_var(a.alpha.clone());
            match a.cmp {
                Cmp::Eq => RcofFormula::Eq(x, a.term.clone()),
                Cmp::Lt => RcofFormula::Lt(x, a.term.clone()),
            }
        }
        PplFormula::Implies(a, b) => RcofFormula::implies(translate(a), translate(b)),
    }
}
