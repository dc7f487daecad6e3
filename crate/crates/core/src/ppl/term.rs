//! Field terms and assignments.

use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};

use crate::prop::PropFormula;
use crate::rational::format_rational;
use crate::{Error, Rational, Result};

/// A polynomial term over the ordered-field signature.
///
/// Numerals, inverses of numerals and fractions of numerals are abbreviations
/// that always denote a rational; they are stored as [`Term::Const`].
/// `FormulaVar(α)` is the variable `x_α` standing for the probability of `α`;
/// it only appears in terms produced by the translation, never in user terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Rational),
    Var(u32),
    FormulaVar(PropFormula),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn constant(r: Rational) -> Self {
        Term::Const(r)
    }

    pub fn zero() -> Self {
        Term::Const(Rational::zero())
    }

    pub fn one() -> Self {
        Term::Const(crate::rational::int(1))
    }

    pub fn var(k: u32) -> Self {
        Term::Var(k)
    }

    pub fn formula_var(alpha: PropFormula) -> Self {
        Term::FormulaVar(alpha)
    }

    pub fn neg(t: Term) -> Self {
        Term::Neg(Box::new(t))
    }

    pub fn add(a: Term, b: Term) -> Self {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Self {
        Term::add(a, Term::neg(b))
    }

    pub fn mul(a: Term, b: Term) -> Self {
        Term::Mul(Box::new(a), Box::new(b))
    }

    /// Left-nested sum; the empty sum is `0`.
    pub fn sum<I: IntoIterator<Item = Term>>(items: I) -> Self {
        items.into_iter().reduce(Term::add).unwrap_or_else(Term::zero)
    }

    pub fn has_formula_var(&self) -> bool {
        match self {
            Term::FormulaVar(_) => true,
            Term::Const(_) | Term::Var(_) => false,
            Term::Neg(a) => a.has_formula_var(),
            Term::Add(a, b) | Term::Mul(a, b) => a.has_formula_var() || b.has_formula_var(),
        }
    }

    pub(crate) fn collect_vars(&self, nums: &mut std::collections::BTreeSet<u32>, forms: &mut std::collections::BTreeSet<PropFormula>) {
        match self {
            Term::Const(_) => {}
            Term::Var(k) => {
                nums.insert(*k);
            }
            Term::FormulaVar(a) => {
                forms.insert(a.clone());
            }
            Term::Neg(a) => a.collect_vars(nums, forms),
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(nums, forms);
                b.collect_vars(nums, forms);
            }
        }
    }

    /// Evaluates with formula variables read from `rho` as well.
    pub fn eval_extended(&self, rho: &Assignment) -> Rational {
        match self {
            Term::Const(c) => c.clone(),
            Term::Var(k) => rho.num(*k),
            Term::FormulaVar(a) => rho.formula(a),
            Term::Neg(a) => -a.eval_extended(rho),
            Term::Add(a, b) => a.eval_extended(rho) + b.eval_extended(rho),
            Term::Mul(a, b) => a.eval_extended(rho) * b.eval_extended(rho),
        }
    }
}

/// Denotation of a user term under `rho`; formula variables are unbound here.
pub fn eval_term(t: &Term, rho: &Assignment) -> Result<Rational> {
    if let Some(alpha) = first_formula_var(t) {
        return Err(Error::UnboundSymbol(alpha.to_string()));
    }
    Ok(t.eval_extended(rho))
}

fn first_formula_var(t: &Term) -> Option<&PropFormula> {
    match t {
        Term::FormulaVar(a) => Some(a),
        Term::Const(_) | Term::Var(_) => None,
        Term::Neg(a) => first_formula_var(a),
        Term::Add(a, b) | Term::Mul(a, b) => first_formula_var(a).or_else(|| first_formula_var(b)),
    }
}

// Binding levels: sum 0, product 1, unary and atoms 2.
fn write_term(t: &Term, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = match t {
        Term::Add(..) => 0,
        Term::Mul(..) => 1,
        _ => 2,
    };
    if level < min {
        write!(out, "(")?;
    }
    match t {
        Term::Const(c) if c.is_negative() => write!(out, "q({},{})", c.numer(), c.denom())?,
        Term::Const(c) => write!(out, "{}", format_rational(c))?,
        Term::Var(k) => write!(out, "x{k}")?,
        Term::FormulaVar(a) => write!(out, "x[{a}]")?,
        Term::Neg(a) => {
            write!(out, "-")?;
            write_term(a, 2, out)?;
        }
        Term::Add(a, b) => {
            write_term(a, 0, out)?;
            match &**b {
                Term::Neg(inner) => {
                    write!(out, " - ")?;
                    write_term(inner, 1, out)?;
                }
                _ => {
                    write!(out, " + ")?;
                    write_term(b, 1, out)?;
                }
            }
        }
        Term::Mul(a, b) => {
            write_term(a, 1, out)?;
            write!(out, " * ")?;
            write_term(b, 2, out)?;
        }
    }
    if level < min {
        write!(out, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, 0, f)
    }
}

/// Values for the numbered variables `x_k` and the formula variables `x_α`.
/// Unmentioned variables denote `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub nums: BTreeMap<u32, Rational>,
    pub formulas: BTreeMap<PropFormula, Rational>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_num(mut self, k: u32, value: Rational) -> Self {
        self.nums.insert(k, value);
        self
    }

    pub fn set_num(&mut self, k: u32, value: Rational) {
        self.nums.insert(k, value);
    }

    pub fn set_formula(&mut self, alpha: PropFormula, value: Rational) {
        self.formulas.insert(alpha, value);
    }

    pub fn num(&self, k: u32) -> Rational {
        self.nums.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn formula(&self, alpha: &PropFormula) -> Rational {
        self.formulas.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    /// `{"x0": "1/2", "P(B1 & B2)": "1/4", ...}`
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (k, v) in &self.nums {
            map.insert(format!("x{k}"), format_rational(v).into());
        }
        for (a, v) in &self.formulas {
            map.insert(format!("P({a})"), format_rational(v).into());
        }
        serde_json::Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::rational::{int, rat};

    #[test]
    fn eval_examples() {
        let rho = Assignment::new().with_num(0, rat(2, 3));
        assert_eq!(eval_term(&parse_term("3").unwrap(), &rho).unwrap(), int(3));
        assert_eq!(eval_term(&parse_term("1/2").unwrap(), &rho).unwrap(), rat(1, 2));
        assert_eq!(eval_term(&parse_term("q(1,2)").unwrap(), &rho).unwrap(), rat(1, 2));
        assert_eq!(eval_term(&parse_term("x0").unwrap(), &rho).unwrap(), rat(2, 3));
        assert_eq!(eval_term(&parse_term("x0 * 3 - 1").unwrap(), &rho).unwrap(), int(1));
        assert_eq!(eval_term(&parse_term("x7").unwrap(), &rho).unwrap(), int(0));
    }

    #[test]
    fn formula_var_is_unbound() {
        let t = Term::add(Term::one(), Term::formula_var(PropFormula::atom(1)));
        assert!(matches!(eval_term(&t, &Assignment::new()), Err(Error::UnboundSymbol(_))));
    }

    #[test]
    fn printing_round_trips() {
        for s in ["x1 + x2", "x1 - x2", "-x1 * 2", "q(-1,2)", "1/3 * (x0 + 1)", "x0 - (x1 - x2)", "-(x1 + 1)"] {
            assert_eq!(parse_term(s).unwrap().to_string(), s);
        }
    }
}
