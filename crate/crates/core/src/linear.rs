//! Exact linear arithmetic over the rationals: normalized atoms and a
//! Fourier–Motzkin feasibility test for conjunctions, with strict/non-strict
//! bookkeeping and witness recovery.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::rational::{format_rational, int};
use crate::Rational;

/// Default bound on the number of live inequalities during elimination.
pub const DEFAULT_CONSTRAINT_CAP: usize = 50_000;

/// `Σ coeffs[i]·x_i + constant`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearExpr {
    pub coeffs: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

impl LinearExpr {
    pub fn constant(c: Rational) -> Self {
        LinearExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(i: usize) -> Self {
        LinearExpr { coeffs: BTreeMap::from([(i, Rational::one())]), constant: Rational::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(mut self, other: &LinearExpr) -> Self {
        for (i, c) in &other.coeffs {
            let slot = self.coeffs.entry(*i).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                self.coeffs.remove(i);
            }
        }
        self.constant += &other.constant;
        self
    }

    pub fn scale(mut self, k: &Rational) -> Self {
        if k.is_zero() {
            return LinearExpr::default();
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        self
    }

    pub fn neg(self) -> Self {
        self.scale(&int(-1))
    }

    pub fn sub(self, other: &LinearExpr) -> Self {
        self.add(&other.clone().neg())
    }

    /// Missing coordinates of `point` count as 0.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let zero = Rational::zero();
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (i, c)| acc + c * point.get(*i).unwrap_or(&zero))
    }
}

impl fmt::Display for LinearExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in &self.coeffs {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if !c.abs().is_one() {
                write!(f, "{}*", format_rational(&c.abs()))?;
            }
            write!(f, "v{i}")?;
            first = false;
        }
        if first {
            return write!(f, "{}", format_rational(&self.constant));
        }
        if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { "-" } else { "+" };
            write!(f, " {sign} {}", format_rational(&self.constant.abs()))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinRel {
    Eq,
    Lt,
    Le,
}

/// `expr rel 0`, scaled to integer coefficients with gcd 1. Equalities also
/// have a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearAtom {
    pub expr: LinearExpr,
    pub rel: LinRel,
}

impl LinearAtom {
    /// `lhs rel rhs`.
    pub fn new(lhs: LinearExpr, rel: LinRel, rhs: &LinearExpr) -> Self {
        Self::normalized(lhs.sub(rhs), rel)
    }

    pub fn normalized(expr: LinearExpr, rel: LinRel) -> Self {
        let values = || expr.coeffs.values().chain(std::iter::once(&expr.constant));
        let lcm = values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let gcd = values().fold(BigInt::zero(), |g, c| g.gcd(&(c * Rational::from_integer(lcm.clone())).to_integer()));
        let expr = if gcd.is_zero() {
            expr
        } else {
            let mut k = Rational::new(lcm, gcd);
            let flip = rel == LinRel::Eq && expr.coeffs.values().next().is_some_and(|c| c.is_negative());
            if flip {
                k = -k;
            }
            expr.scale(&k)
        };
        LinearAtom { expr, rel }
    }

    pub fn holds(&self, point: &[Rational]) -> bool {
        let v = self.expr.eval(point);
        match self.rel {
            LinRel::Eq => v.is_zero(),
            LinRel::Lt => v.is_negative(),
            LinRel::Le => !v.is_positive(),
        }
    }

    /// The negation as a disjunction of atoms.
    pub fn negate(&self) -> Vec<LinearAtom> {
        let e = &self.expr;
        match self.rel {
            LinRel::Eq => vec![
                Self::normalized(e.clone(), LinRel::Lt),
                Self::normalized(e.clone().neg(), LinRel::Lt),
            ],
            LinRel::Lt => vec![Self::normalized(e.clone().neg(), LinRel::Le)],
            LinRel::Le => vec![Self::normalized(e.clone().neg(), LinRel::Lt)],
        }
    }

    /// `Some(truth)` when the atom mentions no variable.
    pub fn constant_truth(&self) -> Option<bool> {
        self.expr.is_constant().then(|| self.holds(&[]))
    }
}

impl fmt::Display for LinearAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            LinRel::Eq => "=",
            LinRel::Lt => "<",
            LinRel::Le => "<=",
        };
        write!(f, "{} {op} 0", self.expr)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Infeasible,
    /// A point satisfying every atom; coordinates `0..nvars`.
    Feasible(Vec<Rational>),
    /// The elimination exceeded the constraint cap.
    TooLarge(String),
}

// Σ coeffs·x + constant (< or ≤) 0, dense over all variables.
#[derive(Clone, Debug)]
struct Ineq {
    coeffs: Vec<Rational>,
    constant: Rational,
    strict: bool,
}

impl Ineq {
    // scale so the first non-zero coefficient has absolute value 1
    fn normalize(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            if !lead.is_one() {
                for c in &mut self.coeffs {
                    *c /= &lead;
                }
                self.constant /= &lead;
            }
        }
        self
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn constant_holds(&self) -> bool {
        if self.strict {
            self.constant.is_negative()
        } else {
            !self.constant.is_positive()
        }
    }
}

// Keeps the tightest inequality per coefficient vector.
#[derive(Default)]
struct IneqSet {
    map: HashMap<Vec<Rational>, (Rational, bool)>,
}

impl IneqSet {
    fn insert(&mut self, q: Ineq) {
        let q = q.normalize();
        match self.map.get_mut(&q.coeffs) {
            Some((c, strict)) => {
                // Σ a·x < -c: a larger constant is tighter; at equal constants
                // the strict one is
                if q.constant > *c || (q.constant == *c && q.strict && !*strict) {
                    *c = q.constant;
                    *strict = q.strict;
                }
            }
            None => {
                self.map.insert(q.coeffs, (q.constant, q.strict));
            }
        }
    }

    fn into_vec(self) -> Vec<Ineq> {
        let mut v: Vec<Ineq> = self
            .map
            .into_iter()
            .map(|(coeffs, (constant, strict))| Ineq { coeffs, constant, strict })
            .collect();
        // HashMap order is arbitrary; sort for reproducible witnesses
        v.sort_by(|a, b| a.coeffs.cmp(&b.coeffs).then(a.constant.cmp(&b.constant)).then(a.strict.cmp(&b.strict)));
        v
    }
}

/// Decides whether the conjunction of `atoms` has a rational solution over
/// variables `0..nvars`, returning one if so.
///
/// Equalities are solved for one of their variables and substituted away;
/// the remaining inequalities are handled by Fourier–Motzkin elimination.
/// The witness is rebuilt by back-substitution, taking in each variable's
/// feasible interval the midpoint when it is bounded on both sides. A
/// one-sided interval gives its endpoint if closed and the endpoint moved
/// inward by 1 if open; an unconstrained variable gets 0.
///
/// When elimination would exceed `constraint_cap` constraints the question
/// goes to an exact simplex instead, whose witness is a vertex of the
/// relaxed region rather than the point described above.
pub fn feasible(atoms: &[LinearAtom], nvars: usize, constraint_cap: usize) -> Feasibility {
    if let Some(bad) = atoms.iter().flat_map(|a| a.expr.coeffs.keys()).find(|i| **i >= nvars) {
        return Feasibility::TooLarge(format!("variable v{bad} out of range"));
    }
    match fourier_motzkin(atoms, nvars, constraint_cap) {
        Feasibility::TooLarge(_) => crate::simplex::feasible(atoms, nvars, crate::simplex::DEFAULT_PIVOT_CAP),
        done => done,
    }
}

pub(crate) fn fourier_motzkin(atoms: &[LinearAtom], nvars: usize, constraint_cap: usize) -> Feasibility {
    let dense = |e: &LinearExpr| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); nvars];
        for (i, c) in &e.coeffs {
            v[*i] = c.clone();
        }
        v
    };

    let mut eqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut ineqs: Vec<Ineq> = Vec::new();
    for a in atoms {
        let coeffs = dense(&a.expr);
        let constant = a.expr.constant.clone();
        match a.rel {
            LinRel::Eq => eqs.push((coeffs, constant)),
            LinRel::Lt => ineqs.push(Ineq { coeffs, constant, strict: true }),
            LinRel::Le => ineqs.push(Ineq { coeffs, constant, strict: false }),
        }
    }

    // Gaussian substitution: x_v = -(constant + Σ_{i≠v} a_i x_i) / a_v
    let mut substitutions: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
    while let Some((coeffs, constant)) = eqs.pop() {
        let Some(v) = coeffs.iter().position(|c| !c.is_zero()) else {
            if !constant.is_zero() {
                return Feasibility::Infeasible;
            }
            continue;
        };
        let a = coeffs[v].clone();
        let mut sub_coeffs: Vec<Rational> = coeffs.iter().map(|c| -c / &a).collect();
        sub_coeffs[v] = Rational::zero();
        let sub_const = -&constant / &a;
        let apply = |cs: &mut Vec<Rational>, k: &mut Rational| {
            let f = std::mem::replace(&mut cs[v], Rational::zero());
            if !f.is_zero() {
                for (c, s) in cs.iter_mut().zip(&sub_coeffs) {
                    *c += &f * s;
                }
                *k += &f * &sub_const;
            }
        };
        for (cs, k) in &mut eqs {
            apply(cs, k);
        }
        for q in &mut ineqs {
            apply(&mut q.coeffs, &mut q.constant);
        }
        substitutions.push((v, sub_coeffs, sub_const));
    }

    let mut set = IneqSet::default();
    for q in ineqs {
        if q.is_trivial() {
            if !q.constant_holds() {
                return Feasibility::Infeasible;
            }
        } else {
            set.insert(q);
        }
    }
    let mut live = set.into_vec();

    // Fourier–Motzkin; `history` keeps the constraints on each eliminated
    // variable for back-substitution
    let mut history: Vec<(usize, Vec<Ineq>)> = Vec::new();
    let mut remaining: Vec<usize> = (0..nvars).filter(|v| live.iter().any(|q| !q.coeffs[*v].is_zero())).collect();
    while !remaining.is_empty() {
        // cheapest variable first
        let (pick, _) = remaining
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let pos = live.iter().filter(|q| q.coeffs[v].is_positive()).count() as i64;
                let neg = live.iter().filter(|q| q.coeffs[v].is_negative()).count() as i64;
                (k, pos * neg - pos - neg)
            })
            .min_by_key(|&(_, cost)| cost)
            .expect("non-empty");
        let v = remaining.swap_remove(pick);
        let (with, without): (Vec<Ineq>, Vec<Ineq>) = live.into_iter().partition(|q| !q.coeffs[v].is_zero());
        let (uppers, lowers): (Vec<&Ineq>, Vec<&Ineq>) = with.iter().partition(|q| q.coeffs[v].is_positive());
        if without.len() + uppers.len() * lowers.len() > constraint_cap {
            return Feasibility::TooLarge(format!("more than {constraint_cap} constraints during elimination"));
        }
        let mut next = IneqSet::default();
        for q in without {
            next.insert(q);
        }
        for u in &uppers {
            for l in &lowers {
                let a = &u.coeffs[v];
                let b = -&l.coeffs[v];
                let coeffs: Vec<Rational> = u.coeffs.iter().zip(&l.coeffs).map(|(x, y)| x * &b + y * a).collect();
                let constant = &u.constant * &b + &l.constant * a;
                let q = Ineq { coeffs, constant, strict: u.strict || l.strict };
                if q.is_trivial() {
                    if !q.constant_holds() {
                        return Feasibility::Infeasible;
                    }
                } else {
                    next.insert(q);
                }
                if next.map.len() > constraint_cap {
                    return Feasibility::TooLarge(format!("more than {constraint_cap} constraints during elimination"));
                }
            }
        }
        history.push((v, with));
        live = next.into_vec();
        remaining.retain(|w| live.iter().any(|q| !q.coeffs[*w].is_zero()));
    }
    debug_assert!(live.is_empty());

    let mut point = vec![Rational::zero(); nvars];
    for (v, constraints) in history.iter().rev() {
        point[*v] = choose(*v, constraints, &point);
    }
    for (v, coeffs, constant) in substitutions.iter().rev() {
        let value = coeffs.iter().zip(&point).fold(constant.clone(), |acc, (c, x)| acc + c * x);
        point[*v] = value;
    }
    Feasibility::Feasible(point)
}

fn choose(v: usize, constraints: &[Ineq], point: &[Rational]) -> Rational {
    // each constraint reads a·x_v + rest (< or ≤) 0
    let mut lower: Option<(Rational, bool)> = None;
    let mut upper: Option<(Rational, bool)> = None;
    for q in constraints {
        let a = &q.coeffs[v];
        let rest = q
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v)
            .fold(q.constant.clone(), |acc, (i, c)| acc + c * &point[i]);
        let bound = -rest / a;
        if a.is_positive() {
            if upper.as_ref().map_or(true, |(u, s)| bound < *u || (bound == *u && q.strict && !s)) {
                upper = Some((bound, q.strict));
            }
        } else if lower.as_ref().map_or(true, |(l, s)| bound > *l || (bound == *l && q.strict && !s)) {
            lower = Some((bound, q.strict));
        }
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / int(2),
        (Some((l, false)), None) => l,
        (Some((l, true)), None) => l + int(1),
        (None, Some((u, false))) => u,
        (None, Some((u, true))) => u - int(1),
        (None, None) => Rational::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn e(coeffs: &[(usize, i64)], c: i64) -> LinearExpr {
        LinearExpr {
            coeffs: coeffs.iter().map(|(i, a)| (*i, int(*a))).collect(),
            constant: int(c),
        }
    }

    fn atom(coeffs: &[(usize, i64)], c: i64, rel: LinRel) -> LinearAtom {
        LinearAtom::normalized(e(coeffs, c), rel)
    }

    fn check(atoms: &[LinearAtom], n: usize) -> Option<Vec<Rational>> {
        match feasible(atoms, n, DEFAULT_CONSTRAINT_CAP) {
            Feasibility::Feasible(p) => {
                assert!(atoms.iter().all(|a| a.holds(&p)), "bad witness {p:?}");
                Some(p)
            }
            Feasibility::Infeasible => None,
            Feasibility::TooLarge(m) => panic!("{m}"),
        }
    }

    #[test]
    fn normalization() {
        let a = LinearAtom::normalized(
            LinearExpr { coeffs: BTreeMap::from([(0, rat(-2, 3)), (1, rat(4, 3))]), constant: rat(2, 1) },
            LinRel::Eq,
        );
        assert_eq!(a.expr, e(&[(0, 1), (1, -2)], -3));
        let b = LinearAtom::normalized(e(&[(0, -4)], 2), LinRel::Lt);
        assert_eq!(b.expr, e(&[(0, -2)], 1));
    }

    #[test]
    fn strictness_matters() {
        // x < 1 and x > 1 - 0 with x ≥ 1
        assert!(check(&[atom(&[(0, 1)], -1, LinRel::Lt), atom(&[(0, -1)], 1, LinRel::Le)], 1).is_none());
        assert!(check(&[atom(&[(0, 1)], -1, LinRel::Le), atom(&[(0, -1)], 1, LinRel::Le)], 1).is_some());
        // 0 < x < 1 has a midpoint witness
        let p = check(&[atom(&[(0, -1)], 0, LinRel::Lt), atom(&[(0, 1)], -1, LinRel::Lt)], 1).unwrap();
        assert_eq!(p[0], rat(1, 2));
    }

    #[test]
    fn one_sided_bounds() {
        // closed rays give their endpoint, open rays step inward by 1
        assert_eq!(check(&[atom(&[(0, -1)], 1, LinRel::Le)], 1).unwrap()[0], int(1));
        assert_eq!(check(&[atom(&[(0, -1)], 1, LinRel::Lt)], 1).unwrap()[0], int(2));
        assert_eq!(check(&[atom(&[(0, 1)], -1, LinRel::Le)], 1).unwrap()[0], int(1));
        assert_eq!(check(&[atom(&[(0, 1)], -1, LinRel::Lt)], 1).unwrap()[0], int(0));
        assert_eq!(check(&[], 1).unwrap()[0], int(0));
    }

    #[test]
    fn equalities_substitute() {
        // x + y = 1, x - y = 0 → x = y = 1/2
        let p = check(&[atom(&[(0, 1), (1, 1)], -1, LinRel::Eq), atom(&[(0, 1), (1, -1)], 0, LinRel::Eq)], 2).unwrap();
        assert_eq!(p, [rat(1, 2), rat(1, 2)]);
        assert!(check(&[atom(&[(0, 1)], -1, LinRel::Eq), atom(&[(0, 1)], -2, LinRel::Eq)], 1).is_none());
    }

    #[test]
    fn simplex_with_objective() {
        // y0 + y1 = 1, y ≥ 0, y0 ≥ 1/2 ... encoded with integers: 2y0 ≥ 1, y1 > 1/2 impossible
        let atoms = [
            atom(&[(0, 1), (1, 1)], -1, LinRel::Eq),
            atom(&[(0, -1)], 0, LinRel::Le),
            atom(&[(1, -1)], 0, LinRel::Le),
            atom(&[(0, -2)], 1, LinRel::Le),
            atom(&[(1, -2)], 1, LinRel::Lt),
        ];
        assert!(check(&atoms, 2).is_none());
        assert!(check(&atoms[..4], 2).is_some());
    }

    #[test]
    fn negation_is_complement() {
        for rel in [LinRel::Eq, LinRel::Lt, LinRel::Le] {
            let a = atom(&[(0, 1)], -1, rel);
            for x in [int(0), int(1), int(2)] {
                let p = [x];
                assert_ne!(a.holds(&p), a.negate().iter().any(|n| n.holds(&p)));
            }
        }
    }

    #[test]
    fn display() {
        assert_eq!(atom(&[(0, 1), (2, -3)], 4, LinRel::Le).to_string(), "v0 - 3*v2 + 4 <= 0");
    }
}
