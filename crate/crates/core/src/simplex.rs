//! Exact rational simplex for conjunctions of linear atoms. Used when
//! Fourier–Motzkin elimination would exceed its constraint cap.
//!
//! Each atom `a·x + c ∘ 0` becomes a row over `x = x⁺ - x⁻` and a shared
//! slack `t ≥ 0` that every strict row must leave room for:
//!
//! ```text
//! a·x⁺ - a·x⁻ (+ t if strict) (≤ or =) -c,    t ≤ 1
//! ```
//!
//! Phase 1 finds a feasible point of the relaxation; phase 2 maximizes `t`.
//! The conjunction is satisfiable iff phase 1 succeeds and, when there are
//! strict atoms, the optimum `t` is positive. Bland's rule keeps both phases
//! from cycling.

use num::{Signed, Zero};

use crate::linear::{Feasibility, LinRel, LinearAtom};
use crate::Rational;

pub const DEFAULT_PIVOT_CAP: usize = 200_000;

struct Tableau {
    // rows[i] has `cols` coefficients followed by the right-hand side
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Capped,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.rows[r][c].clone();
        let nz: Vec<usize> = (0..=self.cols).filter(|j| !self.rows[r][*j].is_zero()).collect();
        for &j in &nz {
            self.rows[r][j] /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `objective · y` over columns `allowed`.
    fn optimize(&mut self, objective: &[Rational], allowed: impl Fn(usize) -> bool, cap: usize) -> Step {
        loop {
            if self.pivots >= cap {
                return Step::Capped;
            }
            // reduced cost c_j - Σ_i c_{basis(i)} T[i][j]; Bland: first improving column
            let entering = (0..self.cols).filter(|j| allowed(*j) && !self.basis.contains(j)).find(|&j| {
                let mut r = objective[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &objective[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        r -= cb * &row[j];
                    }
                }
                r.is_positive()
            });
            let Some(c) = entering else { return Step::Optimal };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return Step::Unbounded };
            self.pivot(r, c);
        }
    }

    fn value(&self, col: usize) -> Rational {
        self.basis.iter().position(|b| *b == col).map_or_else(Rational::zero, |i| self.rhs(i).clone())
    }
}

pub fn feasible(atoms: &[LinearAtom], nvars: usize, pivot_cap: usize) -> Feasibility {
    let strict = atoms.iter().any(|a| a.rel == LinRel::Lt);
    let t = 2 * nvars;
    let inequalities = atoms.iter().filter(|a| a.rel != LinRel::Eq).count() + 1;
    let slack0 = t + 1;
    let art0 = slack0 + inequalities;
    let m = atoms.len() + 1;
    let cols = art0 + m;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = slack0;
    let mut push_row = |mut row: Vec<Rational>, slack_col: Option<usize>, rows: &mut Vec<Vec<Rational>>| {
        if let Some(s) = slack_col {
            row[s] = Rational::from_integer(1.into());
        }
        if row[cols].is_negative() {
            for v in &mut row {
                *v = -&*v;
            }
        }
        let i = rows.len();
        match slack_col.filter(|s| row[*s].is_positive()) {
            Some(s) => basis.push(s),
            None => {
                row[art0 + i] = Rational::from_integer(1.into());
                basis.push(art0 + i);
            }
        }
        rows.push(row);
    };
    for a in atoms {
        let mut row = vec![Rational::zero(); cols + 1];
        for (k, c) in &a.expr.coeffs {
            row[*k] = c.clone();
            row[nvars + *k] = -c;
        }
        if a.rel == LinRel::Lt {
            row[t] = Rational::from_integer(1.into());
        }
        row[cols] = -&a.expr.constant;
        let slack_col = (a.rel != LinRel::Eq).then(|| {
            slack += 1;
            slack - 1
        });
        push_row(row, slack_col, &mut rows);
    }
    let mut row = vec![Rational::zero(); cols + 1];
    row[t] = Rational::from_integer(1.into());
    row[cols] = Rational::from_integer(1.into());
    push_row(row, Some(slack), &mut rows);

    let mut tab = Tableau { rows, basis, cols, pivots: 0 };
    let is_art = |j: usize| j >= art0;

    let phase1: Vec<Rational> = (0..cols).map(|j| if is_art(j) { -Rational::from_integer(1.into()) } else { Rational::zero() }).collect();
    match tab.optimize(&phase1, |_| true, pivot_cap) {
        Step::Optimal => {}
        Step::Unbounded => unreachable!("phase 1 is bounded by zero"),
        Step::Capped => return Feasibility::TooLarge(format!("more than {pivot_cap} simplex pivots")),
    }
    if (0..tab.rows.len()).any(|i| is_art(tab.basis[i]) && tab.rhs(i).is_positive()) {
        return Feasibility::Infeasible;
    }
    // drive zero-valued artificials out where possible
    for i in 0..tab.rows.len() {
        if is_art(tab.basis[i]) {
            if let Some(c) = (0..art0).find(|j| !tab.rows[i][*j].is_zero()) {
                tab.pivot(i, c);
            }
        }
    }

    if strict {
        let mut phase2 = vec![Rational::zero(); cols];
        phase2[t] = Rational::from_integer(1.into());
        match tab.optimize(&phase2, |j| !is_art(j), pivot_cap) {
            Step::Optimal => {}
            Step::Unbounded => unreachable!("t is bounded by 1"),
            Step::Capped => return Feasibility::TooLarge(format!("more than {pivot_cap} simplex pivots")),
        }
        if !tab.value(t).is_positive() {
            return Feasibility::Infeasible;
        }
    }
    let point: Vec<Rational> = (0..nvars).map(|k| tab.value(k) - tab.value(nvars + k)).collect();
    if atoms.iter().all(|a| a.holds(&point)) {
        Feasibility::Feasible(point)
    } else {
        Feasibility::TooLarge("simplex point fails verification".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{fourier_motzkin, LinearExpr};
    use crate::rational::rat;
    use std::collections::BTreeMap;

    fn atom(coeffs: &[(usize, i64)], c: i64, rel: LinRel) -> LinearAtom {
        LinearAtom {
            expr: LinearExpr {
                coeffs: coeffs.iter().map(|(k, v)| (*k, rat(*v, 1))).collect::<BTreeMap<_, _>>(),
                constant: rat(c, 1),
            },
            rel,
        }
    }

    #[test]
    fn small_systems() {
        // 0 < x < 1
        let open = [atom(&[(0, -1)], 0, LinRel::Lt), atom(&[(0, 1)], -1, LinRel::Lt)];
        assert!(matches!(feasible(&open, 1, 1000), Feasibility::Feasible(_)));
        // x < 0, x ≥ 0
        let empty = [atom(&[(0, 1)], 0, LinRel::Lt), atom(&[(0, -1)], 0, LinRel::Le)];
        assert_eq!(feasible(&empty, 1, 1000), Feasibility::Infeasible);
        // x + y = 1, x - y = 3, y ≤ -1 gives x = 2, y = -1
        let eqs = [
            atom(&[(0, 1), (1, 1)], -1, LinRel::Eq),
            atom(&[(0, 1), (1, -1)], -3, LinRel::Eq),
            atom(&[(1, 1)], 1, LinRel::Le),
        ];
        assert_eq!(feasible(&eqs, 2, 1000), Feasibility::Feasible(vec![rat(2, 1), rat(-1, 1)]));
    }

    #[test]
    fn agrees_with_elimination() {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let n = r.gen_range(1..=3);
            let atoms: Vec<LinearAtom> = (0..r.gen_range(1..=5))
                .map(|_| {
                    let coeffs: Vec<(usize, i64)> = (0..n).map(|k| (k, r.gen_range(-2..=2))).filter(|(_, c)| *c != 0).collect();
                    let rel = [LinRel::Eq, LinRel::Lt, LinRel::Le][r.gen_range(0..3)];
                    atom(&coeffs, r.gen_range(-2..=2), rel)
                })
                .collect();
            let a = matches!(feasible(&atoms, n, 10_000), Feasibility::Feasible(_));
            let b = matches!(fourier_motzkin(&atoms, n, 10_000), Feasibility::Feasible(_));
            assert_eq!(a, b, "{atoms:?}");
        }
    }
}
