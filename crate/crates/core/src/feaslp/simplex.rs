//! Dense two-phase simplex over exact rationals.
//!
//! Standard equality form: maximize c·x subject to A x = b, x ≥ 0.
//! Entering and leaving variables follow Bland's rule, so the method
//! terminates without perturbation even on degenerate problems.

use num_traits::{Signed, Zero};

use crate::exactnum::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

const MAX_PIVOTS: usize = 1_000_000;

struct Tableau {
    /// m constraint rows, each with `width` coefficients followed by the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs d_j = c_j − c_B·T_j, and −c_B·b in the last slot.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let prow = self.rows[pr].clone();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r != pr {
                eliminate(row, &prow, pc);
            }
        }
        eliminate(&mut self.obj, &prow, pc);
        self.basis[pr] = pc;
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = (0..=self.width)
            .map(|j| if j < self.width { cost[j].clone() } else { Rational::zero() })
            .collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[r]) {
                if !t.is_zero() {
                    *o -= cb * t;
                }
            }
        }
        self.obj = obj;
    }

    /// Runs primal simplex on the current objective row; `false` if unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let mut pivots = 0usize;
        loop {
            let Some(pc) = (0..self.width).find(|&j| allowed[j] && self.obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[pc].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[pc];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((pr, _)) = best else {
                return false;
            };
            self.pivot(pr, pc);
            pivots += 1;
            assert!(pivots < MAX_PIVOTS, "simplex exceeded {MAX_PIVOTS} pivots");
        }
    }

    fn value(&self) -> Rational {
        -self.obj[self.width].clone()
    }
}

fn eliminate(row: &mut [Rational], prow: &[Rational], pc: usize) {
    let factor = row[pc].clone();
    if factor.is_zero() {
        return;
    }
    for (v, p) in row.iter_mut().zip(prow) {
        if !p.is_zero() {
            *v -= &factor * p;
        }
    }
}

/// Maximizes `c·x` subject to `a x = b`, `x ≥ 0`.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let nv = c.len();
    let width = nv + m;
    let mut rows = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        assert_eq!(row.len(), nv, "constraint row length");
        let flip = rhs.is_negative();
        let mut t: Vec<Rational> = Vec::with_capacity(width + 1);
        t.extend(row.iter().map(|v| if flip { -v } else { v.clone() }));
        t.extend((0..m).map(|_| Rational::zero()));
        t.push(if flip { -rhs } else { rhs.clone() });
        rows.push(t);
    }
    for (r, row) in rows.iter_mut().enumerate() {
        row[nv + r] = Rational::from_integer(1.into());
    }
    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis: (nv..width).collect(),
        width,
    };

    // Phase I: maximize −Σ artificials.
    let mut cost1 = vec![Rational::zero(); width];
    for c in cost1.iter_mut().skip(nv) {
        *c = Rational::from_integer((-1).into());
    }
    tab.set_objective(&cost1);
    let all = vec![true; width];
    tab.optimize(&all);
    if tab.value().is_negative() {
        return LpOutcome::Infeasible;
    }

    // Drive artificials out of the basis; rows where that is impossible are redundant.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= nv {
            if let Some(pc) = (0..nv).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, pc);
            } else {
                tab.rows.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase II.
    let mut cost2 = vec![Rational::zero(); width];
    cost2[..nv].clone_from_slice(c);
    tab.set_objective(&cost2);
    let allowed: Vec<bool> = (0..width).map(|j| j < nv).collect();
    if !tab.optimize(&allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); nv];
    for (row, &bv) in tab.rows.iter().zip(&tab.basis) {
        if bv < nv {
            x[bv] = row[width].clone();
        }
    }
    LpOutcome::Optimal { value: tab.value(), x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_problem_with_slacks() {
        // max 2x + 3y, 2x + y ≤ 18, 6x + 5y ≤ 60, 2x + 5y ≤ 40.
        let a = vec![
            ints(&[2, 1, 1, 0, 0]),
            ints(&[6, 5, 0, 1, 0]),
            ints(&[2, 5, 0, 0, 1]),
        ];
        let out = maximize(&a, &ints(&[18, 60, 40]), &ints(&[2, 3, 0, 0, 0]));
        let LpOutcome::Optimal { value, x } = out else { panic!("{out:?}") };
        assert_eq!(value, int(28));
        assert_eq!(&x[..2], &ints(&[5, 6])[..]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![ints(&[1, 1]), ints(&[1, 1])];
        assert_eq!(maximize(&a, &ints(&[1, 2]), &ints(&[1, 0])), LpOutcome::Infeasible);
        let a = vec![ints(&[1, -1])];
        assert_eq!(maximize(&a, &ints(&[0]), &ints(&[1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let a = vec![ints(&[1, 1]), ints(&[-2, -2]), ints(&[1, -1])];
        let out = maximize(&a, &ints(&[1, -2, 0]), &ints(&[1, 0]));
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: rat(1, 2),
                x: vec![rat(1, 2), rat(1, 2)]
            }
        );
    }
}
