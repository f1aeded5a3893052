//! Exact two-phase simplex method with Bland's rule.
//!
//! Problems take the form `minimize c·x subject to A x ≥ b` with free
//! variables `x`. Sizes are small here, so a dense rational tableau is enough.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Q;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<Q>,
    pub value: Q,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (x, y) in self.rows[i].iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn optimize(&mut self, cost: &[Q], allowed: usize) -> Result<()> {
        let ncols = allowed;
        loop {
            let mut enter = None;
            for j in 0..ncols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.rows[i][j].is_zero() && !cost[b].is_zero() {
                        red -= &cost[b] * &self.rows[i][j];
                    }
                }
                if red.is_negative() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(j) = enter else { return Ok(()) };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][j].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][j];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return Err(Error::Unbounded) };
            self.pivot(r, j);
        }
    }
}

/// Minimizes `c·x` subject to `a x ≥ b` over free real `x`.
pub fn minimize(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> Result<LpSolution> {
    let n = c.len();
    let m = a.len();
    // Columns: x⁺ (n), x⁻ (n), surplus (m), artificial (m).
    let nstruct = 2 * n + m;
    let ncols = nstruct + m;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let mut row = vec![Q::zero(); ncols];
        for j in 0..n {
            row[j] = ai[j].clone();
            row[n + j] = -ai[j].clone();
        }
        row[2 * n + i] = -Q::one();
        let mut r = bi.clone();
        if r.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            r = -r;
        }
        row[nstruct + i] = Q::one();
        rows.push(row);
        rhs.push(r);
    }
    let mut t = Tableau { rows, rhs, basis: (nstruct..ncols).collect() };

    let mut phase1 = vec![Q::zero(); ncols];
    for x in phase1.iter_mut().skip(nstruct) {
        *x = Q::one();
    }
    t.optimize(&phase1, ncols)?;
    let infeas: Q = t.basis.iter().zip(&t.rhs).filter(|(&bv, _)| bv >= nstruct).map(|(_, r)| r.clone()).sum();
    if infeas.is_positive() {
        return Err(Error::Infeasible);
    }
    // Drive remaining artificials out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= nstruct {
            if let Some(j) = (0..nstruct).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
                i += 1;
            } else {
                t.rows.remove(i);
                t.rhs.remove(i);
                t.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    let mut phase2 = vec![Q::zero(); ncols];
    for j in 0..n {
        phase2[j] = c[j].clone();
        phase2[n + j] = -c[j].clone();
    }
    t.optimize(&phase2, nstruct)?;

    let mut z = vec![Q::zero(); nstruct];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < nstruct {
            z[bv] = t.rhs[i].clone();
        }
    }
    let x: Vec<Q> = (0..n).map(|j| &z[j] - &z[n + j]).collect();
    let value = x.iter().zip(c).fold(Q::zero(), |acc, (xi, ci)| acc + xi * ci);
    Ok(LpSolution { x, value })
}

/// Finds any `x` with `a x ≥ b`.
pub fn feasible_point(a: &[Vec<Q>], b: &[Q], n: usize) -> Result<Vec<Q>> {
    minimize(&vec![Q::zero(); n], a, b).map(|s| s.x)
}
