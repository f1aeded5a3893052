//! Exact lattice-point counting: vector partition functions, Kostant partition
//! functions and three-way contingency tables.
//!
//! All counts come from memoized dynamic programming. Contingency tables have
//! a dedicated slice recursion that runs in `u128` and falls back to big
//! integers when a product or sum would overflow.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use crate::error::{Error, Result};
use crate::exact::{qi, Q};
use crate::lattice::{positive_roots, GroupSpec, Weight};
use crate::lp;

/// Counts `#{x ∈ Z^s_{≥0} : Σ x_i columns[i] = target}`.
#[derive(Clone, Debug)]
pub struct VectorPartitionProblem {
    columns: Vec<Vec<i64>>,
    target: Vec<i64>,
    /// Distinct columns with their multiplicities, in processing order.
    groups: Vec<(Vec<i64>, usize)>,
    /// Integer functional that is strictly positive on every column.
    functional: Vec<i64>,
}

impl VectorPartitionProblem {
    pub fn new(columns: Vec<Vec<i64>>, target: Vec<i64>) -> Result<Self> {
        let dim = target.len();
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Invalid("column length does not match target".into()));
        }
        let functional = positive_functional(&columns, dim)?;
        let mut groups: Vec<(Vec<i64>, usize)> = Vec::new();
        for c in &columns {
            match groups.iter_mut().find(|(g, _)| g == c) {
                Some((_, m)) => *m += 1,
                None => groups.push((c.clone(), 1)),
            }
        }
        Ok(VectorPartitionProblem { columns, target, groups, functional })
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn target(&self) -> &[i64] {
        &self.target
    }

    pub fn with_target(&self, target: Vec<i64>) -> Self {
        VectorPartitionProblem { target, ..self.clone() }
    }

    /// A functional `y` with `y·c ≥ 1` for every column.
    pub fn functional(&self) -> &[i64] {
        &self.functional
    }

    fn level(&self, v: &[i64]) -> i64 {
        v.iter().zip(&self.functional).map(|(a, b)| a * b).sum()
    }

    pub fn count(&self) -> BigUint {
        self.count_target(&self.target)
    }

    fn count_target(&self, target: &[i64]) -> BigUint {
        if self.groups.is_empty() {
            return if target.iter().all(|&x| x == 0) { BigUint::one() } else { BigUint::zero() };
        }
        let mut memo = HashMap::new();
        self.rec(0, target.to_vec(), &mut memo)
    }

    fn rec(&self, g: usize, res: Vec<i64>, memo: &mut HashMap<(usize, Vec<i64>), BigUint>) -> BigUint {
        let lvl = self.level(&res);
        if lvl < 0 {
            return BigUint::zero();
        }
        if lvl == 0 {
            return if res.iter().all(|&x| x == 0) { BigUint::one() } else { BigUint::zero() };
        }
        let (col, mult) = &self.groups[g];
        let step = self.level(col);
        if g + 1 == self.groups.len() {
            // Residual must be a nonnegative multiple of the last column.
            if lvl % step != 0 {
                return BigUint::zero();
            }
            let t = lvl / step;
            if res.iter().zip(col).all(|(r, c)| *r == t * c) {
                return multiset_ways(t as u64, *mult);
            }
            return BigUint::zero();
        }
        let key = (g, res);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let res = &key.1;
        let mut total = BigUint::zero();
        let mut cur = res.clone();
        for t in 0..=(lvl / step) {
            let sub = self.rec(g + 1, cur.clone(), memo);
            if !sub.is_zero() {
                total += sub * multiset_ways(t as u64, *mult);
            }
            for (x, c) in cur.iter_mut().zip(col) {
                *x -= c;
            }
        }
        memo.insert(key, total.clone());
        total
    }
}

/// Number of ways to split `t` among `m` identical columns: `C(t+m−1, m−1)`.
fn multiset_ways(t: u64, m: usize) -> BigUint {
    if m == 1 {
        return BigUint::one();
    }
    let mut r = BigUint::one();
    for i in 1..m as u64 {
        r = r * (t + i) / i;
    }
    r
}

fn positive_functional(columns: &[Vec<i64>], dim: usize) -> Result<Vec<i64>> {
    if columns.is_empty() {
        return Ok(vec![0; dim]);
    }
    let a: Vec<Vec<Q>> = columns.iter().map(|c| c.iter().map(|&x| qi(x)).collect()).collect();
    let b = vec![qi(1); columns.len()];
    let y = lp::feasible_point(&a, &b, dim).map_err(|_| Error::NotPointed)?;
    let ints = crate::exact::primitive(&y);
    let y: Vec<i64> = ints.iter().map(|z| i64::try_from(z).map_err(|_| Error::NotPointed)).collect::<Result<_>>()?;
    // Scaling can only keep `y·c` positive; verify anyway.
    if columns.iter().any(|c| c.iter().zip(&y).map(|(a, b)| a * b).sum::<i64>() <= 0) {
        return Err(Error::NotPointed);
    }
    Ok(y)
}

pub fn vector_partition_count(p: &VectorPartitionProblem) -> BigUint {
    p.count()
}

/// `φ_A(k·y)` for the problem's target `y`.
pub fn dilated_count(p: &VectorPartitionProblem, k: u64) -> BigUint {
    let t: Vec<i64> = p.target.iter().map(|x| x * k as i64).collect();
    p.count_target(&t)
}

/// Number of ways to write `target` as a sum of positive roots.
pub fn kostant_partition(group: &GroupSpec, target: &Weight) -> Result<BigUint> {
    let cols: Vec<Vec<i64>> = positive_roots(group).iter().map(|r| r.vector(group).coords).collect();
    if target.coords.len() != group.weight_len() {
        return Err(Error::Invalid("target length does not match group".into()));
    }
    if cols.is_empty() {
        return Ok(if target.coords.iter().all(|&x| x == 0) { BigUint::one() } else { BigUint::zero() });
    }
    Ok(VectorPartitionProblem::new(cols, target.coords.clone())?.count())
}

/// Number of three-way tables `x ∈ Z^{a×b×c}_{≥0}` with the given one-dimensional marginals.
pub fn contingency_count(k: i64, wa: &[i64], wb: &[i64], wc: &[i64]) -> BigUint {
    let ok = |w: &[i64]| w.iter().all(|&x| x >= 0) && w.iter().sum::<i64>() == k;
    if k < 0 || !ok(wa) || !ok(wb) || !ok(wc) {
        return BigUint::zero();
    }
    let mut axes: Vec<Vec<i64>> = [wa, wb, wc]
        .iter()
        .map(|w| {
            let mut v: Vec<i64> = w.iter().copied().filter(|&x| x > 0).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
        .collect();
    // Longest axis becomes the slice axis.
    axes.sort_by_key(|v| v.len());
    let (a, b, c) = (&axes[0], &axes[1], &axes[2]);
    if a.len() == 2 && b.len() == 2 && c.len() == 2 {
        if let Some(v) = count_222(a, b, c) {
            return BigUint::from(v);
        }
    }
    if let Some(v) = Contingency::<u128>::new().count(a, b, c) {
        return BigUint::from(v);
    }
    Contingency::<BigUint>::new().count(a, b, c).expect("big integers do not overflow")
}

/// Two-by-two tables with row sums `(r0, r1)` and column sums `(s0, s1)`.
#[inline]
fn n22(r0: i64, r1: i64, s0: i64, s1: i64) -> i64 {
    if r0 < 0 || r1 < 0 || s0 < 0 || s1 < 0 || r0 + r1 != s0 + s1 {
        return 0;
    }
    let lo = 0.max(r0 - s1);
    let hi = r0.min(s0);
    (hi - lo + 1).max(0)
}

/// Allocation-free loop for `2×2×2` tables, the shape behind two-row Kronecker coefficients.
fn count_222(a: &[i64], b: &[i64], c: &[i64]) -> Option<u128> {
    let mut total: u128 = 0;
    for r0 in 0..=c[0].min(a[0]) {
        let r1 = c[0] - r0;
        if r1 > a[1] {
            continue;
        }
        let mut inner: u128 = 0;
        for s0 in 0..=c[0].min(b[0]) {
            let s1 = c[0] - s0;
            let x = n22(r0, r1, s0, s1);
            if x == 0 {
                continue;
            }
            let y = n22(a[0] - r0, a[1] - r1, b[0] - s0, b[1] - s1);
            inner += (x * y) as u128;
        }
        total = total.checked_add(inner)?;
    }
    Some(total)
}

trait Count: Clone + Zero + One + CheckedAdd + CheckedMul + From<u64> {}
impl Count for u128 {}
impl Count for BigUint {}

struct Contingency<T> {
    slices: HashMap<(usize, Vec<i64>, Vec<i64>), T>,
    two_way: HashMap<(Vec<i64>, Vec<i64>), T>,
    c: Vec<i64>,
}

impl<T: Count> Contingency<T> {
    fn new() -> Self {
        Contingency { slices: HashMap::new(), two_way: HashMap::new(), c: vec![] }
    }

    fn count(&mut self, a: &[i64], b: &[i64], c: &[i64]) -> Option<T> {
        self.c = c.to_vec();
        if c.is_empty() {
            return Some(T::one());
        }
        self.slice(0, a.to_vec(), b.to_vec())
    }

    fn slice(&mut self, j: usize, ra: Vec<i64>, rb: Vec<i64>) -> Option<T> {
        if j + 1 == self.c.len() {
            return self.n2(&ra, &rb);
        }
        let mut ka = ra.clone();
        let mut kb = rb.clone();
        ka.sort_unstable();
        kb.sort_unstable();
        let key = (j, ka, kb);
        if let Some(v) = self.slices.get(&key) {
            return Some(v.clone());
        }
        let cj = self.c[j];
        let rs = bounded_compositions(cj, &ra);
        let ss = bounded_compositions(cj, &rb);
        let mut total = T::zero();
        for r in &rs {
            let na: Vec<i64> = ra.iter().zip(r).map(|(x, y)| x - y).collect();
            for s in &ss {
                let here = self.n2(r, s)?;
                if here.is_zero() {
                    continue;
                }
                let nb: Vec<i64> = rb.iter().zip(s).map(|(x, y)| x - y).collect();
                let rest = self.slice(j + 1, na.clone(), nb)?;
                if rest.is_zero() {
                    continue;
                }
                total = total.checked_add(&here.checked_mul(&rest)?)?;
            }
        }
        self.slices.insert(key, total.clone());
        Some(total)
    }

    /// Two-way tables with row sums `r` and column sums `s`.
    fn n2(&mut self, r: &[i64], s: &[i64]) -> Option<T> {
        let r: Vec<i64> = r.iter().copied().filter(|&x| x > 0).collect();
        let s: Vec<i64> = s.iter().copied().filter(|&x| x > 0).collect();
        if r.iter().sum::<i64>() != s.iter().sum::<i64>() {
            return Some(T::zero());
        }
        if r.len() <= 1 || s.len() <= 1 {
            return Some(T::one());
        }
        if r.len() == 2 && s.len() == 2 {
            let n = r[0] + r[1];
            let lo = 0.max(r[0] + s[0] - n);
            let hi = r[0].min(s[0]);
            return Some(T::from((hi - lo + 1).max(0) as u64));
        }
        let mut kr = r.clone();
        let mut ks = s.clone();
        kr.sort_unstable();
        ks.sort_unstable();
        if kr.len() > ks.len() {
            std::mem::swap(&mut kr, &mut ks);
        }
        let key = (kr, ks);
        if let Some(v) = self.two_way.get(&key) {
            return Some(v.clone());
        }
        let (kr, ks) = (&key.0, &key.1);
        let mut total = T::zero();
        for x in bounded_compositions(kr[0], ks) {
            let rest: Vec<i64> = ks.iter().zip(&x).map(|(a, b)| a - b).collect();
            let sub = self.n2(&kr[1..], &rest)?;
            total = total.checked_add(&sub)?;
        }
        self.two_way.insert(key, total.clone());
        Some(total)
    }
}

/// All `x` with `0 ≤ x_i ≤ bound_i` and `Σ x = total`.
pub fn bounded_compositions(total: i64, bound: &[i64]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut suffix = vec![0i64; bound.len() + 1];
    for i in (0..bound.len()).rev() {
        suffix[i] = suffix[i + 1] + bound[i];
    }
    fn rec(i: usize, left: i64, bound: &[i64], suffix: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == bound.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let lo = 0.max(left - suffix[i + 1]);
        let hi = bound[i].min(left);
        for x in lo..=hi {
            cur.push(x);
            rec(i + 1, left - x, bound, suffix, cur, out);
            cur.pop();
        }
    }
    if total >= 0 && total <= suffix[0] {
        rec(0, total, bound, &suffix, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_partitions() {
        let p = VectorPartitionProblem::new(vec![vec![1, -1]], vec![3, -3]).unwrap();
        assert_eq!(p.count(), BigUint::from(1u32));
        let p = VectorPartitionProblem::new(vec![vec![1, -1]], vec![3, 3]).unwrap();
        assert_eq!(p.count(), BigUint::zero());
        assert!(matches!(VectorPartitionProblem::new(vec![vec![1], vec![-1]], vec![0]), Err(Error::NotPointed)));
        assert!(matches!(VectorPartitionProblem::new(vec![vec![0, 0]], vec![0, 0]), Err(Error::NotPointed)));
    }

    #[test]
    fn repeated_columns() {
        // Three copies of (1): compositions of 4 into 3 parts.
        let p = VectorPartitionProblem::new(vec![vec![1], vec![1], vec![1]], vec![4]).unwrap();
        assert_eq!(p.count(), BigUint::from(15u32));
    }

    #[test]
    fn contingency_small() {
        assert_eq!(contingency_count(5, &[5], &[5], &[5]), BigUint::one());
        // Two units in complementary cells of the 2×2×2 cube: 8/2 placements.
        assert_eq!(contingency_count(2, &[1, 1], &[1, 1], &[1, 1]), BigUint::from(4u32));
        // All mass on the first A-slice leaves a 2×2 permutation-matrix count.
        assert_eq!(contingency_count(2, &[2, 0], &[1, 1], &[1, 1]), BigUint::from(2u32));
        assert_eq!(contingency_count(2, &[2, 0], &[1, 1], &[1, 2]), BigUint::zero());
        assert_eq!(contingency_count(2, &[-1, 3], &[1, 1], &[1, 1]), BigUint::zero());
    }

    #[test]
    fn compositions() {
        assert_eq!(bounded_compositions(2, &[1, 1, 1]).len(), 3);
        assert_eq!(bounded_compositions(4, &[1, 1]).len(), 0);
    }
}
