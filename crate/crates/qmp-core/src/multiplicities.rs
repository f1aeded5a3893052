//! Weight multiplicities, Kronecker and Littlewood–Richardson coefficients.
//!
//! Highest-weight multiplicities are recovered from weight multiplicities by the
//! finite-difference stencil `Π_{α>0} (1 − e^{−α})`. Kronecker coefficients use
//! that stencil on three-way contingency counts; an independent oracle computes
//! them from symmetric-group characters (Murnaghan–Nakayama rule).

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::counting::{contingency_count, kostant_partition};
use crate::error::{Error, Result};
use crate::lattice::{positive_roots, GroupSpec, Weight, YoungDiagram};

/// Largest `k` accepted by [`kronecker_bruteforce`].
pub const ORACLE_MAX_K: usize = 12;

/// Signed shifts `γ` with coefficients `c_γ` such that `m_K(λ) = Σ c_γ m_T(λ + γ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDifferenceStencil {
    pub terms: Vec<(Weight, i64)>,
    /// Number of terms before merging, `2^{#positive roots}`.
    pub raw_terms: usize,
}

impl FiniteDifferenceStencil {
    pub fn apply<F>(&self, lambda: &Weight, f: F) -> BigInt
    where
        F: Fn(&Weight) -> BigInt,
    {
        self.terms.iter().map(|(g, c)| f(&lambda.add(g)) * BigInt::from(*c)).sum()
    }
}

/// Expands the product over positive roots and merges like terms.
pub fn stencil(group: &GroupSpec) -> FiniteDifferenceStencil {
    let len = group.weight_len();
    let roots: Vec<Weight> = positive_roots(group).iter().map(|r| r.vector(group)).collect();
    let mut acc: BTreeMap<Weight, i64> = BTreeMap::new();
    acc.insert(Weight::zero(len), 1);
    for a in &roots {
        let mut next = acc.clone();
        for (g, c) in &acc {
            *next.entry(g.add(a)).or_insert(0) -= c;
        }
        acc = next;
    }
    let terms = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    FiniteDifferenceStencil { terms, raw_terms: 1usize << roots.len() }
}

/// Permutations of `0..n` together with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if cur.len() == n {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| cur[i] > cur[j]).count();
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Multiplicity of weight `omega` in the `U(d)`/`SU(d)` irrep `lambda` (Kostant's formula).
pub fn irrep_weight_multiplicity(group: &GroupSpec, lambda: &YoungDiagram, omega: &Weight) -> Result<BigUint> {
    if group.factors.len() != 1 {
        return Err(Error::Invalid("Kostant's formula here takes a single factor".into()));
    }
    let d = group.factors[0].dim;
    if omega.coords.len() != d {
        return Err(Error::Invalid("weight length does not match group".into()));
    }
    let Ok(l) = lambda.padded(d) else {
        return Ok(BigUint::zero());
    };
    let l: Vec<i64> = l.iter().map(|&x| x as i64).collect();
    let mut w = omega.coords.clone();
    let diff = l.iter().sum::<i64>() - w.iter().sum::<i64>();
    if diff != 0 {
        if group.factors[0].kind == crate::lattice::GroupKind::SpecialUnitary && diff % d as i64 == 0 {
            for x in w.iter_mut() {
                *x += diff / d as i64;
            }
        } else {
            return Ok(BigUint::zero());
        }
    }
    let rho: Vec<i64> = (0..d).map(|i| (d - 1 - i) as i64).collect();
    let lr: Vec<i64> = l.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let mut total = BigInt::zero();
    for (perm, sign) in signed_permutations(d) {
        let target: Vec<i64> = (0..d).map(|i| lr[perm[i]] - rho[i] - w[i]).collect();
        let phi = kostant_partition(group, &Weight::new(target))?;
        total += BigInt::from_biguint(if sign > 0 { Sign::Plus } else { Sign::Minus }, phi);
    }
    to_nonnegative(total, &format!("{lambda} at {omega:?}"))
}

fn to_nonnegative(v: BigInt, at: &str) -> Result<BigUint> {
    if v.is_negative() {
        return Err(Error::NegativeMultiplicity { value: v.to_string(), at: at.to_string() });
    }
    Ok(v.to_biguint().expect("nonnegative"))
}

/// Applies the stencil to a weight-multiplicity function at a dominant weight.
pub fn highest_weight_multiplicities<F>(weight_mult: F, group: &GroupSpec, lambda: &Weight) -> Result<BigUint>
where
    F: Fn(&Weight) -> BigInt,
{
    let st = stencil(group);
    to_nonnegative(st.apply(lambda, weight_mult), &lambda.display(group))
}

fn row_vec(y: &YoungDiagram, n: usize) -> Vec<i64> {
    y.padded(n).expect("row count checked").iter().map(|&x| x as i64).collect()
}

/// Kronecker coefficient `g_{α,β,γ}` from contingency counts.
pub fn kronecker(alpha: &YoungDiagram, beta: &YoungDiagram, gamma: &YoungDiagram) -> BigUint {
    let k = alpha.boxes();
    if beta.boxes() != k || gamma.boxes() != k {
        return BigUint::zero();
    }
    if k == 0 {
        return BigUint::from(1u32);
    }
    let dims = [alpha.num_rows(), beta.num_rows(), gamma.num_rows()];
    let group = GroupSpec::u(&dims);
    let st = stencil(&group);
    let base: Vec<i64> = [row_vec(alpha, dims[0]), row_vec(beta, dims[1]), row_vec(gamma, dims[2])].concat();
    let (o1, o2) = (dims[0], dims[0] + dims[1]);
    let total: BigInt = st
        .terms
        .par_iter()
        .map(|(g, c)| {
            let w: Vec<i64> = base.iter().zip(&g.coords).map(|(a, b)| a + b).collect();
            if w.iter().any(|&x| x < 0) {
                return BigInt::zero();
            }
            BigInt::from(contingency_count(k as i64, &w[..o1], &w[o1..o2], &w[o2..])) * BigInt::from(*c)
        })
        .sum();
    total.to_biguint().expect("Kronecker coefficients are nonnegative")
}

/// Padding size used by [`littlewood_richardson`]: the least `k` with `k − |x| ≥ x_1` for all three diagrams.
pub fn lr_padding(alpha: &YoungDiagram, beta: &YoungDiagram, lambda: &YoungDiagram) -> u32 {
    [alpha, beta, lambda].iter().map(|y| y.boxes() + y.first_row()).max().unwrap_or(0)
}

/// `c^{α,β}_λ` through the padded Kronecker identity.
pub fn littlewood_richardson(alpha: &YoungDiagram, beta: &YoungDiagram, lambda: &YoungDiagram) -> BigUint {
    littlewood_richardson_padded(alpha, beta, lambda, lr_padding(alpha, beta, lambda)).unwrap_or_default()
}

/// Same as [`littlewood_richardson`] with an explicit padding `k`.
pub fn littlewood_richardson_padded(alpha: &YoungDiagram, beta: &YoungDiagram, lambda: &YoungDiagram, k: u32) -> Result<BigUint> {
    if lambda.boxes() != alpha.boxes() + beta.boxes() {
        return Ok(BigUint::zero());
    }
    if k < lr_padding(alpha, beta, lambda) {
        return Err(Error::Invalid(format!("padding {k} is too small")));
    }
    Ok(kronecker(&alpha.with_first_row(k)?, &beta.with_first_row(k)?, &lambda.with_first_row(k)?))
}

/// `g_{kα,kβ,kγ}` for `k = 1..=k_max`.
pub fn stretch(alpha: &YoungDiagram, beta: &YoungDiagram, gamma: &YoungDiagram, k_max: u32) -> Vec<BigUint> {
    (1..=k_max).map(|k| kronecker(&alpha.scaled(k), &beta.scaled(k), &gamma.scaled(k))).collect()
}

/// Symmetric-group characters by the Murnaghan–Nakayama rule on beta-sets.
#[derive(Default)]
pub struct CharacterTable {
    memo: HashMap<(Vec<i64>, Vec<u32>), i128>,
}

impl CharacterTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `χ^λ(μ)` where `μ` is a cycle type of the same size.
    pub fn character(&mut self, lambda: &YoungDiagram, mu: &[u32]) -> i128 {
        let n = lambda.num_rows();
        let beta: Vec<i64> = lambda.rows().iter().enumerate().map(|(i, &r)| r as i64 + (n - 1 - i) as i64).collect();
        self.chi(beta, mu)
    }

    fn chi(&mut self, beta: Vec<i64>, mu: &[u32]) -> i128 {
        if mu.is_empty() {
            return 1;
        }
        let key = (beta, mu.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let beta = &key.0;
        let r = mu[0] as i64;
        let mut total = 0i128;
        for (idx, &b) in beta.iter().enumerate() {
            let nb = b - r;
            if nb < 0 || beta.contains(&nb) {
                continue;
            }
            let between = beta.iter().filter(|&&x| x > nb && x < b).count();
            let mut next = beta.clone();
            next[idx] = nb;
            next.sort_unstable_by(|a, b| b.cmp(a));
            let v = self.chi(next, &mu[1..]);
            total += if between % 2 == 0 { v } else { -v };
        }
        self.memo.insert(key, total);
        total
    }
}

/// Size of the conjugacy class of cycle type `mu` in `S_k`.
pub fn class_size(mu: &[u32]) -> BigInt {
    let k: u32 = mu.iter().sum();
    let mut den = BigInt::from(1);
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in mu {
        *counts.entry(p).or_insert(0) += 1;
    }
    for (&i, &m) in &counts {
        den *= BigInt::from(i).pow(m) * crate::exact::factorial(m as usize);
    }
    crate::exact::factorial(k as usize) / den
}

/// Kronecker coefficient from characters: `(1/k!) Σ_μ |C_μ| χ_α(μ) χ_β(μ) χ_γ(μ)`.
pub fn kronecker_bruteforce(alpha: &YoungDiagram, beta: &YoungDiagram, gamma: &YoungDiagram) -> Result<BigUint> {
    let k = alpha.boxes() as usize;
    if k > ORACLE_MAX_K {
        return Err(Error::OracleBound { k, max: ORACLE_MAX_K });
    }
    if beta.boxes() as usize != k || gamma.boxes() as usize != k {
        return Ok(BigUint::zero());
    }
    let mut table = CharacterTable::new();
    let mut total = BigInt::zero();
    for mu in YoungDiagram::partitions(k as u32, k) {
        let c = table.character(alpha, mu.rows()) * table.character(beta, mu.rows()) * table.character(gamma, mu.rows());
        total += class_size(mu.rows()) * BigInt::from(c);
    }
    let (q, r) = (total.clone() / crate::exact::factorial(k), total % crate::exact::factorial(k));
    if !r.is_zero() {
        return Err(Error::Invalid("character inner product is not an integer".into()));
    }
    to_nonnegative(q, "character inner product")
}

/// Kronecker coefficients of all triples of partitions of `k` with bounded row counts.
#[derive(Clone, Debug)]
pub struct MultiplicityTable {
    pub group: GroupSpec,
    pub entries: BTreeMap<Vec<YoungDiagram>, BigUint>,
}

pub fn kronecker_table(k: u32, rows: [usize; 3]) -> MultiplicityTable {
    let mut entries = BTreeMap::new();
    for a in YoungDiagram::partitions(k, rows[0]) {
        for b in YoungDiagram::partitions(k, rows[1]) {
            for c in YoungDiagram::partitions(k, rows[2]) {
                let g = kronecker(&a, &b, &c);
                if !g.is_zero() {
                    entries.insert(vec![a.clone(), b.clone(), c.clone()], g);
                }
            }
        }
    }
    MultiplicityTable { group: GroupSpec::u(&rows), entries }
}

/// Converts a small big integer to `u64`, saturating.
pub fn as_u64(v: &BigUint) -> u64 {
    v.to_u64().unwrap_or(u64::MAX)
}
