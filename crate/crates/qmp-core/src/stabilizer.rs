//! Stabilizer states in the discrete phase space `Z_d^{2n}`.
//!
//! A stabilizer state class is an isotropic submodule `M ⊆ V = Z_d^{2n}`. Vectors are laid out
//! particle by particle as `(q_1, p_1, q_2, p_2, …)` with symplectic form
//! `ω(v, v′) = Σ_i p_i q_i′ − q_i p_i′`. Submodules are kept in Howell normal form, which is
//! canonical over `Z_d` for composite `d` as well.
//!
//! Entropies are exact elements of the rational span of `{ln p}` for the primes `p | d`,
//! so comparisons stay exact even when cardinalities are not powers of `d`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_q, lcm_z, qi, Q, Z};

/// Subset of parties as a bit mask, bit `i` for party `i` (0-based).
pub type Subset = u32;

/// Parties of a subset in increasing order, 1-based.
pub fn subset_parties(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s >> i & 1 == 1).map(|i| i as usize + 1).collect()
}

/// Subset from 1-based party labels.
pub fn subset_of(parties: &[usize]) -> Subset {
    parties.iter().fold(0, |acc, &p| acc | 1 << (p - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseSpace {
    pub n: usize,
    pub d: i64,
}

impl PhaseSpace {
    pub fn new(n: usize, d: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Invalid(format!("local dimension {d} < 2")));
        }
        if n == 0 || n > 16 {
            return Err(Error::Invalid(format!("unsupported particle count {n}")));
        }
        Ok(PhaseSpace { n, d })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn cardinality(&self) -> BigUint {
        BigUint::from(self.d as u64).pow(self.dim() as u32)
    }

    pub fn all(&self) -> Subset {
        (1u32 << self.n) - 1
    }

    /// `ω(v, w)` reduced mod `d`.
    pub fn omega(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.n {
            s += v[2 * i + 1] * w[2 * i] - v[2 * i] * w[2 * i + 1];
        }
        s.rem_euclid(self.d)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

/// Howell normal form of the row span over `Z_d`.
fn howell(mut rows: Vec<Vec<i64>>, cols: usize, d: i64) -> Vec<Vec<i64>> {
    let md = |x: i64| x.rem_euclid(d);
    for r in rows.iter_mut() {
        r.iter_mut().for_each(|x| *x = md(*x));
    }
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let mut r = 0;
    for c in 0..cols {
        if r >= rows.len() {
            break;
        }
        for i in r + 1..rows.len() {
            let b = rows[i][c];
            if b == 0 {
                continue;
            }
            let a = rows[r][c];
            let (g, s, t) = ext_gcd(a, b);
            let (u, v) = (-b / g, a / g);
            let (ra, rb) = (rows[r].clone(), rows[i].clone());
            for k in 0..cols {
                rows[r][k] = md(s * ra[k] + t * rb[k]);
                rows[i][k] = md(u * ra[k] + v * rb[k]);
            }
        }
        let a = rows[r][c];
        if a == 0 {
            continue;
        }
        let g = a.gcd(&d);
        let unit = (1..d).find(|&u| u.gcd(&d) == 1 && md(u * a) == g).expect("a unit maps a to gcd(a, d)");
        rows[r].iter_mut().for_each(|x| *x = md(*x * unit));
        let p = rows[r][c];
        let pivot = rows[r].clone();
        for row in rows.iter_mut().take(r) {
            let q = row[c] / p;
            if q != 0 {
                for k in 0..cols {
                    row[k] = md(row[k] - q * pivot[k]);
                }
            }
        }
        if p != 1 {
            let extra: Vec<i64> = pivot.iter().map(|&x| md(x * (d / p))).collect();
            if extra.iter().any(|&x| x != 0) {
                rows.push(extra);
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// A submodule of `Z_d^{2n}` in Howell normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Submodule {
    pub space: PhaseSpace,
    rows: Vec<Vec<i64>>,
}

impl Submodule {
    pub fn span(space: PhaseSpace, generators: &[Vec<i64>]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != space.dim()) {
            return Err(Error::Invalid(format!("generator of length {} in Z_d^{}", g.len(), space.dim())));
        }
        Ok(Submodule { space, rows: howell(generators.to_vec(), space.dim(), space.d) })
    }

    pub fn zero(space: PhaseSpace) -> Self {
        Submodule { space, rows: Vec::new() }
    }

    pub fn full(space: PhaseSpace) -> Self {
        let n = space.dim();
        let gens: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        Submodule { space, rows: howell(gens, n, space.d) }
    }

    /// Canonical generators (rows of the Howell form).
    pub fn generators(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn cardinality(&self) -> BigUint {
        let d = self.space.d;
        self.rows.iter().fold(BigUint::one(), |acc, row| {
            let p = row.iter().find(|&&x| x != 0).copied().expect("nonzero row");
            acc * BigUint::from((d / p) as u64)
        })
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let d = self.space.d;
        let mut v: Vec<i64> = v.iter().map(|x| x.rem_euclid(d)).collect();
        for row in &self.rows {
            let c = row.iter().position(|&x| x != 0).expect("nonzero row");
            if v[c] % row[c] != 0 {
                return false;
            }
            let q = v[c] / row[c];
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x - q * y).rem_euclid(d);
            }
        }
        v.iter().all(|&x| x == 0)
    }

    pub fn is_isotropic(&self) -> bool {
        self.rows.iter().all(|a| self.rows.iter().all(|b| self.space.omega(a, b) == 0))
    }

    /// Isotropic with `|M| = d^n`, i.e. `M = M^ω`.
    pub fn is_lagrangian(&self) -> bool {
        self.is_isotropic() && self.cardinality() == BigUint::from(self.space.d as u64).pow(self.space.n as u32)
    }

    pub fn symplectic_complement(&self) -> Submodule {
        symplectic_complement(self)
    }

    /// Elements supported on the parties in `parties`.
    pub fn restrict(&self, parties: Subset) -> Submodule {
        restrict(self, parties)
    }

    /// Image under the projection onto the parties in `parties`, as a submodule of their phase space.
    pub fn project(&self, parties: Subset) -> Submodule {
        let idx = coordinate_indices(self.space.n, parties);
        let space = PhaseSpace { n: idx.len() / 2, d: self.space.d };
        let gens: Vec<Vec<i64>> = self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect();
        Submodule { space, rows: howell(gens, space.dim(), space.d) }
    }
}

fn coordinate_indices(n: usize, parties: Subset) -> Vec<usize> {
    (0..n).filter(|i| parties >> i & 1 == 1).flat_map(|i| [2 * i, 2 * i + 1]).collect()
}

/// `M^ω = { v : ω(v, m) = 0 for all m ∈ M }`.
pub fn symplectic_complement(m: &Submodule) -> Submodule {
    let space = m.space;
    let n2 = space.dim();
    let k = m.rows.len();
    // v ↦ ω(v, g) has coefficient −p_i(g) at q_i and q_i(g) at p_i.
    let rows: Vec<Vec<i64>> = (0..n2)
        .map(|coord| {
            let mut row: Vec<i64> = m
                .rows
                .iter()
                .map(|g| {
                    let i = coord / 2;
                    if coord % 2 == 0 {
                        -g[2 * i + 1]
                    } else {
                        g[2 * i]
                    }
                })
                .collect();
            row.extend((0..n2).map(|j| (j == coord) as i64));
            row
        })
        .collect();
    let h = howell(rows, k + n2, space.d);
    let gens: Vec<Vec<i64>> = h.into_iter().filter(|r| r[..k].iter().all(|&x| x == 0)).map(|r| r[k..].to_vec()).collect();
    Submodule { space, rows: howell(gens, n2, space.d) }
}

/// `M_I = M ∩ V_I`.
pub fn restrict(m: &Submodule, parties: Subset) -> Submodule {
    let space = m.space;
    let n2 = space.dim();
    let inside = coordinate_indices(space.n, parties);
    let outside: Vec<usize> = (0..n2).filter(|i| !inside.contains(i)).collect();
    let order: Vec<usize> = outside.iter().chain(&inside).copied().collect();
    let permuted: Vec<Vec<i64>> = m.rows.iter().map(|r| order.iter().map(|&i| r[i]).collect()).collect();
    let h = howell(permuted, n2, space.d);
    let k = outside.len();
    let gens: Vec<Vec<i64>> = h
        .into_iter()
        .filter(|r| r[..k].iter().all(|&x| x == 0))
        .map(|r| {
            let mut v = vec![0; n2];
            for (pos, &i) in order.iter().enumerate() {
                v[i] = r[pos];
            }
            v
        })
        .collect();
    Submodule { space, rows: howell(gens, n2, space.d) }
}

fn prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d % p == 0 {
            out.push(p);
            while d % p == 0 {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Exact element `Σ_p c_p ln p` of the rational span of logarithms of primes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogValue {
    terms: BTreeMap<u64, Q>,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue::default()
    }

    /// `ln m` for an integer whose prime factors are among `primes`.
    pub fn ln_of(m: &BigUint, primes: &[u64]) -> Self {
        let mut m = m.clone();
        let mut terms = BTreeMap::new();
        for &p in primes {
            let bp = BigUint::from(p);
            let mut e = 0i64;
            while !m.is_zero() && (&m % &bp).is_zero() {
                m /= &bp;
                e += 1;
            }
            if e != 0 {
                terms.insert(p, qi(e));
            }
        }
        assert!(m.is_one(), "cardinality has a prime factor outside the given set");
        LogValue { terms }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = LogValue::zero();
        for (p, v) in &self.terms {
            out.add_term(*p, v * c);
        }
        out
    }

    fn add_term(&mut self, p: u64, c: Q) {
        let e = self.terms.entry(p).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact sign, comparing `Π p^{c_p L}` against 1 for a common denominator `L`.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let l = self.terms.values().fold(Z::one(), |acc, c| lcm_z(&acc, c.denom()));
        let mut pos = BigUint::one();
        let mut neg = BigUint::one();
        for (p, c) in &self.terms {
            let e = (c * Q::from(l.clone())).to_integer();
            let ex = e.abs().to_u32().expect("small exponent");
            let f = BigUint::from(*p).pow(ex);
            if e.is_positive() {
                pos *= f;
            } else {
                neg *= f;
            }
        }
        pos.cmp(&neg)
    }

    /// Value in units of `ln d` when it is a rational multiple of `ln d`.
    pub fn in_log_d(&self, d: i64) -> Option<Q> {
        if self.terms.is_empty() {
            return Some(Q::zero());
        }
        let unit = LogValue::ln_of(&BigUint::from(d as u64), &prime_factors(d as u64));
        let (p0, c0) = self.terms.iter().next().expect("nonempty");
        let ratio = c0 / unit.terms.get(p0)?;
        (unit.scale(&ratio) == *self).then_some(ratio)
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(p, c)| crate::exact::q_to_f64(c) * (*p as f64).ln()).sum()
    }

    /// Value in units of `ln d` as a float.
    pub fn to_f64_log_d(&self, d: i64) -> f64 {
        self.to_f64() / (d as f64).ln()
    }

    /// Exact string in `ln d` units when rational, otherwise a combination of `log_d p`.
    pub fn display_log_d(&self, d: i64) -> String {
        match self.in_log_d(d) {
            Some(q) => fmt_q(&q),
            None => self
                .terms.iter().map(|(p, c)| format!("{}*log_{d}({p})", fmt_q(c))).collect::<Vec<_>>().join(" + "),
        }
    }
}

impl std::ops::Add for &LogValue {
    type Output = LogValue;
    fn add(self, o: &LogValue) -> LogValue {
        let mut out = self.clone();
        for (p, c) in &o.terms {
            out.add_term(*p, c.clone());
        }
        out
    }
}

impl std::ops::Sub for &LogValue {
    type Output = LogValue;
    fn sub(self, o: &LogValue) -> LogValue {
        self + &o.scale(&qi(-1))
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

/// Entropies of all marginals, in natural-log coefficients; `S_∅ = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EntropyVector {
    pub n: usize,
    pub d: i64,
    pub values: BTreeMap<Subset, LogValue>,
}

impl EntropyVector {
    pub fn get(&self, s: Subset) -> LogValue {
        self.values.get(&s).cloned().unwrap_or_default()
    }

    /// `S_I` in units of `log d` when rational.
    pub fn in_log_d(&self, s: Subset) -> Option<Q> {
        self.get(s).in_log_d(self.d)
    }

    /// Stable key for deduplication: values in subset order.
    fn key(&self) -> Vec<(Subset, Vec<(u64, Q)>)> {
        self.values.iter().map(|(s, v)| (*s, v.terms.iter().map(|(p, c)| (*p, c.clone())).collect())).collect()
    }
}

/// `S_I = |I| log d − log |M_I|` for every nonempty `I`.
pub fn entropy_vector(m: &Submodule) -> Result<EntropyVector> {
    if !m.is_isotropic() {
        return Err(Error::Invalid("submodule is not isotropic".into()));
    }
    let primes = prime_factors(m.space.d as u64);
    let lnd = LogValue::ln_of(&BigUint::from(m.space.d as u64), &primes);
    let mut values = BTreeMap::new();
    for s in 1..=m.space.all() {
        let size = qi(s.count_ones() as i64);
        let v = &lnd.scale(&size) - &LogValue::ln_of(&restrict(m, s).cardinality(), &primes);
        values.insert(s, v);
    }
    Ok(EntropyVector { n: m.space.n, d: m.space.d, values })
}

/// Shannon entropies `H(X_I) = log |π_I(M^ω)|` of the uniform distribution on `M^ω`.
pub fn classical_model_entropies(m: &Submodule) -> Result<EntropyVector> {
    if !m.is_isotropic() {
        return Err(Error::Invalid("submodule is not isotropic".into()));
    }
    let primes = prime_factors(m.space.d as u64);
    let comp = m.symplectic_complement();
    let values = (1..=m.space.all()).map(|s| (s, LogValue::ln_of(&comp.project(s).cardinality(), &primes))).collect();
    Ok(EntropyVector { n: m.space.n, d: m.space.d, values })
}

fn is_prime(d: i64) -> bool {
    d >= 2 && (2..).take_while(|p| p * p <= d).all(|p| d % p != 0)
}

/// Default bound on `d^{2n}` for enumeration.
pub const ENUMERATION_BOUND: u64 = 4096;

/// All isotropic subspaces of `F_d^{2n}` with at most `max_card` elements, each once, in
/// reduced echelon form. Requires prime `d` and `d^{2n} ≤` [`ENUMERATION_BOUND`].
pub fn enumerate_isotropic(n: usize, d: i64, max_card: u64) -> Result<impl Iterator<Item = Submodule>> {
    enumerate_isotropic_bounded(n, d, max_card, ENUMERATION_BOUND)
}

pub fn enumerate_isotropic_bounded(n: usize, d: i64, max_card: u64, bound: u64) -> Result<impl Iterator<Item = Submodule>> {
    let space = PhaseSpace::new(n, d)?;
    if !is_prime(d) {
        return Err(Error::Invalid(format!("enumeration needs a prime local dimension, got {d}")));
    }
    let total = (d as u64).checked_pow(2 * n as u32);
    if total.map_or(true, |t| t > bound) {
        return Err(Error::EnumerationBound(format!("d^(2n) = {d}^{} exceeds {bound}", 2 * n)));
    }
    let n2 = space.dim();
    let mut max_k = 0;
    while max_k < n && (d as u64).pow(max_k as u32 + 1) <= max_card {
        max_k += 1;
    }
    let shapes: Vec<Vec<usize>> = (0..=max_k).flat_map(|k| pivot_sets(n2, k)).collect();
    Ok(shapes.into_iter().flat_map(move |pivots| {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &p)| (p + 1..n2).filter(|c| !pivots.contains(c)).map(move |c| (row, c)))
            .collect();
        let count = (d as u64).pow(free.len() as u32);
        let pivots = pivots.clone();
        (0..count).filter_map(move |mut idx| {
            let mut rows: Vec<Vec<i64>> = pivots
                .iter()
                .map(|&p| {
                    let mut r = vec![0; n2];
                    r[p] = 1;
                    r
                })
                .collect();
            for &(row, c) in &free {
                rows[row][c] = (idx % d as u64) as i64;
                idx /= d as u64;
            }
            let m = Submodule { space, rows };
            m.is_isotropic().then_some(m)
        })
    }))
}

fn pivot_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `Σ_I ν_I S_I ≥ 0` over nonempty subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearEntropyInequality {
    pub n: usize,
    pub name: String,
    pub coefficients: BTreeMap<Subset, Q>,
}

impl LinearEntropyInequality {
    pub fn new(n: usize, name: impl Into<String>, terms: &[(Subset, Q)]) -> Self {
        let mut coefficients = BTreeMap::new();
        for (s, c) in terms {
            if *s == 0 {
                continue;
            }
            let e = coefficients.entry(*s).or_insert_with(Q::zero);
            *e += c;
        }
        coefficients.retain(|_, c: &mut Q| !c.is_zero());
        LinearEntropyInequality { n, name: name.into(), coefficients }
    }

    /// `S_I + S_J − S_{I∩J} − S_{I∪J} ≥ 0`.
    pub fn strong_subadditivity(n: usize, i: Subset, j: Subset) -> Self {
        Self::new(n, format!("ssa({},{})", fmt_subset(i), fmt_subset(j)), &[(i, qi(1)), (j, qi(1)), (i & j, qi(-1)), (i | j, qi(-1))])
    }

    /// `S_I + S_J − S_{I∖J} − S_{J∖I} ≥ 0`.
    pub fn weak_monotonicity(n: usize, i: Subset, j: Subset) -> Self {
        Self::new(n, format!("wm({},{})", fmt_subset(i), fmt_subset(j)), &[(i, qi(1)), (j, qi(1)), (i & !j, qi(-1)), (j & !i, qi(-1))])
    }

    /// `S_J − S_I ≥ 0` for `I ⊆ J`.
    pub fn monotonicity(n: usize, i: Subset, j: Subset) -> Self {
        Self::new(n, format!("mono({},{})", fmt_subset(i), fmt_subset(j)), &[(j, qi(1)), (i, qi(-1))])
    }

    /// `I(A:B|C) + I(A:B|D) + I(C:D) − I(A:B) ≥ 0` for single parties `a, b, c, d` (0-based).
    pub fn ingleton(n: usize, a: usize, b: usize, c: usize, d: usize) -> Self {
        let (a, b, c, d) = (1 << a, 1 << b, 1 << c, 1 << d);
        let mut t = Vec::new();
        cond_mi(&mut t, a, b, c, qi(1));
        cond_mi(&mut t, a, b, d, qi(1));
        cond_mi(&mut t, c, d, 0, qi(1));
        cond_mi(&mut t, a, b, 0, qi(-1));
        Self::new(n, format!("ingleton({},{},{},{})", fmt_subset(a), fmt_subset(b), fmt_subset(c), fmt_subset(d)), &t)
    }

    /// `I(1:2) + I(1:34) + 3I(3:4|1) + I(3:4|2) − 2I(3:4) ≥ 0` for single parties `1..4 = a, b, c, d`.
    pub fn zhang_yeung(n: usize, a: usize, b: usize, c: usize, d: usize) -> Self {
        let (a, b, c, d) = (1 << a, 1 << b, 1 << c, 1 << d);
        let mut t = Vec::new();
        cond_mi(&mut t, a, b, 0, qi(1));
        cond_mi(&mut t, a, c | d, 0, qi(1));
        cond_mi(&mut t, c, d, a, qi(3));
        cond_mi(&mut t, c, d, b, qi(1));
        cond_mi(&mut t, c, d, 0, qi(-2));
        Self::new(n, format!("zhang-yeung({},{},{},{})", fmt_subset(a), fmt_subset(b), fmt_subset(c), fmt_subset(d)), &t)
    }

    /// `Σ_{I ∋ i} ν_I = 0` for every party `i`.
    pub fn is_balanced(&self) -> bool {
        (0..self.n).all(|i| self.coefficients.iter().filter(|(s, _)| *s >> i & 1 == 1).map(|(_, c)| c).sum::<Q>().is_zero())
    }

    pub fn evaluate(&self, v: &EntropyVector) -> LogValue {
        self.coefficients.iter().fold(LogValue::zero(), |acc, (s, c)| &acc + &v.get(*s).scale(c))
    }
}

/// `ν` terms of `I(A:B|C) = S_{AC} + S_{BC} − S_{ABC} − S_C`.
fn cond_mi(t: &mut Vec<(Subset, Q)>, a: Subset, b: Subset, c: Subset, w: Q) {
    t.push((a | c, w.clone()));
    t.push((b | c, w.clone()));
    t.push((a | b | c, -w.clone()));
    t.push((c, -w));
}

fn fmt_subset(s: Subset) -> String {
    subset_parties(s).iter().map(|p| p.to_string()).collect::<Vec<_>>().join("")
}

pub fn balanced_check(ineq: &LinearEntropyInequality) -> bool {
    ineq.is_balanced()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Holds(LogValue),
    Violated(LogValue),
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds(_))
    }

    pub fn slack(&self) -> &LogValue {
        match self {
            Check::Holds(s) | Check::Violated(s) => s,
        }
    }
}

pub fn check_inequality(v: &EntropyVector, ineq: &LinearEntropyInequality) -> Result<Check> {
    if ineq.n != v.n || ineq.coefficients.keys().any(|s| s >> v.n != 0) {
        return Err(Error::Invalid(format!("inequality on {} parties applied to {} parties", ineq.n, v.n)));
    }
    let s = ineq.evaluate(v);
    Ok(if s.signum() == Ordering::Less { Check::Violated(s) } else { Check::Holds(s) })
}

/// Named families of inequalities used by the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InequalityFamily {
    StrongSubadditivity,
    WeakMonotonicity,
    Monotonicity,
    Ingleton,
    ZhangYeung,
}

impl InequalityFamily {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "ssa" => InequalityFamily::StrongSubadditivity,
            "wm" => InequalityFamily::WeakMonotonicity,
            "mono" | "monotonicity" => InequalityFamily::Monotonicity,
            "ingleton" => InequalityFamily::Ingleton,
            "zhang-yeung" | "zy" => InequalityFamily::ZhangYeung,
            other => return Err(Error::Parse(format!("unknown inequality family '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            InequalityFamily::StrongSubadditivity => "ssa",
            InequalityFamily::WeakMonotonicity => "wm",
            InequalityFamily::Monotonicity => "mono",
            InequalityFamily::Ingleton => "ingleton",
            InequalityFamily::ZhangYeung => "zhang-yeung",
        }
    }

    /// All instances on `n` parties. Ingleton and Zhang–Yeung use ordered 4-tuples of distinct
    /// single parties.
    pub fn instances(&self, n: usize) -> Vec<LinearEntropyInequality> {
        let all: Subset = (1 << n) - 1;
        let mut out = Vec::new();
        match self {
            InequalityFamily::StrongSubadditivity | InequalityFamily::WeakMonotonicity => {
                for i in 1..=all {
                    for j in i + 1..=all {
                        let q = if *self == InequalityFamily::StrongSubadditivity {
                            LinearEntropyInequality::strong_subadditivity(n, i, j)
                        } else {
                            LinearEntropyInequality::weak_monotonicity(n, i, j)
                        };
                        if !q.coefficients.is_empty() {
                            out.push(q);
                        }
                    }
                }
            }
            InequalityFamily::Monotonicity => {
                for j in 1..=all {
                    for i in 1..=all {
                        if i != j && i & j == i {
                            out.push(LinearEntropyInequality::monotonicity(n, i, j));
                        }
                    }
                }
            }
            InequalityFamily::Ingleton | InequalityFamily::ZhangYeung => {
                for t in ordered_quadruples(n) {
                    out.push(if *self == InequalityFamily::Ingleton {
                        LinearEntropyInequality::ingleton(n, t[0], t[1], t[2], t[3])
                    } else {
                        LinearEntropyInequality::zhang_yeung(n, t[0], t[1], t[2], t[3])
                    });
                }
            }
        }
        out
    }
}

fn ordered_quadruples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if BTreeSet::from([a, b, c, d]).len() == 4 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

impl fmt::Display for InequalityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub family: InequalityFamily,
    pub instances: usize,
    pub balanced: bool,
    /// Smallest slack over all instances and vectors (`None` without instances).
    pub min_slack: Option<LogValue>,
    pub violations: usize,
    /// An instance attaining the minimum and the index of the vector.
    pub argmin: Option<(String, usize)>,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub n: usize,
    pub d: i64,
    pub submodules: usize,
    /// Distinct entropy vectors, in first-seen order.
    pub vectors: Vec<EntropyVector>,
    pub families: Vec<FamilyReport>,
}

/// Evaluates every family on the entropy vectors of all isotropic subspaces of `F_d^{2n}`.
pub fn stabilizer_sweep(n: usize, d: i64, families: &[InequalityFamily]) -> Result<SweepReport> {
    let mut seen = BTreeSet::new();
    let mut vectors = Vec::new();
    let mut submodules = 0;
    for m in enumerate_isotropic(n, d, u64::MAX)? {
        submodules += 1;
        let v = entropy_vector(&m)?;
        if seen.insert(v.key()) {
            vectors.push(v);
        }
    }
    let mut reports = Vec::new();
    for &family in families {
        let inst = family.instances(n);
        let mut min: Option<LogValue> = None;
        let mut argmin = None;
        let mut violations = 0;
        for q in &inst {
            for (vi, v) in vectors.iter().enumerate() {
                let s = q.evaluate(v);
                if s.signum() == Ordering::Less {
                    violations += 1;
                }
                if min.as_ref().map_or(true, |m| s < *m) {
                    min = Some(s);
                    argmin = Some((q.name.clone(), vi));
                }
            }
        }
        reports.push(FamilyReport {
            family,
            instances: inst.len(),
            balanced: inst.iter().all(|q| q.is_balanced()),
            min_slack: min,
            violations,
            argmin,
        });
    }
    Ok(SweepReport { n, d, submodules, vectors, families: reports })
}

/// Parses a row-major integer CSV of generators (one vector per line).
pub fn parse_generators(text: &str) -> Result<Vec<Vec<i64>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| Error::Parse(format!("'{x}': {e}")))).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn howell_form_is_canonical_for_composite_modulus() {
        let space = PhaseSpace::new(1, 4).unwrap();
        let a = Submodule::span(space, &[vec![2, 0], vec![0, 2]]).unwrap();
        let b = Submodule::span(space, &[vec![2, 2], vec![2, 0]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cardinality(), BigUint::from(4u32));
        // The annihilator multiple must be recorded: span{(2,1)} contains (0,2).
        let c = Submodule::span(space, &[vec![2, 1]]).unwrap();
        assert!(c.contains(&[0, 2]));
        assert_eq!(c.cardinality(), BigUint::from(4u32));
    }

    #[test]
    fn log_values_compare_exactly() {
        let two = LogValue::ln_of(&BigUint::from(2u32), &[2, 3]);
        let three = LogValue::ln_of(&BigUint::from(3u32), &[2, 3]);
        assert!(three > two);
        assert!(&two.scale(&qi(2)) < &three.scale(&qi(2)));
        // 2^3 = 8 < 9 = 3^2
        assert!(two.scale(&qi(3)) < three.scale(&qi(2)));
        assert_eq!(LogValue::ln_of(&BigUint::from(36u32), &[2, 3]).in_log_d(6), Some(qi(2)));
        assert_eq!(two.in_log_d(6), None);
    }
}
