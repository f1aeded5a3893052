//! Young diagrams, weights, roots and Weyl groups of products of unitary groups.
//!
//! Weights are stored in the occupation convention: one integer block per
//! group factor, concatenated. For a special unitary factor only the traceless
//! part of a block carries information; comparisons that need this quotient
//! are made explicitly by the caller.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// A partition with weakly decreasing positive rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungDiagram {
    rows: Vec<u32>,
    boxes: u32,
}

impl YoungDiagram {
    /// Builds a diagram from rows; trailing zero rows are dropped.
    pub fn new(rows: Vec<u32>) -> Result<Self> {
        let mut rows = rows;
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("rows {rows:?} are not weakly decreasing")));
        }
        if rows.contains(&0) {
            return Err(Error::Invalid(format!("zero row inside {rows:?}")));
        }
        let boxes = rows.iter().sum();
        Ok(YoungDiagram { rows, boxes })
    }

    pub fn empty() -> Self {
        YoungDiagram { rows: vec![], boxes: 0 }
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn boxes(&self) -> u32 {
        self.boxes
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn first_row(&self) -> u32 {
        self.rows.first().copied().unwrap_or(0)
    }

    /// Rows padded with zeros to length `n` (truncation is an error).
    pub fn padded(&self, n: usize) -> Result<Vec<u32>> {
        if self.rows.len() > n {
            return Err(Error::Invalid(format!("{self} has more than {n} rows")));
        }
        let mut v = self.rows.clone();
        v.resize(n, 0);
        Ok(v)
    }

    pub fn scaled(&self, k: u32) -> Self {
        YoungDiagram { rows: self.rows.iter().map(|r| r * k).collect(), boxes: self.boxes * k }
    }

    /// Prepends a first row so that the result has `k` boxes.
    pub fn with_first_row(&self, k: u32) -> Result<Self> {
        if k < self.boxes + self.first_row() {
            return Err(Error::Invalid(format!("cannot pad {self} to {k} boxes")));
        }
        let mut rows = vec![k - self.boxes];
        rows.extend_from_slice(&self.rows);
        YoungDiagram::new(rows)
    }

    pub fn conjugate(&self) -> Self {
        let mut cols = Vec::new();
        for c in 0..self.first_row() {
            cols.push(self.rows.iter().filter(|&&r| r > c).count() as u32);
        }
        YoungDiagram { rows: cols, boxes: self.boxes }
    }

    /// Dimension of the symmetric-group irrep, by the hook length formula.
    pub fn sn_dimension(&self) -> BigUint {
        let conj = self.conjugate();
        let mut num = BigUint::one();
        for k in 1..=self.boxes {
            num *= k;
        }
        let mut den = BigUint::one();
        for (i, &r) in self.rows.iter().enumerate() {
            for j in 0..r {
                let hook = (r - j - 1) + (conj.rows[j as usize] - i as u32 - 1) + 1;
                den *= hook;
            }
        }
        num / den
    }

    /// Dimension of the `U(d)` irrep with this highest weight (Weyl dimension formula).
    pub fn gl_dimension(&self, d: usize) -> BigUint {
        if self.rows.len() > d {
            return BigUint::from(0u32);
        }
        let l: Vec<i64> = (0..d).map(|i| self.rows.get(i).copied().unwrap_or(0) as i64).collect();
        let mut num = num_bigint::BigInt::one();
        let mut den = num_bigint::BigInt::one();
        for i in 0..d {
            for j in (i + 1)..d {
                num *= l[i] - l[j] + (j - i) as i64;
                den *= (j - i) as i64;
            }
        }
        (num / den).to_biguint().unwrap_or_default()
    }

    /// All partitions of `k` with at most `max_rows` rows, in reverse lexicographic order.
    pub fn partitions(k: u32, max_rows: usize) -> Vec<YoungDiagram> {
        fn rec(left: u32, max_part: u32, rows_left: usize, cur: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
            if left == 0 {
                out.push(YoungDiagram::new(cur.clone()).expect("valid partition"));
                return;
            }
            if rows_left == 0 {
                return;
            }
            for p in (1..=max_part.min(left)).rev() {
                cur.push(p);
                rec(left - p, p, rows_left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, k, max_rows, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl FromStr for YoungDiagram {
    type Err = Error;

    /// Accepts `"[3,1]"`, `"3,1,0"`, `"()"` and `"[]"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
        if t.trim().is_empty() {
            return Ok(YoungDiagram::empty());
        }
        let rows = t
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad Young diagram '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        YoungDiagram::new(rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    SpecialUnitary,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub dim: usize,
    pub kind: GroupKind,
}

/// A product of unitary or special unitary groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub factors: Vec<Factor>,
}

impl GroupSpec {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("group needs at least one factor".into()));
        }
        if factors.iter().any(|f| f.dim == 0) {
            return Err(Error::Invalid("factor dimensions must be positive".into()));
        }
        Ok(GroupSpec { factors })
    }

    pub fn su(dims: &[usize]) -> Self {
        GroupSpec::new(dims.iter().map(|&dim| Factor { dim, kind: GroupKind::SpecialUnitary }).collect())
            .expect("nonempty positive dims")
    }

    pub fn u(dims: &[usize]) -> Self {
        GroupSpec::new(dims.iter().map(|&dim| Factor { dim, kind: GroupKind::Unitary }).collect())
            .expect("nonempty positive dims")
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    /// Length of a weight vector, `Σ d_k`.
    pub fn weight_len(&self) -> usize {
        self.factors.iter().map(|f| f.dim).sum()
    }

    /// Start offset of each factor's block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut o = Vec::with_capacity(self.factors.len());
        let mut s = 0;
        for f in &self.factors {
            o.push(s);
            s += f.dim;
        }
        o
    }

    /// Dimension of the traceless (SU) weight space, `Σ (d_k − 1)`.
    pub fn reduced_len(&self) -> usize {
        self.factors.iter().map(|f| f.dim - 1).sum()
    }
}

/// Integer weight in the concatenated occupation convention.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coords: Vec<i64>,
}

impl Weight {
    pub fn new(coords: Vec<i64>) -> Self {
        Weight { coords }
    }

    pub fn zero(len: usize) -> Self {
        Weight { coords: vec![0; len] }
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight { coords: self.coords.iter().map(|a| a * k).collect() }
    }

    pub fn blocks<'a>(&'a self, group: &GroupSpec) -> Vec<&'a [i64]> {
        let mut out = Vec::new();
        let mut s = 0;
        for f in &group.factors {
            out.push(&self.coords[s..s + f.dim]);
            s += f.dim;
        }
        out
    }

    /// Per-factor block rendering, e.g. `((1,0),(0,1))`.
    pub fn display(&self, group: &GroupSpec) -> String {
        let blocks: Vec<String> = self
            .blocks(group)
            .iter()
            .map(|b| format!("({})", b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("({})", blocks.join(","))
    }

    /// Parses the block form `((1,0),(0,1))` against a group.
    pub fn parse(s: &str, group: &GroupSpec) -> Result<Weight> {
        let coords: Vec<i64> = s
            .split(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad weight '{s}'"))))
            .collect::<Result<_>>()?;
        if coords.len() != group.weight_len() {
            return Err(Error::Invalid(format!("weight '{s}' has {} coordinates, expected {}", coords.len(), group.weight_len())));
        }
        Ok(Weight { coords })
    }
}

/// Root `α_{ij} = e_i − e_j` in one factor; positive iff `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Root {
    pub factor: usize,
    pub i: usize,
    pub j: usize,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        self.i < self.j
    }

    pub fn negate(&self) -> Root {
        Root { factor: self.factor, i: self.j, j: self.i }
    }

    pub fn vector(&self, group: &GroupSpec) -> Weight {
        let off = group.offsets()[self.factor];
        let mut c = vec![0; group.weight_len()];
        c[off + self.i] += 1;
        c[off + self.j] -= 1;
        Weight { coords: c }
    }

    /// Pairing with a full-coordinate functional `H`: `H_i − H_j` within the factor block.
    pub fn pair<T>(&self, group: &GroupSpec, h: &[T]) -> T
    where
        T: Clone + std::ops::Sub<Output = T>,
    {
        let off = group.offsets()[self.factor];
        h[off + self.i].clone() - h[off + self.j].clone()
    }
}

pub fn positive_roots(group: &GroupSpec) -> Vec<Root> {
    let mut out = Vec::new();
    for (k, f) in group.factors.iter().enumerate() {
        for i in 0..f.dim {
            for j in (i + 1)..f.dim {
                out.push(Root { factor: k, i, j });
            }
        }
    }
    out
}

pub fn negative_roots(group: &GroupSpec) -> Vec<Root> {
    positive_roots(group).iter().map(|r| r.negate()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepKind {
    /// `C^{d_1} ⊗ … ⊗ C^{d_n}`.
    Tensor(Vec<usize>),
    /// `Sym^k(C^d)`.
    Sym { d: usize, k: usize },
    /// `Λ^k(C^d)`.
    Wedge { d: usize, k: usize },
    /// A product of irreducible representations, one per factor.
    ProductOfIrreps(Vec<YoungDiagram>),
    /// Explicitly supplied weights (e.g. a restriction to some factors).
    Custom,
}

/// Weights with multiplicity of a representation of a product of unitary groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    pub group: GroupSpec,
    pub weights: Vec<Weight>,
    pub kind: RepKind,
}

impl WeightSystem {
    pub fn custom(group: GroupSpec, weights: Vec<Weight>) -> Result<Self> {
        let len = group.weight_len();
        if weights.iter().any(|w| w.coords.len() != len) {
            return Err(Error::Invalid("weight length does not match group".into()));
        }
        Ok(WeightSystem { group, weights, kind: RepKind::Custom })
    }

    /// Dimension of the representation (number of weights with multiplicity).
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Distinct weights with their multiplicities, sorted.
    pub fn distinct(&self) -> Vec<(Weight, usize)> {
        let mut v = self.weights.clone();
        v.sort();
        let mut out: Vec<(Weight, usize)> = Vec::new();
        for w in v {
            match out.last_mut() {
                Some((last, m)) if *last == w => *m += 1,
                _ => out.push((w, 1)),
            }
        }
        out
    }

    /// Restriction to a subset of the group factors (weights projected, multiplicities kept).
    pub fn restrict(&self, factors: &[usize]) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&f| f >= self.group.factors.len()) {
            return Err(Error::Invalid(format!("bad factor selection {factors:?}")));
        }
        let group = GroupSpec::new(factors.iter().map(|&f| self.group.factors[f]).collect())?;
        let offs = self.group.offsets();
        let weights = self
            .weights
            .iter()
            .map(|w| {
                let mut c = Vec::new();
                for &f in factors {
                    c.extend_from_slice(&w.coords[offs[f]..offs[f] + self.group.factors[f].dim]);
                }
                Weight { coords: c }
            })
            .collect();
        Ok(WeightSystem { group, weights, kind: RepKind::Custom })
    }

    /// Basis multi-index of a tensor weight (position of the 1 in each block).
    pub fn tensor_index(&self, w: &Weight) -> Option<Vec<usize>> {
        w.blocks(&self.group)
            .iter()
            .map(|b| {
                if b.iter().sum::<i64>() == 1 && b.iter().all(|&x| x == 0 || x == 1) {
                    b.iter().position(|&x| x == 1)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Product-basis weights of `C^{d_1} ⊗ … ⊗ C^{d_n}` in lexicographic basis order,
/// as a representation of `SU(d_1) × … × SU(d_n)`.
pub fn tensor_weights(dims: &[usize]) -> Result<WeightSystem> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Invalid("dims must be nonempty and positive".into()));
    }
    let group = GroupSpec::su(dims);
    let len = group.weight_len();
    let offs = group.offsets();
    let total: usize = dims.iter().product();
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dims.len()];
    for _ in 0..total {
        let mut c = vec![0i64; len];
        for (k, &i) in idx.iter().enumerate() {
            c[offs[k] + i] = 1;
        }
        weights.push(Weight { coords: c });
        for k in (0..dims.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(WeightSystem { group, weights, kind: RepKind::Tensor(dims.to_vec()) })
}

/// All occupation vectors of `Sym^k(C^d)`, lexicographically decreasing.
pub fn sym_weights(d: usize, k: usize) -> Result<WeightSystem> {
    if d == 0 {
        return Err(Error::Invalid("d must be positive".into()));
    }
    let mut weights = Vec::new();
    fn rec(d: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if cur.len() == d - 1 {
            cur.push(left);
            out.push(Weight { coords: cur.clone() });
            cur.pop();
            return;
        }
        for x in (0..=left).rev() {
            cur.push(x);
            rec(d, left - x, cur, out);
            cur.pop();
        }
    }
    rec(d, k as i64, &mut Vec::new(), &mut weights);
    Ok(WeightSystem { group: GroupSpec::su(&[d]), weights, kind: RepKind::Sym { d, k } })
}

/// Weights of `Λ^k(C^d)`: 0/1 vectors with `k` ones.
pub fn wedge_weights(d: usize, k: usize) -> Result<WeightSystem> {
    if d == 0 || k > d {
        return Err(Error::Invalid(format!("no wedge power Λ^{k}(C^{d})")));
    }
    let mut weights = Vec::new();
    for mask in (0u64..(1u64 << d)).rev() {
        if mask.count_ones() as usize == k {
            weights.push(Weight { coords: (0..d).map(|i| ((mask >> (d - 1 - i)) & 1) as i64).collect() });
        }
    }
    Ok(WeightSystem { group: GroupSpec::su(&[d]), weights, kind: RepKind::Wedge { d, k } })
}

/// Per-factor pairing with `Z_k = diag(1, −1)`; requires every factor to be two-dimensional.
pub fn su2_pairing(w: &Weight, group: &GroupSpec) -> Result<Vec<i64>> {
    if group.factors.iter().any(|f| f.dim != 2) {
        return Err(Error::Invalid("pairing coordinates need all factors of dimension 2".into()));
    }
    Ok(w.blocks(group).iter().map(|b| b[0] - b[1]).collect())
}

/// Orbit under independent permutations of each factor block.
pub fn weyl_orbit(w: &Weight, group: &GroupSpec) -> BTreeSet<Weight> {
    let mut orbit: BTreeSet<Vec<i64>> = BTreeSet::new();
    orbit.insert(vec![]);
    for b in w.blocks(group) {
        let perms = distinct_permutations(b);
        let mut next = BTreeSet::new();
        for prefix in &orbit {
            for p in &perms {
                let mut v = prefix.clone();
                v.extend_from_slice(p);
                next.insert(v);
            }
        }
        orbit = next;
    }
    orbit.into_iter().map(|coords| Weight { coords }).collect()
}

fn distinct_permutations(b: &[i64]) -> Vec<Vec<i64>> {
    let mut v = b.to_vec();
    v.sort();
    let mut out = vec![v.clone()];
    // Next-permutation iteration over the sorted multiset.
    loop {
        let n = v.len();
        if n < 2 {
            break;
        }
        let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).expect("exists");
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(v.clone());
    }
    out
}

/// Sorts every block weakly decreasing.
pub fn dominant_representative(w: &Weight, group: &GroupSpec) -> Weight {
    let mut coords = Vec::with_capacity(w.coords.len());
    for b in w.blocks(group) {
        let mut s = b.to_vec();
        s.sort_by(|a, b| b.cmp(a));
        coords.extend(s);
    }
    Weight { coords }
}
