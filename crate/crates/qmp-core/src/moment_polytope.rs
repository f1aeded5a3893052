//! Marginal (moment) polytopes of tensor representations from Ressayre-type inequalities.
//!
//! Candidates are hyperplanes spanned by weights. A candidate `(H, c)` is kept when the
//! negative roots pairing negatively with `H` are as many as the weights strictly below the
//! wall and the map `X ↦ π(X)ψ` between them is invertible for some `ψ` supported on the wall.
//! Invertibility is decided by evaluating the determinant at random points; a valid result
//! carries the integer assignment that proves it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::coords::{CoordKind, Coordinates};
use crate::error::{Error, Result};
use crate::exact::{det, qi, qz, Q};
use crate::flow::{haar_sample_with, marginals, rng_from_seed};
use crate::lattice::{negative_roots, tensor_weights, RepKind, Root, Weight, WeightSystem};
use crate::poly::Poly;
use crate::polytope::{HalfSpace, Polytope};

/// Prime modulus for randomized determinant evaluation.
const P: u64 = (1 << 61) - 1;

/// Hyperplane `(ω, H) = c` through weights, with the weight and root data of the criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RessayreCandidate {
    /// `H` in full weight coordinates (traceless on every factor), offset `c`.
    pub halfspace: HalfSpace,
    pub on_wall: Vec<usize>,
    pub below: Vec<usize>,
    pub neg_roots_below: Vec<Root>,
}

impl RessayreCandidate {
    /// Classifies the weights and negative roots of `ws` against `(H, c)`.
    pub fn new(ws: &WeightSystem, h: Vec<Q>, c: Q) -> Result<Self> {
        if h.len() != ws.group.weight_len() {
            return Err(Error::Invalid(format!("H has {} entries, weights have {}", h.len(), ws.group.weight_len())));
        }
        let halfspace = HalfSpace::new(h, c)?;
        let mut on_wall = Vec::new();
        let mut below = Vec::new();
        for (i, w) in ws.weights.iter().enumerate() {
            let s = halfspace.slack(&w.coords.iter().map(|&x| qi(x)).collect::<Vec<_>>());
            if s.is_zero() {
                on_wall.push(i);
            } else if s < Q::zero() {
                below.push(i);
            }
        }
        let neg_roots_below =
            negative_roots(&ws.group).into_iter().filter(|r| r.pair(&ws.group, &halfspace.normal) < Q::zero()).collect();
        Ok(RessayreCandidate { halfspace, on_wall, below, neg_roots_below })
    }

    /// Integer-coefficient variant of [`RessayreCandidate::new`].
    pub fn from_ints(ws: &WeightSystem, h: &[i64], c: i64) -> Result<Self> {
        RessayreCandidate::new(ws, h.iter().map(|&x| qi(x)).collect(), qi(c))
    }

    /// Whether the wall weights affinely span a hyperplane of the weight span.
    pub fn spans_hyperplane(&self, ws: &WeightSystem) -> bool {
        let all: Vec<Vec<Q>> = ws.weights.iter().map(|w| w.coords.iter().map(|&x| qi(x)).collect()).collect();
        let wall: Vec<Vec<Q>> = self.on_wall.iter().map(|&i| all[i].clone()).collect();
        !wall.is_empty() && crate::exact::affine_dim(&wall) + 1 == crate::exact::affine_dim(&all)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Integer amplitude for each wall weight, by weight index.
    pub assignment: BTreeMap<usize, i64>,
    pub determinant: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RessayreOutcome {
    Valid(Witness),
    /// `"dim"` when the counts differ, `"det"` when every trial vanished.
    Invalid(String),
}

impl RessayreOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, RessayreOutcome::Valid(_))
    }
}

/// Entry pattern of `M(ψ)`: `Some(w)` when the entry is the amplitude of wall weight `w`.
fn matrix_pattern(cand: &RessayreCandidate, ws: &WeightSystem) -> Result<Vec<Vec<Option<usize>>>> {
    if !matches!(ws.kind, RepKind::Tensor(_)) {
        return Err(Error::Invalid("the root action is implemented for tensor weight systems only".into()));
    }
    let index: HashMap<&[i64], usize> = ws.weights.iter().enumerate().map(|(i, w)| (w.coords.as_slice(), i)).collect();
    let wall: BTreeSet<usize> = cand.on_wall.iter().copied().collect();
    let offs = ws.group.offsets();
    Ok(cand
        .neg_roots_below
        .iter()
        .map(|r| {
            cand.below
                .iter()
                .map(|&b| {
                    // E_{X,ij} sends the basis vector with index j on factor X to index i.
                    let bw = &ws.weights[b].coords;
                    if bw[offs[r.factor] + r.i] != 1 {
                        return None;
                    }
                    let mut src = bw.clone();
                    src[offs[r.factor] + r.i] = 0;
                    src[offs[r.factor] + r.j] = 1;
                    index.get(src.as_slice()).copied().filter(|w| wall.contains(w))
                })
                .collect()
        })
        .collect())
}

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn det_mod_p(mut m: Vec<Vec<u64>>) -> u64 {
    let n = m.len();
    let mut d = 1u64;
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| m[r][col] != 0) else { return 0 };
        if p != col {
            m.swap(p, col);
            d = P - d;
        }
        d = mulmod(d, m[col][col]);
        let inv = powmod(m[col][col], P - 2);
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let f = mulmod(m[r][col], inv);
            for c in col..n {
                m[r][c] = (m[r][c] + P - mulmod(f, m[col][c])) % P;
            }
        }
    }
    d % P
}

/// Decides the criterion with `trials` random evaluations of the determinant.
pub fn ressayre_check<R: Rng>(cand: &RessayreCandidate, ws: &WeightSystem, trials: usize, rng: &mut R) -> Result<RessayreOutcome> {
    if cand.neg_roots_below.len() != cand.below.len() {
        return Ok(RessayreOutcome::Invalid("dim".into()));
    }
    let pattern = matrix_pattern(cand, ws)?;
    if pattern.is_empty() {
        return Ok(RessayreOutcome::Valid(Witness { assignment: BTreeMap::new(), determinant: Q::one() }));
    }
    for _ in 0..trials.max(1) {
        let assignment: BTreeMap<usize, i64> = cand.on_wall.iter().map(|&w| (w, rng.gen_range(1..=1_000_000))).collect();
        let m: Vec<Vec<u64>> =
            pattern.iter().map(|row| row.iter().map(|e| e.map_or(0, |w| assignment[&w] as u64)).collect()).collect();
        if det_mod_p(m) != 0 {
            let exact: Vec<Vec<Q>> =
                pattern.iter().map(|row| row.iter().map(|e| e.map_or(Q::zero(), |w| qi(assignment[&w]))).collect()).collect();
            let d = det(&exact);
            if !d.is_zero() {
                return Ok(RessayreOutcome::Valid(Witness { assignment, determinant: d }));
            }
        }
    }
    Ok(RessayreOutcome::Invalid("det".into()))
}

/// Exact determinant of `M(ψ)` at a witness assignment.
pub fn evaluate_witness(cand: &RessayreCandidate, ws: &WeightSystem, assignment: &BTreeMap<usize, i64>) -> Result<Q> {
    let pattern = matrix_pattern(cand, ws)?;
    if cand.neg_roots_below.len() != cand.below.len() {
        return Err(Error::Invalid("matrix is not square".into()));
    }
    let m: Vec<Vec<Q>> = pattern
        .iter()
        .map(|row| row.iter().map(|e| e.map_or(Q::zero(), |w| qi(*assignment.get(&w).unwrap_or(&0)))).collect())
        .collect();
    Ok(if m.is_empty() { Q::one() } else { det(&m) })
}

/// Determinant as a polynomial in the wall amplitudes.
#[derive(Clone, Debug)]
pub struct DeterminantPolynomial {
    pub poly: Poly,
    /// Weight index of each variable.
    pub variables: Vec<usize>,
    /// Labels such as `ψ_{121}` (one-based basis indices).
    pub labels: Vec<String>,
}

impl DeterminantPolynomial {
    /// Terms as `(coefficient, [(label, exponent)])`.
    pub fn monomials(&self) -> Vec<(Q, Vec<(String, u32)>)> {
        self.poly
            .terms()
            .map(|(e, c)| {
                let f = e.iter().enumerate().filter(|(_, &p)| p > 0).map(|(i, &p)| (self.labels[i].clone(), p)).collect();
                (c.clone(), f)
            })
            .collect()
    }
}

impl std::fmt::Display for DeterminantPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (c, mono) in self.monomials() {
            let body: Vec<String> =
                mono.iter().map(|(l, p)| if *p == 1 { l.clone() } else { format!("{l}^{p}") }).collect();
            let coef = if c == qi(1) {
                String::new()
            } else if c == qi(-1) {
                "-".into()
            } else {
                format!("{} ", crate::exact::fmt_q(&c))
            };
            parts.push(format!("{coef}{}", body.join(" ")));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn basis_label(ws: &WeightSystem, w: usize) -> String {
    let idx = ws.tensor_index(&ws.weights[w]).expect("tensor weight");
    let digits: String = idx.iter().map(|i| (i + 1).to_string()).collect();
    format!("ψ_{{{digits}}}")
}

/// Symbolic determinant of `M(ψ)` by cofactor expansion with memoization over column sets.
pub fn determinant_polynomial(cand: &RessayreCandidate, ws: &WeightSystem) -> Result<DeterminantPolynomial> {
    if cand.neg_roots_below.len() != cand.below.len() {
        return Err(Error::Invalid("matrix is not square".into()));
    }
    let n = cand.below.len();
    if n > 20 {
        return Err(Error::EnumerationBound(format!("symbolic determinant of size {n}")));
    }
    let pattern = matrix_pattern(cand, ws)?;
    let variables = cand.on_wall.clone();
    let var_of: HashMap<usize, usize> = variables.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let nv = variables.len();
    let mut memo: HashMap<u32, Poly> = HashMap::new();
    fn rec(row: usize, used: u32, pat: &[Vec<Option<usize>>], var_of: &HashMap<usize, usize>, nv: usize, memo: &mut HashMap<u32, Poly>) -> Poly {
        let n = pat.len();
        if row == n {
            return Poly::one(nv);
        }
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let mut acc = Poly::zero(nv);
        let mut sign_pos = true;
        for c in 0..n {
            if used & (1 << c) != 0 {
                continue;
            }
            if let Some(w) = pat[row][c] {
                let minor = rec(row + 1, used | (1 << c), pat, var_of, nv, memo);
                if !minor.is_zero() {
                    let term = &Poly::var(nv, var_of[&w]) * &minor;
                    acc = if sign_pos { &acc + &term } else { &acc - &term };
                }
            }
            sign_pos = !sign_pos;
        }
        memo.insert(used, acc.clone());
        acc
    }
    let poly = rec(0, 0, &pattern, &var_of, nv, &mut memo);
    let labels = variables.iter().map(|&w| basis_label(ws, w)).collect();
    Ok(DeterminantPolynomial { poly, variables, labels })
}

fn det_i128(mut m: Vec<Vec<i128>>) -> i128 {
    // Bareiss fraction-free elimination.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else { return 0 };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i128(b, a % b)
    }
}

/// Kernel vector of a `(m−1) × m` integer matrix by signed maximal minors; `None` if rank-deficient.
pub(crate) fn cross_product(rows: &[Vec<i64>]) -> Option<Vec<i64>> {
    let m = rows[0].len();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let minor: Vec<Vec<i128>> =
            rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x as i128).collect()).collect();
        let d = det_i128(minor);
        out.push(if j % 2 == 0 { d } else { -d });
    }
    let g = out.iter().fold(0, |g, &x| gcd_i128(g, x));
    if g == 0 {
        return None;
    }
    let first = out.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let s = if first < 0 { -g } else { g };
    Some(out.iter().map(|&x| (x / s) as i64).collect())
}

pub(crate) fn combinations(n: usize, r: usize, first: usize) -> Vec<Vec<usize>> {
    // All r-subsets of 0..n starting with `first`.
    let mut out = Vec::new();
    let mut cur = vec![first];
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(first + 1, n, r, &mut cur, &mut out);
    out
}

/// Hyperplanes `(ω, H) = c` spanned by weights, both orientations, deduplicated by primitive `(H, c)`.
pub fn candidate_hyperplanes(ws: &WeightSystem) -> Result<Vec<RessayreCandidate>> {
    let distinct: Vec<Weight> = ws.distinct().into_iter().map(|(w, _)| w).collect();
    let len = ws.group.weight_len();
    let offs = ws.group.offsets();
    let trace_rows: Vec<Vec<i64>> = ws
        .group
        .factors
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let mut row = vec![0i64; len + 1];
            for i in 0..f.dim {
                row[offs[k] + i] = 1;
            }
            row
        })
        .collect();
    let r = len - ws.group.factors.len();
    if r == 0 || distinct.len() < r {
        return Ok(Vec::new());
    }
    let point_rows: Vec<Vec<i64>> = distinct
        .iter()
        .map(|w| {
            let mut row = w.coords.clone();
            row.push(-1);
            row
        })
        .collect();
    let keys: BTreeSet<Vec<i64>> = (0..distinct.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut local = BTreeSet::new();
            for subset in combinations(distinct.len(), r, first) {
                let mut rows = trace_rows.clone();
                rows.extend(subset.iter().map(|&i| point_rows[i].clone()));
                if let Some(v) = cross_product(&rows) {
                    local.insert(v);
                }
            }
            local
        })
        .collect();
    let mut out = Vec::with_capacity(2 * keys.len());
    for key in keys {
        let h: Vec<i64> = key[..len].to_vec();
        let c = key[len];
        for s in [1, -1] {
            let hs: Vec<i64> = h.iter().map(|x| s * x).collect();
            out.push(RessayreCandidate::from_ints(ws, &hs, s * c)?);
        }
    }
    Ok(out)
}

/// Convex hull of the weights in the natural chart (pairing for qubits, reduced otherwise).
pub fn abelian_polytope(ws: &WeightSystem) -> Result<Polytope> {
    let coords = Coordinates::natural(ws)?;
    let pts: Vec<Vec<Q>> = ws.distinct().iter().map(|(w, _)| coords.project(w)).collect();
    Polytope::from_points(&pts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FacetSource {
    Ressayre { h: Vec<Q>, c: Q, witness: Witness },
    /// Weyl-chamber ordering or eigenvalue nonnegativity.
    Bound,
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Inequality in reduced spectrum coordinates.
    pub halfspace: HalfSpace,
    pub source: FacetSource,
}

/// Polytope of ordered marginal spectra, in reduced coordinates `(λ_{k,1}, …, λ_{k,d_k−1})_k`.
#[derive(Clone, Debug)]
pub struct MarginalPolytope {
    pub dims: Vec<usize>,
    pub polytope: Polytope,
    pub facets: Vec<Facet>,
    pub candidates: usize,
    pub valid: usize,
}

impl MarginalPolytope {
    /// Full ordered spectra of every vertex.
    pub fn full_vertices(&self) -> Vec<Vec<Q>> {
        let coords = reduced_chart(&self.dims);
        self.polytope.vertices.iter().map(|v| coords.lift(v)).collect()
    }
}

fn reduced_chart(dims: &[usize]) -> Coordinates {
    let group = crate::lattice::GroupSpec::su(dims);
    let n = dims.len();
    Coordinates::new(CoordKind::Reduced, group, vec![qi(1); n]).expect("reduced chart")
}

#[derive(Clone, Debug)]
pub struct PolytopeOptions {
    pub trials: usize,
    pub seed: u64,
    /// Random states used to test full-dimensionality.
    pub samples: usize,
}

impl Default for PolytopeOptions {
    fn default() -> Self {
        PolytopeOptions { trials: 32, seed: 0x5eed, samples: 0 }
    }
}

/// Ordering and nonnegativity constraints of normalized spectra in reduced coordinates.
pub fn spectrum_bounds(dims: &[usize]) -> Vec<HalfSpace> {
    let r: usize = dims.iter().map(|d| d - 1).sum();
    let mut out = Vec::new();
    let mut off = 0;
    for &d in dims {
        if d < 2 {
            continue;
        }
        for i in 0..d - 2 {
            let mut n = vec![qi(0); r];
            n[off + i] = qi(1);
            n[off + i + 1] = qi(-1);
            out.push(HalfSpace { normal: n, offset: qi(0) });
        }
        // λ_{d−1} ≥ λ_d = 1 − Σ_{i<d} λ_i.
        let mut n = vec![qi(0); r];
        for i in 0..d - 1 {
            n[off + i] = qi(1);
        }
        n[off + d - 2] += qi(1);
        out.push(HalfSpace { normal: n, offset: qi(1) });
        // λ_d ≥ 0.
        let mut n = vec![qi(0); r];
        for i in 0..d - 1 {
            n[off + i] = qi(-1);
        }
        out.push(HalfSpace { normal: n, offset: qi(-1) });
        off += d - 1;
    }
    out
}

/// Affine dimension of marginal spectra of random pure states (numerical rank, tolerance 1e−8).
pub fn empirical_dimension(dims: &[usize], samples: usize, seed: u64) -> usize {
    let mut rng = rng_from_seed(seed);
    let pts: Vec<Vec<f64>> = (0..samples).map(|_| marginals(&haar_sample_with(dims, &mut rng)).reduced_spectra()).collect();
    if pts.len() < 2 {
        return 0;
    }
    let r = pts[0].len();
    let m = nalgebra::DMatrix::from_fn(pts.len() - 1, r, |i, j| pts[i + 1][j] - pts[0][j]);
    m.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-8).count()
}

/// Two-factor case: both marginals share their nonzero spectrum.
fn schmidt_polytope(dims: &[usize]) -> Result<MarginalPolytope> {
    let (a, b) = (dims[0], dims[1]);
    let chart = reduced_chart(dims);
    let mut pts = Vec::new();
    for j in 1..=a.min(b) {
        let spec = |d: usize| -> Vec<Q> { (0..d).map(|i| if i < j { Q::new(1.into(), (j as i64).into()) } else { qi(0) }).collect() };
        let mut full = spec(a);
        full.extend(spec(b));
        pts.push(chart.project_full(&full));
    }
    let polytope = Polytope::from_points(&pts)?;
    let facets = polytope.halfspaces.iter().map(|h| Facet { halfspace: h.clone(), source: FacetSource::Bound }).collect();
    Ok(MarginalPolytope { dims: dims.to_vec(), polytope, facets, candidates: 0, valid: 0 })
}

/// Marginal spectrum polytope of pure states on `C^{d_1} ⊗ … ⊗ C^{d_n}`.
pub fn marginal_polytope(dims: &[usize], opts: &PolytopeOptions) -> Result<MarginalPolytope> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::Invalid("every factor must have dimension at least 2".into()));
    }
    if dims.len() == 1 {
        let chart = reduced_chart(dims);
        let mut e = vec![qi(0); dims[0]];
        e[0] = qi(1);
        let polytope = Polytope::from_points(&[chart.project_full(&e)])?;
        return Ok(MarginalPolytope { dims: dims.to_vec(), polytope, facets: Vec::new(), candidates: 0, valid: 0 });
    }
    if dims.len() == 2 {
        return schmidt_polytope(dims);
    }
    let total: usize = dims.iter().product();
    for &d in dims {
        if d * d > total {
            return Err(Error::Degenerate(format!(
                "a factor of dimension {d} exceeds the product {} of the others; its marginal has rank at most that product",
                total / d
            )));
        }
    }
    let r: usize = dims.iter().map(|d| d - 1).sum();
    if opts.samples > 0 {
        let e = empirical_dimension(dims, opts.samples.max(r + 2), opts.seed);
        if e < r {
            return Err(Error::Degenerate(format!("random marginal spectra span dimension {e} < {r}")));
        }
    }
    let ws = tensor_weights(dims)?;
    let cands = candidate_hyperplanes(&ws)?;
    let outcomes: Vec<Result<RessayreOutcome>> = cands
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = rng_from_seed(opts.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            ressayre_check(c, &ws, opts.trials, &mut rng)
        })
        .collect();
    let chart = reduced_chart(dims);
    let mut ressayre: BTreeMap<HalfSpace, FacetSource> = BTreeMap::new();
    let mut valid = 0;
    for (cand, out) in cands.iter().zip(outcomes) {
        if let RessayreOutcome::Valid(witness) = out? {
            valid += 1;
            let (h, c0) = chart.pullback_functional(&cand.halfspace.normal);
            if h.iter().all(|x| x.is_zero()) {
                continue;
            }
            let hs = HalfSpace { normal: h, offset: &cand.halfspace.offset - c0 }.normalized();
            ressayre.entry(hs).or_insert(FacetSource::Ressayre {
                h: cand.halfspace.normal.clone(),
                c: cand.halfspace.offset.clone(),
                witness,
            });
        }
    }
    let mut all: Vec<HalfSpace> = ressayre.keys().cloned().collect();
    all.extend(spectrum_bounds(dims).into_iter().map(|h| h.normalized()));
    let polytope = Polytope::from_halfspaces(&all, r)?;
    let facets = polytope
        .halfspaces
        .iter()
        .map(|h| {
            let n = h.normalized();
            let source = ressayre.get(&n).cloned().unwrap_or(FacetSource::Bound);
            Facet { halfspace: n, source }
        })
        .collect();
    Ok(MarginalPolytope { dims: dims.to_vec(), polytope, facets, candidates: cands.len(), valid })
}

/// Integer multiple of a rational vector with coprime entries (helper for reporting).
pub fn integer_normal(h: &[Q]) -> Vec<i64> {
    crate::exact::primitive(h).iter().map(|z| qz(z).to_integer().to_string().parse().unwrap_or(0)).collect()
}
