//! Duistermaat–Heckman densities of marginal spectra of random pure states.
//!
//! The abelian density (distribution of the diagonal weights `Σ |ψ_i|² ω_i`) is evaluated
//! exactly from the leading coefficient of the lattice-point count of dilated fibers. It is
//! polynomial on the chambers cut out by hyperplanes through weights; chamber polynomials are
//! recovered by interpolation or by summing wall jumps. The non-abelian density on the
//! dominant chamber follows by the derivative principle `f_K = p_K Π_{α>0} ∂_{−α} f_T`.
//!
//! Densities are taken with respect to Lebesgue measure in the natural chart of
//! [`Coordinates::natural`] (pairing coordinates for qubits, reduced ones otherwise).

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coords::{CoordKind, Coordinates};
use crate::counting::{contingency_count, VectorPartitionProblem};
use crate::error::{Error, Result};
use crate::exact::{binomial, det, factorial, lcm_z, nullspace, qi, qz, solve, Q, Z};
use crate::lattice::{positive_roots, sym_weights, tensor_weights, RepKind, WeightSystem, YoungDiagram};
use crate::moment_polytope::{combinations, cross_product};
use crate::multiplicities::kronecker;
use crate::poly::{monomials_upto, Poly};
use crate::polytope::{HalfSpace, Polytope};

/// Row basis of the integer lattice spanned by `gens`, upper triangular.
fn hermite_basis(gens: &[Vec<i64>], r: usize) -> Vec<Vec<i128>> {
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
    let mut out = Vec::new();
    for c in 0..r {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][c] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][c].abs()).expect("nonempty");
            let pivot = rows[p].clone();
            for &i in &nz {
                if i != p {
                    let q = rows[i][c].div_euclid(pivot[c]);
                    for (x, y) in rows[i].iter_mut().zip(&pivot) {
                        *x -= q * y;
                    }
                }
            }
        }
        if let Some(p) = (0..rows.len()).find(|&i| rows[i][c] != 0) {
            let mut row = rows.swap_remove(p);
            if row[c] < 0 {
                row.iter_mut().for_each(|x| *x = -*x);
            }
            out.push(row);
        }
    }
    out
}

fn in_lattice(basis: &[Vec<i128>], v: &[i128]) -> bool {
    let mut v = v.to_vec();
    for row in basis {
        let c = row.iter().position(|&x| x != 0).expect("nonzero row");
        if v[c] % row[c] != 0 {
            return false;
        }
        let q = v[c] / row[c];
        for (x, y) in v.iter_mut().zip(row) {
            *x -= q * y;
        }
    }
    v.iter().all(|&x| x == 0)
}

enum FiberCounter {
    /// Tensor product of at most three factors: contingency tables with given margins.
    Tables(usize),
    /// `Sym^n(C²)`: Gaussian binomial coefficients.
    Gaussian(usize),
    Partitions(VectorPartitionProblem),
}

/// Exact evaluator of the abelian density of a weight system.
pub struct AbelianDensity {
    pub ws: WeightSystem,
    pub coords: Coordinates,
    /// Distinct projected weights with multiplicities.
    pub points: Vec<(Vec<Q>, usize)>,
    /// `D`, the dimension of the representation.
    pub total_dim: usize,
    /// `r_T`, the dimension of the abelian polytope.
    pub rank: usize,
    pub polytope: Polytope,
    basis: Vec<Vec<i128>>,
    covolume: i128,
    base: Vec<i128>,
    counter: FiberCounter,
}

fn to_int(v: &[Q]) -> Vec<i64> {
    v.iter().map(|x| x.to_integer().to_i64().expect("small integer coordinate")).collect()
}

impl AbelianDensity {
    pub fn new(ws: &WeightSystem) -> Result<Self> {
        let coords = Coordinates::natural(ws)?;
        let points: Vec<(Vec<Q>, usize)> = ws.distinct().into_iter().map(|(w, m)| (coords.project(&w), m)).collect();
        let r = coords.dim();
        let polytope = Polytope::from_points(&points.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>())?;
        if polytope.dim() != r {
            return Err(Error::Invalid(format!("weights span dimension {} of a {r}-dimensional chart", polytope.dim())));
        }
        let base = to_int(&points[0].0);
        let gens: Vec<Vec<i64>> = points[1..].iter().map(|(p, _)| to_int(p).iter().zip(&base).map(|(a, b)| a - b).collect()).collect();
        let basis = hermite_basis(&gens, r);
        let covolume = basis.iter().enumerate().map(|(i, row)| row[i]).product::<i128>().abs();
        let counter = match &ws.kind {
            RepKind::Tensor(dims) if dims.len() <= 3 => FiberCounter::Tables(dims.len()),
            RepKind::Sym { d: 2, k } => FiberCounter::Gaussian(*k),
            _ => {
                let mut cols = Vec::new();
                for w in &ws.weights {
                    let mut c = vec![1];
                    c.extend_from_slice(&w.coords);
                    cols.push(c);
                }
                let target = vec![0; ws.group.weight_len() + 1];
                FiberCounter::Partitions(VectorPartitionProblem::new(cols, target)?)
            }
        };
        Ok(AbelianDensity {
            ws: ws.clone(),
            coords,
            points,
            total_dim: ws.dim(),
            rank: r,
            polytope,
            basis,
            covolume,
            base: base.iter().map(|&x| x as i128).collect(),
            counter,
        })
    }

    /// Degree bound `D − 1 − r_T` of the chamber polynomials.
    pub fn degree(&self) -> usize {
        self.total_dim - 1 - self.rank
    }

    /// Number of `x ∈ Z^D_{≥0}` with `Σ x = k` and `Σ x_i ω_i` projecting to `y`.
    pub fn fiber_count(&self, k: i64, y: &[i64]) -> BigUint {
        let scaled = Coordinates {
            kind: self.coords.kind,
            group: self.coords.group.clone(),
            sums: self.coords.sums.iter().map(|s| s * qi(k)).collect(),
        };
        let full = scaled.lift(&y.iter().map(|&v| qi(v)).collect::<Vec<_>>());
        if full.iter().any(|x| !x.is_integer() || x.is_negative()) {
            return BigUint::zero();
        }
        let full = to_int(&full);
        match &self.counter {
            FiberCounter::Tables(n) => {
                let dims = self.ws.group.dims();
                let offs = self.ws.group.offsets();
                let block = |i: usize| -> Vec<i64> { full[offs[i]..offs[i] + dims[i]].to_vec() };
                let kk = vec![k];
                match n {
                    1 => {
                        let a = block(0);
                        contingency_count(k, &a, &kk, &kk)
                    }
                    2 => contingency_count(k, &block(0), &block(1), &kk),
                    _ => contingency_count(k, &block(0), &block(1), &block(2)),
                }
            }
            FiberCounter::Gaussian(n) => gaussian_coefficient(*n, k, full[1]),
            FiberCounter::Partitions(p) => {
                let mut t = vec![k];
                t.extend(full);
                p.with_target(t).count()
            }
        }
    }

    /// Density at a chart point, from the leading term of the dilated fiber counts.
    pub fn at(&self, lambda: &[Q]) -> Result<Q> {
        if lambda.len() != self.rank {
            return Err(Error::Invalid(format!("expected {} coordinates", self.rank)));
        }
        if !self.polytope.contains(lambda) {
            return Ok(Q::zero());
        }
        let den = lambda.iter().fold(Z::one(), |acc, x| lcm_z(&acc, x.denom()));
        let den = den.to_i64().ok_or_else(|| Error::Invalid("denominator too large".into()))?;
        let scaled: Vec<i128> = lambda.iter().map(|x| (x * qi(den)).to_integer().to_i128().expect("small")).collect();
        let mut k0 = None;
        for m in 1..=self.covolume.max(1) as i64 {
            let v: Vec<i128> = scaled.iter().zip(&self.base).map(|(a, b)| (a - b * den as i128) * m as i128).collect();
            if in_lattice(&self.basis, &v) {
                k0 = Some(den * m);
                break;
            }
        }
        let k0 = k0.expect("the quotient lattice has order equal to the covolume");
        let deg = self.degree();
        let mut cache: HashMap<i64, Q> = HashMap::new();
        let mut count = |t: i64| -> Q {
            cache
                .entry(t)
                .or_insert_with(|| {
                    let k = k0 * t;
                    let y: Vec<i64> = lambda.iter().map(|x| (x * qi(k)).to_integer().to_i64().expect("small")).collect();
                    qz(&Z::from(self.fiber_count(k, &y)))
                })
                .clone()
        };
        // Counts at multiples of the period are an honest polynomial in the multiple.
        let p = self.fiber_period(lambda, k0);
        let ss: Vec<i64> = (1..=deg as i64 + 3).collect();
        let vals: Vec<Q> = ss.iter().map(|&s| count(p * s)).collect();
        let xs: Vec<Q> = ss.iter().map(|&s| qi(s)).collect();
        let newton = newton_coefficients(&xs[..=deg], &vals[..=deg]);
        for j in deg + 1..ss.len() {
            if newton_eval(&newton, &xs[..=deg], &xs[j]) != vals[j] {
                return Err(Error::FitFailed { periods: vec![p as usize] });
            }
        }
        let lead = &newton[deg] / qi(p).pow(deg as i32);
        let scale = qz(&factorial(self.total_dim - 1)) / (qi(k0).pow(deg as i32) * qi(self.covolume as i64));
        Ok(lead * scale)
    }

    /// Denominator of the fiber polytope over `lambda` dilated by `k0`, a period of its
    /// Ehrhart quasi-polynomial. Vertices are the nonnegative basic solutions.
    fn fiber_period(&self, lambda: &[Q], k0: i64) -> i64 {
        let r = self.rank;
        let cols: Vec<Vec<Q>> = self
            .points
            .iter()
            .map(|(y, _)| std::iter::once(Q::one()).chain(y.iter().cloned()).collect())
            .collect();
        let rhs: Vec<Q> = std::iter::once(qi(k0)).chain(lambda.iter().map(|x| x * qi(k0))).collect();
        let mut den = Z::one();
        for first in 0..cols.len() {
            for basis in combinations(cols.len(), r + 1, first) {
                let m: Vec<Vec<Q>> = (0..=r).map(|i| basis.iter().map(|&j| cols[j][i].clone()).collect()).collect();
                if let Some(x) = solve(&m, &rhs) {
                    if x.iter().all(|v| !v.is_negative()) {
                        den = x.iter().fold(den, |acc, v| lcm_z(&acc, v.denom()));
                    }
                }
            }
        }
        den.to_i64().expect("small period")
    }
}

/// Coefficient of `q^m` in the Gaussian binomial `[n+k choose n]_q`, i.e. the number of
/// `x ∈ Z^{n+1}_{≥0}` with `Σ x_j = k` and `Σ j x_j = m`.
fn gaussian_coefficient(n: usize, k: i64, m: i64) -> BigUint {
    if m < 0 || k < 0 {
        return BigUint::zero();
    }
    let m = m as usize;
    let mut c = vec![num_bigint::BigInt::zero(); m + 1];
    c[0] = num_bigint::BigInt::one();
    for i in 1..=n {
        let shift = k as usize + i;
        for j in (shift..=m).rev() {
            let v = c[j - shift].clone();
            c[j] -= v;
        }
        for j in i..=m {
            let v = c[j - i].clone();
            c[j] += v;
        }
    }
    c[m].to_biguint().unwrap_or_default()
}

fn newton_coefficients(xs: &[Q], ys: &[Q]) -> Vec<Q> {
    let n = xs.len();
    let mut c = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = (&c[i] - &c[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    c
}

fn newton_eval(c: &[Q], xs: &[Q], x: &Q) -> Q {
    let mut acc = c[c.len() - 1].clone();
    for i in (0..c.len() - 1).rev() {
        acc = acc * (x - &xs[i]) + &c[i];
    }
    acc
}

/// Density of `Σ |ψ_i|² ω_i` at `lambda` (natural chart coordinates).
pub fn abelian_density_at(ws: &WeightSystem, lambda: &[Q]) -> Result<Q> {
    AbelianDensity::new(ws)?.at(lambda)
}

/// Hyperplanes of the chart spanned by weights, normalized with positive leading coefficient.
pub fn critical_walls(ad: &AbelianDensity) -> Vec<HalfSpace> {
    let r = ad.rank;
    let rows: Vec<Vec<i64>> = ad
        .points
        .iter()
        .map(|(p, _)| {
            let mut v = to_int(p);
            v.push(-1);
            v
        })
        .collect();
    let mut keys = std::collections::BTreeSet::new();
    for first in 0..rows.len() {
        for subset in combinations(rows.len(), r, first) {
            let sel: Vec<Vec<i64>> = subset.iter().map(|&i| rows[i].clone()).collect();
            if let Some(v) = cross_product(&sel) {
                keys.insert(v);
            }
        }
    }
    keys.into_iter()
        .map(|v| HalfSpace { normal: v[..r].iter().map(|&x| qi(x)).collect(), offset: qi(v[r]) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Neighbor {
    Chamber(usize),
    /// Across a facet of the abelian polytope, where the density vanishes.
    Outside,
    /// Across a wall of the positive Weyl chamber (dominant decompositions only).
    Weyl,
}

#[derive(Clone, Debug)]
pub struct Adjacency {
    pub chamber: usize,
    pub neighbor: Neighbor,
    /// Facet inequality of `chamber`, so the chamber lies on the nonnegative side.
    pub wall: HalfSpace,
}

#[derive(Clone, Debug)]
pub struct ChamberDecomposition {
    pub coords: Coordinates,
    pub region: Polytope,
    pub walls: Vec<HalfSpace>,
    pub chambers: Vec<Polytope>,
    pub adjacency: Vec<Adjacency>,
}

impl ChamberDecomposition {
    /// Index of a chamber containing `y` (closed chambers, first match).
    pub fn locate(&self, y: &[Q]) -> Option<usize> {
        self.chambers.iter().position(|c| c.contains(y))
    }
}

/// Positive Weyl chamber of the group, pulled back to the chart.
pub fn weyl_chamber(coords: &Coordinates) -> Vec<HalfSpace> {
    positive_roots(&coords.group)
        .iter()
        .filter(|a| a.j == a.i + 1)
        .map(|a| {
            let v: Vec<Q> = a.vector(&coords.group).coords.iter().map(|&x| qi(x)).collect();
            let (h, c0) = coords.pullback_functional(&v);
            HalfSpace { normal: h, offset: -c0 }.normalized()
        })
        .collect()
}

fn split_cells(region: Polytope, walls: &[HalfSpace]) -> Result<Vec<Polytope>> {
    let r = region.ambient;
    let mut cells = vec![region];
    for w in walls {
        let mut next = Vec::with_capacity(cells.len());
        for c in cells {
            let below = c.vertices.iter().any(|v| w.slack(v).is_negative());
            let above = c.vertices.iter().any(|v| w.slack(v).is_positive());
            if below && above {
                for side in [w.clone(), w.flipped()] {
                    let mut hs = c.halfspaces.clone();
                    hs.push(side);
                    next.push(Polytope::from_halfspaces(&hs, r)?);
                }
            } else {
                next.push(c);
            }
        }
        cells = next;
    }
    Ok(cells)
}

fn build_decomposition(ad: &AbelianDensity, region: Polytope, weyl: &[HalfSpace]) -> Result<ChamberDecomposition> {
    let walls = critical_walls(ad);
    let chambers = split_cells(region.clone(), &walls)?;
    let facet_data: Vec<Vec<(HalfSpace, Vec<Vec<Q>>)>> = chambers
        .iter()
        .map(|c| {
            c.halfspaces
                .iter()
                .map(|h| {
                    let h = h.normalized();
                    let mut vs: Vec<Vec<Q>> = c.vertices.iter().filter(|v| h.slack(v).is_zero()).cloned().collect();
                    vs.sort();
                    (h, vs)
                })
                .collect()
        })
        .collect();
    let mut adjacency = Vec::new();
    for (i, facets) in facet_data.iter().enumerate() {
        for (h, vs) in facets {
            let neighbor = if weyl.iter().any(|w| w == h) {
                Neighbor::Weyl
            } else {
                let flipped = h.flipped().normalized();
                let j = facet_data.iter().enumerate().find(|(j, fs)| *j != i && fs.iter().any(|(g, ws)| *g == flipped && ws == vs));
                match j {
                    Some((j, _)) => Neighbor::Chamber(j),
                    None => Neighbor::Outside,
                }
            };
            adjacency.push(Adjacency { chamber: i, neighbor, wall: h.clone() });
        }
    }
    Ok(ChamberDecomposition { coords: ad.coords.clone(), region, walls, chambers, adjacency })
}

/// Regular chambers of the whole abelian polytope.
pub fn chamber_decomposition(ws: &WeightSystem) -> Result<ChamberDecomposition> {
    let ad = AbelianDensity::new(ws)?;
    build_decomposition(&ad, ad.polytope.clone(), &[])
}

/// Regular chambers of the abelian polytope intersected with the positive Weyl chamber.
pub fn dominant_chamber_decomposition(ws: &WeightSystem) -> Result<ChamberDecomposition> {
    let ad = AbelianDensity::new(ws)?;
    dominant_decomposition(&ad)
}

fn dominant_decomposition(ad: &AbelianDensity) -> Result<ChamberDecomposition> {
    let weyl = weyl_chamber(&ad.coords);
    let mut hs = ad.polytope.halfspaces.clone();
    hs.extend(weyl.iter().cloned());
    let region = Polytope::from_halfspaces(&hs, ad.rank)?;
    build_decomposition(ad, region, &weyl)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberPolynomial {
    pub chamber: usize,
    pub poly: Poly,
}

/// A chamber decomposition with one polynomial per chamber.
#[derive(Clone, Debug)]
pub struct PiecewiseDensity {
    pub decomposition: ChamberDecomposition,
    pub pieces: Vec<ChamberPolynomial>,
}

impl PiecewiseDensity {
    /// Value at `y`; zero outside the decomposed region.
    pub fn eval(&self, y: &[Q]) -> Q {
        match self.decomposition.locate(y) {
            Some(i) => self.pieces[i].poly.eval(y),
            None => Q::zero(),
        }
    }

    /// `∫ g·f` over the region.
    pub fn integrate_against(&self, g: &Poly) -> Q {
        self.pieces.iter().map(|p| self.decomposition.chambers[p.chamber].integrate(&(g * &p.poly))).sum()
    }

    pub fn total_mass(&self) -> Q {
        let n = self.decomposition.coords.dim();
        self.integrate_against(&Poly::one(n))
    }

    /// Mass of the region cut out by extra inequalities.
    pub fn mass_in(&self, cut: &[HalfSpace]) -> Result<Q> {
        let r = self.decomposition.coords.dim();
        let mut total = Q::zero();
        for p in &self.pieces {
            let c = &self.decomposition.chambers[p.chamber];
            let mut hs = c.halfspaces.clone();
            hs.extend(cut.iter().cloned());
            match Polytope::from_halfspaces(&hs, r) {
                Ok(cell) if cell.is_full_dimensional() => total += cell.integrate(&p.poly),
                Ok(_) | Err(Error::Empty) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(total)
    }
}

/// Interior principal-lattice points of degree `deg` in a simplex, plus two held-out points.
fn interpolation_points(simplex: &[Vec<Q>], deg: usize) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
    let r = simplex.len() - 1;
    let m = deg + r + 1;
    let point = |a: &[usize], total: usize| -> Vec<Q> {
        (0..simplex[0].len())
            .map(|c| a.iter().zip(simplex).map(|(&ai, v)| qi(ai as i64) * &v[c]).sum::<Q>() / qi(total as i64))
            .collect()
    };
    let mut main = Vec::new();
    let mut a = vec![1usize; r + 1];
    compositions_into(m - (r + 1), r + 1, &mut a, 0, &mut |v| main.push(point(v, m)));
    let mut held = Vec::new();
    let mut b = vec![1usize; r + 1];
    compositions_into(m + 1 - (r + 1), r + 1, &mut b, 0, &mut |v| {
        if held.len() < 2 {
            held.push(point(v, m + 1))
        }
    });
    (main, held)
}

/// Calls `f` on every `a` with entries `1 + e_i`, `Σ e_i = extra`.
fn compositions_into(extra: usize, parts: usize, a: &mut Vec<usize>, pos: usize, f: &mut dyn FnMut(&[usize])) {
    if pos == parts - 1 {
        a[pos] = 1 + extra;
        f(a);
        a[pos] = 1;
        return;
    }
    for e in 0..=extra {
        a[pos] = 1 + e;
        compositions_into(extra - e, parts, a, pos + 1, f);
    }
    a[pos] = 1;
}

fn interpolate_chamber(ad: &AbelianDensity, chamber: &Polytope) -> Result<Poly> {
    let r = ad.rank;
    let deg = ad.degree();
    let simplex = chamber.triangulate().into_iter().next().ok_or_else(|| Error::Interpolation("empty chamber".into()))?;
    let (pts, held) = interpolation_points(&simplex, deg);
    let monos = monomials_upto(r, deg as u32);
    let values: Vec<Q> = pts.par_iter().map(|p| ad.at(p)).collect::<Result<Vec<_>>>()?;
    let matrix: Vec<Vec<Q>> = pts
        .iter()
        .map(|p| monos.iter().map(|e| Poly::monomial(e.clone(), Q::one()).eval(p)).collect())
        .collect();
    let coeffs = solve(&matrix, &values).ok_or_else(|| Error::Interpolation("sample points are not unisolvent".into()))?;
    let mut poly = Poly::zero(r);
    for (e, c) in monos.into_iter().zip(coeffs) {
        poly.add_term(e, c);
    }
    for h in &held {
        if poly.eval(h) != ad.at(h)? {
            return Err(Error::Interpolation(format!("held-out residue at {:?}", h.iter().map(crate::exact::fmt_q).collect::<Vec<_>>())));
        }
    }
    Ok(poly)
}

fn interpolate_all(ad: &AbelianDensity, dec: ChamberDecomposition) -> Result<PiecewiseDensity> {
    let pieces = dec
        .chambers
        .iter()
        .enumerate()
        .map(|(i, c)| Ok(ChamberPolynomial { chamber: i, poly: interpolate_chamber(ad, c)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewiseDensity { decomposition: dec, pieces })
}

/// Chamber polynomials of the abelian density over the whole abelian polytope, by interpolation.
pub fn chamber_polynomials(ws: &WeightSystem) -> Result<PiecewiseDensity> {
    let ad = AbelianDensity::new(ws)?;
    let dec = build_decomposition(&ad, ad.polytope.clone(), &[])?;
    interpolate_all(&ad, dec)
}

/// Chamber polynomials of the abelian density on the dominant region.
pub fn dominant_chamber_polynomials(ws: &WeightSystem) -> Result<PiecewiseDensity> {
    let ad = AbelianDensity::new(ws)?;
    let dec = dominant_decomposition(&ad)?;
    interpolate_all(&ad, dec)
}

struct WallData {
    /// `(ω, H) − c` for every weight off the wall, with multiplicity.
    off: Vec<Q>,
    on_points: Vec<Vec<Q>>,
    d0: usize,
}

fn wall_data(ad: &AbelianDensity, wall: &HalfSpace) -> WallData {
    let mut off = Vec::new();
    let mut on_points = Vec::new();
    let mut d0 = 0;
    for (p, m) in &ad.points {
        let s = wall.slack(p);
        if s.is_zero() {
            on_points.push(p.clone());
            d0 += m;
        } else {
            off.extend(std::iter::repeat(s).take(*m));
        }
    }
    WallData { off, on_points, d0 }
}

fn xi(wall: &HalfSpace) -> Vec<Q> {
    let nn = crate::exact::dot(&wall.normal, &wall.normal);
    wall.normal.iter().map(|x| x / &nn).collect()
}

fn wall_linear(wall: &HalfSpace) -> Poly {
    Poly::linear(&wall.normal, -wall.offset.clone())
}

/// Jump `f_+ − f_−` across a wall carrying exactly `r_T` weights (positive side: slack > 0).
pub fn jump_minimal_wall(ad: &AbelianDensity, wall: &HalfSpace) -> Result<Poly> {
    let wd = wall_data(ad, wall);
    if wd.d0 != ad.rank || wd.on_points.len() != ad.rank {
        return Err(Error::UnsupportedWall(format!("{wall} carries {} weights, not {}", wd.d0, ad.rank)));
    }
    let d = ad.total_dim;
    let mut vecs: Vec<Vec<Q>> =
        wd.on_points[1..].iter().map(|p| p.iter().zip(&wd.on_points[0]).map(|(a, b)| a - b).collect()).collect();
    vecs.push(xi(wall));
    let vol = det(&vecs).abs();
    if vol.is_zero() {
        return Err(Error::UnsupportedWall(format!("{wall}: wall weights are affinely dependent")));
    }
    let n = d - wd.d0;
    let prod: Q = wd.off.iter().fold(Q::one(), |acc, a| acc * a);
    let coef = qz(&factorial(d - 1)) / qz(&factorial(n - 1)) / (vol * prod);
    Ok(wall_linear(wall).pow((n - 1) as u32).scale(&coef))
}

/// Complete homogeneous symmetric polynomials `h_0..=h_m` of `xs`.
fn complete_homogeneous(xs: &[Q], m: usize) -> Vec<Q> {
    let mut h = vec![Q::zero(); m + 1];
    h[0] = Q::one();
    for x in xs {
        for j in 1..=m {
            let add = &h[j - 1] * x;
            h[j] += add;
        }
    }
    h
}

/// Jump across a point wall of a one-dimensional abelian polytope.
pub fn jump_zero_dim_wall(ad: &AbelianDensity, wall: &HalfSpace) -> Result<Poly> {
    if ad.rank != 1 {
        return Err(Error::UnsupportedWall(format!("{wall}: the polytope is not one-dimensional")));
    }
    let wd = wall_data(ad, wall);
    if wd.d0 == 0 {
        return Err(Error::UnsupportedWall(format!("{wall} carries no weight")));
    }
    let d = ad.total_dim;
    let n = d - wd.d0;
    let m = wd.d0 - 1;
    let inv: Vec<Q> = wd.off.iter().map(|a| a.recip()).collect();
    let prod_inv: Q = inv.iter().fold(Q::one(), |acc, a| acc * a);
    let h = complete_homogeneous(&inv, m);
    let vol = xi(wall)[0].abs();
    let ell = wall_linear(wall);
    let mut out = Poly::zero(1);
    for j in 0..=m {
        let e = n + j;
        if e == 0 {
            continue;
        }
        let sign = if j % 2 == 0 { qi(1) } else { qi(-1) };
        let c = qz(&binomial(m as i64, j as i64)) * qz(&factorial(j)) * &h[j] * sign / qz(&factorial(e - 1));
        out = &out + &ell.pow((e - 1) as u32).scale(&c);
    }
    let scale = qz(&factorial(d - 1)) / qz(&factorial(m)) * prod_inv / vol;
    Ok(out.scale(&scale))
}

/// Jump by the minimal or zero-dimensional formula, whichever applies.
pub fn jump(ad: &AbelianDensity, wall: &HalfSpace) -> Result<Poly> {
    match jump_minimal_wall(ad, wall) {
        Ok(p) => Ok(p),
        Err(Error::UnsupportedWall(_)) if ad.rank == 1 => jump_zero_dim_wall(ad, wall),
        Err(e) => Err(e),
    }
}

/// Result of the jump route: chamber polynomials and how each was obtained.
#[derive(Clone, Debug)]
pub struct JumpRoute {
    pub density: PiecewiseDensity,
    /// `true` where the polynomial came from a wall jump, `false` where interpolation was needed.
    pub by_jump: Vec<bool>,
}

/// Chamber polynomials of the whole abelian polytope by summing wall jumps, starting from the
/// vanishing density outside. Chambers only reachable through unsupported walls are
/// interpolated and the walk continues from there.
pub fn chamber_polynomials_by_jumps(ws: &WeightSystem) -> Result<JumpRoute> {
    let ad = AbelianDensity::new(ws)?;
    let dec = build_decomposition(&ad, ad.polytope.clone(), &[])?;
    let n = dec.chambers.len();
    let mut known: Vec<Option<Poly>> = vec![None; n];
    let mut by_jump = vec![false; n];
    let zero = Poly::zero(ad.rank);
    loop {
        let mut progress = true;
        while progress {
            progress = false;
            for a in &dec.adjacency {
                if known[a.chamber].is_some() {
                    continue;
                }
                let base = match a.neighbor {
                    Neighbor::Outside => &zero,
                    Neighbor::Chamber(j) => match &known[j] {
                        Some(p) => p,
                        None => continue,
                    },
                    Neighbor::Weyl => continue,
                };
                match jump(&ad, &a.wall) {
                    Ok(j) => {
                        known[a.chamber] = Some(base + &j);
                        by_jump[a.chamber] = true;
                        progress = true;
                    }
                    Err(Error::UnsupportedWall(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        let Some(i) = (0..n).find(|&i| known[i].is_none()) else { break };
        known[i] = Some(interpolate_chamber(&ad, &dec.chambers[i])?);
    }
    let pieces = known
        .into_iter()
        .enumerate()
        .map(|(i, p)| ChamberPolynomial { chamber: i, poly: p.expect("every chamber is filled") })
        .collect();
    Ok(JumpRoute { density: PiecewiseDensity { decomposition: dec, pieces }, by_jump })
}

/// `p_K(λ) = Π_k Π_{i<j} (λ_{k,i} − λ_{k,j})/(j − i)` as a polynomial in chart coordinates.
pub fn vandermonde_poly(coords: &Coordinates) -> Poly {
    let r = coords.dim();
    let l0 = coords.lift(&vec![Q::zero(); r]);
    let lin: Vec<Vec<Q>> = (0..r)
        .map(|i| {
            let mut e = vec![Q::zero(); r];
            e[i] = Q::one();
            coords.lift(&e).iter().zip(&l0).map(|(a, b)| a - b).collect()
        })
        .collect();
    let full = |idx: usize| -> Poly { Poly::linear(&lin.iter().map(|v| v[idx].clone()).collect::<Vec<_>>(), l0[idx].clone()) };
    let mut p = Poly::one(r);
    let offs = coords.group.offsets();
    for (k, f) in coords.group.factors.iter().enumerate() {
        for i in 0..f.dim {
            for j in i + 1..f.dim {
                let diff = &full(offs[k] + i) - &full(offs[k] + j);
                p = &p * &diff.scale(&Q::new(1.into(), ((j - i) as i64).into()));
            }
        }
    }
    p
}

/// A wall where the derivative principle produces a singular (non-density) contribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularWall {
    pub wall: HalfSpace,
    /// Number of roots transverse to the wall.
    pub transverse: usize,
    /// Order to which the jump vanishes on the wall.
    pub order: usize,
}

/// Non-abelian density on the dominant region, with any singular walls found.
#[derive(Clone, Debug)]
pub struct NonAbelianDensity {
    pub density: PiecewiseDensity,
    pub singular: Vec<SingularWall>,
}

impl NonAbelianDensity {
    pub fn is_density(&self) -> bool {
        self.singular.is_empty()
    }
}

/// Largest `j ≤ up_to` such that `∂_h^i J` vanishes on the wall for all `i < j`.
pub fn vanishing_order(j: &Poly, wall: &HalfSpace, up_to: usize) -> usize {
    let r = wall.normal.len();
    let basis = nullspace(&[wall.normal.clone()], r);
    let p0 = {
        let k = crate::exact::dot(&wall.normal, &wall.normal);
        wall.normal.iter().map(|x| x * &wall.offset / &k).collect::<Vec<_>>()
    };
    let mut d = j.clone();
    for order in 0..up_to {
        let restricted_zero = if basis.is_empty() {
            d.eval(&p0).is_zero()
        } else {
            let subs: Vec<Poly> = (0..r)
                .map(|i| Poly::linear(&basis.iter().map(|b| b[i].clone()).collect::<Vec<_>>(), p0[i].clone()))
                .collect();
            d.compose(&subs).is_zero()
        };
        if !restricted_zero {
            return order;
        }
        d = d.directional(&wall.normal);
    }
    up_to
}

/// Applies `f_K = p_K Π_{α>0} ∂_{−α} f_T` chamberwise on a dominant decomposition.
pub fn derivative_principle(abelian: &PiecewiseDensity) -> Result<NonAbelianDensity> {
    let dec = &abelian.decomposition;
    let coords = &dec.coords;
    let roots: Vec<Vec<Q>> = positive_roots(&coords.group)
        .iter()
        .map(|a| coords.project_full(&a.vector(&coords.group).coords.iter().map(|&x| qi(-x)).collect::<Vec<_>>()))
        .collect();
    let pk = vandermonde_poly(coords);
    let pieces = abelian
        .pieces
        .iter()
        .map(|p| {
            let mut d = p.poly.clone();
            for dir in &roots {
                d = d.directional(dir);
            }
            ChamberPolynomial { chamber: p.chamber, poly: &pk * &d }
        })
        .collect();
    let mut singular = Vec::new();
    for a in &dec.adjacency {
        let own = &abelian.pieces[a.chamber].poly;
        let diff = match a.neighbor {
            Neighbor::Weyl => continue,
            Neighbor::Outside => own.clone(),
            Neighbor::Chamber(j) if j > a.chamber => own - &abelian.pieces[j].poly,
            Neighbor::Chamber(_) => continue,
        };
        let transverse = roots.iter().filter(|v| !crate::exact::dot(v, &a.wall.normal).is_zero()).count();
        let order = vanishing_order(&diff, &a.wall, transverse);
        if order < transverse {
            let w = SingularWall { wall: a.wall.normalized(), transverse, order };
            if !singular.iter().any(|s: &SingularWall| s.wall == w.wall || s.wall == w.wall.flipped().normalized()) {
                singular.push(w);
            }
        }
    }
    Ok(NonAbelianDensity { density: PiecewiseDensity { decomposition: dec.clone(), pieces }, singular })
}

/// Non-abelian density of a weight system on its dominant region.
pub fn non_abelian_density(ws: &WeightSystem) -> Result<NonAbelianDensity> {
    derivative_principle(&dominant_chamber_polynomials(ws)?)
}

/// Spectrum density of the smaller marginal of a random pure state on `C^a ⊗ C^b`, `a ≤ b`.
pub fn bipartite_density(a: usize, b: usize) -> Result<NonAbelianDensity> {
    if a > b || a < 2 {
        return Err(Error::Invalid("need 2 ≤ a ≤ b".into()));
    }
    let ws = tensor_weights(&[a, b])?.restrict(&[0])?;
    non_abelian_density(&ws)
}

/// Mean of `1 − tr ρ₁²` over random states of `Sym^n(C²)`, by exact integration.
pub fn average_linear_entropy_bosonic(n: usize) -> Result<Q> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let ws = sym_weights(2, n)?;
    let na = non_abelian_density(&ws)?;
    let y2 = &Poly::var(1, 0) * &Poly::var(1, 0);
    let regular_mass = na.density.total_mass();
    let mut m2 = na.density.integrate_against(&y2);
    // The one-dimensional case can only lose mass to isolated points; attribute it there.
    if !na.singular.is_empty() {
        if na.singular.len() != 1 {
            return Err(Error::UnsupportedWall("several singular points".into()));
        }
        let w = &na.singular[0].wall;
        let point = &w.offset / &w.normal[0];
        m2 += (Q::one() - regular_mass) * &point * &point;
    }
    let nn = qi(n as i64);
    Ok(Q::new(1.into(), 2.into()) - m2 / (qi(2) * &nn * &nn))
}

/// Rescaled Kronecker coefficients approximating the spectrum density at `lambda`.
///
/// `lambda` holds one normalized decreasing spectrum per factor. The value at level `k` is
/// `(D−1)! p(λ) g_{kλ} k^{r−d}` converted to the natural chart, with
/// `d = D − 1 − Σ_i binom(d_i, 2)` and `r = Σ_i (d_i − 1)`.
pub fn semiclassical_density_at(dims: &[usize], lambda: &[Vec<Q>], ks: &[u32]) -> Result<Vec<Q>> {
    if dims.len() != 3 || lambda.len() != 3 {
        return Err(Error::Invalid("three factors are required".into()));
    }
    let big_d: usize = dims.iter().product();
    let r: i64 = dims.iter().map(|&d| d as i64 - 1).sum();
    let d_exp: i64 = big_d as i64 - 1 - dims.iter().map(|&d| (d * (d - 1) / 2) as i64).sum::<i64>();
    let mut p = Q::one();
    for (spec, &d) in lambda.iter().zip(dims) {
        if spec.len() != d || spec.iter().sum::<Q>() != Q::one() {
            return Err(Error::Invalid("each spectrum must have d_i entries summing to 1".into()));
        }
        for i in 0..d {
            for j in i + 1..d {
                p *= (&spec[i] - &spec[j]) / qi((j - i) as i64);
            }
        }
    }
    let jac = if dims.iter().all(|&d| d == 2) { Q::new(1.into(), Z::from(2).pow(dims.len() as u32)) } else { Q::one() };
    let fact = qz(&factorial(big_d - 1));
    ks.iter()
        .map(|&k| {
            let diagrams = lambda
                .iter()
                .map(|spec| {
                    let rows = spec
                        .iter()
                        .map(|x| {
                            let v = x * qi(k as i64);
                            if !v.is_integer() {
                                return Err(Error::Invalid(format!("k = {k} does not clear the denominators")));
                            }
                            Ok(v.to_integer().to_u32().expect("small row"))
                        })
                        .collect::<Result<Vec<u32>>>()?;
                    YoungDiagram::new(rows)
                })
                .collect::<Result<Vec<_>>>()?;
            let g = kronecker(&diagrams[0], &diagrams[1], &diagrams[2]);
            let scale = qi(k as i64).pow((r - d_exp) as i32);
            Ok(&fact * &p * qz(&Z::from(g)) * scale * &jac)
        })
        .collect()
}

/// Chart point of a set of normalized spectra (pairing for qubits, reduced otherwise).
pub fn chart_point(lambda: &[Vec<Q>]) -> Vec<Q> {
    if lambda.iter().all(|s| s.len() == 2) {
        lambda.iter().map(|s| &s[0] - &s[1]).collect()
    } else {
        lambda.iter().flat_map(|s| s[..s.len() - 1].iter().cloned()).collect()
    }
}

/// Chart kind used for a tensor product with these dimensions.
pub fn natural_kind(dims: &[usize]) -> CoordKind {
    if dims.iter().all(|&d| d == 2) {
        CoordKind::Pairing
    } else {
        CoordKind::Reduced
    }
}

/// Coefficients of `poly` keyed by exponent vector, for serialization.
pub fn poly_terms(poly: &Poly) -> BTreeMap<Vec<u32>, Q> {
    poly.terms().map(|(e, c)| (e.clone(), c.clone())).collect()
}
