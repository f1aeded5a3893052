//! Exact rational polytopes: H- and V-representations, membership, L1 distance,
//! triangulation and polynomial integration.
//!
//! Vertex enumeration and convex hulls both use the double-description method
//! on a homogenized cone, with the combinatorial adjacency test.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{affine_dim, dot, fmt_q, inverse, primitive, qz, rank, rref, Q};
use crate::lp;
use crate::poly::Poly;

/// Affine inequality `normal·x ≥ offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl HalfSpace {
    pub fn new(normal: Vec<Q>, offset: Q) -> Result<Self> {
        if normal.iter().all(|x| x.is_zero()) {
            return Err(Error::Invalid("halfspace normal is zero".into()));
        }
        Ok(HalfSpace { normal, offset })
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        dot(&self.normal, x) - &self.offset
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        !self.slack(x).is_negative()
    }

    /// Positive rescaling with a primitive integer normal.
    pub fn normalized(&self) -> HalfSpace {
        let ints = primitive(&self.normal);
        let i = self.normal.iter().position(|x| !x.is_zero()).expect("nonzero normal");
        let scale = qz(&ints[i]) / &self.normal[i];
        HalfSpace { normal: ints.iter().map(qz).collect(), offset: &self.offset * scale }
    }

    pub fn flipped(&self) -> HalfSpace {
        HalfSpace { normal: self.normal.iter().map(|x| -x).collect(), offset: -&self.offset }
    }
}

impl fmt::Display for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n: Vec<String> = self.normal.iter().map(fmt_q).collect();
        write!(f, "({})·x ≥ {}", n.join(","), fmt_q(&self.offset))
    }
}

/// Bounded convex polytope with both representations.
///
/// `equalities` describe the affine hull (`normal·x = offset`); `halfspaces` are the
/// irredundant facets relative to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub ambient: usize,
    pub equalities: Vec<HalfSpace>,
    pub halfspaces: Vec<HalfSpace>,
    pub vertices: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    /// Indices of the facets the point lies on.
    Boundary(Vec<usize>),
    /// Indices of violated facets; empty when only an equality fails.
    Outside(Vec<usize>),
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn superset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

fn normalize_ray(r: &[Q]) -> Vec<Q> {
    primitive(r).iter().map(qz).collect()
}

/// Extreme rays of the pointed cone `{y : rows·y ≥ 0}`; errors if the cone has lineality.
fn cone_rays(rows: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let m = rows.first().map(|r| r.len()).ok_or_else(|| Error::Invalid("no constraints".into()))?;
    // Choose m independent rows greedily.
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<Q>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(r.clone());
        if rank(&trial) > basis.len() {
            basis = trial;
            chosen.push(i);
            if chosen.len() == m {
                break;
            }
        }
    }
    if chosen.len() < m {
        return Err(Error::Unbounded);
    }
    let inv = inverse(&basis).expect("independent rows");
    let n = rows.len();
    let mut rays: Vec<(Vec<Q>, Bits)> = Vec::new();
    for j in 0..m {
        let col: Vec<Q> = (0..m).map(|i| inv[i][j].clone()).collect();
        let col = normalize_ray(&col);
        let mut bits = Bits::new(n);
        for &ci in &chosen {
            if dot(&rows[ci], &col).is_zero() {
                bits.set(ci);
            }
        }
        rays.push((col, bits));
    }
    let chosen_set: BTreeSet<usize> = chosen.iter().copied().collect();
    for (i, row) in rows.iter().enumerate() {
        if chosen_set.contains(&i) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|(r, _)| dot(row, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, v) in vals.iter().enumerate() {
                if v.is_zero() {
                    rays[k].1.set(i);
                }
            }
            continue;
        }
        let mut next: Vec<(Vec<Q>, Bits)> = Vec::new();
        for (k, v) in vals.iter().enumerate() {
            if !v.is_negative() {
                let mut r = rays[k].clone();
                if v.is_zero() {
                    r.1.set(i);
                }
                next.push(r);
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].1.and(&rays[q].1);
                if common.count() + 2 < m {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|t| t == p || t == q || !rays[t].1.superset_of(&common));
                if !adjacent {
                    continue;
                }
                let r: Vec<Q> = rays[q].0.iter().zip(&rays[p].0).map(|(a, b)| &vals[p] * a - &vals[q] * b).collect();
                let mut bits = common;
                bits.set(i);
                next.push((normalize_ray(&r), bits));
            }
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|(r, _)| r).collect())
}

/// Vertices of the bounded polytope `{x : h·x ≥ c for all halfspaces}`.
pub fn vertex_enumeration(halfspaces: &[HalfSpace], dim: usize) -> Result<Vec<Vec<Q>>> {
    let a: Vec<Vec<Q>> = halfspaces.iter().map(|h| h.normal.clone()).collect();
    let b: Vec<Q> = halfspaces.iter().map(|h| h.offset.clone()).collect();
    if a.is_empty() {
        return if dim == 0 { Ok(vec![vec![]]) } else { Err(Error::Unbounded) };
    }
    match lp::feasible_point(&a, &b, dim) {
        Err(Error::Infeasible) => return Err(Error::Empty),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(a.len() + 1);
    let mut x0 = vec![Q::zero(); dim + 1];
    x0[0] = Q::one();
    rows.push(x0);
    for h in halfspaces {
        let mut r = vec![-h.offset.clone()];
        r.extend(h.normal.iter().cloned());
        rows.push(r);
    }
    let rays = cone_rays(&rows)?;
    let mut verts = BTreeSet::new();
    for r in rays {
        if !r[0].is_positive() {
            return Err(Error::Unbounded);
        }
        verts.insert(r[1..].iter().map(|x| x / &r[0]).collect::<Vec<Q>>());
    }
    Ok(verts.into_iter().collect())
}

/// Facets of the convex hull of full-dimensional points.
fn full_dim_hull(points: &[Vec<Q>]) -> Result<Vec<HalfSpace>> {
    let n = points[0].len();
    if n == 0 {
        return Ok(vec![]);
    }
    // Cone of (h, c) with h·v − c ≥ 0.
    let rows: Vec<Vec<Q>> = points
        .iter()
        .map(|v| {
            let mut r = v.clone();
            r.push(-Q::one());
            r
        })
        .collect();
    let rays = cone_rays(&rows)?;
    let mut out = BTreeSet::new();
    for r in rays {
        if r[..n].iter().all(|x| x.is_zero()) {
            continue;
        }
        let h = HalfSpace { normal: r[..n].to_vec(), offset: r[n].clone() }.normalized();
        out.insert(h);
    }
    Ok(out.into_iter().collect())
}

impl Polytope {
    /// Convex hull of a nonempty point set, in any affine dimension.
    pub fn from_points(points: &[Vec<Q>]) -> Result<Polytope> {
        let Some(first) = points.first() else { return Err(Error::Empty) };
        let ambient = first.len();
        let pts: Vec<Vec<Q>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let d = affine_dim(&pts) as usize;
        // Affine hull: rows [x, −1]·[h; c] = 0 for every point.
        let rows: Vec<Vec<Q>> = pts
            .iter()
            .map(|p| {
                let mut r = p.clone();
                r.push(-Q::one());
                r
            })
            .collect();
        let eq_space = crate::exact::nullspace(&rows, ambient + 1);
        let equalities: Vec<HalfSpace> = eq_space
            .iter()
            .filter(|v| v[..ambient].iter().any(|x| !x.is_zero()))
            .map(|v| HalfSpace { normal: v[..ambient].to_vec(), offset: v[ambient].clone() }.normalized())
            .collect();
        // Coordinates that parametrize the affine hull: pivots of the difference vectors.
        let mut diffs: Vec<Vec<Q>> = pts[1..].iter().map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect()).collect();
        let pivots = if diffs.is_empty() { vec![] } else { rref(&mut diffs) };
        debug_assert_eq!(pivots.len(), d);
        let proj: Vec<Vec<Q>> = pts.iter().map(|p| pivots.iter().map(|&i| p[i].clone()).collect()).collect();
        let facets_low = if d == 0 {
            vec![]
        } else if d == 1 {
            let lo = proj.iter().map(|p| p[0].clone()).min().unwrap();
            let hi = proj.iter().map(|p| p[0].clone()).max().unwrap();
            vec![HalfSpace { normal: vec![Q::one()], offset: lo }, HalfSpace { normal: vec![-Q::one()], offset: -hi }]
        } else {
            full_dim_hull(&proj)?
        };
        let mut halfspaces: Vec<HalfSpace> = facets_low
            .into_iter()
            .map(|h| {
                let mut normal = vec![Q::zero(); ambient];
                for (k, &i) in pivots.iter().enumerate() {
                    normal[i] = h.normal[k].clone();
                }
                HalfSpace { normal, offset: h.offset }
            })
            .collect();
        halfspaces.sort();
        let vertices: Vec<Vec<Q>> = pts
            .iter()
            .filter(|p| {
                let tight: Vec<usize> = (0..halfspaces.len()).filter(|&i| halfspaces[i].slack(p).is_zero()).collect();
                let tv: Vec<Vec<Q>> = pts.iter().filter(|q| tight.iter().all(|&i| halfspaces[i].slack(q).is_zero())).cloned().collect();
                tv.len() == 1
            })
            .cloned()
            .collect();
        Ok(Polytope { ambient, equalities, halfspaces, vertices })
    }

    /// Bounded polytope from inequalities; the result carries an irredundant H-representation.
    pub fn from_halfspaces(halfspaces: &[HalfSpace], dim: usize) -> Result<Polytope> {
        let v = vertex_enumeration(halfspaces, dim)?;
        Polytope::from_points(&v)
    }

    pub fn dim(&self) -> usize {
        self.ambient - self.equalities.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equalities.is_empty()
    }

    pub fn membership(&self, x: &[Q]) -> Membership {
        if self.equalities.iter().any(|e| !e.slack(x).is_zero()) {
            return Membership::Outside(vec![]);
        }
        let slacks: Vec<Q> = self.halfspaces.iter().map(|h| h.slack(x)).collect();
        let violated: Vec<usize> = (0..slacks.len()).filter(|&i| slacks[i].is_negative()).collect();
        if !violated.is_empty() {
            return Membership::Outside(violated);
        }
        let tight: Vec<usize> = (0..slacks.len()).filter(|&i| slacks[i].is_zero()).collect();
        if tight.is_empty() {
            Membership::Inside
        } else {
            Membership::Boundary(tight)
        }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        !matches!(self.membership(x), Membership::Outside(_))
    }

    /// `min_{y ∈ P} ‖x − y‖₁` by linear programming.
    pub fn l1_distance(&self, x: &[Q]) -> Result<Q> {
        let n = self.ambient;
        // Variables (y, t).
        let mut a: Vec<Vec<Q>> = Vec::new();
        let mut b: Vec<Q> = Vec::new();
        for h in &self.halfspaces {
            let mut r = h.normal.clone();
            r.extend(std::iter::repeat(Q::zero()).take(n));
            a.push(r);
            b.push(h.offset.clone());
        }
        for e in &self.equalities {
            for s in [1, -1] {
                let mut r: Vec<Q> = e.normal.iter().map(|v| v * Q::from_integer(s.into())).collect();
                r.extend(std::iter::repeat(Q::zero()).take(n));
                a.push(r);
                b.push(&e.offset * Q::from_integer(s.into()));
            }
        }
        for i in 0..n {
            // t_i − y_i ≥ −x_i and t_i + y_i ≥ x_i.
            let mut r1 = vec![Q::zero(); 2 * n];
            r1[n + i] = Q::one();
            r1[i] = -Q::one();
            a.push(r1);
            b.push(-x[i].clone());
            let mut r2 = vec![Q::zero(); 2 * n];
            r2[n + i] = Q::one();
            r2[i] = Q::one();
            a.push(r2);
            b.push(x[i].clone());
        }
        let mut c = vec![Q::zero(); n];
        c.extend(std::iter::repeat(Q::one()).take(n));
        Ok(lp::minimize(&c, &a, &b)?.value)
    }

    /// Vertex-index sets of the facets.
    pub fn facet_vertex_sets(&self) -> Vec<Vec<usize>> {
        self.halfspaces
            .iter()
            .map(|h| (0..self.vertices.len()).filter(|&i| h.slack(&self.vertices[i]).is_zero()).collect())
            .collect()
    }

    /// Triangulation without new vertices (pulling the least vertex, recursively on facets).
    pub fn triangulate(&self) -> Vec<Vec<Vec<Q>>> {
        let d = self.dim();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let simplices = triangulate_face(&self.vertices, &all, &self.facet_vertex_sets(), d);
        simplices.into_iter().map(|s| s.iter().map(|&i| self.vertices[i].clone()).collect()).collect()
    }

    /// Integral of `p` over a full-dimensional polytope against Lebesgue measure.
    pub fn integrate(&self, p: &Poly) -> Q {
        assert!(self.is_full_dimensional(), "integration needs a full-dimensional polytope");
        self.triangulate()
            .iter()
            .map(|s| {
                let edges: Vec<Vec<Q>> = s[1..].iter().map(|v| v.iter().zip(&s[0]).map(|(a, b)| a - b).collect()).collect();
                let jac = crate::exact::det(&edges).abs();
                p.integrate_simplex(s, &jac)
            })
            .sum()
    }

    pub fn volume(&self) -> Q {
        self.integrate(&Poly::one(self.ambient))
    }

    /// Rational point in the relative interior (vertex barycenter).
    pub fn interior_point(&self) -> Vec<Q> {
        let n = Q::from_integer((self.vertices.len() as i64).into());
        (0..self.ambient).map(|i| self.vertices.iter().map(|v| v[i].clone()).sum::<Q>() / &n).collect()
    }
}

fn triangulate_face(verts: &[Vec<Q>], face: &[usize], facets: &[Vec<usize>], d: usize) -> Vec<Vec<usize>> {
    if face.len() == d + 1 {
        return vec![face.to_vec()];
    }
    let v0 = face[0];
    let mut out = Vec::new();
    for f in facets {
        if f.contains(&v0) {
            continue;
        }
        // Faces of f one dimension lower: maximal intersections with other facets.
        let mut sub: BTreeSet<Vec<usize>> = BTreeSet::new();
        for g in facets {
            if g == f {
                continue;
            }
            let inter: Vec<usize> = f.iter().copied().filter(|i| g.contains(i)).collect();
            if inter.len() >= d.saturating_sub(1) && d >= 2 {
                let pts: Vec<Vec<Q>> = inter.iter().map(|&i| verts[i].clone()).collect();
                if affine_dim(&pts) == d as isize - 2 {
                    sub.insert(inter);
                }
            }
        }
        let sub: Vec<Vec<usize>> = sub.into_iter().collect();
        for s in triangulate_face(verts, f, &sub, d - 1) {
            let mut simplex = vec![v0];
            simplex.extend(s);
            out.push(simplex);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{qi, qr, to_q_vec};

    fn cube(n: usize) -> Vec<HalfSpace> {
        let mut hs = Vec::new();
        for i in 0..n {
            let mut e = vec![Q::zero(); n];
            e[i] = Q::one();
            hs.push(HalfSpace::new(e.clone(), Q::zero()).unwrap());
            hs.push(HalfSpace::new(e.iter().map(|x| -x).collect(), -Q::one()).unwrap());
        }
        hs
    }

    #[test]
    fn cube_round_trip() {
        let p = Polytope::from_halfspaces(&cube(3), 3).unwrap();
        assert_eq!(p.vertices.len(), 8);
        assert_eq!(p.halfspaces.len(), 6);
        assert_eq!(p.volume(), qi(1));
        let q = Polytope::from_points(&p.vertices).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn simplex_and_redundancy() {
        let mut hs = vec![
            HalfSpace::new(to_q_vec(&[1, 0]), qi(0)).unwrap(),
            HalfSpace::new(to_q_vec(&[0, 1]), qi(0)).unwrap(),
            HalfSpace::new(to_q_vec(&[-1, -1]), qi(-1)).unwrap(),
        ];
        hs.push(HalfSpace::new(to_q_vec(&[-1, 0]), qi(-5)).unwrap());
        let p = Polytope::from_halfspaces(&hs, 2).unwrap();
        assert_eq!(p.vertices.len(), 3);
        assert_eq!(p.halfspaces.len(), 3);
        assert_eq!(p.volume(), qr(1, 2));
    }

    #[test]
    fn unbounded_and_empty() {
        let hs = vec![HalfSpace::new(to_q_vec(&[1, 0]), qi(0)).unwrap(), HalfSpace::new(to_q_vec(&[0, 1]), qi(0)).unwrap()];
        assert!(matches!(vertex_enumeration(&hs, 2), Err(Error::Unbounded)));
        let hs = vec![HalfSpace::new(to_q_vec(&[1]), qi(1)).unwrap(), HalfSpace::new(to_q_vec(&[-1]), qi(0)).unwrap()];
        assert!(matches!(vertex_enumeration(&hs, 1), Err(Error::Empty)));
    }

    #[test]
    fn lower_dimensional_hull() {
        let seg = Polytope::from_points(&[vec![qr(1, 2), qr(1, 2)], vec![qi(1), qi(1)]]).unwrap();
        assert_eq!(seg.dim(), 1);
        assert_eq!(seg.vertices.len(), 2);
        assert!(seg.contains(&[qr(3, 4), qr(3, 4)]));
        assert!(!seg.contains(&[qr(3, 4), qr(2, 3)]));
        let pt = Polytope::from_points(&[vec![qi(2), qi(3)]]).unwrap();
        assert_eq!(pt.dim(), 0);
        assert_eq!(pt.membership(&[qi(2), qi(3)]), Membership::Inside);
    }

    #[test]
    fn distances() {
        let p = Polytope::from_halfspaces(&cube(2), 2).unwrap();
        assert_eq!(p.l1_distance(&[qi(2), qi(2)]).unwrap(), qi(2));
        assert_eq!(p.l1_distance(&[qr(1, 2), qr(1, 2)]).unwrap(), qi(0));
        assert!(matches!(p.membership(&[qi(1), qi(1)]), Membership::Boundary(v) if v.len() == 2));
    }
}
