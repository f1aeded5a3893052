//! Exact rational scalars and dense linear algebra over `Q`.
//!
//! Matrices are plain `Vec<Vec<Q>>` in row-major order. Every routine here is
//! exact; none of them pivots for numerical stability because none needs to.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;
pub type Z = BigInt;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qz(n: &Z) -> Q {
    Q::from_integer(n.clone())
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.75"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: Z = a.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let d: Z = b.trim().parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        let n: Z = digits.parse().map_err(|_| Error::Parse(format!("bad decimal '{s}'")))?;
        let d = num_traits::pow(Z::from(10), fp.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: Z = s.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    Ok(Q::from_integer(n))
}

/// `"p/q"` for non-integers, `"p"` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down both parts before converting.
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(900);
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
pub fn rationalize(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let ai = a as i64;
        let p2 = ai.saturating_mul(p1).saturating_add(p0);
        let q2 = ai.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den || q2 <= 0 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return qi(x.round() as i64);
    }
    // Compare with the best semiconvergent.
    let best = qr(p1, q1);
    if q0 > 0 {
        let k = (max_den - q0) / q1;
        if k > 0 {
            let cand = qr(p0 + k * p1, q0 + k * q1);
            if (q_to_f64(&cand) - x).abs() < (q_to_f64(&best) - x).abs() {
                return cand;
            }
        }
    }
    best
}

pub fn lcm_z(a: &Z, b: &Z) -> Z {
    if a.is_zero() || b.is_zero() {
        return Z::zero();
    }
    a.lcm(b)
}

/// Scales a rational vector to a primitive integer vector (coprime entries, same direction).
pub fn primitive(v: &[Q]) -> Vec<Z> {
    let mut den = Z::one();
    for x in v {
        den = lcm_z(&den, x.denom());
    }
    let ints: Vec<Z> = v.iter().map(|x| (x * qz(&den)).to_integer()).collect();
    let mut g = Z::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn to_q_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| qi(x)).collect()
}

/// In-place reduced row echelon form. Returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (top, bottom) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&mut a[i], &b[0])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&mut b[0], &a[r])
                };
                for (x, y) in top.iter_mut().zip(bottom.iter()) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of the right null space `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); cols];
            x[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -a[r][f].clone();
            }
            x
        })
        .collect()
}

/// Solves `m x = b` for square nonsingular `m`.
pub fn solve(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some(a.iter().map(|r| r[n].clone()).collect())
}

/// Determinant by fraction-exact Gaussian elimination.
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for i in (c + 1)..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &piv;
            for j in c..n {
                let v = &f * &a[c][j];
                a[i][j] -= v;
            }
        }
    }
    d
}

/// Inverse of a square matrix, if nonsingular.
pub fn inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Affine dimension of a point set (−1 for the empty set).
pub fn affine_dim(points: &[Vec<Q>]) -> isize {
    if points.is_empty() {
        return -1;
    }
    let base = &points[0];
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        return 0;
    }
    rank(&diffs) as isize
}

pub fn factorial(n: usize) -> Z {
    (1..=n).fold(Z::one(), |acc, k| acc * Z::from(k))
}

pub fn binomial(n: i64, k: i64) -> Z {
    if k < 0 || n < 0 || k > n {
        return Z::zero();
    }
    let k = k.min(n - k);
    let mut r = Z::one();
    for i in 0..k {
        r = r * Z::from(n - i) / Z::from(i + 1);
    }
    r
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}
