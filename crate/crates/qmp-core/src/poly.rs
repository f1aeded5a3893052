//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exact::{factorial, fmt_q, qi, qz, Q};

/// Exponent vector to coefficient; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, Q::one());
        p
    }

    /// `Σ coeffs[i] x_i + c`.
    pub fn linear(coeffs: &[Q], c: Q) -> Self {
        let n = coeffs.len();
        let mut p = Poly::constant(n, c);
        for (i, a) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, a.clone());
        }
        p
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Q) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|e| e.iter().sum::<u32>() as i64).max().unwrap_or(-1)
    }

    pub fn coeff(&self, exps: &[u32]) -> Q {
        self.terms.get(exps).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Poly::one(self.nvars);
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = crate::exact::q_to_f64(c);
                for (xi, &k) in x.iter().zip(e) {
                    t *= xi.powi(k as i32);
                }
                t
            })
            .sum()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                p.add_term(e2, c * qi(e[i] as i64));
            }
        }
        p
    }

    /// Directional derivative `Σ dir_i ∂_i`.
    pub fn directional(&self, dir: &[Q]) -> Self {
        let mut p = Poly::zero(self.nvars);
        for (i, d) in dir.iter().enumerate() {
            if !d.is_zero() {
                p = &p + &self.derivative(i).scale(d);
            }
        }
        p
    }

    /// Substitutes `x_i := subs[i]`; all substitutes share one variable count.
    pub fn compose(&self, subs: &[Poly]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let m = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut out = Poly::zero(m);
        let mut pow_cache: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(s.nvars), s.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while pow_cache[i].len() <= k {
                    let next = &pow_cache[i][pow_cache[i].len() - 1] * &subs[i];
                    pow_cache[i].push(next);
                }
                if k > 0 {
                    t = &t * &pow_cache[i][k];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Integral over the simplex with the given vertices (affine dimension `m = vertices.len() - 1`),
    /// against the measure whose value on the simplex is `jac / m!` (`jac` is the volume of the
    /// parallelepiped spanned by the edge vectors under the chosen measure).
    pub fn integrate_simplex(&self, vertices: &[Vec<Q>], jac: &Q) -> Q {
        let m = vertices.len() - 1;
        let v0 = &vertices[0];
        let subs: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<Q> = (1..=m).map(|j| &vertices[j][i] - &v0[i]).collect();
                Poly::linear(&coeffs, v0[i].clone())
            })
            .collect();
        let g = if m == 0 {
            Poly::constant(0, self.eval(v0))
        } else {
            self.compose(&subs)
        };
        let mut s = Q::zero();
        for (e, c) in &g.terms {
            let tot: u32 = e.iter().sum();
            let mut num = num_bigint::BigInt::one();
            for &k in e {
                num *= factorial(k as usize);
            }
            s += c * qz(&num) / qz(&factorial(m + tot as usize));
        }
        s * jac
    }

    pub fn to_f64_string(&self) -> String {
        format!("{self}")
    }
}

/// All exponent vectors of total degree at most `deg` in `n` variables (graded lexicographic).
pub fn monomials_upto(n: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::new(), &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    out
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&qi(-1))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut acc: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Poly { nvars: self.nvars.max(o.nvars), terms: acc }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", fmt_q(c))?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qr;

    #[test]
    fn arithmetic_and_eval() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x + &y).pow(2) - &(&x * &y).scale(&qi(2));
        assert_eq!(p.eval(&[qi(2), qi(3)]), qi(13));
        assert_eq!(p.derivative(0).eval(&[qi(2), qi(3)]), qi(4));
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn simplex_integrals() {
        // ∫ over unit triangle of x = 1/6.
        let x = Poly::var(2, 0);
        let tri = vec![vec![qi(0), qi(0)], vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert_eq!(x.integrate_simplex(&tri, &qi(1)), qr(1, 6));
        // ∫_0^2 x^2 dx = 8/3.
        let x1 = Poly::var(1, 0);
        let seg = vec![vec![qi(0)], vec![qi(2)]];
        assert_eq!(x1.pow(2).integrate_simplex(&seg, &qi(2)), qr(8, 3));
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials_upto(3, 4).len(), 35);
        assert_eq!(monomials_upto(1, 0), vec![vec![0]]);
    }
}
