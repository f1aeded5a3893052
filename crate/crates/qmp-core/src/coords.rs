//! Coordinate charts on the affine span of a weight system.
//!
//! Every chart is a linear projection of full (occupation) coordinates paired
//! with an affine lift that restores the fixed per-factor block sums.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{qi, Q};
use crate::lattice::{GroupSpec, Weight, WeightSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordKind {
    /// One coordinate `ω_1 − ω_2` per two-dimensional factor.
    Pairing,
    /// The first `d_k − 1` entries of each block.
    Reduced,
    /// All entries (no block-sum constraint is used).
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinates {
    pub kind: CoordKind,
    pub group: GroupSpec,
    /// Fixed block sum of every factor; used by [`Coordinates::lift`].
    pub sums: Vec<Q>,
}

impl Coordinates {
    pub fn new(kind: CoordKind, group: GroupSpec, sums: Vec<Q>) -> Result<Self> {
        if sums.len() != group.factors.len() {
            return Err(Error::Invalid("one block sum per factor is required".into()));
        }
        if kind == CoordKind::Pairing && group.factors.iter().any(|f| f.dim != 2) {
            return Err(Error::Invalid("pairing coordinates need all factors of dimension 2".into()));
        }
        Ok(Coordinates { kind, group, sums })
    }

    /// Chart for a weight system whose block sums are constant across weights.
    pub fn for_weights(ws: &WeightSystem, kind: CoordKind) -> Result<Self> {
        let first = ws.weights.first().ok_or_else(|| Error::Invalid("empty weight system".into()))?;
        let sums: Vec<i64> = first.blocks(&ws.group).iter().map(|b| b.iter().sum()).collect();
        for w in &ws.weights {
            let s: Vec<i64> = w.blocks(&ws.group).iter().map(|b| b.iter().sum()).collect();
            if s != sums {
                return Err(Error::Invalid("block sums vary across weights".into()));
            }
        }
        Coordinates::new(kind, ws.group.clone(), sums.into_iter().map(qi).collect())
    }

    /// Pairing coordinates when all factors are qubits, reduced coordinates otherwise.
    pub fn natural(ws: &WeightSystem) -> Result<Self> {
        let kind = if ws.group.factors.iter().all(|f| f.dim == 2) { CoordKind::Pairing } else { CoordKind::Reduced };
        Coordinates::for_weights(ws, kind)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            CoordKind::Pairing => self.group.factors.len(),
            CoordKind::Reduced => self.group.reduced_len(),
            CoordKind::Full => self.group.weight_len(),
        }
    }

    /// Linear projection of a full-coordinate vector.
    pub fn project_full(&self, x: &[Q]) -> Vec<Q> {
        let mut out = Vec::with_capacity(self.dim());
        let mut off = 0;
        for f in &self.group.factors {
            let b = &x[off..off + f.dim];
            match self.kind {
                CoordKind::Pairing => out.push(&b[0] - &b[1]),
                CoordKind::Reduced => out.extend(b[..f.dim - 1].iter().cloned()),
                CoordKind::Full => out.extend(b.iter().cloned()),
            }
            off += f.dim;
        }
        out
    }

    pub fn project(&self, w: &Weight) -> Vec<Q> {
        self.project_full(&w.coords.iter().map(|&x| qi(x)).collect::<Vec<_>>())
    }

    /// Full coordinates of a chart point, restoring the block sums.
    pub fn lift(&self, y: &[Q]) -> Vec<Q> {
        let mut out = Vec::with_capacity(self.group.weight_len());
        let mut off = 0;
        for (k, f) in self.group.factors.iter().enumerate() {
            let s = &self.sums[k];
            match self.kind {
                CoordKind::Pairing => {
                    let l = &y[k];
                    out.push((s + l) / qi(2));
                    out.push((s - l) / qi(2));
                }
                CoordKind::Reduced => {
                    let b = &y[off..off + f.dim - 1];
                    let rest = b.iter().fold(s.clone(), |acc, v| acc - v);
                    out.extend(b.iter().cloned());
                    out.push(rest);
                    off += f.dim - 1;
                }
                CoordKind::Full => {
                    out.extend(y[off..off + f.dim].iter().cloned());
                    off += f.dim;
                }
            }
        }
        out
    }

    /// Chart functional `h` and constant `c0` with `(x, H) = h·project(x) + c0` on the block-sum slice.
    pub fn pullback_functional(&self, h_full: &[Q]) -> (Vec<Q>, Q) {
        let c0 = {
            let zero = vec![Q::zero(); self.dim()];
            crate::exact::dot(h_full, &self.lift(&zero))
        };
        let h: Vec<Q> = (0..self.dim())
            .map(|i| {
                let mut e = vec![Q::zero(); self.dim()];
                e[i] = qi(1);
                crate::exact::dot(h_full, &self.lift(&e)) - &c0
            })
            .collect();
        (h, c0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{sym_weights, tensor_weights};

    #[test]
    fn pairing_round_trip() {
        let ws = tensor_weights(&[2, 2]).unwrap();
        let c = Coordinates::natural(&ws).unwrap();
        assert_eq!(c.kind, CoordKind::Pairing);
        let p = c.project(&ws.weights[1]);
        assert_eq!(p, vec![qi(1), qi(-1)]);
        assert_eq!(c.lift(&p), vec![qi(1), qi(0), qi(0), qi(1)]);
    }

    #[test]
    fn reduced_round_trip_and_pullback() {
        let ws = sym_weights(3, 2).unwrap();
        let c = Coordinates::for_weights(&ws, CoordKind::Reduced).unwrap();
        let w = &ws.weights[2];
        assert_eq!(c.lift(&c.project(w)), w.coords.iter().map(|&x| qi(x)).collect::<Vec<_>>());
        let h_full = vec![qi(1), qi(2), qi(5)];
        let (h, c0) = c.pullback_functional(&h_full);
        let y = c.project(w);
        let direct: Q = crate::exact::dot(&h_full, &c.lift(&y));
        assert_eq!(crate::exact::dot(&h, &y) + c0, direct);
    }
}
