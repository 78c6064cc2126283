//! Rational linear maps: coordinate shears and composed projections.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::MPoly;
use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Identity,
    Shear,
    Projection,
}

/// A k×d rational matrix acting as `x ↦ A x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearMap {
    pub kind: MapKind,
    #[serde(with = "crate::rational::ser_mat")]
    rows: Vec<Vec<Q>>,
    ncols: usize,
}

impl LinearMap {
    pub fn new(kind: MapKind, rows: Vec<Vec<Q>>, ncols: usize) -> LinearMap {
        assert!(rows.iter().all(|r| r.len() == ncols));
        LinearMap { kind, rows, ncols }
    }

    pub fn identity(d: usize) -> LinearMap {
        let rows = (0..d)
            .map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        LinearMap::new(MapKind::Identity, rows, d)
    }

    /// The d×d shear `x_j ↦ x_j + λ_j x_axis` for `j < axis`.
    pub fn shear(d: usize, axis: usize, lambdas: &[Q]) -> LinearMap {
        assert!(axis < d && lambdas.len() == axis);
        let mut m = LinearMap::identity(d);
        m.kind = MapKind::Shear;
        for (j, l) in lambdas.iter().enumerate() {
            m.rows[j][axis] = l.clone();
        }
        m
    }

    /// Keeps the first `k` coordinates of ℝ^d.
    pub fn drop_to(d: usize, k: usize) -> LinearMap {
        let mut m = LinearMap::identity(d);
        m.rows.truncate(k);
        m.kind = MapKind::Projection;
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn is_identity(&self) -> bool {
        self.nrows() == self.ncols && *self == {
            let mut id = LinearMap::identity(self.ncols);
            id.kind = self.kind;
            id
        }
    }

    pub fn apply(&self, x: &[Q]) -> Vec<Q> {
        assert_eq!(x.len(), self.ncols);
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `self ∘ inner`, i.e. x ↦ self(inner(x)).
    pub fn compose(&self, inner: &LinearMap, kind: MapKind) -> LinearMap {
        assert_eq!(self.ncols, inner.nrows());
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..inner.ncols)
                    .map(|j| {
                        r.iter()
                            .zip(&inner.rows)
                            .fold(Q::zero(), |acc, (a, ir)| acc + a * &ir[j])
                    })
                    .collect()
            })
            .collect();
        LinearMap::new(kind, rows, inner.ncols)
    }

    pub fn rank(&self) -> usize {
        rank(&self.rows)
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.nrows()
    }

    /// Row `i` as a linear form in `ncols` variables.
    pub fn row_form(&self, i: usize) -> MPoly {
        MPoly::affine(Q::zero(), &self.rows[i])
    }

    /// Inverse of a square invertible map.
    pub fn inverse(&self) -> Option<LinearMap> {
        inverse(&self.rows).map(|rows| LinearMap::new(self.kind, rows, self.ncols))
    }
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..ncols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
        }
        r += 1;
    }
    r
}

pub fn inverse(rows: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = rows.len();
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            assert_eq!(r.len(), n);
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `q(x_1+λ_1x_i, …, x_{i−1}+λ_{i−1}x_i, x_i, …)` with `i = axis` (0-based).
pub fn shear(p: &MPoly, axis: usize, lambdas: &[Q]) -> MPoly {
    let s = LinearMap::shear(p.nvars(), axis, lambdas);
    substitute(p, &s)
}

/// `g(x) = q(π(x))`; π must be surjective.
pub fn pullback(q: &MPoly, pi: &LinearMap) -> Result<MPoly> {
    if q.nvars() != pi.nrows() {
        return Err(Error::DimensionMismatch {
            expected: pi.nrows(),
            got: q.nvars(),
        });
    }
    let rk = pi.rank();
    if rk < pi.nrows() {
        return Err(Error::NotSurjective {
            rank: rk,
            target: pi.nrows(),
        });
    }
    Ok(substitute(q, pi))
}

fn substitute(q: &MPoly, m: &LinearMap) -> MPoly {
    if q.is_constant() {
        return MPoly::constant(m.ncols(), q.coeff(&super::Monomial::one(q.nvars())));
    }
    let forms: Vec<MPoly> = (0..m.nrows()).map(|i| m.row_form(i)).collect();
    q.compose(&forms)
}
