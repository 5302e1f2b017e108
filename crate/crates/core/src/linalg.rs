// Copyright contributors to the qadapt project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense complex matrices and the numerical predicates the compiler relies on.
//!
//! Distances are entrywise max-norms throughout. Matrices are plain values:
//! every operation returns a fresh matrix.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Tolerance used for unitarity and diagonality checks unless a caller
/// supplies its own.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Square, row-major, dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &v) in diag.iter().enumerate() {
            m[(k, k)] = v;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from nested rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    row: r,
                    len: row.len(),
                    dim,
                });
            }
            for (c, v) in row.into_iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                data.push(v);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks(self.dim)
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.dim).map(|k| self[(k, k)]).collect()
    }

    pub fn multiply(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                let dst = &mut out.data[r * d..(r + 1) * d];
                for (o, b) in dst.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product, used to apply an operator to a state.
    pub fn apply(&self, state: &[Complex]) -> Result<Vec<Complex>> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| row.iter().zip(state).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, factor: Complex) -> ComplexMatrix {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Entrywise max-norm of `self - other`.
    pub fn max_distance(&self, other: &ComplexMatrix) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Max-norm of `m†m − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in a..d {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.data[k * d + a].conj() * self.data[k * d + b];
                }
                if a == b {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|r| (0..d).all(|c| r == c || self.data[r * d + c].norm() <= tol))
    }

    /// True iff `self ≈ c · other` for some unit-modulus `c`.
    ///
    /// The phase is fixed on the largest-modulus entry of `other`.
    pub fn equal_up_to_global_phase(&self, other: &ComplexMatrix, tol: f64) -> Result<bool> {
        self.check_dim(other)?;
        let (pivot, largest) = other
            .data
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.norm()))
            .fold(
                (0, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if largest <= tol {
            return Ok(self.data.iter().all(|v| v.norm() <= tol));
        }
        let ratio = self.data[pivot] / other.data[pivot];
        if ratio.norm() < f64::EPSILON {
            return Ok(false);
        }
        let phase = ratio / ratio.norm();
        Ok(self.max_distance(&other.scale(phase))? <= tol)
    }

    /// Left-multiplies in place by a two-level operator acting on rows `i`, `j`.
    ///
    /// `block` is indexed `[[ii, ij], [ji, jj]]`.
    pub fn rotate_rows(&mut self, i: usize, j: usize, block: [[Complex; 2]; 2]) {
        let d = self.dim;
        for c in 0..d {
            let a = self.data[i * d + c];
            let b = self.data[j * d + c];
            self.data[i * d + c] = block[0][0] * a + block[0][1] * b;
            self.data[j * d + c] = block[1][0] * a + block[1][1] * b;
        }
    }

    /// Direct sum `self ⊕ I_extra`.
    pub fn pad_identity(&self, dim: usize) -> Result<ComplexMatrix> {
        if dim < self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(Self::from_fn(dim, |r, c| {
            if r < self.dim && c < self.dim {
                self[(r, c)]
            } else if r == c {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        }))
    }

    fn check_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        assert!(
            r < self.dim && c < self.dim,
            "index ({r}, {c}) out of range"
        );
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        assert!(
            r < self.dim && c < self.dim,
            "index ({r}, {c}) out of range"
        );
        &mut self.data[r * self.dim + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({0}x{0}) [", self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for v in row {
                write!(f, "{:>9.5}{:+.5}i  ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Phase factor `e^{iφ}`.
pub fn cis(phi: f64) -> Complex {
    Complex::from_polar(1.0, phi)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let w = phi.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Haar-random unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    for k in 0..dim {
        for prev in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let q = &done[prev];
            let proj: Complex = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            for (v, qv) in rest[0].iter_mut().zip(q) {
                *v -= proj * qv;
            }
        }
        let norm = cols[k].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[k].iter_mut() {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(dim, |r, c| cols[c][r])
}
