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

//! Elementary physical operations: two-level rotations and virtual Z gates.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{cis, Complex, ComplexMatrix};

/// Two-level rotation `R_{i,j}(θ, φ) = exp(-iθ/2 (cos φ σx + sin φ σy))`
/// acting on levels `i` and `j`.
///
/// The first index plays the role of the lower level in the Pauli pair.
/// Physical gates are normalized (`i < j`); a rotation written from the
/// higher to the lower level is only accepted as input to the graph rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub phi: f64,
}

impl Rotation {
    pub fn new(i: usize, j: usize, theta: f64, phi: f64) -> Self {
        Self { i, j, theta, phi }
    }

    /// The reordering pulse `R(π, −π/2)` between two levels, written low→high.
    pub fn reorder(a: usize, b: usize) -> Self {
        Self::new(a.min(b), a.max(b), PI, -FRAC_PI_2)
    }

    pub fn lower(&self) -> usize {
        self.i.min(self.j)
    }

    pub fn upper(&self) -> usize {
        self.i.max(self.j)
    }

    pub fn is_normalized(&self) -> bool {
        self.i < self.j
    }

    /// Rewrites a high→low rotation as the identical low→high rotation,
    /// which inverts the sign of φ.
    pub fn normalized(&self) -> Self {
        if self.i > self.j {
            Self::new(self.j, self.i, self.theta, -self.phi)
        } else {
            *self
        }
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.i, self.j, -self.theta, self.phi)
    }

    pub fn touches(&self, level: usize) -> bool {
        self.i == level || self.j == level
    }

    /// 2×2 block on `(i, j)`, indexed `[[ii, ij], [ji, jj]]`.
    pub fn block(&self) -> [[Complex; 2]; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let minus_i = Complex::new(0.0, -1.0);
        [
            [Complex::new(c, 0.0), minus_i * cis(-self.phi) * s],
            [minus_i * cis(self.phi) * s, Complex::new(c, 0.0)],
        ]
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.i == self.j {
            return Err(Error::InvalidRotation(self.i, self.j));
        }
        for level in [self.i, self.j] {
            if level >= dim {
                return Err(Error::LevelOutOfRange { level, levels: dim });
            }
        }
        if !self.theta.is_finite() || !self.phi.is_finite() {
            return Err(Error::Parse(format!(
                "non-finite rotation parameters {self:?}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        self.validate(dim)?;
        let b = self.block();
        let mut m = ComplexMatrix::identity(dim);
        m[(self.i, self.i)] = b[0][0];
        m[(self.i, self.j)] = b[0][1];
        m[(self.j, self.i)] = b[1][0];
        m[(self.j, self.j)] = b[1][1];
        Ok(m)
    }
}

/// Zero-cost phase shift `e^{iφ}` on a single level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirtualZ {
    pub level: usize,
    pub phi: f64,
}

impl VirtualZ {
    pub fn new(level: usize, phi: f64) -> Self {
        Self { level, phi }
    }

    pub fn matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        if self.level >= dim {
            return Err(Error::LevelOutOfRange {
                level: self.level,
                levels: dim,
            });
        }
        let mut m = ComplexMatrix::identity(dim);
        m[(self.level, self.level)] = cis(self.phi);
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    /// Rotation implementing part of the target operation.
    Rotation(Rotation),
    /// Rotation that only moves logical content between levels.
    Pulse(Rotation),
    VirtualZ(VirtualZ),
}

impl Gate {
    pub fn matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        match self {
            Gate::Rotation(r) | Gate::Pulse(r) => r.matrix(dim),
            Gate::VirtualZ(z) => z.matrix(dim),
        }
    }

    pub fn rotation(&self) -> Option<&Rotation> {
        match self {
            Gate::Rotation(r) | Gate::Pulse(r) => Some(r),
            Gate::VirtualZ(_) => None,
        }
    }
}

/// Gates in application order: `gates[0]` acts first and is the rightmost
/// factor of the product.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GateSequence {
    gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        self.gates.extend(gates);
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Gate> {
        self.gates.iter()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Rotation(_)))
            .count()
    }

    pub fn pulse_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Pulse(_)))
            .count()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for gate in &self.gates {
            match gate {
                Gate::Rotation(r) | Gate::Pulse(r) => r.validate(dim)?,
                Gate::VirtualZ(z) => {
                    if z.level >= dim {
                        return Err(Error::LevelOutOfRange {
                            level: z.level,
                            levels: dim,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Product of all gate matrices, later gates multiplied on the left.
    pub fn matrix(&self, dim: usize) -> Result<ComplexMatrix> {
        self.validate(dim)?;
        let mut acc = ComplexMatrix::identity(dim);
        for gate in &self.gates {
            match gate {
                Gate::Rotation(r) | Gate::Pulse(r) => acc.rotate_rows(r.i, r.j, r.block()),
                Gate::VirtualZ(z) => {
                    let phase = cis(z.phi);
                    for c in 0..dim {
                        acc[(z.level, c)] *= phase;
                    }
                }
            }
        }
        Ok(acc)
    }
}

impl FromIterator<Gate> for GateSequence {
    fn from_iter<T: IntoIterator<Item = Gate>>(iter: T) -> Self {
        Self {
            gates: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a GateSequence {
    type Item = &'a Gate;
    type IntoIter = std::slice::Iter<'a, Gate>;

    fn into_iter(self) -> Self::IntoIter {
        self.gates.iter()
    }
}
