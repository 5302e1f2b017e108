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

//! Commuting diagonal phase layers through two-level rotations.
//!
//! For `M = diag(e^{iφ_0}, …)` and a rotation on levels `(i, j)`,
//! `M · R_{i,j}(θ, α) = R_{i,j}(θ, α − φ_i + φ_j) · M`. Only the rotation's
//! phase changes; θ and `M` are untouched.

use crate::gates::{Gate, GateSequence, Rotation};
use crate::linalg::{cis, wrap_angle, Complex, ComplexMatrix};

/// Diagonal unitary stored as one phase (radians) per level.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalPhases(pub Vec<f64>);

impl DiagonalPhases {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// Phases of the diagonal of `m`; off-diagonal entries are ignored.
    pub fn from_diagonal_of(m: &ComplexMatrix) -> Self {
        Self(m.diagonal().iter().map(|v| v.arg()).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn factors(&self) -> Vec<Complex> {
        self.0.iter().map(|&p| cis(p)).collect()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.factors())
    }

    /// Representative with zero phase on `pivot`, i.e. with the global
    /// phase removed.
    pub fn canonical(&self, pivot: usize) -> Self {
        let p = self.0[pivot];
        Self(self.0.iter().map(|&x| wrap_angle(x - p)).collect())
    }
}

/// Moves `m` from the left of `r` to its right: returns `r'` with
/// `m · r = r' · m`.
pub fn commute_through(m: &DiagonalPhases, r: &Rotation) -> Rotation {
    Rotation::new(r.i, r.j, r.theta, wrap_angle(r.phi - m.0[r.i] + m.0[r.j]))
}

/// Pushes every virtual Z gate, together with the diagonal `outer` applied
/// after the whole sequence, to the input side.
///
/// Returns rotations only and a diagonal `Θ` with
/// `diag(outer) · seq = seq' · diag(Θ)` exactly.
pub fn sweep_phases(seq: &GateSequence, outer: &DiagonalPhases) -> (GateSequence, DiagonalPhases) {
    let mut m = outer.clone();
    let mut swept: Vec<Gate> = Vec::with_capacity(seq.len());
    for gate in seq.gates().iter().rev() {
        match gate {
            Gate::VirtualZ(z) => m.0[z.level] += z.phi,
            Gate::Rotation(r) => swept.push(Gate::Rotation(commute_through(&m, r))),
            Gate::Pulse(r) => swept.push(Gate::Pulse(commute_through(&m, r))),
        }
    }
    swept.reverse();
    for p in &mut m.0 {
        *p = wrap_angle(*p);
    }
    (swept.into_iter().collect(), m)
}
