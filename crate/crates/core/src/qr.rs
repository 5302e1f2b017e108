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

//! Fixed-sequence Givens (QR) baseline.
//!
//! Columns are cleared left to right, each from the bottom up with
//! rotations on neighbouring states `(r − 1, r)`. Routing needed for a
//! rotation is undone right after it, so every step starts from the
//! original placement.

use std::f64::consts::FRAC_PI_2;

use crate::cost::CostModel;
use crate::decomposition::{diagonal_phases, finalize, prepare_target, Decomposition};
use crate::error::Result;
use crate::gates::{Gate, GateSequence, Rotation};
use crate::graph::EnergyCouplingGraph;
use crate::linalg::ComplexMatrix;

/// Entries below this modulus count as already eliminated.
pub const QR_ZERO_TOL: f64 = 1e-12;

/// Angle and phase of the rotation on `(r, r2)` that zeroes `w[(r2, c)]`
/// against the pivot `w[(r, c)]`. A zero pivot yields a full swap (θ = π).
pub fn givens_parameters(w: &ComplexMatrix, c: usize, r: usize, r2: usize) -> (f64, f64) {
    let (a, b) = (w[(r, c)], w[(r2, c)]);
    let theta = 2.0 * b.norm().atan2(a.norm());
    let arg_a = if a.norm() > 0.0 { a.arg() } else { 0.0 };
    let phi = -(FRAC_PI_2 + arg_a - b.arg());
    (theta, phi)
}

/// Left-multiplies `w` by the two-level rotation on states `(r, r2)`.
pub(crate) fn apply_state_rotation(
    w: &mut ComplexMatrix,
    r: usize,
    r2: usize,
    theta: f64,
    phi: f64,
) {
    w.rotate_rows(r, r2, Rotation::new(r, r2, theta, phi).block());
}

/// Intent for a rotation on states `(i, j)`: routing pulses, the rotation on
/// the levels the states then occupy, and the graph afterwards.
pub(crate) fn routed_rotation(
    graph: &EnergyCouplingGraph,
    i: usize,
    j: usize,
    theta: f64,
    phi: f64,
) -> Result<(Vec<Rotation>, Rotation, EnergyCouplingGraph)> {
    let plan = graph.plan_routing(i, j)?;
    let rot = Rotation::new(plan.graph.level_of(i), plan.graph.level_of(j), theta, phi);
    Ok((plan.pulses, rot, plan.graph))
}

pub fn qr_decompose(
    u: &ComplexMatrix,
    graph: &EnergyCouplingGraph,
    model: &dyn CostModel,
) -> Result<Decomposition> {
    let mut w = prepare_target(u, graph)?.adjoint();
    let n = w.dim();
    let mut intent = GateSequence::new();
    for c in 0..n {
        for r in (c + 1..n).rev() {
            if w[(r, c)].norm() < QR_ZERO_TOL {
                continue;
            }
            let (theta, phi) = givens_parameters(&w, c, r - 1, r);
            apply_state_rotation(&mut w, r - 1, r, theta, phi);
            let (pulses, rot, _) = routed_rotation(graph, r - 1, r, theta, phi)?;
            intent.extend(pulses.iter().map(|p| Gate::Pulse(*p)));
            intent.push(Gate::Rotation(rot));
            intent.extend(pulses.iter().rev().map(|p| Gate::Pulse(p.inverse())));
        }
    }
    finalize(&intent, graph, &diagonal_phases(&w), model)
}

/// Cost of the QR baseline, used as the adaptive search's default limit.
pub fn qr_cost_bound(
    u: &ComplexMatrix,
    graph: &EnergyCouplingGraph,
    model: &dyn CostModel,
) -> Result<f64> {
    Ok(qr_decompose(u, graph, model)?.total_cost())
}
