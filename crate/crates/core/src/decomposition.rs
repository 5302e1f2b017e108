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

//! Decomposition results and the pipeline that turns a routed sequence of
//! logical rotations into an executable one.
//!
//! A decomposition of `U` is a physical rotation sequence `S`, the levels
//! holding each state before (`P_s`) and after (`P_e`) it, and virtual
//! phases `Θ` such that `P_eᵀ · S · P_s · diag(e^{iΘ}) = U`.

use crate::cost::{sequence_cost, CostBreakdown, CostModel};
use crate::error::{Error, Result};
use crate::gates::GateSequence;
use crate::graph::{apply_graph_rules, EnergyCouplingGraph};
use crate::linalg::{cis, wrap_angle, Complex, ComplexMatrix, DEFAULT_TOL};
use crate::phases::{sweep_phases, DiagonalPhases};

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Physical rotations and reordering pulses in application order.
    pub sequence: GateSequence,
    /// Virtual phase per state, applied before the sequence.
    pub residual_phases: Vec<f64>,
    pub initial_placement: Vec<usize>,
    pub final_placement: Vec<usize>,
    pub levels: usize,
    pub cost: CostBreakdown,
    /// Graph after the sequence, with node phases folded into `Θ`.
    pub final_graph: EnergyCouplingGraph,
}

impl Decomposition {
    pub fn total_cost(&self) -> f64 {
        self.cost.total()
    }

    pub fn logical_rotations(&self) -> usize {
        self.sequence.rotation_count()
    }

    pub fn routing_pulses(&self) -> usize {
        self.sequence.pulse_count()
    }

    pub fn dim(&self) -> usize {
        self.residual_phases.len()
    }

    /// The unitary this decomposition implements, over states.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        reconstruct(
            &self.sequence,
            &self.residual_phases,
            &self.initial_placement,
            &self.final_placement,
            self.levels,
        )
    }

    /// Whether the decomposition implements `u` up to global phase.
    /// Unitaries without the ancilla states are padded with identity.
    pub fn verify(&self, u: &ComplexMatrix, tol: f64) -> Result<bool> {
        let target = u.pad_identity(self.dim())?;
        self.reconstruct()?.equal_up_to_global_phase(&target, tol)
    }
}

/// `P_eᵀ · seq · P_s · diag(e^{iΘ})` for placements given as state → level.
pub fn reconstruct(
    sequence: &GateSequence,
    residual_phases: &[f64],
    initial_placement: &[usize],
    final_placement: &[usize],
    levels: usize,
) -> Result<ComplexMatrix> {
    let n = residual_phases.len();
    for placement in [initial_placement, final_placement] {
        if placement.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: placement.len(),
            });
        }
        let mut seen = vec![false; levels];
        for &l in placement {
            if l >= levels {
                return Err(Error::LevelOutOfRange { level: l, levels });
            }
            if std::mem::replace(&mut seen[l], true) {
                return Err(Error::InvalidGraph(format!("level {l} holds two states")));
            }
        }
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let full = sequence.matrix(levels)?;
    Ok(ComplexMatrix::from_fn(n, |r, c| {
        full[(final_placement[r], initial_placement[c])] * cis(residual_phases[c])
    }))
}

/// Checks that `u` is a unitary the graph can host and pads it with
/// identity on the ancilla states.
pub fn prepare_target(u: &ComplexMatrix, graph: &EnergyCouplingGraph) -> Result<ComplexMatrix> {
    let (logical, all) = (graph.computational_states(), graph.num_states());
    if u.dim() != logical && u.dim() != all {
        return Err(Error::DimensionMismatch {
            expected: logical,
            found: u.dim(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > DEFAULT_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    u.pad_identity(all)
}

/// Turns intent into an executable decomposition.
///
/// `intent` holds routing pulses and rotations written on the levels their
/// states occupy at that point, where the rotations `R_k ⋯ R_1` satisfy
/// `R_k ⋯ R_1 = D · U` over states for the diagonal `D = diag(e^{i·diag_phases})`.
pub fn finalize(
    intent: &GateSequence,
    graph: &EnergyCouplingGraph,
    diag_phases: &[f64],
    model: &dyn CostModel,
) -> Result<Decomposition> {
    let n = graph.num_states();
    if diag_phases.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: diag_phases.len(),
        });
    }
    let (physical, end) = apply_graph_rules(intent, graph)?;

    // Undo everything the physical sequence leaves on each level: the frame
    // phase of its content and the phase D puts on that content.
    let outer = DiagonalPhases(
        (0..graph.levels())
            .map(|l| {
                let d = end.occupant(l).map_or(0.0, |s| diag_phases[s]);
                -(end.node_phase(l) + d)
            })
            .collect(),
    );
    let (sequence, theta) = sweep_phases(&physical, &outer);
    let residual_phases = (0..n)
        .map(|s| {
            let l = graph.level_of(s);
            wrap_angle(theta.0[l] + graph.node_phase(l))
        })
        .collect();

    Ok(Decomposition {
        cost: sequence_cost(model, &sequence),
        residual_phases,
        initial_placement: graph.placement().to_vec(),
        final_placement: end.placement().to_vec(),
        levels: graph.levels(),
        final_graph: end.without_node_phases(),
        sequence,
    })
}

/// Phases of the diagonal of a matrix that is diagonal up to tolerance.
pub(crate) fn diagonal_phases(m: &ComplexMatrix) -> Vec<f64> {
    m.diagonal().into_iter().map(Complex::arg).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExperimentalCost;
    use crate::gates::{Gate, Rotation};
    use crate::graph::StateLabel;

    fn path(n: usize) -> EnergyCouplingGraph {
        EnergyCouplingGraph::with_identity_placement(n, (1..n).map(|k| (k - 1, k))).unwrap()
    }

    #[test]
    fn empty_intent_keeps_diagonal() {
        let g = path(3);
        let u = ComplexMatrix::from_diagonal(&[cis(0.3), cis(-1.0), cis(2.0)]);
        let d = diagonal_phases(&u.adjoint());
        let dec = finalize(&GateSequence::new(), &g, &d, &ExperimentalCost::default()).unwrap();
        assert!(dec.sequence.is_empty());
        assert_eq!(dec.total_cost(), 0.0);
        assert!(dec.verify(&u, 1e-12).unwrap());
        for (t, want) in dec.residual_phases.iter().zip([0.3, -1.0, 2.0]) {
            assert!((t - want).abs() < 1e-12);
        }
    }

    #[test]
    fn routed_intent_reconstructs() {
        // Rotate states 0 and 3 on a chain: route 3 next to 0, then rotate.
        let g = path(4);
        let r = Rotation::new(0, 3, 1.1, 0.4);
        let plan = g.plan_routing(0, 3).unwrap();
        let mut intent: GateSequence = plan.pulses.iter().map(|p| Gate::Pulse(*p)).collect();
        let (a, b) = (plan.graph.level_of(0), plan.graph.level_of(3));
        intent.push(Gate::Rotation(Rotation::new(a, b, r.theta, r.phi)));
        let dec = finalize(&intent, &g, &[0.0; 4], &ExperimentalCost::default()).unwrap();
        assert_eq!(dec.routing_pulses(), 2);
        assert_eq!(dec.logical_rotations(), 1);
        assert_eq!(dec.final_placement, vec![0, 2, 3, 1]);
        assert!(dec.verify(&r.matrix(4).unwrap(), 1e-10).unwrap());
        assert!(
            (dec.total_cost() - (2.0 * 4e-4 + ExperimentalCost::default().rotation_cost(1.1, 1)))
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn ancilla_padding() {
        let g = EnergyCouplingGraph::new(
            4,
            [(0, 1), (1, 2), (2, 3)],
            [
                (StateLabel::Logical(0), 0),
                (StateLabel::Ancilla(0), 1),
                (StateLabel::Logical(1), 2),
            ],
        )
        .unwrap();
        let u = Rotation::new(0, 1, 0.7, 0.2).matrix(2).unwrap();
        let padded = prepare_target(&u, &g).unwrap();
        assert_eq!(padded.dim(), 3);
        assert_eq!(padded[(2, 2)], Complex::new(1.0, 0.0));
        assert!(prepare_target(&ComplexMatrix::identity(4), &g).is_err());
    }

    #[test]
    fn rejects_non_unitary() {
        let mut m = ComplexMatrix::identity(3);
        m[(0, 0)] = Complex::new(1.01, 0.0);
        assert!(matches!(
            prepare_target(&m, &path(3)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn reconstruct_checks_placements() {
        let seq = GateSequence::new();
        assert!(reconstruct(&seq, &[0.0; 3], &[0, 1, 1], &[0, 1, 2], 3).is_err());
        assert!(reconstruct(&seq, &[0.0; 3], &[0, 1, 5], &[0, 1, 2], 3).is_err());
        assert!(reconstruct(&seq, &[0.0; 3], &[0, 1], &[0, 1, 2], 3).is_err());
    }
}
