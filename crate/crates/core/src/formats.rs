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

//! JSON documents for unitaries, coupling graphs and gate sequences.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CostBreakdown;
use crate::decomposition::{reconstruct, Decomposition};
use crate::error::{Error, Result};
use crate::gates::{Gate, GateSequence, Rotation, VirtualZ};
use crate::graph::{EnergyCouplingGraph, StateLabel};
use crate::linalg::{Complex, ComplexMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryFile {
    pub dim: usize,
    /// Row-major entries as `[re, im]` pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl UnitaryFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.dim(),
            entries: m
                .rows()
                .map(|row| row.iter().map(|v| [v.re, v.im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.entries.len(),
            });
        }
        ComplexMatrix::from_rows(
            self.entries
                .iter()
                .map(|row| row.iter().map(|&[re, im]| Complex::new(re, im)).collect())
                .collect(),
        )
    }
}

pub fn parse_unitary(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str::<UnitaryFile>(text)?.to_matrix()
}

pub fn read_unitary(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    parse_unitary(&fs::read_to_string(path)?)
}

pub fn unitary_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&UnitaryFile::from_matrix(m)).expect("plain data serializes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub levels: usize,
    pub edges: Vec<[usize; 2]>,
    /// State name (`"3"` or `"a0"`) to level.
    pub logical_map: BTreeMap<String, usize>,
    /// States used for routing only. Names starting with `a` always are.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ancillas: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_phases: Option<Vec<f64>>,
}

impl GraphFile {
    pub fn from_graph(g: &EnergyCouplingGraph) -> Self {
        let logical_map = g
            .labels()
            .iter()
            .enumerate()
            .map(|(k, l)| (l.to_string(), g.level_of(k)))
            .collect();
        let ancillas = g
            .ancillas()
            .into_iter()
            .filter(|l| matches!(l, StateLabel::Logical(_)))
            .map(|l| l.to_string())
            .collect();
        let node_phases = g
            .node_phases()
            .iter()
            .any(|&p| p != 0.0)
            .then(|| g.node_phases().to_vec());
        Self {
            levels: g.levels(),
            edges: g.edges().map(|(a, b)| [a, b]).collect(),
            logical_map,
            ancillas,
            node_phases,
        }
    }

    pub fn to_graph(&self) -> Result<EnergyCouplingGraph> {
        let mapping = self
            .logical_map
            .iter()
            .map(|(name, &level)| Ok((name.parse::<StateLabel>()?, level)))
            .collect::<Result<Vec<_>>>()?;
        let mut g = EnergyCouplingGraph::new(
            self.levels,
            self.edges.iter().map(|&[a, b]| (a, b)),
            mapping,
        )?;
        for name in &self.ancillas {
            g = g.mark_ancilla(name.parse()?)?;
        }
        if let Some(phases) = &self.node_phases {
            g = g.with_node_phases(phases.clone())?;
        }
        Ok(g)
    }
}

pub fn parse_graph(text: &str) -> Result<EnergyCouplingGraph> {
    serde_json::from_str::<GraphFile>(text)?.to_graph()
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<EnergyCouplingGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn graph_to_json(g: &EnergyCouplingGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(g)).expect("plain data serializes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum GateRecord {
    R {
        i: usize,
        j: usize,
        theta: f64,
        phi: f64,
        /// Marks reordering pulses.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        reorder: bool,
    },
    Z {
        i: usize,
        phi: f64,
    },
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        match *g {
            Gate::Rotation(r) | Gate::Pulse(r) => GateRecord::R {
                i: r.i,
                j: r.j,
                theta: r.theta,
                phi: r.phi,
                reorder: matches!(g, Gate::Pulse(_)),
            },
            Gate::VirtualZ(z) => GateRecord::Z {
                i: z.level,
                phi: z.phi,
            },
        }
    }
}

impl From<&GateRecord> for Gate {
    fn from(g: &GateRecord) -> Self {
        match *g {
            GateRecord::R {
                i,
                j,
                theta,
                phi,
                reorder,
            } => {
                let r = Rotation::new(i, j, theta, phi);
                if reorder {
                    Gate::Pulse(r)
                } else {
                    Gate::Rotation(r)
                }
            }
            GateRecord::Z { i, phi } => Gate::VirtualZ(VirtualZ::new(i, phi)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub rotation: f64,
    pub routing: f64,
    pub total: f64,
}

impl From<CostBreakdown> for CostRecord {
    fn from(c: CostBreakdown) -> Self {
        Self {
            rotation: c.rotation,
            routing: c.routing,
            total: c.total(),
        }
    }
}

fn application() -> String {
    "application".into()
}

/// A gate sequence on `levels` physical levels implementing a `dim`-state
/// unitary. Only `dim` and `gates` are required; the placements default to
/// the identity and the virtual phases to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default = "application")]
    pub order: String,
    pub gates: Vec<GateRecord>,
    /// Phase per state applied before the gates; never executed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub virtual_phases: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r#virtual: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_placement: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_placement: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical_rotations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing_pulses: Option<usize>,
}

impl SequenceFile {
    pub fn from_decomposition(d: &Decomposition) -> Self {
        Self {
            dim: d.dim(),
            levels: Some(d.levels),
            order: application(),
            gates: d.sequence.iter().map(GateRecord::from).collect(),
            virtual_phases: Some(d.residual_phases.clone()),
            r#virtual: Some(true),
            initial_placement: Some(d.initial_placement.clone()),
            final_placement: Some(d.final_placement.clone()),
            cost: Some(d.cost.into()),
            logical_rotations: Some(d.logical_rotations()),
            routing_pulses: Some(d.routing_pulses()),
        }
    }

    pub fn sequence(&self) -> GateSequence {
        self.gates.iter().map(Gate::from).collect()
    }

    /// The unitary over states that the file describes.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        if self.order != "application" {
            return Err(Error::Parse(format!(
                "unsupported gate order `{}`",
                self.order
            )));
        }
        let identity: Vec<usize> = (0..self.dim).collect();
        reconstruct(
            &self.sequence(),
            self.virtual_phases
                .as_deref()
                .unwrap_or(&vec![0.0; self.dim]),
            self.initial_placement.as_deref().unwrap_or(&identity),
            self.final_placement.as_deref().unwrap_or(&identity),
            self.levels.unwrap_or(self.dim),
        )
    }

    /// Whether the file implements `u`, padded with identity on ancilla
    /// states, up to global phase.
    pub fn verify(&self, u: &ComplexMatrix, tol: f64) -> Result<bool> {
        self.reconstruct()?
            .equal_up_to_global_phase(&u.pad_identity(self.dim)?, tol)
    }
}

pub fn parse_sequence(text: &str) -> Result<SequenceFile> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_sequence(path: impl AsRef<Path>) -> Result<SequenceFile> {
    parse_sequence(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExperimentalCost;
    use crate::linalg::random_unitary;
    use crate::qr::qr_decompose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(3, &mut rng);
        let back = parse_unitary(&unitary_to_json(&u)).unwrap();
        assert_eq!(back.max_distance(&u).unwrap(), 0.0);
    }

    #[test]
    fn unitary_rejects_bad_shapes() {
        assert!(parse_unitary(r#"{"dim":2,"entries":[[[1,0],[0,0]]]}"#).is_err());
        assert!(parse_unitary(r#"{"dim":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#).is_err());
        assert!(parse_unitary(r#"{"dim":2,"entries":[[[1,0],[0,0]],[[0,0],[1]]]}"#).is_err());
    }

    #[test]
    fn graph_round_trip_with_ancilla_and_free_level() {
        let text = r#"{
            "levels": 5,
            "edges": [[0,1],[1,2],[2,3]],
            "logical_map": {"0": 0, "1": 3, "a0": 1, "2": 2},
            "ancillas": ["2"]
        }"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.num_states(), 4);
        assert_eq!(g.computational_states(), 2);
        assert_eq!(g.ancillas().len(), 2);
        let again = parse_graph(&graph_to_json(&g)).unwrap();
        assert_eq!(again.placement(), g.placement());
        assert_eq!(again.ancillas(), g.ancillas());
        assert!(
            parse_graph(r#"{"levels":3,"edges":[[0,1]],"logical_map":{"0":0,"1":2}}"#).is_err()
        );
        assert!(parse_graph(r#"{"levels":3,"edges":[[0,1]],"logical_map":{"x":0}}"#).is_err());
    }

    #[test]
    fn sequence_round_trip_verifies() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(3, &mut rng);
        let g = EnergyCouplingGraph::with_identity_placement(3, [(0, 1), (0, 2)]).unwrap();
        let dec = qr_decompose(&u, &g, &ExperimentalCost::default()).unwrap();
        let file = SequenceFile::from_decomposition(&dec);
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.contains(r#""reorder":true"#));
        assert!(text.contains(r#""virtual":true"#));
        let back = parse_sequence(&text).unwrap();
        assert_eq!(back, file);
        assert!(back.verify(&u, 1e-9).unwrap());
        assert!(!back.verify(&random_unitary(3, &mut rng), 1e-9).unwrap());
    }

    #[test]
    fn minimal_sequence_file() {
        let text = r#"{"dim":3,"gates":[{"type":"R","i":0,"j":1,"theta":1.0,"phi":0.5},{"type":"Z","i":2,"phi":0.3}]}"#;
        let f = parse_sequence(text).unwrap();
        let want = f.sequence().matrix(3).unwrap();
        assert!(f.verify(&want, 1e-12).unwrap());
    }
}
