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

//! Invariants checked over random graphs, unitaries and sequences.

use proptest::prelude::*;
use qadapt_core::formats::{parse_sequence, SequenceFile};
use qadapt_core::linalg::{cis, random_unitary};
use qadapt_core::{
    adaptive_compile, qr_decompose, sweep_phases, DiagonalPhases, EnergyCouplingGraph, Error,
    ExperimentalCost, Gate, GateSequence, Rotation, SearchConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;

/// A random tree: level `k` hangs off some earlier level.
fn tree(max_levels: usize) -> impl Strategy<Value = EnergyCouplingGraph> {
    (3..=max_levels)
        .prop_flat_map(|n| (1..n).map(|k| 0..k).collect::<Vec<_>>())
        .prop_map(|parents| {
            let n = parents.len() + 1;
            let edges = parents.into_iter().enumerate().map(|(k, p)| (p, k + 1));
            EnergyCouplingGraph::with_identity_placement(n, edges).unwrap()
        })
}

fn unitary(dim: usize, seed: u64) -> qadapt_core::ComplexMatrix {
    random_unitary(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn rotation(n: usize) -> impl Strategy<Value = Rotation> {
    (0..n, 1..n, -6.3..6.3f64, -6.3..6.3f64)
        .prop_map(move |(i, off, theta, phi)| Rotation::new(i, (i + off) % n, theta, phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn routing_brings_states_together(g in tree(7), i in 0usize..7, j in 0usize..7) {
        let n = g.levels();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let plan = g.plan_routing(i, j).unwrap();
        prop_assert_eq!(plan.pulses.len(), g.distance(i, j).unwrap() - 1);
        prop_assert_eq!(plan.graph.level_of(i), g.level_of(i));
        prop_assert!(plan.graph.has_edge(plan.graph.level_of(i), plan.graph.level_of(j)));
    }

    #[test]
    fn qr_reconstructs_on_trees(g in tree(5), seed in any::<u64>()) {
        let u = unitary(g.levels(), seed);
        let d = qr_decompose(&u, &g, &ExperimentalCost::default()).unwrap();
        prop_assert!(d.verify(&u, TOL).unwrap());
        prop_assert!(g.supports(&d.sequence));
        prop_assert_eq!(&d.final_placement, &d.initial_placement);
    }

    #[test]
    fn adaptive_reconstructs_within_limit(g in tree(4), seed in any::<u64>()) {
        let u = unitary(g.levels(), seed);
        let model = ExperimentalCost::default();
        let cfg = SearchConfig { max_nodes: Some(5_000), ..SearchConfig::default() };
        match adaptive_compile(&u, &g, &cfg, &model) {
            Ok(res) => {
                prop_assert!(res.decomposition.verify(&u, TOL).unwrap());
                prop_assert!(res.decomposition.total_cost() <= res.cost_limit);
                prop_assert!(res.cost_limit <= 1.1 * res.qr_cost.unwrap() * (1.0 + 1e-12));
            }
            Err(Error::NoSolution { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn global_phase_is_irrelevant(seed in any::<u64>(), alpha in -3.1..3.1f64) {
        let g = EnergyCouplingGraph::with_identity_placement(3, [(0, 1), (1, 2)]).unwrap();
        let u = unitary(3, seed);
        let shifted = u.scale(cis(alpha));
        let cfg = SearchConfig { max_nodes: None, ..SearchConfig::default() };
        let model = ExperimentalCost::default();
        let a = adaptive_compile(&u, &g, &cfg, &model).unwrap();
        let b = adaptive_compile(&shifted, &g, &cfg, &model).unwrap();
        prop_assert!(b.decomposition.verify(&u, TOL).unwrap());
        prop_assert!((a.decomposition.total_cost() - b.decomposition.total_cost()).abs() < 1e-12);
    }

    #[test]
    fn sweep_moves_phases_through(
        gates in prop::collection::vec(rotation(5), 0..12),
        outer in prop::collection::vec(-3.2..3.2f64, 5),
    ) {
        let seq: GateSequence = gates.iter().map(|r| Gate::Rotation(*r)).collect();
        let outer = DiagonalPhases(outer);
        let (swept, inner) = sweep_phases(&seq, &outer);
        let lhs = outer.matrix().multiply(&seq.matrix(5).unwrap()).unwrap();
        let rhs = swept.matrix(5).unwrap().multiply(&inner.matrix()).unwrap();
        prop_assert!(lhs.max_distance(&rhs).unwrap() < 1e-10);
        for (a, b) in seq.iter().zip(swept.iter()) {
            prop_assert_eq!(a.rotation().unwrap().theta, b.rotation().unwrap().theta);
        }
    }

    #[test]
    fn sequence_files_round_trip(g in tree(4), seed in any::<u64>()) {
        let u = unitary(g.levels(), seed);
        let d = qr_decompose(&u, &g, &ExperimentalCost::default()).unwrap();
        let file = SequenceFile::from_decomposition(&d);
        let back = parse_sequence(&serde_json::to_string(&file).unwrap()).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert!(back.verify(&u, TOL).unwrap());
    }
}

#[test]
fn qr_reconstructs_200_per_dim() {
    let model = ExperimentalCost::default();
    for n in [3, 4, 5] {
        let g =
            EnergyCouplingGraph::with_identity_placement(n, (1..n).map(|k| (k - 1, k))).unwrap();
        for seed in 0..200 {
            let u = unitary(n, seed);
            assert!(
                qr_decompose(&u, &g, &model)
                    .unwrap()
                    .verify(&u, TOL)
                    .unwrap(),
                "dim {n} seed {seed}"
            );
        }
    }
}
