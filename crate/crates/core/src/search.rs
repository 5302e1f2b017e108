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

//! Adaptive decomposition: depth-first branch and bound over the choice of
//! which entry to eliminate next.
//!
//! Every node holds the not yet decomposed matrix, a graph snapshot with the
//! current placement and the cost so far. Children are all rotations that
//! zero one entry `(r2, c)` against a pivot `(r, c)` with `r ≥ c`, each
//! priced with the routing it needs on that snapshot. The search keeps the
//! cheapest complete path below the cost limit.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{gate_cost, gate_cost_estimate, CostModel};
use crate::decomposition::{diagonal_phases, finalize, prepare_target, Decomposition};
use crate::error::{Error, Result};
use crate::gates::{Gate, GateSequence, Rotation};
use crate::graph::EnergyCouplingGraph;
use crate::linalg::ComplexMatrix;
use crate::qr::{apply_state_rotation, givens_parameters, qr_decompose};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostLimit {
    /// Multiple of the QR baseline's cost for the same unitary.
    QrFactor(f64),
    Absolute(f64),
}

/// Order in which the children of a node are explored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChildOrder {
    /// Ascending `(c, r, r2)`.
    #[default]
    Textual,
    /// Cheapest step first.
    Cheapest,
    /// Ascending column, cheapest step first within a column.
    ColumnCheapest,
}

impl std::str::FromStr for ChildOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "textual" => Ok(Self::Textual),
            "cheapest" => Ok(Self::Cheapest),
            "column_cheapest" => Ok(Self::ColumnCheapest),
            other => Err(Error::Config(format!("unknown child order `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub cost_limit: CostLimit,
    /// Entries at or below this modulus are not eliminated.
    pub threshold: f64,
    pub diag_tol: f64,
    /// Node budget; `None` searches exhaustively.
    pub max_nodes: Option<u64>,
    /// Stop at the first complete decomposition.
    pub return_first: bool,
    pub child_order: ChildOrder,
    /// Overrides the default depth cap `n(n−1)/2 + n`.
    pub max_depth: Option<usize>,
    /// At every node, also follow the QR elimination order to a leaf and
    /// keep it as incumbent when it is cheaper. This only adds leaves of the
    /// same tree, so the optimum is unchanged, but the limit is met early.
    pub rollouts: bool,
    /// Record wall time in the statistics. Off by default so results are
    /// reproducible byte for byte.
    pub record_time: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            cost_limit: CostLimit::QrFactor(1.1),
            threshold: 1e-8,
            diag_tol: 1e-9,
            max_nodes: Some(1_000_000),
            return_first: false,
            child_order: ChildOrder::Textual,
            max_depth: None,
            rollouts: true,
            record_time: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        match self.cost_limit {
            CostLimit::QrFactor(f) if !(f.is_finite() && f >= 1.0) => {
                return Err(Error::Config(format!(
                    "cost limit factor must be at least 1, got {f}"
                )))
            }
            CostLimit::Absolute(l) if !(l.is_finite() && l >= 0.0) => {
                return Err(Error::Config(format!(
                    "absolute cost limit must be finite and non-negative, got {l}"
                )))
            }
            _ => {}
        }
        if self.threshold.is_nan()
            || self.threshold <= 0.0
            || self.diag_tol.is_nan()
            || self.diag_tol <= 0.0
        {
            return Err(Error::Config(
                "threshold and diag_tol must be positive".into(),
            ));
        }
        if self.max_nodes == Some(0) {
            return Err(Error::Config("max_nodes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    /// Deepest node visited.
    pub max_depth: usize,
    /// Logical rotations on the returned path.
    pub solution_depth: usize,
    /// The node budget ran out before the search space was exhausted.
    pub budget_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct CompilationResult {
    pub decomposition: Decomposition,
    pub stats: SearchStats,
    pub cost_limit: f64,
    /// Cost of the QR baseline when it was computed for the limit.
    pub qr_cost: Option<f64>,
}

#[derive(Clone, Debug)]
struct Step {
    pulses: Vec<Rotation>,
    rotation: Rotation,
}

struct Child {
    column: usize,
    step_cost: f64,
    r: usize,
    r2: usize,
    theta: f64,
    phi: f64,
}

struct Searcher<'a> {
    model: &'a dyn CostModel,
    cfg: &'a SearchConfig,
    limit: f64,
    depth_cap: usize,
    stats: SearchStats,
    path: Vec<Step>,
    best: Option<(f64, Vec<Step>, Vec<f64>)>,
    stop: bool,
}

impl Searcher<'_> {
    fn bound(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(self.limit, |b| b.0.min(self.limit))
    }

    fn visit(&mut self, w: &ComplexMatrix, graph: &EnergyCouplingGraph, cost: f64) -> Result<()> {
        self.stats.nodes_expanded += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.path.len());
        if w.is_diagonal(self.cfg.diag_tol) {
            if self.best.as_ref().is_none_or(|b| cost < b.0) {
                self.best = Some((cost, self.path.clone(), diagonal_phases(w)));
            }
            self.stop |= self.cfg.return_first;
            return Ok(());
        }
        if self.over_budget() || self.path.len() >= self.depth_cap {
            return Ok(());
        }
        if self.cfg.rollouts {
            self.rollout(w, graph, cost)?;
            if self.stop {
                return Ok(());
            }
        }

        let mut children = self.children(w, graph, cost)?;
        match self.cfg.child_order {
            ChildOrder::Textual => {}
            ChildOrder::Cheapest => children.sort_by(|a, b| a.step_cost.total_cmp(&b.step_cost)),
            ChildOrder::ColumnCheapest => children.sort_by(|a, b| {
                a.column
                    .cmp(&b.column)
                    .then(a.step_cost.total_cmp(&b.step_cost))
            }),
        }
        for child in children {
            if self.stop {
                break;
            }
            let next_cost = cost + child.step_cost;
            if next_cost >= self.bound() {
                continue;
            }
            let mut next = w.clone();
            apply_state_rotation(&mut next, child.r, child.r2, child.theta, child.phi);
            let plan = graph.plan_routing(child.r, child.r2)?;
            let rotation = Rotation::new(
                plan.graph.level_of(child.r),
                plan.graph.level_of(child.r2),
                child.theta,
                child.phi,
            );
            self.path.push(Step {
                pulses: plan.pulses,
                rotation,
            });
            self.visit(&next, &plan.graph, next_cost)?;
            self.path.pop();
        }
        Ok(())
    }

    /// Completes the current path by clearing columns left to right, each
    /// bottom-up with neighbouring states, exactly as children would.
    fn rollout(
        &mut self,
        w: &ComplexMatrix,
        graph: &EnergyCouplingGraph,
        mut cost: f64,
    ) -> Result<()> {
        let n = w.dim();
        let mut w = w.clone();
        let mut graph = graph.clone();
        let mut steps = Vec::new();
        for c in 0..n {
            for r in (c + 1..n).rev() {
                if w[(r, c)].norm() <= self.cfg.threshold {
                    continue;
                }
                if self.path.len() + steps.len() >= self.depth_cap || self.over_budget() {
                    return Ok(());
                }
                self.stats.nodes_expanded += 1;
                let (theta, phi) = givens_parameters(&w, c, r - 1, r);
                let (step, plan) = gate_cost(self.model, &graph, r - 1, r, theta)?;
                cost += step.total();
                if cost >= self.bound() {
                    return Ok(());
                }
                apply_state_rotation(&mut w, r - 1, r, theta, phi);
                steps.push(Step {
                    pulses: plan.pulses,
                    rotation: Rotation::new(
                        plan.graph.level_of(r - 1),
                        plan.graph.level_of(r),
                        theta,
                        phi,
                    ),
                });
                graph = plan.graph;
            }
        }
        if w.is_diagonal(self.cfg.diag_tol) {
            self.stats.max_depth = self.stats.max_depth.max(self.path.len() + steps.len());
            let mut path = self.path.clone();
            path.extend(steps);
            self.best = Some((cost, path, diagonal_phases(&w)));
            self.stop |= self.cfg.return_first;
        }
        Ok(())
    }

    fn over_budget(&mut self) -> bool {
        if self
            .cfg
            .max_nodes
            .is_some_and(|m| self.stats.nodes_expanded >= m)
        {
            self.stats.budget_exhausted = true;
            self.stop = true;
        }
        self.stop
    }

    fn children(
        &self,
        w: &ComplexMatrix,
        graph: &EnergyCouplingGraph,
        cost: f64,
    ) -> Result<Vec<Child>> {
        let n = w.dim();
        let bound = self.bound();
        let mut out = Vec::new();
        for c in 0..n {
            for r in c..n {
                for r2 in r + 1..n {
                    if w[(r2, c)].norm() <= self.cfg.threshold {
                        continue;
                    }
                    let (theta, phi) = givens_parameters(w, c, r, r2);
                    let step = gate_cost_estimate(self.model, graph, r, r2, theta)?.total();
                    if cost + step < bound {
                        out.push(Child {
                            column: c,
                            step_cost: step,
                            r,
                            r2,
                            theta,
                            phi,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Compiles `u` onto `graph` with the adaptive search.
///
/// Fails with [`Error::NoSolution`] when no decomposition below the cost
/// limit was found within the node budget.
pub fn adaptive_compile(
    u: &ComplexMatrix,
    graph: &EnergyCouplingGraph,
    cfg: &SearchConfig,
    model: &dyn CostModel,
) -> Result<CompilationResult> {
    cfg.validate()?;
    let start = Instant::now();
    let target = prepare_target(u, graph)?;
    let (limit, qr_cost) = match cfg.cost_limit {
        CostLimit::Absolute(l) => (l, None),
        CostLimit::QrFactor(f) => {
            let qr = qr_decompose(u, graph, model)?.total_cost();
            (f * qr, Some(qr))
        }
    };
    let n = target.dim();
    let mut searcher = Searcher {
        model,
        cfg,
        limit,
        depth_cap: cfg.max_depth.unwrap_or(n * (n - 1) / 2 + n),
        stats: SearchStats::default(),
        path: Vec::new(),
        best: None,
        stop: false,
    };
    let w = target.adjoint();
    searcher.visit(&w, graph, 0.0)?;

    let mut stats = searcher.stats;
    let Some((_, path, phases)) = searcher.best else {
        return Err(Error::NoSolution {
            limit,
            nodes: stats.nodes_expanded,
        });
    };
    let mut intent = GateSequence::new();
    for step in &path {
        intent.extend(step.pulses.iter().map(|p| Gate::Pulse(*p)));
        intent.push(Gate::Rotation(step.rotation));
    }
    let decomposition = finalize(&intent, graph, &phases, model)?;
    stats.solution_depth = path.len();
    if cfg.record_time {
        stats.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(CompilationResult {
        decomposition,
        stats,
        cost_limit: limit,
        qr_cost,
    })
}

/// Compiles independent unitaries in parallel. Results keep input order and
/// a failure affects only its own entry.
pub fn compile_batch(
    us: &[ComplexMatrix],
    graph: &EnergyCouplingGraph,
    cfg: &SearchConfig,
    model: &dyn CostModel,
) -> Vec<Result<CompilationResult>> {
    us.par_iter()
        .map(|u| adaptive_compile(u, graph, cfg, model))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExperimentalCost;
    use crate::linalg::{cis, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path(n: usize) -> EnergyCouplingGraph {
        EnergyCouplingGraph::with_identity_placement(n, (1..n).map(|k| (k - 1, k))).unwrap()
    }

    fn model() -> ExperimentalCost {
        ExperimentalCost::default()
    }

    #[test]
    fn diagonal_input_is_free() {
        let u = ComplexMatrix::from_diagonal(&[cis(0.5), cis(-0.2), cis(3.0)]);
        let res = adaptive_compile(&u, &path(3), &SearchConfig::default(), &model()).unwrap();
        assert!(res.decomposition.sequence.is_empty());
        assert_eq!(res.decomposition.total_cost(), 0.0);
        assert_eq!(res.stats.nodes_expanded, 1);
        assert!(res.decomposition.verify(&u, 1e-12).unwrap());
    }

    #[test]
    fn direct_edge_needs_one_rotation() {
        let g = EnergyCouplingGraph::with_identity_placement(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
            .unwrap();
        let u = Rotation::new(0, 3, 1.3, 0.6).matrix(4).unwrap();
        let res = adaptive_compile(&u, &g, &SearchConfig::default(), &model()).unwrap();
        let d = &res.decomposition;
        assert_eq!((d.logical_rotations(), d.routing_pulses()), (1, 0));
        assert!(d.total_cost() < res.qr_cost.unwrap());
        assert!(d.verify(&u, 1e-10).unwrap());
    }

    #[test]
    fn respects_limit_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for order in [
            ChildOrder::Textual,
            ChildOrder::Cheapest,
            ChildOrder::ColumnCheapest,
        ] {
            let cfg = SearchConfig {
                child_order: order,
                ..SearchConfig::default()
            };
            for _ in 0..10 {
                let u = random_unitary(3, &mut rng);
                let res = adaptive_compile(&u, &path(3), &cfg, &model()).unwrap();
                assert!(res.decomposition.total_cost() <= res.cost_limit);
                assert!(res.decomposition.verify(&u, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn return_first_stops_early() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_unitary(4, &mut rng);
        let full = adaptive_compile(&u, &path(4), &SearchConfig::default(), &model()).unwrap();
        let cfg = SearchConfig {
            return_first: true,
            ..SearchConfig::default()
        };
        let first = adaptive_compile(&u, &path(4), &cfg, &model()).unwrap();
        assert!(first.stats.nodes_expanded <= full.stats.nodes_expanded);
        assert!(first.decomposition.total_cost() >= full.decomposition.total_cost());
        assert!(first.decomposition.verify(&u, 1e-9).unwrap());
    }

    #[test]
    fn impossible_limit_reports_no_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(3, &mut rng);
        let cfg = SearchConfig {
            cost_limit: CostLimit::Absolute(1e-6),
            ..SearchConfig::default()
        };
        assert!(matches!(
            adaptive_compile(&u, &path(3), &cfg, &model()),
            Err(Error::NoSolution { .. })
        ));
    }

    #[test]
    fn budget_is_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = random_unitary(4, &mut rng);
        let cfg = SearchConfig {
            max_nodes: Some(50),
            ..SearchConfig::default()
        };
        match adaptive_compile(&u, &path(4), &cfg, &model()) {
            Ok(res) => assert!(res.stats.nodes_expanded <= 50),
            Err(Error::NoSolution { nodes, .. }) => assert!(nodes <= 50),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn batch_matches_single_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let us: Vec<_> = (0..6).map(|_| random_unitary(3, &mut rng)).collect();
        let cfg = SearchConfig::default();
        let batch = compile_batch(&us, &path(3), &cfg, &model());
        assert_eq!(batch.len(), us.len());
        for (u, b) in us.iter().zip(&batch) {
            let single = adaptive_compile(u, &path(3), &cfg, &model()).unwrap();
            let b = b.as_ref().unwrap();
            assert_eq!(b.decomposition.sequence, single.decomposition.sequence);
            assert_eq!(b.stats, single.stats);
        }
        assert!(compile_batch(&[], &path(3), &cfg, &model()).is_empty());
    }

    #[test]
    fn rejects_bad_config() {
        let u = ComplexMatrix::identity(3);
        for cfg in [
            SearchConfig {
                cost_limit: CostLimit::QrFactor(0.5),
                ..SearchConfig::default()
            },
            SearchConfig {
                threshold: 0.0,
                ..SearchConfig::default()
            },
        ] {
            assert!(matches!(
                adaptive_compile(&u, &path(3), &cfg, &model()),
                Err(Error::Config(_))
            ));
        }
    }
}
