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

//! Energy coupling graphs: physical levels, drivable transitions between
//! them, and the placement of logical states onto levels.
//!
//! A graph value is a snapshot. The topology and state labels are shared
//! behind `Arc`; the placement and the per-level phase frame are small
//! vectors copied on write, so search nodes can each own one cheaply.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gates::{Gate, GateSequence, Rotation};
use crate::linalg::{cis, wrap_angle, Complex};

/// Name of a state placed on the graph: `3` for a logical basis state,
/// `a0` for a dedicated ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateLabel {
    Logical(usize),
    Ancilla(usize),
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Logical(k) => write!(f, "{k}"),
            StateLabel::Ancilla(k) => write!(f, "a{k}"),
        }
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid state label `{s}`"));
        match s.strip_prefix('a') {
            Some(rest) => rest.parse().map(StateLabel::Ancilla).map_err(|_| bad()),
            None => s.parse().map(StateLabel::Logical).map_err(|_| bad()),
        }
    }
}

#[derive(Debug)]
struct Topology {
    levels: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    /// All-pairs shortest distances, `None` when disconnected.
    distances: Vec<Vec<Option<usize>>>,
}

impl Topology {
    fn bfs_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.levels];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap_or(0);
            for &n in &self.adjacency[v] {
                if dist[n].is_none() {
                    dist[n] = Some(dv + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }
}

#[derive(Clone, Debug)]
pub struct EnergyCouplingGraph {
    topology: Arc<Topology>,
    /// State labels in canonical order; a state's position here is its
    /// index in the unitaries compiled onto this graph.
    labels: Arc<Vec<StateLabel>>,
    ancilla: Vec<bool>,
    placement: Vec<usize>,
    occupant: Vec<Option<usize>>,
    node_phase: Vec<f64>,
}

/// Reordering pulses that bring one state next to another, and the graph
/// after they have been applied.
#[derive(Clone, Debug)]
pub struct RoutingPlan {
    pub pulses: Vec<Rotation>,
    pub graph: EnergyCouplingGraph,
}

impl EnergyCouplingGraph {
    pub fn new(
        levels: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        mapping: impl IntoIterator<Item = (StateLabel, usize)>,
    ) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidGraph(format!(
                "need at least two levels, got {levels}"
            )));
        }
        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            for l in [a, b] {
                if l >= levels {
                    return Err(Error::LevelOutOfRange { level: l, levels });
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on level {a}")));
            }
            edge_set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); levels];
        for &(a, b) in &edge_set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        let mut mapping: Vec<(StateLabel, usize)> = mapping.into_iter().collect();
        mapping.sort();
        if mapping.is_empty() {
            return Err(Error::InvalidGraph("no states mapped".into()));
        }
        let mut occupant = vec![None; levels];
        for (k, w) in mapping.iter().enumerate() {
            if k > 0 && mapping[k - 1].0 == w.0 {
                return Err(Error::InvalidGraph(format!("state {} mapped twice", w.0)));
            }
            if w.1 >= levels {
                return Err(Error::LevelOutOfRange { level: w.1, levels });
            }
            if occupant[w.1].replace(k).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "level {} holds two states",
                    w.1
                )));
            }
        }

        let mut topology = Topology {
            levels,
            edges: edge_set,
            adjacency,
            distances: Vec::new(),
        };
        topology.distances = (0..levels).map(|l| topology.bfs_from(l)).collect();
        let reach = &topology.distances[mapping[0].1];
        if let Some(&(label, level)) = mapping.iter().find(|(_, l)| reach[*l].is_none()) {
            return Err(Error::InvalidGraph(format!(
                "state {label} on level {level} is not connected to state {}",
                mapping[0].0
            )));
        }

        Ok(Self {
            topology: Arc::new(topology),
            ancilla: mapping
                .iter()
                .map(|(l, _)| matches!(l, StateLabel::Ancilla(_)))
                .collect(),
            placement: mapping.iter().map(|&(_, l)| l).collect(),
            labels: Arc::new(mapping.into_iter().map(|(l, _)| l).collect()),
            occupant,
            node_phase: vec![0.0; levels],
        })
    }

    /// Graph whose levels `0..dim` hold logical states `0..dim` in order.
    pub fn with_identity_placement(
        dim: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::new(dim, edges, (0..dim).map(|k| (StateLabel::Logical(k), k)))
    }

    pub fn levels(&self) -> usize {
        self.topology.levels
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.topology.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.topology.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, level: usize) -> &[usize] {
        &self.topology.adjacency[level]
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn label(&self, state: usize) -> StateLabel {
        self.labels[state]
    }

    pub fn state_index(&self, label: StateLabel) -> Result<usize> {
        self.labels
            .binary_search(&label)
            .map_err(|_| Error::UnknownState(label.to_string()))
    }

    pub fn level_of(&self, state: usize) -> usize {
        self.placement[state]
    }

    /// Level of each state, indexed by state.
    pub fn placement(&self) -> &[usize] {
        &self.placement
    }

    pub fn occupant(&self, level: usize) -> Option<usize> {
        self.occupant[level]
    }

    pub fn node_phase(&self, level: usize) -> f64 {
        self.node_phase[level]
    }

    pub fn node_phases(&self) -> &[f64] {
        &self.node_phase
    }

    pub fn with_node_phases(&self, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != self.levels() {
            return Err(Error::DimensionMismatch {
                expected: self.levels(),
                found: phases.len(),
            });
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parse("non-finite node phase".into()));
        }
        Ok(Self {
            node_phase: phases,
            ..self.clone()
        })
    }

    pub fn without_node_phases(&self) -> Self {
        Self {
            node_phase: vec![0.0; self.levels()],
            ..self.clone()
        }
    }

    pub fn is_ancilla(&self, state: usize) -> bool {
        self.ancilla[state]
    }

    pub fn mark_ancilla(&self, label: StateLabel) -> Result<Self> {
        let k = self.state_index(label)?;
        let mut g = self.clone();
        g.ancilla[k] = true;
        Ok(g)
    }

    pub fn ancillas(&self) -> BTreeSet<StateLabel> {
        self.labels
            .iter()
            .zip(&self.ancilla)
            .filter(|(_, &a)| a)
            .map(|(&l, _)| l)
            .collect()
    }

    /// Number of leading states that are not ancillas.
    pub fn computational_states(&self) -> usize {
        self.ancilla.iter().take_while(|a| !**a).count()
    }

    fn check_state(&self, state: usize) -> Result<()> {
        if state >= self.num_states() {
            return Err(Error::UnknownState(format!("#{state}")));
        }
        Ok(())
    }

    /// Edges on a shortest path between two levels, if connected.
    pub fn level_distance(&self, a: usize, b: usize) -> Option<usize> {
        self.topology.distances[a][b]
    }

    /// Shortest distance between the levels of two states.
    pub fn distance(&self, i: usize, j: usize) -> Result<usize> {
        self.check_state(i)?;
        self.check_state(j)?;
        let (a, b) = (self.placement[i], self.placement[j]);
        self.level_distance(a, b).ok_or(Error::Disconnected(a, b))
    }

    /// Lexicographically smallest shortest path of levels from `from` to `to`.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let dist = &self.topology.distances[to];
        let mut remaining = dist[from]?;
        let mut path = vec![from];
        let mut cur = from;
        while remaining > 0 {
            cur = *self.topology.adjacency[cur]
                .iter()
                .find(|&&n| dist[n] == Some(remaining - 1))
                .expect("bfs distances are consistent");
            path.push(cur);
            remaining -= 1;
        }
        Some(path)
    }

    /// Moves state `j` along a shortest path until it sits next to state `i`.
    ///
    /// State `i` never moves. The plan has `distance(i, j) - 1` pulses.
    pub fn plan_routing(&self, i: usize, j: usize) -> Result<RoutingPlan> {
        self.check_state(i)?;
        self.check_state(j)?;
        let (a, b) = (self.placement[i], self.placement[j]);
        let path = self.shortest_path(a, b).ok_or(Error::Disconnected(a, b))?;
        let mut graph = self.clone();
        let mut pulses = Vec::with_capacity(path.len().saturating_sub(2));
        for m in (1..path.len().saturating_sub(1)).rev() {
            let pulse = Rotation::reorder(path[m], path[m + 1]);
            graph.apply_pulse(&pulse);
            pulses.push(pulse);
        }
        Ok(RoutingPlan { pulses, graph })
    }

    /// Updates placement and phase frame for a π-rotation that exchanges
    /// the contents of its two levels.
    ///
    /// Content moving between levels picks up the phase of the matching
    /// off-diagonal entry. For the default pulse `R(π, −π/2)` that is `+1`
    /// downward and `−1` upward, so the higher level gains π.
    pub fn apply_pulse(&mut self, pulse: &Rotation) {
        let p = pulse.normalized();
        let (lo, hi) = (p.i, p.j);
        let block = p.block();
        let down = block[0][1];
        let up = block[1][0];
        let (psi_lo, psi_hi) = (self.node_phase[lo], self.node_phase[hi]);
        self.node_phase[lo] = wrap_angle(psi_hi + down.arg());
        self.node_phase[hi] = wrap_angle(psi_lo + up.arg());
        let (occ_lo, occ_hi) = (self.occupant[lo], self.occupant[hi]);
        self.occupant[lo] = occ_hi;
        self.occupant[hi] = occ_lo;
        if let Some(k) = occ_hi {
            self.placement[k] = lo;
        }
        if let Some(k) = occ_lo {
            self.placement[k] = hi;
        }
    }

    /// True when every rotation in `seq` acts on a coupled pair of levels.
    pub fn supports(&self, seq: &GateSequence) -> bool {
        seq.iter()
            .filter_map(Gate::rotation)
            .all(|r| self.has_edge(r.i, r.j))
    }

    /// Phase `e^{iψ}` carried by the content of a level.
    pub fn frame(&self, level: usize) -> Complex {
        cis(self.node_phase[level])
    }
}

fn is_default_pulse(p: &Rotation) -> bool {
    (p.theta - PI).abs() < 1e-12 && (wrap_angle(p.phi) + FRAC_PI_2).abs() < 1e-12
}

/// Turns a routed sequence written in terms of logical intent into the
/// physically correct one.
///
/// Pulses are kept verbatim and drive the placement and phase frame. Each
/// rotation is rewritten by three rules:
///
/// 1. a rotation written from a higher to a lower level is flipped to
///    low→high, negating φ;
/// 2. if the gate directly follows a default reordering pulse whose higher
///    level is one of the gate's levels, θ changes sign; the π that pulse
///    deposited is accounted for by this flip and skipped by rule 3;
/// 3. φ gains the frame phase of the gate's higher level and loses that of
///    its lower level.
///
/// Returns the physical sequence and the graph after the whole sequence.
pub fn apply_graph_rules(
    seq: &GateSequence,
    graph: &EnergyCouplingGraph,
) -> Result<(GateSequence, EnergyCouplingGraph)> {
    seq.validate(graph.levels())?;
    let mut g = graph.clone();
    let mut out = GateSequence::new();
    let mut last_pulse: Option<Rotation> = None;
    for gate in seq {
        match gate {
            Gate::Pulse(p) => {
                let p = p.normalized();
                g.apply_pulse(&p);
                out.push(Gate::Pulse(p));
                last_pulse = Some(p);
            }
            Gate::Rotation(r) => {
                let n = r.normalized();
                let mut theta = n.theta;
                let mut psi_lo = g.node_phase(n.i);
                let mut psi_hi = g.node_phase(n.j);
                if let Some(p) = last_pulse.filter(is_default_pulse) {
                    if n.touches(p.j) {
                        theta = -theta;
                        if p.j == n.j {
                            psi_hi -= PI;
                        } else {
                            psi_lo -= PI;
                        }
                    }
                }
                let phi = wrap_angle(n.phi + psi_hi - psi_lo);
                out.push(Gate::Rotation(Rotation::new(n.i, n.j, theta, phi)));
                last_pulse = None;
            }
            Gate::VirtualZ(z) => {
                out.push(Gate::VirtualZ(*z));
                last_pulse = None;
            }
        }
    }
    Ok((out, g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> EnergyCouplingGraph {
        EnergyCouplingGraph::with_identity_placement(n, (1..n).map(|k| (k - 1, k))).unwrap()
    }

    /// Logical states scattered over the levels with one ancilla bridging them.
    fn realistic() -> EnergyCouplingGraph {
        EnergyCouplingGraph::new(
            8,
            [(0, 3), (0, 5), (2, 5), (2, 6), (2, 7)],
            [
                (StateLabel::Logical(2), 0),
                (StateLabel::Logical(1), 2),
                (StateLabel::Logical(0), 3),
                (StateLabel::Ancilla(0), 5),
                (StateLabel::Logical(4), 6),
                (StateLabel::Logical(3), 7),
            ],
        )
        .unwrap()
    }

    fn bfs_oracle(g: &EnergyCouplingGraph, a: usize, b: usize) -> usize {
        let mut seen = vec![false; g.levels()];
        let mut frontier = vec![a];
        seen[a] = true;
        let mut steps = 0;
        while !frontier.contains(&b) {
            let mut next = Vec::new();
            for v in frontier {
                for (x, y) in g.edges() {
                    for (p, q) in [(x, y), (y, x)] {
                        if p == v && !seen[q] {
                            seen[q] = true;
                            next.push(q);
                        }
                    }
                }
            }
            frontier = next;
            steps += 1;
        }
        steps
    }

    #[test]
    fn labels_round_trip() {
        for s in ["0", "12", "a0", "a3"] {
            assert_eq!(s.parse::<StateLabel>().unwrap().to_string(), s);
        }
        assert!("b1".parse::<StateLabel>().is_err());
        assert!("a".parse::<StateLabel>().is_err());
    }

    #[test]
    fn construction_rejects_bad_graphs() {
        let l = StateLabel::Logical;
        assert!(EnergyCouplingGraph::new(3, [(0, 0)], [(l(0), 0)]).is_err());
        assert!(EnergyCouplingGraph::new(3, [(0, 1)], [(l(0), 0), (l(1), 0)]).is_err());
        assert!(EnergyCouplingGraph::new(3, [(0, 1)], [(l(0), 0), (l(0), 1)]).is_err());
        assert!(EnergyCouplingGraph::new(3, [(0, 1)], [(l(0), 0), (l(1), 2)]).is_err());
        assert!(EnergyCouplingGraph::new(3, [(0, 1)], [(l(0), 3)]).is_err());
        // Unmapped routing levels may bridge mapped ones.
        assert!(EnergyCouplingGraph::new(3, [(0, 1), (1, 2)], [(l(0), 0), (l(1), 2)]).is_ok());
    }

    #[test]
    fn distance_examples() {
        let g = realistic();
        let s = |x| g.state_index(x).unwrap();
        assert_eq!(
            g.distance(s(StateLabel::Logical(2)), s(StateLabel::Logical(0)))
                .unwrap(),
            1
        );
        // |2⟩ and |1⟩ are only joined through the ancilla.
        assert_eq!(
            g.distance(s(StateLabel::Logical(2)), s(StateLabel::Logical(1)))
                .unwrap(),
            2
        );
        for i in 0..g.num_states() {
            for j in 0..g.num_states() {
                assert_eq!(
                    g.distance(i, j).unwrap(),
                    bfs_oracle(&g, g.level_of(i), g.level_of(j))
                );
            }
        }
    }

    #[test]
    fn ancilla_bridges_routing() {
        let g = realistic();
        let two = g.state_index(StateLabel::Logical(2)).unwrap();
        let one = g.state_index(StateLabel::Logical(1)).unwrap();
        let a0 = g.state_index(StateLabel::Ancilla(0)).unwrap();
        assert!(g.is_ancilla(a0));
        let plan = g.plan_routing(two, one).unwrap();
        assert_eq!(plan.pulses, vec![Rotation::reorder(2, 5)]);
        // The ancilla and |1⟩ exchange places.
        assert_eq!(plan.graph.level_of(one), 5);
        assert_eq!(plan.graph.level_of(a0), 2);
        assert_eq!(plan.graph.distance(two, one).unwrap(), 1);
    }

    #[test]
    fn mark_and_list_ancillas() {
        let g = path_graph(5);
        assert!(g.ancillas().is_empty());
        let g = g
            .mark_ancilla(StateLabel::Logical(3))
            .unwrap()
            .mark_ancilla(StateLabel::Logical(4))
            .unwrap();
        assert_eq!(
            g.ancillas(),
            BTreeSet::from([StateLabel::Logical(3), StateLabel::Logical(4)])
        );
        assert_eq!(g.computational_states(), 3);
        assert!(g.mark_ancilla(StateLabel::Ancilla(0)).is_err());
    }

    #[test]
    fn adjacent_routing_is_empty() {
        let g = path_graph(4);
        let plan = g.plan_routing(1, 2).unwrap();
        assert!(plan.pulses.is_empty());
        assert_eq!(plan.graph.placement(), g.placement());
    }

    #[test]
    fn chain_routing_for_outer_levels() {
        let g = path_graph(4);
        let plan = g.plan_routing(0, 3).unwrap();
        assert_eq!(
            plan.pulses,
            vec![Rotation::reorder(2, 3), Rotation::reorder(1, 2)]
        );
        assert_eq!(plan.graph.placement(), &[0, 2, 3, 1]);
        assert!(plan
            .graph
            .has_edge(plan.graph.level_of(0), plan.graph.level_of(3)));
        // Pulse deposits follow the moved contents.
        assert!((plan.graph.node_phase(3).abs() - PI).abs() < 1e-12);
        assert!((plan.graph.node_phase(2).abs() - PI).abs() < 1e-12);
        assert_eq!(plan.graph.node_phase(1), 0.0);
    }

    #[test]
    fn lexicographic_tie_break() {
        // Square 0-1-3, 0-2-3: both paths have length 2.
        let g = EnergyCouplingGraph::with_identity_placement(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
            .unwrap();
        assert_eq!(g.shortest_path(0, 3).unwrap(), vec![0, 1, 3]);
        assert_eq!(g.shortest_path(3, 0).unwrap(), vec![3, 1, 0]);
    }

    #[test]
    fn direction_rule_negates_phase() {
        let g = path_graph(4);
        let seq: GateSequence = [Gate::Rotation(Rotation::new(3, 1, 0.8, 0.3))]
            .into_iter()
            .collect();
        let (out, _) = apply_graph_rules(&seq, &g).unwrap();
        let r = out.gates()[0].rotation().unwrap();
        assert_eq!((r.i, r.j, r.theta), (1, 3, 0.8));
        assert!((r.phi + 0.3).abs() < 1e-12);
    }

    #[test]
    fn rules_leave_plain_sequences_alone() {
        let g = path_graph(3);
        let seq: GateSequence = [
            Gate::Rotation(Rotation::new(0, 1, 0.8, 0.3)),
            Gate::Rotation(Rotation::new(1, 2, -1.1, 2.0)),
        ]
        .into_iter()
        .collect();
        let (out, after) = apply_graph_rules(&seq, &g).unwrap();
        assert_eq!(out, seq);
        assert_eq!(after.placement(), g.placement());
    }

    #[test]
    fn pulse_flips_following_theta() {
        let g = path_graph(3);
        let seq: GateSequence = [
            Gate::Pulse(Rotation::reorder(1, 2)),
            Gate::Rotation(Rotation::new(0, 2, 0.9, 0.4)),
        ]
        .into_iter()
        .collect();
        let (out, _) = apply_graph_rules(&seq, &g).unwrap();
        // Node 2 holds the π from the pulse, which rule 2 consumes.
        assert_eq!(
            out.gates()[1],
            Gate::Rotation(Rotation::new(0, 2, -0.9, 0.4))
        );
    }

    #[test]
    fn inverse_pulse_restores_frame() {
        let mut g = path_graph(3)
            .with_node_phases(vec![0.2, -0.7, 1.3])
            .unwrap();
        let before = g.clone();
        let p = Rotation::reorder(0, 1);
        g.apply_pulse(&p);
        g.apply_pulse(&p.inverse());
        assert_eq!(g.placement(), before.placement());
        for l in 0..3 {
            assert!((wrap_angle(g.node_phase(l) - before.node_phase(l))).abs() < 1e-12);
        }
    }
}
