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

//! Compilation of single-qudit unitaries into two-level rotations on an
//! energy coupling graph.
//!
//! Two compilers are provided. [`qr_decompose`] eliminates entries in a
//! fixed order and undoes any routing it needs. [`adaptive_compile`]
//! searches over the elimination order, tracks how routing moves the states
//! and keeps the cheapest decomposition under a cost limit. Both return a
//! [`Decomposition`] whose rotations, followed by nothing but virtual phase
//! bookkeeping, implement the input unitary.

pub mod clifford;
pub mod config;
pub mod cost;
pub mod decomposition;
pub mod error;
pub mod formats;
pub mod gates;
pub mod graph;
pub mod linalg;
pub mod phases;
pub mod qr;
pub mod search;
pub mod suite;

pub use clifford::{
    benchmark_clifford, clifford_batch, generator_set, random_clifford, CliffordSpec,
};
pub use config::Config;
pub use cost::{
    cost_model, gate_cost, CostBreakdown, CostModel, CostParams, ExperimentalCost, GateCountCost,
};
pub use decomposition::Decomposition;
pub use error::{Error, Result};
pub use gates::{Gate, GateSequence, Rotation, VirtualZ};
pub use graph::{apply_graph_rules, EnergyCouplingGraph, RoutingPlan, StateLabel};
pub use linalg::{Complex, ComplexMatrix};
pub use phases::{commute_through, sweep_phases, DiagonalPhases};
pub use qr::{qr_cost_bound, qr_decompose};
pub use search::{
    adaptive_compile, compile_batch, ChildOrder, CompilationResult, CostLimit, SearchConfig,
    SearchStats,
};
pub use suite::{run_suite, summarize, Architecture, BenchRecord, SuiteConfig};
