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

//! Benchmark suite: both compilers on the same seeded Clifford sets across
//! several architectures, with per-instance records and min/avg/max tables.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::clifford_batch;
use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::graph::{EnergyCouplingGraph, StateLabel};
use crate::linalg::ComplexMatrix;
use crate::qr::qr_decompose;
use crate::search::{adaptive_compile, SearchConfig};

/// Tolerance every record is verified at before aggregation.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Architecture {
    pub id: String,
    pub graph: EnergyCouplingGraph,
}

/// The three architectures shipped for a dimension:
///
/// * `path-d`: a chain with states in order;
/// * `star-d`: every level coupled to level 0 only;
/// * `chord-d`: a chain of `d + 1` levels closed by a chord from the first
///   to the last level, with an ancilla in the middle.
pub fn builtin_architectures(dim: usize) -> Result<Vec<Architecture>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let path = EnergyCouplingGraph::with_identity_placement(dim, (1..dim).map(|k| (k - 1, k)))?;
    let star = EnergyCouplingGraph::with_identity_placement(dim, (1..dim).map(|k| (0, k)))?;
    let levels = dim + 1;
    let middle = levels / 2;
    let mapping = (0..levels).map(|l| match l.cmp(&middle) {
        std::cmp::Ordering::Less => (StateLabel::Logical(l), l),
        std::cmp::Ordering::Equal => (StateLabel::Ancilla(0), l),
        std::cmp::Ordering::Greater => (StateLabel::Logical(l - 1), l),
    });
    let chord = EnergyCouplingGraph::new(
        levels,
        (1..levels).map(|k| (k - 1, k)).chain([(0, levels - 1)]),
        mapping,
    )?;
    Ok(vec![
        Architecture {
            id: format!("path-{dim}"),
            graph: path,
        },
        Architecture {
            id: format!("star-{dim}"),
            graph: star,
        },
        Architecture {
            id: format!("chord-{dim}"),
            graph: chord,
        },
    ])
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub counts: Vec<usize>,
    pub seed: u64,
    pub word_length: usize,
    pub search: SearchConfig,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
}

impl SuiteConfig {
    pub fn new(dims: Vec<usize>, counts: Vec<usize>, seed: u64) -> Self {
        Self {
            dims,
            counts,
            seed,
            word_length: 12,
            search: SearchConfig::default(),
            workers: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    /// A compiler returned a sequence that does not implement the unitary.
    Unverified,
    /// The adaptive search found nothing below its limit within budget.
    NoSolution,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dim: usize,
    pub architecture: String,
    pub unitary_index: usize,
    pub status: RecordStatus,
    pub qr_cost: Option<f64>,
    pub adaptive_cost: Option<f64>,
    pub cost_limit: Option<f64>,
    pub qr_rotations: Option<usize>,
    pub qr_routing_pulses: Option<usize>,
    pub adaptive_rotations: Option<usize>,
    pub routing_pulses: Option<usize>,
    pub nodes_expanded: Option<u64>,
    pub budget_exhausted: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BenchRecord {
    fn empty(dim: usize, architecture: &str, unitary_index: usize) -> Self {
        Self {
            dim,
            architecture: architecture.to_string(),
            unitary_index,
            status: RecordStatus::Ok,
            qr_cost: None,
            adaptive_cost: None,
            cost_limit: None,
            qr_rotations: None,
            qr_routing_pulses: None,
            adaptive_rotations: None,
            routing_pulses: None,
            nodes_expanded: None,
            budget_exhausted: None,
            wall_time_ms: None,
            error: None,
        }
    }
}

/// Compiles one unitary with both algorithms and verifies both results.
pub fn bench_instance(
    u: &ComplexMatrix,
    arch: &Architecture,
    index: usize,
    search: &SearchConfig,
    model: &dyn CostModel,
) -> BenchRecord {
    let mut rec = BenchRecord::empty(u.dim(), &arch.id, index);
    let qr = match qr_decompose(u, &arch.graph, model) {
        Ok(qr) => qr,
        Err(e) => {
            rec.status = RecordStatus::Error;
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.qr_cost = Some(qr.total_cost());
    rec.qr_rotations = Some(qr.logical_rotations());
    rec.qr_routing_pulses = Some(qr.routing_pulses());
    let mut verified = qr.verify(u, VERIFY_TOL).unwrap_or(false);

    match adaptive_compile(u, &arch.graph, search, model) {
        Ok(res) => {
            let d = &res.decomposition;
            rec.adaptive_cost = Some(d.total_cost());
            rec.cost_limit = Some(res.cost_limit);
            rec.adaptive_rotations = Some(d.logical_rotations());
            rec.routing_pulses = Some(d.routing_pulses());
            rec.nodes_expanded = Some(res.stats.nodes_expanded);
            rec.budget_exhausted = Some(res.stats.budget_exhausted);
            rec.wall_time_ms = res.stats.wall_time_ms;
            verified &= d.verify(u, VERIFY_TOL).unwrap_or(false);
            if !verified {
                rec.status = RecordStatus::Unverified;
            }
        }
        Err(Error::NoSolution { limit, nodes }) => {
            rec.status = RecordStatus::NoSolution;
            rec.cost_limit = Some(limit);
            rec.nodes_expanded = Some(nodes);
            rec.budget_exhausted = Some(true);
        }
        Err(e) => {
            rec.status = RecordStatus::Error;
            rec.error = Some(e.to_string());
        }
    }
    rec
}

/// Runs the suite. `architectures` are matched to dimensions by their
/// number of computational states; when empty, the built-in ones are used.
///
/// Records are ordered by dimension, architecture and unitary index, and
/// do not depend on the number of workers.
pub fn run_suite(
    cfg: &SuiteConfig,
    architectures: &[Architecture],
    model: &dyn CostModel,
) -> Result<Vec<BenchRecord>> {
    if cfg.dims.len() != cfg.counts.len() {
        return Err(Error::Config(format!(
            "{} dimensions but {} counts",
            cfg.dims.len(),
            cfg.counts.len()
        )));
    }
    cfg.search.validate()?;

    let mut groups: Vec<(Vec<ComplexMatrix>, Vec<Architecture>)> = Vec::new();
    for (&dim, &count) in cfg.dims.iter().zip(&cfg.counts) {
        let archs: Vec<Architecture> = if architectures.is_empty() {
            builtin_architectures(dim)?
        } else {
            architectures
                .iter()
                .filter(|a| a.graph.computational_states() == dim)
                .cloned()
                .collect()
        };
        if archs.is_empty() {
            return Err(Error::Config(format!(
                "no architecture hosts dimension {dim}"
            )));
        }
        groups.push((
            clifford_batch(dim, count, cfg.seed, cfg.word_length)?,
            archs,
        ));
    }

    let tasks: Vec<(&ComplexMatrix, &Architecture, usize)> = groups
        .iter()
        .flat_map(|(us, archs)| {
            archs
                .iter()
                .flat_map(move |a| us.iter().enumerate().map(move |(k, u)| (u, a, k)))
        })
        .collect();
    let run = || {
        tasks
            .par_iter()
            .map(|&(u, a, k)| bench_instance(u, a, k, &cfg.search, model))
            .collect()
    };
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(e.to_string()))
            .map(|pool| pool.install(run)),
        None => Ok(run()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dim: usize,
    pub architecture: String,
    /// Verified records aggregated.
    pub count: usize,
    /// Records left out because they failed or did not verify.
    pub excluded: usize,
    pub qr_min: f64,
    pub qr_avg: f64,
    pub qr_max: f64,
    pub adaptive_min: f64,
    pub adaptive_avg: f64,
    pub adaptive_max: f64,
}

/// Min/avg/max per `(dim, architecture)` group over verified records, in
/// order of first appearance. Groups without any verified record are
/// omitted and reported in the returned warnings.
pub fn summarize(records: &[BenchRecord]) -> (Vec<SummaryRow>, Vec<String>) {
    let mut keys: Vec<(usize, &str)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.dim, r.architecture.as_str())) {
            keys.push((r.dim, &r.architecture));
        }
    }
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (dim, arch) in keys {
        let group: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.dim == dim && r.architecture == arch)
            .collect();
        let ok: Vec<(f64, f64)> = group
            .iter()
            .filter(|r| r.status == RecordStatus::Ok)
            .filter_map(|r| Some((r.qr_cost?, r.adaptive_cost?)))
            .collect();
        if ok.is_empty() {
            warnings.push(format!(
                "dim {dim} on {arch}: no verified records, group omitted"
            ));
            continue;
        }
        let stats = |f: fn(&(f64, f64)) -> f64| {
            let v: Vec<f64> = ok.iter().map(f).collect();
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (min, v.iter().sum::<f64>() / v.len() as f64, max)
        };
        let (qr_min, qr_avg, qr_max) = stats(|p| p.0);
        let (adaptive_min, adaptive_avg, adaptive_max) = stats(|p| p.1);
        rows.push(SummaryRow {
            dim,
            architecture: arch.to_string(),
            count: ok.len(),
            excluded: group.len() - ok.len(),
            qr_min,
            qr_avg,
            qr_max,
            adaptive_min,
            adaptive_avg,
            adaptive_max,
        });
    }
    (rows, warnings)
}

pub fn write_records<W: Write>(records: &[BenchRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records(text: &str) -> Result<Vec<BenchRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Raw costs, one row per group.
pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable table with costs multiplied by 10⁴.
pub fn format_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:>4}  {:<12} {:>6}  {:>8} {:>8} {:>8}  {:>8} {:>8} {:>8}\n",
        "dim", "arch", "count", "QR min", "QR avg", "QR max", "ad min", "ad avg", "ad max"
    );
    for r in rows {
        s += &format!(
            "{:>4}  {:<12} {:>6}  {:>8.2} {:>8.2} {:>8.2}  {:>8.2} {:>8.2} {:>8.2}\n",
            r.dim,
            r.architecture,
            r.count,
            r.qr_min * 1e4,
            r.qr_avg * 1e4,
            r.qr_max * 1e4,
            r.adaptive_min * 1e4,
            r.adaptive_avg * 1e4,
            r.adaptive_max * 1e4
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExperimentalCost;

    fn record(dim: usize, arch: &str, k: usize, qr: f64, ad: f64) -> BenchRecord {
        BenchRecord {
            qr_cost: Some(qr),
            adaptive_cost: Some(ad),
            ..BenchRecord::empty(dim, arch, k)
        }
    }

    #[test]
    fn builtin_architectures_are_valid() {
        for d in [3, 5, 7] {
            let archs = builtin_architectures(d).unwrap();
            assert_eq!(archs.len(), 3);
            for a in &archs {
                assert_eq!(a.graph.computational_states(), d);
            }
            assert_eq!(archs[2].graph.ancillas().len(), 1);
            assert_eq!(archs[2].graph.levels(), d + 1);
        }
    }

    #[test]
    fn single_record_summary() {
        let (rows, warnings) = summarize(&[record(3, "p", 0, 2e-4, 1e-4)]);
        assert!(warnings.is_empty());
        let r = &rows[0];
        assert_eq!((r.qr_min, r.qr_avg, r.qr_max), (2e-4, 2e-4, 2e-4));
    }

    #[test]
    fn average_prints_scaled() {
        let (rows, _) = summarize(&[record(3, "p", 0, 2e-4, 2e-4), record(3, "p", 1, 4e-4, 4e-4)]);
        assert!((rows[0].qr_avg - 3e-4).abs() < 1e-18);
        assert!(format_table(&rows).contains("3.00"));
    }

    #[test]
    fn failed_groups_are_omitted() {
        let mut bad = record(5, "s", 0, 1.0, 1.0);
        bad.status = RecordStatus::NoSolution;
        let (rows, warnings) = summarize(&[record(3, "p", 0, 1.0, 1.0), bad]);
        assert_eq!(rows.len(), 1);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn empty_dims_give_no_records() {
        let cfg = SuiteConfig::new(vec![], vec![], 1);
        assert!(run_suite(&cfg, &[], &ExperimentalCost::default())
            .unwrap()
            .is_empty());
        let bad = SuiteConfig::new(vec![3], vec![], 1);
        assert!(run_suite(&bad, &[], &ExperimentalCost::default()).is_err());
    }

    #[test]
    fn small_suite_is_sound_and_ordered() {
        let mut cfg = SuiteConfig::new(vec![3], vec![10], 42);
        cfg.workers = Some(2);
        let records = run_suite(&cfg, &[], &ExperimentalCost::default()).unwrap();
        assert_eq!(records.len(), 30);
        for (n, r) in records.iter().enumerate() {
            assert_eq!(r.unitary_index, n % 10);
            assert_eq!(r.status, RecordStatus::Ok);
            assert!(r.adaptive_cost.unwrap() <= 1.1 * r.qr_cost.unwrap());
        }
        let mut text = Vec::new();
        write_records(&records, &mut text).unwrap();
        assert_eq!(
            read_records(std::str::from_utf8(&text).unwrap()).unwrap(),
            records
        );
        let mut csv = Vec::new();
        write_summary_csv(&summarize(&records).0, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }
}
