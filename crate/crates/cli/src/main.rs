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

//! `qadapt` command line tool.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid input,
//! 3 no decomposition below the cost limit within the node budget.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qadapt_core::formats::{
    graph_to_json, read_graph, read_sequence, read_unitary, unitary_to_json, SequenceFile,
};
use qadapt_core::suite::{builtin_architectures, format_table, write_records, write_summary_csv};
use qadapt_core::{
    adaptive_compile, benchmark_clifford, qr_decompose, run_suite, summarize, Architecture,
    ChildOrder, Config, Decomposition, Error, SuiteConfig,
};

#[derive(Parser)]
#[command(
    name = "qadapt",
    version,
    about = "Adaptive compiler for single-qudit unitaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a unitary onto an energy coupling graph.
    Compile(CompileArgs),
    /// Check that a sequence file implements a unitary.
    Verify(VerifyArgs),
    /// Compile random Cliffords with both compilers and summarize costs.
    Bench(BenchArgs),
    /// Write one Clifford of a benchmark set as a unitary file.
    Clifford(CliffordArgs),
    /// Export the built-in architectures as graph files.
    Arch(ArchArgs),
    /// Print the effective configuration as TOML.
    Config(ConfigArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Adaptive,
    Qr,
}

#[derive(Args)]
struct Settings {
    /// TOML configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cost_model: Option<String>,
    #[arg(long)]
    base_factor: Option<f64>,
    #[arg(long)]
    calibrated_angle: Option<f64>,
    #[arg(long)]
    angle_floor: Option<f64>,
    #[arg(long)]
    cost_limit_factor: Option<f64>,
    /// Fixed cost limit instead of a multiple of the QR cost.
    #[arg(long)]
    absolute_limit: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Node budget, 0 for unlimited.
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long, action = clap::ArgAction::Set)]
    return_first: Option<bool>,
    #[arg(long, value_parser = parse_child_order)]
    child_order: Option<ChildOrder>,
    #[arg(long, action = clap::ArgAction::Set)]
    rollouts: Option<bool>,
}

fn parse_child_order(s: &str) -> Result<ChildOrder, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Settings {
    fn resolve(&self) -> anyhow::Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => Config::default(),
        };
        let c = &mut cfg.cost;
        set(&mut c.model, self.cost_model.clone());
        set(&mut c.base_factor, self.base_factor);
        set(&mut c.calibrated_angle, self.calibrated_angle);
        set(&mut c.angle_floor, self.angle_floor);
        let s = &mut cfg.search;
        set(&mut s.cost_limit_factor, self.cost_limit_factor);
        if self.absolute_limit.is_some() {
            s.absolute_limit = self.absolute_limit;
        }
        set(&mut s.threshold, self.threshold);
        set(&mut s.max_nodes, self.max_nodes);
        set(&mut s.return_first, self.return_first);
        set(&mut s.child_order, self.child_order);
        set(&mut s.rollouts, self.rollouts);
        cfg.cost_model()?;
        cfg.search_config().validate()?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    unitary: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "adaptive")]
    mode: Mode,
    /// Sequence file to write; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time in the summary.
    #[arg(long)]
    time: bool,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    unitary: PathBuf,
    #[arg(long)]
    sequence: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "333,2985,6438")]
    counts: Vec<usize>,
    /// Graph files; the built-in architectures are used when omitted.
    #[arg(long, value_delimiter = ',')]
    graphs: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 12)]
    word_length: usize,
    /// Summary statistics as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// One JSON record per compiled instance.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Record wall times. Records are then no longer reproducible byte for byte.
    #[arg(long)]
    time: bool,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Args)]
struct CliffordArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    word_length: usize,
    /// Position in the benchmark set.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ArchArgs {
    #[arg(long)]
    dim: usize,
    /// `path`, `star` or `chord`; all three when omitted.
    #[arg(long)]
    name: Option<String>,
    /// Directory to write `<name>-<dim>.json` files into; stdout otherwise.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    #[command(flatten)]
    settings: Settings,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::NoSolution { .. }) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Compile(args) => compile(args),
        Command::Verify(args) => verify(args),
        Command::Bench(args) => bench(args),
        Command::Clifford(args) => {
            let u = benchmark_clifford(args.dim, args.seed, args.word_length, args.index)?;
            emit(args.out.as_deref(), &unitary_to_json(&u))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Arch(args) => arch(args),
        Command::Config(args) => {
            print!("{}", args.settings.resolve()?.to_toml());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn compile(args: CompileArgs) -> anyhow::Result<ExitCode> {
    let cfg = args.settings.resolve()?;
    let model = cfg.cost_model()?;
    let u = read_unitary(&args.unitary)
        .with_context(|| format!("reading {}", args.unitary.display()))?;
    let graph =
        read_graph(&args.graph).with_context(|| format!("reading {}", args.graph.display()))?;
    let start = std::time::Instant::now();
    let mut summary = serde_json::Map::new();
    let decomposition: Decomposition = match args.mode {
        Mode::Qr => {
            summary.insert("mode".into(), "qr".into());
            qr_decompose(&u, &graph, model.as_ref())?
        }
        Mode::Adaptive => {
            let mut search = cfg.search_config();
            search.record_time = args.time;
            let res = adaptive_compile(&u, &graph, &search, model.as_ref())?;
            summary.insert("mode".into(), "adaptive".into());
            summary.insert("cost_limit".into(), res.cost_limit.into());
            if let Some(q) = res.qr_cost {
                summary.insert("qr_cost".into(), q.into());
            }
            summary.insert("stats".into(), serde_json::to_value(&res.stats)?);
            res.decomposition
        }
    };
    summary.insert("total_cost".into(), decomposition.total_cost().into());
    summary.insert(
        "logical_rotations".into(),
        decomposition.logical_rotations().into(),
    );
    summary.insert(
        "routing_pulses".into(),
        decomposition.routing_pulses().into(),
    );
    if args.time {
        summary.insert(
            "wall_time_ms".into(),
            (start.elapsed().as_secs_f64() * 1e3).into(),
        );
    }
    let file = serde_json::to_string_pretty(&SequenceFile::from_decomposition(&decomposition))?;
    let summary = serde_json::Value::Object(summary).to_string();
    match &args.out {
        Some(p) => {
            emit(Some(p), &file)?;
            println!("{summary}");
        }
        None => {
            println!("{file}");
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    if args.tol.is_nan() || args.tol <= 0.0 {
        bail!(Error::Config(format!(
            "tolerance must be positive, got {}",
            args.tol
        )));
    }
    let u = read_unitary(&args.unitary)
        .with_context(|| format!("reading {}", args.unitary.display()))?;
    let seq = read_sequence(&args.sequence)
        .with_context(|| format!("reading {}", args.sequence.display()))?;
    if seq.verify(&u, args.tol)? {
        println!("ok");
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "mismatch: sequence does not implement the unitary within {:e}",
            args.tol
        );
        Ok(ExitCode::from(1))
    }
}

fn bench(args: BenchArgs) -> anyhow::Result<ExitCode> {
    let cfg = args.settings.resolve()?;
    let model = cfg.cost_model()?;
    let architectures = args
        .graphs
        .iter()
        .map(|p| {
            let graph = read_graph(p).with_context(|| format!("reading {}", p.display()))?;
            let id = p.file_stem().map_or_else(
                || p.display().to_string(),
                |s| s.to_string_lossy().into_owned(),
            );
            Ok(Architecture { id, graph })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut suite = SuiteConfig::new(args.dims, args.counts, args.seed);
    suite.word_length = args.word_length;
    suite.workers = args.workers;
    suite.search = cfg.search_config();
    suite.search.record_time = args.time;

    let records = run_suite(&suite, &architectures, model.as_ref())?;
    if let Some(p) = &args.records {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_records(&records, std::io::BufWriter::new(f))?;
    }
    let (rows, warnings) = summarize(&records);
    if let Some(p) = &args.csv {
        let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        write_summary_csv(&rows, f)?;
    }
    print!("{}", format_table(&rows));
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let failed = records
        .iter()
        .filter(|r| r.status != qadapt_core::suite::RecordStatus::Ok)
        .count();
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} instances excluded from the summary",
            records.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn arch(args: ArchArgs) -> anyhow::Result<ExitCode> {
    let mut archs = builtin_architectures(args.dim)?;
    if let Some(name) = &args.name {
        let id = format!("{name}-{}", args.dim);
        archs.retain(|a| a.id == id);
        if archs.is_empty() {
            bail!(Error::Config(format!("unknown architecture `{name}`")));
        }
    }
    for a in &archs {
        let json = graph_to_json(&a.graph);
        match &args.out_dir {
            Some(dir) => emit(Some(&dir.join(format!("{}.json", a.id))), &json)?,
            None => println!("{json}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}
