use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use innercore::centrality::{overlap_from_scores, series_centrality, top_k, CentralityKind};
use innercore::classify::{rocchio_assign, ClusterModel};
use innercore::evaluate::{evaluate_series, EvalOptions};
use innercore::forecast::{rolling_evaluate, ModelFamily};
use innercore::graph::{build_snapshots, parse_edge_stream, write_edge_stream, AggregationMode, SnapshotSeries};
use innercore::kcore::find_core;
use innercore::params::{compute_series, CfxMode};
use innercore::pipeline::{reference_model, reference_scale, run, PipelineConfig};
use innercore::predict::{predict_core_degree, predict_global_degree, DegreeMode, Method};
use innercore::synth::{generate_stream, GenSpec, Profile};
use innercore::validate::{cc_snapshot, validate_snapshot};
use innercore::{Error, Execution};

#[derive(Parser)]
#[command(name = "innercore", version, about = "Predict top central vertices of temporal networks from the innermost k-core")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Snapshot length in input time units.
    #[arg(long, global = true, default_value_t = 1)]
    window: u64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Windowed)]
    mode: Mode,
    /// Number of vertices to predict.
    #[arg(long, global = true, default_value_t = 10)]
    m: usize,
    /// Size of the top sets whose overlap is tracked.
    #[arg(long, global = true, default_value_t = 10)]
    k: usize,
    /// Forecast window length.
    #[arg(long, global = true, default_value_t = 20)]
    history: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (run directory for `pipeline`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Windowed,
    Cumulative,
}

impl From<Mode> for AggregationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Windowed => AggregationMode::Windowed,
            Mode::Cumulative => AggregationMode::Cumulative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Closeness,
    Betweenness,
}

impl From<Kind> for CentralityKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Closeness => CentralityKind::Closeness,
            Kind::Betweenness => CentralityKind::Betweenness,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CfxArg {
    Shell,
    Core,
}

impl From<CfxArg> for CfxMode {
    fn from(c: CfxArg) -> Self {
        match c {
            CfxArg::Shell => CfxMode::Shell,
            CfxArg::Core => CfxMode::Core,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Arima,
    Ar,
    Ma,
    Arma,
}

impl From<Family> for ModelFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Arima => ModelFamily::Arima,
            Family::Ar => ModelFamily::Ar,
            Family::Ma => ModelFamily::Ma,
            Family::Arma => ModelFamily::Arma,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    CoreDegree,
    GlobalDegree,
    Uniform,
    W1,
    W2,
    Random,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::CoreDegree => Method::CoreDegree,
            MethodArg::GlobalDegree => Method::GlobalDegree,
            MethodArg::Uniform => Method::Uniform,
            MethodArg::W1 => Method::W1,
            MethodArg::W2 => Method::W2,
            MethodArg::Random => Method::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Degree {
    Full,
    Induced,
}

impl From<Degree> for DegreeMode {
    fn from(d: Degree) -> Self {
        match d {
            Degree::Full => DegreeMode::Full,
            Degree::Induced => DegreeMode::Induced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Conforming,
    NonConforming,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Spread,
    Diameter,
    Cc,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an edge list and report what was read.
    Ingest { input: PathBuf },
    /// Aggregate an edge list into snapshots.
    Snapshot {
        input: PathBuf,
        /// Print `t vertex coreness` lines instead of the snapshot summary.
        #[arg(long)]
        coreness: bool,
    },
    /// Per-snapshot EF, CFX, ED and CV.
    Params {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CfxArg::Shell)]
        cfx_mode: CfxArg,
    },
    /// Train a cluster model or assign a network to one.
    Classify {
        #[command(subcommand)]
        action: ClassifyAction,
    },
    /// Exact top-k centrality of every snapshot.
    Centrality {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// Rolling forecast of the top-k overlap series.
    Forecast {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Betweenness)]
        kind: Kind,
        #[arg(long, value_enum, default_value_t = Family::Arima)]
        model: Family,
        /// Feed forecasts back into the window instead of observations.
        #[arg(long)]
        recursive: bool,
    },
    /// Predicted top-m vertices per snapshot.
    Predict {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::CoreDegree)]
        method: MethodArg,
        /// Centrality averaged by the history methods.
        #[arg(long, value_enum, default_value_t = Kind::Betweenness)]
        kind: Kind,
        /// History length of the averaging methods.
        #[arg(long, default_value_t = 20)]
        r: usize,
        #[arg(long, value_enum, default_value_t = Degree::Full)]
        degree: Degree,
    },
    /// F1 of a method against exact centrality.
    Evaluate {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::CoreDegree)]
        method: MethodArg,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 20)]
        r: usize,
        #[arg(long, value_enum, default_value_t = Degree::Full)]
        degree: Degree,
        /// Also write per-step rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Functional checks of the predicted set, or core connectedness.
    Validate {
        #[arg(value_enum)]
        check: Check,
        input: PathBuf,
        /// Pair budget of the core-connectedness check.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Write a generated temporal network as an edge list.
    Synth {
        #[arg(long, value_enum)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long)]
        core_size: Option<usize>,
        #[arg(long)]
        core_density: Option<f64>,
        #[arg(long)]
        churn: Option<f64>,
        #[arg(long)]
        core_churn: Option<f64>,
        #[arg(long)]
        hubs: Option<usize>,
    },
    /// Full run with cached intermediates under `--out` (default `runs`).
    Pipeline {
        input: PathBuf,
        /// Trained cluster model; the built-in reference model otherwise.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Predict even when the network classifies Bad.
        #[arg(long)]
        force_predict: bool,
        #[arg(long, default_value_t = 20)]
        r: usize,
        #[arg(long, value_enum, default_value_t = CfxArg::Shell)]
        cfx_mode: CfxArg,
        #[arg(long, value_enum, default_value_t = Family::Arima)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum ClassifyAction {
    /// Cluster labelled training networks given as `ID=PATH`.
    Train {
        #[arg(required = true)]
        networks: Vec<String>,
        #[arg(long, value_enum, default_value_t = CfxArg::Shell)]
        cfx_mode: CfxArg,
    },
    /// Assign a network to the nearest clusters.
    Assign {
        input: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CfxArg::Shell)]
        cfx_mode: CfxArg,
    },
}

fn load(path: &Path, g: &Global) -> innercore::Result<SnapshotSeries> {
    let edges = parse_edge_stream(BufReader::new(fs::File::open(path)?))?;
    if edges.dropped_self_loops > 0 {
        log::warn!("dropped {} self-loop(s)", edges.dropped_self_loops);
    }
    build_snapshots(&edges, g.mode.into(), g.window)
}

fn emit_bytes(g: &Global, bytes: &[u8]) -> innercore::Result<()> {
    match &g.out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn emit<T: Serialize>(g: &Global, value: &T) -> innercore::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    emit_bytes(g, &bytes)
}

fn execute(cli: Cli) -> innercore::Result<()> {
    let g = &cli.global;
    let exec = Execution::default();
    match cli.command {
        Command::Ingest { input } => {
            let edges = parse_edge_stream(BufReader::new(fs::File::open(&input)?))?;
            let mut vertices: Vec<u64> = edges.edges.iter().flat_map(|e| [e.u, e.v]).collect();
            vertices.sort_unstable();
            vertices.dedup();
            emit(
                g,
                &json!({
                    "edges": edges.edges.len(),
                    "vertices": vertices.len(),
                    "dropped_self_loops": edges.dropped_self_loops,
                    "t_min": edges.edges.iter().map(|e| e.t).min(),
                    "t_max": edges.edges.iter().map(|e| e.t).max(),
                }),
            )
        }
        Command::Snapshot { input, coreness } => {
            let series = load(&input, g)?;
            if coreness {
                let mut text = String::new();
                for s in series.non_empty() {
                    for (v, c) in find_core(s)?.to_pairs(s) {
                        text.push_str(&format!("{} {v} {c}\n", s.index()));
                    }
                }
                return emit_bytes(g, text.as_bytes());
            }
            let rows: Vec<_> = series
                .snapshots
                .iter()
                .map(|s| json!({ "t": s.index(), "vertices": s.vertex_count(), "edges": s.edge_count() }))
                .collect();
            emit(g, &rows)
        }
        Command::Params { input, cfx_mode } => emit(g, &compute_series(&load(&input, g)?, cfx_mode.into())?.to_export()),
        Command::Classify { action } => match action {
            ClassifyAction::Train { networks, cfx_mode } => {
                let mut training = Vec::new();
                for spec in networks {
                    let (id, path) = spec
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidArgument(format!("expected ID=PATH, got '{spec}'")))?;
                    training.push((id.to_string(), compute_series(&load(Path::new(path), g)?, cfx_mode.into())?));
                }
                let model = ClusterModel::train(&training)?;
                for (id, _) in &training {
                    if let Some(c) = model.training_category(id) {
                        log::info!("{id}: {c}");
                    }
                }
                emit(g, &model)
            }
            ClassifyAction::Assign { input, model, cfx_mode } => {
                let series = load(&input, g)?;
                let model: ClusterModel = match model {
                    Some(path) => serde_json::from_slice(&fs::read(path)?)?,
                    None => reference_model(reference_scale(&series))?,
                };
                let category = rocchio_assign(&model, &compute_series(&series, cfx_mode.into())?)?;
                emit(g, &json!({ "code": category.code(), "category": category }))
            }
        },
        Command::Centrality { input, kind } => {
            let series = load(&input, g)?;
            let mut rows = Vec::new();
            for (t, scores) in series_centrality(&series, kind.into(), exec)? {
                let top = top_k(&scores, g.k)?;
                let listed: Vec<_> = top
                    .members
                    .iter()
                    .map(|&v| json!({ "vertex": v, "score": scores.get(v) }))
                    .collect();
                rows.push(json!({ "t": t, "top": listed }));
            }
            emit(g, &rows)
        }
        Command::Forecast { input, kind, model, recursive } => {
            let series = load(&input, g)?;
            let scores = series_centrality(&series, kind.into(), exec)?;
            let overlap = overlap_from_scores(&scores, kind.into(), g.k)?;
            emit(g, &rolling_evaluate(&overlap.values, g.history, recursive, model.into())?)
        }
        Command::Predict { input, method, kind, r, degree } => {
            let series = load(&input, g)?;
            let method: Method = method.into();
            let rows: Vec<_> = match method {
                Method::CoreDegree | Method::GlobalDegree => series
                    .non_empty()
                    .map(|s| {
                        let p = match method {
                            Method::CoreDegree => predict_core_degree(s, g.m, degree.into())?,
                            _ => predict_global_degree(s, g.m)?,
                        };
                        Ok(json!({ "t": p.t, "members": p.members }))
                    })
                    .collect::<innercore::Result<_>>()?,
                _ => {
                    let opts = EvalOptions {
                        r,
                        seed: g.seed,
                        degree_mode: degree.into(),
                        exec,
                        ..EvalOptions::default()
                    };
                    let report = evaluate_series(&series, method, kind.into(), g.m, &opts)?;
                    report
                        .steps
                        .iter()
                        .map(|s| json!({ "t": s.t, "members": s.predicted }))
                        .collect()
                }
            };
            emit(g, &rows)
        }
        Command::Evaluate { input, method, kind, r, degree, csv } => {
            let series = load(&input, g)?;
            let opts = EvalOptions {
                r,
                seed: g.seed,
                degree_mode: degree.into(),
                exec,
                ..EvalOptions::default()
            };
            let report = evaluate_series(&series, method.into(), kind.into(), g.m, &opts)?;
            if let Some(path) = csv {
                let mut text = String::from("t,f1\n");
                for s in &report.steps {
                    text.push_str(&format!("{},{}\n", s.t, s.f1));
                }
                fs::write(path, text)?;
            }
            emit(g, &report)
        }
        Command::Validate { check, input, budget } => {
            let series = load(&input, g)?;
            let mut rows = Vec::new();
            for s in series.non_empty() {
                rows.push(match check {
                    Check::Spread => {
                        let v = validate_snapshot(s, g.m, g.seed, exec)?;
                        json!({ "t": v.t, "spread": v.spread })
                    }
                    Check::Diameter => {
                        let v = validate_snapshot(s, g.m, g.seed, exec)?;
                        json!({ "t": v.t, "diameter": v.diameter })
                    }
                    Check::Cc => json!({ "t": s.index(), "cc": cc_snapshot(s, budget, g.seed)? }),
                });
            }
            emit(g, &rows)
        }
        Command::Synth { profile, n, steps, core_size, core_density, churn, core_churn, hubs } => {
            let profile = match profile {
                ProfileArg::Conforming => Profile::Conforming,
                ProfileArg::NonConforming => Profile::NonConforming,
            };
            let mut spec = GenSpec::for_profile(profile, n, steps, g.seed);
            spec.core_size = core_size.unwrap_or(spec.core_size);
            spec.core_density = core_density.unwrap_or(spec.core_density);
            spec.churn = churn.unwrap_or(spec.churn);
            spec.core_churn = core_churn.unwrap_or(spec.core_churn);
            spec.hubs = hubs.unwrap_or(spec.hubs);
            let generated = generate_stream(&spec)?;
            let mut bytes = Vec::new();
            write_edge_stream(&mut bytes, &generated.edges)?;
            emit_bytes(g, &bytes)
        }
        Command::Pipeline { input, model, force_predict, r, cfx_mode, family } => {
            let mut config = PipelineConfig::new(input, g.out.clone().unwrap_or_else(|| PathBuf::from("runs")));
            config.window = g.window;
            config.mode = g.mode.into();
            config.m = g.m;
            config.k = g.k;
            config.history = g.history;
            config.r = r;
            config.seed = g.seed;
            config.cfx_mode = cfx_mode.into();
            config.family = family.into();
            config.model = model;
            config.force_predict = force_predict;
            let result = run(&config)?;
            log::info!("run directory: {}", result.dir.display());
            let mut bytes = serde_json::to_vec_pretty(&result.report)?;
            bytes.push(b'\n');
            io::stdout().lock().write_all(&bytes)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match &e {
                Error::InvalidArgument(_) => 1,
                e if e.is_data_error() => 2,
                _ => 3,
            })
        }
    }
}
