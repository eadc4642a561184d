//! End-to-end run: ingest, snapshots, parameters, classification and, for
//! networks that classify Good, overlap forecasting, core-degree prediction
//! and evaluation.
//!
//! Every stage writes its result as JSON under `<out>/<config hash>/`. A
//! rerun with the same configuration and input loads finished stages from
//! disk instead of recomputing them. Wall-clock timings are logged but never
//! written, so the files depend only on the configuration and the input.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::centrality::{overlap_from_scores, series_centrality, CentralityKind, OverlapSeries};
use crate::classify::{rocchio_assign, Category, ClusterModel, Verdict};
use crate::error::{Error, Result};
use crate::evaluate::{evaluate_with_truth, EvalOptions, EvalReport};
use crate::exec::Execution;
use crate::forecast::{rolling_evaluate_with, ErrorReport, ModelFamily};
use crate::graph::{build_snapshots, parse_edge_stream, AggregationMode, SnapshotSeries};
use crate::params::{compute_series_with, CfxMode, ParamSeries};
use crate::predict::{predict_core_degree, DegreeMode, Method, PredictionResult};
use crate::synth::{generate, GenSpec, Profile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub window: u64,
    pub mode: AggregationMode,
    /// Size of the predicted vertex set.
    pub m: usize,
    /// Size of the top sets whose overlap is forecast.
    pub k: usize,
    /// Forecast window length.
    pub history: usize,
    /// History length of the averaging baselines.
    pub r: usize,
    pub seed: u64,
    pub cfx_mode: CfxMode,
    pub family: ModelFamily,
    pub degree_mode: DegreeMode,
    /// Trained cluster model; the built-in reference model when absent.
    pub model: Option<PathBuf>,
    pub force_predict: bool,
    /// Where run directories go; not part of a run's identity.
    #[serde(skip)]
    pub out: PathBuf,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> PipelineConfig {
        PipelineConfig {
            input: input.into(),
            window: 1,
            mode: AggregationMode::Windowed,
            m: 10,
            k: 10,
            history: 20,
            r: 20,
            seed: 0,
            cfx_mode: CfxMode::Shell,
            family: ModelFamily::Arima,
            degree_mode: DegreeMode::Full,
            model: None,
            force_predict: false,
            out: out.into(),
        }
    }

    /// Hash of everything that can change a stage output: the settings and
    /// the bytes of the input and model.
    pub fn hash(&self) -> Result<String> {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self)?);
        h.update(fs::read(&self.input)?);
        if let Some(model) = &self.model {
            h.update(fs::read(model)?);
        }
        Ok(hex::encode(&h.finalize()[..8]))
    }
}

const REFERENCE_SEEDS: u64 = 3;
const REFERENCE_STEPS: usize = 30;

/// Vertex count the reference networks are generated at: the median
/// non-empty snapshot size, kept within generator-friendly bounds. Several
/// parameters scale with network size, so the references have to match it.
pub fn reference_scale(series: &SnapshotSeries) -> usize {
    let mut sizes: Vec<usize> = series.non_empty().map(|g| g.vertex_count()).collect();
    sizes.sort_unstable();
    sizes.get(sizes.len() / 2).copied().unwrap_or(0).clamp(200, 200_000)
}

/// Cluster model trained on three conforming and three non-conforming
/// generated networks of `n` vertices with fixed seeds.
pub fn reference_model(n: usize) -> Result<ClusterModel> {
    let mut training = Vec::new();
    for profile in [Profile::Conforming, Profile::NonConforming] {
        for seed in 0..REFERENCE_SEEDS {
            let spec = GenSpec::for_profile(profile, n, REFERENCE_STEPS, 1000 + seed);
            let series = compute_series_with(&generate(&spec)?, CfxMode::Shell, Execution::default())?;
            training.push((format!("{profile:?}-{seed}"), series));
        }
    }
    ClusterModel::train(&training)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub category: Category,
    pub code: String,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forecasts {
    pub kind: CentralityKind,
    pub non_recursive: ErrorReport,
    pub recursive: ErrorReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: CentralityKind,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSection {
    /// Set when the verdict was Bad and prediction ran anyway.
    pub forced: bool,
    pub forecast: Vec<ForecastSummary>,
    pub f1: Vec<Summary>,
    pub latest: PredictionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSummary {
    pub kind: CentralityKind,
    pub non_recursive: (f64, f64),
    pub recursive: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub snapshots: usize,
    pub usable_snapshots: usize,
    pub category: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prediction: Option<PredictionSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skip_reason: Option<String>,
}

pub struct Run {
    pub dir: PathBuf,
    pub report: RunReport,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)?;
    Ok(())
}

/// Loads `<dir>/<name>.json` when present, else computes and stores it.
fn cached<T, F>(dir: &Path, name: &str, compute: F) -> Result<T>
where
    T: Serialize + DeserializeOwned,
    F: FnOnce() -> Result<T>,
{
    let path = dir.join(format!("{name}.json"));
    if path.exists() {
        log::info!("{name}: reusing {}", path.display());
        let bytes = fs::read(&path).map_err(|e| Error::in_stage(name)(e.into()))?;
        return serde_json::from_slice(&bytes).map_err(|e| Error::in_stage(name)(e.into()));
    }
    let started = std::time::Instant::now();
    let value = compute().map_err(Error::in_stage(name))?;
    log::info!("{name}: {:.3}s", started.elapsed().as_secs_f64());
    write_json(&path, &value).map_err(Error::in_stage(name))?;
    Ok(value)
}

pub fn run(config: &PipelineConfig) -> Result<Run> {
    let exec = Execution::default();
    let hash = config.hash().map_err(Error::in_stage("ingest"))?;
    let dir = config.out.join(&hash);
    fs::create_dir_all(&dir).map_err(|e| Error::in_stage("ingest")(e.into()))?;
    write_json(&dir.join("config.json"), config)?;

    let series: SnapshotSeries = cached(&dir, "snapshots", || {
        let file = fs::File::open(&config.input)?;
        let edges = parse_edge_stream(std::io::BufReader::new(file))?;
        build_snapshots(&edges, config.mode, config.window)
    })?;
    let usable = series.non_empty().count();

    let params: ParamSeries = cached(&dir, "params", || compute_series_with(&series, config.cfx_mode, exec))?;

    let classification: Classification = cached(&dir, "classification", || {
        let (model, name) = match &config.model {
            Some(path) => (serde_json::from_slice(&fs::read(path)?)?, path.display().to_string()),
            None => {
                let n = reference_scale(&series);
                (reference_model(n)?, format!("reference (n = {n})"))
            }
        };
        let category = rocchio_assign(&model, &params)?;
        Ok(Classification {
            code: category.code(),
            category,
            model: name,
        })
    })?;
    let verdict = classification.category.verdict;

    let mut report = RunReport {
        config_hash: hash,
        snapshots: series.len(),
        usable_snapshots: usable,
        category: classification.code.clone(),
        verdict,
        prediction: None,
        skip_reason: None,
    };
    if verdict == Verdict::Bad && !config.force_predict {
        report.skip_reason = Some(format!(
            "category {} is Bad: the innermost core does not single out central vertices here, so core-degree prediction would do no better than a random pick",
            classification.code
        ));
        write_json(&dir.join("report.json"), &report)?;
        return Ok(Run { dir, report });
    }

    let opts = EvalOptions {
        r: config.r,
        seed: config.seed,
        degree_mode: config.degree_mode,
        exec,
        ..EvalOptions::default()
    };
    let mut forecast = Vec::new();
    let mut f1 = Vec::new();
    for kind in [CentralityKind::Closeness, CentralityKind::Betweenness] {
        let mut truth = None;
        let mut scores = || -> Result<_> {
            if truth.is_none() {
                truth = Some(series_centrality(&series, kind, exec)?);
            }
            Ok(truth.clone().unwrap())
        };
        let overlap: OverlapSeries = cached(&dir, &format!("overlap-{kind}"), || {
            overlap_from_scores(&scores()?, kind, config.k)
        })?;
        let fc: Forecasts = cached(&dir, &format!("forecast-{kind}"), || {
            Ok(Forecasts {
                kind,
                non_recursive: rolling_evaluate_with(&overlap.values, config.history, false, config.family, exec)?,
                recursive: rolling_evaluate_with(&overlap.values, config.history, true, config.family, exec)?,
            })
        })?;
        forecast.push(ForecastSummary {
            kind,
            non_recursive: (fc.non_recursive.mean, fc.non_recursive.std),
            recursive: (fc.recursive.mean, fc.recursive.std),
        });
        let eval: EvalReport = cached(&dir, &format!("evaluation-{kind}"), || {
            let mut r = evaluate_with_truth(&series, &scores()?, Method::CoreDegree, config.m, &opts)?;
            r.timing = None;
            Ok(r)
        })?;
        log::debug!("{kind}: mean F1 {:.3}", eval.mean);
        f1.push(Summary {
            kind,
            mean: eval.mean,
            std: eval.std,
        });
    }
    let predictions: Vec<PredictionResult> = cached(&dir, "predictions", || {
        series
            .non_empty()
            .map(|g| predict_core_degree(g, config.m, config.degree_mode))
            .collect()
    })?;

    report.prediction = Some(PredictionSection {
        forced: verdict == Verdict::Bad,
        forecast,
        f1,
        latest: predictions.last().cloned().ok_or(Error::Empty("no usable snapshot"))?,
    });
    write_json(&dir.join("report.json"), &report)?;
    Ok(Run { dir, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_model_separates_the_profiles() {
        let model = reference_model(1000).unwrap();
        for seed in 0..REFERENCE_SEEDS {
            assert_eq!(model.training_category(&format!("Conforming-{seed}")).unwrap().code(), "GGGG");
            let bad = model.training_category(&format!("NonConforming-{seed}")).unwrap();
            assert!(bad.labels.iter().filter(|l| **l == crate::classify::Label::B).count() >= 3);
        }
    }

    #[test]
    fn stage_errors_carry_the_stage_name() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("edges.txt");
        fs::write(&input, "# nothing\n").unwrap();
        let err = run(&PipelineConfig::new(&input, dir.path().join("out"))).err().unwrap();
        assert!(matches!(&err, Error::Stage { stage, .. } if stage == "snapshots"));
        assert!(err.is_data_error());
    }
}
