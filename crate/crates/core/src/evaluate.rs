//! Scoring predicted top sets against exact centrality.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{series_centrality, top_k, CentralityKind, CentralityScores};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::forecast::mean_std;
use crate::graph::{Snapshot, SnapshotSeries, VertexId};
use crate::params::{snapshot_params, CfxMode};
use crate::predict::{
    predict_core_degree, predict_global_degree, predict_history_average, DegreeMode, Method,
};

/// `2|P ∩ A| / (|P| + |A|)`; two empty sets score 1.
pub fn f1_sets(predicted: &[VertexId], actual: &[VertexId]) -> f64 {
    let p: BTreeSet<_> = predicted.iter().collect();
    let a: BTreeSet<_> = actual.iter().collect();
    if p.is_empty() && a.is_empty() {
        return 1.0;
    }
    2.0 * p.intersection(&a).count() as f64 / (p.len() + a.len()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// History length for the averaging baselines.
    pub r: usize,
    /// First usable-snapshot position to score.
    pub start: usize,
    /// Seed of the random baseline.
    pub seed: u64,
    pub degree_mode: DegreeMode,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            r: 20,
            start: 0,
            seed: 0,
            degree_mode: DegreeMode::Full,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepScore {
    pub t: usize,
    pub f1: f64,
    pub predicted: Vec<VertexId>,
    pub actual: Vec<VertexId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub exact_seconds: f64,
    pub predict_seconds: f64,
    pub params_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: Method,
    pub kind: CentralityKind,
    pub m: usize,
    pub steps: Vec<StepScore>,
    pub mean: f64,
    pub std: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl EvalReport {
    pub fn f1_values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.f1).collect()
    }
}

/// Seeded draw of `m` vertices from the largest component of `g`.
pub fn random_members(g: &Snapshot, m: usize, seed: u64) -> Result<Vec<VertexId>> {
    let lcc = g.largest_component()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lcc.vertex_count();
    let mut picked: Vec<VertexId> = rand::seq::index::sample(&mut rng, n, m.min(n))
        .into_iter()
        .map(|v| lcc.id(v))
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Prediction for usable snapshot `pos`; `None` when the method has no
/// history to work from yet.
pub fn predict_at(
    usable: &[&Snapshot],
    truth: &[(usize, CentralityScores)],
    pos: usize,
    method: Method,
    m: usize,
    opts: &EvalOptions,
) -> Result<Option<Vec<VertexId>>> {
    let g = usable[pos];
    let members = match method {
        Method::CoreDegree => predict_core_degree(g, m, opts.degree_mode)?.members,
        Method::GlobalDegree => predict_global_degree(g, m)?.members,
        Method::Random => random_members(g, m, opts.seed ^ (g.index() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))?,
        Method::Uniform | Method::W1 | Method::W2 => {
            if pos == 0 {
                return Ok(None);
            }
            let from = pos.saturating_sub(opts.r.max(1));
            let history: Vec<CentralityScores> = truth[from..pos].iter().map(|(_, s)| s.clone()).collect();
            predict_history_average(&history, method.weighting().unwrap(), m, g.index())?.members
        }
    };
    Ok(Some(members))
}

/// Scores `method` against precomputed exact centralities (one entry per
/// non-empty snapshot, as returned by [`series_centrality`]).
pub fn evaluate_with_truth(
    s: &SnapshotSeries,
    truth: &[(usize, CentralityScores)],
    method: Method,
    m: usize,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let usable: Vec<&Snapshot> = s.non_empty().collect();
    if usable.is_empty() {
        return Err(Error::Empty("series has no non-empty snapshot"));
    }
    if truth.len() != usable.len() {
        return Err(Error::InvalidArgument(format!(
            "{} ground-truth entries for {} snapshots",
            truth.len(),
            usable.len()
        )));
    }
    let kind = truth[0].1.kind;
    let positions: Vec<usize> = (opts.start..usable.len()).collect();
    let started = Instant::now();
    let predictions = map_indexed(opts.exec, positions.len(), |i| {
        predict_at(&usable, truth, positions[i], method, m, opts)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let predict_seconds = started.elapsed().as_secs_f64();

    let mut steps = Vec::new();
    for (&pos, predicted) in positions.iter().zip(predictions) {
        let Some(predicted) = predicted else { continue };
        let actual = top_k(&truth[pos].1, m)?.members;
        steps.push(StepScore {
            t: usable[pos].index(),
            f1: f1_sets(&predicted, &actual),
            predicted,
            actual,
        });
    }
    let (mean, std) = mean_std(&steps.iter().map(|s| s.f1).collect::<Vec<_>>());
    Ok(EvalReport {
        method,
        kind,
        m,
        steps,
        mean,
        std,
        timing: Some(Timing {
            exact_seconds: 0.0,
            predict_seconds,
            params_seconds: 0.0,
        }),
    })
}

/// Recomputes exact centrality for every snapshot and scores `method`,
/// recording wall-clock time of the exact, prediction and parameter paths.
pub fn evaluate_series(
    s: &SnapshotSeries,
    method: Method,
    kind: CentralityKind,
    m: usize,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    let started = Instant::now();
    let truth = series_centrality(s, kind, opts.exec)?;
    let exact_seconds = started.elapsed().as_secs_f64();

    let started = Instant::now();
    for g in s.non_empty() {
        snapshot_params(g, CfxMode::Shell)?;
    }
    let params_seconds = started.elapsed().as_secs_f64();

    let mut report = evaluate_with_truth(s, &truth, method, m, opts)?;
    if let Some(t) = report.timing.as_mut() {
        t.exact_seconds = exact_seconds;
        t.params_seconds = params_seconds;
    }
    Ok(report)
}
