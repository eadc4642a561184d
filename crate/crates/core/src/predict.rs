//! Naming the predicted top central vertices.
//!
//! The core-degree predictor ranks the innermost k-core of the current
//! snapshot by degree. The other methods are comparison points: global degree
//! ignores the core, and the history averages need exact centralities of the
//! preceding snapshots.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::centrality::{CentralityKind, CentralityScores};
use crate::error::{Error, Result};
use crate::graph::{Snapshot, VertexId};
use crate::kcore::find_core;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    CoreDegree,
    GlobalDegree,
    Uniform,
    W1,
    W2,
    /// Seeded uniform draw from the analysed component.
    Random,
}

impl Method {
    pub fn weighting(self) -> Option<Weighting> {
        match self {
            Method::Uniform => Some(Weighting::Uniform),
            Method::W1 => Some(Weighting::W1),
            Method::W2 => Some(Weighting::W2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::CoreDegree => "core-degree",
            Method::GlobalDegree => "global-degree",
            Method::Uniform => "uniform",
            Method::W1 => "w1",
            Method::W2 => "w2",
            Method::Random => "random",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core-degree" => Ok(Self::CoreDegree),
            "global-degree" => Ok(Self::GlobalDegree),
            "uniform" => Ok(Self::Uniform),
            "w1" => Ok(Self::W1),
            "w2" => Ok(Self::W2),
            "random" => Ok(Self::Random),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Degree used to rank top-core members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// Degree in the whole snapshot.
    #[default]
    Full,
    /// Degree inside the subgraph induced by the top core.
    Induced,
}

impl std::str::FromStr for DegreeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "induced" => Ok(Self::Induced),
            other => Err(Error::InvalidArgument(format!("unknown degree mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// w(d) = 1
    Uniform,
    /// w(d) = 1 / d
    W1,
    /// w(d) = 1 / sqrt(d)
    W2,
}

impl Weighting {
    /// Weight of the score observed `d` steps before the prediction point.
    pub fn weight(self, d: usize) -> f64 {
        let d = d as f64;
        match self {
            Weighting::Uniform => 1.0,
            Weighting::W1 => 1.0 / d,
            Weighting::W2 => 1.0 / d.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub t: usize,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<CentralityKind>,
    pub members: Vec<VertexId>,
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(())
}

/// Picks the `m` best candidates by key descending, then vertex id ascending.
fn rank_by<K: Ord + Copy>(g: &Snapshot, candidates: &[usize], key: impl Fn(usize) -> K, m: usize) -> Vec<VertexId> {
    let mut c = candidates.to_vec();
    // internal index order equals id order
    c.sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));
    c.truncate(m);
    c.into_iter().map(|v| g.id(v)).collect()
}

/// The `m` highest-degree vertices of the innermost core of `g`'s largest
/// component.
pub fn predict_core_degree(g: &Snapshot, m: usize, mode: DegreeMode) -> Result<PredictionResult> {
    check_m(m)?;
    let lcc = g.largest_component()?;
    let d = find_core(&lcc)?;
    let members = match mode {
        DegreeMode::Full => rank_by(&lcc, &d.top_core, |v| lcc.degree(v), m),
        DegreeMode::Induced => rank_by(
            &lcc,
            &d.top_core,
            |v| {
                lcc.neighbors(v)
                    .iter()
                    .filter(|&&u| d.in_top_core(u as usize))
                    .count()
            },
            m,
        ),
    };
    Ok(PredictionResult {
        t: g.index(),
        method: Method::CoreDegree,
        kind: None,
        members,
    })
}

/// The `m` highest-degree vertices of `g`'s largest component.
pub fn predict_global_degree(g: &Snapshot, m: usize) -> Result<PredictionResult> {
    check_m(m)?;
    let lcc = g.largest_component()?;
    let all: Vec<usize> = (0..lcc.vertex_count()).collect();
    Ok(PredictionResult {
        t: g.index(),
        method: Method::GlobalDegree,
        kind: None,
        members: rank_by(&lcc, &all, |v| lcc.degree(v), m),
    })
}

/// Weighted average of past scores; `history` is oldest first, so its last
/// entry sits at distance 1 from the prediction point. A vertex missing from
/// a step scores 0 there.
pub fn history_average(history: &[CentralityScores], weighting: Weighting) -> Result<Vec<(VertexId, f64)>> {
    if history.is_empty() {
        return Err(Error::Empty("history average needs at least one step"));
    }
    let r = history.len();
    let mut sums: BTreeMap<VertexId, f64> = BTreeMap::new();
    let mut total_weight = 0.0;
    for dist in 1..=r {
        let scores = &history[r - dist];
        let w = weighting.weight(dist);
        total_weight += w;
        for (&id, &s) in scores.ids.iter().zip(&scores.score) {
            *sums.entry(id).or_insert(0.0) += w * s;
        }
    }
    Ok(sums.into_iter().map(|(id, s)| (id, s / total_weight)).collect())
}

pub fn predict_history_average(
    history: &[CentralityScores],
    weighting: Weighting,
    m: usize,
    t: usize,
) -> Result<PredictionResult> {
    check_m(m)?;
    let mut avg = history_average(history, weighting)?;
    avg.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let method = match weighting {
        Weighting::Uniform => Method::Uniform,
        Weighting::W1 => Method::W1,
        Weighting::W2 => Method::W2,
    };
    Ok(PredictionResult {
        t,
        method,
        kind: Some(history[0].kind),
        members: avg.into_iter().take(m).map(|(id, _)| id).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(u64, u64)]) -> Snapshot {
        Snapshot::from_edges(0, edges.iter().copied())
    }

    fn k4_with_pendant() -> Snapshot {
        graph(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (1, 9)])
    }

    #[test]
    fn core_degree_examples() {
        let g = k4_with_pendant();
        assert_eq!(predict_core_degree(&g, 1, DegreeMode::Full).unwrap().members, vec![1]);
        let k4 = graph(&[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        assert_eq!(predict_core_degree(&k4, 2, DegreeMode::Full).unwrap().members, vec![1, 2]);
        assert_eq!(predict_core_degree(&g, 10, DegreeMode::Full).unwrap().members, vec![1, 2, 3, 4]);
        // inside the core every member has degree 3, so ids decide
        assert_eq!(predict_core_degree(&g, 1, DegreeMode::Induced).unwrap().members, vec![1]);
        assert!(predict_core_degree(&g, 0, DegreeMode::Full).is_err());
    }

    #[test]
    fn global_degree_examples() {
        let star = graph(&[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(predict_global_degree(&star, 1).unwrap().members, vec![0]);
        assert_eq!(predict_global_degree(&k4_with_pendant(), 1).unwrap().members, vec![1]);
    }

    #[test]
    fn periphery_hub_splits_the_methods() {
        // K4 core {1..4}; hub 50 with 6 leaves hanging off core vertex 1
        let mut e = vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (1, 50)];
        e.extend((60..66).map(|l| (50, l)));
        let g = graph(&e);
        assert_eq!(predict_global_degree(&g, 1).unwrap().members, vec![50]);
        assert_eq!(predict_core_degree(&g, 1, DegreeMode::Full).unwrap().members, vec![1]);
    }

    fn scores(vals: &[(u64, f64)]) -> CentralityScores {
        CentralityScores {
            kind: CentralityKind::Betweenness,
            ids: vals.iter().map(|v| v.0).collect(),
            score: vals.iter().map(|v| v.1).collect(),
        }
    }

    #[test]
    fn single_step_history() {
        let h = vec![scores(&[(1, 0.1), (2, 0.9), (3, 0.5)])];
        for w in [Weighting::Uniform, Weighting::W1, Weighting::W2] {
            assert_eq!(predict_history_average(&h, w, 2, 1).unwrap().members, vec![2, 3]);
        }
        assert!(predict_history_average(&[], Weighting::W1, 2, 0).is_err());
    }

    #[test]
    fn recent_spike_versus_steady_vertex() {
        // vertex 1 spikes at d = 1, vertex 2 holds 0.2 for all 20 steps
        let mut h: Vec<CentralityScores> = (0..19).map(|_| scores(&[(1, 0.0), (2, 0.2)])).collect();
        h.push(scores(&[(1, 1.0), (2, 0.2)]));
        let uni = history_average(&h, Weighting::Uniform).unwrap();
        assert!((uni[0].1 - 0.05).abs() < 1e-12 && (uni[1].1 - 0.2).abs() < 1e-12);
        assert_eq!(predict_history_average(&h, Weighting::Uniform, 1, 20).unwrap().members, vec![2]);

        let harmonic: f64 = (1..=20).map(|d| 1.0 / d as f64).sum();
        assert!((harmonic - 3.597739657143682).abs() < 1e-12);
        let w1 = history_average(&h, Weighting::W1).unwrap();
        assert!((w1[0].1 - 1.0 / harmonic).abs() < 1e-12);
        assert_eq!(predict_history_average(&h, Weighting::W1, 1, 20).unwrap().members, vec![1]);
    }

    #[test]
    fn constant_history_weighting_invariance() {
        let h: Vec<CentralityScores> = (0..5).map(|_| scores(&[(1, 0.3), (2, 0.7), (3, 0.1)])).collect();
        let u = history_average(&h, Weighting::Uniform).unwrap();
        for w in [Weighting::W1, Weighting::W2] {
            let got = history_average(&h, w).unwrap();
            for (a, b) in u.iter().zip(&got) {
                assert!((a.1 - b.1).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn absent_vertices_score_zero() {
        let h = vec![scores(&[(1, 1.0)]), scores(&[(2, 1.0)])];
        let avg = history_average(&h, Weighting::Uniform).unwrap();
        assert_eq!(avg, vec![(1, 0.5), (2, 0.5)]);
    }
}
