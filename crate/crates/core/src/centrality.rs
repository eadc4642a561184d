//! Exact closeness (BFS) and betweenness (Brandes) centrality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_chunks, map_indexed, map_slice, Execution};
use crate::graph::{Snapshot, SnapshotSeries, VertexId, UNREACHABLE};
use crate::params::jaccard_slices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Closeness,
    Betweenness,
}

impl std::str::FromStr for CentralityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closeness" => Ok(Self::Closeness),
            "betweenness" => Ok(Self::Betweenness),
            other => Err(Error::InvalidArgument(format!("unknown centrality '{other}'"))),
        }
    }
}

impl std::fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Closeness => "closeness",
            Self::Betweenness => "betweenness",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityScores {
    pub kind: CentralityKind,
    pub ids: Vec<VertexId>,
    pub score: Vec<f64>,
}

impl CentralityScores {
    pub fn get(&self, id: VertexId) -> Option<f64> {
        self.ids.binary_search(&id).ok().map(|i| self.score[i])
    }

    /// `(vertex, score)` rows ordered by score descending, then id.
    pub fn ranked(&self) -> Vec<(VertexId, f64)> {
        let mut rows: Vec<(VertexId, f64)> = self.ids.iter().copied().zip(self.score.iter().copied()).collect();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopSet {
    pub kind: CentralityKind,
    pub k: usize,
    pub members: Vec<VertexId>,
}

fn require_connected(g: &Snapshot) -> Result<()> {
    let (_, components) = g.components();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(())
}

/// `1 / Σ_s dist(v, s)` per vertex; 0 for a single vertex.
pub fn closeness(g: &Snapshot) -> Result<CentralityScores> {
    closeness_with(g, Execution::default())
}

pub fn closeness_with(g: &Snapshot, exec: Execution) -> Result<CentralityScores> {
    require_connected(g)?;
    let score = map_indexed(exec, g.vertex_count(), |v| {
        let total: u64 = g.bfs_distances(v).iter().map(|&d| d as u64).sum();
        if total == 0 {
            0.0
        } else {
            1.0 / total as f64
        }
    });
    Ok(CentralityScores {
        kind: CentralityKind::Closeness,
        ids: g.ids().to_vec(),
        score,
    })
}

/// Single-source dependency accumulation; adds δ_s(v) into `acc`.
fn brandes_source(g: &Snapshot, s: usize, ws: &mut BrandesWorkspace, acc: &mut [f64]) {
    let BrandesWorkspace {
        dist,
        sigma,
        delta,
        order,
    } = ws;
    dist.fill(UNREACHABLE);
    sigma.fill(0.0);
    delta.fill(0.0);
    order.clear();

    dist[s] = 0;
    sigma[s] = 1.0;
    order.push(s);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                order.push(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    for &w in order.iter().rev() {
        let coeff = (1.0 + delta[w]) / sigma[w];
        for &v in g.neighbors(w) {
            let v = v as usize;
            if dist[v] != UNREACHABLE && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] * coeff;
            }
        }
        if w != s {
            acc[w] += delta[w];
        }
    }
}

struct BrandesWorkspace {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<usize>,
}

impl BrandesWorkspace {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![UNREACHABLE; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }
}

/// Brandes betweenness, each unordered pair counted once.
pub fn betweenness(g: &Snapshot) -> Result<CentralityScores> {
    betweenness_with(g, Execution::default())
}

/// Sources are split into at most 64 fixed chunks whose partial sums are
/// added in chunk order, so the result does not depend on thread count.
pub fn betweenness_with(g: &Snapshot, exec: Execution) -> Result<CentralityScores> {
    require_connected(g)?;
    let n = g.vertex_count();
    let chunk = n.div_ceil(64).max(16);
    let partials = map_chunks(exec, n, chunk, |range| {
        let mut ws = BrandesWorkspace::new(n);
        let mut acc = vec![0.0; n];
        for s in range {
            brandes_source(g, s, &mut ws, &mut acc);
        }
        acc
    });
    let mut score = vec![0.0; n];
    for part in partials {
        for (total, x) in score.iter_mut().zip(part) {
            *total += x;
        }
    }
    for x in &mut score {
        *x /= 2.0;
    }
    Ok(CentralityScores {
        kind: CentralityKind::Betweenness,
        ids: g.ids().to_vec(),
        score,
    })
}

pub fn centrality_with(g: &Snapshot, kind: CentralityKind, exec: Execution) -> Result<CentralityScores> {
    match kind {
        CentralityKind::Closeness => closeness_with(g, exec),
        CentralityKind::Betweenness => betweenness_with(g, exec),
    }
}

/// Centrality on the largest connected component of `g`.
pub fn snapshot_centrality(g: &Snapshot, kind: CentralityKind, exec: Execution) -> Result<CentralityScores> {
    centrality_with(&g.largest_component()?, kind, exec)
}

/// Top `k` vertices by score, ties broken by ascending id.
pub fn top_k(scores: &CentralityScores, k: usize) -> Result<TopSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let members = scores.ranked().into_iter().take(k).map(|(id, _)| id).collect();
    Ok(TopSet {
        kind: scores.kind,
        k,
        members,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapSeries {
    pub kind: CentralityKind,
    pub k: usize,
    /// `values[i]` compares the top sets of usable snapshots `i` and `i + 1`.
    pub values: Vec<f64>,
    /// Snapshot index of the later snapshot in each comparison.
    pub steps: Vec<usize>,
}

/// Jaccard overlap of consecutive top-k sets; precomputed per-snapshot
/// centralities (largest component) in time order.
pub fn overlap_from_scores(scores: &[(usize, CentralityScores)], kind: CentralityKind, k: usize) -> Result<OverlapSeries> {
    if scores.len() < 2 {
        return Err(Error::TooFewSnapshots {
            needed: 2,
            found: scores.len(),
        });
    }
    let tops = scores
        .iter()
        .map(|(_, s)| top_k(s, k).map(|t| t.members))
        .collect::<Result<Vec<_>>>()?;
    Ok(OverlapSeries {
        kind,
        k,
        values: tops.windows(2).map(|w| jaccard_slices(&w[0], &w[1])).collect(),
        steps: scores[1..].iter().map(|(t, _)| *t).collect(),
    })
}

/// Exact centrality of every non-empty snapshot, tagged with its index.
pub fn series_centrality(s: &SnapshotSeries, kind: CentralityKind, exec: Execution) -> Result<Vec<(usize, CentralityScores)>> {
    let usable: Vec<&Snapshot> = s.non_empty().collect();
    map_slice(exec, &usable, |g| snapshot_centrality(g, kind, exec).map(|c| (g.index(), c)))
        .into_iter()
        .collect()
}

pub fn overlap_series(s: &SnapshotSeries, kind: CentralityKind, k: usize) -> Result<OverlapSeries> {
    let scores = series_centrality(s, kind, Execution::default())?;
    overlap_from_scores(&scores, kind, k)
}
