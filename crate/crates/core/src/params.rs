//! The four structural heuristics used to classify a temporal network:
//!
//! * `ef`  – fraction of inter-shell edges with an endpoint in the top core
//! * `cfx` – mean edge density of the non-top shells (or cores)
//! * `ed`  – edge density of the top core
//! * `cv`  – Jaccard overlap of consecutive top cores
//!
//! All four run in O(|E|) given the core decomposition.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classify::EmpiricalCdf;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::graph::{Snapshot, SnapshotSeries, VertexId};
use crate::kcore::{find_core, top_core_vertices, CoreDecomposition};

/// How the non-top density average groups vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CfxMode {
    /// Vertices of equal core number (shells).
    #[default]
    Shell,
    /// Nested k-cores `{v : c[v] >= k}` for k below the maximum.
    Core,
}

impl std::str::FromStr for CfxMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shell" => Ok(Self::Shell),
            "core" => Ok(Self::Core),
            other => Err(Error::InvalidArgument(format!("unknown cfx mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    Ef,
    Cfx,
    Ed,
    Cv,
}

impl Parameter {
    pub const ALL: [Parameter; 4] = [Parameter::Ef, Parameter::Cfx, Parameter::Ed, Parameter::Cv];

    /// High values are desirable for every parameter except `cfx`.
    pub fn higher_is_better(self) -> bool {
        self != Parameter::Cfx
    }

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Ef => "ef",
            Parameter::Cfx => "cfx",
            Parameter::Ed => "ed",
            Parameter::Cv => "cv",
        }
    }
}

impl std::fmt::Display for Parameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn pairs(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

pub fn compute_ef(g: &Snapshot, d: &CoreDecomposition) -> f64 {
    let (mut inter, mut touching) = (0u64, 0u64);
    for (a, b) in g.edges() {
        let (ca, cb) = (d.coreness[a], d.coreness[b]);
        if ca != cb {
            inter += 1;
            if ca == d.k_max || cb == d.k_max {
                touching += 1;
            }
        }
    }
    if inter == 0 {
        1.0
    } else {
        touching as f64 / inter as f64
    }
}

pub fn compute_cfx(g: &Snapshot, d: &CoreDecomposition, mode: CfxMode) -> f64 {
    let k_max = d.k_max as usize;
    if k_max <= 1 {
        return 0.0;
    }
    let mut density_sum = 0.0;
    match mode {
        CfxMode::Shell => {
            let mut verts = vec![0usize; k_max + 1];
            let mut edges = vec![0u64; k_max + 1];
            for &c in &d.coreness {
                verts[c as usize] += 1;
            }
            for (a, b) in g.edges() {
                if d.coreness[a] == d.coreness[b] {
                    edges[d.coreness[a] as usize] += 1;
                }
            }
            for s in 1..k_max {
                if verts[s] >= 2 {
                    density_sum += edges[s] as f64 / pairs(verts[s]);
                }
            }
        }
        CfxMode::Core => {
            // vertices / edges per exact level, then suffix sums give the cores
            let mut verts = vec![0usize; k_max + 2];
            let mut edges = vec![0u64; k_max + 2];
            for &c in &d.coreness {
                verts[c as usize] += 1;
            }
            for (a, b) in g.edges() {
                edges[d.coreness[a].min(d.coreness[b]) as usize] += 1;
            }
            for k in (0..=k_max).rev() {
                verts[k] += verts[k + 1];
                edges[k] += edges[k + 1];
            }
            for k in 1..k_max {
                if verts[k] >= 2 {
                    density_sum += edges[k] as f64 / pairs(verts[k]);
                }
            }
        }
    }
    density_sum / (k_max - 1) as f64
}

pub fn compute_ed(g: &Snapshot, d: &CoreDecomposition) -> f64 {
    let size = d.top_core.len();
    if size < 2 {
        return 0.0;
    }
    let inner = d
        .top_core
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&u| d.in_top_core(u as usize))
                .count()
        })
        .sum::<usize>()
        / 2;
    inner as f64 / pairs(size)
}

/// `|a ∩ b| / |a ∪ b|`, with two empty sets counting as identical.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Slice convenience wrapper around [`jaccard`].
pub fn jaccard_slices<T: Ord + Copy>(a: &[T], b: &[T]) -> f64 {
    jaccard(&a.iter().copied().collect(), &b.iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTuple {
    pub t: usize,
    pub ef: f64,
    pub cfx: f64,
    pub ed: f64,
    /// Absent for the first usable snapshot.
    pub cv: Option<f64>,
}

impl ParamTuple {
    pub fn get(&self, p: Parameter) -> Option<f64> {
        match p {
            Parameter::Ef => Some(self.ef),
            Parameter::Cfx => Some(self.cfx),
            Parameter::Ed => Some(self.ed),
            Parameter::Cv => self.cv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSeries {
    pub tuples: Vec<ParamTuple>,
}

impl ParamSeries {
    /// Raw observations of one parameter, in time order.
    pub fn values(&self, p: Parameter) -> Vec<f64> {
        self.tuples.iter().filter_map(|t| t.get(p)).collect()
    }

    pub fn cdf(&self, p: Parameter) -> Result<EmpiricalCdf> {
        EmpiricalCdf::from_samples(&self.values(p))
    }

    /// JSON document: per-step tuples plus the sorted sample of each parameter
    /// (the support of its empirical CDF).
    pub fn to_export(&self) -> serde_json::Value {
        let mut support = serde_json::Map::new();
        for p in Parameter::ALL {
            let mut v = self.values(p);
            v.sort_by(f64::total_cmp);
            support.insert(p.name().to_string(), serde_json::json!(v));
        }
        serde_json::json!({ "tuples": self.tuples, "support": support })
    }
}

/// Per-snapshot parameters computed on the largest component.
#[derive(Debug, Clone)]
pub struct SnapshotParams {
    pub t: usize,
    pub ef: f64,
    pub cfx: f64,
    pub ed: f64,
    pub top_core: Vec<VertexId>,
}

pub fn snapshot_params(g: &Snapshot, mode: CfxMode) -> Result<SnapshotParams> {
    let lcc = g.largest_component()?;
    let d = find_core(&lcc)?;
    Ok(SnapshotParams {
        t: g.index(),
        ef: compute_ef(&lcc, &d),
        cfx: compute_cfx(&lcc, &d, mode),
        ed: compute_ed(&lcc, &d),
        top_core: top_core_vertices(&lcc, &d),
    })
}

pub fn compute_series(s: &SnapshotSeries, mode: CfxMode) -> Result<ParamSeries> {
    compute_series_with(s, mode, Execution::default())
}

pub fn compute_series_with(s: &SnapshotSeries, mode: CfxMode, exec: Execution) -> Result<ParamSeries> {
    let usable: Vec<&Snapshot> = s.non_empty().collect();
    if usable.len() < s.len() {
        log::info!(
            "skipping {} empty snapshot(s) in parameter series",
            s.len() - usable.len()
        );
    }
    if usable.len() < 2 {
        return Err(Error::TooFewSnapshots {
            needed: 2,
            found: usable.len(),
        });
    }
    let per_snapshot = map_slice(exec, &usable, |g| snapshot_params(g, mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut tuples = Vec::with_capacity(per_snapshot.len());
    let mut prev: Option<&[VertexId]> = None;
    for p in &per_snapshot {
        let cv = prev.map(|prev| jaccard_slices(prev, &p.top_core));
        tuples.push(ParamTuple {
            t: p.t,
            ef: p.ef,
            cfx: p.cfx,
            ed: p.ed,
            cv,
        });
        prev = Some(&p.top_core);
    }
    Ok(ParamSeries { tuples })
}
