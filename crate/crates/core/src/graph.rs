//! Temporal edge ingestion and snapshot graphs.
//!
//! A [`Snapshot`] is an immutable undirected simple graph stored in CSR form.
//! Vertices keep their original ids; internally they are addressed by a dense
//! index, assigned in ascending id order so that "smallest index" and
//! "smallest id" tie-breaks coincide.

use std::collections::VecDeque;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u64;

/// Marker for unreachable vertices in BFS distance vectors.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TemporalEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub t: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalEdgeList {
    pub edges: Vec<TemporalEdge>,
    pub dropped_self_loops: usize,
}

fn parse_field<T: std::str::FromStr>(field: &str, what: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} '{field}'"),
    })
}

/// Parses a whitespace separated `u v t` edge stream.
///
/// Lines starting with `#` or `%` and blank lines are skipped; any columns
/// after the third are ignored. Self-loops are dropped and counted.
pub fn parse_edge_stream<R: BufRead>(input: R) -> Result<TemporalEdgeList> {
    let mut out = TemporalEdgeList::default();
    let mut data_lines = 0usize;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        data_lines += 1;
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 'u v t', found {} field(s)", fields.len()),
            });
        }
        let u: VertexId = parse_field(fields[0], "vertex id", lineno)?;
        let v: VertexId = parse_field(fields[1], "vertex id", lineno)?;
        let t: u64 = parse_field(fields[2], "timestamp", lineno)?;
        if u == v {
            out.dropped_self_loops += 1;
            continue;
        }
        out.edges.push(TemporalEdge { u, v, t });
    }
    if data_lines == 0 {
        return Err(Error::Empty("edge stream has no data lines"));
    }
    if out.dropped_self_loops > 0 {
        log::warn!("dropped {} self-loop(s)", out.dropped_self_loops);
    }
    Ok(out)
}

/// Writes edges in the same `u v t` format accepted by [`parse_edge_stream`].
pub fn write_edge_stream<W: std::io::Write>(mut out: W, edges: &[TemporalEdge]) -> Result<()> {
    for e in edges {
        writeln!(out, "{} {} {}", e.u, e.v, e.t)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    index: usize,
    ids: Vec<VertexId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Snapshot {
    /// Builds a simple undirected graph; duplicate and reversed edges collapse,
    /// self-loops are ignored.
    pub fn from_edges<I>(index: usize, edges: I) -> Snapshot
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut pairs: Vec<(VertexId, VertexId)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();

        let mut ids: Vec<VertexId> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();

        let idx = |id: VertexId| ids.binary_search(&id).expect("id present") as u32;
        let local: Vec<(u32, u32)> = pairs.iter().map(|&(u, v)| (idx(u), idx(v))).collect();
        Self::from_local(index, ids, &local)
    }

    /// `local` holds deduplicated `(a, b)` index pairs with `a != b`.
    fn from_local(index: usize, ids: Vec<VertexId>, local: &[(u32, u32)]) -> Snapshot {
        let n = ids.len();
        let mut degree = vec![0usize; n];
        for &(a, b) in local {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(a, b) in local {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Snapshot {
            index,
            ids,
            offsets,
            targets,
        }
    }

    pub fn empty(index: usize) -> Snapshot {
        Snapshot {
            index,
            ids: Vec::new(),
            offsets: vec![0],
            targets: Vec::new(),
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Original vertex ids, ascending; position = internal index.
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> VertexId {
        self.ids[v]
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Each undirected edge once, as `(a, b)` with `a < b` (internal indices).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .map(|&b| b as usize)
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    /// Edges as original id pairs, sorted.
    pub fn id_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.edges().map(|(a, b)| (self.ids[a], self.ids[b])).collect()
    }

    /// BFS hop distances from `src`; [`UNREACHABLE`] where no path exists.
    pub fn bfs_distances(&self, src: usize) -> Vec<u32> {
        self.bfs_distances_avoiding(&[src], None)
    }

    /// Multi-source BFS. Vertices flagged in `blocked` are never entered.
    pub fn bfs_distances_avoiding(&self, sources: &[usize], blocked: Option<&[bool]>) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if blocked.is_some_and(|b| b[s]) || dist[s] == 0 {
                continue;
            }
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &w in self.neighbors(v) {
                let w = w as usize;
                if dist[w] == UNREACHABLE && !blocked.is_some_and(|b| b[w]) {
                    dist[w] = next;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Component label per vertex (labels numbered in order of their
    /// smallest member) and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if label[w as usize] == usize::MAX {
                        label[w as usize] = count;
                        stack.push(w as usize);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Induced subgraph on vertices with `keep[v]`. Vertices left without
    /// edges are retained as isolated vertices.
    pub fn induced(&self, keep: &[bool]) -> Snapshot {
        let mut remap = vec![u32::MAX; self.vertex_count()];
        let mut ids = Vec::new();
        for v in 0..self.vertex_count() {
            if keep[v] {
                remap[v] = ids.len() as u32;
                ids.push(self.ids[v]);
            }
        }
        let local: Vec<(u32, u32)> = self
            .edges()
            .filter(|&(a, b)| keep[a] && keep[b])
            .map(|(a, b)| (remap[a], remap[b]))
            .collect();
        Self::from_local(self.index, ids, &local)
    }

    /// Induced subgraph on the largest connected component; ties go to the
    /// component holding the smallest vertex id.
    pub fn largest_component(&self) -> Result<Snapshot> {
        if self.is_empty() {
            return Err(Error::Empty("graph has no vertices"));
        }
        let (label, count) = self.components();
        if count == 1 {
            return Ok(self.clone());
        }
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        // labels are ordered by smallest member, so the first maximum wins ties
        let best = (0..count).fold(0, |best, l| if sizes[l] > sizes[best] { l } else { best });
        let keep: Vec<bool> = label.iter().map(|&l| l == best).collect();
        Ok(self.induced(&keep))
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotRepr {
    index: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl Serialize for Snapshot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SnapshotRepr {
            index: self.index,
            edges: self.id_edges(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Snapshot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SnapshotRepr::deserialize(d)?;
        Ok(Snapshot::from_edges(repr.index, repr.edges))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMode {
    /// Snapshot i holds the edges stamped inside window i.
    #[default]
    Windowed,
    /// Snapshot i holds every edge stamped up to the end of window i.
    Cumulative,
}

impl std::str::FromStr for AggregationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "windowed" => Ok(Self::Windowed),
            "cumulative" => Ok(Self::Cumulative),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotSeries {
    pub snapshots: Vec<Snapshot>,
    pub mode: AggregationMode,
    pub window: u64,
}

impl SnapshotSeries {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Non-empty snapshots in time order.
    pub fn non_empty(&self) -> impl Iterator<Item = &Snapshot> {
        self.snapshots.iter().filter(|s| !s.is_empty())
    }

    /// Flattens back to a temporal edge list stamped with snapshot indices.
    pub fn to_edge_list(&self) -> Vec<TemporalEdge> {
        self.snapshots
            .iter()
            .flat_map(|s| {
                s.id_edges().into_iter().map(move |(u, v)| TemporalEdge {
                    u,
                    v,
                    t: s.index() as u64,
                })
            })
            .collect()
    }
}

/// Buckets a temporal edge stream into snapshots of `window` time units,
/// starting at the earliest timestamp. Empty windows are kept.
pub fn build_snapshots(
    edges: &TemporalEdgeList,
    mode: AggregationMode,
    window: u64,
) -> Result<SnapshotSeries> {
    if edges.edges.is_empty() {
        return Err(Error::Empty("no edges to aggregate"));
    }
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let t0 = edges.edges.iter().map(|e| e.t).min().unwrap();
    let t1 = edges.edges.iter().map(|e| e.t).max().unwrap();
    let count = ((t1 - t0) / window + 1) as usize;

    let mut buckets: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); count];
    for e in &edges.edges {
        buckets[((e.t - t0) / window) as usize].push((e.u, e.v));
    }

    let snapshots = match mode {
        AggregationMode::Windowed => buckets
            .into_iter()
            .enumerate()
            .map(|(i, b)| Snapshot::from_edges(i, b))
            .collect(),
        AggregationMode::Cumulative => {
            let mut acc = Vec::new();
            let mut out = Vec::with_capacity(count);
            for (i, b) in buckets.into_iter().enumerate() {
                acc.extend(b);
                let snap = Snapshot::from_edges(i, acc.iter().copied());
                acc = snap.id_edges();
                out.push(snap);
            }
            out
        }
    };
    Ok(SnapshotSeries {
        snapshots,
        mode,
        window,
    })
}
