//! k-core decomposition by bucket peeling (Batagelj–Zaversnik), O(|V| + |E|).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Snapshot, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreDecomposition {
    /// Core number per internal vertex index.
    pub coreness: Vec<u32>,
    pub k_max: u32,
    /// Internal indices with coreness `k_max`, ascending.
    pub top_core: Vec<usize>,
}

impl CoreDecomposition {
    /// Shell number -> member indices (ascending).
    pub fn shells(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut shells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (v, &c) in self.coreness.iter().enumerate() {
            shells.entry(c).or_default().push(v);
        }
        shells
    }

    pub fn in_top_core(&self, v: usize) -> bool {
        self.coreness[v] == self.k_max
    }

    /// `(vertex id, coreness)` pairs in id order.
    pub fn to_pairs(&self, g: &Snapshot) -> Vec<(VertexId, u32)> {
        g.ids().iter().copied().zip(self.coreness.iter().copied()).collect()
    }
}

pub fn find_core(g: &Snapshot) -> Result<CoreDecomposition> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::Empty("cannot decompose an empty graph"));
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = first position of degree d in `vert`
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut vert = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                    pos[u] = pw;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }

    let coreness: Vec<u32> = deg.into_iter().map(|d| d as u32).collect();
    let k_max = coreness.iter().copied().max().unwrap();
    let top_core = (0..n).filter(|&v| coreness[v] == k_max).collect();
    Ok(CoreDecomposition {
        coreness,
        k_max,
        top_core,
    })
}

/// Original ids of the innermost core, ascending.
pub fn top_core_vertices(g: &Snapshot, d: &CoreDecomposition) -> Vec<VertexId> {
    d.top_core.iter().map(|&v| g.id(v)).collect()
}

/// Whether the subgraph induced by the innermost core is connected.
pub fn check_top_shell_connected(g: &Snapshot, d: &CoreDecomposition) -> bool {
    let Some(&first) = d.top_core.first() else {
        return true;
    };
    let outside: Vec<bool> = (0..g.vertex_count()).map(|v| !d.in_top_core(v)).collect();
    let dist = g.bfs_distances_avoiding(&[first], Some(&outside));
    d.top_core
        .iter()
        .all(|&v| dist[v] != crate::graph::UNREACHABLE)
}
