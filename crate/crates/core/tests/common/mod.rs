//! Slow, obviously-correct reference implementations used as test oracles,
//! plus seeded graph builders.

#![allow(dead_code)]

use innercore::{Snapshot, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INF: u32 = u32::MAX;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) on ids `0..n`; isolated vertices do not appear in the snapshot.
pub fn gnp(n: usize, p: f64, seed: u64) -> Snapshot {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                edges.push((a as VertexId, b as VertexId));
            }
        }
    }
    Snapshot::from_edges(0, edges)
}

/// Random spanning tree on `0..n` plus each remaining pair with probability `p`.
pub fn connected(n: usize, p: f64, seed: u64) -> Snapshot {
    let mut r = rng(seed);
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    order.shuffle(&mut r);
    let mut edges: Vec<(VertexId, VertexId)> = (1..n).map(|i| (order[r.random_range(0..i)], order[i])).collect();
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(p) {
                edges.push((a as VertexId, b as VertexId));
            }
        }
    }
    Snapshot::from_edges(0, edges)
}

pub fn adjacency(g: &Snapshot) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut adj = vec![vec![false; n]; n];
    for (a, b) in g.edges() {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// Coreness by definition: for k = 1, 2, ... repeatedly delete every vertex
/// with fewer than k surviving neighbours; a vertex's coreness is the last k
/// it survives.
pub fn peeling_coreness(g: &Snapshot) -> Vec<u32> {
    let n = g.vertex_count();
    let adj = adjacency(g);
    let mut core = vec![0u32; n];
    let mut alive = vec![true; n];
    let mut k = 1u32;
    while alive.iter().any(|&a| a) {
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && (0..n).filter(|&u| alive[u] && adj[v][u]).count() < k as usize)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for v in doomed {
                alive[v] = false;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
        k += 1;
    }
    core
}

/// Floyd–Warshall distances.
pub fn all_pairs(g: &Snapshot) -> Vec<Vec<u32>> {
    all_pairs_without(g, &vec![false; g.vertex_count()])
}

/// Floyd–Warshall distances in the graph with `blocked` vertices deleted.
pub fn all_pairs_without(g: &Snapshot, blocked: &[bool]) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let adj = adjacency(g);
    let mut d = vec![vec![INF; n]; n];
    for v in 0..n {
        if blocked[v] {
            continue;
        }
        d[v][v] = 0;
        for u in 0..n {
            if adj[v][u] && !blocked[u] {
                d[v][u] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Number of shortest paths between every pair, counted by extending paths
/// one layer at a time: σ(s, t) = Σ over neighbours u of t one step closer.
pub fn path_counts(g: &Snapshot, d: &[Vec<u32>]) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let adj = adjacency(g);
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut by_dist: Vec<usize> = (0..n).filter(|&t| d[s][t] != INF).collect();
        by_dist.sort_by_key(|&t| d[s][t]);
        for t in by_dist {
            sigma[s][t] = if t == s {
                1.0
            } else {
                (0..n).filter(|&u| adj[u][t] && d[s][u] + 1 == d[s][t]).map(|u| sigma[s][u]).sum()
            };
        }
    }
    sigma
}

/// Σ over unordered pairs {s, t} (v ∉ {s, t}) of σ_st(v) / σ_st.
pub fn brute_betweenness(g: &Snapshot) -> Vec<f64> {
    let n = g.vertex_count();
    let d = all_pairs(g);
    let sigma = path_counts(g, &d);
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if d[s][t] == INF {
                continue;
            }
            for v in 0..n {
                if v != s && v != t && d[s][v] != INF && d[v][t] != INF && d[s][v] + d[v][t] == d[s][t] {
                    bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        }
    }
    bc
}

pub fn brute_closeness(g: &Snapshot) -> Vec<f64> {
    let d = all_pairs(g);
    d.iter()
        .map(|row| {
            let total: u64 = row.iter().map(|&x| x as u64).sum();
            if total == 0 {
                0.0
            } else {
                1.0 / total as f64
            }
        })
        .collect()
}

/// EF, CFX (shell mode) and ED from an explicit list of shells.
pub fn naive_params(g: &Snapshot, coreness: &[u32]) -> (f64, f64, f64) {
    let n = g.vertex_count();
    let adj = adjacency(g);
    let k_max = coreness.iter().copied().max().unwrap_or(0);
    let shell = |k: u32| -> Vec<usize> { (0..n).filter(|&v| coreness[v] == k).collect() };
    let density = |vs: &[usize]| -> f64 {
        if vs.len() < 2 {
            return 0.0;
        }
        let mut e = 0usize;
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                if adj[a][b] {
                    e += 1;
                }
            }
        }
        e as f64 / (vs.len() * (vs.len() - 1) / 2) as f64
    };

    let mut inter = 0usize;
    let mut touching = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            if adj[a][b] && coreness[a] != coreness[b] {
                inter += 1;
                if coreness[a] == k_max || coreness[b] == k_max {
                    touching += 1;
                }
            }
        }
    }
    let ef = if inter == 0 { 1.0 } else { touching as f64 / inter as f64 };
    let cfx = if k_max <= 1 {
        0.0
    } else {
        (1..k_max).map(|k| density(&shell(k))).sum::<f64>() / (k_max - 1) as f64
    };
    let ed = density(&shell(k_max));
    (ef, cfx, ed)
}

/// P^max as the shortest walk through some innermost-shell vertex, P^O as
/// the distance with the innermost shell deleted.
pub fn brute_pair_paths(d: &[Vec<u32>], d_avoid: &[Vec<u32>], in_core: &[bool], u: usize, v: usize) -> (u32, u32) {
    let p_max = (0..in_core.len())
        .filter(|&w| in_core[w] && d[u][w] != INF && d[w][v] != INF)
        .map(|w| d[u][w] + d[w][v])
        .min()
        .unwrap_or(INF);
    (p_max, d_avoid[u][v])
}
