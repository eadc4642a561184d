//! Functional checks of a predicted vertex set and core-connectedness.
//!
//! * message flooding from a seed set (closeness proxy)
//! * diameter after deleting a vertex set (betweenness proxy)
//! * core connectedness: whether routes through the innermost shell are
//!   never longer than routes that avoid it

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{betweenness_with, closeness_with, top_k};
use crate::error::{Error, Result};
use crate::evaluate::random_members;
use crate::exec::{map_indexed, map_slice, Execution};
use crate::graph::{Snapshot, VertexId, UNREACHABLE};
use crate::kcore::{find_core, CoreDecomposition};
use crate::predict::{predict_core_degree, DegreeMode};

fn indices_of(g: &Snapshot, ids: &[VertexId]) -> Result<Vec<usize>> {
    ids.iter()
        .map(|&id| {
            g.index_of(id)
                .ok_or_else(|| Error::InvalidArgument(format!("vertex {id} is not in the graph")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadResult {
    pub seeds: Vec<VertexId>,
    pub rounds: u32,
}

/// Synchronous flooding: every round, informed vertices inform all their
/// neighbours. Returns the number of rounds until everyone is informed.
pub fn spread_rounds(g: &Snapshot, seeds: &[VertexId]) -> Result<SpreadResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("seed set is empty".into()));
    }
    let (_, components) = g.components();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    let sources = indices_of(g, seeds)?;
    let dist = g.bfs_distances_avoiding(&sources, None);
    let rounds = dist.into_iter().max().unwrap_or(0);
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(SpreadResult { seeds, rounds })
}

/// Exact diameter via all-sources BFS; components are measured separately.
pub fn diameter(g: &Snapshot, exec: Execution) -> u32 {
    map_indexed(exec, g.vertex_count(), |v| {
        g.bfs_distances(v)
            .into_iter()
            .filter(|&d| d != UNREACHABLE)
            .max()
            .unwrap_or(0)
    })
    .into_iter()
    .max()
    .unwrap_or(0)
}

/// Deletes `removed` and returns the diameter of the largest remaining
/// component.
pub fn diameter_after_removal(g: &Snapshot, removed: &[VertexId]) -> Result<u32> {
    diameter_after_removal_with(g, removed, Execution::default())
}

pub fn diameter_after_removal_with(g: &Snapshot, removed: &[VertexId], exec: Execution) -> Result<u32> {
    let gone = indices_of(g, removed)?;
    let mut keep = vec![true; g.vertex_count()];
    for v in gone {
        keep[v] = false;
    }
    if !keep.iter().any(|&k| k) {
        return Err(Error::Empty("nothing remains after removal"));
    }
    let rest = g.induced(&keep).largest_component()?;
    Ok(diameter(&rest, exec))
}

/// Shortest walk from `src` that visits at least one `in_core` vertex, to
/// every vertex: BFS over (vertex, core-visited) states.
pub fn through_core_distances(g: &Snapshot, in_core: &[bool], src: usize) -> Vec<u32> {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; 2 * n];
    let start = src + if in_core[src] { n } else { 0 };
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(state) = queue.pop_front() {
        let (v, visited) = (state % n, state >= n);
        for &w in g.neighbors(v) {
            let w = w as usize;
            let next = w + if visited || in_core[w] { n } else { 0 };
            if dist[next] == UNREACHABLE {
                dist[next] = dist[state] + 1;
                queue.push_back(next);
            }
        }
    }
    dist.split_off(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPaths {
    /// Shortest route through the innermost shell.
    pub p_max: Option<u32>,
    /// Shortest route avoiding the innermost shell.
    pub p_o: Option<u32>,
    /// Unconstrained distance.
    pub dist: Option<u32>,
}

fn finite(d: u32) -> Option<u32> {
    (d != UNREACHABLE).then_some(d)
}

struct SourceDistances {
    plain: Vec<u32>,
    avoiding: Vec<u32>,
    through: Vec<u32>,
}

fn source_distances(g: &Snapshot, in_core: &[bool], u: usize) -> SourceDistances {
    SourceDistances {
        plain: g.bfs_distances(u),
        avoiding: g.bfs_distances_avoiding(&[u], Some(in_core)),
        through: through_core_distances(g, in_core, u),
    }
}

pub fn pair_paths(g: &Snapshot, d: &CoreDecomposition, u: VertexId, v: VertexId) -> Result<PairPaths> {
    let idx = indices_of(g, &[u, v])?;
    let in_core: Vec<bool> = (0..g.vertex_count()).map(|x| d.in_top_core(x)).collect();
    let sd = source_distances(g, &in_core, idx[0]);
    Ok(PairPaths {
        p_max: finite(sd.through[idx[1]]),
        p_o: finite(sd.avoiding[idx[1]]),
        dist: finite(sd.plain[idx[1]]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcReport {
    pub is_core_connected: bool,
    pub cc_strength: f64,
    pub pairs_examined: usize,
    pub exhaustive: bool,
    /// Pairs where min(P^max, P^O) differed from the plain distance.
    pub identity_violations: usize,
}

/// Core-connectedness over non-adjacent pairs lying outside the innermost
/// shell: exhaustive when there are at most `pair_budget` such pairs,
/// otherwise `pair_budget` pairs drawn uniformly with `seed`.
pub fn cc_check(g: &Snapshot, d: &CoreDecomposition, pair_budget: usize, seed: u64) -> Result<CcReport> {
    cc_check_with(g, d, pair_budget, seed, Execution::default())
}

pub fn cc_check_with(
    g: &Snapshot,
    d: &CoreDecomposition,
    pair_budget: usize,
    seed: u64,
    exec: Execution,
) -> Result<CcReport> {
    if d.top_core.is_empty() {
        return Err(Error::InvalidArgument("innermost shell is empty".into()));
    }
    let in_core: Vec<bool> = (0..g.vertex_count()).map(|x| d.in_top_core(x)).collect();
    let outside: Vec<usize> = (0..g.vertex_count()).filter(|&x| !in_core[x]).collect();
    let n_out = outside.len();
    let all_pairs = n_out * n_out.saturating_sub(1) / 2;
    let outside_edges = g.edges().filter(|&(a, b)| !in_core[a] && !in_core[b]).count();
    let candidates = all_pairs - outside_edges;

    // pairs grouped by their first vertex: (source, targets)
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let exhaustive = candidates <= pair_budget;
    if exhaustive {
        for (i, &u) in outside.iter().enumerate() {
            let targets: Vec<usize> = outside[i + 1..]
                .iter()
                .copied()
                .filter(|&v| !g.has_edge(u, v))
                .collect();
            if !targets.is_empty() {
                groups.push((u, targets));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::with_capacity(pair_budget);
        while pairs.len() < pair_budget {
            let a = outside[rng.random_range(0..n_out)];
            let b = outside[rng.random_range(0..n_out)];
            if a != b && !g.has_edge(a, b) {
                pairs.push((a.min(b), a.max(b)));
            }
        }
        pairs.sort_unstable();
        for (u, v) in pairs {
            match groups.last_mut() {
                Some((src, targets)) if *src == u => targets.push(v),
                _ => groups.push((u, vec![v])),
            }
        }
    }

    // (examined, through-core shortest, violations of P^max <= P^O, identity misses)
    let tallies = map_slice(exec, &groups, |(u, targets)| {
        let sd = source_distances(g, &in_core, *u);
        let mut t = (0usize, 0usize, 0usize, 0usize);
        for &v in targets {
            let (pm, po, px) = (sd.through[v], sd.avoiding[v], sd.plain[v]);
            t.0 += 1;
            if pm != UNREACHABLE && pm == px {
                t.1 += 1;
            }
            if pm != UNREACHABLE && pm > po {
                t.2 += 1;
            }
            if pm.min(po) != px {
                t.3 += 1;
            }
        }
        t
    });
    let (examined, through, violations, identity) = tallies
        .into_iter()
        .fold((0, 0, 0, 0), |a, t| (a.0 + t.0, a.1 + t.1, a.2 + t.2, a.3 + t.3));
    if identity > 0 {
        log::warn!("{identity} pair(s) broke min(P^max, P^O) = distance");
    }
    Ok(CcReport {
        is_core_connected: violations == 0,
        cc_strength: if examined == 0 { 1.0 } else { through as f64 / examined as f64 },
        pairs_examined: examined,
        exhaustive,
        identity_violations: identity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub actual: u32,
    pub predicted: u32,
    pub random: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub t: usize,
    /// Flooding rounds from top-closeness, predicted and random seeds.
    pub spread: Comparison,
    /// Diameter after removing top-betweenness, predicted and random sets.
    pub diameter: Comparison,
}

/// Three-way comparison on the largest component of one snapshot.
pub fn validate_snapshot(g: &Snapshot, m: usize, seed: u64, exec: Execution) -> Result<ValidationRow> {
    let lcc = g.largest_component()?;
    let top_close = top_k(&closeness_with(&lcc, exec)?, m)?.members;
    let top_betw = top_k(&betweenness_with(&lcc, exec)?, m)?.members;
    let predicted = predict_core_degree(&lcc, m, DegreeMode::Full)?.members;
    let random = random_members(&lcc, m, seed ^ g.index() as u64)?;
    Ok(ValidationRow {
        t: g.index(),
        spread: Comparison {
            actual: spread_rounds(&lcc, &top_close)?.rounds,
            predicted: spread_rounds(&lcc, &predicted)?.rounds,
            random: spread_rounds(&lcc, &random)?.rounds,
        },
        diameter: Comparison {
            actual: diameter_after_removal_with(&lcc, &top_betw, exec)?,
            predicted: diameter_after_removal_with(&lcc, &predicted, exec)?,
            random: diameter_after_removal_with(&lcc, &random, exec)?,
        },
    })
}

/// Core-connectedness of a snapshot's largest component.
pub fn cc_snapshot(g: &Snapshot, pair_budget: usize, seed: u64) -> Result<CcReport> {
    let lcc = g.largest_component()?;
    let d = find_core(&lcc)?;
    cc_check(&lcc, &d, pair_budget, seed)
}
