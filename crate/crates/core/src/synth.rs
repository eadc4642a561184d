//! Seeded synthetic temporal networks with a controllable core.
//!
//! The conforming profile plants a dense core of `core_size` vertices. Every
//! periphery vertex hangs off one or two core anchors picked in proportion
//! to drifting per-position attractiveness, and a thin layer of random edges
//! joins single-anchored periphery vertices. Each of the `hubs` decoy
//! vertices gets a group of periphery neighbours, larger than a typical core
//! degree, that also hang off the hub's home core vertex. Core churn swaps
//! identities between core and periphery vertices. Churn and drift taper off
//! over the run as the network settles.
//!
//! The non-conforming profile is a configuration-model graph with degrees
//! drawn uniformly from 1..=6. Each step applies degree-preserving edge
//! swaps and hands a `churn` fraction of the vertices fresh identities.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AggregationMode, Snapshot, SnapshotSeries, TemporalEdge, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Conforming,
    NonConforming,
}

impl std::str::FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conforming" => Ok(Self::Conforming),
            "non-conforming" => Ok(Self::NonConforming),
            other => Err(Error::InvalidArgument(format!("unknown profile '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub steps: usize,
    pub profile: Profile,
    pub core_size: usize,
    pub core_density: f64,
    /// Per-step fraction of periphery attachments (conforming) or edges
    /// (non-conforming) that are rewired.
    pub churn: f64,
    /// Per-step probability that a core member swaps places with a
    /// periphery vertex.
    pub core_churn: f64,
    pub seed: u64,
    /// Decoy high-degree periphery vertices (conforming only).
    pub hubs: usize,
    /// Standard deviation of the per-step log-attractiveness random walk.
    pub drift: f64,
}

impl GenSpec {
    pub fn conforming(n: usize, steps: usize, seed: u64) -> GenSpec {
        GenSpec {
            n,
            steps,
            profile: Profile::Conforming,
            core_size: 20,
            core_density: 0.9,
            churn: 0.2,
            core_churn: 0.05,
            seed,
            hubs: 3,
            drift: 0.1,
        }
    }

    pub fn non_conforming(n: usize, steps: usize, seed: u64) -> GenSpec {
        GenSpec {
            profile: Profile::NonConforming,
            churn: 0.5,
            core_churn: 0.5,
            hubs: 0,
            ..GenSpec::conforming(n, steps, seed)
        }
    }

    pub fn for_profile(profile: Profile, n: usize, steps: usize, seed: u64) -> GenSpec {
        match profile {
            Profile::Conforming => GenSpec::conforming(n, steps, seed),
            Profile::NonConforming => GenSpec::non_conforming(n, steps, seed),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::Infeasible(format!("{name} = {x} is outside [0, 1]")))
            }
        };
        unit("core_density", self.core_density)?;
        unit("churn", self.churn)?;
        unit("core_churn", self.core_churn)?;
        if self.steps == 0 {
            return Err(Error::Infeasible("steps must be positive".into()));
        }
        if !(self.drift >= 0.0 && self.drift.is_finite()) {
            return Err(Error::Infeasible(format!("drift = {} must be non-negative", self.drift)));
        }
        match self.profile {
            Profile::Conforming => {
                if self.core_size < 2 || self.core_size >= self.n {
                    return Err(Error::Infeasible(format!(
                        "core_size {} must lie in [2, n) with n = {}",
                        self.core_size, self.n
                    )));
                }
                if self.core_size + self.hubs + 2 > self.n {
                    return Err(Error::Infeasible("no room left for ordinary periphery vertices".into()));
                }
            }
            Profile::NonConforming => {
                if self.n < 5 {
                    return Err(Error::Infeasible(format!("n = {} is too small", self.n)));
                }
            }
        }
        Ok(())
    }
}

/// Generated series plus the raw stream it came from (timestamp = step).
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub series: SnapshotSeries,
    pub edges: Vec<TemporalEdge>,
}

pub fn generate(spec: &GenSpec) -> Result<SnapshotSeries> {
    Ok(generate_stream(spec)?.series)
}

pub fn generate_stream(spec: &GenSpec) -> Result<Generated> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let per_step = match spec.profile {
        Profile::Conforming => conforming(spec, &mut rng),
        Profile::NonConforming => non_conforming(spec, &mut rng),
    };
    let mut edges = Vec::new();
    let mut snapshots = Vec::with_capacity(per_step.len());
    for (t, step) in per_step.into_iter().enumerate() {
        edges.extend(step.iter().map(|&(u, v)| TemporalEdge { u, v, t: t as u64 }));
        snapshots.push(Snapshot::from_edges(t, step));
    }
    Ok(Generated {
        series: SnapshotSeries {
            snapshots,
            mode: AggregationMode::Windowed,
            window: 1,
        },
        edges,
    })
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Complete graph on the core positions minus the pairs needed to reach
/// `density`. Missing pairs go to the positions with the fewest periphery
/// attachments, so the busiest members stay adjacent to the whole core.
fn core_edges(attached: &[usize], density: f64) -> Vec<(usize, usize)> {
    let size = attached.len();
    let total = size * (size - 1) / 2;
    let remove = total - (density * total as f64).round() as usize;
    let mut rank = vec![0usize; size];
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| attached[b].cmp(&attached[a]).then(a.cmp(&b)));
    for (r, &pos) in order.iter().enumerate() {
        rank[pos] = r;
    }
    let mut pairs: Vec<(usize, usize)> = (0..size)
        .flat_map(|a| (a + 1..size).map(move |b| (a, b)))
        .collect();
    pairs.sort_by_key(|&(a, b)| (std::cmp::Reverse(rank[a] + rank[b]), a, b));
    // spread the removals over the lighter half so no member drops out of
    // the innermost core
    let cap = (2 * remove).div_ceil(size.div_ceil(2));
    let mut removed_at = vec![0usize; size];
    let mut removed = BTreeSet::new();
    for &(a, b) in &pairs {
        if removed.len() == remove {
            break;
        }
        if removed_at[a] < cap && removed_at[b] < cap {
            removed_at[a] += 1;
            removed_at[b] += 1;
            removed.insert((a, b));
        }
    }
    for &p in &pairs {
        if removed.len() == remove {
            break;
        }
        removed.insert(p);
    }
    pairs.retain(|p| !removed.contains(p));
    pairs.sort_unstable();
    pairs
}

const SECOND_ANCHOR: f64 = 0.3;
/// Churn and drift multipliers of the calm and turbulent regimes of a
/// conforming run, and the per-step chance of switching between them.
const CALM: f64 = 0.2;
const TURBULENT: f64 = 4.0;
const REGIME_SWITCH: f64 = 0.1;
const PERIPHERY_EDGES: f64 = 0.25;
const HUB_MARGIN: f64 = 1.3;

fn draw_anchors(pick: &WeightedIndex<f64>, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let first = pick.sample(rng);
    let mut anchors = vec![first];
    if rng.random_bool(SECOND_ANCHOR) {
        let second = pick.sample(rng);
        if second != first {
            anchors.push(second);
        }
    }
    anchors
}

/// Roles: `0..s` core positions, `s..s + hubs` decoy hubs, the rest ordinary
/// periphery. Identities are a permutation of `0..n` over roles.
fn conforming(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<(VertexId, VertexId)>> {
    let (n, s) = (spec.n, spec.core_size);
    let first_plain = s + spec.hubs;
    let home: Vec<usize> = (0..spec.hubs).map(|_| rng.random_range(0..s)).collect();
    let mut id_of: Vec<VertexId> = (0..n as VertexId).collect();
    id_of.shuffle(rng);

    let pareto: Pareto<f64> = Pareto::new(1.0, 1.5).expect("valid Pareto");
    let mut log_weight: Vec<f64> = (0..s).map(|_| pareto.sample(rng).ln()).collect();
    let noise: Normal<f64> = Normal::new(0.0, spec.drift).expect("valid normal");
    let weights = |lw: &[f64]| WeightedIndex::new(lw.iter().map(|x| x.exp())).expect("positive weights");

    let pick = weights(&log_weight);
    let mut anchors: Vec<Vec<usize>> = (first_plain..n).map(|_| draw_anchors(&pick, rng)).collect();
    let plain = n - first_plain;
    let random_pair = |rng: &mut ChaCha8Rng| loop {
        let a = first_plain + rng.random_range(0..plain);
        let b = first_plain + rng.random_range(0..plain);
        if a != b {
            return edge(a, b);
        }
    };
    let mut periphery: Vec<(usize, usize)> = (0..(PERIPHERY_EDGES * plain as f64).round() as usize)
        .map(|_| random_pair(rng))
        .collect();

    let mut turbulent = false;
    let mut out = Vec::with_capacity(spec.steps);
    for t in 0..spec.steps {
        if t > 0 {
            if rng.random_bool(REGIME_SWITCH) {
                turbulent = !turbulent;
            }
            let activity = if turbulent { TURBULENT } else { CALM };
            let churn = (spec.churn * activity).min(1.0);
            let core_churn = (spec.core_churn * activity).min(1.0);
            for lw in log_weight.iter_mut() {
                *lw += activity * noise.sample(rng);
            }
            for pos in 0..s {
                if rng.random_bool(core_churn) {
                    let other = first_plain + rng.random_range(0..plain);
                    id_of.swap(pos, other);
                }
            }
            let pick = weights(&log_weight);
            for a in anchors.iter_mut() {
                if rng.random_bool(churn) {
                    *a = draw_anchors(&pick, rng);
                }
            }
            for e in periphery.iter_mut() {
                if rng.random_bool(churn) {
                    *e = random_pair(rng);
                }
            }
        }

        let mut attached = vec![0usize; s];
        for a in &anchors {
            for &pos in a {
                attached[pos] += 1;
            }
        }
        let mut sorted = attached.clone();
        sorted.sort_unstable();
        // each hub serves its own group, whose members hang off the hub's
        // home core vertex instead of their usual anchors, so the hub never
        // shortens a route
        let group = ((HUB_MARGIN * (sorted[s / 2] + s) as f64).ceil() as usize).min(plain / spec.hubs.max(1));
        let members = rand::seq::index::sample(rng, plain, group * spec.hubs).into_vec();
        let mut step = BTreeSet::new();
        let mut grouped = vec![false; plain];
        for (h, &c) in home.iter().enumerate() {
            let hub = s + h;
            step.insert(edge(hub, c));
            for &j in &members[h * group..(h + 1) * group] {
                grouped[j] = true;
                step.insert(edge(hub, first_plain + j));
                step.insert(edge(c, first_plain + j));
            }
        }
        let mut attached = vec![0usize; s];
        for (i, a) in anchors.iter().enumerate() {
            if !grouped[i] {
                for &pos in a {
                    attached[pos] += 1;
                    step.insert(edge(first_plain + i, pos));
                }
            }
        }
        for &c in &home {
            attached[c] += group;
        }
        step.extend(core_edges(&attached, spec.core_density));
        // periphery-periphery edges only join single-anchored vertices, so
        // they stay inside one shell
        let loose = |r: usize| !grouped[r - first_plain] && anchors[r - first_plain].len() == 1;
        step.extend(periphery.iter().copied().filter(|&(a, b)| loose(a) && loose(b)));
        out.push(step.into_iter().map(|(a, b)| (id_of[a], id_of[b])).collect());
    }
    out
}

fn non_conforming(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<(VertexId, VertexId)>> {
    let n = spec.n;
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, rng.random_range(1..=6))).collect();
    stubs.shuffle(rng);
    let mut present = BTreeSet::new();
    for pair in stubs.chunks_exact(2) {
        if pair[0] != pair[1] {
            present.insert(edge(pair[0], pair[1]));
        }
    }
    let mut edges: Vec<(usize, usize)> = present.iter().copied().collect();
    let mut id_of: Vec<VertexId> = (0..n as VertexId).collect();
    id_of.shuffle(rng);
    let mut next_id = n as VertexId;

    let mut out = Vec::with_capacity(spec.steps);
    for t in 0..spec.steps {
        if t > 0 {
            let swaps = (spec.churn * edges.len() as f64).round() as usize;
            let mut done = 0;
            for _ in 0..swaps * 10 {
                if done == swaps {
                    break;
                }
                let i = rng.random_range(0..edges.len());
                let j = rng.random_range(0..edges.len());
                let ((a, b), (c, d)) = (edges[i], edges[j]);
                let (x, y) = if rng.random_bool(0.5) { (edge(a, d), edge(c, b)) } else { (edge(a, c), edge(b, d)) };
                if x.0 == x.1 || y.0 == y.1 || x == y || present.contains(&x) || present.contains(&y) {
                    continue;
                }
                present.remove(&edges[i]);
                present.remove(&edges[j]);
                present.insert(x);
                present.insert(y);
                edges[i] = x;
                edges[j] = y;
                done += 1;
            }
            for id in id_of.iter_mut() {
                if rng.random_bool(spec.churn) {
                    *id = next_id;
                    next_id += 1;
                }
            }
        }
        let mut step: Vec<(VertexId, VertexId)> = edges.iter().map(|&(a, b)| (id_of[a], id_of[b])).collect();
        step.sort_unstable();
        out.push(step);
    }
    out
}
