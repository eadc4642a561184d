//! Predicting the most central vertices of a temporal network from its
//! innermost k-core.
//!
//! A temporal edge stream is cut into snapshots ([`graph`]), each snapshot is
//! decomposed into k-cores ([`kcore`]) and summarised by four structural
//! parameters ([`params`]). Networks are classified by the distributions of
//! those parameters ([`classify`]); for networks that qualify, the degree
//! ranking inside the innermost core names the likely top betweenness and
//! closeness vertices ([`predict`], [`evaluate`]).

pub mod centrality;
pub mod classify;
pub mod error;
pub mod evaluate;
pub mod exec;
pub mod forecast;
pub mod graph;
pub mod kcore;
pub mod params;
pub mod pipeline;
pub mod predict;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{build_snapshots, parse_edge_stream, AggregationMode, Snapshot, SnapshotSeries, TemporalEdgeList, VertexId};
