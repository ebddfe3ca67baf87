//! Fixtures shared by the benchmarks.

use editwalk_core::process::{moran_weights, simple_edit_weights};
use editwalk_core::{HostGraph, WeightedEdits};

/// Simple process on `K_n` with a common edge probability.
pub fn simple_complete(n: usize, p: f64) -> (HostGraph, WeightedEdits<f64>) {
    let host = HostGraph::complete(n);
    let dist = simple_edit_weights(&host, &vec![p; host.edge_count()]).expect("valid probabilities");
    (host, dist)
}

/// Moran process on `K_n`.
pub fn moran_complete(n: usize) -> (HostGraph, WeightedEdits<f64>) {
    let host = HostGraph::complete(n);
    let dist = moran_weights(&host).expect("host has edges");
    (host, dist)
}

/// Simple process on a cycle with `m` edges and `p = 1/2`.
pub fn simple_cycle(m: usize) -> (HostGraph, WeightedEdits<f64>) {
    let host = HostGraph::cycle(m).expect("m >= 3");
    let dist = simple_edit_weights(&host, &vec![0.5; m]).expect("valid probabilities");
    (host, dist)
}
