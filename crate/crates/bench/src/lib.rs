//! Fixture curves shared by the benchmarks.

use jacstab_core::{CanonicalPolarization, MarkedDualGraph, QProfile, Result};

/// Complete graph on `n >= 4` rational vertices.
pub fn complete(n: usize) -> Result<MarkedDualGraph> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    MarkedDualGraph::stable(&vec![0; n], &edges, &[])
}

/// Cycle of `n` elliptic vertices.
pub fn necklace(n: usize) -> Result<MarkedDualGraph> {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    MarkedDualGraph::stable(&vec![1; n], &edges, &[])
}

/// Canonical profile of degree `d`, perturbed to be general.
pub fn general_profile(graph: &MarkedDualGraph, d: i64, seed: u64) -> Result<QProfile> {
    Ok(CanonicalPolarization::new(d).compile(graph)?.perturb_general(graph, seed))
}
