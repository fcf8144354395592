//! Approximate distance oracles for bounded-degree graphs, plus the layered
//! gadget constructions used to probe their limits.
//!
//! The crate is organized around an immutable [`graph::Graph`]:
//!
//! - [`trunc`]: truncated-BFS neighborhoods `N(v, s)` and the truncated
//!   eccentricity/radius they induce.
//! - [`tz`]: Thorup–Zwick hitting sets, pivots, bunches and clusters.
//! - [`ado`]: the oracle itself — build, constant-lookup query, space
//!   accounting, and a versioned binary serialization.
//! - [`gadget`]: butterfly / merged / edge-split layered graphs that reduce
//!   set-intersection queries to distance queries, plus random test inputs.
//! - [`verify`]: stretch audits against brute-force distances, distinguisher
//!   adapters, and executable checks of the structural
//!   inequalities the oracle's guarantee rests on.

// Negated float comparisons like `!(x >= 1.0)` are deliberate: they
// treat NaN as out of domain.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ado;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod trunc;
pub mod tz;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Dist, Graph, Vertex};

/// Splits one base seed into independent per-task seeds (splitmix64 step).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::graph::{Graph, Vertex};

    pub fn path_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n.saturating_sub(1))
            .map(|i| (i as Vertex, i as Vertex + 1))
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn cycle_graph(n: usize) -> Graph {
        let mut edges: Vec<_> = (0..n - 1).map(|i| (i as Vertex, i as Vertex + 1)).collect();
        edges.push((n as Vertex - 1, 0));
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete_graph(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u as Vertex, v as Vertex));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn star_graph(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v as Vertex)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }
}
