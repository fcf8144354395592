//! Truncated-BFS neighborhoods and the eccentricity/radius they induce.
//!
//! `N(v, s)` is the set of the first `floor(s)` vertices met by a BFS from
//! `v` (excluding `v`), under the crate-wide tie-break of ascending vertex
//! id within a layer. The truncated eccentricity `ecc(v, s)` is the largest
//! radius whose full ball still fits inside `N(v, s)`, and `rad(s)` is its
//! minimum over all vertices.

use crate::error::{Error, Result};
use crate::graph::{bfs_full, layered_bfs_capped, Graph, Vertex};

/// Prefix of a BFS run from `source`: the first `floor(s)` vertices met, in
/// discovery order, plus the deepest radius whose ball is fully covered.
#[derive(Clone, Debug)]
pub struct TruncatedBfsView {
    pub source: Vertex,
    /// Vertices in discovery order, source excluded.
    pub order: Vec<Vertex>,
    /// BFS distance of each entry of `order`.
    pub depth: Vec<u32>,
    /// `ecc(source, s)`: max radius r with `T(source, r) ⊆ N(source, s)`.
    pub deepest_complete_radius: u32,
    /// True when the whole component was absorbed before the cap hit.
    pub exhausted: bool,
}

impl TruncatedBfsView {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// BFS distance of `v` if it is part of the view.
    pub fn layer_of(&self, v: Vertex) -> Option<u32> {
        self.order
            .iter()
            .position(|&w| w == v)
            .map(|i| self.depth[i])
    }
}

fn check_s(s: f64) -> Result<usize> {
    if !(s >= 1.0) {
        return Err(Error::invalid(format!("truncation size s={s} must be >= 1")));
    }
    // Non-integer s is floored, N(v, s) = N(v, floor(s)).
    Ok(s.floor() as usize)
}

/// First `floor(s)` vertices met during a BFS from `v`.
pub fn truncated_bfs(g: &Graph, v: Vertex, s: f64) -> Result<TruncatedBfsView> {
    let s_int = check_s(s)?;
    if v as usize >= g.n() {
        return Err(Error::invalid(format!(
            "vertex {v} out of range for n={}",
            g.n()
        )));
    }
    let limit = s_int.min(g.n());
    let (mut order, mut depth) = layered_bfs_capped(g, v, limit);
    let (ecc, exhausted) = if order.len() > limit {
        // The (s+1)-th vertex sits at depth D, so every layer below D is
        // complete and layer D is not.
        let d_next = depth[limit];
        order.truncate(limit);
        depth.truncate(limit);
        (d_next - 1, false)
    } else {
        (depth.last().copied().unwrap_or(0), true)
    };
    Ok(TruncatedBfsView {
        source: v,
        order,
        depth,
        deepest_complete_radius: ecc,
        exhausted,
    })
}

/// Truncated eccentricity `ecc(v, s)`.
pub fn ecc_trunc(g: &Graph, v: Vertex, s: f64) -> Result<u32> {
    Ok(truncated_bfs(g, v, s)?.deepest_complete_radius)
}

/// Truncated radius `rad(s) = min_v ecc(v, s)`.
pub fn rad_trunc(g: &Graph, s: f64) -> Result<u32> {
    check_s(s)?;
    let mut best = 0u32;
    let mut first = true;
    for v in g.vertices() {
        let e = ecc_trunc(g, v, s)?;
        if first || e < best {
            best = e;
            first = false;
        }
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// `L(v, r)`: vertices at distance exactly `r` from `v` (excluding `v`).
pub fn layer_set(g: &Graph, v: Vertex, r: u32) -> Result<Vec<Vertex>> {
    let row = bfs_full(g, v)?;
    Ok(g.vertices()
        .filter(|&u| u != v && row.dist[u as usize].get() == Some(r))
        .collect())
}

/// `T(v, r)`: vertices at distance in `1..=r` from `v`.
pub fn ball_set(g: &Graph, v: Vertex, r: u32) -> Result<Vec<Vertex>> {
    let row = bfs_full(g, v)?;
    Ok(g.vertices()
        .filter(|&u| {
            u != v
                && match row.dist[u as usize].get() {
                    Some(d) => d >= 1 && d <= r,
                    None => false,
                }
        })
        .collect())
}
