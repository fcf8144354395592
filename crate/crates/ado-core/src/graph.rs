//! Immutable undirected unweighted graphs with exact BFS distances.
//!
//! Vertices are dense integers `0..n`. Adjacency lists are kept sorted
//! ascending, and BFS emits each distance layer in ascending vertex id, so
//! every traversal order in the crate is reproducible.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Vertex id. Graphs are small enough that `u32` is always sufficient.
pub type Vertex = u32;

/// Hop count to a vertex, or `UNREACHABLE` for other components.
///
/// `UNREACHABLE` compares greater than every finite distance.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist(u32);

impl Dist {
    pub const UNREACHABLE: Dist = Dist(u32::MAX);
    pub const ZERO: Dist = Dist(0);

    pub fn hops(value: u32) -> Dist {
        debug_assert!(value < u32::MAX);
        Dist(value)
    }

    pub fn is_reachable(self) -> bool {
        self != Dist::UNREACHABLE
    }

    pub fn get(self) -> Option<u32> {
        if self.is_reachable() {
            Some(self.0)
        } else {
            None
        }
    }

    /// Raw encoding: finite hop count, or `u32::MAX` for unreachable.
    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn from_raw(raw: u32) -> Dist {
        Dist(raw)
    }

    /// Path concatenation: unreachable absorbs.
    pub fn plus(self, other: Dist) -> Dist {
        match (self.get(), other.get()) {
            (Some(a), Some(b)) => Dist::hops(a + b),
            _ => Dist::UNREACHABLE,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self.get() {
            Some(v) => v as f64,
            None => f64::INFINITY,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All distances from one source vertex.
#[derive(Clone, Debug)]
pub struct DistanceRow {
    pub source: Vertex,
    pub dist: Vec<Dist>,
}

/// Immutable undirected simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph from an explicit edge list. Rejects self-loops,
    /// duplicate edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Graph> {
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            m: seen.len(),
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        0..self.n as Vertex
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m);
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "vertex {v} out of range for n={}",
                self.n
            )))
        }
    }
}

/// Maximum adjacency-list length; 0 for edgeless graphs.
pub fn max_degree(g: &Graph) -> usize {
    (0..g.n()).map(|v| g.adjacency[v].len()).max().unwrap_or(0)
}

/// Layered BFS: returns discovery order (source excluded) and the depth of
/// each entry, with each layer emitted in ascending vertex id. Stops once
/// `limit` vertices have been collected and the current layer is finished,
/// so callers can tell whether layer `depth` was exhausted.
pub(crate) fn layered_bfs_capped(g: &Graph, source: Vertex, limit: usize) -> (Vec<Vertex>, Vec<u32>) {
    let mut order = Vec::new();
    let mut depth = Vec::new();
    let mut seen = vec![false; g.n()];
    seen[source as usize] = true;
    let mut frontier = vec![source];
    let mut level = 0u32;
    while !frontier.is_empty() && order.len() <= limit {
        level += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        for &w in &next {
            order.push(w);
            depth.push(level);
        }
        frontier = next;
    }
    (order, depth)
}

/// Exact hop distances from `source` to every vertex.
pub fn bfs_full(g: &Graph, source: Vertex) -> Result<DistanceRow> {
    g.check_vertex(source)?;
    let mut dist = vec![Dist::UNREACHABLE; g.n()];
    dist[source as usize] = Dist::ZERO;
    let (order, depth) = layered_bfs_capped(g, source, usize::MAX);
    for (v, d) in order.iter().zip(depth.iter()) {
        dist[*v as usize] = Dist::hops(*d);
    }
    Ok(DistanceRow { source, dist })
}

/// BFS shortest-path tree: distances plus the parent of each reached vertex
/// (the parent is the smallest-id neighbor in the previous layer, matching
/// the crate-wide tie-break). `parent[source] = source`.
pub fn bfs_tree(g: &Graph, source: Vertex) -> Result<(Vec<Dist>, Vec<Option<Vertex>>)> {
    let row = bfs_full(g, source)?;
    let mut parent = vec![None; g.n()];
    parent[source as usize] = Some(source);
    for v in g.vertices() {
        if v == source || !row.dist[v as usize].is_reachable() {
            continue;
        }
        let dv = row.dist[v as usize];
        let p = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| row.dist[u as usize].plus(Dist::hops(1)) == dv)
            .min();
        parent[v as usize] = p;
    }
    Ok((row.dist, parent))
}

/// Square matrix of exact pairwise distances.
#[derive(Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: Vertex, v: Vertex) -> Dist {
        Dist::from_raw(self.data[u as usize * self.n + v as usize])
    }

    pub fn row(&self, u: Vertex) -> &[u32] {
        &self.data[u as usize * self.n..(u as usize + 1) * self.n]
    }
}

/// Entry guard for [`all_pairs_exact`]: n^2 matrix entries must fit in memory.
pub const ALL_PAIRS_ENTRY_GUARD: usize = 100_000_000;

/// Brute-force ground truth: one BFS per vertex, collected into a matrix.
pub fn all_pairs_exact(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.n();
    if n.saturating_mul(n) > ALL_PAIRS_ENTRY_GUARD {
        return Err(Error::Capacity(format!(
            "all-pairs matrix would need {} entries (guard {})",
            n.saturating_mul(n),
            ALL_PAIRS_ENTRY_GUARD
        )));
    }
    let mut data = vec![u32::MAX; n * n];
    data.par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(src, row)| {
            let r = bfs_full(g, src as Vertex).expect("source in range");
            for (slot, d) in row.iter_mut().zip(r.dist.iter()) {
                *slot = d.raw();
            }
        });
    Ok(DistanceMatrix { n, data })
}

pub fn is_connected(g: &Graph) -> bool {
    if g.n() <= 1 {
        return true;
    }
    let (order, _) = layered_bfs_capped(g, 0, usize::MAX);
    order.len() + 1 == g.n()
}

/// Induced subgraph on `keep` (deduplicated, ascending relabel).
/// Returns the subgraph and the new-id -> old-id map.
pub fn induced_subgraph(g: &Graph, keep: &[Vertex]) -> Result<(Graph, Vec<Vertex>)> {
    let mut old_ids: Vec<Vertex> = keep.to_vec();
    old_ids.sort_unstable();
    old_ids.dedup();
    for &v in &old_ids {
        g.check_vertex(v)?;
    }
    let mut new_id = vec![u32::MAX; g.n()];
    for (i, &v) in old_ids.iter().enumerate() {
        new_id[v as usize] = i as u32;
    }
    let mut edges = Vec::new();
    for &v in &old_ids {
        for &w in g.neighbors(v) {
            if v < w && new_id[w as usize] != u32::MAX {
                edges.push((new_id[v as usize], new_id[w as usize]));
            }
        }
    }
    let sub = Graph::from_edges(old_ids.len(), &edges)?;
    Ok((sub, old_ids))
}

/// Parses the shared edge-list text format: first line `n m`, then `m`
/// lines `u v`. Lines starting with `#` are comments; blank lines are
/// ignored.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    let mut data_lines = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let parse_num = |s: Option<&str>, what: &str| -> Result<usize> {
            let tok = s.ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("missing {what}"),
            })?;
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad {what} `{tok}`"),
            })
        };
        if header.is_none() {
            let n = parse_num(fields.next(), "vertex count")?;
            let m = parse_num(fields.next(), "edge count")?;
            if fields.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "trailing tokens after `n m` header".into(),
                });
            }
            header = Some((n, m));
            continue;
        }
        let (n, m) = header.unwrap();
        data_lines += 1;
        if data_lines > m {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("more than the declared {m} edges"),
            });
        }
        let u = parse_num(fields.next(), "edge endpoint")?;
        let v = parse_num(fields.next(), "edge endpoint")?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                msg: "trailing tokens after edge".into(),
            });
        }
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("edge ({u}, {v}) out of range for n={n}"),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("self-loop at vertex {u}"),
            });
        }
        let e = (u.min(v) as Vertex, u.max(v) as Vertex);
        edges.push(e);
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        msg: "empty edge-list file".into(),
    })?;
    if edges.len() != m {
        return Err(Error::Parse {
            line: 0,
            msg: format!("declared {m} edges but found {}", edges.len()),
        });
    }
    let mut sorted = edges.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        let dup = sorted.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
        return Err(Error::Parse {
            line: 0,
            msg: format!("duplicate edge ({}, {})", dup.0, dup.1),
        });
    }
    Graph::from_edges(n, &edges)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}
