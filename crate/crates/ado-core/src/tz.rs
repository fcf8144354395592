//! Hitting sets, pivots, bunches and clusters.
//!
//! For a center set `A`, the pivot `p(v)` is the closest member of `A`
//! (ties to the smallest id). The bunch `B(v)` holds every vertex strictly
//! closer to `v` than `p(v)`; the cluster `C(w)` is its dual
//! (`w ∈ B(v) ⇔ v ∈ C(w)`). The hitting set is grown by randomized
//! center sampling until every bunch and cluster is small.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Dist, Graph, Vertex};

/// Nearest-center assignment for a set `A`.
#[derive(Clone, Debug)]
pub struct PivotAssignment {
    /// The center set, sorted ascending.
    pub a_set: Vec<Vertex>,
    /// `p(v)`: nearest member of `a_set`, ties to the smallest id.
    /// `None` when `v` is unreachable from every center.
    pub pivot: Vec<Option<Vertex>>,
    /// `d(v, p(v))`; `UNREACHABLE` when no center is reachable.
    pub pivot_dist: Vec<Dist>,
}

impl PivotAssignment {
    pub fn is_center(&self, v: Vertex) -> bool {
        self.pivot[v as usize] == Some(v)
    }
}

/// Bunches and clusters with exact distances, both sides sorted by vertex.
#[derive(Clone, Debug, Default)]
pub struct BunchClusterIndex {
    pub bunch: Vec<Vec<(Vertex, u32)>>,
    pub cluster: Vec<Vec<(Vertex, u32)>>,
}

impl BunchClusterIndex {
    pub fn max_bunch(&self) -> usize {
        self.bunch.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_cluster(&self) -> usize {
        self.cluster.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Multi-source BFS from `a`, pivots tie-broken to the smallest center id.
pub fn assign_pivots(g: &Graph, a: &[Vertex]) -> Result<PivotAssignment> {
    if a.is_empty() {
        return Err(Error::invalid("pivot assignment needs a non-empty center set"));
    }
    let n = g.n();
    let mut a_set: Vec<Vertex> = a.to_vec();
    a_set.sort_unstable();
    a_set.dedup();
    if let Some(&bad) = a_set.iter().find(|&&v| v as usize >= n) {
        return Err(Error::invalid(format!("center {bad} out of range for n={n}")));
    }

    let mut dist = vec![u32::MAX; n];
    let mut pivot: Vec<Option<Vertex>> = vec![None; n];
    for &s in &a_set {
        dist[s as usize] = 0;
        pivot[s as usize] = Some(s);
    }
    let mut frontier = a_set.clone();
    let mut level = 0u32;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in g.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = level;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        // The nearest center of smallest id is inherited from the parents:
        // every center at distance `level` from w reaches it through some
        // neighbor in the previous layer.
        for &w in &next {
            let p = g
                .neighbors(w)
                .iter()
                .filter(|&&u| dist[u as usize] == level - 1)
                .filter_map(|&u| pivot[u as usize])
                .min();
            pivot[w as usize] = p;
        }
        frontier = next;
    }
    let pivot_dist = dist
        .iter()
        .map(|&d| {
            if d == u32::MAX {
                Dist::UNREACHABLE
            } else {
                Dist::hops(d)
            }
        })
        .collect();
    Ok(PivotAssignment {
        a_set,
        pivot,
        pivot_dist,
    })
}

/// Enumerates `C(w) = {v : d(w, v) < d(v, p(v))}` by a pruned BFS from `w`.
///
/// Clusters are prefix-closed along shortest paths from `w`
/// (`d(w,u) < d(u, p(u))` holds for every vertex `u` on a shortest path to a
/// member), so expanding only through members is exhaustive.
fn cluster_members(g: &Graph, pa: &PivotAssignment, w: Vertex) -> Vec<(Vertex, u32)> {
    let mut out = Vec::new();
    let mut seen = vec![false; g.n()];
    seen[w as usize] = true;
    if Dist::ZERO < pa.pivot_dist[w as usize] {
        out.push((w, 0));
    }
    let mut frontier = vec![w];
    let mut level = 0u32;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &x in g.neighbors(u) {
                if !seen[x as usize] {
                    seen[x as usize] = true;
                    if Dist::hops(level) < pa.pivot_dist[x as usize] {
                        out.push((x, level));
                        next.push(x);
                    }
                }
            }
        }
        frontier = next;
    }
    out.sort_unstable();
    out
}

/// Exhaustive bunches and clusters with exact distances.
pub fn compute_bunches_clusters(g: &Graph, pa: &PivotAssignment) -> BunchClusterIndex {
    let n = g.n();
    let mut cluster = Vec::with_capacity(n);
    for w in g.vertices() {
        cluster.push(cluster_members(g, pa, w));
    }
    let mut bunch: Vec<Vec<(Vertex, u32)>> = vec![Vec::new(); n];
    for w in g.vertices() {
        for &(v, d) in &cluster[w as usize] {
            bunch[v as usize].push((w, d));
        }
    }
    for b in &mut bunch {
        b.sort_unstable();
    }
    BunchClusterIndex { bunch, cluster }
}

/// `C(S)`: union of the clusters of the members of `S`, sorted.
pub fn cluster_of_set(idx: &BunchClusterIndex, s: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = s
        .iter()
        .flat_map(|&w| idx.cluster[w as usize].iter().map(|&(v, _)| v))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Randomized center picking: grows `A` until every bunch and cluster has at
/// most `c_b * n / target` members. Adding a vertex to `A` empties its own
/// bunch and cluster and can only shrink everyone else's, so the violator
/// set decreases monotonically.
pub fn compute_hitting_set(g: &Graph, target: f64, c_b: f64, seed: u64) -> Result<Vec<Vertex>> {
    let n = g.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !(1.0 <= target && target <= n as f64) {
        return Err(Error::invalid(format!(
            "hitting-set target {target} outside [1, {n}]"
        )));
    }
    if !(c_b >= 1.0) {
        return Err(Error::invalid(format!("c_b={c_b} must be >= 1")));
    }
    let bound = c_b * n as f64 / target;
    let round_cap = (20.0 * (n.max(2) as f64).log2()).ceil() as usize + 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_a = vec![false; n];
    let mut a: Vec<Vertex> = Vec::new();
    let mut w_set: Vec<Vertex> = g.vertices().collect();

    for round in 1..=round_cap {
        let p = (target / w_set.len() as f64).min(1.0);
        for &w in &w_set {
            if !in_a[w as usize] && rng.gen::<f64>() < p {
                in_a[w as usize] = true;
                a.push(w);
            }
        }
        if a.is_empty() {
            continue;
        }
        let pa = assign_pivots(g, &a)?;
        let idx = compute_bunches_clusters(g, &pa);
        w_set = g
            .vertices()
            .filter(|&v| {
                idx.cluster[v as usize].len() as f64 > bound
                    || idx.bunch[v as usize].len() as f64 > bound
            })
            .collect();
        if w_set.is_empty() {
            a.sort_unstable();
            log::debug!(
                "hitting set converged after {round} rounds: |A|={} (target {target:.1})",
                a.len()
            );
            return Ok(a);
        }
    }
    Err(Error::NonConvergence {
        rounds: round_cap,
        remaining: w_set.len(),
        a_size: a.len(),
    })
}
