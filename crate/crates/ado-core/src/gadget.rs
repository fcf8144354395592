//! Layered gadget graphs reducing set-intersection queries to distance
//! queries, plus random graphs and instances for test workloads.
//!
//! The butterfly infrastructure graph has `k+1` layers of `N = b^k`
//! vertices, indexed by base-`b` digit labels; consecutive layers are wired
//! wherever the labels agree outside one digit, which puts every first-layer
//! vertex at distance exactly `k` from every last-layer vertex while keeping
//! degrees at `2b`. Per-element copies with boundary edges removed encode
//! which sets contain each element; merging the copies at the boundary
//! layers yields a graph where `d(v_i, u_j) = k` iff `S_i ∩ S_j ≠ ∅`, and
//! splitting the boundary edges into paths stretches that gap.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Sets `S_0, ..., S_{N-1}` over the universe `[0, X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetIntersectionInstance {
    universe: usize,
    sets: Vec<Vec<u32>>,
}

impl SetIntersectionInstance {
    /// Normalizes each set (sorted, deduplicated) and validates elements.
    pub fn new(universe: usize, sets: Vec<Vec<u32>>) -> Result<Self> {
        let mut norm = sets;
        for (i, s) in norm.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&e| e as usize >= universe) {
                return Err(Error::invalid(format!(
                    "set {i} contains element {bad} outside universe [0, {universe})"
                )));
            }
        }
        Ok(SetIntersectionInstance {
            universe,
            sets: norm,
        })
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn set(&self, i: usize) -> &[u32] {
        &self.sets[i]
    }

    pub fn contains(&self, i: usize, x: u32) -> bool {
        i < self.sets.len() && self.sets[i].binary_search(&x).is_ok()
    }

    pub fn intersects(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.sets[i], &self.sets[j]);
        let (mut ia, mut ib) = (0, 0);
        while ia < a.len() && ib < b.len() {
            match a[ia].cmp(&b[ib]) {
                std::cmp::Ordering::Less => ia += 1,
                std::cmp::Ordering::Greater => ib += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Base-`b` digit label of a local index; digit `t` (1-based) is the
/// coefficient of `b^(t-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitLabel {
    pub digits: Vec<u32>,
}

impl DigitLabel {
    pub fn from_index(index: u64, base: u64, k: u32) -> DigitLabel {
        let mut digits = Vec::with_capacity(k as usize);
        let mut rest = index;
        for _ in 0..k {
            digits.push((rest % base) as u32);
            rest /= base;
        }
        DigitLabel { digits }
    }

    pub fn to_index(&self, base: u64) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * base + d as u64)
    }
}

/// Replaces digit `t` (1-based) of `index` in base `b`.
fn digit_replace(index: u64, t: u32, b: u64, digit: u64) -> u64 {
    let p = b.pow(t - 1);
    let cur = (index / p) % b;
    index - cur * p + digit * p
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GadgetKind {
    Butterfly,
    /// Per-element subgraph of the butterfly.
    Gx,
    Merged,
    Split,
}

/// A layered gadget graph plus the bookkeeping needed to read distances as
/// set-intersection answers.
#[derive(Clone, Debug)]
pub struct GadgetGraph {
    pub graph: Graph,
    pub kind: GadgetKind,
    /// Number of layer-crossings between the boundary layers.
    pub k: u32,
    /// Digit base `b = N^(1/k)` of the padded instance.
    pub b: u64,
    /// Edge-split factor; 1 means no splitting.
    pub t: u32,
    /// `v_i` for each original set index.
    pub left_rep: Vec<Vertex>,
    /// `u_j` for each original set index.
    pub right_rep: Vec<Vertex>,
    /// Refined layer of each vertex; edges connect consecutive layers.
    pub layer_of: Vec<u32>,
    /// Padded set count `b^k`.
    pub padded_sets: usize,
}

impl GadgetGraph {
    pub fn n_sets(&self) -> usize {
        self.left_rep.len()
    }

    /// Distance between opposite boundary reps when the sets intersect.
    pub fn intersect_distance(&self) -> u32 {
        2 * self.t + self.k - 2
    }

    /// Minimum distance between opposite boundary reps when they do not.
    pub fn disjoint_distance_floor(&self) -> u32 {
        4 * self.t + self.k - 2
    }
}

const GADGET_VERTEX_GUARD: usize = 50_000_000;

fn exact_base(n_sets: usize, k: u32) -> Result<u64> {
    if n_sets < 2 || k == 0 {
        return Err(Error::invalid(format!(
            "butterfly needs k >= 1 and at least 2 sets (got N={n_sets}, k={k})"
        )));
    }
    let guess = (n_sets as f64).powf(1.0 / k as f64).round() as u64;
    for b in guess.saturating_sub(1)..=guess + 1 {
        if b >= 2 && b.checked_pow(k) == Some(n_sets as u64) {
            return Ok(b);
        }
    }
    let up = smallest_base(n_sets, k)?;
    Err(Error::invalid(format!(
        "N={n_sets} is not a perfect k-th power for k={k}; round N up to {}",
        up.1
    )))
}

/// Smallest `b >= 2` with `b^k >= n_sets`, and the padded count `b^k`.
fn smallest_base(n_sets: usize, k: u32) -> Result<(u64, usize)> {
    if n_sets == 0 || k == 0 {
        return Err(Error::invalid(format!(
            "need at least one set and k >= 1 (got N={n_sets}, k={k})"
        )));
    }
    let mut b = ((n_sets as f64).powf(1.0 / k as f64).floor() as u64)
        .saturating_sub(1)
        .max(2);
    loop {
        match b.checked_pow(k) {
            Some(p) if p as usize >= n_sets => {
                if p as usize > GADGET_VERTEX_GUARD {
                    return Err(Error::Capacity(format!(
                        "padded set count {p} exceeds guard {GADGET_VERTEX_GUARD}"
                    )));
                }
                return Ok((b, p as usize));
            }
            Some(_) => b += 1,
            None => {
                return Err(Error::Capacity(format!(
                    "base {b}^{k} overflows while padding N={n_sets}"
                )))
            }
        }
    }
}

fn butterfly_vertex(layer: u32, index: u64, n: usize) -> Vertex {
    (layer as u64 * n as u64 + index) as Vertex
}

/// The `k+1`-layer infrastructure graph on `N = b^k` vertices per layer.
/// Requires `N^(1/k)` to be an integer `b >= 2`.
pub fn gen_butterfly(n_sets: usize, k: u32) -> Result<GadgetGraph> {
    let b = exact_base(n_sets, k)?;
    let n_total = (k as usize + 1) * n_sets;
    if n_total > GADGET_VERTEX_GUARD {
        return Err(Error::Capacity(format!(
            "butterfly would have {n_total} vertices"
        )));
    }
    let mut edges = Vec::with_capacity(k as usize * n_sets * b as usize);
    for t in 1..=k {
        for a in 0..n_sets as u64 {
            for d in 0..b {
                let c = digit_replace(a, t, b, d);
                edges.push((
                    butterfly_vertex(t - 1, a, n_sets),
                    butterfly_vertex(t, c, n_sets),
                ));
            }
        }
    }
    let graph = Graph::from_edges(n_total, &edges)?;
    let layer_of = (0..n_total).map(|v| (v / n_sets) as u32).collect();
    Ok(GadgetGraph {
        graph,
        kind: GadgetKind::Butterfly,
        k,
        b,
        t: 1,
        left_rep: (0..n_sets as Vertex).collect(),
        right_rep: (0..n_sets).map(|j| butterfly_vertex(k, j as u64, n_sets)).collect(),
        layer_of,
        padded_sets: n_sets,
    })
}

/// The butterfly minus every boundary edge whose rep's set does not
/// contain `x`: `d(v_i, u_j) = k` iff `x ∈ S_i ∩ S_j`, otherwise the reps
/// are disconnected.
pub fn gen_gx(inst: &SetIntersectionInstance, k: u32, x: u32) -> Result<GadgetGraph> {
    if x as usize >= inst.universe() {
        return Err(Error::invalid(format!(
            "element {x} outside universe [0, {})",
            inst.universe()
        )));
    }
    let (b, n_pad) = smallest_base(inst.n_sets(), k)?;
    let n_total = (k as usize + 1) * n_pad;
    let keeps = |i: u64| inst.contains(i as usize, x);
    let mut edges = Vec::new();
    for t in 1..=k {
        for a in 0..n_pad as u64 {
            for d in 0..b {
                let c = digit_replace(a, t, b, d);
                // Drop edges touching first/last-layer reps of sets without x.
                if t == 1 && !keeps(a) {
                    continue;
                }
                if t == k && !keeps(c) {
                    continue;
                }
                edges.push((
                    butterfly_vertex(t - 1, a, n_pad),
                    butterfly_vertex(t, c, n_pad),
                ));
            }
        }
    }
    let graph = Graph::from_edges(n_total, &edges)?;
    let layer_of = (0..n_total).map(|v| (v / n_pad) as u32).collect();
    Ok(GadgetGraph {
        graph,
        kind: GadgetKind::Gx,
        k,
        b,
        t: 1,
        left_rep: (0..inst.n_sets() as Vertex).collect(),
        right_rep: (0..inst.n_sets())
            .map(|j| butterfly_vertex(k, j as u64, n_pad))
            .collect(),
        layer_of,
        padded_sets: n_pad,
    })
}

struct MergedLayout {
    b: u64,
    n_pad: usize,
    x_count: usize,
    k: u32,
    n_total: usize,
}

impl MergedLayout {
    fn inner(&self, layer: u32, x: usize, j: u64) -> Vertex {
        debug_assert!(layer >= 1 && layer < self.k);
        (self.n_pad as u64
            + ((layer as u64 - 1) * self.x_count as u64 + x as u64) * self.n_pad as u64
            + j) as Vertex
    }

    fn right(&self, j: u64) -> Vertex {
        (self.n_pad as u64 + (self.k as u64 - 1) * self.x_count as u64 * self.n_pad as u64 + j)
            as Vertex
    }
}

fn merged_layout(inst: &SetIntersectionInstance, k: u32) -> Result<MergedLayout> {
    let (b, n_pad) = smallest_base(inst.n_sets(), k)?;
    let x_count = inst.universe();
    let n_total = 2 * n_pad + (k as usize).saturating_sub(1) * x_count * n_pad;
    if n_total > GADGET_VERTEX_GUARD {
        return Err(Error::Capacity(format!(
            "merged gadget would have {n_total} vertices"
        )));
    }
    Ok(MergedLayout {
        b,
        n_pad,
        x_count,
        k,
        n_total,
    })
}

enum MergedEdge {
    /// Between the first layer and an inner copy (or the last layer if k=1).
    BoundaryFirst(Vertex, Vertex),
    /// Between an inner copy and the last layer.
    BoundaryLast(Vertex, Vertex),
    Inner(Vertex, Vertex),
}

fn merged_edges(inst: &SetIntersectionInstance, lay: &MergedLayout) -> Vec<MergedEdge> {
    let MergedLayout {
        b, n_pad, x_count, k, ..
    } = *lay;
    let mut members_of: Vec<Vec<u64>> = vec![Vec::new(); x_count];
    for i in 0..inst.n_sets() {
        for &x in inst.set(i) {
            members_of[x as usize].push(i as u64);
        }
    }
    let mut edges = Vec::new();
    if k == 1 {
        // No inner layers: v_i -- u_j directly whenever some x lies in both.
        let mut set = BTreeSet::new();
        for members in &members_of {
            for &i in members {
                for d in 0..b {
                    let j = digit_replace(i, 1, b, d);
                    if members.binary_search(&j).is_ok() {
                        set.insert((i.min(j), i.max(j)));
                    }
                }
            }
        }
        for (i, j) in set {
            edges.push(MergedEdge::BoundaryFirst(
                i as Vertex,
                lay.right(j),
            ));
        }
        return edges;
    }
    for (x, members) in members_of.iter().enumerate() {
        for &i in members {
            for d in 0..b {
                let j = digit_replace(i, 1, b, d);
                edges.push(MergedEdge::BoundaryFirst(i as Vertex, lay.inner(1, x, j)));
            }
        }
        for l in 1..k - 1 {
            for j in 0..n_pad as u64 {
                for d in 0..b {
                    let j2 = digit_replace(j, l + 1, b, d);
                    edges.push(MergedEdge::Inner(
                        lay.inner(l, x, j),
                        lay.inner(l + 1, x, j2),
                    ));
                }
            }
        }
        for &m in members {
            for d in 0..b {
                let j = digit_replace(m, k, b, d);
                edges.push(MergedEdge::BoundaryLast(lay.inner(k - 1, x, j), lay.right(m)));
            }
        }
    }
    edges
}

fn merged_layer_of(lay: &MergedLayout) -> Vec<u32> {
    let mut layer_of = vec![0u32; lay.n_total];
    for l in 1..lay.k {
        for x in 0..lay.x_count {
            for j in 0..lay.n_pad as u64 {
                layer_of[lay.inner(l, x, j) as usize] = l;
            }
        }
    }
    for j in 0..lay.n_pad as u64 {
        layer_of[lay.right(j) as usize] = lay.k;
    }
    layer_of
}

/// Union of all per-element gadgets with the boundary layers merged:
/// `d(v_i, u_j) = k` iff `S_i ∩ S_j ≠ ∅`, otherwise `d >= k + 2` (every
/// boundary-to-boundary path length has the parity of `k`).
pub fn gen_merged(inst: &SetIntersectionInstance, k: u32) -> Result<GadgetGraph> {
    let lay = merged_layout(inst, k)?;
    let raw = merged_edges(inst, &lay);
    let edges: Vec<(Vertex, Vertex)> = raw
        .iter()
        .map(|e| match *e {
            MergedEdge::BoundaryFirst(u, v)
            | MergedEdge::BoundaryLast(u, v)
            | MergedEdge::Inner(u, v) => (u, v),
        })
        .collect();
    let graph = Graph::from_edges(lay.n_total, &edges)?;
    let layer_of = merged_layer_of(&lay);
    Ok(GadgetGraph {
        graph,
        kind: GadgetKind::Merged,
        k,
        b: lay.b,
        t: 1,
        left_rep: (0..inst.n_sets() as Vertex).collect(),
        right_rep: (0..inst.n_sets()).map(|j| lay.right(j as u64)).collect(),
        layer_of,
        padded_sets: lay.n_pad,
    })
}

/// Merged gadget with every boundary edge split into a path of
/// `t = ceil((k+c) / (2*eps))` edges. Intersecting reps land at distance
/// `2t + k - 2`, non-intersecting ones at `>= 4t + k - 2`, which is what a
/// `(2-eps, c)`-stretch estimate cannot blur.
pub fn gen_split(inst: &SetIntersectionInstance, k: u32, eps: f64, c: f64) -> Result<GadgetGraph> {
    if k < 2 {
        return Err(Error::invalid(format!(
            "edge splitting needs k >= 2 (got {k}); the boundary groups coincide otherwise"
        )));
    }
    if !(eps > 0.0) || !(c > 0.0) {
        return Err(Error::invalid(format!(
            "need eps > 0 and c > 0 (got eps={eps}, c={c})"
        )));
    }
    let t_f = ((k as f64 + c) / (2.0 * eps)).ceil();
    if !(t_f >= 1.0) || t_f > 1_000_000.0 {
        return Err(Error::Capacity(format!("split factor t={t_f} out of range")));
    }
    let t = t_f as u32;
    let lay = merged_layout(inst, k)?;
    let raw = merged_edges(inst, &lay);
    let boundary_count = raw
        .iter()
        .filter(|e| !matches!(e, MergedEdge::Inner(..)))
        .count();
    let n_total = lay.n_total + (t as usize - 1) * boundary_count;
    if n_total > GADGET_VERTEX_GUARD {
        return Err(Error::Capacity(format!(
            "split gadget would have {n_total} vertices"
        )));
    }

    let mut layer_of = merged_layer_of(&lay);
    // Refined layers: inner layer l sits at t + (l - 1); the far boundary
    // sits at 2t + k - 2.
    for slot in layer_of.iter_mut() {
        if *slot == lay.k {
            *slot = 2 * t + k - 2;
        } else if *slot >= 1 {
            *slot = t + (*slot - 1);
        }
    }
    layer_of.resize(n_total, 0);

    let mut edges = Vec::new();
    let mut fresh = lay.n_total as u64;
    let mut split_into = |u: Vertex,
                          v: Vertex,
                          edges: &mut Vec<(Vertex, Vertex)>,
                          layer_of: &mut Vec<u32>,
                          from_first: bool| {
        let mut prev = u;
        for step in 1..t {
            let z = fresh as Vertex;
            fresh += 1;
            layer_of[z as usize] = if from_first {
                step
            } else {
                2 * t + k - 2 - step
            };
            edges.push((prev, z));
            prev = z;
        }
        edges.push((prev, v));
    };
    for e in &raw {
        match *e {
            MergedEdge::Inner(u, v) => edges.push((u, v)),
            // Orient the path from the boundary vertex outward.
            MergedEdge::BoundaryFirst(u, v) => split_into(u, v, &mut edges, &mut layer_of, true),
            MergedEdge::BoundaryLast(inner, boundary) => {
                split_into(boundary, inner, &mut edges, &mut layer_of, false)
            }
        }
    }
    debug_assert_eq!(fresh as usize, n_total);
    let graph = Graph::from_edges(n_total, &edges)?;
    Ok(GadgetGraph {
        graph,
        kind: GadgetKind::Split,
        k,
        b: lay.b,
        t,
        left_rep: (0..inst.n_sets() as Vertex).collect(),
        right_rep: (0..inst.n_sets()).map(|j| lay.right(j as u64)).collect(),
        layer_of,
        padded_sets: lay.n_pad,
    })
}

/// Random simple graph with maximum degree `delta_max` and approximately
/// `target_m` edges, reproducible from `seed`.
pub fn gen_random_bounded_degree(
    n: usize,
    delta_max: usize,
    target_m: usize,
    seed: u64,
) -> Result<Graph> {
    if delta_max < 1 {
        return Err(Error::invalid("delta_max must be >= 1"));
    }
    if target_m > n * delta_max / 2 {
        return Err(Error::invalid(format!(
            "target_m={target_m} infeasible for n={n}, delta_max={delta_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    let mut edges = Vec::with_capacity(target_m);
    let mut attempts = 0usize;
    let budget = 30 * target_m + 1000;
    while edges.len() < target_m && attempts < budget {
        attempts += 1;
        let u = rng.gen_range(0..n) as Vertex;
        let v = rng.gen_range(0..n) as Vertex;
        if u == v
            || adjacency[u as usize].len() >= delta_max
            || adjacency[v as usize].len() >= delta_max
            || adjacency[u as usize].contains(&v)
        {
            continue;
        }
        adjacency[u as usize].insert(v);
        adjacency[v as usize].insert(u);
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// Random connected graph: a random bounded-degree spanning tree plus extra
/// random edges up to roughly `target_m`. Needs `delta_max >= 2`.
pub fn gen_random_connected(
    n: usize,
    delta_max: usize,
    target_m: usize,
    seed: u64,
) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("connected graph needs n >= 1"));
    }
    if delta_max < 2 && n > 2 {
        return Err(Error::invalid("connected generator needs delta_max >= 2"));
    }
    if target_m + 1 < n || target_m > n * delta_max / 2 {
        return Err(Error::invalid(format!(
            "target_m={target_m} infeasible for connected n={n}, delta_max={delta_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjacency: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); n];
    let mut edges = Vec::with_capacity(target_m);
    for v in 1..n {
        // A parent with spare degree always exists: a tree on v vertices has
        // total degree 2(v-1) < v * delta_max.
        let parent = loop {
            let cand = rng.gen_range(0..v);
            if adjacency[cand].len() < delta_max {
                break cand;
            }
        };
        adjacency[parent].insert(v as Vertex);
        adjacency[v].insert(parent as Vertex);
        edges.push((parent as Vertex, v as Vertex));
    }
    let mut attempts = 0usize;
    let budget = 30 * target_m + 1000;
    while edges.len() < target_m && attempts < budget {
        attempts += 1;
        let u = rng.gen_range(0..n) as Vertex;
        let v = rng.gen_range(0..n) as Vertex;
        if u == v
            || adjacency[u as usize].len() >= delta_max
            || adjacency[v as usize].len() >= delta_max
            || adjacency[u as usize].contains(&v)
        {
            continue;
        }
        adjacency[u as usize].insert(v);
        adjacency[v as usize].insert(u);
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges)
}

/// Independent Bernoulli(density) membership per (set, element) pair.
pub fn gen_random_instance(
    n_sets: usize,
    universe: usize,
    density: f64,
    seed: u64,
) -> Result<SetIntersectionInstance> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::invalid(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = (0..n_sets)
        .map(|_| {
            (0..universe as u32)
                .filter(|_| rng.gen::<f64>() < density)
                .collect()
        })
        .collect();
    SetIntersectionInstance::new(universe, sets)
}

/// Parses the instance format: first line `N X`, then exactly `N` lines of
/// space-separated elements (an empty line is an empty set).
pub fn parse_instance<R: BufRead>(reader: R) -> Result<SetIntersectionInstance> {
    let mut lines = reader.lines().enumerate();
    let (n_sets, universe) = loop {
        let (idx, line) = lines
            .next()
            .ok_or(Error::Parse {
                line: 0,
                msg: "empty instance file".into(),
            })
            .and_then(|(i, l)| Ok((i, l?)))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let n: usize = fields
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(Error::Parse {
                line: idx + 1,
                msg: "bad set count".into(),
            })?;
        let x: usize = fields
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(Error::Parse {
                line: idx + 1,
                msg: "bad universe size".into(),
            })?;
        break (n, x);
    };
    let mut sets = Vec::with_capacity(n_sets);
    for _ in 0..n_sets {
        let (idx, line) = lines
            .next()
            .ok_or(Error::Parse {
                line: 0,
                msg: format!("expected {n_sets} set lines, file ended early"),
            })
            .and_then(|(i, l)| Ok((i, l?)))?;
        let mut elems = Vec::new();
        for tok in line.split_whitespace() {
            let e: u32 = tok.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad element `{tok}`"),
            })?;
            elems.push(e);
        }
        sets.push(elems);
    }
    SetIntersectionInstance::new(universe, sets)
}

pub fn write_instance<W: Write>(inst: &SetIntersectionInstance, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", inst.n_sets(), inst.universe())?;
    for i in 0..inst.n_sets() {
        let line: Vec<String> = inst.set(i).iter().map(|e| e.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Sidecar rep map: one `i v_id u_id` line per set.
pub fn write_rep_map<W: Write>(gadget: &GadgetGraph, mut w: W) -> Result<()> {
    for i in 0..gadget.n_sets() {
        writeln!(w, "{} {} {}", i, gadget.left_rep[i], gadget.right_rep[i])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_full, max_degree, Dist};

    fn demo_instance() -> SetIntersectionInstance {
        SetIntersectionInstance::new(2, vec![vec![0], vec![0, 1], vec![1], vec![]]).unwrap()
    }

    #[test]
    fn digit_label_bijective() {
        for idx in 0..16u64 {
            let label = DigitLabel::from_index(idx, 4, 2);
            assert_eq!(label.to_index(4), idx);
            assert!(label.digits.iter().all(|&d| d < 4));
        }
    }

    #[test]
    fn butterfly_16_2_shape() {
        let g = gen_butterfly(16, 2).unwrap();
        assert_eq!(g.b, 4);
        assert_eq!(g.graph.n(), 48);
        assert_eq!(g.graph.m(), 2 * 16 * 4);
        for v in g.graph.vertices() {
            let deg = g.graph.degree(v);
            if g.layer_of[v as usize] == 0 || g.layer_of[v as usize] == 2 {
                assert_eq!(deg, 4);
            } else {
                assert_eq!(deg, 8);
            }
        }
    }

    #[test]
    fn butterfly_all_pairs_at_distance_k() {
        for (n, k) in [(16usize, 2u32), (8, 3)] {
            let g = gen_butterfly(n, k).unwrap();
            for i in 0..n {
                let row = bfs_full(&g.graph, g.left_rep[i]).unwrap();
                for j in 0..n {
                    assert_eq!(
                        row.dist[g.right_rep[j] as usize],
                        Dist::hops(k),
                        "N={n} k={k} i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn butterfly_rejects_non_power() {
        let err = gen_butterfly(12, 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("round N up"), "{msg}");
    }

    #[test]
    fn gx_isolation() {
        let inst =
            SetIntersectionInstance::new(3, vec![vec![0], vec![0], vec![], vec![2]]).unwrap();
        // x = 1 lies in no set: both boundary layers fully isolated.
        let g = gen_gx(&inst, 2, 1).unwrap();
        for i in 0..4 {
            assert_eq!(g.graph.degree(g.left_rep[i]), 0);
            assert_eq!(g.graph.degree(g.right_rep[i]), 0);
        }
        // x = 0 in S_0, S_1 only.
        let g = gen_gx(&inst, 2, 0).unwrap();
        let row = bfs_full(&g.graph, g.left_rep[0]).unwrap();
        assert_eq!(row.dist[g.right_rep[1] as usize], Dist::hops(2));
        assert_eq!(row.dist[g.right_rep[2] as usize], Dist::UNREACHABLE);
        assert_eq!(g.graph.degree(g.left_rep[2]), 0);
    }

    #[test]
    fn gx_with_full_membership_is_butterfly() {
        let inst = SetIntersectionInstance::new(
            1,
            (0..16).map(|_| vec![0]).collect(),
        )
        .unwrap();
        let gx = gen_gx(&inst, 2, 0).unwrap();
        let butterfly = gen_butterfly(16, 2).unwrap();
        assert_eq!(gx.graph, butterfly.graph);
    }

    #[test]
    fn merged_handcrafted_example() {
        let g = gen_merged(&demo_instance(), 2).unwrap();
        assert_eq!(g.b, 2);
        assert_eq!(g.padded_sets, 4);
        assert_eq!(g.graph.n(), 2 * 4 + 2 * 4);
        let row = bfs_full(&g.graph, g.left_rep[0]).unwrap();
        assert_eq!(row.dist[g.right_rep[1] as usize], Dist::hops(2));
        let d02 = row.dist[g.right_rep[2] as usize];
        assert!(d02 == Dist::UNREACHABLE || d02 >= Dist::hops(4), "{d02}");
        assert_eq!(g.graph.degree(g.left_rep[3]), 0);
        assert_eq!(g.graph.degree(g.right_rep[3]), 0);
    }

    #[test]
    fn merged_reduction_and_parity() {
        let inst = gen_random_instance(16, 8, 0.3, 21).unwrap();
        for k in [2u32, 3] {
            let g = gen_merged(&inst, k).unwrap();
            for i in 0..16 {
                let row = bfs_full(&g.graph, g.left_rep[i]).unwrap();
                for j in 0..16 {
                    let d = row.dist[g.right_rep[j] as usize];
                    if inst.intersects(i, j) {
                        assert_eq!(d, Dist::hops(k), "k={k} i={i} j={j}");
                    } else {
                        assert!(d >= Dist::hops(k + 2), "k={k} i={i} j={j} d={d}");
                    }
                    if let Some(fin) = d.get() {
                        assert_eq!(fin % 2, k % 2, "layer parity k={k} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn merged_edge_counts_match_construction() {
        let inst = gen_random_instance(9, 4, 0.4, 5).unwrap();
        let k = 3u32;
        let g = gen_merged(&inst, k).unwrap();
        let b = g.b as usize;
        let n_pad = g.padded_sets;
        let per_x_members: Vec<usize> = (0..4)
            .map(|x| (0..9).filter(|&i| inst.contains(i, x)).count())
            .collect();
        let boundary: usize = per_x_members.iter().map(|c| c * b * 2).sum();
        let inner = 4 * (k as usize - 2) * n_pad * b;
        assert_eq!(g.graph.m(), boundary + inner);
        assert_eq!(g.graph.n(), 2 * n_pad + (k as usize - 1) * 4 * n_pad);
        // Boundary degree stays within |X| * b.
        for i in 0..9 {
            assert!(g.graph.degree(g.left_rep[i]) <= 4 * b);
        }
    }

    #[test]
    fn merged_empty_instance_is_isolated() {
        let inst = SetIntersectionInstance::new(3, vec![vec![], vec![], vec![], vec![]]).unwrap();
        let g = gen_merged(&inst, 2).unwrap();
        for i in 0..4 {
            assert_eq!(g.graph.degree(g.left_rep[i]), 0);
            assert_eq!(g.graph.degree(g.right_rep[i]), 0);
        }
    }

    #[test]
    fn split_handcrafted_geometry() {
        let g = gen_split(&demo_instance(), 2, 0.5, 1.0).unwrap();
        assert_eq!(g.t, 3);
        assert_eq!(g.intersect_distance(), 6);
        assert_eq!(g.disjoint_distance_floor(), 12);
        let row = bfs_full(&g.graph, g.left_rep[0]).unwrap();
        assert_eq!(row.dist[g.right_rep[1] as usize], Dist::hops(6));
        // S_0 and S_2 are disjoint but connected through S_1's reps.
        assert_eq!(row.dist[g.right_rep[2] as usize], Dist::hops(12));
    }

    #[test]
    fn split_degenerate_t1_matches_merged() {
        // eps large enough that t = ceil((k+c)/(2 eps)) = 1.
        let inst = demo_instance();
        let split = gen_split(&inst, 2, 2.0, 1.0).unwrap();
        assert_eq!(split.t, 1);
        let merged = gen_merged(&inst, 2).unwrap();
        assert_eq!(split.graph, merged.graph);
    }

    #[test]
    fn split_layers_are_consecutive() {
        let g = gen_split(&demo_instance(), 3, 0.5, 1.0).unwrap();
        for (u, v) in g.graph.edges() {
            let (a, b) = (g.layer_of[u as usize], g.layer_of[v as usize]);
            assert_eq!(a.abs_diff(b), 1, "edge ({u},{v}) layers {a},{b}");
        }
        // Interior split vertices have degree exactly 2.
        let merged_n = 2 * g.padded_sets + (g.k as usize - 1) * 2 * g.padded_sets;
        for v in merged_n..g.graph.n() {
            assert_eq!(g.graph.degree(v as Vertex), 2);
        }
    }

    #[test]
    fn split_rejects_bad_params() {
        let inst = demo_instance();
        assert!(gen_split(&inst, 1, 0.5, 1.0).is_err());
        assert!(gen_split(&inst, 2, 0.0, 1.0).is_err());
        assert!(gen_split(&inst, 2, 0.5, 0.0).is_err());
    }

    #[test]
    fn random_graph_respects_bounds() {
        let g = gen_random_bounded_degree(1000, 5, 1800, 4).unwrap();
        assert!(max_degree(&g) <= 5);
        assert!(g.m() <= 1800);
        assert!(g.m() > 1500, "rejection sampling fell far short: {}", g.m());
        let again = gen_random_bounded_degree(1000, 5, 1800, 4).unwrap();
        assert_eq!(g, again);
        assert!(gen_random_bounded_degree(10, 2, 11, 1).is_err());
    }

    #[test]
    fn random_degree_two_is_paths_and_cycles() {
        let g = gen_random_bounded_degree(10, 2, 10, 8).unwrap();
        assert!(max_degree(&g) <= 2);
    }

    #[test]
    fn connected_generator_connects() {
        let g = gen_random_connected(300, 4, 450, 17).unwrap();
        assert!(crate::graph::is_connected(&g));
        assert!(max_degree(&g) <= 4);
        let again = gen_random_connected(300, 4, 450, 17).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn instance_generation_and_io() {
        let empty = gen_random_instance(4, 6, 0.0, 1).unwrap();
        assert!((0..4).all(|i| empty.set(i).is_empty()));
        let full = gen_random_instance(4, 6, 1.0, 1).unwrap();
        assert!((0..4).all(|i| full.set(i).len() == 6));
        let inst = gen_random_instance(16, 8, 0.3, 77).unwrap();
        assert_eq!(inst, gen_random_instance(16, 8, 0.3, 77).unwrap());
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        let back = parse_instance(&buf[..]).unwrap();
        assert_eq!(inst, back);
        // Empty line round-trips as an empty set.
        let text = "2 4\n\n1 3\n";
        let parsed = parse_instance(text.as_bytes()).unwrap();
        assert!(parsed.set(0).is_empty());
        assert_eq!(parsed.set(1), &[1, 3]);
    }

    #[test]
    fn instance_rejects_out_of_universe() {
        assert!(SetIntersectionInstance::new(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn rep_map_written() {
        let g = gen_butterfly(4, 2).unwrap();
        let mut buf = Vec::new();
        write_rep_map(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, format!("0 {} {}", g.left_rep[0], g.right_rep[0]));
        assert_eq!(text.lines().count(), 4);
    }
}
