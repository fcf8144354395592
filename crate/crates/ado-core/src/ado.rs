//! The approximate distance oracle.
//!
//! Build: pick a hitting set `A` of size ~`n^(2/3+alpha)`, store all `V x A`
//! distances plus, per vertex `v`, the exact distances to every vertex in
//! `C(N(v, cap))` with `cap = c_n * n^(1/3+2*alpha)`. Query: answer exactly
//! from those tables when possible, otherwise route through the better of
//! the two pivots. Every query is a constant number of table lookups.

use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{bfs_full, layered_bfs_capped, max_degree, Dist, Graph, Vertex};
use crate::trunc::rad_trunc;
use crate::tz::{assign_pivots, compute_bunches_clusters, compute_hitting_set};

/// Default bunch/cluster size constant (the classical analysis value).
pub const DEFAULT_C_B: f64 = 4.0;
/// Default neighborhood-cap constant. Matching `c_b` keeps every bunch
/// inside its owner's stored neighborhood, which the additive-1 fallback
/// guarantee relies on.
pub const DEFAULT_C_N: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct AdoParams {
    /// Space/stretch trade-off knob, in `[0, 1/3)`.
    pub alpha: f64,
    /// Neighborhood-cap constant, `>= 1`.
    pub c_n: f64,
    /// Bunch/cluster bound constant, `>= 1`.
    pub c_b: f64,
    pub seed: u64,
}

impl Default for AdoParams {
    fn default() -> Self {
        AdoParams {
            alpha: 0.0,
            c_n: DEFAULT_C_N,
            c_b: DEFAULT_C_B,
            seed: 0,
        }
    }
}

impl AdoParams {
    pub fn new(alpha: f64, seed: u64) -> Self {
        AdoParams {
            alpha,
            seed,
            ..AdoParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0 / 3.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha={} outside [0, 1/3)",
                self.alpha
            )));
        }
        if !(self.c_n >= 1.0) || !(self.c_b >= 1.0) {
            return Err(Error::invalid(format!(
                "constants must be >= 1 (c_n={}, c_b={})",
                self.c_n, self.c_b
            )));
        }
        Ok(())
    }

    /// Hitting-set size target `n^(2/3 + alpha)`, clamped to `[1, n]`.
    pub fn hitting_target(&self, n: usize) -> f64 {
        (n as f64).powf(2.0 / 3.0 + self.alpha).clamp(1.0, n as f64)
    }

    /// Stored-neighborhood size `c_n * n^(1/3 + 2*alpha)`.
    pub fn neighborhood_cap(&self, n: usize) -> f64 {
        self.c_n * (n as f64).powf(1.0 / 3.0 + 2.0 * self.alpha)
    }
}

/// How a query was answered.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PathKind {
    SameVertex,
    /// One endpoint is a center; answered from the `V x A` table.
    ExactA,
    /// The pair is covered by a stored neighborhood table.
    ExactNear,
    ViaPivot,
    UnreachablePair,
}

impl PathKind {
    pub fn is_exact_tag(self) -> bool {
        matches!(self, PathKind::SameVertex | PathKind::ExactA | PathKind::ExactNear)
    }
}

impl std::fmt::Display for PathKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PathKind::SameVertex => "same_vertex",
            PathKind::ExactA => "exact_a",
            PathKind::ExactNear => "exact_near",
            PathKind::ViaPivot => "via_pivot",
            PathKind::UnreachablePair => "unreachable_pair",
        };
        write!(f, "{s}")
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub estimate: Dist,
    pub path_kind: PathKind,
}

#[derive(Copy, Clone, Debug)]
struct PivotEntry {
    /// Nearest center, `u32::MAX` when unreachable.
    pivot: u32,
    /// Row of that center in the `V x A` table, `u32::MAX` when absent.
    a_row: u32,
    /// Raw distance to the pivot, `u32::MAX` when unreachable.
    dist: u32,
}

/// The guarantee the build can certify: `est <= max(d, 2d + 1 - rad_value)`,
/// with `rad_value = rad(c_r * n^(3*alpha))` when a nonnegative `c_r`
/// satisfies `(c_b n^(1/3-a) + 1)(c_r n^(3a) + 2) <= c_n n^(1/3+2a)`, and
/// the additive-1 fallback otherwise.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct StretchBound {
    pub mult: f64,
    pub add: f64,
    pub c_r: Option<f64>,
    /// `c_r * n^(3*alpha)` (0 when `c_r` is absent).
    pub rad_arg: f64,
    /// `rad(rad_arg)` measured on the build graph (0 when `c_r` is absent).
    pub rad_value: u32,
}

/// Inverts the constant chain to find the largest usable `c_r`, then
/// measures the truncated radius it buys on this graph.
pub fn derive_stretch_bound(g: &Graph, params: &AdoParams) -> Result<StretchBound> {
    params.validate()?;
    let n = g.n();
    if n == 0 {
        return Err(Error::invalid("empty graph"));
    }
    let nf = n as f64;
    let cap = params.neighborhood_cap(n);
    let denom = params.c_b * nf.powf(1.0 / 3.0 - params.alpha) + 1.0;
    let scale = nf.powf(3.0 * params.alpha);
    let c_r = (cap / denom - 2.0) / scale;
    let rad_arg = c_r * scale;
    if c_r > 0.0 && rad_arg >= 1.0 {
        let rad_value = rad_trunc(g, rad_arg)?;
        Ok(StretchBound {
            mult: 2.0,
            add: 1.0 - rad_value as f64,
            c_r: Some(c_r),
            rad_arg,
            rad_value,
        })
    } else {
        Ok(StretchBound {
            mult: 2.0,
            add: 1.0,
            c_r: None,
            rad_arg: 0.0,
            rad_value: 0,
        })
    }
}

/// The queryable oracle. Immutable once built; safe to query concurrently.
#[derive(Debug)]
pub struct AdoStructure {
    params: AdoParams,
    n: usize,
    a_set: Vec<Vertex>,
    pivots: Vec<PivotEntry>,
    /// `a_len x n` row-major raw distances.
    a_distances: Vec<u32>,
    /// Per-vertex exact distances to `C(N(v, cap))`.
    near: Vec<HashMap<Vertex, u32>>,
    stored_entry_count: u64,
    certified: StretchBound,
}

pub fn build_ado(g: &Graph, params: &AdoParams) -> Result<AdoStructure> {
    params.validate()?;
    if g.n() == 0 {
        return Err(Error::invalid("cannot build an oracle over an empty graph"));
    }
    let target = params.hitting_target(g.n());
    let a_set = compute_hitting_set(g, target, params.c_b, params.seed)?;
    build_with_centers(g, params, a_set)
}

/// Degree-based parameterization for graphs with max degree at most
/// `c * n^(1/k - eps)`: alpha = (1 - k*eps)/3, and the neighborhood cap is
/// sized so that the certified additive improvement is
/// `rad(2 c^k n^(1-k*eps)) >= k` on conforming graphs.
pub fn build_for_degree(g: &Graph, k: u32, eps: f64, c: f64, seed: u64) -> Result<AdoStructure> {
    if k < 1 {
        return Err(Error::invalid("k must be a positive integer"));
    }
    if !(eps > 0.0 && eps <= 1.0 / k as f64) {
        return Err(Error::invalid(format!(
            "eps={eps} outside (0, 1/{k}]"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c={c} must be positive")));
    }
    let n = g.n();
    if n == 0 {
        return Err(Error::invalid("cannot build an oracle over an empty graph"));
    }
    let nf = n as f64;
    let degree_cap = c * nf.powf(1.0 / k as f64 - eps);
    let delta = max_degree(g);
    if delta as f64 > degree_cap {
        log::warn!(
            "max degree {delta} exceeds c*n^(1/k-eps) = {degree_cap:.2}; the (2, 1-{k}) stretch guarantee lapses"
        );
    }
    let alpha = (1.0 - k as f64 * eps) / 3.0;
    let c_fp = 2.0 * c.powi(k as i32);
    // Size the cap for the full constant chain so that inverting it yields
    // c_r = c_fp, i.e. the certified additive term is rad(2 c^k n^(1-k*eps)).
    let c_b = DEFAULT_C_B;
    let chain = (c_b * nf.powf(1.0 / 3.0 - alpha) + 1.0) * (c_fp * nf.powf(3.0 * alpha) + 2.0);
    let c_n = (chain / nf.powf(1.0 / 3.0 + 2.0 * alpha)).max(1.0);
    let params = AdoParams {
        alpha,
        c_n,
        c_b,
        seed,
    };
    build_ado(g, &params)
}

fn build_with_centers(g: &Graph, params: &AdoParams, a_set: Vec<Vertex>) -> Result<AdoStructure> {
    let n = g.n();
    let pa = assign_pivots(g, &a_set)?;
    let idx = compute_bunches_clusters(g, &pa);
    let cap = params.neighborhood_cap(n).floor() as usize;

    let near: Vec<HashMap<Vertex, u32>> = (0..n as Vertex)
        .into_par_iter()
        .map(|v| {
            let (order, depth) = layered_bfs_capped(g, v, usize::MAX);
            let mut dist = vec![u32::MAX; n];
            dist[v as usize] = 0;
            for (w, d) in order.iter().zip(depth.iter()) {
                dist[*w as usize] = *d;
            }
            let prefix = cap.min(order.len());
            let mut table = HashMap::new();
            for &w in &order[..prefix] {
                for &(y, _) in &idx.cluster[w as usize] {
                    debug_assert_ne!(dist[y as usize], u32::MAX);
                    table.entry(y).or_insert(dist[y as usize]);
                }
            }
            table
        })
        .collect();

    let a_distances: Vec<u32> = {
        let mut flat = vec![u32::MAX; a_set.len() * n];
        flat.par_chunks_mut(n.max(1))
            .zip(a_set.par_iter())
            .for_each(|(row, &a)| {
                let r = bfs_full(g, a).expect("center in range");
                for (slot, d) in row.iter_mut().zip(r.dist.iter()) {
                    *slot = d.raw();
                }
            });
        flat
    };

    let a_row_of: HashMap<Vertex, u32> = a_set
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i as u32))
        .collect();
    let pivots: Vec<PivotEntry> = (0..n)
        .map(|v| match pa.pivot[v] {
            Some(p) => PivotEntry {
                pivot: p,
                a_row: a_row_of[&p],
                dist: pa.pivot_dist[v].raw(),
            },
            None => PivotEntry {
                pivot: u32::MAX,
                a_row: u32::MAX,
                dist: u32::MAX,
            },
        })
        .collect();

    let near_total: u64 = near.iter().map(|t| t.len() as u64).sum();
    let stored_entry_count = a_set.len() as u64 * n as u64 + near_total;
    let certified = derive_stretch_bound(g, params)?;

    Ok(AdoStructure {
        params: *params,
        n,
        a_set,
        pivots,
        a_distances,
        near,
        stored_entry_count,
        certified,
    })
}

impl AdoStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &AdoParams {
        &self.params
    }

    pub fn a_set(&self) -> &[Vertex] {
        &self.a_set
    }

    pub fn stored_entry_count(&self) -> u64 {
        self.stored_entry_count
    }

    pub fn near_len(&self, v: Vertex) -> usize {
        self.near[v as usize].len()
    }

    pub fn certified_bound(&self) -> &StretchBound {
        &self.certified
    }

    /// The `(mult, add)` stretch this build certifies.
    pub fn declared_stretch(&self) -> (f64, f64) {
        (self.certified.mult, self.certified.add)
    }

    fn a_dist(&self, row: u32, v: Vertex) -> Dist {
        Dist::from_raw(self.a_distances[row as usize * self.n + v as usize])
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "vertex {v} out of range for n={}",
                self.n
            )))
        }
    }

    pub fn query(&self, u: Vertex, v: Vertex) -> Result<QueryResult> {
        Ok(self.query_counted(u, v)?.0)
    }

    /// Query plus the number of table lookups it performed (instrumentation
    /// for the constant-time contract; at most 6 on any input).
    pub fn query_counted(&self, u: Vertex, v: Vertex) -> Result<(QueryResult, u32)> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok((
                QueryResult {
                    estimate: Dist::ZERO,
                    path_kind: PathKind::SameVertex,
                },
                0,
            ));
        }
        let mut lookups = 0u32;
        let finish = |estimate: Dist, kind: PathKind, lookups: u32| {
            let path_kind = if estimate.is_reachable() {
                kind
            } else {
                PathKind::UnreachablePair
            };
            Ok((
                QueryResult {
                    estimate,
                    path_kind,
                },
                lookups,
            ))
        };

        lookups += 1;
        let pu = self.pivots[u as usize];
        if pu.dist == 0 {
            lookups += 1;
            return finish(self.a_dist(pu.a_row, v), PathKind::ExactA, lookups);
        }
        lookups += 1;
        let pv = self.pivots[v as usize];
        if pv.dist == 0 {
            lookups += 1;
            return finish(self.a_dist(pv.a_row, u), PathKind::ExactA, lookups);
        }
        lookups += 1;
        if let Some(&d) = self.near[u as usize].get(&v) {
            return finish(Dist::from_raw(d), PathKind::ExactNear, lookups);
        }
        lookups += 1;
        if let Some(&d) = self.near[v as usize].get(&u) {
            return finish(Dist::from_raw(d), PathKind::ExactNear, lookups);
        }
        let mut best = Dist::UNREACHABLE;
        if pu.dist != u32::MAX {
            lookups += 1;
            let route = Dist::from_raw(pu.dist).plus(self.a_dist(pu.a_row, v));
            best = best.min(route);
        }
        if pv.dist != u32::MAX {
            lookups += 1;
            let route = Dist::from_raw(pv.dist).plus(self.a_dist(pv.a_row, u));
            best = best.min(route);
        }
        finish(best, PathKind::ViaPivot, lookups)
    }

    pub fn space_report(&self) -> SpaceReport {
        let n = self.n;
        let near_total: u64 = self.near.iter().map(|t| t.len() as u64).sum();
        let near_max = self.near.iter().map(|t| t.len()).max().unwrap_or(0);
        let near_mean = near_total as f64 / n.max(1) as f64;
        let nf = n as f64;
        let analytic_bound = self.a_set.len() as f64 * nf
            + nf * (self.params.c_b * nf.powf(1.0 / 3.0 - self.params.alpha))
                * self.params.neighborhood_cap(n);
        SpaceReport {
            n,
            a_size: self.a_set.len(),
            near_total,
            near_max,
            near_mean,
            stored_entry_count: self.stored_entry_count,
            analytic_bound,
            params: self.params,
            declared_mult: self.certified.mult,
            declared_add: self.certified.add,
        }
    }
}

/// Space accounting for one build.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpaceReport {
    pub n: usize,
    pub a_size: usize,
    pub near_total: u64,
    pub near_max: usize,
    pub near_mean: f64,
    pub stored_entry_count: u64,
    /// `|A| n + n * (c_b n^(1/3-a)) * (c_n n^(1/3+2a))`.
    pub analytic_bound: f64,
    pub params: AdoParams,
    pub declared_mult: f64,
    pub declared_add: f64,
}

impl std::fmt::Display for SpaceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "centers: {}", self.a_size)?;
        writeln!(
            f,
            "near-table entries: {} (max {}, mean {:.1})",
            self.near_total, self.near_max, self.near_mean
        )?;
        writeln!(f, "stored entries: {}", self.stored_entry_count)?;
        writeln!(f, "analytic bound: {:.0}", self.analytic_bound)?;
        writeln!(
            f,
            "params: alpha={} c_n={:.3} c_b={} seed={}",
            self.params.alpha, self.params.c_n, self.params.c_b, self.params.seed
        )?;
        write!(
            f,
            "declared stretch: ({}, {})",
            self.declared_mult, self.declared_add
        )
    }
}

const MAGIC: &[u8; 4] = b"ADO1";

fn write_u64<W: Write>(w: &mut W, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    write_u64(w, v.to_bits())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::Format("oracle data ends early".into())
        } else {
            Error::Io(e)
        }
    })?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

fn read_raw_dist<R: Read>(r: &mut R) -> Result<u32> {
    let v = read_u64(r)?;
    if v == u64::from(u32::MAX) || v <= u64::from(u32::MAX - 1) {
        Ok(v as u32)
    } else {
        Err(Error::Format(format!("distance value {v} out of range")))
    }
}

fn read_vertex<R: Read>(r: &mut R, n: usize) -> Result<Vertex> {
    let v = read_u64(r)?;
    if v < n as u64 {
        Ok(v as Vertex)
    } else {
        Err(Error::Format(format!("vertex id {v} out of range for n={n}")))
    }
}

/// Versioned little-endian binary encoding of an oracle.
pub fn serialize_ado<W: Write>(ado: &AdoStructure, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    write_f64(&mut w, ado.params.alpha)?;
    write_f64(&mut w, ado.params.c_n)?;
    write_f64(&mut w, ado.params.c_b)?;
    write_u64(&mut w, ado.params.seed)?;
    write_f64(&mut w, ado.certified.mult)?;
    write_f64(&mut w, ado.certified.add)?;
    write_u64(&mut w, ado.certified.c_r.is_some() as u64)?;
    write_f64(&mut w, ado.certified.c_r.unwrap_or(0.0))?;
    write_f64(&mut w, ado.certified.rad_arg)?;
    write_u64(&mut w, ado.certified.rad_value as u64)?;
    write_u64(&mut w, ado.n as u64)?;
    write_u64(&mut w, ado.a_set.len() as u64)?;
    for &a in &ado.a_set {
        write_u64(&mut w, a as u64)?;
    }
    for p in &ado.pivots {
        write_u64(&mut w, p.pivot as u64)?;
        write_u64(&mut w, p.a_row as u64)?;
        write_u64(&mut w, p.dist as u64)?;
    }
    for &d in &ado.a_distances {
        write_u64(&mut w, d as u64)?;
    }
    for table in &ado.near {
        write_u64(&mut w, table.len() as u64)?;
        let mut entries: Vec<(Vertex, u32)> = table.iter().map(|(&v, &d)| (v, d)).collect();
        entries.sort_unstable();
        for (v, d) in entries {
            write_u64(&mut w, v as u64)?;
            write_u64(&mut w, d as u64)?;
        }
    }
    write_u64(&mut w, ado.stored_entry_count)?;
    Ok(())
}

pub fn deserialize_ado<R: Read>(mut r: R) -> Result<AdoStructure> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("missing oracle magic header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let alpha = read_f64(&mut r)?;
    let c_n = read_f64(&mut r)?;
    let c_b = read_f64(&mut r)?;
    let seed = read_u64(&mut r)?;
    let mult = read_f64(&mut r)?;
    let add = read_f64(&mut r)?;
    let has_cr = read_u64(&mut r)? != 0;
    let c_r_val = read_f64(&mut r)?;
    let rad_arg = read_f64(&mut r)?;
    let rad_value = read_u64(&mut r)? as u32;
    let n = read_u64(&mut r)? as usize;
    let a_len = read_u64(&mut r)? as usize;
    if n > crate::graph::ALL_PAIRS_ENTRY_GUARD || a_len > n {
        return Err(Error::Format(format!(
            "implausible header (n={n}, |A|={a_len})"
        )));
    }
    let mut a_set = Vec::with_capacity(a_len);
    for _ in 0..a_len {
        a_set.push(read_vertex(&mut r, n)?);
    }
    let mut pivots = Vec::with_capacity(n);
    for _ in 0..n {
        let pivot = read_u64(&mut r)?;
        let a_row = read_u64(&mut r)?;
        let dist = read_u64(&mut r)?;
        let entry = if pivot == u64::from(u32::MAX) {
            PivotEntry {
                pivot: u32::MAX,
                a_row: u32::MAX,
                dist: u32::MAX,
            }
        } else {
            if pivot >= n as u64 || a_row >= a_len as u64 {
                return Err(Error::Format("pivot entry out of range".into()));
            }
            PivotEntry {
                pivot: pivot as u32,
                a_row: a_row as u32,
                dist: dist as u32,
            }
        };
        pivots.push(entry);
    }
    let mut a_distances = Vec::with_capacity(a_len * n);
    for _ in 0..a_len * n {
        a_distances.push(read_raw_dist(&mut r)?);
    }
    let mut near = Vec::with_capacity(n);
    for _ in 0..n {
        let len = read_u64(&mut r)? as usize;
        if len > n {
            return Err(Error::Format(format!("near table of {len} entries > n")));
        }
        let mut table = HashMap::with_capacity(len);
        for _ in 0..len {
            let v = read_vertex(&mut r, n)?;
            let d = read_raw_dist(&mut r)?;
            table.insert(v, d);
        }
        near.push(table);
    }
    let stored_entry_count = read_u64(&mut r)?;
    let near_total: u64 = near.iter().map(|t| t.len() as u64).sum();
    if stored_entry_count != a_len as u64 * n as u64 + near_total {
        return Err(Error::Format(
            "stored entry count does not match table contents".into(),
        ));
    }
    Ok(AdoStructure {
        params: AdoParams {
            alpha,
            c_n,
            c_b,
            seed,
        },
        n,
        a_set,
        pivots,
        a_distances,
        near,
        stored_entry_count,
        certified: StretchBound {
            mult,
            add,
            c_r: has_cr.then_some(c_r_val),
            rad_arg,
            rad_value,
        },
    })
}
