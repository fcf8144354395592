//! Oracle-versus-ground-truth verification.
//!
//! Everything here measures; nothing trusts. Stretch audits compare an
//! estimator against brute-force BFS distances, the distinguisher adapter
//! turns any estimator with a declared stretch into threshold answers, the
//! set-intersection solver runs distance queries over a merged gadget, and
//! the property suite evaluates the structural inequalities behind the
//! oracle's guarantee on sampled tuples.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ado::AdoStructure;
use crate::error::{Error, Result};
use crate::gadget::{gen_merged, SetIntersectionInstance};
use crate::graph::{
    all_pairs_exact, bfs_tree, induced_subgraph, is_connected, max_degree, Dist, DistanceMatrix,
    Graph, Vertex,
};
use crate::trunc::{ball_set, ecc_trunc, rad_trunc, truncated_bfs};

/// Anything that can answer distance queries with a declared stretch.
pub trait DistanceEstimator: Sync {
    fn estimate(&self, u: Vertex, v: Vertex) -> Result<Dist>;

    /// `(mult, add)`: the estimator promises
    /// `d <= estimate <= max(d, mult * d + add)` on finite pairs.
    fn declared_stretch(&self) -> (f64, f64);

    /// Estimate plus a lookup count, for constant-time-contract audits.
    fn estimate_counted(&self, u: Vertex, v: Vertex) -> Result<(Dist, u32)> {
        Ok((self.estimate(u, v)?, 1))
    }
}

impl DistanceEstimator for AdoStructure {
    fn estimate(&self, u: Vertex, v: Vertex) -> Result<Dist> {
        Ok(self.query(u, v)?.estimate)
    }

    fn declared_stretch(&self) -> (f64, f64) {
        AdoStructure::declared_stretch(self)
    }

    fn estimate_counted(&self, u: Vertex, v: Vertex) -> Result<(Dist, u32)> {
        let (res, lookups) = self.query_counted(u, v)?;
        Ok((res.estimate, lookups))
    }
}

/// Brute-force baseline: a full distance matrix, declared stretch (1, 0).
pub struct ExactOracle {
    matrix: DistanceMatrix,
}

impl ExactOracle {
    pub fn build(g: &Graph) -> Result<ExactOracle> {
        Ok(ExactOracle {
            matrix: all_pairs_exact(g)?,
        })
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }
}

impl DistanceEstimator for ExactOracle {
    fn estimate(&self, u: Vertex, v: Vertex) -> Result<Dist> {
        let n = self.matrix.n();
        if u as usize >= n || v as usize >= n {
            return Err(Error::invalid(format!("vertex out of range for n={n}")));
        }
        Ok(self.matrix.get(u, v))
    }

    fn declared_stretch(&self) -> (f64, f64) {
        (1.0, 0.0)
    }
}

/// Re-declares the stretch of an inner estimator. Useful for treating an
/// exact oracle as a weaker one, or (in tests) for fault injection.
pub struct DeclaredStretch<E> {
    pub inner: E,
    pub mult: f64,
    pub add: f64,
}

impl<E: DistanceEstimator> DistanceEstimator for DeclaredStretch<E> {
    fn estimate(&self, u: Vertex, v: Vertex) -> Result<Dist> {
        self.inner.estimate(u, v)
    }

    fn declared_stretch(&self) -> (f64, f64) {
        (self.mult, self.add)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub u: Vertex,
    pub v: Vertex,
    pub d: u32,
    /// Raw estimate; `u32::MAX` when the estimator said unreachable.
    pub estimate: u32,
}

/// Outcome of one stretch audit.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StretchAudit {
    pub mult: f64,
    pub add: f64,
    pub pairs_checked: u64,
    pub violations: Vec<Violation>,
    pub worst_multiplicative: f64,
    /// `max(estimate - 2d)` over checked pairs.
    pub worst_additive_at_2x: i64,
    /// `estimate - d` -> count, finite estimates only.
    pub histogram: BTreeMap<i64, u64>,
    pub max_lookups: u32,
}

impl StretchAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for StretchAudit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "audited {} pairs against est <= max(d, {}*d + {})",
            self.pairs_checked, self.mult, self.add
        )?;
        writeln!(f, "violations: {}", self.violations.len())?;
        for v in self.violations.iter().take(10) {
            writeln!(
                f,
                "  ({}, {}): d={} est={}",
                v.u,
                v.v,
                v.d,
                Dist::from_raw(v.estimate)
            )?;
        }
        writeln!(
            f,
            "worst multiplicative: {:.4}, worst additive over 2d: {}",
            self.worst_multiplicative, self.worst_additive_at_2x
        )?;
        writeln!(f, "max lookups per query: {}", self.max_lookups)?;
        let hist: Vec<String> = self
            .histogram
            .iter()
            .map(|(k, c)| format!("+{k}:{c}"))
            .collect();
        write!(f, "estimate-minus-d histogram: {}", hist.join(" "))
    }
}

struct AuditAccum {
    mult: f64,
    add: f64,
    checked: u64,
    violations: Vec<Violation>,
    worst_mult: f64,
    worst_add: i64,
    histogram: BTreeMap<i64, u64>,
    max_lookups: u32,
}

impl AuditAccum {
    fn new(mult: f64, add: f64) -> Self {
        AuditAccum {
            mult,
            add,
            checked: 0,
            violations: Vec::new(),
            worst_mult: 0.0,
            worst_add: i64::MIN,
            histogram: BTreeMap::new(),
            max_lookups: 0,
        }
    }

    fn record(&mut self, u: Vertex, v: Vertex, d: u32, est: Dist, lookups: u32) {
        self.checked += 1;
        self.max_lookups = self.max_lookups.max(lookups);
        let df = d as f64;
        let bound = df.max(self.mult * df + self.add);
        let sound = est.as_f64() >= df - 1e-9;
        let tight = est.as_f64() <= bound + 1e-9;
        if !sound || !tight {
            self.violations.push(Violation {
                u,
                v,
                d,
                estimate: est.raw(),
            });
        }
        match est.get() {
            Some(e) => {
                *self.histogram.entry(e as i64 - d as i64).or_insert(0) += 1;
                if d >= 1 {
                    self.worst_mult = self.worst_mult.max(e as f64 / df);
                }
                self.worst_add = self.worst_add.max(e as i64 - 2 * d as i64);
            }
            None => {
                self.worst_mult = f64::INFINITY;
            }
        }
    }

    fn merge(mut self, other: AuditAccum) -> AuditAccum {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self.worst_mult = self.worst_mult.max(other.worst_mult);
        self.worst_add = self.worst_add.max(other.worst_add);
        for (k, c) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += c;
        }
        self.max_lookups = self.max_lookups.max(other.max_lookups);
        self
    }
}

/// Audits `d <= est <= max(d, mult*d + add)` on finite-distance pairs.
/// Exhaustive over all unordered pairs when `pair_budget` covers them,
/// otherwise on `pair_budget` sampled pairs. Violations are data, not
/// errors.
pub fn audit_stretch<E: DistanceEstimator>(
    g: &Graph,
    est: &E,
    mult: f64,
    add: f64,
    pair_budget: usize,
    seed: u64,
) -> Result<StretchAudit> {
    let n = g.n();
    let truth = all_pairs_exact(g)?;
    let all_pairs = n.saturating_mul(n.saturating_sub(1)) / 2;
    let acc = if pair_budget >= all_pairs {
        let rows: Vec<Result<AuditAccum>> = (0..n as Vertex)
            .into_par_iter()
            .map(|u| {
                let mut acc = AuditAccum::new(mult, add);
                for v in (u + 1)..n as Vertex {
                    if let Some(d) = truth.get(u, v).get() {
                        let (e, lookups) = est.estimate_counted(u, v)?;
                        acc.record(u, v, d, e, lookups);
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut merged = AuditAccum::new(mult, add);
        for row in rows {
            merged = merged.merge(row?);
        }
        merged
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc = AuditAccum::new(mult, add);
        let mut attempts = 0usize;
        let attempt_cap = pair_budget.saturating_mul(50) + 1000;
        while (acc.checked as usize) < pair_budget && attempts < attempt_cap {
            attempts += 1;
            if n < 2 {
                break;
            }
            let u = rng.gen_range(0..n) as Vertex;
            let v = rng.gen_range(0..n) as Vertex;
            if u == v {
                continue;
            }
            if let Some(d) = truth.get(u, v).get() {
                let (e, lookups) = est.estimate_counted(u, v)?;
                acc.record(u, v, d, e, lookups);
            }
        }
        acc
    };
    Ok(StretchAudit {
        mult,
        add,
        pairs_checked: acc.checked,
        violations: acc.violations,
        worst_multiplicative: acc.worst_mult,
        worst_additive_at_2x: if acc.checked == 0 { 0 } else { acc.worst_add },
        histogram: acc.histogram,
        max_lookups: acc.max_lookups,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DistinguisherVerdict {
    AtMostA,
    AtLeastB,
}

/// `(a, b)`-distinguisher built from an estimator's declared stretch: the
/// verdict is guaranteed correct whenever the true distance is `<= a` or
/// `>= b`, and arbitrary in between. The declared stretch must separate the
/// thresholds: `max(a, mult*a + add) < b`.
pub fn distinguisher<E: DistanceEstimator>(
    est: &E,
    u: Vertex,
    v: Vertex,
    a: u32,
    b: u32,
) -> Result<DistinguisherVerdict> {
    let (mult, add) = est.declared_stretch();
    let threshold = (a as f64).max(mult * a as f64 + add);
    if !(threshold < b as f64 - 1e-9) {
        return Err(Error::invalid(format!(
            "declared ({mult}, {add})-stretch cannot separate a={a} from b={b}: estimates for d<=a reach {threshold}"
        )));
    }
    let e = est.estimate(u, v)?;
    if e.as_f64() <= threshold + 1e-9 {
        Ok(DistinguisherVerdict::AtMostA)
    } else {
        Ok(DistinguisherVerdict::AtLeastB)
    }
}

/// Solves a set-intersection instance by building the merged gadget and
/// asking a `(k, k+2)`-distinguisher for every rep pair.
pub fn solve_set_intersection<E, F>(
    inst: &SetIntersectionInstance,
    k: u32,
    build_oracle: F,
) -> Result<Vec<Vec<bool>>>
where
    E: DistanceEstimator,
    F: FnOnce(&Graph) -> Result<E>,
{
    let gadget = gen_merged(inst, k)?;
    let oracle = build_oracle(&gadget.graph)?;
    let n = inst.n_sets();
    let mut out = vec![vec![false; n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let verdict = distinguisher(
                &oracle,
                gadget.left_rep[i],
                gadget.right_rep[j],
                k,
                k + 2,
            )?;
            *slot = verdict == DistinguisherVerdict::AtMostA;
        }
    }
    Ok(out)
}

/// Default pipeline: exact BFS oracle over the gadget.
pub fn solve_set_intersection_exact(
    inst: &SetIntersectionInstance,
    k: u32,
) -> Result<Vec<Vec<bool>>> {
    solve_set_intersection(inst, k, ExactOracle::build)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub tuples: u64,
    pub counterexamples: Vec<String>,
}

impl PropertyCheck {
    fn new(name: &str) -> Self {
        PropertyCheck {
            name: name.to_string(),
            tuples: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.tuples += 1;
        if !ok && self.counterexamples.len() < 20 {
            self.counterexamples.push(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PropertySuiteReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertySuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::passed)
    }

    pub fn total_tuples(&self) -> u64 {
        self.checks.iter().map(|c| c.tuples).sum()
    }
}

impl std::fmt::Display for PropertySuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{}: {} tuples, {}",
                c.name,
                c.tuples,
                if c.passed() {
                    "ok".to_string()
                } else {
                    format!("{} counterexamples: {:?}", c.counterexamples.len(), c.counterexamples)
                }
            )?;
        }
        Ok(())
    }
}

fn as_set(v: &[Vertex]) -> BTreeSet<Vertex> {
    v.iter().copied().collect()
}

fn n_set(g: &Graph, v: Vertex, s: f64) -> Result<BTreeSet<Vertex>> {
    Ok(as_set(&truncated_bfs(g, v, s)?.order))
}

/// Largest `t >= 0` with `2 * delta^t <= s`; `None` when even `t = 0` fails
/// (the bound is negative and trivially satisfied).
fn floor_log_half(delta: u64, s: u64) -> Option<u32> {
    if delta < 2 || 2 > s {
        return None;
    }
    let mut t = 0u32;
    let mut pow = 1u64;
    loop {
        match pow.checked_mul(delta) {
            Some(next) if 2 * next <= s => {
                pow = next;
                t += 1;
            }
            _ => return Some(t),
        }
    }
}

struct RadCache<'a> {
    g: &'a Graph,
    cache: HashMap<u64, u32>,
}

impl<'a> RadCache<'a> {
    fn get(&mut self, s: u64) -> Result<u32> {
        if let Some(&r) = self.cache.get(&s) {
            return Ok(r);
        }
        let r = rad_trunc(self.g, s as f64)?;
        self.cache.insert(s, r);
        Ok(r)
    }
}

/// Evaluates the structural inequalities on `samples` sampled tuples per
/// check. Sub-checks needing connectivity are skipped (with zero tuples) on
/// disconnected graphs.
pub fn check_property_suite(g: &Graph, samples: usize, seed: u64) -> Result<PropertySuiteReport> {
    let n = g.n();
    if n < 3 {
        return Err(Error::invalid("property suite needs at least 3 vertices"));
    }
    let truth = all_pairs_exact(g)?;
    let connected = is_connected(g);
    let delta = max_degree(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ecc_of = |v: Vertex| -> u32 {
        (0..n).filter_map(|u| truth.get(v, u as Vertex).get()).max().unwrap_or(0)
    };

    // Exactly one of subset / superset / equal holds for T(v, r) vs N(v, s).
    let mut trichotomy = PropertyCheck::new("ball_neighborhood_trichotomy");
    let mut cardinality = PropertyCheck::new("cardinality_implies_containment");
    for _ in 0..samples {
        let v = rng.gen_range(0..n) as Vertex;
        let ecc_v = ecc_of(v);
        if ecc_v == 0 {
            continue;
        }
        let s = rng.gen_range(1..n) as f64;
        let r = rng.gen_range(1..=ecc_v);
        let t_set = as_set(&ball_set(g, v, r)?);
        let n_s = n_set(g, v, s)?;
        let t_sub = t_set.is_subset(&n_s);
        let n_sub = n_s.is_subset(&t_set);
        let proper_t = t_sub && t_set.len() < n_s.len();
        let proper_n = n_sub && n_s.len() < t_set.len();
        let equal = t_set == n_s;
        let exactly_one = (proper_t as u8 + proper_n as u8 + equal as u8) == 1;
        trichotomy.record(exactly_one, || {
            format!("v={v} s={s} r={r}: |T|={} |N|={}", t_set.len(), n_s.len())
        });
        let c_ok = if t_set.len() < n_s.len() {
            proper_t
        } else if n_s.len() < t_set.len() {
            proper_n
        } else {
            equal
        };
        cardinality.record(c_ok, || {
            format!("v={v} s={s} r={r}: |T|={} |N|={}", t_set.len(), n_s.len())
        });
    }

    // T(v, ecc(v, s)) fits; T(v, ecc(v, s) + 1) does not (connected, s < n-1).
    let mut ball_fit = PropertyCheck::new("deepest_ball_fits");
    for _ in 0..samples {
        let v = rng.gen_range(0..n) as Vertex;
        let s = rng.gen_range(1..n) as f64;
        let ecc = ecc_trunc(g, v, s)?;
        let n_s = n_set(g, v, s)?;
        let fits = as_set(&ball_set(g, v, ecc)?).is_subset(&n_s);
        let mut ok = fits;
        let mut overflow_checked = false;
        if connected && (s as usize) < n - 1 {
            let over = as_set(&ball_set(g, v, ecc + 1)?);
            ok = ok && !over.is_subset(&n_s);
            overflow_checked = true;
        }
        ball_fit.record(ok, || {
            format!("v={v} s={s} ecc={ecc} fits={fits} overflow_checked={overflow_checked}")
        });
    }

    // Truncated eccentricity cannot shrink in induced subgraphs.
    let mut subgraph_mono = PropertyCheck::new("subgraph_ecc_monotone");
    for i in 0..samples {
        let v = rng.gen_range(0..n) as Vertex;
        let (sub, ids, v_new) = if i % 2 == 0 {
            // Random induced subgraph containing v.
            let size = rng.gen_range(2..=n);
            let mut keep: Vec<Vertex> = (0..n as Vertex).collect();
            for j in (1..keep.len()).rev() {
                let x = rng.gen_range(0..=j);
                keep.swap(j, x);
            }
            keep.truncate(size);
            if !keep.contains(&v) {
                keep.push(v);
            }
            let (sub, ids) = induced_subgraph(g, &keep)?;
            let v_new = ids.binary_search(&v).unwrap() as Vertex;
            (sub, ids, v_new)
        } else {
            // Structured case: a BFS-subtree of descendants.
            let (dist, parent) = bfs_tree(g, v)?;
            let candidates: Vec<Vertex> = (0..n as Vertex)
                .filter(|&u| u != v && dist[u as usize].is_reachable())
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let root = candidates[rng.gen_range(0..candidates.len())];
            let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
            for u in 0..n as Vertex {
                if let Some(p) = parent[u as usize] {
                    if p != u {
                        children[p as usize].push(u);
                    }
                }
            }
            let mut members = vec![root];
            let mut queue = vec![root];
            while let Some(x) = queue.pop() {
                for &u in &children[x as usize] {
                    members.push(u);
                    queue.push(u);
                }
            }
            let (sub, ids) = induced_subgraph(g, &members)?;
            let root_new = ids.binary_search(&root).unwrap() as Vertex;
            (sub, ids, root_new)
        };
        // Restrict s to the component of the probe vertex in the subgraph;
        // the inequality concerns full neighborhoods on both sides.
        let comp = crate::graph::bfs_full(&sub, v_new)?
            .dist
            .iter()
            .filter(|d| d.is_reachable())
            .count();
        if comp < 2 {
            continue;
        }
        let s = rng.gen_range(1..comp) as f64;
        let probe_old = ids[v_new as usize];
        let in_g = ecc_trunc(g, probe_old, s)?;
        let in_sub = ecc_trunc(&sub, v_new, s)?;
        subgraph_mono.record(in_g <= in_sub, || {
            format!(
                "v={probe_old} |V'|={} s={s}: ecc_G={in_g} > ecc_G'={in_sub}",
                sub.n()
            )
        });
    }

    // ecc(v, s1(s2+1)) >= ecc(v, s1) + rad(s2) on connected graphs.
    let mut log_additivity = PropertyCheck::new("ecc_log_additivity");
    // rad(s) >= floor(log_delta(s/2)) on connected graphs with delta >= 2.
    let mut degree_floor = PropertyCheck::new("radius_degree_floor");
    if connected {
        let mut rad = RadCache {
            g,
            cache: HashMap::new(),
        };
        let palette: Vec<u64> = [1u64, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128]
            .into_iter()
            .filter(|&s2| (s2 + 1) < (n as u64).saturating_sub(2))
            .collect();
        for _ in 0..samples {
            if palette.is_empty() {
                break;
            }
            let s2 = palette[rng.gen_range(0..palette.len())];
            let max_s1 = (n as u64 - 2) / (s2 + 1);
            if max_s1 < 1 {
                continue;
            }
            let s1 = rng.gen_range(1..=max_s1);
            if s1 * (s2 + 1) >= n as u64 - 1 {
                continue;
            }
            let v = rng.gen_range(0..n) as Vertex;
            let lhs = ecc_trunc(g, v, (s1 * (s2 + 1)) as f64)?;
            let ecc_s1 = ecc_trunc(g, v, s1 as f64)?;
            let rad_s2 = rad.get(s2)?;
            log_additivity.record(lhs >= ecc_s1 + rad_s2, || {
                format!("v={v} s1={s1} s2={s2}: ecc={lhs} < {ecc_s1} + rad {rad_s2}")
            });
        }
        if delta >= 2 {
            for _ in 0..samples {
                let s = rng.gen_range(1..n) as u64;
                let rad_s = rad.get(s)?;
                let bound = floor_log_half(delta as u64, s);
                let ok = match bound {
                    None => true,
                    Some(b) => rad_s >= b,
                };
                degree_floor.record(ok, || {
                    format!("s={s} delta={delta}: rad={rad_s} < floor_log={bound:?}")
                });
            }
        }
    }

    Ok(PropertySuiteReport {
        checks: vec![
            trichotomy,
            cardinality,
            ball_fit,
            subgraph_mono,
            log_additivity,
            degree_floor,
        ],
    })
}
