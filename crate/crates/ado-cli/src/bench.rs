//! Benchmark sweeps: build oracles across a parameter grid and emit one CSV
//! row per run. Per-run failures land in the status column; the sweep
//! continues.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use ado_core::ado::build_for_degree;
use ado_core::gadget::gen_random_bounded_degree;
use ado_core::graph::max_degree;
use ado_core::verify::audit_stretch;
use ado_core::{derive_seed, Error};

#[derive(Deserialize)]
struct BenchConfig {
    seed: Option<u64>,
    #[serde(default, rename = "run")]
    runs: Vec<RunSpec>,
}

#[derive(Deserialize, Clone)]
struct RunSpec {
    n: usize,
    k: u32,
    eps: f64,
    #[serde(default = "default_c")]
    c: f64,
    /// Degree cap for the generated graph; default floor(c * n^(1/k - eps)).
    delta_max: Option<usize>,
    /// Edge target; default 3/8 of the degree budget.
    target_m: Option<usize>,
    /// Stretch-audit sample size; everything is exhaustive when it covers
    /// all pairs.
    audit_pairs: Option<usize>,
}

fn default_c() -> f64 {
    1.0
}

pub const CSV_HEADER: &str = "n,m,delta_max,k,eps,c,alpha,c_n,a_size,near_total,stored_entries,entries_per_n2,build_ms,audited_pairs,violations,worst_mult,worst_add_2x,max_lookups,seed,status";

fn run_row(spec: &RunSpec, seed: u64) -> Result<String, Error> {
    let nf = spec.n as f64;
    let delta_max = spec
        .delta_max
        .unwrap_or(((spec.c * nf.powf(1.0 / spec.k as f64 - spec.eps)).floor() as usize).max(1));
    let target_m = spec
        .target_m
        .unwrap_or((spec.n * delta_max * 3 / 8).min(spec.n * delta_max / 2));
    let g = gen_random_bounded_degree(spec.n, delta_max, target_m, derive_seed(seed, 1))?;
    let start = Instant::now();
    let ado = build_for_degree(&g, spec.k, spec.eps, spec.c, derive_seed(seed, 2))?;
    let build_ms = start.elapsed().as_millis();
    let report = ado.space_report();
    let audit = audit_stretch(
        &g,
        &ado,
        2.0,
        1.0 - spec.k as f64,
        spec.audit_pairs.unwrap_or(20_000),
        derive_seed(seed, 3),
    )?;
    Ok(format!(
        "{},{},{},{},{},{},{:.6},{:.4},{},{},{},{:.6},{},{},{},{:.4},{},{},{},ok",
        spec.n,
        g.m(),
        max_degree(&g),
        spec.k,
        spec.eps,
        spec.c,
        report.params.alpha,
        report.params.c_n,
        report.a_size,
        report.near_total,
        report.stored_entry_count,
        report.stored_entry_count as f64 / (nf * nf),
        build_ms,
        audit.pairs_checked,
        audit.violations.len(),
        audit.worst_multiplicative,
        audit.worst_additive_at_2x,
        audit.max_lookups,
        seed,
    ))
}

pub fn cmd_bench(config: &Path, out: Option<&Path>, cli_seed: u64) -> Result<(), Error> {
    let text = std::fs::read_to_string(config)?;
    let cfg: BenchConfig =
        toml::from_str(&text).map_err(|e| Error::Format(format!("bench config: {e}")))?;
    let base_seed = cfg.seed.unwrap_or(cli_seed);
    eprintln!(
        "config: bench {} runs from {} base_seed={base_seed}",
        cfg.runs.len(),
        config.display()
    );

    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(sink, "{CSV_HEADER}")?;
    for (i, spec) in cfg.runs.iter().enumerate() {
        let seed = derive_seed(base_seed, i as u64 + 1);
        let row = match run_row(spec, seed) {
            Ok(row) => row,
            Err(e) => {
                let msg = e.to_string().replace(',', ";");
                format!(
                    "{},,,{},{},{},,,,,,,,,,,,,{},error: {}",
                    spec.n, spec.k, spec.eps, spec.c, seed, msg
                )
            }
        };
        writeln!(sink, "{row}")?;
        sink.flush()?;
    }
    Ok(())
}
