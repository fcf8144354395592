//! `ado`: build, query and audit distance oracles; generate graphs,
//! set-intersection instances and reduction gadgets; run benchmark sweeps.
//!
//! Exit codes: 0 ok, 1 audit violations, 2 usage, 3 i/o, 4 format/parse,
//! 5 parameter domain, 6 hitting-set non-convergence.

mod bench;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ado_core::ado::{
    build_ado, build_for_degree, derive_stretch_bound, deserialize_ado, serialize_ado, AdoParams,
    AdoStructure,
};
use ado_core::gadget::{
    gen_butterfly, gen_merged, gen_random_bounded_degree, gen_random_instance, gen_split,
    parse_instance, write_instance, write_rep_map, GadgetGraph,
};
use ado_core::graph::{max_degree, parse_edge_list, write_edge_list, Graph};
use ado_core::verify::audit_stretch;
use ado_core::{Error, Vertex};

#[derive(Parser)]
#[command(name = "ado", version, about)]
struct Cli {
    /// Worker threads (default: ADO_THREADS env var, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an oracle from an edge-list graph and write it to disk.
    Build(BuildArgs),
    /// Query a serialized oracle for one vertex pair.
    Query {
        oracle: PathBuf,
        u: Vertex,
        v: Vertex,
    },
    /// Audit an oracle's stretch against brute-force distances.
    Audit(AuditArgs),
    /// Generate graphs, instances and gadgets.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run a benchmark sweep from a TOML config, emitting CSV.
    Bench {
        config: PathBuf,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Args)]
struct BuildArgs {
    graph: PathBuf,
    out: PathBuf,
    /// Raw parameterization: space/stretch knob in [0, 1/3).
    #[arg(long, conflicts_with_all = ["k", "eps", "c"])]
    alpha: Option<f64>,
    /// Neighborhood-cap constant (raw mode).
    #[arg(long, requires = "alpha")]
    c_n: Option<f64>,
    /// Bunch-bound constant (raw mode).
    #[arg(long, requires = "alpha")]
    c_b: Option<f64>,
    /// Degree parameterization: positive integer k.
    #[arg(long, requires = "eps")]
    k: Option<u32>,
    /// Degree parameterization: eps in (0, 1/k].
    #[arg(long, requires = "k")]
    eps: Option<f64>,
    /// Degree parameterization: degree constant (default 1).
    #[arg(long, requires = "k")]
    c: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct AuditArgs {
    graph: PathBuf,
    oracle: PathBuf,
    /// Multiplicative bound (ignored with --certified).
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    mult: f64,
    /// Additive bound (ignored with --certified).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    add: f64,
    /// Derive the bound from the oracle parameters and this graph.
    #[arg(long)]
    certified: bool,
    /// Check every finite pair.
    #[arg(long, conflicts_with = "pairs")]
    exhaustive: bool,
    /// Number of sampled pairs.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write a machine-readable JSON summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random simple graph with a degree cap.
    Random {
        out: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta_max: usize,
        #[arg(long)]
        target_m: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Random set-intersection instance.
    Instance {
        out: PathBuf,
        #[arg(long)]
        sets: usize,
        #[arg(long)]
        universe: usize,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Butterfly infrastructure graph (N must be a perfect k-th power).
    Butterfly {
        out: PathBuf,
        #[arg(long)]
        sets: usize,
        #[arg(long)]
        k: u32,
        /// Sidecar file mapping set index to rep vertex ids.
        #[arg(long)]
        reps: Option<PathBuf>,
    },
    /// Merged set-intersection gadget from an instance file.
    Merged {
        instance: PathBuf,
        out: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        reps: Option<PathBuf>,
    },
    /// Edge-split gadget from an instance file.
    Split {
        instance: PathBuf,
        out: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        reps: Option<PathBuf>,
    },
}

fn open_reader(path: &Path) -> Result<BufReader<File>, Error> {
    Ok(BufReader::new(File::open(path)?))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    parse_edge_list(open_reader(path)?)
}

fn load_oracle(path: &Path) -> Result<AdoStructure, Error> {
    deserialize_ado(open_reader(path)?)
}

fn write_gadget(gadget: &GadgetGraph, out: &Path, reps: Option<&PathBuf>) -> Result<(), Error> {
    let mut w = create_writer(out)?;
    write_edge_list(&gadget.graph, &mut w)?;
    w.flush()?;
    if let Some(rep_path) = reps {
        let mut rw = create_writer(rep_path)?;
        write_rep_map(gadget, &mut rw)?;
        rw.flush()?;
    }
    Ok(())
}

fn cmd_build(args: &BuildArgs) -> Result<(), Error> {
    let g = load_graph(&args.graph)?;
    let ado = if let Some(alpha) = args.alpha {
        let params = AdoParams {
            alpha,
            c_n: args.c_n.unwrap_or(ado_core::ado::DEFAULT_C_N),
            c_b: args.c_b.unwrap_or(ado_core::ado::DEFAULT_C_B),
            seed: args.seed,
        };
        eprintln!(
            "config: build graph={} n={} m={} alpha={} c_n={} c_b={} seed={}",
            args.graph.display(),
            g.n(),
            g.m(),
            params.alpha,
            params.c_n,
            params.c_b,
            params.seed
        );
        build_ado(&g, &params)?
    } else {
        let k = args.k.expect("clap enforces alpha|k");
        let eps = args.eps.expect("clap: k requires eps");
        let c = args.c.unwrap_or(1.0);
        eprintln!(
            "config: build graph={} n={} m={} k={k} eps={eps} c={c} seed={}",
            args.graph.display(),
            g.n(),
            g.m(),
            args.seed
        );
        build_for_degree(&g, k, eps, c, args.seed)?
    };
    let mut w = create_writer(&args.out)?;
    serialize_ado(&ado, &mut w)?;
    w.flush()?;
    println!("{}", ado.space_report());
    Ok(())
}

fn cmd_query(oracle: &Path, u: Vertex, v: Vertex) -> Result<(), Error> {
    let ado = load_oracle(oracle)?;
    let res = ado.query(u, v)?;
    println!("{} {}", res.estimate, res.path_kind);
    Ok(())
}

/// Ok(true) means the audit passed; Ok(false) means violations were found.
fn cmd_audit(args: &AuditArgs) -> Result<bool, Error> {
    let g = load_graph(&args.graph)?;
    let ado = load_oracle(&args.oracle)?;
    if ado.n() != g.n() {
        return Err(Error::invalid(format!(
            "oracle was built for n={} but the graph has n={}",
            ado.n(),
            g.n()
        )));
    }
    let (mult, add) = if args.certified {
        let bound = derive_stretch_bound(&g, ado.params())?;
        (bound.mult, bound.add)
    } else {
        (args.mult, args.add)
    };
    let budget = if args.exhaustive {
        usize::MAX
    } else {
        args.pairs.unwrap_or(100_000)
    };
    eprintln!(
        "config: audit graph={} oracle={} mult={mult} add={add} budget={} seed={}",
        args.graph.display(),
        args.oracle.display(),
        if args.exhaustive { "exhaustive".to_string() } else { budget.to_string() },
        args.seed
    );
    let audit = audit_stretch(&g, &ado, mult, add, budget, args.seed)?;
    println!("{audit}");
    println!("result: {}", if audit.passed() { "PASS" } else { "FAIL" });
    if let Some(summary) = &args.summary {
        let mut w = create_writer(summary)?;
        serde_json::to_writer_pretty(&mut w, &audit)
            .map_err(|e| Error::Format(format!("summary serialization: {e}")))?;
        w.flush()?;
    }
    Ok(audit.passed())
}

fn cmd_gen(cmd: &GenCommand) -> Result<(), Error> {
    match cmd {
        GenCommand::Random {
            out,
            n,
            delta_max,
            target_m,
            seed,
        } => {
            eprintln!("config: gen random n={n} delta_max={delta_max} target_m={target_m} seed={seed}");
            let g = gen_random_bounded_degree(*n, *delta_max, *target_m, *seed)?;
            let mut w = create_writer(out)?;
            write_edge_list(&g, &mut w)?;
            w.flush()?;
            println!("wrote n={} m={} max_degree={}", g.n(), g.m(), max_degree(&g));
        }
        GenCommand::Instance {
            out,
            sets,
            universe,
            density,
            seed,
        } => {
            eprintln!("config: gen instance sets={sets} universe={universe} density={density} seed={seed}");
            let inst = gen_random_instance(*sets, *universe, *density, *seed)?;
            let mut w = create_writer(out)?;
            write_instance(&inst, &mut w)?;
            w.flush()?;
            println!("wrote {} sets over universe {}", inst.n_sets(), inst.universe());
        }
        GenCommand::Butterfly { out, sets, k, reps } => {
            eprintln!("config: gen butterfly sets={sets} k={k}");
            let gadget = gen_butterfly(*sets, *k)?;
            write_gadget(&gadget, out, reps.as_ref())?;
            println!(
                "wrote butterfly n={} m={} b={}",
                gadget.graph.n(),
                gadget.graph.m(),
                gadget.b
            );
        }
        GenCommand::Merged {
            instance,
            out,
            k,
            reps,
        } => {
            eprintln!("config: gen merged instance={} k={k}", instance.display());
            let inst = parse_instance(open_reader(instance)?)?;
            let gadget = gen_merged(&inst, *k)?;
            write_gadget(&gadget, out, reps.as_ref())?;
            println!(
                "wrote merged gadget n={} m={} padded_sets={}",
                gadget.graph.n(),
                gadget.graph.m(),
                gadget.padded_sets
            );
        }
        GenCommand::Split {
            instance,
            out,
            k,
            eps,
            c,
            reps,
        } => {
            eprintln!(
                "config: gen split instance={} k={k} eps={eps} c={c}",
                instance.display()
            );
            let inst = parse_instance(open_reader(instance)?)?;
            let gadget = gen_split(&inst, *k, *eps, *c)?;
            write_gadget(&gadget, out, reps.as_ref())?;
            println!(
                "wrote split gadget n={} m={} t={} intersect_d={} disjoint_d>={}",
                gadget.graph.n(),
                gadget.graph.m(),
                gadget.t,
                gadget.intersect_distance(),
                gadget.disjoint_distance_floor()
            );
        }
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidInput(_) | Error::Capacity(_) => 5,
        Error::NonConvergence { .. } => 6,
        Error::Parse { .. } | Error::Format(_) => 4,
        Error::Io(_) => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("ADO_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    });
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: could not set thread pool size: {e}");
        }
    }

    let outcome = match &cli.command {
        Command::Build(args) => cmd_build(args).map(|_| true),
        Command::Query { oracle, u, v } => cmd_query(oracle, *u, *v).map(|_| true),
        Command::Audit(args) => cmd_audit(args),
        Command::Gen(cmd) => cmd_gen(cmd).map(|_| true),
        Command::Bench { config, out, seed } => {
            bench::cmd_bench(config, out.as_deref(), *seed).map(|_| true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
