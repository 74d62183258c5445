use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use hypersim::metrics::csv::{stretch_csv, write_csv};
use hypersim::metrics::compute_delay_stretch;
use hypersim::routing::MultipathFactor;
use hypersim::sim::{run, RoutingMode, Scenario, StrategyName};
use hypersim::suite::{
    overhead_table, read_run_log, read_summary, run_suite, scaling_table, write_run_outputs, SuiteManifest,
    SUMMARY_FILE,
};
use hypersim::topology::{
    assign_geo_delays, generate_hyperbolic_graph, load_topology, perturb_duplicate_coordinates, rescale_topology,
    save_topology, GeneratorParams, DEFAULT_KM_PER_MS, DEFAULT_MIN_DELAY_MS,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "hypersim", version, about = "Packet-level NDN routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random hyperbolic topology.
    GenerateTopology {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        degree: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        radial_exponent: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shrink an embedded topology to its highest-degree nodes and shortest links.
    Rescale {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        degree: f64,
        /// Recompute link delays from the nodes' geographic positions.
        #[arg(long)]
        geo_delays: bool,
        /// Separate nodes that share a coordinate by up to this much.
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one scenario and write its event log and metric CSVs.
    Run(RunArgs),
    /// Delay stretch of one run against another on the same ping schedule.
    Stretch {
        /// Run directory or event log of the hyperbolic run.
        #[arg(long)]
        hr: PathBuf,
        /// Run directory or event log of the link-state run.
        #[arg(long)]
        ls: PathBuf,
        /// Defaults to stretch.csv inside the hyperbolic run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every member of a suite manifest.
    Suite {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Members run in parallel; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Overhead and scaling tables for a finished suite directory.
    Summarize {
        #[arg(long)]
        suite: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    topology: Option<PathBuf>,
    #[arg(long)]
    mode: Option<RoutingMode>,
    #[arg(long)]
    strategy: Option<StrategyName>,
    #[arg(long)]
    mpf: Option<MultipathFactor>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Seconds; only needed without a scenario file.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

/// Separates bad input from failures while running.
enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<hypersim::Error> for Failure {
    fn from(e: hypersim::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn invalid(msg: impl std::fmt::Display) -> Failure {
    Failure::Validation(anyhow!("{msg}"))
}

fn require_exists(p: &Path) -> Result<(), Failure> {
    if p.exists() {
        Ok(())
    } else {
        Err(invalid(format!("{}: no such file or directory", p.display())))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("HYPERSIM_LOG_LEVEL", "warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::GenerateTopology {
            nodes,
            degree,
            seed,
            radial_exponent,
            out,
        } => {
            let mut params = GeneratorParams::new(nodes, degree, seed);
            if let Some(e) = radial_exponent {
                params.radial_exponent = e;
            }
            let t = generate_hyperbolic_graph(&params)?;
            save_topology(&t, &out)?;
            println!(
                "{}: {} nodes, {} links, average degree {:.2}",
                out.display(),
                t.node_count(),
                t.link_count(),
                t.average_degree()
            );
        }
        Command::Rescale {
            topology,
            nodes,
            degree,
            geo_delays,
            perturb,
            seed,
            out,
        } => {
            require_exists(&topology)?;
            let mut t = rescale_topology(&load_topology(&topology, false)?, nodes, degree)?;
            if geo_delays {
                t = assign_geo_delays(&t, DEFAULT_KM_PER_MS, DEFAULT_MIN_DELAY_MS)?;
            }
            if let Some(eps) = perturb {
                if !(eps > 0.0) {
                    return Err(invalid("--perturb must be positive"));
                }
                t = perturb_duplicate_coordinates(&t, eps, seed)?;
            }
            save_topology(&t, &out)?;
            println!(
                "{}: {} nodes, {} links, average degree {:.2}",
                out.display(),
                t.node_count(),
                t.link_count(),
                t.average_degree()
            );
        }
        Command::Run(args) => cmd_run(args)?,
        Command::Stretch { hr, ls, out } => {
            require_exists(&hr)?;
            require_exists(&ls)?;
            let a = read_run_log(&hr)?;
            let b = read_run_log(&ls)?;
            let rows = compute_delay_stretch(&a.ping_records(), &b.ping_records())?;
            let out = out.unwrap_or_else(|| {
                let dir = if hr.is_dir() { hr.clone() } else { hr.parent().unwrap_or(Path::new(".")).to_path_buf() };
                dir.join("stretch.csv")
            });
            write_csv(&out, &stretch_csv(&rows))?;
            println!("{}: {} seconds", out.display(), rows.len());
        }
        Command::Suite { suite, out, jobs } => {
            require_exists(&suite)?;
            let manifest = SuiteManifest::load(&suite)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(invalid("--jobs must be at least 1"));
            }
            let rows = run_suite(&manifest, &out, jobs)?;
            println!("{}: {} runs", manifest.name, rows.len());
            print!("{}", overhead_table(&rows));
        }
        Command::Summarize { suite } => {
            let path = suite.join(SUMMARY_FILE);
            require_exists(&path)?;
            let rows = read_summary(&path)?;
            let overhead = overhead_table(&rows);
            let scaling = scaling_table(&rows);
            write_csv(&suite.join("overhead_table.csv"), &overhead)?;
            write_csv(&suite.join("scaling_table.csv"), &scaling)?;
            println!("per-node message overhead (packets/s)\n{overhead}\nscaling\n{scaling}");
        }
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<(), Failure> {
    let mut sc = match &a.scenario {
        Some(p) => {
            require_exists(p)?;
            Scenario::load(p)?
        }
        None => {
            let (Some(topology), Some(mode)) = (&a.topology, a.mode) else {
                return Err(invalid("run needs --scenario, or --topology and --mode"));
            };
            Scenario::new(topology, mode, a.duration.unwrap_or(300.0))
        }
    };
    if a.scenario.is_some() {
        if let Some(t) = &a.topology {
            sc.topology = t.clone();
        }
        if let Some(m) = a.mode {
            sc.routing = m;
        }
        if let Some(d) = a.duration {
            sc.duration_s = d;
        }
    }
    if let Some(s) = a.strategy {
        sc.strategy = s;
    }
    if let Some(m) = a.mpf {
        sc.multipath_factor = m;
    }
    if let Some(x) = a.alpha {
        sc.traffic.alpha = x;
    }
    if let Some(s) = a.seed {
        sc.seed = s;
    }
    sc.validate()?;
    require_exists(&sc.topology)?;
    let topo = load_topology(&sc.topology, true)?;
    let log = run(&sc, &topo)?;
    write_run_outputs(&a.out, &sc, &topo, &log)?;
    hypersim::write_atomic(&a.out.join("scenario.toml"), sc.to_toml().as_bytes())
        .context("writing the resolved scenario")
        .map_err(Failure::Runtime)?;
    println!("{}: {} records", a.out.display(), log.records.len());
    Ok(())
}
