use clap::{Args, Parser, Subcommand};
use cli::{catalog, run, CliError, ExperimentConfig, ExperimentReport, Kind, OutputDir, REPORT_SCHEMA};
use std::path::PathBuf;
use std::process::ExitCode;

/// Inertial manifold experiments: spectral gaps, Lyapunov-Perron graphs,
/// cones, dimension estimates and the counterexamples.
#[derive(Parser)]
#[command(name = "inman", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Single {
    #[command(flatten)]
    config: ExperimentConfig,
    /// replace existing output files
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cuts satisfying the spectral gap condition
    GapFind(Single),
    /// Lattice shells without short differences
    ShellSearch(Single),
    /// Tabulate the manifold graph on a grid
    ManifoldBuild(Single),
    /// Exponential tracking from off-manifold starts
    TrackVerify(Single),
    /// Cone invariance over trajectory pairs
    ConeCheck(Single),
    /// Box-counting dimension of a point cloud
    DimensionEstimate(Single),
    /// Random projections of a limit-cycle cloud
    ManeProject(Single),
    /// Floquet, C1 or segments counterexample
    CounterexampleRun(Single),
    /// Run config files in order and write one report
    Run {
        configs: Vec<PathBuf>,
        #[arg(long, env = "INMAN_OUT")]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Available experiment kinds with their defaults
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the report JSON schema
    Schema,
}

fn env(k: &str) -> Option<String> {
    std::env::var(k).ok()
}

fn finish(report: ExperimentReport, to_stdout: bool) -> ExitCode {
    if to_stdout {
        print!("{}", report.to_json());
    } else {
        for e in &report.experiments {
            for c in &e.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {}: {} = {} (threshold {}, slack {})", e.kind, c.name, c.measured, c.threshold, c.slack);
            }
        }
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn single(kind: Kind, s: Single) -> Result<ExitCode, CliError> {
    let mut c = s.config;
    c.kind = Some(kind.name().to_string());
    c.apply_env(env, false)?;
    let out = c.out.clone().map(|d| OutputDir::new(d, s.force));
    let report = run(vec![c], out.as_ref())?;
    Ok(finish(report, out.is_none()))
}

fn main_inner(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::GapFind(s) => single(Kind::GapFind, s),
        Cmd::ShellSearch(s) => single(Kind::ShellSearch, s),
        Cmd::ManifoldBuild(s) => single(Kind::ManifoldBuild, s),
        Cmd::TrackVerify(s) => single(Kind::TrackVerify, s),
        Cmd::ConeCheck(s) => single(Kind::ConeCheck, s),
        Cmd::DimensionEstimate(s) => single(Kind::DimensionEstimate, s),
        Cmd::ManeProject(s) => single(Kind::ManeProject, s),
        Cmd::CounterexampleRun(s) => single(Kind::CounterexampleRun, s),
        Cmd::Run { configs, out, force } => {
            let mut cs = Vec::new();
            for p in &configs {
                let mut c = ExperimentConfig::from_file(p)?;
                c.apply_env(env, true)?;
                cs.push(c);
            }
            let out = out.map(|d| OutputDir::new(d, force));
            let report = run(cs, out.as_ref())?;
            Ok(finish(report, out.is_none()))
        }
        Cmd::List { json } => {
            let cat = catalog();
            if json {
                println!("{}", serde_json::to_string_pretty(&cat).expect("catalog serialises"));
            } else {
                for e in cat {
                    println!("{}\n    {}", e.kind, e.description);
                    for line in e.defaults.to_toml().lines() {
                        println!("    {line}");
                    }
                    println!();
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Schema => {
            print!("{REPORT_SCHEMA}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
