use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use fraclap::config::load_config;
use fraclap::experiments::run_experiment;
use fraclap::report::{solver_tolerance, write_report, Provenance, Report, Timing};
use fraclap::{catalog, golden};

/// Exit codes: 0 all verdicts pass, 2 a quantitative check failed,
/// 1 execution or usage error.
#[derive(Parser)]
#[command(
    name = "fraclap",
    version,
    about = "Experiment runner for fractional Dirichlet problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotsMode {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to the TOML experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Report directory; overrides [output].dir from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrency cap for suite experiments.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Emit one SVG chart per data series.
        #[arg(long, value_enum, default_value_t = PlotsMode::Off)]
        plots: PlotsMode,
    },
    /// Print the built-in domain catalog.
    ListDomains {
        /// Emit the catalog as a JSON array.
        #[arg(long)]
        machine: bool,
    },
    /// Rewrite the oracle reference table.
    GoldenRegen {
        /// Output directory for ball_oracle.csv.
        #[arg(long, default_value = "goldens")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            jobs,
            plots,
        } => run(config, out, jobs, plots == PlotsMode::On),
        Command::ListDomains { machine } => list_domains(machine),
        Command::GoldenRegen { out } => golden_regen(out),
    }
}

fn run(config: PathBuf, out: Option<PathBuf>, jobs: usize, plots: bool) -> ExitCode {
    let resolved = match load_config(&config) {
        Ok(resolved) => resolved,
        Err(err) => {
            eprintln!("config error: {err}");
            return ExitCode::from(1);
        }
    };
    if jobs == 0 {
        eprintln!("config error: --jobs must be at least 1");
        return ExitCode::from(1);
    }

    let (mut timing, clock) = Timing::start();
    let outcome = match run_experiment(&resolved, jobs) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    timing.wall_seconds = clock.elapsed().as_secs_f64();

    let passed = outcome.passed();
    let report = Report {
        tool: "fraclap",
        version: env!("CARGO_PKG_VERSION"),
        kind: resolved.config.kind.as_str(),
        domain: resolved.entry.name,
        config_hash: &resolved.hash,
        inputs: &resolved.config,
        provenance: Provenance {
            grid_h: resolved.config.grid.h,
            box_factor: resolved.config.grid.box_factor,
            solver_tolerance: solver_tolerance(
                resolved.config.kind,
                resolved.config.extension.is_some(),
            ),
        },
        checks: &outcome.checks,
        series: &outcome.series,
        passed,
        timing,
    };

    let dir = out.unwrap_or_else(|| PathBuf::from(&resolved.config.output.dir));
    let json_path = match write_report(&dir, &report, plots) {
        Ok(path) => path,
        Err(err) => {
            eprintln!("error: cannot write report into {}: {err}", dir.display());
            return ExitCode::from(1);
        }
    };

    for check in &outcome.checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        let bound = check
            .threshold
            .map(|t| format!(", threshold {t:.6e}"))
            .unwrap_or_default();
        println!(
            "CHECK {}: {verdict} (value {:.6e}{bound})",
            check.name, check.value
        );
    }
    println!(
        "RESULT: {} — report at {}",
        if passed { "PASS" } else { "FAIL" },
        json_path.display()
    );
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn list_domains(machine: bool) -> ExitCode {
    if machine {
        let entries: Vec<serde_json::Value> = catalog()
            .iter()
            .map(|e| {
                let anchors: Vec<Vec<f64>> = e
                    .default_anchors()
                    .iter()
                    .map(|a| {
                        if e.dim == 1 {
                            vec![a.x]
                        } else {
                            vec![a.x, a.y]
                        }
                    })
                    .collect();
                serde_json::json!({
                    "name": e.name,
                    "dim": e.dim,
                    "summary": e.summary,
                    "anchors": anchors,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&entries).expect("catalog serializes")
        );
    } else {
        for e in catalog() {
            println!("{:<20} {}D  {}", e.name, e.dim, e.summary);
        }
    }
    ExitCode::SUCCESS
}

fn golden_regen(out: PathBuf) -> ExitCode {
    match golden::write_goldens(&out) {
        Ok((path, rows)) => {
            println!("wrote {} ({rows} rows)", path.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: cannot write goldens into {}: {err}", out.display());
            ExitCode::from(1)
        }
    }
}
