use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use holonomy_lab::error::{LabError, Result};
use holonomy_lab::identity_lab::quantization_report;
use holonomy_lab::scenario_cli::{
    self, catalog, convergence_csv, probe_csv, run_convergence, run_probe, run_scenario, write_convergence_output,
    write_scenario_outputs, Expectation, ScenarioConfig,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_RESIDUAL: u8 = 2;
const THREADS_VAR: &str = "HOLONOMY_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "holonomy-lab", version, about = "Wilson loops and surface-term identity checks for gauge fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every identity term for one scenario and write identities.csv and report.json
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides [output] dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Loop steps and surface grid, all set to N
        #[arg(long)]
        resolution: Option<usize>,
        /// Relative pass threshold
        #[arg(long)]
        tolerance: Option<f64>,
        /// auto, true or false
        #[arg(long)]
        expect_cancellation: Option<String>,
    },
    /// Fit convergence orders of the residuals and write convergence.csv
    Convergence {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated, strictly increasing (overrides [convergence] resolutions)
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Flux quantization report for a given flux, printed as JSON
    Quantize {
        #[arg(long, allow_hyphen_values = true)]
        flux: f64,
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        /// Treat the flux as ramped in time
        #[arg(long)]
        time_dependent: bool,
    },
    /// Norms of the first- and second-order loop expansion for scaled fields, printed as CSV
    ProbeHigherOrder {
        #[command(flatten)]
        source: Source,
        /// Comma-separated amplitude scales (overrides [probe] scales)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        scales: Option<Vec<f64>>,
    },
    /// List the built-in scenarios
    ListScenarios,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Name of a built-in scenario
    #[arg(long)]
    scenario: Option<String>,
}

impl Source {
    fn load(&self) -> Result<ScenarioConfig> {
        match (&self.config, &self.scenario) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)?;
                ScenarioConfig::parse(&text)
            }
            (None, Some(name)) => catalog::builtin(name),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Range {
            key: THREADS_VAR.into(),
            message: format!("expected a positive integer, got `{raw}`"),
        })?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Run {
            source,
            out,
            resolution,
            tolerance,
            expect_cancellation,
        } => {
            let mut cfg = source.load()?;
            if let Some(n) = resolution {
                cfg.resolution = holonomy_lab::Resolution::uniform(n);
            }
            if let Some(t) = tolerance {
                cfg.tolerance = t;
            }
            if let Some(e) = expect_cancellation {
                cfg.expect_cancellation = Expectation::parse(&e).map_err(|message| LabError::Range {
                    key: "expect_cancellation".into(),
                    message,
                })?;
            }
            cfg.validate()?;
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            let outcome = run_scenario(&cfg)?;
            write_scenario_outputs(&dir, &outcome)?;
            for f in &outcome.failures {
                eprintln!("FAIL {f}");
            }
            for flag in &outcome.report.flags {
                eprintln!("note: {flag}");
            }
            eprintln!(
                "{}: {} ({} and {} written to {})",
                cfg.name,
                if outcome.passed() { "pass" } else { "residual failure" },
                scenario_cli::IDENTITIES_FILE,
                scenario_cli::REPORT_FILE,
                dir.display()
            );
            Ok(if outcome.passed() { EXIT_OK } else { EXIT_RESIDUAL })
        }
        Command::Convergence { source, out, resolutions } => {
            let cfg = source.load()?;
            let res = resolutions.unwrap_or_else(|| cfg.convergence_resolutions.clone());
            let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
            let outcome = run_convergence(&cfg, &res)?;
            write_convergence_output(&dir, &outcome)?;
            print!("{}", convergence_csv(&outcome));
            for t in outcome.tables.iter().filter(|t| t.failed) {
                eprintln!("FAIL {}: fitted order {:?} below 1.5", t.check.name(), t.order);
            }
            Ok(if outcome.passed() { EXIT_OK } else { EXIT_RESIDUAL })
        }
        Command::Quantize { flux, e, time_dependent } => {
            if !flux.is_finite() || !e.is_finite() {
                return Err(LabError::Range {
                    key: "flux".into(),
                    message: "flux and e must be finite".into(),
                });
            }
            let q = quantization_report(flux, e, time_dependent);
            println!("{}", serde_json::to_string_pretty(&q)?);
            Ok(EXIT_OK)
        }
        Command::ProbeHigherOrder { source, scales } => {
            let cfg = source.load()?;
            let scales = scales.unwrap_or_else(|| cfg.probe_scales.clone());
            let table = run_probe(&cfg, &scales)?;
            print!("{}", probe_csv(&table));
            if let Some(p) = table.second_order_exponent {
                eprintln!("second-order scaling exponent: {p:.6}");
            }
            Ok(EXIT_OK)
        }
        Command::ListScenarios => {
            for b in catalog::BUILTINS {
                println!("{:<18} {}", b.name, b.summary);
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|_| execute(cli.command));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
