use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iet_cli::commands::{
    classify_loaded, cmd_construct, load_iet, parse_exact, parse_point, report_lines, ClassifyOptions,
};
use iet_cli::harness::{run_verify, HarnessConfig, Sampling};
use iet_cli::perturb::{run_perturb, PerturbConfig};
use iet_cli::svg::{orbit_rows, render};
use iet_cli::CliError;
use iet_core::{classify_iet, Caps, ConstructionSpec};

#[derive(Parser)]
#[command(name = "iet", version, about = "Interval exchange transformations with flips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Maximum Rauzy steps per expansion
    #[arg(long, default_value_t = 2000)]
    caps_rauzy: usize,
    /// Orbit length / partition depth / connection scan length
    #[arg(long)]
    caps_orbit: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print JSON instead of text
    #[arg(long)]
    json: bool,
    /// Write the JSON result (or SVG) to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn caps(&self) -> Caps {
        Caps { rauzy_cap: self.caps_rauzy, ..Caps::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify the components of an IET given as JSON ("-" for stdin)
    Classify {
        input: Option<String>,
        /// Also run the orbit oracle and compare
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Emit an IET with k periodic and l minimal components
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "l", alias = "ell")]
        ell: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sample random IETs with flips and check the component bound
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Every irreducible permutation with a flip, `samples` lengths each
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Classify randomly perturbed copies of an IET
    Perturb {
        input: Option<String>,
        /// Relative size of the length perturbation, e.g. 1e-3 or 1/1000
        #[arg(long, default_value = "1e-3")]
        magnitude: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Plot orbits of witness points as SVG
    OrbitSvg {
        input: Option<String>,
        /// Starting point, rational or scalar JSON; defaults to one per component
        #[arg(long = "witness")]
        witnesses: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn read_input(input: &Option<String>) -> Result<String, CliError> {
    match input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Parse(format!("stdin: {e}")))?;
            Ok(s)
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{path}: {e}"))),
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Runs a subcommand; returns the text for stdout and the `--json` flag.
fn run(command: Command) -> (Result<String, CliError>, bool) {
    match command {
        Command::Classify { input, cross_check, common } => {
            let result = (|| {
                let (t, expected) = load_iet(&read_input(&input)?)?;
                let options = ClassifyOptions {
                    caps: common.caps(),
                    orbit_cap: common.caps_orbit.unwrap_or(ClassifyOptions::default().orbit_cap),
                    cross_check,
                };
                let outcome = classify_loaded(&t, expected, &options)?;
                let json = pretty(&outcome.json);
                write_out(&common.out, &json)?;
                Ok(if common.json { json } else { report_lines(&outcome.report).join("\n") })
            })();
            (result, common.json)
        }
        Command::Construct { n, k, ell, common } => {
            let result = (|| {
                let file = cmd_construct(&ConstructionSpec { n, k, ell, seed: common.seed })?;
                let json = file.to_json_pretty();
                write_out(&common.out, &json)?;
                Ok(json)
            })();
            (result, common.json)
        }
        Command::Verify { n, samples, exhaustive, common } => {
            let result = (|| {
                let mut config = HarnessConfig::new(n, samples, common.seed);
                config.rauzy_cap = common.caps_rauzy;
                if let Some(cap) = common.caps_orbit {
                    config.orbit_cap = cap;
                }
                let sampling = if exhaustive { Sampling::Exhaustive } else { Sampling::Random };
                let report = run_verify(&config, sampling)?;
                let json = pretty(&report);
                write_out(&common.out, &json)?;
                if !report.is_clean() {
                    return Err(CliError::Invariant(report.summary()));
                }
                Ok(if common.json { json } else { report.summary() })
            })();
            (result, common.json)
        }
        Command::Perturb { input, magnitude, trials, common } => {
            let result = (|| {
                let (t, _) = load_iet(&read_input(&input)?)?;
                let config = PerturbConfig {
                    magnitude: parse_exact(&magnitude)?,
                    trials,
                    seed: common.seed,
                    caps: common.caps(),
                };
                let report = run_perturb(&t, &config)?;
                let json = pretty(&report);
                write_out(&common.out, &json)?;
                Ok(if common.json { json } else { report.summary() })
            })();
            (result, common.json)
        }
        Command::OrbitSvg { input, witnesses, common } => {
            let result = (|| {
                let (t, _) = load_iet(&read_input(&input)?)?;
                let report = classify_iet(&t, &common.caps()).ok();
                let points = if witnesses.is_empty() {
                    report.iter().flat_map(|r| r.components.iter().map(|c| c.witness.clone())).collect()
                } else {
                    witnesses.iter().map(|w| parse_point(&t, w)).collect::<Result<Vec<_>, _>>()?
                };
                let rows = orbit_rows(&t, report.as_ref(), &points, common.caps_orbit.unwrap_or(500))?;
                let svg = render(&t, report.as_ref(), &rows);
                match &common.out {
                    Some(_) => {
                        write_out(&common.out, &svg)?;
                        Ok(format!("{} orbits written", rows.len()))
                    }
                    None => Ok(svg),
                }
            })();
            (result, common.json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (result, json) = run(cli.command);
    match result {
        Ok(text) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if json {
                eprintln!("{}", e.to_json());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
