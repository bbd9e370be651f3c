use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use zn_gauge::io::{simulate, simulate_census, write_census, write_oracle, write_samples, OracleRequest, RunManifest};
use zn_gauge::model::{beta0_admissible, minimal_admissible_beta0, Representation, TheoryConstants};
use zn_gauge::verify::{run_suite, SUITES};
use zn_gauge::{Error, Result};

#[derive(Parser)]
#[command(name = "zn-gauge", version, about = "Z_n lattice gauge theory toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the heat-bath chain of a manifest and write the sample CSV.
    Simulate {
        manifest: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite (or `all`) and print its report.
    Verify {
        suite: String,
        /// reduced sizes, for smoke runs
        #[arg(long)]
        quick: bool,
        /// write the JSON report here instead of stdout
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the theory constants for (n, m_rep, β₀) as JSON.
    Constants {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        m_rep: u32,
        /// defaults to the least admissible β₀ on a 0.01 grid
        #[arg(long)]
        beta0: Option<f64>,
    },
    /// Regenerate the manifest's sample stream and write the vortex census CSV.
    Census {
        manifest: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exact expectations by enumeration, as CSV.
    Oracle {
        spec: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn output(path: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Simulate { manifest, out } => {
            let m = RunManifest::from_json(&read(&manifest)?)?;
            let mut buf = Vec::new();
            write_samples(&mut buf, &simulate(&m)?)?;
            output(&out, &buf)?;
            Ok(true)
        }
        Command::Census { manifest, out } => {
            let m = RunManifest::from_json(&read(&manifest)?)?;
            let mut buf = Vec::new();
            write_census(&mut buf, &simulate_census(&m)?)?;
            output(&out, &buf)?;
            Ok(true)
        }
        Command::Oracle { spec, out } => {
            let rows = OracleRequest::from_json(&read(&spec)?)?.run()?;
            let mut buf = Vec::new();
            write_oracle(&mut buf, &rows)?;
            output(&out, &buf)?;
            Ok(true)
        }
        Command::Constants { n, m_rep, beta0 } => {
            let rep = Representation::new(n, m_rep)?;
            let beta0 = beta0.unwrap_or_else(|| minimal_admissible_beta0(&rep));
            let admissibility = beta0_admissible(&rep, beta0)?;
            let constants = TheoryConstants::new(&rep, beta0);
            let ok = constants.is_ok();
            let doc = json!({
                "admissibility": admissibility,
                "constants": constants.ok(),
            });
            output(&None, format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes")).as_bytes())?;
            if let Some(c) = admissibility.first_failure() {
                eprintln!("β₀ = {beta0} is not admissible: {c}");
            }
            Ok(ok)
        }
        Command::Verify { suite, quick, json } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports = Vec::new();
            for name in names {
                let r = run_suite(name, quick)?;
                eprint!("{}", r.table());
                reports.push(r);
            }
            let passed = reports.iter().all(|r| r.passed);
            let text = if reports.len() == 1 {
                reports[0].to_json()
            } else {
                serde_json::to_string_pretty(&reports).expect("serializes")
            };
            output(&json, format!("{text}\n").as_bytes())?;
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
