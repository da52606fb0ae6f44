//! `hdiv` command line: Monte Carlo simulation scenarios, published-table
//! presets, and single-dataset fits.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hdiv::harness::{self, TableFormat};
use hdiv::tuning::CvSpec;
use hdiv::two_stage::CvPlan;

#[derive(Parser)]
#[command(
    name = "hdiv",
    about = "High-dimensional penalized two-stage least-squares estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo scenario described by a key = value config file.
    Simulate {
        /// Path to the scenario config.
        #[arg(long)]
        config: PathBuf,
        /// Also emit a markdown rendering next to the CSV.
        #[arg(long)]
        markdown: bool,
    },
    /// Fit one CSV dataset (header y,x1..,z1..) with a chosen method.
    Fit {
        /// Path to the dataset CSV.
        #[arg(long)]
        data: PathBuf,
        /// Method: ols | lasso | bridge | adalasso, with optional
        /// @<stage1> override.
        #[arg(long)]
        method: String,
        /// Bridge exponent for the second stage (when method = bridge).
        #[arg(long)]
        gamma: Option<f64>,
        /// First-stage bridge exponent.
        #[arg(long, default_value_t = 0.1)]
        gamma1: f64,
        /// Cross-validation folds.
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Output report path; defaults to <data>.fit.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a published-scenario preset and emit its table.
    Tables {
        /// table1 | table2 | table3 | table4 | table5.
        #[arg(long)]
        preset: String,
        /// Output CSV path; defaults to <preset>.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run() -> hdiv::Result<()> {
    match Cli::parse().command {
        Command::Simulate { config, markdown } => {
            let text = std::fs::read_to_string(&config).map_err(|e| hdiv::Error::Io {
                path: config.display().to_string(),
                source: e,
            })?;
            let cfg = harness::parse_config(&text)?;
            let table = harness::run_scenario(&cfg)?;
            harness::emit_table(&table, TableFormat::Csv, &cfg.output_path)?;
            println!("wrote {}", cfg.output_path.display());
            if markdown {
                let md_path = cfg.output_path.with_extension("md");
                harness::emit_table(&table, TableFormat::Markdown, &md_path)?;
                println!("wrote {}", md_path.display());
            }
            Ok(())
        }
        Command::Fit {
            data,
            method,
            gamma,
            gamma1,
            folds,
            out,
        } => {
            let token = match (method.as_str(), gamma) {
                ("bridge", Some(g)) => format!("bridge:{g}"),
                ("bridge", None) => "bridge:0.5".to_string(),
                (m, _) => m.to_string(),
            };
            let (_, spec) = harness::parse_method(&token, gamma1)?;
            let cv = CvPlan::shared(CvSpec {
                n_folds: folds,
                ..CvSpec::default()
            });
            let out_path = out.unwrap_or_else(|| {
                let mut p = data.clone().into_os_string();
                p.push(".fit.csv");
                PathBuf::from(p)
            });
            harness::fit_command(&data, &spec, &cv, &out_path)?;
            println!("wrote {}", out_path.display());
            Ok(())
        }
        Command::Tables { preset, out } => {
            let table = harness::run_preset(&preset)?;
            let out_path = out.unwrap_or_else(|| PathBuf::from(format!("{preset}.csv")));
            harness::emit_table(&table, TableFormat::Csv, &out_path)?;
            println!("wrote {}", out_path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
