//! `superpair` — batch verification of super Poisson structures and Lax
//! hierarchies described by JSON documents.
//!
//! Exit codes: `0` every check passed, `1` at least one check failed (the
//! report carries a witness), `2` the document could not be read, parsed or
//! converted.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use superpair_cli::commands;

#[derive(Parser)]
#[command(
    name = "superpair",
    version,
    about = "Exact checks for super Poisson pencils and Lax hierarchies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural axioms of a document (any kind)
    Verify {
        /// Input document (JSON)
        spec: PathBuf,
        /// RNG seed for the randomized identities
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Sample count for the randomized identities
        #[arg(long, default_value_t = 60)]
        samples: usize,
        /// Write the JSON report here (default: $SUPERPAIR_REPORT_DIR/<stem>.report.json)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify the Poisson pencil of a lax-element document
    Superpair {
        /// Input document (JSON, kind = lax-element)
        spec: PathBuf,
        /// Pencil values, comma-separated rationals (default 0,1,-1,2)
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<String>,
        /// RNG seed for the sampled Hamiltonians
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Sampled triples per identity and pencil value
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Write the JSON report here (default: $SUPERPAIR_REPORT_DIR/<stem>.report.json)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the flow checks of a lax-pdo document
    Hierarchy {
        /// Input document (JSON, kind = lax-pdo)
        spec: PathBuf,
        /// Flows to check, comma-separated orders
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3])]
        flows: Vec<u32>,
        /// Residue densities checked for conservation along each flow
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 3, 5])]
        densities: Vec<u32>,
        /// Override the truncation depth (too small reports floor contamination)
        #[arg(long)]
        depth: Option<u32>,
        /// Pencil values for the superpair family (default 0,1,-1,2)
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<String>,
        /// RNG seed for the sampled densities
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Sampled triples per identity and pencil value
        #[arg(long, default_value_t = 6)]
        samples: usize,
        /// Write the JSON report here (default: $SUPERPAIR_REPORT_DIR/<stem>.report.json)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Assemble a polarized algebra from a pair-of-products document
    Build {
        /// Input document (JSON, kind = pair-of-products or polarized)
        spec: PathBuf,
        /// Where to write the assembled polarized document (default: <input>.built.json)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the JSON report here (default: $SUPERPAIR_REPORT_DIR/<stem>.report.json)
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Verify {
            spec,
            seed,
            samples,
            report,
        } => commands::cmd_verify(&spec, seed, samples, report.as_deref()),
        Command::Superpair {
            spec,
            lambdas,
            seed,
            samples,
            report,
        } => commands::cmd_superpair(&spec, &lambdas, seed, samples, report.as_deref()),
        Command::Hierarchy {
            spec,
            flows,
            densities,
            depth,
            lambdas,
            seed,
            samples,
            report,
        } => commands::cmd_hierarchy(
            &spec,
            &flows,
            &densities,
            depth,
            &lambdas,
            seed,
            samples,
            report.as_deref(),
        ),
        Command::Build { spec, out, report } => {
            commands::cmd_build(&spec, out.as_deref(), report.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}
