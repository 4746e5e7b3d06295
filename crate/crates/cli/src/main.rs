//! Command line front end: solve, generate, verify, and brute-force oracle
//! runs over instance files. Stdout is deterministic for fixed input and
//! flags; timings go to stderr.

mod certjson;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use crosscap::ef::{emit_stab_ef, write_lpx, EF_ROW_CAP};
use crosscap::embedding::EmbeddedGraph;
use crosscap::error::Error;
use crosscap::generate::{generate, Family, GenParams};
use crosscap::instance::{read_instance, write_instance};
use crosscap::oracle::oracle_mwss_embedded;
use crosscap::rational::format_q;
use crosscap::solve::{solve, SolveOptions};
use crosscap::verify::verify_instance;

#[derive(Parser)]
#[command(
    name = "crosscap",
    about = "exact maximum-weight stable sets for graphs embedded with few crosscaps",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file exactly
    Solve {
        file: PathBuf,
        /// cap on the double-cover odd cycle transversal size
        #[arg(long, default_value_t = 10)]
        budget: usize,
        /// override the circulation part budget (default max(1, 6 * genus))
        #[arg(long)]
        ell: Option<usize>,
        /// also write the stable set polytope extension as LP text
        #[arg(long, value_name = "OUT.lpx")]
        emit_ef: Option<PathBuf>,
        /// also write the solve certificate as JSON
        #[arg(long, value_name = "OUT.json")]
        cert: Option<PathBuf>,
        /// solve transversal branches on worker threads
        #[arg(long)]
        parallel: bool,
    },
    /// Generate a family instance
    Gen {
        /// proj-quad, proj-triangle, proj-k4, planar, genus2, or random
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// output file
        #[arg(short, long)]
        output: PathBuf,
        /// grid rows (proj-quad only)
        #[arg(long)]
        rows: Option<usize>,
        /// grid cols (proj-quad only)
        #[arg(long)]
        cols: Option<usize>,
    },
    /// Check instance invariants and report one line per check
    Verify {
        file: PathBuf,
        /// fail if any odd closed walk is 2-sided
        #[arg(long)]
        assume_consistent: bool,
    },
    /// Brute-force reference optimum (at most 24 vertices)
    Oracle { file: PathBuf },
}

fn main() {
    match run(Cli::parse()) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.cmd {
        Cmd::Solve { file, budget, ell, emit_ef, cert, parallel } => {
            let g = read_instance(&file)?;
            let opts = SolveOptions { budget, ell, parallel };
            let t0 = Instant::now();
            let sol = solve(&g, &opts)?;
            for (stage, ms) in &sol.stage_millis {
                eprintln!("stage {stage}: {ms} ms");
            }
            eprintln!("total: {} ms", t0.elapsed().as_millis());
            if let Some(path) = &cert {
                write_text(path, &certjson::certificate_json(&g, &sol))?;
                eprintln!("certificate written to {}", path.display());
            }
            if let Some(path) = &emit_ef {
                let t1 = Instant::now();
                let ef = emit_stab_ef(&g, budget, EF_ROW_CAP)?;
                write_text(path, &write_lpx(&ef.model))?;
                eprintln!(
                    "extension written to {} ({} vars, {} rows, {} ms)",
                    path.display(),
                    ef.model.vars.len(),
                    ef.model.rows.len(),
                    t1.elapsed().as_millis()
                );
            }
            print_optimum(&g, &sol.weight, &sol.set);
            Ok(0)
        }
        Cmd::Gen { family, seed, output, rows, cols } => {
            let family: Family = family.parse()?;
            let g = generate(&GenParams { family, seed, rows, cols })?;
            write_instance(&g, &output)?;
            eprintln!(
                "wrote {} seed {seed}: {} vertices, {} edges -> {}",
                family.name(),
                g.n(),
                g.m(),
                output.display()
            );
            Ok(0)
        }
        Cmd::Verify { file, assume_consistent } => {
            let g = read_instance(&file)?;
            let report = verify_instance(&g, assume_consistent);
            print!("{}", report.render());
            Ok(if report.ok() { 0 } else { 2 })
        }
        Cmd::Oracle { file } => {
            let g = read_instance(&file)?;
            let (weight, set) = oracle_mwss_embedded(&g)?;
            print_optimum(&g, &weight, &set);
            Ok(0)
        }
    }
}

fn print_optimum(g: &EmbeddedGraph, weight: &crosscap::rational::Q, set: &[usize]) {
    let labels: Vec<String> = set.iter().map(|&v| g.vlabel(v).to_string()).collect();
    println!("weight {}", format_q(weight));
    println!("set {}", labels.join(" "));
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}
