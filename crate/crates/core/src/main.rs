use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use geode_core::engine::{bench, run_diagonal, write_bench_csv, RunConfig, RunOutcome};
use geode_core::geode::{geode_element, GeodeMemo};
use geode_core::hypercat::hyper_catalan;
use geode_core::series::{face_layer_count, monomial_count};
use geode_core::subdigon::{enumerate_count, DEFAULT_BUDGET};
use geode_core::verify::run_oracle_checks;
use geode_core::TypeVector;

#[derive(Parser)]
#[command(
    name = "geode",
    version,
    about = "Exact hyper-Catalan numbers and 4D Geode elements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Type {
    m2: u32,
    m3: u32,
    m4: u32,
    m5: u32,
}

impl Type {
    fn vector(&self) -> TypeVector {
        TypeVector::new(self.m2, self.m3, self.m4, self.m5)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the hyper-Catalan number C[m2,m3,m4,m5]
    Hc(Type),
    /// Print the Geode element G[m2,m3,m4,m5] via memoized recursion
    Geode(Type),
    /// Compute H(n) = G[n,n,n,n] with the slice engine
    Diag {
        n: u32,
        /// Directory for checkpoints; an existing run there is resumed
        #[arg(long, value_name = "DIR")]
        checkpoint: Option<PathBuf>,
        /// Checkpoint every K slices
        #[arg(long, value_name = "K", default_value_t = 1)]
        cadence: u32,
        /// Worker threads inside each slice
        #[arg(long, value_name = "W", default_value_t = 1)]
        workers: usize,
        /// Write the full decimal value and summary here
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Cross-check the series oracle against the other evaluators
    Oracle {
        #[arg(long, value_name = "D")]
        degree: u32,
    },
    /// Count plane trees of a type by explicit enumeration
    Enum {
        #[command(flatten)]
        m: Type,
        #[arg(long, value_name = "B", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Number of subdigons with F faces (or, with --monomials, of degree-F monomials)
    Layer {
        #[arg(long)]
        monomials: bool,
        #[arg(value_name = "F")]
        faces: u32,
    },
    /// Time H(n) for a comma-separated list of n
    Bench {
        #[arg(value_name = "N,...", value_delimiter = ',', required = true)]
        ns: Vec<u32>,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Hc(m) => writeln!(out, "{}", hyper_catalan(m.vector()))?,
        Command::Geode(m) => writeln!(out, "{}", geode_element(m.vector(), &mut GeodeMemo::new()))?,
        Command::Diag {
            n,
            checkpoint,
            cadence,
            workers,
            out: out_path,
        } => {
            let cfg = RunConfig {
                n,
                checkpoint_dir: checkpoint,
                cadence,
                workers,
                out: out_path,
            };
            let outcome = run_diagonal(&cfg, |p| {
                eprintln!(
                    "slice {}/{} c {:.3}s g {:.3}s total {:.3}s max_digits {}",
                    p.s,
                    p.n,
                    p.c_elapsed.as_secs_f64(),
                    p.g_elapsed.as_secs_f64(),
                    p.elapsed.as_secs_f64(),
                    p.max_digits
                );
                ControlFlow::Continue(())
            })?;
            let RunOutcome::Complete {
                value,
                summary,
                resumed_from,
            } = outcome
            else {
                bail!("run stopped before completion");
            };
            if let Some(s) = resumed_from {
                eprintln!("resumed from slice {s}");
            }
            writeln!(out, "{summary}")?;
            if cfg.out.is_none() {
                writeln!(out, "value {value}")?;
            }
        }
        Command::Oracle { degree } => {
            let results = run_oracle_checks(degree);
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {} ({})", r.name, r.detail)?;
            }
            if results.iter().any(|r| !r.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Enum { m, budget } => writeln!(out, "{}", enumerate_count(m.vector(), budget)?)?,
        Command::Layer { monomials, faces } => {
            if monomials {
                writeln!(out, "{}", monomial_count(u64::from(faces)))?;
            } else {
                writeln!(out, "{}", face_layer_count(faces))?;
            }
        }
        Command::Bench { ns, csv } => {
            let reports = bench(&ns, 1)?;
            match csv {
                Some(path) => {
                    let file = File::create(&path)
                        .with_context(|| format!("creating {}", path.display()))?;
                    write_bench_csv(BufWriter::new(file), &reports)?;
                    for r in &reports {
                        writeln!(
                            out,
                            "n {} seconds {:.3} seed {:.3} cells {} digits {}",
                            r.n,
                            r.wall.as_secs_f64(),
                            r.seed_time().as_secs_f64(),
                            r.cells,
                            r.result_digits
                        )?;
                    }
                }
                None => write_bench_csv(&mut out, &reports)?,
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
