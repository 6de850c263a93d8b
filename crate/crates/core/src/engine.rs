//! Long diagonal runs: checkpoint/resume, result summaries, benchmarking.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use thiserror::Error;

use crate::checkpoint::{load_checkpoint, save_checkpoint, temp_path, CheckpointError};
use crate::geode::{geode_diagonal_from, DiagonalOutcome, DiagonalState, SliceProgress};
use crate::grid::Workers;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("checkpoint {path} is for n = {found}, this run is n = {expected}")]
    WrongN {
        path: PathBuf,
        expected: u32,
        found: u32,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("could not start worker pool: {0}")]
    Workers(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub n: u32,
    pub checkpoint_dir: Option<PathBuf>,
    /// Save a checkpoint every `cadence` slices.
    pub cadence: u32,
    pub workers: usize,
    /// Where to write the full decimal value and summary.
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(n: u32) -> Self {
        RunConfig {
            n,
            checkpoint_dir: None,
            cadence: 1,
            workers: 1,
            out: None,
        }
    }

    fn validate(&self) -> Result<(), EngineError> {
        if self.cadence == 0 {
            return Err(EngineError::Config("cadence must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(EngineError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Digit count plus the leading 30 and trailing 12 digits of a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub n: u32,
    pub digits: usize,
    pub first: String,
    pub last: String,
}

impl Summary {
    pub fn of(n: u32, value: &BigUint) -> Self {
        let text = value.to_str_radix(10);
        let digits = text.len();
        Summary {
            n,
            digits,
            first: text[..digits.min(30)].to_string(),
            last: text[digits.saturating_sub(12)..].to_string(),
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        writeln!(f, "digits {}", self.digits)?;
        writeln!(f, "first30 {}", self.first)?;
        write!(f, "last12 {}", self.last)
    }
}

#[derive(Debug)]
pub enum RunOutcome {
    Complete {
        value: BigUint,
        summary: Summary,
        /// Slice index of the checkpoint the run resumed from.
        resumed_from: Option<u32>,
    },
    /// Stopped by the progress callback after slice `s`.
    Interrupted { s: u32 },
}

pub fn checkpoint_file(dir: &Path, s: u32) -> PathBuf {
    dir.join(format!("slice-{s:06}.ckpt"))
}

fn slice_index(path: &Path) -> Option<u32> {
    let name = path.file_name()?.to_str()?;
    let digits = name.strip_prefix("slice-")?.strip_suffix(".ckpt")?;
    digits
        .bytes()
        .all(|b| b.is_ascii_digit())
        .then(|| digits.parse().ok())?
}

/// The highest-slice checkpoint in `dir` that loads cleanly.
///
/// Unreadable or malformed files are skipped in favour of older ones; a
/// readable checkpoint for a different `n` is an error.
pub fn latest_checkpoint(dir: &Path, n: u32) -> Result<Option<DiagonalState>, EngineError> {
    let io_err = |source| EngineError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut found: Vec<(u32, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if let Some(s) = slice_index(&path) {
            found.push((s, path));
        }
    }
    found.sort_by_key(|e| std::cmp::Reverse(e.0));
    for (s, path) in found {
        let Ok(ck) = load_checkpoint(&path) else {
            continue;
        };
        if ck.n != n {
            return Err(EngineError::WrongN {
                path,
                expected: n,
                found: ck.n,
            });
        }
        if ck.s != s {
            continue;
        }
        return Ok(Some(ck.into_state()));
    }
    Ok(None)
}

fn write_output(path: &Path, value: &BigUint, summary: &Summary) -> Result<(), EngineError> {
    let io_err = |source| EngineError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = temp_path(path);
    let mut file = fs::File::create(&tmp).map_err(io_err)?;
    writeln!(file, "{summary}")
        .and_then(|_| writeln!(file, "value {value}"))
        .and_then(|_| file.sync_all())
        .map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// Computes `H(cfg.n)`, resuming from and writing checkpoints when a
/// directory is configured.
///
/// `on_slice` sees every freshly computed slice, after its checkpoint (if
/// any) has been written; breaking stops the run there.
pub fn run_diagonal(
    cfg: &RunConfig,
    mut on_slice: impl FnMut(&SliceProgress) -> ControlFlow<()>,
) -> Result<RunOutcome, EngineError> {
    cfg.validate()?;
    let workers = Workers::new(cfg.workers)?;

    let start = match &cfg.checkpoint_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| EngineError::Io {
                path: dir.clone(),
                source,
            })?;
            latest_checkpoint(dir, cfg.n)?
        }
        None => None,
    };
    let resumed_from = start.as_ref().map(DiagonalState::s);

    let value = match start.as_ref().and_then(DiagonalState::result) {
        Some(done) => done.clone(),
        None => {
            let mut save_error = None;
            let outcome = geode_diagonal_from(cfg.n, start, &workers, |state, progress| {
                if let Some(dir) = &cfg.checkpoint_dir {
                    if (progress.s + 1) % cfg.cadence == 0 || progress.s == cfg.n {
                        let path = checkpoint_file(dir, progress.s);
                        if let Err(e) =
                            save_checkpoint(&path, cfg.n, progress.s, &state.c, &state.g)
                        {
                            save_error = Some(e);
                            return ControlFlow::Break(());
                        }
                    }
                }
                on_slice(progress)
            });
            if let Some(e) = save_error {
                return Err(e.into());
            }
            match outcome {
                DiagonalOutcome::Complete(v) => v,
                DiagonalOutcome::Interrupted(state) => {
                    return Ok(RunOutcome::Interrupted { s: state.s() })
                }
            }
        }
    };

    let summary = Summary::of(cfg.n, &value);
    if let Some(out) = &cfg.out {
        write_output(out, &value, &summary)?;
    }
    Ok(RunOutcome::Complete {
        value,
        summary,
        resumed_from,
    })
}

/// Timing for one diagonal run.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub n: u32,
    pub wall: Duration,
    pub slices: Vec<SliceProgress>,
    /// Lattice cells evaluated, `(n+1)^3`.
    pub cells: u64,
    pub max_digits: usize,
    pub result_digits: usize,
}

impl BenchReport {
    /// Time spent on the closed-form seeded hyper-Catalan slice 0.
    pub fn seed_time(&self) -> Duration {
        self.slices.first().map_or(Duration::ZERO, |p| p.c_elapsed)
    }
}

/// Times `H(n)` for each `n`. Measurement only.
pub fn bench(ns: &[u32], workers: usize) -> Result<Vec<BenchReport>, EngineError> {
    let pool = Workers::new(workers.max(1))?;
    let mut reports = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut slices = Vec::with_capacity(n as usize + 1);
        let t0 = Instant::now();
        let outcome = geode_diagonal_from(n, None, &pool, |_, p| {
            slices.push(p.clone());
            ControlFlow::Continue(())
        });
        let wall = t0.elapsed();
        let DiagonalOutcome::Complete(value) = outcome else {
            unreachable!("bench never interrupts")
        };
        let side = u64::from(n) + 1;
        reports.push(BenchReport {
            n,
            wall,
            cells: side * side * side,
            max_digits: slices.iter().map(|p| p.max_digits).max().unwrap_or(0),
            result_digits: value.to_str_radix(10).len(),
            slices,
        });
    }
    Ok(reports)
}

/// CSV with one row per slice plus a `total` row per run.
pub fn write_bench_csv<W: Write>(out: W, reports: &[BenchReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "row",
        "c_seconds",
        "g_seconds",
        "seconds",
        "cells",
        "max_digits",
        "result_digits",
    ])?;
    let secs = |d: Duration| format!("{:.6}", d.as_secs_f64());
    for r in reports {
        let slice_cells = (u64::from(r.n) + 1).pow(2);
        for p in &r.slices {
            w.write_record([
                r.n.to_string(),
                p.s.to_string(),
                secs(p.c_elapsed),
                secs(p.g_elapsed),
                secs(p.elapsed),
                slice_cells.to_string(),
                p.max_digits.to_string(),
                String::new(),
            ])?;
        }
        let (c, g) = r
            .slices
            .iter()
            .fold((Duration::ZERO, Duration::ZERO), |(c, g), p| {
                (c + p.c_elapsed, g + p.g_elapsed)
            });
        w.write_record([
            r.n.to_string(),
            "total".to_string(),
            secs(c),
            secs(g),
            secs(r.wall),
            r.cells.to_string(),
            r.max_digits.to_string(),
            r.result_digits.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
