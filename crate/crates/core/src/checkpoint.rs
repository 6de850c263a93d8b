//! Text checkpoints for diagonal runs.
//!
//! ```text
//! GEODE-CKPT 1
//! n <n>
//! s <s>
//! C <(n+1)^2>
//! <m4> <m5> <value>      (row-major, m4 outer)
//! ...
//! G <(n+1)^2>
//! <m4> <m5> <value>
//! ...
//! END
//! ```
//!
//! Values are decimal, lines end in LF. C cells stand for
//! `[1 + 4n - (s + m4 + m5), s, m4, m5]`, G cells for `[4n - (s + m4 + m5), s, m4, m5]`.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::geode::{DiagonalState, GSlice};
use crate::grid::SliceGrid;
use crate::hypercat::CSlice;

pub const MAGIC: &str = "GEODE-CKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(String),
    #[error("slices disagree: C is ({c_n}, {c_s}), G is ({g_n}, {g_s}), expected ({n}, {s})")]
    SliceMismatch {
        n: u32,
        s: u32,
        c_n: u32,
        c_s: u32,
        g_n: u32,
        g_s: u32,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> CheckpointError {
    CheckpointError::Parse {
        line,
        message: message.into(),
    }
}

/// A decoded checkpoint: the last completed slice pair of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: u32,
    pub s: u32,
    pub c: CSlice,
    pub g: GSlice,
}

impl Checkpoint {
    pub fn into_state(self) -> DiagonalState {
        DiagonalState {
            c: self.c,
            g: self.g,
        }
    }
}

/// Serializes a slice pair in the checkpoint format.
pub fn write_checkpoint<W: Write>(
    mut out: W,
    n: u32,
    s: u32,
    c: &CSlice,
    g: &GSlice,
) -> Result<(), CheckpointError> {
    check_slices(n, s, c, g)?;
    let io = |source| CheckpointError::Io {
        path: PathBuf::new(),
        source,
    };
    let mut body = || -> io::Result<()> {
        writeln!(out, "{MAGIC} {VERSION}")?;
        writeln!(out, "n {n}")?;
        writeln!(out, "s {s}")?;
        for (tag, grid) in [("C", &c.grid), ("G", &g.grid)] {
            writeln!(out, "{tag} {}", grid.cells().len())?;
            for ((m4, m5), v) in grid.iter() {
                writeln!(out, "{m4} {m5} {v}")?;
            }
        }
        writeln!(out, "END")?;
        out.flush()
    };
    body().map_err(io)
}

fn check_slices(n: u32, s: u32, c: &CSlice, g: &GSlice) -> Result<(), CheckpointError> {
    if (c.n, c.s, g.n, g.s) != (n, s, n, s) {
        return Err(CheckpointError::SliceMismatch {
            n,
            s,
            c_n: c.n,
            c_s: c.s,
            g_n: g.n,
            g_s: g.s,
        });
    }
    Ok(())
}

/// Writes a checkpoint to `path` atomically: the data goes to a sibling
/// temporary file which is then renamed over `path`.
pub fn save_checkpoint(
    path: &Path,
    n: u32,
    s: u32,
    c: &CSlice,
    g: &GSlice,
) -> Result<(), CheckpointError> {
    check_slices(n, s, c, g)?;
    let tmp = temp_path(path);
    let result = (|| {
        let file = File::create(&tmp).map_err(|source| CheckpointError::Io {
            path: tmp.clone(),
            source,
        })?;
        let mut writer = BufWriter::new(file);
        write_checkpoint(&mut writer, n, s, c, g).map_err(|e| with_path(e, &tmp))?;
        let file = writer.into_inner().map_err(|e| CheckpointError::Io {
            path: tmp.clone(),
            source: e.into_error(),
        })?;
        file.sync_all().map_err(|source| CheckpointError::Io {
            path: tmp.clone(),
            source,
        })?;
        fs::rename(&tmp, path).map_err(|source| CheckpointError::Io {
            path: path.to_path_buf(),
            source,
        })
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub(crate) fn temp_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!(".{name}.tmp"))
}

fn with_path(e: CheckpointError, path: &Path) -> CheckpointError {
    match e {
        CheckpointError::Io { source, .. } => CheckpointError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    }
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let file = File::open(path).map_err(|source| CheckpointError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_checkpoint(BufReader::new(file)).map_err(|e| with_path(e, path))
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self, what: &str) -> Result<String, CheckpointError> {
        self.line += 1;
        match self.inner.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(source)) => Err(CheckpointError::Io {
                path: PathBuf::new(),
                source,
            }),
            None => Err(parse_err(
                self.line,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    }

    /// A `<tag> <decimal>` line.
    fn tagged(&mut self, tag: &str) -> Result<u64, CheckpointError> {
        let l = self.next(tag)?;
        let value = l
            .strip_prefix(tag)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| {
                parse_err(self.line, format!("expected `{tag} <number>`, found {l:?}"))
            })?;
        parse_small(value).ok_or_else(|| parse_err(self.line, format!("bad number {value:?}")))
    }
}

fn is_decimal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_small(s: &str) -> Option<u64> {
    is_decimal(s).then(|| s.parse().ok()).flatten()
}

fn read_grid<R: BufRead>(
    lines: &mut Lines<R>,
    tag: &str,
    side: usize,
) -> Result<SliceGrid, CheckpointError> {
    let count = lines.tagged(tag)?;
    let expected = (side * side) as u64;
    if count != expected {
        return Err(parse_err(
            lines.line,
            format!("{tag} section has {count} cells, expected {expected}"),
        ));
    }
    let mut cells = Vec::with_capacity(side * side);
    for m4 in 0..side {
        for m5 in 0..side {
            let l = lines.next("a cell")?;
            let mut parts = l.split(' ');
            let (Some(a), Some(b), Some(v), None) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(parse_err(
                    lines.line,
                    format!("expected `<m4> <m5> <value>`, found {l:?}"),
                ));
            };
            if parse_small(a) != Some(m4 as u64) || parse_small(b) != Some(m5 as u64) {
                return Err(parse_err(
                    lines.line,
                    format!("expected cell ({m4}, {m5}), found ({a}, {b})"),
                ));
            }
            let value = is_decimal(v)
                .then(|| BigUint::parse_bytes(v.as_bytes(), 10))
                .flatten()
                .ok_or_else(|| parse_err(lines.line, format!("bad value {v:?}")))?;
            if value.is_zero() {
                return Err(parse_err(lines.line, "cell values must be positive"));
            }
            cells.push(value);
        }
    }
    Ok(SliceGrid::from_cells(side, cells))
}

/// Parses the checkpoint format, reporting the first offending line.
pub fn read_checkpoint<R: BufRead>(reader: R) -> Result<Checkpoint, CheckpointError> {
    let mut lines = Lines {
        inner: reader.lines(),
        line: 0,
    };
    let header = lines.next("header")?;
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| parse_err(1, format!("expected `{MAGIC} <version>`, found {header:?}")))?;
    if version != VERSION.to_string() {
        return Err(CheckpointError::UnsupportedVersion(version.to_string()));
    }
    let n = lines.tagged("n")?;
    let n = u32::try_from(n).map_err(|_| parse_err(lines.line, "n out of range"))?;
    let s = lines.tagged("s")?;
    let s = u32::try_from(s)
        .ok()
        .filter(|&s| s <= n)
        .ok_or_else(|| parse_err(lines.line, format!("slice index {s} exceeds n = {n}")))?;
    let side = n as usize + 1;
    let c = read_grid(&mut lines, "C", side)?;
    let g = read_grid(&mut lines, "G", side)?;
    let end = lines.next("END")?;
    if end != "END" {
        return Err(parse_err(
            lines.line,
            format!("expected END, found {end:?}"),
        ));
    }
    lines.line += 1;
    if lines.inner.next().is_some() {
        return Err(parse_err(lines.line, "trailing content after END"));
    }
    Ok(Checkpoint {
        n,
        s,
        c: CSlice { n, s, grid: c },
        g: GSlice { n, s, grid: g },
    })
}
