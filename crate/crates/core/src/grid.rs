//! Dense `(n+1) x (n+1)` storage for one slice of the recurrence lattice,
//! and the worker pool the slice builders run on.

use std::cell::Cell;
use std::fmt;

use num_bigint::BigUint;

thread_local! {
    static LIVE_GRIDS: Cell<usize> = const { Cell::new(0) };
}

/// Number of [`SliceGrid`] values currently alive on this thread.
pub fn live_grid_count() -> usize {
    LIVE_GRIDS.with(Cell::get)
}

fn track(delta: isize) {
    LIVE_GRIDS.with(|c| c.set(c.get().wrapping_add_signed(delta)));
}

/// Row-major grid indexed by `(m4, m5)`, `m4` outer.
#[derive(PartialEq, Eq)]
pub struct SliceGrid {
    side: usize,
    cells: Vec<BigUint>,
}

impl SliceGrid {
    pub fn from_cells(side: usize, cells: Vec<BigUint>) -> Self {
        assert_eq!(cells.len(), side * side, "grid cell count");
        track(1);
        SliceGrid { side, cells }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, m4: usize, m5: usize) -> &BigUint {
        &self.cells[m4 * self.side + m5]
    }

    pub fn cells(&self) -> &[BigUint] {
        &self.cells
    }

    /// `((m4, m5), value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &BigUint)> + '_ {
        let side = self.side;
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, v)| ((i / side, i % side), v))
    }

    pub fn max_cell(&self) -> Option<&BigUint> {
        self.cells.iter().max()
    }
}

impl Clone for SliceGrid {
    fn clone(&self) -> Self {
        SliceGrid::from_cells(self.side, self.cells.clone())
    }
}

impl Drop for SliceGrid {
    fn drop(&mut self) {
        track(-1);
    }
}

impl fmt::Debug for SliceGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SliceGrid")
            .field("side", &self.side)
            .field("cells", &self.cells.len())
            .finish()
    }
}

/// Thread pool for intra-slice parallelism. With one worker everything runs
/// inline on the calling thread.
pub struct Workers {
    count: usize,
    pool: Option<rayon::ThreadPool>,
}

impl Workers {
    pub fn sequential() -> Self {
        Workers {
            count: 1,
            pool: None,
        }
    }

    pub fn new(count: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let count = count.max(1);
        if count == 1 {
            return Ok(Workers::sequential());
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(count).build()?;
        Ok(Workers {
            count,
            pool: Some(pool),
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_parallel(&self) -> bool {
        self.pool.is_some()
    }

    pub(crate) fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(op),
            None => op(),
        }
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::sequential()
    }
}

impl fmt::Debug for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Workers")
            .field("count", &self.count)
            .finish()
    }
}
