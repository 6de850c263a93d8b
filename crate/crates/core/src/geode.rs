//! Geode elements.
//!
//! The Geode `G` is the series with `S - 1 = (t2 + t3 + t4 + t5) G`. Reading
//! off one coefficient of that identity and solving for the `m2 + 1` term
//! gives the recurrence
//!
//! ```text
//! G[m] = C[m + e2] - G[m + e2 - e3] - G[m + e2 - e4] - G[m + e2 - e5]
//! ```
//!
//! with terms dropped when their index would go negative. Two evaluators live
//! here: a memoized recursion for arbitrary targets, and the slice engine for
//! diagonal targets `H(n) = G[n, n, n, n]`, which sweeps the `(n+1)^3` lattice
//! one `m3 = s` slice at a time, holding only two slices of each kind.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{CheckedSub, Zero};
use rayon::prelude::*;

use crate::grid::{live_grid_count, SliceGrid, Workers};
use crate::hypercat::{hyper_catalan, make_c_slice0_on, make_c_slice_on, CSlice};
use crate::typevec::{Shape, TypeVector};

/// Geode values computed so far, keyed by type vector.
#[derive(Debug, Default, Clone)]
pub struct GeodeMemo {
    values: HashMap<TypeVector, BigUint>,
    expansions: u64,
}

impl GeodeMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, m: &TypeVector) -> Option<&BigUint> {
        self.values.get(m)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// How many elements have been evaluated (not just looked up) so far.
    pub fn expansions(&self) -> u64 {
        self.expansions
    }
}

const PIVOT: Shape = Shape::Triangle;
const OTHERS: [Shape; 3] = [Shape::Quadrilateral, Shape::Pentagon, Shape::Hexagon];

/// Lattice neighbours `m + e2 - e_k` that `G[m]` depends on.
fn dependencies(m: TypeVector) -> impl Iterator<Item = TypeVector> {
    let up = m.incremented(PIVOT);
    OTHERS.into_iter().filter_map(move |k| up.decremented(k))
}

/// `G[m]` by the memoized recurrence. Every intermediate lands in `memo`.
///
/// The recursion is driven by an explicit stack, so deep targets do not
/// exhaust the thread stack.
pub fn geode_element(m: TypeVector, memo: &mut GeodeMemo) -> BigUint {
    let mut stack = vec![m];
    while let Some(&top) = stack.last() {
        if memo.values.contains_key(&top) {
            stack.pop();
            continue;
        }
        let before = stack.len();
        stack.extend(dependencies(top).filter(|d| !memo.values.contains_key(d)));
        if stack.len() > before {
            continue;
        }
        let mut value = hyper_catalan(top.incremented(PIVOT));
        for dep in dependencies(top) {
            value = value
                .checked_sub(&memo.values[&dep])
                .unwrap_or_else(|| panic!("negative Geode value at {top}"));
        }
        memo.values.insert(top, value);
        memo.expansions += 1;
        stack.pop();
    }
    memo.values[&m].clone()
}

/// One `m3 = s` slice of Geode values for the diagonal run of size `n`.
///
/// Cell `(m4, m5)` holds `G[4n - (s + m4 + m5), s, m4, m5]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSlice {
    pub n: u32,
    pub s: u32,
    pub grid: SliceGrid,
}

impl GSlice {
    pub fn type_at(n: u32, s: u32, m4: u32, m5: u32) -> TypeVector {
        TypeVector::new(4 * n - (s + m4 + m5), s, m4, m5)
    }

    pub fn get(&self, m4: usize, m5: usize) -> &BigUint {
        self.grid.get(m4, m5)
    }
}

/// Builds Geode slice `s` from hyper-Catalan slice `s` and Geode slice `s - 1`.
///
/// # Panics
///
/// If any cell comes out non-positive; that can only happen when the inputs
/// are inconsistent.
pub fn make_g_slice(s: u32, n: u32, c: &CSlice, prev: Option<&GSlice>) -> GSlice {
    make_g_slice_on(s, n, c, prev, &Workers::sequential())
}

/// [`make_g_slice`], processing anti-diagonals `m4 + m5 = d` in parallel when
/// `workers` has more than one thread. Results are identical either way.
pub fn make_g_slice_on(
    s: u32,
    n: u32,
    c: &CSlice,
    prev: Option<&GSlice>,
    workers: &Workers,
) -> GSlice {
    assert_eq!((c.n, c.s), (n, s), "make_g_slice: C slice does not match");
    match prev {
        Some(p) => assert_eq!(
            (p.n, p.s + 1),
            (n, s),
            "make_g_slice: previous slice mismatch"
        ),
        None => assert_eq!(s, 0, "make_g_slice: slice {s} needs its predecessor"),
    }
    let side = n as usize + 1;

    let cell = |cells: &[BigUint], m4: usize, m5: usize| -> BigUint {
        let mut value = c.get(m4, m5).clone();
        let below = prev.map(|p| p.get(m4, m5));
        let left = (m4 > 0).then(|| &cells[(m4 - 1) * side + m5]);
        let down = (m5 > 0).then(|| &cells[m4 * side + m5 - 1]);
        for term in [below, left, down].into_iter().flatten() {
            value = value.checked_sub(term).unwrap_or_else(|| {
                panic!(
                    "negative Geode cell at {}",
                    GSlice::type_at(n, s, m4 as u32, m5 as u32)
                )
            });
        }
        assert!(
            !value.is_zero(),
            "zero Geode cell at {}",
            GSlice::type_at(n, s, m4 as u32, m5 as u32)
        );
        value
    };

    let mut cells = vec![BigUint::zero(); side * side];
    if workers.is_parallel() {
        workers.install(|| {
            for d in 0..=2 * (side - 1) {
                let lo = d.saturating_sub(side - 1);
                let hi = d.min(side - 1);
                let front: Vec<BigUint> = (lo..=hi)
                    .into_par_iter()
                    .map(|m4| cell(&cells, m4, d - m4))
                    .collect();
                for (m4, v) in (lo..=hi).zip(front) {
                    cells[m4 * side + d - m4] = v;
                }
            }
        });
    } else {
        for m4 in 0..side {
            for m5 in 0..side {
                cells[m4 * side + m5] = cell(&cells, m4, m5);
            }
        }
    }
    GSlice {
        n,
        s,
        grid: SliceGrid::from_cells(side, cells),
    }
}

/// Telemetry for one finished slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceProgress {
    pub n: u32,
    pub s: u32,
    /// Time spent building the hyper-Catalan slice (includes the closed-form
    /// seed for slice 0).
    pub c_elapsed: Duration,
    pub g_elapsed: Duration,
    pub elapsed: Duration,
    /// Decimal digits of the largest Geode value in the slice.
    pub max_digits: usize,
    /// Slice grids alive on the driver thread right after the Geode slice
    /// was built, before the previous pair was released.
    pub live_grids: usize,
}

/// The last completed pair of slices of a diagonal run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalState {
    pub c: CSlice,
    pub g: GSlice,
}

impl DiagonalState {
    pub fn n(&self) -> u32 {
        self.g.n
    }

    pub fn s(&self) -> u32 {
        self.g.s
    }

    /// `H(n)`, once the final slice is in.
    pub fn result(&self) -> Option<&BigUint> {
        let n = self.g.n as usize;
        (self.g.s == self.g.n).then(|| self.g.get(n, n))
    }
}

#[derive(Debug)]
pub enum DiagonalOutcome {
    Complete(BigUint),
    /// The slice callback asked to stop; the state is the last slice built.
    Interrupted(DiagonalState),
}

pub(crate) fn decimal_digits(x: &BigUint) -> usize {
    x.to_str_radix(10).len()
}

/// Computes `H(n) = G[n, n, n, n]` slice by slice.
///
/// `on_slice` runs after every slice with the current state and its
/// telemetry.
pub fn geode_diagonal(n: u32, mut on_slice: impl FnMut(&SliceProgress)) -> BigUint {
    let outcome = geode_diagonal_from(n, None, &Workers::sequential(), |_, p| {
        on_slice(p);
        ControlFlow::Continue(())
    });
    match outcome {
        DiagonalOutcome::Complete(v) => v,
        DiagonalOutcome::Interrupted(_) => unreachable!("callback never breaks"),
    }
}

/// The resumable form of [`geode_diagonal`]: starts after `start` when given,
/// and stops early when `on_slice` breaks.
pub fn geode_diagonal_from(
    n: u32,
    start: Option<DiagonalState>,
    workers: &Workers,
    mut on_slice: impl FnMut(&DiagonalState, &SliceProgress) -> ControlFlow<()>,
) -> DiagonalOutcome {
    let mut state = start;
    if let Some(st) = &state {
        assert_eq!(st.n(), n, "resume state belongs to another n");
        assert_eq!(st.c.s, st.g.s, "resume state slices disagree");
    }
    let first = state.as_ref().map_or(0, |st| st.s() + 1);

    for s in first..=n {
        let t0 = Instant::now();
        let c = match &state {
            None => make_c_slice0_on(n, workers),
            Some(st) => make_c_slice_on(s, n, &st.c, workers),
        };
        let c_elapsed = t0.elapsed();
        let t1 = Instant::now();
        let g = make_g_slice_on(s, n, &c, state.as_ref().map(|st| &st.g), workers);
        let g_elapsed = t1.elapsed();
        let live_grids = live_grid_count();

        let next = DiagonalState { c, g };
        state = Some(next);
        let st = state.as_ref().expect("just set");
        let progress = SliceProgress {
            n,
            s,
            c_elapsed,
            g_elapsed,
            elapsed: t0.elapsed(),
            max_digits: st.g.grid.max_cell().map_or(0, decimal_digits),
            live_grids,
        };
        if on_slice(st, &progress).is_break() && s < n {
            return DiagonalOutcome::Interrupted(state.expect("just set"));
        }
    }

    let st = state.expect("at least one slice");
    DiagonalOutcome::Complete(st.result().expect("final slice").clone())
}
