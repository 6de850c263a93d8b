//! Exact hyper-Catalan numbers.
//!
//! `C[m] = (E_m - 1)! / ((V_m - 1)! * m2! * m3! * m4! * m5!)` counts the
//! subdivisions of a roofed polygon into `m2` triangles, `m3` quadrilaterals,
//! `m4` pentagons and `m5` hexagons. Large runs avoid the factorials entirely:
//! neighbouring values differ by a small rational factor, so whole slices of
//! the lattice are filled by ratio propagation from a single seed.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::grid::{SliceGrid, Workers};
use crate::typevec::{Shape, TypeVector};

/// Divides `num` by `den`, panicking if the division leaves a remainder.
///
/// Every division in this crate is exact by construction; a remainder means
/// an arithmetic or indexing bug, and is fatal in release builds as well.
pub(crate) fn exact_div(num: &BigUint, den: &BigUint, context: impl FnOnce() -> String) -> BigUint {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "inexact division: {}", context());
    q
}

/// Memoized factorials keyed by argument.
///
/// Only the arguments actually requested are stored. A miss is filled by
/// multiplying up from the largest cached argument below it.
#[derive(Debug, Default)]
pub struct FactorialCache {
    memo: Mutex<BTreeMap<u64, Arc<BigUint>>>,
}

impl FactorialCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, k: u64) -> Arc<BigUint> {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = memo.get(&k) {
            return Arc::clone(v);
        }
        let (start, mut acc) = match memo.range(..k).next_back() {
            Some((&j, v)) => (j + 1, BigUint::clone(v)),
            None => (1, BigUint::one()),
        };
        for i in start..=k {
            acc *= i;
        }
        let acc = Arc::new(acc);
        memo.insert(k, Arc::clone(&acc));
        acc
    }

    /// Number of distinct arguments memoized so far.
    pub fn len(&self) -> usize {
        self.memo.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn global_factorials() -> &'static FactorialCache {
    static CACHE: OnceLock<FactorialCache> = OnceLock::new();
    CACHE.get_or_init(FactorialCache::new)
}

/// `k!` from the process-wide factorial cache.
pub fn factorial_cached(k: u64) -> BigUint {
    BigUint::clone(&global_factorials().get(k))
}

/// The hyper-Catalan number `C[m]`, via the closed form.
pub fn hyper_catalan(m: TypeVector) -> BigUint {
    hyper_catalan_with(global_factorials(), m)
}

/// [`hyper_catalan`] against an explicit factorial cache.
pub fn hyper_catalan_with(cache: &FactorialCache, m: TypeVector) -> BigUint {
    let top = cache.get(m.edges() - 1);
    let mut den = BigUint::clone(&cache.get(m.vertices() - 1));
    for x in m.components() {
        if x > 1 {
            den *= &*cache.get(u64::from(x));
        }
    }
    exact_div(&top, &den, || format!("closed form for C[{m}]"))
}

/// `C[m - e_j + e_k] / C[m]` as an unreduced fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborRatio {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl NeighborRatio {
    /// Multiplies `value` by the ratio. The product by the numerator comes
    /// first so the division is exact whenever `value` is the right `C[m]`.
    pub fn apply(&self, value: &BigUint) -> BigUint {
        let scaled = value * &self.numerator;
        exact_div(&scaled, &self.denominator, || {
            format!(
                "ratio {}/{} applied to {value}",
                self.numerator, self.denominator
            )
        })
    }
}

fn rising_factorial(x: u64, count: usize) -> BigUint {
    (0..count as u64).fold(BigUint::one(), |acc, i| acc * (x + i))
}

/// Ratio of hyper-Catalan neighbours, `C[m - e_j + e_k] / C[m]`:
///
/// `RisingFactorial(E_m, k-j) * m_j / (RisingFactorial(V_m, k-j) * (1 + m_k))`
///
/// # Panics
///
/// If `j >= k` or `m_j == 0`.
pub fn neighbor_ratio(m: TypeVector, j: Shape, k: Shape) -> NeighborRatio {
    assert!(j < k, "neighbor_ratio requires j < k, got {j:?}, {k:?}");
    let mj = m.get(j);
    assert!(
        mj >= 1,
        "neighbor_ratio: component {} of {m} is zero",
        j.index()
    );
    let steps = k.index() - j.index();
    NeighborRatio {
        numerator: rising_factorial(m.edges(), steps) * mj,
        denominator: rising_factorial(m.vertices(), steps) * (u64::from(m.get(k)) + 1),
    }
}

/// One `m3 = s` slice of hyper-Catalan values for the diagonal run of size `n`.
///
/// Cell `(m4, m5)` holds `C[1 + 4n - (s + m4 + m5), s, m4, m5]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CSlice {
    pub n: u32,
    pub s: u32,
    pub grid: SliceGrid,
}

impl CSlice {
    /// The type vector cell `(m4, m5)` stands for.
    pub fn type_at(n: u32, s: u32, m4: u32, m5: u32) -> TypeVector {
        TypeVector::new(1 + 4 * n - (s + m4 + m5), s, m4, m5)
    }

    pub fn get(&self, m4: usize, m5: usize) -> &BigUint {
        self.grid.get(m4, m5)
    }
}

/// Slice 0: one closed-form seed at `(0, 0)`, every other cell from an
/// already-built neighbour through the pentagon or hexagon ratio.
pub fn make_c_slice0(n: u32) -> CSlice {
    make_c_slice0_on(n, &Workers::sequential())
}

pub fn make_c_slice0_on(n: u32, workers: &Workers) -> CSlice {
    let side = n as usize + 1;
    let seed = hyper_catalan(CSlice::type_at(n, 0, 0, 0));

    // Row m4 = 0 chains along m5 through the hexagon ratio.
    let mut first_row = Vec::with_capacity(side);
    first_row.push(seed);
    for m5 in 1..side as u32 {
        let from = CSlice::type_at(n, 0, 0, m5 - 1);
        let r = neighbor_ratio(from, Shape::Triangle, Shape::Hexagon);
        let next = r.apply(&first_row[m5 as usize - 1]);
        first_row.push(next);
    }

    // Each column m5 then chains along m4 through the pentagon ratio.
    let column = |m5: usize, top: &BigUint| -> Vec<BigUint> {
        let mut col = Vec::with_capacity(side);
        col.push(top.clone());
        for m4 in 1..side as u32 {
            let from = CSlice::type_at(n, 0, m4 - 1, m5 as u32);
            let r = neighbor_ratio(from, Shape::Triangle, Shape::Pentagon);
            let next = r.apply(&col[m4 as usize - 1]);
            col.push(next);
        }
        col
    };
    let columns: Vec<Vec<BigUint>> = if workers.is_parallel() {
        workers.install(|| {
            first_row
                .par_iter()
                .enumerate()
                .map(|(m5, top)| column(m5, top))
                .collect()
        })
    } else {
        first_row
            .iter()
            .enumerate()
            .map(|(m5, top)| column(m5, top))
            .collect()
    };

    let mut columns: Vec<std::vec::IntoIter<BigUint>> =
        columns.into_iter().map(Vec::into_iter).collect();
    let mut cells = Vec::with_capacity(side * side);
    for _m4 in 0..side {
        for col in columns.iter_mut() {
            cells.push(col.next().expect("column length"));
        }
    }
    CSlice {
        n,
        s: 0,
        grid: SliceGrid::from_cells(side, cells),
    }
}

/// Slice `s >= 1` from slice `s - 1`: every cell trades one triangle of its
/// predecessor for a quadrilateral.
pub fn make_c_slice(s: u32, n: u32, prev: &CSlice) -> CSlice {
    make_c_slice_on(s, n, prev, &Workers::sequential())
}

pub fn make_c_slice_on(s: u32, n: u32, prev: &CSlice, workers: &Workers) -> CSlice {
    assert!(s >= 1, "make_c_slice: slice 0 has no predecessor");
    assert_eq!(prev.n, n, "make_c_slice: predecessor built for another n");
    assert_eq!(prev.s + 1, s, "make_c_slice: predecessor is not slice s-1");
    let side = n as usize + 1;
    let cell = |idx: usize| -> BigUint {
        let (m4, m5) = ((idx / side) as u32, (idx % side) as u32);
        let from = CSlice::type_at(n, s - 1, m4, m5);
        let r = neighbor_ratio(from, Shape::Triangle, Shape::Quadrilateral);
        r.apply(prev.grid.get(m4 as usize, m5 as usize))
    };
    let cells: Vec<BigUint> = if workers.is_parallel() {
        workers.install(|| (0..side * side).into_par_iter().map(cell).collect())
    } else {
        (0..side * side).map(cell).collect()
    };
    CSlice {
        n,
        s,
        grid: SliceGrid::from_cells(side, cells),
    }
}
