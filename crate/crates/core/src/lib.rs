//! Exact hyper-Catalan numbers and 4D Geode elements.
//!
//! The headline computation is the diagonal Geode element
//! `H(n) = G[n, n, n, n]`, built one `m3` slice at a time from ratio-propagated
//! hyper-Catalan slices ([`geode::geode_diagonal`], [`engine::run_diagonal`]).
//! A memoized recursion, a formal power series solver with exact division,
//! and a plane-tree enumerator compute the same numbers independently and
//! serve as cross-checks.

pub mod checkpoint;
pub mod engine;
pub mod geode;
pub mod grid;
pub mod hypercat;
pub mod series;
pub mod subdigon;
pub mod typevec;
pub mod verify;

pub use geode::{geode_diagonal, geode_element, GSlice, GeodeMemo};
pub use hypercat::{hyper_catalan, neighbor_ratio, CSlice};
pub use typevec::{Shape, TypeVector};

/// Arbitrary-precision natural number used for every count.
pub type BigNat = num_bigint::BigUint;
