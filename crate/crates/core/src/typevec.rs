//! Type vectors `[m2, m3, m4, m5]` and the structural counts derived from them.
//!
//! A type vector records how many triangles, quadrilaterals, pentagons and
//! hexagons a subdivided roofed polygon contains. Every closed form and
//! recurrence in the crate is phrased in terms of the edge count `E`, the
//! vertex count `V` and the face count `F` of that type.
//!
//! Note on `V`: the vertex count is `2 + m2 + 2*m3 + 3*m4 + 4*m5`. A lone
//! hexagon has 6 vertices, and the `4*m5` coefficient is the one that keeps
//! every hyper-Catalan value integral. Some published statements of the
//! closed form print `5*m5` there; that version is wrong.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Polygon shape of a face, named by the index it occupies in a type vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Triangle = 2,
    Quadrilateral = 3,
    Pentagon = 4,
    Hexagon = 5,
}

impl Shape {
    pub const ALL: [Shape; 4] = [
        Shape::Triangle,
        Shape::Quadrilateral,
        Shape::Pentagon,
        Shape::Hexagon,
    ];

    /// The shape index 2..=5 (a `k`-index shape is a `(k+1)`-gon).
    pub fn index(self) -> usize {
        self as usize
    }

    /// Position of this shape inside the 4-component array.
    pub fn slot(self) -> usize {
        self as usize - 2
    }

    pub fn from_index(k: usize) -> Option<Shape> {
        match k {
            2 => Some(Shape::Triangle),
            3 => Some(Shape::Quadrilateral),
            4 => Some(Shape::Pentagon),
            5 => Some(Shape::Hexagon),
            _ => None,
        }
    }
}

/// The multi-index `[m2, m3, m4, m5]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TypeVector(pub [u32; 4]);

impl TypeVector {
    pub const ZERO: TypeVector = TypeVector([0; 4]);

    pub const fn new(m2: u32, m3: u32, m4: u32, m5: u32) -> Self {
        TypeVector([m2, m3, m4, m5])
    }

    pub fn get(&self, shape: Shape) -> u32 {
        self.0[shape.slot()]
    }

    pub fn components(&self) -> [u32; 4] {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 4]
    }

    /// `E_m = 1 + 2 m2 + 3 m3 + 4 m4 + 5 m5`.
    pub fn edges(&self) -> u64 {
        let [a, b, c, d] = self.0.map(u64::from);
        1 + 2 * a + 3 * b + 4 * c + 5 * d
    }

    /// `V_m = 2 + m2 + 2 m3 + 3 m4 + 4 m5`.
    pub fn vertices(&self) -> u64 {
        let [a, b, c, d] = self.0.map(u64::from);
        2 + a + 2 * b + 3 * c + 4 * d
    }

    /// `F_m = m2 + m3 + m4 + m5`, the total degree of `t^m`.
    pub fn faces(&self) -> u64 {
        self.0.iter().map(|&x| u64::from(x)).sum()
    }

    /// `m + e_k`.
    pub fn incremented(&self, shape: Shape) -> TypeVector {
        let mut out = *self;
        out.0[shape.slot()] += 1;
        out
    }

    /// `m - e_k`, or `None` when that component is already zero.
    pub fn decremented(&self, shape: Shape) -> Option<TypeVector> {
        let mut out = *self;
        let slot = &mut out.0[shape.slot()];
        *slot = slot.checked_sub(1)?;
        Some(out)
    }
}

impl From<[u32; 4]> for TypeVector {
    fn from(m: [u32; 4]) -> Self {
        TypeVector(m)
    }
}

/// Canonical rendering `m2,m3,m4,m5`.
impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a},{b},{c},{d}")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseTypeVectorError {
    #[error("expected 4 comma-separated components, found {0}")]
    Arity(usize),
    #[error("invalid component {0:?}")]
    Component(String),
}

impl FromStr for TypeVector {
    type Err = ParseTypeVectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(ParseTypeVectorError::Arity(parts.len()));
        }
        let mut out = [0u32; 4];
        for (slot, part) in out.iter_mut().zip(&parts) {
            // `u32::from_str` accepts a leading '+', the canonical form does not.
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseTypeVectorError::Component(part.to_string()));
            }
            *slot = part
                .parse()
                .map_err(|_| ParseTypeVectorError::Component(part.to_string()))?;
        }
        Ok(TypeVector(out))
    }
}

/// Every type vector with all components `<= bound`, in lexicographic order.
pub fn box_vectors(bound: u32) -> impl Iterator<Item = TypeVector> {
    (0..=bound).flat_map(move |a| {
        (0..=bound).flat_map(move |b| {
            (0..=bound).flat_map(move |c| (0..=bound).map(move |d| TypeVector::new(a, b, c, d)))
        })
    })
}

/// Every type vector with exactly `degree` faces, in descending lexicographic order.
pub fn vectors_of_degree(degree: u32) -> Vec<TypeVector> {
    let mut out = Vec::new();
    for a in (0..=degree).rev() {
        for b in (0..=degree - a).rev() {
            for c in (0..=degree - a - b).rev() {
                out.push(TypeVector::new(a, b, c, degree - a - b - c));
            }
        }
    }
    out
}
