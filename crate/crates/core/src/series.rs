//! Truncated formal power series in `t2, t3, t4, t5`.
//!
//! This is the slow, obviously-correct route to the same numbers the slice
//! engine produces. `S` is obtained as the fixed point of
//! `S = 1 + t2 S^2 + t3 S^3 + t4 S^4 + t5 S^5`, the Geode as the exact
//! quotient `(S - 1) / (t2 + t3 + t4 + t5)`. Neither step touches the
//! closed form, so agreement with it is a genuine cross-check.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::hypercat::hyper_catalan;
use crate::typevec::{vectors_of_degree, Shape, TypeVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("monomial {m} has degree {degree}, above the series cap {cap}")]
    DegreeOverflow {
        m: TypeVector,
        degree: u64,
        cap: u32,
    },
    #[error("dividend must have constant term 1")]
    ConstantTerm,
    #[error("cannot divide a series truncated at degree 0")]
    CapTooSmall,
    #[error("division by t2+t3+t4+t5 left remainder {coefficient} at {m}")]
    NonZeroRemainder { m: TypeVector, coefficient: BigInt },
    #[error("quotient coefficient at {m} is negative")]
    NegativeQuotient { m: TypeVector },
}

/// A polynomial in four variables with every monomial of total degree
/// `<= cap`. Absent monomials are zero; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    cap: u32,
    coeffs: BTreeMap<TypeVector, BigUint>,
}

impl TruncatedSeries {
    pub fn zero(cap: u32) -> Self {
        TruncatedSeries {
            cap,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(cap: u32) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs.insert(TypeVector::ZERO, BigUint::one());
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs, dropping terms
    /// above the cap and summing repeated exponents.
    pub fn from_terms(cap: u32, terms: impl IntoIterator<Item = (TypeVector, BigUint)>) -> Self {
        let mut s = Self::zero(cap);
        for (m, c) in terms {
            s.add_term(m, &c);
        }
        s
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Non-zero terms in lexicographic order of exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&TypeVector, &BigUint)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `[t^m]` of the series.
    pub fn coefficient(&self, m: TypeVector) -> Result<BigUint, SeriesError> {
        if m.faces() > u64::from(self.cap) {
            return Err(SeriesError::DegreeOverflow {
                m,
                degree: m.faces(),
                cap: self.cap,
            });
        }
        Ok(self.coeffs.get(&m).cloned().unwrap_or_default())
    }

    fn add_term(&mut self, m: TypeVector, c: &BigUint) {
        if c.is_zero() || m.faces() > u64::from(self.cap) {
            return;
        }
        *self.coeffs.entry(m).or_default() += c;
    }

    /// Product truncated at `cap`.
    pub fn mul_truncated(&self, other: &TruncatedSeries, cap: u32) -> TruncatedSeries {
        let cap = cap.min(self.cap).min(other.cap);
        let rhs: Vec<(TypeVector, u64, &BigUint)> = other
            .coeffs
            .iter()
            .map(|(m, c)| (*m, m.faces(), c))
            .collect();
        let mut out = TruncatedSeries::zero(cap);
        for (a, ca) in &self.coeffs {
            let da = a.faces();
            for &(b, db, cb) in &rhs {
                if da + db > u64::from(cap) {
                    continue;
                }
                let m = TypeVector(std::array::from_fn(|i| a.0[i] + b.0[i]));
                *out.coeffs.entry(m).or_default() += ca * cb;
            }
        }
        out
    }

    /// `t_k * self`, truncated at `cap`.
    fn shifted(&self, shape: Shape, cap: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(cap);
        for (m, c) in &self.coeffs {
            out.add_term(m.incremented(shape), c);
        }
        out
    }

    fn add_assign(&mut self, other: &TruncatedSeries) {
        for (m, c) in &other.coeffs {
            self.add_term(*m, c);
        }
    }
}

/// `1 + t2 S^2 + t3 S^3 + t4 S^4 + t5 S^5`, truncated at `cap`.
fn quintic_image(s: &TruncatedSeries, cap: u32) -> TruncatedSeries {
    let mut out = TruncatedSeries::one(cap);
    if cap == 0 {
        return out;
    }
    // Powers are only needed below `cap`; the t_k factor supplies one degree.
    let inner = cap - 1;
    let mut power = s.clone();
    for shape in Shape::ALL {
        power = power.mul_truncated(s, inner);
        out.add_assign(&power.shifted(shape, cap));
    }
    out
}

/// The hyper-Catalan generating series `S`, exact through total degree `cap`.
pub fn series_solve(cap: u32) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(0);
    // Pass `d` makes every coefficient of degree `<= d` final.
    for d in 1..=cap {
        s = TruncatedSeries {
            cap: d,
            coeffs: s.coeffs,
        };
        s = quintic_image(&s, d);
    }
    s.cap = cap;
    s
}

/// Whether `1 - S + t2 S^2 + t3 S^3 + t4 S^4 + t5 S^5` vanishes through
/// degree `S.cap`.
pub fn verify_geometric_zero(s: &TruncatedSeries) -> bool {
    quintic_image(s, s.cap) == *s
}

/// The Geode: the unique `G` with `(t2 + t3 + t4 + t5) G = S - 1`.
///
/// Works one total degree at a time. Within a degree, monomials are taken in
/// descending lexicographic order, so the leading monomial of the running
/// remainder is always divided by the `t2` term of the divisor; the
/// `t3, t4, t5` terms then only touch lexicographically smaller monomials of
/// the same degree. Anything left once `m2 = 0` is reached is a remainder.
pub fn divide_by_s1(s: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    if s.cap == 0 {
        return Err(SeriesError::CapTooSmall);
    }
    if s.coeffs.get(&TypeVector::ZERO) != Some(&BigUint::one()) {
        return Err(SeriesError::ConstantTerm);
    }
    let mut quotient = TruncatedSeries::zero(s.cap - 1);
    for degree in 1..=s.cap {
        let order = vectors_of_degree(degree);
        let mut rem: BTreeMap<TypeVector, BigInt> = order
            .iter()
            .filter_map(|m| s.coeffs.get(m).map(|c| (*m, BigInt::from(c.clone()))))
            .collect();
        for m in order {
            let Some(c) = rem.remove(&m) else { continue };
            if c.is_zero() {
                continue;
            }
            let Some(q) = m.decremented(Shape::Triangle) else {
                return Err(SeriesError::NonZeroRemainder { m, coefficient: c });
            };
            for k in [Shape::Quadrilateral, Shape::Pentagon, Shape::Hexagon] {
                *rem.entry(q.incremented(k)).or_default() -= &c;
            }
            match c.sign() {
                Sign::Plus => quotient.add_term(q, c.magnitude()),
                _ => return Err(SeriesError::NegativeQuotient { m: q }),
            }
        }
    }
    Ok(quotient)
}

/// Number of subdigons with exactly `faces` faces: `sum C[m]` over `|m| = faces`.
pub fn face_layer_count(faces: u32) -> BigUint {
    vectors_of_degree(faces)
        .into_iter()
        .map(hyper_catalan)
        .sum()
}

/// Number of monomials of degree `faces` in four variables, `binomial(faces + 3, 3)`.
pub fn monomial_count(faces: u64) -> BigUint {
    let f = BigUint::from(faces);
    (&f + 1u32) * (&f + 2u32) * (&f + 3u32) / 6u32
}
