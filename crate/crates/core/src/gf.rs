//! Prime-field arithmetic and symplectic vectors.
//!
//! A [`FieldVector`] of length `2n` indexes the Weyl operator
//! `X^{u_1} Z^{v_1} ⊗ ... ⊗ X^{u_n} Z^{v_n}` and is always stored in the
//! interleaved layout `(u_1, v_1, ..., u_n, v_n)`. There is no other layout.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// The prime field `F_d`, `2 <= d <= 251`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    d: u8,
}

fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut q = 2;
    while q * q <= d {
        if d.is_multiple_of(q) {
            return false;
        }
        q += 1;
    }
    true
}

impl Field {
    pub fn new(d: u32) -> Result<Self> {
        if d > 251 || !is_prime(d) {
            return Err(Error::NotPrime(d));
        }
        Ok(Field { d: d as u8 })
    }

    #[inline]
    pub fn order(self) -> u8 {
        self.d
    }

    #[inline]
    pub fn size(self) -> usize {
        self.d as usize
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.d as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.d as u16 - b as u16) % self.d as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.d - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.d as u16) as u8
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        let a = a % self.d;
        if a == 0 {
            return None;
        }
        // a^(d-2) by square-and-multiply
        let mut result = 1u8;
        let mut base = a;
        let mut e = self.d as u32 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(result)
    }

    pub fn element(self, value: u32) -> Result<FieldElement> {
        if value >= self.d as u32 {
            return Err(Error::CoordinateOutOfRange {
                value,
                modulus: self.d,
            });
        }
        Ok(FieldElement {
            value: value as u8,
            field: self,
        })
    }

    pub(crate) fn check(self, other: Field) -> Result<()> {
        if self != other {
            return Err(Error::ModulusMismatch(self.d, other.d));
        }
        Ok(())
    }
}

/// An element of `F_d` carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u8,
    field: Field,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u8 {
        self.value
    }

    #[inline]
    pub fn field(self) -> Field {
        self.field
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector over `F_d`, one byte per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    field: Field,
    coords: Vec<u8>,
}

impl FieldVector {
    pub fn zero(field: Field, len: usize) -> Self {
        FieldVector {
            field,
            coords: vec![0; len],
        }
    }

    /// Builds a vector, rejecting coordinates `>= d`.
    pub fn new(field: Field, coords: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = coords.iter().find(|&&c| c >= field.d) {
            return Err(Error::CoordinateOutOfRange {
                value: bad as u32,
                modulus: field.d,
            });
        }
        Ok(FieldVector { field, coords })
    }

    /// Builds a vector from arbitrary integers, reducing them mod `d`.
    pub fn from_ints(field: Field, ints: &[i64]) -> Self {
        let d = field.d as i64;
        FieldVector {
            field,
            coords: ints.iter().map(|&x| x.rem_euclid(d) as u8).collect(),
        }
    }

    pub(crate) fn from_raw(field: Field, coords: Vec<u8>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < field.d));
        FieldVector { field, coords }
    }

    /// Unit vector `e_i` of the given length.
    pub fn unit(field: Field, len: usize, i: usize) -> Self {
        let mut v = FieldVector::zero(field, len);
        v.coords[i] = 1;
        v
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Number of `(u, v)` pairs, i.e. `n` for a vector of length `2n`.
    pub fn num_pairs(&self) -> usize {
        self.coords.len() / 2
    }

    #[inline]
    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u8> {
        self.coords
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.coords[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        assert!(value < self.field.d);
        self.coords[i] = value;
    }

    /// The `i`-th `(u_i, v_i)` pair (0-based).
    pub fn pair(&self, i: usize) -> (u8, u8) {
        (self.coords[2 * i], self.coords[2 * i + 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &FieldVector) -> Result<()> {
        self.field.check(other.field)?;
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_compatible(other)?;
        Ok(self.add(other))
    }

    /// Componentwise sum. Panics on mismatched shapes; see [`vec_add`].
    pub fn add(&self, other: &FieldVector) -> FieldVector {
        assert_eq!(self.len(), other.len());
        let f = self.field;
        FieldVector {
            field: f,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &FieldVector) -> FieldVector {
        assert_eq!(self.len(), other.len());
        let f = self.field;
        FieldVector {
            field: f,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u8) -> FieldVector {
        let f = self.field;
        FieldVector {
            field: f,
            coords: self.coords.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: u8, other: &FieldVector) {
        debug_assert_eq!(self.len(), other.len());
        if c == 0 {
            return;
        }
        let f = self.field;
        for (a, &b) in self.coords.iter_mut().zip(&other.coords) {
            *a = f.add(*a, f.mul(c, b));
        }
    }

    /// Symplectic form `Σ_i u_i v'_i - v_i u'_i`. Panics on mismatched shapes;
    /// see [`symplectic_form`].
    pub fn symplectic(&self, other: &FieldVector) -> u8 {
        assert_eq!(self.len(), other.len());
        let d = self.field.d as u32;
        let mut plus = 0u32;
        let mut minus = 0u32;
        for (x, y) in self.coords.chunks_exact(2).zip(other.coords.chunks_exact(2)) {
            plus += x[0] as u32 * y[1] as u32;
            minus += x[1] as u32 * y[0] as u32;
            if plus >= 1 << 24 {
                plus %= d;
            }
            if minus >= 1 << 24 {
                minus %= d;
            }
        }
        ((plus % d + d - minus % d) % d) as u8
    }

    /// Ordinary dot product `Σ_i a_i b_i`.
    pub fn dot(&self, other: &FieldVector) -> u8 {
        assert_eq!(self.len(), other.len());
        let d = self.field.d as u32;
        let mut acc = 0u32;
        for (&a, &b) in self.coords.iter().zip(&other.coords) {
            acc += a as u32 * b as u32;
            if acc >= 1 << 24 {
                acc %= d;
            }
        }
        (acc % d) as u8
    }

    /// The coefficient vector `c` with `<self, y> = c · y` for all `y`.
    pub(crate) fn symplectic_dual(&self) -> FieldVector {
        let f = self.field;
        let mut coords = vec![0u8; self.len()];
        for i in 0..self.num_pairs() {
            coords[2 * i] = f.neg(self.coords[2 * i + 1]);
            coords[2 * i + 1] = self.coords[2 * i];
        }
        FieldVector { field: f, coords }
    }

    /// Concatenates coordinates.
    pub fn concat(&self, other: &FieldVector) -> FieldVector {
        assert_eq!(self.field, other.field);
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        FieldVector {
            field: self.field,
            coords,
        }
    }

    /// Mixed-radix index with the first coordinate least significant.
    pub fn index(&self) -> u64 {
        let d = self.field.d as u64;
        self.coords
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * d + c as u64)
    }

    /// Inverse of [`FieldVector::index`].
    pub fn from_index(field: Field, len: usize, mut index: u64) -> Self {
        let d = field.d as u64;
        let mut coords = vec![0u8; len];
        for c in coords.iter_mut() {
            *c = (index % d) as u8;
            index /= d;
        }
        FieldVector { field, coords }
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}

impl FieldVector {
    /// Parses the space-separated text form, e.g. `"1 0 1 0"`.
    pub fn parse(field: Field, text: &str) -> Result<Self> {
        let mut coords = Vec::new();
        for tok in text.split_whitespace() {
            let value: u32 = tok
                .parse()
                .map_err(|_| Error::InvalidArgument(alloc::format!("bad coordinate `{tok}`")))?;
            if value >= field.d as u32 {
                return Err(Error::CoordinateOutOfRange {
                    value,
                    modulus: field.d,
                });
            }
            coords.push(value as u8);
        }
        Ok(FieldVector { field, coords })
    }
}

/// Componentwise sum of two vectors of the same shape.
pub fn vec_add(a: &FieldVector, b: &FieldVector) -> Result<FieldVector> {
    a.try_add(b)
}

/// The standard symplectic form on `F_d^{2n}`.
pub fn symplectic_form(x: &FieldVector, y: &FieldVector) -> Result<FieldElement> {
    x.check_compatible(y)?;
    if !x.len().is_multiple_of(2) {
        return Err(Error::OddLength(x.len()));
    }
    Ok(FieldElement {
        value: x.symplectic(y),
        field: x.field,
    })
}

/// `d^len` as a 64-bit count, or `None` on overflow.
pub fn checked_count(field: Field, len: usize) -> Option<u64> {
    let mut total = 1u64;
    for _ in 0..len {
        total = total.checked_mul(field.d as u64)?;
    }
    Some(total)
}

/// Every vector of `F_d^len`, in little-endian mixed-radix order
/// (the first coordinate varies fastest).
pub fn enumerate_vectors(field: Field, len: usize) -> Result<VectorIter> {
    let total = checked_count(field, len).ok_or(Error::Overflow("vectors"))?;
    Ok(VectorIter {
        field,
        current: vec![0; len],
        remaining: total,
    })
}

/// Iterator returned by [`enumerate_vectors`].
#[derive(Debug, Clone)]
pub struct VectorIter {
    field: Field,
    current: Vec<u8>,
    remaining: u64,
}

impl Iterator for VectorIter {
    type Item = FieldVector;

    fn next(&mut self) -> Option<FieldVector> {
        if self.remaining == 0 {
            return None;
        }
        let out = FieldVector::from_raw(self.field, self.current.clone());
        self.remaining -= 1;
        for c in self.current.iter_mut() {
            *c += 1;
            if *c < self.field.d {
                break;
            }
            *c = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match usize::try_from(self.remaining) {
            Ok(n) => (n, Some(n)),
            Err(_) => (usize::MAX, None),
        }
    }
}
