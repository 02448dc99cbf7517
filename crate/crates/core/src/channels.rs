//! Pauli channels `ρ ↦ Σ_u P(u) N_u ρ N_u†` over the alphabet `{0..d-1}^2`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldVector};
use crate::math::{self, KahanSum};

/// Logarithm base for reported entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Base `d`, the field size.
    #[default]
    D,
    Two,
    E,
}

impl LogBase {
    /// Multiplier converting a base-`d` quantity into this base.
    pub fn from_base_d(self, field: Field) -> f64 {
        let ln_d = math::ln(field.order() as f64);
        match self {
            LogBase::D => 1.0,
            LogBase::Two => ln_d / core::f64::consts::LN_2,
            LogBase::E => ln_d,
        }
    }

    /// `ln` of the base.
    pub fn ln_base(self, field: Field) -> f64 {
        match self {
            LogBase::D => math::ln(field.order() as f64),
            LogBase::Two => core::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }
}

/// A Pauli channel: a probability vector of length `d^2` indexed by
/// `(i, j) ↦ i * d + j`, where `(i, j)` labels `X^i Z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    field: Field,
    probs: Vec<f64>,
}

const NORMALIZATION_TOL: f64 = 1e-12;

impl PauliChannel {
    pub fn new(field: Field, probs: Vec<f64>) -> Result<Self> {
        let d = field.size();
        if probs.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: probs.len(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidProbability(format!("entry {p} is not a nonnegative number")));
        }
        let total = math::kahan_sum(&probs);
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {total}, not 1")));
        }
        Ok(PauliChannel { field, probs })
    }

    /// `P(0,0) = 1 - p`, every other letter `p / (d^2 - 1)`.
    pub fn depolarizing(field: Field, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(format!("depolarizing parameter {p} outside [0, 1]")));
        }
        let d2 = field.size() * field.size();
        let mut probs = alloc::vec![p / (d2 - 1) as f64; d2];
        probs[0] = 1.0 - p;
        Ok(PauliChannel { field, probs })
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `P(i, j)`.
    #[inline]
    pub fn prob(&self, i: u8, j: u8) -> f64 {
        self.probs[i as usize * self.field.size() + j as usize]
    }

    /// `P^n(x) = Π_i P(u_i, v_i)`.
    pub fn product_prob(&self, x: &FieldVector) -> Result<f64> {
        self.field.check(x.field())?;
        if !x.len().is_multiple_of(2) {
            return Err(Error::OddLength(x.len()));
        }
        Ok((0..x.num_pairs())
            .map(|i| {
                let (u, v) = x.pair(i);
                self.prob(u, v)
            })
            .product())
    }

    /// Entropy of `P` in the requested base.
    pub fn entropy(&self, base: LogBase) -> f64 {
        shannon_entropy(&self.probs, base.ln_base(self.field))
    }
}

/// `-Σ p ln p / ln_base`, with `0 ln 0 = 0`.
pub fn shannon_entropy(probs: &[f64], ln_base: f64) -> f64 {
    let acc: KahanSum = probs.iter().map(|&p| -math::xlnx(p)).collect();
    acc.value() / ln_base
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    (-math::xlnx(p) - math::xlnx(1.0 - p)) / core::f64::consts::LN_2
}
