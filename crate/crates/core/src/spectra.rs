//! Coset probability arrays and the coherent-information bound.
//!
//! `P_L(s, u)` collects the channel weight of every error `x ∈ F_d^{2n}` by
//! its syndrome `s_i = <g_i, x>` (`i <= n-k`) and its logical coordinates
//! `u = (w_{n-k+m}, z_{n-k+m})_{m <= k}`. Rows and columns are indexed in
//! little-endian mixed radix, matching [`crate::gf::enumerate_vectors`].
//!
//! The array is computed by full enumeration, organised as a depth-first
//! walk over qudits so each step adds one precomputed contribution per
//! functional. The walk is split into chunks by the letters on the last
//! few qudits; chunk results are merged in a fixed pairwise order, so the
//! output does not depend on how many threads ran the chunks.

use alloc::vec;
use alloc::vec::Vec;

use crate::channels::{LogBase, PauliChannel};
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldVector};
use crate::math::{self, KahanSum};

/// Default cap on the number of enumerated error vectors, `d^{2n}`.
pub const DEFAULT_GUARD: u128 = 1 << 40;

const MAX_CHUNKS: usize = 64;
const CHUNK_BIN_BUDGET: usize = 1 << 22;

/// `P_L` as a row-major `d^{n-k} × d^{2k}` array.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityArray {
    field: Field,
    n: usize,
    k: usize,
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl ProbabilityArray {
    /// Wraps explicit entries; they must be nonnegative and sum to 1.
    pub fn from_entries(field: Field, n: usize, k: usize, entries: Vec<f64>) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidArgument("k exceeds n".into()));
        }
        let rows = pow_usize(field.size(), n - k)?;
        let cols = pow_usize(field.size(), 2 * k)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidProbability("negative or non-finite entry".into()));
        }
        let total = math::kahan_sum(&entries);
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbability(alloc::format!("entries sum to {total}")));
        }
        Ok(ProbabilityArray {
            field,
            n,
            k,
            rows,
            cols,
            entries,
        })
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// `d^{n-k}`.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// `d^{2k}`.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn total(&self) -> f64 {
        math::kahan_sum(&self.entries)
    }

    /// `P̄_L(s) = Σ_u P_L(s, u)`.
    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.rows).map(|r| math::kahan_sum(self.row(r))).collect()
    }

    /// `H(P̄_L)` in nats.
    pub fn syndrome_entropy_nats(&self) -> f64 {
        self.row_marginal()
            .iter()
            .map(|&p| -math::xlnx(p))
            .collect::<KahanSum>()
            .value()
    }

    /// `H(←P_L | P̄_L)` in nats; rows with zero marginal contribute nothing.
    pub fn conditional_entropy_nats(&self) -> f64 {
        let mut acc = KahanSum::new();
        for r in 0..self.rows {
            let row = self.row(r);
            let m = math::kahan_sum(row);
            if m <= 0.0 {
                continue;
            }
            for &p in row {
                if p > 0.0 {
                    acc.add(-p * math::ln(p / m));
                }
            }
        }
        acc.value()
    }
}

/// The quantities reported by [`coherent_bound`], all in one base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub base: LogBase,
    /// `k - H_cond`.
    pub c_n: f64,
    /// `H(P̄_L)`.
    pub h_syndrome: f64,
    /// `H(←P_L | P̄_L)`.
    pub h_cond: f64,
    /// `c_n / n`.
    pub per_symbol: f64,
}

fn pow_usize(base: usize, exp: usize) -> Result<usize> {
    let mut out = 1usize;
    for _ in 0..exp {
        out = out.checked_mul(base).ok_or(Error::Overflow("array size"))?;
    }
    Ok(out)
}

/// `P_L` for `code` under `ch`, with the default enumeration guard.
pub fn probability_array(code: &StabilizerCode, ch: &PauliChannel) -> Result<ProbabilityArray> {
    probability_array_with_guard(code, ch, DEFAULT_GUARD)
}

/// `P_L` enumerating at most `guard` error vectors.
pub fn probability_array_with_guard(
    code: &StabilizerCode,
    ch: &PauliChannel,
    guard: u128,
) -> Result<ProbabilityArray> {
    let field = code.field();
    field.check(ch.field())?;
    let (n, k) = (code.n(), code.k());
    let d = field.size();
    let needed = (d as u128)
        .checked_pow(2 * n as u32)
        .ok_or(Error::Overflow("enumeration count"))?;
    if needed > guard {
        return Err(Error::GuardExceeded {
            what: "error vectors to enumerate",
            needed,
            limit: guard,
        });
    }
    let rows = pow_usize(d, n - k)?;
    let cols = pow_usize(d, 2 * k)?;
    let walk = Walk::new(code, ch, rows * cols);

    let letters = d * d;
    let mut fixed = 0;
    let mut chunks = 1usize;
    while fixed < n
        && chunks * letters <= MAX_CHUNKS
        && (chunks * letters).saturating_mul(rows * cols) <= CHUNK_BIN_BUDGET
    {
        fixed += 1;
        chunks *= letters;
    }
    let run = |c: usize| walk.chunk(fixed, c);
    #[cfg(feature = "std")]
    let parts: Vec<Vec<KahanSum>> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "std"))]
    let parts: Vec<Vec<KahanSum>> = (0..chunks).map(run).collect();

    let merged = tree_merge(parts);
    let entries = merged.iter().map(KahanSum::value).collect();
    Ok(ProbabilityArray {
        field,
        n,
        k,
        rows,
        cols,
        entries,
    })
}

fn tree_merge(mut parts: Vec<Vec<KahanSum>>) -> Vec<KahanSum> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(&b) {
                    x.merge(y);
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

/// Precomputed per-qudit contributions to every output digit.
struct Walk {
    d: u8,
    n: usize,
    digits: usize,
    bins: usize,
    /// `contrib[q][letter]` is a slice of `digits` values.
    contrib: Vec<Vec<Vec<u8>>>,
    /// Nonzero letters per qudit with their probabilities.
    letters: Vec<(usize, f64)>,
    /// Weight of each digit in the flat bin index.
    weights: Vec<usize>,
}

impl Walk {
    fn new(code: &StabilizerCode, ch: &PauliChannel, bins: usize) -> Walk {
        let field = code.field();
        let d = field.order();
        let (n, k) = (code.n(), code.k());
        let s = n - k;
        let basis = code.completion();
        // digit order: column digits (w, z per logical pair), then syndrome
        let digits = 2 * k + s;
        let cols = (d as usize).pow(2 * k as u32);
        let mut weights = Vec::with_capacity(digits);
        let mut w = 1usize;
        for _ in 0..2 * k {
            weights.push(w);
            w *= d as usize;
        }
        let mut w = cols;
        for _ in 0..s {
            weights.push(w);
            w *= d as usize;
        }
        let mut contrib = Vec::with_capacity(n);
        for q in 0..n {
            let mut per_letter = Vec::with_capacity(d as usize * d as usize);
            for letter in 0..(d as usize * d as usize) {
                let mut x = FieldVector::zero(field, 2 * n);
                x.set(2 * q, (letter / d as usize) as u8);
                x.set(2 * q + 1, (letter % d as usize) as u8);
                let mut out = Vec::with_capacity(digits);
                for m in 0..k {
                    out.push(x.symplectic(&basis.h()[s + m]));
                    out.push(basis.g()[s + m].symplectic(&x));
                }
                for g in &basis.g()[..s] {
                    out.push(g.symplectic(&x));
                }
                per_letter.push(out);
            }
            contrib.push(per_letter);
        }
        let letters = ch
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i, p))
            .collect();
        Walk {
            d,
            n,
            digits,
            bins,
            contrib,
            letters,
            weights,
        }
    }

    /// Enumerates every error whose last `fixed` qudits spell `chunk`.
    fn chunk(&self, fixed: usize, chunk: usize) -> Vec<KahanSum> {
        let mut bins = vec![KahanSum::new(); self.bins];
        let letters = self.d as usize * self.d as usize;
        let mut acc = vec![0u8; self.digits];
        let mut prob = 1.0;
        let mut rest = chunk;
        for q in (self.n - fixed)..self.n {
            let letter = rest % letters;
            rest /= letters;
            let Some(&(_, p)) = self.letters.iter().find(|(l, _)| *l == letter) else {
                return bins;
            };
            prob *= p;
            self.add_into(&mut acc, q, letter);
        }
        let free = self.n - fixed;
        let mut stack = vec![0u8; self.digits * (free + 1)];
        stack[..self.digits].copy_from_slice(&acc);
        self.descend(0, free, prob, &mut stack, &mut bins);
        bins
    }

    fn add_into(&self, acc: &mut [u8], q: usize, letter: usize) {
        for (a, &c) in acc.iter_mut().zip(&self.contrib[q][letter]) {
            let s = *a + c;
            *a = if s >= self.d { s - self.d } else { s };
        }
    }

    fn descend(&self, q: usize, free: usize, prob: f64, stack: &mut [u8], bins: &mut [KahanSum]) {
        let dg = self.digits;
        if q == free {
            let idx: usize = stack[q * dg..(q + 1) * dg]
                .iter()
                .zip(&self.weights)
                .map(|(&a, &w)| a as usize * w)
                .sum();
            bins[idx].add(prob);
            return;
        }
        for &(letter, p) in &self.letters {
            let (lo, hi) = stack.split_at_mut((q + 1) * dg);
            let cur = &lo[q * dg..];
            let next = &mut hi[..dg];
            for ((nx, &a), &c) in next.iter_mut().zip(cur).zip(&self.contrib[q][letter]) {
                let s = a + c;
                *nx = if s >= self.d { s - self.d } else { s };
            }
            self.descend(q + 1, free, prob * p, stack, bins);
        }
    }
}

/// `c_n = k - H(←P_L | P̄_L)` with its ingredients, in `base`.
pub fn coherent_bound(code: &StabilizerCode, ch: &PauliChannel, base: LogBase) -> Result<BoundReport> {
    let array = probability_array(code, ch)?;
    Ok(bound_from_array(&array, base))
}

/// [`coherent_bound`] for a precomputed array.
pub fn bound_from_array(array: &ProbabilityArray, base: LogBase) -> BoundReport {
    let field = array.field();
    let ln_d = math::ln(field.order() as f64);
    let scale = base.from_base_d(field);
    let h_cond = array.conditional_entropy_nats() / ln_d;
    let h_syndrome = array.syndrome_entropy_nats() / ln_d;
    let c_n = array.k() as f64 - h_cond;
    BoundReport {
        n: array.n(),
        k: array.k(),
        base,
        c_n: c_n * scale,
        h_syndrome: h_syndrome * scale,
        h_cond: h_cond * scale,
        per_symbol: c_n * scale / array.n() as f64,
    }
}

/// One report per grid point, in grid order.
pub fn bound_sweep<F>(code: &StabilizerCode, family: F, grid: &[f64], base: LogBase) -> Result<Vec<BoundReport>>
where
    F: Fn(f64) -> Result<PauliChannel>,
{
    grid.iter()
        .map(|&p| coherent_bound(code, &family(p)?, base))
        .collect()
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
