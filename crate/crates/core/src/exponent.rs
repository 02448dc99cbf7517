//! The inner-code error exponent
//! `E(R) = min_{P'} [ D(P' || P_L) + |k - kR - H(←P' | P̄')|^+ ]`
//! and the type-counting helpers used by the concatenated-code bound.
//!
//! Logarithms are base `d` throughout. Distributions `P'` with mass outside
//! `supp(P_L)` have infinite divergence, so the search lives on `supp(P_L)`.
//!
//! [`exponent`] solves the problem through its Lagrangian dual. Writing
//! `|x|^+ = max_{ρ∈[0,1]} ρx`, swapping min and max (the objective is convex
//! in `P'`) and minimising in closed form gives
//!
//! ```text
//! E(R) = max_{ρ∈[0,1]} ρ k(1-R) - log_d Σ_s ( Σ_u P_L(s,u)^{1/(1+ρ)} )^{1+ρ}
//! ```
//!
//! with minimiser `P'_ρ(s,u) ∝ Z_s^ρ P_L(s,u)^{1/(1+ρ)}`, `Z_s = Σ_u P_L(s,u)^{1/(1+ρ)}`.
//! The dual is concave in `ρ` with derivative `k(1-R) - H_c(P'_ρ)`, so it is
//! maximised by bisection. Evaluating the primal objective at `P'_ρ` gives an
//! upper bound; the gap between the two is the reported KKT residual.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::math::{self, KahanSum};
use crate::spectra::ProbabilityArray;

/// A distribution on `F_d^{n-k} × F_d^{2k}` laid out like [`ProbabilityArray`].
pub type JointDistribution = ProbabilityArray;

/// Residual above which [`exponent`] reports non-convergence.
pub const KKT_TOLERANCE: f64 = 1e-8;

/// Result of [`exponent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentReport {
    /// `E(R)`, base `d`.
    pub e: f64,
    pub rate: f64,
    /// Optimal dual multiplier `ρ ∈ [0, 1]`.
    pub rho: f64,
    /// Primal objective at the recovered minimiser minus the dual value.
    pub kkt_residual: f64,
    /// `k - H_c(P_L)`; `E > 0` iff `kR` is below this.
    pub threshold: f64,
    pub bisection_steps: usize,
}

/// `D(P || Q)` in the base whose natural log is `ln_base`; `+∞` when
/// `supp(P) ⊄ supp(Q)`.
pub fn kl_divergence(p: &[f64], q: &[f64], ln_base: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: p.len(),
        });
    }
    let mut acc = KahanSum::new();
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc.add(a * math::ln(a / b));
        }
    }
    Ok(acc.value().max(0.0) / ln_base)
}

/// [`kl_divergence`] between two joint distributions of the same shape.
pub fn kl_divergence_joint(p: &JointDistribution, q: &JointDistribution, ln_base: f64) -> Result<f64> {
    if (p.rows(), p.cols()) != (q.rows(), q.cols()) {
        return Err(Error::DimensionMismatch {
            expected: q.entries().len(),
            found: p.entries().len(),
        });
    }
    kl_divergence(p.entries(), q.entries(), ln_base)
}

/// `H(←P | P̄)` in nats for a row-major `rows × cols` array (not
/// necessarily normalised); zero-marginal rows are skipped.
pub fn conditional_entropy(entries: &[f64], cols: usize) -> f64 {
    let mut acc = KahanSum::new();
    for row in entries.chunks(cols) {
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

/// `D(P'||P) + |a - H_c(P')|^+` in base `d`, where `a = k(1-R)`.
pub fn objective(candidate: &[f64], p: &ProbabilityArray, rate: f64) -> Result<f64> {
    let ln_d = math::ln(p.field().order() as f64);
    let a = p.k() as f64 * (1.0 - rate);
    let dv = kl_divergence(candidate, p.entries(), ln_d)?;
    let hc = conditional_entropy(candidate, p.cols()) / ln_d;
    Ok(dv + (a - hc).max(0.0))
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument(alloc::format!("rate {rate} outside [0, 1]")));
    }
    Ok(())
}

struct Tilt {
    /// `P'_ρ`, normalised.
    dist: Vec<f64>,
    /// `ln Σ_s Z_s^{1+ρ}`.
    log_norm: f64,
}

fn tilt(p: &ProbabilityArray, rho: f64) -> Tilt {
    let t = 1.0 / (1.0 + rho);
    let cols = p.cols();
    let mut dist = vec![0.0; p.entries().len()];
    let mut z = Vec::with_capacity(p.rows());
    for (r, row) in p.entries().chunks(cols).enumerate() {
        let mut zs = KahanSum::new();
        for (c, &x) in row.iter().enumerate() {
            if x > 0.0 {
                let y = math::powf(x, t);
                dist[r * cols + c] = y;
                zs.add(y);
            }
        }
        z.push(zs.value());
    }
    // P'(s,u) = Z_s^{1+ρ} / Σ Z^{1+ρ} · P(s,u)^t / Z_s
    let weights: Vec<f64> = z
        .iter()
        .map(|&zs| if zs > 0.0 { math::powf(zs, 1.0 + rho) } else { 0.0 })
        .collect();
    let total = math::kahan_sum(&weights);
    for (r, row) in dist.chunks_mut(cols).enumerate() {
        if z[r] > 0.0 {
            let scale = weights[r] / total / z[r];
            row.iter_mut().for_each(|x| *x *= scale);
        }
    }
    Tilt {
        dist,
        log_norm: math::ln(total),
    }
}

/// `E(R)` for a probability array, by the dual bisection described in the
/// module docs. Fails with [`Error::NonConvergence`] if the duality gap at
/// the end exceeds [`KKT_TOLERANCE`].
pub fn exponent(p: &ProbabilityArray, rate: f64) -> Result<ExponentReport> {
    check_rate(rate)?;
    let ln_d = math::ln(p.field().order() as f64);
    let a = p.k() as f64 * (1.0 - rate);
    let hc0 = conditional_entropy(p.entries(), p.cols()) / ln_d;
    let threshold = p.k() as f64 - hc0;
    let slope = |rho: f64| -> (Tilt, f64) {
        let t = tilt(p, rho);
        let hc = conditional_entropy(&t.dist, p.cols()) / ln_d;
        (t, a - hc)
    };

    let mut steps = 0;
    let rho = if a - hc0 <= 0.0 {
        0.0
    } else {
        let (_, s1) = slope(1.0);
        if s1 >= 0.0 {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            while hi - lo > 1e-15 && steps < 200 {
                let mid = 0.5 * (lo + hi);
                if slope(mid).1 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                steps += 1;
            }
            0.5 * (lo + hi)
        }
    };
    let t = tilt(p, rho);
    let dual = rho * a - t.log_norm / ln_d;
    let primal = objective(&t.dist, p, rate)?;
    let residual = (primal - dual).abs();
    if residual.is_nan() || residual > KKT_TOLERANCE {
        return Err(Error::NonConvergence {
            residual,
            iterations: steps,
        });
    }
    Ok(ExponentReport {
        // at ρ = 0 the dual is ln Σ P = 0 up to rounding
        e: if rho == 0.0 { 0.0 } else { dual.max(0.0) },
        rate,
        rho,
        kkt_residual: residual,
        threshold,
        bisection_steps: steps,
    })
}

/// Result of [`exponent_mirror_descent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorDescentReport {
    /// Best objective value seen (averaged or last iterate).
    pub e: f64,
    pub iterations: usize,
}

/// Exponentiated-gradient descent on `supp(P_L)` with step `η₀/√t` and
/// iterate averaging. Slow; kept as an independent cross-check of
/// [`exponent`].
pub fn exponent_mirror_descent(p: &ProbabilityArray, rate: f64, iterations: usize) -> Result<MirrorDescentReport> {
    check_rate(rate)?;
    let ln_d = math::ln(p.field().order() as f64);
    let a = p.k() as f64 * (1.0 - rate);
    let cols = p.cols();
    let support: Vec<usize> = (0..p.entries().len()).filter(|&i| p.entries()[i] > 0.0).collect();
    let mut x: Vec<f64> = p.entries().to_vec();
    let mut avg = vec![0.0; x.len()];
    let mut best = objective(&x, p, rate)?;
    let eta0 = 0.5;
    let mut grad = vec![0.0; x.len()];
    for t in 1..=iterations {
        let hc = conditional_entropy(&x, cols) / ln_d;
        let active = a - hc > 0.0;
        for row in 0..p.rows() {
            let m: f64 = x[row * cols..(row + 1) * cols].iter().sum();
            for c in 0..cols {
                let i = row * cols + c;
                if p.entries()[i] <= 0.0 {
                    continue;
                }
                let xi = x[i].max(f64::MIN_POSITIVE);
                let mut g = (math::ln(xi / p.entries()[i]) + 1.0) / ln_d;
                if active {
                    g += math::ln(xi / m.max(f64::MIN_POSITIVE)) / ln_d;
                }
                grad[i] = g;
            }
        }
        let eta = eta0 / math::sqrt(t as f64);
        let gmax = support.iter().map(|&i| grad[i]).fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for &i in &support {
            x[i] *= math::exp(-eta * (grad[i] - gmax));
            total += x[i];
        }
        for &i in &support {
            x[i] /= total;
            avg[i] += (x[i] - avg[i]) / t as f64;
        }
        if t % 64 == 0 || t == iterations {
            best = best.min(objective(&x, p, rate)?).min(objective(&avg, p, rate)?);
        }
    }
    Ok(MirrorDescentReport { e: best, iterations })
}

/// Minimum of the objective over the grid `{P' = c / steps}` on
/// `supp(P_L)`; an upper bound on `E(R)`. At most `max_points` grid points
/// are evaluated.
pub fn exponent_grid_oracle(p: &ProbabilityArray, rate: f64, steps: u32, max_points: u128) -> Result<f64> {
    check_rate(rate)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("grid needs at least one step".into()));
    }
    let support: Vec<usize> = (0..p.entries().len()).filter(|&i| p.entries()[i] > 0.0).collect();
    let points = binomial(steps as u128 + support.len() as u128 - 1, support.len() as u128 - 1)?;
    if points > max_points {
        return Err(Error::GuardExceeded {
            what: "grid points",
            needed: points,
            limit: max_points,
        });
    }
    let mut counts = vec![0u32; support.len()];
    let mut cand = vec![0.0; p.entries().len()];
    let mut best = f64::INFINITY;
    let mut visit = |counts: &[u32]| -> Result<()> {
        for (&i, &c) in support.iter().zip(counts) {
            cand[i] = c as f64 / steps as f64;
        }
        best = best.min(objective(&cand, p, rate)?);
        Ok(())
    };
    compositions(&mut counts, 0, steps, &mut visit)?;
    Ok(best)
}

fn compositions<F>(counts: &mut [u32], pos: usize, left: u32, visit: &mut F) -> Result<()>
where
    F: FnMut(&[u32]) -> Result<()>,
{
    if pos + 1 == counts.len() {
        counts[pos] = left;
        return visit(counts);
    }
    for c in 0..=left {
        counts[pos] = c;
        compositions(counts, pos + 1, left - c, visit)?;
    }
    Ok(())
}

/// `C(n, r)` exactly, or an overflow error.
pub fn binomial(n: u128, r: u128) -> Result<u128> {
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut out: u128 = 1;
    for i in 0..r {
        // out * (n - i) / (i + 1) stays integral; divide out the gcd first
        let num = n - i;
        let den = i + 1;
        let g = gcd(out, den);
        let (o, dd) = (out / g, den / g);
        let num = num / dd;
        out = o.checked_mul(num).ok_or(Error::Overflow("binomial coefficient"))?;
    }
    Ok(out)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of joint types of length `N` on an alphabet of `d^{n+k}` letters:
/// `C(N + m - 1, m - 1)`.
pub fn count_types(field: Field, n: usize, k: usize, blocks: u64) -> Result<u128> {
    let m = (field.order() as u128)
        .checked_pow((n + k) as u32)
        .ok_or(Error::Overflow("alphabet size"))?;
    binomial(blocks as u128 + m - 1, m - 1)
}

/// Counts of a sequence over a `rows × cols` alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointType {
    rows: usize,
    cols: usize,
    counts: Vec<u32>,
    total: u32,
}

impl JointType {
    pub fn new(rows: usize, cols: usize, counts: Vec<u32>) -> Result<Self> {
        if counts.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: counts.len(),
            });
        }
        let total = counts.iter().sum();
        Ok(JointType {
            rows,
            cols,
            counts,
            total,
        })
    }

    /// Type of the sequence of `(row, col)` letters.
    pub fn of_sequence(rows: usize, cols: usize, letters: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut counts = vec![0u32; rows * cols];
        let mut total = 0;
        for (r, c) in letters {
            counts[r * cols + c] += 1;
            total += 1;
        }
        JointType {
            rows,
            cols,
            counts,
            total,
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `N`.
    pub fn blocks(&self) -> u32 {
        self.total
    }

    pub fn distribution(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// `H(←J | J̄)` in nats, `(Σ_s c_s ln c_s - Σ c ln c) / N`.
    pub fn conditional_entropy(&self) -> f64 {
        conditional_entropy_of_counts(&self.counts, self.cols, self.total)
    }
}

/// `(Σ_s c_s ln c_s - Σ_{s,u} c_{su} ln c_{su}) / N` in nats.
pub fn conditional_entropy_of_counts(counts: &[u32], cols: usize, total: u32) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut acc = KahanSum::new();
    for row in counts.chunks(cols) {
        let m: u32 = row.iter().sum();
        acc.add(xlnx_int(m));
        for &c in row {
            acc.add(-xlnx_int(c));
        }
    }
    acc.value().max(0.0) / total as f64
}

fn xlnx_int(c: u32) -> f64 {
    if c <= 1 {
        0.0
    } else {
        c as f64 * math::ln(c as f64)
    }
}
