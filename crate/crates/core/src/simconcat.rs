//! Monte Carlo simulation of concatenated codes in `(z, v)` coordinates,
//! and the exact type-grouped bound on the ensemble-average infidelity.
//!
//! An error on `N` inner blocks reduces to a sequence `[z, v]` drawn i.i.d.
//! from `P_L`: `z_j` is the inner syndrome of block `j` (a row index) and
//! `v_j ∈ F_d^{2k}` its logical coordinates (a column index). Block `j`
//! occupies coordinates `2kj .. 2k(j+1)` of `v ∈ F_d^{2kN}`, and the column
//! index of a block is its coordinates read little-endian.
//!
//! The decoder sees `z` and the outer syndrome `σ_i = <g'_i, v>`. It searches
//! the whole coset `v_0 + C_out^⊥` of vectors with that syndrome for the one
//! whose joint type with `z` has the smallest conditional entropy. Entropies
//! within `1e-9` count as equal, and equal candidates are resolved in favour
//! of the lexicographically smallest coordinate vector. Decoding succeeds
//! iff `v̂ - v ∈ C_out`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::PauliChannel;
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::exponent::{binomial, count_types};
use crate::gf::{Field, FieldVector};
use crate::linalg;
use crate::math::{self, KahanSum};
use crate::spectra::{probability_array, ProbabilityArray};
use crate::symplectic::{sample_self_orthogonal_with, Subspace};

/// Cap on the decoder's search set, `d^{kN+K}`.
pub const DECODER_GUARD: u128 = 1 << 24;
/// Cap on the number of joint types in [`fidelity_bound_exact`].
pub const TYPE_GUARD: u128 = 10_000_000;
/// Entropies closer than this are treated as equal.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

const SCREEN_MARGIN: f64 = 1e-6;

/// Draws `[z, v]` letters from `P_L` by inverse CDF.
#[derive(Debug, Clone)]
pub struct ErrorSampler {
    cols: usize,
    cdf: Vec<f64>,
}

impl ErrorSampler {
    pub fn new(p: &ProbabilityArray) -> Self {
        let mut acc = KahanSum::new();
        let cdf = p
            .entries()
            .iter()
            .map(|&x| {
                acc.add(x);
                acc.value()
            })
            .collect();
        ErrorSampler { cols: p.cols(), cdf }
    }

    /// One `(row, col)` letter.
    pub fn letter<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let total = *self.cdf.last().expect("nonempty array");
        let x = rng.random::<f64>() * total;
        let mut i = self.cdf.partition_point(|&c| c <= x);
        if i == self.cdf.len() {
            i -= 1;
        }
        // skip zero-probability bins that share a CDF value
        while i > 0 && self.cdf[i] == self.cdf[i - 1] && self.cdf[i] > x {
            i -= 1;
        }
        (i / self.cols, i % self.cols)
    }

    /// `N` i.i.d. letters.
    pub fn sample<R: Rng + ?Sized>(&self, blocks: usize, rng: &mut R) -> Vec<(usize, usize)> {
        (0..blocks).map(|_| self.letter(rng)).collect()
    }
}

/// `N` i.i.d. draws from `P_L`.
pub fn sample_error<R: Rng + ?Sized>(p: &ProbabilityArray, blocks: usize, rng: &mut R) -> Vec<(usize, usize)> {
    ErrorSampler::new(p).sample(blocks, rng)
}

/// Concatenates per-block column indices into `v ∈ F_d^{2kN}`.
pub fn columns_to_vector(field: Field, k: usize, cols: &[usize]) -> FieldVector {
    let d = field.size();
    let mut coords = Vec::with_capacity(2 * k * cols.len());
    for &c in cols {
        let mut rest = c;
        for _ in 0..2 * k {
            coords.push((rest % d) as u8);
            rest /= d;
        }
    }
    FieldVector::new(field, coords).expect("digits below d")
}

fn column_of(coords: &[u8], d: usize) -> usize {
    coords.iter().rev().fold(0, |acc, &c| acc * d + c as usize)
}

fn flnf(c: u32) -> f64 {
    if c <= 1 {
        0.0
    } else {
        c as f64 * math::ln(c as f64)
    }
}

/// Minimum-conditional-entropy decoder for one outer code.
#[derive(Debug, Clone)]
pub struct CosetDecoder {
    field: Field,
    k: usize,
    blocks: usize,
    rows: usize,
    cols: usize,
    duals: Vec<FieldVector>,
    outer: Subspace,
    perp_basis: Vec<Vec<u8>>,
    touched: Vec<Vec<usize>>,
    /// `c ln c` for `c = 0..=N`.
    xlnx: Vec<f64>,
}

impl CosetDecoder {
    /// `outer` lives in `F_d^{2kN}`; `rows = d^{n-k}` of the inner code.
    pub fn new(outer: &Subspace, k: usize, blocks: usize, rows: usize) -> Result<Self> {
        let field = outer.field();
        if k == 0 || outer.ambient_len() != 2 * k * blocks {
            return Err(Error::DimensionMismatch {
                expected: 2 * k * blocks,
                found: outer.ambient_len(),
            });
        }
        let duals: Vec<FieldVector> = outer.basis().iter().map(|g| g.symplectic_dual()).collect();
        let perp = linalg::nullspace(field, &duals, outer.ambient_len());
        let needed = (field.order() as u128)
            .checked_pow(perp.len() as u32)
            .ok_or(Error::Overflow("decoder search set"))?;
        if needed > DECODER_GUARD {
            return Err(Error::GuardExceeded {
                what: "decoder candidates",
                needed,
                limit: DECODER_GUARD,
            });
        }
        let touched = perp
            .iter()
            .map(|b| {
                (0..blocks)
                    .filter(|&j| b.coords()[2 * k * j..2 * k * (j + 1)].iter().any(|&c| c != 0))
                    .collect()
            })
            .collect();
        Ok(CosetDecoder {
            field,
            k,
            blocks,
            rows,
            cols: field.size().pow(2 * k as u32),
            duals,
            outer: outer.clone(),
            perp_basis: perp.into_iter().map(FieldVector::into_coords).collect(),
            touched,
            xlnx: (0..=blocks as u32).map(flnf).collect(),
        })
    }

    /// `σ_i = <g'_i, v>`.
    pub fn syndrome(&self, v: &FieldVector) -> Vec<u8> {
        self.outer.basis().iter().map(|g| g.symplectic(v)).collect()
    }

    /// Number of candidates searched per call, `d^{kN+K}`.
    pub fn search_size(&self) -> u128 {
        (self.field.order() as u128).pow(self.perp_basis.len() as u32)
    }

    /// Whether `v̂ - v ∈ C_out`.
    pub fn is_success(&self, decoded: &FieldVector, actual: &FieldVector) -> bool {
        self.outer.contains(&decoded.sub(actual))
    }

    /// `argmin H_c(type([z, v']))` over `{v' : <g'_i, v'> = σ_i}`.
    pub fn decode(&self, z: &[usize], sigma: &[u8]) -> Result<FieldVector> {
        if z.len() != self.blocks || sigma.len() != self.duals.len() {
            return Err(Error::DimensionMismatch {
                expected: self.blocks,
                found: z.len(),
            });
        }
        if z.iter().any(|&s| s >= self.rows) {
            return Err(Error::InvalidArgument("syndrome row out of range".into()));
        }
        let len = 2 * self.k * self.blocks;
        let v0 = linalg::solve(self.field, &self.duals, sigma, len)
            .ok_or_else(|| Error::InvalidArgument("inconsistent outer syndrome".into()))?;
        let d = self.field.size();
        let dk = 2 * self.k;
        let mut coords = v0.into_coords();
        let mut col: Vec<usize> = (0..self.blocks).map(|j| column_of(&coords[dk * j..dk * (j + 1)], d)).collect();
        let mut counts = vec![0u32; self.rows * self.cols];
        for j in 0..self.blocks {
            counts[z[j] * self.cols + col[j]] += 1;
        }
        let f = |c: u32| self.xlnx[c as usize];
        let exact = |counts: &[u32]| counts.iter().map(|&c| f(c)).collect::<KahanSum>().value();
        let mut score = exact(&counts);
        let tol = ENTROPY_TOLERANCE * self.blocks as f64;
        let mut best_score = score;
        let mut best = coords.clone();

        let dim = self.perp_basis.len();
        let mut digits = vec![0u8; dim];
        'outer: loop {
            let mut i = 0;
            loop {
                if i == dim {
                    break 'outer;
                }
                for &j in &self.touched[i] {
                    let old = z[j] * self.cols + col[j];
                    score += f(counts[old] - 1) - f(counts[old]);
                    counts[old] -= 1;
                    let span = dk * j..dk * (j + 1);
                    for (c, &b) in coords[span.clone()].iter_mut().zip(&self.perp_basis[i][span]) {
                        let s = *c + b;
                        *c = if s as usize >= d { s - d as u8 } else { s };
                    }
                    col[j] = column_of(&coords[dk * j..dk * (j + 1)], d);
                    let new = z[j] * self.cols + col[j];
                    score += f(counts[new] + 1) - f(counts[new]);
                    counts[new] += 1;
                }
                digits[i] += 1;
                if digits[i] as usize == d {
                    digits[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
            // larger score means smaller conditional entropy
            if score + SCREEN_MARGIN >= best_score - tol {
                score = exact(&counts);
                if score > best_score + tol || (score >= best_score - tol && coords < best) {
                    best_score = score;
                    best.copy_from_slice(&coords);
                }
            }
        }
        FieldVector::new(self.field, best)
    }
}

/// How the outer code is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OuterMode {
    /// One explicit code for every trial.
    Fixed(Subspace),
    /// A fresh uniformly random code per trial.
    Resample,
    /// One uniformly random code, drawn from the run seed, for all trials.
    SampleOnce,
}

/// Parameters of [`simulate`].
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub inner: StabilizerCode,
    pub channel: PauliChannel,
    /// `N`.
    pub blocks: usize,
    /// `K`.
    pub logical: usize,
    pub outer: OuterMode,
    pub trials: u64,
    pub seed: u64,
    pub trace: bool,
}

/// One trial's outcome, recorded when [`SimConfig::trace`] is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub success: bool,
    pub error_weight: usize,
}

/// Outcome of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub failures: u64,
    pub trials: u64,
    pub failure_rate: f64,
    /// Wilson score interval at 95%.
    pub interval: (f64, f64),
    pub trace: Option<Vec<TrialRecord>>,
}

/// `(lo, hi)` Wilson score interval at 95% confidence.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * math::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n));
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Pooled two-proportion z statistic for `rate_1 > rate_2`.
pub fn two_proportion_z(fail_1: u64, trials_1: u64, fail_2: u64, trials_2: u64) -> f64 {
    let (n1, n2) = (trials_1 as f64, trials_2 as f64);
    let (p1, p2) = (fail_1 as f64 / n1, fail_2 as f64 / n2);
    let pooled = (fail_1 + fail_2) as f64 / (n1 + n2);
    let se = math::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    if se == 0.0 {
        return 0.0;
    }
    (p1 - p2) / se
}

/// Per-trial generator: the run seed with the trial index as stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn validate(cfg: &SimConfig) -> Result<()> {
    cfg.inner.field().check(cfg.channel.field())?;
    let kn = cfg.inner.k() * cfg.blocks;
    if cfg.blocks == 0 || cfg.logical > kn {
        return Err(Error::InvalidArgument(alloc::format!(
            "need N >= 1 and K <= kN = {kn}, got N = {}, K = {}",
            cfg.blocks,
            cfg.logical
        )));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if let OuterMode::Fixed(outer) = &cfg.outer {
        if outer.ambient_len() != 2 * kn || outer.dim() != kn - cfg.logical {
            return Err(Error::InvalidCode(alloc::format!(
                "outer code must have length {} and dimension {}",
                2 * kn,
                kn - cfg.logical
            )));
        }
        if !outer.is_self_orthogonal() {
            return Err(Error::NotSelfOrthogonal);
        }
    }
    let search = (cfg.inner.field().order() as u128)
        .checked_pow((kn + cfg.logical) as u32)
        .ok_or(Error::Overflow("decoder search set"))?;
    if search > DECODER_GUARD {
        return Err(Error::GuardExceeded {
            what: "decoder candidates",
            needed: search,
            limit: DECODER_GUARD,
        });
    }
    Ok(())
}

/// Runs `cfg.trials` independent trials. Trial `t` draws everything from
/// [`trial_rng`]`(seed, t)`, so the report does not depend on scheduling.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    validate(cfg)?;
    let field = cfg.inner.field();
    let k = cfg.inner.k();
    let kn = k * cfg.blocks;
    let array = probability_array(&cfg.inner, &cfg.channel)?;
    let sampler = ErrorSampler::new(&array);
    let rows = array.rows();

    let shared = match &cfg.outer {
        OuterMode::Fixed(l) => Some(CosetDecoder::new(l, k, cfg.blocks, rows)?),
        OuterMode::SampleOnce => {
            let mut rng = trial_rng(cfg.seed, u64::MAX);
            let l = sample_self_orthogonal_with(field, 2 * kn, kn - cfg.logical, &mut rng)?;
            Some(CosetDecoder::new(&l, k, cfg.blocks, rows)?)
        }
        OuterMode::Resample => None,
    };

    let run = |t: u64| -> Result<TrialRecord> {
        let mut rng = trial_rng(cfg.seed, t);
        let owned;
        let decoder = match &shared {
            Some(dec) => dec,
            None => {
                let l = sample_self_orthogonal_with(field, 2 * kn, kn - cfg.logical, &mut rng)?;
                owned = CosetDecoder::new(&l, k, cfg.blocks, rows)?;
                &owned
            }
        };
        let letters = sampler.sample(cfg.blocks, &mut rng);
        let z: Vec<usize> = letters.iter().map(|&(s, _)| s).collect();
        let cols: Vec<usize> = letters.iter().map(|&(_, u)| u).collect();
        let v = columns_to_vector(field, k, &cols);
        let sigma = decoder.syndrome(&v);
        let decoded = decoder.decode(&z, &sigma)?;
        Ok(TrialRecord {
            trial: t,
            success: decoder.is_success(&decoded, &v),
            error_weight: letters.iter().filter(|&&l| l != (0, 0)).count(),
        })
    };

    #[cfg(feature = "std")]
    let records: Vec<TrialRecord> = {
        use rayon::prelude::*;
        (0..cfg.trials).into_par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "std"))]
    let records: Vec<TrialRecord> = (0..cfg.trials).map(run).collect::<Result<_>>()?;

    let failures = records.iter().filter(|r| !r.success).count() as u64;
    Ok(SimReport {
        failures,
        trials: cfg.trials,
        failure_rate: failures as f64 / cfg.trials as f64,
        interval: wilson_interval(failures, cfg.trials),
        trace: cfg.trace.then_some(records),
    })
}

/// Compositions of `total` into `parts` nonnegative parts, in a fixed order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[pos] = c;
            rec(cur, pos + 1, left - c, out);
        }
    }
    if parts == 0 {
        return out;
    }
    rec(&mut cur, 0, total, &mut out);
    out
}

fn multinomial(counts: &[u32]) -> Result<u128> {
    let mut total = 0u128;
    let mut out = 1u128;
    for &c in counts {
        total += c as u128;
        out = out
            .checked_mul(binomial(total, c as u128)?)
            .ok_or(Error::Overflow("multinomial coefficient"))?;
    }
    Ok(out)
}

struct RowChoice {
    /// `-Σ_u c_u ln c_u`.
    neg_f: f64,
    /// Sequences of this row composition, as a float.
    count: f64,
    /// `Π_u P(s,u)^{c_u}`.
    weight: f64,
}

struct Shell {
    /// `N · H(V|Q)` in nats.
    nh: f64,
    count: f64,
    weight: f64,
}

/// The ensemble-average bound
/// `Σ_{[z,v]} P_L^N([z,v]) · min{ d^{-(kN-K)} · #{v' : H_c(z,v') <= H_c(z,v)}, 1 }`
/// evaluated exactly by grouping sequences into joint types.
pub fn fidelity_bound_exact(inner: &StabilizerCode, ch: &PauliChannel, blocks: usize, logical: usize) -> Result<f64> {
    let array = probability_array(inner, ch)?;
    fidelity_bound_from_array(&array, blocks, logical)
}

/// [`fidelity_bound_exact`] for a precomputed `P_L`.
pub fn fidelity_bound_from_array(p: &ProbabilityArray, blocks: usize, logical: usize) -> Result<f64> {
    let field = p.field();
    let kn = p.k() * blocks;
    if blocks == 0 || logical > kn {
        return Err(Error::InvalidArgument(alloc::format!(
            "need N >= 1 and K <= kN = {kn}, got N = {blocks}, K = {logical}"
        )));
    }
    let types = count_types(field, p.n(), p.k(), blocks as u64)?;
    if types > TYPE_GUARD {
        return Err(Error::GuardExceeded {
            what: "joint types",
            needed: types,
            limit: TYPE_GUARD,
        });
    }
    let scale = math::powf(field.order() as f64, -((kn - logical) as f64));
    let n_blocks = blocks as u32;
    let tol = ENTROPY_TOLERANCE * blocks as f64;
    let (rows, cols) = (p.rows(), p.cols());
    let col_choices = |q: u32| compositions(q, cols);

    let mut acc = KahanSum::new();
    for q in compositions(n_blocks, rows) {
        let t_q = multinomial(&q)? as f64;
        let row_part: f64 = q.iter().map(|&c| flnf(c)).sum();
        let mut per_row: Vec<Vec<RowChoice>> = Vec::with_capacity(rows);
        for (s, &qs) in q.iter().enumerate() {
            let mut choices = Vec::new();
            for comp in col_choices(qs) {
                let mut weight = 1.0;
                for (u, &c) in comp.iter().enumerate() {
                    if c > 0 {
                        weight *= math::powf(p.get(s, u), c as f64);
                    }
                }
                choices.push(RowChoice {
                    neg_f: -comp.iter().map(|&c| flnf(c)).sum::<f64>(),
                    count: multinomial(&comp)? as f64,
                    weight,
                });
            }
            per_row.push(choices);
        }
        // every product of per-row choices is one conditional type
        let mut shells = Vec::new();
        let mut idx = vec![0usize; rows];
        loop {
            let mut nh = row_part;
            let mut count = 1.0;
            let mut weight = 1.0;
            for (r, &i) in idx.iter().enumerate() {
                let c = &per_row[r][i];
                nh += c.neg_f;
                count *= c.count;
                weight *= c.weight;
            }
            shells.push(Shell { nh, count, weight });
            let mut r = 0;
            while r < rows {
                idx[r] += 1;
                if idx[r] < per_row[r].len() {
                    break;
                }
                idx[r] = 0;
                r += 1;
            }
            if r == rows {
                break;
            }
        }
        shells.sort_by(|a, b| a.nh.total_cmp(&b.nh));
        let mut cumulative = KahanSum::new();
        let mut hi = 0;
        for i in 0..shells.len() {
            while hi < shells.len() && shells[hi].nh <= shells[i].nh + tol {
                cumulative.add(shells[hi].count);
                hi += 1;
            }
            let sh = &shells[i];
            if sh.weight > 0.0 {
                acc.add(t_q * sh.count * sh.weight * (cumulative.value() * scale).min(1.0));
            }
        }
    }
    Ok(acc.value().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::catalog;
    use crate::gf::enumerate_vectors;
    use crate::symplectic::sample_self_orthogonal;

    fn f(d: u32) -> Field {
        Field::new(d).unwrap()
    }

    fn type_entropy(z: &[usize], cols_of: &[usize], rows: usize, cols: usize) -> f64 {
        let mut counts = vec![0u32; rows * cols];
        for (&s, &u) in z.iter().zip(cols_of) {
            counts[s * cols + u] += 1;
        }
        crate::exponent::conditional_entropy_of_counts(&counts, cols, z.len() as u32)
    }

    #[test]
    fn sampler_zero_noise() {
        let code = catalog("rep3", f(2)).unwrap();
        let a = probability_array(&code, &PauliChannel::depolarizing(f(2), 0.0).unwrap()).unwrap();
        let mut rng = trial_rng(1, 0);
        assert!(sample_error(&a, 50, &mut rng).iter().all(|&l| l == (0, 0)));
    }

    #[test]
    fn sampler_matches_array() {
        let code = catalog("rep3", f(2)).unwrap();
        let a = probability_array(&code, &PauliChannel::depolarizing(f(2), 0.2).unwrap()).unwrap();
        let mut rng = trial_rng(5, 0);
        let draws = sample_error(&a, 100_000, &mut rng);
        let mut hist = vec![0.0; a.entries().len()];
        for (s, u) in draws {
            hist[s * a.cols() + u] += 1e-5;
        }
        let tv: f64 = hist.iter().zip(a.entries()).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        assert!(tv < 0.02, "tv = {tv}");
        let rows: Vec<f64> = hist.chunks(a.cols()).map(|r| r.iter().sum()).collect();
        for (x, y) in rows.iter().zip(a.row_marginal()) {
            assert!((x - y).abs() < 0.01);
        }
    }

    #[test]
    fn columns_roundtrip() {
        let v = columns_to_vector(f(3), 1, &[0, 5, 8]);
        assert_eq!(v.coords(), &[0, 0, 2, 1, 2, 2]);
    }

    /// Brute force over the whole coset, lexicographic order, same rule.
    fn reference_decode(outer: &Subspace, k: usize, z: &[usize], sigma: &[u8], rows: usize) -> FieldVector {
        let field = outer.field();
        let d = field.size();
        let cols = d.pow(2 * k as u32);
        let mut best: Option<(f64, FieldVector)> = None;
        for cand in enumerate_vectors(field, outer.ambient_len()).unwrap() {
            let s: Vec<u8> = outer.basis().iter().map(|g| g.symplectic(&cand)).collect();
            if s != sigma {
                continue;
            }
            let cs: Vec<usize> = cand.coords().chunks(2 * k).map(|b| column_of(b, d)).collect();
            let h = type_entropy(z, &cs, rows, cols);
            let better = match &best {
                None => true,
                Some((bh, bv)) => h < bh - ENTROPY_TOLERANCE || (h <= bh + ENTROPY_TOLERANCE && cand.coords() < bv.coords()),
            };
            if better {
                best = Some((h, cand));
            }
        }
        best.unwrap().1
    }

    #[test]
    fn decoder_matches_reference() {
        let inner = catalog("rep2", f(2)).unwrap();
        let a = probability_array(&inner, &PauliChannel::depolarizing(f(2), 0.25).unwrap()).unwrap();
        let sampler = ErrorSampler::new(&a);
        for t in 0..60 {
            let mut rng = trial_rng(11, t);
            let outer = sample_self_orthogonal_with(f(2), 8, 2, &mut rng).unwrap();
            let dec = CosetDecoder::new(&outer, 1, 4, a.rows()).unwrap();
            let letters = sampler.sample(4, &mut rng);
            let z: Vec<usize> = letters.iter().map(|l| l.0).collect();
            let v = columns_to_vector(f(2), 1, &letters.iter().map(|l| l.1).collect::<Vec<_>>());
            let sigma = dec.syndrome(&v);
            let got = dec.decode(&z, &sigma).unwrap();
            assert_eq!(dec.syndrome(&got), sigma);
            assert_eq!(got, reference_decode(&outer, 1, &z, &sigma, a.rows()));
        }
    }

    #[test]
    fn decoder_zero_error() {
        let outer = sample_self_orthogonal(f(3), 6, 1, 4).unwrap();
        let dec = CosetDecoder::new(&outer, 1, 3, 1).unwrap();
        let v = FieldVector::zero(f(3), 6);
        let got = dec.decode(&[0, 0, 0], &dec.syndrome(&v)).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn success_is_coset_membership() {
        let outer = sample_self_orthogonal(f(2), 8, 3, 9).unwrap();
        let dec = CosetDecoder::new(&outer, 1, 4, 1).unwrap();
        for (i, x) in enumerate_vectors(f(2), 8).unwrap().enumerate().take(200) {
            let y = enumerate_vectors(f(2), 8).unwrap().nth((i * 37) % 256).unwrap();
            // canonical-form rank test: x - y in C iff span(C, x - y) has dim C
            let diff = x.sub(&y);
            let mut rows = outer.basis().to_vec();
            rows.push(diff);
            let same = Subspace::span(f(2), 8, &rows).unwrap().dim() == outer.dim();
            assert_eq!(dec.is_success(&x, &y), same);
        }
    }

    #[test]
    fn syndrome_invariant_under_outer_shift() {
        let outer = sample_self_orthogonal(f(3), 8, 2, 3).unwrap();
        let dec = CosetDecoder::new(&outer, 1, 4, 1).unwrap();
        let mut rng = trial_rng(3, 3);
        for _ in 0..100 {
            let v = Subspace::full(f(3), 8).random_element(&mut rng);
            let c = outer.random_element(&mut rng);
            assert_eq!(dec.syndrome(&v), dec.syndrome(&v.add(&c)));
        }
    }

    #[test]
    fn noiseless_simulation_never_fails() {
        let cfg = SimConfig {
            inner: catalog("rep3", f(2)).unwrap(),
            channel: PauliChannel::depolarizing(f(2), 0.0).unwrap(),
            blocks: 4,
            logical: 1,
            outer: OuterMode::Resample,
            trials: 50,
            seed: 1,
            trace: true,
        };
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.failures, 0);
        assert_eq!(r.trace.unwrap().len(), 50);
    }

    #[test]
    fn simulation_is_reproducible() {
        let cfg = SimConfig {
            inner: catalog("trivial1", f(2)).unwrap(),
            channel: PauliChannel::depolarizing(f(2), 0.1).unwrap(),
            blocks: 6,
            logical: 1,
            outer: OuterMode::SampleOnce,
            trials: 300,
            seed: 21,
            trace: true,
        };
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.interval.0 <= a.failure_rate && a.failure_rate <= a.interval.1);
    }

    #[test]
    fn fixed_outer_validation() {
        let inner = catalog("trivial1", f(2)).unwrap();
        let bad = sample_self_orthogonal(f(2), 8, 2, 0).unwrap();
        let cfg = SimConfig {
            inner,
            channel: PauliChannel::depolarizing(f(2), 0.1).unwrap(),
            blocks: 4,
            logical: 1,
            outer: OuterMode::Fixed(bad),
            trials: 1,
            seed: 0,
            trace: false,
        };
        assert!(simulate(&cfg).is_err());
    }

    /// Sum over every [z, v] and every v' directly, no type grouping.
    fn brute_bound(a: &ProbabilityArray, blocks: usize, logical: usize) -> f64 {
        let d = a.field().size();
        let letters = a.rows() * a.cols();
        let total = letters.pow(blocks as u32);
        let seq = |mut idx: usize| {
            (0..blocks)
                .map(|_| {
                    let l = idx % letters;
                    idx /= letters;
                    (l / a.cols(), l % a.cols())
                })
                .collect::<Vec<_>>()
        };
        let scale = (d as f64).powi(-((a.k() * blocks - logical) as i32));
        let mut acc = 0.0;
        let vcount = a.cols().pow(blocks as u32);
        for i in 0..total {
            let s = seq(i);
            let prob: f64 = s.iter().map(|&(r, c)| a.get(r, c)).product();
            if prob == 0.0 {
                continue;
            }
            let z: Vec<usize> = s.iter().map(|l| l.0).collect();
            let h = type_entropy(&z, &s.iter().map(|l| l.1).collect::<Vec<_>>(), a.rows(), a.cols());
            let mut count = 0u64;
            for j in 0..vcount {
                let mut rest = j;
                let vp: Vec<usize> = (0..blocks)
                    .map(|_| {
                        let c = rest % a.cols();
                        rest /= a.cols();
                        c
                    })
                    .collect();
                if type_entropy(&z, &vp, a.rows(), a.cols()) <= h + ENTROPY_TOLERANCE {
                    count += 1;
                }
            }
            acc += prob * (count as f64 * scale).min(1.0);
        }
        acc
    }

    #[test]
    fn bound_matches_brute_force_small() {
        let inner = catalog("rep2", f(2)).unwrap();
        let a = probability_array(&inner, &PauliChannel::depolarizing(f(2), 0.1).unwrap()).unwrap();
        let exact = fidelity_bound_from_array(&a, 3, 1).unwrap();
        let brute = brute_bound(&a, 3, 1);
        assert!((exact - brute).abs() < 1e-12, "{exact} vs {brute}");
    }

    #[test]
    fn bound_range_and_monotone_in_gap() {
        let inner = catalog("trivial1", f(2)).unwrap();
        let a = probability_array(&inner, &PauliChannel::depolarizing(f(2), 0.05).unwrap()).unwrap();
        let mut prev = 0.0;
        for logical in 0..=8 {
            let b = fidelity_bound_from_array(&a, 8, logical).unwrap();
            assert!((0.0..=1.0).contains(&b));
            assert!(b + 1e-15 >= prev);
            prev = b;
        }
    }

    #[test]
    fn bound_at_zero_noise() {
        let inner = catalog("trivial1", f(2)).unwrap();
        let a = probability_array(&inner, &PauliChannel::depolarizing(f(2), 0.0).unwrap()).unwrap();
        // v' ranges over the d^{2k} constant sequences, all with H_c = 0
        let b = fidelity_bound_from_array(&a, 6, 1).unwrap();
        assert!((b - 4.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn bound_guard() {
        let inner = catalog("rep3", f(2)).unwrap();
        let a = probability_array(&inner, &PauliChannel::depolarizing(f(2), 0.05).unwrap()).unwrap();
        assert!(fidelity_bound_from_array(&a, 40, 1).unwrap_err().is_guard());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100);
        assert!(lo < 1e-12);
        assert!((hi - 0.036994).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.40383).abs() < 1e-4 && (hi - 0.59617).abs() < 1e-4);
        assert!(two_proportion_z(60, 1000, 30, 1000) > 1.645);
    }
}
