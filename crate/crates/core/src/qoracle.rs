//! Dense-matrix coherent information for small stabilizer codes.
//!
//! Qudit `1` is the most significant tensor factor. `X|j> = |j-1>`,
//! `Z|j> = ω^j |j>` with `ω = exp(2πi/d)`, and `N_(u,v) = X^u Z^v`.
//! Everything here is exact linear algebra on `d^{n+k}`-dimensional
//! spaces, so the sizes are capped.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};

use crate::channels::{LogBase, PauliChannel};
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf::{enumerate_vectors, Field, FieldVector};
use crate::math::{self, KahanSum};

pub type C64 = Complex<f64>;

/// Default cap on `d^{n+k}`.
pub const DEFAULT_CAP: usize = 256;

const PSD_TOLERANCE: f64 = 1e-10;

/// A square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("operator must be square".into()));
        }
        Ok(DenseOperator { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &DenseOperator) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(modulus)
            .fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

fn modulus(z: &C64) -> f64 {
    math::sqrt(z.norm_sqr())
}

/// `r^{1/d} e^{iθ/d}` for `z = r e^{iθ}`, `θ ∈ (-π, π]`.
fn principal_root(z: C64, d: usize) -> C64 {
    let r = math::powf(modulus(&z), 1.0 / d as f64);
    let theta = math::atan2(z.im, z.re) / d as f64;
    C64::new(r * math::cos(theta), r * math::sin(theta))
}

fn omega(d: u8, power: u64) -> C64 {
    let angle = 2.0 * core::f64::consts::PI * (power % d as u64) as f64 / d as f64;
    C64::new(math::cos(angle), math::sin(angle))
}

/// The `d × d` matrix `X^i Z^j`.
pub fn weyl_operator(field: Field, i: u8, j: u8) -> DenseOperator {
    let d = field.size();
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    // X^i Z^j |c> = ω^{jc} |c - i>
    for c in 0..d {
        let r = (c + d - i as usize % d) % d;
        m[(r, c)] = omega(field.order(), j as u64 * c as u64);
    }
    DenseOperator { matrix: m }
}

/// `N_x = N_{x_1} ⊗ ... ⊗ N_{x_n}` as a dense `d^n × d^n` matrix.
pub fn pauli_operator(x: &FieldVector) -> DenseOperator {
    let field = x.field();
    let mut out = DenseOperator {
        matrix: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
    };
    for q in 0..x.num_pairs() {
        let (u, v) = x.pair(q);
        out = out.kron(&weyl_operator(field, u, v));
    }
    out
}

/// `N_x |ψ>` for a state on `n` qudits, without forming `N_x`.
fn apply_pauli(x: &FieldVector, psi: &[C64], out: &mut [C64]) {
    let d = x.field().size();
    let n = x.num_pairs();
    let phases: Vec<C64> = (0..d).map(|t| omega(x.field().order(), t as u64)).collect();
    for (idx, &amp) in psi.iter().enumerate() {
        let mut rest = idx;
        let mut target = 0usize;
        let mut place = 1usize;
        let mut phase = 0usize;
        // least significant digit is the last qudit
        for q in (0..n).rev() {
            let j = rest % d;
            rest /= d;
            let (u, v) = x.pair(q);
            phase += v as usize * j;
            target += ((j + d - u as usize) % d) * place;
            place *= d;
        }
        out[target] = phases[phase % d] * amp;
    }
}

/// Joint eigenvalues `μ_i` selecting the code space.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueList {
    pub mu: Vec<C64>,
}

/// `λ` with `N_g^d = λ I`.
pub fn power_scalar(g: &FieldVector) -> Result<C64> {
    let n_g = pauli_operator(g);
    let mut p = n_g.clone();
    for _ in 1..g.field().size() {
        p = p.mul(&n_g);
    }
    let lambda = p.matrix[(0, 0)];
    let id = DMatrix::identity(p.dim(), p.dim()) * lambda;
    if (&p.matrix - id).iter().any(|z| modulus(z) > 1e-9) {
        return Err(Error::Numerical("N_g^d is not a scalar".into()));
    }
    Ok(lambda)
}

/// `Π_i (1/d) Σ_a (μ_i^{-1} N_{g_i})^a`.
pub fn code_projector(code: &StabilizerCode, mu: &EigenvalueList) -> Result<DenseOperator> {
    let gens = code.generators();
    if mu.mu.len() != gens.len() {
        return Err(Error::DimensionMismatch {
            expected: gens.len(),
            found: mu.mu.len(),
        });
    }
    let dim = checked_dim(code.field(), code.n(), DEFAULT_CAP)?;
    let d = code.field().size();
    let mut proj = DMatrix::<C64>::identity(dim, dim);
    for (g, &m) in gens.iter().zip(&mu.mu) {
        let step = pauli_operator(g).matrix * m.inv();
        let mut term = DMatrix::<C64>::identity(dim, dim);
        let mut avg = term.clone();
        for _ in 1..d {
            term = &term * &step;
            avg += &term;
        }
        proj *= avg.unscale(d as f64);
    }
    Ok(DenseOperator { matrix: proj })
}

fn checked_dim(field: Field, qudits: usize, cap: usize) -> Result<usize> {
    let mut dim = 1usize;
    for _ in 0..qudits {
        dim = dim.saturating_mul(field.size());
    }
    if dim > cap {
        return Err(Error::GuardExceeded {
            what: "dense operator dimension",
            needed: dim as u128,
            limit: cap as u128,
        });
    }
    Ok(dim)
}

fn is_projector_of_rank(p: &DenseOperator, rank: usize) -> bool {
    let sq = p.mul(p);
    let herm = p.adjoint();
    sq.max_diff(p) < 1e-9 && herm.max_diff(p) < 1e-9 && (p.trace().re - rank as f64).abs() < 1e-6
}

/// Principal `d`-th roots of each `λ_i`; if that projector has the wrong
/// rank, further roots are tried in lexicographic order of the `ω` powers.
pub fn eigenvalue_list(code: &StabilizerCode) -> Result<(EigenvalueList, DenseOperator)> {
    let d = code.field().size();
    let gens = code.generators();
    let principal: Vec<C64> = gens
        .iter()
        .map(|g| power_scalar(g).map(|l| principal_root(l, d)))
        .collect::<Result<_>>()?;
    let want = d.pow(code.k() as u32);
    let combos = d.checked_pow(gens.len() as u32).ok_or(Error::Overflow("eigenvalue choices"))?;
    for combo in 0..combos {
        let mut rest = combo;
        let mu = principal
            .iter()
            .map(|&m| {
                let t = rest % d;
                rest /= d;
                m * omega(code.field().order(), t as u64)
            })
            .collect();
        let list = EigenvalueList { mu };
        let p = code_projector(code, &list)?;
        if is_projector_of_rank(&p, want) {
            return Ok((list, p));
        }
    }
    Err(Error::Numerical("no eigenvalue list gives a projector of rank d^k".into()))
}

/// Orthonormal basis of the range of a projector, by greedy pivoted
/// Gram–Schmidt on its columns.
pub fn code_basis(proj: &DenseOperator, rank: usize) -> Result<Vec<Vec<C64>>> {
    let dim = proj.dim();
    let mut residual: Vec<Vec<C64>> = (0..dim)
        .map(|c| proj.matrix.column(c).iter().copied().collect())
        .collect();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let norms: Vec<f64> = residual.iter().map(|v| norm(v)).collect();
        let (best, &bn) = norms
            .iter()
            .enumerate()
            .fold((0, &-1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if bn < 1e-8 {
            return Err(Error::Numerical("projector range smaller than expected".into()));
        }
        let e: Vec<C64> = residual[best].iter().map(|z| z / bn).collect();
        for v in residual.iter_mut() {
            let overlap: C64 = e.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(&e) {
                *x -= a * overlap;
            }
        }
        basis.push(e);
    }
    Ok(basis)
}

fn norm(v: &[C64]) -> f64 {
    math::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

/// The two entropies and their difference, in one base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentInfo {
    pub base: LogBase,
    /// `S(A(ρ))`.
    pub s_output: f64,
    /// `S((I ⊗ A)(Ψ))`.
    pub s_joint: f64,
    /// `S_output - S_joint`.
    pub i_c: f64,
}

/// Coherent information of `ρ = Π / d^k` through `A^{⊗n}`, computed from
/// the purification `Ψ = d^{-k/2} Σ_b |b> |c_b>`.
pub fn coherent_info_direct(code: &StabilizerCode, ch: &PauliChannel, base: LogBase) -> Result<CoherentInfo> {
    let (_, proj) = eigenvalue_list(code)?;
    coherent_info_with_projector(code, ch, &proj, base)
}

/// As [`coherent_info_direct`] with a caller-chosen eigenvalue list.
pub fn coherent_info_with(
    code: &StabilizerCode,
    ch: &PauliChannel,
    mu: &EigenvalueList,
    base: LogBase,
) -> Result<CoherentInfo> {
    let proj = code_projector(code, mu)?;
    let rank = code.field().size().pow(code.k() as u32);
    if !is_projector_of_rank(&proj, rank) {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue list does not select a {rank}-dimensional eigenspace"
        )));
    }
    coherent_info_with_projector(code, ch, &proj, base)
}

fn coherent_info_with_projector(
    code: &StabilizerCode,
    ch: &PauliChannel,
    proj: &DenseOperator,
    base: LogBase,
) -> Result<CoherentInfo> {
    let field = code.field();
    field.check(ch.field())?;
    let (n, k) = (code.n(), code.k());
    let sys = checked_dim(field, n, DEFAULT_CAP)?;
    let refd = field.size().pow(k as u32);
    let total = checked_dim(field, n + k, DEFAULT_CAP)?;
    let basis = code_basis(proj, refd)?;

    let amp = 1.0 / math::sqrt(refd as f64);
    let mut joint = DMatrix::from_element(total, total, C64::new(0.0, 0.0));
    let mut psi = vec![C64::new(0.0, 0.0); total];
    let mut tmp = vec![C64::new(0.0, 0.0); sys];
    for x in enumerate_vectors(field, 2 * n)? {
        let p = ch.product_prob(&x)?;
        if p <= 0.0 {
            continue;
        }
        for (b, c) in basis.iter().enumerate() {
            apply_pauli(&x, c, &mut tmp);
            for (i, &t) in tmp.iter().enumerate() {
                psi[b * sys + i] = t * amp;
            }
        }
        // joint += p |psi><psi|
        for c in 0..total {
            let w = psi[c].conj() * p;
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..total {
                joint[(r, c)] += psi[r] * w;
            }
        }
    }
    let mut output = DMatrix::from_element(sys, sys, C64::new(0.0, 0.0));
    for b in 0..refd {
        output += joint.view((b * sys, b * sys), (sys, sys));
    }
    let tr = output.trace();
    if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
        return Err(Error::Numerical(format!("channel output has trace {tr}")));
    }
    let ln_d = math::ln(field.order() as f64);
    let scale = base.from_base_d(field);
    let s_output = von_neumann_nats(output)? / ln_d * scale;
    let s_joint = von_neumann_nats(joint)? / ln_d * scale;
    Ok(CoherentInfo {
        base,
        s_output,
        s_joint,
        i_c: s_output - s_joint,
    })
}

/// `-tr ρ ln ρ` for Hermitian `ρ`.
///
/// Uses singular values: nalgebra's Hermitian eigensolver returns wrong
/// spectra for sparse rank-deficient inputs such as pure states of
/// dimension 64 and up. For Hermitian `ρ`, `Σσ - tr ρ` is twice the
/// negative eigenvalue mass, and the call fails if that exceeds `1e-10`.
pub fn von_neumann_nats(rho: DMatrix<C64>) -> Result<f64> {
    let tr = rho.trace().re;
    let sv = rho.singular_values();
    let negative = 0.5 * (sv.iter().copied().collect::<KahanSum>().value() - tr);
    if negative > PSD_TOLERANCE {
        return Err(Error::Numerical(format!(
            "density matrix has negative eigenvalue mass {negative:e}"
        )));
    }
    Ok(sv
        .iter()
        .map(|&l| -math::xlnx(l))
        .collect::<KahanSum>()
        .value())
}
