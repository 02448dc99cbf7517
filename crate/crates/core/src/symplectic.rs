//! Subspaces of `(F_d^{2n}, <·,·>)`.
//!
//! The central routine is [`hyperbolic_complete`], which extends an ordered
//! basis `g_1, ..., g_{n-k}` of a self-orthogonal subspace `L` to a full
//! symplectic basis `(g_i, h_i)` with
//!
//! ```text
//! <g_i, h_j> = δ_ij,   <g_i, g_j> = 0,   <h_i, h_j> = 0.
//! ```
//!
//! It proceeds in two stages. First, for `l = n-k` down to `1`, a partner
//! `h_l` is found inside the current nondegenerate space `V` that is
//! orthogonal to `g_1, ..., g_{l-1}` and pairs to 1 with `g_l`; the plane
//! `span{g_l, h_l}` is then split off `V`. Second, the remaining space is
//! exhausted by repeatedly picking any nonzero `g` in it and a partner `h`.
//! Every free choice is a uniformly random candidate drawn from a seeded
//! generator (first valid candidate wins), and partners are rescaled so the
//! pairing is exactly 1.
//!
//! In the resulting basis every `x` expands as `x = Σ_i (w_i g_i + z_i h_i)`
//! with `z_i = <g_i, x>` and `w_i = <x, h_i>`; see [`HyperbolicBasis::chi_coordinates`].
//!
//! [`sample_self_orthogonal`] draws a uniformly random self-orthogonal
//! subspace of a given dimension by iterated extension: from a current
//! isotropic `S` of dimension `m'`, a uniform vector of `S^⊥ \ S` is
//! appended. There are `d^{2m-m'} - d^{m'}` such vectors, which depends only
//! on `m'`, so each ordered basis of a given target subspace is produced with
//! the same probability, and every subspace has the same number of ordered
//! bases. Hence the output is uniform.

use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldVector};
use crate::linalg;

/// A subspace of `F_d^len` with its generators and its reduced row-echelon
/// form. Equality and hashing use the echelon form only.
#[derive(Debug, Clone)]
pub struct Subspace {
    field: Field,
    len: usize,
    basis: Vec<FieldVector>,
    canonical: Vec<FieldVector>,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.len == other.len && self.canonical == other.canonical
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.hash(state);
        self.len.hash(state);
        self.canonical.hash(state);
    }
}

impl Subspace {
    pub fn zero(field: Field, len: usize) -> Self {
        Subspace {
            field,
            len,
            basis: Vec::new(),
            canonical: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// The whole space `F_d^len` with its standard basis.
    pub fn full(field: Field, len: usize) -> Self {
        let basis: Vec<_> = (0..len).map(|i| FieldVector::unit(field, len, i)).collect();
        Subspace {
            field,
            len,
            canonical: basis.clone(),
            pivots: (0..len).collect(),
            basis,
        }
    }

    /// Subspace with the given ordered basis; the generators must be
    /// linearly independent.
    pub fn from_basis(field: Field, len: usize, basis: Vec<FieldVector>) -> Result<Self> {
        for b in &basis {
            field.check(b.field())?;
            if b.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: b.len(),
                });
            }
        }
        let (canonical, pivots) = linalg::rref(field, &basis, len);
        if canonical.len() != basis.len() {
            return Err(Error::LinearlyDependent);
        }
        Ok(Subspace {
            field,
            len,
            basis,
            canonical,
            pivots,
        })
    }

    /// Span of arbitrary (possibly dependent) vectors; the echelon form
    /// doubles as the basis.
    pub fn span(field: Field, len: usize, vectors: &[FieldVector]) -> Result<Self> {
        for b in vectors {
            field.check(b.field())?;
            if b.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: b.len(),
                });
            }
        }
        let (canonical, pivots) = linalg::rref(field, vectors, len);
        Ok(Subspace {
            field,
            len,
            basis: canonical.clone(),
            canonical,
            pivots,
        })
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    /// Length of the ambient vectors.
    #[inline]
    pub fn ambient_len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The generators in the order they were supplied.
    pub fn basis(&self) -> &[FieldVector] {
        &self.basis
    }

    /// Reduced row-echelon basis.
    pub fn canonical(&self) -> &[FieldVector] {
        &self.canonical
    }

    pub fn contains(&self, x: &FieldVector) -> bool {
        if x.len() != self.len || x.field() != self.field {
            return false;
        }
        let mut r = x.clone();
        for (row, &p) in self.canonical.iter().zip(&self.pivots) {
            let c = r.get(p);
            if c != 0 {
                r.add_scaled(self.field.neg(c), row);
            }
        }
        r.is_zero()
    }

    /// True iff `<x, y> = 0` for all pairs of basis vectors.
    pub fn is_self_orthogonal(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, x)| {
            self.basis[i + 1..].iter().all(|y| x.symplectic(y) == 0)
        })
    }

    /// Symplectic complement `{y : <x, y> = 0 for all x in self}`.
    pub fn perp(&self) -> Subspace {
        let duals: Vec<_> = self.basis.iter().map(|b| b.symplectic_dual()).collect();
        let basis = linalg::nullspace(self.field, &duals, self.len);
        Subspace::span(self.field, self.len, &basis).expect("nullspace vectors share shape")
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Uniform random element, as a random combination of the basis.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldVector {
        let d = self.field.order();
        let mut x = FieldVector::zero(self.field, self.len);
        for b in &self.canonical {
            x.add_scaled(rng.random_range(0..d), b);
        }
        x
    }
}

/// Symplectic basis `(g_i, h_i)`, `i = 1..n`, whose first `n-k` vectors `g_i`
/// span the stabilizer subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperbolicBasis {
    field: Field,
    g: Vec<FieldVector>,
    h: Vec<FieldVector>,
    stabilizer_dim: usize,
}

impl HyperbolicBasis {
    /// Assembles a basis from explicit pairs, checking the Gram conditions.
    pub fn from_pairs(
        field: Field,
        g: Vec<FieldVector>,
        h: Vec<FieldVector>,
        stabilizer_dim: usize,
    ) -> Result<Self> {
        let n = g.len();
        if h.len() != n || stabilizer_dim > n {
            return Err(Error::InvalidArgument("mismatched hyperbolic pairs".into()));
        }
        for x in g.iter().chain(&h) {
            field.check(x.field())?;
            if x.len() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    found: x.len(),
                });
            }
        }
        let basis = HyperbolicBasis {
            field,
            g,
            h,
            stabilizer_dim,
        };
        if !basis.gram_check() {
            return Err(Error::InvalidArgument("pairs violate the Gram conditions".into()));
        }
        Ok(basis)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of pairs, `n`.
    #[inline]
    pub fn n(&self) -> usize {
        self.g.len()
    }

    /// `n - k`.
    #[inline]
    pub fn stabilizer_dim(&self) -> usize {
        self.stabilizer_dim
    }

    /// `k`.
    #[inline]
    pub fn logical_dim(&self) -> usize {
        self.g.len() - self.stabilizer_dim
    }

    pub fn g(&self) -> &[FieldVector] {
        &self.g
    }

    pub fn h(&self) -> &[FieldVector] {
        &self.h
    }

    /// Exact check of `<g_i,h_j> = δ_ij`, `<g_i,g_j> = 0`, `<h_i,h_j> = 0`.
    pub fn gram_check(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.g[i].symplectic(&self.h[j]) == u8::from(i == j)
                    && self.g[i].symplectic(&self.g[j]) == 0
                    && self.h[i].symplectic(&self.h[j]) == 0
            })
        })
    }

    /// Expansion coefficients `(w, z)` of `x = Σ_i (w_i g_i + z_i h_i)`:
    /// `z_i = <g_i, x>` and `w_i = <x, h_i>`.
    pub fn chi_coordinates(&self, x: &FieldVector) -> Result<(Vec<u8>, Vec<u8>)> {
        self.field.check(x.field())?;
        if x.len() != 2 * self.n() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n(),
                found: x.len(),
            });
        }
        let w = self.h.iter().map(|h| x.symplectic(h)).collect();
        let z = self.g.iter().map(|g| g.symplectic(x)).collect();
        Ok((w, z))
    }

    /// `Σ_i (w_i g_i + z_i h_i)`.
    pub fn reconstruct(&self, w: &[u8], z: &[u8]) -> FieldVector {
        assert_eq!(w.len(), self.n());
        assert_eq!(z.len(), self.n());
        let mut x = FieldVector::zero(self.field, 2 * self.n());
        for i in 0..self.n() {
            x.add_scaled(w[i], &self.g[i]);
            x.add_scaled(z[i], &self.h[i]);
        }
        x
    }

    /// The syndrome `(<g_i, x>)_{i <= n-k}`.
    pub fn syndrome(&self, x: &FieldVector) -> Vec<u8> {
        self.g[..self.stabilizer_dim]
            .iter()
            .map(|g| g.symplectic(x))
            .collect()
    }
}

fn check_ambient(l: &Subspace) -> Result<usize> {
    if !l.ambient_len().is_multiple_of(2) {
        return Err(Error::OddLength(l.ambient_len()));
    }
    Ok(l.ambient_len() / 2)
}

/// Projection of `v` onto the complement of the hyperbolic plane `(g, h)`.
fn split_off(v: &FieldVector, g: &FieldVector, h: &FieldVector) -> FieldVector {
    let f = v.field();
    let mut out = v.clone();
    out.add_scaled(f.neg(v.symplectic(h)), g);
    out.add_scaled(f.neg(g.symplectic(v)), h);
    out
}

fn random_in<R: Rng + ?Sized>(field: Field, len: usize, basis: &[FieldVector], rng: &mut R) -> FieldVector {
    let d = field.order();
    let mut x = FieldVector::zero(field, len);
    for b in basis {
        x.add_scaled(rng.random_range(0..d), b);
    }
    x
}

const MAX_DRAWS: usize = 10_000;

/// Draws candidates from `span(basis)` until one pairs nonzero with `g`,
/// then rescales it so the pairing is 1.
fn find_partner<R: Rng + ?Sized>(
    field: Field,
    len: usize,
    g: &FieldVector,
    basis: &[FieldVector],
    rng: &mut R,
) -> Result<FieldVector> {
    for _ in 0..MAX_DRAWS {
        let h = random_in(field, len, basis, rng);
        let pairing = g.symplectic(&h);
        if pairing != 0 {
            return Ok(h.scale(field.inv(pairing).expect("nonzero")));
        }
    }
    Err(Error::Numerical("no hyperbolic partner found".into()))
}

/// Completes the ordered basis of a self-orthogonal `L` to a symplectic basis.
/// Deterministic for a given seed.
pub fn hyperbolic_complete(l: &Subspace, seed: u64) -> Result<HyperbolicBasis> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    hyperbolic_complete_with(l, &mut rng)
}

pub fn hyperbolic_complete_with<R: Rng + ?Sized>(l: &Subspace, rng: &mut R) -> Result<HyperbolicBasis> {
    let n = check_ambient(l)?;
    if !l.is_self_orthogonal() {
        return Err(Error::NotSelfOrthogonal);
    }
    let field = l.field();
    let len = 2 * n;
    let s = l.dim();
    let mut g: Vec<FieldVector> = l.basis().to_vec();
    let mut h: Vec<FieldVector> = alloc::vec![FieldVector::zero(field, len); s];
    let mut space: Vec<FieldVector> = Subspace::full(field, len).canonical().to_vec();

    // Stage 1: partners for the given stabilizer generators, last first.
    for li in (0..s).rev() {
        // Coefficient constraints: <g_i, Σ c_j b_j> = 0 for i < li.
        let constraints: Vec<FieldVector> = g[..li]
            .iter()
            .map(|gi| FieldVector::from_raw(field, space.iter().map(|b| gi.symplectic(b)).collect()))
            .collect();
        let coeff_basis = linalg::nullspace(field, &constraints, space.len());
        let candidates: Vec<FieldVector> = coeff_basis
            .iter()
            .map(|c| {
                let mut v = FieldVector::zero(field, len);
                for (j, b) in space.iter().enumerate() {
                    v.add_scaled(c.get(j), b);
                }
                v
            })
            .collect();
        let hl = find_partner(field, len, &g[li], &candidates, rng)?;
        let projected: Vec<_> = space.iter().map(|v| split_off(v, &g[li], &hl)).collect();
        space = linalg::rref(field, &projected, len).0;
        h[li] = hl;
    }

    // Stage 2: exhaust the remaining nondegenerate space.
    while !space.is_empty() {
        let gm = loop {
            let cand = random_in(field, len, &space, rng);
            if !cand.is_zero() {
                break cand;
            }
        };
        let hm = find_partner(field, len, &gm, &space, rng)?;
        let projected: Vec<_> = space.iter().map(|v| split_off(v, &gm, &hm)).collect();
        space = linalg::rref(field, &projected, len).0;
        g.push(gm);
        h.push(hm);
    }

    debug_assert_eq!(g.len(), n);
    let basis = HyperbolicBasis {
        field,
        g,
        h,
        stabilizer_dim: s,
    };
    if !basis.gram_check() {
        return Err(Error::Numerical("completion violated Gram conditions".into()));
    }
    Ok(basis)
}

/// `is_self_orthogonal` as a free function.
pub fn is_self_orthogonal(l: &Subspace) -> bool {
    l.is_self_orthogonal()
}

/// `L^⊥` as a free function.
pub fn perp(l: &Subspace) -> Subspace {
    l.perp()
}

/// `(w, z)` coordinates of `x` in `basis`.
pub fn chi_coordinates(basis: &HyperbolicBasis, x: &FieldVector) -> Result<(Vec<u8>, Vec<u8>)> {
    basis.chi_coordinates(x)
}

/// Number of vectors in `S^⊥ \ S` for an isotropic `S` of dimension
/// `current_dim` inside `F_d^ambient`.
pub fn extension_count(field: Field, ambient: usize, current_dim: usize) -> u128 {
    let d = field.order() as u128;
    d.pow((ambient - current_dim) as u32) - d.pow(current_dim as u32)
}

/// Uniformly random self-orthogonal subspace of `F_d^ambient` with the
/// given dimension.
pub fn sample_self_orthogonal(field: Field, ambient: usize, dim: usize, seed: u64) -> Result<Subspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_self_orthogonal_with(field, ambient, dim, &mut rng)
}

pub fn sample_self_orthogonal_with<R: Rng + ?Sized>(
    field: Field,
    ambient: usize,
    dim: usize,
    rng: &mut R,
) -> Result<Subspace> {
    if !ambient.is_multiple_of(2) {
        return Err(Error::OddLength(ambient));
    }
    if dim > ambient / 2 {
        return Err(Error::DimensionTooLarge { dim, ambient });
    }
    let mut current = Subspace::zero(field, ambient);
    while current.dim() < dim {
        let complement = current.perp();
        debug_assert_eq!(complement.dim(), ambient - current.dim());
        let next = loop {
            let cand = complement.random_element(rng);
            if !current.contains(&cand) {
                break cand;
            }
        };
        let mut basis = current.basis().to_vec();
        basis.push(next);
        current = Subspace::from_basis(field, ambient, basis)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::enumerate_vectors;
    use alloc::collections::BTreeMap;
    use alloc::vec;

    fn f(d: u32) -> Field {
        Field::new(d).unwrap()
    }

    fn v(d: u32, c: &[u8]) -> FieldVector {
        FieldVector::new(f(d), c.to_vec()).unwrap()
    }

    #[test]
    fn self_orthogonality_examples() {
        assert!(Subspace::zero(f(2), 4).is_self_orthogonal());
        let line = Subspace::from_basis(f(2), 4, vec![v(2, &[1, 0, 1, 0])]).unwrap();
        assert!(line.is_self_orthogonal());
        let plane = Subspace::from_basis(f(2), 2, vec![v(2, &[1, 0]), v(2, &[0, 1])]).unwrap();
        assert!(!plane.is_self_orthogonal());
    }

    #[test]
    fn dependent_generators_rejected() {
        let r = Subspace::from_basis(f(3), 4, vec![v(3, &[1, 0, 1, 0]), v(3, &[2, 0, 2, 0])]);
        assert_eq!(r.unwrap_err(), Error::LinearlyDependent);
    }

    #[test]
    fn perp_of_zero_is_everything() {
        let p = Subspace::zero(f(3), 6).perp();
        assert_eq!(p, Subspace::full(f(3), 6));
    }

    #[test]
    fn perp_dimension_and_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..1000 {
            let d = if trial % 2 == 0 { 2 } else { 3 };
            let n = 1 + trial % 4;
            let len = 2 * n;
            let k = rng.random_range(0..=len);
            let gens: Vec<_> = (0..k).map(|_| Subspace::full(f(d), len).random_element(&mut rng)).collect();
            let l = Subspace::span(f(d), len, &gens).unwrap();
            let p = l.perp();
            assert_eq!(l.dim() + p.dim(), len);
            if trial % 50 == 0 {
                // exhaustive cross-check on a subset
                let count = enumerate_vectors(f(d), len)
                    .unwrap()
                    .filter(|y| l.basis().iter().all(|x| x.symplectic(y) == 0))
                    .count();
                assert_eq!(count as u64, (d as u64).pow(p.dim() as u32));
            }
            if l.is_self_orthogonal() {
                assert!(l.is_subspace_of(&p));
            }
        }
    }

    #[test]
    fn complete_trivial_pair() {
        let b = hyperbolic_complete(&Subspace::zero(f(2), 2), 0).unwrap();
        assert_eq!(b.n(), 1);
        assert!(b.gram_check());
    }

    #[test]
    fn complete_single_generator() {
        let l = Subspace::from_basis(f(2), 4, vec![v(2, &[1, 0, 1, 0])]).unwrap();
        let b = hyperbolic_complete(&l, 3).unwrap();
        assert_eq!(b.n(), 2);
        assert_eq!(b.g()[0], v(2, &[1, 0, 1, 0]));
        assert!(b.gram_check());
    }

    #[test]
    fn complete_rejects_non_isotropic() {
        let l = Subspace::from_basis(f(2), 2, vec![v(2, &[1, 0]), v(2, &[0, 1])]).unwrap();
        assert_eq!(hyperbolic_complete(&l, 0).unwrap_err(), Error::NotSelfOrthogonal);
        let odd = Subspace::zero(f(2), 3);
        assert!(hyperbolic_complete(&odd, 0).is_err());
    }

    #[test]
    fn completion_is_seed_deterministic() {
        let l = sample_self_orthogonal(f(3), 8, 2, 5).unwrap();
        assert_eq!(hyperbolic_complete(&l, 9).unwrap(), hyperbolic_complete(&l, 9).unwrap());
    }

    #[test]
    fn chi_unit_vectors() {
        let l = sample_self_orthogonal(f(3), 6, 1, 1).unwrap();
        let b = hyperbolic_complete(&l, 2).unwrap();
        for j in 0..3 {
            let (w, z) = b.chi_coordinates(&b.g()[j]).unwrap();
            assert_eq!(w, (0..3).map(|i| u8::from(i == j)).collect::<Vec<_>>());
            assert!(z.iter().all(|&c| c == 0));
            let (w, z) = b.chi_coordinates(&b.h()[j]).unwrap();
            assert!(w.iter().all(|&c| c == 0));
            assert_eq!(z, (0..3).map(|i| u8::from(i == j)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn chi_is_injective_small() {
        let l = Subspace::from_basis(f(2), 4, vec![v(2, &[1, 0, 1, 0])]).unwrap();
        let b = hyperbolic_complete(&l, 0).unwrap();
        let mut seen = BTreeMap::new();
        for x in enumerate_vectors(f(2), 4).unwrap() {
            let c = b.chi_coordinates(&x).unwrap();
            assert!(seen.insert(c, x).is_none());
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn sampler_errors_and_zero() {
        assert_eq!(sample_self_orthogonal(f(2), 4, 0, 0).unwrap().dim(), 0);
        assert!(matches!(
            sample_self_orthogonal(f(2), 4, 3, 0),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn extension_count_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in [2u32, 3] {
            for m in 0..=2 {
                let s = sample_self_orthogonal_with(f(d), 4, m, &mut rng).unwrap();
                let p = s.perp();
                let brute = enumerate_vectors(f(d), 4)
                    .unwrap()
                    .filter(|x| p.contains(x) && !s.contains(x))
                    .count() as u128;
                assert_eq!(brute, extension_count(f(d), 4, m));
            }
        }
    }
}
