//! Stabilizer codes as self-orthogonal subspaces with a fixed completion.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldVector};
use crate::symplectic::{hyperbolic_complete, HyperbolicBasis, Subspace};

/// A stabilizer code `L ⊂ F_d^{2n}` with `dim L = n - k` together with a
/// symplectic basis whose first `n - k` vectors `g_i` are the given
/// generators of `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    stabilizer: Subspace,
    completion: HyperbolicBasis,
}

impl StabilizerCode {
    /// Builds the code spanned by `generators` (in that order) on `n`
    /// qudits, completing it with the given seed.
    pub fn new(field: Field, n: usize, generators: Vec<FieldVector>, seed: u64) -> Result<Self> {
        let stabilizer = Subspace::from_basis(field, 2 * n, generators)?;
        Self::from_subspace(stabilizer, seed)
    }

    pub fn from_subspace(stabilizer: Subspace, seed: u64) -> Result<Self> {
        if !stabilizer.ambient_len().is_multiple_of(2) {
            return Err(Error::OddLength(stabilizer.ambient_len()));
        }
        let n = stabilizer.ambient_len() / 2;
        if !stabilizer.is_self_orthogonal() {
            return Err(Error::NotSelfOrthogonal);
        }
        if stabilizer.dim() > n {
            return Err(Error::DimensionTooLarge {
                dim: stabilizer.dim(),
                ambient: stabilizer.ambient_len(),
            });
        }
        let completion = hyperbolic_complete(&stabilizer, seed)?;
        Ok(StabilizerCode {
            n,
            k: n - stabilizer.dim(),
            stabilizer,
            completion,
        })
    }

    /// Pairs a subspace with an explicit completion, which must start with
    /// the subspace's ordered basis.
    pub fn with_completion(stabilizer: Subspace, completion: HyperbolicBasis) -> Result<Self> {
        let n = completion.n();
        if stabilizer.ambient_len() != 2 * n || completion.stabilizer_dim() != stabilizer.dim() {
            return Err(Error::InvalidCode("completion does not match the stabilizer".into()));
        }
        if completion.g()[..stabilizer.dim()] != *stabilizer.basis() {
            return Err(Error::InvalidCode("completion must begin with the stabilizer basis".into()));
        }
        if !completion.gram_check() {
            return Err(Error::InvalidCode("completion violates the Gram conditions".into()));
        }
        Ok(StabilizerCode {
            n,
            k: n - stabilizer.dim(),
            stabilizer,
            completion,
        })
    }

    /// The same subspace with a different completion seed.
    pub fn recomplete(&self, seed: u64) -> Result<Self> {
        Self::from_subspace(self.stabilizer.clone(), seed)
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.stabilizer.field()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stabilizer(&self) -> &Subspace {
        &self.stabilizer
    }

    pub fn completion(&self) -> &HyperbolicBasis {
        &self.completion
    }

    pub fn generators(&self) -> &[FieldVector] {
        self.stabilizer.basis()
    }

    /// Both structural invariants: self-orthogonality and the Gram check.
    pub fn is_valid(&self) -> bool {
        self.stabilizer.is_self_orthogonal()
            && self.completion.gram_check()
            && self.stabilizer.dim() == self.n - self.k
    }
}

/// Decodes the compact `Z_{d^2}` digit-string notation: digit `t` stands for
/// the pair `(t mod d, t div d)`, so `"1100000"` over `d = 3` is
/// `(1,0, 1,0, 0,0, ...)`.
pub fn decode_digit_string(field: Field, digits: &str) -> Result<FieldVector> {
    let d = field.order() as u32;
    let mut coords = Vec::with_capacity(2 * digits.len());
    for ch in digits.chars() {
        let t = ch
            .to_digit(36)
            .ok_or_else(|| Error::InvalidArgument(format!("bad digit `{ch}`")))?;
        if t >= d * d {
            return Err(Error::CoordinateOutOfRange {
                value: t,
                modulus: field.order(),
            });
        }
        coords.push((t % d) as u8);
        coords.push((t / d) as u8);
    }
    FieldVector::new(field, coords)
}

/// Names accepted by [`catalog`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogName {
    /// X-type repetition code on `n` qudits, `k = 1`.
    Repetition(usize),
    /// `L = {0}`, `k = n`.
    Trivial(usize),
    /// The `[[5,1]]` qubit code.
    FiveQubit,
}

impl CatalogName {
    /// Accepts `rep7`, `rep(7)`, `trivial1`, `trivial(1)`, `five_qubit`.
    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        if lower == "five_qubit" || lower == "five-qubit" || lower == "5qubit" {
            return Ok(CatalogName::FiveQubit);
        }
        let sized = |prefix: &str| -> Option<usize> {
            let rest = lower.strip_prefix(prefix)?;
            let rest = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .unwrap_or(rest);
            rest.parse().ok().filter(|&n| n >= 1)
        };
        if let Some(n) = sized("rep") {
            return Ok(CatalogName::Repetition(n));
        }
        if let Some(n) = sized("trivial") {
            return Ok(CatalogName::Trivial(n));
        }
        Err(Error::UnknownCode(name.to_string()))
    }
}

impl core::fmt::Display for CatalogName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CatalogName::Repetition(n) => write!(f, "rep({n})"),
            CatalogName::Trivial(n) => write!(f, "trivial({n})"),
            CatalogName::FiveQubit => f.write_str("five_qubit"),
        }
    }
}

/// `(name pattern, description)` for every catalog family.
pub fn catalog_entries() -> &'static [(&'static str, &'static str)] {
    &[
        ("rep(n)", "X-type repetition code, generators X_1 X_{i+1}; k = 1, any prime d"),
        ("trivial(n)", "no stabilizers, L = {0}; k = n, any prime d"),
        ("five_qubit", "[[5,1]] code with cyclic generators XZZXI; d = 2 only"),
    ]
}

/// Builds a catalog code, completed with seed 0.
pub fn catalog(name: &str, field: Field) -> Result<StabilizerCode> {
    build_catalog(CatalogName::parse(name)?, field)
}

pub fn build_catalog(name: CatalogName, field: Field) -> Result<StabilizerCode> {
    let gens = match name {
        CatalogName::Repetition(n) => {
            let mut gens = Vec::with_capacity(n - 1);
            for i in 1..n {
                let mut g = FieldVector::zero(field, 2 * n);
                g.set(0, 1);
                g.set(2 * i, 1);
                gens.push(g);
            }
            (n, gens)
        }
        CatalogName::Trivial(n) => (n, Vec::new()),
        CatalogName::FiveQubit => {
            if field.order() != 2 {
                return Err(Error::InvalidCode("five_qubit is defined for d = 2 only".into()));
            }
            let rows = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];
            let gens = rows
                .iter()
                .map(|r| pauli_string(field, r))
                .collect::<Result<Vec<_>>>()?;
            (5, gens)
        }
    };
    StabilizerCode::new(field, gens.0, gens.1, 0)
}

/// `I`, `X`, `Z`, `Y` (= XZ) letters to a vector.
fn pauli_string(field: Field, s: &str) -> Result<FieldVector> {
    let mut coords = Vec::with_capacity(2 * s.len());
    for ch in s.chars() {
        let (u, v) = match ch {
            'I' => (0, 0),
            'X' => (1, 0),
            'Z' => (0, 1),
            'Y' => (1, 1),
            other => return Err(Error::InvalidArgument(format!("bad Pauli letter `{other}`"))),
        };
        coords.push(u);
        coords.push(v);
    }
    FieldVector::new(field, coords)
}

/// Embeds `x ∈ F_d^{2n}` into block `j` of `F_d^{2nN}`.
fn embed(x: &FieldVector, block: usize, blocks: usize) -> FieldVector {
    let len = x.len();
    let mut coords = alloc::vec![0u8; len * blocks];
    coords[block * len..(block + 1) * len].copy_from_slice(x.coords());
    FieldVector::new(x.field(), coords).expect("coordinates already reduced")
}

/// `x̄ = Σ_{j,m} u_{j,m} g_{n-k+m}^{(j)} + u'_{j,m} h_{n-k+m}^{(j)}` for
/// `x = (u_{1,1}, u'_{1,1}, ..., u_{N,k}, u'_{N,k})`.
pub fn bar_map(inner: &StabilizerCode, x: &FieldVector) -> Result<FieldVector> {
    inner.field().check(x.field())?;
    let k = inner.k();
    if k == 0 || !x.len().is_multiple_of(2 * k) {
        return Err(Error::DimensionMismatch {
            expected: 2 * k.max(1),
            found: x.len(),
        });
    }
    let blocks = x.len() / (2 * k);
    let n = inner.n();
    let s = n - k;
    let basis = inner.completion();
    let field = inner.field();
    let mut out = FieldVector::zero(field, 2 * n * blocks);
    let mut block_vec = FieldVector::zero(field, 2 * n);
    for j in 0..blocks {
        block_vec = block_vec.scale(0);
        for m in 0..k {
            let (u, up) = x.pair(j * k + m);
            block_vec.add_scaled(u, &basis.g()[s + m]);
            block_vec.add_scaled(up, &basis.h()[s + m]);
        }
        let off = 2 * n * j;
        let mut coords = out.clone().into_coords();
        coords[off..off + 2 * n].copy_from_slice(block_vec.coords());
        out = FieldVector::new(field, coords)?;
    }
    Ok(out)
}

/// The concatenation of an inner `[[n, k]]` code with an outer code on
/// `kN` qudits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatenatedCode {
    inner: StabilizerCode,
    outer: StabilizerCode,
    result: StabilizerCode,
    blocks: usize,
}

impl ConcatenatedCode {
    pub fn inner(&self) -> &StabilizerCode {
        &self.inner
    }

    pub fn outer(&self) -> &StabilizerCode {
        &self.outer
    }

    pub fn result(&self) -> &StabilizerCode {
        &self.result
    }

    /// `N`.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Information rate `K / (nN)` of the result.
    pub fn rate(&self) -> f64 {
        self.result.k() as f64 / self.result.n() as f64
    }
}

/// Concatenates `inner` with `outer`; the result is spanned by the inner
/// generators in every block followed by the images `ḡ'_i` of the outer
/// generators. Its completion is recomputed with seed 0.
pub fn concatenate(inner: &StabilizerCode, outer: &StabilizerCode) -> Result<ConcatenatedCode> {
    inner.field().check(outer.field())?;
    let k = inner.k();
    if k == 0 || !outer.n().is_multiple_of(k) {
        return Err(Error::InvalidCode(format!(
            "outer length {} is not a multiple of the inner k = {}",
            outer.n(),
            k
        )));
    }
    let blocks = outer.n() / k;
    let s = inner.n() - k;
    let mut gens = Vec::with_capacity(s * blocks + outer.generators().len());
    for j in 0..blocks {
        for g in &inner.completion().g()[..s] {
            gens.push(embed(g, j, blocks));
        }
    }
    for g in outer.generators() {
        gens.push(bar_map(inner, g)?);
    }
    let result = StabilizerCode::new(inner.field(), inner.n() * blocks, gens, 0)?;
    Ok(ConcatenatedCode {
        inner: inner.clone(),
        outer: outer.clone(),
        result,
        blocks,
    })
}

/// `L ⊕ L'` on `n + n'` qudits. The completion pastes the two completions:
/// stabilizer pairs of `a`, then of `b`, then logical pairs of `a`, then of
/// `b`. Row and column indices of the probability array therefore factor as
/// `(s, s')` and `(u, u')`.
pub fn direct_sum(a: &StabilizerCode, b: &StabilizerCode) -> Result<StabilizerCode> {
    a.field().check(b.field())?;
    let field = a.field();
    let (na, nb) = (a.n(), b.n());
    let (sa, sb) = (na - a.k(), nb - b.k());
    let left = |x: &FieldVector| x.concat(&FieldVector::zero(field, 2 * nb));
    let right = |x: &FieldVector| FieldVector::zero(field, 2 * na).concat(x);
    let (ca, cb) = (a.completion(), b.completion());

    let mut g = Vec::with_capacity(na + nb);
    let mut h = Vec::with_capacity(na + nb);
    for i in 0..sa {
        g.push(left(&ca.g()[i]));
        h.push(left(&ca.h()[i]));
    }
    for i in 0..sb {
        g.push(right(&cb.g()[i]));
        h.push(right(&cb.h()[i]));
    }
    for i in sa..na {
        g.push(left(&ca.g()[i]));
        h.push(left(&ca.h()[i]));
    }
    for i in sb..nb {
        g.push(right(&cb.g()[i]));
        h.push(right(&cb.h()[i]));
    }
    let stabilizer = Subspace::from_basis(field, 2 * (na + nb), g[..sa + sb].to_vec())?;
    let completion = HyperbolicBasis::from_pairs(field, g, h, sa + sb)?;
    StabilizerCode::with_completion(stabilizer, completion)
}

/// Human-readable summary, e.g. `[[7,1]] over F_3`.
pub fn describe(code: &StabilizerCode) -> String {
    format!("[[{},{}]] over F_{}", code.n(), code.k(), code.field().order())
}
