//! Constructive pieces of the argument: pinching by diagonal roots-of-unity
//! unitaries, commuting PSD pair instances, simultaneous diagonalization of a
//! commuting pair, and the block assembly
//!
//! ```text
//! S = (U_1 | ... | U_K),  L = a_1 ⊕ ... ⊕ a_K,  M = b_1 ⊕ ... ⊕ b_K
//! ```
//!
//! for which `Σ A_k = S L S*`, `Σ B_k = S M S*` and `Σ A_k B_k = S L M S*`.

use crate::error::{Error, Result};
use crate::linalg::{direct_sum, hconcat, hermitian_eig, ComplexMatrix, C64};
use crate::{MAX_DIM, MAX_PAIRS};

/// Hermitian defect accepted for instance matrices, relative to `1 + max|entry|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted as PSD, relative to `1 + max|entry|`.
pub const PSD_TOL: f64 = 1e-9;
/// Commutator residual accepted for a pair, relative to `1 + max|A|·max|B|`.
pub const COMMUTATOR_TOL: f64 = 1e-9;
/// Off-diagonal mass accepted after joint diagonalization, relative to `1 + max|entry|`.
pub const JOINT_DIAGONAL_TOL: f64 = 1e-9;

/// `e^{2πi k / j}`, exact at multiples of a quarter turn.
fn root_of_unity(k: usize, j: usize) -> C64 {
    let k = k % j;
    if (4 * k).is_multiple_of(j) {
        return match 4 * k / j {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / j as f64)
}

/// The `J = n` diagonal unitaries `U_j = diag(ω^{j·t})`, `ω = e^{2πi/n}`, whose
/// conjugation average `(1/J) Σ_j U_j T U_j*` is the diagonal part of `T`.
#[derive(Clone, Debug)]
pub struct PinchingFamily {
    dimension: usize,
    unitaries: Vec<ComplexMatrix>,
}

impl PinchingFamily {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn count(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }
}

pub fn pinching_family(n: usize) -> Result<PinchingFamily> {
    if n == 0 {
        return Err(Error::Usage("pinching family needs a positive dimension".into()));
    }
    let unitaries = (0..n)
        .map(|j| ComplexMatrix::from_diag(&(0..n).map(|t| root_of_unity(j * t, n)).collect::<Vec<_>>()))
        .collect();
    Ok(PinchingFamily { dimension: n, unitaries })
}

/// `(1/J) Σ_j U_j T U_j*`.
pub fn pinch(t: &ComplexMatrix, family: &PinchingFamily) -> Result<ComplexMatrix> {
    if t.shape() != (family.dimension, family.dimension) {
        return Err(Error::Dimension(format!(
            "pinching family of dimension {} applied to a {}x{} matrix",
            family.dimension,
            t.rows(),
            t.cols()
        )));
    }
    let mut acc = ComplexMatrix::zeros(family.dimension, family.dimension);
    for u in &family.unitaries {
        acc = acc.checked_add(&u.matmul(t)?.matmul(&u.adjoint())?)?;
    }
    Ok(acc.scaled(1.0 / family.count() as f64))
}

/// `max|AB − BA|`.
pub fn commutator_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Dimension("commutator needs two square matrices of the same size".into()));
    }
    Ok(a.matmul(b)?.max_abs_diff(&b.matmul(a)?))
}

/// Inputs of the singular-value lemma: a general `n×m` frame `S` and the
/// diagonals of two PSD diagonal `m×m` matrices `L` and `M`.
#[derive(Clone, Debug)]
pub struct Lemma1Inputs {
    frame: ComplexMatrix,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Lemma1Inputs {
    pub fn new(frame: ComplexMatrix, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        let m = frame.cols();
        if left.len() != m || right.len() != m {
            return Err(Error::Dimension(format!(
                "frame has {m} columns but diagonals have lengths {} and {}",
                left.len(),
                right.len()
            )));
        }
        if let Some(v) = left.iter().chain(&right).find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!("diagonal weights must be finite and nonnegative, found {v}")));
        }
        Ok(Lemma1Inputs { frame, left, right })
    }

    /// The `n×m` matrix `S`.
    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    /// Diagonal of `L`.
    pub fn left(&self) -> &[f64] {
        &self.left
    }

    /// Diagonal of `M`.
    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn n(&self) -> usize {
        self.frame.rows()
    }

    pub fn m(&self) -> usize {
        self.frame.cols()
    }
}

/// `K` pairs `(A_k, B_k)` of `d×d` PSD matrices with `A_k B_k = B_k A_k`.
#[derive(Clone, Debug)]
pub struct CommutingPairInstance {
    d: usize,
    pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
}

/// Worst-case invariant residuals of an instance, each already divided by its scale.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InstanceResiduals {
    pub hermitian: f64,
    pub psd: f64,
    pub commutator: f64,
}

impl CommutingPairInstance {
    /// Validates Hermitian, PSD and commutation invariants for every pair.
    pub fn new(pairs: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let inst = Self::from_pairs_unchecked(pairs)?;
        let r = inst.residuals()?;
        if r.hermitian > HERMITIAN_TOL {
            return Err(Error::Domain(format!("pair matrix is not Hermitian (relative defect {:.3e})", r.hermitian)));
        }
        if r.psd > PSD_TOL {
            return Err(Error::Domain(format!(
                "pair matrix is not positive semidefinite (relative negative eigenvalue {:.3e})",
                r.psd
            )));
        }
        if r.commutator > COMMUTATOR_TOL {
            return Err(Error::Domain(format!(
                "pair does not commute: commutator residual {:.3e} exceeds {COMMUTATOR_TOL:e}",
                r.commutator
            )));
        }
        Ok(inst)
    }

    /// Checks only shapes and caps. Callers that construct pairs from a shared
    /// eigenbasis use this to skip the eigenvalue-based validation.
    pub fn from_pairs_unchecked(pairs: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let d = match pairs.first() {
            Some((a, _)) => a.rows(),
            None => return Err(Error::Usage("instance needs at least one pair".into())),
        };
        if pairs.len() > MAX_PAIRS {
            return Err(Error::Usage(format!("{} pairs exceed the cap of {MAX_PAIRS}", pairs.len())));
        }
        if d > MAX_DIM {
            return Err(Error::Usage(format!("dimension {d} exceeds the cap of {MAX_DIM}")));
        }
        for (k, (a, b)) in pairs.iter().enumerate() {
            if a.shape() != (d, d) || b.shape() != (d, d) {
                return Err(Error::Dimension(format!("pair {} is not {d}x{d}", k + 1)));
            }
        }
        Ok(CommutingPairInstance { d, pairs })
    }

    pub fn residuals(&self) -> Result<InstanceResiduals> {
        let mut r = InstanceResiduals::default();
        for (a, b) in &self.pairs {
            for m in [a, b] {
                let scale = 1.0 + m.max_abs();
                r.hermitian = r.hermitian.max(m.hermitian_residual() / scale);
                if m.hermitian_residual() <= HERMITIAN_TOL * scale {
                    let lowest = hermitian_eig(m, HERMITIAN_TOL)?.eigenvalues.last().copied().unwrap_or(0.0);
                    r.psd = r.psd.max(-lowest / scale);
                }
            }
            r.commutator = r.commutator.max(commutator_residual(a, b)? / (1.0 + a.max_abs() * b.max_abs()));
        }
        Ok(r)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.pairs
    }

    pub fn sum_a(&self) -> ComplexMatrix {
        self.sum_by(|(a, _)| a.clone())
    }

    pub fn sum_b(&self) -> ComplexMatrix {
        self.sum_by(|(_, b)| b.clone())
    }

    /// `Σ A_k B_k`.
    pub fn sum_products(&self) -> ComplexMatrix {
        self.sum_by(|(a, b)| a.matmul(b).expect("pairs share a shape"))
    }

    fn sum_by(&self, f: impl Fn(&(ComplexMatrix, ComplexMatrix)) -> ComplexMatrix) -> ComplexMatrix {
        let mut terms = self.pairs.iter().map(f);
        let first = terms.next().expect("at least one pair");
        terms.fold(first, |acc, t| acc.checked_add(&t).expect("pairs share a shape"))
    }

    /// `Σ max|A_k|·max|B_k|`, the rounding scale of `Σ A_k B_k`.
    pub fn product_scale(&self) -> f64 {
        self.pairs.iter().map(|(a, b)| a.max_abs() * b.max_abs()).sum()
    }

    /// Conjugates every matrix by the same unitary.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let conj =
            |m: &ComplexMatrix| -> Result<ComplexMatrix> { Ok(u.matmul(m)?.matmul(&u.adjoint())?.hermitian_part()) };
        let pairs = self.pairs.iter().map(|(a, b)| Ok((conj(a)?, conj(b)?))).collect::<Result<Vec<_>>>()?;
        Self::from_pairs_unchecked(pairs)
    }

    /// Multiplies every `A_k` by `ta` and every `B_k` by `tb`.
    pub fn scaled(&self, ta: f64, tb: f64) -> Self {
        let pairs = self.pairs.iter().map(|(a, b)| (a.scaled(ta), b.scaled(tb))).collect();
        CommutingPairInstance { d: self.d, pairs }
    }
}

/// Shared eigenbasis of a commuting Hermitian pair with the paired diagonals.
#[derive(Clone, Debug)]
pub struct JointDiagonalization {
    pub basis: ComplexMatrix,
    /// `a[i] = (basis* A basis)_{ii}`, in basis-column order.
    pub a: Vec<f64>,
    /// `b[i] = (basis* B basis)_{ii}`, in the same order as `a`.
    pub b: Vec<f64>,
}

/// Mixing weights tried for `A/|A| + γ B/|B|`, spread over `[0.5, 1.5]` by the golden ratio.
const MIXING_WEIGHTS: [f64; 5] =
    [1.118_033_988_749_895, 0.736_067_977_499_79, 1.354_101_966_249_685, 0.972_135_954_999_58, 0.590_169_943_749_474];

/// Diagonalizes a commuting Hermitian pair in one unitary basis.
///
/// A generic combination `A/|A| + γ·B/|B|` is diagonalized for up to five
/// values of `γ`; if none yields a basis in which both matrices are diagonal,
/// `A` is diagonalized and `B` is then diagonalized inside each eigenvalue
/// cluster of `A`.
pub fn simultaneous_diagonalize(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<JointDiagonalization> {
    let residual = commutator_residual(a, b)?;
    let (sa, sb) = (a.max_abs(), b.max_abs());
    if residual > tol * (1.0 + sa * sb) {
        return Err(Error::Domain(format!("pair does not commute: commutator residual {residual:.3e}")));
    }
    let na = if sa > 0.0 { a.scaled(1.0 / sa) } else { a.clone() };
    let nb = if sb > 0.0 { b.scaled(1.0 / sb) } else { b.clone() };
    for gamma in MIXING_WEIGHTS {
        let mix = na.checked_add(&nb.scaled(gamma))?;
        let basis = hermitian_eig(&mix, HERMITIAN_TOL)?.basis;
        if let Some(joint) = accept_basis(a, b, basis)? {
            return Ok(joint);
        }
    }
    block_refinement(a, b)
}

/// Two-stage fallback: eigenbasis of `A`, then `B` diagonalized within each
/// cluster of `A`-eigenvalues closer than `1e-8·(1 + max|A|)`.
pub(crate) fn block_refinement(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<JointDiagonalization> {
    let n = a.rows();
    let eig = hermitian_eig(a, HERMITIAN_TOL)?;
    let gap = 1e-8 * (1.0 + a.max_abs());
    let mut basis = eig.basis.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[end - 1] - eig.eigenvalues[end] <= gap {
            end += 1;
        }
        if end - start > 1 {
            let block = ComplexMatrix::from_fn(n, end - start, |i, j| eig.basis[(i, start + j)]);
            let compressed = block.adjoint().matmul(b)?.matmul(&block)?;
            let inner = hermitian_eig(&compressed.hermitian_part(), HERMITIAN_TOL)?;
            let rotated = block.matmul(&inner.basis)?;
            for i in 0..n {
                for j in 0..end - start {
                    basis[(i, start + j)] = rotated[(i, j)];
                }
            }
        }
        start = end;
    }
    accept_basis(a, b, basis)?
        .ok_or_else(|| Error::Numerical("could not resolve a degenerate eigenspace of the commuting pair".into()))
}

fn accept_basis(a: &ComplexMatrix, b: &ComplexMatrix, basis: ComplexMatrix) -> Result<Option<JointDiagonalization>> {
    let da = basis.adjoint().matmul(a)?.matmul(&basis)?;
    let db = basis.adjoint().matmul(b)?.matmul(&basis)?;
    let off = |m: &ComplexMatrix| {
        let mut worst = 0.0f64;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
        worst
    };
    if off(&da) > JOINT_DIAGONAL_TOL * (1.0 + a.max_abs()) || off(&db) > JOINT_DIAGONAL_TOL * (1.0 + b.max_abs()) {
        return Ok(None);
    }
    Ok(Some(JointDiagonalization {
        a: da.diagonal().iter().map(|z| z.re).collect(),
        b: db.diagonal().iter().map(|z| z.re).collect(),
        basis,
    }))
}

/// `S = (U_1 | ... | U_K)` with `L`, `M` the concatenated paired eigenvalues.
#[derive(Clone, Debug)]
pub struct Theorem1Assembly {
    /// `d × Kd` concatenation of the per-pair eigenbases.
    pub frame: ComplexMatrix,
    /// Diagonal of `L`, length `Kd`, entries clamped to be nonnegative.
    pub left: Vec<f64>,
    /// Diagonal of `M`, length `Kd`, entries clamped to be nonnegative.
    pub right: Vec<f64>,
    pub bases: Vec<ComplexMatrix>,
    pub a_diagonals: Vec<Vec<f64>>,
    pub b_diagonals: Vec<Vec<f64>>,
}

/// Residuals of the three reconstruction identities and of the unit column norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyResiduals {
    /// `max|S L S* − Σ A_k| / (1 + max|Σ A_k|)`.
    pub sum_a: f64,
    pub sum_b: f64,
    /// `max|S LM S* − Σ A_k B_k| / (1 + Σ max|A_k|·max|B_k|)`, the scale at
    /// which the products themselves are rounded.
    pub sum_products: f64,
    /// `max_i |(S*S)_ii − 1|`.
    pub column_norms: f64,
}

impl AssemblyResiduals {
    pub fn reconstruction(&self) -> f64 {
        self.sum_a.max(self.sum_b).max(self.sum_products)
    }
}

impl Theorem1Assembly {
    /// `L` as a `Kd × Kd` matrix, built as the direct sum of the per-pair diagonals.
    pub fn left_matrix(&self) -> Result<ComplexMatrix> {
        direct_sum(&self.a_diagonals.iter().map(|a| ComplexMatrix::from_real_diag(&clamped(a))).collect::<Vec<_>>())
    }

    pub fn right_matrix(&self) -> Result<ComplexMatrix> {
        direct_sum(&self.b_diagonals.iter().map(|b| ComplexMatrix::from_real_diag(&clamped(b))).collect::<Vec<_>>())
    }

    /// `S · diag(w) · S*`.
    pub fn sandwich(&self, weights: &[f64]) -> Result<ComplexMatrix> {
        Ok(self.frame.scale_columns(weights)?.matmul(&self.frame.adjoint())?.hermitian_part())
    }

    /// Squared column norms of `S`, i.e. the diagonal of `S*S`.
    pub fn column_norms_squared(&self) -> Vec<f64> {
        (0..self.frame.cols()).map(|j| (0..self.frame.rows()).map(|i| self.frame[(i, j)].norm_sqr()).sum()).collect()
    }

    pub fn residuals(&self, inst: &CommutingPairInstance) -> Result<AssemblyResiduals> {
        let rel = |x: &ComplexMatrix, y: &ComplexMatrix| x.max_abs_diff(y) / (1.0 + y.max_abs());
        let lm: Vec<f64> = self.left.iter().zip(&self.right).map(|(l, m)| l * m).collect();
        Ok(AssemblyResiduals {
            sum_a: rel(&self.sandwich(&self.left)?, &inst.sum_a()),
            sum_b: rel(&self.sandwich(&self.right)?, &inst.sum_b()),
            sum_products: self.sandwich(&lm)?.max_abs_diff(&inst.sum_products()) / (1.0 + inst.product_scale()),
            column_norms: self.column_norms_squared().iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max),
        })
    }

    /// The lemma inputs `(S, L, M)` carried by this assembly.
    pub fn lemma_inputs(&self) -> Result<Lemma1Inputs> {
        Lemma1Inputs::new(self.frame.clone(), self.left.clone(), self.right.clone())
    }
}

fn clamped(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.max(0.0)).collect()
}

/// Builds `S`, `L`, `M` from per-pair joint eigendecompositions and checks the
/// reconstruction identities (within `1e-9` relative) and unit column norms
/// (within `1e-10`).
pub fn assemble_theorem1(inst: &CommutingPairInstance) -> Result<Theorem1Assembly> {
    let mut bases = Vec::with_capacity(inst.k());
    let mut a_diagonals = Vec::with_capacity(inst.k());
    let mut b_diagonals = Vec::with_capacity(inst.k());
    for (a, b) in inst.pairs() {
        let joint = simultaneous_diagonalize(a, b, COMMUTATOR_TOL)?;
        bases.push(joint.basis);
        a_diagonals.push(joint.a);
        b_diagonals.push(joint.b);
    }
    let frame = hconcat(&bases)?;
    let left = clamped(&a_diagonals.concat());
    let right = clamped(&b_diagonals.concat());
    let assembly = Theorem1Assembly { frame, left, right, bases, a_diagonals, b_diagonals };
    let r = assembly.residuals(inst)?;
    if r.reconstruction() > 1e-9 {
        return Err(Error::Numerical(format!(
            "assembly does not reconstruct the pair sums (residual {:.3e})",
            r.reconstruction()
        )));
    }
    if r.column_norms > 1e-10 {
        return Err(Error::Numerical(format!(
            "assembled frame has non-unit columns (residual {:.3e})",
            r.column_norms
        )));
    }
    Ok(assembly)
}
