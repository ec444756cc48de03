//! One checker per inequality of the argument.
//!
//! Simple relations return a single [`MajorizationReport`]. Multi-step
//! relations return a [`ChainReport`] with one named stage per step plus
//! diagnostic spectra and norms of the intermediates.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::constructions::{assemble_theorem1, CommutingPairInstance, Lemma1Inputs, PSD_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues_general, eigenvalues_psd_product, hermitian_eig, singular_values, spectral_apply, ComplexMatrix,
    SortedSpectrum, SpectralFunction,
};
use crate::majorization::{compare, ky_fan_norm, schatten_norm, MajorizationReport, Mode, Padding, Verdict};
use crate::MAX_DIM;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StageReport {
    Majorization(MajorizationReport),
    /// A scalar residual that must stay at or below `limit`.
    Residual {
        value: f64,
        limit: f64,
        verdict: Verdict,
    },
}

impl StageReport {
    pub fn passed(&self) -> bool {
        match self {
            StageReport::Majorization(r) => r.passed(),
            StageReport::Residual { verdict, .. } => verdict.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    #[serde(flatten)]
    pub report: StageReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub relation: String,
    pub stages: Vec<Stage>,
    pub verdict: Verdict,
    /// Named spectra and norms of intermediate matrices, for inspection only.
    pub diagnostics: BTreeMap<String, Vec<f64>>,
}

impl ChainReport {
    pub(crate) fn new(relation: &str, stages: Vec<Stage>, diagnostics: BTreeMap<String, Vec<f64>>) -> Self {
        let verdict = Verdict::from_bool(stages.iter().all(|s| s.report.passed()));
        ChainReport { relation: relation.into(), stages, verdict, diagnostics }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn stage(&self, name: &str) -> Option<&MajorizationReport> {
        self.stages.iter().find(|s| s.name == name).and_then(|s| match &s.report {
            StageReport::Majorization(r) => Some(r),
            StageReport::Residual { .. } => None,
        })
    }

    pub fn majorization_stages(&self) -> impl Iterator<Item = (&str, &MajorizationReport)> {
        self.stages.iter().filter_map(|s| match &s.report {
            StageReport::Majorization(r) => Some((s.name.as_str(), r)),
            StageReport::Residual { .. } => None,
        })
    }

    /// The majorization stage with the smallest `min_margin`.
    pub fn tightest(&self) -> Option<&MajorizationReport> {
        self.majorization_stages().map(|(_, r)| r).min_by(|a, b| a.min_margin.total_cmp(&b.min_margin))
    }

    /// Smallest margin across all majorization stages.
    pub fn min_margin(&self) -> f64 {
        self.tightest().map_or(f64::INFINITY, |r| r.min_margin)
    }
}

pub(crate) fn majorization_stage(name: &str, report: MajorizationReport) -> Stage {
    Stage { name: name.into(), report: StageReport::Majorization(report) }
}

fn residual_stage(name: &str, value: f64, limit: f64) -> Stage {
    Stage {
        name: name.into(),
        report: StageReport::Residual { value, limit, verdict: Verdict::from_bool(value <= limit) },
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::Usage(format!("tolerance must be finite and nonnegative, got {tol}")))
    }
}

fn same_square(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "expected two square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Eigenvalues of a PSD matrix, descending, with rounding-level negatives kept as is.
fn psd_eigenvalues(m: &ComplexMatrix, what: &str) -> Result<Vec<f64>> {
    let eig = hermitian_eig(m, 1e-10)?;
    let floor = -PSD_TOL * (1.0 + m.max_abs());
    match eig.eigenvalues.last() {
        Some(&low) if low < floor => {
            Err(Error::Domain(format!("{what} is not positive semidefinite: eigenvalue {low:.3e}")))
        }
        _ => Ok(eig.eigenvalues),
    }
}

fn clamp_nonneg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.max(0.0)).collect()
}

/// `|λ(A)|^r ≺_w σ(A)^r`.
pub fn check_weyl_majorant(a: &ComplexMatrix, r: f64, tol: f64) -> Result<MajorizationReport> {
    check_tol(tol)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Usage(format!("exponent r must be positive, got {r}")));
    }
    let moduli: Vec<f64> = eigenvalues_general(a)?.iter().map(|z| z.norm().powf(r)).collect();
    let sigma: Vec<f64> = singular_values(a)?.values().iter().map(|s| s.powf(r)).collect();
    compare(Mode::Weak, &moduli, &sigma, tol, Padding::Zeros)
}

/// `λ(pA + (1−p)B) ≺ pλ(A) + (1−p)λ(B)` in the strong sense.
pub fn check_kyfan_convexity(a: &ComplexMatrix, b: &ComplexMatrix, p: f64, tol: f64) -> Result<MajorizationReport> {
    check_tol(tol)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Usage(format!("convex weight p must lie in [0, 1], got {p}")));
    }
    same_square(a, b)?;
    let la = psd_eigenvalues(a, "A")?;
    let lb = psd_eigenvalues(b, "B")?;
    let mix = a.scaled(p).checked_add(&b.scaled(1.0 - p))?.hermitian_part();
    let lhs = hermitian_eig(&mix, 1e-10)?.eigenvalues;
    let rhs: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| p * x + (1.0 - p) * y).collect();
    compare(Mode::Strong, &lhs, &rhs, tol, Padding::Zeros)
}

/// Eigenvalues of `AB` for PSD `A`, `B`: realness, then
/// `λ(AB) ≺_{w,log} λ(A)·λ(B)` and `λ(AB) ≺_w λ(A)·λ(B)`.
pub fn check_eig_product(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<ChainReport> {
    check_tol(tol)?;
    same_square(a, b)?;
    let la = clamp_nonneg(&psd_eigenvalues(a, "A")?);
    let lb = clamp_nonneg(&psd_eigenvalues(b, "B")?);
    let general = eigenvalues_general(&a.matmul(b)?)?;
    let scale = general.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let imaginary = general.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let lab = clamp_nonneg(&eigenvalues_psd_product(a, b)?);
    let products: Vec<f64> = la.iter().zip(&lb).map(|(x, y)| x * y).collect();
    let stages = vec![
        residual_stage("realness", imaginary, tol * (1.0 + scale)),
        majorization_stage("log-majorization", compare(Mode::WeakLog, &lab, &products, tol, Padding::Zeros)?),
        majorization_stage("weak-majorization", compare(Mode::Weak, &lab, &products, tol, Padding::Zeros)?),
    ];
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("eigenvalues_product".into(), lab);
    diagnostics.insert("eigenvalue_products_sorted".into(), products);
    diagnostics.insert("imaginary_parts".into(), general.iter().map(|z| z.im).collect());
    Ok(ChainReport::new("eigproduct", stages, diagnostics))
}

/// `λ(T^{1/2} diag(T) T^{1/2}) ≺_w λ(T)²`.
///
/// Only weak majorization is checked: `tr(T·diag T) = Σ T_ii²` is in general
/// smaller than `tr(T²) = Σ |T_ij|²`.
pub fn check_diag_step(t: &ComplexMatrix, tol: f64) -> Result<MajorizationReport> {
    check_tol(tol)?;
    if !t.is_square() {
        return Err(Error::Dimension(format!("T must be square, got {}x{}", t.rows(), t.cols())));
    }
    let lt = clamp_nonneg(&psd_eigenvalues(t, "T")?);
    let root = spectral_apply(t, SpectralFunction::Power(0.5))?;
    let diag: Vec<f64> = t.diagonal().iter().map(|z| z.re.max(0.0)).collect();
    let carrier = root.scale_columns(&diag)?.matmul(&root)?.hermitian_part();
    let lhs = clamp_nonneg(&hermitian_eig(&carrier, 1e-10)?.eigenvalues);
    let squares: Vec<f64> = lt.iter().map(|l| l * l).collect();
    compare(Mode::Weak, &lhs, &squares, tol, Padding::Zeros)
}

fn sandwich(frame: &ComplexMatrix, weights: &[f64]) -> Result<ComplexMatrix> {
    Ok(frame.scale_columns(weights)?.matmul(&frame.adjoint())?.hermitian_part())
}

/// The chain
///
/// ```text
/// σ(S L diag(S*S) M S*) ≺_w σ(S (LM)^{1/2} S* S (LM)^{1/2} S*) ≺_w σ(S L S* S M S*)
/// ```
///
/// as stages `first-step`, `second-step` and `end-to-end`.
pub fn check_lemma1(inputs: &Lemma1Inputs, tol: f64) -> Result<ChainReport> {
    check_tol(tol)?;
    if inputs.m() > MAX_DIM || inputs.n() > MAX_DIM {
        return Err(Error::Unsupported(format!("frame {}x{} exceeds the {MAX_DIM} cap", inputs.n(), inputs.m())));
    }
    let s = inputs.frame();
    let (l, m) = (inputs.left(), inputs.right());
    let col_norms: Vec<f64> = (0..s.cols()).map(|j| s.column(j).iter().map(|z| z.norm_sqr()).sum()).collect();
    let lhs_weights: Vec<f64> = (0..s.cols()).map(|j| l[j] * col_norms[j] * m[j]).collect();
    let root_lm: Vec<f64> = l.iter().zip(m).map(|(x, y)| (x * y).sqrt()).collect();

    let lhs = sandwich(s, &lhs_weights)?;
    let half = sandwich(s, &root_lm)?;
    let mid = half.matmul(&half)?.hermitian_part();
    let rhs = sandwich(s, l)?.matmul(&sandwich(s, m)?)?;

    let sl = singular_values(&lhs)?;
    let sm = singular_values(&mid)?;
    let sr = singular_values(&rhs)?;
    let stages = vec![
        majorization_stage("first-step", compare(Mode::Weak, sl.values(), sm.values(), tol, Padding::Zeros)?),
        majorization_stage("second-step", compare(Mode::Weak, sm.values(), sr.values(), tol, Padding::Zeros)?),
        majorization_stage("end-to-end", compare(Mode::Weak, sl.values(), sr.values(), tol, Padding::Zeros)?),
    ];

    // T = X*X with X = S (LM)^{1/4}
    let x = s.scale_columns(&root_lm.iter().map(|v| v.sqrt()).collect::<Vec<_>>())?;
    let t = x.adjoint().matmul(&x)?.hermitian_part();
    let t_eig = hermitian_eig(&t, 1e-10)?;
    let t_root = t_eig.reassemble_with(|v| v.max(0.0).sqrt());
    let t_diag: Vec<f64> = t.diagonal().iter().map(|z| z.re).collect();
    let core = t_root.scale_columns(&t_diag)?.matmul(&t_root)?.hermitian_part();

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("sigma_lhs".into(), sl.into_vec());
    diagnostics.insert("sigma_mid".into(), sm.into_vec());
    diagnostics.insert("sigma_rhs".into(), sr.into_vec());
    diagnostics.insert("lambda_t_diag_t".into(), hermitian_eig(&core, 1e-10)?.eigenvalues);
    diagnostics.insert("lambda_t_squared".into(), t_eig.eigenvalues.iter().map(|v| v.max(0.0).powi(2)).collect());
    Ok(ChainReport::new("lemma1", stages, diagnostics))
}

fn norm_summary(s: &SortedSpectrum) -> Result<Vec<f64>> {
    Ok(vec![schatten_norm(s, 1.0)?, schatten_norm(s, f64::INFINITY)?, schatten_norm(s, 2.0)?])
}

fn ky_fan_profile(s: &SortedSpectrum) -> Result<Vec<f64>> {
    (1..=s.len()).map(|k| ky_fan_norm(s, k)).collect()
}

/// `σ(Σ A_k B_k) ≺_w σ((Σ A_k)(Σ B_k))`.
///
/// Stage `weak-majorization` compares the two sides computed directly. The
/// residual stages confirm that the block assembly reproduces the pair sums
/// and that the lemma-form sides `S diag(L·|s_i|²·M) S*` and
/// `(S L S*)(S M S*)` have the same singular values as the direct sides,
/// measured against the rounding scale `Σ max|A_k|·max|B_k|`.
pub fn check_theorem1(inst: &CommutingPairInstance, tol: f64) -> Result<ChainReport> {
    check_tol(tol)?;
    let assembly = assemble_theorem1(inst)?;
    let lhs = inst.sum_products();
    let rhs = inst.sum_a().matmul(&inst.sum_b())?;
    let sl = singular_values(&lhs)?;
    let sr = singular_values(&rhs)?;

    let weights: Vec<f64> = assembly
        .column_norms_squared()
        .iter()
        .zip(assembly.left.iter().zip(&assembly.right))
        .map(|(c, (l, m))| l * c * m)
        .collect();
    let lhs_asm = singular_values(&assembly.sandwich(&weights)?)?;
    let rhs_asm = singular_values(&assembly.sandwich(&assembly.left)?.matmul(&assembly.sandwich(&assembly.right)?)?)?;
    let spread = |x: &SortedSpectrum, y: &SortedSpectrum| {
        x.values().iter().zip(y.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let product_scale = 1.0 + inst.product_scale() + inst.sum_a().max_abs() * inst.sum_b().max_abs();
    let lemma_form = spread(&lhs_asm, &sl).max(spread(&rhs_asm, &sr)) / product_scale;
    let residuals = assembly.residuals(inst)?;

    let stages = vec![
        majorization_stage("weak-majorization", compare(Mode::Weak, sl.values(), sr.values(), tol, Padding::Zeros)?),
        residual_stage("reconstruction", residuals.reconstruction(), 1e-9),
        residual_stage("column-norms", residuals.column_norms, 1e-10),
        residual_stage("lemma-form", lemma_form, 1e-9),
    ];
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("ky_fan_lhs".into(), ky_fan_profile(&sl)?);
    diagnostics.insert("ky_fan_rhs".into(), ky_fan_profile(&sr)?);
    diagnostics.insert("norms_lhs_trace_operator_frobenius".into(), norm_summary(&sl)?);
    diagnostics.insert("norms_rhs_trace_operator_frobenius".into(), norm_summary(&sr)?);
    diagnostics.insert("sigma_lhs".into(), sl.into_vec());
    diagnostics.insert("sigma_rhs".into(), sr.into_vec());
    Ok(ChainReport::new("theorem1", stages, diagnostics))
}

/// Pairs `(f(A_k), g(A_k))` built from one eigendecomposition of each `A_k`,
/// so they commute by construction.
pub fn fg_instance(mats: &[ComplexMatrix], f: SpectralFunction, g: SpectralFunction) -> Result<CommutingPairInstance> {
    f.validate()?;
    g.validate()?;
    let pairs = mats
        .iter()
        .map(|a| {
            let eig = hermitian_eig(a, 1e-10)?;
            let floor = -PSD_TOL * (1.0 + a.max_abs());
            if let Some(&low) = eig.eigenvalues.last() {
                if low < floor {
                    return Err(Error::Domain(format!("matrix is not positive semidefinite: eigenvalue {low:.3e}")));
                }
            }
            let fa = eig.reassemble_with(|v| f.eval(v.max(0.0)));
            let ga = eig.reassemble_with(|v| g.eval(v.max(0.0)));
            if [&fa, &ga].iter().any(|m| m.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
                return Err(Error::Numerical("spectral function overflowed".into()));
            }
            Ok((fa, ga))
        })
        .collect::<Result<Vec<_>>>()?;
    CommutingPairInstance::from_pairs_unchecked(pairs)
}

/// `σ(Σ f(A_k) g(A_k)) ≺_w σ((Σ f(A_k))(Σ g(A_k)))`.
pub fn check_fg_corollary(
    mats: &[ComplexMatrix],
    f: SpectralFunction,
    g: SpectralFunction,
    tol: f64,
) -> Result<MajorizationReport> {
    let chain = check_theorem1(&fg_instance(mats, f, g)?, tol)?;
    Ok(chain.stage("weak-majorization").expect("theorem1 always has this stage").clone())
}

/// `σ(A^{p+q} + B^{p+q}) ≺_w σ((A^p + B^p)(A^q + B^q))`.
pub fn check_bourin(a: &ComplexMatrix, b: &ComplexMatrix, p: f64, q: f64, tol: f64) -> Result<MajorizationReport> {
    check_tol(tol)?;
    if !(p.is_finite() && p > 0.0 && q.is_finite() && q > 0.0) {
        return Err(Error::Usage(format!("exponents must be positive, got p={p}, q={q}")));
    }
    same_square(a, b)?;
    let ea = psd_spectral(a, "A")?;
    let eb = psd_spectral(b, "B")?;
    let pow = |e: &crate::linalg::SpectralDecomposition, x: f64| e.reassemble_with(|v| v.max(0.0).powf(x));
    let lhs = pow(&ea, p + q).checked_add(&pow(&eb, p + q))?;
    let rhs = pow(&ea, p).checked_add(&pow(&eb, p))?.matmul(&pow(&ea, q).checked_add(&pow(&eb, q))?)?;
    let sl = singular_values(&lhs)?;
    let sr = singular_values(&rhs)?;
    compare(Mode::Weak, sl.values(), sr.values(), tol, Padding::Zeros)
}

fn psd_spectral(m: &ComplexMatrix, what: &str) -> Result<crate::linalg::SpectralDecomposition> {
    let eig = hermitian_eig(m, 1e-10)?;
    let floor = -PSD_TOL * (1.0 + m.max_abs());
    match eig.eigenvalues.last() {
        Some(&low) if low < floor => {
            Err(Error::Domain(format!("{what} is not positive semidefinite: eigenvalue {low:.3e}")))
        }
        _ => Ok(eig),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        random_commuting_instance, random_general, random_lemma1_inputs, random_psd, random_unitary, stream,
        SpectrumProfile,
    };
    use crate::linalg::{characteristic_polynomial, C64};
    use crate::majorization::partial_sums;
    use proptest::prelude::*;

    const TOL: f64 = 1e-8;

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(v)
    }

    fn ones2() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    fn worked_example() -> CommutingPairInstance {
        CommutingPairInstance::new(vec![(diag(&[2.0, 1.0]), diag(&[1.0, 3.0])), (ones2(), ones2())]).unwrap()
    }

    #[test]
    fn weyl_examples() {
        let h = random_psd(4, &mut stream(1, 0, "w"), SpectrumProfile::Uniform);
        let r = check_weyl_majorant(&h, 1.0, TOL).unwrap();
        assert!(r.passed() && r.margins.iter().all(|m| m.abs() <= 1e-10));

        let n = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let r = check_weyl_majorant(&n, 1.0, TOL).unwrap();
        assert_eq!(r.x_sorted.values(), &[0.0, 0.0]);
        assert_eq!(r.y_sorted.values(), &[1.0, 0.0]);
        assert!(r.passed() && r.min_margin == 1.0);

        let a = random_general(3, &mut stream(1, 1, "w"), SpectrumProfile::Uniform);
        let r = check_weyl_majorant(&a, 2.0, TOL).unwrap();
        assert!(r.passed());
        // |det A| = Π|λ| = Π σ, via the characteristic polynomial's constant term
        let det = characteristic_polynomial(&a).unwrap()[0].norm();
        let prod_lambda: f64 = r.x_sorted.values().iter().map(|v| v.sqrt()).product();
        assert!((det - prod_lambda).abs() <= 1e-10, "{det} vs {prod_lambda}");

        assert!(matches!(check_weyl_majorant(&a, 0.0, TOL), Err(Error::Usage(_))));
        assert!(matches!(check_weyl_majorant(&ComplexMatrix::identity(65), 1.0, TOL), Err(Error::Unsupported(_))));
    }

    #[test]
    fn convexity_examples() {
        let mut rng = stream(2, 0, "c");
        let a = random_psd(4, &mut rng, SpectrumProfile::Uniform);
        let b = random_psd(4, &mut rng, SpectrumProfile::Uniform);
        let r = check_kyfan_convexity(&a, &b, 0.0, TOL).unwrap();
        assert!(r.passed() && r.margins.iter().all(|m| m.abs() <= 1e-12));
        let r = check_kyfan_convexity(&a, &a, 0.3, TOL).unwrap();
        assert!(r.passed() && r.margins.iter().all(|m| m.abs() <= 1e-12));
        let r = check_kyfan_convexity(&a, &b, 0.5, TOL).unwrap();
        assert!(r.passed() && r.sum_gap.unwrap() <= r.tolerance_used);
        assert!(matches!(check_kyfan_convexity(&a, &b, 1.5, TOL), Err(Error::Usage(_))));
        assert!(matches!(check_kyfan_convexity(&a, &diag(&[1.0, -1.0, 0.0, 0.0]), 0.5, TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn eig_product_examples() {
        let a = diag(&[2.0, 1.0]);
        let r = check_eig_product(&a, &a, TOL).unwrap();
        assert!(r.passed());
        let x = r.stage("weak-majorization").unwrap().x_sorted.values().to_vec();
        assert!((x[0] - 4.0).abs() <= 1e-12 && (x[1] - 1.0).abs() <= 1e-12);
        assert!(r.min_margin().abs() <= 1e-12);

        // AB = [[1,1],[0,0]]: trace 1, det 0, so λ(AB) = (1, 0)
        let r = check_eig_product(&diag(&[1.0, 0.0]), &ones2(), TOL).unwrap();
        assert!(r.passed());
        let w = r.stage("weak-majorization").unwrap();
        assert!((w.x_sorted.values()[0] - 1.0).abs() <= 1e-12 && w.x_sorted.values()[1].abs() <= 1e-12);
        assert_eq!(w.y_sorted.values(), &[2.0, 0.0]);

        assert!(matches!(check_eig_product(&diag(&[-1.0]), &diag(&[1.0]), TOL), Err(Error::Domain(_))));
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn eig_product_commuting_pairs_against_rearrangements() {
        for d in 1..=4 {
            let mut rng = stream(3, d as u64, "perm");
            let u = random_unitary(d, &mut rng);
            let a = SpectrumProfile::Uniform.sample(d, &mut rng);
            let b = SpectrumProfile::Uniform.sample(d, &mut rng);
            let build = |v: &[f64]| u.scale_columns(v).unwrap().matmul(&u.adjoint()).unwrap().hermitian_part();
            let r = check_eig_product(&build(&a), &build(&b), TOL).unwrap();
            assert!(r.passed());
            let mut paired: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
            paired.sort_by(|x, y| y.total_cmp(x));
            let got = r.stage("weak-majorization").unwrap().x_sorted.values().to_vec();
            for (g, w) in got.iter().zip(&paired) {
                assert!((g - w).abs() <= 1e-12);
            }
            // every pairing of the spectra is weakly majorized by the sorted one
            let sa = sort(&a);
            let sb = sort(&b);
            let best: Vec<f64> = sa.iter().zip(&sb).map(|(x, y)| x * y).collect();
            for perm in permutations(d) {
                let pairing: Vec<f64> = (0..d).map(|i| sa[i] * sb[perm[i]]).collect();
                assert!(compare(Mode::Weak, &pairing, &best, 1e-14, Padding::Zeros).unwrap().passed());
            }
        }
    }

    fn sort(v: &[f64]) -> Vec<f64> {
        let mut v = v.to_vec();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    }

    #[test]
    fn diag_step_examples() {
        let r = check_diag_step(&diag(&[3.0, 1.0, 2.0]), TOL).unwrap();
        assert!(r.passed() && r.margins.iter().all(|m| m.abs() <= 1e-12));
        let r = check_diag_step(&ComplexMatrix::identity(4), TOL).unwrap();
        assert!(r.passed() && r.margins.iter().all(|m| m.abs() <= 1e-12));
        for trial in 0..10 {
            let inp = random_lemma1_inputs(3, 4, &mut stream(4, trial, "ds"), SpectrumProfile::Uniform).unwrap();
            let x = inp
                .frame()
                .scale_columns(&inp.left().iter().zip(inp.right()).map(|(l, m)| (l * m).powf(0.25)).collect::<Vec<_>>())
                .unwrap();
            let t = x.adjoint().matmul(&x).unwrap().hermitian_part();
            assert!(check_diag_step(&t, TOL).unwrap().passed());
        }
        assert!(matches!(check_diag_step(&diag(&[1.0, -2.0]), TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn lemma1_orthonormal_frame_is_equality() {
        let u = random_unitary(5, &mut stream(5, 0, "l"));
        let frame = ComplexMatrix::from_fn(5, 3, |i, j| u[(i, j)]);
        let inp = Lemma1Inputs::new(frame, vec![2.0, 0.5, 1.0], vec![0.3, 1.0, 4.0]).unwrap();
        let r = check_lemma1(&inp, TOL).unwrap();
        assert!(r.passed());
        for (_, s) in r.majorization_stages() {
            let scale = 1.0 + s.y_sorted.max();
            assert!(s.margins.iter().all(|m| m.abs() <= 1e-10 * scale), "{:?}", s.margins);
        }
    }

    #[test]
    fn lemma1_unitary_frame_unit_weights() {
        let u = random_unitary(3, &mut stream(5, 1, "l"));
        let r = check_lemma1(&Lemma1Inputs::new(u, vec![1.0; 3], vec![1.0; 3]).unwrap(), TOL).unwrap();
        assert!(r.passed());
        for v in r.stage("end-to-end").unwrap().y_sorted.values() {
            assert!((v - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn lemma1_rectangular_and_degenerate() {
        for trial in 0..20 {
            let inp = random_lemma1_inputs(3, 5, &mut stream(6, trial, "l"), SpectrumProfile::Uniform).unwrap();
            let r = check_lemma1(&inp, TOL).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.diagnostics["lambda_t_squared"].len(), 5);
        }
        let frame = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let r =
            check_lemma1(&Lemma1Inputs::new(frame, vec![1.0, 5.0, 2.0], vec![3.0, 1.0, 0.5]).unwrap(), TOL).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn theorem1_worked_example() {
        let inst = worked_example();
        assert_eq!(inst.sum_products(), ComplexMatrix::from_real_rows(&[vec![4.0, 2.0], vec![2.0, 5.0]]).unwrap());
        let rhs = inst.sum_a().matmul(&inst.sum_b()).unwrap();
        assert_eq!(rhs, ComplexMatrix::from_real_rows(&[vec![7.0, 7.0], vec![4.0, 9.0]]).unwrap());
        let r = check_theorem1(&inst, TOL).unwrap();
        assert!(r.passed());
        // LHS is PSD with trace 9; RHS*RHS has trace 195 and determinant 1225
        let (tr, det) = (195.0f64, 1225.0f64);
        let disc = (tr * tr - 4.0 * det).sqrt();
        let s1 = ((tr + disc) / 2.0).sqrt();
        let s2 = ((tr - disc) / 2.0).sqrt();
        let rhs_sigma = &r.diagnostics["sigma_rhs"];
        assert!((rhs_sigma[0] - s1).abs() <= 1e-10 && (rhs_sigma[1] - s2).abs() <= 1e-10);
        assert!((s1 - 13.7296).abs() < 1e-4 && (s2 - 2.5492).abs() < 1e-4);
        let norms_l = &r.diagnostics["norms_lhs_trace_operator_frobenius"];
        let norms_r = &r.diagnostics["norms_rhs_trace_operator_frobenius"];
        assert!((norms_l[0] - 9.0).abs() <= 1e-12);
        assert!((norms_r[0] - (s1 + s2)).abs() <= 1e-10 && (norms_r[0] - 16.279).abs() < 1e-3);
    }

    #[test]
    fn theorem1_single_pair_is_equality() {
        for trial in 0..20 {
            let profile = SpectrumProfile::ALL[trial % 5];
            let inst = random_commuting_instance(1, 1 + trial % 6, &mut stream(7, trial as u64, "t"), profile).unwrap();
            let r = check_theorem1(&inst, TOL).unwrap();
            assert!(r.passed());
            let main = r.stage("weak-majorization").unwrap();
            assert!(main.min_margin.abs() <= 1e-10 * (1.0 + main.y_sorted.max()));
        }
    }

    #[test]
    fn theorem1_diagonal_pairs_match_vector_inequality() {
        let a = [[3.0, 1.0, 0.0], [0.0, 2.0, 4.0]];
        let b = [[0.5, 2.0, 1.0], [1.0, 1.0, 0.25]];
        let inst = CommutingPairInstance::new((0..2).map(|k| (diag(&a[k]), diag(&b[k]))).collect()).unwrap();
        let r = check_theorem1(&inst, TOL).unwrap();
        let lhs: Vec<f64> = (0..3).map(|i| a[0][i] * b[0][i] + a[1][i] * b[1][i]).collect();
        let rhs: Vec<f64> = (0..3).map(|i| (a[0][i] + a[1][i]) * (b[0][i] + b[1][i])).collect();
        let main = r.stage("weak-majorization").unwrap();
        assert_eq!(main.x_sorted.values(), sort(&lhs).as_slice());
        assert_eq!(main.y_sorted.values(), sort(&rhs).as_slice());
        assert!(r.passed());
    }

    #[test]
    fn theorem1_identity_pairs_slack() {
        let k = 3.0;
        let inst =
            CommutingPairInstance::new(vec![(ComplexMatrix::identity(2), ComplexMatrix::identity(2)); 3]).unwrap();
        let main = check_theorem1(&inst, TOL).unwrap().stage("weak-majorization").unwrap().clone();
        for (i, m) in main.margins.iter().enumerate() {
            assert!((m - (k * k - k) * (i + 1) as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn fg_examples() {
        let mut rng = stream(8, 0, "fg");
        let mats: Vec<ComplexMatrix> = (0..3).map(|_| random_psd(3, &mut rng, SpectrumProfile::Uniform)).collect();
        let id = SpectralFunction::Power(1.0);
        let r = check_fg_corollary(&mats, id, id, TOL).unwrap();
        let direct = CommutingPairInstance::new(mats.iter().map(|a| (a.clone(), a.clone())).collect()).unwrap();
        let d = check_theorem1(&direct, TOL).unwrap();
        let dm = d.stage("weak-majorization").unwrap();
        for (x, y) in r.margins.iter().zip(&dm.margins) {
            assert!((x - y).abs() <= 1e-12);
        }
        let single =
            check_fg_corollary(&mats[..1], SpectralFunction::Power(0.5), SpectralFunction::Exp(0.3), TOL).unwrap();
        assert!(single.min_margin.abs() <= 1e-10);
        assert!(check_fg_corollary(&mats, SpectralFunction::Power(0.5), SpectralFunction::Exp(0.3), TOL)
            .unwrap()
            .passed());
        assert!(matches!(check_fg_corollary(&mats, SpectralFunction::Power(0.0), id, TOL), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bourin_examples() {
        let r = check_bourin(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]), 1.0, 1.0, TOL).unwrap();
        assert!(r.passed() && r.margins.iter().all(|m| m.abs() <= 1e-14));
        assert_eq!(r.x_sorted.values(), &[1.0, 1.0]);

        let a = random_psd(3, &mut stream(9, 0, "b"), SpectrumProfile::Uniform);
        let r = check_bourin(&a, &a, 0.7, 1.4, TOL).unwrap();
        let lhs_partials = partial_sums(r.x_sorted.values());
        for (m, s) in r.margins.iter().zip(&lhs_partials) {
            assert!((m - s).abs() <= 1e-10 * s.max(1e-300));
        }

        let b = random_psd(3, &mut stream(9, 1, "b"), SpectrumProfile::Uniform);
        assert!(check_bourin(&a, &b, 0.7, 1.4, TOL).unwrap().passed());
        assert!(matches!(check_bourin(&a, &b, 0.0, 1.0, TOL), Err(Error::Usage(_))));
        assert!(matches!(check_bourin(&a, &b, 1.0, -1.0, TOL), Err(Error::Usage(_))));
    }

    #[test]
    fn chain_verdict_consistency() {
        let r = check_theorem1(&worked_example(), TOL).unwrap();
        assert_eq!(r.passed(), r.stages.iter().all(|s| s.report.passed()));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"name\":\"lemma-form\""));
    }

    fn instance_strategy() -> impl Strategy<Value = CommutingPairInstance> {
        (any::<u64>(), 1usize..=4, 1usize..=5, 0usize..5).prop_map(|(seed, k, d, p)| {
            random_commuting_instance(k, d, &mut stream(seed, 0, "prop"), SpectrumProfile::ALL[p]).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn scale_covariance(inst in instance_strategy()) {
            let base = check_theorem1(&inst, TOL).unwrap();
            let sl = &base.diagnostics["sigma_lhs"];
            // products round on Σ max|A_k|·max|B_k|, which can dwarf σ₁ of the sum
            let rounding = inst.product_scale();
            for t in [1e-3, 1.0, 1e3] {
                let r = check_theorem1(&inst.scaled(t, 1.0), TOL).unwrap();
                prop_assert_eq!(r.passed(), base.passed());
                for (x, y) in r.diagnostics["sigma_lhs"].iter().zip(sl) {
                    prop_assert!((x - t * y).abs() <= 1e-10 * (1.0 + t * rounding));
                }
            }
        }

        #[test]
        fn unitary_covariance(inst in instance_strategy(), seed in any::<u64>()) {
            let u = random_unitary(inst.d(), &mut stream(seed, 1, "prop"));
            let base = check_theorem1(&inst, TOL).unwrap();
            let moved = check_theorem1(&inst.conjugated(&u).unwrap(), TOL).unwrap();
            prop_assert_eq!(base.passed(), moved.passed());
            let rounding = [inst.product_scale(), inst.sum_a().max_abs() * inst.sum_b().max_abs()];
            for (key, r) in ["sigma_lhs", "sigma_rhs"].into_iter().zip(rounding) {
                let scale = 1.0 + base.diagnostics[key][0].max(r);
                for (x, y) in base.diagnostics[key].iter().zip(&moved.diagnostics[key]) {
                    prop_assert!((x - y).abs() <= 1e-10 * scale, "{key}: {x} vs {y}");
                }
            }
        }

        #[test]
        fn lemma_steps_compose(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=6) {
            let inp = random_lemma1_inputs(n, m, &mut stream(seed, 0, "prop"), SpectrumProfile::Uniform).unwrap();
            let r = check_lemma1(&inp, TOL).unwrap();
            let first = r.stage("first-step").unwrap().passed();
            let second = r.stage("second-step").unwrap().passed();
            if first && second {
                prop_assert!(check_lemma1(&inp, 2.0 * TOL).unwrap().stage("end-to-end").unwrap().passed());
            }
        }
    }

    #[test]
    fn complex_entries_are_accepted() {
        let h = ComplexMatrix::from_rows(vec![
            vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
            vec![C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        assert!(check_eig_product(&h, &h, TOL).unwrap().passed());
        assert!(check_diag_step(&h, TOL).unwrap().passed());
    }
}
