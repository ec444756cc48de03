use super::{hermitian_eig, singular_values, ComplexMatrix, SpectralDecomposition, C64};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`eigenvalues_general`].
pub const GENERAL_DIM_CAP: usize = crate::MAX_DIM;

/// Hermitian defect (relative to `1 + max|a|`) below which the Hermitian solver is used.
const HERMITIAN_SHORTCUT: f64 = 1e-12;

/// Magnitudes below this are treated as zero when forming rotations; their
/// phases are too coarse to use.
const NEGLIGIBLE: f64 = 1e-280;

/// QR iterations allowed per eigenvalue before giving up.
const ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Coefficients `c_0, ..., c_n` (with `c_n = 1`) of `det(λI − A)`, by Faddeev–LeVerrier.
///
/// Only sensible for small matrices; used as an independent cross-check of
/// computed eigenvalues.
pub fn characteristic_polynomial(a: &ComplexMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "characteristic polynomial needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    // M_k = A M_{k-1} + c_{n-k+1} I,  c_{n-k} = -tr(A M_k) / k
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        m = a.matmul(&m)?;
        for i in 0..n {
            m[(i, i)] += coeffs[n - k + 1];
        }
        coeffs[n - k] = -a.matmul(&m)?.trace() / k as f64;
    }
    Ok(coeffs)
}

/// All eigenvalues of a square matrix, with multiplicity, in no particular order.
///
/// Hermitian inputs go through [`hermitian_eig`]. Everything else is reduced
/// to upper Hessenberg form by Householder reflections and then deflated by
/// single-shift complex QR steps with Wilkinson shifts. No eigenvectors are
/// formed.
pub fn eigenvalues_general(a: &ComplexMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("eigenvalues need a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    if a.rows() > GENERAL_DIM_CAP {
        return Err(Error::Unsupported(format!(
            "general eigenvalues are limited to dimension {GENERAL_DIM_CAP}, got {}",
            a.rows()
        )));
    }
    let scale = a.max_abs();
    if a.hermitian_residual() <= HERMITIAN_SHORTCUT * (1.0 + scale) {
        let eig = hermitian_eig(a, HERMITIAN_SHORTCUT)?;
        return Ok(eig.eigenvalues.into_iter().map(|l| C64::new(l, 0.0)).collect());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    shifted_qr(&mut h)
}

/// Eigenvalues of `P·Q` for PSD `P` and `Q`, sorted non-increasingly.
///
/// With `P = U Λ U*` and `Q = V Μ V*`, the Hermitian similarity
/// `λ(PQ) = λ(Q^{1/2} P Q^{1/2})` equals `σ(Λ^{1/2} U*V Μ^{1/2})²`. Taking
/// singular values of that scaled unitary keeps each small eigenvalue
/// accurate relative to itself instead of to the largest one.
pub fn eigenvalues_psd_product(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<Vec<f64>> {
    if p.shape() != q.shape() || !p.is_square() {
        return Err(Error::Dimension("eigenvalues of a product need two square matrices of equal size".into()));
    }
    let (ep, eq) = (psd_decomposition(p)?, psd_decomposition(q)?);
    let core = ep.basis.adjoint().matmul(&eq.basis)?;
    let rp: Vec<f64> = ep.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let rq: Vec<f64> = eq.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let scaled = ComplexMatrix::from_fn(p.rows(), p.cols(), |i, j| core[(i, j)] * (rp[i] * rq[j]));
    Ok(singular_values(&scaled)?.values().iter().map(|s| s * s).collect())
}

fn psd_decomposition(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let eig = hermitian_eig(m, 1e-10)?;
    let floor = -1e-10 * (1.0 + m.max_abs());
    match eig.eigenvalues.last() {
        Some(&low) if low < floor => {
            Err(Error::Domain(format!("matrix is not positive semidefinite: eigenvalue {low:.3e}")))
        }
        _ => Ok(eig),
    }
}

fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2vv*) H (I - 2vv*) on the trailing rows/columns
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * h[(k + 1 + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vt * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vt)| h[(i, k + 1 + t)] * vt).sum();
            for (t, vt) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= dot * vt.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

fn shifted_qr(h: &mut ComplexMatrix) -> Result<Vec<C64>> {
    let n = h.rows();
    let mut eigenvalues = vec![C64::new(0.0, 0.0); n];
    let mut hi = n;
    let mut stalled = 0;
    let mut total = 0;
    while hi > 0 {
        let last = hi - 1;
        // find the start of the unreduced block ending at `last`
        let mut lo = last;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * local || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == last {
            eigenvalues[last] = h[(last, last)];
            hi -= 1;
            stalled = 0;
            continue;
        }
        total += 1;
        stalled += 1;
        if total > ITERATIONS_PER_EIGENVALUE * n {
            return Err(Error::Numerical("shifted QR iteration did not converge".into()));
        }
        let shift = if stalled % 11 == 0 {
            // exceptional shift to break cycles
            h[(last, last)] + C64::new(h[(last, last - 1)].re.abs(), h[(last, last - 1)].im.abs()) * 0.75
        } else {
            wilkinson_shift(h[(last - 1, last - 1)], h[(last - 1, last)], h[(last, last - 1)], h[(last, last)])
        };
        qr_step(h, lo, last, shift);
    }
    Ok(eigenvalues)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let root = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + root;
    let m2 = (a + d) * 0.5 - root;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// One explicit-shift QR step `H − μI = QR, H <- RQ + μI` on the block `lo..=hi`.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let (na, nb) = (a.norm(), b.norm());
        let r = na.hypot(nb);
        let (c, s) = if r < NEGLIGIBLE {
            (1.0, C64::new(0.0, 0.0))
        } else if na < NEGLIGIBLE {
            (0.0, C64::new(1.0, 0.0))
        } else {
            (na / r, a / na * b.conj() / r)
        };
        // G = [[c, s], [-conj(s), c]] applied to rows k, k+1
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        // right-multiply columns k, k+1 by G*
        for i in lo..=(k + 2).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + s.conj() * y;
            h[(i, k + 1)] = -s * x + y * c;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}
