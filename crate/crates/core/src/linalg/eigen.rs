use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius mass at which the iteration stops, relative to `1 + max|h_ij|`.
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigendecomposition `H = basis · diag(eigenvalues) · basis*` of a Hermitian matrix.
///
/// Eigenvalues are sorted non-increasingly and column `i` of `basis` is the
/// eigenvector belonging to `eigenvalues[i]`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub basis: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
}

impl SpectralDecomposition {
    /// `basis · diag(f(λ)) · basis*`, forced exactly Hermitian.
    pub fn reassemble_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let n = self.basis.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        acc += self.basis[(i, k)] * self.basis[(j, k)].conj() * w;
                    }
                }
                if i == j {
                    out[(i, i)] = C64::new(acc.re, 0.0);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        out
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        self.reassemble_with(|l| l)
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.basis.cols();
        let gram = self.basis.adjoint().matmul(&self.basis).expect("square basis");
        gram.max_abs_diff(&ComplexMatrix::identity(n))
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// `tol` bounds the accepted Hermitian defect `max|H - H*|` relative to
/// `1 + max|H|`; the Hermitian part of the input is what gets diagonalized.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    if !h.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let scale = h.max_abs();
    let defect = h.hermitian_residual();
    if defect > tol * (1.0 + scale) {
        return Err(Error::Domain(format!("matrix is not Hermitian: defect {defect:.3e} at scale {scale:.3e}")));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * (1.0 + scale);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_mass(&a) > threshold {
        return Err(Error::Numerical(format!("Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let basis = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition { basis, eigenvalues })
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Off-diagonal entries below this are set to zero instead of rotated away.
const NEGLIGIBLE: f64 = 1e-280;

/// One complex Jacobi rotation `A <- V* A V` annihilating `a_pq`, accumulated into `basis`.
///
/// With `a_pq = |g| e^{iφ}` the rotation is `[[c, s e^{iφ}], [-s e^{-iφ}, c]]`
/// on the `(p, q)` plane, which reduces to the real symmetric rotation after
/// the phase is absorbed.
fn rotate(a: &mut ComplexMatrix, basis: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let abs = g.norm();
    if abs < NEGLIGIBLE {
        // the phase g/|g| of a (near-)subnormal entry is too coarse to rotate with
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * abs);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = g / abs;
    let sp = phase * s;
    let sp_conj = sp.conj();

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - sp_conj * akq;
        a[(k, q)] = sp * akp + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - sp * aqk;
        a[(q, k)] = sp_conj * apk + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * abs, 0.0);
    a[(q, q)] = C64::new(aqq + t * abs, 0.0);

    for k in 0..n {
        let vkp = basis[(k, p)];
        let vkq = basis[(k, q)];
        basis[(k, p)] = vkp * c - sp_conj * vkq;
        basis[(k, q)] = sp * vkp + vkq * c;
    }
}
