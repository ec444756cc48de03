use super::{hermitian_eig, ComplexMatrix, SortedSpectrum, C64, MAX_SWEEPS};
use crate::error::{Error, Result};

/// Singular values by one-sided (Hestenes) Jacobi orthogonalization.
///
/// Columns of the taller orientation of `a` are rotated pairwise until they
/// are mutually orthogonal; the singular values are then the column norms.
/// Small singular values keep an absolute accuracy of order `ε·σ_max`, which
/// the `A*A` route cannot offer. Output length is `min(rows, cols)`.
pub fn singular_values(a: &ComplexMatrix) -> Result<SortedSpectrum> {
    let work = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let (m, n) = work.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| work.column(j)).collect();
    let threshold = f64::EPSILON * m as f64;

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                // columns this small contribute nothing and have unreliable phases
                if alpha < 1e-280 || beta < 1e-280 {
                    continue;
                }
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let abs = gamma.norm();
                if abs <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (beta - alpha) / (2.0 * abs);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sp = gamma / abs * (t * c);
                let sp_conj = sp.conj();
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = xp * c - sp_conj * yq;
                    *y = sp * xp + yq * c;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!("one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")));
    }
    SortedSpectrum::from_unsorted(cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect())
}

/// Singular values as square roots of the eigenvalues of the smaller Gram
/// matrix (`A*A` or `AA*`), with tiny negative eigenvalues clamped to zero.
///
/// Loses accuracy on small singular values; kept as an independent route for
/// cross-checking [`singular_values`].
pub fn singular_values_via_gram(a: &ComplexMatrix) -> Result<SortedSpectrum> {
    let gram = if a.rows() >= a.cols() { a.adjoint().matmul(a)? } else { a.matmul(&a.adjoint())? };
    let eig = hermitian_eig(&gram.hermitian_part(), 1e-10)?;
    SortedSpectrum::from_unsorted(eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn nilpotent_single_entry() {
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(singular_values(&a).unwrap().values(), &[2.0, 0.0]);
    }

    #[test]
    fn golden_ratio_pair() {
        // A*A = [[1,1],[1,2]] has eigenvalues (3 ± √5)/2, so σ = ((1+√5)/2, (√5−1)/2)
        let a = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let s = singular_values(&a).unwrap();
        let r5 = 5f64.sqrt();
        assert!((s.values()[0] - (1.0 + r5) / 2.0).abs() <= 1e-12);
        assert!((s.values()[1] - (r5 - 1.0) / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn rectangular_lengths_and_gram_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, c) in [(1, 1), (1, 4), (4, 1), (3, 5), (6, 2), (8, 8)] {
            let a = random_matrix(r, c, &mut rng);
            let s = singular_values(&a).unwrap();
            let g = singular_values_via_gram(&a).unwrap();
            assert_eq!(s.len(), r.min(c));
            for (x, y) in s.values().iter().zip(g.values()) {
                assert!((x - y).abs() <= 1e-7, "{x} vs {y}");
            }
            // Frobenius norm identity
            let fro: f64 = s.values().iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((fro - a.frobenius_norm()).abs() <= 1e-12 * (1.0 + fro));
        }
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(singular_values(&ComplexMatrix::zeros(3, 2)).unwrap().values(), &[0.0, 0.0]);
    }
}
