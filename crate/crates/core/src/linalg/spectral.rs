use serde::{Deserialize, Serialize};

use super::{hermitian_eig, ComplexMatrix};
use crate::error::{Error, Result};

/// Nonnegative scalar functions that can be lifted to PSD matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectralFunction {
    /// `x^p` for `p > 0`.
    Power(f64),
    /// `exp(s·x)`.
    Exp(f64),
    /// `max(0, slope·x + intercept)`.
    Affine { slope: f64, intercept: f64 },
}

impl SpectralFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralFunction::Power(p) if !(p.is_finite() && p > 0.0) => {
                Err(Error::Unsupported(format!("power exponent must be positive and finite, got {p}")))
            }
            SpectralFunction::Exp(s) if !s.is_finite() => {
                Err(Error::Unsupported(format!("exp rate must be finite, got {s}")))
            }
            SpectralFunction::Affine { slope, intercept } if !(slope.is_finite() && intercept.is_finite()) => {
                Err(Error::Unsupported("affine coefficients must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SpectralFunction::Power(p) => x.powf(p),
            SpectralFunction::Exp(s) => (s * x).exp(),
            SpectralFunction::Affine { slope, intercept } => (slope * x + intercept).max(0.0),
        }
    }
}

/// `U f(Λ) U*` for a PSD matrix `H = U Λ U*`.
///
/// Eigenvalues down to `-1e-10·(1 + max|H|)` are treated as rounding and
/// clamped to zero before `f` is applied.
pub fn spectral_apply(h: &ComplexMatrix, f: SpectralFunction) -> Result<ComplexMatrix> {
    f.validate()?;
    let eig = hermitian_eig(h, 1e-10)?;
    let floor = -1e-10 * (1.0 + h.max_abs());
    if let Some(&lowest) = eig.eigenvalues.last() {
        if lowest < floor {
            return Err(Error::Domain(format!("matrix is not positive semidefinite: eigenvalue {lowest:.3e}")));
        }
    }
    let out = eig.reassemble_with(|l| f.eval(l.max(0.0)));
    if out.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical(format!("{f:?} overflowed on this spectrum")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        g.adjoint().matmul(&g).unwrap().hermitian_part()
    }

    #[test]
    fn identity_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_psd(4, &mut rng);
        let out = spectral_apply(&h, SpectralFunction::Power(1.0)).unwrap();
        assert!(out.max_abs_diff(&h) <= 1e-11 * (1.0 + h.max_abs()));
    }

    #[test]
    fn square_root_of_diagonal() {
        let out = spectral_apply(&ComplexMatrix::from_real_diag(&[4.0, 9.0]), SpectralFunction::Power(0.5)).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::from_real_diag(&[2.0, 3.0])) < 1e-15);
    }

    #[test]
    fn exponents_add() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2, 3, 5] {
            let h = random_psd(n, &mut rng);
            let hp = spectral_apply(&h, SpectralFunction::Power(0.3)).unwrap();
            let hq = spectral_apply(&h, SpectralFunction::Power(0.7)).unwrap();
            let hpq = spectral_apply(&h, SpectralFunction::Power(1.0)).unwrap();
            assert!(hp.matmul(&hq).unwrap().max_abs_diff(&hpq) <= 1e-9);
        }
    }

    #[test]
    fn rejects_indefinite_and_bad_functions() {
        let h = ComplexMatrix::from_real_diag(&[1.0, -0.5]);
        assert!(matches!(spectral_apply(&h, SpectralFunction::Power(0.5)), Err(Error::Domain(_))));
        let ok = ComplexMatrix::identity(2);
        assert!(matches!(spectral_apply(&ok, SpectralFunction::Power(-1.0)), Err(Error::Unsupported(_))));
        assert!(matches!(spectral_apply(&ok, SpectralFunction::Exp(f64::NAN)), Err(Error::Unsupported(_))));
        assert!(matches!(spectral_apply(&ok.scaled(1e6), SpectralFunction::Exp(1.0)), Err(Error::Numerical(_))));
    }

    #[test]
    fn affine_clips_at_zero() {
        let f = SpectralFunction::Affine { slope: -1.0, intercept: 2.0 };
        let out = spectral_apply(&ComplexMatrix::from_real_diag(&[3.0, 1.0]), f).unwrap();
        assert_eq!(out, ComplexMatrix::from_real_diag(&[0.0, 1.0]));
    }
}
