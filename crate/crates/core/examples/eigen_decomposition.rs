//! Hermitian eigendecomposition, spectral functions and general eigenvalues.

use majorant::generators::{random_hermitian, random_psd, stream, SpectrumProfile};
use majorant::linalg::{eigenvalues_general, eigenvalues_psd_product, hermitian_eig, spectral_apply};
use majorant::{ComplexMatrix, Result, SpectralFunction, C64};

fn main() -> Result<()> {
    let h = ComplexMatrix::from_rows(vec![
        vec![C64::new(2.0, 0.0), C64::new(0.5, 0.5)],
        vec![C64::new(0.5, -0.5), C64::new(1.0, 0.0)],
    ])?;
    let dec = hermitian_eig(&h, 1e-12)?;
    println!("eigenvalues of H: {:?}", dec.eigenvalues);
    println!("basis unitarity residual: {:.2e}", dec.unitarity_residual());
    println!("reassembly error: {:.2e}", dec.reassemble().max_abs_diff(&h));

    let mut rng = stream(7, 0, "eigen-example");
    let big = random_hermitian(6, &mut rng);
    let dec = hermitian_eig(&big, 1e-12)?;
    println!("random 6x6 Hermitian spectrum: {:.4?}", dec.eigenvalues);

    let p = random_psd(4, &mut rng, SpectrumProfile::ExpDecay);
    let root = spectral_apply(&p, SpectralFunction::Power(0.5))?;
    println!("|sqrt(P)^2 - P| = {:.2e}", root.matmul(&root)?.max_abs_diff(&p));

    let q = random_psd(4, &mut rng, SpectrumProfile::Uniform);
    println!("eigenvalues of PQ (factored route): {:.6?}", eigenvalues_psd_product(&p, &q)?);
    let general: Vec<String> =
        eigenvalues_general(&p.matmul(&q)?)?.iter().map(|z| format!("{:.6}{:+.1e}i", z.re, z.im)).collect();
    println!("eigenvalues of PQ (Hessenberg QR):  {general:?}");
    Ok(())
}
