//! One unitary basis diagonalizing a commuting pair, including degenerate spectra.

use majorant::constructions::{commutator_residual, simultaneous_diagonalize};
use majorant::generators::{random_unitary, stream};
use majorant::{ComplexMatrix, Result};

fn conj(u: &ComplexMatrix, d: &[f64]) -> Result<ComplexMatrix> {
    Ok(u.matmul(&ComplexMatrix::from_real_diag(d))?.matmul(&u.adjoint())?.hermitian_part())
}

fn main() -> Result<()> {
    let u = random_unitary(4, &mut stream(11, 0, "simdiag-example"));
    // A is degenerate, so its own eigenbasis need not diagonalize B.
    let a = conj(&u, &[2.0, 2.0, 1.0, 0.0])?;
    let b = conj(&u, &[0.5, 3.0, 1.0, 1.0])?;
    println!("commutator residual: {:.2e}", commutator_residual(&a, &b)?);

    let joint = simultaneous_diagonalize(&a, &b, 1e-9)?;
    for (x, y) in joint.a.iter().zip(&joint.b) {
        println!("paired eigenvalues: a = {x:.6}, b = {y:.6}");
    }
    let off = |m: &ComplexMatrix| -> Result<f64> {
        let d = joint.basis.adjoint().matmul(m)?.matmul(&joint.basis)?;
        Ok((0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d.row(i)[j].norm())
            .fold(0.0, f64::max))
    };
    println!("largest off-diagonal entry: A {:.2e}, B {:.2e}", off(&a)?, off(&b)?);
    Ok(())
}
