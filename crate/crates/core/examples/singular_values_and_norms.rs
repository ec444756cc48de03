//! Singular values, Ky Fan norms and Schatten norms.

use majorant::linalg::{singular_values, singular_values_via_gram};
use majorant::majorization::{ky_fan_norm, schatten_norm};
use majorant::{ComplexMatrix, Result};

fn main() -> Result<()> {
    let a = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]])?;
    let s = singular_values(&a)?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    println!("sigma([[1,1],[0,1]]) = {:?}", s.values());
    println!("golden ratio and its inverse: {phi} {}", phi - 1.0);

    // The Gram route loses the small singular value to sqrt(eps).
    let tiny = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-8]])?;
    println!("one-sided Jacobi: {:?}", singular_values(&tiny)?.values());
    println!("via A*A:          {:?}", singular_values_via_gram(&tiny)?.values());

    let m = ComplexMatrix::from_real_rows(&[vec![3.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 1.0]])?;
    let s = singular_values(&m)?;
    for k in 1..=3 {
        println!("Ky Fan {k}-norm: {:.6}", ky_fan_norm(&s, k)?);
    }
    for p in [1.0, 2.0, 4.0] {
        println!("Schatten {p}-norm: {:.6}", schatten_norm(&s, p)?);
    }
    println!("Frobenius check: {:.6}", m.frobenius_norm());
    Ok(())
}
