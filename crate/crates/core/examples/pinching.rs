//! The root-of-unity pinching family: averaging `U_j T U_j*` keeps only the diagonal.

use majorant::constructions::{pinch, pinching_family};
use majorant::generators::{random_hermitian, stream};
use majorant::linalg::diag_of;
use majorant::Result;

fn main() -> Result<()> {
    let mut rng = stream(3, 0, "pinching-example");
    for n in [1, 2, 5, 12] {
        let family = pinching_family(n)?;
        let t = random_hermitian(n, &mut rng);
        let err = pinch(&t, &family)?.max_abs_diff(&diag_of(&t)?);
        println!("n = {n:2}: {} unitaries, |pinch(T) - diag T| = {err:.2e}", family.count());
    }
    Ok(())
}
