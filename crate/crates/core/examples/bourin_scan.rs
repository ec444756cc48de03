//! Bourin's (p, q) inequality on single pairs and on a small grid.

use majorant::checkers::check_bourin;
use majorant::generators::{random_psd, stream, SpectrumProfile};
use majorant::harness::{scan_cell, ScanOptions};
use majorant::{Result, DEFAULT_TOL};

fn main() -> Result<()> {
    let mut rng = stream(5, 0, "bourin-example");
    let a = random_psd(3, &mut rng, SpectrumProfile::Uniform);
    let b = random_psd(3, &mut rng, SpectrumProfile::Uniform);
    let r = check_bourin(&a, &b, 0.5, 2.0, DEFAULT_TOL)?;
    println!("p = 0.5, q = 2: {:?}, margins {:.4?}", r.verdict, r.margins);

    // With B = A the right side is exactly twice the left.
    let r = check_bourin(&a, &a, 1.0, 1.0, DEFAULT_TOL)?;
    println!("A = B: lhs {:.4?}, margins {:.4?}", r.x_sorted.values(), r.margins);

    let opts = ScanOptions { trials: 10, ..ScanOptions::default() };
    for (p, q) in [(0.2, 0.2), (1.0, 1.0), (2.0, 0.5)] {
        let cell = scan_cell(&opts, p, q)?;
        println!(
            "cell ({p}, {q}): {}/{} pass, min margin {:.4?} at trial {:?}",
            cell.passed, cell.trials, cell.min_margin, cell.tightest_trial
        );
    }
    Ok(())
}
