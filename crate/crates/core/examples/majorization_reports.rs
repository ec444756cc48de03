//! Weak, strong and weak-log majorization reports with per-prefix margins.

use majorant::majorization::{check_majorization, check_weak_log_majorization, check_weak_majorization};
use majorant::{Result, DEFAULT_TOL};

fn main() -> Result<()> {
    let x = [2.0, 2.0, 2.0];
    let y = [4.0, 1.5, 0.5];
    let strong = check_majorization(&x, &y, DEFAULT_TOL)?;
    println!("x ≺ y: {:?}, margins {:?}, sum gap {:?}", strong.verdict, strong.margins, strong.sum_gap);

    let weak = check_weak_majorization(&[3.0, 1.0], &[2.0, 2.0], DEFAULT_TOL)?;
    println!(
        "(3,1) ≺_w (2,2): {:?}, worst prefix k = {}, min margin {}",
        weak.verdict,
        weak.worst_k(),
        weak.min_margin
    );

    let log = check_weak_log_majorization(&[2.0, 2.0], &[4.0, 1.0], DEFAULT_TOL)?;
    println!("(2,2) ≺_w,log (4,1): {:?}, margins {:?}", log.verdict, log.margins);

    // Shorter vectors are padded with zeros.
    let padded = check_weak_majorization(&[1.0], &[1.0, 0.5, 0.5], DEFAULT_TOL)?;
    println!("padded comparison: {:?} against {:?}", padded.verdict, padded.y_sorted.values());

    println!("{}", serde_json::to_string_pretty(&strong).expect("report serializes"));
    Ok(())
}
