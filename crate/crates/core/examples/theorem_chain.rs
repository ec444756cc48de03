//! The full chain on the 2×2 two-pair worked instance: assembly, lemma stages and the final comparison.

use majorant::checkers::{check_lemma1, check_theorem1};
use majorant::constructions::{assemble_theorem1, CommutingPairInstance};
use majorant::{ComplexMatrix, Result, DEFAULT_TOL};

fn main() -> Result<()> {
    let ones = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]])?;
    let inst = CommutingPairInstance::new(vec![
        (ComplexMatrix::from_real_diag(&[2.0, 1.0]), ComplexMatrix::from_real_diag(&[1.0, 3.0])),
        (ones.clone(), ones),
    ])?;
    println!("Σ A_k B_k       = {:?}", inst.sum_products().to_re_im().0);
    println!("(Σ A_k)(Σ B_k)  = {:?}", inst.sum_a().matmul(&inst.sum_b())?.to_re_im().0);

    let asm = assemble_theorem1(&inst)?;
    let res = asm.residuals(&inst)?;
    println!("frame is {}x{}, L = {:?}, M = {:?}", asm.frame.rows(), asm.frame.cols(), asm.left, asm.right);
    println!("reconstruction residual {:.2e}, column norm residual {:.2e}", res.reconstruction(), res.column_norms);

    let lemma = check_lemma1(&asm.lemma_inputs()?, DEFAULT_TOL)?;
    for (name, r) in lemma.majorization_stages() {
        println!("lemma stage {name:12} {:?} min margin {:.4}", r.verdict, r.min_margin);
    }

    let report = check_theorem1(&inst, DEFAULT_TOL)?;
    println!("theorem verdict: {:?}", report.verdict);
    println!("σ(LHS) = {:?}", report.diagnostics["sigma_lhs"]);
    println!("σ(RHS) = {:?}", report.diagnostics["sigma_rhs"]);
    println!("trace/operator/Frobenius LHS {:?}", report.diagnostics["norms_lhs_trace_operator_frobenius"]);
    println!("trace/operator/Frobenius RHS {:?}", report.diagnostics["norms_rhs_trace_operator_frobenius"]);
    Ok(())
}
