//! Contraction of the graph maps in the metric sheared along the interpolant,
//! and of the operator `T` in the sup norm.

use bifract::ifs::contraction_audit;
use bifract::verify::{contraction_suite, VerifyConfig};
use bifract::InterpolationProblem;

fn main() -> bifract::Result<()> {
    let problem = InterpolationProblem::new(
        vec![0.0, 0.3, 0.55, 1.0],
        vec![0.0, 0.9, -0.2, 0.5],
        vec![0.4, -0.6, 0.7, 0.2],
    )?;
    let audit = contraction_audit(&problem, None, None, 50_000, 1, 5)?;
    let a = &audit.analysis;
    println!(
        "lambda_l = {:.3}, lambda_S = {:.3}, eta = {:.3}, beta = {:.4}",
        a.lambda_l, a.lambda_s, a.eta, audit.beta
    );
    println!("bound c = {:.6}, largest sampled ratio = {:.6}", audit.bound, audit.max_ratio);

    let cfg = VerifyConfig { trials: 20_000, ..VerifyConfig::default() };
    for check in contraction_suite(&problem, &cfg)? {
        println!("{:<14} {}", check.check, if check.pass { "ok" } else { "FAILED" });
    }
    Ok(())
}
