//! Interpolates four data points with variable vertical scaling and prints a
//! coarse table of the interpolant next to the piecewise-linear data function.

use bifract::cli::interpolation_lattice;
use bifract::{InterpolationProblem, OperatorContext};

fn main() -> bifract::Result<()> {
    let problem = InterpolationProblem::new(
        vec![0.0, 1.0, 2.5, 4.0],
        vec![1.0, 2.0, 0.5, 1.5],
        vec![0.3, 0.7, -0.5, 0.4],
    )?;
    let ctx = OperatorContext::new(problem.clone())?;
    let lattice = interpolation_lattice(&problem, 8)?;
    let fp = ctx.fixed_point(&lattice, 1e-12)?;
    let residual = ctx.rb_apply(&fp.function, &lattice)?.sup_distance(&fp.function);

    println!("s = {}, {} iterations, residual {residual:.2e}", ctx.contraction_factor(), fp.iterations);
    println!("{:>8} {:>12} {:>12}", "x", "f(x)", "h(x)");
    for x in (0..=16).map(|i| i as f64 * 0.25) {
        println!("{x:>8.3} {:>12.6} {:>12.6}", fp.function.eval(x)?, problem.eval_h(x)?);
    }
    Ok(())
}
