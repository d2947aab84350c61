//! Per-column refinement bounds and cylinder counts against the product of
//! the growth factors `γ_n = (s_{n-1} + s_n) / 2`.

use bifract::dimension::{cylinder_study, recursion_bounds_check};
use bifract::InterpolationProblem;

fn main() -> bifract::Result<()> {
    let problem = InterpolationProblem::uniform(vec![0.0, 1.0, 0.0], vec![0.6, 0.8, 0.6])?;
    for r in 0..=6 {
        let audit = recursion_bounds_check(&problem, r, 6)?;
        println!(
            "r = {r}: {} cells, {} violations, worst margin {:.3}, aggregate margin {:.3}",
            audit.cells,
            audit.violations,
            audit.worst_margin,
            audit.aggregate_margin.unwrap_or(f64::NAN)
        );
    }

    let study = cylinder_study(&problem, 6, 4, 11, 6)?;
    println!("count / reference in [{:.3}, {:.3}]", study.c_lower, study.c_upper);
    for rep in study.reports.iter().step_by(4) {
        println!("  {:?}: {} boxes, reference {:.2}", rep.word, rep.count, rep.reference);
    }
    Ok(())
}
