//! Box-counting dimension: the closed form beside a log-log fit of streamed
//! column counts.

use bifract::dimension::{closed_form_dimension, dimension_study, StudyConfig};
use bifract::InterpolationProblem;

fn main() -> bifract::Result<()> {
    let cases = [
        ("tent, s = 0.8", InterpolationProblem::uniform(vec![0.0, 1.0, 0.0], vec![0.8; 3])?, 11),
        (
            "N = 3",
            InterpolationProblem::uniform(vec![0.0, 1.0, 0.3, 0.0], vec![0.7, 0.9, 0.8, 0.7])?,
            8,
        ),
        ("tent, s = 0.4", InterpolationProblem::uniform(vec![0.0, 1.0, 0.0], vec![0.4; 3])?, 11),
    ];
    for (name, problem, r_max) in cases {
        let closed = closed_form_dimension(&problem)?;
        let cfg = StudyConfig { r_max, ..StudyConfig::default() };
        let report = dimension_study(&problem, &cfg)?;
        println!(
            "{name}: gamma = {:.2}, closed form {:.5}, fit {:.4} [{:.4}, {:.4}]",
            closed.gamma, closed.dimension, report.fit.slope, report.fit.ci_low, report.fit.ci_high
        );
        for ((r, n), slope) in report.resolutions.iter().zip(&report.totals).zip(report.partial_slopes()) {
            let slope = slope.map_or(String::from("-"), |s| format!("{s:.4}"));
            println!("  r = {r:>2}  N(r) = {n:>8}  {slope}");
        }
    }
    Ok(())
}
