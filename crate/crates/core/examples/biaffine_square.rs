//! A chain of trapezoids in the unit square, its bi-affine maps and the
//! contractivity certificate in the metric with `q ≡ 1`.

use bifract::biaffine::{build_biaffine, consistency_defect, contractivity_certificate, TrapezoidChain};
use bifract::ifs::PlaneMap;

fn main() -> bifract::Result<()> {
    let chain = TrapezoidChain::uniform(vec![0.1, 0.35, 0.2, 0.3], vec![0.6, 0.8, 0.55, 0.7])?;
    for (n, map) in build_biaffine(&chain).iter().enumerate() {
        let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(x, y)| map.apply(x, y));
        println!("w_{} maps the square onto {:?}", n + 1, corners);
    }
    println!("defect against the general construction: {:.2e}", consistency_defect(&chain, 64)?);

    let cert = contractivity_certificate(&chain, 100_000, 3)?;
    println!(
        "lambda_l = {:.3}, beta = {:.4}, bound = {:.4}, sampled ratio = {:.4}",
        cert.lambda_l, cert.beta, cert.bound, cert.max_ratio
    );
    Ok(())
}
