//! Remainder ratios of the metric, Christoffel, scalar-curvature and Weyl
//! expansions of `exp(εh)` at n = 11 under halving of ε.

use nodal_blowup::curvature::{expansion_check, reference_point, MetricField, EXPANSION_STEP};
use nodal_blowup::weyl::default_diagonal_weyl;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = MetricField::centered(default_diagonal_weyl(11)?, 1e-2)?;
    let x = reference_point(&m, 0.3);
    let step = std::env::var("STEP").ok().and_then(|s| s.parse().ok()).unwrap_or(EXPANSION_STEP);
    let report = expansion_check(&m, &x, &[1e-2, 5e-3, 2.5e-3], step)?;
    for r in &report.rows {
        println!(
            "eps {:.2e}: inverse {:.3e} christoffel {:.3e} scalar {:.3e} (leading {:.3e}) weyl {:.3e}",
            r.eps, r.inverse, r.christoffel, r.scalar, r.scalar_leading, r.weyl_deviation
        );
    }
    println!("inverse ratios     {:?}", report.inverse_ratios);
    println!("christoffel ratios {:?}", report.christoffel_ratios);
    println!("scalar ratios      {:?}", report.scalar_ratios);
    println!("scalar / leading   {:?}", report.scalar_relative_ratios);
    println!("weyl ratios        {:?}", report.weyl_ratios);
    Ok(())
}
