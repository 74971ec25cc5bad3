//! Certified saddle boxes for n = 11..=24 and critical points of a
//! perturbed energy.

use std::time::Instant;

use nodal_blowup::energy::ModelData;
use nodal_blowup::saddle::{certify_with_shrink, locate_critical_point, CosinePerturbation, SaddleOptions, ZeroPerturbation};
use nodal_blowup::weyl::default_diagonal_weyl;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SaddleOptions::default();
    for n in 11..=24 {
        let start = Instant::now();
        let model = ModelData::new(default_diagonal_weyl(n)?, 1.0)?;
        let shrink = certify_with_shrink(&model, &opts)?;
        let c = &shrink.certificate;
        let zero = locate_critical_point(&model, c, &ZeroPerturbation)?;
        let delta = c.value_margin().min(c.slope_margin()) / 10.0;
        let hit = locate_critical_point(&model, c, &CosinePerturbation { delta })?;
        println!(
            "n={n:2} t0={:.6e} F={:.4e} eta={:.2e} eps={:.3} rounds={} passed={} zero-dist={:.1e} perturbed-dist={:.2e} ({:.2}s)",
            c.t0,
            c.f_at_min,
            c.eta,
            c.eps_box,
            shrink.rounds,
            c.passed,
            zero.distance,
            hit.distance,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
