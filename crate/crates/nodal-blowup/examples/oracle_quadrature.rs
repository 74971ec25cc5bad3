//! The ray-product quadrature on R^n against integrals with known values.

use std::f64::consts::PI;

use nodal_blowup::exact::sobolev_mass;
use nodal_blowup::oracle::{integrate_rn, integrate_sphere_poly, Integrand, OracleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [7usize, 11, 15] {
        let nf = n as f64;
        let m = nf * (nf - 2.0);
        // radial: the sphere rule is exact and only the radial error remains
        let mass = Integrand::new(n, 2.0 * nf, move |x: &[f64]| (1.0 + x.iter().map(|v| v * v).sum::<f64>() / m).powf(-nf))?;
        let q = integrate_rn(&mass, &OracleConfig::default().with_seed(1))?;
        println!("n={n:2} bubble mass {:.12e} err={:.2e} z={:.2}", q.value, q.standard_error, q.z_score(sobolev_mass(n)?.to_f64()));
        // not radial: int e^{-|x|^2} (1 + |x_1|) = pi^{n/2} + pi^{(n-1)/2}
        let g = Integrand::new(n, 4.0 * nf, |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp() * (1.0 + x[0].abs()))?;
        let exact = PI.powf(nf / 2.0) + PI.powf((nf - 1.0) / 2.0);
        for budget in [1000, 4000, 16000] {
            let q = integrate_rn(&g, &OracleConfig::default().with_budget(budget).with_seed(1))?;
            println!("      budget={budget:5} rel err={:.2e} z={:.2}", q.standard_error / exact, q.z_score(exact));
        }
    }
    // polynomial moments over the sphere are exact
    let m = integrate_sphere_poly(&[2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
    println!("int over S^10 of x1^2 x2^2 = {}", m.symbolic());
    Ok(())
}
