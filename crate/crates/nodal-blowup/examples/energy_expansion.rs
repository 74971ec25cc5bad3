//! Reduced energy at n = 11: closed-form profile against quadrature, the
//! cancelling z-Hessian pieces and the quartic coefficient along one axis.

use nodal_blowup::energy::{energy_oracle_config, f_assembled, fit_quartic, hessian_z, profile_t, ModelData};
use nodal_blowup::weyl::default_diagonal_weyl;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 11;
    let model = ModelData::new(default_diagonal_weyl(n)?, 1.0)?;
    let cfg = energy_oracle_config(n, 11);
    let t = 1.0;
    let zero = vec![0.0; n];

    let closed = profile_t(&model, t)?;
    let quad = f_assembled(&model, t, &zero, &cfg)?;
    println!("F(1,0) closed {closed:.12e} quadrature {:.12e} +- {:.2e}", quad.value, quad.standard_error);

    let audit = hessian_z(&model, t)?;
    println!("z-Hessian pieces cancel: rational {} residual {:.2e}", audit.rational_cancellation, audit.relative_residual);

    let mut z = vec![0.0; n];
    z[0] = 0.1;
    z[2] = -0.05;
    let a = f_assembled(&model, t, &z, &cfg)?;
    let minus: Vec<f64> = z.iter().map(|v| -v).collect();
    let b = f_assembled(&model, t, &minus, &cfg)?;
    println!("evenness gap {:.2e} (error {:.2e})", (a.value - b.value).abs(), a.standard_error);

    let mut e = vec![0.0; n];
    e[0] = 1.0;
    let fit = fit_quartic(&model, t, &e, &[0.05, 0.1, 0.15, 0.2, 0.25], &cfg)?;
    println!(
        "quartic: fitted {:.6e}, published {:.6e}, pairing model {:.6e}",
        fit.normalized, fit.published, fit.corrected
    );
    Ok(())
}
