//! Random Weyl-type forms: validation, the contraction trace and coercivity
//! of the pair-tensor quartic.

use nodal_blowup::weyl::{coercivity_check, contraction, default_diagonal_weyl, WeylForm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, seed) in [(6usize, 1u64), (11, 2), (13, 3)] {
        let w = WeylForm::random(n, seed)?;
        let v = w.validate();
        let t = contraction(&w);
        println!(
            "n={n:2} |W|^2={:.6} residual={:.2e} accepted={} trace(T)/3|W|^2={:.15}",
            w.norm_sq(),
            v.max_residual(),
            v.accepted,
            t.trace() / (3.0 * w.norm_sq())
        );
    }
    let w = default_diagonal_weyl(11)?;
    let c = coercivity_check(&w, 2048, 32, 5);
    println!("diagonal n=11: coercivity minimum {:.6} (sweep {:.6}, descent {:.6})", c.minimum, c.sweep_minimum, c.descent_minimum);
    Ok(())
}
