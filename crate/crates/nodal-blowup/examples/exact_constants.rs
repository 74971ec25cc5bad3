//! Sphere areas, Sobolev masses and the shifted radial integrals in exact form.

use nodal_blowup::exact::{radial_identities, recursion_check, ExactConstants};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [7usize, 10, 11, 16] {
        let c = ExactConstants::new(n)?;
        println!("n={n}");
        println!("  omega   = {}  ({:.12e})", c.omega.symbolic(), c.omega.to_f64());
        println!("  K^-n    = {}", c.kn_pow.symbolic());
        println!("  Lambda  = {}", c.lambda_n.symbolic());
        println!("  c_n     = {}", c.cn);
        if let Some(a) = &c.an {
            println!("  a_n     = {}", a.symbolic());
        }
        for r in radial_identities(n)? {
            println!("  I({}, {}) = {}  [{}]", r.p, r.q, r.computed, if r.holds { "holds" } else { "FAILS" });
        }
        let (pairs, failures) = recursion_check(n, 4)?;
        println!("  recursions: {pairs} pairs, {failures} failures");
    }
    Ok(())
}
