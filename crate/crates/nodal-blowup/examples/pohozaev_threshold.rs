//! Pohozaev constants and the ten-dimensional threshold 5/567.

use nodal_blowup::exact::{pohozaev_constant, ten_dimensional_identity, ten_dimensional_threshold};
use nodal_blowup::regimes::{ten_dimensional_cancellation, BalanceCoefficients};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 7..=14 {
        println!("a_{n} = {}", pohozaev_constant(n)?.symbolic());
    }
    let (lhs, rhs) = ten_dimensional_identity()?;
    println!("2e-4 8^-6 a_10 = {}  vs  (5/567) omega_9 = {}  equal={}", lhs.symbolic(), rhs.symbolic(), lhs == rhs);
    println!("threshold = {}", ten_dimensional_threshold());
    for mu in [1e-1, 1e-2, 1e-3] {
        let r = ten_dimensional_cancellation(mu)?;
        println!("mu={mu:.0e}: root {:.15} (exact {:.15})", r.root, r.exact);
    }
    let bal = BalanceCoefficients::new(11)?;
    for mu in [1e-1, 1e-2] {
        println!("n=11 mu={mu:.0e} u0=1 |W|^2=1: balance {:.6e}", bal.eval(1.0, 1.0, mu));
    }
    Ok(())
}
