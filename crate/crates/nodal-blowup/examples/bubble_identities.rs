//! Bubble, kernel and corrector identities at n = 11.

use nodal_blowup::bubble::bubble_check;
use nodal_blowup::oracle::OracleConfig;
use nodal_blowup::weyl::default_diagonal_weyl;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = default_diagonal_weyl(11)?;
    let cfg = OracleConfig::default().with_budget(20_000);
    let rep = bubble_check(&w, 200, 7, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    println!("passed: {}", rep.passed());
    Ok(())
}
