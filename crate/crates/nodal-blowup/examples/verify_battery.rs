//! Runs a fast subset of the verification battery in-process and prints the
//! checks.

use nodal_blowup::cli::{verify_all, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig { criteria: vec![1, 2, 4, 9, 10], ..RunConfig::default() };
    let rep = verify_all(&cfg)?;
    for c in &rep.checks {
        let tag = match (c.gating, c.passed) {
            (false, _) => "note",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        println!("{tag} [{}] {}: {:.3e} ({:.1e})", c.criterion, c.name, c.value, c.tolerance);
    }
    println!("passed: {}", rep.passed);
    Ok(())
}
