//! Prints the regime classification for every dimension and geometry.

use nodal_blowup::regimes::{classify, cross_product};

fn main() {
    let mut last = 0;
    for s in cross_product(3..=12) {
        if s.n != last {
            println!("-- n = {}", s.n);
            last = s.n;
        }
        match classify(&s) {
            Ok(v) => println!(
                "lcf={:5} weyl_nonzero={:5} u0={:?} h={:?}: {} ({})",
                s.lcf,
                s.weyl_everywhere_nonzero,
                s.u0_vs_threshold,
                s.perturbation_sign,
                v.verdict.as_str(),
                v.rule
            ),
            Err(e) => println!("lcf={} weyl_nonzero={}: rejected ({e})", s.lcf, s.weyl_everywhere_nonzero),
        }
    }
}
