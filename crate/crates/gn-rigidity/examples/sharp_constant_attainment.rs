//! The sampled extremal attains the sharp constant; the error falls with the grid size.
//!
//! `cargo run --release --example sharp_constant_attainment`

use gn_rigidity::constants::{sharp_constant, GNParams};
use gn_rigidity::functionals::family::extremal_profile;
use gn_rigidity::functionals::gn_quotient;
use gn_rigidity::geometry::RadialMetric;

fn main() -> gn_rigidity::Result<()> {
    let sizes = [1_000, 4_000, 16_000, 64_000];
    print!("{:>2} {:>9}", "n", "alpha");
    for s in sizes {
        print!(" {:>10}", format!("N={s}"));
    }
    println!();
    for n in [3, 4, 5] {
        for a in [0.3, 0.6, 0.9, 1.1, n as f64 / (n as f64 - 2.0)] {
            let p = GNParams::new(n, a)?;
            let m = RadialMetric::euclidean(n, 1e9)?;
            let s = sharp_constant(n, a, p.regime)?;
            print!("{n:>2} {a:>9.6}");
            for nodes in sizes {
                let q = gn_quotient(&extremal_profile(&p, 1.0, nodes)?, &m, &p)?;
                print!(" {:>10.2e}", (q - s) / s);
            }
            println!();
        }
    }
    Ok(())
}
