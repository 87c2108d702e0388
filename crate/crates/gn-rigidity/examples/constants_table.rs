//! Sharp constants and the second-order coefficient table over a small (n, α) grid.
//!
//! `cargo run --example constants_table -- 5`

use gn_rigidity::constants::{
    c_coefficients, dd_constant, exponents, extremal_quotient, j_coefficient, sharp_constant,
    sigma, zeta_chi, GNParams,
};

fn main() -> gn_rigidity::Result<()> {
    let n_max: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5);
    let alphas = [0.25, 0.5, 0.75, 1.05, 1.1, 1.2];

    println!(
        "{:>2} {:>5} {:>6} {:>9} {:>16} {:>16} {:>10} {:>12}",
        "n", "alpha", "regime", "interp", "sharp", "display", "moments", "sigma"
    );
    for n in 3..=n_max {
        for a in alphas {
            let Ok(p) = GNParams::new(n, a) else { continue };
            let s = sharp_constant(n, a, p.regime)?;
            // the moment route to the same number
            let q = extremal_quotient(n, a, p.regime)?;
            println!(
                "{n:>2} {a:>5} {:>6} {:>9.6} {s:>16.10} {:>16.10} {:>10.1e} {:>12.6}",
                p.regime.to_string(),
                exponents(&p).interp,
                dd_constant(n, a, p.regime)?,
                (q - s).abs() / s,
                sigma(&p)?
            );
        }
    }

    println!("\nzeta, chi and c1..c8 at n = 3:");
    for a in alphas {
        let z = zeta_chi(3, a)?;
        let c = c_coefficients(3, a)?.as_array();
        let j = j_coefficient(&GNParams::new(3, a)?).ok();
        print!(
            "  alpha {a:<5} zeta1 {:+.5} zeta2 {:+.5} chi {:.4} |",
            z.zeta1, z.zeta2, z.chi
        );
        for ci in c {
            print!(" {ci:+.4}");
        }
        match j {
            Some(j) => println!(" | j {j:+.5}"),
            None => println!(" | j n/a"),
        }
    }
    Ok(())
}
