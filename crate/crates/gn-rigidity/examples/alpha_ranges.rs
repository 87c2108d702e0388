//! Admissible α-intervals and κ± for a range of dimensions.
//!
//! `cargo run --example alpha_ranges -- 3 16`

use gn_rigidity::constants::Regime;
use gn_rigidity::ranges::{admissible_range, f_eval, kappa, RangeCase};

fn main() -> gn_rigidity::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let (lo, hi) = match args.as_slice() {
        [a, b, ..] => (*a, *b),
        [a] => (*a, *a),
        [] => (3, 10),
    };
    println!(
        "{:>3} {:>24} {:>24} {:>24} {:>12} {:>12}",
        "n", "A3", "B2", "B3", "kappa-", "kappa+"
    );
    for n in lo.max(3)..=hi {
        let r = |c| admissible_range(n, c).map(|r| r.to_string());
        let km = kappa(n, Regime::Minus)?;
        let kp = kappa(n, Regime::Plus)?;
        println!(
            "{n:>3} {:>24} {:>24} {:>24} {:>8.6}/{} {:>8.6}/{}",
            r(RangeCase::A3)?,
            r(RangeCase::B2)?,
            r(RangeCase::B3)?,
            km.kappa,
            km.binding,
            kp.kappa,
            kp.binding
        );
    }
    let n = lo.max(3);
    println!("\nF(alpha, {n}) near 1:");
    for d in [0.2, 0.1, 0.05, 0.01] {
        println!(
            "  |alpha-1| = {d:<5} minus {:+.6e}  plus {:+.6e}",
            f_eval(n, 1.0 - d, Regime::Minus)?,
            f_eval(n, 1.0 + d, Regime::Plus).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
