//! Minimize the quotient on Euclidean balls from a bump and compare with the sharp constant;
//! then watch the minimized quotient on growing balls of the unit sphere.
//!
//! `cargo run --release --example variational_recovery`

use std::time::Instant;

use gn_rigidity::constants::{sharp_constant, GNParams};
use gn_rigidity::geometry::RadialMetric;
use gn_rigidity::varmin::{minimize_quotient, MinimizeConfig};

fn main() -> gn_rigidity::Result<()> {
    let cells = [(3, 0.5), (4, 0.3), (5, 0.7), (3, 1.2), (4, 1.3), (5, 1.2)];
    println!(
        "{:>3} {:>5} {:>14} {:>14} {:>10} {:>6} {:>8}",
        "n", "alpha", "minimized", "sharp", "rel", "iters", "secs"
    );
    for (n, a) in cells {
        let p = GNParams::new(n, a)?;
        let m = RadialMetric::euclidean(n, 1e3)?;
        let t = Instant::now();
        let r = minimize_quotient(&m, &p, &MinimizeConfig::default())?;
        let s = sharp_constant(n, a, p.regime)?;
        println!(
            "{n:>3} {a:>5} {:>14.8} {s:>14.8} {:>10.2e} {:>6} {:>8.2}",
            r.value,
            (r.value - s) / s,
            r.iterations,
            t.elapsed().as_secs_f64()
        );
        let fine = minimize_quotient(
            &m,
            &p,
            &MinimizeConfig {
                grid_nodes: 2048,
                ..MinimizeConfig::default()
            },
        )?;
        println!(
            "      doubled grid: {:.8} (change {:.2e})",
            fine.value,
            (fine.value - r.value) / r.value
        );
    }

    let (n, a) = (3, 0.5);
    let p = GNParams::new(n, a)?;
    let s = sharp_constant(n, a, p.regime)?;
    let sphere = RadialMetric::space_form(n, 1.0, RadialMetric::space_form_max_chart(1.0, 3.0))?;
    println!("\nunit sphere, n = {n}, alpha = {a}: minimized quotient / sharp constant");
    for radius in [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, sphere.r_max] {
        let cfg = MinimizeConfig {
            ball_radius: radius,
            ..MinimizeConfig::default()
        };
        let r = minimize_quotient(&sphere, &p, &cfg)?;
        println!("  ball radius {radius:>6.3}: {:.6}", r.value / s);
    }
    Ok(())
}
