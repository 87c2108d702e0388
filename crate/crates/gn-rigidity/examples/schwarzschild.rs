//! Spatial Schwarzschild: scalar flatness, equal quotients and conformal covariance.
//!
//! `cargo run --release --example schwarzschild`

use gn_rigidity::constants::GNParams;
use gn_rigidity::functionals::profile::{uniform_grid, Boundary, RadialProfile};
use gn_rigidity::functionals::{conformal_invariance_check, gn_quotient, yamabe_type_quotient};
use gn_rigidity::geometry::{scalar_curvature_at, RadialMetric};

fn main() -> gn_rigidity::Result<()> {
    let mass = 1.0;
    for n in [3, 4, 5] {
        let m = RadialMetric::schwarzschild(n, mass, 6.0)?;
        let sc = (0..200)
            .map(|j| scalar_curvature_at(&m, 0.55 + 5.4 * j as f64 / 199.0).map(f64::abs))
            .collect::<gn_rigidity::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("n = {n}: max |Sc| over [0.55, 5.95] = {sc:.2e}");

        let (lo, hi) = (0.6, 4.0);
        let phi = RadialProfile::sample(
            |r: f64| ((r - lo) * (hi - r)).max(0.0).powi(3),
            uniform_grid(lo, hi, 600),
            Boundary::CompactSupport,
        )?;
        let c = conformal_invariance_check(&phi, &m)?;
        println!(
            "  Q_g(phi) = {:.12}, Q_flat(phi u) = {:.12}, rel {:.1e}",
            c.lhs,
            c.rhs,
            (c.diff / c.lhs).abs()
        );
        let p = GNParams::new(n, 0.5)?;
        let g = gn_quotient(&phi, &m, &p)?;
        let y = yamabe_type_quotient(&phi, &m, &p)?;
        println!("  GN quotient {g:.12}, Yamabe-type {y:.12}");
    }
    Ok(())
}
