//! Schwarz symmetrization of a random radial function onto Euclidean space and the sphere,
//! and of a histogram given only through its level volumes.
//!
//! `cargo run --release --example symmetrization -- 7`

use gn_rigidity::constants::GNParams;
use gn_rigidity::functionals::gn_quotient;
use gn_rigidity::geometry::RadialMetric;
use gn_rigidity::symmetrize::{
    dirichlet_check, norms_check, random_source, MeasuredFunction, Rearrangement, LEVELS_PER_BAND,
};

fn main() -> gn_rigidity::Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(7);
    let n = 3;
    let src = RadialMetric::space_form(n, -1.0, 2.0)?;
    let f = MeasuredFunction::radial(random_source(seed, 1.2, 120)?, src.clone())?;
    let targets = [
        RadialMetric::euclidean(n, 10.0)?,
        RadialMetric::space_form(n, 1.0, RadialMetric::space_form_max_chart(1.0, 3.0))?,
    ];
    for tgt in &targets {
        let ub = Rearrangement::new(&f, tgt)?;
        println!(
            "{} -> {}: support radius {:.6}",
            src.label(),
            tgt.label(),
            ub.support_radius()
        );
        for s in [0.1, 0.3, 0.5] {
            println!(
                "  level {s}: source volume {:.12}, rearranged {:.12}",
                ub.distribution(s),
                ub.target_distribution(s)
            );
        }
        for q in [1.0, 2.0, 3.5] {
            let (l, r) = norms_check(&f, &ub, q)?;
            println!("  int f^{q} = {l:.14}, int u^{q} = {r:.14}");
        }
        let (ef, eu) = dirichlet_check(&f, &ub)?;
        println!("  energy {ef:.10} -> {eu:.10}");
    }

    // quotient improvement on Euclidean space
    let e = RadialMetric::euclidean(n, 10.0)?;
    let g = MeasuredFunction::radial(random_source(seed, 1.2, 120)?, e.clone())?;
    let ub = Rearrangement::new(&g, &e)?;
    let p = GNParams::new(n, 0.6)?;
    let MeasuredFunction::RadialGrid(prof, _) = &g else {
        unreachable!()
    };
    println!(
        "\nEuclidean quotient {:.10} -> {:.10} (sampled profile {:.10})",
        gn_quotient(prof, &e, &p)?,
        ub.quotient(&p)?,
        gn_quotient(&ub.profile(LEVELS_PER_BAND)?, &e, &p)?
    );

    let h = MeasuredFunction::histogram(vec![(2.0, 0.5), (1.0, 1.5), (0.5, 3.0)])?;
    let ub = Rearrangement::new(&h, &e)?;
    let prof = ub.profile(LEVELS_PER_BAND)?;
    println!("\nhistogram -> step profile:");
    for (r, v) in prof.radii().iter().zip(prof.values()) {
        println!("  r = {r:.6}  u = {v}");
    }
    Ok(())
}
