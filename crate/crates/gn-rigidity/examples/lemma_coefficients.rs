//! Fitted small-t ratios of the D and A series against their closed forms, for a generic
//! cutoff jet on the unit sphere and on hyperbolic space.
//!
//! `cargo run --release --example lemma_coefficients`

use gn_rigidity::constants::GNParams;
use gn_rigidity::expansion::verify_da_ratios;
use gn_rigidity::functionals::CutoffSpec;
use gn_rigidity::geometry::RadialMetric;

fn main() -> gn_rigidity::Result<()> {
    let spec = CutoffSpec {
        a_scalar: 0.3,
        beta1: -0.2,
        beta2: 0.1,
        b_e: 0.4,
        d_trace: 0.25,
        r0: 1.0,
    };
    for (n, a, k) in [
        (3, 0.5, 1.0),
        (4, 0.3, -1.0),
        (3, 1.1, 1.0),
        (4, 1.15, -1.0),
    ] {
        let p = GNParams::new(n, a)?;
        let m = RadialMetric::space_form(n, k, RadialMetric::space_form_max_chart(k, 3.0))?;
        for mexp in [a + 1.0, 2.0 * a, 2.0] {
            let r = verify_da_ratios(&p, &m, &spec, mexp, None)?;
            println!(
                "n={n} alpha={a} K={k:+} m={mexp:.2}  D1/D0 {:+.8e} ({:+.8e})  D2/D0 {:+.8e} ({:+.8e})  {}",
                r.d.fitted[1],
                r.d.predicted[1],
                r.d.fitted[2],
                r.d.predicted[2],
                if r.d.pass { "ok" } else { "off" }
            );
        }
        let r = verify_da_ratios(&p, &m, &spec, a + 1.0, None)?;
        println!(
            "             A1/A0 {:+.8e} ({:+.8e})  A2/A0 {:+.8e} ({:+.8e})  Sc series {:+.6e} {:+.6e}",
            r.a.fitted[1], r.a.predicted[1], r.a.fitted[2], r.a.predicted[2], r.sc_fitted[0], r.sc_fitted[1]
        );
    }
    Ok(())
}
