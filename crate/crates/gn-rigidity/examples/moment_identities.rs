//! Closed-form radial moments against adaptive quadrature, including the α > 1 tails.
//!
//! `cargo run --release --example moment_identities`

use gn_rigidity::specfun::{moment_closed, moment_quad_detailed, MomentSpec};

fn main() -> gn_rigidity::Result<()> {
    println!(
        "{:>2} {:>5} {:>4} {:>8} {:>22} {:>9} {:>9} {:>9}",
        "n", "alpha", "q1", "q2", "closed", "rel", "abs_err", "tail"
    );
    for n in [3, 5, 8] {
        for a in [0.3, 0.8, 1.1, 1.4] {
            for q1 in [0.0, 2.0] {
                for q2 in [(a + 1.0) / (1.0 - a), 2.0 * a / (1.0 - a) + 2.0] {
                    let s = MomentSpec::new(q1, q2);
                    if s.validate(n, a).is_err() {
                        continue;
                    }
                    let c = moment_closed(n, a, s)?;
                    let q = moment_quad_detailed(n, a, s, 1e-12)?;
                    println!(
                        "{n:>2} {a:>5} {q1:>4} {q2:>8.4} {c:>22.14e} {:>9.1e} {:>9.1e} {:>9}",
                        (q.value - c).abs() / c,
                        q.abs_err,
                        q.tail_bound.map_or("-".into(), |t| format!("{t:.1e}"))
                    );
                }
            }
        }
    }
    Ok(())
}
