//! Assembled L and W series on space forms: fitted `(c1, c2)` against the closed forms.
//!
//! `cargo run --release --example assembled_series -- 4 0.4`

use gn_rigidity::constants::GNParams;
use gn_rigidity::expansion::{l_series, w_series, AChoice, SeriesReport};
use gn_rigidity::geometry::RadialMetric;

fn show(r: &SeriesReport) {
    println!(
        "  {:?} {:<18} c1 {:+.10e} ({:+.10e})  c2 {:+.10e} ({:+.10e})  deg {} {}",
        r.kind,
        r.metric,
        r.fit.c1,
        r.predicted[0],
        r.fit.c2,
        r.predicted[1],
        r.fit.degree,
        if r.pass { "ok" } else { "off" }
    );
}

fn main() -> gn_rigidity::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cells: Vec<(usize, f64)> = match args.as_slice() {
        [n, a, ..] => vec![(n.parse().expect("n"), a.parse().expect("alpha"))],
        _ => vec![(3, 0.5), (4, 0.4), (5, 0.7), (3, 1.1), (4, 1.1)],
    };
    for (n, a) in cells {
        let p = GNParams::new(n, a)?;
        println!("n = {n}, alpha = {a}");
        for k in [1.0, -1.0] {
            let m = RadialMetric::space_form(n, k, RadialMetric::space_form_max_chart(k, 3.0))?;
            show(&l_series(&p, &m, AChoice::Bp, None, None)?);
            show(&l_series(&p, &m, AChoice::Zero, None, None)?);
            show(&w_series(&p, &m, None, None)?);
        }
        let e = RadialMetric::euclidean(n, 10.0)?;
        show(&w_series(&p, &e, None, None)?);
    }
    Ok(())
}
