//! Term-by-term beta-ratio assembly of c1..c8, independent of the simplified closed forms.
//!
//! The same expression serves both regimes: `ℬ` switches to the reflected branch for α > 1
//! and `|α-1|` absorbs the accompanying sign change.

// the including module provides `gamma_exponent` and `script_beta`
use super::{gamma_exponent, script_beta};

fn ratio(p1: f64, q1: f64, p0: f64, q0: f64) -> f64 {
    script_beta(p1, q1).unwrap() / script_beta(p0, q0).unwrap()
}

pub fn raw_c(n: usize, alpha: f64) -> [f64; 8] {
    let a = alpha;
    let nf = n as f64;
    let h = nf / 2.0;
    let g = gamma_exponent(n, a);
    let k = (a - 1.0).abs() / 8.0;
    // second arguments for the 2α and α+1 moments
    let q2 = 2.0 * a / (1.0 - a) + 1.0;
    let q1 = (1.0 + a) / (1.0 - a) + 1.0;
    let w2 = (1.0 - g) / (g * a);
    let w1 = 2.0 / (g * (a + 1.0));
    let first = |p: f64, q: f64| ratio(p + 1.0, q, p, q);
    let second = |p: f64, q: f64| ratio(p + 2.0, q, p, q);

    let c1 = (-first(h + 1.0, q2) - w2 * first(h, q2) + w1 * first(h, q1)) / (6.0 * nf * k);
    let c2 = 16.0 / nf * ratio(h + 1.0, q2 + 2.0, h + 1.0, q2);
    let pre2 = 1.0 / (nf * (nf + 2.0) * k * k);
    let c3 = pre2 * (second(h + 1.0, q2) + w2 * second(h, q2) - w1 * second(h, q1));
    let c4 = pre2
        * ((1.0 - g) * (2.0 * a - 2.0) / (4.0 * g) * second(h, q2)
            - (a - 1.0) / (4.0 * g) * second(h, q1));
    let c5 = pre2
        * (-second(h + 1.0, q2) / 6.0 - w2 * (2.0 * a / 12.0) * second(h, q2)
            + w1 * ((a + 1.0) / 12.0) * second(h, q1))
        + 4.0 / (3.0 * nf * (nf + 2.0) * k) * ratio(h + 2.0, q2 + 1.0, h + 1.0, q2);
    let c6 = (w2 * (2.0 * a * (2.0 * a - 2.0) / 4.0) * first(h, q2)
        - w1 * ((a + 1.0) * (a - 1.0) / 4.0) * first(h, q1))
        / (nf * k);
    let c7 = w2 * 2.0 * a * (2.0 * a - 2.0) / 8.0 - w1 * (a + 1.0) * (a - 1.0) / 8.0;
    let c8 =
        (-first(h + 1.0, q2) - (1.0 - g) / g * first(h, q2) + first(h, q1) / g) / (6.0 * nf * k);
    [c1, c2, c3, c4, c5, c6, c7, c8]
}
