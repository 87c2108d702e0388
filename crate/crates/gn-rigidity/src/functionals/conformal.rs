//! Conformal covariance of the Yamabe quotient under `g = u^{4/(n-2)} δ`.

use serde::Serialize;

use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::geometry::{scalar_curvature_at, MetricKind, RadialMetric};
use crate::quad::GaussLegendre;
use crate::specfun::sphere_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalCheck {
    /// `Q_g(φ)` on the conformal metric.
    pub lhs: f64,
    /// `Q_δ(φu)` on the flat base.
    pub rhs: f64,
    pub diff: f64,
}

/// `Q_g(φ) = ∫(c(n)|∇_g φ|² + Sc_g φ²) dμ_g / (∫ φ^{2*} dμ_g)^{(n-2)/n}` against the flat quotient of `φu`.
pub fn conformal_invariance_check(
    phi: &RadialProfile,
    metric: &RadialMetric,
) -> Result<ConformalCheck> {
    let MetricKind::ConformalRadial { factor, r_min } = &metric.kind else {
        return Err(Error::Unavailable(
            "conformal factor of a non-conformal metric",
        ));
    };
    let n = metric.n;
    let nf = n as f64;
    let r = phi.radii();
    let v = phi.values();
    if phi.has_jumps() {
        return Err(Error::Representation(
            "step profiles have no Dirichlet energy".into(),
        ));
    }
    if r[0] < *r_min || phi.r_end() > metric.r_max {
        return Err(Error::Support(format!(
            "φ must live in the chart [{r_min}, {}]",
            metric.r_max
        )));
    }
    if *v.last().expect("nonempty") != 0.0 || (*r_min > 0.0 && v[0] != 0.0) {
        return Err(Error::Support(
            "φ must vanish at the ends of its support".into(),
        ));
    }
    let cn = 4.0 * (nf - 1.0) / (nf - 2.0);
    let crit = 2.0 * nf / (nf - 2.0);
    let g = GaussLegendre::cached(16);
    let omega = sphere_area(n);
    let (mut num_g, mut den_g, mut num_0, mut den_0) = (0.0, 0.0, 0.0, 0.0);
    for e in 0..r.len() - 1 {
        let (a, b) = (r[e], r[e + 1]);
        let h = b - a;
        let slope = (v[e + 1] - v[e]) / h;
        for (x, w) in g.nodes.iter().zip(&g.weights) {
            let rr = a + 0.5 * h * (1.0 + x);
            let wt = 0.5 * h * w * omega * rr.powi(n as i32 - 1);
            let f = v[e] + slope * (rr - a);
            let u = factor.value(n, rr);
            let du = factor.derivative(n, rr);
            let sc = scalar_curvature_at(metric, rr)?;
            let vol = metric.density(rr);
            num_g += wt * vol * (cn * metric.gradient_weight(rr) * slope * slope + sc * f * f);
            den_g += wt * vol * f.abs().powf(crit);
            let d = slope * u + f * du;
            num_0 += wt * cn * d * d;
            den_0 += wt * (f * u).abs().powf(crit);
        }
    }
    if !(den_g > 0.0) {
        return Err(Error::Degenerate("zero profile".into()));
    }
    let p = (nf - 2.0) / nf;
    let lhs = num_g / den_g.powf(p);
    let rhs = num_0 / den_0.powf(p);
    Ok(ConformalCheck {
        lhs,
        rhs,
        diff: lhs - rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::super::profile::{uniform_grid, Boundary};
    use super::*;
    use crate::geometry::{ConformalFactor, CubicSpline};

    fn bump(lo: f64, hi: f64, nodes: usize) -> RadialProfile {
        RadialProfile::sample(
            |r| ((r - lo) * (hi - r)).max(0.0).powi(2),
            uniform_grid(lo, hi, nodes),
            Boundary::CompactSupport,
        )
        .unwrap()
    }

    #[test]
    fn schwarzschild_invariance() {
        for n in [3, 4, 5] {
            let m = RadialMetric::schwarzschild(n, 1.0, 6.0).unwrap();
            let c = conformal_invariance_check(&bump(0.6, 4.0, 300), &m).unwrap();
            assert!((c.diff / c.lhs).abs() < 1e-7, "n={n}: {c:?}");
            let s = conformal_invariance_check(&bump(0.6, 4.0, 300).scaled(7.0), &m).unwrap();
            assert!(((s.lhs - c.lhs) / c.lhs).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_factor() {
        let x = uniform_grid(0.0, 5.0, 20);
        let spline = CubicSpline::new(x.clone(), vec![1.0; x.len()]).unwrap();
        let m = RadialMetric::conformal(3, ConformalFactor::Table(spline), 0.0, 5.0).unwrap();
        let c = conformal_invariance_check(&bump(0.5, 3.0, 100), &m).unwrap();
        assert_eq!(c.diff, 0.0);
    }

    #[test]
    fn non_harmonic_factor_still_covariant() {
        // u = 1 + r²/10 is not harmonic; the Sc_g term restores the identity
        let x = uniform_grid(0.0, 4.0, 400);
        let y: Vec<f64> = x.iter().map(|r| 1.0 + r * r / 10.0).collect();
        let m = RadialMetric::conformal(
            3,
            ConformalFactor::Table(CubicSpline::new(x, y).unwrap()),
            0.0,
            4.0,
        )
        .unwrap();
        let c = conformal_invariance_check(&bump(0.5, 3.0, 200), &m).unwrap();
        assert!((c.diff / c.lhs).abs() < 1e-5, "{c:?}");
    }

    #[test]
    fn support_is_checked() {
        let m = RadialMetric::schwarzschild(3, 1.0, 6.0).unwrap();
        assert!(conformal_invariance_check(&bump(0.4, 4.0, 100), &m).is_err());
        let e = RadialMetric::euclidean(3, 6.0).unwrap();
        assert!(conformal_invariance_check(&bump(0.6, 4.0, 100), &e).is_err());
    }
}
