//! The Gagliardo-Nirenberg quotient and its Yamabe-type variant on P1 profiles.

use serde::Serialize;

use super::profile::{Assembly, Boundary, RadialProfile, MIN_QUOTIENT_NODES};
use crate::constants::{exponents, GNParams, Regime};
use crate::error::{domain, Error, Result};
use crate::geometry::RadialMetric;
use crate::specfun::sphere_area;

/// The integrals every quotient and functional is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileIntegrals {
    /// `∫|∇u|²`.
    pub grad2: f64,
    /// `∫u^{α+1}`.
    pub pow_a1: f64,
    /// `∫u^{2α}`.
    pub pow_2a: f64,
    /// `∫Sc u²`, when requested.
    pub sc_u2: Option<f64>,
    /// Share of `grad2` supplied by the analytic power-law tail.
    pub tail_share: f64,
}

fn check_profile(p: &RadialProfile) -> Result<()> {
    if p.len() < MIN_QUOTIENT_NODES {
        return Err(domain(format!(
            "quotients need at least {MIN_QUOTIENT_NODES} nodes, got {}",
            p.len()
        )));
    }
    if p.has_jumps() {
        return Err(Error::Representation(
            "step profiles have no Dirichlet energy".into(),
        ));
    }
    if p.is_zero() {
        return Err(Error::Degenerate("zero profile".into()));
    }
    Ok(())
}

/// `∫_R^∞ ω r^{n-1} (c r^{-k})^q dr`.
fn power_tail(n: usize, c: f64, k: f64, q: f64, r: f64) -> Result<f64> {
    let nf = n as f64;
    let e = k * q - nf;
    if !(e > 0.0) {
        return Err(Error::Support(format!(
            "tail r^-{k} is not in L^{q} on R^{n}"
        )));
    }
    Ok(sphere_area(n) * c.powf(q) * r.powf(-e) / e)
}

/// Integrals of a profile on a metric, integrating each element with fixed Gauss-Legendre.
///
/// Decaying profiles on Euclidean space are continued by the power law fitted to their last
/// two nodes; on other metrics a decaying profile must reach the chart end.
pub fn profile_integrals(
    profile: &RadialProfile,
    metric: &RadialMetric,
    params: &GNParams,
    with_sc: bool,
) -> Result<ProfileIntegrals> {
    check_profile(profile)?;
    if metric.n != params.n {
        return Err(Error::Dimension {
            expected: params.n,
            got: metric.n,
        });
    }
    let asm = Assembly::new(profile.radii(), metric, with_sc)?;
    let u = profile.values();
    let a = params.alpha;
    let mut grad2 = asm.energy(u);
    let mut pow_a1 = asm.power(u, a + 1.0);
    let mut pow_2a = asm.power(u, 2.0 * a);
    let sc_u2 = if with_sc { Some(asm.sc_mass(u)?) } else { None };
    let mut tail_share = 0.0;
    if profile.boundary() == Boundary::Decays {
        if !metric.is_euclidean() && profile.r_end() < metric.r_max * (1.0 - 1e-12) {
            return Err(Error::Support(
                "decaying profile must reach the chart end on curved metrics".into(),
            ));
        }
        if metric.is_euclidean() {
            let (c, k) = profile.tail_power().ok_or_else(|| {
                Error::Support("decaying profile without a decreasing positive tail".into())
            })?;
            let r = profile.r_end();
            let tg = power_tail(params.n, c * k, k + 1.0, 2.0, r)?;
            grad2 += tg;
            tail_share = tg / grad2;
            pow_a1 += power_tail(params.n, c, k, a + 1.0, r)?;
            pow_2a += power_tail(params.n, c, k, 2.0 * a, r)?;
        }
    }
    Ok(ProfileIntegrals {
        grad2,
        pow_a1,
        pow_2a,
        sc_u2,
        tail_share,
    })
}

/// Quotient from its three integrals, with `energy` in place of `∫|∇u|²`.
///
/// Minus: `E ‖u‖_{2α}^{2(1-γ)/γ} / ‖u‖_{α+1}^{2/γ}`; Plus: `E ‖u‖_{α+1}^{2(1-θ)/θ} / ‖u‖_{2α}^{2/θ}`.
pub fn quotient_value(params: &GNParams, energy: f64, pow_a1: f64, pow_2a: f64) -> Result<f64> {
    if !(pow_a1 > 0.0) || !(pow_2a > 0.0) {
        return Err(Error::Degenerate("vanishing norm in the quotient".into()));
    }
    let a = params.alpha;
    let e = exponents(params).interp;
    Ok(match params.regime {
        Regime::Minus => {
            energy * pow_2a.powf((1.0 - e) / (e * a)) / pow_a1.powf(2.0 / (e * (a + 1.0)))
        }
        Regime::Plus => {
            energy * pow_a1.powf(2.0 * (1.0 - e) / (e * (a + 1.0))) / pow_2a.powf(1.0 / (e * a))
        }
    })
}

/// Gagliardo-Nirenberg quotient of a profile.
pub fn gn_quotient(
    profile: &RadialProfile,
    metric: &RadialMetric,
    params: &GNParams,
) -> Result<f64> {
    let i = profile_integrals(profile, metric, params, false)?;
    quotient_value(params, i.grad2, i.pow_a1, i.pow_2a)
}

/// Yamabe-type quotient: the energy becomes `∫|∇u|² + (1/(2(1+α)))∫Sc u²`.
pub fn yamabe_type_quotient(
    profile: &RadialProfile,
    metric: &RadialMetric,
    params: &GNParams,
) -> Result<f64> {
    let i = profile_integrals(profile, metric, params, !metric.is_euclidean())?;
    let sc = i.sc_u2.unwrap_or(0.0);
    quotient_value(
        params,
        i.grad2 + sc / (2.0 * (1.0 + params.alpha)),
        i.pow_a1,
        i.pow_2a,
    )
}

#[cfg(test)]
mod tests {
    use super::super::family::extremal_profile;
    use super::super::profile::{edge_clustered_grid, uniform_grid};
    use super::*;
    use crate::constants::sharp_constant;

    #[test]
    fn sampled_extremal_attains_sharp_constant() {
        for (n, a) in [(3, 0.5), (4, 0.9), (3, 1.5), (4, 1.2), (3, 3.0)] {
            let p = GNParams::new(n, a).unwrap();
            let m = RadialMetric::euclidean(n, 1e9).unwrap();
            let prof = extremal_profile(&p, 1.0, 20_000).unwrap();
            let q = gn_quotient(&prof, &m, &p).unwrap();
            let s = sharp_constant(n, a, p.regime).unwrap();
            assert!(((q - s) / s).abs() < 1e-6, "n={n} a={a}: {q} vs {s}");
        }
    }

    #[test]
    fn homogeneity_and_dilation() {
        let p = GNParams::new(3, 0.6).unwrap();
        let m = RadialMetric::euclidean(3, 10.0).unwrap();
        let prof = RadialProfile::sample(
            |r| (1.0 - r * r / 4.0).max(0.0).powi(2) * (1.0 + 0.2 * r),
            edge_clustered_grid(2.0, 400),
            Boundary::CompactSupport,
        )
        .unwrap();
        let q = gn_quotient(&prof, &m, &p).unwrap();
        for c in [0.1, 10.0] {
            assert!(((gn_quotient(&prof.scaled(c), &m, &p).unwrap() - q) / q).abs() < 1e-12);
        }
        let d = gn_quotient(&prof.dilated(2.5), &m, &p).unwrap();
        assert!(((d - q) / q).abs() < 1e-12);
    }

    #[test]
    fn yamabe_type_ordering() {
        let p = GNParams::new(3, 0.5).unwrap();
        let prof = RadialProfile::sample(
            |r| (1.0 - r).max(0.0).powi(2),
            uniform_grid(0.0, 1.0, 200),
            Boundary::CompactSupport,
        )
        .unwrap();
        let e = RadialMetric::euclidean(3, 2.0).unwrap();
        assert_eq!(
            gn_quotient(&prof, &e, &p).unwrap(),
            yamabe_type_quotient(&prof, &e, &p).unwrap()
        );
        for (k, greater) in [(1.0, true), (-1.0, false)] {
            let m = RadialMetric::space_form(3, k, 2.0).unwrap();
            let (g, y) = (
                gn_quotient(&prof, &m, &p).unwrap(),
                yamabe_type_quotient(&prof, &m, &p).unwrap(),
            );
            assert_eq!(y > g, greater);
        }
        let s = RadialMetric::schwarzschild(3, 0.5, 3.0).unwrap();
        let prof = RadialProfile::sample(
            |r| ((r - 0.25) * (3.0 - r)).max(0.0).powi(2),
            uniform_grid(0.25, 3.0, 300),
            Boundary::CompactSupport,
        )
        .unwrap();
        let (g, y) = (
            gn_quotient(&prof, &s, &p).unwrap(),
            yamabe_type_quotient(&prof, &s, &p).unwrap(),
        );
        assert!(((g - y) / g).abs() < 1e-9);
    }

    #[test]
    fn degenerate_profiles_rejected() {
        let p = GNParams::new(3, 0.5).unwrap();
        let m = RadialMetric::euclidean(3, 2.0).unwrap();
        let z = RadialProfile::sample(
            |_| 0.0,
            uniform_grid(0.0, 1.0, 100),
            Boundary::CompactSupport,
        )
        .unwrap();
        assert!(gn_quotient(&z, &m, &p).is_err());
        let short = RadialProfile::sample(
            |r| 1.0 - r,
            uniform_grid(0.0, 1.0, 10),
            Boundary::CompactSupport,
        )
        .unwrap();
        assert!(gn_quotient(&short, &m, &p).is_err());
    }
}
