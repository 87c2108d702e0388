//! The τ-functionals ℒ± and 𝒲± and their τ-infimum.

use serde::Serialize;

use super::profile::RadialProfile;
use super::quotients::profile_integrals;
use crate::constants::{exponents, sigma, tau_powers, tau_star, GNParams, Regime};
use crate::error::{Error, Result};
use crate::geometry::RadialMetric;
use crate::tolerances::NORMALIZATION;

/// `𝔪(1 - k 𝔪^{-w} Σ)`, with `(k, w) = ((2Γ+1)/Γ, Γ/(2Γ+1))` (Minus) or `((1-Θ)/Θ, Θ/(1-Θ))` (Plus).
pub fn sigma_offset(params: &GNParams) -> Result<f64> {
    let s = exponents(params).scale;
    let (k, w) = match params.regime {
        Regime::Minus => ((2.0 * s + 1.0) / s, s / (2.0 * s + 1.0)),
        Regime::Plus => ((1.0 - s) / s, s / (1.0 - s)),
    };
    let m = params.m_frak;
    Ok(m * (1.0 - k * m.powf(-w) * sigma(params)?))
}

/// Integrals of a normalized profile in the τ-functionals: `∫|∇u|²`, the normalized mass
/// (`∫u^{α+1}` or `∫u^{2α}`), the other power and `∫Sc u²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauIntegrals {
    pub grad2: f64,
    pub mass: f64,
    pub other: f64,
    pub sc_u2: f64,
}

impl TauIntegrals {
    pub fn check_normalized(&self) -> Result<()> {
        if (self.mass - 1.0).abs() > NORMALIZATION {
            return Err(Error::Normalization(format!(
                "mass integral is {} (needs 1 within {NORMALIZATION})",
                self.mass
            )));
        }
        Ok(())
    }
}

/// `ℒ` from its integrals: `τ^p ∫|∇u|² + 𝔪(τ^{-q} other - mass) + sigma_offset`.
pub fn l_from_integrals(params: &GNParams, tau: f64, i: &TauIntegrals) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(crate::error::domain("τ must be positive"));
    }
    let (p, q) = tau_powers(params);
    let m = params.m_frak;
    Ok(tau.powf(p) * i.grad2 + m * (tau.powf(-q) * i.other - i.mass) + sigma_offset(params)?)
}

/// `𝒲 = ℒ + (1/(2(1+α))) τ^p ∫Sc u²`.
pub fn w_from_integrals(params: &GNParams, tau: f64, i: &TauIntegrals) -> Result<f64> {
    let (p, _) = tau_powers(params);
    Ok(l_from_integrals(params, tau, i)? + tau.powf(p) * i.sc_u2 / (2.0 * (1.0 + params.alpha)))
}

/// Minimizing τ of `ℒ` and the minimum, via the closed-form τ-calculus.
pub fn l_infimum(params: &GNParams, i: &TauIntegrals) -> Result<(f64, f64)> {
    let (p, q) = tau_powers(params);
    let (tau, inf) = tau_star(i.grad2, i.other, p, q, params.m_frak)?;
    Ok((tau, inf - params.m_frak * i.mass + sigma_offset(params)?))
}

pub fn tau_integrals(
    u: &RadialProfile,
    metric: &RadialMetric,
    params: &GNParams,
    with_sc: bool,
) -> Result<TauIntegrals> {
    let pi = profile_integrals(u, metric, params, with_sc && !metric.is_euclidean())?;
    let (mass, other) = match params.regime {
        Regime::Minus => (pi.pow_a1, pi.pow_2a),
        Regime::Plus => (pi.pow_2a, pi.pow_a1),
    };
    Ok(TauIntegrals {
        grad2: pi.grad2,
        mass,
        other,
        sc_u2: pi.sc_u2.unwrap_or(0.0),
    })
}

/// `ℒ±(V, g, u, τ)` for a normalized profile.
pub fn l_functional(
    params: &GNParams,
    u: &RadialProfile,
    tau: f64,
    metric: &RadialMetric,
) -> Result<f64> {
    let i = tau_integrals(u, metric, params, false)?;
    i.check_normalized()?;
    l_from_integrals(params, tau, &i)
}

/// `𝒲±(V, g, u, τ)` for a normalized profile.
pub fn w_functional(
    params: &GNParams,
    u: &RadialProfile,
    tau: f64,
    metric: &RadialMetric,
) -> Result<f64> {
    let i = tau_integrals(u, metric, params, true)?;
    i.check_normalized()?;
    w_from_integrals(params, tau, &i)
}

#[cfg(test)]
mod tests {
    use super::super::family::{extremal_profile, normalize_exact};
    use super::super::profile::{edge_clustered_grid, Boundary};
    use super::*;

    #[test]
    fn extremal_at_optimal_tau_is_zero() {
        for (n, a, m) in [(3, 0.5, 1.0), (4, 0.7, 2.0), (3, 1.4, 0.5), (5, 1.2, 1.0)] {
            let p = GNParams::new(n, a).unwrap().with_m_frak(m).unwrap();
            let e = RadialMetric::euclidean(n, 1e12).unwrap();
            let u = normalize_exact(&extremal_profile(&p, 1.0, 20_000).unwrap(), &e, &p).unwrap();
            let i = tau_integrals(&u, &e, &p, false).unwrap();
            let (tau, v) = l_infimum(&p, &i).unwrap();
            assert!(v.abs() < 1e-6, "n={n} a={a}: {v}");
            let direct = l_functional(&p, &u, tau, &e).unwrap();
            assert!((direct - v).abs() < 1e-8);
            for f in [0.5, 2.0] {
                assert!(l_functional(&p, &u, tau * f, &e).unwrap() > v);
            }
        }
    }

    #[test]
    fn nonnegative_on_euclidean_space() {
        let p = GNParams::new(3, 0.6).unwrap();
        let e = RadialMetric::euclidean(3, 10.0).unwrap();
        let prof = RadialProfile::sample(
            |r| (1.0 - r * r).max(0.0).powf(1.5) * (1.0 + r),
            edge_clustered_grid(1.0, 500),
            Boundary::CompactSupport,
        )
        .unwrap();
        let u = normalize_exact(&prof, &e, &p).unwrap();
        for tau in [0.01, 0.1, 1.0, 10.0] {
            assert!(l_functional(&p, &u, tau, &e).unwrap() > -1e-6);
        }
        assert!(matches!(
            l_functional(&p, &prof.scaled(2.0), 1.0, &e),
            Err(Error::Normalization(_))
        ));
    }

    #[test]
    fn w_adds_scalar_term() {
        let p = GNParams::new(3, 0.6).unwrap();
        let s = RadialMetric::space_form(3, 1.0, 2.0).unwrap();
        let prof = RadialProfile::sample(
            |r| (1.0 - r * r).max(0.0).powi(2),
            edge_clustered_grid(1.0, 300),
            Boundary::CompactSupport,
        )
        .unwrap();
        let u = normalize_exact(&prof, &s, &p).unwrap();
        let (l, w) = (
            l_functional(&p, &u, 0.3, &s).unwrap(),
            w_functional(&p, &u, 0.3, &s).unwrap(),
        );
        let i = tau_integrals(&u, &s, &p, true).unwrap();
        let (pp, _) = tau_powers(&p);
        assert!((w - l - 0.3f64.powf(pp) * i.sc_u2 / 3.2).abs() < 1e-13);
        assert!(w > l);
    }
}
