//! The extremal family, the normalized base profiles u±(·, t) and the cutoffs ξ.

use serde::{Deserialize, Serialize};

use super::profile::{edge_clustered_grid, sinh_grid, Assembly, Boundary, RadialProfile};
use crate::constants::{lemma, zeta_chi, GNParams, Regime};
use crate::error::{domain, Error, Result};
use crate::geometry::RadialMetric;

/// `(λ + (α-1) r²)_+^{1/(1-α)}`.
pub fn h_extremal(alpha: f64, lambda: f64, r: f64) -> f64 {
    let b = lambda + (alpha - 1.0) * r * r;
    if b <= 0.0 {
        0.0
    } else {
        b.powf(1.0 / (1.0 - alpha))
    }
}

/// `H(s) = (1 + (α-1)s²/8)_+^{1/(1-α)}`.
#[inline]
pub fn big_h(alpha: f64, s: f64) -> f64 {
    h_extremal(alpha, 1.0, s / 8f64.sqrt())
}

/// `H'(s)`.
#[inline]
pub fn big_h_deriv(alpha: f64, s: f64) -> f64 {
    let b = 1.0 + (alpha - 1.0) * s * s / 8.0;
    if b <= 0.0 {
        0.0
    } else {
        -(s / 4.0) * b.powf(alpha / (1.0 - alpha))
    }
}

/// Outer radius of `h_extremal(α, λ, ·)` for α < 1.
pub fn extremal_support(alpha: f64, lambda: f64) -> Option<f64> {
    (alpha < 1.0).then(|| (lambda / (1.0 - alpha)).sqrt())
}

/// Sampled `h_extremal(α, λ, ·)`: edge-clustered on its support (Minus) or on a sinh grid
/// out to `10⁴` length scales with a power-law tail (Plus).
pub fn extremal_profile(params: &GNParams, lambda: f64, nodes: usize) -> Result<RadialProfile> {
    let a = params.alpha;
    if !(lambda > 0.0) {
        return Err(domain("λ must be positive"));
    }
    match params.regime {
        Regime::Minus => {
            let rs = extremal_support(a, lambda).expect("minus regime");
            RadialProfile::sample(
                |r| h_extremal(a, lambda, r),
                edge_clustered_grid(rs, nodes),
                Boundary::CompactSupport,
            )
        }
        Regime::Plus => {
            let ell = (lambda / (a - 1.0)).sqrt();
            RadialProfile::sample(
                |r| h_extremal(a, lambda, r),
                sinh_grid(0.3 * ell, 1e4 * ell, nodes),
                Boundary::Decays,
            )
        }
    }
}

/// `u±(r, t)`: `t^{-n/(2m*)} H(r/√t) / D0(m*)^{1/m*}`, `m* = α+1` (Minus) or `2α` (Plus).
pub fn u_base(params: &GNParams, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("t must be positive"));
    }
    let m = params.mass_exponent();
    let d0 = lemma::d0(params.n, params.alpha, m)?;
    Ok(
        t.powf(-(params.n as f64) / (2.0 * m)) * big_h(params.alpha, r / t.sqrt())
            / d0.powf(1.0 / m),
    )
}

/// Radius `√(8t/(1-α))` of the support of `u-(·, t)`.
pub fn u_base_support(params: &GNParams, t: f64) -> Option<f64> {
    (params.regime == Regime::Minus).then(|| (8.0 * t / (1.0 - params.alpha)).sqrt())
}

/// Jet of a radial cutoff: `ξ² = (1 + a r² + (b_E/(n(n+2))) r⁴ + β1 t + (d/n) r² t + β2 t²) · P(r)`,
/// with `P ≡ 1` on `[0, r0/2]` and `P ≡ 0` beyond `r0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub a_scalar: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub b_e: f64,
    pub d_trace: f64,
    pub r0: f64,
}

impl CutoffSpec {
    pub fn zero(r0: f64) -> Self {
        CutoffSpec {
            a_scalar: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            b_e: 0.0,
            d_trace: 0.0,
            r0,
        }
    }

    /// The ℬ_p choice `a = 2(α+1)(n-1)K/(3χ)` on a space form of curvature `K`.
    pub fn bp_a_scalar(n: usize, alpha: f64, k: f64) -> Result<f64> {
        let chi = zeta_chi(n, alpha)?.chi;
        Ok(2.0 * (alpha + 1.0) * (n as f64 - 1.0) * k / (3.0 * chi))
    }

    /// Default plateau radius: `min(1, 0.4 r_max)`, capped at `0.7/√|a|` when `a < 0`.
    pub fn default_r0(a_scalar: f64, r_max: f64) -> f64 {
        let r0 = 1f64.min(0.4 * r_max);
        if a_scalar < 0.0 {
            r0.min(0.7 / (-a_scalar).sqrt())
        } else {
            r0
        }
    }
}

/// `ξ(·, t)` for a spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    n: usize,
    j0: f64,
    j1: f64,
    j2: f64,
    r0: f64,
}

fn step_f(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn step_df(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp() / (x * x)
    }
}

/// `P(r)` and `P'(r)`.
pub fn plateau(r0: f64, r: f64) -> (f64, f64) {
    let half = 0.5 * r0;
    if r <= half {
        return (1.0, 0.0);
    }
    if r >= r0 {
        return (0.0, 0.0);
    }
    let s = (r - half) / half;
    let (g, h) = (step_f(1.0 - s), step_f(s));
    let den = g + h;
    let dp = (-step_df(1.0 - s) * h - g * step_df(s)) / (den * den);
    (g / den, dp / half)
}

/// Build `ξ(·, t)`, checking that the jet polynomial is positive on `[0, r0]` and that `r0`
/// fits in the chart.
pub fn build_cutoff(spec: &CutoffSpec, t: f64, metric: &RadialMetric) -> Result<Cutoff> {
    if !(spec.r0 > 0.0) || spec.r0 > metric.r_max {
        return Err(domain(format!(
            "plateau radius {} must lie in (0, r_max = {}]",
            spec.r0, metric.r_max
        )));
    }
    let nf = metric.n as f64;
    let c = Cutoff {
        n: metric.n,
        j0: 1.0 + spec.beta1 * t + spec.beta2 * t * t,
        j1: spec.a_scalar + spec.d_trace * t / nf,
        j2: spec.b_e / (nf * (nf + 2.0)),
        r0: spec.r0,
    };
    // minimum of j0 + j1 s + j2 s² over s = r² ∈ [0, r0²]
    let smax = spec.r0 * spec.r0;
    let mut lo = c.j0.min(c.j0 + c.j1 * smax + c.j2 * smax * smax);
    if c.j2 > 0.0 {
        let s = -c.j1 / (2.0 * c.j2);
        if s > 0.0 && s < smax {
            lo = lo.min(c.j0 + c.j1 * s + c.j2 * s * s);
        }
    }
    if !(lo > 0.0) {
        return Err(Error::Positivity(format!(
            "cutoff jet reaches {lo:.3e} on [0, r0] at t = {t}"
        )));
    }
    Ok(c)
}

impl Cutoff {
    pub fn r0(&self) -> f64 {
        self.r0
    }

    fn jet(&self, r: f64) -> (f64, f64) {
        let s = r * r;
        (
            self.j0 + self.j1 * s + self.j2 * s * s,
            2.0 * r * (self.j1 + 2.0 * self.j2 * s),
        )
    }

    pub fn value(&self, r: f64) -> f64 {
        let (j, _) = self.jet(r);
        let (p, _) = plateau(self.r0, r);
        (j * p).sqrt()
    }

    pub fn deriv(&self, r: f64) -> f64 {
        let (j, dj) = self.jet(r);
        let (p, dp) = plateau(self.r0, r);
        let sq_p = p.sqrt();
        let d_sq_p = if p > 0.0 { dp / (2.0 * sq_p) } else { 0.0 };
        dj / (2.0 * j.sqrt()) * sq_p + j.sqrt() * d_sq_p
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Rescale a profile so the regime normalization (`∫u^{α+1} = 1` or `∫u^{2α} = 1`) holds.
pub fn normalize_exact(
    profile: &RadialProfile,
    metric: &RadialMetric,
    params: &GNParams,
) -> Result<RadialProfile> {
    let m = params.mass_exponent();
    let asm = Assembly::new(profile.radii(), metric, false)?;
    let mass = asm.power(profile.values(), m);
    if !(mass > 0.0) {
        return Err(Error::Normalization("zero mass".into()));
    }
    Ok(profile.scaled(mass.powf(-1.0 / m)))
}

/// P1 sample of `u±(·, t) ξ(·, t)` on `[0, r0]`, normalized exactly.
pub fn family_profile(
    params: &GNParams,
    spec: &CutoffSpec,
    t: f64,
    metric: &RadialMetric,
    nodes: usize,
) -> Result<RadialProfile> {
    let xi = build_cutoff(spec, t, metric)?;
    let end = u_base_support(params, t).map_or(spec.r0, |s| s.min(spec.r0));
    let grid = edge_clustered_grid(end, nodes);
    u_base(params, t, 0.0)?;
    let prof = RadialProfile::sample(
        |r| u_base(params, t, r).unwrap_or(0.0) * xi.value(r),
        grid,
        Boundary::CompactSupport,
    )?;
    normalize_exact(&prof, metric, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use crate::specfun::sphere_area;

    #[test]
    fn h_examples() {
        assert_eq!(h_extremal(0.5, 1.0, 2f64.sqrt()), 0.0);
        assert!((h_extremal(2.0, 1.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(h_extremal(0.5, 1.0, 0.0), 1.0);
        assert_eq!(extremal_support(0.5, 1.0), Some(2f64.sqrt()));
        let d = (big_h(1.4, 0.7 + 1e-6) - big_h(1.4, 0.7 - 1e-6)) / 2e-6;
        assert!((d - big_h_deriv(1.4, 0.7)).abs() < 1e-9);
    }

    #[test]
    fn u_base_is_normalized() {
        for (n, a, t) in [(3, 0.5, 0.01), (4, 0.8, 1.0), (3, 1.2, 0.05), (5, 1.3, 2.0)] {
            let p = GNParams::new(n, a).unwrap();
            let m = p.mass_exponent();
            let f =
                |r: f64| sphere_area(n) * r.powi(n as i32 - 1) * u_base(&p, t, r).unwrap().powf(m);
            let total = match u_base_support(&p, t) {
                Some(rs) => integrate(f, 0.0, rs, 1e-13, 0.0).unwrap().value,
                None => {
                    let s = t.sqrt();
                    let mut acc = 0.0;
                    let mut lo = 0.0;
                    let mut hi = s;
                    while lo < 1e7 * s {
                        acc += integrate(f, lo, hi, 1e-14, 0.0).unwrap().value;
                        lo = hi;
                        hi *= 2.0;
                    }
                    acc
                }
            };
            assert!((total - 1.0).abs() < 1e-10, "n={n} a={a}: {total}");
        }
        let p = GNParams::new(3, 0.5).unwrap();
        assert!((u_base_support(&p, 0.02).unwrap() - 0.32f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            u_base(&p, 0.02, 0.32f64.sqrt() * (1.0 + 1e-12)).unwrap(),
            0.0
        );
        assert!(u_base(&p, 0.02, 0.32f64.sqrt() * (1.0 - 1e-6)).unwrap() > 0.0);
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(1.0, 0.3), (1.0, 0.0));
        assert_eq!(plateau(1.0, 1.2), (0.0, 0.0));
        let (p, _) = plateau(1.0, 0.75);
        assert!((p - 0.5).abs() < 1e-15);
        for r in [0.55, 0.7, 0.9, 0.97] {
            let fd = (plateau(1.0, r + 1e-6).0 - plateau(1.0, r - 1e-6).0) / 2e-6;
            assert!((fd - plateau(1.0, r).1).abs() < 1e-7);
        }
    }

    #[test]
    fn cutoff_value_and_derivative() {
        let m = RadialMetric::space_form(3, 1.0, 2.0).unwrap();
        let spec = CutoffSpec {
            a_scalar: 0.3,
            beta1: -0.4,
            beta2: 0.1,
            b_e: 0.5,
            d_trace: 0.2,
            r0: 1.0,
        };
        let xi = build_cutoff(&spec, 0.05, &m).unwrap();
        let j: f64 =
            1.0 - 0.4 * 0.05 + 0.1 * 0.0025 + (0.3 + 0.2 * 0.05 / 3.0) * 0.16 + 0.5 / 15.0 * 0.0256;
        assert!((xi.value(0.4) - j.sqrt()).abs() < 1e-15);
        for r in [0.2, 0.6, 0.8, 0.95] {
            let fd = (xi.value(r + 1e-6) - xi.value(r - 1e-6)) / 2e-6;
            assert!((fd - xi.deriv(r)).abs() < 1e-7, "r={r}");
        }
        let bad = CutoffSpec {
            a_scalar: -2.0,
            ..CutoffSpec::zero(1.0)
        };
        assert!(matches!(
            build_cutoff(&bad, 0.01, &m),
            Err(Error::Positivity(_))
        ));
        let r0 = CutoffSpec::default_r0(-2.0, 3.0);
        assert!(build_cutoff(&CutoffSpec { r0, ..bad }, 0.01, &m).is_ok());
    }

    #[test]
    fn bp_a_scalar_example() {
        let chi = zeta_chi(3, 0.5).unwrap().chi;
        let a = CutoffSpec::bp_a_scalar(3, 0.5, 1.0).unwrap();
        assert!((a - 2.0 * 1.5 * 2.0 / (3.0 * chi)).abs() < 1e-15);
    }

    #[test]
    fn family_profile_is_normalized() {
        let p = GNParams::new(3, 0.6).unwrap();
        let m = RadialMetric::space_form(3, 1.0, 2.0).unwrap();
        let spec = CutoffSpec {
            a_scalar: 0.2,
            ..CutoffSpec::zero(1.0)
        };
        let prof = family_profile(&p, &spec, 0.01, &m, 400).unwrap();
        let asm = Assembly::new(prof.radii(), &m, false).unwrap();
        assert!((asm.power(prof.values(), 1.6) - 1.0).abs() < 1e-12);
    }
}
