//! Closed-form constants and coefficient formulas as functions of `(n, α, regime)`.
//!
//! Two regimes: Minus (`0 < α < 1`, compactly supported extremals) and Plus
//! (`1 < α <= n/(n-2)`, polynomially decaying extremals). `m_frak` is the free positive
//! constant of the τ-functionals; none of the Euclidean constants depend on it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::CurvatureAtPole;
use crate::specfun::{beta, script_beta, sphere_area};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Minus,
    Plus,
}

impl Regime {
    pub fn of_alpha(alpha: f64) -> Result<Regime> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Regime::Minus)
        } else if alpha > 1.0 {
            Ok(Regime::Plus)
        } else {
            Err(domain(format!("alpha = {alpha} belongs to no regime")))
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Minus => "minus",
            Regime::Plus => "plus",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minus" | "-" => Ok(Regime::Minus),
            "plus" | "+" => Ok(Regime::Plus),
            _ => Err(Error::Config(format!(
                "regime must be minus or plus, got '{s}'"
            ))),
        }
    }
}

/// Problem parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GNParams {
    pub n: usize,
    pub alpha: f64,
    pub regime: Regime,
    pub m_frak: f64,
}

impl GNParams {
    /// Regime inferred from α, `m_frak = 1`.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        GNParams::with(n, alpha, Regime::of_alpha(alpha)?, 1.0)
    }

    pub fn with(n: usize, alpha: f64, regime: Regime, m_frak: f64) -> Result<Self> {
        if n < 3 {
            return Err(domain(format!("n = {n} must be at least 3")));
        }
        let sob = n as f64 / (n as f64 - 2.0);
        let ok = match regime {
            Regime::Minus => alpha > 0.0 && alpha < 1.0,
            Regime::Plus => alpha > 1.0 && alpha <= sob * (1.0 + 1e-15),
        };
        if !ok {
            return Err(domain(format!(
                "alpha = {alpha} is not in the {regime} regime for n = {n}"
            )));
        }
        if !(m_frak > 0.0) || !m_frak.is_finite() {
            return Err(domain("m_frak must be positive"));
        }
        Ok(GNParams {
            n,
            alpha,
            regime,
            m_frak,
        })
    }

    pub fn with_m_frak(self, m_frak: f64) -> Result<Self> {
        GNParams::with(self.n, self.alpha, self.regime, m_frak)
    }

    /// `2* = 2n/(n-2)`.
    pub fn critical(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }

    /// Exponent of the normalized mass: `α+1` (Minus), `2α` (Plus).
    pub fn mass_exponent(&self) -> f64 {
        match self.regime {
            Regime::Minus => self.alpha + 1.0,
            Regime::Plus => 2.0 * self.alpha,
        }
    }

    /// The other Lebesgue exponent: `2α` (Minus), `α+1` (Plus).
    pub fn other_exponent(&self) -> f64 {
        match self.regime {
            Regime::Minus => 2.0 * self.alpha,
            Regime::Plus => self.alpha + 1.0,
        }
    }

    /// α at the Sobolev endpoint `n/(n-2)`.
    pub fn is_sobolev_endpoint(&self) -> bool {
        self.regime == Regime::Plus
            && (self.alpha - self.n as f64 / (self.n as f64 - 2.0)).abs() < 1e-12
    }
}

/// Interpolation exponent (γ or θ) and τ-scale exponent (Γ_α or Θ_α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub interp: f64,
    pub scale: f64,
}

/// `γ = 2*(1-α)/((2*-2α)(α+1))`, evaluated formally for any α.
pub fn gamma_exponent(n: usize, alpha: f64) -> f64 {
    let s = 2.0 * n as f64 / (n as f64 - 2.0);
    s * (1.0 - alpha) / ((s - 2.0 * alpha) * (alpha + 1.0))
}

/// `θ = 2*(α-1)/(2α(2*-α-1))`, evaluated formally for any α.
pub fn theta_exponent(n: usize, alpha: f64) -> f64 {
    let s = 2.0 * n as f64 / (n as f64 - 2.0);
    s * (alpha - 1.0) / (2.0 * alpha * (s - alpha - 1.0))
}

pub fn exponents(p: &GNParams) -> ExponentSet {
    let nf = p.n as f64;
    let a = p.alpha;
    match p.regime {
        Regime::Minus => ExponentSet {
            interp: gamma_exponent(p.n, a),
            scale: nf / 2.0 * (1.0 - a) / (1.0 + a),
        },
        Regime::Plus => ExponentSet {
            interp: theta_exponent(p.n, a),
            scale: nf / 4.0 * (a - 1.0) / a,
        },
    }
}

/// Powers `(p, q)` of τ in `A τ^p + m B τ^{-q}`: `(Γ+1, Γ)` or `(1-2Θ, Θ)`.
pub fn tau_powers(p: &GNParams) -> (f64, f64) {
    let e = exponents(p);
    match p.regime {
        Regime::Minus => (e.scale + 1.0, e.scale),
        Regime::Plus => (1.0 - 2.0 * e.scale, e.scale),
    }
}

/// The Del Pino-Dolbeault expression (𝒩 for Minus, 𝒢 for Plus) as displayed, with
/// `ω_n` the volume of the unit ball.
///
/// It equals `Q^{-γ/2}` (resp. `Q^{-θ/2}`), where `Q` = [`sharp_constant`].
pub fn dd_constant(n: usize, alpha: f64, regime: Regime) -> Result<f64> {
    let p = GNParams::with(n, alpha, regime, 1.0)?;
    let nf = n as f64;
    let a = alpha;
    let omega = sphere_area(n) / nf;
    match p.regime {
        Regime::Minus => {
            let g = gamma_exponent(n, a);
            let r = (1.0 + a) / (1.0 - a);
            Ok(((1.0 - a) / 2.0).powf(g)
                * (2.0 / nf).powf(g / 2.0 + g / nf)
                * (r + nf / 2.0).powf(g / 2.0 - 1.0 / (a + 1.0))
                * r.powf(1.0 / (a + 1.0))
                / (omega * beta(r, nf / 2.0)?).powf(g / nf))
        }
        Regime::Plus => {
            let th = theta_exponent(n, a);
            let r = (a + 1.0) / (a - 1.0);
            let s = r - nf / 2.0;
            if s <= 0.0 {
                return Err(domain(format!("(α+1)/(α-1) - n/2 = {s} <= 0")));
            }
            Ok(((a - 1.0) / 2.0).powf(th)
                * (2.0 / nf).powf(th / 2.0 + th / nf)
                * s.powf(1.0 / (2.0 * a))
                * r.powf(th / 2.0 - 1.0 / (2.0 * a))
                / (omega * beta(s, nf / 2.0)?).powf(th / nf))
        }
    }
}

/// Euclidean value of the Gagliardo-Nirenberg quotient infimum, `𝔾±(R^n)`.
///
/// Computed from [`dd_constant`] as `display^{-2/γ}` (Minus) or `display^{-2/θ}` (Plus);
/// [`extremal_quotient`] gives the same number through the D0/A0 moments.
pub fn sharp_constant(n: usize, alpha: f64, regime: Regime) -> Result<f64> {
    let d = dd_constant(n, alpha, regime)?;
    let e = match regime {
        Regime::Minus => gamma_exponent(n, alpha),
        Regime::Plus => theta_exponent(n, alpha),
    };
    Ok(d.powf(-2.0 / e))
}

/// Quotient of `H(|x|)` on R^n assembled from the D0/A0 moments.
pub fn extremal_quotient(n: usize, alpha: f64, regime: Regime) -> Result<f64> {
    let p = GNParams::with(n, alpha, regime, 1.0)?;
    let e = exponents(&p).interp;
    let a = alpha;
    let a0 = lemma::a0(n, a)?;
    let d2a = lemma::d0(n, a, 2.0 * a)?;
    let da1 = lemma::d0(n, a, a + 1.0)?;
    Ok(match p.regime {
        Regime::Minus => a0 * d2a.powf((1.0 - e) / (e * a)) / da1.powf(2.0 / (e * (a + 1.0))),
        Regime::Plus => a0 * da1.powf(2.0 * (1.0 - e) / (e * (a + 1.0))) / d2a.powf(1.0 / (e * a)),
    })
}

/// Σ±_α.
pub fn sigma(p: &GNParams) -> Result<f64> {
    let q = sharp_constant(p.n, p.alpha, p.regime)?;
    let s = exponents(p).scale;
    match p.regime {
        Regime::Minus => {
            let w = s / (2.0 * s + 1.0);
            Ok((s / (s + 1.0)).powf(1.0 - w) * q.powf(w))
        }
        Regime::Plus => {
            if p.is_sobolev_endpoint() {
                return Err(Error::Degenerate(
                    "Σ+ is undefined at α = n/(n-2) (Θ = 1/2)".into(),
                ));
            }
            let w = s / (1.0 - s);
            Ok((s / (1.0 - 2.0 * s)).powf(1.0 - w) * q.powf(w))
        }
    }
}

/// `M± = m^{1-Γ/(2Γ+1)} Σ-` or `m^{1-Θ/(1-Θ)} Σ+`: the prefactor of every series coefficient.
pub fn prefactor_m(p: &GNParams) -> Result<f64> {
    let s = exponents(p).scale;
    let w = match p.regime {
        Regime::Minus => s / (2.0 * s + 1.0),
        Regime::Plus => s / (1.0 - s),
    };
    Ok(p.m_frak.powf(1.0 - w) * sigma(p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaChi {
    pub zeta1: f64,
    pub zeta2: f64,
    pub chi: f64,
}

/// `ζ1 = 8/(n(n(α-1)-4))`, `ζ2 = ζ1/(8(n(α-1)+2α-6))`, `χ = (n+6)α²-2(n+3)α+n+4`.
pub fn zeta_chi(n: usize, alpha: f64) -> Result<ZetaChi> {
    let nf = n as f64;
    let a = alpha;
    if a == 1.0 {
        return Err(Error::Pole {
            what: "zeta/chi (alpha = 1)",
            alpha: a,
        });
    }
    let d1 = nf * (a - 1.0) - 4.0;
    let d2 = nf * (a - 1.0) + 2.0 * a - 6.0;
    if d1.abs() < 1e-14 {
        return Err(Error::Pole {
            what: "zeta1",
            alpha: a,
        });
    }
    if d2.abs() < 1e-14 {
        return Err(Error::Pole {
            what: "zeta2",
            alpha: a,
        });
    }
    let zeta1 = 8.0 / (nf * d1);
    Ok(ZetaChi {
        zeta1,
        zeta2: zeta1 / (8.0 * d2),
        chi: (nf + 6.0) * a * a - 2.0 * (nf + 3.0) * a + nf + 4.0,
    })
}

/// Pole of ζ1 in α.
pub fn zeta1_pole(n: usize) -> f64 {
    (n as f64 + 4.0) / n as f64
}

/// Pole of ζ2 in α.
pub fn zeta2_pole(n: usize) -> f64 {
    (n as f64 + 6.0) / (n as f64 + 2.0)
}

/// Coefficients of the raw symbols in the assembled second-order term:
/// `c1 Sc` (order t), then `c2 tr(a²) + c3 E(v) + c4 E(a⊗a) + c5 E(a⊗Rc) + c6 β1 tr a + c7 β1² + c8 β1 Sc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
}

impl CCoefficients {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7, self.c8,
        ]
    }
}

pub fn c_coefficients(n: usize, alpha: f64) -> Result<CCoefficients> {
    let z = zeta_chi(n, alpha)?;
    let nf = n as f64;
    let a = alpha;
    let (z1, z2) = (z.zeta1, z.zeta2);
    Ok(CCoefficients {
        c1: z1,
        c2: 128.0 * (a + 1.0) * z2,
        c3: 640.0 * z2,
        c4: (96.0 * a * a - 160.0 * a + 16.0 * nf * (a - 1.0).powi(2)) * z2,
        c5: -(64.0 * (a + 1.0) / 3.0) * z2,
        c6: ((-(a - 1.0).powi(2) * nf - 2.0 * a * a + 6.0 * a) / 2.0) * z1,
        c7: ((nf - 2.0) * a * a - 2.0 * (nf + 1.0) * a + nf) / (4.0 * nf),
        c8: ((a + 1.0) / 3.0) * z1,
    })
}

/// Minimizer and minimum of `τ ↦ A τ^p + m B τ^{-q}` on `τ > 0`.
pub fn tau_star(a: f64, b: f64, p: f64, q: f64, m_frak: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Degenerate(format!(
            "tau_star needs A > 0 and B > 0 (A = {a}, B = {b})"
        )));
    }
    if !(p > 0.0) || !(q > 0.0) || !(m_frak > 0.0) {
        return Err(domain("tau_star needs p, q, m positive"));
    }
    let tau = (m_frak * q * b / (p * a)).powf(1.0 / (p + q));
    let inf = m_frak * (p + q) / p * (p * a * b.powf(p / q) / (m_frak * q)).powf(q / (p + q));
    Ok((tau, inf))
}

/// `τ±(t)/t` for the base family `u±(·, t)`: the τ-calculus minimizer with the leading
/// energy and mass coefficients of the normalized base profile.
pub fn tau_coefficient(p: &GNParams) -> Result<f64> {
    let (pp, qq) = tau_powers(p);
    if !(pp > 0.0) {
        return Err(Error::Degenerate(
            "τ power vanishes at the Sobolev endpoint".into(),
        ));
    }
    let (ms, mo) = (p.mass_exponent(), p.other_exponent());
    let dm = lemma::d0(p.n, p.alpha, ms)?;
    let energy = lemma::a0(p.n, p.alpha)? / dm.powf(2.0 / ms);
    let mass = lemma::d0(p.n, p.alpha, mo)? / dm.powf(mo / ms);
    Ok(tau_star(energy, mass, pp, qq, p.m_frak)?.0)
}

/// β1 solving `D1(m*) = 0`, `m* = α+1` (Minus) or `2α` (Plus).
pub fn beta1_constraint(p: &GNParams, tr_a: f64, sc: f64) -> Result<f64> {
    let m = p.mass_exponent();
    let lead = lemma::first_order_weight(p.n, p.alpha, m)?;
    // D1/D0 = (m/2) β1 + lead (m tr a / 2 - Sc/6)
    Ok(-lead * (m / 2.0 * tr_a - sc / 6.0) / (m / 2.0))
}

/// β2 solving `D2(m*) = 0` for the given jet (its `beta2` field is ignored).
pub fn beta2_constraint(p: &GNParams, jet: &lemma::Jet, curv: &CurvatureAtPole) -> Result<f64> {
    let m = p.mass_exponent();
    let mut j = *jet;
    j.beta2 = 0.0;
    let (_, rest) = lemma::d_ratios(p.n, p.alpha, m, &j, curv)?;
    Ok(-rest / (m / 2.0))
}

/// Closed form of β1 for the isotropic ℬ_p cutoff `a = 2(α+1)Rc/(3χ)`, per unit `Sc`.
///
/// Minus: `-8((n+4)α²-2(n+5)α+n+2) / (3(α+1)(n(α-1)-4)χ)`;
/// Plus: `-4((n+2)α²-2(n+5)α+n+4) / (3α((n-2)α-n-2)χ)`.
pub fn beta1_bp_closed(p: &GNParams) -> Result<f64> {
    let nf = p.n as f64;
    let a = p.alpha;
    let chi = zeta_chi(p.n, a)?.chi;
    Ok(match p.regime {
        Regime::Minus => {
            -8.0 * ((nf + 4.0) * a * a - 2.0 * (nf + 5.0) * a + nf + 2.0)
                / (3.0 * (a + 1.0) * (nf * (a - 1.0) - 4.0) * chi)
        }
        Regime::Plus => {
            -4.0 * ((nf + 2.0) * a * a - 2.0 * (nf + 5.0) * a + nf + 4.0)
                / (3.0 * a * ((nf - 2.0) * a - nf - 2.0) * chi)
        }
    })
}

/// `tr a / Sc` for the ℬ_p cutoff.
pub fn bp_trace_per_sc(n: usize, alpha: f64) -> Result<f64> {
    Ok(2.0 * (alpha + 1.0) / (3.0 * zeta_chi(n, alpha)?.chi))
}

/// `II = χ|a - 2(α+1)Rc/(3χ)|² + (4((n+5)α-n-3)(α-1)/(9χ))|Rc|² - |Rm|²/6` for isotropic `a = a_s I`.
pub fn ii_term(n: usize, alpha: f64, a_scalar: f64, curv: &CurvatureAtPole) -> Result<f64> {
    let nf = n as f64;
    let z = zeta_chi(n, alpha)?;
    let rho = curv.rc_isotropic()?;
    let dev = a_scalar - 2.0 * (alpha + 1.0) * rho / (3.0 * z.chi);
    Ok(
        z.chi * nf * dev * dev + ricci_weight(n, alpha)? * curv.rc_norm2()?
            - curv.rm_norm2()? / 6.0,
    )
}

/// `4((n+5)α-n-3)(α-1)/(9χ)`, the |Rc|² weight left in II after the ℬ_p choice.
pub fn ricci_weight(n: usize, alpha: f64) -> Result<f64> {
    let nf = n as f64;
    let chi = zeta_chi(n, alpha)?.chi;
    Ok(4.0 * ((nf + 5.0) * alpha - nf - 3.0) * (alpha - 1.0) / (9.0 * chi))
}

/// `III = (c3/72)Sc² + c4 (tr a)² + c5 tr a Sc + c6 β1 tr a + c7 β1² + c8 β1 Sc`.
pub fn iii_term(n: usize, alpha: f64, tr_a: f64, beta1: f64, sc: f64) -> Result<f64> {
    let c = c_coefficients(n, alpha)?;
    Ok(c.c3 / 72.0 * sc * sc
        + c.c4 * tr_a * tr_a
        + c.c5 * tr_a * sc
        + c.c6 * beta1 * tr_a
        + c.c7 * beta1 * beta1
        + c.c8 * beta1 * sc)
}

/// Net `Sc²` coefficient j±(α,n) of the W-series for the ℬ_p cutoff:
/// `III - (32ζ2/3)Sc² + 64ζ2 tr(a) Sc - ζ1 β1 Sc`, divided by `Sc²`.
pub fn j_coefficient(p: &GNParams) -> Result<f64> {
    let z = zeta_chi(p.n, p.alpha)?;
    let tr_a = bp_trace_per_sc(p.n, p.alpha)?;
    let b1 = beta1_bp_closed(p)?;
    let iii = iii_term(p.n, p.alpha, tr_a, b1, 1.0)?;
    Ok(iii - 32.0 * z.zeta2 / 3.0 + 64.0 * z.zeta2 * tr_a - z.zeta1 * b1)
}

/// Predicted `(c1, c2)` of the L-series for an isotropic cutoff jet `a_s I` with β1 from the
/// constraint, on a metric with isotropic Ricci at the pole.
pub fn l_series_prediction(
    p: &GNParams,
    a_scalar: f64,
    curv: &CurvatureAtPole,
) -> Result<(f64, f64)> {
    let mm = prefactor_m(p)?;
    let z = zeta_chi(p.n, p.alpha)?;
    let tr_a = p.n as f64 * a_scalar;
    let b1 = beta1_constraint(p, tr_a, curv.sc)?;
    let ii = ii_term(p.n, p.alpha, a_scalar, curv)?;
    let iii = iii_term(p.n, p.alpha, tr_a, b1, curv.sc)?;
    Ok((
        mm * z.zeta1 * curv.sc,
        mm * (-32.0 * z.zeta2 * curv.lap_sc()? + 32.0 * z.zeta2 * ii + iii),
    ))
}

/// Predicted `(c1, c2)` of the W-series (ℬ_p cutoff): `c1 = 0`,
/// `c2 = M(32ζ2(ricci_weight |Rc|² - |Rm|²/6) + j Sc²)`.
pub fn w_series_prediction(p: &GNParams, curv: &CurvatureAtPole) -> Result<(f64, f64)> {
    let mm = prefactor_m(p)?;
    let z = zeta_chi(p.n, p.alpha)?;
    let j = j_coefficient(p)?;
    let w = ricci_weight(p.n, p.alpha)?;
    Ok((
        0.0,
        mm * (32.0 * z.zeta2 * (w * curv.rc_norm2()? - curv.rm_norm2()? / 6.0)
            + j * curv.sc * curv.sc),
    ))
}

/// Verify, for `3 <= n <= n_max`, that the ζ1 pole lies strictly inside no admissible
/// α-range and the ζ2 pole inside none of the second-order ranges (A2, A3, B2, B3).
///
/// B1 only involves the first-order coefficient; for n = 5 it does contain the ζ2 pole.
pub fn check_poles(n_max: usize) -> Result<()> {
    use crate::ranges::{admissible_range, RangeCase};
    for n in 3..=n_max {
        for case in RangeCase::ALL {
            let r = admissible_range(n, case)?;
            let second_order = !matches!(case, RangeCase::A1 | RangeCase::B1);
            for (what, pole, applies) in [
                ("zeta1", zeta1_pole(n), true),
                ("zeta2", zeta2_pole(n), second_order),
            ] {
                if applies && r.contains(pole) && pole != r.lo && pole != r.hi {
                    return Err(Error::Pole { what, alpha: pole });
                }
            }
        }
    }
    Ok(())
}

/// Lemma-level closed forms: the D- and A-series of `∫(Hξ)^m` and `∫|∇(Hξ)|²` and the
/// Sc-weighted series, in terms of jet and curvature invariants at the pole.
pub mod lemma {
    use super::*;

    /// Invariants of the cutoff jet that enter the series.
    #[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
    pub struct Jet {
        pub tr_a: f64,
        pub tr_a2: f64,
        /// `E(a⊗a) = (tr a)² + 2 tr(a²)`.
        pub e_aa: f64,
        /// `E(a⊗Rc) = tr(a) Sc + 2⟨a, Rc⟩`.
        pub e_arc: f64,
        /// `E(b)` of the quartic jet.
        pub e_b: f64,
        pub tr_d: f64,
        pub beta1: f64,
        pub beta2: f64,
    }

    impl Jet {
        /// Jet of an isotropic cutoff `a = a_s I`, `d = (d_trace/n) I`.
        pub fn isotropic(
            n: usize,
            a_scalar: f64,
            sc: f64,
            e_b: f64,
            d_trace: f64,
            beta1: f64,
            beta2: f64,
        ) -> Jet {
            let nf = n as f64;
            let tr_a = nf * a_scalar;
            let tr_a2 = nf * a_scalar * a_scalar;
            Jet {
                tr_a,
                tr_a2,
                e_aa: tr_a * tr_a + 2.0 * tr_a2,
                e_arc: (nf + 2.0) * a_scalar * sc,
                e_b,
                tr_d: d_trace,
                beta1,
                beta2,
            }
        }
    }

    fn big_a(alpha: f64) -> f64 {
        (alpha - 1.0).abs() / 8.0
    }

    /// `m/(1-α) + 1`, the second argument of the mass moments.
    fn mass_q(alpha: f64, m: f64) -> f64 {
        m / (1.0 - alpha) + 1.0
    }

    /// Existence of the order-`order` D-series: for α > 1, `m/(α-1) - n/2 - order > 0`.
    pub fn d_condition(n: usize, alpha: f64, m: f64, order: usize) -> Result<()> {
        if alpha > 1.0 {
            let v = m / (alpha - 1.0) - n as f64 / 2.0 - order as f64;
            if !(v > 0.0) {
                return Err(Error::Range(format!(
                    "D-series of order {order} needs m/(α-1) - n/2 - {order} > 0 (got {v:.4}) at n={n}, α={alpha}, m={m}"
                )));
            }
        }
        Ok(())
    }

    /// Existence of the order-`order` A-series: for α > 1, `2α/(α-1) - n/2 - 1 - order > 0`.
    pub fn a_condition(n: usize, alpha: f64, order: usize) -> Result<()> {
        if alpha > 1.0 {
            let v = 2.0 * alpha / (alpha - 1.0) - n as f64 / 2.0 - 1.0 - order as f64;
            if !(v > 0.0) {
                return Err(Error::Range(format!(
                    "A-series of order {order} needs 2α/(α-1) - n/2 - {} > 0 (got {v:.4}) at n={n}, α={alpha}",
                    1 + order
                )));
            }
        }
        Ok(())
    }

    /// `D0(m) = (ω_{n-1}/2) A^{-n/2} ℬ(n/2, m/(1-α)+1)`, `A = |α-1|/8`.
    pub fn d0(n: usize, alpha: f64, m: f64) -> Result<f64> {
        let h = n as f64 / 2.0;
        Ok(sphere_area(n) / 2.0 * big_a(alpha).powf(-h) * script_beta(h, mass_q(alpha, m))?)
    }

    /// `R_k(m) = ℬ(n/2+k, q)/ℬ(n/2, q)`.
    fn mass_ratio(n: usize, alpha: f64, m: f64, k: f64) -> Result<f64> {
        let h = n as f64 / 2.0;
        let q = mass_q(alpha, m);
        Ok(script_beta(h + k, q)? / script_beta(h, q)?)
    }

    /// `A^{-1} R_1(m)/n`, the weight of `tr a` and `Sc` in `D1/D0`.
    pub fn first_order_weight(n: usize, alpha: f64, m: f64) -> Result<f64> {
        Ok(mass_ratio(n, alpha, m, 1.0)? / (n as f64 * big_a(alpha)))
    }

    /// `(D1/D0, D2/D0)` for exponent `m`. `D2` needs `E(v)` and uses `ΔSc` through it.
    pub fn d_ratios(
        n: usize,
        alpha: f64,
        m: f64,
        jet: &Jet,
        curv: &CurvatureAtPole,
    ) -> Result<(f64, f64)> {
        let nf = n as f64;
        let a = big_a(alpha);
        let r1 = mass_ratio(n, alpha, m, 1.0)?;
        let r2 = mass_ratio(n, alpha, m, 2.0)?;
        let sc = curv.sc;
        let d1 =
            m / 2.0 * jet.beta1 + m / (2.0 * nf) / a * r1 * jet.tr_a - r1 * sc / (6.0 * nf * a);
        let ev = crate::geometry::e_v(curv)?;
        let d2 = r2 / (nf * (nf + 2.0) * a * a)
            * (m / 2.0 * jet.e_b + m * (m - 2.0) / 8.0 * jet.e_aa + ev - m / 12.0 * jet.e_arc)
            + r1 / (nf * a)
                * (m / 2.0 * jet.tr_d + m * (m - 2.0) / 4.0 * jet.beta1 * jet.tr_a
                    - m / 12.0 * jet.beta1 * sc)
            + (m / 2.0 * jet.beta2 + m * (m - 2.0) / 8.0 * jet.beta1 * jet.beta1);
        Ok((d1, d2))
    }

    /// `D1/D0` only (needs no fourth-order curvature).
    pub fn d1_ratio(n: usize, alpha: f64, m: f64, jet: &Jet, sc: f64) -> Result<f64> {
        let nf = n as f64;
        let a = big_a(alpha);
        let r1 = mass_ratio(n, alpha, m, 1.0)?;
        Ok(m / 2.0 * jet.beta1 + m / (2.0 * nf) / a * r1 * jet.tr_a - r1 * sc / (6.0 * nf * a))
    }

    /// `A0 = (ω_{n-1}/32) A^{-(n+2)/2} ℬ(n/2+1, 2α/(1-α)+1)`.
    pub fn a0(n: usize, alpha: f64) -> Result<f64> {
        let h = n as f64 / 2.0;
        Ok(sphere_area(n) / 32.0
            * big_a(alpha).powf(-(h + 1.0))
            * script_beta(h + 1.0, mass_q(alpha, 2.0 * alpha))?)
    }

    /// `(A1/A0, A2/A0)`.
    pub fn a_ratios(n: usize, alpha: f64, jet: &Jet, curv: &CurvatureAtPole) -> Result<(f64, f64)> {
        let nf = n as f64;
        let h = nf / 2.0;
        let a = big_a(alpha);
        let q = mass_q(alpha, 2.0 * alpha);
        let base = script_beta(h + 1.0, q)?;
        let b = |p: f64, qq: f64| -> Result<f64> { Ok(script_beta(p, qq)? / base) };
        let sc = curv.sc;
        let ev = crate::geometry::e_v(curv)?;
        let a1 = b(h + 2.0, q)? / (nf * a) * (jet.tr_a - sc / 6.0)
            - 8.0 / nf * b(h + 1.0, q + 1.0)? * jet.tr_a
            + jet.beta1;
        let a2 = b(h + 3.0, q)? / (nf * (nf + 2.0) * a * a) * (jet.e_b + ev - jet.e_arc / 6.0)
            + b(h + 2.0, q)? / (nf * a) * (jet.tr_d - jet.beta1 * sc / 6.0)
            + jet.beta2
            + 16.0 / nf * b(h + 1.0, 2.0 / (1.0 - alpha) + 1.0)? * jet.tr_a2
            - 8.0 / nf * b(h + 1.0, q + 1.0)? * jet.tr_d
            + b(h + 2.0, q + 1.0)? / (nf * (nf + 2.0) * a)
                * (-16.0 * jet.e_b + 4.0 / 3.0 * jet.e_arc);
        Ok((a1, a2))
    }

    /// `A1/A0` only.
    pub fn a1_ratio(n: usize, alpha: f64, jet: &Jet, sc: f64) -> Result<f64> {
        let nf = n as f64;
        let h = nf / 2.0;
        let a = big_a(alpha);
        let q = mass_q(alpha, 2.0 * alpha);
        let base = script_beta(h + 1.0, q)?;
        Ok(
            script_beta(h + 2.0, q)? / base / (nf * a) * (jet.tr_a - sc / 6.0)
                - 8.0 / nf * script_beta(h + 1.0, q + 1.0)? / base * jet.tr_a
                + jet.beta1,
        )
    }

    /// Coefficients `(s1, s2)` of `t^{1-n/2}∫Sc (Hξ)² = D0(2)(s1 t + s2 t² + o(t²))`.
    pub fn sc_series(
        n: usize,
        alpha: f64,
        jet: &Jet,
        curv: &CurvatureAtPole,
    ) -> Result<(f64, f64)> {
        let nf = n as f64;
        let w = mass_ratio(n, alpha, 2.0, 1.0)? / (nf * big_a(alpha));
        let sc = curv.sc;
        let s2 = w * (0.5 * curv.lap_sc()? - sc * sc / 6.0 + jet.tr_a * sc) + jet.beta1 * sc;
        Ok((sc, s2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    use std::f64::consts::PI;

    #[test]
    fn exponent_examples() {
        let e = exponents(&GNParams::new(4, 0.5).unwrap());
        assert!((e.interp - 4.0 / 9.0).abs() < 1e-15);
        let e = exponents(&GNParams::new(4, 2.0).unwrap());
        assert!((e.interp - 1.0).abs() < 1e-15);
        assert!((e.scale - 0.5).abs() < 1e-15);
        let e = exponents(&GNParams::new(6, 0.5).unwrap());
        assert!((e.scale - 1.0).abs() < 1e-15);
        assert!(GNParams::new(4, 2.1).is_err());
        assert!(GNParams::with(4, 0.5, Regime::Plus, 1.0).is_err());
    }

    #[test]
    fn exponent_duality() {
        for n in 3..10 {
            for a in [0.2, 0.7, 1.2, 1.3] {
                let s = 1.0 / gamma_exponent(n, a) + 1.0 / theta_exponent(n, a);
                assert!((s - 1.0).abs() < 1e-12, "n={n} a={a} s={s}");
            }
        }
    }

    #[test]
    fn sharp_constant_two_routes() {
        for (n, a) in [
            (3, 0.5),
            (4, 0.3),
            (5, 0.9),
            (3, 1.2),
            (4, 2.0),
            (5, 1.25),
            (7, 1.1),
        ] {
            let r = Regime::of_alpha(a).unwrap();
            let s = sharp_constant(n, a, r).unwrap();
            let q = extremal_quotient(n, a, r).unwrap();
            assert!(rel(s, q) < 1e-12, "n={n} a={a}: {s} vs {q}");
        }
        // sharp Sobolev constant of R^4: S = n(n-2)/4 |S^n|^{2/n} = 2 (8π²/3)^{1/2}
        let s4 = 2.0 * (8.0 * PI * PI / 3.0_f64).sqrt();
        assert!(rel(sharp_constant(4, 2.0, Regime::Plus).unwrap(), s4) < 1e-12);
        assert!((sharp_constant(4, 2.0, Regime::Plus).unwrap() - 10.260_398_64).abs() < 1e-8);
    }

    #[test]
    fn displayed_constant_is_power_of_quotient() {
        let q = sharp_constant(3, 0.5, Regime::Minus).unwrap();
        let g = gamma_exponent(3, 0.5);
        let d = dd_constant(3, 0.5, Regime::Minus).unwrap();
        assert!(rel(d, q.powf(-g / 2.0)) < 1e-13);
        assert!((d - 0.5492).abs() < 1e-4);
    }

    #[test]
    fn zeta_chi_examples() {
        let z = zeta_chi(3, 0.5).unwrap();
        assert!((z.zeta1 + 16.0 / 33.0).abs() < 1e-15);
        assert!((z.chi - 3.25).abs() < 1e-15);
        for n in 3..9 {
            let z = zeta_chi(n, 1.0 - 1e-9).unwrap();
            assert!((z.zeta1 + 2.0 / n as f64).abs() < 1e-7);
            assert!((z.zeta2 - 1.0 / (16.0 * n as f64)).abs() < 1e-7);
            assert!((z.chi - 4.0).abs() < 1e-7);
        }
        assert!(zeta_chi(4, 2.0).is_err());
        assert!(zeta_chi(3, 1.0).is_err());
        assert!(matches!(
            zeta_chi(4, 10.0 / 6.0),
            Err(Error::Pole { what: "zeta2", .. })
        ));
    }

    #[test]
    fn c1_is_zeta1_and_c7_free_of_zetas() {
        let c = c_coefficients(5, 0.4).unwrap();
        assert_eq!(c.c1, zeta_chi(5, 0.4).unwrap().zeta1);
        assert!((c.c7 - (3.0 * 0.16 - 12.0 * 0.4 + 5.0) / 20.0).abs() < 1e-15);
    }

    #[test]
    fn tau_star_examples() {
        let (t, v) = tau_star(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((t - 1.0).abs() < 1e-15 && (v - 2.0).abs() < 1e-15);
        let (t, v) = tau_star(2.0, 8.0, 1.0, 1.0, 1.0).unwrap();
        assert!((t - 2.0).abs() < 1e-15 && (v - 8.0).abs() < 1e-14);
        assert!(tau_star(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        let (t, v) = tau_star(1.3, 0.4, 1.7, 0.6, 2.0).unwrap();
        let f = |s: f64| 1.3 * s.powf(1.7) + 2.0 * 0.4 * s.powf(-0.6);
        assert!((f(t) - v).abs() < 1e-13);
    }

    #[test]
    fn beta1_basics() {
        let p = GNParams::new(4, 0.6).unwrap();
        assert_eq!(beta1_constraint(&p, 0.0, 0.0).unwrap(), 0.0);
        for (n, a) in [(3, 0.5), (5, 0.8), (4, 1.2), (7, 1.3)] {
            let p = GNParams::new(n, a).unwrap();
            let sc = 2.5;
            let tr = bp_trace_per_sc(n, a).unwrap() * sc;
            let b = beta1_constraint(&p, tr, sc).unwrap();
            assert!(
                rel(b, beta1_bp_closed(&p).unwrap() * sc) < 1e-12,
                "n={n} a={a}"
            );
        }
        for n in 3..8 {
            for a in [1.0 - 1e-7, 1.0 + 1e-7] {
                let p = GNParams::new(n, a).unwrap();
                assert!((beta1_bp_closed(&p).unwrap() + 1.0 / 3.0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn bp_beta1_rejects_alternate_denominator() {
        // the variant with ((n-2)α - n - 2) in the denominator does not solve D1(α+1) = 0
        let (n, a) = (3usize, 0.5f64);
        let nf = n as f64;
        let p = GNParams::new(n, a).unwrap();
        let chi = zeta_chi(n, a).unwrap().chi;
        let alt = -8.0 * ((nf + 4.0) * a * a - 2.0 * (nf + 5.0) * a + nf + 2.0)
            / (3.0 * (a + 1.0) * ((nf - 2.0) * a - nf - 2.0) * chi);
        let solved = beta1_constraint(&p, bp_trace_per_sc(n, a).unwrap(), 1.0).unwrap();
        assert!(rel(alt, solved) > 0.1);
        assert!(rel(beta1_bp_closed(&p).unwrap(), solved) < 1e-13);
    }

    #[test]
    fn j_limits() {
        for n in 3..=8 {
            let mut prev = [f64::INFINITY; 2];
            for e in [0.1, 0.05, 0.01, 0.001] {
                for (slot, a) in [1.0 - e, 1.0 + e].into_iter().enumerate() {
                    let j = j_coefficient(&GNParams::new(n, a).unwrap()).unwrap().abs();
                    assert!(j < prev[slot], "n={n} a={a}");
                    prev[slot] = j;
                }
            }
            for a in [1.0 - 1e-6, 1.0 + 1e-6] {
                assert!(j_coefficient(&GNParams::new(n, a).unwrap()).unwrap().abs() < 1e-4);
            }
        }
    }

    #[test]
    fn sigma_degenerate_at_sobolev_endpoint() {
        assert!(sigma(&GNParams::new(4, 2.0).unwrap()).is_err());
        assert!(sigma(&GNParams::new(4, 1.5).unwrap()).unwrap() > 0.0);
        assert!(sharp_constant(4, 2.0, Regime::Plus).is_ok());
    }

    #[test]
    fn poles_outside_admissible_ranges() {
        check_poles(64).unwrap();
        let b1 = crate::ranges::admissible_range(5, crate::ranges::RangeCase::B1).unwrap();
        assert!(b1.contains(zeta2_pole(5)));
    }

    #[test]
    fn tau_coefficient_matches_display() {
        for (n, a) in [(3, 0.5), (4, 0.8), (3, 1.1), (5, 1.3)] {
            for m in [0.5, 1.0, 2.0] {
                let p = GNParams::new(n, a).unwrap().with_m_frak(m).unwrap();
                let g = exponents(&p).scale;
                let d = |x| lemma::d0(n, a, x).unwrap();
                let a0 = lemma::a0(n, a).unwrap();
                let expect = match p.regime {
                    Regime::Minus => (m * g / (1.0 + g) * d(2.0 * a)
                        / d(a + 1.0).powf(2.0 * a / (a + 1.0))
                        / (a0 / d(a + 1.0).powf(2.0 / (a + 1.0))))
                    .powf(1.0 / (1.0 + 2.0 * g)),
                    Regime::Plus => (m * g / (1.0 - 2.0 * g) * d(a + 1.0)
                        / d(2.0 * a).powf((a + 1.0) / (2.0 * a))
                        / (a0 / d(2.0 * a).powf(1.0 / a)))
                    .powf(1.0 / (1.0 - g)),
                };
                assert!(rel(tau_coefficient(&p).unwrap(), expect) < 1e-13);
            }
        }
    }

    #[test]
    fn ii_matches_raw_symbol_regrouping() {
        // 32ζ2 II = c2|a|² + 2c4|a|² + 2c5⟨a,Rc⟩ + c3(8|Rc|² - 3|Rm|²)/360 for a = a_s I, Rc = ρ I
        for (n, a, k, a_s) in [(3, 0.5, 1.0, 0.3), (4, 0.8, -1.0, -0.2), (5, 1.2, 0.5, 0.1)] {
            let curv = CurvatureAtPole::space_form(n, k);
            let c = c_coefficients(n, a).unwrap();
            let z = zeta_chi(n, a).unwrap();
            let nf = n as f64;
            let rho = curv.rc_isotropic.unwrap();
            let lhs = 32.0 * z.zeta2 * ii_term(n, a, a_s, &curv).unwrap();
            let rhs = (c.c2 + 2.0 * c.c4) * nf * a_s * a_s
                + 2.0 * c.c5 * nf * a_s * rho
                + c.c3 * (8.0 * curv.rc_norm2.unwrap() - 3.0 * curv.rm_norm2.unwrap()) / 360.0;
            assert!(
                (lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()),
                "{lhs} vs {rhs}"
            );
        }
    }
}
