//! Gamma and beta functions, the extended beta symbol, radial moment integrals and
//! spherical averages.
//!
//! Every moment identity has two routes: [`moment_closed`] (beta-function closed
//! form) and [`moment_quad`] (adaptive quadrature of the radial integrand). The
//! quadrature route never calls a beta function.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_endpoint_power, QuadResult};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// A(x) with Gamma(x) = sqrt(2 pi) t^{x-1/2} e^{-t} A(x), t = x + g - 1/2.
fn lanczos_sum(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Gamma function for real `x` (poles at non-positive integers return NaN).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        if x == x.floor() {
            return f64::NAN;
        }
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let t = x + LANCZOS_G - 0.5;
    (2.0 * PI).sqrt() * t.powf(x - 0.5) * (-t).exp() * lanczos_sum(x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let t = x + LANCZOS_G - 0.5;
    0.5 * (2.0 * PI).ln() + (x - 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

/// Euler beta `B(p, q) = Γ(p)Γ(q)/Γ(p+q)` for `p, q > 0`.
///
/// The three Lanczos factors are combined before exponentiation, so large
/// arguments do not overflow.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) || !p.is_finite() || !q.is_finite() {
        return Err(domain(format!("beta({p}, {q}) needs p > 0 and q > 0")));
    }
    Ok(beta_pos(p, q))
}

fn beta_pos(p: f64, q: f64) -> f64 {
    if p < 0.5 {
        return beta_pos(p + 1.0, q) * (p + q) / p;
    }
    if q < 0.5 {
        return beta_pos(p, q + 1.0) * (p + q) / q;
    }
    let tpq = p + q + LANCZOS_G - 0.5;
    let log_part = (p - 0.5) * (-q / tpq).ln_1p() + (q - 0.5) * (-p / tpq).ln_1p();
    (2.0 * PI).sqrt() * (0.5 - LANCZOS_G).exp() * lanczos_sum(p) * lanczos_sum(q)
        / lanczos_sum(p + q)
        * log_part.exp()
        / tpq.sqrt()
}

/// The extended beta symbol: `B(p, q)` for `q > 0`, `B(p, 1-p-q)` for `q < 0`.
///
/// The reflected branch encodes the heavy-tailed moments of the Plus regime.
pub fn script_beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(domain(format!("script_beta: p = {p} must be positive")));
    }
    if q > 0.0 {
        beta(p, q)
    } else if q < 0.0 {
        let r = 1.0 - p - q;
        if r <= 0.0 {
            return Err(domain(format!(
                "script_beta({p}, {q}): divergent moment, -p-q+1 = {r}"
            )));
        }
        beta(p, r)
    } else {
        Err(domain("script_beta: q = 0"))
    }
}

/// Area of the unit sphere S^{n-1}: `ω_{n-1} = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Volume of the unit ball in R^n, `ω_{n-1}/n`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

/// Exponents of the radial moment `∫_{R^n} |y|^{q1} (1+(α-1)|y|²/8)_+^{q2} dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub q1: f64,
    pub q2: f64,
}

impl MomentSpec {
    pub fn new(q1: f64, q2: f64) -> Self {
        MomentSpec { q1, q2 }
    }

    /// Convergence conditions for the given `(n, α)`.
    pub fn validate(&self, n: usize, alpha: f64) -> Result<()> {
        let nf = n as f64;
        if n < 1 || !(alpha > 0.0) || alpha == 1.0 {
            return Err(domain(format!(
                "moment needs n >= 1 and alpha > 0, alpha != 1 (got n={n}, alpha={alpha})"
            )));
        }
        if !(self.q1 > -nf) {
            return Err(domain(format!("q1 = {} must exceed -n = {}", self.q1, -nf)));
        }
        if alpha < 1.0 {
            if !(self.q2 > -1.0) {
                return Err(domain(format!(
                    "q2 = {} must exceed -1 for alpha < 1",
                    self.q2
                )));
            }
        } else if !(-self.q2 - (nf + self.q1) / 2.0 > 0.0) {
            return Err(domain(format!(
                "tail diverges for alpha > 1: -q2 - (n+q1)/2 = {}",
                -self.q2 - (nf + self.q1) / 2.0
            )));
        }
        Ok(())
    }
}

/// Closed form `(ω_{n-1}/2)(|α-1|/8)^{-(n+q1)/2} ℬ((n+q1)/2, q2+1)`.
///
/// For α > 1 the reflected beta `B((n+q1)/2, -q2-(n+q1)/2)` is used directly; it
/// coincides with the extended symbol whenever `q2 < -1`, and also covers the
/// convergent cells with `-1 <= q2`.
pub fn moment_closed(n: usize, alpha: f64, spec: MomentSpec) -> Result<f64> {
    spec.validate(n, alpha)?;
    let p = (n as f64 + spec.q1) / 2.0;
    let a = (alpha - 1.0).abs() / 8.0;
    let b = if alpha < 1.0 {
        beta(p, spec.q2 + 1.0)?
    } else {
        beta(p, -spec.q2 - p)?
    };
    Ok(sphere_area(n) / 2.0 * a.powf(-p) * b)
}

/// Outcome of [`moment_quad_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuad {
    pub value: f64,
    pub abs_err: f64,
    /// For α > 1: closed-form bound on the tail beyond the inner panel, relative to the total.
    pub tail_bound: Option<f64>,
}

/// Adaptive quadrature of `ω_{n-1} ∫_0^∞ r^{n-1+q1} (1+(α-1)r²/8)_+^{q2} dr` to relative `tol`.
pub fn moment_quad(n: usize, alpha: f64, spec: MomentSpec, tol: f64) -> Result<f64> {
    moment_quad_detailed(n, alpha, spec, tol).map(|m| m.value)
}

pub fn moment_quad_detailed(
    n: usize,
    alpha: f64,
    spec: MomentSpec,
    tol: f64,
) -> Result<MomentQuad> {
    spec.validate(n, alpha)?;
    if !(tol > 0.0) {
        return Err(domain("tol must be positive"));
    }
    let e = n as f64 - 1.0 + spec.q1;
    let q2 = spec.q2;
    let om = sphere_area(n);
    let sub_tol = tol / 4.0;
    if alpha < 1.0 {
        // support ball of radius R; w = 1 - r^2/R^2 = d(2R-d)/R^2 with d = R - r
        let big_r = (8.0 / (1.0 - alpha)).sqrt();
        let half = big_r / 2.0;
        let inner = integrate_endpoint_power(
            |r: f64| {
                let s = r / big_r;
                (1.0 - s * s).powf(q2)
            },
            half,
            e,
            sub_tol,
            0.0,
        )?;
        let outer = integrate_endpoint_power(
            |d: f64| (big_r - d).powf(e) * ((2.0 * big_r - d) / (big_r * big_r)).powf(q2),
            big_r - half,
            q2,
            sub_tol,
            0.0,
        )?;
        Ok(MomentQuad {
            value: om * (inner.value + outer.value),
            abs_err: om * (inner.abs_err + outer.abs_err),
            tail_bound: None,
        })
    } else {
        // inner panel [0, R0], tail r = R0/x with (1 + r^2/R0^2)^{q2} = x^{-2 q2} (1+x^2)^{q2}
        let r0 = (8.0 / (alpha - 1.0)).sqrt();
        let inner = integrate_endpoint_power(
            |r: f64| {
                let s = r / r0;
                (1.0 + s * s).powf(q2)
            },
            r0,
            e,
            sub_tol,
            0.0,
        )?;
        let tail_exp = -e - 2.0 - 2.0 * q2;
        let tail: QuadResult = integrate_endpoint_power(
            |x: f64| r0.powf(e + 1.0) * (1.0 + x * x).powf(q2),
            1.0,
            tail_exp,
            sub_tol,
            0.0,
        )?;
        let total = inner.value + tail.value;
        // (1+s^2)^{q2} <= s^{2 q2} on s >= 1, so tail <= R0^{e+1}/(tail_exp+1)
        let bound = r0.powf(e + 1.0) / (tail_exp + 1.0) / total;
        Ok(MomentQuad {
            value: om * total,
            abs_err: om * (inner.abs_err + tail.abs_err),
            tail_bound: Some(bound),
        })
    }
}

/// `∫_{S^{n-1}} A_ij z^i z^j dσ = (ω_{n-1}/n) tr A`.
pub fn sphere_avg2(n: usize, a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: a.nrows().max(a.ncols()),
        });
    }
    Ok(sphere_area(n) / n as f64 * a.trace())
}

/// Dense 4-index tensor with dimension `n` in each slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor4::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t.set(i, j, k, l, f(i, j, k, l));
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        let id = self.idx(i, j, k, l);
        self.data[id] = v;
    }

    /// Sum of squares of all components.
    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

/// `E(λ) = Σ_{i,j} (λ_iijj + λ_ijij + λ_ijji)`.
pub fn e_op(lam: &Tensor4) -> f64 {
    let n = lam.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += lam.get(i, i, j, j) + lam.get(i, j, i, j) + lam.get(i, j, j, i);
        }
    }
    s
}

/// `∫_{S^{n-1}} λ_ijkl z^i z^j z^k z^l dσ = ω_{n-1}/(n(n+2)) E(λ)`.
pub fn sphere_avg4(n: usize, lam: &Tensor4) -> Result<f64> {
    if lam.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: lam.dim(),
        });
    }
    Ok(sphere_area(n) / (n as f64 * (n as f64 + 2.0)) * e_op(lam))
}
