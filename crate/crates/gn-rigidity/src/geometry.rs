//! Rotationally symmetric model manifolds and the curvature identities used by the expansions.
//!
//! Space forms are written in geodesic polar coordinates, so `r` is the distance to the pole
//! and the volume density is `(sn_K(r)/r)^{n-1}`. Conformally flat radial metrics
//! `g = u^{4/(n-2)} δ` are written in the flat coordinate `r`; they carry scalar curvature only.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::GaussLegendre;
use crate::specfun::{sphere_area, Tensor4};

/// Fraction of the injectivity radius `π/√K` that positively curved charts may use.
pub const SPHERE_CHART_FRACTION: f64 = 0.9;

/// A radial conformal factor `u(r) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConformalFactor {
    /// `u = 1 + m/(2 r^{n-2})`, harmonic on `R^n \ {0}`.
    Schwarzschild { m: f64 },
    /// Natural cubic spline through a sampled table.
    Table(CubicSpline),
}

impl ConformalFactor {
    pub fn value(&self, n: usize, r: f64) -> f64 {
        match self {
            ConformalFactor::Schwarzschild { m } => 1.0 + m / (2.0 * r.powi(n as i32 - 2)),
            ConformalFactor::Table(s) => s.value(r),
        }
    }

    /// `u'(r)` (analytic for built-ins, spline derivative for tables).
    pub fn derivative(&self, n: usize, r: f64) -> f64 {
        match self {
            ConformalFactor::Schwarzschild { m } => {
                -(n as f64 - 2.0) * m / (2.0 * r.powi(n as i32 - 1))
            }
            ConformalFactor::Table(s) => s.derivative(r),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ConformalFactor::Schwarzschild { m } => format!("schwarzschild:m={m}"),
            ConformalFactor::Table(s) => format!("table[{} nodes]", s.x.len()),
        }
    }
}

/// Geometry of a [`RadialMetric`].
#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Euclidean,
    SpaceForm { k: f64 },
    ConformalRadial { factor: ConformalFactor, r_min: f64 },
}

/// A rotationally symmetric Riemannian manifold on the chart `r_min <= r <= r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMetric {
    pub n: usize,
    pub kind: MetricKind,
    pub r_max: f64,
}

impl RadialMetric {
    pub fn euclidean(n: usize, r_max: f64) -> Result<Self> {
        check_dim(n)?;
        if !(r_max > 0.0) {
            return Err(domain("r_max must be positive"));
        }
        Ok(RadialMetric {
            n,
            kind: MetricKind::Euclidean,
            r_max,
        })
    }

    /// Space form of sectional curvature `k`; for `k > 0` the chart is capped at
    /// `SPHERE_CHART_FRACTION · π/√k`.
    pub fn space_form(n: usize, k: f64, r_max: f64) -> Result<Self> {
        check_dim(n)?;
        if !(r_max > 0.0) || !k.is_finite() {
            return Err(domain("space form needs finite K and r_max > 0"));
        }
        if k > 0.0 {
            let cap = SPHERE_CHART_FRACTION * PI / k.sqrt();
            if r_max > cap + 1e-12 {
                return Err(Error::OutOfChart {
                    r: r_max,
                    r_max: cap,
                });
            }
        }
        let kind = if k == 0.0 {
            MetricKind::Euclidean
        } else {
            MetricKind::SpaceForm { k }
        };
        Ok(RadialMetric { n, kind, r_max })
    }

    /// Largest admissible chart for a space form (`0.9 π/√K` when `K > 0`, else `fallback`).
    pub fn space_form_max_chart(k: f64, fallback: f64) -> f64 {
        if k > 0.0 {
            SPHERE_CHART_FRACTION * PI / k.sqrt()
        } else {
            fallback
        }
    }

    pub fn conformal(n: usize, factor: ConformalFactor, r_min: f64, r_max: f64) -> Result<Self> {
        check_dim(n)?;
        if !(r_max > r_min) || r_min < 0.0 {
            return Err(domain(format!(
                "conformal chart needs 0 <= r_min < r_max (got {r_min}, {r_max})"
            )));
        }
        if let ConformalFactor::Schwarzschild { m } = factor {
            if !(m > 0.0) {
                return Err(domain("Schwarzschild mass must be positive"));
            }
        }
        Ok(RadialMetric {
            n,
            kind: MetricKind::ConformalRadial { factor, r_min },
            r_max,
        })
    }

    /// Exterior Schwarzschild chart `m/2 < r <= r_max`.
    pub fn schwarzschild(n: usize, m: f64, r_max: f64) -> Result<Self> {
        RadialMetric::conformal(n, ConformalFactor::Schwarzschild { m }, m / 2.0, r_max)
    }

    /// Parse `euclidean`, `spaceform:K=<v>`, `conformal:schwarzschild:m=<v>` or `conformal:<csv file>`.
    pub fn parse(spec: &str, n: usize, r_max: Option<f64>) -> Result<Self> {
        let s = spec.trim();
        if s.eq_ignore_ascii_case("euclidean") {
            return RadialMetric::euclidean(n, r_max.unwrap_or(10.0));
        }
        if let Some(rest) = s.strip_prefix("spaceform:") {
            let k = parse_kv(rest, "K")?;
            let r = r_max.unwrap_or_else(|| RadialMetric::space_form_max_chart(k, 3.0));
            return RadialMetric::space_form(n, k, r);
        }
        if let Some(rest) = s.strip_prefix("conformal:") {
            if let Some(mrest) = rest.strip_prefix("schwarzschild:") {
                let m = parse_kv(mrest, "m")?;
                return RadialMetric::schwarzschild(n, m, r_max.unwrap_or(10.0 * m));
            }
            let spline = CubicSpline::from_csv(Path::new(rest))?;
            let (lo, hi) = (spline.x[0], *spline.x.last().expect("spline has nodes"));
            return RadialMetric::conformal(
                n,
                ConformalFactor::Table(spline),
                lo,
                r_max.unwrap_or(hi).min(hi),
            );
        }
        Err(Error::Config(format!("unknown metric '{spec}'")))
    }

    pub fn label(&self) -> String {
        match &self.kind {
            MetricKind::Euclidean => "euclidean".into(),
            MetricKind::SpaceForm { k } => format!("spaceform:K={k}"),
            MetricKind::ConformalRadial { factor, .. } => format!("conformal:{}", factor.label()),
        }
    }

    pub fn r_min(&self) -> f64 {
        match &self.kind {
            MetricKind::ConformalRadial { r_min, .. } => *r_min,
            _ => 0.0,
        }
    }

    /// Sectional curvature for Euclidean/space forms, `None` for conformal metrics.
    pub fn curvature_k(&self) -> Option<f64> {
        match self.kind {
            MetricKind::Euclidean => Some(0.0),
            MetricKind::SpaceForm { k } => Some(k),
            MetricKind::ConformalRadial { .. } => None,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, MetricKind::Euclidean)
    }

    pub(crate) fn check_chart(&self, r: f64) -> Result<()> {
        if r < self.r_min() - 1e-15 || r > self.r_max * (1.0 + 1e-12) || r.is_nan() {
            return Err(Error::OutOfChart {
                r,
                r_max: self.r_max,
            });
        }
        Ok(())
    }

    /// `det(g)^{1/2}` at radius `r`, unchecked.
    #[inline]
    pub fn density(&self, r: f64) -> f64 {
        match &self.kind {
            MetricKind::Euclidean => 1.0,
            MetricKind::SpaceForm { k } => {
                let ratio = sn_over_r(*k, r);
                ratio.powi(self.n as i32 - 1)
            }
            MetricKind::ConformalRadial { factor, .. } => {
                let u = factor.value(self.n, r);
                u.powf(2.0 * self.n as f64 / (self.n as f64 - 2.0))
            }
        }
    }

    /// Factor multiplying `(∂_r φ)²` in `|∇φ|²`.
    #[inline]
    pub fn gradient_weight(&self, r: f64) -> f64 {
        match &self.kind {
            MetricKind::ConformalRadial { factor, .. } => {
                factor.value(self.n, r).powf(-4.0 / (self.n as f64 - 2.0))
            }
            _ => 1.0,
        }
    }

    /// `ω_{n-1} r^{n-1} det(g)^{1/2}`: the radial measure `dμ = shell(r) dr`.
    #[inline]
    pub fn shell(&self, r: f64) -> f64 {
        sphere_area(self.n) * r.powi(self.n as i32 - 1) * self.density(r)
    }

    /// Volume of the geodesic ball `{r' < r}` (space forms and Euclidean only).
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_chart(r)?;
        match &self.kind {
            MetricKind::Euclidean => {
                Ok(sphere_area(self.n) * r.powi(self.n as i32) / self.n as f64)
            }
            MetricKind::SpaceForm { .. } => Ok(self.ball_volume_unchecked(r)),
            MetricKind::ConformalRadial { .. } => Err(Error::Unavailable("ball volume")),
        }
    }

    pub(crate) fn ball_volume_unchecked(&self, r: f64) -> f64 {
        match &self.kind {
            MetricKind::Euclidean => sphere_area(self.n) * r.powi(self.n as i32) / self.n as f64,
            _ => {
                // entire integrand, 32-point Gauss on two halves is at rounding level
                let g = GaussLegendre::cached(32);
                let h = 0.5 * r;
                g.integrate(|x| self.shell(x), 0.0, h) + g.integrate(|x| self.shell(x), h, r)
            }
        }
    }

    /// Radius of the ball of volume `v` (inverse of [`RadialMetric::ball_volume`]).
    pub fn ball_radius(&self, v: f64) -> Result<f64> {
        if v < 0.0 || v.is_nan() {
            return Err(domain("ball volume must be nonnegative"));
        }
        let cap = self.ball_volume(self.r_max)?;
        if v > cap * (1.0 + 1e-12) {
            return Err(Error::Capacity { need: v, have: cap });
        }
        Ok(self.ball_radius_unchecked(v.min(cap)))
    }

    pub(crate) fn ball_radius_unchecked(&self, v: f64) -> f64 {
        let nf = self.n as f64;
        let euclid = (nf * v / sphere_area(self.n)).powf(1.0 / nf);
        match self.kind {
            MetricKind::Euclidean => euclid,
            _ => {
                if v == 0.0 {
                    return 0.0;
                }
                // safeguarded Newton on V(r) = v
                let (mut lo, mut hi) = (0.0, self.r_max);
                let mut r = euclid.min(self.r_max);
                for _ in 0..100 {
                    let f = self.ball_volume_unchecked(r) - v;
                    if f > 0.0 {
                        hi = r;
                    } else {
                        lo = r;
                    }
                    let step = f / self.shell(r);
                    let mut next = r - step;
                    if !(next > lo && next < hi) {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - r).abs() <= 1e-15 * r.max(1e-300) {
                        r = next;
                        break;
                    }
                    r = next;
                }
                r
            }
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(domain(format!("dimension n = {n} must be at least 3")));
    }
    Ok(())
}

fn parse_kv(s: &str, key: &str) -> Result<f64> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("expected {key}=<value>, got '{s}'")))?;
    if !k.trim().eq_ignore_ascii_case(key) {
        return Err(Error::Config(format!("expected key {key}, got '{k}'")));
    }
    v.trim()
        .parse::<f64>()
        .map_err(|e| Error::Config(format!("bad value '{v}': {e}")))
}

/// `sn_K(r)/r`, with its even Taylor series near 0.
#[inline]
pub fn sn_over_r(k: f64, r: f64) -> f64 {
    let x = k * r * r;
    if x.abs() < 1e-4 {
        return 1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0;
    }
    if k > 0.0 {
        let s = k.sqrt();
        (s * r).sin() / (s * r)
    } else {
        let s = (-k).sqrt();
        (s * r).sinh() / (s * r)
    }
}

/// `det(g)^{1/2}` at `r` with chart checking.
pub fn volume_density(metric: &RadialMetric, r: f64) -> Result<f64> {
    metric.check_chart(r)?;
    Ok(metric.density(r))
}

/// Curvature data at the pole. Fields other than `sc` are `None` for conformal metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureAtPole {
    pub sc: f64,
    pub rc_isotropic: Option<f64>,
    pub rc_norm2: Option<f64>,
    pub rm_norm2: Option<f64>,
    pub lap_sc: Option<f64>,
    pub lambda1_rc: Option<f64>,
}

impl CurvatureAtPole {
    pub fn space_form(n: usize, k: f64) -> Self {
        let nf = n as f64;
        CurvatureAtPole {
            sc: nf * (nf - 1.0) * k,
            rc_isotropic: Some((nf - 1.0) * k),
            rc_norm2: Some(nf * (nf - 1.0).powi(2) * k * k),
            rm_norm2: Some(2.0 * nf * (nf - 1.0) * k * k),
            lap_sc: Some(0.0),
            lambda1_rc: Some((nf - 1.0) * k),
        }
    }

    pub fn rc_isotropic(&self) -> Result<f64> {
        self.rc_isotropic.ok_or(Error::Unavailable("Rc"))
    }
    pub fn rc_norm2(&self) -> Result<f64> {
        self.rc_norm2.ok_or(Error::Unavailable("|Rc|^2"))
    }
    pub fn rm_norm2(&self) -> Result<f64> {
        self.rm_norm2.ok_or(Error::Unavailable("|Rm|^2"))
    }
    pub fn lap_sc(&self) -> Result<f64> {
        self.lap_sc.ok_or(Error::Unavailable("ΔSc"))
    }
    pub fn lambda1_rc(&self) -> Result<f64> {
        self.lambda1_rc.ok_or(Error::Unavailable("λ1(Rc)"))
    }

    /// Cauchy-Schwarz and Weyl-nonnegativity constraints (when the fields are present).
    pub fn check_invariants(&self, n: usize) -> Result<()> {
        let nf = n as f64;
        let slack = 1e-10 * (1.0 + self.sc * self.sc);
        if let Some(rc2) = self.rc_norm2 {
            if rc2 < self.sc * self.sc / nf - slack {
                return Err(domain(format!("|Rc|^2 = {rc2} < Sc^2/n")));
            }
            if let Some(rm2) = self.rm_norm2 {
                let w =
                    4.0 / (nf - 2.0) * rc2 - 2.0 / ((nf - 1.0) * (nf - 2.0)) * self.sc * self.sc;
                if rm2 < w - slack - 1e-10 * rc2 {
                    return Err(domain(format!(
                        "|Rm|^2 = {rm2} violates Weyl nonnegativity ({w})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Curvature at the pole; for conformal metrics only `sc`, evaluated at the innermost
/// chart radius (the pole itself when `r_min = 0` is approached from `r = 1e-3 r_max`).
pub fn curvature_at_pole(metric: &RadialMetric) -> Result<CurvatureAtPole> {
    match &metric.kind {
        MetricKind::Euclidean => Ok(CurvatureAtPole::space_form(metric.n, 0.0)),
        MetricKind::SpaceForm { k } => Ok(CurvatureAtPole::space_form(metric.n, *k)),
        MetricKind::ConformalRadial { r_min, .. } => {
            let r = if *r_min > 0.0 {
                r_min * (1.0 + 1e-6)
            } else {
                1e-3 * metric.r_max
            };
            Ok(CurvatureAtPole {
                sc: scalar_curvature_at(metric, r)?,
                rc_isotropic: None,
                rc_norm2: None,
                rm_norm2: None,
                lap_sc: None,
                lambda1_rc: None,
            })
        }
    }
}

/// Scalar curvature at radius `r`.
///
/// Conformal metrics use `Sc(g) = u^{-(n+2)/(n-2)} (-c(n) Δu)`, `c(n) = 4(n-1)/(n-2)`, on the
/// flat base, with `Δu = r^{1-n} (r^{n-1} u')'`: the flux `r^{n-1} u'` is differentiated by
/// Ridders-Richardson finite differences.
pub fn scalar_curvature_at(metric: &RadialMetric, r: f64) -> Result<f64> {
    metric.check_chart(r)?;
    let n = metric.n;
    let nf = n as f64;
    match &metric.kind {
        MetricKind::Euclidean => Ok(0.0),
        MetricKind::SpaceForm { k } => Ok(nf * (nf - 1.0) * k),
        MetricKind::ConformalRadial { factor, r_min } => {
            let flux = |x: f64| x.powi(n as i32 - 1) * factor.derivative(n, x);
            let h0 = 0.1
                * (r - r_min)
                    .min(metric.r_max - r)
                    .max(1e-8 * r)
                    .min(0.25 * r);
            let dflux = ridders_derivative(&flux, r, h0.max(1e-6 * r));
            let lap = dflux / r.powi(n as i32 - 1);
            let u = factor.value(n, r);
            let cn = 4.0 * (nf - 1.0) / (nf - 2.0);
            Ok(u.powf(-(nf + 2.0) / (nf - 2.0)) * (-cn * lap))
        }
    }
}

/// Ridders' polynomial extrapolation of central differences.
pub fn ridders_derivative<F: Fn(f64) -> f64>(f: &F, x: f64, h0: f64) -> f64 {
    const NTAB: usize = 10;
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut hh = h0;
    a[0][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        hh /= CON;
        a[0][i] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// `|Rm|² - |W|² - (4/(n-2))|Rc|² + (2/((n-1)(n-2)))Sc²`.
pub fn decomposition_residual(
    n: usize,
    sc: f64,
    rc_norm2: f64,
    rm_norm2: f64,
    weyl_norm2: f64,
) -> f64 {
    let nf = n as f64;
    rm_norm2 - weyl_norm2 - 4.0 / (nf - 2.0) * rc_norm2 + 2.0 / ((nf - 1.0) * (nf - 2.0)) * sc * sc
}

/// `E(v) = (5Sc² + 8|Rc|² - 3|Rm|² - 18ΔSc)/360`.
pub fn e_v(curv: &CurvatureAtPole) -> Result<f64> {
    let rc2 = curv.rc_norm2()?;
    let rm2 = curv.rm_norm2()?;
    let lap = curv.lap_sc()?;
    Ok((5.0 * curv.sc * curv.sc + 8.0 * rc2 - 3.0 * rm2 - 18.0 * lap) / 360.0)
}

/// Algebraic curvature tensors at a point, for brute-force contraction oracles.
///
/// Convention: `R_ijkl` with `Rc_jl = Σ_i R_ijil`; the unit sphere is `δ_ik δ_jl - δ_il δ_jk`.
pub mod algebraic {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    pub struct CurvatureTensor {
        pub r: Tensor4,
    }

    fn sym_product(n: usize, h: &[f64], g: &[f64]) -> Tensor4 {
        // (h_ik g_jl + g_ik h_jl - h_il g_jk - g_il h_jk)/2
        Tensor4::from_fn(n, |i, j, k, l| {
            0.5 * (h[i * n + k] * g[j * n + l] + g[i * n + k] * h[j * n + l]
                - h[i * n + l] * g[j * n + k]
                - g[i * n + l] * h[j * n + k])
        })
    }

    impl CurvatureTensor {
        pub fn constant(n: usize, k: f64) -> Self {
            let id: Vec<f64> = (0..n * n)
                .map(|x| if x / n == x % n { 1.0 } else { 0.0 })
                .collect();
            let mut r = sym_product(n, &id, &id);
            for i in 0..n {
                for j in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            r.set(i, j, a, b, k * r.get(i, j, a, b));
                        }
                    }
                }
            }
            CurvatureTensor { r }
        }

        /// Random element of the space of algebraic curvature tensors: a sum of
        /// symmetrized Kulkarni-Nomizu products of random symmetric matrices.
        pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
            let mut r = Tensor4::zeros(n);
            let terms = 2 + n;
            for _ in 0..terms {
                let h = random_symmetric(n, rng);
                let g = random_symmetric(n, rng);
                let t = sym_product(n, &h, &g);
                let s: f64 = rng.gen_range(-1.0..1.0);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                r.set(i, j, k, l, r.get(i, j, k, l) + s * t.get(i, j, k, l));
                            }
                        }
                    }
                }
            }
            CurvatureTensor { r }
        }

        pub fn dim(&self) -> usize {
            self.r.dim()
        }

        /// Ricci tensor (row-major `n × n`).
        pub fn ricci(&self) -> Vec<f64> {
            let n = self.dim();
            let mut rc = vec![0.0; n * n];
            for j in 0..n {
                for l in 0..n {
                    rc[j * n + l] = (0..n).map(|i| self.r.get(i, j, i, l)).sum();
                }
            }
            rc
        }

        pub fn scalar(&self) -> f64 {
            let n = self.dim();
            let rc = self.ricci();
            (0..n).map(|i| rc[i * n + i]).sum()
        }

        pub fn ricci_norm2(&self) -> f64 {
            self.ricci().iter().map(|x| x * x).sum()
        }

        pub fn norm2(&self) -> f64 {
            self.r.norm2()
        }

        /// Weyl part `R - (1/(n-2)) (Rc - Sc g/(2(n-1))) ∧ g`.
        pub fn weyl(&self) -> Tensor4 {
            let n = self.dim();
            let nf = n as f64;
            let rc = self.ricci();
            let sc = self.scalar();
            let mut p = rc.clone();
            for i in 0..n {
                p[i * n + i] -= sc / (2.0 * (nf - 1.0));
            }
            let id: Vec<f64> = (0..n * n)
                .map(|x| if x / n == x % n { 1.0 } else { 0.0 })
                .collect();
            // A ∧ g with the sphere normalized to g ∧ g / 2
            let kn = sym_product(n, &p, &id);
            Tensor4::from_fn(n, |i, j, k, l| {
                self.r.get(i, j, k, l) - 2.0 / (nf - 2.0) * kn.get(i, j, k, l)
            })
        }

        /// Algebraic part of the volume-density quartic,
        /// `v_ijkl = (1/24)(-(2/15) Σ R_isjt R_kslt + (1/3) Rc_ij Rc_kl)` (covariant derivatives vanish).
        pub fn v_tensor(&self) -> Tensor4 {
            let n = self.dim();
            let rc = self.ricci();
            Tensor4::from_fn(n, |i, j, k, l| {
                let mut quad = 0.0;
                for s in 0..n {
                    for t in 0..n {
                        quad += self.r.get(i, s, j, t) * self.r.get(k, s, l, t);
                    }
                }
                (-(2.0 / 15.0) * quad + rc[i * n + j] * rc[k * n + l] / 3.0) / 24.0
            })
        }

        /// Pole record for `e_v` and the decomposition identity (`ΔSc = 0`).
        pub fn pole_record(&self) -> CurvatureAtPole {
            let n = self.dim();
            let rc = self.ricci();
            let eig = nalgebra::DMatrix::from_row_slice(n, n, &rc).symmetric_eigen();
            let lambda1 = eig
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            CurvatureAtPole {
                sc: self.scalar(),
                rc_isotropic: None,
                rc_norm2: Some(self.ricci_norm2()),
                rm_norm2: Some(self.norm2()),
                lap_sc: Some(0.0),
                lambda1_rc: Some(lambda1),
            }
        }
    }

    pub fn random_symmetric<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        a
    }
}

/// Natural cubic spline.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 4 || y.len() != n {
            return Err(domain("spline needs >= 4 nodes and matching lengths"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("spline abscissae must increase strictly"));
        }
        // tridiagonal system for second derivatives, natural ends
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(CubicSpline { x, y, m })
    }

    /// Two-column CSV `r,u` (header optional).
    pub fn from_csv(path: &Path) -> Result<Self> {
        let (x, y) = read_two_columns(path)?;
        CubicSpline::new(x, y)
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.m[i + 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }
}

/// Read a two-column numeric CSV, skipping a non-numeric header row.
pub fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Io(format!(
                "{}: row {} has fewer than two columns",
                path.display(),
                row + 1
            )));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(a), Ok(b)) => {
                x.push(a);
                y.push(b);
            }
            _ if row == 0 => continue,
            _ => {
                return Err(Error::Io(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::algebraic::CurvatureTensor;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn densities() {
        let e = RadialMetric::euclidean(3, 5.0).unwrap();
        assert_eq!(volume_density(&e, 2.0).unwrap(), 1.0);
        let s = RadialMetric::space_form(3, 1.0, 2.5).unwrap();
        let v = volume_density(&s, PI / 2.0).unwrap();
        assert!((v - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!(volume_density(&s, 2.6).is_err());
        assert!(RadialMetric::space_form(3, 1.0, 3.0).is_err());
    }

    #[test]
    fn space_form_curvatures() {
        let c = CurvatureAtPole::space_form(4, 2.0);
        assert_eq!(c.sc, 24.0);
        assert_eq!(c.rm_norm2.unwrap(), 96.0);
        assert_eq!(c.rc_norm2.unwrap(), 144.0);
        assert!(c.check_invariants(4).is_ok());
        let e = curvature_at_pole(&RadialMetric::euclidean(5, 1.0).unwrap()).unwrap();
        assert_eq!(e.sc, 0.0);
        assert_eq!(e_v(&e).unwrap(), 0.0);
        let ev = e_v(&CurvatureAtPole::space_form(3, 1.5)).unwrap();
        assert!((ev - 2.0 / 3.0 * 2.25).abs() < 1e-14);
    }

    #[test]
    fn constant_tensor_matches_space_form() {
        let t = CurvatureTensor::constant(4, 0.7);
        let c = CurvatureAtPole::space_form(4, 0.7);
        assert!((t.scalar() - c.sc).abs() < 1e-13);
        assert!((t.ricci_norm2() - c.rc_norm2.unwrap()).abs() < 1e-12);
        assert!((t.norm2() - c.rm_norm2.unwrap()).abs() < 1e-12);
        assert!(t.weyl().norm2() < 1e-24);
        let ev = crate::specfun::e_op(&t.v_tensor());
        assert!((ev - e_v(&c).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn random_tensor_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..7 {
            let t = CurvatureTensor::random(n, &mut rng);
            let rec = t.pole_record();
            let res = decomposition_residual(
                n,
                rec.sc,
                rec.rc_norm2.unwrap(),
                rec.rm_norm2.unwrap(),
                t.weyl().norm2(),
            );
            assert!(res.abs() < 1e-10 * (1.0 + rec.rm_norm2.unwrap()));
            let ev = crate::specfun::e_op(&t.v_tensor());
            assert!((ev - e_v(&rec).unwrap()).abs() < 1e-10 * (1.0 + ev.abs()));
        }
    }

    #[test]
    fn ball_volume_roundtrip() {
        for k in [-1.0, 0.0, 1.0] {
            let m = RadialMetric::space_form(4, k, 2.0).unwrap();
            for r in [0.01, 0.5, 1.3, 2.0] {
                let v = m.ball_volume(r).unwrap();
                assert!((m.ball_radius(v).unwrap() - r).abs() < 1e-12);
            }
        }
        let s = RadialMetric::space_form(3, 1.0, 0.9 * PI).unwrap();
        let v = s.ball_volume(0.9 * PI).unwrap();
        // ∫_0^r 4π sin^2 = 2π(r - sin r cos r)
        let r = 0.9 * PI;
        assert!((v - 2.0 * PI * (r - r.sin() * r.cos())).abs() < 1e-12);
    }

    #[test]
    fn schwarzschild_is_scalar_flat() {
        for n in [3, 4, 5] {
            let m = RadialMetric::schwarzschild(n, 1.0, 10.0).unwrap();
            for i in 0..10 {
                let r = 0.6 + i as f64 * 0.9;
                assert!(scalar_curvature_at(&m, r).unwrap().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..50).map(|i| 1.0 + i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::new(x, y).unwrap();
        assert!((s.value(3.03) - 3.03f64.sin()).abs() < 1e-5);
        assert!((s.derivative(3.03) - 3.03f64.cos()).abs() < 1e-4);
    }

    #[test]
    fn parse_metrics() {
        let m = RadialMetric::parse("spaceform:K=1", 3, None).unwrap();
        assert!((m.r_max - 0.9 * PI).abs() < 1e-12);
        let m = RadialMetric::parse("conformal:schwarzschild:m=2", 4, None).unwrap();
        assert_eq!(m.r_min(), 1.0);
        assert!(RadialMetric::parse("torus", 3, None).is_err());
    }
}
