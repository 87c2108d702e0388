//! Piecewise-linear radial profiles and the element quadrature shared by all quotients.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{read_two_columns, RadialMetric};
use crate::quad::GaussLegendre;

/// Minimum node count for quotient evaluation.
pub const MIN_QUOTIENT_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Zero at the last node; nothing beyond.
    CompactSupport,
    /// Positive at the last node; continued by a power-law tail on Euclidean space.
    Decays,
}

/// Continuous piecewise-linear function of the radius.
///
/// A repeated radius marks a jump (used for step profiles from histograms); such
/// profiles have no Dirichlet energy and are rejected by the quotients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    boundary: Boundary,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::Dimension {
                expected: radii.len(),
                got: values.len(),
            });
        }
        if radii.len() < 2 {
            return Err(domain("a profile needs at least two nodes"));
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(domain(
                "profile radii must be nonnegative and nondecreasing",
            ));
        }
        if radii.windows(3).any(|w| w[0] == w[2]) {
            return Err(domain("a radius may repeat at most once"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("profile values must be finite"));
        }
        if boundary == Boundary::CompactSupport && *values.last().expect("nonempty") != 0.0 {
            return Err(Error::Support(
                "compactly supported profile must end at 0".into(),
            ));
        }
        Ok(RadialProfile {
            radii,
            values,
            boundary,
        })
    }

    /// Sample `f` at the given radii.
    pub fn sample(f: impl Fn(f64) -> f64, radii: Vec<f64>, boundary: Boundary) -> Result<Self> {
        let mut values: Vec<f64> = radii.iter().map(|&r| f(r)).collect();
        if boundary == Boundary::CompactSupport {
            *values.last_mut().expect("nonempty") = 0.0;
        }
        RadialProfile::new(radii, values, boundary)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn len(&self) -> usize {
        self.radii.len()
    }
    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
    pub fn r_end(&self) -> f64 {
        *self.radii.last().expect("nonempty")
    }

    pub fn has_jumps(&self) -> bool {
        self.radii.windows(2).any(|w| w[0] == w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Linear interpolation; zero beyond a compact support, last value's tail otherwise.
    pub fn value_at(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.values[0];
        }
        if r >= self.radii[n - 1] {
            return match (self.boundary, self.tail_power()) {
                (Boundary::Decays, Some((c, k))) => c * r.powf(-k),
                (Boundary::Decays, None) => self.values[n - 1],
                _ => 0.0,
            };
        }
        let i = self.radii.partition_point(|&x| x <= r) - 1;
        let (a, b) = (self.radii[i], self.radii[i + 1]);
        if b == a {
            return self.values[i + 1];
        }
        let s = (r - a) / (b - a);
        self.values[i] * (1.0 - s) + self.values[i + 1] * s
    }

    pub fn scaled(&self, c: f64) -> RadialProfile {
        RadialProfile {
            values: self.values.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// `r ↦ u(λ r)`.
    pub fn dilated(&self, lambda: f64) -> RadialProfile {
        RadialProfile {
            radii: self.radii.iter().map(|r| r / lambda).collect(),
            ..self.clone()
        }
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<RadialProfile> {
        RadialProfile::new(self.radii.clone(), values, self.boundary)
    }

    /// `u ≈ c r^{-k}` from the last two nodes, when both are positive and decreasing.
    pub fn tail_power(&self) -> Option<(f64, f64)> {
        let n = self.radii.len();
        let (r1, r2) = (self.radii[n - 2], self.radii[n - 1]);
        let (u1, u2) = (self.values[n - 2], self.values[n - 1]);
        if !(u1 > u2 && u2 > 0.0 && r1 > 0.0 && r2 > r1) {
            return None;
        }
        let k = (u1 / u2).ln() / (r2 / r1).ln();
        Some((u2 * r2.powf(k), k))
    }

    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "value"])?;
        for (r, v) in self.radii.iter().zip(&self.values) {
            w.write_record([format!("{r:.17e}"), format!("{v:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Read two columns `r, value`; the boundary is inferred from the last value.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let (r, v) = read_two_columns(path)?;
        let boundary = if v.last() == Some(&0.0) {
            Boundary::CompactSupport
        } else {
            Boundary::Decays
        };
        RadialProfile::new(r, v, boundary)
    }
}

/// Grid on `[0, r_end]` with spacing shrinking quadratically toward `r_end`
/// (for profiles with a power-type kink at the edge of their support).
pub fn edge_clustered_grid(r_end: f64, nodes: usize) -> Vec<f64> {
    let m = (nodes - 1) as f64;
    (0..nodes)
        .map(|i| r_end * (1.0 - (1.0 - i as f64 / m).powi(2)))
        .collect()
}

/// Grid on `[0, r_end]`, uniform with spacing ~`scale/nodes·x` near 0 and geometric beyond `scale`:
/// `r = scale · sinh(x)`.
pub fn sinh_grid(scale: f64, r_end: f64, nodes: usize) -> Vec<f64> {
    let x_end = (r_end / scale).asinh();
    let m = (nodes - 1) as f64;
    let mut g: Vec<f64> = (0..nodes)
        .map(|i| scale * (x_end * i as f64 / m).sinh())
        .collect();
    *g.last_mut().expect("nonempty") = r_end;
    g
}

pub fn uniform_grid(r_lo: f64, r_hi: f64, nodes: usize) -> Vec<f64> {
    let m = (nodes - 1) as f64;
    (0..nodes)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / m)
        .collect()
}

/// Gauss points of one element: radius, `GL weight × shell`, and the two hat-function values.
#[derive(Debug, Clone)]
pub(crate) struct ElementQuad {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub left: Vec<f64>,
}

/// Element quadrature of a fixed grid on a fixed metric.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub(crate) radii: Vec<f64>,
    pub(crate) elems: Vec<ElementQuad>,
    /// `∫_e shell · gradient_weight dr / h_e²` per element: the energy of a unit slope jump.
    pub(crate) stiff: Vec<f64>,
    pub(crate) sc: Option<Vec<Vec<f64>>>,
}

/// Gauss-Legendre order per element.
pub const ELEMENT_ORDER: usize = 8;

impl Assembly {
    /// `with_sc` also tabulates the scalar curvature at the Gauss points.
    pub fn new(radii: &[f64], metric: &RadialMetric, with_sc: bool) -> Result<Self> {
        let first = radii[0];
        let last = *radii.last().expect("nonempty");
        metric.check_chart(first)?;
        metric.check_chart(last)?;
        let g = GaussLegendre::cached(ELEMENT_ORDER);
        let mut elems = Vec::with_capacity(radii.len() - 1);
        let mut stiff = Vec::with_capacity(radii.len() - 1);
        let mut sc = with_sc.then(Vec::new);
        for w in radii.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            let mut e = ElementQuad {
                r: Vec::new(),
                w: Vec::new(),
                left: Vec::new(),
            };
            let mut k = 0.0;
            let mut scs = Vec::new();
            if h > 0.0 {
                for (x, gw) in g.nodes.iter().zip(&g.weights) {
                    let r = a + 0.5 * h * (1.0 + x);
                    let wt = 0.5 * h * gw * metric.shell(r);
                    e.r.push(r);
                    e.w.push(wt);
                    e.left.push((b - r) / h);
                    k += wt * metric.gradient_weight(r);
                    if with_sc {
                        scs.push(crate::geometry::scalar_curvature_at(metric, r)?);
                    }
                }
                k /= h * h;
            }
            elems.push(e);
            stiff.push(k);
            if let Some(s) = sc.as_mut() {
                s.push(scs);
            }
        }
        Ok(Assembly {
            radii: radii.to_vec(),
            elems,
            stiff,
            sc,
        })
    }

    /// `∫|∇u|²`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.stiff
            .iter()
            .enumerate()
            .map(|(e, k)| k * (u[e + 1] - u[e]).powi(2))
            .sum()
    }

    /// `∫|u|^q`.
    pub fn power(&self, u: &[f64], q: f64) -> f64 {
        let mut s = 0.0;
        for (e, el) in self.elems.iter().enumerate() {
            for ((w, l), _) in el.w.iter().zip(&el.left).zip(&el.r) {
                let v = u[e] * l + u[e + 1] * (1.0 - l);
                s += w * v.abs().powf(q);
            }
        }
        s
    }

    /// `∫ Sc u²` (needs `with_sc`).
    pub fn sc_mass(&self, u: &[f64]) -> Result<f64> {
        let sc = self.sc.as_ref().ok_or(Error::Unavailable("Sc table"))?;
        let mut s = 0.0;
        for (e, el) in self.elems.iter().enumerate() {
            for (k, (w, l)) in el.w.iter().zip(&el.left).enumerate() {
                let v = u[e] * l + u[e + 1] * (1.0 - l);
                s += w * sc[e][k] * v * v;
            }
        }
        Ok(s)
    }

    /// Gradient of [`Assembly::energy`] with respect to nodal values.
    pub fn energy_grad(&self, u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for (e, k) in self.stiff.iter().enumerate() {
            let d = 2.0 * k * (u[e + 1] - u[e]);
            out[e] -= d;
            out[e + 1] += d;
        }
    }

    /// Gradient of [`Assembly::power`]; terms with `u = 0` contribute zero.
    pub fn power_grad(&self, u: &[f64], q: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for (e, el) in self.elems.iter().enumerate() {
            for (w, l) in el.w.iter().zip(&el.left) {
                let v = u[e] * l + u[e + 1] * (1.0 - l);
                if v == 0.0 {
                    continue;
                }
                let d = w * q * v.abs().powf(q - 1.0) * v.signum();
                out[e] += d * l;
                out[e + 1] += d * (1.0 - l);
            }
        }
    }

    /// Stiffness and consistent mass matrices as (diagonal, off-diagonal) pairs.
    pub(crate) fn tridiagonal(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.radii.len();
        let mut kd = vec![0.0; n];
        let mut ko = vec![0.0; n - 1];
        let mut md = vec![0.0; n];
        let mut mo = vec![0.0; n - 1];
        for (e, k) in self.stiff.iter().enumerate() {
            kd[e] += k;
            kd[e + 1] += k;
            ko[e] -= k;
            let el = &self.elems[e];
            for (w, l) in el.w.iter().zip(&el.left) {
                md[e] += w * l * l;
                md[e + 1] += w * (1.0 - l) * (1.0 - l);
                mo[e] += w * l * (1.0 - l);
            }
        }
        (kd, ko, md, mo)
    }
}
