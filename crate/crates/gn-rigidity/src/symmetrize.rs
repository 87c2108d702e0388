//! Schwarz symmetrization of radial functions onto space-form targets.
//!
//! For a P1 source the distribution function `μ(s) = Vol{f ≥ s}` is exact element by
//! element, so the rearrangement `ū(ρ) = μ⁻¹(V(ρ))` is exact at every level. Norms and
//! energies of `ū` are integrated in the level variable between consecutive nodal values.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::GNParams;
use crate::error::{domain, Error, Result};
use crate::functionals::profile::{uniform_grid, Assembly, Boundary, RadialProfile};
use crate::functionals::quotients::quotient_value;
use crate::geometry::{read_two_columns, RadialMetric};
use crate::quad::{integrate, integrate_endpoint_power, GaussLegendre};
use crate::specfun::sphere_area;

/// Interior levels per band when sampling `ū` as a profile.
pub const LEVELS_PER_BAND: usize = 8;

const QUAD_REL: f64 = 1e-13;

/// A nonnegative function known through its values on a radial grid, or only through its
/// layer volumes.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasuredFunction {
    RadialGrid(RadialProfile, RadialMetric),
    /// `(value, volume)` pairs.
    Histogram(Vec<(f64, f64)>),
}

impl MeasuredFunction {
    pub fn radial(profile: RadialProfile, metric: RadialMetric) -> Result<Self> {
        if profile.values().iter().any(|&v| v < 0.0) {
            return Err(domain("symmetrization needs a nonnegative function"));
        }
        if profile.boundary() != Boundary::CompactSupport {
            return Err(Error::Support(
                "symmetrization needs a compactly supported profile".into(),
            ));
        }
        metric.ball_volume(profile.r_end())?;
        Ok(MeasuredFunction::RadialGrid(profile, metric))
    }

    pub fn histogram(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(domain("empty histogram"));
        }
        for &(v, w) in &entries {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(domain(format!(
                    "histogram value {v} must be finite and >= 0"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(domain(format!(
                    "histogram volume {w} must be finite and > 0"
                )));
            }
        }
        Ok(MeasuredFunction::Histogram(entries))
    }

    /// Two columns `value, volume`.
    pub fn histogram_from_csv(path: &Path) -> Result<Self> {
        let (v, w) = read_two_columns(path)?;
        MeasuredFunction::histogram(v.into_iter().zip(w).collect())
    }

    pub fn write_histogram_csv(entries: &[(f64, f64)], path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["value", "volume"])?;
        for (v, vol) in entries {
            w.write_record([format!("{v:.17e}"), format!("{vol:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `∫ f^q`, computed on the source.
    pub fn norm_power(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        match self {
            MeasuredFunction::Histogram(e) => Ok(e.iter().map(|(v, w)| v.powf(q) * w).sum()),
            MeasuredFunction::RadialGrid(p, m) => grid_norm_power(p, m, q),
        }
    }

    /// `∫|∇f|²` on the source.
    pub fn energy(&self) -> Result<f64> {
        match self {
            MeasuredFunction::Histogram(_) => Err(Error::Representation(
                "a histogram has no Dirichlet energy".into(),
            )),
            MeasuredFunction::RadialGrid(p, m) => {
                if p.has_jumps() {
                    return Err(Error::Representation(
                        "step profiles have no Dirichlet energy".into(),
                    ));
                }
                Ok(Assembly::new(p.radii(), m, false)?.energy(p.values()))
            }
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("norm exponent {q} must be positive")))
    }
}

fn grid_norm_power(p: &RadialProfile, m: &RadialMetric, q: f64) -> Result<f64> {
    let (r, u) = (p.radii(), p.values());
    let mut total = u[0].powf(q) * m.ball_volume(r[0])?;
    for i in 0..r.len() - 1 {
        let (a, b, fa, fb) = (r[i], r[i + 1], u[i], u[i + 1]);
        let h = b - a;
        if h == 0.0 || (fa == 0.0 && fb == 0.0) {
            continue;
        }
        total += if fa == fb {
            fa.powf(q) * GaussLegendre::cached(16).integrate(|x| m.shell(x), a, b)
        } else if fa == 0.0 {
            let c = (fb / h).powf(q);
            integrate_endpoint_power(|x| c * m.shell(a + x), h, q, QUAD_REL, 0.0)?.value
        } else if fb == 0.0 {
            let c = (fa / h).powf(q);
            integrate_endpoint_power(|x| c * m.shell(b - x), h, q, QUAD_REL, 0.0)?.value
        } else {
            let lin = |x: f64| fa + (fb - fa) * (x - a) / h;
            integrate(|x| lin(x).powf(q) * m.shell(x), a, b, QUAD_REL, 0.0)?.value
        };
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
struct Element {
    a: f64,
    h: f64,
    fa: f64,
    fb: f64,
    va: f64,
    vb: f64,
}

#[derive(Debug, Clone, Default)]
struct Band {
    full: f64,
    cross: Vec<usize>,
}

#[derive(Debug, Clone)]
struct GridLevels {
    source: RadialMetric,
    elems: Vec<Element>,
    /// Distinct nodal values, ascending, starting at 0.
    levels: Vec<f64>,
    /// `μ(L_k)`; the entry for `L_0 = 0` holds `μ(0+)`.
    mu_at: Vec<f64>,
    /// `μ(L_k+)`.
    mu_above: Vec<f64>,
    bands: Vec<Band>,
}

impl GridLevels {
    fn new(p: &RadialProfile, m: &RadialMetric) -> Result<Self> {
        let (r, u) = (p.radii(), p.values());
        let gl = GaussLegendre::cached(16);
        let mut vol = Vec::with_capacity(r.len());
        vol.push(m.ball_volume(r[0])?);
        for i in 0..r.len() - 1 {
            let v = if m.is_euclidean() {
                m.ball_volume(r[i + 1])?
            } else {
                vol[i] + gl.integrate(|x| m.shell(x), r[i], r[i + 1])
            };
            vol.push(v);
        }
        let mut elems = Vec::with_capacity(r.len());
        if r[0] > 0.0 {
            elems.push(Element {
                a: 0.0,
                h: r[0],
                fa: u[0],
                fb: u[0],
                va: 0.0,
                vb: vol[0],
            });
        }
        for i in 0..r.len() - 1 {
            elems.push(Element {
                a: r[i],
                h: r[i + 1] - r[i],
                fa: u[i],
                fb: u[i + 1],
                va: vol[i],
                vb: vol[i + 1],
            });
        }
        let mut levels: Vec<f64> = u.iter().copied().chain([0.0]).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let nl = levels.len();
        let idx = |v: f64| levels.partition_point(|&l| l < v);
        let mut bands = vec![Band::default(); nl - 1];
        let mut by_lo = vec![0.0; nl];
        let mut jump = vec![0.0; nl];
        for (e_idx, e) in elems.iter().enumerate() {
            let (lo, hi) = (e.fa.min(e.fb), e.fa.max(e.fb));
            let (ilo, ihi) = (idx(lo), idx(hi));
            let w = e.vb - e.va;
            by_lo[ilo] += w;
            if hi == lo {
                jump[ilo] += w;
            } else if e.h > 0.0 {
                for band in &mut bands[ilo..ihi] {
                    band.cross.push(e_idx);
                }
            }
        }
        // summed from the top so that the upper bands carry no cancellation
        let mut acc = 0.0;
        for k in (0..nl - 1).rev() {
            acc += by_lo[k + 1];
            bands[k].full = acc;
        }
        let mut g = GridLevels {
            source: m.clone(),
            elems,
            levels,
            mu_at: vec![0.0; nl],
            mu_above: vec![0.0; nl],
            bands,
        };
        for k in 0..nl {
            let above = if k + 1 < nl {
                g.band_eval(k, g.levels[k]).0
            } else {
                0.0
            };
            g.mu_above[k] = above;
            g.mu_at[k] = if k == 0 { above } else { above + jump[k] };
        }
        Ok(g)
    }

    fn volume_to(&self, e: &Element, c: f64) -> f64 {
        if self.source.is_euclidean() {
            sphere_area(self.source.n) * c.powi(self.source.n as i32) / self.source.n as f64
        } else {
            e.va + GaussLegendre::cached(8).integrate(|x| self.source.shell(x), e.a, c)
        }
    }

    /// `(μ(s), μ'(s))` for `s` in band `k`.
    fn band_eval(&self, k: usize, s: f64) -> (f64, f64) {
        let band = &self.bands[k];
        let (mut mu, mut dmu) = (band.full, 0.0);
        for &i in &band.cross {
            let e = &self.elems[i];
            let t = ((s - e.fa) / (e.fb - e.fa)).clamp(0.0, 1.0);
            let c = e.a + t * e.h;
            let vc = self.volume_to(e, c);
            mu += if e.fa > e.fb { vc - e.va } else { e.vb - vc };
            dmu -= self.source.shell(c) * e.h / (e.fb - e.fa).abs();
        }
        (mu, dmu)
    }

    fn top(&self) -> f64 {
        *self.levels.last().expect("nonempty")
    }

    fn distribution(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.mu_at[0];
        }
        if s > self.top() {
            return 0.0;
        }
        let k = self.levels.partition_point(|&l| l < s);
        if self.levels[k] == s {
            self.mu_at[k]
        } else {
            self.band_eval(k - 1, s).0
        }
    }

    /// Largest `s` with `μ(s) ≥ v`, for `0 < v ≤ μ(0+)`.
    fn invert(&self, v: f64) -> f64 {
        let k = self.mu_at.partition_point(|&m| m >= v) - 1;
        if v > self.mu_above[k] || k + 1 == self.levels.len() {
            return self.levels[k];
        }
        let (mut lo, mut hi) = (self.levels[k], self.levels[k + 1]);
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (mu, dmu) = self.band_eval(k, s);
            if mu >= v {
                lo = s;
            } else {
                hi = s;
            }
            let mut next = s - (mu - v) / dmu;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON * s || hi - lo <= 4.0 * f64::EPSILON * hi {
                return next;
            }
            s = next;
        }
        s
    }
}

#[derive(Debug, Clone)]
enum Layers {
    Grid(GridLevels),
    /// `(value, cumulative volume)` with values strictly decreasing and positive.
    Steps(Vec<(f64, f64)>),
}

/// The decreasing rearrangement `ū` of a measured function on a target space.
#[derive(Debug, Clone)]
pub struct Rearrangement {
    target: RadialMetric,
    layers: Layers,
    total: f64,
}

impl Rearrangement {
    pub fn new(f: &MeasuredFunction, target: &RadialMetric) -> Result<Self> {
        let cap = target.ball_volume(target.r_max)?;
        let layers = match f {
            MeasuredFunction::RadialGrid(p, m) => {
                if m.n != target.n {
                    return Err(Error::Dimension {
                        expected: target.n,
                        got: m.n,
                    });
                }
                Layers::Grid(GridLevels::new(p, m)?)
            }
            MeasuredFunction::Histogram(e) => {
                let mut e: Vec<(f64, f64)> = e.iter().copied().filter(|p| p.0 > 0.0).collect();
                e.sort_by(|a, b| b.0.total_cmp(&a.0));
                let mut steps: Vec<(f64, f64)> = Vec::new();
                let mut acc = 0.0;
                for (v, w) in e {
                    acc += w;
                    match steps.last_mut() {
                        Some(last) if last.0 == v => last.1 = acc,
                        _ => steps.push((v, acc)),
                    }
                }
                Layers::Steps(steps)
            }
        };
        let total = match &layers {
            Layers::Grid(g) => g.mu_at[0],
            Layers::Steps(s) => s.last().map_or(0.0, |p| p.1),
        };
        if total == 0.0 {
            return Err(Error::Degenerate("function vanishes identically".into()));
        }
        if total > cap * (1.0 + 1e-12) {
            return Err(Error::Capacity {
                need: total,
                have: cap,
            });
        }
        Ok(Rearrangement {
            target: target.clone(),
            layers,
            total,
        })
    }

    pub fn target(&self) -> &RadialMetric {
        &self.target
    }

    /// Volume of `{f > 0}`.
    pub fn support_volume(&self) -> f64 {
        self.total
    }

    pub fn support_radius(&self) -> f64 {
        self.radius_of(self.total)
    }

    fn radius_of(&self, v: f64) -> f64 {
        let cap = self.target.ball_volume_unchecked(self.target.r_max);
        self.target.ball_radius_unchecked(v.clamp(0.0, cap))
    }

    /// `Vol{f ≥ s}` on the source.
    pub fn distribution(&self, s: f64) -> f64 {
        match &self.layers {
            Layers::Grid(g) => g.distribution(s),
            Layers::Steps(st) => st.iter().rev().find(|p| p.0 >= s).map_or(0.0, |p| p.1),
        }
    }

    /// `ū(ρ)`.
    pub fn value_at(&self, rho: f64) -> f64 {
        let v = self
            .target
            .ball_volume_unchecked(rho.clamp(0.0, self.target.r_max));
        if v >= self.total {
            return 0.0;
        }
        match &self.layers {
            Layers::Grid(g) => {
                if v == 0.0 {
                    g.top()
                } else {
                    g.invert(v)
                }
            }
            Layers::Steps(st) => st.iter().find(|p| v < p.1).map_or(0.0, |p| p.0),
        }
    }

    /// `Vol{ū ≥ s}` on the target, located by bisection on [`Rearrangement::value_at`].
    pub fn target_distribution(&self, s: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.target.r_max);
        if self.value_at(lo) < s {
            return 0.0;
        }
        if self.value_at(hi) >= s {
            return self.target.ball_volume_unchecked(hi);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.value_at(mid) >= s {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
        }
        self.target.ball_volume_unchecked(0.5 * (lo + hi))
    }

    /// `ū` sampled at level radii; histograms give step profiles.
    pub fn profile(&self, per_band: usize) -> Result<RadialProfile> {
        let mut nodes: Vec<(f64, f64)> = Vec::new();
        let push = |r: f64, v: f64, nodes: &mut Vec<(f64, f64)>| match nodes.last() {
            Some(&(lr, _)) if r <= lr => {}
            _ => nodes.push((r, v)),
        };
        match &self.layers {
            Layers::Steps(st) => {
                let mut r0 = 0.0;
                for &(v, cum) in st {
                    let r1 = self.radius_of(cum);
                    nodes.push((r0, v));
                    nodes.push((r1, v));
                    r0 = r1;
                }
                nodes.push((r0, 0.0));
            }
            Layers::Grid(g) => {
                let nl = g.levels.len();
                let top = g.top();
                nodes.push((0.0, top));
                push(self.radius_of(g.mu_at[nl - 1]), top, &mut nodes);
                for k in (0..nl - 1).rev() {
                    let (l0, l1) = (g.levels[k], g.levels[k + 1]);
                    for j in (1..=per_band).rev() {
                        let s = l0 + (l1 - l0) * j as f64 / (per_band + 1) as f64;
                        push(self.radius_of(g.band_eval(k, s).0), s, &mut nodes);
                    }
                    push(self.radius_of(g.mu_above[k]), l0, &mut nodes);
                    if k > 0 {
                        push(self.radius_of(g.mu_at[k]), l0, &mut nodes);
                    }
                }
                if nodes.last().expect("nonempty").1 != 0.0 {
                    let r = nodes.last().expect("nonempty").0;
                    nodes.push((r, 0.0));
                }
            }
        }
        let (r, v) = nodes.into_iter().unzip();
        RadialProfile::new(r, v, Boundary::CompactSupport)
    }

    /// `∫ ū^q dμ_K`, integrated against `|dμ(s)|`.
    pub fn norm_power(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        let g = match &self.layers {
            Layers::Steps(st) => {
                let mut prev = 0.0;
                let mut total = 0.0;
                for &(v, cum) in st {
                    let (r0, r1) = (self.radius_of(prev), self.radius_of(cum));
                    let dv = self.target.ball_volume_unchecked(r1)
                        - self.target.ball_volume_unchecked(r0);
                    total += v.powf(q) * dv;
                    prev = cum;
                }
                return Ok(total);
            }
            Layers::Grid(g) => g,
        };
        let mut total = 0.0;
        for k in 0..g.bands.len() {
            let (l0, l1) = (g.levels[k], g.levels[k + 1]);
            let band = if l0 == 0.0 {
                integrate_endpoint_power(|s| -g.band_eval(k, s).1, l1, q, QUAD_REL, 0.0)?
            } else {
                integrate(|s| -s.powf(q) * g.band_eval(k, s).1, l0, l1, QUAD_REL, 0.0)?
            };
            total += band.value;
        }
        for k in 1..g.levels.len() {
            total += g.levels[k].powf(q) * (g.mu_at[k] - g.mu_above[k]);
        }
        Ok(total)
    }

    /// `∫|∇ū|²`, via `∫ shell_K(ρ(s))² / |μ'(s)| ds`.
    pub fn energy(&self) -> Result<f64> {
        let g = match &self.layers {
            Layers::Steps(_) => {
                return Err(Error::Representation(
                    "a histogram rearranges to a step function".into(),
                ))
            }
            Layers::Grid(g) => g,
        };
        let mut total = 0.0;
        for k in 0..g.bands.len() {
            let f = |s: f64| {
                let (mu, dmu) = g.band_eval(k, s);
                let a = self.target.shell(self.radius_of(mu));
                if dmu == 0.0 {
                    // only at a top level reached by a single pole crossing
                    return 0.0;
                }
                a * a / -dmu
            };
            total += integrate(f, g.levels[k], g.levels[k + 1], QUAD_REL, 0.0)?.value;
        }
        Ok(total)
    }

    /// Gagliardo-Nirenberg quotient of `ū` from its exact integrals.
    pub fn quotient(&self, params: &GNParams) -> Result<f64> {
        let a = params.alpha;
        quotient_value(
            params,
            self.energy()?,
            self.norm_power(a + 1.0)?,
            self.norm_power(2.0 * a)?,
        )
    }
}

/// The rearranged profile of `f` on `target`.
pub fn rearrange(f: &MeasuredFunction, target: &RadialMetric) -> Result<RadialProfile> {
    Rearrangement::new(f, target)?.profile(LEVELS_PER_BAND)
}

/// `(∫ f^q, ∫ ū^q)`.
pub fn norms_check(f: &MeasuredFunction, u_bar: &Rearrangement, q: f64) -> Result<(f64, f64)> {
    Ok((f.norm_power(q)?, u_bar.norm_power(q)?))
}

/// `(∫|∇f|², ∫|∇ū|²)`.
pub fn dirichlet_check(f: &MeasuredFunction, u_bar: &Rearrangement) -> Result<(f64, f64)> {
    Ok((f.energy()?, u_bar.energy()?))
}

/// Random nonnegative, generally non-monotone profile on `[0, r_end]`, zero at `r_end`.
pub fn random_source(seed: u64, r_end: f64, nodes: usize) -> Result<RadialProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<(f64, f64)> = (1..=5)
        .map(|k| {
            (
                rng.gen_range(-0.8..0.8) / k as f64,
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let base = rng.gen_range(0.3..1.0);
    let f = |r: f64| {
        let x = r / r_end;
        let osc: f64 = amps
            .iter()
            .enumerate()
            .map(|(k, (a, ph))| a * ((k + 1) as f64 * std::f64::consts::PI * x + ph).cos())
            .sum();
        ((1.0 - x * x) * (base + osc)).max(0.0)
    };
    RadialProfile::sample(f, uniform_grid(0.0, r_end, nodes), Boundary::CompactSupport)
}
