//! Small-t polynomial fits of sampled series.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Fitted `c0 + c1 t + c2 t² + …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Max deviation of the model over the samples, relative to the largest sample.
    pub residual: f64,
    /// Change of `c1 t_max` and `c2 t_max²` between the two best polynomial degrees,
    /// relative to the largest sample.
    pub stability: f64,
    pub degree: usize,
    pub reliable: bool,
    /// `(t, value)`, strictly decreasing in `t`.
    pub t_samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Fit a free constant term (otherwise `c0 = 0` is imposed).
    pub with_c0: bool,
    pub min_degree: usize,
    pub max_degree: usize,
    /// `stability` above this marks the fit unreliable.
    pub stability_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            with_c0: true,
            min_degree: 3,
            max_degree: 6,
            stability_tol: 1e-3,
        }
    }
}

/// Least-squares coefficients `[c0, c1, …, c_deg]` in `s = t/t_max`, rescaled to `t`.
fn lsq(samples: &[(f64, f64)], deg: usize, with_c0: bool, t_max: f64) -> Result<Vec<f64>> {
    let first = usize::from(!with_c0);
    let cols = deg + 1 - first;
    if samples.len() < cols + 1 {
        return Err(domain(format!(
            "{} samples cannot fit {cols} coefficients",
            samples.len()
        )));
    }
    let scale = samples
        .iter()
        .fold(0.0f64, |m, s| m.max(s.1.abs()))
        .max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(samples.len(), cols, |i, j| {
        (samples[i].0 / t_max).powi((j + first) as i32)
    });
    let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1 / scale));
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let mut c = vec![0.0; deg + 1];
    for j in 0..cols {
        c[j + first] = x[j] * scale / t_max.powi((j + first) as i32);
    }
    Ok(c)
}

fn max_residual(samples: &[(f64, f64)], c: &[f64]) -> f64 {
    let scale = samples
        .iter()
        .fold(0.0f64, |m, s| m.max(s.1.abs()))
        .max(f64::MIN_POSITIVE);
    samples
        .iter()
        .map(|&(t, v)| {
            let model: f64 = c
                .iter()
                .enumerate()
                .map(|(k, ck)| ck * t.powi(k as i32))
                .sum();
            (model - v).abs()
        })
        .fold(0.0, f64::max)
        / scale
}

/// Fit with default options (free `c0`, degrees 3..=6).
pub fn fit_series(samples: &[(f64, f64)]) -> Result<SeriesFit> {
    fit_series_with(samples, FitOptions::default())
}

/// Polynomial least squares on the sampled grid for each degree in `min..=max`; the reported
/// degree is the one whose `(c1 t_max, c2 t_max²)` moves least when the degree is raised by one.
pub fn fit_series_with(samples: &[(f64, f64)], opts: FitOptions) -> Result<SeriesFit> {
    if samples.len() < 6 {
        return Err(domain(format!(
            "need at least 6 samples, got {}",
            samples.len()
        )));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| b.0.total_cmp(&a.0));
    if s.windows(2).any(|w| !(w[0].0 > w[1].0)) || s.last().expect("nonempty").0 <= 0.0 {
        return Err(domain("sample times must be positive and distinct"));
    }
    if s.iter().any(|p| !p.1.is_finite()) {
        return Err(domain("non-finite sample value"));
    }
    let t_max = s[0].0;
    let t_min = s.last().expect("nonempty").0;
    if t_max / t_min < 100.0 * (1.0 - 1e-9) && samples.len() < 8 {
        return Err(domain("samples must span two decades of t"));
    }
    let cap = (s.len() - 2 + usize::from(!opts.with_c0)).min(opts.max_degree);
    let lo = opts.min_degree.max(2).min(cap);
    let fits: Vec<Vec<f64>> = (lo..=cap)
        .map(|d| lsq(&s, d, opts.with_c0, t_max))
        .collect::<Result<_>>()?;
    // changes are weighed by their contribution at t_max, so a vanishing c1 is not
    // mistaken for an unstable one
    let scale = s
        .iter()
        .fold(0.0f64, |m, p| m.max(p.1.abs()))
        .max(f64::MIN_POSITIVE);
    let (mut best, mut change) = (fits.len() - 1, f64::INFINITY);
    for k in 0..fits.len().saturating_sub(1) {
        let d1 = (fits[k][1] - fits[k + 1][1]).abs() * t_max / scale;
        let d2 = (fits[k][2] - fits[k + 1][2]).abs() * t_max * t_max / scale;
        let ch = d1.max(d2);
        if ch < change {
            change = ch;
            best = k;
        }
    }
    if fits.len() == 1 {
        change = 0.0;
    }
    let c = &fits[best];
    let residual = max_residual(&s, c);
    Ok(SeriesFit {
        c0: c[0],
        c1: c[1],
        c2: c[2],
        residual,
        stability: change,
        degree: lo + best,
        reliable: change <= opts.stability_tol,
        t_samples: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(t_max: f64, count: usize, ratio: f64) -> Vec<f64> {
        (0..count)
            .map(|k| t_max * ratio.powi(-(k as i32)))
            .collect()
    }

    #[test]
    fn exact_quadratic() {
        let s: Vec<_> = geometric(0.1, 10, 2.0)
            .into_iter()
            .map(|t| (t, 3.0 * t - 5.0 * t * t))
            .collect();
        let f = fit_series(&s).unwrap();
        assert!(
            (f.c1 - 3.0).abs() < 1e-10 && (f.c2 + 5.0).abs() < 1e-8,
            "{f:?}"
        );
        assert!(f.residual < 1e-13);
        assert!(f.c0.abs() < 1e-12);
    }

    #[test]
    fn cubic_contamination() {
        let s: Vec<_> = geometric(0.1, 12, 10f64.powf(2.0 / 11.0))
            .into_iter()
            .map(|t| (t, 3.0 * t - 5.0 * t * t + 7.0 * t.powi(3)))
            .collect();
        let f = fit_series(&s).unwrap();
        assert!(
            (f.c1 - 3.0).abs() < 1e-4 && (f.c2 + 5.0).abs() < 1e-2,
            "{f:?}"
        );
    }

    #[test]
    fn noisy_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s: Vec<_> = geometric(0.1, 10, 2.0)
            .into_iter()
            .map(|t| (t, 3.0 * t - 5.0 * t * t + 1e-9 * rng.gen_range(-1.0..1.0)))
            .collect();
        let f = fit_series(&s).unwrap();
        assert!((f.c1 - 3.0).abs() < 1e-5, "{f:?}");
        assert!(f.residual > 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_series(&[(0.1, 1.0); 3]).is_err());
        let s: Vec<_> = (0..6).map(|k| (0.1, k as f64)).collect();
        assert!(fit_series(&s).is_err());
    }
}
