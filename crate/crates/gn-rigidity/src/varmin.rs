//! Direct minimization of the Gagliardo-Nirenberg quotient over P1 radial profiles on a ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{exponents, GNParams, Regime};
use crate::error::{Error, Result};
use crate::functionals::family::h_extremal;
use crate::functionals::profile::{uniform_grid, Assembly, Boundary, RadialProfile};
use crate::functionals::quotients::quotient_value;
use crate::geometry::RadialMetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    Bump,
    Extremal,
    Random(u64),
}

impl std::str::FromStr for Init {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(Init::Bump),
            "extremal" => Ok(Init::Extremal),
            _ => s
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(Init::Random)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "unknown init {s:?} (bump | extremal | random:SEED)"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub grid_nodes: usize,
    pub ball_radius: f64,
    pub max_iters: usize,
    /// Stop when the largest nodal change falls below this fraction of `max u`.
    pub step_tol: f64,
    /// Stop when the predicted relative decrease `g·P⁻¹g` of the quotient falls below this.
    pub value_tol: f64,
    pub init: Init,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            grid_nodes: 1024,
            ball_radius: 4.0,
            max_iters: 5000,
            step_tol: 1e-12,
            value_tol: 1e-9,
            init: Init::Bump,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self, metric: &RadialMetric) -> Result<()> {
        if self.grid_nodes < 128 {
            return Err(Error::Config(format!(
                "grid_nodes must be at least 128, got {}",
                self.grid_nodes
            )));
        }
        if !(self.step_tol > 0.0) || !(self.value_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(self.ball_radius > metric.r_min()) || self.ball_radius > metric.r_max {
            return Err(Error::Config(format!(
                "ball_radius {} must lie in ({}, r_max = {}]",
                self.ball_radius,
                metric.r_min(),
                metric.r_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult {
    pub value: f64,
    #[serde(skip)]
    pub profile: RadialProfile,
    pub iterations: usize,
    pub converged: bool,
    pub initial_value: f64,
    /// Quotient after each accepted step.
    #[serde(skip)]
    pub history: Vec<f64>,
    pub config: MinimizeConfig,
}

/// `log Q = log E + c1 log ∫u^{α+1} + c2 log ∫u^{2α}`: returns `(c1, c2)`.
fn log_weights(params: &GNParams) -> (f64, f64) {
    let a = params.alpha;
    let e = exponents(params).interp;
    match params.regime {
        Regime::Minus => (-2.0 / (e * (a + 1.0)), (1.0 - e) / (e * a)),
        Regime::Plus => (2.0 * (1.0 - e) / (e * (a + 1.0)), -1.0 / (e * a)),
    }
}

struct Objective<'a> {
    asm: &'a Assembly,
    params: &'a GNParams,
}

impl Objective<'_> {
    fn parts(&self, u: &[f64]) -> (f64, f64, f64) {
        let a = self.params.alpha;
        (
            self.asm.energy(u),
            self.asm.power(u, a + 1.0),
            self.asm.power(u, 2.0 * a),
        )
    }

    fn value(&self, u: &[f64]) -> Result<f64> {
        let (e, p1, p2) = self.parts(u);
        quotient_value(self.params, e, p1, p2)
    }

    /// Gradient of `log Q`.
    fn log_grad(&self, u: &[f64]) -> Vec<f64> {
        let a = self.params.alpha;
        let (e, p1, p2) = self.parts(u);
        let (c1, c2) = log_weights(self.params);
        let n = u.len();
        let (mut ge, mut g1, mut g2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        self.asm.energy_grad(u, &mut ge);
        self.asm.power_grad(u, a + 1.0, &mut g1);
        self.asm.power_grad(u, 2.0 * a, &mut g2);
        (0..n)
            .map(|i| ge[i] / e + c1 * g1[i] / p1 + c2 * g2[i] / p2)
            .collect()
    }
}

/// Nodal gradient of the quotient (compactly supported profiles, fixed quadrature).
pub fn quotient_gradient(
    profile: &RadialProfile,
    metric: &RadialMetric,
    params: &GNParams,
) -> Result<Vec<f64>> {
    if profile.boundary() != Boundary::CompactSupport {
        return Err(Error::Representation(
            "nodal gradients need a compactly supported profile".into(),
        ));
    }
    if profile.is_zero() {
        return Err(Error::Degenerate("zero profile".into()));
    }
    let asm = Assembly::new(profile.radii(), metric, false)?;
    let obj = Objective { asm: &asm, params };
    let q = obj.value(profile.values())?;
    Ok(obj
        .log_grad(profile.values())
        .into_iter()
        .map(|g| q * g)
        .collect())
}

/// Solve the symmetric tridiagonal system `(d, o) x = b` (Thomas algorithm).
fn solve_tridiagonal(d: &[f64], o: &[f64], b: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut den = d[0];
    x[0] = b[0] / den;
    for i in 1..n {
        c[i - 1] = o[i - 1] / den;
        den = d[i] - o[i - 1] * c[i - 1];
        x[i] = (b[i] - o[i - 1] * x[i - 1]) / den;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

fn initial_values(radii: &[f64], params: &GNParams, init: Init) -> Vec<f64> {
    let (lo, hi) = (radii[0], *radii.last().expect("nonempty"));
    let s = |r: f64| (r - lo) / (hi - lo);
    let bump = |r: f64| {
        let x = s(r).min(1.0);
        (1.0 - x) * (1.0 - x) * (1.0 + 2.0 * x)
    };
    let mut u: Vec<f64> = match init {
        Init::Bump => radii.iter().map(|&r| bump(r)).collect(),
        Init::Extremal => {
            let a = params.alpha;
            match params.regime {
                // support filling the ball
                Regime::Minus => {
                    let lam = (1.0 - a) * (hi - lo) * (hi - lo);
                    radii.iter().map(|&r| h_extremal(a, lam, r - lo)).collect()
                }
                Regime::Plus => {
                    let ell = hi / 6.0;
                    radii
                        .iter()
                        .map(|&r| h_extremal(a, 1.0, (r - lo) / ell))
                        .collect()
                }
            }
        }
        Init::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            radii
                .iter()
                .map(|&r| bump(r) * rng.gen_range(0.5..1.5))
                .collect()
        }
    };
    *u.last_mut().expect("nonempty") = 0.0;
    u
}

/// Discrete radial minimizer of the quotient on the ball `[r_min, ball_radius]`, zero at the
/// outer radius.
///
/// Preconditioned projected descent on `log Q` with Armijo backtracking.
///
/// The direction is the gradient preconditioned by `2K/E + 2M/∫u²` (stiffness and mass
/// matrices), the last node is held at zero and negative values are clipped.
pub fn minimize_quotient(
    metric: &RadialMetric,
    params: &GNParams,
    config: &MinimizeConfig,
) -> Result<MinimizeResult> {
    config.validate(metric)?;
    if metric.n != params.n {
        return Err(Error::Dimension {
            expected: params.n,
            got: metric.n,
        });
    }
    let radii = uniform_grid(metric.r_min(), config.ball_radius, config.grid_nodes);
    let asm = Assembly::new(&radii, metric, false)?;
    let obj = Objective { asm: &asm, params };
    let (kd, ko, md, mo) = asm.tridiagonal();
    let free = radii.len() - 1;
    let mut u = initial_values(&radii, params, config.init);
    let mut q = obj.value(&u)?;
    let initial_value = q;
    let mut history = Vec::new();
    let mut step = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    let pinned_at_zero = 2.0 * params.alpha < 1.0 && log_weights(params).1 > 0.0;
    while iterations < config.max_iters {
        iterations += 1;
        let g = obj.log_grad(&u);
        let e = asm.energy(&u);
        let l2 = asm.power(&u, 2.0);
        let mut d: Vec<f64> = (0..free)
            .map(|i| 2.0 * kd[i] / e + 2.0 * md[i] / l2)
            .collect();
        let mut o: Vec<f64> = (0..free - 1)
            .map(|i| 2.0 * ko[i] / e + 2.0 * mo[i] / l2)
            .collect();
        let mut b = g[..free].to_vec();
        // active set: zero nodes pushed downward stay put, and with 2α < 1 every zero node
        // does (∫u^{2α} has infinite slope at u = 0)
        for i in (0..free).filter(|&i| u[i] == 0.0 && (pinned_at_zero || g[i] >= 0.0)) {
            d[i] = 1.0;
            b[i] = 0.0;
            if i > 0 {
                o[i - 1] = 0.0;
            }
            if i < free - 1 {
                o[i] = 0.0;
            }
        }
        let mut dir = solve_tridiagonal(&d, &o, &b);
        dir.push(0.0);
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        if !(slope > config.value_tol) {
            converged = true;
            break;
        }
        let log_q = q.ln();
        let mut s = (2.0 * step).min(4.0);
        let mut accepted = None;
        while s > 1e-12 {
            let trial: Vec<f64> = u
                .iter()
                .zip(&dir)
                .map(|(x, d)| (x - s * d).max(0.0))
                .collect();
            if let Ok(qt) = obj.value(&trial) {
                let moved: f64 = g
                    .iter()
                    .zip(u.iter().zip(&trial))
                    .map(|(gi, (a, b))| gi * (a - b))
                    .sum();
                if qt.is_finite() && qt.ln() <= log_q - 1e-4 * moved.max(0.0) && qt <= q {
                    accepted = Some((trial, qt));
                    break;
                }
            }
            s *= 0.5;
        }
        let Some((trial, qt)) = accepted else {
            break;
        };
        let umax = trial.iter().fold(0.0f64, |m, x| m.max(*x));
        let du = u
            .iter()
            .zip(&trial)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        u = trial;
        q = qt;
        history.push(q);
        step = s;
        if du < config.step_tol * umax {
            converged = true;
            break;
        }
    }
    let profile = RadialProfile::new(radii, u, Boundary::CompactSupport)?;
    Ok(MinimizeResult {
        value: q,
        profile,
        iterations,
        converged,
        initial_value,
        history,
        config: *config,
    })
}

/// Best `c·h_extremal(α, 1, r/ℓ)` through the recovered profile's center value and
/// half-height radius; returns `(c, ℓ)`.
pub fn fit_extremal_shape(profile: &RadialProfile, alpha: f64) -> Result<(f64, f64)> {
    let (r, u) = (profile.radii(), profile.values());
    let c = u[0];
    if !(c > 0.0) {
        return Err(Error::Degenerate("profile vanishes at the center".into()));
    }
    let k = u
        .iter()
        .position(|&v| v < 0.5 * c)
        .ok_or_else(|| Error::Degenerate("no half-height crossing".into()))?;
    let t = (u[k - 1] - 0.5 * c) / (u[k - 1] - u[k]);
    let r_half = r[k - 1] + t * (r[k] - r[k - 1]);
    // (1 + (α-1) s²)^{1/(1-α)} = 1/2 at s = s_half
    let s_half = if (alpha - 1.0).abs() < 1e-12 {
        2f64.ln().sqrt()
    } else {
        ((2f64.powf(alpha - 1.0) - 1.0) / (alpha - 1.0)).sqrt()
    };
    Ok((c, r_half / s_half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::sharp_constant;
    use crate::functionals::family::extremal_profile;
    use crate::tolerances::VARMIN_REL;

    fn euclid(n: usize) -> RadialMetric {
        RadialMetric::euclidean(n, 1e3).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = GNParams::new(3, 0.6).unwrap();
        let m = euclid(3);
        let prof = RadialProfile::sample(
            |r| (1.0 - r * r / 4.0).max(0.0).powi(2) * (1.0 + 0.2 * (3.0 * r).sin()),
            uniform_grid(0.0, 2.0, 200),
            Boundary::CompactSupport,
        )
        .unwrap();
        let g = quotient_gradient(&prof, &m, &p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let i = rng.gen_range(0..199);
            let h = 1e-6;
            let mut up = prof.values().to_vec();
            let mut dn = prof.values().to_vec();
            up[i] += h;
            dn[i] -= h;
            let fd = (crate::functionals::gn_quotient(&prof.with_values(up).unwrap(), &m, &p)
                .unwrap()
                - crate::functionals::gn_quotient(&prof.with_values(dn).unwrap(), &m, &p).unwrap())
                / (2.0 * h);
            assert!(
                (fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1e-3),
                "node {i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn zero_and_decaying_profiles_rejected() {
        let p = GNParams::new(3, 0.6).unwrap();
        let z = RadialProfile::sample(
            |_| 0.0,
            uniform_grid(0.0, 1.0, 100),
            Boundary::CompactSupport,
        )
        .unwrap();
        assert!(quotient_gradient(&z, &euclid(3), &p).is_err());
        let p = GNParams::new(3, 1.2).unwrap();
        let e = extremal_profile(&p, 1.0, 200).unwrap();
        assert!(quotient_gradient(&e, &euclid(3), &p).is_err());
    }

    #[test]
    fn tridiagonal_solver() {
        let (d, o) = (vec![4.0, 5.0, 6.0], vec![1.0, 2.0]);
        let x = solve_tridiagonal(&d, &o, &[1.0, 2.0, 3.0]);
        let r = [
            4.0 * x[0] + x[1],
            x[0] + 5.0 * x[1] + 2.0 * x[2],
            2.0 * x[1] + 6.0 * x[2],
        ];
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn recovers_sharp_constant_from_bump() {
        for (n, a) in [(3, 0.5), (3, 1.2)] {
            let p = GNParams::new(n, a).unwrap();
            let r = minimize_quotient(&euclid(n), &p, &MinimizeConfig::default()).unwrap();
            let s = sharp_constant(n, a, p.regime).unwrap();
            assert!(
                r.value >= s * (1.0 - 1e-9),
                "below the infimum: {} vs {s}",
                r.value
            );
            assert!(
                (r.value - s) / s < VARMIN_REL,
                "n={n} a={a}: {} vs {s} after {}",
                r.value,
                r.iterations
            );
        }
    }

    #[test]
    fn extremal_init_converges_fast() {
        let p = GNParams::new(3, 0.5).unwrap();
        let cfg = MinimizeConfig {
            init: Init::Extremal,
            ..MinimizeConfig::default()
        };
        let r = minimize_quotient(&euclid(3), &p, &cfg).unwrap();
        assert!(
            r.converged && r.iterations <= 5,
            "{} iterations",
            r.iterations
        );
    }

    #[test]
    fn deterministic_random_init() {
        let p = GNParams::new(4, 0.4).unwrap();
        let cfg = MinimizeConfig {
            init: Init::Random(11),
            max_iters: 30,
            ..MinimizeConfig::default()
        };
        let a = minimize_quotient(&euclid(4), &p, &cfg).unwrap();
        let b = minimize_quotient(&euclid(4), &p, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.profile, b.profile);
        assert!(a.value <= a.initial_value);
    }

    #[test]
    fn plus_minimizer_has_extremal_shape() {
        let a = 1.2;
        let p = GNParams::new(3, a).unwrap();
        let r = minimize_quotient(&euclid(3), &p, &MinimizeConfig::default()).unwrap();
        let (c, ell) = fit_extremal_shape(&r.profile, a).unwrap();
        let half = 0.5 * r.profile.r_end();
        let worst = r
            .profile
            .radii()
            .iter()
            .zip(r.profile.values())
            .filter(|(x, _)| **x <= half)
            .map(|(x, v)| {
                let h = c * h_extremal(a, 1.0, x / ell);
                (v - h).abs() / h
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-2, "max relative deviation {worst} (ℓ = {ell})");
    }

    fn projected_norm(g: &[f64], u: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
        (0..u.len() - 1)
            .filter(|&i| keep(i))
            .map(|i| if u[i] == 0.0 { g[i].min(0.0) } else { g[i] })
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn projected_gradient_vanishes_at_discrete_extremal() {
        let m = euclid(3);
        // Minus with a C³ support edge
        let a = 0.7;
        let p = GNParams::new(3, a).unwrap();
        let prof = RadialProfile::sample(
            |r| h_extremal(a, (1.0 - a) * 4.0, r),
            uniform_grid(0.0, 4.0, 4096),
            Boundary::CompactSupport,
        )
        .unwrap();
        let g = quotient_gradient(&prof, &m, &p).unwrap();
        assert!(projected_norm(&g, prof.values(), |_| true) < 1e-4);
        // Plus: away from the layer next to the Dirichlet cut
        let a = 1.2;
        let p = GNParams::new(3, a).unwrap();
        let mut v: Vec<f64> = uniform_grid(0.0, 4.0, 4096)
            .iter()
            .map(|r| h_extremal(a, 1.0, r / 0.6))
            .collect();
        *v.last_mut().unwrap() = 0.0;
        let prof =
            RadialProfile::new(uniform_grid(0.0, 4.0, 4096), v, Boundary::CompactSupport).unwrap();
        let g = quotient_gradient(&prof, &m, &p).unwrap();
        assert!(projected_norm(&g, prof.values(), |i| prof.radii()[i] <= 2.0) < 1e-4);
    }

    #[test]
    fn descent_is_monotone() {
        let p = GNParams::new(3, 0.7).unwrap();
        let r = minimize_quotient(
            &euclid(3),
            &p,
            &MinimizeConfig {
                max_iters: 200,
                ..MinimizeConfig::default()
            },
        )
        .unwrap();
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.history[0] <= r.initial_value);
    }

    #[test]
    fn sphere_minimizer_falls_below_sharp_constant() {
        // documented probe: n = 3, α = 1/2 on the unit sphere, balls of radius 0.25 and r_max
        let p = GNParams::new(3, 0.5).unwrap();
        let s = sharp_constant(3, 0.5, p.regime).unwrap();
        let m =
            RadialMetric::space_form(3, 1.0, RadialMetric::space_form_max_chart(1.0, 3.0)).unwrap();
        let small = minimize_quotient(
            &m,
            &p,
            &MinimizeConfig {
                ball_radius: 0.25,
                ..MinimizeConfig::default()
            },
        )
        .unwrap();
        let big = minimize_quotient(
            &m,
            &p,
            &MinimizeConfig {
                ball_radius: m.r_max,
                ..MinimizeConfig::default()
            },
        )
        .unwrap();
        assert!(big.value < small.value);
        assert!(
            big.value < s * (1.0 - 10.0 * VARMIN_REL),
            "{} vs {s}",
            big.value
        );
    }

    #[test]
    fn config_validation() {
        let m = euclid(3);
        assert!(MinimizeConfig {
            grid_nodes: 64,
            ..MinimizeConfig::default()
        }
        .validate(&m)
        .is_err());
        assert!(MinimizeConfig {
            ball_radius: 2e3,
            ..MinimizeConfig::default()
        }
        .validate(&m)
        .is_err());
        assert!(MinimizeConfig {
            value_tol: 0.0,
            ..MinimizeConfig::default()
        }
        .validate(&m)
        .is_err());
        assert_eq!("random:5".parse::<Init>().unwrap(), Init::Random(5));
        assert!("random:x".parse::<Init>().is_err());
    }
}
