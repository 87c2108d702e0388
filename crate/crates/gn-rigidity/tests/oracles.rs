//! Independent routes to values the library computes in closed form.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gn_rigidity::constants::{c_coefficients, gamma_exponent, GNParams};
use gn_rigidity::geometry::algebraic::{random_symmetric, CurvatureTensor};
use gn_rigidity::geometry::{volume_density, RadialMetric};
use gn_rigidity::specfun::{
    beta, gamma, ln_gamma, script_beta, sphere_area, sphere_avg2, sphere_avg4, Tensor4,
};

#[path = "support/raw_coefficients.rs"]
mod raw_coefficients;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gamma_and_beta_against_statrs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let x: f64 = rng.gen_range(0.05..40.0);
        // statrs itself drifts to about 2e-13 near x = 30
        assert!(
            rel(gamma(x), statrs::function::gamma::gamma(x)) < 1e-12,
            "gamma({x})"
        );
        let l = statrs::function::gamma::ln_gamma(x);
        assert!(
            (ln_gamma(x) - l).abs() < 1e-13 * l.abs().max(1.0),
            "ln_gamma({x})"
        );
        let y: f64 = rng.gen_range(0.05..40.0);
        let b = statrs::function::beta::beta(x, y);
        assert!(rel(beta(x, y).unwrap(), b) < 1e-12, "beta({x}, {y})");
    }
    // negative non-integers through the reflection formula
    for x in [-0.5, -1.5, -2.25, -3.7] {
        let g = statrs::function::gamma::gamma(x);
        assert!(rel(gamma(x), g) < 1e-12, "gamma({x})");
    }
}

/// Uniform point on `S^{n-1}` from normalized Gaussians.
fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n)
        .map(|_| {
            let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect();
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / r).collect()
}

#[test]
fn sphere_averages_against_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let samples = 200_000;
    for n in [3, 4, 6] {
        let a = random_symmetric(n, &mut rng);
        let am = DMatrix::from_row_slice(n, n, &a);
        let lam = CurvatureTensor::random(n, &mut rng).v_tensor();
        let (mut s2, mut s4, mut q4) = (0.0, 0.0, 0.0);
        for _ in 0..samples {
            let x = unit_vector(n, &mut rng);
            let mut v2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    v2 += a[i * n + j] * x[i] * x[j];
                }
            }
            let mut v4 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            v4 += lam.get(i, j, k, l) * x[i] * x[j] * x[k] * x[l];
                        }
                    }
                }
            }
            s2 += v2;
            s4 += v4;
            q4 += v4 * v4;
        }
        let om = sphere_area(n);
        let m2 = om * s2 / samples as f64;
        let m4 = om * s4 / samples as f64;
        let sd4 =
            om * ((q4 / samples as f64 - (s4 / samples as f64).powi(2)) / samples as f64).sqrt();
        let e2 = sphere_avg2(n, &am).unwrap();
        let e4 = sphere_avg4(n, &lam).unwrap();
        let scale2 = om * a.iter().map(|x| x.abs()).sum::<f64>();
        assert!((m2 - e2).abs() < 0.02 * scale2, "n={n}: {m2} vs {e2}");
        assert!(
            (m4 - e4).abs() < 5.0 * sd4,
            "n={n}: {m4} vs {e4} (sd {sd4})"
        );
    }
}

#[test]
fn sphere_average_of_constant_tensor() {
    // |x|⁴ = 1 on the sphere
    for n in [2, 3, 5, 7] {
        let t = Tensor4::from_fn(n, |i, j, k, l| ((i == j) && (k == l)) as u8 as f64);
        assert!(rel(sphere_avg4(n, &t).unwrap(), sphere_area(n)) < 1e-14);
    }
}

#[test]
fn volume_density_taylor_coefficients() {
    // finite-difference extraction of the r² and r⁴ coefficients of the space-form density
    for n in [3, 4, 6] {
        for k in [1.0, -1.0, 0.3] {
            let m = RadialMetric::space_form(n, k, 1.0).unwrap();
            let d = |r: f64| volume_density(&m, r).unwrap();
            let mm = (n - 1) as f64;
            let c2 = -mm * k / 6.0;
            let c4 = k * k * (mm / 120.0 + mm * (mm - 1.0) / 72.0);
            // g(h) = (d(h) - 1)/h² = c2 + c4 x + c6 x² + O(x³) with x = h², solved on three steps
            let g = |h: f64| (d(h) - 1.0) / (h * h);
            let x = [0.04f64.powi(2), 0.02f64.powi(2), 0.01f64.powi(2)];
            let vm = nalgebra::Matrix3::from_fn(|i, j| x[i].powi(j as i32));
            let rhs = nalgebra::Vector3::from_fn(|i, _| g(x[i].sqrt()));
            let sol = vm.lu().solve(&rhs).unwrap();
            let (c2_fd, c4_fd) = (sol[0], sol[1]);
            assert!((c2_fd - c2).abs() < 1e-8, "n={n} K={k}: {c2_fd} vs {c2}");
            assert!(
                (c4_fd - c4).abs() < 1e-6 * c4.abs().max(1e-3),
                "n={n} K={k}: {c4_fd} vs {c4}"
            );
            // the r² coefficient is -Rc(x,x)/6 with Rc = (n-1)K δ
            let sc = mm * n as f64 * k;
            assert!((c2 + sc / (6.0 * n as f64)).abs() < 1e-15);
        }
    }
}

#[test]
fn coefficients_against_raw_displays() {
    let mut worst: f64 = 0.0;
    for n in 3..=10 {
        for i in 1..40 {
            let a = i as f64 * 0.035;
            if GNParams::new(n, a).is_err() {
                continue;
            }
            let Ok(c) = c_coefficients(n, a) else {
                continue;
            };
            let raw = raw_coefficients::raw_c(n, a);
            for (x, y) in c.as_array().iter().zip(raw) {
                let e = rel(y, *x);
                assert!(e.is_finite(), "n={n} alpha={a}: {y} vs {x}");
                worst = worst.max(e);
            }
        }
    }
    assert!(worst < 1e-10, "worst {worst}");
}
