use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gn_rigidity::constants::{gamma_exponent, sharp_constant, tau_star, theta_exponent, GNParams};
use gn_rigidity::expansion::fit_series;
use gn_rigidity::functionals::profile::{edge_clustered_grid, Boundary, RadialProfile};
use gn_rigidity::functionals::{gn_quotient, yamabe_type_quotient};
use gn_rigidity::geometry::algebraic::{random_symmetric, CurvatureTensor};
use gn_rigidity::geometry::{decomposition_residual, CurvatureAtPole, RadialMetric};
use gn_rigidity::ranges::{admissible_range, quadratic_condition, Provenance, RangeCase};
use gn_rigidity::specfun::{
    beta, e_op, moment_closed, moment_quad, script_beta, MomentSpec, Tensor4,
};
use gn_rigidity::symmetrize::{norms_check, random_source, MeasuredFunction, Rearrangement};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #[test]
    fn beta_shift_ratio(p in 0.01f64..20.0, q in 0.01f64..20.0) {
        let r = beta(p + 1.0, q).unwrap() / beta(p, q).unwrap();
        prop_assert!(rel(r, p / (p + q)) < 1e-12);
    }

    #[test]
    fn reflected_ratio_changes_sign(p in 0.01f64..15.0, gap in 0.01f64..15.0) {
        let q = -p - gap;
        let r = script_beta(p + 1.0, q).unwrap() / script_beta(p, q).unwrap();
        prop_assert!(rel(r, -p / (p + q)) < 1e-12);
    }

    #[test]
    fn quotient_identity_positive_branch(p in 0.01f64..15.0, q in 0.01f64..15.0) {
        let r = script_beta(p, q + 2.0).unwrap() / script_beta(p, q).unwrap();
        let expect = (q + 1.0) / (p + q + 1.0) * (q / (p + q));
        prop_assert!(rel(r, expect) < 1e-12);
    }

    #[test]
    fn quotient_identity_reflected_branch(p in 0.01f64..15.0, gap in 0.01f64..15.0) {
        let q = (-p - 1.0).min(-2.0) - gap;
        let r = script_beta(p, q + 2.0).unwrap() / script_beta(p, q).unwrap();
        let expect = (q + 1.0) / (p + q + 1.0) * (q / (p + q));
        prop_assert!(rel(r, expect) < 1e-12);
    }

    #[test]
    fn exponent_duality(n in 3usize..20, a in 0.05f64..3.0) {
        prop_assume!((a - 1.0).abs() > 1e-3);
        let (g, t) = (gamma_exponent(n, a), theta_exponent(n, a));
        prop_assume!(g.is_finite() && t.is_finite() && g != 0.0 && t != 0.0);
        prop_assert!((1.0 / g + 1.0 / t - 1.0).abs() < 1e-12 * (1.0 / g).abs().max(1.0));
    }

    #[test]
    fn tau_star_is_a_lower_bound(
        a in 0.01f64..100.0,
        b in 0.01f64..100.0,
        p in 0.1f64..5.0,
        q in 0.1f64..5.0,
        m in 0.1f64..10.0,
        taus in prop::collection::vec(-8.0f64..8.0, 20),
    ) {
        let (tau, inf) = tau_star(a, b, p, q, m).unwrap();
        let f = |t: f64| a * t.powf(p) + m * b * t.powf(-q);
        prop_assert!(rel(f(tau), inf) < 1e-12);
        for lt in taus {
            prop_assert!(f(lt.exp()) >= inf * (1.0 - 1e-12));
        }
    }

    #[test]
    fn curvature_contractions(n in 3usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = CurvatureTensor::random(n, &mut rng);
        // E(Σ_r R_ijkr a_rl) = 0 for symmetric a
        let a = random_symmetric(n, &mut rng);
        let lam = Tensor4::from_fn(n, |i, j, k, l| {
            (0..n).map(|s| r.r.get(i, j, k, s) * a[s * n + l]).sum()
        });
        let scale = r.norm2().sqrt() * a.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(e_op(&lam).abs() < 1e-12 * scale.max(1.0));
        let res = decomposition_residual(n, r.scalar(), r.ricci_norm2(), r.norm2(), r.weyl().norm2());
        prop_assert!(res.abs() < 1e-10 * r.norm2().max(1.0));
        prop_assert!(r.pole_record().check_invariants(n).is_ok());
    }

    #[test]
    fn space_form_pole_records(n in 2usize..12, k in -5.0f64..5.0) {
        prop_assert!(CurvatureAtPole::space_form(n, k).check_invariants(n).is_ok());
    }

    #[test]
    fn ball_volume_roundtrip(n in 3usize..9, k in -2.0f64..2.0, x in 0.01f64..0.99) {
        let r_max = RadialMetric::space_form_max_chart(k, 3.0);
        let m = RadialMetric::space_form(n, k, r_max).unwrap();
        let r = x * r_max;
        let v = m.ball_volume(r).unwrap();
        prop_assert!(rel(m.ball_radius(v).unwrap(), r) < 1e-10);
    }

    #[test]
    fn moments_match_quadrature(n in 3usize..9, a in 0.05f64..1.8, q1 in 0.0f64..4.0, shift in -0.9f64..4.0) {
        prop_assume!((a - 1.0).abs() > 0.02);
        // a q2 inside the convergence region of each regime
        let q2 = if a < 1.0 { shift } else { -(n as f64 + q1) / 2.0 - 0.3 - shift.abs() };
        let s = MomentSpec::new(q1, q2);
        prop_assume!(s.validate(n, a).is_ok());
        let c = moment_closed(n, a, s).unwrap();
        prop_assert!(rel(moment_quad(n, a, s, 1e-11).unwrap(), c) < 1e-8);
    }

    #[test]
    fn polynomial_fits_are_exact(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, c3 in -5.0f64..5.0) {
        let pts: Vec<(f64, f64)> = (0..10)
            .map(|k| {
                let t = 0.01 * 0.5f64.powi(k);
                (t, c1 * t + c2 * t * t + c3 * t * t * t)
            })
            .collect();
        let f = fit_series(&pts).unwrap();
        prop_assert!((f.c1 - c1).abs() < 1e-8 * (1.0 + c1.abs()));
        prop_assert!((f.c2 - c2).abs() < 1e-5 * (1.0 + c2.abs()));
    }

    #[test]
    fn symmetrization_is_equimeasurable(
        seed in 0u64..10_000,
        n in 3usize..6,
        q in 0.5f64..4.0,
        levels in prop::collection::vec(0.001f64..0.999, 10),
        sphere in any::<bool>(),
    ) {
        let src = RadialMetric::space_form(n, -1.0, 2.0).unwrap();
        let target = if sphere {
            RadialMetric::space_form(n, 1.0, RadialMetric::space_form_max_chart(1.0, 3.0)).unwrap()
        } else {
            RadialMetric::euclidean(n, 10.0).unwrap()
        };
        let prof = random_source(seed, 1.2, 96).unwrap();
        let top = prof.values().iter().fold(0.0f64, |a, &b| a.max(b));
        let f = MeasuredFunction::radial(prof, src).unwrap();
        let ub = Rearrangement::new(&f, &target).unwrap();
        for l in levels {
            let s = l * top;
            prop_assert!(rel(ub.target_distribution(s), ub.distribution(s)) < 1e-8);
        }
        let (a, b) = norms_check(&f, &ub, q).unwrap();
        prop_assert!(rel(b, a) < 1e-10);
    }
}

/// Smooth compactly supported bump with a random modulation.
fn bump(seed: u64) -> RadialProfile {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_end = rng.gen_range(0.5..3.0);
    let k = rng.gen_range(1.5..5.0);
    let amp: f64 = rng.gen_range(-0.4..0.4);
    let w = rng.gen_range(0.5..4.0);
    RadialProfile::sample(
        |r| {
            let x = r / r_end;
            (1.0 - x * x).max(0.0).powf(k) * (1.0 + amp * (w * x).cos())
        },
        edge_clustered_grid(r_end, 400),
        Boundary::CompactSupport,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn euclidean_sharp_inequality(
        seed in any::<u64>(),
        n in 3usize..6,
        a in prop::sample::select(vec![0.3, 0.5, 0.8, 1.1, 1.2]),
    ) {
        let p = GNParams::new(n, a).unwrap();
        let m = RadialMetric::euclidean(n, 10.0).unwrap();
        let q = gn_quotient(&bump(seed), &m, &p).unwrap();
        let s = sharp_constant(n, a, p.regime).unwrap();
        prop_assert!(q >= s - 1e-5 * s, "{q} < {s}");
    }
}

proptest! {
    #[test]
    fn quotients_are_homogeneous(seed in any::<u64>(), c in -7.0f64..7.0, minus in any::<bool>()) {
        let c = c.exp();
        let prof = bump(seed);
        let p = GNParams::new(3, if minus { 0.6 } else { 1.2 }).unwrap();
        let m = RadialMetric::space_form(3, 1.0, 2.8).unwrap();
        prop_assume!(prof.r_end() < 2.8);
        for qf in [gn_quotient, yamabe_type_quotient] {
            let q0 = qf(&prof, &m, &p).unwrap();
            prop_assert!(rel(qf(&prof.scaled(c), &m, &p).unwrap(), q0) < 1e-12);
        }
    }
}

#[test]
fn range_structure_up_to_64() {
    for n in 3..=64usize {
        let r = |c| admissible_range(n, c).unwrap();
        assert!(r(RangeCase::B3).is_subset_of(&r(RangeCase::B2)), "n={n}");
        assert!(r(RangeCase::B2).is_subset_of(&r(RangeCase::B1)), "n={n}");
        let a3 = r(RangeCase::A3);
        assert!(a3.lo >= 0.0 && a3.hi <= 1.0, "n={n}");
        let nf = n as f64;
        assert_eq!(
            r(RangeCase::B3).hi < (nf + 6.0) / (nf + 2.0),
            n >= 7,
            "n={n}"
        );
        for c in RangeCase::ALL {
            let x = r(c);
            if x.provenance == Provenance::RootFound {
                let lo = quadratic_condition(n, x.lo).abs();
                let hi = quadratic_condition(n, x.hi).abs();
                assert!(lo.min(hi) < 1e-9, "n={n} {c}: {lo} {hi}");
            }
        }
    }
}
