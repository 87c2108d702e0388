//! One-dimensional quadrature: adaptive Gauss-Kronrod (7/15) and fixed Gauss-Legendre rules.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

// QUADPACK qk15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evals: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut rabs = rk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        rabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * rk;
    let mut rasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        rasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let mut err = ((rk - rg) * h).abs();
    let rasc = rasc * h.abs();
    let rabs = rabs * h.abs();
    if rasc != 0.0 && err != 0.0 {
        err = rasc * (200.0 * err / rasc).powf(1.5).min(1.0);
    }
    if rabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * rabs);
    }
    (rk * h, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

const MAX_PANELS: usize = 4000;

/// Globally adaptive GK15 on `[a, b]` to `max(abs_tol, rel_tol*|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_err: 0.0,
            evals: 0,
        });
    }
    // below ~100 eps the GK error estimate is rounding-dominated
    let rel_tol = rel_tol.max(100.0 * f64::EPSILON);
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total = v;
    let mut total_err = e;
    let mut evals = 15;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_PANELS {
            break;
        }
        let p = heap.pop().expect("heap is never empty here");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        heap.push(Panel {
            a: p.a,
            b: m,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            value: v2,
            err: e2,
        });
    }
    // resum to shed drift from incremental updates
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_err: f64 = heap.iter().map(|p| p.err).sum();
    if !value.is_finite() {
        return Err(Error::NonConvergence(format!(
            "non-finite integral on [{a}, {b}]"
        )));
    }
    if abs_err > abs_tol.max(rel_tol * value.abs()) * 10.0 {
        return Err(Error::NonConvergence(format!(
            "GK15 on [{a}, {b}]: error estimate {abs_err:.3e} for value {value:.6e}"
        )));
    }
    Ok(QuadResult {
        value,
        abs_err,
        evals,
    })
}

/// `∫_0^L x^beta g(x) dx` for smooth `g` and `beta > -1`.
///
/// For `beta < 0` the substitution `x = L u^{1/(1+beta)}` removes the singularity:
/// the integral becomes `L^{1+beta}/(1+beta) ∫_0^1 g(L u^{1/(1+beta)}) du`.
/// `g` receives the exact distance from the singular endpoint.
pub fn integrate_endpoint_power<G: Fn(f64) -> f64>(
    g: G,
    len: f64,
    beta: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    if beta <= -1.0 {
        return Err(Error::Domain(format!(
            "endpoint exponent {beta} is not integrable"
        )));
    }
    if beta >= 0.0 {
        return integrate(|x| x.powf(beta) * g(x), 0.0, len, rel_tol, abs_tol);
    }
    let k = 1.0 / (1.0 + beta);
    let scale = len.powf(1.0 + beta) * k;
    let r = integrate(|u| g(len * u.powf(k)), 0.0, 1.0, rel_tol, abs_tol / scale)?;
    Ok(QuadResult {
        value: scale * r.value,
        abs_err: scale * r.abs_err,
        evals: r.evals,
    })
}

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let nf = order as f64;
        for i in 0..(order + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule of the given order (orders up to 64).
    pub fn cached(order: usize) -> &'static GaussLegendre {
        static CACHE: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
        let rules = CACHE.get_or_init(|| (0..=64).map(|k| GaussLegendre::new(k.max(1))).collect());
        &rules[order]
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_and_smooth() {
        let r = integrate(|x| x * x, 0.0, 3.0, 1e-14, 0.0).unwrap();
        assert!((r.value - 9.0).abs() < 1e-13);
        let r = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-14, 0.0).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn endpoint_power_flattening() {
        // ∫_0^1 x^{-1/2} cos x dx
        let r = integrate_endpoint_power(|x: f64| x.cos(), 1.0, -0.5, 1e-13, 0.0).unwrap();
        let reference = integrate(|u: f64| 2.0 * (u * u).cos(), 0.0, 1.0, 1e-15, 0.0)
            .unwrap()
            .value;
        assert!((r.value - reference).abs() < 1e-13);
        let r = integrate_endpoint_power(|_| 1.0, 2.0, -0.9, 1e-13, 0.0).unwrap();
        assert!((r.value - 2f64.powf(0.1) / 0.1).abs() < 1e-11);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let g = GaussLegendre::new(8);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // exact through degree 15
        let v = g.integrate(|x| x.powi(14), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let v = GaussLegendre::cached(5).integrate(|x| x.powi(9) + x.powi(8), 0.0, 1.0);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-14);
    }
}
