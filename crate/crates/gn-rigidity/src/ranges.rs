//! Admissible α-intervals of the rigidity statements and the radius κ± around α = 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{j_coefficient, ricci_weight, zeta_chi, GNParams, Regime};
use crate::error::{Error, Result};
use crate::tolerances::KAPPA_BISECT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RangeCase {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl RangeCase {
    pub const ALL: [RangeCase; 6] = [
        RangeCase::A1,
        RangeCase::A2,
        RangeCase::A3,
        RangeCase::B1,
        RangeCase::B2,
        RangeCase::B3,
    ];

    pub fn regime(self) -> Regime {
        match self {
            RangeCase::A1 | RangeCase::A2 | RangeCase::A3 => Regime::Minus,
            _ => Regime::Plus,
        }
    }
}

impl fmt::Display for RangeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for RangeCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RangeCase::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown range case '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    ClosedForm,
    RootFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
    pub provenance: Provenance,
    /// `|quadratic|` at the root endpoint; zero for closed-form endpoints.
    pub residual: f64,
}

impl AlphaRange {
    fn open(lo: f64, hi: f64) -> Self {
        AlphaRange {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
            provenance: Provenance::ClosedForm,
            residual: 0.0,
        }
    }

    pub fn contains(&self, a: f64) -> bool {
        let lo_ok = if self.lo_open {
            a > self.lo
        } else {
            a >= self.lo
        };
        let hi_ok = if self.hi_open {
            a < self.hi
        } else {
            a <= self.hi
        };
        lo_ok && hi_ok
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &AlphaRange) -> bool {
        let lo_ok = self.lo > other.lo || (self.lo == other.lo && (self.lo_open || !other.lo_open));
        let hi_ok = self.hi < other.hi || (self.hi == other.hi && (self.hi_open || !other.hi_open));
        lo_ok && hi_ok
    }

    /// Interval notation, e.g. `(1, 1.4]`.
    pub fn openness(&self) -> String {
        format!(
            "{}{}",
            if self.lo_open { '(' } else { '[' },
            if self.hi_open { ')' } else { ']' }
        )
    }
}

impl fmt::Display for AlphaRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// `(2n²+3n-38)α² + (-4n²-2n+50)α + 2n²-n-24`.
pub fn quadratic_condition(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (2.0 * nf * nf + 3.0 * nf - 38.0) * alpha * alpha
        + (-4.0 * nf * nf - 2.0 * nf + 50.0) * alpha
        + 2.0 * nf * nf
        - nf
        - 24.0
}

/// Roots `(2n²+n-25 ∓ √(28n²-16n-287))/(2n²+3n-38)` of the quadratic, for `n >= 4`.
pub fn quadratic_roots(n: usize) -> Result<(f64, f64)> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "the quadratic has no real roots for n = {n}"
        )));
    }
    let nf = n as f64;
    let disc = (28.0 * nf * nf - 16.0 * nf - 287.0).sqrt();
    let den = 2.0 * nf * nf + 3.0 * nf - 38.0;
    let b = 2.0 * nf * nf + nf - 25.0;
    // the lower root loses digits to cancellation; recover it from the product of the roots
    let hi = (b + disc) / den;
    let lo = (2.0 * nf * nf - nf - 24.0) / den / hi;
    Ok((lo, hi))
}

pub fn admissible_range(n: usize, case: RangeCase) -> Result<AlphaRange> {
    if n < 3 {
        return Err(Error::Domain(format!("n = {n} must be at least 3")));
    }
    let nf = n as f64;
    let sob = nf / (nf - 2.0);
    let closed_hi = |hi: f64| AlphaRange {
        hi_open: false,
        ..AlphaRange::open(1.0, hi)
    };
    let root = |lo: f64, hi: f64, x: f64| AlphaRange {
        provenance: Provenance::RootFound,
        residual: quadratic_condition(n, x).abs(),
        ..AlphaRange::open(lo, hi)
    };
    Ok(match case {
        RangeCase::A1 | RangeCase::A2 => AlphaRange::open(0.0, 1.0),
        RangeCase::A3 => {
            if n == 3 {
                AlphaRange::open(0.0, 1.0)
            } else {
                let (lo, _) = quadratic_roots(n)?;
                root(lo, 1.0, lo)
            }
        }
        RangeCase::B1 => {
            if n <= 4 {
                AlphaRange::open(1.0, (nf + 4.0) / nf)
            } else {
                closed_hi(sob)
            }
        }
        RangeCase::B2 => {
            if n <= 6 {
                AlphaRange::open(1.0, (nf + 6.0) / (nf + 2.0))
            } else {
                closed_hi(sob)
            }
        }
        RangeCase::B3 => {
            if n <= 6 {
                AlphaRange::open(1.0, (nf + 6.0) / (nf + 2.0))
            } else {
                let (_, hi) = quadratic_roots(n)?;
                root(1.0, hi, hi)
            }
        }
    })
}

/// Left side of the condition that the |Rc|² bracket is negative.
pub fn co2_value(n: usize, alpha: f64) -> Result<f64> {
    Ok(ricci_weight(n, alpha)? - 2.0 / (3.0 * (n as f64 - 2.0)))
}

/// `F(α, n)`: the co2 bracket plus `n(1/(3(n-1)(n-2)) + j/(32ζ2))`.
pub fn f_eval(n: usize, alpha: f64, regime: Regime) -> Result<f64> {
    let nf = n as f64;
    let p = GNParams::with(n, alpha, regime, 1.0)?;
    let z = zeta_chi(n, alpha)?;
    let j = j_coefficient(&p)?;
    Ok(co2_value(n, alpha)? + nf * (1.0 / (3.0 * (nf - 1.0) * (nf - 2.0)) + j / (32.0 * z.zeta2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Co2,
    Co3,
    RegimeEdge,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binding::Co2 => "co2",
            Binding::Co3 => "co3",
            Binding::RegimeEdge => "regime_edge",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    pub kappa: f64,
    pub binding: Binding,
    /// `|active condition|` at `1 ± kappa`; zero when the regime edge binds.
    pub residual: f64,
}

/// Distance from 1 to the edge of the first condition in the Minus/Plus side.
fn regime_edge(n: usize, regime: Regime) -> f64 {
    let nf = n as f64;
    match regime {
        Regime::Minus => 1.0,
        Regime::Plus => ((nf + 6.0) / (nf + 2.0)).min(nf / (nf - 2.0)) - 1.0,
    }
}

const KAPPA_SCAN: usize = 4000;

/// Largest κ with the three conditions holding for all `0 < |α-1| < κ` on the regime's side.
///
/// A uniform scan in `|α-1|` locates the first violation; bisection then resolves it to
/// `KAPPA_BISECT`. The reported residual is the active condition at the inner endpoint.
pub fn kappa(n: usize, regime: Regime) -> Result<Kappa> {
    if n < 3 {
        return Err(Error::Domain(format!("n = {n} must be at least 3")));
    }
    let sign = match regime {
        Regime::Minus => -1.0,
        Regime::Plus => 1.0,
    };
    let edge = regime_edge(n, regime);
    let at = |d: f64| 1.0 + sign * d;
    let co2 = |d: f64| co2_value(n, at(d));
    let co3 = |d: f64| f_eval(n, at(d), regime);
    // conditions at d; the first violated one, if any
    let violated = |d: f64| -> Result<Option<Binding>> {
        if co2(d)? >= 0.0 {
            return Ok(Some(Binding::Co2));
        }
        if co3(d)? >= 0.0 {
            return Ok(Some(Binding::Co3));
        }
        Ok(None)
    };
    let d0 = edge * 1e-9;
    if violated(d0)?.is_some() {
        return Err(Error::NoBracket(format!(
            "conditions fail immediately next to α = 1 for n = {n}"
        )));
    }
    let mut prev = d0;
    for k in 1..=KAPPA_SCAN {
        // stop short of the edge, where ζ2 or the regime bound may be singular
        let d = edge * (k as f64 / KAPPA_SCAN as f64).min(1.0 - 1e-9);
        if let Some(which) = violated(d)? {
            let (mut lo, mut hi) = (prev, d);
            let g = |x: f64| -> Result<f64> {
                match which {
                    Binding::Co2 => co2(x),
                    _ => co3(x),
                }
            };
            let other_ok = |x: f64| -> Result<bool> {
                Ok(match which {
                    Binding::Co3 => co2(x)? < 0.0,
                    _ => true,
                })
            };
            while hi - lo > KAPPA_BISECT {
                let mid = 0.5 * (lo + hi);
                if g(mid)? < 0.0 && other_ok(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // co2 may turn positive inside the co3 bracket; re-label
            let binding = if which == Binding::Co3 && co2(hi)? >= 0.0 {
                Binding::Co2
            } else {
                which
            };
            let residual = match binding {
                Binding::Co2 => co2(lo)?.abs(),
                _ => co3(lo)?.abs(),
            };
            return Ok(Kappa {
                kappa: lo,
                binding,
                residual,
            });
        }
        prev = d;
    }
    Ok(Kappa {
        kappa: edge,
        binding: Binding::RegimeEdge,
        residual: 0.0,
    })
}

/// One row of the `ranges` table.
#[derive(Debug, Clone, Serialize)]
pub struct RangeRow {
    pub n: usize,
    pub case: String,
    pub lo: f64,
    pub hi: f64,
    pub openness: String,
    pub binding: String,
}

/// Range rows for every case plus the two κ rows (`case = kappa-`/`kappa+`,
/// `lo..hi = 1 ∓ κ..1`).
pub fn range_table(ns: &[usize]) -> Result<Vec<RangeRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for case in RangeCase::ALL {
            let r = admissible_range(n, case)?;
            rows.push(RangeRow {
                n,
                case: case.to_string(),
                lo: r.lo,
                hi: r.hi,
                openness: r.openness(),
                binding: match r.provenance {
                    Provenance::ClosedForm => "closed_form".into(),
                    Provenance::RootFound => "quadratic_root".into(),
                },
            });
        }
        for regime in [Regime::Minus, Regime::Plus] {
            let k = kappa(n, regime)?;
            let (lo, hi, name) = match regime {
                Regime::Minus => (1.0 - k.kappa, 1.0, "kappa-"),
                Regime::Plus => (1.0, 1.0 + k.kappa, "kappa+"),
            };
            rows.push(RangeRow {
                n,
                case: name.into(),
                lo,
                hi,
                openness: "()".into(),
                binding: k.binding.to_string(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_examples() {
        let r = admissible_range(3, RangeCase::A3).unwrap();
        assert_eq!((r.lo, r.hi), (0.0, 1.0));
        let r = admissible_range(4, RangeCase::A3).unwrap();
        assert!((r.lo - (11.0 - 97f64.sqrt()) / 6.0).abs() < 1e-14);
        assert!(r.residual < 1e-12);
        let r = admissible_range(7, RangeCase::B3).unwrap();
        assert!((r.hi - (80.0 + 973f64.sqrt()) / 81.0).abs() < 1e-14);
        assert!(r.hi < 1.4);
        let r = admissible_range(7, RangeCase::B2).unwrap();
        assert!(!r.hi_open && r.hi == 1.4);
        assert!(admissible_range(2, RangeCase::A1).is_err());
    }

    #[test]
    fn quadratic_examples() {
        for a in [0.01, 0.3, 0.7, 0.99] {
            assert!(quadratic_condition(3, a) < 0.0);
        }
        let (lo, hi) = quadratic_roots(4).unwrap();
        assert!(
            quadratic_condition(4, lo).abs() < 1e-12 && quadratic_condition(4, hi).abs() < 1e-12
        );
        assert!(quadratic_condition(7, 1.38) > 0.0);
    }

    #[test]
    fn containment() {
        for n in 3..=64 {
            let r = |c| admissible_range(n, c).unwrap();
            assert!(r(RangeCase::B3).is_subset_of(&r(RangeCase::B2)), "n={n}");
            assert!(r(RangeCase::B2).is_subset_of(&r(RangeCase::B1)), "n={n}");
            assert!(r(RangeCase::A3).is_subset_of(&AlphaRange::open(0.0, 1.0)));
            let strict = r(RangeCase::B3).hi < (n as f64 + 6.0) / (n as f64 + 2.0);
            assert_eq!(strict, n >= 7, "n={n}");
        }
    }

    #[test]
    fn f_limit_at_one() {
        for n in 3..12 {
            let target = -1.0 / (3.0 * (n as f64 - 1.0));
            assert!((f_eval(n, 1.0 - 1e-7, Regime::Minus).unwrap() - target).abs() < 1e-5);
            assert!((f_eval(n, 1.0 + 1e-7, Regime::Plus).unwrap() - target).abs() < 1e-5);
        }
    }

    #[test]
    fn kappa_basics() {
        for n in [3, 4, 7, 12] {
            for regime in [Regime::Minus, Regime::Plus] {
                let k = kappa(n, regime).unwrap();
                assert!(k.kappa > 0.0);
                assert!(k.kappa <= regime_edge(n, regime) + 1e-15);
                if k.binding != Binding::RegimeEdge {
                    assert!(k.residual < 1e-10, "n={n} {regime} {k:?}");
                }
            }
        }
        assert!(kappa(4, Regime::Plus).unwrap().kappa <= 1.0);
    }
}
