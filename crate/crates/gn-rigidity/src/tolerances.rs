//! Tolerances shared by the verification pipelines and the acceptance suite.
//!
//! | Category | Basis | Values |
//! |----------|-------|--------|
//! | Closed-form identities | f64 rounding in short compositions | 1e-10 to 1e-12 |
//! | Quadrature oracles | adaptive GK15 driven to 1e-11 | 1e-8 |
//! | Sampled profiles | P1 interpolation, O(h^2) | 1e-6 |
//! | Small-t fits | o(t^2) contamination at the smallest usable t | 1e-3, 5e-3 |
//! | Discrete minimization | grid resolution of the discrete infimum | 1e-3 |

/// Relative agreement of a moment closed form with its quadrature oracle.
pub const MOMENT_REL: f64 = 1e-8;

/// Tolerance handed to `moment_quad` when it acts as an oracle.
///
/// Two orders below `MOMENT_REL` so the comparison is not limited by the oracle.
pub const MOMENT_QUAD_TOL: f64 = 1e-11;

/// Simplified c_i against the raw beta-ratio assembly.
pub const COEFF_REL: f64 = 1e-10;

/// j against its raw re-assembly.
pub const J_REL: f64 = 1e-9;

/// Quotient of the sampled extremal against the sharp constant.
///
/// The P1 energy of a sampled profile carries an O(h^2) interpolation error;
/// the default extremal grids use a few thousand clustered nodes.
pub const ATTAINMENT_REL: f64 = 1e-6;

/// Discrete minimizer against the sharp constant.
pub const VARMIN_REL: f64 = 1e-3;

/// First-order fitted coefficients (D1/D0, A1/A0, c1).
pub const FIT_C1_REL: f64 = 1e-3;

/// Second-order fitted coefficients (D2/D0, A2/A0, c2).
pub const FIT_C2_REL: f64 = 5e-3;

/// Range endpoints against direct substitution of the surd formulas.
pub const RANGE_ABS: f64 = 1e-12;

/// Residual of the active condition at a kappa boundary.
pub const KAPPA_RESIDUAL: f64 = 1e-10;

/// Bisection width on alpha for kappa.
pub const KAPPA_BISECT: f64 = 1e-12;

/// Scalar flatness of the Schwarzschild factor.
pub const SCALAR_FLAT: f64 = 1e-9;

/// Conformal invariance of the Yamabe quotient.
pub const CONFORMAL_REL: f64 = 1e-7;

/// Equimeasurability, norm equality and energy comparisons under rearrangement.
pub const SYMMETRIZE: f64 = 1e-8;

/// Normalization of profiles entering the L/W functionals.
pub const NORMALIZATION: f64 = 1e-10;
