//! Quotients and functionals on radial profiles over radial metrics.

pub mod conformal;
pub mod family;
pub mod profile;
pub mod quotients;
pub mod tau;

pub use conformal::{conformal_invariance_check, ConformalCheck};
pub use family::{
    build_cutoff, extremal_profile, family_profile, h_extremal, normalize_exact, u_base, Cutoff,
    CutoffSpec,
};
pub use profile::{Assembly, Boundary, RadialProfile};
pub use quotients::{
    gn_quotient, profile_integrals, quotient_value, yamabe_type_quotient, ProfileIntegrals,
};
pub use tau::{l_functional, l_infimum, w_functional, TauIntegrals};
