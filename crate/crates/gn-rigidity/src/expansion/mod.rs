//! Small-t expansions of the family integrals and of the L/W functionals.

pub mod fit;
pub mod series;

pub use fit::{fit_series, fit_series_with, FitOptions, SeriesFit};
pub use series::{
    constrained_spec, family_sample, l_series, scaled_integral, verify_da_ratios, w_series,
    AChoice, DaReport, FamilySample, Integrand, RatioCheck, SeriesKind, SeriesReport, TGrid,
};
