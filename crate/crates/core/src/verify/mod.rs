//! Theorem-level predictions and the verification suite.

pub mod predict;
pub mod suite;

pub use predict::{
    analyticity_verdict, analyticity_verdict_scaled, nearest_grid_index, predict_adjoint_kernel, predict_left_spectrum,
    predict_point_spectrum, predict_spectral_radius, section3_classify, AnalyticityVerdict, Branch, Eigenpair,
    LeftSpectrumShape, RadiusShape, Section3Case, Section3Expectation,
};
pub use suite::{run_suite, series_label, Perturbation, SuiteConfig, TheoremReport, Tolerances};
