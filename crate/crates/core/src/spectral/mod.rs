//! Floating-point spectral estimates on truncations of `M_z + f⊗g`.

pub mod eigen;
pub mod modulus;
pub mod radius;
pub mod spec;
pub mod subspace;

pub use eigen::{eigen_check, eigen_residual_exact, EigenCheck};
pub use modulus::{default_tau, injectivity_modulus, left_spectrum_scan, GridSpec, SpectralScan};
pub use radius::{spectral_radius_gelfand, RadiusEstimate};
pub use spec::{OperatorSpec, C64};
pub use subspace::{
    adjoint_kernel, hyper_range, max_principal_angle, principal_angles, wandering_subspace_check, SubspaceEstimate,
    WanderingCheck,
};
