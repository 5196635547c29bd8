//! The γ kernel, Cauchy transforms and potentials of atomic measures.

mod kernel;
mod l1;
mod transform;

pub use kernel::{gamma, GammaKernel, POLE_EXCLUSION};
pub use l1::{gamma_l1_estimate, gauss_legendre, L1Estimate, L1Quadrature, L1_REFINE_TOL};
pub use transform::{
    cauchy_transform, contour_mass_recovery, m_measure_test, potential_of_measure, sample_field, FieldSample,
    GridSpec, MMeasureReport, MMeasureVerdict, M_TEST_EXCLUSION,
};
