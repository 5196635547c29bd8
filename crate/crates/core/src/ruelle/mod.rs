//! The Ruelle and Beltrami operators, Poincaré-Ruelle series and numerical
//! checks of the identities relating them.

mod identity;
mod operator;
mod series;

pub use identity::{
    frozen_test_map, identity_check, sample_points, search_test_map, test_family_map, voronoi_identity_check,
    ResidualReport, ResidualSample, FROZEN_B, FROZEN_C, MAX_IDENTITY_ORDER, TEST_MAP_CLEARANCE, TEST_MAP_ORBIT_STEPS,
    TEST_MAP_SEED,
};
pub use operator::{beltrami_apply, ruelle_apply, ruelle_power, ruelle_powers, MAX_TREE_DEPTH};
pub use series::{
    kernel_value, poincare_a, poincare_a_terms, poincare_b, poincare_b_terms, KernelCombo, SeriesTruncation,
};
