//! Per-criterion instability evidence from spectra, summability scans and
//! grid classification of the Fatou set.
//!
//! Every `instability-evidence` label is evidence at the declared thresholds,
//! never a verdict: the underlying criteria are asymptotic, and hypotheses such
//! as separation or measure zero of `P_c` are only sampled at finite resolution.

mod criteria;
mod fatou;
mod report;

pub use criteria::{
    abel_criterion, barycentric_check, bounded_proxy, convergent_proxy, subsequence_checks, norlund_regular_check,
    stability_bound_check, subsequence_family, CriterionId, CriterionResult, Hypothesis, Status, Thresholds,
    NORLUND_HORIZON,
};
pub use fatou::{
    area_slope, bounded_spectrum_checks, default_separation_grid, detect_attracting_cycles, escape_radius, orbit_fate,
    pc_area_check, separation_criterion, separation_scan, fixed_point_precondition, AttractingCycle, OrbitFate,
    SeparationOutcome, SeparationScan,
};
pub use report::{full_report, DiagnosticsConfig, DiagnosticsReport};
