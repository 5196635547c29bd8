//! Truncated atomic measures along orbits and their weak-* behaviour.

mod atomic;
mod build;
mod scan;

pub use atomic::{Atom, AtomicMeasure, MeasureBuilder, MERGE_RADIUS};
pub use build::{
    build_abel_measure, build_voronoi_measure, max_atom_difference, voronoi_by_terms, VORONOI_CROSS_CHECK_MAX,
    VORONOI_ORDER_TOL,
};
pub use scan::{
    measure_pairing, projective_normalize, weak_star_scan, write_scan_csv, Construction, ProjectiveLimit, ScanRow,
    ScanVerdict, TestFamily, TestFunction, WeakStarScan, KERNEL_TESTS, MAX_SCAN_TERMS, MONOMIAL_DEGREE,
    PAIRING_THRESHOLD, TV_TAIL_TOL,
};
