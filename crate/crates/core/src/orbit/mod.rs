//! Critical orbits, derivative cocycles and the spectrum of a critical point.

mod classify;
mod logpolar;
mod postcritical;
mod record;
mod spectrum;

pub use classify::{
    fit_slope, oscillation_stats, radius_of_convergence, sublinear_growth_proxy, trichotomy_classify,
    OscillationStats, RadiusEstimate, TrichotomyCase, TrichotomyVerdict, BAND_HALF_WIDTH, TREND_EPS,
};
pub use logpolar::{wrap_angle, LogPolar};
pub use postcritical::{postcritical_sample, BoxCount, PostcriticalSample, BOX_LEVELS};
pub use record::{forward_orbit, iterate_orbit, OrbitRecord, CRITICAL_HIT_TOL, INFINITY_CHORDAL_TOL};
pub use spectrum::{partial_sums_and_barycenters, Spectrum};
