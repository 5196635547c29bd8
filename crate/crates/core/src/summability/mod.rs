//! Abel and Nörlund summability of complex sequences.

mod abel;
mod norlund;

pub use abel::{
    abel_average, abel_average_adaptive, abel_scan, cauchy_verdict, check_in_disk, functional_norm, one_minus_modulus, power_series, terms_for,
    series_tail_bound, AbelValue, LambdaPath, Method, PathKind, ScanPoint, Sequence, SummabilityReport, Verdict,
    CAUCHY_TOL, CAUCHY_WINDOW, DIVERGENCE_RADIUS, MAX_TERMS, TAIL_TOL,
};
pub use norlund::{
    convolution_series, norlund_averages, norlund_regularity_check, norlund_validate, ConvolutionValue,
    NorlundWeights, RegularityVerdict, WeightFamily, MIN_FAMILY_LEN, RATIO_THRESHOLD, REGULARITY_SLACK,
};
