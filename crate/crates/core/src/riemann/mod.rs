//! Rational maps on the Riemann sphere.

mod map;
mod moebius;
mod poly;
mod roots;
mod sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use map::{FixedPoint, Normalization, RationalMap, RationalMapJson, Root};
pub use moebius::{conjugate, default_triple, moebius_normalize, MoebiusTransform};
pub use poly::Poly;
pub use roots::{cluster, find_roots, raw_roots, RootCluster};
pub use sphere::SpherePoint;

/// Numerical precision knobs shared by the toolkit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrecisionConfig {
    /// Only 53 (IEEE double) is implemented.
    pub mantissa_bits: u32,
    pub series_truncation: usize,
    pub root_tolerance: f64,
    pub grid_resolution: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            mantissa_bits: 53,
            series_truncation: 64,
            root_tolerance: 1e-12,
            grid_resolution: 256,
        }
    }
}

impl PrecisionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mantissa_bits < 53 {
            return Err(Error::InvalidConfig(format!(
                "mantissa_bits must be at least 53, got {}",
                self.mantissa_bits
            )));
        }
        if self.mantissa_bits > 53 {
            return Err(Error::Unsupported(format!(
                "mantissa_bits = {} (only 53-bit arithmetic is available)",
                self.mantissa_bits
            )));
        }
        if self.series_truncation == 0 {
            return Err(Error::InvalidConfig("series_truncation must be positive".into()));
        }
        if !(self.root_tolerance > 0.0 && self.root_tolerance.is_finite()) {
            return Err(Error::InvalidConfig("root_tolerance must be a positive real".into()));
        }
        if self.grid_resolution == 0 {
            return Err(Error::InvalidConfig("grid_resolution must be positive".into()));
        }
        Ok(())
    }
}
