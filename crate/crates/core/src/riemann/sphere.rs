use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of the Riemann sphere: a finite complex number or the point at infinity.
#[derive(Clone, Copy, Debug)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    /// Builds a finite point, rejecting NaN components. Infinite components map to `Infinity`.
    pub fn finite(z: Complex64) -> Result<Self> {
        if z.re.is_nan() || z.im.is_nan() {
            return Err(Error::Parse(format!("NaN component in {z}")));
        }
        if z.re.is_infinite() || z.im.is_infinite() {
            return Ok(SpherePoint::Infinity);
        }
        Ok(SpherePoint::Finite(z))
    }

    pub fn real(x: f64) -> Self {
        SpherePoint::Finite(Complex64::new(x, 0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// Chordal distance on the unit-diameter-2 sphere; at most 2.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(a), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(a)) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
            }
        }
    }

    /// Lexicographic (re, im) key with infinity sorted last.
    pub(crate) fn sort_key(&self) -> (u8, f64, f64) {
        match self {
            SpherePoint::Finite(z) => (0, z.re, z.im),
            SpherePoint::Infinity => (1, 0.0, 0.0),
        }
    }
}

impl PartialEq for SpherePoint {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{z}"),
            SpherePoint::Infinity => write!(f, "∞"),
        }
    }
}

// Finite points serialize as [re, im]; infinity as the string "infinity".
impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Finite(z) => [z.re, z.im].serialize(s),
            SpherePoint::Infinity => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => SpherePoint::finite(Complex64::new(re, im))
                .map_err(serde::de::Error::custom),
            Repr::Tag(t) if t == "infinity" => Ok(SpherePoint::Infinity),
            Repr::Tag(t) => Err(serde::de::Error::custom(format!("unknown sphere point {t:?}"))),
        }
    }
}
