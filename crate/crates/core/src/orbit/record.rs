use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::logpolar::LogPolar;
use crate::riemann::{RationalMap, SpherePoint};

/// Distance (relative to `1 + |c|`) at which an orbit point counts as landing on a critical point.
pub const CRITICAL_HIT_TOL: f64 = 1e-12;
/// Chordal radius of the exclusion disk around infinity.
pub const INFINITY_CHORDAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub base: SpherePoint,
    /// `z_0, ..., z_n`.
    pub points: Vec<Complex64>,
    /// `R'(z_k)` for every recorded step `k`.
    pub factors: Vec<LogPolar>,
    pub hit_critical_point: bool,
    /// The accumulated derivative left the range of a double (informational; log-polar keeps it).
    pub left_precision_envelope: bool,
    pub approached_infinity: bool,
}

impl OrbitRecord {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.hit_critical_point || self.approached_infinity
    }

    /// `(R^n)'(z_0)` as a log-polar product of the first `n` factors.
    pub fn derivative_of_iterate(&self, n: usize) -> Option<LogPolar> {
        (n <= self.factors.len()).then(|| self.factors[..n].iter().fold(LogPolar::ONE, |a, &f| a * f))
    }
}

pub(crate) fn near_infinity(z: Complex64) -> bool {
    !(z.re.is_finite() && z.im.is_finite())
        || SpherePoint::Finite(z).chordal_distance(&SpherePoint::Infinity) <= INFINITY_CHORDAL_TOL
}

fn near_critical(z: Complex64, critical: &[Complex64]) -> bool {
    critical.iter().any(|c| (z - c).norm() <= CRITICAL_HIT_TOL * (1.0 + c.norm()))
}

/// Iterates `R` from `z0` for `steps` steps, recording derivative factors.
///
/// Stops (with a flag) when a point lands on a critical point, whose factor is
/// still recorded, or when the orbit reaches the exclusion disk around infinity.
pub fn iterate_orbit(r: &RationalMap, z0: SpherePoint, steps: usize) -> OrbitRecord {
    let mut rec = OrbitRecord {
        base: z0,
        points: Vec::with_capacity(steps + 1),
        factors: Vec::with_capacity(steps + 1),
        hit_critical_point: false,
        left_precision_envelope: false,
        approached_infinity: false,
    };
    let Some(mut z) = z0.as_finite() else {
        rec.approached_infinity = true;
        return rec;
    };
    if near_infinity(z) {
        rec.approached_infinity = true;
        return rec;
    }
    let critical = r.finite_critical_points();
    let mut log_total = 0.0;
    rec.points.push(z);
    for _ in 0..steps {
        let f = LogPolar::from_complex(r.deriv(z));
        rec.factors.push(f);
        log_total += f.log_mod;
        if log_total.abs() > f64::MAX.ln() {
            rec.left_precision_envelope = true;
        }
        if f.is_zero() || near_critical(z, &critical) {
            rec.hit_critical_point = true;
            return rec;
        }
        let next = r.eval(z);
        if near_infinity(next) {
            rec.approached_infinity = true;
            return rec;
        }
        z = next;
        rec.points.push(z);
    }
    // the last point has no outgoing step
    rec.factors.truncate(rec.points.len() - 1);
    rec
}

/// Plain forward orbit `z_0, ..., z_steps`, stopping only near infinity.
/// Returns the points and whether infinity was approached.
pub fn forward_orbit(r: &RationalMap, z0: Complex64, steps: usize) -> (Vec<Complex64>, bool) {
    let mut out = Vec::with_capacity(steps + 1);
    let mut z = z0;
    if near_infinity(z) {
        return (out, true);
    }
    out.push(z);
    for _ in 0..steps {
        z = r.eval(z);
        if near_infinity(z) {
            return (out, true);
        }
        out.push(z);
    }
    (out, false)
}
