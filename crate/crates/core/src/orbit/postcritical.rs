use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::record::forward_orbit;
use crate::error::Result;
use crate::riemann::{RationalMap, SpherePoint};

/// Box-count resolutions `2^-k` (relative to the diameter) for `k` in this range.
pub const BOX_LEVELS: std::ops::RangeInclusive<i32> = 4..=9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxCount {
    /// Box side, absolute.
    pub side: f64,
    pub boxes: usize,
    pub area: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PostcriticalSample {
    /// `R(c), R^2(c), ...`.
    pub points: Vec<Complex64>,
    /// `[min_re, min_im, max_re, max_im]`.
    pub bounding_box: [f64; 4],
    pub bounded: bool,
    pub box_counts: Vec<BoxCount>,
    pub diameter: f64,
}

/// Orbit sample of the critical value with box-count area evidence.
pub fn postcritical_sample(r: &RationalMap, c: SpherePoint, steps: usize) -> Result<PostcriticalSample> {
    let v = r.evaluate(c)?;
    let (points, escaped) = match v.as_finite() {
        Some(v) => forward_orbit(r, v, steps.saturating_sub(1)),
        None => (Vec::new(), true),
    };
    let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for z in &points {
        bb[0] = bb[0].min(z.re);
        bb[1] = bb[1].min(z.im);
        bb[2] = bb[2].max(z.re);
        bb[3] = bb[3].max(z.im);
    }
    let mut diameter: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diameter = diameter.max((a - b).norm());
        }
    }
    let box_counts = BOX_LEVELS
        .map(|k| {
            let side = diameter * 2f64.powi(-k);
            if side == 0.0 {
                return BoxCount { side, boxes: usize::from(!points.is_empty()), area: 0.0 };
            }
            let cells: HashSet<(i64, i64)> = points
                .iter()
                .map(|z| (((z.re - bb[0]) / side).floor() as i64, ((z.im - bb[1]) / side).floor() as i64))
                .collect();
            BoxCount { side, boxes: cells.len(), area: cells.len() as f64 * side * side }
        })
        .collect();
    Ok(PostcriticalSample { points, bounding_box: bb, bounded: !escaped, box_counts, diameter })
}
