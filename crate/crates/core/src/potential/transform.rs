use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{GammaKernel, POLE_EXCLUSION};
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Grid points closer than this to an atom are skipped by the M-measure test.
pub const M_TEST_EXCLUSION: f64 = 1e-3;

fn near_atom(mu: &AtomicMeasure, z: Complex64) -> Result<()> {
    let distance = mu.distance_to_support(z);
    if distance < POLE_EXCLUSION {
        return Err(Error::NearAtom { z, distance });
    }
    Ok(())
}

/// `f_μ(z) = Σ w_i / (t_i - z)`.
pub fn cauchy_transform(mu: &AtomicMeasure, z: Complex64) -> Result<Complex64> {
    near_atom(mu, z)?;
    Ok(mu.atoms().iter().map(|a| a.w / (a.z - z)).sum())
}

/// `φ(z) = Σ w_i γ_{a_i}(z)` for the atoms `a_i` of `ν`.
pub fn potential_of_measure(nu: &AtomicMeasure, z: Complex64) -> Result<Complex64> {
    let kernels = nu
        .atoms()
        .iter()
        .map(|a| {
            GammaKernel::new(a.z).map_err(|_| {
                Error::Precondition(format!(
                    "atom at {} sits on a kernel pole (0 or 1); renormalize the map with a different fixed triple",
                    a.z
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if z.norm() < POLE_EXCLUSION || (z - ONE).norm() < POLE_EXCLUSION {
        return Err(Error::KernelPole(z));
    }
    near_atom(nu, z)?;
    Ok(kernels.iter().zip(nu.atoms()).map(|(k, a)| a.w * k.eval_unchecked(z)).sum())
}

/// Trapezoid rule for `∮ f_μ dz / (-2πi)` on the circle of `radius` around atom `index`.
///
/// Each atom contributes `-w ∮ dz/(z - t) = -2πi w` when enclosed, so the quotient
/// recovers the enclosed weight.
pub fn contour_mass_recovery(mu: &AtomicMeasure, index: usize, radius: f64, nodes: usize) -> Result<Complex64> {
    if mu.is_empty() {
        return Ok(ZERO);
    }
    let atoms = mu.atoms();
    let center = atoms
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("atom index {index} out of range ({} atoms)", atoms.len())))?
        .z;
    if !(radius > POLE_EXCLUSION) || nodes < 3 {
        return Err(Error::Precondition(format!("invalid contour: radius {radius}, {nodes} nodes")));
    }
    for (i, a) in atoms.iter().enumerate() {
        if i != index && (a.z - center).norm() <= radius + POLE_EXCLUSION {
            return Err(Error::NearAtom { z: a.z, distance: (a.z - center).norm() - radius });
        }
    }
    let h = 2.0 * PI / nodes as f64;
    let mut sum = ZERO;
    for k in 0..nodes {
        let e = Complex64::from_polar(1.0, k as f64 * h);
        let z = center + e * radius;
        let f: Complex64 = atoms.iter().map(|a| a.w / (a.z - z)).sum();
        // dz = i r e^{iθ} dθ
        sum += f * e * Complex64::new(0.0, radius * h);
    }
    Ok(sum / Complex64::new(0.0, -2.0 * PI))
}

/// Rectangular sampling grid; points within `exclusion_radius` of declared centers are skipped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
    pub exclusion_radius: f64,
}

impl GridSpec {
    pub fn square(center: Complex64, half_width: f64, n: usize, exclusion_radius: f64) -> Self {
        GridSpec {
            xmin: center.re - half_width,
            xmax: center.re + half_width,
            ymin: center.im - half_width,
            ymax: center.im + half_width,
            nx: n,
            ny: n,
            exclusion_radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidConfig(format!("grid of {}x{} points is empty", self.nx, self.ny)));
        }
        let vals = [self.xmin, self.xmax, self.ymin, self.ymax, self.exclusion_radius];
        if vals.iter().any(|v| !v.is_finite()) || self.xmax < self.xmin || self.ymax < self.ymin {
            return Err(Error::InvalidConfig("grid bounds must be finite and ordered".into()));
        }
        if self.exclusion_radius < 0.0 {
            return Err(Error::InvalidConfig("exclusion radius must be non-negative".into()));
        }
        Ok(())
    }

    fn step(lo: f64, hi: f64, n: usize) -> f64 {
        if n > 1 {
            (hi - lo) / (n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn dx(&self) -> f64 {
        Self::step(self.xmin, self.xmax, self.nx)
    }

    pub fn dy(&self) -> f64 {
        Self::step(self.ymin, self.ymax, self.ny)
    }

    /// Area weight of one sample (Riemann sum).
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Point `(ix, iy)` of the grid.
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        Complex64::new(self.xmin + ix as f64 * self.dx(), self.ymin + iy as f64 * self.dy())
    }

    /// All grid points, row by row from `ymin`.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.ny).flat_map(|iy| (0..self.nx).map(move |ix| self.point(ix, iy))).collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSample {
    pub grid: GridSpec,
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    /// Grid points skipped inside exclusion disks.
    pub excluded: usize,
    pub sup: f64,
    /// Riemann sum `Σ |f| · cell area` over the kept points.
    pub l1_estimate: f64,
}

/// Samples `f` on the grid, skipping points within the exclusion radius of `centers`.
pub fn sample_field<F>(grid: &GridSpec, centers: &[Complex64], f: F) -> Result<FieldSample>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    grid.validate()?;
    let all = grid.points();
    let kept: Vec<Complex64> = all
        .iter()
        .copied()
        .filter(|z| centers.iter().all(|c| (z - c).norm() >= grid.exclusion_radius))
        .collect();
    let values = kept.par_iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let l1_estimate = values.iter().map(|v| v.norm()).sum::<f64>() * grid.cell_area();
    Ok(FieldSample { grid: *grid, excluded: all.len() - kept.len(), points: kept, values, sup, l1_estimate })
}

impl FieldSample {
    /// CSV with columns `z_re, z_im, f_re, f_im`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["z_re", "z_im", "f_re", "f_im"])?;
        for (z, f) in self.points.iter().zip(&self.values) {
            out.write_record([z.re, z.im, f.re, f.im].map(|x| format!("{x:e}")))?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MMeasureVerdict {
    MMeasure,
    NotDetected,
    Degenerate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MMeasureReport {
    pub verdict: MMeasureVerdict,
    pub max_abs: f64,
    pub tv: f64,
    pub threshold: f64,
    pub samples: usize,
    pub caveat: String,
}

/// M-measure verdict: `max_grid |f_μ| > threshold · TV(μ)`.
pub fn m_measure_test(mu: &AtomicMeasure, grid: &GridSpec, threshold: f64) -> Result<MMeasureReport> {
    let caveat = "the Cauchy transform of an atomic measure never vanishes identically off its support; \
                  not-detected only reflects cancellation at this grid and threshold"
        .to_string();
    if mu.is_zero() {
        return Ok(MMeasureReport {
            verdict: MMeasureVerdict::Degenerate,
            max_abs: 0.0,
            tv: 0.0,
            threshold,
            samples: 0,
            caveat,
        });
    }
    let g = GridSpec { exclusion_radius: grid.exclusion_radius.max(M_TEST_EXCLUSION), ..*grid };
    let centers: Vec<Complex64> = mu.atoms().iter().map(|a| a.z).collect();
    let field = sample_field(&g, &centers, |z| cauchy_transform(mu, z))?;
    let verdict = if field.sup > threshold * mu.total_variation() {
        MMeasureVerdict::MMeasure
    } else {
        MMeasureVerdict::NotDetected
    };
    Ok(MMeasureReport {
        verdict,
        max_abs: field.sup,
        tv: mu.total_variation(),
        threshold,
        samples: field.points.len(),
        caveat,
    })
}
