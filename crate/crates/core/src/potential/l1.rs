use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::GammaKernel;
use crate::error::{Error, Result};

/// Relative change between refinement levels accepted as converged.
pub const L1_REFINE_TOL: f64 = 1e-3;

/// Node counts and radii of the per-pole polar quadrature for `∫|γ_a| dA`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct L1Quadrature {
    pub angular_nodes: usize,
    pub radial_nodes: usize,
    /// Innermost radius relative to the smallest pole separation.
    pub inner_factor: f64,
    /// Outer radius is `outer_factor · (1 + |a|)`.
    pub outer_factor: f64,
    pub max_refinements: usize,
}

impl Default for L1Quadrature {
    fn default() -> Self {
        L1Quadrature { angular_nodes: 64, radial_nodes: 40, inner_factor: 1e-6, outer_factor: 1e4, max_refinements: 3 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct L1Estimate {
    pub a: Complex64,
    pub estimate: f64,
    /// `|a ln|a||`, absent when `|a| = 1`.
    pub scale: Option<f64>,
    /// `estimate / scale`, the constant fitted for this `a`.
    pub ratio: Option<f64>,
    pub relative_change: f64,
    pub refinements: usize,
    pub warnings: Vec<String>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        x[n - 1 - i] = -t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫|γ_a| dA` with a partition of unity `w_p ∝ |z-p|^{-6}` over the poles, each
/// piece integrated in polar coordinates around its pole on geometric annuli
/// (ratio 2, log-radial Gauss-Legendre by trapezoid in angle), plus the inner
/// disks `2π|res_p| r_min` and the far tail `2π|a(a-1)| / R_far`.
fn l1_level(k: &GammaKernel, q: &L1Quadrature, ang: usize, rad: usize) -> f64 {
    let poles = k.poles();
    let res = k.residues();
    let a = k.a;
    let dmin = (0..3)
        .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
        .map(|(i, j)| (poles[i] - poles[j]).norm())
        .fold(f64::INFINITY, f64::min);
    let r_min = q.inner_factor * dmin;
    let r_far = q.outer_factor * (1.0 + a.norm());
    let annuli = (r_far / r_min).log2().ceil() as usize;
    let (gx, gw) = gauss_legendre(rad);
    let ln2 = std::f64::consts::LN_2;
    let h = 2.0 * PI / ang as f64;
    let dirs: Vec<Complex64> = (0..ang).map(|m| Complex64::from_polar(1.0, (m as f64 + 0.5) * h)).collect();
    let mut total = 0.0;
    for (p, res_p) in poles.iter().zip(res) {
        total += 2.0 * PI * res_p.norm() * r_min;
        for j in 0..annuli {
            let r0 = r_min * 2f64.powi(j as i32);
            for (x, wx) in gx.iter().zip(&gw) {
                // r = r0 e^s, s in [0, ln 2], dA = r² ds dθ
                let s = 0.5 * ln2 * (x + 1.0);
                let r = r0 * s.exp();
                let mut ring = 0.0;
                for d in &dirs {
                    let z = p + d * r;
                    let inv6 = |q: &Complex64| (z - q).norm_sqr().powi(-3);
                    let own = inv6(p);
                    let wsum: f64 = poles.iter().map(inv6).sum();
                    ring += own / wsum * k.eval_unchecked(z).norm();
                }
                total += ring * h * r * r * 0.5 * ln2 * wx;
            }
        }
    }
    total + 2.0 * PI * (a * (a - 1.0)).norm() / r_far
}

/// Quadrature estimate of `∫|γ_a(z)| |dz|²`, refined by doubling the node counts
/// until the relative change is at most `L1_REFINE_TOL`.
pub fn gamma_l1_estimate(a: Complex64, q: &L1Quadrature) -> Result<L1Estimate> {
    let k = GammaKernel::new(a)?;
    let mut warnings = Vec::new();
    let gap = a.norm().min((a - 1.0).norm());
    if gap < 1e-6 {
        warnings.push(format!("near-singular parameter: a is {gap:e} from a normalization pole"));
    }
    let (mut ang, mut rad) = (q.angular_nodes.max(4), q.radial_nodes.max(2));
    let mut prev = l1_level(&k, q, ang, rad);
    let mut change = f64::INFINITY;
    let mut refinements = 0;
    while refinements < q.max_refinements.max(1) {
        ang *= 2;
        rad *= 2;
        refinements += 1;
        let next = l1_level(&k, q, ang, rad);
        change = (next - prev).abs() / next.abs();
        prev = next;
        if change <= L1_REFINE_TOL {
            break;
        }
    }
    if !(change <= L1_REFINE_TOL) {
        return Err(Error::Quadrature(change));
    }
    let modulus = a.norm();
    let scale = ((modulus - 1.0).abs() > 1e-12).then(|| (modulus * modulus.ln()).abs());
    Ok(L1Estimate {
        a,
        estimate: prev,
        scale,
        ratio: scale.map(|s| prev / s),
        relative_change: change,
        refinements,
        warnings,
    })
}
