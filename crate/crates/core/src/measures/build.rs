use num_complex::Complex64;

use super::atomic::{AtomicMeasure, MeasureBuilder};
use crate::error::{Error, Result};
use crate::orbit::INFINITY_CHORDAL_TOL;
use crate::riemann::{RationalMap, SpherePoint};
use crate::summability::{check_in_disk, NorlundWeights, Sequence, REGULARITY_SLACK};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// The two Voronoi accumulation orders are cross-checked up to this many terms.
pub const VORONOI_CROSS_CHECK_MAX: usize = 4096;
/// Relative agreement required between the two Voronoi accumulation orders.
pub const VORONOI_ORDER_TOL: f64 = 1e-10;

/// Atom indices of `z, R(z), ..., R^N(z)` in `builder`, erroring near infinity.
fn orbit_indices(r: &RationalMap, z: Complex64, n_max: usize, builder: &mut MeasureBuilder) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(n_max + 1);
    let mut p = z;
    for n in 0..=n_max {
        let far = !(p.re.is_finite() && p.im.is_finite())
            || SpherePoint::Finite(p).chordal_distance(&SpherePoint::Infinity) <= INFINITY_CHORDAL_TOL;
        if far {
            return Err(Error::OrbitEscaped(n));
        }
        idx.push(builder.index_of(p));
        if n < n_max {
            p = r.eval(p);
        }
    }
    Ok(idx)
}

fn terms(a: &Sequence, n_max: usize) -> Result<Vec<Complex64>> {
    if let Some(len) = a.available() {
        if len < n_max + 1 {
            return Err(Error::LengthMismatch { needed: n_max + 1, available: len });
        }
    }
    Ok(a.take(n_max + 1))
}

fn trailing_sup(v: &[Complex64]) -> f64 {
    v[(v.len() - 1) / 2..].iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `ν_λ = (1-λ) Σ_{n<=N} a_n λ^n δ_{R^n z}`, merged by location.
pub fn build_abel_measure(
    r: &RationalMap,
    z: Complex64,
    a: &Sequence,
    lambda: Complex64,
    n_max: usize,
) -> Result<AtomicMeasure> {
    check_in_disk(lambda)?;
    let x = terms(a, n_max)?;
    let mut b = MeasureBuilder::new();
    let idx = orbit_indices(r, z, n_max, &mut b)?;
    let factor = ONE - lambda;
    let mut p = ONE;
    for (k, &xk) in x.iter().enumerate() {
        b.add_at(idx[k], factor * (xk * p));
        p *= lambda;
    }
    let rl = lambda.norm();
    let tail = factor.norm() * trailing_sup(&x) * ((n_max + 1) as f64 * rl.ln()).exp() / (1.0 - rl);
    Ok(b.finish(tail))
}

/// Voronoi measure `ν_λ = (1-λ) Σ_{n<=N} T_n λ^n` with
/// `T_n = Σ_{k<=n} q_{n-k} x_k δ_{R^k z}`, accumulated by atom:
/// the atom `R^k z` receives `(1-λ) x_k λ^k Σ_{m<=N-k} q_m λ^m`.
///
/// For `N <= VORONOI_CROSS_CHECK_MAX` the measure is also accumulated term by
/// term (`voronoi_by_terms`) and the two must agree.
pub fn build_voronoi_measure(
    r: &RationalMap,
    z: Complex64,
    x: &Sequence,
    w: &NorlundWeights,
    lambda: Complex64,
    n_max: usize,
) -> Result<AtomicMeasure> {
    check_in_disk(lambda)?;
    let xs = terms(x, n_max)?;
    let w = w.extended(n_max + 1)?;
    check_convolution_radius(&xs, &w)?;
    let q = w.weights();
    // G_j = Σ_{m<=j} q_m λ^m
    let mut g = Vec::with_capacity(n_max + 1);
    let (mut acc, mut p) = (ZERO, ONE);
    for &qm in &q[..=n_max] {
        acc += p * qm;
        g.push(acc);
        p *= lambda;
    }
    let mut b = MeasureBuilder::new();
    let idx = orbit_indices(r, z, n_max, &mut b)?;
    let factor = ONE - lambda;
    let mut p = ONE;
    for (k, &xk) in xs.iter().enumerate() {
        b.add_at(idx[k], factor * (xk * p) * g[n_max - k]);
        p *= lambda;
    }
    let rl = lambda.norm();
    let q_tail = q[n_max / 2..=n_max].iter().copied().fold(0.0, f64::max);
    let big_q = w.partial_sums()[n_max];
    let tail = factor.norm()
        * trailing_sup(&xs)
        * ((n_max + 1) as f64 * rl.ln()).exp()
        * (big_q / (1.0 - rl) + q_tail / ((1.0 - rl) * (1.0 - rl)));
    let measure = b.finish(tail);

    if n_max <= VORONOI_CROSS_CHECK_MAX {
        let other = voronoi_by_terms(r, z, &xs, &w, lambda, n_max)?;
        let d = max_atom_difference(&measure, &other);
        let scale = measure.total_variation().max(other.total_variation());
        if d > VORONOI_ORDER_TOL * scale {
            return Err(Error::ConvolutionMismatch { discrepancy: d, scale });
        }
    }
    Ok(measure)
}

/// The Voronoi measure accumulated term by term: `Σ_n (1-λ) λ^n T_n`.
pub fn voronoi_by_terms(
    r: &RationalMap,
    z: Complex64,
    xs: &[Complex64],
    w: &NorlundWeights,
    lambda: Complex64,
    n_max: usize,
) -> Result<AtomicMeasure> {
    check_in_disk(lambda)?;
    if xs.len() < n_max + 1 {
        return Err(Error::LengthMismatch { needed: n_max + 1, available: xs.len() });
    }
    let w = w.extended(n_max + 1)?;
    let q = w.weights();
    let mut b = MeasureBuilder::new();
    let idx = orbit_indices(r, z, n_max, &mut b)?;
    let factor = ONE - lambda;
    let mut p = ONE;
    for n in 0..=n_max {
        let c = factor * p;
        for k in 0..=n {
            if q[n - k] != 0.0 {
                b.add_at(idx[k], c * (xs[k] * q[n - k]));
            }
        }
        p *= lambda;
    }
    Ok(b.finish(0.0))
}

/// Largest weight difference between two measures, matching atoms by location.
pub fn max_atom_difference(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let mut d: f64 = 0.0;
    for x in a.atoms() {
        let other = b
            .atoms()
            .iter()
            .find(|y| (y.z - x.z).norm() <= super::MERGE_RADIUS)
            .map_or(ZERO, |y| y.w);
        d = d.max((x.w - other).norm());
    }
    for y in b.atoms() {
        if !a.atoms().iter().any(|x| (y.z - x.z).norm() <= super::MERGE_RADIUS) {
            d = d.max(y.w.norm());
        }
    }
    d
}

/// The convolution `N(|x|)_m = Σ q_i |x_{m-i}|` must have radius of convergence
/// at least one. Proxy: the growth rate `exp(slope)` of `ln N(|x|)_m` fitted over
/// up to 64 indices of the trailing half, at most `1 + REGULARITY_SLACK`.
fn check_convolution_radius(xs: &[Complex64], w: &NorlundWeights) -> Result<()> {
    let n = xs.len();
    if n < 16 {
        return Ok(());
    }
    let q = w.weights();
    let first = (n - 1) / 2;
    let step = ((n - first) / 64).max(1);
    let mut logs = Vec::new();
    let mut idx = Vec::new();
    for m in (first..n).step_by(step) {
        let c: f64 = (0..=m).map(|i| q[i] * xs[m - i].norm()).sum();
        if c > 0.0 {
            logs.push(c.ln());
            idx.push(m as f64);
        }
    }
    if logs.len() < 2 {
        return Ok(());
    }
    let mx = idx.iter().sum::<f64>() / idx.len() as f64;
    let my = logs.iter().sum::<f64>() / logs.len() as f64;
    let sxy: f64 = idx.iter().zip(&logs).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = idx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let rate = (sxy / sxx).exp();
    if rate > 1.0 + REGULARITY_SLACK {
        return Err(Error::Precondition(format!(
            "convolution N(|x|) grows at rate {rate:.4} > 1: radius of convergence below one"
        )));
    }
    Ok(())
}
