use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{GridSpec, POLE_EXCLUSION};
use crate::riemann::{RationalMap, SpherePoint};

/// Deepest preimage tree evaluated.
pub const MAX_TREE_DEPTH: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Simple finite preimages of `z`, or a branch collision at `depth`.
fn branches(r: &RationalMap, z: Complex64, critical_values: &[Complex64], depth: usize) -> Result<Vec<Complex64>> {
    if critical_values.iter().any(|v| (z - v).norm() < POLE_EXCLUSION) {
        return Err(Error::BranchCollision { z, depth });
    }
    let pre = r.finite_preimages(z)?;
    if pre.iter().any(|&(_, m)| m > 1) {
        return Err(Error::BranchCollision { z, depth });
    }
    Ok(pre.into_iter().map(|(y, _)| y).collect())
}

fn finite_critical_values(r: &RationalMap) -> Vec<Complex64> {
    r.critical_values().into_iter().filter_map(|v| v.as_finite()).collect()
}

/// `R_*(φ)(z) = Σ_{R(y) = z} φ(y) / R'(y)²`.
pub fn ruelle_apply<F>(r: &RationalMap, phi: F, z: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(ruelle_powers(r, phi, z, 1)?[1])
}

/// `(R_*)^n(φ)(z)` as a sum over the depth-`n` preimage tree.
pub fn ruelle_power<F>(r: &RationalMap, phi: F, z: Complex64, n: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(ruelle_powers(r, phi, z, n)?[n])
}

/// `[(R_*)^0 φ(z), ..., (R_*)^n φ(z)]` from one preimage tree; each node carries
/// the product `1/((R^k)'(y))²` of its path.
pub fn ruelle_powers<F>(r: &RationalMap, phi: F, z: Complex64, n: usize) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if n > MAX_TREE_DEPTH {
        return Err(Error::Precondition(format!("preimage tree depth {n} exceeds {MAX_TREE_DEPTH}")));
    }
    let cv = finite_critical_values(r);
    let mut out = Vec::with_capacity(n + 1);
    let mut level = vec![(z, Complex64::new(1.0, 0.0))];
    out.push(phi(z)?);
    for depth in 1..=n {
        let mut next = Vec::with_capacity(level.len() * r.degree());
        for &(w, weight) in &level {
            for y in branches(r, w, &cv, depth)? {
                let d = r.deriv(y);
                next.push((y, weight / (d * d)));
            }
        }
        let mut s = ZERO;
        for &(y, weight) in &next {
            s += phi(y)? * weight;
        }
        out.push(s);
        level = next;
    }
    Ok(out)
}

/// `Bel(μ)(z) = μ(R(z)) conj(R'(z)) / R'(z)` on the grid points, row by row.
pub fn beltrami_apply<F>(r: &RationalMap, mu: F, grid: &GridSpec) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    grid.validate()?;
    let critical = r.finite_critical_points();
    grid.points()
        .par_iter()
        .map(|&z| {
            if critical.iter().any(|c| (z - c).norm() < POLE_EXCLUSION) {
                return Err(Error::BranchCollision { z, depth: 0 });
            }
            let w = r.evaluate(SpherePoint::Finite(z))?;
            let w = w.as_finite().ok_or(Error::Pole(z))?;
            let d = r.derivative(SpherePoint::Finite(z))?;
            Ok(mu(w) * Complex64::from_polar(1.0, -2.0 * d.arg()))
        })
        .collect()
}
