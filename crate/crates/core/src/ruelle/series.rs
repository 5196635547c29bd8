use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{ruelle_powers, MAX_TREE_DEPTH};
use crate::error::{Error, Result};
use crate::orbit::{fit_slope, LogPolar};
use crate::potential::{GammaKernel, POLE_EXCLUSION};
use crate::riemann::RationalMap;
use crate::summability::check_in_disk;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `γ_a(z)` for any finite `a`, continuous in `a` (zero at `a = 0, 1`);
/// errors within `POLE_EXCLUSION` of `0, 1, a`.
pub fn kernel_value(a: Complex64, z: Complex64) -> Result<Complex64> {
    if z.norm() < POLE_EXCLUSION || (z - ONE).norm() < POLE_EXCLUSION || (z - a).norm() < POLE_EXCLUSION {
        return Err(Error::KernelPole(z));
    }
    Ok(match GammaKernel::new(a) {
        Ok(k) => k.eval_unchecked(z),
        Err(_) => a * (a - ONE) / (z * (z - ONE) * (z - a)),
    })
}

/// A finite combination `Σ c_i γ_{a_i}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelCombo {
    pub terms: Vec<(Complex64, Complex64)>,
}

impl KernelCombo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(a: Complex64) -> Result<Self> {
        GammaKernel::new(a)?;
        Ok(KernelCombo { terms: vec![(a, ONE)] })
    }

    pub fn push(&mut self, a: Complex64, c: Complex64) -> Result<()> {
        GammaKernel::new(a)?;
        self.terms.push((a, c));
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut s = ZERO;
        for &(a, c) in &self.terms {
            s += c * GammaKernel::new(a)?.eval(z)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    /// Terms summed (`N + 1`).
    pub terms: usize,
    /// `log10 |term_n|` per term.
    pub log10_magnitudes: Vec<f64>,
    pub tail_bound: f64,
    pub method: String,
}

impl SeriesTruncation {
    /// Tail `|t_N| ρ / (1 - ρ)` with `ρ = exp(slope)` of `ln|t_n|` over the trailing
    /// half; infinite when `ρ >= 1`.
    pub fn geometric_fit(terms: &[Complex64]) -> Self {
        let logs: Vec<f64> = terms.iter().map(|t| t.norm().ln()).collect();
        let last = terms.last().map_or(0.0, |t| t.norm());
        let tail_bound = if last == 0.0 {
            0.0
        } else {
            let finite: Vec<f64> = logs[logs.len() / 2..].iter().copied().filter(|l| l.is_finite()).collect();
            let rho = fit_slope(&finite).exp();
            if finite.len() >= 2 && rho < 1.0 {
                last * rho / (1.0 - rho)
            } else {
                f64::INFINITY
            }
        };
        SeriesTruncation {
            terms: terms.len(),
            log10_magnitudes: logs.iter().map(|l| l / std::f64::consts::LN_10).collect(),
            tail_bound,
            method: "geometric-fit".into(),
        }
    }
}

/// Terms `λ^n γ_{R^n(a)}(z) / (R^n)'(a)`, `n = 0..=N`.
pub fn poincare_a_terms(r: &RationalMap, a: Complex64, z: Complex64, lambda: Complex64, n: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = a;
    let mut weight = LogPolar::ONE;
    let l = LogPolar::from_complex(lambda);
    for k in 0..=n {
        if !(p.re.is_finite() && p.im.is_finite()) {
            return Err(Error::OrbitEscaped(k));
        }
        if (z - p).norm() < POLE_EXCLUSION {
            return Err(Error::KernelPole(z));
        }
        out.push(if weight.is_zero() { ZERO } else { weight.to_complex() * kernel_value(p, z)? });
        if k < n {
            let d = r.deriv(p);
            if d == ZERO {
                return Err(Error::OrbitCritical(k));
            }
            weight = weight * l / LogPolar::from_complex(d);
            p = r.eval(p);
        }
    }
    Ok(out)
}

/// `A_a(z, λ) = Σ_{n<=N} λ^n γ_{R^n(a)}(z) / (R^n)'(a)`.
pub fn poincare_a(
    r: &RationalMap,
    a: Complex64,
    z: Complex64,
    lambda: Complex64,
    n: usize,
) -> Result<(Complex64, SeriesTruncation)> {
    if z.norm() < POLE_EXCLUSION || (z - ONE).norm() < POLE_EXCLUSION {
        return Err(Error::KernelPole(z));
    }
    let t = poincare_a_terms(r, a, z, lambda, n)?;
    Ok((t.iter().sum(), SeriesTruncation::geometric_fit(&t)))
}

/// Terms `λ^n (R_*)^n γ_a(z)`, `n = 0..=N`.
pub fn poincare_b_terms(r: &RationalMap, a: Complex64, z: Complex64, lambda: Complex64, n: usize) -> Result<Vec<Complex64>> {
    let k = GammaKernel::new(a)?;
    let powers = ruelle_powers(r, |y| k.eval(y), z, n)?;
    let mut l = ONE;
    Ok(powers
        .into_iter()
        .map(|p| {
            let t = p * l;
            l *= lambda;
            t
        })
        .collect())
}

/// `B_a(z, λ) = Σ_{n<=N} λ^n (R_*)^n γ_a(z)`, `N <= MAX_TREE_DEPTH`.
pub fn poincare_b(
    r: &RationalMap,
    a: Complex64,
    z: Complex64,
    lambda: Complex64,
    n: usize,
) -> Result<(Complex64, SeriesTruncation)> {
    check_in_disk(lambda)?;
    if n > MAX_TREE_DEPTH {
        return Err(Error::Precondition(format!("B-series order {n} exceeds {MAX_TREE_DEPTH}")));
    }
    let t = poincare_b_terms(r, a, z, lambda, n)?;
    Ok((t.iter().sum(), SeriesTruncation::geometric_fit(&t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::gamma;
    use crate::ruelle::ruelle_apply;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn combo_matches_terms() {
        let mut k = KernelCombo::single(c(2.0, 0.0)).unwrap();
        k.push(c(-1.0, 0.5), c(0.3, 0.2)).unwrap();
        let z = c(0.4, 0.9);
        let direct = gamma(c(2.0, 0.0), z).unwrap() + c(0.3, 0.2) * gamma(c(-1.0, 0.5), z).unwrap();
        assert!((k.eval(z).unwrap() - direct).norm() <= 1e-12 * direct.norm());
        assert!(k.push(c(1.0, 0.0), ONE).is_err());
    }

    #[test]
    fn zeroth_order_terms() {
        let r = RationalMap::polynomial_real(&[-2.0, 0.0, 1.0]).unwrap();
        let (a, z) = (c(0.3, 0.2), c(-0.7, 1.1));
        let g = gamma(a, z).unwrap();
        assert_eq!(poincare_a(&r, a, z, ZERO, 5).unwrap().0, g);
        assert_eq!(poincare_b(&r, a, z, ZERO, 4).unwrap().0, g);
    }

    #[test]
    fn kernel_value_vanishes_at_normalization_points() {
        assert_eq!(kernel_value(ZERO, c(2.0, 1.0)).unwrap(), ZERO);
        assert!(kernel_value(c(2.0, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn b_terms_follow_ruelle() {
        let r = RationalMap::rational_real(&[0.0, 0.5, 1.0], &[1.2, 0.3]).unwrap();
        let (a, z) = (c(0.4, -0.6), c(-1.3, 0.8));
        let t = poincare_b_terms(&r, a, z, c(0.5, 0.0), 2).unwrap();
        let k = GammaKernel::new(a).unwrap();
        let once = ruelle_apply(&r, |y| k.eval(y), z).unwrap();
        assert!((t[1] - 0.5 * once).norm() <= 1e-12 * once.norm());
        let twice = ruelle_apply(&r, |y| ruelle_apply(&r, |u| k.eval(u), y), z).unwrap();
        assert!((t[2] - 0.25 * twice).norm() <= 1e-10 * twice.norm());
    }

    #[test]
    fn geometric_tail() {
        let t: Vec<Complex64> = (0..10).map(|n| c(0.5f64.powi(n), 0.0)).collect();
        let s = SeriesTruncation::geometric_fit(&t);
        assert!((s.tail_bound - 0.5f64.powi(9)).abs() < 1e-12);
        let grow: Vec<Complex64> = (0..10).map(|n| c(2f64.powi(n), 0.0)).collect();
        assert!(SeriesTruncation::geometric_fit(&grow).tail_bound.is_infinite());
    }
}
