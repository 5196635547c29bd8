use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this to a kernel pole are rejected.
pub const POLE_EXCLUSION: f64 = 1e-9;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The normalized kernel `γ_a(z) = a(a-1) / (z(z-1)(z-a))` with poles at `0, 1, a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaKernel {
    pub a: Complex64,
}

impl GammaKernel {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::Precondition(format!("kernel parameter {a} is not finite")));
        }
        if a.norm() < POLE_EXCLUSION || (a - ONE).norm() < POLE_EXCLUSION {
            return Err(Error::Precondition(format!(
                "kernel parameter {a} coincides with a normalization pole (0 or 1)"
            )));
        }
        Ok(GammaKernel { a })
    }

    pub fn poles(&self) -> [Complex64; 3] {
        [Complex64::new(0.0, 0.0), ONE, self.a]
    }

    /// Residues at `0, 1, a`: `a - 1`, `-a`, `1`. They sum to zero, as do the first moments.
    pub fn residues(&self) -> [Complex64; 3] {
        [self.a - ONE, -self.a, ONE]
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        for p in self.poles() {
            if (z - p).norm() < POLE_EXCLUSION {
                return Err(Error::KernelPole(z));
            }
        }
        Ok(self.eval_unchecked(z))
    }

    /// Partial fractions near the poles, the product form in the far field where
    /// the partial fractions cancel.
    #[inline]
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let a = self.a;
        if z.norm() > 4.0 * (1.0 + a.norm()) {
            a * (a - ONE) / (z * (z - ONE) * (z - a))
        } else {
            (a - ONE) / z - a / (z - ONE) + (z - a).inv()
        }
    }
}

/// `γ_a(z)`.
pub fn gamma(a: Complex64, z: Complex64) -> Result<Complex64> {
    GammaKernel::new(a)?.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn examples() {
        let v = gamma(c(2.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!((v - c(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(matches!(gamma(c(2.0, 0.0), c(1.0, 0.0)), Err(Error::KernelPole(_))));
        assert!(gamma(c(1.0, 0.0), c(3.0, 0.0)).is_err());
        let far = gamma(c(2.0, 0.0), c(1e6, 0.0)).unwrap();
        assert!(far.norm() <= 3e-18 * 2.0);
    }

    #[test]
    fn residues_and_moments_cancel() {
        let k = GammaKernel::new(c(0.3, -2.0)).unwrap();
        let r = k.residues();
        let p = k.poles();
        assert!((r[0] + r[1] + r[2]).norm() < 1e-15);
        let moment: Complex64 = (0..3).map(|i| r[i] * p[i]).sum();
        assert!(moment.norm() < 1e-15);
    }

    #[test]
    fn cubic_decay() {
        let a = c(2.0, 1.0);
        let k = GammaKernel::new(a).unwrap();
        let lead = (a * (a - ONE)).norm();
        for r in [1e3, 1e4] {
            let z = Complex64::from_polar(r, 0.7);
            let v = k.eval(z).unwrap().norm() * r * r * r;
            assert!((v / lead - 1.0).abs() < 0.01);
        }
    }
}
