use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::roots::{find_roots, RootCluster};
use super::sphere::SpherePoint;
use super::PrecisionConfig;
use crate::error::{Error, Result};

/// Leading coefficients below this fraction of the largest one are treated as
/// cancellation noise in derived polynomials.
const CANCEL_TRIM: f64 = 1e-13;
/// Relative residual below which a root of one polynomial counts as a root of the other.
const COMMON_ROOT_REL: f64 = 1e-8;

/// A point of the sphere with multiplicity (critical points, preimages).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub point: SpherePoint,
    pub multiplicity: usize,
}

impl Root {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub point: SpherePoint,
    pub multiplicity: usize,
    /// Derivative at the fixed point (in the chart at infinity for `Infinity`).
    pub multiplier: Complex64,
}

/// A rational map `P/Q` of degree `max(deg P, deg Q) >= 1` without common roots.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RationalMapJson", into = "RationalMapJson")]
pub struct RationalMap {
    num: Poly,
    den: Poly,
    dnum: Poly,
    dden: Poly,
    /// P'Q - PQ', whose roots are the finite critical points.
    crit_numer: Poly,
    degree: usize,
    critical: Vec<Root>,
    root_tolerance: f64,
}

/// Wire format: coefficients in ascending degree order as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalMapJson {
    pub num: Vec<[f64; 2]>,
    pub den: Vec<[f64; 2]>,
}

impl TryFrom<RationalMapJson> for RationalMap {
    type Error = Error;
    fn try_from(j: RationalMapJson) -> Result<Self> {
        let conv = |v: &[[f64; 2]]| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        RationalMap::new(conv(&j.num), conv(&j.den))
    }
}

impl From<RationalMap> for RationalMapJson {
    fn from(r: RationalMap) -> Self {
        let conv = |p: &Poly| p.coeffs().iter().map(|c| [c.re, c.im]).collect();
        RationalMapJson { num: conv(&r.num), den: conv(&r.den) }
    }
}

impl RationalMap {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        Self::with_precision(num, den, &PrecisionConfig::default())
    }

    pub fn with_precision(
        num: Vec<Complex64>,
        den: Vec<Complex64>,
        precision: &PrecisionConfig,
    ) -> Result<Self> {
        precision.validate()?;
        let num = Poly::new(num);
        let den = Poly::new(den);
        if den.is_zero() {
            return Err(Error::InvalidMap("denominator is identically zero".into()));
        }
        if num.is_zero() {
            return Err(Error::InvalidMap("numerator is identically zero".into()));
        }
        let degree = num.degree().unwrap().max(den.degree().unwrap());
        if degree == 0 {
            return Err(Error::InvalidMap("constant map has degree 0".into()));
        }
        let tol = precision.root_tolerance;
        check_common_roots(&num, &den, tol)?;

        let dnum = num.derivative();
        let dden = den.derivative();
        let crit_numer = (&(&dnum * &den) - &(&num * &dden)).trimmed(CANCEL_TRIM);
        let mut critical: Vec<Root> = find_roots(&crit_numer, tol)?
            .into_iter()
            .map(|c| Root { point: SpherePoint::Finite(c.z), multiplicity: c.multiplicity })
            .collect();
        let finite_count = crit_numer.degree().unwrap_or(0);
        let at_infinity = (2 * degree - 2).saturating_sub(finite_count);
        if at_infinity > 0 {
            critical.push(Root { point: SpherePoint::Infinity, multiplicity: at_infinity });
        }
        Ok(RationalMap { num, den, dnum, dden, crit_numer, degree, critical, root_tolerance: tol })
    }

    /// Polynomial map with ascending real coefficients.
    pub fn polynomial_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            vec![Complex64::new(1.0, 0.0)],
        )
    }

    pub fn rational_real(num: &[f64], den: &[f64]) -> Result<Self> {
        let conv = |v: &[f64]| v.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        Self::new(conv(num), conv(den))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn root_tolerance(&self) -> f64 {
        self.root_tolerance
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Largest coefficient modulus relative to the leading numerator coefficient
    /// (polynomials); used for escape radii.
    pub fn coefficient_scale(&self) -> f64 {
        let lead = self.num.leading().norm() / self.den.leading().norm();
        let max = self.num.max_coeff() / self.den.leading().norm();
        max / lead
    }

    pub fn evaluate(&self, z: SpherePoint) -> Result<SpherePoint> {
        match z {
            SpherePoint::Infinity => Ok(self.value_at_infinity()),
            SpherePoint::Finite(z) => {
                let q = self.den.eval(z);
                let p = self.num.eval(z);
                let eps = 4.0 * f64::EPSILON;
                if q.norm() <= eps * self.den.abs_scale(z) {
                    if p.norm() <= eps * self.num.abs_scale(z) {
                        return Err(Error::Indeterminate(z));
                    }
                    return Ok(SpherePoint::Infinity);
                }
                Ok(SpherePoint::from(p / q))
            }
        }
    }

    /// Unchecked evaluation at a finite point; non-finite output signals a pole.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    fn value_at_infinity(&self) -> SpherePoint {
        let (dp, dq) = (self.num.degree().unwrap(), self.den.degree().unwrap());
        if dp > dq {
            SpherePoint::Infinity
        } else if dp < dq {
            SpherePoint::Finite(Complex64::new(0.0, 0.0))
        } else {
            SpherePoint::Finite(self.num.leading() / self.den.leading())
        }
    }

    /// R'(z) by the quotient rule.
    pub fn derivative(&self, z: SpherePoint) -> Result<Complex64> {
        let z = z.as_finite().ok_or(Error::AtInfinity)?;
        let q = self.den.eval(z);
        if q.norm() <= 4.0 * f64::EPSILON * self.den.abs_scale(z) {
            return Err(Error::Pole(z));
        }
        Ok(self.crit_numer.eval(z) / (q * q))
    }

    /// Unchecked R'(z) for hot loops.
    #[inline]
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let q = self.den.eval(z);
        (self.dnum.eval(z) * q - self.num.eval(z) * self.dden.eval(z)) / (q * q)
    }

    /// R''(z) = (N'Q - 2NQ')/Q^3 with N = P'Q - PQ'.
    pub fn second_derivative(&self, z: Complex64) -> Result<Complex64> {
        let q = self.den.eval(z);
        if q.norm() <= 4.0 * f64::EPSILON * self.den.abs_scale(z) {
            return Err(Error::Pole(z));
        }
        let (n, dn) = self.crit_numer.eval_with_derivative(z);
        Ok((dn * q - 2.0 * n * self.dden.eval(z)) / (q * q * q))
    }

    /// All critical points with multiplicity; infinity included when critical.
    pub fn critical_points(&self) -> &[Root] {
        &self.critical
    }

    /// Finite critical points.
    pub fn finite_critical_points(&self) -> Vec<Complex64> {
        self.critical.iter().filter_map(|c| c.point.as_finite()).collect()
    }

    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        let z = Poly::identity();
        let f = (&self.num - &(&z * &self.den)).trimmed(CANCEL_TRIM);
        let mut out = Vec::new();
        if !f.is_zero() {
            for RootCluster { z, multiplicity } in find_roots(&f, self.root_tolerance)? {
                out.push(FixedPoint {
                    point: SpherePoint::Finite(z),
                    multiplicity,
                    multiplier: self.derivative(SpherePoint::Finite(z))?,
                });
            }
        }
        let (dp, dq) = (self.num.degree().unwrap(), self.den.degree().unwrap());
        if dp > dq {
            let finite = f.degree().unwrap_or(0);
            let multiplier = if dp - dq >= 2 {
                Complex64::new(0.0, 0.0)
            } else {
                self.den.leading() / self.num.leading()
            };
            out.push(FixedPoint {
                point: SpherePoint::Infinity,
                multiplicity: (self.degree + 1).saturating_sub(finite).max(1),
                multiplier,
            });
        }
        Ok(out)
    }

    /// Solutions of R(y) = w with multiplicity (total multiplicity `deg R`).
    pub fn preimages(&self, w: SpherePoint) -> Result<Vec<Root>> {
        let finite_part = match w {
            SpherePoint::Finite(w) => (&self.num - &self.den.scale(w)).trimmed(CANCEL_TRIM),
            SpherePoint::Infinity => self.den.clone(),
        };
        let mut out: Vec<Root> = if finite_part.degree().unwrap_or(0) > 0 {
            find_roots(&finite_part, self.root_tolerance)?
                .into_iter()
                .map(|c| Root { point: SpherePoint::Finite(c.z), multiplicity: c.multiplicity })
                .collect()
        } else {
            Vec::new()
        };
        let finite = finite_part.degree().unwrap_or(0);
        // deg(P - wQ) < d exactly when R(inf) = w
        if finite < self.degree {
            out.push(Root { point: SpherePoint::Infinity, multiplicity: self.degree - finite });
        }
        Ok(out)
    }

    /// Finite preimages listed with repetition; errors on a preimage at infinity.
    pub fn finite_preimages(&self, w: Complex64) -> Result<Vec<(Complex64, usize)>> {
        self.preimages(SpherePoint::Finite(w))?
            .into_iter()
            .map(|r| match r.point {
                SpherePoint::Finite(y) => Ok((y, r.multiplicity)),
                SpherePoint::Infinity => Err(Error::PreimageAtInfinity(w)),
            })
            .collect()
    }

    /// Finite critical values R(c).
    pub fn critical_values(&self) -> Vec<SpherePoint> {
        self.critical
            .iter()
            .map(|c| self.evaluate(c.point).unwrap_or(SpherePoint::Infinity))
            .collect()
    }

    /// Reports which parts of the standing normalization (fixes 0, 1, infinity;
    /// simple finite critical points) the map satisfies.
    pub fn normalization(&self) -> Normalization {
        let tol = 1e-9;
        let fixes = |p: SpherePoint| {
            self.evaluate(p).map(|r| r.chordal_distance(&p) <= tol).unwrap_or(false)
        };
        let fixes_zero = fixes(SpherePoint::real(0.0));
        let fixes_one = fixes(SpherePoint::real(1.0));
        let fixes_infinity = fixes(SpherePoint::Infinity);
        let simple_critical = self.critical.iter().all(|c| c.is_simple());
        let finite_critical = self.critical.iter().all(|c| !c.point.is_infinite());
        let mut warnings = Vec::new();
        if !(fixes_zero && fixes_one && fixes_infinity) {
            warnings.push("normalization unmet: map does not fix 0, 1 and infinity".to_string());
        }
        if !simple_critical {
            warnings.push("normalization unmet: map has a multiple critical point".to_string());
        }
        if !finite_critical {
            warnings.push("normalization unmet: infinity is a critical point".to_string());
        }
        Normalization { fixes_zero, fixes_one, fixes_infinity, simple_critical, finite_critical, warnings }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub fixes_zero: bool,
    pub fixes_one: bool,
    pub fixes_infinity: bool,
    pub simple_critical: bool,
    pub finite_critical: bool,
    pub warnings: Vec<String>,
}

impl Normalization {
    pub fn is_met(&self) -> bool {
        self.warnings.is_empty()
    }
}

fn check_common_roots(num: &Poly, den: &Poly, tol: f64) -> Result<()> {
    let (small, other) = if num.degree() <= den.degree() { (num, den) } else { (den, num) };
    if small.degree().unwrap_or(0) == 0 {
        return Ok(());
    }
    for r in find_roots(small, tol)? {
        let scale = other.abs_scale(r.z);
        if scale == 0.0 || other.eval(r.z).norm() <= COMMON_ROOT_REL * scale {
            return Err(Error::CommonRoot(r.z));
        }
    }
    Ok(())
}
