use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::map::RationalMap;
use super::poly::Poly;
use super::sphere::SpherePoint;
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Chordal tolerance for "R(p) = p" when checking a normalizing triple.
const FIXED_TOL: f64 = 1e-8;
/// Chordal separation below which triple points count as coincident.
const COINCIDENT_TOL: f64 = 1e-12;

/// `z -> (a z + b) / (c z + d)`, stored with `ad - bc = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusTransform {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusTransform {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !(det.norm() > 1e-12 * scale * scale) {
            return Err(Error::InvalidMap(format!("degenerate Moebius transform, ad - bc = {det}")));
        }
        let s = det.sqrt().inv();
        Ok(MoebiusTransform { a: a * s, b: b * s, c: c * s, d: d * s })
    }

    pub fn identity() -> Self {
        MoebiusTransform { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// The transform sending `p0, p1, pinf` to `0, 1, infinity`.
    pub fn sending_to_standard(p0: SpherePoint, p1: SpherePoint, pinf: SpherePoint) -> Result<Self> {
        use SpherePoint::{Finite as F, Infinity as I};
        let (a, b, c, d) = match (p0, p1, pinf) {
            (F(p0), F(p1), F(pi)) => (p1 - pi, -p0 * (p1 - pi), p1 - p0, -pi * (p1 - p0)),
            (F(p0), F(p1), I) => (ONE, -p0, ZERO, p1 - p0),
            (I, F(p1), F(pi)) => (ZERO, p1 - pi, ONE, -pi),
            (F(p0), I, F(pi)) => (ONE, -p0, ONE, -pi),
            _ => return Err(Error::CoincidentPoints),
        };
        Self::new(a, b, c, d)
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => {
                if self.c == ZERO {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == ZERO {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn inverse(&self) -> Self {
        MoebiusTransform { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        MoebiusTransform {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        // ±identity both act trivially
        let s = if self.a.re < 0.0 { -1.0 } else { 1.0 };
        (self.a * s - ONE).norm() <= tol
            && (self.d * s - ONE).norm() <= tol
            && self.b.norm() <= tol
            && self.c.norm() <= tol
    }
}

/// `M ∘ R ∘ M⁻¹` by homogenized substitution.
pub fn conjugate(r: &RationalMap, m: &MoebiusTransform) -> Result<RationalMap> {
    let inv = m.inverse();
    // z = (a' w + b') / (c' w + d')
    let top = Poly::new(vec![inv.b, inv.a]);
    let bottom = Poly::new(vec![inv.d, inv.c]);
    let deg = r.degree();
    let homogenize = |p: &Poly| {
        let mut acc = Poly::zero();
        for (i, &ci) in p.coeffs().iter().enumerate() {
            if ci == ZERO {
                continue;
            }
            let term = &top.pow(i) * &bottom.pow(deg - i);
            acc = &acc + &term.scale(ci);
        }
        acc
    };
    let p = homogenize(r.numerator());
    let q = homogenize(r.denominator());
    let num = (&p.scale(m.a) + &q.scale(m.b)).trimmed(1e-13);
    let den = (&p.scale(m.c) + &q.scale(m.d)).trimmed(1e-13);
    // drop roundoff-level coefficients so exact structure (e.g. a fixed 0) survives
    let clean = |poly: Poly| {
        let scale = poly.max_coeff();
        Poly::new(
            poly.coeffs()
                .iter()
                .map(|&c| if c.norm() <= 1e-14 * scale { ZERO } else { c })
                .collect(),
        )
    };
    let (num, den) = (clean(num), clean(den));
    RationalMap::new(num.coeffs().to_vec(), den.coeffs().to_vec())
}

/// The conjugate of `r` fixing 0, 1 and infinity, along with the conjugating transform.
///
/// With no triple given, uses the three fixed points with the largest minimum
/// pairwise chordal separation, ordered lexicographically (infinity last).
pub fn moebius_normalize(
    r: &RationalMap,
    fixed_triple: Option<[SpherePoint; 3]>,
) -> Result<(RationalMap, MoebiusTransform)> {
    let triple = match fixed_triple {
        Some(t) => {
            for p in &t {
                let image = r.evaluate(*p)?;
                if image.chordal_distance(p) > FIXED_TOL {
                    return Err(Error::NotFixed(p.to_string()));
                }
            }
            t
        }
        None => default_triple(r)?,
    };
    for i in 0..3 {
        for j in i + 1..3 {
            if triple[i].chordal_distance(&triple[j]) <= COINCIDENT_TOL {
                return Err(Error::CoincidentPoints);
            }
        }
    }
    let m = MoebiusTransform::sending_to_standard(triple[0], triple[1], triple[2])?;
    Ok((conjugate(r, &m)?, m))
}

pub fn default_triple(r: &RationalMap) -> Result<[SpherePoint; 3]> {
    let mut pts: Vec<SpherePoint> = r.fixed_points()?.into_iter().map(|f| f.point).collect();
    pts.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap());
    if pts.len() < 3 {
        return Err(Error::Precondition(format!(
            "map has only {} distinct fixed points; three are needed",
            pts.len()
        )));
    }
    let mut best: Option<(f64, [usize; 3])> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let sep = pts[i]
                    .chordal_distance(&pts[j])
                    .min(pts[i].chordal_distance(&pts[k]))
                    .min(pts[j].chordal_distance(&pts[k]));
                // strict improvement keeps the lexicographically first triple on ties
                if best.is_none_or(|(s, _)| sep > s * (1.0 + 1e-12)) {
                    best = Some((sep, [i, j, k]));
                }
            }
        }
    }
    let [i, j, k] = best.unwrap().1;
    Ok([pts[i], pts[j], pts[k]])
}
