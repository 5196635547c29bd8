use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::logpolar::LogPolar;
use super::record::{iterate_orbit, OrbitRecord};
use crate::error::{Error, Result};
use crate::riemann::{RationalMap, SpherePoint};

/// The sequence `σ_n = 1/(R^n)'(v)`, `v = R(c)`, with partial sums and barycenters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    /// `None` for synthetic spectra.
    pub critical_point: Option<Complex64>,
    pub critical_value: Option<Complex64>,
    pub entries: Vec<LogPolar>,
    /// `S_n = σ_0 + ... + σ_n`.
    pub partial_sums: Vec<Complex64>,
    /// `barycenters[k] = b_{k+1} = S_k / (k + 1)`.
    pub barycenters: Vec<Complex64>,
    /// Orbit of the critical value, `v, R(v), ...`.
    pub orbit: Vec<Complex64>,
    /// The orbit landed on a critical point before the requested length.
    pub degenerate: bool,
    pub approached_infinity: bool,
}

/// `S_n` and `b_{n+1} = S_n/(n+1)` for a generic sequence.
pub fn partial_sums_and_barycenters(values: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut sums = Vec::with_capacity(values.len());
    let mut bary = Vec::with_capacity(values.len());
    let mut s = Complex64::new(0.0, 0.0);
    for (k, &v) in values.iter().enumerate() {
        s += v;
        sums.push(s);
        bary.push(s / (k + 1) as f64);
    }
    (sums, bary)
}

impl Spectrum {
    /// Spectrum of the critical point `c` up to `σ_len`.
    pub fn compute(r: &RationalMap, c: SpherePoint, len: usize) -> Result<Self> {
        let c = c.as_finite().ok_or_else(|| {
            Error::Precondition("infinity is excluded from spectrum analysis".into())
        })?;
        let critical = r.finite_critical_points();
        if !critical.iter().any(|k| (k - c).norm() <= 1e-9 * (1.0 + c.norm())) {
            return Err(Error::Precondition(format!("{c} is not a critical point")));
        }
        let v = r.evaluate(SpherePoint::Finite(c))?;
        let Some(vf) = v.as_finite() else {
            return Ok(Self::from_entries(Some(c), None, vec![LogPolar::ONE], Vec::new(), false, true));
        };
        let rec = iterate_orbit(r, SpherePoint::Finite(vf), len);
        Ok(Self::from_orbit(c, &rec))
    }

    fn from_orbit(c: Complex64, rec: &OrbitRecord) -> Self {
        let mut entries = Vec::with_capacity(rec.factors.len() + 1);
        let mut sigma = LogPolar::ONE;
        entries.push(sigma);
        for &f in &rec.factors {
            if f.is_zero() {
                break;
            }
            sigma = sigma / f;
            entries.push(sigma);
        }
        Self::from_entries(
            Some(c),
            rec.points.first().copied(),
            entries,
            rec.points.clone(),
            rec.hit_critical_point,
            rec.approached_infinity,
        )
    }

    fn from_entries(
        critical_point: Option<Complex64>,
        critical_value: Option<Complex64>,
        entries: Vec<LogPolar>,
        orbit: Vec<Complex64>,
        degenerate: bool,
        approached_infinity: bool,
    ) -> Self {
        let values: Vec<Complex64> = entries.iter().map(|e| e.to_complex()).collect();
        let (partial_sums, barycenters) = partial_sums_and_barycenters(&values);
        Spectrum {
            critical_point,
            critical_value,
            entries,
            partial_sums,
            barycenters,
            orbit,
            degenerate,
            approached_infinity,
        }
    }

    /// A spectrum from explicit values (for testing summability and classifiers).
    pub fn synthetic(values: &[Complex64]) -> Self {
        let entries = values.iter().map(|&v| LogPolar::from_complex(v)).collect();
        Self::from_entries(None, None, entries, Vec::new(), false, false)
    }

    /// A spectrum from log-polar entries.
    pub fn synthetic_log_polar(entries: Vec<LogPolar>) -> Self {
        Self::from_entries(None, None, entries, Vec::new(), false, false)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Truncated before the requested length (critical hit or infinity).
    pub fn is_truncated(&self) -> bool {
        self.degenerate || self.approached_infinity
    }

    pub fn sigma(&self, n: usize) -> Complex64 {
        self.entries[n].to_complex()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.to_complex()).collect()
    }

    pub fn log_abs(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.log_mod).collect()
    }

    /// `b_n = S_{n-1}/n` for `n >= 1`.
    pub fn barycenter(&self, n: usize) -> Complex64 {
        assert!(n >= 1, "barycenters start at n = 1");
        self.barycenters[n - 1]
    }

    /// `ln(|S_n| / |σ_n|)`, computed without forming `σ_n` in double range.
    pub fn log_stability_ratio(&self) -> Vec<f64> {
        self.partial_sums
            .iter()
            .zip(&self.entries)
            .map(|(s, e)| s.norm().ln() - e.log_mod)
            .collect()
    }

    /// CSV with columns `n, re_sigma, im_sigma, log10_abs_sigma, re_S, im_S, abs_b`.
    /// `abs_b` is empty for `n = 0`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "re_sigma", "im_sigma", "log10_abs_sigma", "re_S", "im_S", "abs_b"])?;
        for (n, e) in self.entries.iter().enumerate() {
            let s = e.to_complex();
            let b = if n == 0 { String::new() } else { fmt(self.barycenter(n).norm()) };
            out.write_record([
                n.to_string(),
                fmt(s.re),
                fmt(s.im),
                fmt(e.log10_abs()),
                fmt(self.partial_sums[n].re),
                fmt(self.partial_sums[n].im),
                b,
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a spectrum CSV back. Moduli come from the `log10_abs_sigma` column,
    /// so entries below double range survive; arguments come from `re/im`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut entries = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Parse(format!("row {i}: missing column {k}")))?
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {i}: {e}")))
            };
            let n = field(0)? as usize;
            if n != i {
                return Err(Error::Parse(format!("row {i}: index {n} out of sequence")));
            }
            let (re, im, lg) = (field(1)?, field(2)?, field(3)?);
            // signed zeros keep the argument of underflowed entries
            let arg = im.atan2(re);
            entries.push(LogPolar::new(lg * std::f64::consts::LN_10, arg));
        }
        Ok(Self::synthetic_log_polar(entries))
    }
}

/// Shortest round-trip representation.
pub(crate) fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
