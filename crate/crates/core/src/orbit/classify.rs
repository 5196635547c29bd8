use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Per-step threshold on `log|σ_n|` trends.
pub const TREND_EPS: f64 = 0.01;
/// Half-width of the band of `log|σ_n|` accepted as bounded.
pub const BAND_HALF_WIDTH: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrichotomyCase {
    /// `(R^n)'(v) -> 0`: `σ_n` grows.
    DerivativeToZero,
    /// A subsequence of `(R^n)'(v)` tends to infinity: `σ_n` decays along it.
    SubsequenceToInfinity,
    /// `liminf |σ_n| > 0` with bounded `σ_n`.
    BoundedLiminf,
    Degenerate,
    Undecided,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrichotomyVerdict {
    pub case: TrichotomyCase,
    pub window: usize,
    /// Least-squares slope of `ln|σ_n|` over the trailing window.
    #[serde(with = "crate::floats::nonfinite")]
    pub slope: f64,
    /// Drop of the window minimum of `ln|σ_n|` between the last two windows.
    #[serde(with = "crate::floats::nonfinite")]
    pub window_min_drop: f64,
    /// `max - min` of `ln|σ_n|` over the trailing window.
    #[serde(with = "crate::floats::nonfinite")]
    pub band: f64,
    /// `min |σ_n|` over the trailing window (estimate of the liminf).
    #[serde(with = "crate::floats::nonfinite")]
    pub liminf_abs: f64,
    #[serde(with = "crate::floats::nonfinite")]
    pub limsup_abs: f64,
}

/// Least-squares slope of `ys` against `x0, x0 + 1, ...`.
pub fn fit_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    if ys.len() < 2 {
        return 0.0;
    }
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in ys.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Finite-horizon trichotomy label from trailing-window statistics of `ln|σ_n|`.
pub fn trichotomy_classify(s: &Spectrum, window: usize) -> Result<TrichotomyVerdict> {
    let degenerate = |window| TrichotomyVerdict {
        case: TrichotomyCase::Degenerate,
        window,
        slope: f64::NAN,
        window_min_drop: f64::NAN,
        band: f64::NAN,
        liminf_abs: f64::NAN,
        limsup_abs: f64::NAN,
    };
    if s.degenerate {
        return Ok(degenerate(window));
    }
    if window < 2 {
        return Err(Error::Precondition("trichotomy window must be at least 2".into()));
    }
    if s.len() < 2 * window {
        return Err(Error::LengthMismatch { needed: 2 * window, available: s.len() });
    }
    let logs = s.log_abs();
    let last = &logs[logs.len() - window..];
    let prev = &logs[logs.len() - 2 * window..logs.len() - window];
    if last.iter().chain(prev).any(|x| !x.is_finite()) {
        return Ok(degenerate(window));
    }
    let slope = fit_slope(last);
    let window_min_drop = min_of(prev) - min_of(last);
    let band = max_of(last) - min_of(last);
    let case = if slope >= TREND_EPS {
        TrichotomyCase::DerivativeToZero
    } else if window_min_drop >= TREND_EPS * window as f64 {
        TrichotomyCase::SubsequenceToInfinity
    } else if band <= 2.0 * BAND_HALF_WIDTH {
        TrichotomyCase::BoundedLiminf
    } else {
        TrichotomyCase::Undecided
    };
    Ok(TrichotomyVerdict {
        case,
        window,
        slope,
        window_min_drop,
        band,
        liminf_abs: min_of(last).exp(),
        limsup_abs: max_of(last).exp(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadiusEstimate {
    /// `1 / max_{n in trailing half} |σ_n|^{1/n}`; `+inf` for an all-zero tail.
    #[serde(with = "crate::floats::nonfinite")]
    pub radius: f64,
    /// Spread of the per-index estimates `|σ_n|^{-1/n}` over the trailing half.
    #[serde(with = "crate::floats::nonfinite")]
    pub error_bar: f64,
    /// `exp(-slope)` of the linear fit of `ln|σ_n|` over the trailing half.
    #[serde(with = "crate::floats::nonfinite")]
    pub fit_radius: f64,
    pub first_index: usize,
    pub last_index: usize,
}

/// Cauchy-Hadamard radius of convergence of `Σ σ_n x^n`.
pub fn radius_of_convergence(s: &Spectrum) -> Result<RadiusEstimate> {
    if s.len() < 16 {
        return Err(Error::LengthMismatch { needed: 16, available: s.len() });
    }
    let logs = s.log_abs();
    let last_index = logs.len() - 1;
    let first_index = (last_index / 2).max(1);
    let tail = &logs[first_index..=last_index];
    if tail.iter().all(|&l| l == f64::NEG_INFINITY) {
        return Ok(RadiusEstimate {
            radius: f64::INFINITY,
            error_bar: 0.0,
            fit_radius: f64::INFINITY,
            first_index,
            last_index,
        });
    }
    let roots: Vec<f64> = tail
        .iter()
        .enumerate()
        .map(|(i, &l)| l / (first_index + i) as f64)
        .collect();
    let radius = (-max_of(&roots)).exp();
    let per_index: Vec<f64> = roots.iter().filter(|r| r.is_finite()).map(|r| (-r).exp()).collect();
    let error_bar = max_of(&per_index) - min_of(&per_index);
    let finite: Vec<f64> = tail.iter().copied().filter(|l| l.is_finite()).collect();
    let fit_radius = (-fit_slope(&finite)).exp();
    Ok(RadiusEstimate { radius, error_bar, fit_radius, first_index, last_index })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OscillationStats {
    /// `sup_n |σ_{n+1}/σ_n| = sup 1/|R'(R^n v)|`.
    #[serde(with = "crate::floats::nonfinite")]
    pub sup_ratio: f64,
    /// `min |R'(R^n v)|` over the trailing half of the horizon.
    #[serde(with = "crate::floats::nonfinite")]
    pub liminf_derivative: f64,
}

/// `None` for degenerate or too-short spectra.
pub fn oscillation_stats(s: &Spectrum) -> Option<OscillationStats> {
    if s.degenerate || s.len() < 2 {
        return None;
    }
    let logs = s.log_abs();
    let steps: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let sup_ratio = max_of(&steps).exp();
    let half = &steps[steps.len() / 2..];
    let liminf_derivative = (-max_of(half)).exp();
    Some(OscillationStats { sup_ratio, liminf_derivative })
}

/// Finite-horizon proxy for `σ_n = o(n)`: `max_{n > N/2} |σ_n| / n`.
pub fn sublinear_growth_proxy(s: &Spectrum) -> f64 {
    let n = s.len();
    (n / 2 + 1..n)
        .map(|k| (s.entries[k].log_mod - (k as f64).ln()).exp())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::orbit::LogPolar;
    use crate::riemann::{RationalMap, SpherePoint};

    fn spectrum(coeffs: &[f64], n: usize) -> Spectrum {
        let r = RationalMap::polynomial_real(coeffs).unwrap();
        Spectrum::compute(&r, SpherePoint::real(0.0), n).unwrap()
    }

    fn synthetic(f: impl Fn(usize) -> f64, n: usize) -> Spectrum {
        Spectrum::synthetic_log_polar((0..n).map(|k| LogPolar::new(f(k), 0.0)).collect())
    }

    #[test]
    fn chebyshev_is_subsequence_to_infinity() {
        let v = trichotomy_classify(&spectrum(&[-2.0, 0.0, 1.0], 64), 16).unwrap();
        assert_eq!(v.case, TrichotomyCase::SubsequenceToInfinity);
        assert!((v.slope + 4f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn parabolic_is_derivative_to_zero() {
        let v = trichotomy_classify(&spectrum(&[0.25, 0.0, 1.0], 200), 25).unwrap();
        assert_eq!(v.case, TrichotomyCase::DerivativeToZero, "{v:?}");
    }

    #[test]
    fn constant_is_bounded() {
        let s = Spectrum::synthetic(&[Complex64::new(1.0, 0.0); 40]);
        let v = trichotomy_classify(&s, 8).unwrap();
        assert_eq!(v.case, TrichotomyCase::BoundedLiminf);
        assert_eq!(v.liminf_abs, 1.0);
    }

    #[test]
    fn synthetic_forced_labels() {
        for w in [8, 12, 20] {
            let decay = synthetic(|k| -0.3 * k as f64, 4 * w);
            assert_eq!(trichotomy_classify(&decay, w).unwrap().case, TrichotomyCase::SubsequenceToInfinity);
            let growth = synthetic(|k| 0.2 * k as f64, 4 * w);
            assert_eq!(trichotomy_classify(&growth, w).unwrap().case, TrichotomyCase::DerivativeToZero);
            let flat = synthetic(|k| if k % 2 == 0 { 0.3 } else { -0.3 }, 4 * w);
            assert_eq!(trichotomy_classify(&flat, w).unwrap().case, TrichotomyCase::BoundedLiminf);
        }
    }

    #[test]
    fn degenerate_and_short_spectra() {
        let d = trichotomy_classify(&spectrum(&[0.0, 0.0, 1.0], 10), 4).unwrap();
        assert_eq!(d.case, TrichotomyCase::Degenerate);
        assert!(trichotomy_classify(&spectrum(&[-2.0, 0.0, 1.0], 10), 8).is_err());
    }

    #[test]
    fn radius_examples() {
        let r = radius_of_convergence(&spectrum(&[-2.0, 0.0, 1.0], 40)).unwrap();
        assert!((r.radius - 4.0).abs() < 0.05 * 4.0);
        assert!((r.fit_radius - 4.0).abs() < 1e-9);
        let one = radius_of_convergence(&Spectrum::synthetic(&[Complex64::new(1.0, 0.0); 32])).unwrap();
        assert_eq!(one.radius, 1.0);
        let p = radius_of_convergence(&spectrum(&[0.25, 0.0, 1.0], 200)).unwrap();
        assert!((p.radius - 1.0).abs() < 0.1, "{p:?}");
        let mut zeros = vec![Complex64::new(0.0, 0.0); 20];
        zeros[0] = Complex64::new(1.0, 0.0);
        assert_eq!(radius_of_convergence(&Spectrum::synthetic(&zeros)).unwrap().radius, f64::INFINITY);
    }

    #[test]
    fn oscillation_examples() {
        let o = oscillation_stats(&spectrum(&[-2.0, 0.0, 1.0], 30)).unwrap();
        assert!((o.sup_ratio - 0.25).abs() < 1e-14);
        assert!((o.liminf_derivative - 4.0).abs() < 1e-12);
        let p = oscillation_stats(&spectrum(&[0.25, 0.0, 1.0], 2000)).unwrap();
        assert!((p.liminf_derivative - 1.0).abs() < 0.01);
        assert!(oscillation_stats(&spectrum(&[0.0, 0.0, 1.0], 10)).is_none());
    }

    #[test]
    fn growth_proxy() {
        let s = Spectrum::synthetic(&[Complex64::new(1.0, 0.0); 101]);
        assert!((sublinear_growth_proxy(&s) - 1.0 / 51.0).abs() < 1e-14);
    }
}
