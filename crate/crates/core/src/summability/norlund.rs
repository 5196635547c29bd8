use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::abel::{check_in_disk, series_tail_bound};
use crate::error::{Error, Result};

/// Largest accepted trailing `q_n / Q_n`.
pub const RATIO_THRESHOLD: f64 = 0.2;
/// Family weights are generated (and validated) over at least this many terms.
pub const MIN_FAMILY_LEN: usize = 64;
/// `limsup |t_n|^{1/n}` at most this counts as regular.
pub const REGULARITY_SLACK: f64 = 0.05;

/// Named weight families that can be extended to any length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum WeightFamily {
    /// `q_n = 1` (Cesàro).
    Constant,
    /// `q_n = n + 1`.
    Arithmetic,
    /// `q_n = r^n`.
    Geometric { r: f64 },
    /// `q = (1, 0, 0, ...)`.
    Identity,
}

impl WeightFamily {
    pub fn weight(&self, n: usize) -> f64 {
        match *self {
            WeightFamily::Constant => 1.0,
            WeightFamily::Arithmetic => (n + 1) as f64,
            WeightFamily::Geometric { r } => r.powi(n as i32),
            WeightFamily::Identity => {
                if n == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Validated Nörlund weights `q_0..q_M` with partial sums `Q_n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NorlundWeights {
    q: Vec<f64>,
    partial: Vec<f64>,
    family: Option<WeightFamily>,
}

/// Validates an explicit weight list.
pub fn norlund_validate(q: &[f64]) -> Result<NorlundWeights> {
    NorlundWeights::build(q.to_vec(), None)
}

impl NorlundWeights {
    /// At least `len` weights (and never fewer than `MIN_FAMILY_LEN`) from a
    /// family; the family also extends them on demand.
    pub fn from_family(family: WeightFamily, len: usize) -> Result<Self> {
        let len = len.max(MIN_FAMILY_LEN);
        Self::build((0..len).map(|n| family.weight(n)).collect(), Some(family))
    }

    pub fn cesaro(len: usize) -> Self {
        Self::from_family(WeightFamily::Constant, len).expect("Cesàro weights are valid")
    }

    pub fn identity(len: usize) -> Self {
        Self::from_family(WeightFamily::Identity, len).expect("identity weights are valid")
    }

    fn build(q: Vec<f64>, family: Option<WeightFamily>) -> Result<Self> {
        let Some(&q0) = q.first() else {
            return Err(Error::InvalidWeights("empty weight sequence".into()));
        };
        if !(q0 > 0.0) {
            return Err(Error::InvalidWeights(format!("q_0 must be positive, got {q0}")));
        }
        if let Some((n, v)) = q.iter().enumerate().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidWeights(format!("q_{n} = {v} is not a finite non-negative number")));
        }
        let mut partial = Vec::with_capacity(q.len());
        let mut s = 0.0;
        for &v in &q {
            s += v;
            partial.push(s);
        }
        let m = q.len() - 1;
        let start = m.div_ceil(2).max(1);
        for n in start..=m {
            let ratio = q[n] / partial[n];
            if ratio > RATIO_THRESHOLD {
                return Err(Error::InvalidWeights(format!(
                    "trailing ratio q_{n}/Q_{n} = {ratio:.4} exceeds {RATIO_THRESHOLD}"
                )));
            }
        }
        Ok(NorlundWeights { q, partial, family })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.q
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial
    }

    pub fn family(&self) -> Option<WeightFamily> {
        self.family
    }

    /// Weights of at least `len` terms, extending through the family when needed.
    pub fn extended(&self, len: usize) -> Result<NorlundWeights> {
        if len <= self.len() {
            return Ok(self.clone());
        }
        match self.family {
            Some(f) => Self::from_family(f, len),
            None => Err(Error::LengthMismatch { needed: len, available: self.len() }),
        }
    }

    /// `q(λ) = Σ q_n λ^n` over the stored weights.
    pub fn generating_function(&self, lambda: Complex64) -> Complex64 {
        self.q.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }
}

/// `t_n = (q_n x_0 + ... + q_0 x_n) / Q_n`.
pub fn norlund_averages(x: &[Complex64], w: &NorlundWeights) -> Result<Vec<Complex64>> {
    let w = w.extended(x.len())?;
    let (q, big_q) = (w.weights(), w.partial_sums());
    Ok((0..x.len())
        .map(|n| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                s += x[k] * q[n - k];
            }
            s / big_q[n]
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RegularityVerdict {
    /// `max_{n in trailing half} |t_n|^{1/n}`.
    pub estimate: f64,
    pub regular: bool,
}

/// Estimates `limsup |t_n|^{1/n}` and compares it with `1 + REGULARITY_SLACK`.
pub fn norlund_regularity_check(t: &[Complex64]) -> Result<RegularityVerdict> {
    if t.len() < 16 {
        return Err(Error::LengthMismatch { needed: 16, available: t.len() });
    }
    let last = t.len() - 1;
    let estimate = ((last / 2).max(1)..=last)
        .map(|n| (t[n].norm().ln() / n as f64).exp())
        .fold(0.0, f64::max);
    Ok(RegularityVerdict { estimate, regular: estimate <= 1.0 + REGULARITY_SLACK })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConvolutionValue {
    /// `Σ_n (Σ_i q_i x_{n-i}) λ^n`.
    pub value: Complex64,
    /// The same series evaluated as `Σ t_n Q_n λ^n`.
    pub via_averages: Complex64,
    pub discrepancy: f64,
    pub tail_bound: f64,
}

/// The convolution power series `[N(x)](λ)`, evaluated two ways.
pub fn convolution_series(x: &[Complex64], w: &NorlundWeights, lambda: Complex64) -> Result<ConvolutionValue> {
    check_in_disk(lambda)?;
    let w = w.extended(x.len())?;
    let q = w.weights();
    let conv: Vec<Complex64> = (0..x.len())
        .map(|n| (0..=n).fold(Complex64::new(0.0, 0.0), |s, i| s + x[n - i] * q[i]))
        .collect();
    let t = norlund_averages(x, &w)?;
    let tq: Vec<Complex64> = t.iter().zip(w.partial_sums()).map(|(&t, &big_q)| t * big_q).collect();
    let horner = |c: &[Complex64]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * lambda + v);
    let value = horner(&conv);
    let via_averages = horner(&tq);
    let discrepancy = (value - via_averages).norm();
    let r = lambda.norm();
    let scale = conv.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    if discrepancy > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ConvolutionMismatch { discrepancy, scale });
    }
    Ok(ConvolutionValue { value, via_averages, discrepancy, tail_bound: series_tail_bound(&conv, lambda) })
}
