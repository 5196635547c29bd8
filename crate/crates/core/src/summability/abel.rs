use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tail tolerance of a resolved Abel average.
pub const TAIL_TOL: f64 = 1e-6;
/// Hard cap on the number of terms summed for a generated sequence.
pub const MAX_TERMS: usize = 1 << 25;
/// Cauchy window: number of trailing path values and their pairwise tolerance.
pub const CAUCHY_WINDOW: usize = 5;
pub const CAUCHY_TOL: f64 = 1e-4;
/// Values leaving this disk count as divergence.
pub const DIVERGENCE_RADIUS: f64 = 1e6;

/// A complex sequence, either explicit or generated term by term.
#[derive(Clone)]
pub enum Sequence {
    Explicit(Arc<[Complex64]>),
    Generated(Arc<dyn Fn(usize) -> Complex64 + Send + Sync>),
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Explicit(v) => write!(f, "Sequence::Explicit(len = {})", v.len()),
            Sequence::Generated(_) => write!(f, "Sequence::Generated"),
        }
    }
}

impl Sequence {
    pub fn explicit(values: Vec<Complex64>) -> Self {
        Sequence::Explicit(values.into())
    }

    pub fn generated(f: impl Fn(usize) -> Complex64 + Send + Sync + 'static) -> Self {
        Sequence::Generated(Arc::new(f))
    }

    /// Number of available terms; `None` for an unbounded generator.
    pub fn available(&self) -> Option<usize> {
        match self {
            Sequence::Explicit(v) => Some(v.len()),
            Sequence::Generated(_) => None,
        }
    }

    pub fn get(&self, n: usize) -> Complex64 {
        match self {
            Sequence::Explicit(v) => v[n],
            Sequence::Generated(f) => f(n),
        }
    }

    pub fn take(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|k| self.get(k)).collect()
    }
}

impl From<Vec<Complex64>> for Sequence {
    fn from(v: Vec<Complex64>) -> Self {
        Sequence::explicit(v)
    }
}

pub fn check_in_disk(lambda: Complex64) -> Result<()> {
    let r = lambda.norm();
    if !(r < 1.0) {
        return Err(Error::LambdaOutsideDisk(r));
    }
    Ok(())
}

/// `1 - |λ|` without cancellation near 1: `(u(2-u) - y²)/(1 + |λ|)` with `u = 1 - Re λ`.
pub fn one_minus_modulus(lambda: Complex64) -> f64 {
    let u = 1.0 - lambda.re;
    (u * (2.0 - u) - lambda.im * lambda.im) / (1.0 + lambda.norm())
}

/// `|1 - λ| / (1 - |λ|)`, the norm of `a -> P_λ(a)` on bounded sequences.
pub fn functional_norm(lambda: Complex64) -> Result<f64> {
    check_in_disk(lambda)?;
    Ok((ONE - lambda).norm() / one_minus_modulus(lambda))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelValue {
    pub value: Complex64,
    /// `|1-λ| · sup_{N/2 < n <= N} |a_n| · |λ|^{N+1} / (1 - |λ|)`.
    pub tail_bound: f64,
    /// Terms summed (`N + 1`).
    pub terms: usize,
}

/// `Σ_{n<len} a_n λ^n` by Horner's rule.
pub fn power_series(a: &[Complex64], lambda: Complex64) -> Complex64 {
    a.iter().rev().fold(ZERO, |acc, &c| acc * lambda + c)
}

/// Tail estimate `sup_{N/2<n<=N} |a_n| · |λ|^{N+1} / (1-|λ|)` for a series truncated at `N = len-1`.
pub fn series_tail_bound(a: &[Complex64], lambda: Complex64) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let sup = a[(n - 1) / 2..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    if sup == 0.0 {
        return 0.0;
    }
    let r = lambda.norm();
    sup * (n as f64 * r.ln()).exp() / (1.0 - r)
}

/// The Abel average `P_λ = (1-λ) Σ_{n<len} a_n λ^n` with its tail bound.
pub fn abel_average(a: &[Complex64], lambda: Complex64) -> Result<AbelValue> {
    check_in_disk(lambda)?;
    if a.is_empty() {
        return Err(Error::LengthMismatch { needed: 1, available: 0 });
    }
    let factor = ONE - lambda;
    Ok(AbelValue {
        value: factor * power_series(a, lambda),
        tail_bound: factor.norm() * series_tail_bound(a, lambda),
        terms: a.len(),
    })
}

/// Terms `N` with `sup |1-λ| |λ|^N / (1-|λ|) ≤ eps`, clamped to `[16, MAX_TERMS]`.
pub fn terms_for(lambda: Complex64, sup: f64, eps: f64) -> usize {
    let r = lambda.norm();
    if r == 0.0 {
        return 2;
    }
    let target = eps * (1.0 - r) / ((ONE - lambda).norm() * sup.max(1e-300));
    let n = (target.ln() / r.ln()).ceil();
    if !n.is_finite() || n < 16.0 {
        16
    } else if n > MAX_TERMS as f64 {
        MAX_TERMS
    } else {
        n as usize + 1
    }
}

/// Abel average of a sequence with the truncation chosen adaptively so the
/// tail bound is at most `TAIL_TOL · max(1, |value|)`. `resolved` is false when
/// the budget (available terms or `MAX_TERMS`) does not allow it.
pub fn abel_average_adaptive(a: &Sequence, lambda: Complex64) -> Result<ScanPoint> {
    check_in_disk(lambda)?;
    let point = |v: AbelValue| {
        let resolved = v.tail_bound <= TAIL_TOL * v.value.norm().max(1.0);
        ScanPoint { lambda, value: v.value, tail_bound: v.tail_bound, terms: v.terms, resolved }
    };
    match a {
        Sequence::Explicit(v) => Ok(point(abel_average(v, lambda)?)),
        Sequence::Generated(f) => {
            let sup = (0..64).map(|k| f(k).norm()).fold(0.0, f64::max);
            let mut n = terms_for(lambda, sup, TAIL_TOL);
            loop {
                let p = point(generated_average(f.as_ref(), lambda, n));
                if p.resolved || n >= MAX_TERMS {
                    return Ok(p);
                }
                n = (2 * n).min(MAX_TERMS);
            }
        }
    }
}

/// `abel_average` over the first `n` generated terms without materializing them.
fn generated_average(f: &(dyn Fn(usize) -> Complex64 + Send + Sync), lambda: Complex64, n: usize) -> AbelValue {
    let mut acc = ZERO;
    let mut sup: f64 = 0.0;
    for k in (0..n).rev() {
        let a = f(k);
        if k >= (n - 1) / 2 {
            sup = sup.max(a.norm());
        }
        acc = acc * lambda + a;
    }
    let factor = ONE - lambda;
    let r = lambda.norm();
    let tail = if sup == 0.0 { 0.0 } else { sup * (n as f64 * r.ln()).exp() / (1.0 - r) };
    AbelValue { value: factor * acc, tail_bound: factor.norm() * tail, terms: n }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PathKind {
    Radial,
    Stolz { alpha: f64 },
}

/// A sequence of `λ_k → 1` inside the unit disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaPath {
    #[serde(flatten)]
    pub kind: PathKind,
    pub samples: Vec<Complex64>,
}

impl LambdaPath {
    /// `λ_k = 1 - 2^-k`, `k = 1..=count`.
    pub fn radial(count: usize) -> Self {
        let samples = (1..=count).map(|k| Complex64::new(1.0 - 2f64.powi(-(k as i32)), 0.0)).collect();
        LambdaPath { kind: PathKind::Radial, samples }
    }

    /// Points with `|1-λ| ≈ 2^-k` on which `|1-λ|/(1-|λ|) = α` holds for the
    /// rounded sample itself.
    ///
    /// With `λ = 1 - u - iy`, `s = |1-λ|` solves `(1 - 1/α²)s² + (2/α)s - 2u = 0`.
    /// The real part is fixed first from the tangent geometry
    /// `cos θ = 1/α + (ρ/2)(1 - 1/α²)`, so `u = 1 - Re λ` is exact; `y` is then
    /// solved from the quadratic.
    pub fn stolz(alpha: f64, count: usize) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!("Stolz ratio must be >= 1, got {alpha}")));
        }
        let k2 = 1.0 - 1.0 / (alpha * alpha);
        let samples = (1..=count)
            .map(|k| {
                let rho = 2f64.powi(-(k as i32));
                let cos = (1.0 / alpha + 0.5 * rho * k2).min(1.0);
                let x = 1.0 - rho * cos;
                let u = 1.0 - x;
                let s = 4.0 * u / (2.0 / alpha + (4.0 / (alpha * alpha) + 8.0 * u * k2).sqrt());
                let y = ((s - u).max(0.0) * (s + u)).sqrt();
                Complex64::new(x, -y)
            })
            .collect();
        Ok(LambdaPath { kind: PathKind::Stolz { alpha }, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: Complex64,
    pub value: Complex64,
    pub tail_bound: f64,
    pub terms: usize,
    pub resolved: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConvergesTo,
    Diverges,
    Oscillates,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Abel,
    Cesaro,
    Norlund,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathKind>,
    pub values: Vec<ScanPoint>,
    pub verdict: Verdict,
    /// Present exactly when the verdict is converges-to.
    pub limit: Option<Complex64>,
    /// Sample of the cluster set (the trailing values) for tangential paths.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub cluster_sample: Vec<Complex64>,
}

/// Cauchy-window verdict on a sequence of averaged values.
pub fn cauchy_verdict(values: &[Complex64], resolved: &[bool]) -> (Verdict, Option<Complex64>) {
    if values.iter().any(|v| !(v.norm() <= DIVERGENCE_RADIUS)) {
        return (Verdict::Diverges, None);
    }
    if values.len() < CAUCHY_WINDOW {
        return (Verdict::Undecided, None);
    }
    let k = values.len() - CAUCHY_WINDOW;
    if resolved[k..].iter().any(|r| !r) {
        return (Verdict::Undecided, None);
    }
    let tail = &values[k..];
    let cauchy = tail
        .iter()
        .enumerate()
        .all(|(i, a)| tail[i + 1..].iter().all(|b| (a - b).norm() < CAUCHY_TOL));
    if cauchy {
        let mean = tail.iter().sum::<Complex64>() / CAUCHY_WINDOW as f64;
        (Verdict::ConvergesTo, Some(mean))
    } else {
        (Verdict::Oscillates, None)
    }
}

/// Abel averages along a path, evaluated in parallel and reported in path order.
pub fn abel_scan(a: &Sequence, path: &LambdaPath) -> Result<SummabilityReport> {
    let values: Vec<ScanPoint> = path
        .samples
        .par_iter()
        .map(|&l| abel_average_adaptive(a, l))
        .collect::<Result<_>>()?;
    let vals: Vec<Complex64> = values.iter().map(|p| p.value).collect();
    let res: Vec<bool> = values.iter().map(|p| p.resolved).collect();
    let (verdict, limit) = cauchy_verdict(&vals, &res);
    let cluster_sample = match path.kind {
        PathKind::Stolz { .. } => vals[vals.len().saturating_sub(2 * CAUCHY_WINDOW)..].to_vec(),
        PathKind::Radial => Vec::new(),
    };
    Ok(SummabilityReport {
        method: Method::Abel,
        path: Some(path.kind),
        values,
        verdict,
        limit,
        cluster_sample,
    })
}
