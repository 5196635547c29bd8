use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operator::ruelle_powers;
use super::series::kernel_value;
use crate::error::{Error, Result};
use crate::measures::build_voronoi_measure;
use crate::orbit::{radius_of_convergence, Spectrum};
use crate::potential::{GammaKernel, POLE_EXCLUSION};
use crate::riemann::{RationalMap, SpherePoint};
use crate::summability::{check_in_disk, NorlundWeights, Sequence};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest truncation order of the identity checks.
pub const MAX_IDENTITY_ORDER: usize = 6;
/// Critical orbits of the test map avoid `0, 1, ∞` and the critical points by
/// this distance for `TEST_MAP_ORBIT_STEPS` steps.
pub const TEST_MAP_CLEARANCE: f64 = 1e-2;
pub const TEST_MAP_ORBIT_STEPS: usize = 12;
/// Seed and parameters of the frozen test map `z(z+b)/(cz+1+b-c)`.
pub const TEST_MAP_SEED: u64 = 20_240_601;
pub const FROZEN_B: Complex64 = Complex64::new(-0.625, -0.625);
pub const FROZEN_C: Complex64 = Complex64::new(-0.375, -1.375);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub z: Complex64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub lambda: Complex64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Both sides expanded to order `N` in `λ`.
    pub samples: Vec<ResidualSample>,
    pub max_rel_residual: f64,
    /// Each series truncated at order `N` and the products taken in full.
    pub unmatched_samples: Vec<ResidualSample>,
    pub unmatched_max_rel_residual: f64,
}

/// `z(z+b)/(cz+1+b-c)`: degree two, fixing `0`, `1` and `∞`.
pub fn test_family_map(b: Complex64, c: Complex64) -> Result<RationalMap> {
    RationalMap::new(vec![ZERO, b, ONE], vec![ONE + b - c, c])
}

/// Reasons the map fails the standing hypotheses of the identity checks for
/// order `n`; empty when it passes.
fn violations(r: &RationalMap, steps: usize, clearance: f64) -> Option<String> {
    let norm = r.normalization();
    if !(norm.fixes_zero && norm.fixes_one && norm.fixes_infinity) {
        return Some("map must fix 0, 1 and infinity".into());
    }
    if !norm.simple_critical || !norm.finite_critical {
        return Some("critical points must be simple and finite".into());
    }
    let crit = r.finite_critical_points();
    for &c in &crit {
        let mut p = r.eval(c);
        for k in 0..=steps {
            let far = !(p.re.is_finite() && p.im.is_finite())
                || SpherePoint::Finite(p).chordal_distance(&SpherePoint::Infinity) <= clearance;
            if far {
                return Some(format!("orbit of critical value R({c}) approaches infinity at step {k}"));
            }
            if p.norm() <= clearance || (p - ONE).norm() <= clearance {
                return Some(format!("orbit of critical value R({c}) meets 0 or 1 at step {k}"));
            }
            if crit.iter().any(|q| (p - q).norm() <= clearance) {
                return Some(format!("orbit of critical value R({c}) meets a critical point at step {k}"));
            }
            p = r.eval(p);
        }
    }
    None
}

/// Seeded search over `z(z+b)/(cz+1+b-c)` for a map with simple, non-fixed
/// critical points whose critical orbits stay clear of `0, 1, ∞` and the
/// critical points, and whose spectra have radius of convergence above one half.
pub fn search_test_map(seed: u64, attempts: usize) -> Result<(Complex64, Complex64, RationalMap)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = |x: f64| (x * 8.0).round() / 8.0;
    for _ in 0..attempts {
        let b = Complex64::new(q(rng.gen_range(-2.0..2.0)), q(rng.gen_range(-2.0..2.0)));
        let c = Complex64::new(q(rng.gen_range(-2.0..2.0)), q(rng.gen_range(-2.0..2.0)));
        let Ok(r) = test_family_map(b, c) else { continue };
        if r.degree() != 2 || violations(&r, TEST_MAP_ORBIT_STEPS, TEST_MAP_CLEARANCE).is_some() {
            continue;
        }
        let ok = r.finite_critical_points().iter().all(|&k| {
            Spectrum::compute(&r, SpherePoint::Finite(k), 64)
                .ok()
                .filter(|s| !s.degenerate && s.len() == 65)
                .and_then(|s| radius_of_convergence(&s).ok())
                .is_some_and(|e| e.radius > 0.5)
        });
        if ok {
            return Ok((b, c, r));
        }
    }
    Err(Error::Precondition(format!("no admissible test map in {attempts} attempts")))
}

/// The frozen degree-two test map (found by `search_test_map(TEST_MAP_SEED, ..)`).
pub fn frozen_test_map() -> RationalMap {
    test_family_map(FROZEN_B, FROZEN_C).expect("frozen test map is valid")
}

struct Setup {
    /// `(c_i, v_i, 1/R''(c_i))`.
    critical: Vec<(Complex64, Complex64, Complex64)>,
    v: Complex64,
    /// `σ_n = 1/(R^n)'(v)`, `n = 0..=N`.
    sigma: Vec<Complex64>,
    /// `R^n(v)`, `n = 0..=N`.
    orbit: Vec<Complex64>,
}

fn setup(r: &RationalMap, c: Complex64, lambda: Complex64, n: usize) -> Result<Setup> {
    if n > MAX_IDENTITY_ORDER {
        return Err(Error::Precondition(format!("order N = {n} exceeds {MAX_IDENTITY_ORDER}")));
    }
    check_in_disk(lambda)?;
    if let Some(why) = violations(r, n, POLE_EXCLUSION) {
        return Err(Error::Precondition(why));
    }
    let crit = r.finite_critical_points();
    let Some(&c) = crit.iter().find(|k| (*k - c).norm() <= 1e-9 * (1.0 + c.norm())) else {
        return Err(Error::Precondition(format!("{c} is not a critical point")));
    };
    let s = Spectrum::compute(r, SpherePoint::Finite(c), 64.max(n))?;
    if s.degenerate {
        return Err(Error::Precondition("spectrum of c is degenerate".into()));
    }
    let radius = radius_of_convergence(&s)?.radius;
    if !(lambda.norm() < radius.min(1.0)) {
        return Err(Error::Precondition(format!(
            "|λ| = {} is not below min(radius of σ(c), 1) = {}",
            lambda.norm(),
            radius.min(1.0)
        )));
    }
    let critical = crit
        .iter()
        .map(|&k| Ok((k, r.eval(k), r.second_derivative(k)?.inv())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Setup { critical, v: r.eval(c), sigma: s.values()[..=n].to_vec(), orbit: s.orbit[..=n].to_vec() })
}

/// Coefficients `σ_n γ_{R^n v}(z)` of `A_v(z, λ)`.
fn a_coefficients(s: &Setup, z: Complex64) -> Result<Vec<Complex64>> {
    s.sigma.iter().zip(&s.orbit).map(|(&sig, &p)| Ok(sig * kernel_value(p, z)?)).collect()
}

fn horner(c: &[Complex64], lambda: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &v| acc * lambda + v)
}

fn rel(lhs: Complex64, rhs: Complex64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Both sides of `B_v = E_v + λ Σ_i E_v(c_i)/R''(c_i) · B_{v_i}` at one point,
/// given the coefficient maps of `E_v` and (for the unmatched form) its values.
struct SideInputs<'a> {
    setup: &'a Setup,
    lambda: Complex64,
    n: usize,
}

impl SideInputs<'_> {
    fn evaluate(
        &self,
        r: &RationalMap,
        z: Complex64,
        coeffs: &dyn Fn(Complex64) -> Result<Vec<Complex64>>,
        value: &dyn Fn(Complex64) -> Result<Complex64>,
    ) -> Result<(ResidualSample, ResidualSample)> {
        let (s, lambda, n) = (self.setup, self.lambda, self.n);
        let kv = GammaKernel::new(s.v)?;
        let b_v = ruelle_powers(r, |y| kv.eval(y), z, n)?;
        let lhs = horner(&b_v, lambda);
        let e_z = coeffs(z)?;
        let mut matched = horner(&e_z, lambda);
        let mut unmatched = value(z)?;
        for &(ci, vi, inv2) in &s.critical {
            let ki = GammaKernel::new(vi)?;
            let beta = ruelle_powers(r, |y| ki.eval(y), z, n)?;
            let alpha = coeffs(ci)?;
            // Cauchy product up to total order N - 1
            let mut prod = vec![ZERO; n];
            for (k, a) in alpha.iter().enumerate().take(n) {
                for (m, b) in beta.iter().enumerate().take(n - k) {
                    prod[k + m] += a * b;
                }
            }
            matched += lambda * inv2 * horner(&prod, lambda);
            unmatched += lambda * inv2 * value(ci)? * horner(&beta, lambda);
        }
        Ok((
            ResidualSample { z, lhs, rhs: matched, rel_residual: rel(lhs, matched) },
            ResidualSample { z, lhs, rhs: unmatched, rel_residual: rel(lhs, unmatched) },
        ))
    }
}

fn assemble(lambda: Complex64, n: usize, rows: Vec<(ResidualSample, ResidualSample)>) -> ResidualReport {
    let (samples, unmatched_samples): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let max = |v: &[ResidualSample]| v.iter().map(|s| s.rel_residual).fold(0.0, f64::max);
    ResidualReport {
        lambda,
        n,
        max_rel_residual: max(&samples),
        unmatched_max_rel_residual: max(&unmatched_samples),
        samples,
        unmatched_samples,
    }
}

/// Residuals of `B_v = A_v + λ Σ_i A_v(c_i)/R''(c_i) · B_{v_i}` with `v = R(c)`.
pub fn identity_check(
    r: &RationalMap,
    c: Complex64,
    lambda: Complex64,
    zs: &[Complex64],
    n: usize,
) -> Result<ResidualReport> {
    let s = setup(r, c, lambda, n)?;
    let inputs = SideInputs { setup: &s, lambda, n };
    let coeffs = |z| a_coefficients(&s, z);
    let value = |z| Ok(horner(&a_coefficients(&s, z)?, lambda));
    let rows = zs.par_iter().map(|&z| inputs.evaluate(r, z, &coeffs, &value)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(lambda, n, rows))
}

/// Residuals of `B_v = E_v + λ Σ_i E_v(c_i)/R''(c_i) · B_{v_i}` where
/// `E_v(z, λ) = ∫γ_a(z) dν_λ(a) / (q(λ)(1-λ))` for the Voronoi measure of `σ(c)`.
///
/// The matched form divides the coefficient series `Σ_k q_{n-k} σ_k γ_{R^k v}(z)`
/// by `q` formally; the unmatched form pairs the truncated Voronoi measure
/// with `γ_·(z)` and divides by the truncated `q(λ)`.
pub fn voronoi_identity_check(
    r: &RationalMap,
    c: Complex64,
    w: &NorlundWeights,
    lambda: Complex64,
    zs: &[Complex64],
    n: usize,
) -> Result<ResidualReport> {
    let s = setup(r, c, lambda, n)?;
    let w = w.extended(n + 1)?;
    let q = &w.weights()[..=n];
    let q_lambda = horner(&q.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(), lambda);
    if q_lambda.norm() < 1e-9 {
        return Err(Error::Precondition(format!("q(λ) = {q_lambda} vanishes at λ = {lambda}")));
    }
    let nu = build_voronoi_measure(r, s.v, &Sequence::explicit(s.sigma.clone()), &w, lambda, n)?;
    let coeffs = |z: Complex64| -> Result<Vec<Complex64>> {
        let a = a_coefficients(&s, z)?;
        let t: Vec<Complex64> = (0..=n)
            .map(|m| (0..=m).fold(ZERO, |acc, k| acc + a[k] * q[m - k]))
            .collect();
        let mut e = vec![ZERO; n + 1];
        for m in 0..=n {
            let mut x = t[m];
            for j in 1..=m {
                x -= e[m - j] * q[j];
            }
            e[m] = x / q[0];
        }
        Ok(e)
    };
    let value = |z: Complex64| -> Result<Complex64> {
        let pairing = nu.pair(|a| kernel_value(a, z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))?;
        Ok(pairing / (q_lambda * (ONE - lambda)))
    };
    let inputs = SideInputs { setup: &s, lambda, n };
    let rows = zs.par_iter().map(|&z| inputs.evaluate(r, z, &coeffs, &value)).collect::<Result<Vec<_>>>()?;
    Ok(assemble(lambda, n, rows))
}

/// `count` seeded points in `[-1.5, 1.5]²` at least `0.05` from `0`, `1`, the
/// critical points and the first `TEST_MAP_ORBIT_STEPS` points of each critical orbit.
pub fn sample_points(r: &RationalMap, seed: u64, count: usize) -> Vec<Complex64> {
    let mut avoid = vec![ZERO, ONE];
    for c in r.finite_critical_points() {
        avoid.push(c);
        let mut p = c;
        for _ in 0..=TEST_MAP_ORBIT_STEPS {
            p = r.eval(p);
            avoid.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if avoid.iter().all(|a| (z - a).norm() >= 0.05) {
            out.push(z);
        }
    }
    out
}
