use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::atomic::AtomicMeasure;
use super::build::{build_abel_measure, build_voronoi_measure};
use crate::error::{Error, Result};
use crate::riemann::RationalMap;
use crate::summability::{functional_norm, terms_for, LambdaPath, NorlundWeights, Sequence, CAUCHY_WINDOW};

/// Threshold on pairings (raw for null limits, normalized for stabilization).
pub const PAIRING_THRESHOLD: f64 = 1e-3;
/// Relative bound on the truncated TV tail.
pub const TV_TAIL_TOL: f64 = 1e-6;
/// Cap on the truncation of a single scan point.
pub const MAX_SCAN_TERMS: usize = 1 << 22;
/// Number of seeded kernel test functions in the standard family.
pub const KERNEL_TESTS: usize = 8;
/// Largest monomial degree `j + k` in the standard family.
pub const MONOMIAL_DEGREE: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestFunction {
    /// `a -> a^j conj(a)^k`.
    Monomial { j: u32, k: u32 },
    /// `a -> γ_a(z) = a(a-1) / (z(z-1)(z-a))` for a fixed point `z`.
    Kernel { z: Complex64 },
}

impl TestFunction {
    pub fn eval(&self, a: Complex64) -> Complex64 {
        match *self {
            TestFunction::Monomial { j, k } => a.powu(j) * a.conj().powu(k),
            TestFunction::Kernel { z } => {
                let one = Complex64::new(1.0, 0.0);
                a * (a - one) / (z * (z - one) * (z - a))
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            TestFunction::Monomial { j, k } => format!("m{j}_{k}"),
            TestFunction::Kernel { z } => format!("g({},{})", z.re, z.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub tests: Vec<TestFunction>,
}

impl TestFamily {
    /// Monomials with `j + k <= 6` plus `KERNEL_TESTS` kernels at seeded points
    /// in the annulus `1.5 ρ <= |z| <= 3 ρ`, `ρ = 1 + max |avoid|`, which keeps
    /// them off the support and off `{0, 1}`.
    pub fn standard(seed: u64, avoid: &[Complex64]) -> Self {
        let mut tests = Vec::new();
        for d in 0..=MONOMIAL_DEGREE {
            for j in 0..=d {
                tests.push(TestFunction::Monomial { j, k: d - j });
            }
        }
        let rho = 1.0 + avoid.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..KERNEL_TESTS {
            let r = rng.gen_range(1.5 * rho..3.0 * rho);
            let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            tests.push(TestFunction::Kernel { z: Complex64::from_polar(r, t) });
        }
        TestFamily { tests }
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }
}

/// `Σ w_i f(z_i)`.
pub fn measure_pairing(nu: &AtomicMeasure, f: &TestFunction) -> Result<Complex64> {
    nu.pair(|a| f.eval(a))
}

/// How the measures along the path are built.
#[derive(Clone, Debug)]
pub enum Construction {
    Abel,
    Voronoi(NorlundWeights),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanVerdict {
    NullLimit,
    NonnullLimit,
    Undecided,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: Complex64,
    pub terms: usize,
    pub atoms: usize,
    pub tv: f64,
    pub tail_bound: f64,
    /// Tail bound within `TV_TAIL_TOL · max(TV, 1)`.
    pub resolved: bool,
    pub pairings: Vec<Complex64>,
    /// `functional_norm(λ) · sup |a_n|` (Abel construction only).
    pub tv_bound: Option<f64>,
    /// `max_i |f(z_i)|` over atoms and tests, the scale of the pairing thresholds.
    pub pairing_scale: f64,
}

impl ScanRow {
    pub fn tv_bound_holds(&self) -> bool {
        self.tv_bound.is_none_or(|b| self.tv <= b * (1.0 + 1e-12))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakStarScan {
    pub path: LambdaPath,
    pub tests: TestFamily,
    pub rows: Vec<ScanRow>,
    pub verdict: ScanVerdict,
    /// `r_k = 1 / TV(ν_{λ_k})` (zero for zero measures).
    pub normalizers: Vec<f64>,
    /// Mean normalized pairings over the last window, when the verdict is nonnull.
    pub limit_pairings: Option<Vec<Complex64>>,
}

fn build(
    r: &RationalMap,
    z: Complex64,
    a: &Sequence,
    how: &Construction,
    lambda: Complex64,
    n_max: usize,
) -> Result<AtomicMeasure> {
    match how {
        Construction::Abel => build_abel_measure(r, z, a, lambda, n_max),
        Construction::Voronoi(w) => build_voronoi_measure(r, z, a, w, lambda, n_max),
    }
}

/// Builds `ν_λ` with the truncation doubled until the tail bound is resolved.
fn resolved_measure(
    r: &RationalMap,
    z: Complex64,
    a: &Sequence,
    how: &Construction,
    lambda: Complex64,
) -> Result<(AtomicMeasure, usize, bool)> {
    let cap = a.available().map_or(MAX_SCAN_TERMS, |l| l.min(MAX_SCAN_TERMS));
    if cap == 0 {
        return Err(Error::LengthMismatch { needed: 1, available: 0 });
    }
    let sup = (0..cap.min(64)).map(|k| a.get(k).norm()).fold(0.0, f64::max);
    let mut n = terms_for(lambda, sup, TV_TAIL_TOL).min(cap);
    loop {
        let m = build(r, z, a, how, lambda, n - 1)?;
        let resolved = m.tail_bound() <= TV_TAIL_TOL * m.total_variation().max(1.0);
        if resolved || n >= cap {
            return Ok((m, n, resolved));
        }
        n = (2 * n).min(cap);
    }
}

fn scan_row(
    r: &RationalMap,
    z: Complex64,
    a: &Sequence,
    how: &Construction,
    lambda: Complex64,
    tests: &TestFamily,
) -> Result<ScanRow> {
    let (m, terms, resolved) = resolved_measure(r, z, a, how, lambda)?;
    let pairings = tests.tests.iter().map(|f| measure_pairing(&m, f)).collect::<Result<Vec<_>>>()?;
    let pairing_scale = m
        .atoms()
        .iter()
        .flat_map(|at| tests.tests.iter().map(move |f| f.eval(at.z).norm()))
        .fold(1.0, f64::max);
    let tv_bound = match how {
        Construction::Abel => {
            let sup = (0..terms).map(|k| a.get(k).norm()).fold(0.0, f64::max);
            Some(functional_norm(lambda)? * sup)
        }
        Construction::Voronoi(_) => None,
    };
    Ok(ScanRow {
        lambda,
        terms,
        atoms: m.len(),
        tv: m.total_variation(),
        tail_bound: m.tail_bound(),
        resolved,
        pairings,
        tv_bound,
        pairing_scale,
    })
}

/// Pairings of `ν_λ` with a test family along a path, evaluated in parallel and
/// reported in path order.
///
/// Over the last `CAUCHY_WINDOW` points: null limit when every raw pairing is at
/// most `PAIRING_THRESHOLD · scale`; nonnull limit when at every point some raw
/// pairing exceeds that level and the TV-normalized pairings agree to
/// `PAIRING_THRESHOLD`; undecided otherwise or when any of those points is
/// unresolved.
pub fn weak_star_scan(
    r: &RationalMap,
    z: Complex64,
    a: &Sequence,
    how: &Construction,
    path: &LambdaPath,
    tests: &TestFamily,
) -> Result<WeakStarScan> {
    let rows: Vec<ScanRow> = path
        .samples
        .par_iter()
        .map(|&l| scan_row(r, z, a, how, l, tests))
        .collect::<Result<_>>()?;
    let normalizers: Vec<f64> = rows.iter().map(|row| if row.tv > 0.0 { 1.0 / row.tv } else { 0.0 }).collect();
    let mut verdict = ScanVerdict::Undecided;
    let mut limit_pairings = None;
    if rows.len() >= CAUCHY_WINDOW {
        let tail = &rows[rows.len() - CAUCHY_WINDOW..];
        let small = |row: &ScanRow| row.pairings.iter().all(|p| p.norm() <= PAIRING_THRESHOLD * row.pairing_scale);
        let bounded_tv = tail.iter().all(|row| row.tv.is_finite() && row.tv_bound_holds());
        if tail.iter().all(|row| row.resolved) && bounded_tv {
            if tail.iter().all(small) {
                verdict = ScanVerdict::NullLimit;
            } else if tail.iter().all(|row| !small(row)) {
                if let Some(p) = stable_normalized(tail) {
                    verdict = ScanVerdict::NonnullLimit;
                    limit_pairings = Some(p);
                }
            }
        }
    }
    Ok(WeakStarScan { path: path.clone(), tests: tests.clone(), rows, verdict, normalizers, limit_pairings })
}

fn normalized(row: &ScanRow) -> Option<Vec<Complex64>> {
    (row.tv > 0.0).then(|| row.pairings.iter().map(|p| p / row.tv).collect())
}

/// Mean of the normalized pairings when they agree pairwise to `PAIRING_THRESHOLD`.
fn stable_normalized(tail: &[ScanRow]) -> Option<Vec<Complex64>> {
    let norm: Vec<Vec<Complex64>> = tail.iter().map(normalized).collect::<Option<_>>()?;
    let (m, k) = (norm[0].len(), norm.len());
    let mut mean = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        for a in 0..k {
            for b in a + 1..k {
                if (norm[a][i] - norm[b][i]).norm() > PAIRING_THRESHOLD * tail[a].pairing_scale.max(tail[b].pairing_scale) {
                    return None;
                }
            }
            mean[i] += norm[a][i];
        }
        mean[i] /= k as f64;
    }
    Some(mean)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectiveLimit {
    /// Normalized pairings `r_k ⟨f, ν_{λ_k}⟩` per path point.
    pub normalized: Vec<Vec<Complex64>>,
    /// Mean over the last `CAUCHY_WINDOW` points.
    pub limit: Vec<Complex64>,
    /// Largest pairwise difference over the last window, per test.
    pub spread: f64,
    pub stable: bool,
}

/// Scales the scan pairings by `r_k = 1 / TV(ν_{λ_k})` and reports whether they stabilize.
pub fn projective_normalize(scan: &WeakStarScan) -> Result<ProjectiveLimit> {
    let k = scan.rows.len();
    if k == 0 {
        return Err(Error::ProjectiveUndefined);
    }
    let window = CAUCHY_WINDOW.min(k);
    if scan.rows[k - window..].iter().any(|row| !(row.tv > 0.0)) {
        return Err(Error::ProjectiveUndefined);
    }
    let normalized: Vec<Vec<Complex64>> = scan
        .rows
        .iter()
        .map(|row| row.pairings.iter().map(|p| if row.tv > 0.0 { p / row.tv } else { *p }).collect())
        .collect();
    let tail = &normalized[k - window..];
    let m = scan.tests.len();
    let mut spread: f64 = 0.0;
    let mut stable = true;
    let mut limit = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        for a in 0..window {
            for b in a + 1..window {
                let d = (tail[a][i] - tail[b][i]).norm();
                spread = spread.max(d);
                let scale = scan.rows[k - window + a].pairing_scale.max(scan.rows[k - window + b].pairing_scale);
                stable &= d <= PAIRING_THRESHOLD * scale;
            }
            limit[i] += tail[a][i];
        }
        limit[i] /= window as f64;
    }
    Ok(ProjectiveLimit { normalized, limit, spread, stable })
}

/// CSV with columns `lambda_re, lambda_im, tv`, then `<test>_re, <test>_im` per test.
pub fn write_scan_csv<W: Write>(scan: &WeakStarScan, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["lambda_re".to_string(), "lambda_im".into(), "tv".into()];
    for t in &scan.tests.tests {
        header.push(format!("{}_re", t.name()));
        header.push(format!("{}_im", t.name()));
    }
    out.write_record(&header)?;
    for row in &scan.rows {
        let mut rec = vec![row.lambda.re, row.lambda.im, row.tv];
        for p in &row.pairings {
            rec.push(p.re);
            rec.push(p.im);
        }
        out.write_record(rec.iter().map(|x| format!("{x:e}")))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Spectrum;
    use crate::riemann::SpherePoint;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn chebyshev() -> RationalMap {
        RationalMap::polynomial_real(&[-2.0, 0.0, 1.0]).unwrap()
    }

    fn family(avoid: &[Complex64]) -> TestFamily {
        TestFamily::standard(7, avoid)
    }

    #[test]
    fn standard_family_shape() {
        let f = family(&[c(-2.0), c(2.0)]);
        assert_eq!(f.len(), 28 + KERNEL_TESTS);
        assert_eq!(f, family(&[c(-2.0), c(2.0)]));
        for t in &f.tests {
            if let TestFunction::Kernel { z } = t {
                assert!(z.norm() >= 4.5);
            }
        }
    }

    #[test]
    fn pairing_linearity() {
        let m = AtomicMeasure::from_atoms([(c(0.5), c(2.0)), (Complex64::new(0.1, 0.7), Complex64::new(-1.0, 0.3))]).unwrap();
        let f = TestFunction::Monomial { j: 2, k: 1 };
        let g = TestFunction::Kernel { z: Complex64::new(3.0, 1.0) };
        let s = Complex64::new(0.4, -1.1);
        let lhs = m.pair(|a| f.eval(a) + s * g.eval(a)).unwrap();
        let rhs = measure_pairing(&m, &f).unwrap() + s * measure_pairing(&m, &g).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        let m2 = m.scaled(s);
        assert!((measure_pairing(&m2, &f).unwrap() - s * measure_pairing(&m, &f).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn chebyshev_spectrum_null_limit() {
        let s = Spectrum::compute(&chebyshev(), SpherePoint::real(0.0), 64).unwrap();
        let seq = Sequence::explicit(s.values());
        let scan = weak_star_scan(
            &chebyshev(),
            c(-2.0),
            &seq,
            &Construction::Abel,
            &LambdaPath::radial(14),
            &family(&[c(-2.0), c(2.0)]),
        )
        .unwrap();
        assert_eq!(scan.verdict, ScanVerdict::NullLimit);
        assert!(scan.rows.iter().all(ScanRow::tv_bound_holds));
        let p = projective_normalize(&scan).unwrap();
        assert!(p.stable);
        // normalized limit 0.75 δ_{-2} - 0.25 δ_2
        let expect = |f: &TestFunction| 0.75 * f.eval(c(-2.0)) - 0.25 * f.eval(c(2.0));
        for (f, v) in scan.tests.tests.iter().zip(&p.limit) {
            assert!((v - expect(f)).norm() < 1e-3 * expect(f).norm().max(1.0), "{f:?}");
        }
    }

    #[test]
    fn constant_at_fixed_point_nonnull() {
        let one = Sequence::generated(|_| c(1.0));
        let tests = family(&[c(2.0)]);
        let scan =
            weak_star_scan(&chebyshev(), c(2.0), &one, &Construction::Abel, &LambdaPath::radial(14), &tests).unwrap();
        assert_eq!(scan.verdict, ScanVerdict::NonnullLimit);
        for (f, v) in tests.tests.iter().zip(scan.limit_pairings.unwrap()) {
            assert!((v - f.eval(c(2.0))).norm() <= 1e-8 * f.eval(c(2.0)).norm().max(1.0));
        }
    }

    #[test]
    fn alternating_at_fixed_point_null() {
        let alt = Sequence::generated(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }));
        let scan = weak_star_scan(
            &chebyshev(),
            c(2.0),
            &alt,
            &Construction::Abel,
            &LambdaPath::radial(16),
            &family(&[c(2.0)]),
        )
        .unwrap();
        assert_eq!(scan.verdict, ScanVerdict::NullLimit);
    }

    #[test]
    fn zero_sequence_has_no_projective_class() {
        let zero = Sequence::generated(|_| c(0.0));
        let scan = weak_star_scan(
            &chebyshev(),
            c(0.3),
            &zero,
            &Construction::Abel,
            &LambdaPath::radial(8),
            &family(&[c(2.0)]),
        )
        .unwrap();
        assert!(matches!(projective_normalize(&scan), Err(Error::ProjectiveUndefined)));
    }

    #[test]
    fn scan_csv_header() {
        let one = Sequence::generated(|_| c(1.0));
        let tests = TestFamily { tests: vec![TestFunction::Monomial { j: 1, k: 0 }] };
        let scan =
            weak_star_scan(&chebyshev(), c(2.0), &one, &Construction::Abel, &LambdaPath::radial(3), &tests).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&scan, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("lambda_re,lambda_im,tv,m1_0_re,m1_0_im\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
