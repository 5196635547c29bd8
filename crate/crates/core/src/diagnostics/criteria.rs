use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::orbit::{fit_slope, radius_of_convergence, sublinear_growth_proxy, Spectrum};
use crate::summability::{
    abel_scan, cauchy_verdict, norlund_averages, norlund_regularity_check, LambdaPath, NorlundWeights, Sequence,
    Verdict, CAUCHY_WINDOW, REGULARITY_SLACK,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionId {
    PropStabilityBound,
    CorBullet1,
    CorBullet2,
    Barycentric,
    AbelConvergence,
    BoundedThm1,
    BoundedThm2,
    NorlundRegular,
    Separation,
    PcArea,
}

impl CriterionId {
    /// Report order.
    pub const ALL: [CriterionId; 10] = [
        CriterionId::PropStabilityBound,
        CriterionId::CorBullet1,
        CriterionId::CorBullet2,
        CriterionId::Barycentric,
        CriterionId::AbelConvergence,
        CriterionId::BoundedThm1,
        CriterionId::BoundedThm2,
        CriterionId::NorlundRegular,
        CriterionId::Separation,
        CriterionId::PcArea,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    InstabilityEvidence,
    ConsistentWithStability,
    Inapplicable,
    Undecided,
}

/// Outcome of a criterion that checks a hypothesis rather than a conclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    Holds,
    Fails,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: CriterionId,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hypothesis: Option<Hypothesis>,
    /// Finite numeric evidence only; non-finite values are omitted.
    pub evidence: BTreeMap<String, f64>,
    pub thresholds: BTreeMap<String, f64>,
    pub caveat: String,
}

impl CriterionResult {
    pub fn new(id: CriterionId, status: Status, caveat: impl Into<String>) -> Self {
        CriterionResult {
            id,
            status,
            hypothesis: None,
            evidence: BTreeMap::new(),
            thresholds: BTreeMap::new(),
            caveat: caveat.into(),
        }
    }

    pub fn evidence(mut self, key: &str, value: f64) -> Self {
        if value.is_finite() {
            self.evidence.insert(key.into(), value);
        }
        self
    }

    pub fn threshold(mut self, key: &str, value: f64) -> Self {
        self.thresholds.insert(key.into(), value);
        self
    }

    pub fn hypothesis(mut self, h: Hypothesis) -> Self {
        self.hypothesis = Some(h);
        self
    }
}

/// Every numeric threshold used by the criteria.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Shortest spectrum the stability bound is evaluated on.
    pub min_horizon: usize,
    /// Windows the trailing half is split into for the `ρ_n` minima.
    pub stability_windows: usize,
    /// Least relative growth of consecutive window minima of `ρ_n`.
    pub stability_growth: f64,
    /// `ρ_n` counts as bounded when the trailing maximum is at most this times the median.
    pub stability_bound_factor: f64,
    /// Fewest trailing elements a subsequence needs.
    pub subsequence_min_len: usize,
    /// Largest modulus of the arithmetic progressions in the subsequence family.
    pub subsequence_max_modulus: usize,
    /// Trailing `|σ_{n_i}|` at most this counts as decay to zero.
    pub zero_tol: f64,
    /// `δ` in `limsup |S_{n_i}| > δ`.
    pub limsup_delta: f64,
    /// Relative half-width of the band around `α`.
    pub alpha_band: f64,
    /// Smallest `|α|` accepted as non-zero.
    pub alpha_min: f64,
    /// Growth of `|S_{n_i}|` across the trailing elements counted as unbounded.
    pub sum_growth: f64,
    /// Largest `max_{n > N/2} |σ_n| / n` accepted as `o(n)`.
    pub sublinear_tol: f64,
    /// Radius around 0 for the barycenter and Abel limits.
    pub limit_tol: f64,
    /// Log-log slope of `|b_n|` at most this counts as decay to zero.
    pub barycenter_decay_slope: f64,
    /// Slack below 1 accepted for the radius of convergence.
    pub radius_slack: f64,
    /// `σ ∈ ℓ∞` proxy: trailing sup at most this times the leading sup.
    pub bounded_factor: f64,
    /// Cauchy tolerance (relative to `max(1, |σ|)`) for convergence of `σ`.
    pub convergence_tol: f64,
    /// Box-count area slope per level at most this counts as measure zero.
    pub area_zero_slope: f64,
    /// Box-count area slope per level at least this counts as positive area.
    pub area_positive_slope: f64,
    /// Return distance for attracting-cycle detection.
    pub attract_tol: f64,
    pub max_period: usize,
    /// Consecutive returns required.
    pub returns: usize,
    /// Multipliers of modulus at most `1 - attract_margin` count as attracting.
    pub attract_margin: f64,
    /// Distance at which a fixed point counts as lying in the postcritical sample.
    pub fixed_point_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_horizon: 32,
            stability_windows: 4,
            stability_growth: 0.01,
            stability_bound_factor: 10.0,
            subsequence_min_len: 4,
            subsequence_max_modulus: 6,
            zero_tol: 1e-2,
            limsup_delta: 1e-3,
            alpha_band: 0.05,
            alpha_min: 1e-3,
            sum_growth: 1.5,
            sublinear_tol: 0.01,
            limit_tol: 1e-3,
            barycenter_decay_slope: -0.95,
            radius_slack: 0.05,
            bounded_factor: 2.0,
            convergence_tol: 1e-3,
            area_zero_slope: -0.5,
            area_positive_slope: -0.1,
            attract_tol: 1e-6,
            max_period: 20,
            returns: 3,
            attract_margin: 1e-3,
            fixed_point_tol: crate::measures::MERGE_RADIUS,
        }
    }
}

const DEGENERATE: &str = "spectrum is degenerate: the critical orbit lands on a critical point";

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[s.len() / 2]
}

/// Least-squares slope of `ys` against `xs`.
fn fit_line(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// `|S_n| ≤ C|σ_n|`: growth of the window minima of `ρ_n = |S_n|/|σ_n|`.
pub fn stability_bound_check(s: &Spectrum, t: &Thresholds) -> CriterionResult {
    let id = CriterionId::PropStabilityBound;
    let with_thresholds = |r: CriterionResult| {
        r.threshold("min_horizon", t.min_horizon as f64)
            .threshold("stability_windows", t.stability_windows as f64)
            .threshold("stability_growth", t.stability_growth)
            .threshold("stability_bound_factor", t.stability_bound_factor)
    };
    if s.degenerate {
        return with_thresholds(CriterionResult::new(id, Status::Inapplicable, DEGENERATE));
    }
    if s.len() < t.min_horizon.max(2 * t.stability_windows.max(3)) {
        return with_thresholds(CriterionResult::new(id, Status::Undecided, "horizon too short"));
    }
    let log_rho = s.log_stability_ratio();
    let n = log_rho.len();
    let windows = t.stability_windows.max(3);
    let w = (n / 2) / windows;
    let start = n - w * windows;
    let minima: Vec<f64> = (0..windows)
        .map(|k| log_rho[start + k * w..start + (k + 1) * w].iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    let step = (1.0 + t.stability_growth).ln();
    let growing = minima.windows(2).all(|p| p[1].is_finite() && p[1] - p[0] >= step);
    let med = median(&log_rho);
    let trailing_max = log_rho[n / 2..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let finite_tail: Vec<f64> = log_rho[n / 2..].iter().copied().filter(|x| x.is_finite()).collect();
    let (status, caveat) = if growing {
        (
            Status::InstabilityEvidence,
            "window minima of |S_n|/|sigma_n| grow across every trailing window; no constant C fits this horizon",
        )
    } else if trailing_max <= med + t.stability_bound_factor.ln() {
        (Status::ConsistentWithStability, "|S_n|/|sigma_n| stays within a fixed multiple of its median")
    } else {
        (Status::Undecided, "|S_n|/|sigma_n| neither grows steadily nor stays bounded on this horizon")
    };
    let mut r = CriterionResult::new(id, status, caveat)
        .evidence("window_len", w as f64)
        .evidence("log_rho_median", med)
        .evidence("log_rho_trailing_max", trailing_max)
        .evidence("rho_step_growth", fit_slope(&finite_tail).exp());
    for (k, m) in minima.iter().enumerate() {
        r = r.evidence(&format!("log_rho_window_min_{k}"), *m);
    }
    with_thresholds(r)
}

/// The declared subsequence family: `n ≡ j (mod p)` for `p ≤ max_modulus`, and
/// the geometric grids `⌊g^i⌋` for `g ∈ {1.25, 1.5}`. Each is returned with its name.
pub fn subsequence_family(len: usize, max_modulus: usize) -> Vec<(String, Vec<usize>)> {
    let mut out = Vec::new();
    for p in 1..=max_modulus.max(1) {
        for j in 0..p {
            out.push((format!("{j} mod {p}"), (j..len).step_by(p).collect()));
        }
    }
    for g in [1.25f64, 1.5] {
        let mut idx: Vec<usize> = Vec::new();
        let mut x = 1.0;
        while (x as usize) < len {
            if idx.last() != Some(&(x as usize)) {
                idx.push(x as usize);
            }
            x *= g;
        }
        out.push((format!("floor({g}^i)"), idx));
    }
    out
}

/// Trailing half (by count) of a subsequence.
fn trailing(idx: &[usize]) -> &[usize] {
    &idx[idx.len() / 2..]
}

/// Both subsequence criteria, scanned over `subsequence_family`.
pub fn subsequence_checks(s: &Spectrum, t: &Thresholds) -> [CriterionResult; 2] {
    let family = subsequence_family(s.len(), t.subsequence_max_modulus);
    let family_note = format!(
        "subsequences scanned: n = j mod p (p <= {}) and floor(g^i), g in {{1.25, 1.5}}; trailing half of each",
        t.subsequence_max_modulus
    );
    let b1 = |r: CriterionResult| {
        r.threshold("zero_tol", t.zero_tol)
            .threshold("limsup_delta", t.limsup_delta)
            .threshold("subsequence_min_len", t.subsequence_min_len as f64)
    };
    let b2 = |r: CriterionResult| {
        r.threshold("alpha_band", t.alpha_band)
            .threshold("alpha_min", t.alpha_min)
            .threshold("sum_growth", t.sum_growth)
            .threshold("subsequence_min_len", t.subsequence_min_len as f64)
    };
    if s.degenerate {
        return [
            b1(CriterionResult::new(CriterionId::CorBullet1, Status::Inapplicable, DEGENERATE)),
            b2(CriterionResult::new(CriterionId::CorBullet2, Status::Inapplicable, DEGENERATE)),
        ];
    }
    let logs = s.log_abs();
    let sums: Vec<f64> = s.partial_sums.iter().map(|v| v.norm()).collect();

    // bullet 1: sigma -> 0 along the subsequence, limsup |S| > delta
    let mut best1: Option<(String, f64, f64)> = None;
    let mut any_decay = false;
    // bullet 2: sigma -> alpha != 0, |S| grows
    let mut best2: Option<(String, f64, Complex64)> = None;
    let mut any_band = false;
    for (name, idx) in &family {
        let tail = trailing(idx);
        if tail.len() < t.subsequence_min_len {
            continue;
        }
        let tail_logs: Vec<f64> = tail.iter().map(|&n| logs[n]).collect();
        let max_sigma = tail_logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
        let decays = max_sigma <= t.zero_tol
            && (tail_logs.iter().any(|l| !l.is_finite()) || fit_slope(&tail_logs) <= 0.0);
        if decays {
            any_decay = true;
            let limsup = tail.iter().map(|&n| sums[n]).fold(0.0, f64::max);
            if limsup > t.limsup_delta && best1.as_ref().is_none_or(|b| limsup > b.1) {
                best1 = Some((name.clone(), limsup, max_sigma));
            }
        }
        let alpha = s.sigma(*tail.last().unwrap());
        let in_band = alpha.norm() >= t.alpha_min
            && alpha.norm().is_finite()
            && tail.iter().all(|&n| (s.sigma(n) - alpha).norm() <= t.alpha_band * alpha.norm());
        if in_band {
            any_band = true;
            let (first, last) = (sums[tail[0]], sums[*tail.last().unwrap()]);
            let growth = last / first;
            let monotone = tail.windows(2).all(|w| sums[w[1]] >= sums[w[0]]);
            if growth >= t.sum_growth && monotone && best2.as_ref().is_none_or(|b| growth > b.1) {
                best2 = Some((name.clone(), growth, alpha));
            }
        }
    }
    let r1 = match best1 {
        Some((name, limsup, max_sigma)) => CriterionResult::new(
            CriterionId::CorBullet1,
            Status::InstabilityEvidence,
            format!("sigma decays along {name} while |S| stays above delta; {family_note}"),
        )
        .evidence("limsup_abs_s", limsup)
        .evidence("max_abs_sigma", max_sigma),
        None if any_decay => CriterionResult::new(
            CriterionId::CorBullet1,
            Status::ConsistentWithStability,
            format!("every decaying subsequence has |S| below delta; {family_note}"),
        ),
        None => CriterionResult::new(
            CriterionId::CorBullet1,
            Status::Inapplicable,
            format!("no subsequence of sigma decays to zero; {family_note}"),
        ),
    };
    let r2 = match best2 {
        Some((name, growth, alpha)) => CriterionResult::new(
            CriterionId::CorBullet2,
            Status::InstabilityEvidence,
            format!("sigma stays near a non-zero alpha along {name} while |S| grows; {family_note}"),
        )
        .evidence("sum_growth", growth)
        .evidence("alpha_re", alpha.re)
        .evidence("alpha_im", alpha.im),
        None if any_band => CriterionResult::new(
            CriterionId::CorBullet2,
            Status::ConsistentWithStability,
            format!("|S| does not grow along subsequences where sigma approaches a non-zero alpha; {family_note}"),
        ),
        None => CriterionResult::new(
            CriterionId::CorBullet2,
            Status::Inapplicable,
            format!("no subsequence of sigma settles near a non-zero alpha; {family_note}"),
        ),
    };
    [b1(r1), b2(r2)]
}

fn sublinear(s: &Spectrum, t: &Thresholds) -> (bool, f64) {
    let proxy = sublinear_growth_proxy(s);
    (proxy <= t.sublinear_tol, proxy)
}

/// Barycenters `b_n = S_{n-1}/n` under the `o(n)` proxy.
pub fn barycentric_check(s: &Spectrum, t: &Thresholds) -> CriterionResult {
    let id = CriterionId::Barycentric;
    let th = |r: CriterionResult| {
        r.threshold("sublinear_tol", t.sublinear_tol)
            .threshold("limit_tol", t.limit_tol)
            .threshold("barycenter_decay_slope", t.barycenter_decay_slope)
            .threshold("cauchy_window", CAUCHY_WINDOW as f64)
    };
    if s.degenerate {
        return th(CriterionResult::new(id, Status::Inapplicable, DEGENERATE));
    }
    let (ok, proxy) = sublinear(s, t);
    if !ok {
        return th(CriterionResult::new(id, Status::Inapplicable, "o(n) proxy fails on this horizon")
            .evidence("sublinear_proxy", proxy));
    }
    let b = &s.barycenters;
    if b.len() < 2 * CAUCHY_WINDOW {
        return th(CriterionResult::new(id, Status::Undecided, "horizon too short"));
    }
    let last = &b[b.len() - CAUCHY_WINDOW..];
    let near_zero = last.iter().all(|v| v.norm() < t.limit_tol);
    let half = b.len() / 2;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (half..b.len())
        .filter(|&k| b[k].norm() > 0.0)
        .map(|k| (((k + 1) as f64).ln(), b[k].norm().ln()))
        .unzip();
    let slope = if xs.len() >= 2 { fit_line(&xs, &ys) } else { f64::NEG_INFINITY };
    let cauchy = last.iter().enumerate().all(|(i, a)| last[i + 1..].iter().all(|c| (a - c).norm() < t.limit_tol));
    let mean = last.iter().sum::<Complex64>() / CAUCHY_WINDOW as f64;
    let (status, caveat) = if near_zero {
        (Status::ConsistentWithStability, "barycenters are within the tolerance of 0")
    } else if slope <= t.barycenter_decay_slope {
        (Status::ConsistentWithStability, "barycenters decay like 1/n toward 0")
    } else if cauchy {
        (Status::InstabilityEvidence, "barycenters settle at a non-zero value")
    } else {
        (Status::Undecided, "barycenters neither settle nor decay on this horizon")
    };
    th(CriterionResult::new(id, status, caveat)
        .evidence("sublinear_proxy", proxy)
        .evidence("loglog_slope", slope)
        .evidence("trailing_mean_re", mean.re)
        .evidence("trailing_mean_im", mean.im))
}

/// Radial Abel scan of `σ` over the prefix of `LambdaPath::radial(count)` that the
/// horizon resolves.
pub fn abel_criterion(s: &Spectrum, count: usize, t: &Thresholds) -> CriterionResult {
    let id = CriterionId::AbelConvergence;
    let th = |r: CriterionResult| {
        r.threshold("sublinear_tol", t.sublinear_tol)
            .threshold("radius_slack", t.radius_slack)
            .threshold("limit_tol", t.limit_tol)
            .threshold("radial_count", count as f64)
    };
    if s.degenerate {
        return th(CriterionResult::new(id, Status::Inapplicable, DEGENERATE));
    }
    let (ok, proxy) = sublinear(s, t);
    let radius = radius_of_convergence(s).map(|r| r.radius).unwrap_or(f64::NAN);
    if !ok || !(radius >= 1.0 - t.radius_slack) {
        return th(CriterionResult::new(id, Status::Inapplicable, "o(n) proxy or radius >= 1 precondition fails")
            .evidence("sublinear_proxy", proxy)
            .evidence("radius", radius));
    }
    let report = match abel_scan(&Sequence::explicit(s.values()), &LambdaPath::radial(count)) {
        Ok(r) => r,
        Err(e) => return th(CriterionResult::new(id, Status::Undecided, format!("Abel scan failed: {e}"))),
    };
    let resolved = report.values.iter().take_while(|p| p.resolved).count();
    if resolved < CAUCHY_WINDOW {
        return th(CriterionResult::new(id, Status::Undecided, "horizon too short to resolve the radial path")
            .evidence("resolved_points", resolved as f64));
    }
    let vals: Vec<Complex64> = report.values[..resolved].iter().map(|p| p.value).collect();
    let (verdict, limit) = cauchy_verdict(&vals, &vec![true; resolved]);
    let last = report.values[resolved - 1];
    let r = match (verdict, limit) {
        (Verdict::ConvergesTo, Some(l)) if l.norm() <= t.limit_tol => {
            CriterionResult::new(id, Status::ConsistentWithStability, "Abel averages tend to 0 radially")
        }
        (Verdict::ConvergesTo, Some(_)) => {
            CriterionResult::new(id, Status::InstabilityEvidence, "Abel averages settle at a non-zero limit")
        }
        (Verdict::Diverges | Verdict::Oscillates, _) => {
            CriterionResult::new(id, Status::InstabilityEvidence, "Abel averages do not converge radially")
        }
        _ => CriterionResult::new(id, Status::Undecided, "radial Abel scan is undecided"),
    };
    let l = limit.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    th(r.evidence("limit_re", l.re)
        .evidence("limit_im", l.im)
        .evidence("resolved_points", resolved as f64)
        .evidence("last_lambda", last.lambda.re)
        .evidence("radius", radius))
}

/// Largest prefix used for Nörlund averages (the convolution is quadratic).
pub const NORLUND_HORIZON: usize = 4096;

/// Nörlund regularity of `|σ_n|` under `w`; a hypothesis check only.
pub fn norlund_regular_check(s: &Spectrum, w: &NorlundWeights) -> CriterionResult {
    let id = CriterionId::NorlundRegular;
    let th = |r: CriterionResult| {
        r.threshold("regularity_slack", REGULARITY_SLACK).threshold("norlund_horizon", NORLUND_HORIZON as f64)
    };
    if s.degenerate {
        return th(CriterionResult::new(id, Status::Inapplicable, DEGENERATE));
    }
    let x: Vec<Complex64> =
        s.values().iter().take(NORLUND_HORIZON).map(|v| Complex64::new(v.norm(), 0.0)).collect();
    let verdict = norlund_averages(&x, w).and_then(|t| norlund_regularity_check(&t));
    match verdict {
        Ok(v) if v.regular => th(CriterionResult::new(
            id,
            Status::Undecided,
            "|sigma| is N-regular; instability additionally needs a non-zero Voronoi M-measure",
        )
        .hypothesis(Hypothesis::Holds)
        .evidence("root_estimate", v.estimate)),
        Ok(v) => th(CriterionResult::new(id, Status::Inapplicable, "|sigma| is not N-regular under these weights")
            .hypothesis(Hypothesis::Fails)
            .evidence("root_estimate", v.estimate)),
        Err(e) => th(CriterionResult::new(id, Status::Undecided, format!("regularity check failed: {e}"))
            .hypothesis(Hypothesis::Undecided)),
    }
}

/// `σ ∈ ℓ∞` proxy: the trailing half does not exceed `bounded_factor` times the leading half.
pub fn bounded_proxy(s: &Spectrum, t: &Thresholds) -> bool {
    let logs = s.log_abs();
    let h = logs.len() / 2;
    if h == 0 {
        return false;
    }
    let lead = logs[..h].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tail = logs[h..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    tail <= lead + t.bounded_factor.ln()
}

/// Cauchy test on the last `CAUCHY_WINDOW` values of `σ`.
pub fn convergent_proxy(s: &Spectrum, t: &Thresholds) -> bool {
    let v = s.values();
    if v.len() < CAUCHY_WINDOW {
        return false;
    }
    let last = &v[v.len() - CAUCHY_WINDOW..];
    let scale = last.iter().map(|z| z.norm()).fold(1.0, f64::max);
    last.iter().enumerate().all(|(i, a)| last[i + 1..].iter().all(|b| (a - b).norm() <= t.convergence_tol * scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riemann::{RationalMap, SpherePoint};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn chebyshev(n: usize) -> Spectrum {
        let r = RationalMap::polynomial_real(&[-2.0, 0.0, 1.0]).unwrap();
        Spectrum::compute(&r, SpherePoint::real(0.0), n).unwrap()
    }

    fn synthetic(f: impl Fn(usize) -> f64, n: usize) -> Spectrum {
        Spectrum::synthetic(&(0..n).map(|k| c(f(k))).collect::<Vec<_>>())
    }

    #[test]
    fn stability_bound_examples() {
        let t = Thresholds::default();
        assert_eq!(stability_bound_check(&chebyshev(64), &t).status, Status::InstabilityEvidence);
        assert_eq!(stability_bound_check(&synthetic(|_| 1.0, 64), &t).status, Status::InstabilityEvidence);
        let geometric = synthetic(|k| (-2f64).powi(k as i32), 64);
        assert_eq!(stability_bound_check(&geometric, &t).status, Status::ConsistentWithStability);
        let alt = synthetic(|k| if k % 2 == 0 { 1.0 } else { -1.0 }, 64);
        assert_eq!(stability_bound_check(&alt, &t).status, Status::ConsistentWithStability);
        assert_eq!(stability_bound_check(&synthetic(|_| 1.0, 16), &t).status, Status::Undecided);
    }

    #[test]
    fn subsequence_examples() {
        let t = Thresholds::default();
        let [b1, b2] = subsequence_checks(&chebyshev(64), &t);
        assert_eq!(b1.status, Status::InstabilityEvidence);
        assert!((b1.evidence["limsup_abs_s"] - 2.0 / 3.0).abs() < 1e-6);
        assert_eq!(b2.status, Status::Inapplicable);
        let [b1, b2] = subsequence_checks(&synthetic(|_| 1.0, 64), &t);
        assert_eq!(b1.status, Status::Inapplicable);
        assert_eq!(b2.status, Status::InstabilityEvidence);
        let alt = synthetic(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / ((k + 1) * (k + 1)) as f64, 64);
        assert_eq!(subsequence_checks(&alt, &t)[0].status, Status::InstabilityEvidence);
        let flip = synthetic(|k| if k % 2 == 0 { 1.0 } else { -1.0 }, 64);
        assert_eq!(subsequence_checks(&flip, &t)[1].status, Status::ConsistentWithStability);
    }

    #[test]
    fn barycentric_examples() {
        let t = Thresholds::default();
        assert_eq!(barycentric_check(&synthetic(|_| 1.0, 256), &t).status, Status::InstabilityEvidence);
        assert_eq!(barycentric_check(&chebyshev(64), &t).status, Status::ConsistentWithStability);
        assert_eq!(barycentric_check(&synthetic(|k| k as f64, 256), &t).status, Status::Inapplicable);
    }

    #[test]
    fn abel_examples() {
        let t = Thresholds::default();
        let one = abel_criterion(&synthetic(|_| 1.0, 1 << 21), 20, &t);
        assert_eq!(one.status, Status::InstabilityEvidence, "{one:?}");
        assert!((one.evidence["limit_re"] - 1.0).abs() < 1e-3);
        assert_eq!(abel_criterion(&chebyshev(64), 20, &t).status, Status::ConsistentWithStability);
        let alt = synthetic(|k| if k % 2 == 0 { 1.0 } else { -1.0 }, 1 << 21);
        assert_eq!(abel_criterion(&alt, 20, &t).status, Status::ConsistentWithStability);
        assert_eq!(abel_criterion(&synthetic(|_| 1.0, 300), 20, &t).status, Status::Undecided);
    }

    #[test]
    fn norlund_examples() {
        let w = NorlundWeights::cesaro(64);
        let r = norlund_regular_check(&synthetic(|_| 1.0, 200), &w);
        assert_eq!(r.hypothesis, Some(Hypothesis::Holds));
        let r = norlund_regular_check(&synthetic(|k| 2f64.powi(k as i32), 200), &w);
        assert_eq!((r.status, r.hypothesis), (Status::Inapplicable, Some(Hypothesis::Fails)));
    }

    #[test]
    fn family_is_declared() {
        let f = subsequence_family(10, 2);
        assert_eq!(f[0], ("0 mod 1".to_string(), (0..10).collect()));
        assert_eq!(f[2].1, vec![1, 3, 5, 7, 9]);
        assert_eq!(f.last().unwrap().1, vec![1, 2, 3, 5, 7]);
    }
}
