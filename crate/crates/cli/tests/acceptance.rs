//! Acceptance criteria 1-12. Each test writes one `criterion N: PASS|FAIL` line
//! to stdout (bypassing capture) and then asserts on the same checks.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use critorbit::diagnostics::{full_report, CriterionId, DiagnosticsConfig, Status};
use critorbit::measures::{
    build_abel_measure, build_voronoi_measure, voronoi_by_terms, weak_star_scan, AtomicMeasure, Construction,
    ScanVerdict, TestFamily,
};
use critorbit::orbit::{partial_sums_and_barycenters, Spectrum};
use critorbit::potential::{contour_mass_recovery, gamma, gamma_l1_estimate, GridSpec, L1Quadrature};
use critorbit::riemann::{RationalMap, SpherePoint};
use critorbit::ruelle::{
    frozen_test_map, identity_check, ruelle_apply, ruelle_power, sample_points, voronoi_identity_check,
};
use critorbit::summability::{
    abel_average, abel_scan, functional_norm, norlund_averages, LambdaPath, NorlundWeights, Sequence, Verdict,
    WeightFamily,
};
use critorbit::Complex64;
use critorbit_cli::config::sorted_critical_points;
use critorbit_cli::render_julia;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Checks {
    id: usize,
    title: &'static str,
    items: Vec<(String, bool)>,
}

impl Checks {
    fn new(id: usize, title: &'static str) -> Self {
        Checks { id, title, items: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.items.push((detail.into(), ok));
    }

    fn runtime(&mut self, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.check(t < limit, format!("runtime {:.3}s < {}s", t.as_secs_f64(), limit.as_secs()));
    }

    fn finish(self) {
        let ok = self.items.iter().all(|(_, ok)| *ok);
        let mut line = format!("criterion {:>2}: {} {}", self.id, if ok { "PASS" } else { "FAIL" }, self.title);
        for (d, pass) in &self.items {
            line.push_str(&format!("\n    [{}] {d}", if *pass { "ok" } else { "FAIL" }));
        }
        line.push('\n');
        let mut out = std::io::stdout().lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
        let failed: Vec<&str> = self.items.iter().filter(|(_, ok)| !ok).map(|(d, _)| d.as_str()).collect();
        assert!(failed.is_empty(), "criterion {} failed: {failed:?}", self.id);
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zero() -> Complex64 {
    c(0.0, 0.0)
}

fn chebyshev() -> RationalMap {
    RationalMap::polynomial_real(&[-2.0, 0.0, 1.0]).unwrap()
}

fn square() -> RationalMap {
    RationalMap::polynomial_real(&[0.0, 0.0, 1.0]).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

#[test]
fn criterion_01_chebyshev_spectrum() {
    let mut k = Checks::new(1, "Chebyshev spectrum oracle");
    let start = Instant::now();
    let s = Spectrum::compute(&chebyshev(), SpherePoint::Finite(zero()), 30).unwrap();
    k.runtime(start, Duration::from_secs(1));
    k.check(s.sigma(0) == c(1.0, 0.0), "sigma_0 = 1");
    let (mut es, mut ep) = (0.0f64, 0.0f64);
    for n in 1..=30 {
        es = es.max(rel(s.sigma(n), c(-(4f64.powi(-(n as i32))), 0.0)));
    }
    for n in 0..=30 {
        ep = ep.max(rel(s.partial_sums[n], c(2.0 / 3.0 + 4f64.powi(-(n as i32)) / 3.0, 0.0)));
    }
    k.check(es <= 1e-12, format!("max rel error sigma_n vs -4^-n, n <= 30: {es:.2e} <= 1e-12"));
    k.check(ep <= 1e-12, format!("max rel error S_n vs 2/3 + 4^-n/3: {ep:.2e} <= 1e-12"));
    k.finish();
}

#[test]
fn criterion_02_stability_bound() {
    let mut k = Checks::new(2, "stability-bound criterion");
    let start = Instant::now();
    let s = Spectrum::compute(&chebyshev(), SpherePoint::Finite(zero()), 64).unwrap();
    let rep = full_report(&chebyshev(), zero(), &DiagnosticsConfig::default()).unwrap();
    k.runtime(start, Duration::from_secs(1));
    // rho_n = |S_n| / |sigma_n| evaluated independently from the partial sums
    let worst = (5..40)
        .map(|n| {
            let rho = |m: usize| s.partial_sums[m].norm() / s.sigma(m).norm();
            (rho(n + 1) / rho(n) / 4.0 - 1.0).abs()
        })
        .fold(0.0, f64::max);
    k.check(worst <= 0.01, format!("rho_(n+1)/rho_n = 4 within {:.2e} <= 1% for 5 <= n < 40", worst));
    let status = rep.criterion(CriterionId::PropStabilityBound).unwrap().status;
    k.check(status == Status::InstabilityEvidence, format!("diagnostics verdict {status:?}"));
    k.finish();
}

#[test]
fn criterion_03_abelian_property() {
    let mut k = Checks::new(3, "Abelian property of radial Abel scans");
    let path = LambdaPath::radial(20);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut verdicts_ok = true;
    for i in 0..20 {
        let limit = random_disk(&mut rng, 2.0);
        let amp = random_disk(&mut rng, 1.0);
        let ratio = random_disk(&mut rng, 0.9);
        // convergent sequences: limit + geometric, limit + alternating harmonic; bounded: limit + (-1)^n
        let seq = match i % 3 {
            0 => Sequence::generated(move |n| limit + amp * ratio.powu(n as u32)),
            1 => Sequence::generated(move |n| limit + amp * if n % 2 == 0 { 1.0 } else { -1.0 } / (n + 1) as f64),
            _ => Sequence::generated(move |n| limit + amp * if n % 2 == 0 { 1.0 } else { -1.0 }),
        };
        let rep = abel_scan(&seq, &path).unwrap();
        verdicts_ok &= rep.verdict == Verdict::ConvergesTo;
        if let Some(l) = rep.limit {
            worst = worst.max((l - limit).norm());
        } else {
            worst = f64::INFINITY;
        }
    }
    k.check(verdicts_ok, "all 20 seeded sequences report converges-to");
    k.check(worst <= 1e-3, format!("max |limit - true limit| = {worst:.2e} <= 1e-3"));
    let alt = Sequence::generated(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
    let rep = abel_scan(&alt, &path).unwrap();
    let l = rep.limit.map_or(f64::INFINITY, |l| l.norm());
    k.check(rep.verdict == Verdict::ConvergesTo && l <= 1e-3, format!("(-1)^n: limit |{l:.2e}| <= 1e-3"));
    let a: Vec<Complex64> = (0..20_000).map(|n| c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
    let p = abel_average(&a, c(0.99, 0.0)).unwrap().value;
    let exact = 0.01 / 1.99;
    k.check((p - c(exact, 0.0)).norm() <= 1e-6, format!("P_0.99((-1)^n) = {:.9} vs (1-l)/(1+l) = {exact:.9}", p.re));
    k.finish();
}

#[test]
fn criterion_04_functional_norm() {
    let mut k = Checks::new(4, "Abel functional norm");
    let lambda = c(0.5, 0.4);
    let norm = functional_norm(lambda).unwrap();
    k.check((norm - 1.7802).abs() <= 1e-3, format!("functional_norm(0.5+0.4i) = {norm:.6} vs 1.7802 +- 1e-3"));
    // witness: a_n aligned with the conjugate phase of (1-l) l^n
    let factor = c(1.0, 0.0) - lambda;
    let witness: Vec<Complex64> = (0..=10_000)
        .map(|n| {
            let t = factor * lambda.powu(n as u32);
            if t.norm() == 0.0 {
                c(1.0, 0.0)
            } else {
                t.conj() / t.norm()
            }
        })
        .collect();
    let p = abel_average(&witness, lambda).unwrap().value.norm();
    k.check((p - norm).abs() <= 1e-6, format!("|P_l(witness)| = {p:.9}, gap {:.2e} <= 1e-6", (p - norm).abs()));
    k.finish();
}

#[test]
fn criterion_05_norlund_regularity() {
    let mut k = Checks::new(5, "Norlund regularity");
    let n = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cesaro = NorlundWeights::cesaro(n + 1);
    let arith = NorlundWeights::from_family(WeightFamily::Arithmetic, n + 1).unwrap();
    let (mut worst_c, mut worst_a) = (0.0f64, 0.0f64);
    let mut exact_identity = true;
    for i in 0..10 {
        let limit = random_disk(&mut rng, 2.0);
        let amp = random_disk(&mut rng, 0.2);
        let ratio = random_disk(&mut rng, 0.5);
        let x: Vec<Complex64> = (0..=n)
            .map(|j| match i % 2 {
                0 => limit + amp * ratio.powu(j as u32),
                _ => limit + amp / ((j + 1) * (j + 1)) as f64,
            })
            .collect();
        worst_c = worst_c.max((norlund_averages(&x, &cesaro).unwrap()[n] - limit).norm());
        worst_a = worst_a.max((norlund_averages(&x, &arith).unwrap()[n] - limit).norm());
        exact_identity &= norlund_averages(&x, &NorlundWeights::identity(n + 1)).unwrap() == x;
    }
    k.check(worst_c <= 1e-3, format!("Cesaro |t_1000 - limit| max {worst_c:.2e} <= 1e-3 over 10 sequences"));
    k.check(worst_a <= 1e-3, format!("q_n = n+1 |t_1000 - limit| max {worst_a:.2e} <= 1e-3 over 10 sequences"));
    k.check(exact_identity, "identity weights reproduce inputs exactly");
    let s = Spectrum::compute(&chebyshev(), SpherePoint::Finite(zero()), 200).unwrap();
    let sigma = s.values();
    let t = norlund_averages(&sigma, &NorlundWeights::cesaro(sigma.len())).unwrap();
    let (_, b) = partial_sums_and_barycenters(&sigma);
    let bitwise = t.len() == b.len()
        && t.iter().zip(&b).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
    k.check(bitwise, "Cesaro averages equal barycenters b_(n+1) bit for bit");
    k.finish();
}

fn max_weight_gap(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let mut gap = 0.0f64;
    for x in a.atoms() {
        let y = b.atoms().iter().find(|y| (y.z - x.z).norm() <= 1e-12).map_or(Complex64::new(0.0, 0.0), |y| y.w);
        gap = gap.max((x.w - y).norm());
    }
    for y in b.atoms() {
        if !a.atoms().iter().any(|x| (y.z - x.z).norm() <= 1e-12) {
            gap = gap.max(y.w.norm());
        }
    }
    gap
}

#[test]
fn criterion_06_voronoi_abel_consistency() {
    let mut k = Checks::new(6, "Voronoi/Abel consistency");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_id = 0.0f64;
    let mut worst_order = 0.0f64;
    let families = [WeightFamily::Constant, WeightFamily::Arithmetic, WeightFamily::Geometric { r: 0.5 }];
    for i in 0..10 {
        // |c| <= 1/4 and |z| <= 1/2 keep the orbit of z^2 + c inside |z| <= 1/2
        let r = RationalMap::new(vec![random_disk(&mut rng, 0.25), zero(), c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let z = random_disk(&mut rng, 0.5);
        let lambda = random_disk(&mut rng, 0.9);
        let x: Vec<Complex64> = (0..=200).map(|_| random_disk(&mut rng, 1.0)).collect();
        let seq = Sequence::explicit(x.clone());
        let abel = build_abel_measure(&r, z, &seq, lambda, 200).unwrap();
        let vor = build_voronoi_measure(&r, z, &seq, &NorlundWeights::identity(201), lambda, 200).unwrap();
        worst_id = worst_id.max(max_weight_gap(&abel, &vor));
        let w = NorlundWeights::from_family(families[i % 3], 201).unwrap();
        let by_atom = build_voronoi_measure(&r, z, &seq, &w, lambda, 200).unwrap();
        let by_term = voronoi_by_terms(&r, z, &x, &w, lambda, 200).unwrap();
        worst_order = worst_order.max(max_weight_gap(&by_atom, &by_term) / by_atom.total_variation().max(1.0));
    }
    k.check(worst_id <= 1e-12, format!("identity-weight Voronoi vs Abel atom gap {worst_id:.2e} <= 1e-12"));
    k.check(worst_order <= 1e-10, format!("accumulation orders agree to {worst_order:.2e} <= 1e-10 on 10 cases"));
    k.finish();
}

#[test]
fn criterion_07_gamma_kernel() {
    let mut k = Checks::new(7, "gamma-kernel identities");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 100 {
        let a = random_disk(&mut rng, 3.0);
        let z = random_disk(&mut rng, 3.0);
        let clear = [zero(), c(1.0, 0.0), a];
        if clear.iter().any(|p| (z - p).norm() < 0.1) || a.norm() < 0.1 || (a - 1.0).norm() < 0.1 {
            continue;
        }
        count += 1;
        let product = a * (a - 1.0) / (z * (z - 1.0) * (z - a));
        let fractions = (a - 1.0) / z - a / (z - 1.0) + 1.0 / (z - a);
        worst = worst.max(rel(fractions, product)).max(rel(gamma(a, z).unwrap(), product));
    }
    k.check(worst <= 1e-12, format!("partial fractions vs product form, 100 points: {worst:.2e} <= 1e-12"));
    let mut worst_mass = 0.0f64;
    for _ in 0..10 {
        let atoms: Vec<(Complex64, Complex64)> =
            (0..rng.gen_range(2..8)).map(|_| (random_disk(&mut rng, 2.0), random_disk(&mut rng, 1.0))).collect();
        let mu = AtomicMeasure::from_atoms(atoms).unwrap();
        for (i, at) in mu.atoms().iter().enumerate() {
            let sep = mu.atoms().iter().filter(|b| b.z != at.z).map(|b| (b.z - at.z).norm()).fold(f64::INFINITY, f64::min);
            let got = contour_mass_recovery(&mu, i, 0.5 * sep.min(1.0), 512).unwrap();
            worst_mass = worst_mass.max((got - at.w).norm());
        }
    }
    k.check(worst_mass <= 1e-8, format!("contour recovery of atom weights, 512 nodes: {worst_mass:.2e} <= 1e-8"));
    let ratios: Vec<f64> = [2.0, 5.0, 10.0, 50.0]
        .iter()
        .map(|&a| {
            let e = gamma_l1_estimate(c(a, 0.0), &L1Quadrature::default()).unwrap();
            e.estimate / (a * f64::ln(a)).abs()
        })
        .collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    k.check(spread <= 3.0, format!("L1 / |a ln a| for a = 2, 5, 10, 50: {ratios:.2?}, max/min {spread:.2} <= 3"));
    k.finish();
}

/// Square grid over `[-h, h]²` shifted off the lattice of poles and preimages.
fn offset_grid(h: f64, n: usize) -> GridSpec {
    GridSpec { xmin: -h + 0.0123, xmax: h + 0.0123, ymin: -h + 0.0071, ymax: h + 0.0071, nx: n, ny: n, exclusion_radius: 0.0 }
}

#[test]
fn criterion_08_ruelle_operator() {
    let mut k = Checks::new(8, "Ruelle operator");
    let start = Instant::now();
    let one = |_: Complex64| Ok(c(1.0, 0.0));
    let worst = sample_points(&square(), 8, 20)
        .into_iter()
        .map(|z| rel(ruelle_apply(&square(), one, z).unwrap(), 1.0 / (2.0 * z)))
        .fold(0.0, f64::max);
    k.check(worst <= 1e-10, format!("R_*(1) = 1/(2z) at 20 points: {worst:.2e} <= 1e-10"));
    let r = frozen_test_map();
    let a = c(0.4, -0.6);
    let mut semi = 0.0f64;
    for z in sample_points(&r, 8, 4) {
        for total in 2..=6 {
            let direct = ruelle_power(&r, |y| gamma(a, y), z, total).unwrap();
            for m in 1..total {
                let split = ruelle_power(&r, |y| ruelle_power(&r, |u| gamma(a, u), y, total - m), z, m).unwrap();
                semi = semi.max(rel(split, direct));
            }
        }
    }
    k.check(semi <= 1e-9, format!("R^m R^n = R^(m+n) for m+n <= 6: {semi:.2e} <= 1e-9"));
    let g = offset_grid(10.0, 401);
    for a in [c(2.0, 1.0), c(-0.5, 0.7)] {
        let (mut phi, mut pushed) = (0.0, 0.0);
        for z in g.points().into_iter().filter(|z| z.norm() <= 10.0) {
            phi += gamma(a, z).unwrap().norm();
            pushed += ruelle_apply(&square(), |y| gamma(a, y), z).unwrap().norm();
        }
        k.check(pushed <= 1.05 * phi, format!("a = {a}: ||R_* gamma|| / ||gamma|| = {:.3} <= 1.05", pushed / phi));
    }
    k.runtime(start, Duration::from_secs(30));
    k.finish();
}

#[test]
fn criterion_09_identity_residuals() {
    let mut k = Checks::new(9, "transfer-operator series identities on the frozen test map");
    let start = Instant::now();
    let r = frozen_test_map();
    let lambda = c(0.2, 0.0);
    let zs = sample_points(&r, 0, 10);
    for (i, cp) in sorted_critical_points(&r).into_iter().enumerate() {
        let r4 = identity_check(&r, cp, lambda, &zs, 4).unwrap();
        let r5 = identity_check(&r, cp, lambda, &zs, 5).unwrap();
        k.check(r4.max_rel_residual <= 1e-8, format!("c{i}: matched residual N=4 {:.2e} <= 1e-8", r4.max_rel_residual));
        let ratio = r5.unmatched_max_rel_residual / r4.unmatched_max_rel_residual;
        k.check(
            ratio <= lambda.norm() / 2.0,
            format!(
                "c{i}: unmatched residual N=4 -> 5: {:.3e} -> {:.3e}, ratio {ratio:.3} <= |l|/2 = 0.1",
                r4.unmatched_max_rel_residual, r5.unmatched_max_rel_residual
            ),
        );
        let v = voronoi_identity_check(&r, cp, &NorlundWeights::identity(8), lambda, &zs, 4).unwrap();
        let gap = v
            .samples
            .iter()
            .zip(&r4.samples)
            .map(|(a, b)| (a.rel_residual - b.rel_residual).abs())
            .fold(0.0, f64::max);
        k.check(gap <= 1e-12, format!("c{i}: Voronoi identity with identity weights reproduces the series residuals: {gap:.2e} <= 1e-12"));
    }
    k.runtime(start, Duration::from_secs(60));
    k.finish();
}

#[test]
fn criterion_10_weak_star_scans() {
    let mut k = Checks::new(10, "weak-* scans");
    let r = chebyshev();
    let s = Spectrum::compute(&r, SpherePoint::Finite(zero()), 4096).unwrap();
    let v = s.critical_value.unwrap();
    let tests = TestFamily::standard(10, &s.orbit);
    let path = LambdaPath::radial(16);
    let scan = weak_star_scan(&r, v, &Sequence::explicit(s.values()), &Construction::Abel, &path, &tests).unwrap();
    k.check(scan.verdict == ScanVerdict::NullLimit, format!("sigma(z^2-2) verdict {:?}", scan.verdict));
    let sup = s.values().iter().map(|x| x.norm()).fold(0.0, f64::max);
    let tv_ok = scan.rows.iter().all(|row| row.tv <= functional_norm(row.lambda).unwrap() * sup * (1.0 + 1e-12));
    k.check(tv_ok, "TV(nu_l) <= functional_norm(l) sup|sigma_n| at every path point");
    let p = c(2.0, 0.0);
    let tests = TestFamily::standard(10, &[p]);
    let ones = Sequence::generated(|_| c(1.0, 0.0));
    let scan = weak_star_scan(&r, p, &ones, &Construction::Abel, &path, &tests).unwrap();
    k.check(scan.verdict == ScanVerdict::NonnullLimit, format!("constant at fixed point 2: verdict {:?}", scan.verdict));
    let gap = scan.limit_pairings.as_ref().map_or(f64::INFINITY, |lp| {
        lp.iter().zip(&tests.tests).map(|(x, f)| (x - f.eval(p)).norm() / f.eval(p).norm().max(1.0)).fold(0.0, f64::max)
    });
    k.check(gap <= 1e-8, format!("normalized pairings vs point evaluation at 2: {gap:.2e} <= 1e-8"));
    k.finish();
}

fn run_cli(config: &Path, out: &Path, threads: usize) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_critorbit"))
        .args(["all", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--threads", &threads.to_string(), "--seed", "11"])
        .output()
        .unwrap();
    status.status.code().unwrap_or(-1)
}

#[test]
fn criterion_11_determinism() {
    let mut k = Checks::new(11, "byte-determinism of the CLI pipeline");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{
  "map": {"num": [-2, 0, 1]},
  "horizon": 64,
  "measures": {"terms": 2048},
  "ruelle": {"map": "frozen", "lambda": 0.2, "N": 4, "samples": 10},
  "render": {"grid": {"xmin": -2.5, "xmax": 2.5, "ymin": -1.5, "ymax": 1.5, "nx": 201, "ny": 121, "exclusion_radius": 0}, "max_iter": 100}
}"#,
    )
    .unwrap();
    let runs = [("a", 1), ("b", 1), ("c", 8)];
    let codes: Vec<i32> = runs.iter().map(|(name, t)| run_cli(&config, &dir.path().join(name), *t)).collect();
    k.check(codes.iter().all(|&c| c == 10), format!("exit codes {codes:?} (10 = instability evidence)"));
    let names = ["spectrum.csv", "summability.json", "measures.json", "scan.csv", "diagnostics.json", "residuals.json", "julia.pgm"];
    for name in names {
        let files: Vec<Option<Vec<u8>>> = runs.iter().map(|(d, _)| std::fs::read(dir.path().join(d).join(name)).ok()).collect();
        let same = files[0].is_some() && files.iter().all(|f| f == &files[0]);
        k.check(same, format!("{name} identical across two runs and --threads 1 vs 8"));
    }
    k.finish();
}

#[test]
fn criterion_12_julia_render() {
    let mut k = Checks::new(12, "Julia render sanity for z^2-2");
    let g = GridSpec { xmin: -3.0, xmax: 3.0, ymin: -2.0, ymax: 2.0, nx: 301, ny: 201, exclusion_radius: 0.0 };
    let img = render_julia(&chebyshev(), &g, 1000).unwrap();
    let (mut far, mut escaped) = (0usize, 0usize);
    for row in 0..g.ny {
        for col in 0..g.nx {
            let z = g.point(col, g.ny - 1 - row);
            let d = if z.re.abs() <= 2.0 { z.im.abs() } else { (z - c(2.0 * z.re.signum(), 0.0)).norm() };
            if d > 0.1 {
                far += 1;
                escaped += usize::from(img.steps[img.index(col, row)].is_some_and(|s| s <= 50));
            }
        }
    }
    let frac = escaped as f64 / far as f64;
    k.check(frac >= 0.95, format!("{escaped}/{far} = {:.4} of pixels > 0.1 from [-2, 2] escape within 50 steps", frac));
    let (col, row) = (150, 100);
    k.check(g.point(col, g.ny - 1 - row) == zero(), "pixel (150, 100) contains 0");
    k.check(img.steps[img.index(col, row)].is_none(), "the pixel at 0 does not escape within 1000 steps");
    k.finish();
}
