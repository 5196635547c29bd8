use critorbit::summability::{
    abel_average, abel_scan, functional_norm, norlund_averages, norlund_validate, LambdaPath, NorlundWeights,
    Sequence, Verdict, WeightFamily,
};
use critorbit::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn family() -> impl Strategy<Value = WeightFamily> {
    prop_oneof![
        Just(WeightFamily::Constant),
        Just(WeightFamily::Arithmetic),
        Just(WeightFamily::Identity),
        (0.1..0.95f64).prop_map(|r| WeightFamily::Geometric { r }),
    ]
}

/// `1 - |λ|` without cancellation.
fn gap(l: Complex64) -> f64 {
    ((1.0 - l.re) * (1.0 + l.re) - l.im * l.im) / (1.0 + l.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stolz_ratio_is_exact(alpha in 1.01..10.0f64, count in 1usize..24) {
        let path = LambdaPath::stolz(alpha, count).unwrap();
        for l in path.samples {
            let ratio = (c(1.0, 0.0) - l).norm() / gap(l);
            prop_assert!((ratio - alpha).abs() <= 1e-10 * alpha, "{ratio} vs {alpha}");
        }
    }

    #[test]
    fn radial_path_is_dyadic(count in 1usize..40) {
        for (k, l) in LambdaPath::radial(count).samples.iter().enumerate() {
            prop_assert_eq!(*l, c(1.0 - 2f64.powi(-(k as i32 + 1)), 0.0));
        }
    }

    #[test]
    fn norm_is_attained(l in disk(0.9)) {
        prop_assume!(l.norm() > 1e-3);
        let n = 2000;
        let a: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, -(k as f64) * l.arg())).collect();
        let p = abel_average(&a, l).unwrap();
        let norm = functional_norm(l).unwrap();
        prop_assert!((p.value.norm() - norm).abs() <= 1e-10 * norm + p.tail_bound);
    }

    #[test]
    fn abel_average_is_linear(l in disk(0.95), x in prop::collection::vec(disk(2.0), 50), y in prop::collection::vec(disk(2.0), 50), s in disk(3.0)) {
        let xy: Vec<Complex64> = x.iter().zip(&y).map(|(a, b)| a + s * b).collect();
        let lhs = abel_average(&xy, l).unwrap().value;
        let rhs = abel_average(&x, l).unwrap().value + s * abel_average(&y, l).unwrap().value;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()) * 50.0);
    }

    #[test]
    fn weights_keep_constants(f in family(), value in disk(5.0), len in 16usize..300) {
        let w = NorlundWeights::from_family(f, len).unwrap();
        let t = norlund_averages(&vec![value; len], &w).unwrap();
        for x in t {
            prop_assert!((x - value).norm() <= 1e-12 * (1.0 + value.norm()));
        }
    }

    #[test]
    fn identity_weights_are_exact(x in prop::collection::vec(disk(5.0), 1..200)) {
        prop_assert_eq!(norlund_averages(&x, &NorlundWeights::identity(x.len())).unwrap(), x);
    }

    #[test]
    fn generating_function_positive_on_unit_interval(f in family(), l in 0.0..0.999f64) {
        let w = NorlundWeights::from_family(f, 4096).unwrap();
        prop_assert!(w.generating_function(c(l, 0.0)).re > 0.0);
    }

    #[test]
    fn partial_sums_increase(f in family(), len in 2usize..500) {
        let w = NorlundWeights::from_family(f, len).unwrap();
        prop_assert!(w.weights()[0] > 0.0);
        prop_assert!(w.weights().iter().all(|&q| q >= 0.0));
        for pair in w.partial_sums().windows(2) {
            prop_assert!(pair[1] >= pair[0]);
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    // the tail spread is about |1-λ|/(1-|ratio|), so the path must reach 1-λ = 2^-20
    #[test]
    fn converges_to_reports_finite_limit(limit in disk(2.0), amp in disk(1.0), ratio in disk(0.5)) {
        let rep = abel_scan(&Sequence::generated(move |n| limit + amp * ratio.powu(n as u32)), &LambdaPath::radial(20)).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::ConvergesTo);
        let l = rep.limit.unwrap();
        prop_assert!(l.re.is_finite() && l.im.is_finite());
        prop_assert!((l - limit).norm() <= 1e-3);
    }
}

#[test]
fn outside_disk_rejected() {
    assert!(abel_average(&[c(1.0, 0.0)], c(1.0, 0.0)).is_err());
    assert!(abel_average(&[c(1.0, 0.0)], c(0.0, 1.5)).is_err());
    assert!(functional_norm(c(-1.0, 0.0)).is_err());
}

#[test]
fn invalid_weights_rejected() {
    assert!(norlund_validate(&[0.0, 1.0]).is_err());
    assert!(norlund_validate(&[1.0, -0.5]).is_err());
    assert!(norlund_validate(&[]).is_err());
}

#[test]
fn growing_sequence_diverges() {
    let rep = abel_scan(&Sequence::generated(|n| c(n as f64 * n as f64, 0.0)), &LambdaPath::radial(20)).unwrap();
    assert_eq!(rep.verdict, Verdict::Diverges);
    assert!(rep.limit.is_none());
}

#[test]
fn report_json_round_trip() {
    let rep = abel_scan(&Sequence::generated(|n| c(0.5f64.powi(n as i32), 1.0)), &LambdaPath::stolz(2.0, 12).unwrap()).unwrap();
    let s = serde_json::to_string(&rep).unwrap();
    let back: critorbit::summability::SummabilityReport = serde_json::from_str(&s).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
}
