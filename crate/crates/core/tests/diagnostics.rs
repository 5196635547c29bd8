use critorbit::diagnostics::{
    full_report, stability_bound_check, subsequence_family, CriterionId, DiagnosticsConfig, DiagnosticsReport,
    Status, Thresholds,
};
use critorbit::orbit::Spectrum;
use critorbit::riemann::RationalMap;
use critorbit::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quadratic(k: f64) -> RationalMap {
    RationalMap::new(vec![c(k, 0.0), c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]).unwrap()
}

fn report(k: f64, horizon: usize) -> DiagnosticsReport {
    let config = DiagnosticsConfig { horizon, separation_nodes: 65, ..DiagnosticsConfig::default() };
    full_report(&quadratic(k), c(0.0, 0.0), &config).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stability_bound_is_scale_invariant(
        growth in 0.5..3.0f64,
        phase in -3.0..3.0f64,
        scale in 1e-3..1e3f64,
        rot in -3.0..3.0f64,
        len in 48usize..160,
    ) {
        let base: Vec<Complex64> = (0..len)
            .map(|n| Complex64::from_polar((-growth * n as f64).exp(), phase * n as f64))
            .collect();
        let k = Complex64::from_polar(scale, rot);
        let scaled: Vec<Complex64> = base.iter().map(|s| s * k).collect();
        let t = Thresholds::default();
        let a = stability_bound_check(&Spectrum::synthetic(&base), &t);
        let b = stability_bound_check(&Spectrum::synthetic(&scaled), &t);
        prop_assert_eq!(a.status, b.status);
        for (key, x) in &a.evidence {
            let y = b.evidence[key];
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()), "{key}: {x} vs {y}");
        }
    }

    #[test]
    fn subsequences_are_increasing_and_in_range(len in 1usize..2000, modulus in 1usize..8) {
        for (name, idx) in subsequence_family(len, modulus) {
            prop_assert!(idx.iter().all(|&i| i < len), "{name}");
            prop_assert!(idx.windows(2).all(|w| w[0] < w[1]), "{name}");
        }
    }
}

#[test]
fn evidence_persists_across_horizons() {
    for horizon in [32, 64, 128] {
        let chebyshev = report(-2.0, horizon);
        assert_eq!(
            chebyshev.criterion(CriterionId::PropStabilityBound).unwrap().status,
            Status::InstabilityEvidence,
            "horizon {horizon}"
        );
        assert!(chebyshev.has_instability_evidence());
        let attracting = report(-0.1, horizon);
        assert!(!attracting.has_instability_evidence(), "horizon {horizon}");
    }
}

#[test]
fn report_is_deterministic_and_round_trips() {
    let a = serde_json::to_string(&report(-2.0, 64)).unwrap();
    let b = serde_json::to_string(&report(-2.0, 64)).unwrap();
    assert_eq!(a, b);
    let back: DiagnosticsReport = serde_json::from_str(&a).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), a);
    assert_eq!(back.criteria.len(), CriterionId::ALL.len());
    for (r, id) in back.criteria.iter().zip(CriterionId::ALL) {
        assert_eq!(r.id, id);
        assert!(r.evidence.values().all(|v| v.is_finite()));
    }
}

#[test]
fn non_critical_point_rejected() {
    assert!(full_report(&quadratic(-2.0), c(0.5, 0.0), &DiagnosticsConfig::default()).is_err());
}
