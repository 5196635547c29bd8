use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criteria::{
    abel_criterion, barycentric_check, subsequence_checks, norlund_regular_check, stability_bound_check, CriterionId,
    CriterionResult, Status, Thresholds,
};
use super::fatou::{
    bounded_spectrum_checks, default_separation_grid, pc_area_check, separation_criterion, separation_scan,
    fixed_point_precondition, SeparationOutcome, SeparationScan,
};
use crate::error::Result;
use crate::orbit::{
    oscillation_stats, postcritical_sample, radius_of_convergence, trichotomy_classify, OscillationStats,
    PostcriticalSample, RadiusEstimate, Spectrum, TrichotomyVerdict,
};
use crate::potential::GridSpec;
use crate::riemann::{RationalMap, SpherePoint};
use crate::summability::{NorlundWeights, WeightFamily};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    /// Spectrum length `N`.
    pub horizon: usize,
    /// Radial Abel path `λ_k = 1 - 2^-k`, `k <= radial_count`.
    pub radial_count: usize,
    pub weights: WeightFamily,
    /// Orbit steps for the postcritical sample; the horizon when absent.
    pub postcritical_steps: Option<usize>,
    /// Separation grid; a square around `c` covering the sample when absent.
    pub separation_grid: Option<GridSpec>,
    pub separation_nodes: usize,
    /// Iterations per orbit for Fatou classification.
    pub budget: usize,
    pub thresholds: Thresholds,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            horizon: 64,
            radial_count: 20,
            weights: WeightFamily::Constant,
            postcritical_steps: None,
            separation_grid: None,
            separation_nodes: 161,
            budget: 200,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub map: RationalMap,
    pub critical_point: Complex64,
    pub horizon: usize,
    pub degenerate: bool,
    pub trichotomy: Option<TrichotomyVerdict>,
    pub radius: Option<RadiusEstimate>,
    pub oscillation: Option<OscillationStats>,
    /// Some fixed point of `R` lies outside the postcritical sample.
    pub fixed_point_outside_postcritical: Option<bool>,
    pub separation: Option<SeparationScan>,
    pub criteria: Vec<CriterionResult>,
    pub config: DiagnosticsConfig,
    /// Paths of the artifacts the evidence was computed from.
    pub citations: Vec<String>,
    pub notes: Vec<String>,
}

impl DiagnosticsReport {
    pub fn criterion(&self, id: CriterionId) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.id == id)
    }

    pub fn has_instability_evidence(&self) -> bool {
        self.criteria.iter().any(|c| c.status == Status::InstabilityEvidence)
    }
}

/// All criteria for the critical point `c`, assembled in `CriterionId::ALL` order.
///
/// Errors only on invalid inputs (`c` not critical, invalid weights or grid);
/// failures inside a criterion become `undecided` or `inapplicable` entries.
pub fn full_report(r: &RationalMap, c: Complex64, config: &DiagnosticsConfig) -> Result<DiagnosticsReport> {
    let t = &config.thresholds;
    let spectrum = Spectrum::compute(r, SpherePoint::Finite(c), config.horizon)?;
    let weights = NorlundWeights::from_family(config.weights, config.horizon)?;
    if let Some(g) = &config.separation_grid {
        g.validate()?;
    }
    let mut notes = Vec::new();
    if spectrum.degenerate {
        notes.push("degenerate spectrum: the critical orbit lands on a critical point".into());
    }
    if spectrum.approached_infinity {
        notes.push("critical orbit approached infinity; spectrum truncated".into());
    }
    let steps = config.postcritical_steps.unwrap_or(config.horizon);
    let pc = match postcritical_sample(r, SpherePoint::Finite(c), steps) {
        Ok(p) => Some(p),
        Err(e) => {
            notes.push(format!("postcritical sample failed: {e}"));
            None
        }
    };
    let separation = pc.as_ref().and_then(|pc| {
        let grid = config
            .separation_grid
            .unwrap_or_else(|| default_separation_grid(c, &pc.points, config.separation_nodes));
        match separation_scan(r, c, &pc.points, &grid, config.budget, t) {
            Ok(s) => Some(s),
            Err(e) => {
                notes.push(format!("separation scan failed: {e}"));
                None
            }
        }
    });
    let in_fatou = separation.as_ref().is_some_and(|s| s.outcome == SeparationOutcome::CriticalPointInFatou);
    if in_fatou {
        notes.push("the critical point lies in a detected attracting basin; Julia-set criteria are inapplicable".into());
    }
    let criteria: Vec<CriterionResult> = CriterionId::ALL
        .par_iter()
        .map(|&id| {
            let r = evaluate(id, &spectrum, pc.as_ref(), separation.as_ref(), &weights, config);
            if in_fatou && r.status != Status::Inapplicable {
                let mut r = r;
                r.status = Status::Inapplicable;
                r.caveat = format!("critical point in a detected basin; {}", r.caveat);
                r
            } else {
                r
            }
        })
        .collect();
    let window = (spectrum.len() / 4).max(2);
    Ok(DiagnosticsReport {
        map: r.clone(),
        critical_point: c,
        horizon: config.horizon,
        degenerate: spectrum.degenerate,
        trichotomy: trichotomy_classify(&spectrum, window).ok(),
        radius: radius_of_convergence(&spectrum).ok(),
        oscillation: oscillation_stats(&spectrum),
        fixed_point_outside_postcritical: pc.as_ref().and_then(|pc| fixed_point_precondition(r, pc, t).ok()),
        separation,
        criteria,
        config: config.clone(),
        citations: Vec::new(),
        notes,
    })
}

fn evaluate(
    id: CriterionId,
    s: &Spectrum,
    pc: Option<&PostcriticalSample>,
    sep: Option<&SeparationScan>,
    weights: &NorlundWeights,
    config: &DiagnosticsConfig,
) -> CriterionResult {
    let t = &config.thresholds;
    let missing = |what: &str| CriterionResult::new(id, Status::Undecided, format!("{what} unavailable"));
    match id {
        CriterionId::PropStabilityBound => stability_bound_check(s, t),
        CriterionId::CorBullet1 => subsequence_checks(s, t)[0].clone(),
        CriterionId::CorBullet2 => subsequence_checks(s, t)[1].clone(),
        CriterionId::Barycentric => barycentric_check(s, t),
        CriterionId::AbelConvergence => abel_criterion(s, config.radial_count, t),
        CriterionId::NorlundRegular => norlund_regular_check(s, weights),
        CriterionId::Separation => sep.map_or_else(|| missing("separation scan"), separation_criterion),
        CriterionId::PcArea => pc.map_or_else(|| missing("postcritical sample"), |pc| pc_area_check(pc, t).0),
        CriterionId::BoundedThm1 | CriterionId::BoundedThm2 => match (pc, sep) {
            (Some(pc), Some(sep)) => {
                let area = pc_area_check(pc, t).1;
                let [a, b] = bounded_spectrum_checks(s, pc, sep, area, t);
                if id == CriterionId::BoundedThm1 {
                    a
                } else {
                    b
                }
            }
            _ => missing("postcritical sample or separation scan"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c0: f64) -> RationalMap {
        RationalMap::polynomial_real(&[c0, 0.0, 1.0]).unwrap()
    }

    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn chebyshev_report() {
        let rep = full_report(&poly(-2.0), zero(), &DiagnosticsConfig::default()).unwrap();
        let ids: Vec<CriterionId> = rep.criteria.iter().map(|c| c.id).collect();
        assert_eq!(ids, CriterionId::ALL);
        for id in [CriterionId::PropStabilityBound, CriterionId::CorBullet1] {
            assert_eq!(rep.criterion(id).unwrap().status, Status::InstabilityEvidence);
        }
        assert_eq!(rep.fixed_point_outside_postcritical, Some(true));
        assert!(rep.has_instability_evidence());
    }

    #[test]
    fn hyperbolic_report_is_inapplicable() {
        let rep = full_report(&poly(-0.1), zero(), &DiagnosticsConfig::default()).unwrap();
        assert!(rep.criteria.iter().all(|c| c.status == Status::Inapplicable), "{:?}", rep.criteria);
        assert!(!rep.has_instability_evidence());
    }

    #[test]
    fn degenerate_report() {
        let rep = full_report(&poly(0.0), zero(), &DiagnosticsConfig::default()).unwrap();
        assert!(rep.degenerate);
        assert!(rep.criteria.iter().all(|c| c.status == Status::Inapplicable));
        assert!(!rep.notes.is_empty());
    }

    #[test]
    fn report_is_deterministic_and_round_trips() {
        let cfg = DiagnosticsConfig::default();
        let a = serde_json::to_string(&full_report(&poly(-2.0), zero(), &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&full_report(&poly(-2.0), zero(), &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let back: DiagnosticsReport = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }

    #[test]
    fn non_critical_point_rejected() {
        assert!(full_report(&poly(-2.0), Complex64::new(0.5, 0.0), &DiagnosticsConfig::default()).is_err());
    }
}
