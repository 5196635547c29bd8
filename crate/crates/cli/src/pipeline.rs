use std::fs;
use std::path::{Path, PathBuf};

use critorbit::diagnostics::{full_report, DiagnosticsConfig};
use critorbit::measures::{
    build_abel_measure, build_voronoi_measure, projective_normalize, weak_star_scan, write_scan_csv, Construction,
    ProjectiveLimit, TestFamily, WeakStarScan,
};
use critorbit::orbit::{radius_of_convergence, trichotomy_classify, RadiusEstimate, Spectrum, TrichotomyVerdict};
use critorbit::potential::{m_measure_test, GridSpec, MMeasureReport};
use critorbit::riemann::{RationalMap, SpherePoint};
use critorbit::ruelle::{frozen_test_map, identity_check, sample_points, voronoi_identity_check, ResidualReport};
use critorbit::summability::{
    abel_scan, norlund_averages, norlund_regularity_check, NorlundWeights, RegularityVerdict, Sequence,
    SummabilityReport, WeightFamily,
};
use critorbit::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{sorted_critical_points, ConstructionKind, RenderSpec, RuelleMap, RuelleSpec, RunConfig, WeightSpec};
use crate::render::render_julia;
use crate::{CliError, EXIT_ERROR, EXIT_INSTABILITY, EXIT_OK};

pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const SUMMABILITY_JSON: &str = "summability.json";
pub const MEASURES_JSON: &str = "measures.json";
pub const SCAN_CSV: &str = "scan.csv";
pub const DIAGNOSTICS_JSON: &str = "diagnostics.json";
pub const RESIDUALS_JSON: &str = "residuals.json";
pub const JULIA_PGM: &str = "julia.pgm";
pub const ERRORS_JSON: &str = "errors.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Spectrum,
    Summability,
    Measures,
    Diagnose,
    RuelleVerify,
    Render,
}

impl Stage {
    /// Stages of a full run; identity checks and rendering only when configured.
    pub fn all(cfg: &RunConfig) -> Vec<Stage> {
        let mut s = vec![Stage::Spectrum, Stage::Summability, Stage::Measures, Stage::Diagnose];
        if cfg.ruelle.is_some() {
            s.push(Stage::RuelleVerify);
        }
        if cfg.render.is_some() {
            s.push(Stage::Render);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: Stage,
    pub error: String,
}

#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    /// Artifact file names in write order.
    pub artifacts: Vec<String>,
    pub errors: Vec<StageError>,
    pub instability_evidence: bool,
    pub warnings: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() {
            EXIT_ERROR
        } else if self.instability_evidence {
            EXIT_INSTABILITY
        } else {
            EXIT_OK
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NorlundSection {
    pub weights: NorlundWeights,
    pub averages: Vec<Complex64>,
    pub regularity: Option<RegularityVerdict>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CesaroSection {
    /// `t_n = S_n / (n+1)`.
    pub averages: Vec<Complex64>,
    /// Bitwise equality with the spectrum barycenters `b_{n+1}`.
    pub equal_to_barycenters: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummabilityArtifact {
    pub critical_point: Complex64,
    pub horizon: usize,
    pub radius: Option<RadiusEstimate>,
    pub trichotomy: Option<TrichotomyVerdict>,
    /// Abel averages of `σ` along the configured path.
    pub abel: SummabilityReport,
    pub norlund: NorlundSection,
    /// Present when the weights are constant.
    pub cesaro: Option<CesaroSection>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasuresArtifact {
    pub construction: ConstructionKind,
    /// Base point of the measures, the critical value `v = R(c)`.
    pub base_point: Complex64,
    pub terms: usize,
    pub seed: u64,
    pub scan: WeakStarScan,
    pub projective: Option<ProjectiveLimit>,
    pub m_measure: Option<MMeasureReport>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualsArtifact {
    pub map: RationalMap,
    pub critical_point: Complex64,
    pub seed: u64,
    pub sample_points: Vec<Complex64>,
    pub identity: ResidualReport,
    /// The same check one order higher.
    pub identity_next: ResidualReport,
    /// `unmatched_max_rel_residual` at `N+1` over that at `N`.
    pub unmatched_decrease_ratio: f64,
    pub voronoi: ResidualReport,
    pub voronoi_weights: WeightSpec,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    map: &'a RationalMap,
    c: Complex64,
    seed: u64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn write_file(out: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let p = out.join(name);
    fs::write(&p, bytes).map_err(io_err(&p))
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>, String> {
    let mut b = serde_json::to_vec_pretty(v).map_err(|e| e.to_string())?;
    b.push(b'\n');
    Ok(b)
}

/// Runs `stages` in the fixed order of [`Stage`] and writes their artifacts to `out`.
///
/// Stage failures are collected rather than aborting the run; I/O failures on
/// the output directory abort.
pub fn run(cfg: &RunConfig, map: &RationalMap, stages: &[Stage], out: &Path, seed: u64) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let c = cfg.critical_point(map)?;
    let ctx = Ctx { cfg, map, c, seed };
    let mut stages = stages.to_vec();
    stages.sort();
    stages.dedup();
    let mut outcome = RunOutcome::default();
    for stage in stages {
        let result = match stage {
            Stage::Spectrum => spectrum_stage(&ctx),
            Stage::Summability => summability_stage(&ctx),
            Stage::Measures => measures_stage(&ctx),
            Stage::Diagnose => diagnose_stage(&ctx, &outcome.artifacts),
            Stage::RuelleVerify => ruelle_stage(&ctx),
            Stage::Render => render_stage(&ctx),
        };
        match result {
            Ok(done) => {
                for (name, bytes) in done.files {
                    write_file(out, &name, &bytes)?;
                    outcome.artifacts.push(name);
                }
                outcome.instability_evidence |= done.instability;
                outcome.warnings.extend(done.warnings);
            }
            Err(error) => outcome.errors.push(StageError { stage, error }),
        }
    }
    let errors_path = out.join(ERRORS_JSON);
    if outcome.errors.is_empty() {
        if errors_path.exists() {
            fs::remove_file(&errors_path).map_err(io_err(&errors_path))?;
        }
    } else {
        let bytes = to_json(&outcome.errors).map_err(CliError::Config)?;
        write_file(out, ERRORS_JSON, &bytes)?;
        outcome.artifacts.push(ERRORS_JSON.into());
    }
    Ok(outcome)
}

#[derive(Default)]
struct StageOutput {
    files: Vec<(String, Vec<u8>)>,
    instability: bool,
    warnings: Vec<String>,
}

impl StageOutput {
    fn file(mut self, name: &str, bytes: Vec<u8>) -> Self {
        self.files.push((name.to_string(), bytes));
        self
    }
}

type StageResult = Result<StageOutput, String>;

fn spectrum(ctx: &Ctx, len: usize) -> Result<Spectrum, String> {
    Spectrum::compute(ctx.map, SpherePoint::Finite(ctx.c), len).map_err(|e| e.to_string())
}

fn spectrum_stage(ctx: &Ctx) -> StageResult {
    let s = spectrum(ctx, ctx.cfg.horizon)?;
    let mut buf = Vec::new();
    s.write_csv(&mut buf).map_err(|e| e.to_string())?;
    Ok(StageOutput::default().file(SPECTRUM_CSV, buf))
}

fn summability_stage(ctx: &Ctx) -> StageResult {
    let cfg = ctx.cfg;
    let s = spectrum(ctx, cfg.horizon)?;
    let sigma = s.values();
    let mut notes = Vec::new();
    let radius = radius_of_convergence(&s).map_err(|e| notes.push(format!("radius: {e}"))).ok();
    let trichotomy =
        trichotomy_classify(&s, (s.len() / 4).max(2)).map_err(|e| notes.push(format!("trichotomy: {e}"))).ok();
    let path = cfg.path.build().map_err(|e| e.to_string())?;
    let abel = abel_scan(&Sequence::explicit(sigma.clone()), &path).map_err(|e| e.to_string())?;
    let weights = cfg.weights.build(sigma.len()).map_err(|e| e.to_string())?;
    let averages = norlund_averages(&sigma, &weights).map_err(|e| e.to_string())?;
    let regularity = norlund_regularity_check(&averages).map_err(|e| notes.push(format!("regularity: {e}"))).ok();
    let q = weights.weights();
    let cesaro = q[..sigma.len()].iter().all(|&x| x == q[0]).then(|| {
        let cw = NorlundWeights::cesaro(sigma.len());
        let t = if weights.family() == Some(WeightFamily::Constant) {
            averages.clone()
        } else {
            norlund_averages(&sigma, &cw).unwrap_or_default()
        };
        let equal = t.len() == s.barycenters.len()
            && t.iter().zip(&s.barycenters).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
        CesaroSection { averages: t, equal_to_barycenters: equal }
    });
    let art = SummabilityArtifact {
        critical_point: ctx.c,
        horizon: cfg.horizon,
        radius,
        trichotomy,
        abel,
        norlund: NorlundSection { weights, averages, regularity },
        cesaro,
        notes,
    };
    Ok(StageOutput::default().file(SUMMABILITY_JSON, to_json(&art)?))
}

/// A square around the atoms, clear of them by the exclusion radius.
fn default_field_grid(points: &[Complex64]) -> GridSpec {
    let n = points.len().max(1) as f64;
    let center = points.iter().sum::<Complex64>() / n;
    let reach = points.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    GridSpec::square(center, 1.25 * reach + 0.5, 81, 1e-2)
}

fn measures_stage(ctx: &Ctx) -> StageResult {
    let m = &ctx.cfg.measures;
    let terms = m.terms.max(ctx.cfg.horizon);
    let s = spectrum(ctx, terms)?;
    let v = s.critical_value.ok_or("critical value is not finite")?;
    let seq = Sequence::explicit(s.values());
    let construction = match m.construction {
        ConstructionKind::Abel => Construction::Abel,
        ConstructionKind::Voronoi => Construction::Voronoi(ctx.cfg.weights.build(terms).map_err(|e| e.to_string())?),
    };
    let path = m.path.build().map_err(|e| e.to_string())?;
    let tests = TestFamily::standard(ctx.seed, &s.orbit);
    let scan = weak_star_scan(ctx.map, v, &seq, &construction, &path, &tests).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let projective = projective_normalize(&scan).map_err(|e| notes.push(format!("projective: {e}"))).ok();
    let m_measure = scan.rows.last().and_then(|row| {
        let built = match &construction {
            Construction::Abel => build_abel_measure(ctx.map, v, &seq, row.lambda, row.terms - 1),
            Construction::Voronoi(w) => build_voronoi_measure(ctx.map, v, &seq, w, row.lambda, row.terms - 1),
        };
        let test = built.and_then(|mu| {
            let atoms: Vec<Complex64> = mu.atoms().iter().map(|a| a.z).collect();
            let grid = m.field_grid.unwrap_or_else(|| default_field_grid(&atoms));
            m_measure_test(&mu, &grid, m.m_threshold)
        });
        test.map_err(|e| notes.push(format!("m-measure: {e}"))).ok()
    });
    let mut csv = Vec::new();
    write_scan_csv(&scan, &mut csv).map_err(|e| e.to_string())?;
    let art = MeasuresArtifact {
        construction: m.construction,
        base_point: v,
        terms: s.len(),
        seed: ctx.seed,
        scan,
        projective,
        m_measure,
        notes,
    };
    Ok(StageOutput::default().file(MEASURES_JSON, to_json(&art)?).file(SCAN_CSV, csv))
}

fn diagnose_stage(ctx: &Ctx, written: &[String]) -> StageResult {
    let cfg = ctx.cfg;
    let d = &cfg.diagnostics;
    let mut notes = Vec::new();
    let weights = match &cfg.weights {
        WeightSpec::Family(f) => *f,
        WeightSpec::Explicit { .. } => {
            notes.push("explicit weights are not extendable; the Norlund criterion uses Cesaro weights".to_string());
            WeightFamily::Constant
        }
    };
    let radial_count = match cfg.path {
        crate::config::PathSpec::Radial { count } => count.max(d.radial_count),
        crate::config::PathSpec::Stolz { .. } => d.radial_count,
    };
    let dc = DiagnosticsConfig {
        horizon: cfg.horizon,
        radial_count,
        weights,
        postcritical_steps: d.postcritical_steps,
        separation_grid: d.separation_grid,
        separation_nodes: d.separation_nodes,
        budget: d.budget,
        thresholds: cfg.thresholds.clone(),
    };
    let mut rep = full_report(ctx.map, ctx.c, &dc).map_err(|e| e.to_string())?;
    rep.citations = written.to_vec();
    rep.notes.extend(notes);
    let out = StageOutput { instability: rep.has_instability_evidence(), ..Default::default() };
    Ok(out.file(DIAGNOSTICS_JSON, to_json(&rep)?))
}

fn ruelle_stage(ctx: &Ctx) -> StageResult {
    let spec = ctx.cfg.ruelle.clone().unwrap_or_default();
    ruelle_artifact(ctx.map, &spec, ctx.seed).and_then(|a| Ok(StageOutput::default().file(RESIDUALS_JSON, to_json(&a)?)))
}

/// Identity checks at orders `N` and `N+1` plus the Voronoi form with the configured weights.
pub fn ruelle_artifact(config_map: &RationalMap, spec: &RuelleSpec, seed: u64) -> Result<ResidualsArtifact, String> {
    let map = match spec.map {
        RuelleMap::Frozen => frozen_test_map(),
        RuelleMap::Config => config_map.clone(),
    };
    let crit = sorted_critical_points(&map);
    let c = *crit
        .get(spec.critical_index)
        .ok_or_else(|| format!("ruelle.critical_index {} out of range", spec.critical_index))?;
    let lambda = spec.lambda.value();
    let zs = sample_points(&map, seed, spec.samples);
    let err = |e: critorbit::Error| e.to_string();
    let identity = identity_check(&map, c, lambda, &zs, spec.order).map_err(err)?;
    let identity_next = identity_check(&map, c, lambda, &zs, spec.order + 1).map_err(err)?;
    let weights = spec.weights.build(spec.order + 1).map_err(err)?;
    let voronoi = voronoi_identity_check(&map, c, &weights, lambda, &zs, spec.order).map_err(err)?;
    Ok(ResidualsArtifact {
        unmatched_decrease_ratio: identity_next.unmatched_max_rel_residual / identity.unmatched_max_rel_residual,
        map,
        critical_point: c,
        seed,
        sample_points: zs,
        identity,
        identity_next,
        voronoi,
        voronoi_weights: spec.weights.clone(),
    })
}

fn render_stage(ctx: &Ctx) -> StageResult {
    let spec: RenderSpec = ctx.cfg.render.clone().unwrap_or_default();
    let img = render_julia(ctx.map, &spec.grid, spec.max_iter).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    img.write_pgm(&mut buf).map_err(|e| e.to_string())?;
    let mut out = StageOutput::default().file(JULIA_PGM, buf);
    out.warnings.extend(img.warning);
    Ok(out)
}

/// Output directory: the flag, else the config value, else `critorbit-out`.
pub fn output_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("critorbit-out"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn cheb() -> (RunConfig, RationalMap) {
        RunConfig::parse(r#"{"map": {"num": [-2, 0, 1]}, "measures": {"terms": 256}}"#, Path::new(".")).unwrap()
    }

    #[test]
    fn chebyshev_run_reports_instability() {
        let (cfg, map) = cheb();
        let dir = tempfile::tempdir().unwrap();
        let out = run(&cfg, &map, &Stage::all(&cfg), dir.path(), 0).unwrap();
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        assert_eq!(out.exit_code(), EXIT_INSTABILITY);
        for f in [SPECTRUM_CSV, SUMMABILITY_JSON, MEASURES_JSON, SCAN_CSV, DIAGNOSTICS_JSON] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let s: SummabilityArtifact =
            serde_json::from_slice(&fs::read(dir.path().join(SUMMABILITY_JSON)).unwrap()).unwrap();
        assert!(s.cesaro.unwrap().equal_to_barycenters);
    }

    #[test]
    fn stage_errors_are_collected() {
        let (mut cfg, map) = cheb();
        cfg.ruelle = Some(RuelleSpec { map: RuelleMap::Config, ..Default::default() });
        let dir = tempfile::tempdir().unwrap();
        let out = run(&cfg, &map, &[Stage::Spectrum, Stage::RuelleVerify], dir.path(), 0).unwrap();
        assert_eq!(out.errors.len(), 1);
        assert_eq!(out.errors[0].stage, Stage::RuelleVerify);
        assert_eq!(out.exit_code(), EXIT_ERROR);
        assert!(dir.path().join(SPECTRUM_CSV).exists());
        assert!(dir.path().join(ERRORS_JSON).exists());
    }

    #[test]
    fn frozen_residuals() {
        let (_, map) = cheb();
        let a = ruelle_artifact(&map, &RuelleSpec::default(), 0).unwrap();
        assert!(a.identity.max_rel_residual <= 1e-8);
        assert_eq!(a.sample_points.len(), 10);
    }
}
