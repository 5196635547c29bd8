use std::path::{Path, PathBuf};

use critorbit::diagnostics::Thresholds;
use critorbit::potential::GridSpec;
use critorbit::riemann::{PrecisionConfig, RationalMap};
use critorbit::summability::{norlund_validate, LambdaPath, NorlundWeights, WeightFamily};
use critorbit::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A coefficient or point: a real number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Coeff {
    pub fn value(self) -> Complex64 {
        match self {
            Coeff::Real(x) => Complex64::new(x, 0.0),
            Coeff::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Ascending coefficients inline, or a JSON file holding `{num, den}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default)]
    pub num: Vec<Coeff>,
    #[serde(default)]
    pub den: Vec<Coeff>,
    #[serde(default)]
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    num: Vec<Coeff>,
    #[serde(default)]
    den: Vec<Coeff>,
}

/// Index into the finite critical points sorted by `(re, im)`, or an explicit point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CriticalSelector {
    Index { index: usize },
    Value { value: Coeff },
}

impl Default for CriticalSelector {
    fn default() -> Self {
        CriticalSelector::Index { index: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PathSpec {
    Radial { count: usize },
    Stolz { alpha: f64, count: usize },
}

impl Default for PathSpec {
    fn default() -> Self {
        PathSpec::Radial { count: 20 }
    }
}

impl PathSpec {
    pub fn build(&self) -> critorbit::Result<LambdaPath> {
        match *self {
            PathSpec::Radial { count } => Ok(LambdaPath::radial(count)),
            PathSpec::Stolz { alpha, count } => LambdaPath::stolz(alpha, count),
        }
    }
}

/// A named weight family or an explicit list `q_0, q_1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Family(WeightFamily),
    Explicit { q: Vec<f64> },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Family(WeightFamily::Constant)
    }
}

impl WeightSpec {
    pub fn build(&self, len: usize) -> critorbit::Result<NorlundWeights> {
        match self {
            WeightSpec::Family(f) => NorlundWeights::from_family(*f, len),
            WeightSpec::Explicit { q } => norlund_validate(q),
        }
    }

    pub fn is_cesaro(&self) -> bool {
        matches!(self, WeightSpec::Family(WeightFamily::Constant))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionKind {
    Abel,
    Voronoi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasuresSpec {
    pub construction: ConstructionKind,
    pub path: PathSpec,
    /// Spectrum terms available to the measure builder.
    pub terms: usize,
    /// Grid for the M-measure test; a square around the atoms when absent.
    pub field_grid: Option<GridSpec>,
    pub m_threshold: f64,
}

impl Default for MeasuresSpec {
    fn default() -> Self {
        MeasuresSpec {
            construction: ConstructionKind::Abel,
            path: PathSpec::Radial { count: 16 },
            terms: 4096,
            field_grid: None,
            m_threshold: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuelleMap {
    /// The frozen normalized degree-2 test map.
    Frozen,
    /// The configured map, which must fix `0, 1, ∞` with simple critical points.
    Config,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RuelleSpec {
    pub map: RuelleMap,
    /// Index into the sorted finite critical points of the chosen map.
    pub critical_index: usize,
    pub lambda: Coeff,
    #[serde(rename = "N")]
    pub order: usize,
    pub samples: usize,
    pub weights: WeightSpec,
}

impl Default for RuelleSpec {
    fn default() -> Self {
        RuelleSpec {
            map: RuelleMap::Frozen,
            critical_index: 0,
            lambda: Coeff::Real(0.2),
            order: 4,
            samples: 10,
            weights: WeightSpec::Family(WeightFamily::Identity),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderSpec {
    pub grid: GridSpec,
    pub max_iter: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { grid: GridSpec::square(Complex64::new(0.0, 0.0), 2.5, 401, 0.0), max_iter: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSpec {
    pub radial_count: usize,
    pub budget: usize,
    pub separation_nodes: usize,
    pub separation_grid: Option<GridSpec>,
    pub postcritical_steps: Option<usize>,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        let d = critorbit::diagnostics::DiagnosticsConfig::default();
        DiagnosticsSpec {
            radial_count: d.radial_count,
            budget: d.budget,
            separation_nodes: d.separation_nodes,
            separation_grid: None,
            postcritical_steps: None,
        }
    }
}

fn default_horizon() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub map: MapSpec,
    #[serde(default)]
    pub critical_point: CriticalSelector,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub precision: PrecisionConfig,
    #[serde(default)]
    pub path: PathSpec,
    #[serde(default)]
    pub weights: WeightSpec,
    #[serde(default)]
    pub measures: MeasuresSpec,
    #[serde(default)]
    pub ruelle: Option<RuelleSpec>,
    #[serde(default)]
    pub render: Option<RenderSpec>,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parses and validates a config; `base` resolves relative map files.
    pub fn parse(text: &str, base: &Path) -> Result<(RunConfig, RationalMap), CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let map = cfg.load_map(base)?;
        cfg.validate(&map)?;
        Ok((cfg, map))
    }

    fn load_map(&self, base: &Path) -> Result<RationalMap, CliError> {
        let (num, den) = match (&self.map.file, self.map.num.is_empty()) {
            (Some(_), false) => return Err(CliError::Config("map: give either file or num, not both".into())),
            (Some(f), true) => {
                let path = base.join(f);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("map file {}: {e}", path.display())))?;
                let m: MapFile = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("map file: {e}")))?;
                (m.num, m.den)
            }
            (None, true) => return Err(CliError::Config("map: num is empty".into())),
            (None, false) => (self.map.num.clone(), self.map.den.clone()),
        };
        let den = if den.is_empty() { vec![Coeff::Real(1.0)] } else { den };
        let conv = |v: &[Coeff]| v.iter().map(|c| c.value()).collect();
        RationalMap::with_precision(conv(&num), conv(&den), &self.precision)
            .map_err(|e| CliError::Config(format!("map: {e}")))
    }

    fn validate(&self, map: &RationalMap) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.horizon < 2 {
            return bad("horizon must be at least 2".into());
        }
        if let Err(e) = self.path.build() {
            return bad(format!("path: {e}"));
        }
        if let Err(e) = self.measures.path.build() {
            return bad(format!("measures.path: {e}"));
        }
        if let Err(e) = self.weights.build(self.horizon) {
            return bad(format!("weights: {e}"));
        }
        if self.measures.terms == 0 {
            return bad("measures.terms must be positive".into());
        }
        for (name, g) in [
            ("measures.field_grid", self.measures.field_grid),
            ("diagnostics.separation_grid", self.diagnostics.separation_grid),
            ("render.grid", self.render.as_ref().map(|r| r.grid)),
        ] {
            if let Some(Err(e)) = g.map(|g| g.validate()) {
                return bad(format!("{name}: {e}"));
            }
        }
        if let Some(r) = &self.ruelle {
            if let Err(e) = r.weights.build(r.order + 1) {
                return bad(format!("ruelle.weights: {e}"));
            }
        }
        self.critical_point(map)?;
        Ok(())
    }

    /// The selected finite critical point.
    pub fn critical_point(&self, map: &RationalMap) -> Result<Complex64, CliError> {
        select_critical(map, self.critical_point)
    }
}

/// Finite critical points sorted by `(re, im)`.
pub fn sorted_critical_points(map: &RationalMap) -> Vec<Complex64> {
    let mut c = map.finite_critical_points();
    c.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    c
}

pub fn select_critical(map: &RationalMap, sel: CriticalSelector) -> Result<Complex64, CliError> {
    let crit = sorted_critical_points(map);
    match sel {
        CriticalSelector::Index { index } => crit.get(index).copied().ok_or_else(|| {
            CliError::Config(format!("critical_point.index {index} out of range ({} finite critical points)", crit.len()))
        }),
        CriticalSelector::Value { value } => {
            let v = value.value();
            crit.iter()
                .copied()
                .filter(|c| (c - v).norm() <= 1e-6 * (1.0 + v.norm()))
                .min_by(|a, b| (a - v).norm().total_cmp(&(b - v).norm()))
                .ok_or_else(|| CliError::Config(format!("critical_point.value {v} is not a critical point")))
        }
    }
}
