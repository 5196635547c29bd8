use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criteria::{
    bounded_proxy, convergent_proxy, CriterionId, CriterionResult, Hypothesis, Status, Thresholds,
};
use crate::orbit::{fit_slope, PostcriticalSample, Spectrum};
use crate::potential::GridSpec;
use crate::riemann::RationalMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractingCycle {
    pub points: Vec<Complex64>,
    pub multiplier: Complex64,
}

impl AttractingCycle {
    pub fn period(&self) -> usize {
        self.points.len()
    }
}

/// Where an orbit ends up within the iteration budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitFate {
    /// Left the escape disk of a polynomial.
    Escaped { steps: usize },
    /// Came within the return tolerance of a detected attracting cycle.
    Attracted { cycle: usize, steps: usize },
    Unresolved,
}

impl OrbitFate {
    pub fn is_fatou(&self) -> bool {
        !matches!(self, OrbitFate::Unresolved)
    }
}

/// Escape radius `2 max(2, coefficient scale)` for polynomials; `None` otherwise.
pub fn escape_radius(r: &RationalMap) -> Option<f64> {
    r.is_polynomial().then(|| 2.0 * r.coefficient_scale().max(2.0))
}

/// A period `p ≤ max_period` on which the last `returns` returns of `orbit` all
/// land within `tol`, as the trailing cycle.
fn trailing_cycle(orbit: &[Complex64], t: &Thresholds) -> Option<Vec<Complex64>> {
    let n = orbit.len();
    (1..=t.max_period).find_map(|p| {
        if n < t.returns * p + 1 {
            return None;
        }
        let last = n - 1;
        let settled = (0..t.returns).all(|k| (orbit[last - k * p] - orbit[last - (k + 1) * p]).norm() < t.attract_tol);
        settled.then(|| orbit[n - p..].to_vec())
    })
}

/// Attracting cycles reached by the finite critical orbits within `budget` steps.
/// Every attracting cycle attracts a critical point, so none is missed once the
/// budget suffices; parabolic and slowly converging cycles stay undetected.
pub fn detect_attracting_cycles(r: &RationalMap, budget: usize, t: &Thresholds) -> Vec<AttractingCycle> {
    let bound = escape_radius(r);
    let mut cycles: Vec<AttractingCycle> = Vec::new();
    for c in r.finite_critical_points() {
        let mut orbit = Vec::with_capacity(budget + 1);
        let mut z = c;
        orbit.push(z);
        for _ in 0..budget {
            z = r.eval(z);
            if !(z.re.is_finite() && z.im.is_finite()) || bound.is_some_and(|b| z.norm() > b) {
                break;
            }
            orbit.push(z);
        }
        if orbit.len() < budget + 1 {
            continue;
        }
        let Some(points) = trailing_cycle(&orbit, t) else { continue };
        let multiplier: Complex64 = points.iter().map(|&p| r.deriv(p)).product();
        if !(multiplier.norm() <= 1.0 - t.attract_margin) {
            continue;
        }
        let known = cycles.iter().any(|k| k.points.iter().any(|q| (q - points[0]).norm() < 1e3 * t.attract_tol));
        if !known {
            cycles.push(AttractingCycle { points, multiplier });
        }
    }
    cycles
}

/// Fate of the orbit of `z` under `budget` iterations.
pub fn orbit_fate(r: &RationalMap, z: Complex64, cycles: &[AttractingCycle], budget: usize, t: &Thresholds) -> OrbitFate {
    let bound = escape_radius(r);
    let mut w = z;
    for step in 0..=budget {
        if bound.is_some_and(|b| w.norm() > b) {
            return OrbitFate::Escaped { steps: step };
        }
        if !(w.re.is_finite() && w.im.is_finite()) {
            return OrbitFate::Unresolved;
        }
        for (i, c) in cycles.iter().enumerate() {
            if c.points.iter().any(|p| (w - p).norm() < t.attract_tol) {
                return OrbitFate::Attracted { cycle: i, steps: step };
            }
        }
        if step < budget {
            w = r.eval(w);
        }
    }
    OrbitFate::Unresolved
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparationOutcome {
    Separated,
    NotSeparatedAtThisResolution,
    Undecided,
    /// `c` itself lies in a detected basin.
    CriticalPointInFatou,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationScan {
    pub outcome: SeparationOutcome,
    pub grid: GridSpec,
    pub budget: usize,
    pub cycles: Vec<AttractingCycle>,
    pub fatou_nodes: usize,
    pub reached_nodes: usize,
    /// Postcritical sample points reached by the flood fill from `c`.
    pub reached_postcritical: usize,
    pub note: String,
}

/// Grid nodes around `z`: the (up to four) corners of its cell, or `None` off the grid.
fn cell_corners(grid: &GridSpec, z: Complex64) -> Option<Vec<(usize, usize)>> {
    let fx = (z.re - grid.xmin) / grid.dx();
    let fy = (z.im - grid.ymin) / grid.dy();
    if !(fx >= 0.0 && fy >= 0.0 && fx <= (grid.nx - 1) as f64 && fy <= (grid.ny - 1) as f64) {
        return None;
    }
    let (i0, j0) = (fx.floor() as usize, fy.floor() as usize);
    let mut out = Vec::with_capacity(4);
    for j in [j0, (j0 + 1).min(grid.ny - 1)] {
        for i in [i0, (i0 + 1).min(grid.nx - 1)] {
            if !out.contains(&(i, j)) {
                out.push((i, j));
            }
        }
    }
    Some(out)
}

fn nearest_node(grid: &GridSpec, z: Complex64) -> (usize, usize) {
    let i = ((z.re - grid.xmin) / grid.dx()).round().clamp(0.0, (grid.nx - 1) as f64) as usize;
    let j = ((z.im - grid.ymin) / grid.dy()).round().clamp(0.0, (grid.ny - 1) as f64) as usize;
    (i, j)
}

/// Grid-resolution test of whether the Fatou set separates `c` from `P_c`.
///
/// Nodes whose orbit escapes or falls into a detected attracting cycle within
/// `budget` steps are Fatou candidates. A 4-connected flood fill from the node
/// nearest `c` through the remaining nodes must not reach any postcritical point
/// (a point off the grid counts as reached once the fill touches the border); the
/// Fatou nodes bounding the fill then form the separating 8-connected loop.
pub fn separation_scan(
    r: &RationalMap,
    c: Complex64,
    postcritical: &[Complex64],
    grid: &GridSpec,
    budget: usize,
    t: &Thresholds,
) -> crate::Result<SeparationScan> {
    grid.validate()?;
    let cycles = detect_attracting_cycles(r, budget, t);
    let base = |outcome, note: &str| SeparationScan {
        outcome,
        grid: *grid,
        budget,
        cycles: cycles.clone(),
        fatou_nodes: 0,
        reached_nodes: 0,
        reached_postcritical: 0,
        note: note.into(),
    };
    if budget == 0 {
        return Ok(base(SeparationOutcome::Undecided, "zero iteration budget"));
    }
    if orbit_fate(r, c, &cycles, budget, t).is_fatou() {
        return Ok(base(SeparationOutcome::CriticalPointInFatou, "the critical point lies in a detected basin"));
    }
    let fatou: Vec<bool> = grid.points().par_iter().map(|&z| orbit_fate(r, z, &cycles, budget, t).is_fatou()).collect();
    let fatou_nodes = fatou.iter().filter(|f| **f).count();
    if fatou_nodes == 0 {
        return Ok(base(SeparationOutcome::Undecided, "no Fatou candidates on the grid"));
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let mut seen = vec![false; nx * ny];
    let start = nearest_node(grid, c);
    let mut queue = VecDeque::from([start]);
    seen[start.1 * nx + start.0] = true;
    let mut touches_border = false;
    while let Some((i, j)) = queue.pop_front() {
        touches_border |= i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
        let nbrs = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
        for (a, b) in nbrs {
            if a < nx && b < ny && !seen[b * nx + a] && !fatou[b * nx + a] {
                seen[b * nx + a] = true;
                queue.push_back((a, b));
            }
        }
    }
    let reached_nodes = seen.iter().filter(|s| **s).count();
    let reached_postcritical = postcritical
        .iter()
        .filter(|&&p| match cell_corners(grid, p) {
            Some(corners) => corners.iter().any(|&(i, j)| seen[j * nx + i]),
            None => touches_border,
        })
        .count();
    let outcome = if reached_postcritical > 0 {
        SeparationOutcome::NotSeparatedAtThisResolution
    } else {
        SeparationOutcome::Separated
    };
    Ok(SeparationScan {
        outcome,
        grid: *grid,
        budget,
        cycles,
        fatou_nodes,
        reached_nodes,
        reached_postcritical,
        note: "parabolic basins and cycles through infinity of non-polynomial maps show as unresolved".into(),
    })
}

/// Default grid: a square centred at `c` covering the postcritical sample with margin,
/// odd node count so `c` is a node.
pub fn default_separation_grid(c: Complex64, postcritical: &[Complex64], nodes: usize) -> GridSpec {
    let reach = postcritical.iter().map(|p| (p - c).re.abs().max((p - c).im.abs())).fold(0.0, f64::max);
    let n = nodes.max(3) | 1;
    GridSpec::square(c, 1.25 * reach + 0.5, n, 0.0)
}

pub fn separation_criterion(scan: &SeparationScan) -> CriterionResult {
    let id = CriterionId::Separation;
    let (status, hyp, caveat) = match scan.outcome {
        SeparationOutcome::CriticalPointInFatou => {
            (Status::Inapplicable, None, "the critical point is not a Julia-set candidate")
        }
        SeparationOutcome::Undecided => (Status::Undecided, Some(Hypothesis::Undecided), "separation undecided"),
        SeparationOutcome::Separated => (
            Status::Undecided,
            Some(Hypothesis::Holds),
            "Fatou candidates separate c from the postcritical sample at this resolution; a hypothesis, not evidence",
        ),
        SeparationOutcome::NotSeparatedAtThisResolution => (
            Status::Inapplicable,
            Some(Hypothesis::Fails),
            "c connects to the postcritical sample through unresolved nodes at this resolution",
        ),
    };
    let mut r = CriterionResult::new(id, status, format!("{caveat}; {}", scan.note))
        .evidence("fatou_nodes", scan.fatou_nodes as f64)
        .evidence("reached_nodes", scan.reached_nodes as f64)
        .evidence("reached_postcritical", scan.reached_postcritical as f64)
        .evidence("cycles", scan.cycles.len() as f64)
        .threshold("budget", scan.budget as f64)
        .threshold("nx", scan.grid.nx as f64)
        .threshold("ny", scan.grid.ny as f64);
    r.hypothesis = hyp;
    r
}

/// Slope of `log2(area)` per box-count level.
pub fn area_slope(pc: &PostcriticalSample) -> f64 {
    let logs: Vec<f64> = pc.box_counts.iter().map(|b| b.area.log2()).collect();
    if logs.iter().all(|l| *l == f64::NEG_INFINITY) {
        return f64::NEG_INFINITY;
    }
    fit_slope(&logs)
}

/// Measure-zero evidence for `P_c` from the decay of box-count areas.
pub fn pc_area_check(pc: &PostcriticalSample, t: &Thresholds) -> (CriterionResult, Hypothesis) {
    let id = CriterionId::PcArea;
    let th = |r: CriterionResult| {
        r.threshold("area_zero_slope", t.area_zero_slope).threshold("area_positive_slope", t.area_positive_slope)
    };
    if !pc.bounded {
        let r = th(CriterionResult::new(id, Status::Inapplicable, "postcritical sample is unbounded"));
        return (r.hypothesis(Hypothesis::Undecided), Hypothesis::Undecided);
    }
    let slope = if pc.diameter == 0.0 { f64::NEG_INFINITY } else { area_slope(pc) };
    let h = if slope <= t.area_zero_slope {
        Hypothesis::Holds
    } else if slope >= t.area_positive_slope {
        Hypothesis::Fails
    } else {
        Hypothesis::Undecided
    };
    let mut r = CriterionResult::new(
        id,
        Status::Undecided,
        "box counts of a finite orbit sample; area decay is evidence of measure zero, not proof",
    )
    .hypothesis(h)
    .evidence("log2_area_slope", slope)
    .evidence("diameter", pc.diameter);
    if let Some(b) = pc.box_counts.last() {
        r = r.evidence("finest_area", b.area);
    }
    (th(r), h)
}

/// Both bounded-spectrum criteria from spectrum and scan data.
pub fn bounded_spectrum_checks(
    s: &Spectrum,
    pc: &PostcriticalSample,
    separation: &SeparationScan,
    area: Hypothesis,
    t: &Thresholds,
) -> [CriterionResult; 2] {
    let ids = [CriterionId::BoundedThm1, CriterionId::BoundedThm2];
    let th = |r: CriterionResult| {
        r.threshold("bounded_factor", t.bounded_factor).threshold("convergence_tol", t.convergence_tol)
    };
    let all = |status, caveat: &str| ids.map(|id| th(CriterionResult::new(id, status, caveat)));
    if s.degenerate {
        return all(Status::Inapplicable, "spectrum is degenerate");
    }
    if separation.outcome == SeparationOutcome::CriticalPointInFatou {
        return all(Status::Inapplicable, "the critical point is not a Julia-set candidate");
    }
    if !pc.bounded || !bounded_proxy(s, t) {
        return all(Status::Inapplicable, "sigma is not bounded or P_c is unbounded on this horizon");
    }
    let sep = match separation.outcome {
        SeparationOutcome::Separated => Hypothesis::Holds,
        SeparationOutcome::NotSeparatedAtThisResolution => Hypothesis::Fails,
        _ => Hypothesis::Undecided,
    };
    let conv = if convergent_proxy(s, t) { Hypothesis::Holds } else { Hypothesis::Fails };
    let judge = |id, extra: Hypothesis, what: &str| {
        let (status, caveat) = match (sep, extra) {
            (Hypothesis::Holds, Hypothesis::Holds) => {
                (Status::InstabilityEvidence, format!("bounded sigma, separation and {what} all observed"))
            }
            (Hypothesis::Fails, _) => (Status::Inapplicable, "separation fails at this resolution".to_string()),
            (_, Hypothesis::Fails) => (Status::Inapplicable, format!("{what} not observed")),
            _ => (Status::Undecided, format!("separation or {what} undecided")),
        };
        th(CriterionResult::new(id, status, caveat))
    };
    [judge(ids[0], area, "measure-zero P_c"), judge(ids[1], conv, "convergent sigma")]
}

/// `true` when some fixed point of `R` lies outside the postcritical sample.
pub fn fixed_point_precondition(r: &RationalMap, pc: &PostcriticalSample, t: &Thresholds) -> crate::Result<bool> {
    Ok(r.fixed_points()?.iter().any(|f| match f.point.as_finite() {
        Some(z) => !pc.points.iter().any(|p| (p - z).norm() <= t.fixed_point_tol),
        None => true,
    }))
}
