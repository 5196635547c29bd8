use std::io::Write;

use critorbit::diagnostics::{detect_attracting_cycles, escape_radius, orbit_fate, OrbitFate, Thresholds};
use critorbit::potential::GridSpec;
use critorbit::riemann::RationalMap;
use rayon::prelude::*;
use serde::Serialize;

/// Grayscale shading of a grid, stored top row first (`y = ymax`).
#[derive(Clone, Debug, Serialize)]
pub struct JuliaImage {
    pub width: usize,
    pub height: usize,
    /// Steps until escape or cycle capture per pixel; `None` when the orbit stayed unresolved.
    pub steps: Vec<Option<usize>>,
    pub pixels: Vec<u8>,
    pub method: &'static str,
    pub warning: Option<String>,
}

impl JuliaImage {
    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    /// Binary PGM (`P5`, maxval 255).
    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)
    }
}

/// Escape-time shading for polynomials, time to reach a detected attracting
/// cycle for other rational maps. Fast orbits are dark; pixels whose orbits stay
/// unresolved for `max_iter` steps are white.
pub fn render_julia(r: &RationalMap, grid: &GridSpec, max_iter: usize) -> critorbit::Result<JuliaImage> {
    grid.validate()?;
    let t = Thresholds::default();
    let polynomial = escape_radius(r).is_some();
    let cycles = if polynomial { Vec::new() } else { detect_attracting_cycles(r, max_iter.max(t.returns * t.max_period + 1), &t) };
    let warning = (!polynomial && cycles.is_empty())
        .then(|| "no attracting cycle detected within the budget; image is the unresolved mask".to_string());
    let (w, h) = (grid.nx, grid.ny);
    let steps: Vec<Option<usize>> = (0..w * h)
        .into_par_iter()
        .map(|k| {
            let (col, row) = (k % w, k / w);
            let z = grid.point(col, h - 1 - row);
            match orbit_fate(r, z, &cycles, max_iter, &t) {
                OrbitFate::Escaped { steps } | OrbitFate::Attracted { steps, .. } => Some(steps),
                OrbitFate::Unresolved => None,
            }
        })
        .collect();
    let scale = max_iter.max(1) as f64;
    let pixels = steps
        .iter()
        .map(|s| match s {
            Some(k) => (255.0 * *k as f64 / scale).round().min(255.0) as u8,
            None => 255,
        })
        .collect();
    Ok(JuliaImage {
        width: w,
        height: h,
        steps,
        pixels,
        method: if polynomial { "escape-time" } else { "cycle-convergence" },
        warning,
    })
}
