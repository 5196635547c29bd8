use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Atoms closer than this are merged.
pub const MERGE_RADIUS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub z: Complex64,
    pub w: Complex64,
}

/// Finitely many complex-weighted point masses at finite locations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    tv: f64,
    mass: Complex64,
    /// Bound on the total variation of the truncated tail (zero when exact).
    tail_bound: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureJson {
    atoms: Vec<Atom>,
    tv: f64,
    mass: Complex64,
}

impl TryFrom<MeasureJson> for AtomicMeasure {
    type Error = Error;
    fn try_from(j: MeasureJson) -> Result<Self> {
        let mut b = MeasureBuilder::new();
        for a in j.atoms {
            if !(a.z.re.is_finite() && a.z.im.is_finite()) {
                return Err(Error::Parse(format!("atom location {} is not finite", a.z)));
            }
            b.add(a.z, a.w);
        }
        Ok(b.finish(0.0))
    }
}

impl From<AtomicMeasure> for MeasureJson {
    fn from(m: AtomicMeasure) -> Self {
        MeasureJson { atoms: m.atoms, tv: m.tv, mass: m.mass }
    }
}

/// Accumulates atoms, merging coincident locations through a hash grid.
#[derive(Debug, Default)]
pub struct MeasureBuilder {
    atoms: Vec<Atom>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    last: Option<usize>,
}

fn cell(z: Complex64) -> (i64, i64) {
    ((z.re / MERGE_RADIUS).floor() as i64, (z.im / MERGE_RADIUS).floor() as i64)
}

impl MeasureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of the atom at `z`, creating it if needed.
    pub fn index_of(&mut self, z: Complex64) -> usize {
        if let Some(i) = self.last {
            if self.atoms[i].z == z {
                return i;
            }
        }
        let (cx, cy) = cell(z);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = self.grid.get(&(cx + dx, cy + dy)) {
                    if let Some(&i) = list.iter().find(|&&i| (self.atoms[i].z - z).norm() <= MERGE_RADIUS) {
                        self.last = Some(i);
                        return i;
                    }
                }
            }
        }
        let i = self.atoms.len();
        self.atoms.push(Atom { z, w: Complex64::new(0.0, 0.0) });
        self.grid.entry((cx, cy)).or_default().push(i);
        self.last = Some(i);
        i
    }

    pub fn add(&mut self, z: Complex64, w: Complex64) {
        let i = self.index_of(z);
        self.atoms[i].w += w;
    }

    pub fn add_at(&mut self, index: usize, w: Complex64) {
        self.atoms[index].w += w;
    }

    /// Finalizes the measure, dropping atoms whose weight is exactly zero.
    pub fn finish(self, tail_bound: f64) -> AtomicMeasure {
        let atoms: Vec<Atom> = self.atoms.into_iter().filter(|a| a.w != Complex64::new(0.0, 0.0)).collect();
        AtomicMeasure::from_merged(atoms, tail_bound)
    }
}

impl AtomicMeasure {
    fn from_merged(atoms: Vec<Atom>, tail_bound: f64) -> Self {
        let tv = atoms.iter().map(|a| a.w.norm()).sum();
        let mass = atoms.iter().map(|a| a.w).sum();
        AtomicMeasure { atoms, tv, mass, tail_bound }
    }

    pub fn zero() -> Self {
        Self::from_merged(Vec::new(), 0.0)
    }

    /// Builds a measure from `(location, weight)` pairs, merging coincident atoms.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (Complex64, Complex64)>) -> Result<Self> {
        let mut b = MeasureBuilder::new();
        for (z, w) in atoms {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Precondition(format!("atom location {z} is not finite")));
            }
            b.add(z, w);
        }
        Ok(b.finish(0.0))
    }

    pub fn dirac(z: Complex64, w: Complex64) -> Self {
        Self::from_merged(vec![Atom { z, w }], 0.0)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_variation(&self) -> f64 {
        self.tv
    }

    pub fn mass(&self) -> Complex64 {
        self.mass
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn is_zero(&self) -> bool {
        self.tv == 0.0
    }

    /// `c · μ`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { z: a.z, w: a.w * c }).collect();
        Self::from_merged(atoms, self.tail_bound * c.norm())
    }

    /// `μ / TV(μ)`.
    pub fn normalized(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ProjectiveUndefined);
        }
        Ok(self.scaled(Complex64::new(1.0 / self.tv, 0.0)))
    }

    /// Distance from `z` to the nearest atom (`+inf` for the zero measure).
    pub fn distance_to_support(&self, z: Complex64) -> f64 {
        self.atoms.iter().map(|a| (a.z - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// `Σ w_i f(z_i)`; errors when `f` is not finite at an atom.
    pub fn pair(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let v = f(a.z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::KernelPole(a.z));
            }
            s += a.w * v;
        }
        Ok(s)
    }

    /// CSV with columns `z_re, z_im, w_re, w_im`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["z_re", "z_im", "w_re", "w_im"])?;
        for a in &self.atoms {
            out.write_record([a.z.re, a.z.im, a.w.re, a.w.im].map(|x| format!("{x:e}")))?;
        }
        out.flush()?;
        Ok(())
    }
}
