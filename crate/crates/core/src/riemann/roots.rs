//! All-roots solver: Aberth-Ehrlich simultaneous iteration with seeded random restarts,
//! followed by multiplicity detection through root clustering.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::Poly;
use crate::error::{Error, Result};

const MAX_ITER: usize = 600;
const RESTARTS: usize = 6;
const RESTART_SEED: u64 = 0x5eed_ab3f;
/// Relative residual accepted for a converged root.
const ACCEPT_RESIDUAL: f64 = 1e-10;
/// Candidate groups for multiple roots are looked for within this relative radius.
const WIDE_CLUSTER: f64 = 1e-3;

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCluster {
    pub z: Complex64,
    pub multiplicity: usize,
}

/// Finds all roots of `p` (with multiplicity), grouping coincident roots.
///
/// `tol` is the step tolerance of the iteration; roots closer than `10 * tol`
/// (relative) are always merged. Wider clusters are merged only when the local
/// Taylor expansion confirms a multiple root.
pub fn find_roots(p: &Poly, tol: f64) -> Result<Vec<RootCluster>> {
    let raw = raw_roots(p, tol)?;
    Ok(cluster(p, &raw, tol))
}

/// Roots with multiplicity, as a flat list of `deg p` values.
pub fn raw_roots(p: &Poly, tol: f64) -> Result<Vec<Complex64>> {
    let Some(deg) = p.degree() else {
        return Err(Error::InvalidMap("zero polynomial has no isolated roots".into()));
    };
    let coeffs = p.coeffs();
    // exact zero roots
    let zeros = coeffs.iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count();
    let reduced = Poly::new(coeffs[zeros..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    match deg - zeros {
        0 => {}
        1 => {
            let c = reduced.coeffs();
            roots.push(-c[0] / c[1]);
        }
        2 => roots.extend(quadratic(reduced.coeffs())),
        _ => roots.extend(aberth(&reduced, tol)?),
    }
    Ok(roots)
}

/// Numerically stable quadratic formula.
fn quadratic(c: &[Complex64]) -> [Complex64; 2] {
    let (a, b, cc) = (c[2], c[1], c[0]);
    let disc = (b * b - 4.0 * a * cc).sqrt();
    // choose the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q == Complex64::new(0.0, 0.0) {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, cc / q]
}

fn relative_residual(p: &Poly, z: Complex64) -> f64 {
    let scale = p.abs_scale(z);
    if scale == 0.0 {
        return 0.0;
    }
    p.eval(z).norm() / scale
}

fn aberth(p: &Poly, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree().expect("nonzero polynomial");
    let lead = p.leading();
    let monic = p.scale(lead.inv());
    let c = monic.coeffs();
    // Fujiwara-type radius bound for the initial circle
    let radius = (1..=n)
        .map(|j| c[n - j].norm().powf(1.0 / j as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let mut worst = f64::INFINITY;
    for attempt in 0..=RESTARTS {
        let (phase, r) = if attempt == 0 {
            (0.4, radius)
        } else {
            (rng.gen::<f64>() * TAU, radius * (0.5 + rng.gen::<f64>()))
        };
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(r, phase + TAU * k as f64 / n as f64))
            .collect();
        iterate(&monic, &mut z, tol);
        worst = z
            .iter()
            .map(|&zi| relative_residual(&monic, zi))
            .fold(0.0, f64::max);
        if worst <= ACCEPT_RESIDUAL && z.iter().all(|zi| zi.re.is_finite() && zi.im.is_finite()) {
            return Ok(z);
        }
    }
    Err(Error::RootFinding { worst_residual: worst, restarts: RESTARTS })
}

fn iterate(p: &Poly, z: &mut [Complex64], tol: f64) {
    let n = z.len();
    let eps = 8.0 * f64::EPSILON;
    for _ in 0..MAX_ITER {
        let mut done = true;
        for i in 0..n {
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() <= eps * p.abs_scale(z[i]) {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[i] -= w;
            if w.norm() > tol * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
}

/// Groups raw roots into clusters with multiplicities.
pub fn cluster(p: &Poly, raw: &[Complex64], tol: f64) -> Vec<RootCluster> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1.0 + raw[i].norm().max(raw[j].norm());
            if (raw[i] - raw[j]).norm() <= WIDE_CLUSTER * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of_root = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of_root[r]].push(i);
    }

    let mut out = Vec::new();
    for g in groups {
        if g.len() == 1 || is_multiple_root(p, raw, &g, tol) {
            let centroid = g.iter().map(|&i| raw[i]).sum::<Complex64>() / g.len() as f64;
            out.push(RootCluster { z: centroid, multiplicity: g.len() });
        } else {
            // distinct but close roots: only exact-radius merging applies
            out.extend(tight_clusters(raw, &g, tol));
        }
    }
    out
}

fn tight_clusters(raw: &[Complex64], group: &[usize], tol: f64) -> Vec<RootCluster> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &i in group {
        let z = raw[i];
        match out
            .iter_mut()
            .find(|(c, _)| (*c - z).norm() <= 10.0 * tol * (1.0 + z.norm()))
        {
            Some((c, m)) => {
                *c = (*c * *m as f64 + z) / (*m as f64 + 1.0);
                *m += 1;
            }
            None => out.push((z, 1)),
        }
    }
    out.into_iter()
        .map(|(z, multiplicity)| RootCluster { z, multiplicity })
        .collect()
}

/// A group of `k` numerical roots is a genuine `k`-fold root when its spread is
/// compatible with the perturbation radius `(eps * scale / |c_k|)^(1/k)` of the
/// local Taylor expansion at the centroid.
fn is_multiple_root(p: &Poly, raw: &[Complex64], group: &[usize], tol: f64) -> bool {
    let k = group.len();
    let m = group.iter().map(|&i| raw[i]).sum::<Complex64>() / k as f64;
    let spread = group.iter().map(|&i| (raw[i] - m).norm()).fold(0.0, f64::max);
    if spread <= 10.0 * tol * (1.0 + m.norm()) {
        return true;
    }
    let taylor = p.taylor_shift(m);
    let Some(ck) = taylor.get(k) else { return false };
    if ck.norm() == 0.0 {
        return false;
    }
    let eps = 64.0 * f64::EPSILON * p.abs_scale(m);
    let noise_radius = (eps / ck.norm()).powf(1.0 / k as f64);
    spread <= 10.0 * noise_radius
}
