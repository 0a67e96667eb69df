use serde::Serialize;

use crate::error::Result;
use crate::graph::{Graph, VertexFunction};
use crate::model::{AprioriCertificate, SystemMap};
use crate::scalar::Real;
use crate::solver::newton::{newton_solve, NewtonConfig};
use crate::solver::sampling::scrambled_halton;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiStartConfig<T: Real> {
    pub n_starts: usize,
    /// Solutions closer than this in sup-norm are merged.
    pub dedup_tol: T,
    pub seed: u64,
    pub newton: NewtonConfig<T>,
}

impl<T: Real> Default for MultiStartConfig<T> {
    fn default() -> Self {
        Self {
            n_starts: 256,
            dedup_tol: T::lit(1e-6),
            seed: 0,
            newton: NewtonConfig::default(),
        }
    }
}

impl<T: Real> MultiStartConfig<T> {
    pub fn with_starts(n_starts: usize) -> Self {
        Self {
            n_starts,
            ..Self::default()
        }
    }
}

/// Distinct zeros found by [`multi_start_solve`], sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionSet<T: Real> {
    #[serde(serialize_with = "serialize_functions")]
    pub solutions: Vec<VertexFunction<T>>,
    pub residual_norms: Vec<T>,
    /// Sign of the Jacobian determinant per solution, 0 when singular.
    pub jacobian_signs: Vec<i32>,
    pub dedup_tol: T,
}

fn serialize_functions<T: Real, S: serde::Serializer>(v: &[VertexFunction<T>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for f in v {
        seq.serialize_element(&f.to_vec())?;
    }
    seq.end()
}

impl<T: Real> SolutionSet<T> {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Σ of the Jacobian signs, `None` if any solution is singular.
    pub fn signed_count(&self) -> Option<i32> {
        if self.jacobian_signs.contains(&0) {
            None
        } else {
            Some(self.jacobian_signs.iter().sum())
        }
    }
}

/// Structural seeds: constants at the roots of the scalar reduction with the
/// mean source, and every combination of per-vertex branch levels.
///
/// Zeros on small graphs are well separated by which monotone branch of the
/// local map `u ↦ N(u) + f(x)` each vertex sits on: a pointwise root, the
/// extremum of `s(s − σ)^{2p+1}`, or the far-left regime where the
/// nonlinearity is negligible and the equation is linear.
fn structural_seeds<T: Real>(g: &Graph<T>, map: &SystemMap<T>) -> Result<Vec<Vec<T>>> {
    let f = map.effective_source();
    let m = g.m();
    let mut seeds = Vec::new();
    let fbar = g.mean(&f)?;
    for r in map.pointwise_roots(fbar) {
        seeds.push(vec![r; m]);
    }
    let sigma = map.sigma();
    if m == 1 || sigma <= T::zero() {
        return Ok(seeds);
    }
    let k = T::from_usize_lossy(2 * map.p() as usize + 2);
    let bottom = (sigma / k).ln();
    let choices: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut v = map.pointwise_roots(f[i]);
            v.extend(map.pointwise_roots(fbar));
            v.push(bottom);
            v.push(bottom - T::lit(LOW_OFFSET));
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v.dedup_by(|a, b| (*a - *b).abs() < T::lit(1e-3));
            v
        })
        .collect();
    let total: usize = choices.iter().map(Vec::len).product();
    if total > MAX_COMBOS {
        return Ok(seeds);
    }
    let mut combos: Vec<Vec<T>> = vec![Vec::new()];
    for c in &choices {
        let mut next = Vec::with_capacity(combos.len() * c.len());
        for prefix in &combos {
            for &v in c {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        combos = next;
    }
    seeds.extend(combos);
    Ok(seeds)
}

/// Distance below the extremum used as the far-left level.
const LOW_OFFSET: f64 = 4.0;
/// Branch combinations are skipped beyond this many.
const MAX_COMBOS: usize = 4096;

/// Low-discrepancy seeds in nested slabs `[upper − W, upper]` of the box with
/// widths doubling from 2 until the whole box is covered, so that the region
/// near the top of the box, where the nonlinearity is active, is sampled at
/// every scale.
fn box_seeds<T: Real>(m: usize, region: &AprioriCertificate<T>, n: usize, seed: u64) -> Vec<Vec<T>> {
    let upper = region.upper.as_f64();
    let full = (upper - region.lower.as_f64()).max(1e-3);
    let mut widths = Vec::new();
    let mut w = 2.0;
    while w < full {
        widths.push(w);
        w *= 2.0;
    }
    widths.push(full);
    scrambled_halton(n, m, seed)
        .into_iter()
        .enumerate()
        .map(|(k, point)| {
            let width = widths[k % widths.len()];
            point.into_iter().map(|h| T::lit(upper - width * h)).collect()
        })
        .collect()
}

/// Runs Newton from structural seeds plus `cfg.n_starts` scrambled
/// low-discrepancy seeds over `region`, keeps converged runs and merges
/// duplicates. Completeness is heuristic.
pub fn multi_start_solve<T: Real>(
    g: &Graph<T>,
    map: &SystemMap<T>,
    region: &AprioriCertificate<T>,
    cfg: &MultiStartConfig<T>,
) -> Result<SolutionSet<T>> {
    g.check_len(map.effective_source().len())?;
    let mut seeds = structural_seeds(g, map)?;
    seeds.extend(box_seeds(g.m(), region, cfg.n_starts, cfg.seed));

    let mut found: Vec<(VertexFunction<T>, T)> = Vec::new();
    for s in seeds {
        let u0 = VertexFunction::from_vector(nalgebra::DVector::from_vec(s));
        if let Some(c) = newton_solve(g, map, &u0, &cfg.newton)?.converged() {
            found.push((c.u, c.residual_norm));
        }
    }
    dedup_solutions(g, map, found, cfg.dedup_tol)
}

/// Sorts, merges points within `dedup_tol` (keeping the smaller residual)
/// and attaches Jacobian signs.
pub fn dedup_solutions<T: Real>(
    g: &Graph<T>,
    map: &SystemMap<T>,
    mut found: Vec<(VertexFunction<T>, T)>,
    dedup_tol: T,
) -> Result<SolutionSet<T>> {
    found.sort_by(|a, b| {
        a.0.iter()
            .zip(b.0.iter())
            .map(|(x, y)| x.partial_cmp(y).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<(VertexFunction<T>, T)> = Vec::new();
    for (u, r) in found {
        match kept.iter_mut().find(|(k, _)| k.sup_distance(&u) <= dedup_tol) {
            Some(existing) => {
                if r < existing.1 {
                    *existing = (u, r);
                }
            }
            None => kept.push((u, r)),
        }
    }
    let mut set = SolutionSet {
        solutions: Vec::with_capacity(kept.len()),
        residual_norms: Vec::with_capacity(kept.len()),
        jacobian_signs: Vec::with_capacity(kept.len()),
        dedup_tol,
    };
    for (u, r) in kept {
        set.jacobian_signs.push(map.jacobian_det_sign(g, u.vector())?);
        set.solutions.push(u);
        set.residual_norms.push(r);
    }
    Ok(set)
}
