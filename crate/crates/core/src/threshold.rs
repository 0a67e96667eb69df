//! Critical couplings Λ* (f̄ > 0) and Λ_* (f̄ < 0): the closed-form bound,
//! bisection on numerical solvability and λ-sweeps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::model::{map_certificate, ModelParams, SystemMap};
use crate::scalar::Real;
use crate::solver::{multi_start_solve, MultiStartConfig, SolutionSet};

/// Solutions found at one coupling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint<T: Real> {
    pub lambda: T,
    pub solutions: SolutionSet<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport<T: Real> {
    /// Unsolvable end of the bracket for f̄ > 0, solvable end for f̄ < 0.
    pub bracket_lo: T,
    pub bracket_hi: T,
    /// `(2p+2)^{2p+2}/(2p+1)^{2p+1} · f̄`.
    pub lower_bound: T,
    /// Every coupling probed, ascending in λ.
    pub probes: Vec<SweepPoint<T>>,
    pub n_starts_used: usize,
}

impl<T: Real> ThresholdReport<T> {
    pub fn width(&self) -> T {
        self.bracket_hi - self.bracket_lo
    }

    /// `(λ, count)` for every probe.
    pub fn counts(&self) -> Vec<(T, usize)> {
        self.probes.iter().map(|p| (p.lambda, p.solutions.len())).collect()
    }
}

fn probe<T: Real>(g: &Graph<T>, params: &ModelParams<T>, cfg: &MultiStartConfig<T>) -> Result<SolutionSet<T>> {
    let map = SystemMap::Higgs(params.clone());
    let region = map_certificate(g, &map)?;
    multi_start_solve(g, &map, &region, cfg)
}

/// Whether multi-start finds a zero of `F(·, σ)`. A `true` is certified by
/// the Newton residual; a `false` only means none was found.
pub fn is_solvable<T: Real>(g: &Graph<T>, params: &ModelParams<T>, cfg: &MultiStartConfig<T>) -> Result<bool> {
    Ok(!probe(g, params, cfg)?.is_empty())
}

/// `(2p+2)^{2p+2}/(2p+1)^{2p+1} · f̄`: a lower bound for Λ* when f̄ > 0 and
/// an upper bound for Λ_* when f̄ < 0.
pub fn lambda_star_lower_bound<T: Real>(f_mean: T, p: u32) -> Result<T> {
    if f_mean == T::zero() || !f_mean.finite() {
        return Err(Error::SignMismatch {
            reason: format!("the mean of f must be nonzero and finite, got {f_mean}"),
        });
    }
    let q = 2 * p as i32 + 1;
    let qf = T::from_usize_lossy(q as usize);
    let factor = (qf + T::one()).powi(q + 1) / qf.powi(q);
    Ok(factor * f_mean)
}

/// Brackets the critical coupling by bisection on [`is_solvable`].
///
/// The search runs on |λ| with λ of the sign of f̄. It starts from
/// `[bound · (1 − 10⁻⁶), hi]` where `hi` is `hi_seed` (default twice the
/// bound) doubled until solvable, at most 2¹⁰ times the bound.
pub fn lambda_star_bisect<T: Real>(
    g: &Graph<T>,
    f: &VertexFunction<T>,
    p: u32,
    hi_seed: Option<T>,
    tol: T,
    cfg: &MultiStartConfig<T>,
) -> Result<ThresholdReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("{tol} must be positive"),
        });
    }
    let fbar = g.mean(f)?;
    let bound = lambda_star_lower_bound(fbar, p)?;
    let sign = if fbar > T::zero() { T::one() } else { -T::one() };
    let base = ModelParams::new(sign, p, f.clone())?;
    let mut probes = Vec::new();
    let solvable_at = |nu: T, probes: &mut Vec<SweepPoint<T>>| -> Result<bool> {
        let lambda = sign * nu;
        let set = probe(g, &base.at_lambda(lambda)?, cfg)?;
        let found = !set.is_empty();
        probes.push(SweepPoint { lambda, solutions: set });
        Ok(found)
    };

    let magnitude = bound.abs();
    let mut lo = magnitude * (T::one() - T::lit(1e-6));
    if solvable_at(lo, &mut probes)? {
        return Err(Error::HypothesisViolated {
            reason: format!("solution found at |lambda| = {lo}, below the lower bound {magnitude}"),
        });
    }
    let cap = magnitude * T::lit(1024.0);
    let mut hi = hi_seed.map(|h| h.abs()).unwrap_or(magnitude * T::lit(2.0)).max(lo);
    while !solvable_at(hi, &mut probes)? {
        lo = lo.max(hi);
        hi *= T::lit(2.0);
        if hi > cap {
            return Err(Error::NoSolvableSeed { cap: (sign * cap).as_f64() });
        }
    }
    while hi - lo > tol {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if solvable_at(mid, &mut probes)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    probes.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite couplings"));
    let (bracket_lo, bracket_hi) = if sign > T::zero() { (lo, hi) } else { (-hi, -lo) };
    Ok(ThresholdReport {
        bracket_lo,
        bracket_hi,
        lower_bound: bound,
        probes,
        n_starts_used: cfg.n_starts,
    })
}

/// Solutions at every λ of `grid`, in grid order.
pub fn sweep_lambda<T: Real>(
    g: &Graph<T>,
    f: &VertexFunction<T>,
    p: u32,
    grid: &[T],
    cfg: &MultiStartConfig<T>,
) -> Result<Vec<SweepPoint<T>>> {
    grid.iter()
        .map(|&lambda| {
            let params = ModelParams::new(lambda, p, f.clone())?;
            Ok(SweepPoint {
                lambda,
                solutions: probe(g, &params, cfg)?,
            })
        })
        .collect()
}
