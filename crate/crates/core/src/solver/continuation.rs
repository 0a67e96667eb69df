use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::model::{GEpsilonParams, ModelParams, SystemMap};
use crate::scalar::Real;
use crate::solver::newton::{newton_solve, NewtonConfig};

/// Which parameter is varied along a path.
#[derive(Clone, Debug, PartialEq)]
pub enum PathFamily<T: Real> {
    /// `F(·, σ)` with σ moving; the σ in `params` is ignored.
    Sigma(ModelParams<T>),
    /// `G_ε(·, t)` with t moving; the t in `params` is ignored.
    Homotopy(GEpsilonParams<T>),
    /// `F(·, σ)` at fixed σ with λ moving.
    Lambda(ModelParams<T>),
}

impl<T: Real> PathFamily<T> {
    pub fn map_at(&self, s: T) -> Result<SystemMap<T>> {
        Ok(match self {
            PathFamily::Sigma(p) => SystemMap::Higgs(p.at_sigma(s)?),
            PathFamily::Homotopy(gp) => SystemMap::Reduced(GEpsilonParams::new(gp.base.clone(), gp.epsilon, s)?),
            PathFamily::Lambda(p) => SystemMap::Higgs(p.at_lambda(s)?),
        })
    }
}

/// Natural-parameter continuation from `from` to `to` in `n_steps` nominal
/// steps, each corrected by Newton from the previous solution.
///
/// A failed corrector halves the step; once the step drops below 10⁻⁴ of the
/// parameter range the path stops with `TurningPoint`.
pub fn continuation_path<T: Real>(
    g: &Graph<T>,
    family: &PathFamily<T>,
    from: T,
    to: T,
    u_start: &VertexFunction<T>,
    n_steps: usize,
    cfg: &NewtonConfig<T>,
) -> Result<Vec<(T, VertexFunction<T>)>> {
    let range = to - from;
    let min_step = range.abs() * T::lit(1e-4);
    let nominal = range / T::from_usize_lossy(n_steps.max(1));

    let start = newton_solve(g, &family.map_at(from)?, u_start, cfg)?
        .converged()
        .ok_or_else(|| Error::NonConvergence {
            reason: format!("starting point does not solve the family at {from}"),
        })?;
    let mut path = vec![(from, start.u)];
    let mut at = from;
    let mut h = nominal;
    while at != to {
        let mut next = at + h;
        if (range > T::zero() && next > to) || (range < T::zero() && next < to) {
            next = to;
        }
        let seed = &path.last().expect("path is never empty").1;
        match newton_solve(g, &family.map_at(next)?, seed, cfg)?.converged() {
            Some(c) => {
                path.push((next, c.u));
                at = next;
                if h.abs() < nominal.abs() {
                    h *= T::lit(2.0);
                    if h.abs() > nominal.abs() {
                        h = nominal;
                    }
                }
            }
            None => {
                h /= T::lit(2.0);
                if h.abs() < min_step {
                    return Err(Error::TurningPoint { last_param: at.as_f64() });
                }
            }
        }
    }
    Ok(path)
}
