use nalgebra::DVector;

use crate::error::Result;
use crate::graph::{Graph, VertexFunction};
use crate::model::SystemMap;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonConfig<T: Real> {
    /// Stop once ‖residual‖∞ ≤ this.
    pub tol_residual: T,
    pub max_iter: usize,
    /// Backtracking factor β ∈ (0, 1).
    pub damping: T,
    /// Smallest step fraction tried before giving up.
    pub min_step: T,
    /// Extra full steps taken after convergence while the residual keeps
    /// dropping. Pins down slowly converging (degenerate) roots.
    pub polish_iter: usize,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        Self {
            tol_residual: T::lit(1e-10),
            max_iter: 100,
            damping: T::lit(0.5),
            min_step: T::lit(1e-12),
            polish_iter: 40,
        }
    }
}

impl<T: Real> NewtonConfig<T> {
    pub fn validate(&self) -> crate::error::Result<()> {
        use crate::error::Error;
        if !(self.tol_residual > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "tol_residual",
                reason: "must be positive".into(),
            });
        }
        if !(self.damping > T::zero() && self.damping < T::one()) {
            return Err(Error::InvalidParameter {
                name: "damping",
                reason: "must lie in (0, 1)".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    MaxIter,
    SingularJacobian,
    StepUnderflow,
    /// The starting point itself cannot be evaluated.
    Overflow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Converged<T: Real> {
    pub u: VertexFunction<T>,
    pub residual_norm: T,
    pub iterations: usize,
    /// ‖residual‖∞ at the start and after every accepted step up to
    /// convergence (polishing steps excluded).
    pub history: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure<T: Real> {
    pub last: VertexFunction<T>,
    pub residual_norm: T,
    pub iterations: usize,
    pub reason: FailureReason,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NewtonOutcome<T: Real> {
    Converged(Converged<T>),
    Failed(Failure<T>),
}

impl<T: Real> NewtonOutcome<T> {
    pub fn converged(self) -> Option<Converged<T>> {
        match self {
            NewtonOutcome::Converged(c) => Some(c),
            NewtonOutcome::Failed(_) => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, NewtonOutcome::Converged(_))
    }
}

fn sup<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Newton direction from the symmetric system `(L + diag(μ N′)) δ = −μ ⊙ r`,
/// which is `diag(μ)` times `J δ = −r`.
fn direction<T: Real>(g: &Graph<T>, map: &SystemMap<T>, u: &DVector<T>, r: &DVector<T>) -> Option<DVector<T>> {
    let w = map.weighted_jacobian(g, u).ok()?;
    let rhs = DVector::from_fn(g.m(), |i, _| -g.measure()[i] * r[i]);
    let d = w.lu().solve(&rhs)?;
    d.iter().all(|x| x.finite()).then_some(d)
}

/// Damped Newton iteration for `map(u) = 0` starting at `u0`.
///
/// Each step solves `J δ = −r` and backtracks by `cfg.damping` until the
/// squared residual satisfies an Armijo decrease. Failing runs return
/// [`NewtonOutcome::Failed`] with the last iterate; only malformed input is
/// an `Err`.
pub fn newton_solve<T: Real>(
    g: &Graph<T>,
    map: &SystemMap<T>,
    u0: &VertexFunction<T>,
    cfg: &NewtonConfig<T>,
) -> Result<NewtonOutcome<T>> {
    g.check_len(u0.len())?;
    g.check_len(map.effective_source().len())?;
    cfg.validate()?;
    let armijo = T::lit(1e-4);
    let mut u = u0.vector().clone();
    let fail = |u: DVector<T>, norm: T, iterations: usize, reason: FailureReason| {
        Ok(NewtonOutcome::Failed(Failure {
            last: VertexFunction::from_vector(u),
            residual_norm: norm,
            iterations,
            reason,
        }))
    };
    let mut r = match map.residual_vec(g, &u) {
        Ok(r) => r,
        Err(_) => return fail(u, T::max_value().unwrap(), 0, FailureReason::Overflow),
    };
    let mut history = vec![sup(&r)];

    let mut iterations = 0;
    while sup(&r) > cfg.tol_residual {
        if iterations == cfg.max_iter {
            let norm = sup(&r);
            return fail(u, norm, iterations, FailureReason::MaxIter);
        }
        iterations += 1;
        let Some(delta) = direction(g, map, &u, &r) else {
            let norm = sup(&r);
            return fail(u, norm, iterations, FailureReason::SingularJacobian);
        };
        let merit = r.norm_squared();
        let mut step = T::one();
        loop {
            let trial = &u + &delta * step;
            if let Ok(rt) = map.residual_vec(g, &trial) {
                if rt.norm_squared() <= (T::one() - T::lit(2.0) * armijo * step) * merit {
                    u = trial;
                    r = rt;
                    break;
                }
            }
            step *= cfg.damping;
            if step < cfg.min_step {
                let norm = sup(&r);
                return fail(u, norm, iterations, FailureReason::StepUnderflow);
            }
        }
        history.push(sup(&r));
    }

    let residual_norm = sup(&r);
    for _ in 0..cfg.polish_iter {
        let Some(delta) = direction(g, map, &u, &r) else { break };
        let trial = &u + &delta;
        let Ok(rt) = map.residual_vec(g, &trial) else { break };
        if rt.norm_squared() >= r.norm_squared() {
            break;
        }
        u = trial;
        r = rt;
    }
    let residual_norm = residual_norm.min(sup(&r));
    Ok(NewtonOutcome::Converged(Converged {
        u: VertexFunction::from_vector(u),
        residual_norm,
        iterations,
        history,
    }))
}
