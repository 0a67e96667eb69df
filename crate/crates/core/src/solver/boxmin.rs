//! Local minimizers of J_λ trapped between a sub- and a super-solution.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::model::{barrier_check, functional_j, gradient_j, ModelParams, SystemMap};
use crate::scalar::Real;
use crate::solver::newton::{newton_solve, NewtonConfig};
use crate::solver::poisson::solve_poisson_meanzero;
use crate::spectral;

/// A box `lower ≤ u ≤ upper` whose faces are barriers for the equation.
#[derive(Clone, Debug, PartialEq)]
pub struct BarrierSpec<T: Real> {
    pub lower: VertexFunction<T>,
    pub upper: VertexFunction<T>,
    /// The barrier level A.
    pub level: T,
}

impl<T: Real> BarrierSpec<T> {
    pub fn new(lower: VertexFunction<T>, upper: VertexFunction<T>, level: T) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(Error::InvalidParameter {
                name: "barrier",
                reason: format!("lower face not below upper face at vertex index {i}"),
            });
        }
        Ok(Self { lower, upper, level })
    }

    fn project(&self, u: &DVector<T>) -> DVector<T> {
        DVector::from_fn(u.len(), |i, _| u[i].max(self.lower[i]).min(self.upper[i]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxConfig<T: Real> {
    pub max_iter: usize,
    /// Stationarity tolerance on ‖P(u − ∇J) − u‖∞.
    pub pg_tol: T,
    /// Required distance from both faces for an interior minimizer.
    pub interior_margin: T,
    pub newton: NewtonConfig<T>,
}

impl<T: Real> Default for BoxConfig<T> {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            pg_tol: T::lit(1e-11),
            interior_margin: T::lit(1e-6),
            newton: NewtonConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxMinimum<T: Real> {
    pub u: VertexFunction<T>,
    /// Distance > `interior_margin` from both faces. Always true for an `Ok`
    /// result; kept so callers can log it.
    pub interior: bool,
    pub residual_norm: T,
    pub energy: T,
    pub iterations: usize,
}

fn sup<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Local minimizer of the Hessian test: the conjugated Hessian
/// `L + diag(μ h′)` has no negative eigenvalue.
fn is_local_min<T: Real>(g: &Graph<T>, map: &SystemMap<T>, u: &DVector<T>) -> bool {
    match map.weighted_jacobian(g, u) {
        Ok(w) => {
            let s: Vec<T> = g.measure().iter().map(|mu| T::one() / mu.sqrt()).collect();
            let conj = nalgebra::DMatrix::from_fn(g.m(), g.m(), |i, j| s[i] * w[(i, j)] * s[j]);
            spectral::sorted_symmetric_eigen(conj)
                .map(|(v, _)| v[0] > -T::lit(1e-12))
                .unwrap_or(false)
        }
        Err(_) => false,
    }
}

fn distance_to_faces<T: Real>(spec: &BarrierSpec<T>, u: &DVector<T>) -> (T, usize) {
    (0..u.len())
        .map(|i| ((u[i] - spec.lower[i]).min(spec.upper[i] - u[i]), i))
        .fold((T::max_value().unwrap(), 0), |a, b| if b.0 < a.0 { b } else { a })
}

/// Minimizes J_λ over the box with spectral projected gradient and Armijo
/// backtracking, switching to Newton once no bound has been active for three
/// consecutive iterations. Returns `OnBoundary` when the minimizer sits on
/// a face.
pub fn minimize_box<T: Real>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    spec: &BarrierSpec<T>,
    cfg: &BoxConfig<T>,
) -> Result<BoxMinimum<T>> {
    if params.sigma != T::one() {
        return Err(Error::SigmaNotOne {
            sigma: params.sigma.as_f64(),
        });
    }
    g.check_len(spec.lower.len())?;
    let map = SystemMap::Higgs(params.clone());
    let energy = |u: &DVector<T>| functional_j(g, params, &VertexFunction::from_vector(u.clone()));
    let grad = |u: &DVector<T>| gradient_j(g, params, &VertexFunction::from_vector(u.clone())).map(|v| v.into_vector());

    // Start at the box center.
    let mut u = DVector::from_fn(g.m(), |i, _| (spec.lower[i] + spec.upper[i]) / T::lit(2.0));
    let mut j = energy(&u)?;
    let mut gr = grad(&u)?;
    let mut step = T::one() / sup(&gr).max(T::one());
    let mut free_streak = 0usize;
    let armijo = T::lit(1e-4);

    for it in 0..cfg.max_iter {
        let pg = &spec.project(&(&u - &gr)) - &u;
        if sup(&pg) <= cfg.pg_tol {
            return finish(g, params, &map, spec, cfg, u, it);
        }

        let active = (0..g.m()).any(|i| {
            (u[i] <= spec.lower[i] && gr[i] > T::zero()) || (u[i] >= spec.upper[i] && gr[i] < T::zero())
        });
        free_streak = if active { 0 } else { free_streak + 1 };
        if free_streak >= 3 {
            free_streak = 0;
            let u0 = VertexFunction::from_vector(u.clone());
            if let Some(c) = newton_solve(g, &map, &u0, &cfg.newton)?.converged() {
                let v = c.u.vector();
                let (d, _) = distance_to_faces(spec, v);
                if d > cfg.interior_margin && is_local_min(g, &map, v) && energy(v)? <= j + T::lit(1e-12) * (T::one() + j.abs()) {
                    return finish(g, params, &map, spec, cfg, v.clone(), it);
                }
            }
        }

        // Backtracking along the projection arc.
        let mut t = step;
        let (next, jn) = loop {
            let cand = spec.project(&(&u - &gr * t));
            let jc = energy(&cand)?;
            let decrease = gr.dot(&(&u - &cand));
            if jc <= j - armijo * decrease || t < T::lit(1e-16) {
                break (cand, jc);
            }
            t *= T::lit(0.5);
        };
        let gn = grad(&next)?;
        // Barzilai–Borwein step for the next iteration.
        let s = &next - &u;
        let y = &gn - &gr;
        let sy = s.dot(&y);
        step = if sy > T::zero() {
            (s.dot(&s) / sy).max(T::lit(1e-10)).min(T::lit(1e10))
        } else {
            (t * T::lit(2.0)).min(T::lit(1e10))
        };
        if s.iter().all(|x| *x == T::zero()) && sup(&pg) > cfg.pg_tol {
            return Err(Error::NonConvergence {
                reason: format!("projected gradient stalled at iteration {it}"),
            });
        }
        u = next;
        j = jn;
        gr = gn;
    }
    Err(Error::NonConvergence {
        reason: format!("projected gradient did not converge in {} iterations", cfg.max_iter),
    })
}

fn finish<T: Real>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    map: &SystemMap<T>,
    spec: &BarrierSpec<T>,
    cfg: &BoxConfig<T>,
    u: DVector<T>,
    iterations: usize,
) -> Result<BoxMinimum<T>> {
    let (d, index) = distance_to_faces(spec, &u);
    if d <= cfg.interior_margin {
        return Err(Error::OnBoundary { index });
    }
    let start = VertexFunction::from_vector(u);
    let polished = match newton_solve(g, map, &start, &cfg.newton)?.converged() {
        Some(c) if distance_to_faces(spec, c.u.vector()).0 > cfg.interior_margin && c.u.sup_distance(&start) < T::lit(1e-3) => c.u,
        _ => {
            return Err(Error::NonConvergence {
                reason: "Newton polish of the interior minimizer failed".into(),
            })
        }
    };
    let r = map.residual(g, &polished)?;
    Ok(BoxMinimum {
        energy: functional_j(g, params, &polished)?,
        residual_norm: r.sup_norm(),
        u: polished,
        interior: true,
        iterations,
    })
}

/// A solution at a smaller coupling of the same sign, used to build the
/// matching face `u_prev + ln(λ_prev/λ)`.
#[derive(Clone, Debug)]
pub struct WarmStart<'a, T: Real> {
    pub lambda: T,
    pub u: &'a VertexFunction<T>,
}

const LEVEL_STEP: f64 = 0.5;
const LEVEL_MAX: f64 = 200.0;

/// Builds the sub/super-solution box for `λ f̄ > 0`.
///
/// * λ > 0: lower face `ln ½` (or the warm face), upper face the smallest
///   A ∈ {1, 1.5, 2, …} with `L_λ A > 0` everywhere.
/// * λ < 0: upper face `ln ½` (or the warm face), lower face `φ − A` with
///   `Δφ = f − f̄`, `φ̄ = 0`, and the smallest such A for which
///   `λ e^{φ−A}(e^{φ−A} − 1)^{2p+1} + f̄ < 0` everywhere.
pub fn barrier_from_lemma<T: Real>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    warm: Option<WarmStart<'_, T>>,
) -> Result<BarrierSpec<T>> {
    g.check_len(params.f.len())?;
    let lambda = params.lambda;
    let fbar = g.mean(&params.f)?;
    let unavailable = |reason: String| Err(Error::BarrierUnavailable { reason });
    if !(lambda * fbar > T::zero()) {
        return unavailable(format!("requires lambda * mean(f) > 0, got lambda = {lambda}, mean(f) = {fbar}"));
    }
    let half = T::lit(0.5).ln();
    let m = g.m();

    let matching_face = match &warm {
        Some(w) => {
            g.check_len(w.u.len())?;
            let same_side = w.lambda * lambda > T::zero() && w.lambda.abs() < lambda.abs();
            if !same_side {
                return unavailable(format!(
                    "warm start needs |lambda_prev| < |lambda| with equal signs, got {} and {lambda}",
                    w.lambda
                ));
            }
            let shift = (w.lambda / lambda).ln();
            Some(w.u.map(|v| v + shift))
        }
        None => None,
    };

    let levels = (0..)
        .map(|k| T::one() + T::lit(LEVEL_STEP) * T::from_usize_lossy(k))
        .take_while(|a| *a <= T::lit(LEVEL_MAX));

    if lambda > T::zero() {
        let lower = match matching_face {
            Some(face) => face,
            None => {
                let at_half = barrier_check(params, half);
                if let Some(i) = (0..m).find(|&i| !(at_half[i] < T::zero())) {
                    return unavailable(format!(
                        "L(ln 1/2) = {} >= 0 at vertex {}; need lambda > 2^(2p+2) max f",
                        at_half[i],
                        g.ids()[i]
                    ));
                }
                g.constant(half)
            }
        };
        let top = lower.max();
        for a in levels {
            if a <= top {
                continue;
            }
            if barrier_check(params, a).iter().all(|v| *v > T::zero()) {
                return BarrierSpec::new(lower, g.constant(a), a);
            }
        }
        unavailable(format!("no super-solution level A <= {LEVEL_MAX}"))
    } else {
        let upper = match matching_face {
            Some(face) => face,
            None => {
                let at_half = barrier_check(params, half);
                if let Some(i) = (0..m).find(|&i| !(at_half[i] > T::zero())) {
                    return unavailable(format!(
                        "L(ln 1/2) = {} <= 0 at vertex {}; need lambda < 2^(2p+2) min f",
                        at_half[i],
                        g.ids()[i]
                    ));
                }
                g.constant(half)
            }
        };
        let phi = solve_poisson_meanzero(g, &params.f)?;
        for a in levels {
            let face = phi.map(|v| v - a);
            let below = (0..m).all(|i| face[i] < upper[i]);
            let barrier = (0..m).all(|i| {
                let s = face[i].exp();
                lambda * s * (s - T::one()).powi(params.odd_power()) + fbar < T::zero()
            });
            if below && barrier {
                return BarrierSpec::new(face, upper, a);
            }
        }
        unavailable(format!("no sub-solution level A <= {LEVEL_MAX}"))
    }
}
