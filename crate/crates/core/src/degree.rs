//! Brouwer degree of `F(·, 1)` on the a-priori ball.
//!
//! The degree is computed three ways: by summing Jacobian signs over the
//! enumerated zeros, by the closed-form sign table, and for a single vertex
//! by the boundary signs of the scalar map.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::model::{default_lambda_bound, higgs_term, map_certificate, GEpsilonParams, ModelParams, SystemMap};
use crate::scalar::{signum_i, Real};
use crate::solver::{multi_start_solve, MultiStartConfig, SolutionSet};
use crate::spectral;

/// Enumerated against closed-form degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport<T: Real> {
    /// Σ of Jacobian signs; `None` (JSON `null`) when some zero is singular.
    pub enumerated_degree: Option<i32>,
    pub theoretical_degree: i32,
    pub solutions_used: SolutionSet<T>,
    /// Enumerated equals theoretical. False when indeterminate.
    pub consistent: bool,
}

/// Sign of `det(−Δ + diag(N′(u)))` at a zero `u` of `map`.
pub fn jacobian_sign<T: Real>(g: &Graph<T>, map: &SystemMap<T>, u: &VertexFunction<T>, tol: T) -> Result<i32> {
    let r = map.residual(g, u)?.sup_norm();
    if r > tol {
        return Err(Error::ResidualTooLarge {
            residual: r.as_f64(),
            tol: tol.as_f64(),
        });
    }
    map.jacobian_det_sign(g, u.vector())
}

/// The sign table: 1 if λ > 0 > ∫f, 0 if λ∫f > 0, −1 if λ < 0 < ∫f.
pub fn degree_theoretical<T: Real>(lambda: T, f_integral: T) -> Result<i32> {
    let (a, b) = (signum_i(lambda), signum_i(f_integral));
    match (a, b) {
        (1, -1) => Ok(1),
        (-1, 1) => Ok(-1),
        (1, 1) | (-1, -1) => Ok(0),
        _ => Err(Error::HypothesisViolated {
            reason: format!("lambda * integral(f) must be nonzero (lambda = {lambda}, integral = {f_integral})"),
        }),
    }
}

fn check_hypothesis<T: Real>(g: &Graph<T>, params: &ModelParams<T>) -> Result<T> {
    let mass = g.integral(&params.f)?;
    degree_theoretical(params.lambda, mass)?;
    Ok(mass)
}

/// Enumerates the zeros of `F(·, σ)` inside the a-priori box and sums their
/// Jacobian signs.
pub fn degree_by_enumeration<T: Real>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    cfg: &MultiStartConfig<T>,
) -> Result<DegreeReport<T>> {
    enumerate_map(g, &SystemMap::Higgs(params.clone()), params, cfg)
}

fn enumerate_map<T: Real>(
    g: &Graph<T>,
    map: &SystemMap<T>,
    base: &ModelParams<T>,
    cfg: &MultiStartConfig<T>,
) -> Result<DegreeReport<T>> {
    let mass = check_hypothesis(g, base)?;
    let theoretical = degree_theoretical(base.lambda, mass)?;
    let region = map_certificate(g, map)?;
    let set = multi_start_solve(g, map, &region, cfg)?;
    let enumerated = set.signed_count();
    Ok(DegreeReport {
        enumerated_degree: enumerated,
        theoretical_degree: theoretical,
        consistent: enumerated == Some(theoretical),
        solutions_used: set,
    })
}

/// Degree of the reduced map `G_ε(·, t)`, which the sign table also
/// predicts.
pub fn degree_reduced<T: Real>(g: &Graph<T>, params: &GEpsilonParams<T>, cfg: &MultiStartConfig<T>) -> Result<DegreeReport<T>> {
    enumerate_map(g, &SystemMap::Reduced(params.clone()), &params.base, cfg)
}

/// One-vertex degree `(sgn F(R) − sgn F(−R)) / 2`.
///
/// `R` is raised past the a-priori box if needed, so every zero lies inside
/// `(−R, R)`.
pub fn degree_scalar_oracle<T: Real>(params: &ModelParams<T>, radius: T) -> Result<i32> {
    if params.f.len() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: params.f.len(),
        });
    }
    let g = crate::graph::families::single_vertex::<T>();
    let cert = crate::model::apriori_certificate(&g, params, None)?;
    let r = radius.max(cert.radius() + T::one());
    let f = params.f[0];
    let eval = |u: T| {
        let h = higgs_term(params.lambda, params.p, params.sigma, u);
        // Past the overflow point the nonlinearity dominates f.
        if h.finite() {
            h + f
        } else {
            params.lambda
        }
    };
    let (top, bottom) = (eval(r), eval(-r));
    for (v, at) in [(top, r), (bottom, -r)] {
        if v == T::zero() {
            return Err(Error::BoundaryZero { at: at.as_f64() });
        }
    }
    Ok((signum_i(top) - signum_i(bottom)) / 2)
}

/// The ε used for the reduced family: `min{10⁻², √(w₀λ₁/((m−1)|V|)) μ₀ / (8(p+1)Λ³)}`,
/// or 10⁻² on a single vertex.
pub fn default_epsilon<T: Real>(g: &Graph<T>, params: &ModelParams<T>) -> Result<T> {
    let cap = T::lit(1e-2);
    if g.m() == 1 {
        return Ok(cap);
    }
    let big = default_lambda_bound(g, params.lambda, &params.f)?;
    let w0 = g.min_weight().expect("connected graph with m > 1 has edges");
    let gap = spectral::poincare_constant(g)?;
    let m1 = T::from_usize_lossy(g.m() - 1);
    let p1 = T::from_usize_lossy(params.p as usize + 1);
    let e0 = (w0 * gap / (m1 * g.total_measure())).sqrt() * g.min_measure() / (T::lit(8.0) * p1 * big.powi(3));
    Ok(cap.min(e0))
}

/// Homotopy parameter samples for [`homotopy_degree_audit`].
#[derive(Clone, Debug, PartialEq)]
pub enum HomotopySamples<T: Real> {
    /// σ values for `F(·, σ)`.
    Sigma(Vec<T>),
    /// t values for `G_ε(·, t)`; ε defaults to [`default_epsilon`].
    Reduced { t: Vec<T>, epsilon: Option<T> },
}

/// Signed zero count at each homotopy sample, `None` where a zero is
/// singular. Regular paths must give equal counts.
pub fn homotopy_degree_audit<T: Real>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    samples: &HomotopySamples<T>,
    cfg: &MultiStartConfig<T>,
) -> Result<Vec<(T, Option<i32>)>> {
    check_hypothesis(g, params)?;
    let maps: Vec<(T, SystemMap<T>)> = match samples {
        HomotopySamples::Sigma(s) => s
            .iter()
            .map(|&sigma| Ok((sigma, SystemMap::Higgs(params.at_sigma(sigma)?))))
            .collect::<Result<_>>()?,
        HomotopySamples::Reduced { t, epsilon } => {
            let eps = match epsilon {
                Some(e) => *e,
                None => default_epsilon(g, params)?,
            };
            t.iter()
                .map(|&t| Ok((t, SystemMap::Reduced(GEpsilonParams::new(params.clone(), eps, t)?))))
                .collect::<Result<_>>()?
        }
    };
    maps.into_iter()
        .map(|(s, map)| {
            let region = map_certificate(g, &map)?;
            Ok((s, multi_start_solve(g, &map, &region, cfg)?.signed_count()))
        })
        .collect()
}
