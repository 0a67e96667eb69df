//! The Chern–Simons Higgs nonlinearity and the maps built from it.
//!
//! Two families of maps `u ↦ −Δu + N(u) + c·f` are used throughout:
//!
//! * the σ-homotopy `F(u, σ) = −Δu + λ eᵘ (eᵘ − σ)^{2p+1} + f`, whose zeros at
//!   σ = 1 are the solutions of `Δu = λ eᵘ (eᵘ − 1)^{2p+1} + f`;
//! * the auxiliary family `G_ε(u, t) = −Δu + λ e^{(2p+2)u} + (t + (1 − t)ε) f`.
//!
//! Both are represented by [`SystemMap`], which is what the solvers consume.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::scalar::Real;
use crate::spectral;

/// Coupling λ, exponent p, homotopy parameter σ and source f.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T: Real> {
    pub lambda: T,
    pub p: u32,
    pub sigma: T,
    pub f: VertexFunction<T>,
}

impl<T: Real> ModelParams<T> {
    /// Parameters at σ = 1.
    pub fn new(lambda: T, p: u32, f: VertexFunction<T>) -> Result<Self> {
        Self::with_sigma(lambda, p, T::one(), f)
    }

    pub fn with_sigma(lambda: T, p: u32, sigma: T, f: VertexFunction<T>) -> Result<Self> {
        if !lambda.finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("{lambda} is not finite"),
            });
        }
        if !(sigma >= T::zero() && sigma <= T::one()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("{sigma} is outside [0, 1]"),
            });
        }
        Ok(Self { lambda, p, sigma, f })
    }

    /// Same parameters at another σ.
    pub fn at_sigma(&self, sigma: T) -> Result<Self> {
        Self::with_sigma(self.lambda, self.p, sigma, self.f.clone())
    }

    pub fn at_lambda(&self, lambda: T) -> Result<Self> {
        Self::with_sigma(lambda, self.p, self.sigma, self.f.clone())
    }

    /// 2p + 1.
    pub fn odd_power(&self) -> i32 {
        2 * self.p as i32 + 1
    }
}

/// Parameters of `G_ε(·, t)`; `base.sigma` is ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct GEpsilonParams<T: Real> {
    pub base: ModelParams<T>,
    pub epsilon: T,
    pub t: T,
}

impl<T: Real> GEpsilonParams<T> {
    pub fn new(base: ModelParams<T>, epsilon: T, t: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("{epsilon} must be positive"),
            });
        }
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("{t} is outside [0, 1]"),
            });
        }
        Ok(Self { base, epsilon, t })
    }

    /// The factor t + (1 − t)ε multiplying f.
    pub fn source_scale(&self) -> T {
        self.t + (T::one() - self.t) * self.epsilon
    }
}

/// A map of the form `u ↦ −Δu + N(u) + c·f` with a pointwise nonlinearity.
#[derive(Clone, Debug, PartialEq)]
pub enum SystemMap<T: Real> {
    /// `F(·, σ)`.
    Higgs(ModelParams<T>),
    /// `G_ε(·, t)`.
    Reduced(GEpsilonParams<T>),
}

impl<T: Real> SystemMap<T> {
    pub fn lambda(&self) -> T {
        match self {
            SystemMap::Higgs(p) => p.lambda,
            SystemMap::Reduced(g) => g.base.lambda,
        }
    }

    pub fn p(&self) -> u32 {
        match self {
            SystemMap::Higgs(p) => p.p,
            SystemMap::Reduced(g) => g.base.p,
        }
    }

    /// The σ of the equivalent `Δu = λ eᵘ (eᵘ − σ)^{2p+1} + f_eff` form;
    /// `G_ε` is the σ = 0 member.
    pub fn sigma(&self) -> T {
        match self {
            SystemMap::Higgs(p) => p.sigma,
            SystemMap::Reduced(_) => T::zero(),
        }
    }

    /// The source actually added, `f` or `(t + (1 − t)ε) f`.
    pub fn effective_source(&self) -> VertexFunction<T> {
        match self {
            SystemMap::Higgs(p) => p.f.clone(),
            SystemMap::Reduced(g) => {
                let c = g.source_scale();
                g.base.f.map(|v| c * v)
            }
        }
    }

    /// Equivalent σ-family parameters (λ, p, σ, f_eff).
    pub fn as_higgs(&self) -> ModelParams<T> {
        ModelParams {
            lambda: self.lambda(),
            p: self.p(),
            sigma: self.sigma(),
            f: self.effective_source(),
        }
    }

    /// N(u) = λ eᵘ (eᵘ − σ)^{2p+1}; for `G_ε` this equals λ e^{(2p+2)u}.
    pub fn nonlinearity(&self, u: T) -> T {
        match self {
            SystemMap::Higgs(p) => higgs_term(p.lambda, p.p, p.sigma, u),
            SystemMap::Reduced(g) => {
                g.base.lambda * (T::from_usize_lossy(2 * g.base.p as usize + 2) * u).exp()
            }
        }
    }

    /// N′(u), written in factored form to avoid cancellation near eᵘ = σ.
    pub fn nonlinearity_derivative(&self, u: T) -> T {
        match self {
            SystemMap::Higgs(p) => higgs_derivative(p.lambda, p.p, p.sigma, u),
            SystemMap::Reduced(g) => {
                let k = T::from_usize_lossy(2 * g.base.p as usize + 2);
                k * g.base.lambda * (k * u).exp()
            }
        }
    }

    fn check_overflow(&self, u: &DVector<T>) -> Result<()> {
        let k = T::from_usize_lossy(2 * self.p() as usize + 2);
        for (i, &v) in u.iter().enumerate() {
            if !v.finite() || k * v > T::EXP_GUARD {
                return Err(Error::Overflow { index: i, u: v.as_f64() });
            }
        }
        Ok(())
    }

    pub(crate) fn residual_vec(&self, g: &Graph<T>, u: &DVector<T>) -> Result<DVector<T>> {
        self.check_overflow(u)?;
        let lap = g.laplacian_vec(u);
        let f = self.effective_source();
        let r = DVector::from_fn(g.m(), |i, _| -lap[i] + self.nonlinearity(u[i]) + f[i]);
        if let Some(i) = r.iter().position(|v| !v.finite()) {
            return Err(Error::Overflow { index: i, u: u[i].as_f64() });
        }
        Ok(r)
    }

    pub(crate) fn derivative_vec(&self, g: &Graph<T>, u: &DVector<T>) -> Result<DVector<T>> {
        self.check_overflow(u)?;
        let d = DVector::from_fn(g.m(), |i, _| self.nonlinearity_derivative(u[i]));
        if let Some(i) = d.iter().position(|v| !v.finite()) {
            return Err(Error::Overflow { index: i, u: u[i].as_f64() });
        }
        Ok(d)
    }

    /// Pointwise residual `−Δu + N(u) + c·f`.
    pub fn residual(&self, g: &Graph<T>, u: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        g.check_len(u.len())?;
        g.check_len(self.effective_source().len())?;
        self.residual_vec(g, u.vector()).map(VertexFunction::from_vector)
    }

    /// Jacobian `−Δ + diag(N′(u))` as an operator matrix.
    pub fn jacobian(&self, g: &Graph<T>, u: &VertexFunction<T>) -> Result<DMatrix<T>> {
        g.check_len(u.len())?;
        let d = self.derivative_vec(g, u.vector())?;
        let (op, _) = g.laplacian_matrices();
        let mut j = -op;
        for i in 0..g.m() {
            j[(i, i)] += d[i];
        }
        Ok(j)
    }

    /// `L + diag(μ N′(u))`: symmetric, and `diag(μ)` times the Jacobian.
    pub fn weighted_jacobian(&self, g: &Graph<T>, u: &DVector<T>) -> Result<DMatrix<T>> {
        let d = self.derivative_vec(g, u)?;
        let mut j = g.combinatorial_laplacian();
        for i in 0..g.m() {
            j[(i, i)] += g.measure()[i] * d[i];
        }
        Ok(j)
    }

    /// Sign of `det(−Δ + diag(N′(u)))`, read off the symmetric matrix
    /// `diag(μ)^{-1/2} (L + diag(μ N′)) diag(μ)^{-1/2}` (same determinant sign).
    /// 0 for numerically singular Jacobians.
    pub fn jacobian_det_sign(&self, g: &Graph<T>, u: &DVector<T>) -> Result<i32> {
        let w = self.weighted_jacobian(g, u)?;
        let s: Vec<T> = g.measure().iter().map(|mu| T::one() / mu.sqrt()).collect();
        let conj = DMatrix::from_fn(g.m(), g.m(), |i, j| s[i] * w[(i, j)] * s[j]);
        spectral::symmetric_det_sign(conj)
    }

    /// Real u with `N(u) + c = 0`, ascending. These are the constant
    /// solutions when the source is the constant c.
    pub fn pointwise_roots(&self, c: T) -> Vec<T> {
        let k = 2 * self.p() as usize + 2;
        let lambda = self.lambda();
        if lambda == T::zero() {
            return Vec::new();
        }
        // N(u)/λ = s(s − σ)^{2p+1} with s = eᵘ.
        let target = -c / lambda;
        let sigma = self.sigma();
        if sigma == T::zero() {
            return if target > T::zero() {
                vec![target.ln() / T::from_usize_lossy(k)]
            } else {
                Vec::new()
            };
        }
        let q = 2 * self.p() as i32 + 1;
        let shape = |s: T| s * (s - sigma).powi(q);
        let s_min = sigma / T::from_usize_lossy(k);
        let g_min = shape(s_min);
        let mut roots = Vec::new();
        if target > g_min && target < T::zero() {
            roots.push(bisect(shape, target, T::zero(), s_min));
            roots.push(bisect(shape, target, s_min, sigma));
        } else if target == g_min {
            roots.push(s_min);
        } else if target == T::zero() {
            roots.push(sigma);
        } else if target > T::zero() {
            let mut hi = sigma + T::one();
            while shape(hi) < target {
                hi = hi + hi;
            }
            roots.push(bisect(shape, target, sigma, hi));
        }
        roots.into_iter().filter(|s| *s > T::zero()).map(|s| s.ln()).collect()
    }
}

/// Bisection for an increasing or decreasing `h` on `[lo, hi]` with
/// `h(lo) - target` and `h(hi) - target` of opposite sign.
fn bisect<T: Real>(h: impl Fn(T) -> T, target: T, mut lo: T, mut hi: T) -> T {
    let increasing = h(hi) > h(lo);
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if (h(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// λ eᵘ (eᵘ − σ)^{2p+1}.
pub fn higgs_term<T: Real>(lambda: T, p: u32, sigma: T, u: T) -> T {
    let s = u.exp();
    lambda * s * (s - sigma).powi(2 * p as i32 + 1)
}

/// λ eᵘ (eᵘ − σ)^{2p} [(eᵘ − σ) + (2p+1) eᵘ].
pub fn higgs_derivative<T: Real>(lambda: T, p: u32, sigma: T, u: T) -> T {
    let s = u.exp();
    let d = s - sigma;
    let q = T::from_usize_lossy(2 * p as usize + 1);
    lambda * s * d.powi(2 * p as i32) * (d + q * s)
}

/// `F(u, σ) = −Δu + λ eᵘ (eᵘ − σ)^{2p+1} + f`.
pub fn residual_f<T: Real>(g: &Graph<T>, params: &ModelParams<T>, u: &VertexFunction<T>) -> Result<VertexFunction<T>> {
    SystemMap::Higgs(params.clone()).residual(g, u)
}

/// `−Δ + diag(h′(u))` with `h′` the derivative of the nonlinearity.
pub fn jacobian_f<T: Real>(g: &Graph<T>, params: &ModelParams<T>, u: &VertexFunction<T>) -> Result<DMatrix<T>> {
    SystemMap::Higgs(params.clone()).jacobian(g, u)
}

/// `G_ε(u, t) = −Δu + λ e^{(2p+2)u} + (t + (1 − t)ε) f`.
pub fn residual_g_eps<T: Real>(
    g: &Graph<T>,
    params: &GEpsilonParams<T>,
    u: &VertexFunction<T>,
) -> Result<VertexFunction<T>> {
    SystemMap::Reduced(params.clone()).residual(g, u)
}

pub fn jacobian_g_eps<T: Real>(g: &Graph<T>, params: &GEpsilonParams<T>, u: &VertexFunction<T>) -> Result<DMatrix<T>> {
    SystemMap::Reduced(params.clone()).jacobian(g, u)
}

fn require_sigma_one<T: Real>(params: &ModelParams<T>) -> Result<()> {
    if params.sigma == T::one() {
        Ok(())
    } else {
        Err(Error::SigmaNotOne {
            sigma: params.sigma.as_f64(),
        })
    }
}

/// J_λ(u) = ½∫|∇u|² dμ + λ/(2(p+1)) ∫(eᵘ − 1)^{2(p+1)} dμ + ∫ f u dμ.
pub fn functional_j<T: Real>(g: &Graph<T>, params: &ModelParams<T>, u: &VertexFunction<T>) -> Result<T> {
    require_sigma_one(params)?;
    g.check_len(u.len())?;
    let map = SystemMap::Higgs(params.clone());
    map.check_overflow(u.vector())?;
    let dirichlet = g
        .edges()
        .iter()
        .fold(T::zero(), |acc, e| acc + e.w * (u[e.a] - u[e.b]) * (u[e.a] - u[e.b]));
    let k = 2 * params.p as i32 + 2;
    let coef = params.lambda / T::from_usize_lossy(k as usize);
    let mut potential = T::zero();
    let mut source = T::zero();
    for i in 0..g.m() {
        let mu = g.measure()[i];
        potential += mu * (u[i].exp() - T::one()).powi(k);
        source += mu * params.f[i] * u[i];
    }
    Ok(dirichlet / T::lit(2.0) + coef * potential + source)
}

/// Euclidean gradient of J_λ, equal to `μ ⊙ F(u)`.
pub fn gradient_j<T: Real>(g: &Graph<T>, params: &ModelParams<T>, u: &VertexFunction<T>) -> Result<VertexFunction<T>> {
    require_sigma_one(params)?;
    let r = residual_f(g, params, u)?;
    Ok(VertexFunction::from_vector(DVector::from_fn(g.m(), |i, _| {
        g.measure()[i] * r[i]
    })))
}

/// Theorem-style a-priori box: every solution of `F(·, σ) = 0`, for any
/// σ ∈ [0, 1], satisfies `lower ≤ u ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AprioriCertificate<T: Real> {
    /// The bound parameter Λ.
    pub lambda_bound: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub alpha: T,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> AprioriCertificate<T> {
    pub fn contains(&self, u: &VertexFunction<T>) -> bool {
        u.iter().all(|&v| v >= self.lower && v <= self.upper)
    }

    /// Radius of an L∞ ball containing the box.
    pub fn radius(&self) -> T {
        self.lower.abs().max(self.upper.abs())
    }
}

/// The tightest Λ with Λ⁻¹ ≤ |λ| ≤ Λ, Λ⁻¹ ≤ |∫f| ≤ Λ and ‖f‖∞ ≤ Λ.
pub fn default_lambda_bound<T: Real>(g: &Graph<T>, lambda: T, f: &VertexFunction<T>) -> Result<T> {
    let mass = g.integral(f)?.abs();
    let l = lambda.abs();
    Ok([T::one() / l, l, T::one() / mass, mass, f.sup_norm()]
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b)))
}

/// Evaluates the explicit constants c₁, c₂, c₃, α and the solution box.
///
/// `lambda_bound` defaults to [`default_lambda_bound`].
pub fn apriori_certificate<T: Real>(
    g: &Graph<T>,
    params: &ModelParams<T>,
    lambda_bound: Option<T>,
) -> Result<AprioriCertificate<T>> {
    g.check_len(params.f.len())?;
    let big = match lambda_bound {
        Some(b) => b,
        None => default_lambda_bound(g, params.lambda, &params.f)?,
    };
    let violated = |condition: String| Error::LambdaSandwichViolated {
        lambda_bound: big.as_f64(),
        condition,
    };
    if !(big > T::zero()) || !big.finite() {
        return Err(violated(format!("Lambda = {big} is not a positive finite number")));
    }
    let inv = T::one() / big;
    let l = params.lambda.abs();
    if !(inv <= l && l <= big) {
        return Err(violated(format!("1/Lambda <= |lambda| <= Lambda fails for |lambda| = {l}")));
    }
    let mass = g.integral(&params.f)?.abs();
    if !(inv <= mass && mass <= big) {
        return Err(violated(format!("1/Lambda <= |integral f| <= Lambda fails for |integral f| = {mass}")));
    }
    let fmax = params.f.sup_norm();
    if fmax > big {
        return Err(violated(format!("||f||_inf <= Lambda fails for ||f||_inf = {fmax}")));
    }

    let volume = g.total_measure();
    let mu0 = g.min_measure();
    let q = T::from_usize_lossy(2 * params.p as usize + 1);
    let two = T::lit(2.0);
    let c1 = volume + big * big;
    let root = (c1 / mu0).powf(T::one() / q);
    let upper = (T::one() + root).ln();
    let c2 = big * (two + root).powi(2 * params.p as i32 + 2) + big;
    let c3 = if g.m() == 1 {
        // A single vertex has max u = min u.
        T::zero()
    } else {
        let w0 = g.min_weight().expect("connected graph with m > 1 has edges");
        let gap = spectral::poincare_constant(g)?;
        let m1 = T::from_usize_lossy(g.m() - 1);
        c2 * (m1 * volume / (w0 * gap)).sqrt()
    };
    let alpha = -(T::one().min(T::one() / (T::lit(4.0) * big * big * volume))).ln();
    Ok(AprioriCertificate {
        lambda_bound: big,
        c1,
        c2,
        c3,
        alpha,
        lower: -alpha - c3,
        upper,
    })
}

/// Certificate for the equivalent σ-form of any [`SystemMap`].
pub fn map_certificate<T: Real>(g: &Graph<T>, map: &SystemMap<T>) -> Result<AprioriCertificate<T>> {
    apriori_certificate(g, &map.as_higgs(), None)
}

/// Minimizer `1/(2p+2)` of `s(s − 1)^{2p+1}` over s > 0 and the minimum
/// value `−(2p+1)^{2p+1}/(2p+2)^{2p+2}`.
pub fn nonlinearity_extrema<T: Real>(p: u32) -> (T, T) {
    let q = T::from_usize_lossy(2 * p as usize + 1);
    let k = q + T::one();
    let value = -q.powi(2 * p as i32 + 1) / k.powi(2 * p as i32 + 2);
    (T::one() / k, value)
}

/// `L_λ c = λ e^c (e^c − 1)^{2p+1} + f` for the constant function c
/// (the Laplacian term vanishes). σ in `params` is ignored.
pub fn barrier_check<T: Real>(params: &ModelParams<T>, c: T) -> VertexFunction<T> {
    let h = higgs_term(params.lambda, params.p, T::one(), c);
    params.f.map(|v| h + v)
}

/// `L_λ v` for a non-constant v, σ in `params` ignored.
pub fn barrier_apply<T: Real>(g: &Graph<T>, params: &ModelParams<T>, v: &VertexFunction<T>) -> Result<VertexFunction<T>> {
    let at_one = params.at_sigma(T::one())?;
    residual_f(g, &at_one, v)
}
