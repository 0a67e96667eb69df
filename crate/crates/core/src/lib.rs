//! Numerical laboratory for the generalized Chern–Simons Higgs equation
//!
//! ```text
//! Δu = λ eᵘ (eᵘ − 1)^{2p+1} + f
//! ```
//!
//! on a connected finite graph with edge weights `w` and vertex measure `μ`.
//!
//! * [`graph`] and [`spectral`]: the μ-Laplacian, integrals and the spectrum of −Δ.
//! * [`model`]: the maps `F(·, σ)` and `G_ε(·, t)`, the energy `J_λ` and the
//!   explicit a-priori solution box.
//! * [`solver`]: damped Newton, multi-start enumeration, box minimization of
//!   `J_λ` and continuation.
//! * [`degree`]: Brouwer degree by enumeration, by the sign table and by the
//!   one-vertex boundary oracle.
//! * [`threshold`]: the critical coupling, its closed-form bound and λ-sweeps.
//! * [`io`] and [`cli`]: graph files, JSON/CSV output and the `cs-higgs` tool.
//!
//! Everything is generic over [`scalar::Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.
//!
//! ```
//! use cs_higgs::{families, ModelParams, MultiStartConfig};
//!
//! let g = families::single_vertex::<f64>();
//! let params = ModelParams::new(8.0, 0, g.constant(1.0)).unwrap();
//! let report = cs_higgs::degree::degree_by_enumeration(&g, &params, &MultiStartConfig::with_starts(32)).unwrap();
//! assert_eq!(report.solutions_used.len(), 2);
//! assert_eq!(report.enumerated_degree, Some(0));
//! ```

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod degree;
pub mod error;
pub mod graph;
pub mod io;
pub mod model;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod threshold;

pub use degree::{DegreeReport, HomotopySamples};
pub use error::{Error, Result};
pub use graph::{families, Graph, VertexFunction};
pub use model::{AprioriCertificate, GEpsilonParams, ModelParams, SystemMap};
pub use scalar::Real;
pub use solver::{MultiStartConfig, NewtonConfig, SolutionSet};
pub use threshold::{SweepPoint, ThresholdReport};

pub type Graph64 = Graph<f64>;
pub type VertexFunction64 = VertexFunction<f64>;
pub type ModelParams64 = ModelParams<f64>;
pub type SystemMap64 = SystemMap<f64>;
pub type SolutionSet64 = SolutionSet<f64>;
pub type DegreeReport64 = DegreeReport<f64>;
pub type ThresholdReport64 = ThresholdReport<f64>;
pub type AprioriCertificate64 = AprioriCertificate<f64>;
