//! Poisson solves, damped Newton, box minimization of J_λ, multi-start
//! enumeration and parameter continuation.

mod boxmin;
mod continuation;
mod multistart;
mod newton;
mod poisson;
pub mod sampling;

pub use boxmin::{barrier_from_lemma, minimize_box, BarrierSpec, BoxConfig, BoxMinimum, WarmStart};
pub use continuation::{continuation_path, PathFamily};
pub use multistart::{dedup_solutions, multi_start_solve, MultiStartConfig, SolutionSet};
pub use newton::{newton_solve, Converged, Failure, FailureReason, NewtonConfig, NewtonOutcome};
pub use poisson::solve_poisson_meanzero;
