use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexFunction};
use crate::scalar::Real;

/// Solves `Δv = g − ḡ` with `v̄ = 0`.
///
/// The constant kernel of Δ is removed by the rank-one shift
/// `(L + μμᵀ/|V|) v = −diag(μ)(g − ḡ)`, which is positive definite and has
/// the mean-zero solution as its unique solution.
pub fn solve_poisson_meanzero<T: Real>(graph: &Graph<T>, g: &VertexFunction<T>) -> Result<VertexFunction<T>> {
    let gbar = graph.mean(g)?;
    let m = graph.m();
    let mu = graph.measure();
    let volume = graph.total_measure();
    let mut a = graph.combinatorial_laplacian();
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] += mu[i] * mu[j] / volume;
        }
    }
    let rhs = DVector::from_fn(m, |i, _| -mu[i] * (g[i] - gbar));
    let v = a
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| a.lu().solve(&rhs))
        .ok_or(Error::SingularSystem)?;
    // Remove the rounding-level mean.
    let vbar = graph.integral_vec(&v) / volume;
    Ok(VertexFunction::from_vector(v.map(|x| x - vbar)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_examples() {
        let g2 = path::<f64>(2);
        let v = solve_poisson_meanzero(&g2, &g2.function(vec![1.0, -1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(v[0], -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], 0.5, epsilon = 1e-14);

        let g3 = path::<f64>(3);
        let v = solve_poisson_meanzero(&g3, &g3.function(vec![1.0, 0.0, -1.0]).unwrap()).unwrap();
        for (a, b) in v.iter().zip([-1.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }

        let v = solve_poisson_meanzero(&g3, &g3.constant(4.2)).unwrap();
        assert!(v.sup_norm() < 1e-14);
    }

    #[test]
    fn weighted_post_check() {
        let g = Graph::build(
            &["a", "b", "c", "d"],
            &[("a", "b", 0.3), ("b", "c", 2.0), ("b", "d", 1.4), ("c", "d", 0.9)],
            &[1.5, 0.5, 2.5, 1.0],
        )
        .unwrap();
        let rhs = g.function(vec![3.0, -1.0, 0.25, 7.0]).unwrap();
        let v = solve_poisson_meanzero(&g, &rhs).unwrap();
        let gbar = g.mean(&rhs).unwrap();
        let lv = g.laplacian_apply(&v).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(lv[i], rhs[i] - gbar, epsilon = 1e-10);
        }
        assert!(f64::abs(g.mean(&v).unwrap()) <= 1e-12 * rhs.sup_norm());
    }
}
