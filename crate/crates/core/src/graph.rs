//! Weighted finite graphs with a vertex measure and the discrete calculus on
//! them: the μ-Laplacian, the gradient form and the vertex integral.

use std::collections::{HashMap, HashSet, VecDeque};
use std::ops::{Deref, Index};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A real value per vertex, aligned with the vertex order of a [`Graph`].
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFunction<T: Real>(DVector<T>);

impl<T: Real> VertexFunction<T> {
    /// Wraps `values`, rejecting non-finite entries.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.finite()) {
            return Err(Error::NonFinite {
                what: "vertex function".into(),
                value: bad.as_f64(),
            });
        }
        Ok(Self(DVector::from_vec(values)))
    }

    /// Wraps a vector without the finiteness check. Internal arithmetic only.
    pub(crate) fn from_vector(values: DVector<T>) -> Self {
        Self(values)
    }

    pub fn constant(m: usize, c: T) -> Self {
        Self(DVector::from_element(m, c))
    }

    pub fn zeros(m: usize) -> Self {
        Self::constant(m, T::zero())
    }

    pub fn vector(&self) -> &DVector<T> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<T> {
        self.0
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.0.iter().copied().collect()
    }

    pub fn sup_norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }

    pub fn max(&self) -> T {
        self.0.iter().copied().fold(T::min_value().unwrap(), |a, b| a.max(b))
    }

    pub fn min(&self) -> T {
        self.0.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b))
    }

    /// True when all entries agree up to `tol`.
    pub fn is_constant(&self, tol: T) -> bool {
        self.max() - self.min() <= tol
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self(self.0.map(f))
    }
}

impl<T: Real> Deref for VertexFunction<T> {
    type Target = DVector<T>;

    fn deref(&self) -> &DVector<T> {
        &self.0
    }
}

impl<T: Real> Index<usize> for VertexFunction<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<T> {
    pub a: usize,
    pub b: usize,
    pub w: T,
}

/// Connected finite graph with symmetric positive edge weights and a positive
/// vertex measure. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<T: Real> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    measure: Vec<T>,
    edges: Vec<Edge<T>>,
    adjacency: Vec<Vec<(usize, T)>>,
}

impl<T: Real> Graph<T> {
    /// Validates and builds a graph. `measure[i]` belongs to `vertices[i]`;
    /// each undirected edge is listed once.
    pub fn build<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, T)], measure: &[T]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if measure.len() != vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: vertices.len(),
                got: measure.len(),
            });
        }
        let ids: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex { id: id.clone() });
            }
        }
        for (id, &mu) in ids.iter().zip(measure) {
            if !(mu > T::zero()) || !mu.finite() {
                return Err(Error::NonPositiveMeasure {
                    id: id.clone(),
                    mu: mu.as_f64(),
                });
            }
        }

        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownVertex { id: id.to_string() })
        };
        let mut seen = HashSet::new();
        let mut edge_list = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); ids.len()];
        for (a, b, w) in edges {
            let (a, b, w) = (a.as_ref(), b.as_ref(), *w);
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if ia == ib {
                return Err(Error::SelfLoop { id: a.to_string() });
            }
            if !(w > T::zero()) || !w.finite() {
                return Err(Error::NonPositiveWeight {
                    a: a.to_string(),
                    b: b.to_string(),
                    w: w.as_f64(),
                });
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(Error::DuplicateEdge {
                    a: a.to_string(),
                    b: b.to_string(),
                });
            }
            edge_list.push(Edge { a: ia, b: ib, w });
            adjacency[ia].push((ib, w));
            adjacency[ib].push((ia, w));
        }

        let graph = Self {
            ids,
            index,
            measure: measure.to_vec(),
            edges: edge_list,
            adjacency,
        };
        graph.check_connected()?;
        Ok(graph)
    }

    fn check_connected(&self) -> Result<()> {
        let mut visited = vec![false; self.m()];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if !visited[y] {
                    visited[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match visited.iter().position(|v| !v) {
            None => Ok(()),
            Some(i) => Err(Error::Disconnected {
                root: self.ids[0].clone(),
                unreachable: self.ids[i].clone(),
            }),
        }
    }

    /// Number of vertices.
    pub fn m(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn measure(&self) -> &[T] {
        &self.measure
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, T)] {
        &self.adjacency[x]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex { id: id.to_string() })
    }

    /// Total measure Σ μ(x), written |V| in the estimates.
    pub fn total_measure(&self) -> T {
        self.measure.iter().fold(T::zero(), |acc, &mu| acc + mu)
    }

    /// μ₀ = min μ(x).
    pub fn min_measure(&self) -> T {
        self.measure.iter().copied().fold(self.measure[0], |a, b| a.min(b))
    }

    /// w₀ = min w_xy, `None` for the single-vertex graph.
    pub fn min_weight(&self) -> Option<T> {
        self.edges.iter().map(|e| e.w).reduce(|a, b| a.min(b))
    }

    pub fn function(&self, values: Vec<T>) -> Result<VertexFunction<T>> {
        self.check_len(values.len())?;
        VertexFunction::new(values)
    }

    pub fn constant(&self, c: T) -> VertexFunction<T> {
        VertexFunction::constant(self.m(), c)
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got == self.m() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.m(),
                got,
            })
        }
    }

    /// Δu(x) = (1/μ(x)) Σ_{y∼x} w_xy (u(y) − u(x)).
    pub fn laplacian_apply(&self, u: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        self.check_len(u.len())?;
        Ok(VertexFunction::from_vector(self.laplacian_vec(u.vector())))
    }

    pub(crate) fn laplacian_vec(&self, u: &DVector<T>) -> DVector<T> {
        DVector::from_fn(self.m(), |x, _| {
            let flux = self.adjacency[x]
                .iter()
                .fold(T::zero(), |acc, &(y, w)| acc + w * (u[y] - u[x]));
            flux / self.measure[x]
        })
    }

    /// Returns `(operator, quadratic_form)`: the matrix applying Δ and the
    /// combinatorial Laplacian `L` with `uᵀ L u = ∫ |∇u|² dμ`.
    /// They satisfy `operator = −diag(μ)⁻¹ L`.
    pub fn laplacian_matrices(&self) -> (DMatrix<T>, DMatrix<T>) {
        let comb = self.combinatorial_laplacian();
        let op = DMatrix::from_fn(self.m(), self.m(), |i, j| -comb[(i, j)] / self.measure[i]);
        (op, comb)
    }

    pub fn combinatorial_laplacian(&self) -> DMatrix<T> {
        let m = self.m();
        let mut l = DMatrix::zeros(m, m);
        for e in &self.edges {
            l[(e.a, e.a)] += e.w;
            l[(e.b, e.b)] += e.w;
            l[(e.a, e.b)] -= e.w;
            l[(e.b, e.a)] -= e.w;
        }
        l
    }

    /// Γ(u,v)(x) = (1/2μ(x)) Σ_{y∼x} w_xy (u(y) − u(x))(v(y) − v(x)).
    pub fn gradient_form(&self, u: &VertexFunction<T>, v: &VertexFunction<T>) -> Result<VertexFunction<T>> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let two = T::lit(2.0);
        Ok(VertexFunction::from_vector(DVector::from_fn(self.m(), |x, _| {
            let s = self.adjacency[x]
                .iter()
                .fold(T::zero(), |acc, &(y, w)| acc + w * (u[y] - u[x]) * (v[y] - v[x]));
            s / (two * self.measure[x])
        })))
    }

    /// ∫_V u dμ = Σ μ(x) u(x).
    pub fn integral(&self, u: &VertexFunction<T>) -> Result<T> {
        self.check_len(u.len())?;
        Ok(self.integral_vec(u.vector()))
    }

    pub(crate) fn integral_vec(&self, u: &DVector<T>) -> T {
        u.iter()
            .zip(&self.measure)
            .fold(T::zero(), |acc, (&v, &mu)| acc + mu * v)
    }

    /// ū = ∫u dμ / |V|.
    pub fn mean(&self, u: &VertexFunction<T>) -> Result<T> {
        Ok(self.integral(u)? / self.total_measure())
    }

    /// Dirac mass at `x0`, normalized so that its integral is 1.
    pub fn dirac_delta(&self, x0: &str) -> Result<VertexFunction<T>> {
        let i = self.vertex_index(x0)?;
        let mut v = DVector::zeros(self.m());
        v[i] = T::one() / self.measure[i];
        Ok(VertexFunction::from_vector(v))
    }

    /// f = 4π Σ_j δ_{p_j}; repeated points add up.
    pub fn vortex_source<S: AsRef<str>>(&self, points: &[S]) -> Result<VertexFunction<T>> {
        let four_pi = T::lit(4.0) * T::pi();
        let mut f = DVector::zeros(self.m());
        for p in points {
            let i = self.vertex_index(p.as_ref())?;
            f[i] += four_pi / self.measure[i];
        }
        Ok(VertexFunction::from_vector(f))
    }
}

/// Standard unit-weight, unit-measure graphs on vertices named `a`, `b`, ...
pub mod families {
    use super::Graph;
    use crate::scalar::Real;

    fn names(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| {
                if i < 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("v{i}")
                }
            })
            .collect()
    }

    fn unit<T: Real>(n: usize, pairs: &[(usize, usize)]) -> Graph<T> {
        let ids = names(n);
        let edges: Vec<(String, String, T)> = pairs
            .iter()
            .map(|&(a, b)| (ids[a].clone(), ids[b].clone(), T::one()))
            .collect();
        Graph::build(&ids, &edges, &vec![T::one(); n]).expect("standard graph is valid")
    }

    pub fn single_vertex<T: Real>() -> Graph<T> {
        unit(1, &[])
    }

    pub fn path<T: Real>(n: usize) -> Graph<T> {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        unit(n, &pairs)
    }

    pub fn cycle<T: Real>(n: usize) -> Graph<T> {
        let mut pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        pairs.push((n - 1, 0));
        unit(n, &pairs)
    }

    /// Star with one center and `n - 1` leaves.
    pub fn star<T: Real>(n: usize) -> Graph<T> {
        let pairs: Vec<_> = (1..n).map(|i| (0, i)).collect();
        unit(n, &pairs)
    }

    pub fn complete<T: Real>(n: usize) -> Graph<T> {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        unit(n, &pairs)
    }

    /// Same topology as `g` with new weights (edge order) and measure.
    pub fn reweighted<T: Real>(g: &Graph<T>, weights: &[T], measure: &[T]) -> crate::error::Result<Graph<T>> {
        let edges: Vec<(String, String, T)> = g
            .edges()
            .iter()
            .zip(weights)
            .map(|(e, &w)| (g.ids()[e.a].clone(), g.ids()[e.b].clone(), w))
            .collect();
        Graph::build(g.ids(), &edges, measure)
    }
}
