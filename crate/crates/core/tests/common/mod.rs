#![allow(dead_code)]

use cs_higgs::families::{complete, cycle, path, star};
use cs_higgs::{Graph, ModelParams, VertexFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// P2, P3, C3, S4, K4 with unit weights and measure.
pub fn small_graphs() -> Vec<(&'static str, Graph<f64>)> {
    vec![
        ("P2", path(2)),
        ("P3", path(3)),
        ("C3", cycle(3)),
        ("S4", star(4)),
        ("K4", complete(4)),
    ]
}

/// Random connected graph on `m` vertices: a random tree plus extra edges,
/// weights and measure drawn from `[lo, hi]`.
pub fn random_graph(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Graph<f64> {
    let ids: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for i in 1..m {
        let j = rng.random_range(0..i);
        present.insert((j, i));
        edges.push((ids[j].clone(), ids[i].clone(), rng.random_range(lo..hi)));
    }
    for a in 0..m {
        for b in a + 1..m {
            if !present.contains(&(a, b)) && rng.random_bool(0.3) {
                edges.push((ids[a].clone(), ids[b].clone(), rng.random_range(lo..hi)));
            }
        }
    }
    let measure: Vec<f64> = (0..m).map(|_| rng.random_range(lo..hi)).collect();
    Graph::build(&ids, &edges, &measure).unwrap()
}

pub fn random_function(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> VertexFunction<f64> {
    VertexFunction::new((0..m).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

/// The three sign regimes of (λ, ∫f): degree 1, 0 and −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    PositiveNegative,
    SameSign,
    NegativePositive,
}

pub const REGIMES: [Regime; 3] = [Regime::PositiveNegative, Regime::SameSign, Regime::NegativePositive];

/// λ and f with magnitudes in [½, 8] in the given regime; f has one sign.
pub fn regime_params(rng: &mut ChaCha8Rng, g: &Graph<f64>, p: u32, regime: Regime) -> ModelParams<f64> {
    let (ls, fs) = match regime {
        Regime::PositiveNegative => (1.0, -1.0),
        Regime::SameSign => {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (s, s)
        }
        Regime::NegativePositive => (-1.0, 1.0),
    };
    let lambda = ls * rng.random_range(0.5..8.0);
    let f = VertexFunction::new((0..g.m()).map(|_| fs * rng.random_range(0.5..8.0)).collect()).unwrap();
    ModelParams::new(lambda, p, f).unwrap()
}
