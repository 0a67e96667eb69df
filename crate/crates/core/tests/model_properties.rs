mod common;

use common::{random_function, random_graph, regime_params, REGIMES};
use cs_higgs::families::single_vertex;
use cs_higgs::model::{apriori_certificate, functional_j, gradient_j, map_certificate, nonlinearity_extrema};
use cs_higgs::solver::{multi_start_solve, newton_solve, NewtonConfig};
use cs_higgs::{Graph, ModelParams, MultiStartConfig, SystemMap, VertexFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(m: usize, seed: u64, p: u32, sigma: f64) -> (Graph<f64>, ModelParams<f64>, VertexFunction<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = if m == 1 { single_vertex() } else { random_graph(&mut rng, m, 0.5, 2.0) };
    let lambda = rng.random_range(0.5..8.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let f = random_function(&mut rng, m, -4.0, 4.0);
    let u = random_function(&mut rng, m, -3.0, 1.0);
    (g, ModelParams::with_sigma(lambda, p, sigma, f).unwrap(), u)
}

fn shifted(u: &VertexFunction<f64>, j: usize, d: f64) -> VertexFunction<f64> {
    let mut v = u.to_vec();
    v[j] += d;
    VertexFunction::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobian_matches_central_differences(m in 1usize..6, seed in any::<u64>(), p in 0u32..3, sigma in 0.0f64..=1.0) {
        let (g, params, u) = setup(m, seed, p, sigma);
        let map = SystemMap::Higgs(params);
        let jac = map.jacobian(&g, &u).unwrap();
        let h = 1e-6;
        for j in 0..m {
            let rp = map.residual(&g, &shifted(&u, j, h)).unwrap();
            let rm = map.residual(&g, &shifted(&u, j, -h)).unwrap();
            for i in 0..m {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                prop_assert!((fd - jac[(i, j)]).abs() <= 1e-5 * jac[(i, j)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn energy_gradient_is_weighted_residual(m in 1usize..6, seed in any::<u64>(), p in 0u32..3) {
        let (g, params, u) = setup(m, seed, p, 1.0);
        let grad = gradient_j(&g, &params, &u).unwrap();
        let h = 1e-6;
        for j in 0..m {
            let fd = (functional_j(&g, &params, &shifted(&u, j, h)).unwrap()
                - functional_j(&g, &params, &shifted(&u, j, -h)).unwrap())
                / (2.0 * h);
            prop_assert!((fd - grad[j]).abs() <= 1e-5 * grad[j].abs().max(1.0));
        }
    }
}

#[test]
fn nonlinearity_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for p in 0..3u32 {
        let (_, min) = nonlinearity_extrema::<f64>(p);
        let q = 2 * p as i32 + 1;
        for _ in 0..1_000_000 / 3 {
            let s: f64 = rng.random_range(-20.0f64..5.0).exp();
            assert!(s * (s - 1.0).powi(q) >= min, "p = {p}, s = {s}");
        }
    }
}

#[test]
fn mass_identity_and_certificate_at_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for k in 0..60 {
        let m = 1 + k % 4;
        let g = if m == 1 { single_vertex() } else { random_graph(&mut rng, m, 0.5, 2.0) };
        let base = regime_params(&mut rng, &g, (k % 3) as u32, REGIMES[k % 3]);
        let sigma = [1.0, 0.6, 0.0][(k / 3) % 3];
        let params = base.at_sigma(sigma).unwrap();
        let map = SystemMap::Higgs(params.clone());
        let cert = apriori_certificate(&g, &params, None).unwrap();
        let set = multi_start_solve(&g, &map, &map_certificate(&g, &map).unwrap(), &MultiStartConfig::with_starts(32)).unwrap();
        for u in &set.solutions {
            let n = u.map(|x| map.nonlinearity(x));
            let mass = g.integral(&n).unwrap() + g.integral(&params.f).unwrap();
            assert!(mass.abs() <= 1e-8 * params.f.sup_norm().max(1.0), "mass {mass}");
            assert!(cert.contains(u), "{:?} outside [{}, {}]", u.to_vec(), cert.lower, cert.upper);
            checked += 1;
        }
        // Plain Newton from an arbitrary start lands in the box too.
        let start = random_function(&mut rng, m, -2.0, 1.0);
        if let Some(c) = newton_solve(&g, &map, &start, &NewtonConfig::default()).unwrap().converged() {
            assert!(cert.contains(&c.u));
            checked += 1;
        }
    }
    assert!(checked > 60);
}
