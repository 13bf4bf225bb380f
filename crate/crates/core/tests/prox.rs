mod common;

use common::oracles::{k_tau_oracle, linf_objective, linf_prox_oracle, max_abs_diff, polytope_projection};
use common::dist2;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use vds_core::prox::{
    project_k_tau, project_k_tau_dykstra, project_l1_ball, project_weighted_l1_ball, prox_weighted_linf_diag,
    WeightedL1Ball,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn weighted_l1_projection_matches_face_enumeration() {
    let mut rng = rng(1);
    for n in 2..=6 {
        for _ in 0..100 {
            let w: Vec<f64> = (0..n).map(|_| 0.1 + 2.0 * rng.random::<f64>()).collect();
            let r = 0.2 + 2.0 * rng.random::<f64>();
            let x: Vec<f64> = (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            let ball = WeightedL1Ball::new(w.clone(), r).unwrap();
            let got = project_weighted_l1_ball(&x, &ball).unwrap();
            let expect = polytope_projection(&x, &w, r);
            assert!(max_abs_diff(&got, &expect) <= 1e-6, "n={n} x={x:?} w={w:?} r={r}");
            let plain = project_l1_ball(&x, r).unwrap();
            let expect_plain = polytope_projection(&x, &vec![1.0; n], r);
            assert!(max_abs_diff(&plain, &expect_plain) <= 1e-6);
        }
    }
}

#[test]
fn weighted_l1_worked_example() {
    let ball = WeightedL1Ball::new(vec![1.0, 0.5], 1.0).unwrap();
    let got = project_weighted_l1_ball(&[2.0, 2.0], &ball).unwrap();
    assert!(max_abs_diff(&got, &[0.4, 1.2]) < 1e-14);
    assert!(ball.contains(&got));
}

#[test]
fn linf_prox_matches_epigraph_search() {
    let mut rng = rng(2);
    for n in 2..=6 {
        for _ in 0..100 {
            let b: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
            let q: Vec<f64> = (0..n).map(|_| 6.0 * rng.random::<f64>() - 3.0).collect();
            let gamma = 0.01 + 2.0 * rng.random::<f64>();
            let got = prox_weighted_linf_diag(&q, gamma, &b).unwrap();
            let expect = linf_prox_oracle(&q, gamma, &b);
            assert!(max_abs_diff(&got, &expect) <= 1e-6, "q={q:?} b={b:?} gamma={gamma}");
        }
    }
}

#[test]
fn linf_prox_beats_perturbations() {
    let mut rng = rng(3);
    let n = 8;
    let b: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let q: Vec<f64> = (0..n).map(|_| 4.0 * rng.random::<f64>() - 1.0).collect();
    let gamma = 0.3;
    let u = prox_weighted_linf_diag(&q, gamma, &b).unwrap();
    let best = linf_objective(&u, &q, gamma, &b);
    for k in 0..1000 {
        let scale = 10f64.powi(-(k % 6) as i32);
        let v: Vec<f64> = u.iter().map(|x| x + scale * (2.0 * rng.random::<f64>() - 1.0)).collect();
        assert!(linf_objective(&v, &q, gamma, &b) >= best - 1e-12);
    }
}

#[test]
fn moreau_decomposition_against_polytope_oracle() {
    let mut rng = rng(4);
    for n in 2..=5 {
        for _ in 0..50 {
            let b: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
            let q: Vec<f64> = (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
            let gamma = 0.05 + rng.random::<f64>();
            let prox = prox_weighted_linf_diag(&q, gamma, &b).unwrap();
            let scaled: Vec<f64> = q.iter().map(|v| v / gamma).collect();
            let w: Vec<f64> = b.iter().map(|v| 1.0 / v).collect();
            let dual = polytope_projection(&scaled, &w, 1.0);
            for i in 0..n {
                assert!((prox[i] + gamma * dual[i] - q[i]).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn k_tau_projection_matches_active_set_enumeration() {
    let mut rng = rng(5);
    for n in 2..=6 {
        for _ in 0..100 {
            let tau = 0.01 + 0.2 * rng.random::<f64>();
            let m = n as f64 * tau + (n as f64 * (1.0 - tau)) * rng.random::<f64>();
            let x: Vec<f64> = (0..n).map(|_| 3.0 * rng.random::<f64>() - 1.0).collect();
            let got = project_k_tau(&x, tau, m).unwrap();
            let expect = k_tau_oracle(&x, tau, m);
            assert!(max_abs_diff(&got, &expect) <= 1e-6, "x={x:?} tau={tau} m={m}");
            let dyk = project_k_tau_dykstra(&x, tau, m, 1e-13, 100_000).unwrap();
            assert!(max_abs_diff(&dyk, &expect) <= 1e-6, "dykstra {} x={x:?} tau={tau} m={m}", max_abs_diff(&dyk, &expect));
        }
    }
}

#[test]
fn k_tau_rejects_infeasible_budget() {
    assert!(project_k_tau(&[0.5; 10], 0.2, 1.0).is_err());
    assert!(project_k_tau(&[0.5; 10], 0.0, 5.0).is_err());
    assert!(project_k_tau(&[0.5; 10], 0.2, 2.0).is_ok());
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #[test]
    fn projections_are_nonexpansive(
        (x, y, w) in (2usize..40).prop_flat_map(|n| (vec_strategy(n), vec_strategy(n), prop::collection::vec(0.05f64..3.0, n))),
        r in 0.1f64..5.0,
    ) {
        let ball = WeightedL1Ball::new(w, r).unwrap();
        let px = project_weighted_l1_ball(&x, &ball).unwrap();
        let py = project_weighted_l1_ball(&y, &ball).unwrap();
        prop_assert!(dist2(&px, &py) <= dist2(&x, &y) * (1.0 + 1e-12) + 1e-20);
        let size: f64 = px.iter().zip(ball.weights()).map(|(v, w)| w * v.abs()).sum();
        prop_assert!(size <= r * (1.0 + 1e-12));

        let n = x.len() as f64;
        let tau = 0.01;
        let m = (0.3 * n).max(n * tau);
        let kx = project_k_tau(&x, tau, m).unwrap();
        let ky = project_k_tau(&y, tau, m).unwrap();
        prop_assert!(dist2(&kx, &ky) <= dist2(&x, &y) * (1.0 + 1e-12) + 1e-20);
        prop_assert!(kx.iter().all(|&v| (tau..=1.0).contains(&v)));
        prop_assert!(kx.iter().sum::<f64>() <= m * (1.0 + 1e-12));
        // Idempotent.
        let kk = project_k_tau(&kx, tau, m).unwrap();
        prop_assert!(max_abs_diff(&kk, &kx) <= 1e-12);
    }

    #[test]
    fn linf_prox_is_nonexpansive(
        (q1, q2, b) in (2usize..30).prop_flat_map(|n| (vec_strategy(n), vec_strategy(n), prop::collection::vec(0.01f64..1.0, n))),
        gamma in 0.001f64..3.0,
    ) {
        let p1 = prox_weighted_linf_diag(&q1, gamma, &b).unwrap();
        let p2 = prox_weighted_linf_diag(&q2, gamma, &b).unwrap();
        prop_assert!(dist2(&p1, &p2) <= dist2(&q1, &q2) * (1.0 + 1e-12) + 1e-20);
    }
}
