/*
Copyright 2026 The APSM Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

mod common;

use apsm::loss::{phi_value, SparsityLoss};
use apsm::ops::{AttractingOperator, SubgradientProjection};
use apsm::sparse::{
    project_weighted_l1, sparsity_projection_operator, sparsity_subgradient_step, WeightedL1Ball,
};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, f64)> {
    (1usize..60).prop_flat_map(|d| {
        (
            prop::collection::vec(-10.0f64..10.0, d),
            prop::collection::vec(-10.0f64..10.0, d),
            prop::collection::vec(0.05f64..20.0, d),
            0.01f64..50.0,
        )
    })
}

#[test]
fn exact_projection_is_nonexpansive() {
    let mut rng = rng(301);
    for _ in 0..10_000 {
        let dim = rng.gen_range(1..30);
        let w = uniform_vec(&mut rng, dim, 0.05, 20.0);
        let ball = WeightedL1Ball::new(w, rng.gen_range(0.01..20.0)).unwrap();
        let x = gaussian_vec(&mut rng, dim, 3.0);
        let y = gaussian_vec(&mut rng, dim, 3.0);
        let (px, py) = (
            project_weighted_l1(&x, &ball),
            project_weighted_l1(&y, &ball),
        );
        assert!(dist(&px, &py) <= dist(&x, &y) * (1.0 + 1e-12) + 1e-12);
    }
}

#[test]
fn exact_projection_matches_face_enumeration_in_low_dimension() {
    let mut rng = rng(302);
    for _ in 0..2000 {
        let dim = rng.gen_range(1..6);
        let x = gaussian_vec(&mut rng, dim, 3.0);
        let w = uniform_vec(&mut rng, dim, 0.1, 10.0);
        let rho = rng.gen_range(0.01..1.5) * weighted_l1(&w, &x);
        let ball = WeightedL1Ball::new(w.clone(), rho).unwrap();
        assert!(
            max_abs_diff(
                &project_weighted_l1(&x, &ball),
                &l1_projection_by_faces(&x, &w, rho)
            ) < 1e-9
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn exact_projection_satisfies_optimality((x, _, w, rho) in instance()) {
        let ball = WeightedL1Ball::new(w.clone(), rho).unwrap();
        let p = project_weighted_l1(&x, &ball);
        prop_assert!(weighted_l1(&w, &p) <= rho * (1.0 + 1e-12));
        for (pj, xj) in p.iter().zip(&x) {
            prop_assert!(pj * xj >= 0.0 && pj.abs() <= xj.abs());
        }
        if weighted_l1(&w, &x) <= rho {
            prop_assert_eq!(&p, &x);
        } else {
            prop_assert!(l1_kkt_residual(&x, &p, &w, rho) < 1e-9);
        }
        prop_assert!(max_abs_diff(&project_weighted_l1(&p, &ball), &p) < 1e-9);
    }

    #[test]
    fn fast_step_agrees_with_the_generic_operator((x, _, w, rho) in instance(), nu in 0.01f64..1.99) {
        let ball = WeightedL1Ball::new(w.clone(), rho).unwrap();
        let generic = SubgradientProjection::new(SparsityLoss::new(w, rho).unwrap(), nu).unwrap();
        let fast = sparsity_subgradient_step(&ball, &x, nu);
        prop_assert!(max_abs_diff(&fast, &generic.apply(&x).unwrap()) < 1e-9 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
    }

    #[test]
    fn sparsity_operator_fixes_exactly_the_ball((x, _, w, rho) in instance(), nu in 0.01f64..1.99) {
        let ball = WeightedL1Ball::new(w, rho).unwrap();
        let op = sparsity_projection_operator(ball.clone(), nu).unwrap();
        let fixed = op.apply(&x).unwrap() == x;
        prop_assert_eq!(fixed, ball.weighted_norm(&x) <= rho);
        prop_assert_eq!(op.is_fixed_point(&x), Some(fixed));
    }

    #[test]
    fn full_subgradient_step_reaches_the_ball_without_sign_changes((x, _, w, rho) in instance()) {
        let ball = WeightedL1Ball::new(w.clone(), rho).unwrap();
        let loss = SparsityLoss::new(w, rho).unwrap();
        let y = sparsity_subgradient_step(&ball, &x, 1.0);
        let flips = x.iter().zip(&y).any(|(a, b)| a * b < 0.0);
        if !flips {
            prop_assert!(phi_value(&loss, &y) <= 1e-9 * (1.0 + rho));
        }
    }
}
