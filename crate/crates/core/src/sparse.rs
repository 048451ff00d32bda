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

//! Sparse system identification building blocks: hyperslabs formed from
//! streaming regression data, iterate-dependent reweighting, and the
//! weighted l1-ball with both its exact metric projection and its cheap
//! relaxed subgradient projection.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{check_param, ApsmError, Result};
use crate::loss::SparsityLoss;
use crate::ops::{projection, ConvexSet, Operator, SubgradientProjection};
use crate::solver::{ConstraintVariant, RunConfig, StepPolicy};
use crate::vector::{dot, ensure_finite, l1_weighted, norm_sq, sign, RealVec};

/// `{x : |d - a^T x| <= xi}`: estimates consistent with one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperslab {
    a: RealVec,
    d: f64,
    xi: f64,
    a_norm_sq: f64,
}

impl Hyperslab {
    pub fn new(a: RealVec, d: f64, xi: f64) -> Result<Self> {
        ensure_finite(&a, "regressor", None)?;
        check_param("d", d, true, "must be finite")?;
        check_param("xi", xi, xi >= 0.0, "must be non-negative")?;
        let a_norm_sq = norm_sq(&a);
        if a_norm_sq == 0.0 {
            return Err(ApsmError::DegenerateHyperslab);
        }
        Ok(Self {
            a,
            d,
            xi,
            a_norm_sq,
        })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub(crate) fn a_norm_sq(&self) -> f64 {
        self.a_norm_sq
    }

    /// `d - a^T x`
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.d - dot(&self.a, x)
    }

    /// Signed amount by which `a^T x` must move to reach the slab; zero inside.
    pub(crate) fn excess(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        if r > self.xi {
            r - self.xi
        } else if r < -self.xi {
            r + self.xi
        } else {
            0.0
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.residual(x).abs() <= self.xi
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.excess(x).abs() / self.a_norm_sq.sqrt()
    }
}

pub fn make_hyperslab(a: RealVec, d: f64, xi: f64) -> Result<Hyperslab> {
    Hyperslab::new(a, d, xi)
}

/// `{x : sum_j w_j |x_j| <= rho}` with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedL1Ball {
    w: RealVec,
    rho: f64,
}

impl WeightedL1Ball {
    pub fn new(w: RealVec, rho: f64) -> Result<Self> {
        for &wj in &w {
            check_param("w", wj, wj > 0.0, "weights must be positive")?;
        }
        check_param("rho", rho, rho > 0.0, "radius must be positive")?;
        Ok(Self { w, rho })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weighted_norm(&self, x: &[f64]) -> f64 {
        l1_weighted(&self.w, x)
    }
}

impl ConvexSet for WeightedL1Ball {
    fn project(&self, x: &[f64]) -> RealVec {
        project_weighted_l1(x, self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.weighted_norm(x) <= self.rho
    }
}

/// Reweighting `w_j = 1 / (|u_j| + eps_check)`.
///
/// The weights lie in `[1 / (max_j |u_j| + eps_check), 1 / eps_check]`.
pub fn update_weights(u: &[f64], eps_check: f64) -> RealVec {
    debug_assert!(eps_check > 0.0);
    u.iter().map(|uj| 1.0 / (uj.abs() + eps_check)).collect()
}

/// Exact metric projection onto a weighted l1-ball.
///
/// Outside the ball the projection is `y_j = sign(x_j) max(|x_j| - t w_j, 0)`
/// for the unique `t > 0` putting `y` on the boundary. The coordinates are
/// scanned in decreasing order of `|x_j| / w_j`; with prefix sums
/// `A_k = sum w_i |x_i|` and `B_k = sum w_i^2`, the support size is the
/// largest `k` with `|x_k| / w_k > (A_k - rho) / B_k`. O(L log L).
pub fn project_weighted_l1(x: &[f64], ball: &WeightedL1Ball) -> RealVec {
    let w = ball.weights();
    debug_assert_eq!(x.len(), w.len());
    if ball.weighted_norm(x) <= ball.rho {
        return x.to_vec();
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    let ratio = |j: usize| x[j].abs() / w[j];
    order.sort_unstable_by(|&i, &j| ratio(j).partial_cmp(&ratio(i)).unwrap_or(Ordering::Equal));

    let (mut num, mut den) = (0.0, 0.0);
    let mut t = 0.0;
    for &j in &order {
        let next_num = num + w[j] * x[j].abs();
        let next_den = den + w[j] * w[j];
        let candidate = (next_num - ball.rho) / next_den;
        if ratio(j) > candidate {
            num = next_num;
            den = next_den;
            t = candidate;
        } else {
            break;
        }
    }
    x.iter()
        .zip(w)
        .map(|(&xj, &wj)| sign(xj) * (xj.abs() - t * wj).max(0.0))
        .collect()
}

/// Relaxed subgradient projection onto `lev Phi` for the sparsity loss of
/// `ball`, using the sign-vector subgradient. O(L).
pub fn sparsity_subgradient_step(ball: &WeightedL1Ball, x: &[f64], nu: f64) -> RealVec {
    let w = ball.weights();
    let excess = ball.weighted_norm(x) - ball.rho;
    if excess <= 0.0 {
        return x.to_vec();
    }
    let g_sq: f64 = x
        .iter()
        .zip(w)
        .filter(|(xj, _)| **xj != 0.0)
        .map(|(_, wj)| wj * wj)
        .sum();
    if g_sq == 0.0 {
        return x.to_vec();
    }
    let step = nu * excess / g_sq;
    x.iter()
        .zip(w)
        .map(|(&xj, &wj)| xj - step * wj * sign(xj))
        .collect()
}

/// `T_Phi^(nu)` for the sparsity loss of `ball`: `(2 - nu) / nu`-attracting,
/// with fixed point set equal to the ball.
pub fn sparsity_projection_operator(ball: WeightedL1Ball, nu: f64) -> Result<Operator> {
    let loss = SparsityLoss::from_ball(ball);
    Ok(Arc::new(SubgradientProjection::new(loss, nu)?))
}

/// Metric projection onto the ball as a 1-attracting operator.
pub fn exact_ball_operator(ball: WeightedL1Ball) -> Operator {
    projection(ball)
}

/// Classical NLMS as a special case: window of one, zero-width slabs, no
/// a-priori constraint and step `mu`.
pub fn nlms_config(mu: f64) -> Result<RunConfig> {
    check_param("mu", mu, mu > 0.0 && mu < 2.0, "must lie in (0, 2)")?;
    let guard = mu.min(2.0 - mu).min(1.0);
    Ok(RunConfig {
        q: 1,
        xi: 0.0,
        constraint: ConstraintVariant::Identity,
        policy: StepPolicy::new(mu, guard, 1.0, 1.0)?,
    })
}
