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

//! Convex loss oracles: the sparsity-aware loss `Phi` whose zero level set is
//! a weighted l1-ball, the sliding-window loss `Theta` built from the sets
//! that the current iterate violates, and plain distance functions.

use crate::error::{check_param, ApsmError, Result};
use crate::ops::{project_hyperslab, ConvexSet};
use crate::sparse::{Hyperslab, WeightedL1Ball};
use crate::vector::{dist, ensure_len, sign, RealVec};

/// Value and subgradient selection of a convex function.
pub trait ConvexLossOracle: Send + Sync {
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn subgrad(&self, x: &[f64]) -> Result<RealVec>;
}

/// `Phi(x) = max{0, sum_j w_j |x_j| - rho}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityLoss {
    ball: WeightedL1Ball,
    bounds: (f64, f64),
}

impl SparsityLoss {
    /// Bounds default to the extreme weights.
    pub fn new(w: RealVec, rho: f64) -> Result<Self> {
        Ok(Self::from_ball(WeightedL1Ball::new(w, rho)?))
    }

    pub fn with_bounds(w: RealVec, rho: f64, lower: f64, upper: f64) -> Result<Self> {
        check_param(
            "lower",
            lower,
            lower > 0.0 && lower <= upper,
            "need 0 < lower <= upper",
        )?;
        check_param("upper", upper, true, "must be finite")?;
        for &wj in &w {
            check_param(
                "w",
                wj,
                wj >= lower && wj <= upper,
                "weight outside declared bounds",
            )?;
        }
        let ball = WeightedL1Ball::new(w, rho)?;
        Ok(Self {
            ball,
            bounds: (lower, upper),
        })
    }

    pub fn from_ball(ball: WeightedL1Ball) -> Self {
        let w = ball.weights();
        let lower = w.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = w.iter().copied().fold(0.0, f64::max);
        Self {
            ball,
            bounds: (lower, upper),
        }
    }

    pub fn ball(&self) -> &WeightedL1Ball {
        &self.ball
    }

    pub fn bounds(&self) -> (f64, f64) {
        self.bounds
    }
}

pub fn phi_value(loss: &SparsityLoss, x: &[f64]) -> f64 {
    (loss.ball.weighted_norm(x) - loss.ball.rho()).max(0.0)
}

/// Sign-vector selection from `dPhi(x)`: `w_j sign(x_j)` with `sign(0) = 0`
/// strictly outside the ball, zero on or inside it.
pub fn phi_subgrad(loss: &SparsityLoss, x: &[f64]) -> RealVec {
    if loss.ball.weighted_norm(x) <= loss.ball.rho() {
        return vec![0.0; x.len()];
    }
    x.iter()
        .zip(loss.ball.weights())
        .map(|(&xj, &wj)| wj * sign(xj))
        .collect()
}

impl ConvexLossOracle for SparsityLoss {
    fn value(&self, x: &[f64]) -> Result<f64> {
        ensure_len(x, self.ball.dim())?;
        Ok(phi_value(self, x))
    }

    fn subgrad(&self, x: &[f64]) -> Result<RealVec> {
        ensure_len(x, self.ball.dim())?;
        Ok(phi_subgrad(self, x))
    }
}

/// `d(x, C)` with subgradient `(x - P_C(x)) / d(x, C)` outside `C` and zero inside.
#[derive(Debug, Clone)]
pub struct DistanceLoss<S> {
    set: S,
}

impl<S: ConvexSet> DistanceLoss<S> {
    pub fn new(set: S) -> Self {
        Self { set }
    }
}

impl<S: ConvexSet> ConvexLossOracle for DistanceLoss<S> {
    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.set.distance(x))
    }

    fn subgrad(&self, x: &[f64]) -> Result<RealVec> {
        let p = self.set.project(x);
        let d = dist(x, &p);
        if d == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        Ok(x.iter().zip(&p).map(|(xi, pi)| (xi - pi) / d).collect())
    }
}

/// Uniform convex weights `1 / #I_n` over the active sets.
pub fn uniform_active_weights(active_count: usize) -> Result<Vec<f64>> {
    if active_count == 0 {
        return Err(ApsmError::NoActiveSets);
    }
    Ok(vec![1.0 / active_count as f64; active_count])
}

/// Projections, distances and the active index set of a window at one point.
#[derive(Debug, Clone, Default)]
pub(crate) struct WindowGeometry {
    /// `(window index, d(u, S_i), P_{S_i}(u))` for every set not containing `u`.
    pub active: Vec<(usize, f64, RealVec)>,
    pub max_distance: f64,
}

pub(crate) fn window_geometry<'a>(
    sets: impl IntoIterator<Item = &'a Hyperslab>,
    anchor: &[f64],
) -> WindowGeometry {
    let mut geometry = WindowGeometry::default();
    for (i, slab) in sets.into_iter().enumerate() {
        if slab.contains(anchor) {
            continue;
        }
        let p = project_hyperslab(anchor, slab);
        let d = dist(anchor, &p);
        geometry.max_distance = geometry.max_distance.max(d);
        geometry.active.push((i, d, p));
    }
    geometry
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowAux {
    /// `L_n = sum_i omega_i d(u_n, S_i)`; zero when no set is active.
    pub l_n: f64,
    /// `sum_i omega_i P_{S_i}(u_n)`; equals the anchor when no set is active.
    pub projection_average: RealVec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossEval {
    pub value: f64,
    pub subgrad: RealVec,
    pub aux: Option<WindowAux>,
}

/// The sliding-window loss anchored at the iterate `u_n`:
///
/// ```text
/// Theta(x) = sum_{i in I_n} (omega_i d(u_n, S_i) / L_n) d(x, S_i)
/// ```
///
/// where `I_n` holds the window sets that do not contain `u_n`.
#[derive(Debug, Clone)]
pub struct WindowLoss {
    sets: Vec<Hyperslab>,
    anchor: RealVec,
    active: Vec<usize>,
    omega: Vec<f64>,
    /// `omega_i d(u_n, S_i) / L_n` per active set.
    coefficients: Vec<f64>,
    l_n: f64,
    projection_average: RealVec,
    subgrad_at_anchor: RealVec,
}

impl WindowLoss {
    /// Window loss with uniform weights over the active sets.
    pub fn new(sets: Vec<Hyperslab>, anchor: RealVec) -> Result<Self> {
        Self::with_weights(sets, anchor, uniform_active_weights)
    }

    /// `weights` receives `#I_n` and must return convex weights in `(0, 1]`.
    pub fn with_weights(
        sets: Vec<Hyperslab>,
        anchor: RealVec,
        weights: impl FnOnce(usize) -> Result<Vec<f64>>,
    ) -> Result<Self> {
        if sets.is_empty() {
            return Err(ApsmError::EmptyWindow);
        }
        for s in &sets {
            ensure_len(s.a(), anchor.len())?;
        }
        let geometry = window_geometry(&sets, &anchor);
        let dim = anchor.len();
        if geometry.active.is_empty() {
            return Ok(Self {
                sets,
                projection_average: anchor.clone(),
                anchor,
                active: vec![],
                omega: vec![],
                coefficients: vec![],
                l_n: 0.0,
                subgrad_at_anchor: vec![0.0; dim],
            });
        }

        let omega = weights(geometry.active.len())?;
        if omega.len() != geometry.active.len() {
            return Err(ApsmError::DimensionMismatch {
                expected: geometry.active.len(),
                found: omega.len(),
            });
        }
        for &o in &omega {
            check_param("omega", o, o > 0.0 && o <= 1.0, "must lie in (0, 1]")?;
        }
        let total: f64 = omega.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ApsmError::WeightsNotConvex(total));
        }

        let l_n: f64 = omega
            .iter()
            .zip(&geometry.active)
            .map(|(o, (_, d, _))| o * d)
            .sum();
        let mut projection_average = vec![0.0; dim];
        let mut subgrad = vec![0.0; dim];
        for (o, (_, _, p)) in omega.iter().zip(&geometry.active) {
            for j in 0..dim {
                projection_average[j] += o * p[j];
                subgrad[j] += o * (anchor[j] - p[j]);
            }
        }
        subgrad.iter_mut().for_each(|g| *g /= l_n);
        let coefficients = omega
            .iter()
            .zip(&geometry.active)
            .map(|(o, (_, d, _))| o * d / l_n)
            .collect();

        Ok(Self {
            active: geometry.active.iter().map(|(i, _, _)| *i).collect(),
            sets,
            anchor,
            omega,
            coefficients,
            l_n,
            projection_average,
            subgrad_at_anchor: subgrad,
        })
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn sets(&self) -> &[Hyperslab] {
        &self.sets
    }

    /// Window positions of the active sets.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn l_n(&self) -> f64 {
        self.l_n
    }

    /// Membership in `lev Theta = ∩_{i in I_n} S_i`.
    pub fn in_zero_level_set(&self, x: &[f64]) -> bool {
        self.active.iter().all(|&i| self.sets[i].contains(x))
    }
}

impl ConvexLossOracle for WindowLoss {
    fn value(&self, x: &[f64]) -> Result<f64> {
        ensure_len(x, self.anchor.len())?;
        Ok(self
            .active
            .iter()
            .zip(&self.coefficients)
            .map(|(&i, c)| c * self.sets[i].distance(x))
            .sum())
    }

    /// Only the closed form at the anchor is provided.
    fn subgrad(&self, x: &[f64]) -> Result<RealVec> {
        if x != self.anchor.as_slice() {
            return Err(ApsmError::SubgradientOffAnchor);
        }
        Ok(self.subgrad_at_anchor.clone())
    }
}

pub fn window_loss_eval(window: &WindowLoss, x: &[f64]) -> Result<LossEval> {
    let subgrad = window.subgrad(x)?;
    Ok(LossEval {
        value: window.value(x)?,
        subgrad,
        aux: Some(WindowAux {
            l_n: window.l_n,
            projection_average: window.projection_average.clone(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::Hyperplane;
    use crate::vector::{dot, norm};

    fn slab(a: &[f64], d: f64, xi: f64) -> Hyperslab {
        Hyperslab::new(a.to_vec(), d, xi).unwrap()
    }

    #[test]
    fn phi_values() {
        let loss = SparsityLoss::new(vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(phi_value(&loss, &[0.5, 0.2]), 0.0);
        assert_eq!(phi_value(&loss, &[2.0, 1.0]), 2.0);
        assert_eq!(phi_value(&loss, &[0.6, 0.4]), 0.0);
    }

    #[test]
    fn phi_subgradients() {
        let loss = SparsityLoss::new(vec![1.0, 1.0], 1.0).unwrap();
        assert_eq!(phi_subgrad(&loss, &[2.0, 1.0]), vec![1.0, 1.0]);
        assert_eq!(phi_subgrad(&loss, &[0.1, 0.1]), vec![0.0, 0.0]);
        assert_eq!(phi_subgrad(&loss, &[0.6, 0.4]), vec![0.0, 0.0]);
        assert_eq!(phi_subgrad(&loss, &[-2.0, 0.0]), vec![-1.0, 0.0]);
    }

    #[test]
    fn phi_subgradient_inequality_at_kink() {
        use rand::{Rng, SeedableRng};
        let loss = SparsityLoss::new(vec![1.0, 1.0], 1.0).unwrap();
        let x = [2.0, 0.0];
        let g = phi_subgrad(&loss, &x);
        assert_eq!(g, vec![1.0, 0.0]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let y = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            let lin = phi_value(&loss, &x) + g[0] * (y[0] - x[0]) + g[1] * (y[1] - x[1]);
            assert!(phi_value(&loss, &y) >= lin - 1e-12);
        }
    }

    #[test]
    fn sparsity_bounds() {
        let loss = SparsityLoss::new(vec![0.5, 2.0, 1.0], 1.0).unwrap();
        assert_eq!(loss.bounds(), (0.5, 2.0));
        assert!(SparsityLoss::with_bounds(vec![0.5, 2.0], 1.0, 1.0, 2.0).is_err());
        assert!(SparsityLoss::with_bounds(vec![0.5, 2.0], 1.0, 0.1, 10.0).is_ok());
        assert!(SparsityLoss::new(vec![1.0, 0.0], 1.0).is_err());
        assert!(SparsityLoss::new(vec![1.0], 0.0).is_err());
    }

    #[test]
    fn uniform_weights() {
        assert_eq!(uniform_active_weights(4).unwrap(), vec![0.25; 4]);
        assert_eq!(uniform_active_weights(1).unwrap(), vec![1.0]);
        assert_eq!(uniform_active_weights(0), Err(ApsmError::NoActiveSets));
    }

    #[test]
    fn window_inactive() {
        let w = WindowLoss::new(
            vec![slab(&[1.0, 0.0], 0.0, 1.0), slab(&[0.0, 1.0], 0.0, 1.0)],
            vec![0.5, 0.5],
        )
        .unwrap();
        let eval = window_loss_eval(&w, &[0.5, 0.5]).unwrap();
        assert_eq!(eval.value, 0.0);
        assert_eq!(eval.subgrad, vec![0.0, 0.0]);
        assert_eq!(eval.aux.unwrap().l_n, 0.0);
        assert!(w.active().is_empty());
    }

    #[test]
    fn window_single_active_matches_distance_loss() {
        let s = slab(&[1.0, 2.0], 3.0, 0.25);
        let u = vec![-1.0, 0.5];
        let w = WindowLoss::new(vec![s.clone()], u.clone()).unwrap();
        let eval = window_loss_eval(&w, &u).unwrap();
        let direct = DistanceLoss::new(s.clone());
        assert!((eval.value - direct.value(&u).unwrap()).abs() < 1e-14);
        let g = direct.subgrad(&u).unwrap();
        assert!(eval
            .subgrad
            .iter()
            .zip(&g)
            .all(|(a, b)| (a - b).abs() < 1e-14));
        assert!((norm(&eval.subgrad) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn window_two_orthogonal_hyperplanes() {
        let sets = vec![slab(&[1.0, 0.0], 1.0, 0.0), slab(&[0.0, 1.0], 1.0, 0.0)];
        let w = WindowLoss::new(sets, vec![0.0, 0.0]).unwrap();
        let eval = window_loss_eval(&w, &[0.0, 0.0]).unwrap();
        // projections (1,0) and (0,1), distances 1: L = 1, value = 1
        let aux = eval.aux.unwrap();
        assert_eq!(aux.l_n, 1.0);
        assert_eq!(eval.value, 1.0);
        assert_eq!(eval.subgrad, vec![-0.5, -0.5]);
        assert_eq!(aux.projection_average, vec![0.5, 0.5]);
        assert_eq!(w.omega(), &[0.5, 0.5]);
    }

    #[test]
    fn window_errors() {
        assert!(matches!(
            WindowLoss::new(vec![], vec![0.0]),
            Err(ApsmError::EmptyWindow)
        ));
        let w = WindowLoss::new(vec![slab(&[1.0], 1.0, 0.0)], vec![0.0]).unwrap();
        assert_eq!(w.subgrad(&[0.5]), Err(ApsmError::SubgradientOffAnchor));
        assert!(w.value(&[0.5]).is_ok());
        let bad = WindowLoss::with_weights(
            vec![slab(&[1.0], 1.0, 0.0), slab(&[1.0], -1.0, 0.0)],
            vec![0.0],
            |_| Ok(vec![0.7, 0.7]),
        );
        assert!(matches!(bad, Err(ApsmError::WeightsNotConvex(_))));
    }

    #[test]
    fn distance_loss_subgradient() {
        let plane = Hyperplane::new(vec![0.0, 2.0], 2.0).unwrap();
        let loss = DistanceLoss::new(plane);
        assert_eq!(loss.value(&[3.0, 4.0]).unwrap(), 3.0);
        assert_eq!(loss.subgrad(&[3.0, 4.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(loss.subgrad(&[3.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(dot(&[1.0], &[1.0]), 1.0);
    }
}
