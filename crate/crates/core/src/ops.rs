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

//! Operator algebra for strongly attracting quasi-nonexpansive mappings.
//!
//! A mapping `T` with fixed point set `Fix(T)` is `eta`-attracting when, for
//! every `x` and every `v` in `Fix(T)`,
//!
//! ```text
//! eta * ||x - T(x)||^2 <= ||x - v||^2 - ||T(x) - v||^2
//! ```
//!
//! This module provides the metric projections used throughout the crate,
//! relaxation, composition, relaxed subgradient projections of convex losses,
//! and the hard/soft constraint operator for inconsistent prior information.
//! Operators are immutable and `Send + Sync`; `apply` has no side effects.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_param, ApsmError, Result};
use crate::loss::ConvexLossOracle;
use crate::sparse::Hyperslab;
use crate::vector::{axpy, dot, ensure_finite, norm, norm_sq, relax_towards, RealVec};

/// Relative threshold under which a subgradient is treated as zero.
pub const SUBGRADIENT_ZERO_TOL: f64 = 1e-12;

/// A nonempty closed convex set with a computable metric projection.
pub trait ConvexSet: Send + Sync + fmt::Debug {
    fn project(&self, x: &[f64]) -> RealVec;
    fn contains(&self, x: &[f64]) -> bool;

    fn distance(&self, x: &[f64]) -> f64 {
        crate::vector::dist(x, &self.project(x))
    }
}

/// Projection of `x` onto the hyperplane `{y : a^T y = b}`.
pub fn project_hyperplane(x: &[f64], a: &[f64], b: f64) -> Result<RealVec> {
    let a_sq = norm_sq(a);
    if a_sq == 0.0 {
        return Err(ApsmError::DegenerateHyperplane);
    }
    let mut y = x.to_vec();
    axpy((b - dot(a, x)) / a_sq, a, &mut y);
    Ok(y)
}

/// Projection of `x` onto a hyperslab. Points with `|d - a^T x| <= xi` are
/// returned unchanged; otherwise `x` moves onto the nearer bounding hyperplane.
pub fn project_hyperslab(x: &[f64], slab: &Hyperslab) -> RealVec {
    let mut y = x.to_vec();
    let shift = slab.excess(x);
    if shift != 0.0 {
        axpy(shift / slab.a_norm_sq(), slab.a(), &mut y);
    }
    y
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    a: RealVec,
    b: f64,
}

impl Hyperplane {
    pub fn new(a: RealVec, b: f64) -> Result<Self> {
        if norm_sq(&a) == 0.0 {
            return Err(ApsmError::DegenerateHyperplane);
        }
        ensure_finite(&a, "hyperplane normal", None)?;
        check_param("b", b, true, "must be finite")?;
        Ok(Self { a, b })
    }
}

impl ConvexSet for Hyperplane {
    fn project(&self, x: &[f64]) -> RealVec {
        let mut y = x.to_vec();
        axpy(
            (self.b - dot(&self.a, x)) / norm_sq(&self.a),
            &self.a,
            &mut y,
        );
        y
    }

    fn contains(&self, x: &[f64]) -> bool {
        let scale = 1.0 + self.b.abs();
        (dot(&self.a, x) - self.b).abs() <= 1e-10 * scale
    }
}

/// The closed halfspace `{y : a^T y <= b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    a: RealVec,
    b: f64,
}

impl Halfspace {
    pub fn new(a: RealVec, b: f64) -> Result<Self> {
        if norm_sq(&a) == 0.0 {
            return Err(ApsmError::DegenerateHyperplane);
        }
        ensure_finite(&a, "halfspace normal", None)?;
        check_param("b", b, true, "must be finite")?;
        Ok(Self { a, b })
    }
}

impl ConvexSet for Halfspace {
    fn project(&self, x: &[f64]) -> RealVec {
        let excess = dot(&self.a, x) - self.b;
        let mut y = x.to_vec();
        if excess > 0.0 {
            axpy(-excess / norm_sq(&self.a), &self.a, &mut y);
        }
        y
    }

    fn contains(&self, x: &[f64]) -> bool {
        dot(&self.a, x) <= self.b
    }
}

/// The whole space; its projection is the identity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WholeSpace;

impl ConvexSet for WholeSpace {
    fn project(&self, x: &[f64]) -> RealVec {
        x.to_vec()
    }

    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
}

impl ConvexSet for Hyperslab {
    fn project(&self, x: &[f64]) -> RealVec {
        project_hyperslab(x, self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        Hyperslab::contains(self, x)
    }

    fn distance(&self, x: &[f64]) -> f64 {
        Hyperslab::distance(self, x)
    }
}

/// Attracting constant of an operator. The identity satisfies the defining
/// inequality for every `eta`, so it carries no finite constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attraction {
    Unbounded,
    Eta(f64),
}

impl Attraction {
    pub fn eta(self) -> Option<f64> {
        match self {
            Attraction::Unbounded => None,
            Attraction::Eta(e) => Some(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    RelaxedProjection,
    SubgradientProjection,
    Composition,
    InconsistentPrior,
    Identity,
    Custom,
}

pub trait AttractingOperator: Send + Sync {
    fn apply(&self, x: &[f64]) -> Result<RealVec>;
    fn attraction(&self) -> Attraction;
    fn kind(&self) -> OperatorKind;

    /// Membership in `Fix(T)` when it is known in closed form.
    fn is_fixed_point(&self, _x: &[f64]) -> Option<bool> {
        None
    }

    fn eta(&self) -> Option<f64> {
        self.attraction().eta()
    }
}

pub type Operator = Arc<dyn AttractingOperator>;

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl AttractingOperator for Identity {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        Ok(x.to_vec())
    }

    fn attraction(&self) -> Attraction {
        Attraction::Unbounded
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Identity
    }

    fn is_fixed_point(&self, _x: &[f64]) -> Option<bool> {
        Some(true)
    }
}

pub fn identity() -> Operator {
    Arc::new(Identity)
}

/// `I + alpha (P_C - I)`; `alpha = 1` is the plain metric projection.
#[derive(Debug, Clone)]
pub struct RelaxedProjection<S> {
    set: S,
    alpha: f64,
}

impl<S: ConvexSet> RelaxedProjection<S> {
    pub fn new(set: S, alpha: f64) -> Result<Self> {
        check_relaxation(alpha)?;
        Ok(Self { set, alpha })
    }

    pub fn set(&self) -> &S {
        &self.set
    }
}

impl<S: ConvexSet> AttractingOperator for RelaxedProjection<S> {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        let p = self.set.project(x);
        if self.alpha == 1.0 {
            return Ok(p);
        }
        Ok(relax_towards(x, &p, self.alpha))
    }

    fn attraction(&self) -> Attraction {
        Attraction::Eta((2.0 - self.alpha) / self.alpha)
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::RelaxedProjection
    }

    fn is_fixed_point(&self, x: &[f64]) -> Option<bool> {
        Some(self.set.contains(x))
    }
}

/// Metric projection onto `set` as a firmly (1-attracting) nonexpansive operator.
pub fn projection<S: ConvexSet + 'static>(set: S) -> Operator {
    Arc::new(RelaxedProjection { set, alpha: 1.0 })
}

fn check_relaxation(alpha: f64) -> Result<()> {
    check_param(
        "alpha",
        alpha,
        alpha > 0.0 && alpha < 2.0,
        "must lie in (0, 2)",
    )
}

/// `I + alpha (T - I)` for an arbitrary attracting `T`.
struct Relaxed {
    inner: Operator,
    alpha: f64,
    eta: f64,
}

impl AttractingOperator for Relaxed {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        let t = self.inner.apply(x)?;
        Ok(relax_towards(x, &t, self.alpha))
    }

    fn attraction(&self) -> Attraction {
        Attraction::Eta(self.eta)
    }

    fn kind(&self) -> OperatorKind {
        match self.inner.kind() {
            k @ (OperatorKind::RelaxedProjection | OperatorKind::SubgradientProjection) => k,
            _ => OperatorKind::Custom,
        }
    }

    fn is_fixed_point(&self, x: &[f64]) -> Option<bool> {
        self.inner.is_fixed_point(x)
    }
}

/// Relaxation `I + alpha (T - I)` of an `eta`-attracting operator.
///
/// Writing `T = (1 - b) I + b R` with `b = 1 / (1 + eta)` gives a relaxed map
/// that is `(1 + eta - alpha) / alpha`-attracting whenever `alpha < 1 + eta`.
/// For a metric projection (`eta = 1`) this is `(2 - alpha) / alpha`.
pub fn relax(op: Operator, alpha: f64) -> Result<Operator> {
    check_relaxation(alpha)?;
    let eta = match op.attraction() {
        Attraction::Unbounded => return Ok(op),
        Attraction::Eta(eta) => eta,
    };
    check_param(
        "alpha",
        alpha,
        alpha < 1.0 + eta,
        "relaxation destroys the attracting property of the operator",
    )?;
    if alpha == 1.0 {
        return Ok(op);
    }
    Ok(Arc::new(Relaxed {
        eta: (1.0 + eta - alpha) / alpha,
        inner: op,
        alpha,
    }))
}

/// One step of the relaxed subgradient projection of `loss` at `x`.
///
/// Inside the zero level set, or where the selected subgradient vanishes
/// (relative to `1 + ||x||`), `x` is returned unchanged.
pub fn subgradient_projection_step(
    loss: &dyn ConvexLossOracle,
    x: &[f64],
    lambda: f64,
) -> Result<RealVec> {
    let value = loss.value(x)?;
    if !value.is_finite() {
        return Err(ApsmError::NonFinite {
            what: "loss value",
            step: None,
        });
    }
    if value <= 0.0 {
        return Ok(x.to_vec());
    }
    let g = loss.subgrad(x)?;
    ensure_finite(&g, "subgradient", None)?;
    let g_sq = norm_sq(&g);
    if g_sq.sqrt() <= SUBGRADIENT_ZERO_TOL * (1.0 + norm(x)) {
        return Ok(x.to_vec());
    }
    let mut y = x.to_vec();
    axpy(-lambda * value / g_sq, &g, &mut y);
    Ok(y)
}

/// `I + lambda (T_Theta - I)` for a convex loss with nonempty zero level set.
pub struct SubgradientProjection<L> {
    loss: L,
    lambda: f64,
}

impl<L: ConvexLossOracle> SubgradientProjection<L> {
    pub fn new(loss: L, lambda: f64) -> Result<Self> {
        check_param(
            "lambda",
            lambda,
            lambda > 0.0 && lambda < 2.0,
            "must lie in (0, 2)",
        )?;
        Ok(Self { loss, lambda })
    }

    pub fn loss(&self) -> &L {
        &self.loss
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl<L: ConvexLossOracle> AttractingOperator for SubgradientProjection<L> {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        subgradient_projection_step(&self.loss, x, self.lambda)
    }

    fn attraction(&self) -> Attraction {
        Attraction::Eta((2.0 - self.lambda) / self.lambda)
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::SubgradientProjection
    }

    fn is_fixed_point(&self, x: &[f64]) -> Option<bool> {
        self.loss.value(x).ok().map(|v| v <= 0.0)
    }
}

/// `T1 ∘ T2`, valid when the two fixed point sets intersect (not checked).
struct Composition {
    outer: Operator,
    inner: Operator,
    attraction: Attraction,
}

impl AttractingOperator for Composition {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        let y = self.inner.apply(x)?;
        self.outer.apply(&y)
    }

    fn attraction(&self) -> Attraction {
        self.attraction
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Composition
    }

    fn is_fixed_point(&self, x: &[f64]) -> Option<bool> {
        match (self.outer.is_fixed_point(x), self.inner.is_fixed_point(x)) {
            (Some(a), Some(b)) => Some(a && b),
            (Some(false), None) | (None, Some(false)) => Some(false),
            _ => None,
        }
    }
}

/// Composition `outer ∘ inner` with constant `eta1 eta2 / (eta1 + eta2)`.
/// An identity factor is absorbed and the partner is returned as is.
pub fn compose_attracting(outer: Operator, inner: Operator) -> Operator {
    let attraction = match (outer.attraction(), inner.attraction()) {
        (Attraction::Unbounded, _) => return inner,
        (_, Attraction::Unbounded) => return outer,
        (Attraction::Eta(e1), Attraction::Eta(e2)) => Attraction::Eta(e1 * e2 / (e1 + e2)),
    };
    Arc::new(Composition {
        outer,
        inner,
        attraction,
    })
}

/// A hard constraint `Gamma` together with soft constraints `C_1..C_M`
/// that may have empty intersection.
#[derive(Debug, Clone)]
pub struct InconsistentPriorSpec {
    pub hard: Arc<dyn ConvexSet>,
    pub soft: Vec<Arc<dyn ConvexSet>>,
    pub betas: Vec<f64>,
    pub lambda: f64,
}

/// `x -> P_Gamma(x - lambda * sum_m beta_m (x - P_{C_m}(x)))`.
///
/// The gradient of the proximity function `p = sum_m beta_m d^2(., C_m)` is
/// `2 sum_m beta_m (I - P_{C_m})`; the step here moves along half of it, so
/// the operator is `(1 - lambda/2)`-attracting for `lambda` in `(0, 2)`.
pub struct InconsistentPrior {
    spec: InconsistentPriorSpec,
}

impl InconsistentPrior {
    pub fn new(spec: InconsistentPriorSpec) -> Result<Self> {
        if spec.soft.is_empty() {
            return Err(ApsmError::NoSoftConstraints);
        }
        if spec.soft.len() != spec.betas.len() {
            return Err(ApsmError::DimensionMismatch {
                expected: spec.soft.len(),
                found: spec.betas.len(),
            });
        }
        for &beta in &spec.betas {
            check_param(
                "beta",
                beta,
                beta > 0.0 && beta <= 1.0,
                "must lie in (0, 1]",
            )?;
        }
        let total: f64 = spec.betas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ApsmError::WeightsNotConvex(total));
        }
        check_param(
            "lambda",
            spec.lambda,
            spec.lambda > 0.0 && spec.lambda < 2.0,
            "must lie in (0, 2)",
        )?;
        Ok(Self { spec })
    }

    /// Gradient of the proximity function at `x`.
    pub fn proximity_gradient(&self, x: &[f64]) -> RealVec {
        let mut grad = vec![0.0; x.len()];
        for (set, &beta) in self.spec.soft.iter().zip(&self.spec.betas) {
            let p = set.project(x);
            for ((g, xi), pi) in grad.iter_mut().zip(x).zip(&p) {
                *g += 2.0 * beta * (xi - pi);
            }
        }
        grad
    }
}

impl AttractingOperator for InconsistentPrior {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        let mut y = x.to_vec();
        axpy(-0.5 * self.spec.lambda, &self.proximity_gradient(x), &mut y);
        ensure_finite(&y, "proximity step", None)?;
        Ok(self.spec.hard.project(&y))
    }

    fn attraction(&self) -> Attraction {
        Attraction::Eta(1.0 - self.spec.lambda / 2.0)
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::InconsistentPrior
    }
}

pub fn inconsistent_prior_operator(spec: InconsistentPriorSpec) -> Result<Operator> {
    Ok(Arc::new(InconsistentPrior::new(spec)?))
}

type MapFn = dyn Fn(&[f64]) -> RealVec + Send + Sync;
type MemberFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A user-supplied map with a declared attracting constant.
pub struct CustomOperator {
    map: Box<MapFn>,
    eta: f64,
    membership: Option<Box<MemberFn>>,
}

impl CustomOperator {
    pub fn new(eta: f64, map: impl Fn(&[f64]) -> RealVec + Send + Sync + 'static) -> Result<Self> {
        check_param("eta", eta, eta > 0.0, "must be positive")?;
        Ok(Self {
            map: Box::new(map),
            eta,
            membership: None,
        })
    }

    pub fn with_membership(mut self, f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.membership = Some(Box::new(f));
        self
    }
}

impl AttractingOperator for CustomOperator {
    fn apply(&self, x: &[f64]) -> Result<RealVec> {
        let y = (self.map)(x);
        ensure_finite(&y, "custom operator output", None)?;
        Ok(y)
    }

    fn attraction(&self) -> Attraction {
        Attraction::Eta(self.eta)
    }

    fn kind(&self) -> OperatorKind {
        OperatorKind::Custom
    }

    fn is_fixed_point(&self, x: &[f64]) -> Option<bool> {
        self.membership.as_ref().map(|f| f(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::{DistanceLoss, SparsityLoss};
    use crate::vector::dist;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn hyperplane_projection() {
        let x = [4.0, 1.0];
        let y = project_hyperplane(&x, &[1.0, 0.0], 2.0).unwrap();
        assert_eq!(y, vec![2.0, 1.0]);
        // independent check: on the plane and displaced along the normal
        assert!((y[0] - 2.0).abs() < 1e-12);
        assert_eq!(y[1], x[1]);

        assert_eq!(
            project_hyperplane(&[2.0, 5.0], &[1.0, 0.0], 2.0).unwrap(),
            vec![2.0, 5.0]
        );
        assert_eq!(
            project_hyperplane(&[1.0, 1.0], &[0.0, 0.0], 1.0),
            Err(ApsmError::DegenerateHyperplane)
        );
    }

    /// Minimizes `||x - y||` over the slab by scanning `y = x + t a` on a grid
    /// and refining by golden-section search.
    fn slab_oracle(x: &[f64], slab: &Hyperslab) -> RealVec {
        let at =
            |t: f64| -> RealVec { x.iter().zip(slab.a()).map(|(xi, ai)| xi + t * ai).collect() };
        let penalty = |t: f64| {
            let y = at(t);
            let r = (slab.d() - dot(slab.a(), &y)).abs();
            t.abs()
                + if r <= slab.xi() {
                    0.0
                } else {
                    1e6 * (r - slab.xi())
                }
        };
        let (mut lo, mut hi) = (-100.0_f64, 100.0_f64);
        for _ in 0..300 {
            let m1 = lo + (hi - lo) * 0.382;
            let m2 = lo + (hi - lo) * 0.618;
            if penalty(m1) < penalty(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        at(0.5 * (lo + hi))
    }

    #[test]
    fn hyperslab_projection() {
        let slab = Hyperslab::new(vec![1.0, 0.0], 2.0, 0.5).unwrap();
        let cases = [
            ([4.0, 1.0], [2.5, 1.0]),
            ([1.8, 7.0], [1.8, 7.0]),
            ([0.0, 0.0], [1.5, 0.0]),
        ];
        for (x, expected) in cases {
            let y = project_hyperslab(&x, &slab);
            assert!(close(&y, &expected, 1e-12), "{y:?}");
            assert!(close(&y, &slab_oracle(&x, &slab), 1e-6));
        }
        // boundary ties stay put
        assert_eq!(project_hyperslab(&[2.5, 3.0], &slab), vec![2.5, 3.0]);
    }

    #[test]
    fn relaxation_constants() {
        let c = Hyperplane::new(vec![1.0, 0.0], 1.0).unwrap();
        let p = projection(c.clone());
        let r1 = relax(p.clone(), 1.0).unwrap();
        assert_eq!(r1.eta(), Some(1.0));
        assert_eq!(
            r1.apply(&[3.0, 2.0]).unwrap(),
            p.apply(&[3.0, 2.0]).unwrap()
        );

        let half = relax(p.clone(), 0.5).unwrap();
        assert_eq!(half.eta(), Some(3.0));
        assert_eq!(half.apply(&[3.0, 2.0]).unwrap(), vec![2.0, 2.0]);
        assert_eq!(RelaxedProjection::new(c, 0.5).unwrap().eta(), Some(3.0));

        assert!(relax(p.clone(), 2.0).is_err());
        assert!(relax(p.clone(), 0.0).is_err());
        // a 1/3-attracting operator cannot be over-relaxed past 4/3
        let weak = relax(p, 1.5).unwrap();
        assert!((weak.eta().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(relax(weak, 1.4).is_err());
    }

    #[test]
    fn relaxing_identity_is_identity() {
        let op = relax(identity(), 0.7).unwrap();
        assert_eq!(op.kind(), OperatorKind::Identity);
    }

    #[test]
    fn subgradient_projection_on_sparsity_loss() {
        let loss = SparsityLoss::new(vec![1.0, 1.0], 1.0).unwrap();
        let x = [2.0, 1.0];
        let y = subgradient_projection_step(&loss, &x, 1.0).unwrap();
        assert!(close(&y, &[1.0, 0.0], 1e-15));
        assert_eq!(loss.value(&y).unwrap(), 0.0);
        // displacement equals value / ||g||
        assert!((dist(&x, &y) - 2.0 / 2f64.sqrt()).abs() < 1e-12);

        let half = subgradient_projection_step(&loss, &x, 0.5).unwrap();
        assert!(close(&half, &[1.5, 0.5], 1e-15));

        let inside = [0.3, 0.1];
        assert_eq!(
            subgradient_projection_step(&loss, &inside, 1.0).unwrap(),
            inside.to_vec()
        );
    }

    #[test]
    fn subgradient_projection_rejects_non_finite() {
        struct Broken;
        impl ConvexLossOracle for Broken {
            fn value(&self, _x: &[f64]) -> Result<f64> {
                Ok(f64::INFINITY)
            }
            fn subgrad(&self, x: &[f64]) -> Result<RealVec> {
                Ok(vec![1.0; x.len()])
            }
        }
        assert!(matches!(
            subgradient_projection_step(&Broken, &[1.0], 1.0),
            Err(ApsmError::NonFinite { .. })
        ));
    }

    #[test]
    fn subgradient_projection_of_distance_is_projection() {
        let slab = Hyperslab::new(vec![1.0, -2.0, 0.5], 0.7, 0.1).unwrap();
        let loss = DistanceLoss::new(slab.clone());
        for x in [[3.0, 1.0, -2.0], [-1.0, 4.0, 0.0], [0.2, 0.0, 0.1]] {
            let y = subgradient_projection_step(&loss, &x, 1.0).unwrap();
            assert!(close(&y, &project_hyperslab(&x, &slab), 1e-12));
            assert!(slab.distance(&y) <= 1e-12);
        }
    }

    #[test]
    fn composition_constants() {
        let a = projection(Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap());
        let b = projection(Hyperplane::new(vec![0.0, 1.0], 0.0).unwrap());
        assert_eq!(compose_attracting(a.clone(), b.clone()).eta(), Some(0.5));

        let a3 = relax(a.clone(), 0.5).unwrap();
        let c = compose_attracting(a3, b);
        assert_eq!(c.eta(), Some(0.75));
        assert_eq!(c.kind(), OperatorKind::Composition);
        assert_eq!(c.apply(&[2.0, 2.0]).unwrap(), vec![1.0, 0.0]);

        let with_id = compose_attracting(a.clone(), identity());
        assert_eq!(with_id.eta(), Some(1.0));
        assert_eq!(with_id.apply(&[3.0, 4.0]).unwrap(), vec![0.0, 4.0]);
        assert_eq!(compose_attracting(identity(), a).eta(), Some(1.0));
    }

    fn hyperplane(a: [f64; 2], b: f64) -> Arc<dyn ConvexSet> {
        Arc::new(Hyperplane::new(a.to_vec(), b).unwrap())
    }

    #[test]
    fn inconsistent_prior_examples() {
        // symmetric soft constraints cancel
        let spec = InconsistentPriorSpec {
            hard: Arc::new(WholeSpace),
            soft: vec![hyperplane([1.0, 0.0], 1.0), hyperplane([1.0, 0.0], -1.0)],
            betas: vec![0.5, 0.5],
            lambda: 1.0,
        };
        let op = InconsistentPrior::new(spec).unwrap();
        assert_eq!(op.proximity_gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(op.apply(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(op.eta(), Some(0.5));

        // Gamma = {x2 = 0}, C = {x1 >= 2}: p'(0) = 2 (0 - (2, 0)) = (-4, 0),
        // half step lands at (2, 0), already in Gamma.
        let spec = InconsistentPriorSpec {
            hard: hyperplane([0.0, 1.0], 0.0),
            soft: vec![Arc::new(Halfspace::new(vec![-1.0, 0.0], -2.0).unwrap())],
            betas: vec![1.0],
            lambda: 1.0,
        };
        let op = InconsistentPrior::new(spec).unwrap();
        assert_eq!(op.proximity_gradient(&[0.0, 0.0]), vec![-4.0, 0.0]);
        assert_eq!(op.apply(&[0.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        // a point of Gamma ∩ C is fixed
        assert_eq!(op.apply(&[5.0, 0.0]).unwrap(), vec![5.0, 0.0]);
    }

    #[test]
    fn inconsistent_prior_validation() {
        let mk = |soft: Vec<Arc<dyn ConvexSet>>, betas: Vec<f64>, lambda| {
            InconsistentPrior::new(InconsistentPriorSpec {
                hard: Arc::new(WholeSpace),
                soft,
                betas,
                lambda,
            })
        };
        assert!(matches!(
            mk(vec![], vec![], 1.0),
            Err(ApsmError::NoSoftConstraints)
        ));
        assert!(matches!(
            mk(vec![hyperplane([1.0, 0.0], 0.0)], vec![0.9], 1.0),
            Err(ApsmError::WeightsNotConvex(_))
        ));
        assert!(mk(vec![hyperplane([1.0, 0.0], 0.0)], vec![1.0], 2.0).is_err());
    }

    #[test]
    fn custom_operator_membership() {
        let op = CustomOperator::new(1.0, |x| x.iter().map(|v| v.max(0.0)).collect())
            .unwrap()
            .with_membership(|x| x.iter().all(|v| *v >= 0.0));
        assert_eq!(op.apply(&[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert_eq!(op.is_fixed_point(&[1.0, 2.0]), Some(true));
        assert_eq!(op.kind(), OperatorKind::Custom);
        assert!(CustomOperator::new(0.0, |x| x.to_vec()).is_err());
    }
}
