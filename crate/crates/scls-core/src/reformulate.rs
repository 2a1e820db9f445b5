//! The game instance, its sphere reformulation, and the variable maps.
//!
//! A game instance is `(X, y, z, gamma)`. The single-level form of the game
//! minimizes
//!
//! ```text
//!     v(w, alpha) = ‖(alpha·z + X·w)/(1 + alpha) − y‖²   s.t.  wᵀw = gamma·alpha,
//! ```
//!
//! and the substitution
//!
//! ```text
//!     w̃ = 2w / (√gamma (alpha+1)),   α̃ = (alpha−1)/(alpha+1)
//! ```
//!
//! carries feasible points onto the unit sphere `‖w̃‖² + α̃² = 1` while
//! preserving the objective, which becomes `q(r) = ‖L̂ r − (y − z/2)‖²` for
//! `r = (w̃, α̃)`. The inverse map
//!
//! ```text
//!     w = √gamma · w̃ / (1 − α̃),      alpha = (1 + α̃)/(1 − α̃)
//! ```
//!
//! has a pole at the apex `α̃ = 1`; the apex is never the unique sphere
//! optimum when the game has an optimal solution, so solvers landing within
//! the pole guard get a structured error carrying the attained objective
//! instead of an exploding predictor.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linops::{
    all_finite, axpy, dot, norm2, scale, DenseVector, ImplicitQuadratic, ScaledAugmentedOperator,
    SparseMatrix,
};
use crate::math;

/// Allowed deviation of `‖r‖² − 1` for a point accepted as on the sphere.
pub const SPHERE_TOL: f64 = 1e-10;

/// Relative tolerance on the coupling constraint `wᵀw = gamma·alpha`,
/// scaled by `max(1, wᵀw)` so large-norm predictors are not rejected by an
/// absolute threshold.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Pole guard for the inverse map: `|1 − α̃|` below this raises
/// [`Error::DegenerateApex`].
pub const APEX_POLE_EPS: f64 = 1e-9;

/// A game instance: features `X` (m×n), true labels `y`, provider targets
/// `z`, and the manipulation penalty `gamma > 0`.
///
/// `gamma` lives on the instance, not on individual calls, so a forward and
/// an inverse map can never disagree about the scaling.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Arc<SparseMatrix>,
    y: DenseVector,
    z: Arc<DenseVector>,
    gamma: f64,
}

impl Dataset {
    pub fn new(x: SparseMatrix, y: DenseVector, z: DenseVector, gamma: f64) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                what: "labels y",
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if z.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                what: "target labels z",
                expected: x.nrows(),
                got: z.len(),
            });
        }
        if !all_finite(&y) {
            return Err(Error::NonFinite("labels y"));
        }
        if !all_finite(&z) {
            return Err(Error::NonFinite("target labels z"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument("gamma must be finite and > 0"));
        }
        Ok(Self {
            x: Arc::new(x),
            y,
            z: Arc::new(z),
            gamma,
        })
    }

    pub fn x(&self) -> &SparseMatrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of samples `m`.
    pub fn num_samples(&self) -> usize {
        self.x.nrows()
    }

    /// Number of features `n`.
    pub fn num_features(&self) -> usize {
        self.x.ncols()
    }
}

/// A learner predictor `w` with its coupled scalar `alpha >= 0`.
///
/// Whether `wᵀw = gamma·alpha` actually holds depends on the owning
/// instance's `gamma`; operations that need feasibility check it against
/// [`FEASIBILITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpgPoint {
    w: DenseVector,
    alpha: f64,
}

impl SpgPoint {
    pub fn new(w: DenseVector, alpha: f64) -> Result<Self> {
        if !all_finite(&w) || !alpha.is_finite() {
            return Err(Error::NonFinite("game point"));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidArgument("alpha must be >= 0"));
        }
        Ok(Self { w, alpha })
    }

    /// The zero predictor with `alpha = 0`, feasible for every `gamma`.
    pub fn origin(n: usize) -> Self {
        Self {
            w: vec![0.0; n],
            alpha: 0.0,
        }
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `|wᵀw − gamma·alpha|`, the coupling-constraint violation.
    pub fn feasibility_gap(&self, gamma: f64) -> f64 {
        math::abs(dot(&self.w, &self.w) - gamma * self.alpha)
    }

    /// Feasibility under the relative tolerance convention.
    pub fn is_feasible(&self, gamma: f64) -> bool {
        self.feasibility_gap(gamma) <= FEASIBILITY_TOL * dot(&self.w, &self.w).max(1.0)
    }
}

/// A point `r = (w̃, α̃)` on the unit sphere in `n+1` dimensions, with `α̃`
/// stored last. Construction enforces `| ‖r‖² − 1 | <= SPHERE_TOL`, so
/// downstream code never sees an off-sphere vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereVec {
    r: DenseVector,
}

impl SphereVec {
    pub fn new(r: DenseVector) -> Result<Self> {
        if r.len() < 2 {
            return Err(Error::InvalidArgument("sphere point needs dimension >= 2"));
        }
        if !all_finite(&r) {
            return Err(Error::NonFinite("sphere point"));
        }
        let norm_sq = dot(&r, &r);
        if math::abs(norm_sq - 1.0) > SPHERE_TOL {
            return Err(Error::OffSphere { norm_sq });
        }
        Ok(Self { r })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn from_unnormalized(mut v: DenseVector) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::InvalidArgument("sphere point needs dimension >= 2"));
        }
        if !all_finite(&v) {
            return Err(Error::NonFinite("sphere point"));
        }
        let n = norm2(&v);
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector"));
        }
        scale(&mut v, 1.0 / n);
        Ok(Self { r: v })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// The `w̃` block.
    pub fn w_tilde(&self) -> &[f64] {
        &self.r[..self.r.len() - 1]
    }

    /// The final coordinate `α̃`.
    pub fn alpha_tilde(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn into_vec(self) -> DenseVector {
        self.r
    }
}

/// The compact sphere problem `q(r) = rᵀH r + 2 gᵀ r + p` represented through
/// `L̂` only: `H = L̂ᵀL̂` is never formed.
#[derive(Debug, Clone)]
pub struct SclsProblem {
    lhat: ScaledAugmentedOperator,
    rhs: DenseVector,
    g: DenseVector,
    p: f64,
    g_norm: f64,
}

/// Assembles the sphere problem from a game instance:
/// `L̂ = [ (√gamma/2)X | z/2 ]`, `rhs = y − z/2`, `g = L̂ᵀ(z/2 − y) = −L̂ᵀ rhs`,
/// `p = ‖z/2 − y‖²`. No dense `n×n` object is allocated.
pub fn build_scls(d: &Dataset) -> Result<SclsProblem> {
    let lhat = ScaledAugmentedOperator::new(d.x.clone(), d.z.clone(), d.gamma)?;
    let rhs: DenseVector = d
        .y
        .iter()
        .zip(d.z.iter())
        .map(|(yi, zi)| yi - 0.5 * zi)
        .collect();
    let mut g = lhat.apply_transpose(&rhs)?;
    scale(&mut g, -1.0);
    if !all_finite(&g) {
        return Err(Error::NonFinite("linear term g"));
    }
    let p = dot(&rhs, &rhs);
    let g_norm = norm2(&g);
    Ok(SclsProblem {
        lhat,
        rhs,
        g,
        p,
        g_norm,
    })
}

impl SclsProblem {
    pub fn lhat(&self) -> &ScaledAugmentedOperator {
        &self.lhat
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn g_norm(&self) -> f64 {
        self.g_norm
    }

    /// `n + 1`.
    pub fn dim(&self) -> usize {
        self.lhat.ncols()
    }

    /// `q(r)` through the residual form `‖L̂ r − rhs‖²`.
    pub fn objective_residual(&self, r: &[f64]) -> f64 {
        let mut work = vec![0.0; self.lhat.nrows()];
        self.lhat.apply_into(r, &mut work).expect("dimension");
        axpy(-1.0, &self.rhs, &mut work);
        dot(&work, &work)
    }

    /// `q(r)` through the quadratic form `rᵀHr + 2gᵀr + p`. Costs one
    /// implicit Hessian application; used to cross-check the residual route.
    pub fn objective_quadratic(&self, r: &[f64]) -> f64 {
        let hr = self.lhat.hessian_apply(r).expect("dimension");
        dot(r, &hr) + 2.0 * dot(&self.g, r) + self.p
    }
}

impl ImplicitQuadratic for SclsProblem {
    fn dim(&self) -> usize {
        self.lhat.ncols()
    }

    fn hessian_apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut work = vec![0.0; self.lhat.nrows()];
        self.lhat
            .hessian_apply_with(x, &mut work, out)
            .expect("dimension");
    }

    fn linear_term(&self) -> &[f64] {
        &self.g
    }

    fn constant_term(&self) -> f64 {
        self.p
    }

    fn objective(&self, r: &[f64]) -> f64 {
        self.objective_residual(r)
    }
}

/// The game objective `v(w, alpha) = ‖(alpha·z + X·w)/(1+alpha) − y‖²`.
///
/// The point must satisfy the coupling constraint within
/// [`FEASIBILITY_TOL`].
pub fn eval_spg_objective(d: &Dataset, pt: &SpgPoint) -> Result<f64> {
    if pt.w.len() != d.num_features() {
        return Err(Error::DimensionMismatch {
            what: "predictor w",
            expected: d.num_features(),
            got: pt.w.len(),
        });
    }
    if !pt.is_feasible(d.gamma) {
        return Err(Error::InfeasiblePoint {
            gap: pt.feasibility_gap(d.gamma),
        });
    }
    let mut xw = vec![0.0; d.num_samples()];
    d.x.apply_into(&pt.w, &mut xw)?;
    let denom = 1.0 + pt.alpha;
    let mut acc = 0.0;
    for i in 0..xw.len() {
        let res = (pt.alpha * d.z[i] + xw[i]) / denom - d.y[i];
        acc += res * res;
    }
    Ok(acc)
}

/// The sphere objective `q(r) = ‖L̂ r − rhs‖²`. Off-sphere inputs are
/// unrepresentable: [`SphereVec`] construction already rejects them.
pub fn eval_scls_objective(p: &SclsProblem, r: &SphereVec) -> f64 {
    p.objective_residual(r.as_slice())
}

/// Forward map (game point to sphere): `w̃ = 2w/(√gamma(alpha+1))`,
/// `α̃ = (alpha−1)/(alpha+1)`. Preserves the objective.
pub fn map_to_sphere(d: &Dataset, pt: &SpgPoint) -> Result<SphereVec> {
    if pt.w.len() != d.num_features() {
        return Err(Error::DimensionMismatch {
            what: "predictor w",
            expected: d.num_features(),
            got: pt.w.len(),
        });
    }
    if !pt.is_feasible(d.gamma) {
        return Err(Error::InfeasiblePoint {
            gap: pt.feasibility_gap(d.gamma),
        });
    }
    let denom = pt.alpha + 1.0;
    let coeff = 2.0 / (math::sqrt(d.gamma) * denom);
    let mut r = Vec::with_capacity(pt.w.len() + 1);
    r.extend(pt.w.iter().map(|wi| coeff * wi));
    r.push((pt.alpha - 1.0) / denom);
    // Feasible points land on the sphere up to roundoff; renormalize so the
    // invariant holds exactly for downstream consumers.
    SphereVec::from_unnormalized(r)
}

/// Inverse map (sphere point to game point): `w = √gamma·w̃/(1−α̃)`,
/// `alpha = (1+α̃)/(1−α̃)`. Preserves the objective.
///
/// Within [`APEX_POLE_EPS`] of the apex `α̃ = 1` the map is refused and the
/// attained sphere objective is reported through [`Error::DegenerateApex`].
pub fn recover_spg(d: &Dataset, r: &SphereVec) -> Result<SpgPoint> {
    if r.dim() != d.num_features() + 1 {
        return Err(Error::DimensionMismatch {
            what: "sphere point",
            expected: d.num_features() + 1,
            got: r.dim(),
        });
    }
    let alpha_tilde = r.alpha_tilde();
    let one_minus = 1.0 - alpha_tilde;
    if math::abs(one_minus) < APEX_POLE_EPS {
        let p = build_scls(d)?;
        return Err(Error::DegenerateApex {
            value: eval_scls_objective(&p, r),
        });
    }
    let coeff = math::sqrt(d.gamma) / one_minus;
    let w: DenseVector = r.w_tilde().iter().map(|wi| coeff * wi).collect();
    // alpha >= 0 holds up to roundoff since |α̃| <= 1 on the sphere.
    let alpha = ((1.0 + alpha_tilde) / one_minus).max(0.0);
    SpgPoint::new(w, alpha)
}
