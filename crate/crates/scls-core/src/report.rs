//! Solution reports shared by all solver engines.

use core::time::Duration;

/// Which engine produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Krylov,
    Rtr,
    Oracle,
}

impl core::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolverKind::Krylov => f.write_str("krylov"),
            SolverKind::Rtr => f.write_str("rtr"),
            SolverKind::Oracle => f.write_str("oracle"),
        }
    }
}

/// Outcome of one solve.
///
/// `kkt_residual` is `‖(H + λ*·I) r + g‖ / max(1, ‖g‖)` at the returned point,
/// the relative residual of the first optimality condition of the sphere
/// problem. `matvecs` counts applications of the implicit Hessian (objective
/// evaluations through the residual path count as one each), so
/// `matvecs >= iterations` always holds. `wall_time` is zero when the crate
/// is built without `std`.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solver: SolverKind,
    /// Final sphere objective `q(r)`.
    pub objective: f64,
    /// Multiplier estimate `λ*` from the KKT system.
    pub lambda_star: f64,
    /// Relative KKT residual at the returned point.
    pub kkt_residual: f64,
    /// Implicit Hessian applications consumed.
    pub matvecs: usize,
    /// Outer iterations (Lanczos steps, trust-region steps, or secular
    /// iterations for the oracle).
    pub iterations: usize,
    pub wall_time: Duration,
    /// Condition-number estimate `(λ_max + λ*) / (λ_min + λ*)` from Ritz
    /// values, when available and finite.
    pub kappa_estimate: Option<f64>,
    /// Set when hard-case handling was involved (perturbed restart, boundary
    /// multiplier, or an eigenvector correction).
    pub hard_case: bool,
}
