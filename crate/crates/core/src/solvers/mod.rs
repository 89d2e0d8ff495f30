//! Critical point computation: constant-sign solutions by a mountain-pass
//! iteration on `φ±`, the least-energy nodal solution by descent over `M`.

mod mountain_pass;
mod nodal;
mod probe;

pub use mountain_pass::{
    find_far_endpoint, mountain_pass, mountain_pass_with_path, ray_peak, small_sphere_level, truncation_consistency,
    MountainPassPath, TruncationVerdict,
};
pub use nodal::{minimize_over_m, nodal_runs, nodal_start};
pub use probe::{coercivity_probe, CoercivityRow, CoercivityTable};

use crate::discretization::MeshFunction;
use crate::linalg::PreconditionerKind;
use crate::nehari::{NehariPair, ProjectionOptions};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Target for the residual norm.
    pub tol: T,
    pub max_iter: usize,
    /// Armijo sufficient decrease parameter.
    pub armijo: T,
    /// Step reduction factor on a rejected trial.
    pub backtrack: T,
    /// `None` picks the solver's default: the Laplacian for the
    /// mountain-pass iteration, the flux-weighted stiffness for the nodal
    /// descent, where the plain Laplacian stalls.
    pub preconditioner: Option<PreconditionerKind>,
    /// Nodes on the mountain-pass path, endpoints included.
    pub path_nodes: usize,
    /// Path re-equidistribution period in iterations.
    pub reequidistribute: usize,
    /// Random starts for the nodal search.
    pub starts: usize,
    pub seed: u64,
    /// Allowed wrong-sign nodal values for constant-sign outcomes.
    pub sign_tol: T,
    pub projection: ProjectionOptions<T>,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-6),
            max_iter: 5000,
            armijo: T::lit(1e-4),
            backtrack: T::lit(0.5),
            preconditioner: None,
            path_nodes: 16,
            reequidistribute: 10,
            starts: 8,
            seed: 42,
            sign_tol: T::lit(1e-10),
            projection: ProjectionOptions::default(),
        }
    }
}

impl<T: Scalar> SolverOptions<T> {
    pub fn preconditioner_for(&self, kind: SolutionKind) -> PreconditionerKind {
        self.preconditioner.unwrap_or(match kind {
            SolutionKind::Positive | SolutionKind::Negative => PreconditionerKind::Laplacian,
            SolutionKind::Nodal => PreconditionerKind::Weighted,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolutionKind {
    Positive,
    Negative,
    Nodal,
}

impl SolutionKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Nodal => "nodal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "positive" => Some(Self::Positive),
            "negative" => Some(Self::Negative),
            "nodal" => Some(Self::Nodal),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub solution: MeshFunction<T>,
    pub kind: SolutionKind,
    /// `φ(solution)`.
    pub energy: T,
    /// Norm of the full residual `φ′(solution)`.
    pub residual_norm: T,
    pub iterations: usize,
    /// `(energy, residual_norm)` per iteration.
    pub trace: Vec<(T, T)>,
    /// Final projection data for nodal outcomes.
    pub pair: Option<NehariPair<T>>,
    pub seed: Option<u64>,
    pub converged: bool,
}

impl<T: Scalar> SolveOutcome<T> {
    /// Whether the kind's sign invariant holds with tolerance `tol`.
    pub fn sign_invariant(&self, functional: &crate::energy::Functional<T>, tol: T) -> bool {
        match self.kind {
            SolutionKind::Positive => self.solution.min_value() >= -tol,
            SolutionKind::Negative => self.solution.max_value() <= tol,
            SolutionKind::Nodal => {
                let (p, m) = self.solution.split_parts();
                let floor = T::lit(1e-8);
                let np = functional.norm(&p).unwrap_or(T::zero());
                let nm = functional.norm(&m).unwrap_or(T::zero());
                np >= floor && nm >= floor
            }
        }
    }
}
