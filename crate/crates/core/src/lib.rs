//! Variational finite element solver for the Kirchhoff double phase problem
//!
//! ```text
//! −ψ(Φ_H(∇u)) div(|∇u|^{p−2}∇u + μ(x)|∇u|^{q−2}∇u) = f(x, u)  in Ω,   u = 0 on ∂Ω,
//! ```
//!
//! with `ψ(s) = a₀ + b₀ s^{ϑ−1}`. The crate computes constant-sign solutions
//! by a mountain-pass iteration and least-energy sign-changing solutions by
//! descent over the constraint set
//! `M = { u : u± ≠ 0, ⟨φ′(u), u⁺⟩ = ⟨φ′(u), −u⁻⟩ = 0 }`.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` aliases below name the double precision instantiations used by the
//! command line driver.

pub mod discretization;
pub mod energy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod nehari;
pub mod orlicz;
pub mod problem;
pub mod roots;
pub mod sampling;
pub mod scalar;
pub mod solvers;

pub use discretization::{CellField, Mesh, MeshFunction, QuadratureRule, Rect};
pub use energy::{EnergyReport, Functional, Residual, Sign};
pub use error::{Error, Result};
pub use nehari::{Bracket, NehariPair, ProjectionOptions};
pub use orlicz::{DoublePhaseSpace, Exponents, Weight};
pub use problem::{HypothesisReport, KirchhoffCoeffs, Nonlinearity, ProblemSpec};
pub use scalar::Scalar;
pub use solvers::{SolveOutcome, SolutionKind, SolverOptions};

pub type MeshF64 = Mesh<f64>;
pub type MeshFunctionF64 = MeshFunction<f64>;
pub type CellFieldF64 = CellField<f64>;
pub type ProblemSpecF64 = ProblemSpec<f64>;
pub type FunctionalF64 = Functional<f64>;
pub type SolveOutcomeF64 = SolveOutcome<f64>;
pub type NehariPairF64 = NehariPair<f64>;

pub type MeshF32 = Mesh<f32>;
pub type MeshFunctionF32 = MeshFunction<f32>;
pub type ProblemSpecF32 = ProblemSpec<f32>;
pub type FunctionalF32 = Functional<f32>;
