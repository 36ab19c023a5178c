//! Finite element solver for 2D moving-habitat reaction-diffusion models.
//!
//! The population density satisfies a reaction-diffusion equation on a bounded
//! habitat `Ω₀` (logistic growth) surrounded by unsuitable terrain `Ω₁` (pure
//! mortality). Across the habitat edge `Γ` the density carries a proportional
//! jump `w₀ = κ·w₁` together with continuity of the advective-diffusive flux.
//! The jump is enforced weakly through a Lagrange multiplier living on the
//! side-0 trace of `Γ`, which leads to a block saddle-point system
//! `[[A, B₁ᵀ], [B_κ, 0]]` solved by sparse LU at every implicit-explicit
//! Euler step. A moving habitat is handled on a fixed reference frame via an
//! ALE change of coordinates whose metric terms enter the coefficients.
//!
//! Crate layout:
//! - [`mesh`]: bi-domain triangulations (structured rectangle, disk, strip
//!   generators), interface traces, quality measures, native/Gmsh I/O.
//! - [`fespace`]: P1 nodal spaces with duplicated interface dofs and the P1
//!   multiplier space.
//! - [`assembly`]: quadrature rules and matrix/vector assembly, including the
//!   merged-breakpoint interface coupling for nonconformal traces.
//! - [`saddle`]: the block saddle system and its sparse direct solver.
//! - [`model`]: PDE coefficients, the jump coefficient κ, reaction terms and
//!   ALE maps.
//! - [`stepper`]: the forward-backward (IMEX) Euler loop with travelling-pulse
//!   detection.
//! - [`oracle1d`]: independent 1D finite-difference solver used for
//!   cross-validation on the strip geometry.
//! - [`harness`]: error norms, convergence tables, manufactured solutions and
//!   field export.

pub mod assembly;
pub mod error;
pub mod fespace;
pub mod geometry;
pub mod harness;
pub mod mesh;
pub mod model;
pub mod oracle1d;
pub mod problem;
pub mod saddle;
pub mod stepper;

pub use error::Error;
pub use fespace::{DofMap, FieldVector, MultiplierSpace};
pub use mesh::{BoundaryMarker, InterfaceTrace, Mesh, QualityReport};
pub use model::{AleMap, ModelParams};
pub use problem::Discretization;
pub use saddle::BlockSaddleSystem;
pub use stepper::{SimState, StepperConfig};
