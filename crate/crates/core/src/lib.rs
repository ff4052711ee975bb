//! Transient 2D electric-machine field simulation.
//!
//! Rotor and stator annuli are discretized with tensor-product B-splines on exact polar
//! geometry. They are coupled through an analytic air-gap element: the gap field is a truncated
//! harmonic series whose coefficients are tied to the interface traces by small per-mode
//! systems, so a rotor rotation only mixes cosine/sine rows of precomputed coupling blocks.
//! The resulting differential-algebraic system is integrated by implicit Euler or by a
//! space-time discontinuous Galerkin scheme, and torque is evaluated in closed form from the
//! gap coefficients.

pub mod airgap;
pub mod assembly;
pub mod error;
pub mod linalg;
pub mod machine;
pub mod spline;
pub mod timedomain;

pub use airgap::{
    AirGapCoefficients, CouplingBlocks, GapSystem, HarmonicSet, ModeSystem, MU0,
};
pub use assembly::{BlockDae, Material, MaterialField, PatchProblem};
pub use error::{Result, SimError};
pub use linalg::{DenseMatrix, SparseMatrix};
pub use machine::{MachineConfig, Scheme};
pub use spline::{AnnularPatch, KnotVector, QuadratureRule, SplineSpace1D};
pub use timedomain::{TimeMesh, Trajectory};
