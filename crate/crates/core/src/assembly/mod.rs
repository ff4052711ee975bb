//! Galerkin assembly on the rotor and stator annuli and the coupled block system.

mod dae;
mod dirichlet;
mod material;
mod patch;

pub use dae::{assemble_block_dae, BlockDae, BoundaryData, DaeOptions, DirichletSpec, DofLayout};
pub use dirichlet::{apply_dirichlet, ReducedSystem};
pub use material::{Material, MaterialField, Orientation, RadialBand, Sector, Source, ThreePhase};
pub use patch::{assemble_load, assemble_mass, assemble_stiffness, project_ring, LoadParts, PatchProblem};
