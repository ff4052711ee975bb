//! Analytic air-gap element.
//!
//! In the gap `R1 < r < R2` the potential is written as
//!
//! ```text
//! A(r, φ) = α0 + α0' ln(r/ρ) + Σ_k [α_k (r/ρ)^k + α_k' (r/ρ)^-k] cos kφ
//!                           + [β_k (r/ρ)^k + β_k' (r/ρ)^-k] sin kφ
//! ```
//!
//! with a reference radius `ρ` (1 for physical coefficients, `R1` for the scaled unknowns of the
//! coupled system). The angle `φ` is measured in the stator frame; a rotor point at local angle
//! `θ` sits at `φ = θ + δ`.

mod coupling;
mod field;
mod harmonics;
mod modes;
mod trace;

pub use coupling::{dtn_matrix, rotate_coupling, CouplingBlocks};
pub use field::{bfield_at, torque_closed_form, torque_maxwell_numeric};
pub use harmonics::{AirGapCoefficients, HarmonicSet, ModeCoefficients};
pub use modes::{mode_system, solve_mode_systems, GapSystem, ModeSystem};
pub use trace::{fourier_trace_rows, rotate_fourier, trace_integrals, trace_quadrature_points};

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
