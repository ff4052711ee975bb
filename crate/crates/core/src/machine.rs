//! Machine descriptions, the built-in benchmarks and scenario orchestration.

use crate::airgap::{mode_system, HarmonicSet, MU0};
use crate::assembly::{
    assemble_block_dae, project_ring, BlockDae, BoundaryData, DaeOptions, DirichletSpec, Material, MaterialField,
    Orientation, PatchProblem, RadialBand, Sector, Source, ThreePhase,
};
use crate::error::{Result, SimError};
use crate::linalg::norm_inf;
use crate::spline::AnnularPatch;
use crate::timedomain::{
    implicit_euler, project_algebraic, spacetime_assemble, spacetime_solve_forward, spacetime_solve_monolithic,
    static_solve, TimeMesh, Trajectory,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

/// Three-phase supply `J0 sin(ωt + 2πk/3)`; slot assignment lives in the stator materials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationSpec {
    /// Current density amplitude (A/m²).
    pub j0: f64,
    /// Electrical angular frequency (rad/s).
    pub omega: f64,
}

pub fn three_phase_current(spec: &ExcitationSpec, t: f64, phase: u8) -> Result<f64> {
    ThreePhase {
        j0: spec.j0,
        omega: spec.omega,
    }
    .current(t, phase)
}

/// Rotor angle as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RotationSpec {
    /// `δ(t) = ωt/p`.
    Synchronous,
    /// Constant angle.
    Fixed { angle_deg: f64 },
    /// `δ(t) = speed · t`.
    Speed { rad_per_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSchedule {
    pub speed: f64,
    pub offset: f64,
}

impl RotationSchedule {
    pub fn delta(&self, t: f64) -> f64 {
        self.offset + self.speed * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One static solve at `t = 0`.
    Static,
    StaticSweep,
    ImplicitEuler,
    SpaceTimeForward,
    SpaceTimeMonolithic,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Static => "static",
            Scheme::StaticSweep => "static-sweep",
            Scheme::ImplicitEuler => "implicit-euler",
            Scheme::SpaceTimeForward => "space-time-forward",
            Scheme::SpaceTimeMonolithic => "space-time-monolithic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| SimError::config(format!("unknown scheme '{s}'")))
    }
}

/// Harmonic series `c ln(r/ρ) + Σ [a (r/ρ)^k + b (r/ρ)^-k] cos kθ + [c (r/ρ)^k + d (r/ρ)^-k] sin kθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSeries {
    pub reference_radius: f64,
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub log: f64,
    #[serde(default)]
    pub modes: Vec<ExactMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactMode {
    pub k: usize,
    #[serde(default)]
    pub cos_growth: f64,
    #[serde(default)]
    pub cos_decay: f64,
    #[serde(default)]
    pub sin_growth: f64,
    #[serde(default)]
    pub sin_decay: f64,
}

impl ExactSeries {
    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        let l = (r / self.reference_radius).ln();
        let mut u = self.constant + self.log * l;
        for m in &self.modes {
            let k = m.k as f64;
            let (up, down) = ((k * l).exp(), (-k * l).exp());
            let (s, c) = (k * theta).sin_cos();
            u += (m.cos_growth * up + m.cos_decay * down) * c + (m.sin_growth * up + m.sin_decay * down) * s;
        }
        u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirichletKind {
    Zero,
    /// Data from the exact series (L² projection onto the ring space).
    Exact,
    /// Natural boundary (rotor bore only).
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletConfig {
    pub rotor_inner: DirichletKind,
    pub stator_outer: DirichletKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    pub start_deg: f64,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub r_outer: f64,
    pub elements: usize,
    pub sectors: Vec<SectorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    pub r_inner: f64,
    pub bands: Vec<BandSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    /// Gap radii `[R1, R2]` (m).
    pub gap: [f64; 2],
    /// Machine length (m).
    pub length: f64,
    pub pole_pairs: usize,
    pub degree: usize,
    pub angular_elements: usize,
    pub rotor: PatchSpec,
    pub stator: PatchSpec,
    pub dirichlet: DirichletConfig,
    #[serde(default)]
    pub exact: Option<ExactSeries>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    /// Conductivity (S/m).
    pub sigma: f64,
    /// Relative permeability.
    pub mu_r: f64,
    #[serde(default = "no_source")]
    pub source: Source,
}

fn no_source() -> Source {
    Source::None
}

impl MaterialSpec {
    pub fn material(&self) -> Material {
        Material::new(self.sigma, 1.0 / (MU0 * self.mu_r)).with_source(self.source)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HarmonicsSpec {
    /// Zero mode and `1..=k_max`.
    Full { k_max: usize },
    /// The first `count` odd multiples of the pole pair count.
    OddMultiples { count: usize },
    List { include_zero_mode: bool, modes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub intervals: usize,
    /// Simulated rotor angle span (deg); converted to an end time through the rotation speed.
    #[serde(default)]
    pub span_deg: Option<f64>,
    /// End time (s), used when no angle span is given.
    #[serde(default)]
    pub t_end: Option<f64>,
    pub rotation: RotationSpec,
    /// Rotor angle at `t = 0` (deg).
    #[serde(default)]
    pub offset_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub scheme: Scheme,
    /// Gap reluctivity override (m/H); defaults to `1/μ0`.
    #[serde(default)]
    pub nu_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineConfig {
    pub name: String,
    pub geometry: Geometry,
    pub materials: BTreeMap<String, MaterialSpec>,
    #[serde(default)]
    pub excitation: Option<ExcitationSpec>,
    pub harmonics: HarmonicsSpec,
    pub time: TimeSpec,
    pub solver: SolverSpec,
}

impl MachineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| SimError::config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn harmonic_set(&self) -> Result<HarmonicSet> {
        match &self.harmonics {
            HarmonicsSpec::Full { k_max } => Ok(HarmonicSet::full(*k_max)),
            HarmonicsSpec::OddMultiples { count } => HarmonicSet::odd_multiples(self.geometry.pole_pairs, *count),
            HarmonicsSpec::List {
                include_zero_mode,
                modes,
            } => HarmonicSet::new(*include_zero_mode, modes.clone()),
        }
    }

    pub fn rotation(&self) -> Result<RotationSchedule> {
        let offset = self.time.offset_deg.to_radians();
        let speed = match self.time.rotation {
            RotationSpec::Synchronous => {
                let e = self
                    .excitation
                    .ok_or_else(|| SimError::config("synchronous rotation needs an excitation"))?;
                e.omega / self.geometry.pole_pairs as f64
            }
            RotationSpec::Fixed { angle_deg } => {
                return Ok(RotationSchedule {
                    speed: 0.0,
                    offset: offset + angle_deg.to_radians(),
                })
            }
            RotationSpec::Speed { rad_per_s } => rad_per_s,
        };
        Ok(RotationSchedule { speed, offset })
    }

    /// End time from the angle span (or the explicit end time).
    pub fn t_end(&self) -> Result<f64> {
        let sched = self.rotation()?;
        match (self.time.span_deg, self.time.t_end) {
            (Some(span), _) if sched.speed != 0.0 => Ok(span.to_radians() / sched.speed.abs()),
            (_, Some(t)) => Ok(t),
            _ => Err(SimError::config("time needs span_deg with a moving rotor, or t_end")),
        }
    }

    pub fn time_mesh(&self, intervals: Option<usize>) -> Result<TimeMesh> {
        TimeMesh::uniform(self.t_end()?, intervals.unwrap_or(self.time.intervals))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        let [r1, r2] = g.gap;
        if !(r1 > 0.0 && r1 < r2) {
            return Err(SimError::config(format!("gap radii must satisfy 0 < R1 < R2, got {r1}, {r2}")));
        }
        if self.time.intervals == 0 {
            return Err(SimError::config("time.intervals must be at least 1"));
        }
        if g.pole_pairs == 0 {
            return Err(SimError::config("pole_pairs must be at least 1"));
        }
        if !(g.length > 0.0) {
            return Err(SimError::config("length must be positive"));
        }
        for (name, spec) in [("rotor", &g.rotor), ("stator", &g.stator)] {
            if spec.bands.is_empty() {
                return Err(SimError::config(format!("{name} has no bands")));
            }
            for b in &spec.bands {
                if b.elements == 0 {
                    return Err(SimError::config(format!("{name} band with zero elements")));
                }
                for s in &b.sectors {
                    if !self.materials.contains_key(&s.material) {
                        return Err(SimError::config(format!("unknown material '{}'", s.material)));
                    }
                }
            }
        }
        let rotor_outer = g.rotor.bands.last().map(|b| b.r_outer).unwrap_or(0.0);
        if (rotor_outer - r1).abs() > 1e-12 * r2 || (g.stator.r_inner - r2).abs() > 1e-12 * r2 {
            return Err(SimError::config("rotor must end at R1 and stator start at R2"));
        }
        if g.dirichlet.stator_outer == DirichletKind::Free {
            return Err(SimError::config("stator outer ring needs a Dirichlet condition"));
        }
        let uses_exact = g.dirichlet.rotor_inner == DirichletKind::Exact || g.dirichlet.stator_outer == DirichletKind::Exact;
        if uses_exact && g.exact.is_none() {
            return Err(SimError::config("exact Dirichlet data requested but no exact series given"));
        }
        for m in self.materials.values() {
            if !(m.mu_r > 0.0) || !(m.sigma >= 0.0) {
                return Err(SimError::config("materials need mu_r > 0 and sigma >= 0"));
            }
        }
        self.harmonic_set().map_err(|e| SimError::config(e.to_string()))?;
        Ok(())
    }

    /// The same machine with every element count divided by `factor`.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        let mut c = self.clone();
        let div = |n: usize| -> Result<usize> {
            if factor == 0 || n % factor != 0 || n / factor == 0 {
                Err(SimError::config(format!("cannot coarsen {n} elements by {factor}")))
            } else {
                Ok(n / factor)
            }
        };
        c.geometry.angular_elements = div(c.geometry.angular_elements)?;
        for spec in [&mut c.geometry.rotor, &mut c.geometry.stator] {
            for b in &mut spec.bands {
                b.elements = div(b.elements)?;
            }
        }
        Ok(c)
    }

    fn patch(&self, spec: &PatchSpec) -> Result<PatchProblem> {
        let g = &self.geometry;
        let mut radii = vec![spec.r_inner];
        let mut bands = Vec::new();
        let mut r0 = spec.r_inner;
        for b in &spec.bands {
            for e in 1..=b.elements {
                radii.push(r0 + (b.r_outer - r0) * e as f64 / b.elements as f64);
            }
            let sectors = b
                .sectors
                .iter()
                .map(|s| Sector {
                    start: s.start_deg.to_radians(),
                    material: self.materials[&s.material].material(),
                })
                .collect();
            bands.push(RadialBand {
                r_inner: r0,
                r_outer: b.r_outer,
                sectors,
            });
            r0 = b.r_outer;
        }
        let supply = self.excitation.map(|e| ThreePhase {
            j0: e.j0,
            omega: e.omega,
        });
        let uses_phase = bands
            .iter()
            .flat_map(|b| &b.sectors)
            .any(|s| matches!(s.material.source, Source::Phase { .. }));
        let field = MaterialField::new(bands, if uses_phase { supply } else { None })?;
        let patch = AnnularPatch::with_radial_breakpoints(&radii, g.angular_elements, g.degree)?;
        PatchProblem::new(patch, field)
    }
}

/// An assembled machine ready for simulation.
#[derive(Debug, Clone)]
pub struct Machine {
    pub config: MachineConfig,
    pub dae: BlockDae,
    pub schedule: RotationSchedule,
}

impl Machine {
    pub fn build(config: &MachineConfig) -> Result<Self> {
        config.validate()?;
        let g = &config.geometry;
        let schedule = config.rotation()?;
        let rotor = config.patch(&g.rotor)?;
        let stator = config.patch(&g.stator)?;
        let delta0 = schedule.delta(0.0);
        let ring = |kind: DirichletKind, patch: &PatchProblem, r: f64, delta: f64| -> Result<Option<BoundaryData>> {
            Ok(match kind {
                DirichletKind::Zero => Some(BoundaryData::Zero),
                DirichletKind::Free => None,
                DirichletKind::Exact => {
                    let ex = g.exact.as_ref().expect("validated");
                    Some(BoundaryData::Values(project_ring(patch.patch.angular_space(), |t| {
                        ex.eval(r, t + delta)
                    })?))
                }
            })
        };
        let dirichlet = DirichletSpec {
            rotor_inner: ring(g.dirichlet.rotor_inner, &rotor, rotor.patch.r_inner(), delta0)?,
            stator_outer: ring(g.dirichlet.stator_outer, &stator, stator.patch.r_outer(), 0.0)?,
        };
        let options = DaeOptions {
            dirichlet,
            nu_gap: config.solver.nu_gap.unwrap_or(1.0 / MU0),
        };
        let harmonics = config.harmonic_set()?;
        let dae = assemble_block_dae(rotor, stator, &harmonics, (g.gap[0], g.gap[1]), &options)
            .map_err(|e| e.context(format!("assembling '{}'", config.name)))?;
        Ok(Self {
            config: config.clone(),
            dae,
            schedule,
        })
    }

    pub fn delta(&self, t: f64) -> f64 {
        self.schedule.delta(t)
    }

    /// Absolute and relative L² error of the static solution at `t = 0` against the exact series.
    pub fn static_error(&self) -> Result<Option<(f64, f64)>> {
        let Some(ex) = &self.config.geometry.exact else {
            return Ok(None);
        };
        let delta = self.delta(0.0);
        let u = static_solve(&self.dae, delta, 0.0)?;
        let f = |r: f64, t: f64| ex.eval(r, t);
        let er = self.dae.rotor.l2_error(&self.dae.rotor_field(&u), delta, f)?;
        let es = self.dae.stator.l2_error(&self.dae.stator_field(&u), 0.0, f)?;
        let nr = self.dae.rotor.l2_norm(f)?;
        let ns = self.dae.stator.l2_norm(f)?;
        let abs = er.hypot(es);
        Ok(Some((abs, abs / nr.hypot(ns))))
    }

    /// Largest constraint residual `‖C2 A + K_F α‖∞` over the states, relative to `‖C2 A‖∞`.
    pub fn constraint_residual(&self, traj: &Trajectory) -> f64 {
        traj.states
            .iter()
            .zip(&traj.times)
            .map(|(u, &t)| {
                let delta = self.delta(t);
                let r = self.dae.constraint_residual(u, delta);
                let c2a = self.dae.coupling(delta).c2.mul_vec(&self.dae.interface_values(u));
                let scale = norm_inf(&c2a).max(f64::MIN_POSITIVE);
                norm_inf(&r) / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Outcome of a scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub scheme: Scheme,
    /// States at the breakpoints (algebraic unknowns consistent at each breakpoint).
    pub trajectory: Trajectory,
    /// Raw space-time states before the algebraic projection.
    pub raw: Option<Trajectory>,
    pub deltas: Vec<f64>,
    pub torques: Vec<f64>,
    pub max_constraint_residual: f64,
    /// `max_i ‖A_i^- U_{i-1} + A_i^+ U_i - rhs_i‖∞ / ‖rhs‖∞` for space-time schemes.
    pub spacetime_residual: Option<f64>,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
}

pub fn run_scenario(machine: &Machine, mesh: &TimeMesh, scheme: Scheme) -> Result<ScenarioResult> {
    let dae = &machine.dae;
    let rotation = |t: f64| machine.delta(t);
    let length = machine.config.geometry.length;
    let ctx = |e: SimError| e.context(format!("scenario '{}' ({})", machine.config.name, scheme.name()));
    let t0 = Instant::now();
    let mut assembly_seconds = 0.0;
    let mut raw = None;
    let mut spacetime_residual = None;
    let trajectory = match scheme {
        Scheme::Static => {
            let u = static_solve(dae, rotation(0.0), 0.0).map_err(ctx)?;
            Trajectory {
                times: vec![0.0],
                states: vec![u],
                torques: None,
            }
        }
        Scheme::StaticSweep => {
            let times = mesh.breakpoints().to_vec();
            let states = times
                .par_iter()
                .map(|&t| static_solve(dae, rotation(t), t))
                .collect::<Result<Vec<_>>>()
                .map_err(ctx)?;
            Trajectory {
                times,
                states,
                torques: None,
            }
        }
        Scheme::ImplicitEuler => {
            let u0 = static_solve(dae, rotation(0.0), 0.0).map_err(ctx)?;
            implicit_euler(dae, mesh, &rotation, &u0).map_err(ctx)?
        }
        Scheme::SpaceTimeForward | Scheme::SpaceTimeMonolithic => {
            let u0 = static_solve(dae, rotation(0.0), 0.0).map_err(ctx)?;
            let blocks = spacetime_assemble(dae, mesh, &rotation).map_err(ctx)?;
            assembly_seconds = t0.elapsed().as_secs_f64();
            let traj = if scheme == Scheme::SpaceTimeForward {
                spacetime_solve_forward(&blocks, &u0)
            } else {
                spacetime_solve_monolithic(&blocks, &u0)
            }
            .map_err(ctx)?;
            let scale = blocks.rhs.iter().map(|r| norm_inf(r)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let res = blocks
                .residuals(&traj.states)
                .iter()
                .map(|r| norm_inf(r))
                .fold(0.0, f64::max);
            spacetime_residual = Some(res / scale);
            let projected = project_algebraic(dae, &traj, &rotation).map_err(ctx)?;
            raw = Some(traj);
            projected
        }
    };
    let solve_seconds = t0.elapsed().as_secs_f64() - assembly_seconds;
    let torques = trajectory
        .states
        .iter()
        .map(|u| dae.torque(u, length))
        .collect::<Result<Vec<_>>>()?;
    let deltas = trajectory.times.iter().map(|&t| rotation(t)).collect();
    let max_constraint_residual = machine.constraint_residual(&trajectory);
    let mut trajectory = trajectory;
    trajectory.torques = Some(torques.clone());
    Ok(ScenarioResult {
        scheme,
        trajectory,
        raw,
        deltas,
        torques,
        max_constraint_residual,
        spacetime_residual,
        assembly_seconds,
        solve_seconds,
    })
}

/// Condition numbers of the unscaled and scaled mode systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionRow {
    pub k: usize,
    pub kappa_unscaled: f64,
    pub kappa_scaled: f64,
}

pub fn condition_study(r1: f64, r2: f64, k_max: usize) -> Result<Vec<ConditionRow>> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(SimError::config(format!("radii must satisfy 0 < R1 < R2, got {r1}, {r2}")));
    }
    (0..=k_max)
        .map(|k| {
            Ok(ConditionRow {
                k,
                kappa_unscaled: mode_system(k, r1, r2, false)?.condition_number(),
                kappa_scaled: mode_system(k, r1, r2, true)?.condition_number(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    /// Largest element diameter (m).
    pub h: f64,
    pub l2_error: f64,
    pub relative_error: f64,
    /// `log(e_prev/e) / log(h_prev/h)`; absent on the coarsest level.
    pub order: Option<f64>,
}

fn mesh_size(config: &MachineConfig) -> f64 {
    let g = &config.geometry;
    let mut h: f64 = 0.0;
    for spec in [&g.rotor, &g.stator] {
        let mut r0 = spec.r_inner;
        for b in &spec.bands {
            h = h.max((b.r_outer - r0) / b.elements as f64);
            h = h.max(2.0 * PI * b.r_outer / g.angular_elements as f64);
            r0 = b.r_outer;
        }
    }
    h
}

/// Static L² errors against the exact series on `levels` uniformly refined meshes; the finest
/// level is the configured mesh.
pub fn convergence_study(config: &MachineConfig, levels: usize) -> Result<Vec<ConvergenceRow>> {
    if config.geometry.exact.is_none() {
        return Err(SimError::config(format!("'{}' has no exact solution", config.name)));
    }
    if levels == 0 {
        return Err(SimError::config("at least one refinement level needed"));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for l in 0..levels {
        let c = config.coarsened(1 << (levels - 1 - l))?;
        let (abs, rel) = Machine::build(&c)?.static_error()?.expect("exact series present");
        let h = mesh_size(&c);
        let order = rows.last().map(|p| (p.l2_error / abs).ln() / (p.h / h).ln());
        rows.push(ConvergenceRow {
            h,
            l2_error: abs,
            relative_error: rel,
            order,
        });
    }
    Ok(rows)
}

pub const BENCHMARKS: [&str; 2] = ["annulus-harmonic", "pm-benchmark"];

pub fn build_benchmark(name: &str) -> Result<MachineConfig> {
    match name {
        "annulus-harmonic" => Ok(annulus_harmonic()),
        "pm-benchmark" => Ok(pm_benchmark(&PmOptions::default())),
        other => Err(SimError::config(format!(
            "unknown benchmark '{other}' (known: {})",
            BENCHMARKS.join(", ")
        ))),
    }
}

const R1: f64 = 44.3e-3;
const R2: f64 = 44.7e-3;

fn air_band(r_outer: f64, elements: usize, material: &str) -> BandSpec {
    BandSpec {
        r_outer,
        elements,
        sectors: vec![SectorSpec {
            start_deg: 0.0,
            material: material.to_string(),
        }],
    }
}

fn annulus_harmonic() -> MachineConfig {
    let mut materials = BTreeMap::new();
    materials.insert(
        "air".to_string(),
        MaterialSpec {
            sigma: 0.0,
            mu_r: 1.0,
            source: Source::None,
        },
    );
    let exact = ExactSeries {
        reference_radius: R1,
        constant: 0.0,
        log: 1.0,
        modes: vec![
            ExactMode {
                k: 1,
                cos_growth: 1.0,
                cos_decay: 0.0,
                sin_growth: 0.0,
                sin_decay: 0.5,
            },
            ExactMode {
                k: 3,
                cos_growth: 1.0,
                cos_decay: 0.0,
                sin_growth: 0.0,
                sin_decay: 0.5,
            },
        ],
    };
    MachineConfig {
        name: "annulus-harmonic".into(),
        geometry: Geometry {
            gap: [R1, R2],
            length: 0.1,
            pole_pairs: 1,
            degree: 2,
            angular_elements: 96,
            rotor: PatchSpec {
                r_inner: 0.02,
                bands: vec![air_band(R1, 48, "air")],
            },
            stator: PatchSpec {
                r_inner: R2,
                bands: vec![air_band(0.075, 48, "air")],
            },
            dirichlet: DirichletConfig {
                rotor_inner: DirichletKind::Exact,
                stator_outer: DirichletKind::Exact,
            },
            exact: Some(exact),
        },
        materials,
        excitation: None,
        harmonics: HarmonicsSpec::Full { k_max: 12 },
        time: TimeSpec {
            intervals: 1,
            span_deg: None,
            t_end: Some(1.0),
            rotation: RotationSpec::Fixed { angle_deg: 0.0 },
            offset_deg: 17.0,
        },
        solver: SolverSpec {
            scheme: Scheme::Static,
            nu_gap: None,
        },
    }
}

/// Tunable parameters of the permanent-magnet benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct PmOptions {
    pub angular_elements: usize,
    /// Angle of the first north-pole magnet's leading edge in the rotor frame (deg).
    pub magnet_offset_deg: f64,
    /// Shifts the phase-to-slot assignment and slot positions by this many slot pitches.
    pub slot_shift: usize,
    pub sigma_pm: f64,
    pub sigma_iron: f64,
    pub mu_r_iron: f64,
    pub j0: f64,
    pub b_rem: f64,
}

impl Default for PmOptions {
    fn default() -> Self {
        Self {
            angular_elements: 216,
            magnet_offset_deg: PM_MAGNET_OFFSET_DEG,
            slot_shift: 0,
            sigma_pm: 6.7e5,
            sigma_iron: 0.0,
            mu_r_iron: 1000.0,
            j0: 3e6,
            b_rem: 1.1,
        }
    }
}

/// Magnet placement putting the rotor field in quadrature with the stator field (motoring).
pub const PM_MAGNET_OFFSET_DEG: f64 = 30.0;

/// Phase (1..=3) and winding sign of a slot whose center has electrical angle `eps_deg`.
///
/// The phase whose axis `γ` satisfies `sin(ε - γ) = ±1` takes the slot; axes 0°, 120°, 240°
/// belong to phases 3, 2, 1, whose currents `sin(ωt + 2πk/3)` lag by `γ`.
pub fn slot_phase(eps_deg: f64) -> (u8, f64) {
    let mut best = (3u8, 1.0, -1.0);
    for (phase, axis) in [(3u8, 0.0f64), (2, 120.0), (1, 240.0)] {
        let s = (eps_deg - axis).to_radians().sin();
        if s.abs() > best.2 {
            best = (phase, s.signum(), s.abs());
        }
    }
    (best.0, best.1)
}

pub fn pm_benchmark(opts: &PmOptions) -> MachineConfig {
    let p = 3usize;
    let mut materials = BTreeMap::new();
    let mut add = |name: &str, sigma: f64, mu_r: f64, source: Source| {
        materials.insert(name.to_string(), MaterialSpec { sigma, mu_r, source });
    };
    add("air", 0.0, 1.0, Source::None);
    add("iron", opts.sigma_iron, opts.mu_r_iron, Source::None);
    for (name, sign) in [("magnet-out", 1.0), ("magnet-in", -1.0)] {
        add(
            name,
            opts.sigma_pm,
            1.0,
            Source::Remanence {
                b_rem: opts.b_rem,
                orientation: Orientation::Radial { sign },
            },
        );
    }
    for phase in 1..=3u8 {
        for (tag, sign) in [("+", 1.0), ("-", -1.0)] {
            add(&format!("coil-{phase}{tag}"), 0.0, 1.0, Source::Phase { phase, sign });
        }
    }
    let magnets = (0..2 * p)
        .map(|m| SectorSpec {
            start_deg: opts.magnet_offset_deg + 60.0 * m as f64,
            material: if m % 2 == 0 { "magnet-out" } else { "magnet-in" }.to_string(),
        })
        .collect();
    let pitch = 20.0;
    let mut slots = Vec::new();
    for j in 0..18 {
        let center = 10.0 + pitch * (j + opts.slot_shift) as f64;
        let (phase, sign) = slot_phase(p as f64 * (10.0 + pitch * j as f64));
        slots.push(SectorSpec {
            start_deg: center - 5.0,
            material: format!("coil-{phase}{}", if sign > 0.0 { "+" } else { "-" }),
        });
        slots.push(SectorSpec {
            start_deg: center + 5.0,
            material: "iron".to_string(),
        });
    }
    MachineConfig {
        name: "pm-benchmark".into(),
        geometry: Geometry {
            gap: [R1, R2],
            length: 0.1,
            pole_pairs: p,
            degree: 2,
            angular_elements: opts.angular_elements,
            rotor: PatchSpec {
                r_inner: 0.02,
                bands: vec![
                    air_band(0.0393, 4, "iron"),
                    BandSpec {
                        r_outer: R1,
                        elements: 3,
                        sectors: magnets,
                    },
                ],
            },
            stator: PatchSpec {
                r_inner: R2,
                bands: vec![
                    BandSpec {
                        r_outer: 0.0607,
                        elements: 4,
                        sectors: slots,
                    },
                    air_band(0.075, 3, "iron"),
                ],
            },
            dirichlet: DirichletConfig {
                rotor_inner: DirichletKind::Zero,
                stator_outer: DirichletKind::Zero,
            },
            exact: None,
        },
        materials,
        excitation: Some(ExcitationSpec {
            j0: opts.j0,
            omega: 2.0 * PI * 50.0,
        }),
        harmonics: HarmonicsSpec::OddMultiples { count: 35 },
        time: TimeSpec {
            intervals: 40,
            span_deg: Some(20.0),
            t_end: None,
            rotation: RotationSpec::Synchronous,
            offset_deg: pitch * opts.slot_shift as f64,
        },
        solver: SolverSpec {
            scheme: Scheme::SpaceTimeForward,
            nu_gap: None,
        },
    }
}
