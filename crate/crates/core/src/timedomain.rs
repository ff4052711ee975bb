//! Time integration of `M̃ dU/dt + K̃(δ(t)) U = J̃(t)`: static solves, implicit Euler and the
//! space-time discontinuous Galerkin scheme (continuous piecewise-linear trial functions,
//! piecewise-constant tests, midpoint quadrature).
//!
//! The space-time scheme imposes the algebraic rows (gap coefficients and non-conducting field
//! dofs) only in interval average, so its raw breakpoint values of those unknowns carry an
//! alternating component. [`project_algebraic`] recomputes them from the differential unknowns
//! at each breakpoint; torque is evaluated on the projected states.

use crate::assembly::BlockDae;
use crate::error::{Result, SimError};
use crate::linalg::{norm_inf, BlockTriangularLu, SparseMatrix};
use rayon::prelude::*;

/// A linear DAE `M dU/dt + K(δ) U = J(t)`.
pub trait DaeSystem: Sync {
    fn dim(&self) -> usize;
    fn mass(&self) -> &SparseMatrix;
    fn stiffness(&self, delta: f64) -> SparseMatrix;
    fn load(&self, t: f64) -> Result<Vec<f64>>;
}

impl DaeSystem for BlockDae {
    fn dim(&self) -> usize {
        self.n_total()
    }

    fn mass(&self) -> &SparseMatrix {
        BlockDae::mass(self)
    }

    fn stiffness(&self, delta: f64) -> SparseMatrix {
        BlockDae::stiffness(self, delta)
    }

    fn load(&self, t: f64) -> Result<Vec<f64>> {
        BlockDae::load(self, t)
    }
}

/// Constant-coefficient system with load `J(t) = j0 + j1 sin(ωt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDae {
    pub mass: SparseMatrix,
    pub stiffness: SparseMatrix,
    pub j0: Vec<f64>,
    pub j1: Vec<f64>,
    pub omega: f64,
}

impl LinearDae {
    pub fn scalar(m: f64, k: f64, j: f64) -> Self {
        Self {
            mass: SparseMatrix::from_triplets(1, 1, &[(0, 0, m)]),
            stiffness: SparseMatrix::from_triplets(1, 1, &[(0, 0, k)]),
            j0: vec![j],
            j1: vec![0.0],
            omega: 0.0,
        }
    }
}

impl DaeSystem for LinearDae {
    fn dim(&self) -> usize {
        self.mass.nrows()
    }

    fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    fn stiffness(&self, _delta: f64) -> SparseMatrix {
        self.stiffness.clone()
    }

    fn load(&self, t: f64) -> Result<Vec<f64>> {
        let s = (self.omega * t).sin();
        Ok(self.j0.iter().zip(&self.j1).map(|(a, b)| a + s * b).collect())
    }
}

/// Breakpoints `0 = t̂_0 < … < t̂_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    breakpoints: Vec<f64>,
}

impl TimeMesh {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(SimError::invalid("time mesh needs at least one interval"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SimError::invalid("time breakpoints must be strictly increasing"));
        }
        Ok(Self { breakpoints })
    }

    pub fn uniform(t_end: f64, n_intervals: usize) -> Result<Self> {
        if n_intervals == 0 || !(t_end > 0.0) {
            return Err(SimError::invalid("uniform time mesh needs T > 0 and N >= 1"));
        }
        Self::new(
            (0..=n_intervals)
                .map(|i| t_end * i as f64 / n_intervals as f64)
                .collect(),
        )
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn n_intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Width `h_i` of interval `i` (`1..=N`).
    pub fn width(&self, i: usize) -> f64 {
        self.breakpoints[i] - self.breakpoints[i - 1]
    }

    /// Midpoint `t_i` of interval `i` (`1..=N`).
    pub fn midpoint(&self, i: usize) -> f64 {
        0.5 * (self.breakpoints[i] + self.breakpoints[i - 1])
    }
}

/// Per-interval blocks `A_i^- U_{i-1} + A_i^+ U_i = rhs_i`.
#[derive(Debug, Clone)]
pub struct SpaceTimeBlocks {
    pub a_minus: Vec<SparseMatrix>,
    pub a_plus: Vec<SparseMatrix>,
    pub rhs: Vec<Vec<f64>>,
    pub times: Vec<f64>,
}

impl SpaceTimeBlocks {
    pub fn n_intervals(&self) -> usize {
        self.a_plus.len()
    }

    /// Residuals `A_i^- U_{i-1} + A_i^+ U_i - rhs_i` of the rectangular system.
    pub fn residuals(&self, states: &[Vec<f64>]) -> Vec<Vec<f64>> {
        (0..self.n_intervals())
            .map(|i| {
                let a = self.a_minus[i].mul_vec(&states[i]);
                let b = self.a_plus[i].mul_vec(&states[i + 1]);
                a.iter()
                    .zip(&b)
                    .zip(&self.rhs[i])
                    .map(|((x, y), r)| x + y - r)
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub torques: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Solves `K̃(δ) U = J̃(t)`.
pub fn static_solve(dae: &impl DaeSystem, delta: f64, t: f64) -> Result<Vec<f64>> {
    let k = dae.stiffness(delta);
    let j = dae.load(t)?;
    k.lu()
        .and_then(|lu| lu.solve(&j))
        .map_err(|e| e.context(format!("static solve at t = {t}, δ = {delta}")))
}

/// Blocks `A_i^± = ±M̃ + (h_i/2) K̃(δ(t_i))`, `rhs_i = h_i J̃(t_i)` at interval midpoints.
pub fn spacetime_assemble(
    dae: &impl DaeSystem,
    mesh: &TimeMesh,
    rotation: &(impl Fn(f64) -> f64 + Sync),
) -> Result<SpaceTimeBlocks> {
    let m = dae.mass();
    let parts: Vec<Result<(SparseMatrix, SparseMatrix, Vec<f64>)>> = (1..=mesh.n_intervals())
        .into_par_iter()
        .map(|i| {
            let h = mesh.width(i);
            let t = mesh.midpoint(i);
            let k = dae.stiffness(rotation(t));
            let a_minus = m.linear_combination(-1.0, &k, 0.5 * h);
            let a_plus = m.linear_combination(1.0, &k, 0.5 * h);
            let rhs = dae.load(t)?.into_iter().map(|x| h * x).collect();
            Ok((a_minus, a_plus, rhs))
        })
        .collect();
    let mut blocks = SpaceTimeBlocks {
        a_minus: Vec::new(),
        a_plus: Vec::new(),
        rhs: Vec::new(),
        times: mesh.breakpoints().to_vec(),
    };
    for p in parts {
        let (a, b, r) = p?;
        blocks.a_minus.push(a);
        blocks.a_plus.push(b);
        blocks.rhs.push(r);
    }
    Ok(blocks)
}

fn check_initial(blocks: &SpaceTimeBlocks, u0: &[f64]) -> Result<()> {
    if blocks.n_intervals() == 0 {
        return Err(SimError::invalid("no time intervals"));
    }
    if u0.len() != blocks.a_plus[0].nrows() {
        return Err(SimError::invalid("initial state has the wrong length"));
    }
    Ok(())
}

/// `U_i = (A_i^+)⁻¹ (rhs_i - A_i^- U_{i-1})`.
pub fn spacetime_solve_forward(blocks: &SpaceTimeBlocks, u0: &[f64]) -> Result<Trajectory> {
    check_initial(blocks, u0)?;
    let mut states = vec![u0.to_vec()];
    for i in 0..blocks.n_intervals() {
        let prev = blocks.a_minus[i].mul_vec(&states[i]);
        let rhs: Vec<f64> = blocks.rhs[i].iter().zip(&prev).map(|(r, p)| r - p).collect();
        let u = blocks.a_plus[i]
            .lu()
            .and_then(|lu| lu.solve(&rhs))
            .map_err(|_| SimError::SingularStep { interval: i + 1 })?;
        states.push(u);
    }
    Ok(Trajectory {
        times: blocks.times.clone(),
        states,
        torques: None,
    })
}

/// Lower block-bidiagonal matrix over `(U_1, …, U_N)` and its right-hand side.
pub fn spacetime_monolithic_system(blocks: &SpaceTimeBlocks, u0: &[f64]) -> Result<(SparseMatrix, Vec<f64>)> {
    check_initial(blocks, u0)?;
    let n = u0.len();
    let nt = blocks.n_intervals();
    let mut trip = Vec::new();
    let mut rhs = Vec::with_capacity(n * nt);
    for i in 0..nt {
        let row0 = i * n;
        trip.extend(blocks.a_plus[i].triplets().map(|(r, c, v)| (row0 + r, row0 + c, v)));
        if i == 0 {
            let a0 = blocks.a_minus[0].mul_vec(u0);
            rhs.extend(blocks.rhs[0].iter().zip(&a0).map(|(r, a)| r - a));
        } else {
            let col0 = (i - 1) * n;
            trip.extend(blocks.a_minus[i].triplets().map(|(r, c, v)| (row0 + r, col0 + c, v)));
            rhs.extend_from_slice(&blocks.rhs[i]);
        }
    }
    Ok((SparseMatrix::from_triplets(n * nt, n * nt, &trip), rhs))
}

/// Solves all intervals at once: one sparse direct solve of the assembled block-bidiagonal
/// matrix, through its block triangular form.
pub fn spacetime_solve_monolithic(blocks: &SpaceTimeBlocks, u0: &[f64]) -> Result<Trajectory> {
    let (a, rhs) = spacetime_monolithic_system(blocks, u0)?;
    let x = BlockTriangularLu::new(&a)
        .and_then(|lu| lu.solve(&rhs))
        .map_err(|e| e.context("monolithic space-time solve"))?;
    let n = u0.len();
    let mut states = vec![u0.to_vec()];
    states.extend(x.chunks(n).map(|c| c.to_vec()));
    Ok(Trajectory {
        times: blocks.times.clone(),
        states,
        torques: None,
    })
}

/// `(M̃ + Δt_i K̃(δ(t̂_i))) U_i = M̃ U_{i-1} + Δt_i J̃(t̂_i)`.
pub fn implicit_euler(
    dae: &impl DaeSystem,
    mesh: &TimeMesh,
    rotation: &(impl Fn(f64) -> f64 + Sync),
    u0: &[f64],
) -> Result<Trajectory> {
    if u0.len() != dae.dim() {
        return Err(SimError::invalid("initial state has the wrong length"));
    }
    let m = dae.mass();
    let mut states = vec![u0.to_vec()];
    for i in 1..=mesh.n_intervals() {
        let dt = mesh.width(i);
        let t = mesh.breakpoints()[i];
        let a = m.linear_combination(1.0, &dae.stiffness(rotation(t)), dt);
        let mu = m.mul_vec(&states[i - 1]);
        let rhs: Vec<f64> = dae.load(t)?.iter().zip(&mu).map(|(j, x)| dt * j + x).collect();
        let u = a
            .lu()
            .and_then(|lu| lu.solve(&rhs))
            .map_err(|_| SimError::SingularStep { interval: i })?;
        states.push(u);
    }
    Ok(Trajectory {
        times: mesh.breakpoints().to_vec(),
        states,
        torques: None,
    })
}

/// Rows without time derivative (empty rows of `M̃`).
pub fn algebraic_rows(mass: &SparseMatrix) -> Vec<bool> {
    (0..mass.nrows()).map(|i| mass.row(i).all(|(_, v)| v == 0.0)).collect()
}

/// Recomputes the algebraic unknowns of every state after the first from the algebraic rows
/// `(K̃(δ(t̂_i)) U_i)_a = J̃_a(t̂_i)`, keeping the differential unknowns.
pub fn project_algebraic(
    dae: &impl DaeSystem,
    traj: &Trajectory,
    rotation: &(impl Fn(f64) -> f64 + Sync),
) -> Result<Trajectory> {
    let alg = algebraic_rows(dae.mass());
    let a_idx: Vec<usize> = (0..alg.len()).filter(|&i| alg[i]).collect();
    let d_idx: Vec<usize> = (0..alg.len()).filter(|&i| !alg[i]).collect();
    let projected: Vec<Result<Vec<f64>>> = traj
        .states
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            if i == 0 || a_idx.is_empty() {
                return Ok(u.clone());
            }
            let t = traj.times[i];
            let k = dae.stiffness(rotation(t));
            let j = dae.load(t)?;
            let k_aa = k.select(&a_idx, &a_idx);
            let k_ad = k.select(&a_idx, &d_idx);
            let u_d: Vec<f64> = d_idx.iter().map(|&d| u[d]).collect();
            let coupling = k_ad.mul_vec(&u_d);
            let rhs: Vec<f64> = a_idx.iter().zip(&coupling).map(|(&a, c)| j[a] - c).collect();
            let x = k_aa
                .lu()
                .and_then(|lu| lu.solve(&rhs))
                .map_err(|e| e.context(format!("algebraic projection at breakpoint {i}")))?;
            let mut out = u.clone();
            for (&a, v) in a_idx.iter().zip(x) {
                out[a] = v;
            }
            Ok(out)
        })
        .collect();
    Ok(Trajectory {
        times: traj.times.clone(),
        states: projected.into_iter().collect::<Result<_>>()?,
        torques: traj.torques.clone(),
    })
}

/// Closed-form torque of every state.
pub fn torque_trace(traj: &Trajectory, dae: &BlockDae, length: f64) -> Result<Vec<f64>> {
    traj.states.iter().map(|u| dae.torque(u, length)).collect()
}

/// Largest relative difference between two trajectories, `max_i ‖a_i - b_i‖∞ / max_i ‖b_i‖∞`.
pub fn relative_difference(a: &Trajectory, b: &Trajectory) -> f64 {
    let scale = b.states.iter().map(|u| norm_inf(u)).fold(0.0, f64::max);
    let diff = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
