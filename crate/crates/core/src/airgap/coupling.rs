use super::harmonics::HarmonicSet;
use super::modes::GapSystem;
use super::trace::{fourier_prefactors, rotate_rows, trace_integrals};
use super::MU0;
use crate::error::{Result, SimError};
use crate::linalg::DenseMatrix;
use crate::spline::SplineSpace1D;

/// Coupling between interface traces and gap coefficients.
///
/// Interface dofs are the rotor ring (`0..n_rotor`) followed by the stator ring. With `A` the
/// interface coefficients and `α` the gap unknowns, the gap rows read `C2 A + K_F α = 0` and the
/// field rows receive `C1 α` (the weak conormal flux `∓∫ ν0 ∂_r A ψ ds` on each interface).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingBlocks {
    pub c1: DenseMatrix,
    pub c2: DenseMatrix,
    pub kf: DenseMatrix,
    pub delta: f64,
    gap: GapSystem,
    nu_gap: f64,
    rotor_traces: DenseMatrix,
    stator_traces: DenseMatrix,
}

impl CouplingBlocks {
    /// Blocks with scaled mode systems, gap reluctivity `1/μ0` and the rotor turned by `delta`.
    pub fn assemble(
        rotor_space: &SplineSpace1D,
        stator_space: &SplineSpace1D,
        harmonics: &HarmonicSet,
        r1: f64,
        r2: f64,
        delta: f64,
    ) -> Result<Self> {
        let gap = GapSystem::new(harmonics, r1, r2, true)?;
        Self::assemble_frames(rotor_space, stator_space, gap, 1.0 / MU0, delta, 0.0)
    }

    /// General form: explicit mode systems, gap reluctivity, and separate rotor and stator
    /// angles (the stator angle is zero in machine simulations).
    pub fn assemble_frames(
        rotor_space: &SplineSpace1D,
        stator_space: &SplineSpace1D,
        gap: GapSystem,
        nu_gap: f64,
        rotor_delta: f64,
        stator_delta: f64,
    ) -> Result<Self> {
        if !(nu_gap > 0.0) {
            return Err(SimError::invalid("gap reluctivity must be positive"));
        }
        let rotor_traces = trace_integrals(rotor_space, &gap.harmonics, rotor_delta)?;
        let stator_traces = trace_integrals(stator_space, &gap.harmonics, stator_delta)?;
        Ok(Self::from_traces(gap, nu_gap, rotor_traces, stator_traces, rotor_delta))
    }

    fn from_traces(
        gap: GapSystem,
        nu_gap: f64,
        rotor_traces: DenseMatrix,
        stator_traces: DenseMatrix,
        delta: f64,
    ) -> Self {
        let nr = rotor_traces.ncols();
        let ns = stator_traces.ncols();
        let ng = gap.dim();
        let kf = gap.matrix();
        let mut blocks = Self {
            c1: DenseMatrix::zeros(nr + ns, ng),
            c2: DenseMatrix::zeros(ng, nr + ns),
            kf,
            delta,
            gap,
            nu_gap,
            rotor_traces,
            stator_traces,
        };
        blocks.fill_side(true);
        blocks.fill_side(false);
        blocks
    }

    /// Writes the rotor (`rotor = true`) or stator part of `C1` and `C2` from the trace integrals.
    fn fill_side(&mut self, rotor: bool) {
        let h = &self.gap.harmonics;
        let (traces, col0, side) = if rotor {
            (&self.rotor_traces, 0, 0)
        } else {
            (&self.stator_traces, self.rotor_traces.ncols(), 1)
        };
        let n = traces.ncols();
        let pref = fourier_prefactors(h);
        // outward conormal of the rotor is +r, of the stator -r
        let sign = if rotor { -1.0 } else { 1.0 };
        let nu = self.nu_gap;
        if self.gap.zero.is_some() {
            for j in 0..n {
                let t = traces.get(0, j);
                self.c2.set(side, col0 + j, -pref[0] * t);
                self.c1.set(col0 + j, 0, 0.0);
                self.c1.set(col0 + j, 1, sign * nu * t);
            }
        }
        for (i, ms) in self.gap.modes.iter().enumerate() {
            let o = h.mode_offset(i);
            let tr = h.trace_row_offset(i);
            let k = ms.k as f64;
            let (grow, decay) = (ms.matrix[side][0], ms.matrix[side][1]);
            for j in 0..n {
                let tc = traces.get(tr, j);
                let ts = traces.get(tr + 1, j);
                self.c2.set(o + side, col0 + j, -pref[tr] * tc);
                self.c2.set(o + 2 + side, col0 + j, -pref[tr + 1] * ts);
                let row = col0 + j;
                self.c1.set(row, o, sign * nu * k * grow * tc);
                self.c1.set(row, o + 1, -sign * nu * k * decay * tc);
                self.c1.set(row, o + 2, sign * nu * k * grow * ts);
                self.c1.set(row, o + 3, -sign * nu * k * decay * ts);
            }
        }
    }

    pub fn harmonics(&self) -> &HarmonicSet {
        &self.gap.harmonics
    }

    pub fn gap_system(&self) -> &GapSystem {
        &self.gap
    }

    pub fn nu_gap(&self) -> f64 {
        self.nu_gap
    }

    pub fn n_rotor(&self) -> usize {
        self.rotor_traces.ncols()
    }

    pub fn n_stator(&self) -> usize {
        self.stator_traces.ncols()
    }

    pub fn n_interface(&self) -> usize {
        self.n_rotor() + self.n_stator()
    }

    pub fn n_gap(&self) -> usize {
        self.gap.dim()
    }

    /// Gap unknowns consistent with the interface traces: `α = -K_F⁻¹ C2 A`.
    pub fn gap_from_traces(&self, interface: &[f64]) -> Result<Vec<f64>> {
        if interface.len() != self.n_interface() {
            return Err(SimError::invalid("interface vector has the wrong length"));
        }
        let rhs: Vec<f64> = self.c2.mul_vec(interface).iter().map(|x| -x).collect();
        self.gap.solve_raw(&rhs)
    }

    /// `C2 A + K_F α`.
    pub fn constraint_residual(&self, interface: &[f64], gap: &[f64]) -> Vec<f64> {
        let mut r = self.c2.mul_vec(interface);
        for (ri, x) in r.iter_mut().zip(self.kf.mul_vec(gap)) {
            *ri += x;
        }
        r
    }
}

/// Turns the rotor by a further `delta` relative to the current blocks: rotor rows of `C2` and
/// rotor columns of `C1` are recombined per mode with the rotation of angle `kδ`; stator entries
/// and `K_F` are untouched.
pub fn rotate_coupling(blocks: &CouplingBlocks, delta: f64) -> CouplingBlocks {
    let mut out = blocks.clone();
    rotate_rows(&mut out.rotor_traces, &out.gap.harmonics, delta);
    out.fill_side(true);
    out.delta = blocks.delta + delta;
    out
}

/// Dense Dirichlet-to-Neumann matrix on the interface dofs, `S = -C1 K_F⁻¹ C2`: eliminating the
/// gap unknowns turns the field rows `K A + C1 α` into `(K + S) A`.
pub fn dtn_matrix(blocks: &CouplingBlocks) -> Result<DenseMatrix> {
    let ni = blocks.n_interface();
    let ng = blocks.n_gap();
    let mut x = DenseMatrix::zeros(ng, ni);
    let mut col = vec![0.0; ng];
    for j in 0..ni {
        for (i, c) in col.iter_mut().enumerate() {
            *c = blocks.c2.get(i, j);
        }
        let s = blocks.gap.solve_raw(&col)?;
        for (i, v) in s.into_iter().enumerate() {
            x.set(i, j, v);
        }
    }
    let mut s = blocks.c1.mul(&x);
    for i in 0..ni {
        s.row_mut(i).iter_mut().for_each(|v| *v = -*v);
    }
    Ok(s)
}
