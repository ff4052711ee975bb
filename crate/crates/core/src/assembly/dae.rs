use super::dirichlet::apply_dirichlet;
use super::patch::{LoadParts, PatchProblem};
use crate::airgap::{
    rotate_coupling, torque_closed_form, AirGapCoefficients, CouplingBlocks, GapSystem, HarmonicSet, MU0,
};
use crate::error::{Result, SimError};
use crate::linalg::SparseMatrix;
use serde::{Deserialize, Serialize};

/// Prescribed values on a boundary ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryData {
    Zero,
    /// Ring coefficients in angular order.
    Values(Vec<f64>),
}

/// Which outer rings carry Dirichlet data. The stator ring is mandatory.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSpec {
    pub rotor_inner: Option<BoundaryData>,
    pub stator_outer: Option<BoundaryData>,
}

impl Default for DirichletSpec {
    fn default() -> Self {
        Self {
            rotor_inner: Some(BoundaryData::Zero),
            stator_outer: Some(BoundaryData::Zero),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaeOptions {
    pub dirichlet: DirichletSpec,
    /// Reluctivity of the gap (defaults to `1/μ0`).
    pub nu_gap: f64,
}

impl Default for DaeOptions {
    fn default() -> Self {
        Self {
            dirichlet: DirichletSpec::default(),
            nu_gap: 1.0 / MU0,
        }
    }
}

/// Index bookkeeping: field dofs are rotor then stator (full numbering), of which the free ones
/// form the first block of the state vector; the gap coefficients follow.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub n_rotor: usize,
    pub n_stator: usize,
    /// Full field index of each free dof.
    pub free: Vec<usize>,
    /// Free index of each full field dof, if not Dirichlet.
    pub full_to_free: Vec<Option<usize>>,
    /// Free indices of the rotor interface ring, then the stator interface ring.
    pub interface: Vec<usize>,
    pub n_gap: usize,
}

impl DofLayout {
    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_total(&self) -> usize {
        self.free.len() + self.n_gap
    }

    pub fn gap_range(&self) -> std::ops::Range<usize> {
        self.n_free()..self.n_total()
    }
}

/// The coupled system `M̃ dU/dt + K̃(δ) U = J̃(t)` with `U = (A, α)`.
#[derive(Debug, Clone)]
pub struct BlockDae {
    pub rotor: PatchProblem,
    pub stator: PatchProblem,
    pub harmonics: HarmonicSet,
    pub r1: f64,
    pub r2: f64,
    layout: DofLayout,
    mass: SparseMatrix,
    field_stiffness: SparseMatrix,
    coupling0: CouplingBlocks,
    /// Full field vector holding the Dirichlet data (zero on free dofs).
    dirichlet_values: Vec<f64>,
    /// Free-dof load parts of rotor and stator, lifting included in the fixed part.
    loads: Vec<LoadParts>,
    conducting: Vec<bool>,
}

pub fn assemble_block_dae(
    rotor: PatchProblem,
    stator: PatchProblem,
    harmonics: &HarmonicSet,
    gap_radii: (f64, f64),
    options: &DaeOptions,
) -> Result<BlockDae> {
    let (r1, r2) = gap_radii;
    let tol = 1e-12 * r2;
    if (rotor.patch.r_outer() - r1).abs() > tol {
        return Err(SimError::invalid(format!(
            "rotor outer radius {} does not match R1 = {r1}",
            rotor.patch.r_outer()
        )));
    }
    if (stator.patch.r_inner() - r2).abs() > tol {
        return Err(SimError::invalid(format!(
            "stator inner radius {} does not match R2 = {r2}",
            stator.patch.r_inner()
        )));
    }
    let stator_data = options
        .dirichlet
        .stator_outer
        .as_ref()
        .ok_or_else(|| SimError::invalid("stator outer ring needs a Dirichlet condition"))?;
    let nr = rotor.n_dofs();
    let ns = stator.n_dofs();
    let n_full = nr + ns;

    let (mr, kr) = rayon::join(|| rotor.mass(), || rotor.stiffness());
    let (ms, ks) = rayon::join(|| stator.mass(), || stator.stiffness());
    let (mr, kr, ms, ks) = (mr?, kr?, ms?, ks?);
    fn shift(m: &SparseMatrix, o: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        m.triplets().map(move |(i, j, v)| (i + o, j + o, v))
    }
    let k_full = SparseMatrix::from_triplets(
        n_full,
        n_full,
        &shift(&kr, 0).chain(shift(&ks, nr)).collect::<Vec<_>>(),
    );
    let m_full = SparseMatrix::from_triplets(
        n_full,
        n_full,
        &shift(&mr, 0).chain(shift(&ms, nr)).collect::<Vec<_>>(),
    );

    let mut boundary = Vec::new();
    let mut values = Vec::new();
    let mut push_ring = |ring: Vec<usize>, data: &BoundaryData, offset: usize| -> Result<()> {
        match data {
            BoundaryData::Zero => values.extend(std::iter::repeat_n(0.0, ring.len())),
            BoundaryData::Values(v) => {
                if v.len() != ring.len() {
                    return Err(SimError::invalid(format!(
                        "ring data has {} values, ring has {} dofs",
                        v.len(),
                        ring.len()
                    )));
                }
                values.extend_from_slice(v);
            }
        }
        boundary.extend(ring.into_iter().map(|d| d + offset));
        Ok(())
    };
    if let Some(d) = &options.dirichlet.rotor_inner {
        push_ring(rotor.patch.inner_ring(), d, 0)?;
    }
    push_ring(stator.patch.outer_ring(), stator_data, nr)?;

    let reduced = apply_dirichlet(&k_full, &vec![0.0; n_full], &boundary, &values)?;
    let free = reduced.free.clone();
    let mut full_to_free = vec![None; n_full];
    for (i, &f) in free.iter().enumerate() {
        full_to_free[f] = Some(i);
    }
    let mut interface = Vec::new();
    for d in rotor.patch.outer_ring() {
        interface.push(full_to_free[d].ok_or_else(|| SimError::invalid("rotor interface ring is constrained"))?);
    }
    for d in stator.patch.inner_ring() {
        interface.push(
            full_to_free[d + nr].ok_or_else(|| SimError::invalid("stator interface ring is constrained"))?,
        );
    }
    let n_free = free.len();
    let n_gap = harmonics.n_coefficients();
    let layout = DofLayout {
        n_rotor: nr,
        n_stator: ns,
        free: free.clone(),
        full_to_free,
        interface,
        n_gap,
    };

    let gap = GapSystem::new(harmonics, r1, r2, true)?;
    let coupling0 = CouplingBlocks::assemble_frames(
        rotor.patch.angular_space(),
        stator.patch.angular_space(),
        gap,
        options.nu_gap,
        0.0,
        0.0,
    )?;

    let m_free = m_full.select(&free, &free);
    let mass = SparseMatrix::from_triplets(n_free + n_gap, n_free + n_gap, &m_free.triplets().collect::<Vec<_>>());

    let mut dirichlet_values = vec![0.0; n_full];
    for (&i, &v) in reduced.fixed.iter().zip(&reduced.values) {
        dirichlet_values[i] = v;
    }

    // loads restricted to free dofs; the lifting -K_fD g enters the rotor's fixed part
    let restrict = |v: &[f64], offset: usize| -> Vec<f64> {
        let mut out = vec![0.0; n_free];
        for (i, x) in v.iter().enumerate() {
            if let Some(f) = layout.full_to_free[i + offset] {
                out[f] = *x;
            }
        }
        out
    };
    let mut loads = Vec::new();
    for (p, offset) in [(&rotor, 0), (&stator, nr)] {
        let parts = p.load_parts()?;
        loads.push(LoadParts {
            fixed: restrict(&parts.fixed, offset),
            phases: [
                restrict(&parts.phases[0], offset),
                restrict(&parts.phases[1], offset),
                restrict(&parts.phases[2], offset),
            ],
            supply: parts.supply,
        });
    }
    for (l, x) in loads[0].fixed.iter_mut().zip(&reduced.rhs) {
        *l += x;
    }
    let conducting = (0..n_free).map(|i| m_free.row(i).any(|(_, v)| v != 0.0)).collect();

    Ok(BlockDae {
        rotor,
        stator,
        harmonics: harmonics.clone(),
        r1,
        r2,
        field_stiffness: reduced.matrix,
        layout,
        mass,
        coupling0,
        dirichlet_values,
        loads,
        conducting,
    })
}

impl BlockDae {
    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn n_field(&self) -> usize {
        self.layout.n_free()
    }

    pub fn n_gap(&self) -> usize {
        self.layout.n_gap
    }

    pub fn n_total(&self) -> usize {
        self.layout.n_total()
    }

    /// `M̃`: conductivity mass on the field block, zero gap rows and columns.
    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    /// Field stiffness `K` after Dirichlet elimination.
    pub fn field_stiffness(&self) -> &SparseMatrix {
        &self.field_stiffness
    }

    /// Free field dofs with nonzero mass rows.
    pub fn conducting(&self) -> &[bool] {
        &self.conducting
    }

    pub fn coupling(&self, delta: f64) -> CouplingBlocks {
        rotate_coupling(&self.coupling0, delta)
    }

    /// `K̃(δ) = [[K, C1(δ)], [C2(δ), K_F]]`.
    pub fn stiffness(&self, delta: f64) -> SparseMatrix {
        self.stiffness_from(&self.coupling(delta))
    }

    pub fn stiffness_from(&self, blocks: &CouplingBlocks) -> SparseMatrix {
        let nf = self.n_field();
        let n = self.n_total();
        let mut trip: Vec<(usize, usize, f64)> = self.field_stiffness.triplets().collect();
        let iface = &self.layout.interface;
        for (a, &row) in iface.iter().enumerate() {
            for g in 0..self.n_gap() {
                let v = blocks.c1.get(a, g);
                if v != 0.0 {
                    trip.push((row, nf + g, v));
                }
            }
        }
        for g in 0..self.n_gap() {
            for (a, &col) in iface.iter().enumerate() {
                let v = blocks.c2.get(g, a);
                if v != 0.0 {
                    trip.push((nf + g, col, v));
                }
            }
            for h in 0..self.n_gap() {
                let v = blocks.kf.get(g, h);
                if v != 0.0 {
                    trip.push((nf + g, nf + h, v));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, &trip)
    }

    /// `J̃(t)`: field load (sources and Dirichlet lifting), zero gap rows.
    pub fn load(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_total()];
        for parts in &self.loads {
            let l = parts.at(t)?;
            out.iter_mut().zip(&l).for_each(|(o, x)| *o += x);
        }
        Ok(out)
    }

    /// Whether the load varies in time.
    pub fn has_time_dependent_load(&self) -> bool {
        self.loads.iter().any(|l| l.supply.is_some() && l.phases.iter().any(|p| p.iter().any(|&x| x != 0.0)))
    }

    /// Interface trace coefficients (rotor ring, then stator ring) of a state.
    pub fn interface_values(&self, state: &[f64]) -> Vec<f64> {
        self.layout.interface.iter().map(|&i| state[i]).collect()
    }

    pub fn gap_values<'a>(&self, state: &'a [f64]) -> &'a [f64] {
        &state[self.layout.gap_range()]
    }

    /// Gap coefficients of a state, written relative to `R1`.
    pub fn gap_coefficients(&self, state: &[f64]) -> Result<AirGapCoefficients> {
        AirGapCoefficients::from_slice(&self.harmonics, self.gap_values(state), self.r1, self.r2, self.r1)
    }

    /// `C2(δ) A + K_F α` for a state.
    pub fn constraint_residual(&self, state: &[f64], delta: f64) -> Vec<f64> {
        self.coupling(delta)
            .constraint_residual(&self.interface_values(state), self.gap_values(state))
    }

    /// Replaces the gap rows of `state` by `-K_F⁻¹ C2(δ) A`.
    pub fn make_consistent(&self, state: &mut [f64], delta: f64) -> Result<()> {
        let g = self.coupling(delta).gap_from_traces(&self.interface_values(state))?;
        state[self.layout.gap_range()].copy_from_slice(&g);
        Ok(())
    }

    /// Torque of a state for machine length `length`.
    pub fn torque(&self, state: &[f64], length: f64) -> Result<f64> {
        Ok(torque_closed_form(&self.gap_coefficients(state)?, length))
    }

    fn full_field(&self, state: &[f64]) -> Vec<f64> {
        let mut full = self.dirichlet_values.clone();
        for (i, &f) in self.layout.free.iter().enumerate() {
            full[f] = state[i];
        }
        full
    }

    /// Rotor patch coefficients (rotor frame), Dirichlet values included.
    pub fn rotor_field(&self, state: &[f64]) -> Vec<f64> {
        self.full_field(state)[..self.layout.n_rotor].to_vec()
    }

    /// Stator patch coefficients, Dirichlet values included.
    pub fn stator_field(&self, state: &[f64]) -> Vec<f64> {
        self.full_field(state)[self.layout.n_rotor..].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{Material, MaterialField};
    use crate::spline::AnnularPatch;

    fn dae(harmonics: &HarmonicSet) -> BlockDae {
        let air = Material::new(0.0, 1.0 / MU0);
        let cond = Material::new(1e6, 1.0 / MU0);
        let rp = AnnularPatch::uniform(0.02, 0.0443, 3, 24, 2).unwrap();
        let sp = AnnularPatch::uniform(0.0447, 0.07, 3, 24, 2).unwrap();
        let rotor = PatchProblem::new(rp, MaterialField::uniform(0.02, 0.0443, cond).unwrap()).unwrap();
        let stator = PatchProblem::new(sp, MaterialField::uniform(0.0447, 0.07, air).unwrap()).unwrap();
        assemble_block_dae(rotor, stator, harmonics, (0.0443, 0.0447), &DaeOptions::default()).unwrap()
    }

    #[test]
    fn gap_unknown_count() {
        let d = dae(&HarmonicSet::odd_multiples(3, 35).unwrap());
        assert_eq!(d.n_gap(), 140);
        assert_eq!(d.n_total(), d.n_field() + 140);
    }

    #[test]
    fn mass_gap_rows_are_zero() {
        let d = dae(&HarmonicSet::full(4));
        let m = d.mass();
        for g in d.layout().gap_range() {
            assert_eq!(m.row(g).count(), 0);
        }
        assert!(m.triplets().all(|(i, j, _)| i < d.n_field() && j < d.n_field()));
        assert!(m.is_symmetric(1e-14 * m.norm_inf()));
    }

    #[test]
    fn radius_mismatch_rejected() {
        let h = HarmonicSet::full(2);
        let air = Material::new(0.0, 1.0);
        let rp = AnnularPatch::uniform(0.5, 1.0, 2, 8, 2).unwrap();
        let sp = AnnularPatch::uniform(1.1, 2.0, 2, 8, 2).unwrap();
        let rotor = PatchProblem::new(rp, MaterialField::uniform(0.5, 1.0, air).unwrap()).unwrap();
        let stator = PatchProblem::new(sp, MaterialField::uniform(1.1, 2.0, air).unwrap()).unwrap();
        assert!(assemble_block_dae(rotor.clone(), stator.clone(), &h, (1.0, 1.2), &DaeOptions::default()).is_err());
        let mut opts = DaeOptions::default();
        opts.dirichlet.stator_outer = None;
        assert!(assemble_block_dae(rotor, stator, &h, (1.0, 1.1), &opts).is_err());
    }

    #[test]
    fn stiffness_is_deterministic() {
        let d = dae(&HarmonicSet::full(3));
        assert_eq!(d.stiffness(0.3), d.stiffness(0.3));
    }
}
