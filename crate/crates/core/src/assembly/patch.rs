use super::material::{MaterialField, Orientation, Source, ThreePhase};
use crate::error::{Result, SimError};
use crate::linalg::SparseMatrix;
use crate::spline::{gauss_rule, AnnularPatch, SplineSpace1D};
use rayon::prelude::*;

/// Basis data of one quadrature point: global dofs, values and polar derivatives.
struct Point {
    r: f64,
    theta: f64,
    weight: f64,
    dofs: Vec<usize>,
    values: Vec<f64>,
    d_r: Vec<f64>,
    d_theta: Vec<f64>,
}

/// Values and derivatives of the `p + 1` local functions at each Gauss point of each element.
struct Tabulated {
    /// per element: (x, w, values, derivatives) per point
    elements: Vec<Vec<(f64, f64, Vec<f64>, Vec<f64>)>>,
}

fn tabulate(space: &SplineSpace1D, n_quad: usize) -> Result<Tabulated> {
    let rule = gauss_rule(n_quad)?;
    let p = space.degree();
    let elements = (0..space.n_elements())
        .map(|e| {
            let (a, b) = space.element_bounds(e);
            rule.mapped(a, b)
                .map(|(x, w)| {
                    let mut v = vec![0.0; p + 1];
                    let mut d = vec![0.0; p + 1];
                    space.eval_on_element(e, x, &mut v, &mut d);
                    (x, w, v, d)
                })
                .collect()
        })
        .collect();
    Ok(Tabulated { elements })
}

/// A spline annulus together with its materials.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchProblem {
    pub patch: AnnularPatch,
    pub materials: MaterialField,
    /// Gauss points per element and direction.
    pub quad_points: usize,
}

/// Load split into a time-independent part and unit-current loads of the three phases.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadParts {
    pub fixed: Vec<f64>,
    pub phases: [Vec<f64>; 3],
    pub supply: Option<ThreePhase>,
}

impl LoadParts {
    pub fn at(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = self.fixed.clone();
        if let Some(s) = &self.supply {
            for (k, part) in self.phases.iter().enumerate() {
                let i = s.current(t, k as u8 + 1)?;
                if i != 0.0 {
                    out.iter_mut().zip(part).for_each(|(o, x)| *o += i * x);
                }
            }
        }
        Ok(out)
    }
}

impl PatchProblem {
    pub fn new(patch: AnnularPatch, materials: MaterialField) -> Result<Self> {
        let tol = 1e-12 * patch.r_outer();
        if (materials.r_inner() - patch.r_inner()).abs() > tol
            || (materials.r_outer() - patch.r_outer()).abs() > tol
        {
            return Err(SimError::invalid(format!(
                "materials cover [{}, {}] but the patch is [{}, {}]",
                materials.r_inner(),
                materials.r_outer(),
                patch.r_inner(),
                patch.r_outer()
            )));
        }
        let quad_points = patch.radial_space().degree().max(patch.angular_space().degree()) + 1;
        Ok(Self {
            patch,
            materials,
            quad_points,
        })
    }

    pub fn with_quadrature(mut self, n: usize) -> Self {
        self.quad_points = n;
        self
    }

    pub fn n_dofs(&self) -> usize {
        self.patch.n_dofs()
    }

    /// Runs `f` on every quadrature point of each radial element row (in parallel over rows)
    /// and concatenates the per-row outputs in row order.
    fn for_points<T: Send>(&self, f: impl Fn(&Point, &mut Vec<T>) + Sync) -> Result<Vec<T>> {
        let rad = tabulate(self.patch.radial_space(), self.quad_points)?;
        let ang = tabulate(self.patch.angular_space(), self.quad_points)?;
        let rs = self.patch.radial_space();
        let asp = self.patch.angular_space();
        let dr_drho = self.patch.r_outer() - self.patch.r_inner();
        let rows: Vec<Vec<T>> = (0..rs.n_elements())
            .into_par_iter()
            .map(|er| {
                let mut out = Vec::new();
                let pr = rs.degree() + 1;
                let pa = asp.degree() + 1;
                let mut pt = Point {
                    r: 0.0,
                    theta: 0.0,
                    weight: 0.0,
                    dofs: vec![0; pr * pa],
                    values: vec![0.0; pr * pa],
                    d_r: vec![0.0; pr * pa],
                    d_theta: vec![0.0; pr * pa],
                };
                for (ea, apts) in ang.elements.iter().enumerate() {
                    for a in 0..pr {
                        for b in 0..pa {
                            pt.dofs[a * pa + b] =
                                self.patch.dof(rs.global_index(er, a), asp.global_index(ea, b));
                        }
                    }
                    for (rho, wr, vr, dvr) in &rad.elements[er] {
                        let r = self.patch.radius(*rho);
                        for (theta, wa, va, dva) in apts {
                            pt.r = r;
                            pt.theta = *theta;
                            pt.weight = wr * wa * r * dr_drho;
                            for a in 0..pr {
                                for b in 0..pa {
                                    let i = a * pa + b;
                                    pt.values[i] = vr[a] * va[b];
                                    pt.d_r[i] = dvr[a] / dr_drho * va[b];
                                    pt.d_theta[i] = vr[a] * dva[b];
                                }
                            }
                            f(&pt, &mut out);
                        }
                    }
                }
                out
            })
            .collect();
        Ok(rows.into_iter().flatten().collect())
    }

    /// `M[j, n] = ∫ σ ψ_n ψ_j dx`.
    pub fn mass(&self) -> Result<SparseMatrix> {
        let trip = self.for_points(|pt, out| {
            let sigma = self.materials.at(pt.r, pt.theta).sigma;
            if sigma == 0.0 {
                return;
            }
            let w = sigma * pt.weight;
            for (i, &di) in pt.dofs.iter().enumerate() {
                for (j, &dj) in pt.dofs.iter().enumerate() {
                    out.push((di, dj, w * pt.values[i] * pt.values[j]));
                }
            }
        })?;
        Ok(SparseMatrix::from_triplets(self.n_dofs(), self.n_dofs(), &trip))
    }

    /// `K[j, n] = ∫ ν ∇ψ_n · ∇ψ_j dx`.
    pub fn stiffness(&self) -> Result<SparseMatrix> {
        let trip = self.for_points(|pt, out| {
            let w = self.materials.at(pt.r, pt.theta).nu * pt.weight;
            let inv_r2 = 1.0 / (pt.r * pt.r);
            for (i, &di) in pt.dofs.iter().enumerate() {
                for (j, &dj) in pt.dofs.iter().enumerate() {
                    let g = pt.d_r[i] * pt.d_r[j] + inv_r2 * pt.d_theta[i] * pt.d_theta[j];
                    out.push((di, dj, w * g));
                }
            }
        })?;
        Ok(SparseMatrix::from_triplets(self.n_dofs(), self.n_dofs(), &trip))
    }

    /// Fixed sources (constant currents, remanence) and unit-current loads per phase.
    pub fn load_parts(&self) -> Result<LoadParts> {
        // (phase slot: 0 fixed, 1..=3 phases, dof, value)
        let entries = self.for_points(|pt, out: &mut Vec<(usize, usize, f64)>| {
            let m = self.materials.at(pt.r, pt.theta);
            match m.source {
                Source::None => {}
                Source::Current { density } => {
                    for (i, &d) in pt.dofs.iter().enumerate() {
                        out.push((0, d, density * pt.weight * pt.values[i]));
                    }
                }
                Source::Phase { phase, sign } => {
                    for (i, &d) in pt.dofs.iter().enumerate() {
                        out.push((phase as usize, d, sign * pt.weight * pt.values[i]));
                    }
                }
                Source::Remanence { b_rem, orientation } => {
                    let (b_r, b_t) = match orientation {
                        Orientation::Radial { sign } => (sign * b_rem, 0.0),
                        Orientation::Parallel { angle } => {
                            (b_rem * (angle - pt.theta).cos(), b_rem * (angle - pt.theta).sin())
                        }
                    };
                    // ∫ ν B_rem · curl ψ with curl ψ = (∂_θψ / r) e_r - ∂_rψ e_θ
                    let w = m.nu * pt.weight;
                    for (i, &d) in pt.dofs.iter().enumerate() {
                        let c = b_r * pt.d_theta[i] / pt.r - b_t * pt.d_r[i];
                        out.push((0, d, w * c));
                    }
                }
            }
        })?;
        let n = self.n_dofs();
        let mut fixed = vec![0.0; n];
        let mut phases = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for (slot, d, v) in entries {
            if slot == 0 {
                fixed[d] += v;
            } else {
                phases[slot - 1][d] += v;
            }
        }
        Ok(LoadParts {
            fixed,
            phases,
            supply: self.materials.supply,
        })
    }

    /// `J[j] = ∫ J_z(t) ψ_j dx` plus the remanence contribution.
    pub fn load(&self, t: f64) -> Result<Vec<f64>> {
        self.load_parts()?.at(t)
    }

    /// Static solve with Dirichlet data on both rings (ring coefficients in angular order).
    pub fn solve_dirichlet(&self, inner: &[f64], outer: &[f64], t: f64) -> Result<Vec<f64>> {
        let k = self.stiffness()?;
        let rhs = self.load(t)?;
        let mut boundary = self.patch.inner_ring();
        boundary.extend(self.patch.outer_ring());
        let mut values = inner.to_vec();
        values.extend_from_slice(outer);
        let reduced = super::dirichlet::apply_dirichlet(&k, &rhs, &boundary, &values)?;
        let x = reduced.matrix.lu()?.solve(&reduced.rhs)?;
        Ok(reduced.expand(&x))
    }

    /// `‖u_h - u‖_{L²}` over the patch, with `u_h` given in this patch's frame turned by `delta`
    /// (so `exact` is evaluated at angle `θ + δ`).
    pub fn l2_error(&self, coeffs: &[f64], delta: f64, exact: impl Fn(f64, f64) -> f64 + Sync) -> Result<f64> {
        let fine = Self {
            quad_points: self.quad_points + 3,
            ..self.clone()
        };
        let parts = fine.for_points(|pt, out| {
            let uh: f64 = pt.dofs.iter().zip(&pt.values).map(|(&d, v)| coeffs[d] * v).sum();
            let e = uh - exact(pt.r, pt.theta + delta);
            out.push(pt.weight * e * e);
        })?;
        Ok(parts.iter().sum::<f64>().sqrt())
    }

    /// `‖u‖_{L²}` of a function over the patch region.
    pub fn l2_norm(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Result<f64> {
        self.l2_error(&vec![0.0; self.n_dofs()], 0.0, f)
    }
}

pub fn assemble_mass(patch: &AnnularPatch, materials: &MaterialField) -> Result<SparseMatrix> {
    PatchProblem::new(patch.clone(), materials.clone())?.mass()
}

pub fn assemble_stiffness(patch: &AnnularPatch, materials: &MaterialField) -> Result<SparseMatrix> {
    PatchProblem::new(patch.clone(), materials.clone())?.stiffness()
}

pub fn assemble_load(patch: &AnnularPatch, materials: &MaterialField, t: f64) -> Result<Vec<f64>> {
    PatchProblem::new(patch.clone(), materials.clone())?.load(t)
}

/// L² projection of `f(θ)` onto a periodic angular space.
pub fn project_ring(space: &SplineSpace1D, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    if !space.is_periodic() {
        return Err(SimError::invalid("ring projection needs a periodic space"));
    }
    let p = space.degree();
    let tab = tabulate(space, (2 * p + 6).min(crate::spline::MAX_GAUSS_POINTS))?;
    let n = space.dimension();
    let mut trip = Vec::new();
    let mut rhs = vec![0.0; n];
    for (e, pts) in tab.elements.iter().enumerate() {
        for (x, w, v, _) in pts {
            let fx = f(*x);
            for a in 0..=p {
                let ga = space.global_index(e, a);
                rhs[ga] += w * fx * v[a];
                for b in 0..=p {
                    trip.push((ga, space.global_index(e, b), w * v[a] * v[b]));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &trip).lu()?.solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::material::{Material, RadialBand, Sector};
    use std::f64::consts::PI;

    fn uniform(sigma: f64, nu: f64) -> PatchProblem {
        let patch = AnnularPatch::uniform(0.5, 1.5, 3, 12, 2).unwrap();
        let m = MaterialField::uniform(0.5, 1.5, Material::new(sigma, nu)).unwrap();
        PatchProblem::new(patch, m).unwrap()
    }

    #[test]
    fn mass_integrates_area() {
        let p = uniform(1.0, 1.0);
        let m = p.mass().unwrap();
        let ones = vec![1.0; p.n_dofs()];
        let total: f64 = m.mul_vec(&ones).iter().sum();
        let area = PI * (1.5f64.powi(2) - 0.25);
        assert!((total / area - 1.0).abs() < 1e-12);
        assert!(m.is_symmetric(1e-15));
        assert!((0..p.n_dofs()).all(|i| m.get(i, i) >= 0.0));
    }

    #[test]
    fn nonconducting_mass_vanishes() {
        assert_eq!(uniform(0.0, 1.0).mass().unwrap().nnz(), 0);
    }

    #[test]
    fn stiffness_kernel_and_symmetry() {
        let p = uniform(0.0, 2.0);
        let k = p.stiffness().unwrap();
        let r = k.mul_vec(&vec![1.0; p.n_dofs()]);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
        assert!(k.is_symmetric(1e-13));
        let ev = k.to_dense().symmetric_eigenvalues().unwrap();
        let scale = k.norm_inf();
        assert!(ev.iter().all(|&l| l >= -1e-10 * scale));
    }

    #[test]
    fn uniform_current_load() {
        let patch = AnnularPatch::uniform(0.5, 1.5, 3, 12, 2).unwrap();
        let m = Material::new(0.0, 1.0).with_source(Source::Current { density: 3.0 });
        let f = MaterialField::uniform(0.5, 1.5, m).unwrap();
        let j = assemble_load(&patch, &f, 0.0).unwrap();
        let total: f64 = j.iter().sum();
        assert!((total / (3.0 * PI * 2.0) - 1.0).abs() < 1e-12);
        assert!(uniform(0.0, 1.0).load(0.3).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn three_phase_total_current_vanishes() {
        let patch = AnnularPatch::uniform(1.0, 2.0, 2, 18, 2).unwrap();
        let sectors = (0..6)
            .map(|i| Sector {
                start: i as f64 * PI / 3.0,
                material: Material::new(0.0, 1.0).with_source(Source::Phase {
                    phase: (i % 3) as u8 + 1,
                    sign: 1.0,
                }),
            })
            .collect();
        let field = MaterialField::new(
            vec![RadialBand {
                r_inner: 1.0,
                r_outer: 2.0,
                sectors,
            }],
            Some(ThreePhase { j0: 5.0, omega: 100.0 }),
        )
        .unwrap();
        for t in [0.0, 0.0031, 0.017] {
            let j = assemble_load(&patch, &field, t).unwrap();
            let total: f64 = j.iter().sum();
            assert!(total.abs() < 1e-11, "t={t}: {total}");
        }
    }

    #[test]
    fn radial_remanence_of_full_ring_has_no_load() {
        // a uniformly radially magnetized full ring carries no equivalent current
        let patch = AnnularPatch::uniform(1.0, 2.0, 2, 16, 2).unwrap();
        let m = Material::new(0.0, 1.0).with_source(Source::Remanence {
            b_rem: 1.0,
            orientation: Orientation::Radial { sign: 1.0 },
        });
        let j = assemble_load(&patch, &MaterialField::uniform(1.0, 2.0, m).unwrap(), 0.0).unwrap();
        assert!(j.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn projection_reproduces_spline() {
        let s = SplineSpace1D::new(crate::spline::KnotVector::periodic_uniform(2, 10, 0.0, 2.0 * PI).unwrap());
        let c: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let proj = project_ring(&s, |x| s.eval_function(&c, x).unwrap()).unwrap();
        for (a, b) in proj.iter().zip(&c) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
