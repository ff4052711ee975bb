use std::f64::consts::PI;
use stgap_core::airgap::{HarmonicSet, MU0};
use stgap_core::assembly::{
    assemble_block_dae, project_ring, BoundaryData, DaeOptions, DirichletSpec, Material, MaterialField, PatchProblem,
    Source,
};
use stgap_core::spline::AnnularPatch;
use stgap_core::timedomain::static_solve;

fn air(r_in: f64, r_out: f64) -> MaterialField {
    MaterialField::uniform(r_in, r_out, Material::new(0.0, 1.0 / MU0)).unwrap()
}

fn dirichlet_error(nr: usize, na: usize, exact: impl Fn(f64, f64) -> f64 + Sync + Copy) -> f64 {
    let patch = AnnularPatch::uniform(1.0, 2.0, nr, na, 2).unwrap();
    let p = PatchProblem::new(patch, air(1.0, 2.0)).unwrap();
    let space = p.patch.angular_space();
    let inner = project_ring(space, |t| exact(1.0, t)).unwrap();
    let outer = project_ring(space, |t| exact(2.0, t)).unwrap();
    let u = p.solve_dirichlet(&inner, &outer, 0.0).unwrap();
    p.l2_error(&u, 0.0, exact).unwrap()
}

#[test]
fn manufactured_cubic_harmonic_converges_at_order_three() {
    let exact = |r: f64, t: f64| r.powi(3) * (3.0 * t).cos();
    let errors: Vec<f64> = [(4, 12), (8, 24), (16, 48)]
        .iter()
        .map(|&(nr, na)| dirichlet_error(nr, na, exact))
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 2.7, "order {order} from {errors:?}");
    }
}

#[test]
fn uniform_current_reproduces_the_quadratic_potential() {
    // -div(ν grad u) = J with u = -J r²/(4ν) lies in the quadratic spline space
    let (nu, j) = (2.0, 3.0);
    let m = Material::new(0.0, nu).with_source(Source::Current { density: j });
    let field = MaterialField::uniform(1.0, 2.0, m).unwrap();
    let p = PatchProblem::new(AnnularPatch::uniform(1.0, 2.0, 3, 8, 2).unwrap(), field).unwrap();
    let exact = |r: f64, _t: f64| -j * r * r / (4.0 * nu);
    let n = p.patch.n_angular();
    let u = p
        .solve_dirichlet(&vec![exact(1.0, 0.0); n], &vec![exact(2.0, 0.0); n], 0.0)
        .unwrap();
    let e = p.l2_error(&u, 0.0, exact).unwrap();
    assert!(e < 1e-12, "{e}");
}

const R1: f64 = 44.3e-3;
const R2: f64 = 44.7e-3;
const R_IN: f64 = 0.02;
const R_OUT: f64 = 0.075;

fn radii(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Largest difference between the coupled solution with modes `1..=k_max` and a single-patch
/// solve of the whole annulus, sampled inside rotor and stator.
fn coupled_vs_single(k_max: usize) -> f64 {
    let (nr, na) = (12, 96);
    let data = |t: f64| 1.0 / (1.5 - t.cos());
    let rotor = PatchProblem::new(
        AnnularPatch::with_radial_breakpoints(&radii(R_IN, R1, nr), na, 2).unwrap(),
        air(R_IN, R1),
    )
    .unwrap();
    let stator = PatchProblem::new(
        AnnularPatch::with_radial_breakpoints(&radii(R2, R_OUT, nr), na, 2).unwrap(),
        air(R2, R_OUT),
    )
    .unwrap();
    let g = project_ring(rotor.patch.angular_space(), data).unwrap();
    let opts = DaeOptions {
        dirichlet: DirichletSpec {
            rotor_inner: Some(BoundaryData::Values(g.clone())),
            stator_outer: Some(BoundaryData::Zero),
        },
        nu_gap: 1.0 / MU0,
    };
    let dae = assemble_block_dae(rotor, stator, &HarmonicSet::full(k_max), (R1, R2), &opts).unwrap();
    let u = static_solve(&dae, 0.0, 0.0).unwrap();
    let (ur, us) = (dae.rotor_field(&u), dae.stator_field(&u));

    let mut all = radii(R_IN, R1, nr);
    all.extend(radii(R2, R_OUT, nr));
    let single = PatchProblem::new(AnnularPatch::with_radial_breakpoints(&all, na, 2).unwrap(), air(R_IN, R_OUT)).unwrap();
    let v = single.solve_dirichlet(&g, &vec![0.0; na], 0.0).unwrap();

    let mut diff: f64 = 0.0;
    for i in 0..40 {
        let t = 2.0 * PI * (i as f64 + 0.37) / 40.0;
        for r in [0.03, 0.04, R1 - 1e-4] {
            let a = dae.rotor.patch.eval_field(&ur, r, t).unwrap();
            diff = diff.max((a - single.patch.eval_field(&v, r, t).unwrap()).abs());
        }
        for r in [R2 + 1e-4, 0.05, 0.065] {
            let a = dae.stator.patch.eval_field(&us, r, t).unwrap();
            diff = diff.max((a - single.patch.eval_field(&v, r, t).unwrap()).abs());
        }
    }
    diff
}

#[test]
fn coupled_solve_approaches_single_patch_solve() {
    let d: Vec<f64> = [1, 2, 4, 8].iter().map(|&k| coupled_vs_single(k)).collect();
    println!("max difference for k_max = 1, 2, 4, 8: {d:?}");
    for w in d.windows(2) {
        assert!(w[1] < w[0], "{d:?}");
    }
    assert!(d[3] < 1e-4, "{d:?}");
}
