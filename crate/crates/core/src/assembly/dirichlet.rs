use crate::error::{Result, SimError};
use crate::linalg::SparseMatrix;

/// System restricted to the free dofs, with the Dirichlet data lifted into the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub free: Vec<usize>,
    pub fixed: Vec<usize>,
    pub values: Vec<f64>,
    n: usize,
}

impl ReducedSystem {
    /// Full vector from free-dof values and the prescribed data.
    pub fn expand(&self, x_free: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &v) in self.free.iter().zip(x_free) {
            x[i] = v;
        }
        for (&i, &v) in self.fixed.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }
}

/// Eliminates `boundary` dofs carrying `values`: `K_ff x_f = b_f - K_fD g`.
pub fn apply_dirichlet(
    matrix: &SparseMatrix,
    rhs: &[f64],
    boundary: &[usize],
    values: &[f64],
) -> Result<ReducedSystem> {
    let n = matrix.nrows();
    if boundary.is_empty() {
        return Err(SimError::invalid("empty Dirichlet boundary"));
    }
    if boundary.len() != values.len() {
        return Err(SimError::invalid("one Dirichlet value per boundary dof required"));
    }
    if rhs.len() != n || matrix.ncols() != n {
        return Err(SimError::invalid("system dimensions do not match"));
    }
    let mut g = vec![0.0; n];
    let mut is_fixed = vec![false; n];
    for (&i, &v) in boundary.iter().zip(values) {
        if i >= n {
            return Err(SimError::invalid(format!("boundary dof {i} out of range")));
        }
        is_fixed[i] = true;
        g[i] = v;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !is_fixed[i]).collect();
    let (fixed, vals): (Vec<usize>, Vec<f64>) = (0..n).filter(|&i| is_fixed[i]).map(|i| (i, g[i])).unzip();
    let kg = matrix.mul_vec(&g);
    let reduced_rhs = free.iter().map(|&i| rhs[i] - kg[i]).collect();
    Ok(ReducedSystem {
        matrix: matrix.select(&free, &free),
        rhs: reduced_rhs,
        free,
        fixed,
        values: vals,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{Material, MaterialField, PatchProblem};
    use crate::spline::AnnularPatch;

    fn laplace() -> PatchProblem {
        let patch = AnnularPatch::uniform(1.0, 2.0, 3, 8, 2).unwrap();
        let m = MaterialField::uniform(1.0, 2.0, Material::new(0.0, 1.0)).unwrap();
        PatchProblem::new(patch, m).unwrap()
    }

    #[test]
    fn all_dofs_fixed() {
        let k = SparseMatrix::identity(3);
        let r = apply_dirichlet(&k, &[1.0, 2.0, 3.0], &[0, 1, 2], &[0.0; 3]).unwrap();
        assert_eq!(r.matrix.nrows(), 0);
        assert!(r.rhs.is_empty());
    }

    #[test]
    fn empty_boundary_rejected() {
        assert!(apply_dirichlet(&SparseMatrix::identity(2), &[0.0; 2], &[], &[]).is_err());
    }

    #[test]
    fn zero_load_gives_zero() {
        let p = laplace();
        let n = p.patch.n_angular();
        let x = p.solve_dirichlet(&vec![0.0; n], &vec![0.0; n], 0.0).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reduced_stiffness_is_definite() {
        let p = laplace();
        let k = p.stiffness().unwrap();
        let mut b = p.patch.inner_ring();
        b.extend(p.patch.outer_ring());
        let r = apply_dirichlet(&k, &vec![0.0; k.nrows()], &b, &vec![0.0; b.len()]).unwrap();
        let ev = r.matrix.to_dense().symmetric_eigenvalues().unwrap();
        assert!(ev[0] > 0.0, "{}", ev[0]);
    }

    #[test]
    fn lifting_reproduces_constants() {
        let p = laplace();
        let n = p.patch.n_angular();
        let x = p.solve_dirichlet(&vec![2.5; n], &vec![2.5; n], 0.0).unwrap();
        assert!(x.iter().all(|&v| (v - 2.5).abs() < 1e-12));
    }
}
