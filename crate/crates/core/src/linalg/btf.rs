//! Sparse direct solve through a block triangular form: a zero-free diagonal is found by a
//! maximum transversal, the strongly connected components of the resulting graph give the
//! diagonal blocks, and only those blocks are factorized.

use super::{norm_inf, SparseLu, SparseMatrix};
use crate::error::{Result, SimError};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

const NONE: usize = usize::MAX;

/// `row_of_col[c]` is the row placed on the diagonal in column `c`.
pub fn max_transversal(a: &SparseMatrix) -> Result<Vec<usize>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(SimError::invalid("transversal of a non-square matrix"));
    }
    let mut row_of_col = vec![NONE; n];
    let mut col_of_row = vec![NONE; n];
    for r in 0..n {
        if let Some((c, _)) = a.row(r).find(|&(c, v)| v != 0.0 && row_of_col[c] == NONE) {
            row_of_col[c] = r;
            col_of_row[r] = c;
        }
    }
    let cols: Vec<Vec<usize>> = (0..n)
        .map(|r| a.row(r).filter(|&(_, v)| v != 0.0).map(|(c, _)| c).collect())
        .collect();
    let mut stamp = vec![NONE; n];
    // (row, next entry to try, column taken at this level)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for r0 in 0..n {
        if col_of_row[r0] != NONE {
            continue;
        }
        stack.clear();
        stack.push((r0, 0, NONE));
        let mut found = false;
        while let Some(top) = stack.last_mut() {
            let (r, pos) = (top.0, top.1);
            let Some(k) = (pos..cols[r].len()).find(|&k| stamp[cols[r][k]] != r0) else {
                stack.pop();
                continue;
            };
            let c = cols[r][k];
            stamp[c] = r0;
            top.1 = k + 1;
            top.2 = c;
            if row_of_col[c] == NONE {
                found = true;
                break;
            }
            stack.push((row_of_col[c], 0, NONE));
        }
        if !found {
            return Err(SimError::Singular("matrix is structurally singular".into()));
        }
        for &(r, _, c) in &stack {
            row_of_col[c] = r;
            col_of_row[r] = c;
        }
    }
    Ok(row_of_col)
}

enum BlockFactor {
    Scalar(f64),
    Sparse(SparseLu),
}

/// Factorization of a square sparse matrix in block triangular form.
pub struct BlockTriangularLu {
    matrix: SparseMatrix,
    row_of_col: Vec<usize>,
    /// Column sets of the diagonal blocks, in solve order.
    blocks: Vec<Vec<usize>>,
    factors: Vec<BlockFactor>,
}

impl BlockTriangularLu {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows();
        let row_of_col = max_transversal(a)?;
        let mut g = DiGraph::<(), (), u32>::with_capacity(n, a.nnz());
        for _ in 0..n {
            g.add_node(());
        }
        for (c, &r) in row_of_col.iter().enumerate() {
            for (c2, v) in a.row(r) {
                if c2 != c && v != 0.0 {
                    g.add_edge(NodeIndex::new(c), NodeIndex::new(c2), ());
                }
            }
        }
        // reverse topological order: every block depends only on earlier ones
        let blocks: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|mut s| {
                let mut cols: Vec<usize> = s.drain(..).map(|v| v.index()).collect();
                cols.sort_unstable();
                cols
            })
            .collect();
        drop(g);
        let factors = blocks
            .iter()
            .map(|cols| {
                if cols.len() == 1 {
                    let d = a.get(row_of_col[cols[0]], cols[0]);
                    if d == 0.0 {
                        return Err(SimError::Singular("zero pivot in 1×1 block".into()));
                    }
                    Ok(BlockFactor::Scalar(d))
                } else {
                    let rows: Vec<usize> = cols.iter().map(|&c| row_of_col[c]).collect();
                    a.select(&rows, cols).lu().map(BlockFactor::Sparse)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            matrix: a.clone(),
            row_of_col,
            blocks,
            factors,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Largest diagonal block size.
    pub fn max_block(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn sweep(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.matrix.nrows();
        let mut x = vec![0.0; n];
        let mut solved = vec![false; n];
        for (cols, f) in self.blocks.iter().zip(&self.factors) {
            let rhs: Vec<f64> = cols
                .iter()
                .map(|&c| {
                    let r = self.row_of_col[c];
                    let known: f64 = self.matrix.row(r).filter(|&(j, _)| solved[j]).map(|(j, v)| v * x[j]).sum();
                    b[r] - known
                })
                .collect();
            let y = match f {
                BlockFactor::Scalar(d) => vec![rhs[0] / d],
                BlockFactor::Sparse(lu) => lu.solve(&rhs)?,
            };
            for (&c, v) in cols.iter().zip(y) {
                x[c] = v;
                solved[c] = true;
            }
        }
        Ok(x)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.matrix.nrows() {
            return Err(SimError::invalid("block triangular solve: dimension mismatch"));
        }
        let mut x = self.sweep(b)?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Singular("block triangular solve produced non-finite values".into()));
        }
        let mut last = f64::INFINITY;
        for _ in 0..2 {
            let ax = self.matrix.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rn = norm_inf(&r);
            if rn == 0.0 || rn >= 0.5 * last {
                break;
            }
            last = rn;
            for (xi, d) in x.iter_mut().zip(self.sweep(&r)?) {
                *xi += d;
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
        let ax = a.mul_vec(x);
        norm_inf(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>())
    }

    #[test]
    fn transversal_repairs_zero_diagonal() {
        // anti-diagonal
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 2, 1.0), (1, 1, 2.0), (2, 0, 3.0)]);
        let m = max_transversal(&a).unwrap();
        assert_eq!(m, vec![2, 1, 0]);
        let b = [1.0, 2.0, 3.0];
        let x = BlockTriangularLu::new(&a).unwrap().solve(&b).unwrap();
        assert!(residual(&a, &x, &b) < 1e-15);
    }

    #[test]
    fn transversal_needs_augmenting_path() {
        // greedy picks (0,0) for row 0, row 1 has only column 0
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0)]);
        let m = max_transversal(&a).unwrap();
        assert_eq!(m, vec![1, 0]);
    }

    #[test]
    fn structurally_singular_rejected() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]);
        assert!(BlockTriangularLu::new(&a).is_err());
    }

    #[test]
    fn block_bidiagonal_is_split() {
        let mut rng = StdRng::seed_from_u64(7);
        let (nb, bs) = (6, 5);
        let n = nb * bs;
        let mut t = Vec::new();
        for blk in 0..nb {
            let o = blk * bs;
            for i in 0..bs {
                t.push((o + i, o + i, 4.0 + rng.random::<f64>()));
                t.push((o + i, o + (i + 1) % bs, rng.random::<f64>()));
                if blk > 0 {
                    t.push((o + i, o - bs + rng.random_range(0..bs), rng.random::<f64>()));
                }
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t);
        let f = BlockTriangularLu::new(&a).unwrap();
        assert_eq!(f.n_blocks(), nb);
        assert_eq!(f.max_block(), bs);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b).unwrap();
        let xd = a.to_dense().solve(&b).unwrap();
        for (p, q) in x.iter().zip(&xd) {
            assert!((p - q).abs() < 1e-13 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn random_permuted_matches_dense() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..40);
            let perm: Vec<usize> = {
                let mut p: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    p.swap(i, rng.random_range(0..=i));
                }
                p
            };
            let mut t = Vec::new();
            for i in 0..n {
                t.push((perm[i], i, 3.0 + rng.random::<f64>()));
                for _ in 0..2 {
                    t.push((perm[i], rng.random_range(0..n), 0.3 * rng.random::<f64>()));
                }
            }
            let a = SparseMatrix::from_triplets(n, n, &t);
            let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let x = BlockTriangularLu::new(&a).unwrap().solve(&b).unwrap();
            assert!(residual(&a, &x, &b) < 1e-12);
        }
    }
}
