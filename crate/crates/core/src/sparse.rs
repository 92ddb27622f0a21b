//! Thin wrapper around the sparse direct solver. The symbolic analysis is
//! cached and reused while the assembled sparsity pattern stays the same.

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{Argsort, Pair, SparseColMat, SymbolicSparseColMat};

struct Pattern {
    n: usize,
    indices: Vec<(usize, usize)>,
    structure: SymbolicSparseColMat<usize>,
    argsort: Argsort<usize>,
    lu: SymbolicLu<usize>,
}

#[derive(Default)]
pub(crate) struct SparseSolver {
    pattern: Option<Pattern>,
}

impl SparseSolver {
    /// Solves `K x = rhs` for a matrix given as (row, col, value) triplets;
    /// duplicate entries are summed.
    pub(crate) fn solve(&mut self, n: usize, entries: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>, String> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let same = self.pattern.as_ref().is_some_and(|p| {
            p.n == n && p.indices.len() == entries.len() && p.indices.iter().zip(entries).all(|(a, b)| a.0 == b.0 && a.1 == b.1)
        });
        if !same {
            let pairs: Vec<Pair<usize, usize>> = entries.iter().map(|&(row, col, _)| Pair { row, col }).collect();
            let (structure, argsort) =
                SymbolicSparseColMat::try_new_from_indices(n, n, &pairs).map_err(|e| format!("{e:?}"))?;
            let lu = SymbolicLu::try_new(structure.rb()).map_err(|e| format!("{e:?}"))?;
            let indices = entries.iter().map(|&(r, c, _)| (r, c)).collect();
            self.pattern = Some(Pattern { n, indices, structure, argsort, lu });
        }
        let p = self.pattern.as_ref().expect("pattern just built");
        let values: Vec<f64> = entries.iter().map(|e| e.2).collect();
        let k = SparseColMat::new_from_argsort(p.structure.clone(), &p.argsort, &values).map_err(|e| format!("{e:?}"))?;
        let lu = Lu::try_new_with_symbolic(p.lu.clone(), k.rb()).map_err(|e| format!("{e:?}"))?;
        let b = Col::<f64>::from_fn(n, |i| rhs[i]);
        let x = lu.solve(&b);
        let x: Vec<f64> = (0..n).map(|i| x[i]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err("factorization produced non-finite values".into());
        }
        Ok(x)
    }
}
