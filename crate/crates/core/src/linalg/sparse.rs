//! Symmetric sparse matrices and a fill-reducing sparse Cholesky.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::CscMatrix;
use std::collections::VecDeque;

use super::LinalgError;

/// Symmetric matrix in compressed row storage holding the full pattern.
///
/// Entries are accumulated on the upper triangle and mirrored, so
/// `get(i, j) == get(j, i)` holds bitwise.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix by summing contributions; `(i, j)` and `(j, i)` address the same entry.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut upper: Vec<(usize, usize, f64)> = entries
            .into_iter()
            .map(|(i, j, v)| if i <= j { (i, j, v) } else { (j, i, v) })
            .collect();
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(upper.len());
        for (i, j, v) in upper {
            assert!(i < n && j < n, "entry ({i}, {j}) outside dimension {n}");
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        let mut full: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * merged.len());
        for &(i, j, v) in &merged {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        full.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &full {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = full.iter().map(|e| e.1).collect();
        let values = full.iter().map(|e| e.2).collect();
        Self { n, row_ptr, col_idx, values }
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as `(row, col, value)` with both triangles present.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.n);
        let mut out = DMatrix::zeros(self.n, x.ncols());
        for c in 0..x.ncols() {
            for i in 0..self.n {
                out[(i, c)] = self.row(i).map(|(j, v)| v * x[(j, c)]).sum();
            }
        }
        out
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &SymMatrix, c: f64) -> Self {
        assert_eq!(self.n, other.n);
        let entries = self
            .triplets()
            .filter(|&(i, j, _)| i <= j)
            .chain(other.triplets().filter(|&(i, j, _)| i <= j).map(|(i, j, v)| (i, j, c * v)));
        Self::from_entries(self.n, entries)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Dense block `self[rows, cols]`.
    pub fn block_dense(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &c) in cols.iter().enumerate() {
            pos[c] = k;
        }
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if pos[j] != usize::MAX {
                    m[(r, pos[j])] = v;
                }
            }
        }
        m
    }

    /// Principal submatrix on `idx` (in that order).
    pub fn principal(&self, idx: &[usize]) -> SymMatrix {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &c) in idx.iter().enumerate() {
            pos[c] = k;
        }
        let entries = idx.iter().enumerate().flat_map(|(r, &i)| {
            let pos = &pos;
            self.row(i)
                .filter(move |&(j, _)| pos[j] != usize::MAX && r <= pos[j])
                .map(move |(j, v)| (r, pos[j], v))
        });
        SymMatrix::from_entries(idx.len(), entries.collect::<Vec<_>>())
    }

    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(i, j, v)| self.get(j, i).to_bits() == v.to_bits())
    }

    fn permuted(&self, perm: &[usize], inv: &[usize]) -> SymMatrix {
        let entries = (0..self.n).flat_map(|new_i| {
            let old_i = perm[new_i];
            self.row(old_i)
                .map(move |(old_j, v)| (new_i, inv[old_j], v))
                .filter(|&(a, b, _)| a <= b)
        });
        SymMatrix::from_entries(self.n, entries.collect::<Vec<_>>())
    }

    fn to_csc(&self) -> CscMatrix<f64> {
        CscMatrix::try_from_csc_data(
            self.n,
            self.n,
            self.row_ptr.clone(),
            self.col_idx.clone(),
            self.values.clone(),
        )
        .expect("symmetric CSR arrays form a valid CSC pattern")
    }
}

/// Reverse Cuthill-McKee ordering: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SymMatrix) -> Vec<usize> {
    let n = a.dim();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| (degree[i], i));
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree);
        let mut queue = VecDeque::new();
        queue.push_back(start);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nbrs.sort_by_key(|&j| (degree[j], j));
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn bfs_levels(a: &SymMatrix, start: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; a.dim()];
    let mut queue = VecDeque::new();
    level[start] = 0;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for (j, _) in a.row(v) {
            if level[j] == usize::MAX {
                level[j] = level[v] + 1;
                queue.push_back(j);
            }
        }
    }
    level
}

fn pseudo_peripheral(a: &SymMatrix, seed: usize, degree: &[usize]) -> usize {
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let level = bfs_levels(a, current);
        let max = level.iter().filter(|&&l| l != usize::MAX).copied().max().unwrap_or(0);
        if max <= ecc && current != seed {
            break;
        }
        ecc = max;
        let next = (0..a.dim())
            .filter(|&i| level[i] == max)
            .min_by_key(|&i| (degree[i], i))
            .unwrap_or(current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Sparse Cholesky factorization `P A Pᵀ = L Lᵀ` with an RCM ordering.
pub struct SparseCholesky {
    perm: Vec<usize>,
    inv: Vec<usize>,
    factor: CscCholesky<f64>,
}

impl std::fmt::Debug for SparseCholesky {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseCholesky").field("n", &self.perm.len()).finish()
    }
}

impl SparseCholesky {
    pub fn factor(a: &SymMatrix) -> Result<Self, LinalgError> {
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let pa = a.permuted(&perm, &inv);
        let factor = CscCholesky::factor(&pa.to_csc())
            .map_err(|_| LinalgError::NotPositiveDefinite { dim: a.dim() })?;
        Ok(Self { perm, inv, factor })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let pb = DVector::from_iterator(b.len(), self.perm.iter().map(|&old| b[old]));
        let x = self.factor.solve(&pb);
        (0..b.len()).map(|old| x[(self.inv[old], 0)]).collect()
    }

    pub fn solve_many(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let pb = DMatrix::from_fn(n, b.ncols(), |i, c| b[(self.perm[i], c)]);
        let x = self.factor.solve(&pb);
        DMatrix::from_fn(n, b.ncols(), |i, c| x[(self.inv[i], c)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SymMatrix {
        let mut e = Vec::new();
        for i in 0..n {
            e.push((i, i, 2.0));
            if i + 1 < n {
                e.push((i, i + 1, -1.0));
            }
        }
        SymMatrix::from_entries(n, e)
    }

    #[test]
    fn duplicates_accumulate_symmetrically() {
        let a = SymMatrix::from_entries(3, vec![(0, 1, 1.0), (1, 0, 2.0), (2, 2, 1.5), (2, 2, 0.5)]);
        assert_eq!(a.get(0, 1), 3.0);
        assert_eq!(a.get(1, 0), 3.0);
        assert_eq!(a.get(2, 2), 2.0);
        assert!(a.is_symmetric());
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian_1d(17);
        let mut p = reverse_cuthill_mckee(&a);
        p.sort();
        assert_eq!(p, (0..17).collect::<Vec<_>>());
    }

    #[test]
    fn cholesky_solves_tridiagonal() {
        let a = laplacian_1d(40);
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x);
        let chol = SparseCholesky::factor(&a).unwrap();
        let y = chol.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SymMatrix::from_entries(2, vec![(0, 0, 1.0), (1, 1, -1.0)]);
        assert!(SparseCholesky::factor(&a).is_err());
    }

    #[test]
    fn principal_block_matches_dense() {
        let a = laplacian_1d(6);
        let idx = [4, 1, 2];
        let p = a.principal(&idx).to_dense();
        let d = a.to_dense();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(p[(r, c)], d[(idx[r], idx[c])]);
            }
        }
    }
}
