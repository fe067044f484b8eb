//! Dense symmetric-definite generalized eigenproblems.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::LinalgError;

/// Eigenpairs of `S x = λ B x` with `B` symmetric positive definite.
///
/// Eigenvalues ascend; eigenvectors are the columns, `B`-orthonormal.
#[derive(Clone, Debug)]
pub struct GenEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub fn sym_eig_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    (values, vectors)
}

pub fn gen_sym_eig(s: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<GenEig, LinalgError> {
    let n = s.nrows();
    let chol = Cholesky::new(b.clone()).ok_or(LinalgError::NotPositiveDefinite { dim: n })?;
    let l = chol.l();
    let linv_s = l
        .solve_lower_triangular(s)
        .ok_or(LinalgError::Singular { dim: n })?;
    let mut c = l
        .solve_lower_triangular(&linv_s.transpose())
        .ok_or(LinalgError::Singular { dim: n })?;
    symmetrize(&mut c);
    let (values, y) = sym_eig_sorted(c);
    let vectors = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(LinalgError::Singular { dim: n })?;
    Ok(GenEig { values, vectors })
}

pub fn column(m: &DMatrix<f64>, c: usize) -> Vec<f64> {
    m.column(c).iter().copied().collect()
}

pub fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil() {
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![6.0, 2.0, 3.0]));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
        let e = gen_sym_eig(&s, &b).unwrap();
        assert_eq!(e.values.len(), 3);
        for (v, w) in e.values.iter().zip([2.0, 3.0, 3.0]) {
            assert!((v - w).abs() < 1e-14);
        }
        let g = e.vectors.transpose() * &b * &e.vectors;
        assert!((g - DMatrix::identity(3, 3)).norm() < 1e-12);
    }
}
