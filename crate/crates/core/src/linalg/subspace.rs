//! Shifted subspace iteration for the lowest eigenpairs of a sparse pencil
//! `A x = λ B x` with `A` positive semidefinite and `B` semidefinite.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dense::{sym_eig_sorted, symmetrize};
use super::sparse::{SparseCholesky, SymMatrix};
use super::LinalgError;

#[derive(Clone, Debug)]
pub struct SubspaceOptions {
    /// `A + shift·B` is factorized; pick it near the wanted eigenvalues.
    pub shift: f64,
    pub extra: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self { shift: 1.0, extra: 10, max_iter: 2000, tol: 1e-10, seed: 7 }
    }
}

#[derive(Clone, Debug)]
pub struct SubspaceResult {
    pub values: Vec<f64>,
    /// Columns are `B`-orthonormal eigenvectors.
    pub vectors: DMatrix<f64>,
    pub iterations: usize,
    pub max_residual: f64,
}

fn rayleigh_ritz(a: &SymMatrix, b: &SymMatrix, y: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let by = b.mul_dense(y);
    let mut gram = y.transpose() * &by;
    symmetrize(&mut gram);
    let (lam, q) = sym_eig_sorted(gram);
    let top = lam.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..lam.len()).filter(|&k| lam[k] > 1e-13 * top).collect();
    let z = DMatrix::from_fn(y.nrows(), keep.len(), |i, c| {
        let k = keep[c];
        (0..y.ncols()).map(|j| y[(i, j)] * q[(j, k)]).sum::<f64>() / lam[k].sqrt()
    });
    let mut az = z.transpose() * a.mul_dense(&z);
    symmetrize(&mut az);
    let (values, v) = sym_eig_sorted(az);
    (values, z * v)
}

pub fn lowest_eigenpairs(
    a: &SymMatrix,
    b: &SymMatrix,
    count: usize,
    opts: &SubspaceOptions,
) -> Result<SubspaceResult, LinalgError> {
    let n = a.dim();
    let p = (count + opts.extra.max(count)).min(n);
    if count > p {
        return Err(LinalgError::TooManyEigenpairs { requested: count, dim: n });
    }
    let k = a.add_scaled(b, opts.shift);
    let chol = SparseCholesky::factor(&k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
    let mut last_residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let y = chol.solve_many(&b.mul_dense(&x));
        let (values, z) = rayleigh_ritz(a, b, &y);
        if values.len() < count {
            return Err(LinalgError::TooManyEigenpairs { requested: count, dim: values.len() });
        }
        let az = a.mul_dense(&z);
        let bz = b.mul_dense(&z);
        let mut worst: f64 = 0.0;
        for c in 0..count {
            let mut num = 0.0;
            let mut den_a = 0.0;
            let mut den_b = 0.0;
            for i in 0..n {
                let r = az[(i, c)] - values[c] * bz[(i, c)];
                num += r * r;
                den_a += az[(i, c)] * az[(i, c)];
                den_b += bz[(i, c)] * bz[(i, c)];
            }
            let scale = den_a.sqrt() + (values[c].abs() + opts.shift) * den_b.sqrt();
            worst = worst.max(num.sqrt() / scale.max(f64::MIN_POSITIVE));
        }
        last_residual = worst;
        x = z;
        if worst <= opts.tol {
            let vectors = x.columns(0, count).into_owned();
            return Ok(SubspaceResult {
                values: values[..count].to_vec(),
                vectors,
                iterations: it,
                max_residual: worst,
            });
        }
    }
    Err(LinalgError::NotConverged { iterations: opts.max_iter, residual: last_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil_with_null_mass() {
        let n = 30;
        let a = SymMatrix::from_entries(n, (0..n).map(|i| (i, i, 1.0 + i as f64)));
        let b = SymMatrix::from_entries(n, (0..10).map(|i| (i, i, 1.0)));
        let r = lowest_eigenpairs(&a, &b, 4, &SubspaceOptions::default()).unwrap();
        for (k, v) in r.values.iter().enumerate() {
            assert!((v - (1.0 + k as f64)).abs() < 1e-10, "{v}");
        }
    }
}
