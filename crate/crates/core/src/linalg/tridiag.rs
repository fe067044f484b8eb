//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection, vectors by
//! inverse iteration.

use super::LinalgError;

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` coupling `i` and `i + 1`.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based).
    pub fn eigenvalue(&self, k: usize) -> Result<f64, LinalgError> {
        if k >= self.dim() {
            return Err(LinalgError::TooManyEigenpairs { requested: k + 1, dim: self.dim() });
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (lo.abs() + hi.abs() + 1.0);
        lo -= pad;
        hi += pad;
        if self.count_below(lo) > k || self.count_below(hi) <= k {
            return Err(LinalgError::BracketFailure { lo, hi });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut y = rhs.to_vec();
        let tiny = f64::EPSILON * (self.gershgorin().1.abs() + shift.abs()).max(1.0);
        let mut denom = self.diag[0] - shift;
        if denom.abs() < tiny {
            denom = tiny;
        }
        d[0] = denom;
        for i in 1..n {
            c[i - 1] = self.off[i - 1] / d[i - 1];
            y[i] -= c[i - 1] * y[i - 1];
            let mut di = self.diag[i] - shift - c[i - 1] * self.off[i - 1];
            if di.abs() < tiny {
                di = tiny;
            }
            d[i] = di;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]) / d[i];
        }
        x
    }

    /// Unit eigenvector for an accurate eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 % 101) as f64 / 101.0)).collect();
        for _ in 0..4 {
            x = self.solve_shifted(lambda, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_laplacian_spectrum() {
        let n = 50;
        let t = Tridiagonal { diag: vec![2.0; n], off: vec![-1.0; n - 1] };
        for k in 0..5 {
            let exact = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            let lam = t.eigenvalue(k).unwrap();
            assert!((lam - exact).abs() < 1e-13);
            let v = t.eigenvector(lam);
            let r: f64 = t
                .mul_vec(&v)
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lam * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-10);
        }
    }
}
