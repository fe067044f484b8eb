//! Boundary log-densities `ψ` added to a base conformal factor, parametrized
//! by Fourier modes along each boundary cycle or by per-vertex values.

use std::f64::consts::PI;

use rand::Rng;

use crate::geometry::mesh::dist;
use crate::geometry::{ConformalMetric, Mesh};
use crate::steklov::boundary_length;

use super::ShapeOptError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parametrization {
    /// `a₀ + Σ_{k≤modes} a_k cos 2πks + b_k sin 2πks` per cycle, `s` the arc fraction.
    Fourier { modes: usize },
    PerVertex,
}

impl Default for Parametrization {
    fn default() -> Self {
        Parametrization::Fourier { modes: 16 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityParam {
    pub parametrization: Parametrization,
    pub cycles: Vec<Vec<usize>>,
    /// Arc fraction in `[0, 1)` of every cycle vertex, in the flat chart.
    pub arc: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
}

impl DensityParam {
    /// Zero density (the base metric itself).
    pub fn zero(mesh: &Mesh, parametrization: Parametrization) -> Result<Self, ShapeOptError> {
        let cycles = mesh.boundary_cycles()?;
        if cycles.is_empty() {
            return Err(ShapeOptError::InvalidInput { detail: "mesh has no boundary".into() });
        }
        let arc = cycles
            .iter()
            .map(|c| {
                let n = c.len();
                let seg: Vec<f64> = (0..n).map(|k| dist(mesh.vertices[c[k]], mesh.vertices[c[(k + 1) % n]])).collect();
                let total: f64 = seg.iter().sum();
                let mut acc = 0.0;
                seg.iter()
                    .map(|s| {
                        let a = acc / total;
                        acc += s;
                        a
                    })
                    .collect()
            })
            .collect();
        let per = match parametrization {
            Parametrization::Fourier { modes } => vec![1 + 2 * modes; cycles.len()],
            Parametrization::PerVertex => cycles.iter().map(|c| c.len()).collect(),
        };
        let n: usize = per.iter().sum();
        Ok(Self { parametrization, cycles, arc, coeffs: vec![0.0; n] })
    }

    /// Random low-frequency density with mode amplitudes `amplitude/k`.
    pub fn random(mesh: &Mesh, parametrization: Parametrization, amplitude: f64, rng: &mut impl Rng) -> Result<Self, ShapeOptError> {
        let mut d = Self::zero(mesh, parametrization)?;
        match parametrization {
            Parametrization::Fourier { modes } => {
                let per = 1 + 2 * modes;
                for (j, c) in d.coeffs.iter_mut().enumerate() {
                    let k = (j % per).div_ceil(2).max(1);
                    *c = amplitude * rng.gen_range(-1.0..1.0) / k as f64;
                }
            }
            Parametrization::PerVertex => {
                for c in d.coeffs.iter_mut() {
                    *c = amplitude * rng.gen_range(-1.0..1.0);
                }
            }
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn per_cycle(&self, c: usize) -> usize {
        match self.parametrization {
            Parametrization::Fourier { modes } => 1 + 2 * modes,
            Parametrization::PerVertex => self.cycles[c].len(),
        }
    }

    fn offset(&self, c: usize) -> usize {
        (0..c).map(|k| self.per_cycle(k)).sum()
    }

    /// Value of basis function `j` of cycle `c` at the cycle's `k`-th vertex.
    fn basis(&self, c: usize, j: usize, k: usize) -> f64 {
        match self.parametrization {
            Parametrization::Fourier { .. } => {
                if j == 0 {
                    return 1.0;
                }
                let m = j.div_ceil(2) as f64;
                let x = 2.0 * PI * m * self.arc[c][k];
                if j % 2 == 1 {
                    x.cos()
                } else {
                    x.sin()
                }
            }
            Parametrization::PerVertex => f64::from(u8::from(j == k)),
        }
    }

    /// `(vertex, ψ)` for every boundary vertex.
    pub fn values(&self) -> Vec<(usize, f64)> {
        self.values_of(&self.coeffs)
    }

    pub fn values_of(&self, coeffs: &[f64]) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        for (c, cycle) in self.cycles.iter().enumerate() {
            let (off, per) = (self.offset(c), self.per_cycle(c));
            for (k, &v) in cycle.iter().enumerate() {
                let psi = match self.parametrization {
                    Parametrization::PerVertex => coeffs[off + k],
                    Parametrization::Fourier { .. } => (0..per).map(|j| coeffs[off + j] * self.basis(c, j, k)).sum(),
                };
                out.push((v, psi));
            }
        }
        out
    }

    /// Per-vertex values of every basis direction, as `(vertex, value)` lists.
    pub fn directions(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = Vec::with_capacity(self.len());
        for (c, cycle) in self.cycles.iter().enumerate() {
            for j in 0..self.per_cycle(c) {
                out.push(cycle.iter().enumerate().map(|(k, &v)| (v, self.basis(c, j, k))).filter(|x| x.1 != 0.0).collect());
            }
        }
        out
    }

    /// The base metric with `ψ` added at boundary vertices (and their chart overrides).
    pub fn metric(&self, base: &ConformalMetric) -> ConformalMetric {
        let mut m = base.clone();
        let vals = self.values();
        let lookup: std::collections::HashMap<usize, f64> = vals.iter().copied().collect();
        for &(v, psi) in &vals {
            m.log_factor[v] += psi;
        }
        for ((v, _), w) in m.chart_overrides.iter_mut() {
            if let Some(psi) = lookup.get(v) {
                *w += psi;
            }
        }
        m
    }

    /// Adds `c` to `ψ` at every boundary vertex.
    pub fn shift(&mut self, c: f64) {
        for cyc in 0..self.cycles.len() {
            let off = self.offset(cyc);
            match self.parametrization {
                Parametrization::Fourier { .. } => self.coeffs[off] += c,
                Parametrization::PerVertex => {
                    for j in 0..self.per_cycle(cyc) {
                        self.coeffs[off + j] += c;
                    }
                }
            }
        }
    }

    /// Shifts `ψ` so the boundary has unit length; a shift below `1e-14` is
    /// skipped, which makes the projection idempotent.
    pub fn normalize(&mut self, mesh: &Mesh, base: &ConformalMetric) -> f64 {
        let l = boundary_length(mesh, &self.metric(base));
        let c = -l.ln();
        if c.abs() >= 1e-14 {
            self.shift(c);
        }
        c
    }

    /// Sup-norm of `ψ` after removing its mean over the boundary vertices.
    pub fn flatness(&self) -> f64 {
        let vals = self.values();
        let mean = vals.iter().map(|x| x.1).sum::<f64>() / vals.len() as f64;
        vals.iter().map(|x| (x.1 - mean).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus_mesh, build_disk_mesh};
    use rand::SeedableRng;

    #[test]
    fn normalization_is_idempotent() {
        let mesh = build_annulus_mesh(0.4, 2);
        let base = ConformalMetric::flat(mesh.num_vertices());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut d = DensityParam::random(&mesh, Parametrization::default(), 0.3, &mut rng).unwrap();
        assert_eq!(d.cycles.len(), 2);
        d.normalize(&mesh, &base);
        let once = d.clone();
        d.normalize(&mesh, &base);
        assert_eq!(once.coeffs, d.coeffs);
        assert!((boundary_length(&mesh, &d.metric(&base)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fourier_matches_per_vertex_evaluation() {
        let mesh = build_disk_mesh(2);
        let mut d = DensityParam::zero(&mesh, Parametrization::Fourier { modes: 2 }).unwrap();
        d.coeffs = vec![0.1, 0.2, -0.3, 0.05, 0.0];
        let dirs = d.directions();
        let vals = d.values();
        for (v, psi) in vals {
            let sum: f64 = dirs.iter().zip(&d.coeffs).map(|(dir, c)| c * dir.iter().find(|x| x.0 == v).map_or(0.0, |x| x.1)).sum();
            assert!((sum - psi).abs() < 1e-14);
        }
        assert!(d.flatness() > 0.3);
    }
}
