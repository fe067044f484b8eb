//! Möbius gauge on the unit disk: a boundary density `e^ψ` is critical for
//! `σ₁·L` exactly when it is constant after a Möbius change of coordinates,
//! i.e. `ψ = c + ln((1 − |a|²)/|1 − āz|²)` on `|z| = 1`.

use crate::geometry::Mesh;

use super::density::DensityParam;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusFit {
    pub a: [f64; 2],
    pub c: f64,
    /// Sup-norm of `ψ` minus the fitted Möbius log-Jacobian and constant.
    pub residual: f64,
}

fn log_jacobian(a: [f64; 2], z: [f64; 2]) -> f64 {
    let a2 = a[0] * a[0] + a[1] * a[1];
    // 1 − ā z
    let re = 1.0 - (a[0] * z[0] + a[1] * z[1]);
    let im = -(a[0] * z[1] - a[1] * z[0]);
    (1.0 - a2).ln() - (re * re + im * im).ln()
}

/// Least-squares Möbius fit of `ψ`; `None` unless the boundary is the unit circle.
pub fn mobius_fit(mesh: &Mesh, density: &DensityParam) -> Option<MobiusFit> {
    if !on_unit_circle(mesh, density) {
        return None;
    }
    let vals = density.values();
    let pts: Vec<[f64; 2]> = vals.iter().map(|&(v, _)| mesh.vertices[v]).collect();
    let psi: Vec<f64> = vals.iter().map(|x| x.1).collect();
    let n = psi.len() as f64;
    let resid = |a: [f64; 2]| -> (f64, Vec<f64>) {
        let j: Vec<f64> = pts.iter().map(|&z| log_jacobian(a, z)).collect();
        let c = psi.iter().zip(&j).map(|(p, q)| p - q).sum::<f64>() / n;
        (c, psi.iter().zip(&j).map(|(p, q)| p - q - c).collect())
    };
    let cost = |a: [f64; 2]| resid(a).1.iter().map(|r| r * r).sum::<f64>();
    let mut a = [0.0, 0.0];
    let mut mu = 1e-3;
    for _ in 0..200 {
        let (_, r) = resid(a);
        let h = 1e-7;
        let cols: Vec<Vec<f64>> = (0..2)
            .map(|k| {
                let mut ap = a;
                ap[k] += h;
                resid(ap).1.iter().zip(&r).map(|(x, y)| (x - y) / h).collect()
            })
            .collect();
        let jtj = nalgebra::Matrix2::from_fn(|i, j| cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum::<f64>());
        let jtr = nalgebra::Vector2::from_fn(|i, _| -cols[i].iter().zip(&r).map(|(x, y)| x * y).sum::<f64>());
        let c0 = cost(a);
        let mut improved = false;
        for _ in 0..30 {
            let m = jtj + nalgebra::Matrix2::identity() * mu * (1.0 + jtj.trace());
            let Some(d) = m.lu().solve(&jtr) else { break };
            let trial = [a[0] + d[0], a[1] + d[1]];
            if trial[0].hypot(trial[1]) < 0.999 && cost(trial) < c0 {
                a = trial;
                mu = (mu * 0.3).max(1e-12);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved || jtr.norm() < 1e-14 {
            break;
        }
    }
    let (c, r) = resid(a);
    Some(MobiusFit { a, c, residual: r.iter().fold(0.0, |m, x| m.max(x.abs())) })
}

fn on_unit_circle(mesh: &Mesh, density: &DensityParam) -> bool {
    density.cycles.len() == 1
        && density.cycles[0].iter().all(|&v| {
            let p = mesh.vertices[v];
            ((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() <= 1e-9
        })
}

/// Tangents `2 sin θ ψ′ + 2 cos θ` and `−2 cos θ ψ′ + 2 sin θ` of the boost
/// orbit through `ψ` on the unit circle, with the arc weight of each vertex.
pub fn mobius_tangents(mesh: &Mesh, density: &DensityParam) -> Option<([Vec<f64>; 2], Vec<f64>)> {
    if !on_unit_circle(mesh, density) {
        return None;
    }
    let cycle = &density.cycles[0];
    let n = cycle.len();
    let psi: Vec<f64> = density.values().into_iter().map(|x| x.1).collect();
    let theta: Vec<f64> = cycle.iter().map(|&v| mesh.vertices[v][1].atan2(mesh.vertices[v][0])).collect();
    let gap = |a: f64, b: f64| (b - a).rem_euclid(2.0 * std::f64::consts::PI);
    let mut t = [vec![0.0; n], vec![0.0; n]];
    let mut w = vec![0.0; n];
    for k in 0..n {
        let (prev, next) = ((k + n - 1) % n, (k + 1) % n);
        let (h0, h1) = (gap(theta[prev], theta[k]), gap(theta[k], theta[next]));
        let dpsi = (psi[next] - psi[prev]) / (h0 + h1);
        let (s, c) = theta[k].sin_cos();
        t[0][k] = 2.0 * s * dpsi + 2.0 * c;
        t[1][k] = -2.0 * c * dpsi + 2.0 * s;
        w[k] = 0.5 * (h0 + h1);
    }
    Some((t, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;
    use crate::shapeopt::Parametrization;

    #[test]
    fn recovers_a_pulled_back_uniform_density() {
        let mesh = build_disk_mesh(3);
        let mut d = DensityParam::zero(&mesh, Parametrization::PerVertex).unwrap();
        let a = [0.2, -0.1];
        for (k, &v) in d.cycles[0].clone().iter().enumerate() {
            d.coeffs[k] = 0.4 + log_jacobian(a, mesh.vertices[v]);
        }
        let fit = mobius_fit(&mesh, &d).unwrap();
        assert!(fit.residual < 1e-8, "{fit:?}");
        assert!((fit.a[0] - 0.2).abs() < 1e-6 && (fit.a[1] + 0.1).abs() < 1e-6);
        assert!(d.flatness() > 0.2);
    }
}
