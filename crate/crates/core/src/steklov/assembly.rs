use crate::geometry::cusp::parabola_arc;
use crate::geometry::mesh::{dist, signed_area};
use crate::geometry::{ConformalMetric, Mesh, CUSP_CHART, TAG_SIDE_MINUS, TAG_SIDE_PLUS};
use crate::linalg::SymMatrix;

use super::SteklovError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MassKind {
    #[default]
    Consistent,
    Lumped,
}

/// P1 stiffness `∫ ∇u·∇v dA`, independent of the conformal factor.
pub fn assemble_stiffness(mesh: &Mesh, metric: &ConformalMetric) -> Result<SymMatrix, SteklovError> {
    assemble_stiffness_on(mesh, metric, &|_| true)
}

/// Stiffness restricted to the triangles selected by `keep`.
pub fn assemble_stiffness_on(mesh: &Mesh, metric: &ConformalMetric, keep: &dyn Fn(usize) -> bool) -> Result<SymMatrix, SteklovError> {
    metric.validate(mesh)?;
    let seams = mesh.seam_lookup();
    let n = mesh.num_vertices();
    let mut entries = Vec::with_capacity(3 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if !keep(t) {
            continue;
        }
        let p = mesh.triangle_points_with(t, &seams);
        let area = signed_area(&p);
        let scale = (0..3).map(|k| dist(p[k], p[(k + 1) % 3])).fold(0.0, f64::max);
        if !(area.is_finite() && area > 1e-13 * scale * scale) {
            return Err(SteklovError::DegenerateTriangle { triangle: t, area });
        }
        // Edge vectors opposite each vertex; K_ij = e_i·e_j / (4A).
        let e = [0, 1, 2].map(|k| {
            let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
            [b[0] - a[0], b[1] - a[1]]
        });
        for i in 0..3 {
            for j in (i + 1)..3 {
                let kij = (e[i][0] * e[j][0] + e[i][1] * e[j][1]) / (4.0 * area);
                entries.push((tri[i], tri[j], kij));
            }
        }
    }
    let off = SymMatrix::from_entries(n, entries);
    // Diagonal as the negated off-diagonal row sum keeps constants in the kernel.
    let mut diag = vec![0.0; n];
    for (i, j, v) in off.triplets() {
        if i != j {
            diag[i] -= v;
        }
    }
    Ok(SymMatrix::from_entries(n, off.triplets().filter(|(i, j, _)| i < j).chain(diag.into_iter().enumerate().map(|(i, d)| (i, i, d)))))
}

/// Euclidean length of each boundary edge in the chart of its triangle; the
/// parabolic sides of the strip use their exact arc length.
fn chart_lengths(mesh: &Mesh) -> Vec<f64> {
    let tris = mesh.boundary_edge_triangles();
    let cusp = mesh.chart_id(CUSP_CHART);
    mesh.boundary_edges
        .iter()
        .zip(tris)
        .map(|(e, t)| {
            let chart = mesh.triangle_charts[t];
            let (a, b) = (mesh.position(e.a, chart), mesh.position(e.b, chart));
            if Some(chart) == cusp && (e.tag == TAG_SIDE_PLUS || e.tag == TAG_SIDE_MINUS) {
                parabola_arc(a[1], b[1])
            } else {
                dist(a, b)
            }
        })
        .collect()
}

/// Metric length `e^{(ω_a+ω_b)/2}·ℓ` of every boundary edge, in `boundary_edges` order.
pub fn boundary_edge_lengths(mesh: &Mesh, metric: &ConformalMetric) -> Vec<f64> {
    let tris = mesh.boundary_edge_triangles();
    chart_lengths(mesh)
        .into_iter()
        .zip(mesh.boundary_edges.iter().zip(tris))
        .map(|(len, (e, t))| {
            let chart = mesh.triangle_charts[t];
            (0.5 * (metric.omega(e.a, chart) + metric.omega(e.b, chart))).exp() * len
        })
        .collect()
}

pub fn boundary_length(mesh: &Mesh, metric: &ConformalMetric) -> f64 {
    boundary_edge_lengths(mesh, metric).iter().sum()
}

pub fn assemble_boundary_mass(mesh: &Mesh, metric: &ConformalMetric) -> Result<SymMatrix, SteklovError> {
    assemble_boundary_mass_with(mesh, metric, MassKind::Consistent)
}

/// Boundary mass `∫_∂ u v e^ω dl`.
pub fn assemble_boundary_mass_with(mesh: &Mesh, metric: &ConformalMetric, kind: MassKind) -> Result<SymMatrix, SteklovError> {
    assemble_boundary_mass_on(mesh, metric, kind, &|_| true)
}

/// Boundary mass restricted to the boundary edges (by index) selected by `keep`.
pub fn assemble_boundary_mass_on(
    mesh: &Mesh,
    metric: &ConformalMetric,
    kind: MassKind,
    keep: &dyn Fn(usize) -> bool,
) -> Result<SymMatrix, SteklovError> {
    metric.validate(mesh)?;
    let lengths = boundary_edge_lengths(mesh, metric);
    let mut entries = Vec::with_capacity(3 * lengths.len());
    for (k, (e, len)) in mesh.boundary_edges.iter().zip(lengths).enumerate() {
        if !keep(k) {
            continue;
        }
        match kind {
            MassKind::Consistent => {
                entries.push((e.a, e.a, len / 3.0));
                entries.push((e.b, e.b, len / 3.0));
                entries.push((e.a, e.b, len / 6.0));
            }
            MassKind::Lumped => {
                entries.push((e.a, e.a, len / 2.0));
                entries.push((e.b, e.b, len / 2.0));
            }
        }
    }
    Ok(SymMatrix::from_entries(mesh.num_vertices(), entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_cusp_mesh, build_disk_mesh, GlueParams};
    use std::f64::consts::PI;

    #[test]
    fn reference_triangle() {
        let m = Mesh::single_chart(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], "b");
        let a = assemble_stiffness(&m, &ConformalMetric::flat(3)).unwrap();
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(i, j) - want[i][j]).abs() < 1e-15, "{i} {j}");
            }
        }
    }

    #[test]
    fn constants_in_kernel_and_length() {
        let m = build_disk_mesh(3);
        let g = ConformalMetric::flat(m.num_vertices());
        let a = assemble_stiffness(&m, &g).unwrap();
        let ones = vec![1.0; m.num_vertices()];
        assert!(a.mul_vec(&ones).iter().all(|x| x.abs() < 1e-13));
        let b = assemble_boundary_mass(&m, &g).unwrap();
        assert!((b.quad_form(&ones) - boundary_length(&m, &g)).abs() < 1e-13);
        let shifted = assemble_boundary_mass(&m, &g.shifted(0.7)).unwrap();
        for (x, y) in b.triplets().zip(shifted.triplets()) {
            assert!((y.2 - 0.7f64.exp() * x.2).abs() <= 1e-15 * y.2.abs());
        }
    }

    #[test]
    fn stiffness_ignores_the_conformal_factor() {
        let m = build_disk_mesh(2);
        let n = m.num_vertices();
        let g = ConformalMetric::from_values((0..n).map(|i| (i as f64).sin()).collect());
        let a0 = assemble_stiffness(&m, &ConformalMetric::flat(n)).unwrap();
        let a1 = assemble_stiffness(&m, &g).unwrap();
        assert_eq!(a0, a1);
    }

    #[test]
    fn disk_quadratic_forms() {
        let mut last = (f64::INFINITY, f64::INFINITY);
        for k in 2..6 {
            let m = build_disk_mesh(k);
            let g = ConformalMetric::flat(m.num_vertices());
            let a = assemble_stiffness(&m, &g).unwrap();
            let b = assemble_boundary_mass(&m, &g).unwrap();
            let x: Vec<f64> = m.vertices.iter().map(|p| p[0]).collect();
            let e = ((a.quad_form(&x) - PI).abs(), (b.quad_form(&x) - PI).abs());
            assert!(e.0 < last.0 && e.1 < last.1);
            last = e;
        }
        assert!(last.0 < 2e-3 && last.1 < 2e-3, "{last:?}");
    }

    #[test]
    fn cusp_sides_use_arc_length() {
        let p = GlueParams::new(0.2, 0.4, 1.0);
        let m = build_cusp_mesh(&p, 8).unwrap();
        let g = ConformalMetric::flat(m.num_vertices());
        let len = boundary_length(&m, &g);
        let (y0, y1) = (p.eps * p.r, p.eps);
        let want = 2.0 * parabola_arc(y0, y1) + y0 * y0 + y1 * y1;
        assert!((len - want).abs() < 1e-15 * want * 64.0, "{len} {want}");
    }
}
