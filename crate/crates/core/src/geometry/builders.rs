//! Structured meshes of the base domains.

use std::f64::consts::PI;

use super::mesh::{signed_area, Mesh, Point};

fn orient(vertices: &[Point], tri: [usize; 3]) -> [usize; 3] {
    let p = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    if signed_area(&p) < 0.0 {
        [tri[0], tri[2], tri[1]]
    } else {
        tri
    }
}

/// Unit disk: `m = 2^refinement` rings, ring `i` holding `6i` equally spaced
/// vertices on the circle of radius `i/m`. Refinement 0 is the hexagon fan.
pub fn build_disk_mesh(refinement: u32) -> Mesh {
    let m = 1usize << refinement;
    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize; m + 1];
    for i in 1..=m {
        ring_start[i] = vertices.len();
        let radius = i as f64 / m as f64;
        for k in 0..6 * i {
            let theta = 2.0 * PI * k as f64 / (6 * i) as f64;
            vertices.push([radius * theta.cos(), radius * theta.sin()]);
        }
    }
    let id = |i: usize, k: usize| -> usize {
        if i == 0 {
            0
        } else {
            ring_start[i] + k % (6 * i)
        }
    };
    let mut triangles = Vec::with_capacity(6 * m * m);
    for q in 0..6 {
        for i in 1..=m {
            for j in 0..i {
                let a = id(i - 1, q * (i - 1) + j);
                let b = id(i, q * i + j);
                let c = id(i, q * i + j + 1);
                triangles.push(orient(&vertices, [a, b, c]));
                if j + 1 < i {
                    let d = id(i - 1, q * (i - 1) + j + 1);
                    triangles.push(orient(&vertices, [a, c, d]));
                }
            }
        }
    }
    Mesh::single_chart(vertices, triangles, "boundary")
}

/// Round annulus `inner_radius ≤ |z| ≤ 1` on a polar grid with `6·2^refinement`
/// angular divisions and radial spacing matched to the outer arc spacing.
pub fn build_annulus_mesh(inner_radius: f64, refinement: u32) -> Mesh {
    assert!(inner_radius > 0.0 && inner_radius < 1.0, "inner radius must lie in (0, 1)");
    let n_theta = 6usize << refinement;
    let n_r = (((1.0 - inner_radius) * n_theta as f64 / (2.0 * PI)).round() as usize).max(1);
    let mut vertices = Vec::with_capacity((n_r + 1) * n_theta);
    for i in 0..=n_r {
        let radius = inner_radius + (1.0 - inner_radius) * i as f64 / n_r as f64;
        let offset = if i % 2 == 1 { 0.5 } else { 0.0 };
        for k in 0..n_theta {
            let theta = 2.0 * PI * (k as f64 + offset) / n_theta as f64;
            vertices.push([radius * theta.cos(), radius * theta.sin()]);
        }
    }
    let id = |i: usize, k: usize| i * n_theta + k % n_theta;
    let mut triangles = Vec::with_capacity(2 * n_r * n_theta);
    for i in 0..n_r {
        for k in 0..n_theta {
            if i % 2 == 0 {
                triangles.push(orient(&vertices, [id(i, k), id(i, k + 1), id(i + 1, k)]));
                triangles.push(orient(&vertices, [id(i, k + 1), id(i + 1, k + 1), id(i + 1, k)]));
            } else {
                triangles.push(orient(&vertices, [id(i, k), id(i + 1, k + 1), id(i + 1, k)]));
                triangles.push(orient(&vertices, [id(i, k), id(i, k + 1), id(i + 1, k + 1)]));
            }
        }
    }
    let mut mesh = Mesh::single_chart(vertices, triangles, "outer");
    for e in mesh.boundary_edges.iter_mut() {
        if e.a < n_theta {
            e.tag = "inner".into();
        }
    }
    mesh
}

/// Unit square `[0, 1]²` with `n × n` cells split along alternating diagonals.
pub fn build_square_mesh(n: usize) -> Mesh {
    assert!(n >= 1);
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut mesh = Mesh::single_chart(vertices.clone(), triangles, "bottom");
    for e in mesh.boundary_edges.iter_mut() {
        let (p, q) = (vertices[e.a], vertices[e.b]);
        e.tag = if p[1] == 0.0 && q[1] == 0.0 {
            "bottom"
        } else if p[0] == 1.0 && q[0] == 1.0 {
            "right"
        } else if p[1] == 1.0 && q[1] == 1.0 {
            "top"
        } else {
            "left"
        }
        .into();
    }
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::topology_invariants;

    #[test]
    fn hexagon_fan() {
        let m = build_disk_mesh(0);
        assert_eq!((m.vertices.len(), m.triangles.len(), m.boundary_edges.len()), (7, 6, 6));
        m.validate().unwrap();
    }

    #[test]
    fn disk_euler_and_perimeter() {
        let mut last = 0.0;
        for k in 0..6 {
            let m = build_disk_mesh(k);
            m.validate().unwrap();
            assert_eq!(m.euler_characteristic(), 1);
            let per: f64 = m
                .boundary_edges
                .iter()
                .map(|e| crate::geometry::mesh::dist(m.vertices[e.a], m.vertices[e.b]))
                .sum();
            assert!(per > last && per < 2.0 * PI);
            last = per;
            for v in m.boundary_vertices() {
                let p = m.vertices[v];
                assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn annulus_and_square_topology() {
        let a = build_annulus_mesh(0.5, 2);
        a.validate().unwrap();
        let t = topology_invariants(&a).unwrap();
        assert_eq!((t.genus, t.boundary_components, t.orientable), (0, 2, true));
        assert!(a.boundary_edges.iter().any(|e| e.tag == "inner"));
        let s = build_square_mesh(4);
        s.validate().unwrap();
        assert!((s.chart_area() - 1.0).abs() < 1e-14);
        for tag in ["bottom", "right", "top", "left"] {
            assert_eq!(s.boundary_edges.iter().filter(|e| e.tag == tag).count(), 4);
        }
    }
}
