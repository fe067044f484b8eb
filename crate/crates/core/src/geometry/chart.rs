//! Boundary curves of base meshes and the half-disk charts at attachment points.

use super::mesh::{dist, Mesh, Point};
use super::GeometryError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCurve {
    /// Circle traversed counterclockwise (`surface_inside`) or clockwise.
    Circle { center: Point, radius: f64, surface_inside: bool },
    /// Boundary made of straight segments.
    Polygon,
}

impl BoundaryCurve {
    pub fn project(&self, p: Point) -> Point {
        match *self {
            BoundaryCurve::Circle { center, radius, .. } => {
                let d = dist(p, center);
                [center[0] + (p[0] - center[0]) * radius / d, center[1] + (p[1] - center[1]) * radius / d]
            }
            BoundaryCurve::Polygon => p,
        }
    }
}

fn signed_polygon_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        a[0] * b[1] - b[0] * a[1]
    }).sum::<f64>() * 0.5
}

/// Detects whether the cycle's vertices lie on a common circle (to `1e-9`
/// relative), fitting center and radius algebraically.
pub fn fit_curve(mesh: &Mesh, cycle: &[usize]) -> BoundaryCurve {
    let pts: Vec<Point> = cycle.iter().map(|&v| mesh.vertices[v]).collect();
    if pts.len() < 3 {
        return BoundaryCurve::Polygon;
    }
    // Least squares for x² + y² + D x + E y + F = 0.
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut atb = nalgebra::Vector3::<f64>::zeros();
    for p in &pts {
        let row = nalgebra::Vector3::new(p[0], p[1], 1.0);
        ata += row * row.transpose();
        atb += row * (-(p[0] * p[0] + p[1] * p[1]));
    }
    let Some(sol) = ata.lu().solve(&atb) else {
        return BoundaryCurve::Polygon;
    };
    let mut center = [-sol[0] / 2.0, -sol[1] / 2.0];
    let r2 = center[0] * center[0] + center[1] * center[1] - sol[2];
    if !(r2 > 0.0) {
        return BoundaryCurve::Polygon;
    }
    let mut radius = r2.sqrt();
    if center[0].abs() < 1e-12 * radius {
        center[0] = 0.0;
    }
    if center[1].abs() < 1e-12 * radius {
        center[1] = 0.0;
    }
    if (radius - radius.round()).abs() < 1e-12 * radius {
        radius = radius.round();
    }
    if pts.iter().all(|&p| (dist(p, center) - radius).abs() <= 1e-9 * radius) {
        BoundaryCurve::Circle { center, radius, surface_inside: signed_polygon_area(&pts) > 0.0 }
    } else {
        BoundaryCurve::Polygon
    }
}

/// Conformal chart near a boundary point `p`: maps the surface side into the
/// upper half plane, `p` to 0, with `|φ'(p)| = 1` and the real coordinate
/// increasing along the boundary traversal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    Circle { center: Point, anchor: Point, radius: f64, surface_inside: bool },
    Line { origin: Point, direction: Point },
}

fn cmul(a: Point, b: Point) -> Point {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

fn cdiv(a: Point, b: Point) -> Point {
    let d = b[0] * b[0] + b[1] * b[1];
    [(a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d]
}

impl Chart {
    /// Chart coordinates `w = φ(z)` (real part along the boundary).
    pub fn forward(&self, z: Point) -> Point {
        match *self {
            Chart::Circle { center, anchor, radius, surface_inside } => {
                let zeta = cdiv([z[0] - center[0], z[1] - center[1]], [anchor[0] - center[0], anchor[1] - center[1]]);
                let q = cdiv([1.0 - zeta[0], -zeta[1]], [1.0 + zeta[0], zeta[1]]);
                // w = ±2iR q
                let w = [-2.0 * radius * q[1], 2.0 * radius * q[0]];
                if surface_inside {
                    w
                } else {
                    [-w[0], -w[1]]
                }
            }
            Chart::Line { origin, direction } => {
                let d = [z[0] - origin[0], z[1] - origin[1]];
                cmul(d, [direction[0], -direction[1]])
            }
        }
    }

    /// Base point with chart coordinate `w`.
    pub fn inverse(&self, w: Point) -> Point {
        match *self {
            Chart::Circle { center, anchor, radius, surface_inside } => {
                let w = if surface_inside { w } else { [-w[0], -w[1]] };
                // ζ = (2iR − w)/(2iR + w)
                let zeta = cdiv([-w[0], 2.0 * radius - w[1]], [w[0], 2.0 * radius + w[1]]);
                let z = cmul(zeta, [anchor[0] - center[0], anchor[1] - center[1]]);
                [center[0] + z[0], center[1] + z[1]]
            }
            Chart::Line { origin, direction } => {
                let d = cmul(w, direction);
                [origin[0] + d[0], origin[1] + d[1]]
            }
        }
    }
}

/// Locates an arc-length position on a boundary cycle and builds its chart.
pub fn chart_at(mesh: &Mesh, cycle: &[usize], curve: &BoundaryCurve, arclength: f64) -> Result<(Point, Chart), GeometryError> {
    match *curve {
        BoundaryCurve::Circle { center, radius, surface_inside } => {
            let start = mesh.vertices[cycle[0]];
            let theta0 = (start[1] - center[1]).atan2(start[0] - center[0]);
            let sign = if surface_inside { 1.0 } else { -1.0 };
            let theta = theta0 + sign * arclength / radius;
            let p = [center[0] + radius * theta.cos(), center[1] + radius * theta.sin()];
            let p = if arclength == 0.0 { start } else { p };
            Ok((p, Chart::Circle { center, anchor: p, radius, surface_inside }))
        }
        BoundaryCurve::Polygon => {
            let n = cycle.len();
            let total: f64 = (0..n).map(|i| dist(mesh.vertices[cycle[i]], mesh.vertices[cycle[(i + 1) % n]])).sum();
            let mut s = arclength.rem_euclid(total);
            for i in 0..n {
                let (a, b) = (mesh.vertices[cycle[i]], mesh.vertices[cycle[(i + 1) % n]]);
                let len = dist(a, b);
                if s <= len {
                    let u = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
                    let p = [a[0] + s * u[0], a[1] + s * u[1]];
                    return Ok((p, Chart::Line { origin: p, direction: u }));
                }
                s -= len;
            }
            Err(GeometryError::InvalidParams { detail: "attachment point not located on its boundary cycle".into() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    #[test]
    fn disk_boundary_is_a_circle() {
        let m = build_disk_mesh(3);
        let cycles = m.boundary_cycles().unwrap();
        match fit_curve(&m, &cycles[0]) {
            BoundaryCurve::Circle { center, radius, surface_inside } => {
                assert_eq!(center, [0.0, 0.0]);
                assert_eq!(radius, 1.0);
                assert!(surface_inside);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn circle_chart_properties() {
        for inside in [true, false] {
            let p = [0.6, 0.8];
            let c = Chart::Circle { center: [0.0, 0.0], anchor: p, radius: 1.0, surface_inside: inside };
            let w0 = c.forward(p);
            assert!(w0[0].abs() < 1e-15 && w0[1].abs() < 1e-15);
            // |φ'(p)| = 1
            let h = 1e-6;
            let w1 = c.forward([p[0] + h, p[1]]);
            assert!((w1[0].hypot(w1[1]) / h - 1.0).abs() < 1e-5);
            // boundary maps to the real axis; surface to the upper half plane
            let q = [0.8f64.cos(), 0.8f64.sin()];
            assert!(c.forward(q)[1].abs() < 1e-14);
            let inner = c.forward([0.5 * p[0], 0.5 * p[1]]);
            assert_eq!(inner[1] > 0.0, inside);
            let z = c.inverse([0.3, 0.0]);
            assert!((z[0].hypot(z[1]) - 1.0).abs() < 1e-14);
            let back = c.forward(z);
            assert!((back[0] - 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn real_coordinate_follows_traversal() {
        let c = Chart::Circle { center: [0.0, 0.0], anchor: [1.0, 0.0], radius: 1.0, surface_inside: true };
        let ahead = c.forward([0.1f64.cos(), 0.1f64.sin()]);
        assert!(ahead[0] > 0.0);
    }
}
