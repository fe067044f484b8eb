//! The thin cuspidal strip `{εr ≤ y ≤ ε, |x| ≤ y²/2}` carrying the flat metric
//! scaled by `1/t²`.

use super::mesh::{signed_area, BoundaryEdge, Mesh, Point, CUSP_CHART};
use super::GeometryError;

pub const TAG_BOTTOM: &str = "bottom";
pub const TAG_TOP: &str = "top";
pub const TAG_SIDE_PLUS: &str = "side_plus";
pub const TAG_SIDE_MINUS: &str = "side_minus";

/// A point on a boundary component of the base surface, given by the index of
/// the component (cycles ordered by smallest vertex index) and the arc length
/// from the component's first vertex in the direction of traversal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub component: usize,
    pub arclength: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlueParams {
    pub eps: f64,
    /// `Some(α)` when `r` is derived as `exp(−ε^{−α})`.
    pub alpha: Option<f64>,
    pub r: f64,
    pub t: f64,
    pub p0: BoundaryPoint,
    pub p1: BoundaryPoint,
    /// Reverses the strip's horizontal coordinate at the `p0` and `p1` ends.
    pub orientation_flags: (bool, bool),
    /// Orientability the caller expects from the glueing, if any.
    pub require_orientable: Option<bool>,
}

pub const DEFAULT_ALPHA: f64 = 0.45;

pub fn truncation(eps: f64, alpha: f64) -> f64 {
    (-eps.powf(-alpha)).exp()
}

impl GlueParams {
    /// α-mode parameters attached at arc lengths 0 and half the circumference
    /// of the unit circle on component 0.
    pub fn new(eps: f64, alpha: f64, t: f64) -> Self {
        Self {
            eps,
            alpha: Some(alpha),
            r: truncation(eps, alpha),
            t,
            p0: BoundaryPoint { component: 0, arclength: 0.0 },
            p1: BoundaryPoint { component: 0, arclength: std::f64::consts::PI },
            orientation_flags: (false, false),
            require_orientable: None,
        }
    }

    pub fn with_r(eps: f64, r: f64, t: f64) -> Self {
        Self { alpha: None, r, ..Self::new(eps, DEFAULT_ALPHA, t) }
    }

    pub fn with_t(&self, t: f64) -> Self {
        Self { t, ..self.clone() }
    }

    /// `ln(1/r)`.
    pub fn log_inv_r(&self) -> f64 {
        match self.alpha {
            Some(a) => self.eps.powf(-a),
            None => -self.r.ln(),
        }
    }

    /// The exponent α, derived from `r` when not given.
    pub fn alpha_effective(&self) -> f64 {
        self.alpha.unwrap_or_else(|| self.log_inv_r().ln() / (1.0 / self.eps).ln())
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |detail: String| Err(GeometryError::InvalidParams { detail });
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return bad(format!("ε = {} must lie in (0, 0.5)", self.eps));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return bad(format!("α = {a} must lie in (0, 1)"));
            }
            if self.r.to_bits() != truncation(self.eps, a).to_bits() {
                return bad("r differs from exp(−ε^{−α})".into());
            }
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return bad(format!("r = {} must lie in (0, 1)", self.r));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad(format!("t = {} must be positive", self.t));
        }
        if self.eps * self.r == 0.0 || (self.eps * self.r).powi(2) == 0.0 {
            return Err(GeometryError::DegenerateGeometry { detail: "εr underflows".into() });
        }
        Ok(())
    }

    /// Chart width of the attachment interval at `p0` (ε²) and `p1` (ε²r²).
    pub fn interval_widths(&self) -> (f64, f64) {
        (self.eps * self.eps, (self.eps * self.r).powi(2))
    }
}

/// Antiderivative of `√(1 + y²)`.
pub fn parabola_arc_primitive(y: f64) -> f64 {
    0.5 * (y * (1.0 + y * y).sqrt() + y.asinh())
}

/// Arc length of `x = ±y²/2` between heights `y0` and `y1`.
pub fn parabola_arc(y0: f64, y1: f64) -> f64 {
    (parabola_arc_primitive(y1) - parabola_arc_primitive(y0)).abs()
}

#[derive(Clone, Debug)]
pub struct CuspMeshOptions {
    pub layers: usize,
    /// Columns of the interior rows; chosen from the angle floor when `None`.
    pub columns: Option<usize>,
    pub min_angle_deg: f64,
}

impl CuspMeshOptions {
    pub fn with_layers(layers: usize) -> Self {
        Self { layers, columns: None, min_angle_deg: 5.0 }
    }

    /// Smallest column count whose right triangles in `(s, v)` respect the floor.
    pub fn resolved_columns(&self) -> usize {
        if let Some(c) = self.columns {
            return c.max(2);
        }
        let dv = 1.0 / self.layers as f64;
        let max_ds = dv / self.min_angle_deg.to_radians().tan();
        let mut cols = ((2.0 / max_ds).ceil() as usize + 1).max(3);
        while 2.0 / (cols - 1) as f64 > max_ds {
            cols += 1;
        }
        cols
    }
}

/// Nodes of a cusp grid: per row `k` (`v = k/layers`, top row first) the
/// ordered `s` positions.
#[derive(Clone, Debug)]
pub struct CuspGrid {
    pub rows_s: Vec<Vec<f64>>,
    pub rows_v: Vec<f64>,
}

/// Physical position of grid node `(s, v)`.
pub fn cusp_point(params: &GlueParams, s: f64, v: f64) -> Point {
    let y = cusp_height(params, v);
    [s * y * y / 2.0, y]
}

pub fn cusp_height(params: &GlueParams, v: f64) -> f64 {
    if v == 0.0 {
        params.eps
    } else if v == 1.0 {
        params.eps * params.r
    } else {
        params.eps * (-v * params.log_inv_r()).exp()
    }
}

pub fn uniform_row(cols: usize) -> Vec<f64> {
    (0..cols)
        .map(|j| if j + 1 == cols { 1.0 } else { -1.0 + 2.0 * j as f64 / (cols - 1) as f64 })
        .collect()
}

impl CuspGrid {
    pub fn uniform(opts: &CuspMeshOptions) -> Self {
        let cols = opts.resolved_columns();
        let rows_v = (0..=opts.layers).map(|k| k as f64 / opts.layers as f64).collect();
        Self { rows_s: vec![uniform_row(cols); opts.layers + 1], rows_v }
    }
}

/// Triangulates consecutive rows; `ids[k][j]` is the vertex of node `j` of row `k`.
/// Triangles are returned counterclockwise in physical coordinates.
pub fn zipper_rows(grid: &CuspGrid, ids: &[Vec<usize>], pos: &dyn Fn(usize) -> Point) -> Vec<[usize; 3]> {
    let mut tris = Vec::new();
    for k in 0..grid.rows_v.len() - 1 {
        let (sa, sb) = (&grid.rows_s[k], &grid.rows_s[k + 1]);
        let (ia, ib) = (&ids[k], &ids[k + 1]);
        let (mut i, mut j) = (0, 0);
        while i + 1 < sa.len() || j + 1 < sb.len() {
            let advance_a = if i + 1 == sa.len() {
                false
            } else if j + 1 == sb.len() {
                true
            } else {
                sa[i + 1] + sa[i] <= sb[j + 1] + sb[j]
            };
            let tri = if advance_a {
                i += 1;
                [ia[i - 1], ia[i], ib[j]]
            } else {
                j += 1;
                [ia[i], ib[j], ib[j - 1]]
            };
            let p = tri.map(pos);
            tris.push(if signed_area(&p) < 0.0 { [tri[0], tri[2], tri[1]] } else { tri });
        }
    }
    tris
}

/// Anisotropic graded mesh of the cusp in physical coordinates (single chart `cusp`).
pub fn build_cusp_mesh(params: &GlueParams, layers: usize) -> Result<Mesh, GeometryError> {
    build_cusp_mesh_with(params, &CuspMeshOptions::with_layers(layers))
}

pub fn build_cusp_mesh_with(params: &GlueParams, opts: &CuspMeshOptions) -> Result<Mesh, GeometryError> {
    params.validate()?;
    if opts.layers < 4 {
        return Err(GeometryError::InvalidParams { detail: format!("layers = {} must be at least 4", opts.layers) });
    }
    let grid = CuspGrid::uniform(opts);
    let mut vertices = Vec::new();
    let mut ids = Vec::new();
    for (k, row) in grid.rows_s.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for &s in row {
            r.push(vertices.len());
            vertices.push(cusp_point(params, s, grid.rows_v[k]));
        }
        ids.push(r);
    }
    let triangles = zipper_rows(&grid, &ids, &|v| vertices[v]);
    let n = triangles.len();
    let mut mesh = Mesh {
        vertices,
        triangles,
        triangle_charts: vec![0; n],
        charts: vec![CUSP_CHART.to_string()],
        boundary_edges: Vec::new(),
        seams: Vec::new(),
    };
    let last = ids.len() - 1;
    let cols_top = ids[0].len();
    let cols_bottom = ids[last].len();
    mesh.boundary_edges = mesh
        .oriented_boundary_edges()
        .into_iter()
        .map(|(a, b)| {
            let tag = if ids[0].contains(&a) && ids[0].contains(&b) {
                TAG_TOP
            } else if ids[last].contains(&a) && ids[last].contains(&b) {
                TAG_BOTTOM
            } else if ids.iter().any(|r| r[0] == a) && mesh_x(&mesh, a) < 0.0 {
                TAG_SIDE_MINUS
            } else {
                TAG_SIDE_PLUS
            };
            BoundaryEdge { a, b, tag: tag.into() }
        })
        .collect();
    debug_assert!(cols_top >= 2 && cols_bottom >= 2);
    Ok(mesh)
}

fn mesh_x(mesh: &Mesh, v: usize) -> f64 {
    mesh.vertices[v][0]
}

/// Inverse of the node map: `(s, v)` of a physical cusp point.
pub fn graded_coordinates(params: &GlueParams, p: Point) -> (f64, f64) {
    let y = p[1];
    ((2.0 * p[0] / (y * y)).clamp(-1.0, 1.0), (params.eps / y).ln() / params.log_inv_r())
}

/// Smallest interior angle (degrees) over the triangles, measured in `(s, v)`.
pub fn min_graded_angle_deg(mesh: &Mesh, params: &GlueParams) -> f64 {
    let mut worst = 180.0f64;
    for t in 0..mesh.triangles.len() {
        let p = mesh.triangle_points(t).map(|q| {
            let (s, v) = graded_coordinates(params, q);
            [s, v]
        });
        for k in 0..3 {
            let a = p[k];
            let b = p[(k + 1) % 3];
            let c = p[(k + 2) % 3];
            let u = [b[0] - a[0], b[1] - a[1]];
            let w = [c[0] - a[0], c[1] - a[1]];
            let cos = (u[0] * w[0] + u[1] * w[1]) / (u[0].hypot(u[1]) * w[0].hypot(w[1]));
            worst = worst.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::topology_invariants;

    #[test]
    fn truncation_reference_value() {
        // exp(−10^0.4) evaluated in 50-digit arithmetic.
        let r = truncation(0.1, 0.4);
        assert!((r - 0.081_115_076_784_322_28).abs() < 1e-15, "{r}");
        let p = GlueParams::new(0.1, 0.4, 1.0);
        assert_eq!(p.r.to_bits(), (-(0.1f64).powf(-0.4)).exp().to_bits());
    }

    #[test]
    fn cusp_mesh_structure() {
        let p = GlueParams::new(0.1, 0.45, 1.0);
        let m = build_cusp_mesh(&p, 12).unwrap();
        m.validate().unwrap();
        let t = topology_invariants(&m).unwrap();
        assert_eq!((t.genus, t.boundary_components, t.orientable), (0, 1, true));
        for tag in [TAG_SIDE_PLUS, TAG_SIDE_MINUS] {
            assert_eq!(m.boundary_edges.iter().filter(|e| e.tag == tag).count(), 12);
        }
        assert!(min_graded_angle_deg(&m, &p) >= 5.0 - 1e-9);
    }

    #[test]
    fn cusp_area_converges() {
        let p = GlueParams::new(0.2, 0.45, 1.0);
        let exact = p.eps.powi(3) * (1.0 - p.r.powi(3)) / 3.0;
        let e1 = (build_cusp_mesh(&p, 16).unwrap().chart_area() - exact).abs();
        let e2 = (build_cusp_mesh(&p, 32).unwrap().chart_area() - exact).abs();
        assert!(e2 < e1 && e2 < 1e-3 * exact);
    }

    #[test]
    fn rejects_large_eps() {
        assert!(GlueParams::new(0.5, 0.45, 1.0).validate().is_err());
        assert!(build_cusp_mesh(&GlueParams::new(0.1, 0.45, 1.0), 3).is_err());
    }
}
