use std::collections::{BTreeMap, HashMap};

use super::GeometryError;

pub type Point = [f64; 2];

pub const BASE_CHART: &str = "base";
pub const CUSP_CHART: &str = "cusp";

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: String,
}

/// A vertex position in a chart other than the vertex's home coordinates.
///
/// Glued surfaces carry vertices that live in two charts at once (the seam
/// between the base and the thin strip).
#[derive(Clone, Debug, PartialEq)]
pub struct SeamPosition {
    pub vertex: usize,
    pub chart: usize,
    pub position: Point,
}

/// Triangulated surface. Each triangle lives in one chart; its corner
/// coordinates are the vertex positions, unless a seam entry overrides the
/// position of that vertex for the triangle's chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub triangle_charts: Vec<usize>,
    pub charts: Vec<String>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub seams: Vec<SeamPosition>,
}

pub fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn signed_area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Single-chart mesh; boundary edges are derived and tagged `tag`.
    pub fn single_chart(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, tag: &str) -> Self {
        let n = triangles.len();
        let mut mesh = Mesh {
            vertices,
            triangles,
            triangle_charts: vec![0; n],
            charts: vec![BASE_CHART.to_string()],
            boundary_edges: Vec::new(),
            seams: Vec::new(),
        };
        mesh.boundary_edges = mesh
            .oriented_boundary_edges()
            .into_iter()
            .map(|(a, b)| BoundaryEdge { a, b, tag: tag.to_string() })
            .collect();
        mesh
    }

    pub fn chart_id(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c == name)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn position(&self, v: usize, chart: usize) -> Point {
        self.seams
            .iter()
            .find(|s| s.vertex == v && s.chart == chart)
            .map(|s| s.position)
            .unwrap_or(self.vertices[v])
    }

    pub fn seam_lookup(&self) -> HashMap<(usize, usize), Point> {
        self.seams.iter().map(|s| ((s.vertex, s.chart), s.position)).collect()
    }

    pub fn triangle_points_with(&self, t: usize, seams: &HashMap<(usize, usize), Point>) -> [Point; 3] {
        let c = self.triangle_charts[t];
        let tri = self.triangles[t];
        [0, 1, 2].map(|k| seams.get(&(tri[k], c)).copied().unwrap_or(self.vertices[tri[k]]))
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let c = self.triangle_charts[t];
        let tri = self.triangles[t];
        [0, 1, 2].map(|k| self.position(tri[k], c))
    }

    /// Map from undirected edge to the incident triangles.
    pub fn edge_triangles(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push(t);
            }
        }
        map
    }

    /// Edges with exactly one incident triangle, oriented as in that triangle.
    pub fn oriented_boundary_edges(&self) -> Vec<(usize, usize)> {
        let map = self.edge_triangles();
        let mut out = Vec::new();
        for (key, tris) in &map {
            if tris.len() == 1 {
                let tri = self.triangles[tris[0]];
                for k in 0..3 {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    if edge_key(a, b) == *key {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    /// The triangle adjacent to each boundary edge, in `boundary_edges` order.
    pub fn boundary_edge_triangles(&self) -> Vec<usize> {
        let map = self.edge_triangles();
        self.boundary_edges
            .iter()
            .map(|e| map.get(&edge_key(e.a, e.b)).map(|t| t[0]).unwrap_or(usize::MAX))
            .collect()
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_edges.iter().flat_map(|e| [e.a, e.b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Boundary cycles as vertex sequences following edge orientation; each
    /// cycle starts at its smallest vertex index, cycles sorted by that index.
    ///
    /// On non-orientable meshes the edge directions need not agree along a
    /// cycle; the walk then follows the undirected boundary graph.
    pub fn boundary_cycles(&self) -> Result<Vec<Vec<usize>>, GeometryError> {
        let mut nbrs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut directed: HashMap<usize, usize> = HashMap::new();
        for e in &self.boundary_edges {
            nbrs.entry(e.a).or_default().push(e.b);
            nbrs.entry(e.b).or_default().push(e.a);
            directed.insert(e.a, e.b);
        }
        if let Some((v, n)) = nbrs.iter().find(|(_, n)| n.len() != 2) {
            return Err(GeometryError::NonManifold {
                detail: format!("boundary vertex {v} has {} boundary edges", n.len()),
            });
        }
        let mut seen: HashMap<usize, bool> = HashMap::new();
        let mut cycles = Vec::new();
        for &s in nbrs.keys() {
            if seen.contains_key(&s) {
                continue;
            }
            let mut cycle = vec![s];
            seen.insert(s, true);
            let mut prev = s;
            let mut cur = directed.get(&s).copied().unwrap_or(nbrs[&s][0]);
            while cur != s {
                if seen.insert(cur, true).is_some() {
                    return Err(GeometryError::NonManifold { detail: format!("boundary revisits vertex {cur}") });
                }
                cycle.push(cur);
                let n = &nbrs[&cur];
                let next = if n[0] == prev && n[1] != prev { n[1] } else { n[0] };
                prev = cur;
                cur = next;
            }
            cycles.push(cycle);
        }
        Ok(cycles)
    }

    /// Checks the structural invariants of a mesh.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let nv = self.vertices.len();
        if self.triangle_charts.len() != self.triangles.len() {
            return Err(GeometryError::InvalidMesh { detail: "one chart id per triangle required".into() });
        }
        let seams = self.seam_lookup();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(GeometryError::InvalidMesh { detail: format!("triangle {t} has invalid vertices {tri:?}") });
            }
            if self.triangle_charts[t] >= self.charts.len() {
                return Err(GeometryError::InvalidMesh { detail: format!("triangle {t} has unknown chart") });
            }
            let area = signed_area(&self.triangle_points_with(t, &seams));
            if !(area > 0.0) {
                return Err(GeometryError::DegenerateGeometry { detail: format!("triangle {t} has signed area {area:e}") });
            }
        }
        let map = self.edge_triangles();
        if let Some((e, _)) = map.iter().find(|(_, ts)| ts.len() > 2) {
            return Err(GeometryError::NonManifold { detail: format!("edge {e:?} borders more than two triangles") });
        }
        let mut single: Vec<(usize, usize)> = map.iter().filter(|(_, ts)| ts.len() == 1).map(|(e, _)| *e).collect();
        let mut tagged: Vec<(usize, usize)> = self.boundary_edges.iter().map(|e| edge_key(e.a, e.b)).collect();
        single.sort_unstable();
        tagged.sort_unstable();
        if single != tagged {
            return Err(GeometryError::InvalidMesh { detail: "boundary edges differ from edges with one incident triangle".into() });
        }
        if !self.is_connected() {
            return Err(GeometryError::InvalidMesh { detail: "triangle adjacency graph is disconnected".into() });
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.triangles.is_empty() {
            return false;
        }
        let map = self.edge_triangles();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.triangles.len()];
        for ts in map.values() {
            for &a in ts {
                for &b in ts {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        let mut seen = vec![false; self.triangles.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(t) = stack.pop() {
            for &n in &adj[t] {
                if !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn num_edges(&self) -> usize {
        self.edge_triangles().len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.num_edges() as i64 + self.triangles.len() as i64
    }

    /// Sum of triangle areas in chart coordinates.
    pub fn chart_area(&self) -> f64 {
        let seams = self.seam_lookup();
        (0..self.triangles.len()).map(|t| signed_area(&self.triangle_points_with(t, &seams))).sum()
    }
}

/// Per-vertex log conformal factor `ω`: area element `e^{2ω} dx dy`, boundary
/// element `e^{ω} dl`. Seam vertices may carry a different value per chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetric {
    pub log_factor: Vec<f64>,
    pub chart_overrides: BTreeMap<(usize, usize), f64>,
}

impl ConformalMetric {
    pub fn flat(n: usize) -> Self {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, omega: f64) -> Self {
        Self { log_factor: vec![omega; n], chart_overrides: BTreeMap::new() }
    }

    pub fn from_values(log_factor: Vec<f64>) -> Self {
        Self { log_factor, chart_overrides: BTreeMap::new() }
    }

    pub fn omega(&self, v: usize, chart: usize) -> f64 {
        self.chart_overrides.get(&(v, chart)).copied().unwrap_or(self.log_factor[v])
    }

    /// Adds `c` everywhere (metric scaled by `e^{2c}`).
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            log_factor: self.log_factor.iter().map(|w| w + c).collect(),
            chart_overrides: self.chart_overrides.iter().map(|(k, w)| (*k, w + c)).collect(),
        }
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<(), GeometryError> {
        if self.log_factor.len() != mesh.num_vertices() {
            return Err(GeometryError::InvalidMetric {
                detail: format!("{} values for {} vertices", self.log_factor.len(), mesh.num_vertices()),
            });
        }
        let bad = self.log_factor.iter().chain(self.chart_overrides.values()).find(|w| !w.is_finite());
        if let Some(w) = bad {
            return Err(GeometryError::InvalidMetric { detail: format!("non-finite log factor {w}") });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Mesh {
        Mesh::single_chart(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]], "boundary")
    }

    #[test]
    fn square_of_two_triangles() {
        let m = two_triangles();
        m.validate().unwrap();
        assert_eq!(m.boundary_edges.len(), 4);
        assert_eq!(m.euler_characteristic(), 1);
        let cycles = m.boundary_cycles().unwrap();
        assert_eq!(cycles, vec![vec![0, 1, 2, 3]]);
        assert!((m.chart_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clockwise_triangle_is_rejected() {
        let mut m = two_triangles();
        m.triangles[0] = [0, 2, 1];
        assert!(m.validate().is_err());
    }
}
