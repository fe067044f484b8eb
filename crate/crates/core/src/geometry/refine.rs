//! Local longest-edge bisection of single-chart base meshes, with boundary
//! midpoints projected onto the fitted boundary curves.

use std::collections::{BTreeMap, HashMap};

use super::chart::BoundaryCurve;
use super::mesh::{dist, edge_key, signed_area, BoundaryEdge, Mesh, Point};
use super::GeometryError;

#[derive(Clone)]
pub struct Refiner {
    pub vertices: Vec<Point>,
    pub omega: Vec<f64>,
    tris: Vec<[usize; 3]>,
    alive: Vec<bool>,
    edges: HashMap<(usize, usize), Vec<usize>>,
    boundary: BTreeMap<(usize, usize), (String, usize)>,
    curves: Vec<BoundaryCurve>,
}

impl Refiner {
    /// `curve_of_cycle[k]` is the curve of boundary cycle `k` of `mesh`.
    pub fn new(mesh: &Mesh, omega: &[f64], curve_of_cycle: &[BoundaryCurve]) -> Result<Self, GeometryError> {
        let cycles = mesh.boundary_cycles()?;
        let mut cycle_of_vertex = HashMap::new();
        for (k, c) in cycles.iter().enumerate() {
            for &v in c {
                cycle_of_vertex.insert(v, k);
            }
        }
        let mut r = Refiner {
            vertices: mesh.vertices.clone(),
            omega: omega.to_vec(),
            tris: Vec::new(),
            alive: Vec::new(),
            edges: HashMap::new(),
            boundary: BTreeMap::new(),
            curves: curve_of_cycle.to_vec(),
        };
        for e in &mesh.boundary_edges {
            r.boundary.insert(edge_key(e.a, e.b), (e.tag.clone(), cycle_of_vertex[&e.a]));
        }
        for &t in &mesh.triangles {
            r.push_triangle(t);
        }
        Ok(r)
    }

    fn push_triangle(&mut self, t: [usize; 3]) -> usize {
        let id = self.tris.len();
        self.tris.push(t);
        self.alive.push(true);
        for k in 0..3 {
            self.edges.entry(edge_key(t[k], t[(k + 1) % 3])).or_default().push(id);
        }
        id
    }

    fn kill_triangle(&mut self, id: usize) {
        self.alive[id] = false;
        let t = self.tris[id];
        for k in 0..3 {
            let key = edge_key(t[k], t[(k + 1) % 3]);
            if let Some(list) = self.edges.get_mut(&key) {
                list.retain(|&x| x != id);
                if list.is_empty() {
                    self.edges.remove(&key);
                }
            }
        }
    }

    fn longest_edge(&self, id: usize) -> (usize, usize) {
        let t = self.tris[id];
        let mut best = (edge_key(t[0], t[1]), -1.0);
        for k in 0..3 {
            let key = edge_key(t[k], t[(k + 1) % 3]);
            let len = dist(self.vertices[key.0], self.vertices[key.1]);
            if len > best.1 || (len == best.1 && key < best.0) {
                best = (key, len);
            }
        }
        best.0
    }

    pub fn is_boundary_edge(&self, a: usize, b: usize) -> bool {
        self.boundary.contains_key(&edge_key(a, b))
    }

    /// Splits edge `(a, b)` at `point` (or its midpoint, projected onto the
    /// boundary curve when the edge is a boundary edge). Returns the new vertex.
    pub fn split_edge(&mut self, a: usize, b: usize, point: Option<Point>) -> usize {
        let key = edge_key(a, b);
        let (pa, pb) = (self.vertices[key.0], self.vertices[key.1]);
        let boundary = self.boundary.remove(&key);
        let p = match point {
            Some(p) => p,
            None => {
                let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                match &boundary {
                    Some((_, c)) => self.curves[*c].project(mid),
                    None => mid,
                }
            }
        };
        let lambda = {
            let total = dist(pa, pb);
            (dist(pa, p) / total).clamp(0.0, 1.0)
        };
        let m = self.vertices.len();
        self.vertices.push(p);
        self.omega.push((1.0 - lambda) * self.omega[key.0] + lambda * self.omega[key.1]);
        let incident: Vec<usize> = self.edges.get(&key).cloned().unwrap_or_default();
        for id in incident {
            let t = self.tris[id];
            self.kill_triangle(id);
            let first = t.map(|v| if v == key.1 { m } else { v });
            let second = t.map(|v| if v == key.0 { m } else { v });
            self.push_triangle(first);
            self.push_triangle(second);
        }
        if let Some((tag, c)) = boundary {
            self.boundary.insert(edge_key(key.0, m), (tag.clone(), c));
            self.boundary.insert(edge_key(m, key.1), (tag, c));
        }
        m
    }

    /// Rivara bisection of triangle `id` (with conforming propagation).
    pub fn bisect(&mut self, id: usize) {
        let mut stack = vec![id];
        let mut guard = 0usize;
        while let Some(&cur) = stack.last() {
            guard += 1;
            assert!(guard < 10_000_000, "longest-edge propagation does not terminate");
            if !self.alive[cur] {
                stack.pop();
                continue;
            }
            let e = self.longest_edge(cur);
            let nb = self.edges.get(&e).and_then(|l| l.iter().copied().find(|&x| x != cur));
            match nb {
                Some(n) if self.longest_edge(n) != e => stack.push(n),
                _ => {
                    self.split_edge(e.0, e.1, None);
                    stack.pop();
                }
            }
        }
    }

    /// Refines until every triangle's longest edge is at most
    /// `min_k(h_k + grading·|centroid − p_k|)`.
    pub fn refine_towards(&mut self, targets: &[(Point, f64)], grading: f64) {
        loop {
            let mut todo: Vec<(f64, usize)> = Vec::new();
            for id in 0..self.tris.len() {
                if !self.alive[id] {
                    continue;
                }
                let t = self.tris[id];
                let p = t.map(|v| self.vertices[v]);
                let c = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
                let e = self.longest_edge(id);
                let len = dist(self.vertices[e.0], self.vertices[e.1]);
                let h = targets
                    .iter()
                    .map(|(q, h0)| h0 + grading * dist(c, *q))
                    .fold(f64::INFINITY, f64::min);
                if len > h {
                    todo.push((len / h, id));
                }
            }
            if todo.is_empty() {
                break;
            }
            todo.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for (_, id) in todo {
                if self.alive[id] {
                    self.bisect(id);
                }
            }
        }
    }

    fn all_positive_around(&self, v: usize) -> bool {
        self.tris
            .iter()
            .zip(&self.alive)
            .filter(|(t, &a)| a && t.contains(&v))
            .all(|(t, _)| signed_area(&t.map(|x| self.vertices[x])) > 0.0)
    }

    /// Places a boundary vertex exactly at `q`, which lies on boundary edge
    /// `(a, b)`: moves the nearer endpoint when it is within `snap` of `q` and
    /// the move keeps all triangles positive, else splits the edge.
    pub fn place_boundary_point(&mut self, a: usize, b: usize, q: Point, snap: f64) -> usize {
        let (da, db) = (dist(self.vertices[a], q), dist(self.vertices[b], q));
        let (near, d) = if da <= db { (a, da) } else { (b, db) };
        if d == 0.0 {
            return near;
        }
        if d <= snap * dist(self.vertices[a], self.vertices[b]) {
            let old = self.vertices[near];
            self.vertices[near] = q;
            if self.all_positive_around(near) {
                return near;
            }
            self.vertices[near] = old;
        }
        self.split_edge(a, b, Some(q))
    }

    pub fn boundary_edges_of_cycle(&self, cycle: usize) -> Vec<(usize, usize)> {
        self.boundary.iter().filter(|(_, (_, c))| *c == cycle).map(|(k, _)| *k).collect()
    }

    pub fn into_mesh(self, template: &Mesh) -> (Mesh, Vec<f64>) {
        let tris: Vec<[usize; 3]> =
            self.tris.iter().zip(&self.alive).filter(|(_, &a)| a).map(|(t, _)| *t).collect();
        let n = tris.len();
        let mut mesh = Mesh {
            vertices: self.vertices,
            triangles: tris,
            triangle_charts: vec![0; n],
            charts: template.charts.clone(),
            boundary_edges: Vec::new(),
            seams: Vec::new(),
        };
        let tags: HashMap<(usize, usize), String> = self.boundary.into_iter().map(|(k, (t, _))| (k, t)).collect();
        mesh.boundary_edges = mesh
            .oriented_boundary_edges()
            .into_iter()
            .map(|(a, b)| BoundaryEdge { a, b, tag: tags.get(&edge_key(a, b)).cloned().unwrap_or_else(|| "boundary".into()) })
            .collect();
        (mesh, self.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::fit_curve;
    use crate::geometry::{build_disk_mesh, topology_invariants};

    #[test]
    fn graded_refinement_keeps_a_valid_disk() {
        let m = build_disk_mesh(2);
        let cycles = m.boundary_cycles().unwrap();
        let curve = fit_curve(&m, &cycles[0]);
        let mut r = Refiner::new(&m, &vec![0.0; m.num_vertices()], &[curve]).unwrap();
        r.refine_towards(&[([1.0, 0.0], 1e-4)], 0.3);
        let (out, omega) = r.into_mesh(&m);
        out.validate().unwrap();
        assert_eq!(omega.len(), out.num_vertices());
        let t = topology_invariants(&out).unwrap();
        assert_eq!((t.genus, t.boundary_components), (0, 1));
        for v in out.boundary_vertices() {
            let p = out.vertices[v];
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-14);
        }
        let finest = out
            .boundary_edges
            .iter()
            .map(|e| dist(out.vertices[e.a], out.vertices[e.b]))
            .fold(f64::INFINITY, f64::min);
        assert!(finest <= 1e-4);
        assert!(out.triangles.len() < 20_000);
    }
}
