use std::collections::VecDeque;

use super::mesh::{edge_key, Mesh};
use super::GeometryError;

/// Topological type of a compact surface with boundary.
///
/// For non-orientable surfaces `genus` is the non-orientable genus (the number
/// of cross-caps).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopologySummary {
    pub genus: u32,
    pub boundary_components: u32,
    pub orientable: bool,
}

impl TopologySummary {
    pub fn euler_characteristic(&self) -> i64 {
        let b = self.boundary_components as i64;
        let g = self.genus as i64;
        if self.orientable {
            2 - 2 * g - b
        } else {
            2 - g - b
        }
    }
}

/// Whether the triangles admit a coherent orientation (decided on vertex
/// orderings only, independent of charts).
pub fn is_orientable(mesh: &Mesh) -> Result<bool, GeometryError> {
    let map = mesh.edge_triangles();
    let n = mesh.triangles.len();
    let mut adj: Vec<Vec<(usize, (usize, usize))>> = vec![Vec::new(); n];
    for (key, ts) in &map {
        match ts.len() {
            1 => {}
            2 => {
                adj[ts[0]].push((ts[1], *key));
                adj[ts[1]].push((ts[0], *key));
            }
            _ => return Err(GeometryError::NonManifold { detail: format!("edge {key:?} borders {} triangles", ts.len()) }),
        }
    }
    let direction = |t: usize, key: (usize, usize)| -> i8 {
        let tri = mesh.triangles[t];
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if edge_key(a, b) == key {
                return if a == key.0 { 1 } else { -1 };
            }
        }
        0
    };
    let mut sign: Vec<i8> = vec![0; n];
    for start in 0..n {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for &(u, key) in &adj[t] {
                let want = -sign[t] * direction(t, key) * direction(u, key);
                if sign[u] == 0 {
                    sign[u] = want;
                    queue.push_back(u);
                } else if sign[u] != want {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn topology_invariants(mesh: &Mesh) -> Result<TopologySummary, GeometryError> {
    let orientable = is_orientable(mesh)?;
    let chi = mesh.euler_characteristic();
    let b = mesh.boundary_cycles()?.len() as i64;
    let deficit = 2 - chi - b;
    let genus = if orientable {
        if deficit < 0 || deficit % 2 != 0 {
            return Err(GeometryError::InvalidMesh { detail: format!("χ = {chi} with {b} boundary cycles is not a surface") });
        }
        deficit / 2
    } else {
        if deficit < 1 {
            return Err(GeometryError::InvalidMesh { detail: format!("χ = {chi} with {b} boundary cycles is not a non-orientable surface") });
        }
        deficit
    };
    Ok(TopologySummary { genus: genus as u32, boundary_components: b as u32, orientable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::Mesh;

    fn strip(n: usize, twisted: bool) -> Mesh {
        // Band of n squares with the last column identified with the first.
        let mut vertices = Vec::new();
        for i in 0..n {
            vertices.push([i as f64, 0.0]);
            vertices.push([i as f64, 1.0]);
        }
        let mut triangles = Vec::new();
        for i in 0..n {
            let (a, b) = (2 * i, 2 * i + 1);
            let (c, d) = if i + 1 < n {
                (2 * i + 2, 2 * i + 3)
            } else if twisted {
                (1, 0)
            } else {
                (0, 1)
            };
            triangles.push([a, c, d]);
            triangles.push([a, d, b]);
        }
        let mut m = Mesh::single_chart(vertices, triangles, "boundary");
        m.boundary_edges = m
            .oriented_boundary_edges()
            .into_iter()
            .map(|(a, b)| crate::geometry::mesh::BoundaryEdge { a, b, tag: "boundary".into() })
            .collect();
        m
    }

    #[test]
    fn annular_band() {
        let t = topology_invariants(&strip(5, false)).unwrap();
        assert_eq!(t, TopologySummary { genus: 0, boundary_components: 2, orientable: true });
    }

    #[test]
    fn moebius_band() {
        let t = topology_invariants(&strip(5, true)).unwrap();
        assert_eq!(t, TopologySummary { genus: 1, boundary_components: 1, orientable: false });
        assert_eq!(t.euler_characteristic(), 0);
    }
}
