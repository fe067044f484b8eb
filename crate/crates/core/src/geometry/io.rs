//! Line-oriented mesh text format.
//!
//! ```text
//! MESH2D v1
//! V n        followed by n lines `x y`
//! T m        followed by m lines `i j k chart_tag`
//! B p        followed by p lines `i j segment_tag`
//! S q        optional, q lines `i chart_tag x y` (seam positions)
//! ```

use std::fmt::Write as _;

use super::mesh::{BoundaryEdge, Mesh, SeamPosition};
use super::GeometryError;

pub const HEADER: &str = "MESH2D v1";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn is_identifier(tag: &str) -> bool {
    let mut chars = tag.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "V {}", mesh.vertices.len()).unwrap();
    for p in &mesh.vertices {
        writeln!(s, "{} {}", fmt_f64(p[0]), fmt_f64(p[1])).unwrap();
    }
    writeln!(s, "T {}", mesh.triangles.len()).unwrap();
    for (t, c) in mesh.triangles.iter().zip(&mesh.triangle_charts) {
        writeln!(s, "{} {} {} {}", t[0], t[1], t[2], mesh.charts[*c]).unwrap();
    }
    writeln!(s, "B {}", mesh.boundary_edges.len()).unwrap();
    for e in &mesh.boundary_edges {
        writeln!(s, "{} {} {}", e.a, e.b, e.tag).unwrap();
    }
    if !mesh.seams.is_empty() {
        writeln!(s, "S {}", mesh.seams.len()).unwrap();
        for seam in &mesh.seams {
            writeln!(s, "{} {} {} {}", seam.vertex, mesh.charts[seam.chart], fmt_f64(seam.position[0]), fmt_f64(seam.position[1]))
                .unwrap();
        }
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                return Some((i + 1, l));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), GeometryError> {
        self.next_content().ok_or_else(|| parse_err(0, format!("unexpected end of input, expected {what}")))
    }
}

fn parse_err(line: usize, detail: String) -> GeometryError {
    GeometryError::Parse { line, detail }
}

fn section(lines: &mut Lines, key: &str) -> Result<usize, GeometryError> {
    let (ln, l) = lines.expect(key)?;
    let mut it = l.split_whitespace();
    if it.next() != Some(key) {
        return Err(parse_err(ln, format!("expected section `{key} <count>`")));
    }
    it.next()
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| parse_err(ln, format!("section `{key}` needs a count")))
}

fn field<T: std::str::FromStr>(tok: Option<&str>, ln: usize, what: &str) -> Result<T, GeometryError> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(ln, format!("bad {what}")))
}

fn tag(tok: Option<&str>, ln: usize) -> Result<String, GeometryError> {
    match tok {
        Some(t) if is_identifier(t) => Ok(t.to_string()),
        _ => Err(parse_err(ln, "tag must be an ASCII identifier".into())),
    }
}

fn chart_index(charts: &mut Vec<String>, name: String) -> usize {
    match charts.iter().position(|c| *c == name) {
        Some(i) => i,
        None => {
            charts.push(name);
            charts.len() - 1
        }
    }
}

pub fn read_mesh(text: &str) -> Result<Mesh, GeometryError> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let (ln, header) = lines.expect("header")?;
    if header != HEADER {
        return Err(parse_err(ln, format!("expected header `{HEADER}`")));
    }
    let nv = section(&mut lines, "V")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.expect("vertex")?;
        let mut it = l.split_whitespace();
        let x: f64 = field(it.next(), ln, "x coordinate")?;
        let y: f64 = field(it.next(), ln, "y coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(ln, "non-finite coordinate".into()));
        }
        vertices.push([x, y]);
    }
    let nt = section(&mut lines, "T")?;
    let mut triangles = Vec::with_capacity(nt);
    let mut triangle_charts = Vec::with_capacity(nt);
    let mut charts: Vec<String> = Vec::new();
    for _ in 0..nt {
        let (ln, l) = lines.expect("triangle")?;
        let mut it = l.split_whitespace();
        let mut tri = [0usize; 3];
        for v in tri.iter_mut() {
            *v = field(it.next(), ln, "vertex index")?;
            if *v >= nv {
                return Err(parse_err(ln, format!("vertex index {v} out of range")));
            }
        }
        let c = tag(it.next(), ln)?;
        triangles.push(tri);
        triangle_charts.push(chart_index(&mut charts, c));
    }
    let nb = section(&mut lines, "B")?;
    let mut boundary_edges = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, l) = lines.expect("boundary edge")?;
        let mut it = l.split_whitespace();
        let a: usize = field(it.next(), ln, "vertex index")?;
        let b: usize = field(it.next(), ln, "vertex index")?;
        if a >= nv || b >= nv {
            return Err(parse_err(ln, "boundary vertex index out of range".into()));
        }
        boundary_edges.push(BoundaryEdge { a, b, tag: tag(it.next(), ln)? });
    }
    let mut seams = Vec::new();
    if let Some((ln, l)) = lines.next_content() {
        let mut it = l.split_whitespace();
        if it.next() != Some("S") {
            return Err(parse_err(ln, "unexpected trailing content".into()));
        }
        let ns: usize = field(it.next(), ln, "seam count")?;
        for _ in 0..ns {
            let (ln, l) = lines.expect("seam position")?;
            let mut it = l.split_whitespace();
            let vertex: usize = field(it.next(), ln, "vertex index")?;
            if vertex >= nv {
                return Err(parse_err(ln, "seam vertex index out of range".into()));
            }
            let chart = chart_index(&mut charts, tag(it.next(), ln)?);
            let x: f64 = field(it.next(), ln, "x coordinate")?;
            let y: f64 = field(it.next(), ln, "y coordinate")?;
            seams.push(SeamPosition { vertex, chart, position: [x, y] });
        }
        if let Some((ln, _)) = lines.next_content() {
            return Err(parse_err(ln, "unexpected trailing content".into()));
        }
    }
    if charts.is_empty() {
        charts.push(super::mesh::BASE_CHART.to_string());
    }
    Ok(Mesh { vertices, triangles, triangle_charts, charts, boundary_edges, seams })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    #[test]
    fn roundtrip_is_exact() {
        let m = build_disk_mesh(2);
        let text = write_mesh(&m);
        let back = read_mesh(&text).unwrap();
        assert_eq!(m, back);
        assert_eq!(write_mesh(&back), text);
    }

    #[test]
    fn rejects_bad_header_and_tags() {
        assert!(read_mesh("MESH2D v2\nV 0\nT 0\nB 0\n").is_err());
        assert!(read_mesh("MESH2D v1\nV 3\n0 0\n1 0\n0 1\nT 1\n0 1 2 9bad\nB 0\n").is_err());
    }

    #[test]
    fn seventeen_significant_digits() {
        let x = std::f64::consts::PI;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        assert_eq!(fmt_f64(x).split('e').next().unwrap().replace('.', "").len(), 17);
    }
}
