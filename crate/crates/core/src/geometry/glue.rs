//! Attaching the cusp strip to a base surface along two boundary intervals.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::chart::{chart_at, fit_curve, BoundaryCurve, Chart};
use super::cusp::{
    cusp_height, uniform_row, zipper_rows, CuspGrid, CuspMeshOptions, GlueParams, TAG_SIDE_MINUS, TAG_SIDE_PLUS,
};
use super::mesh::{dist, edge_key, BoundaryEdge, ConformalMetric, Mesh, Point, SeamPosition, BASE_CHART, CUSP_CHART};
use super::refine::Refiner;
use super::topology::{topology_invariants, TopologySummary};
use super::GeometryError;

#[derive(Clone, Debug)]
pub struct GlueOptions {
    /// Locally refine the base so each attachment interval is resolved.
    pub refine: bool,
    /// Target number of base boundary edges inside each interval.
    pub seam_edges: usize,
    /// Growth rate of the element size away from the attachment points.
    pub grading: f64,
    pub cusp: CuspMeshOptions,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self { refine: true, seam_edges: 6, grading: 0.25, cusp: CuspMeshOptions::with_layers(32) }
    }
}

/// Base boundary vertices identified with one end of the strip, ordered by
/// increasing chart coordinate.
#[derive(Clone, Debug)]
pub struct SeamInterval {
    pub vertices: Vec<usize>,
    pub coords: Vec<f64>,
    pub width: f64,
    pub chart: Chart,
    pub cycle: usize,
}

impl SeamInterval {
    /// Boundary edges of the base covered by the interval.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices.windows(2).map(|w| edge_key(w[0], w[1])).collect()
    }

    /// Trapezoid weights `∫ u da / width` for the chart-interval mean.
    pub fn mean_weights(&self) -> Vec<f64> {
        let n = self.vertices.len();
        let mut w = vec![0.0; n];
        for k in 0..n - 1 {
            let h = self.coords[k + 1] - self.coords[k];
            w[k] += 0.5 * h / self.width;
            w[k + 1] += 0.5 * h / self.width;
        }
        w
    }
}

/// The base mesh refined and split so that both attachment intervals are
/// runs of boundary edges with endpoints exactly at the chart positions.
#[derive(Clone, Debug)]
pub struct PreparedBase {
    pub mesh: Mesh,
    pub metric: ConformalMetric,
    pub seams: [SeamInterval; 2],
    pub curves: Vec<BoundaryCurve>,
}

impl PreparedBase {
    pub fn seam_edge_set(&self) -> HashSet<(usize, usize)> {
        self.seams.iter().flat_map(|s| s.edges()).collect()
    }
}

/// Output of a glue: the surface plus the bookkeeping of the strip.
#[derive(Clone, Debug)]
pub struct GluedSurface {
    pub mesh: Mesh,
    pub metric: ConformalMetric,
    pub topology: TopologySummary,
    pub params: GlueParams,
    pub base: PreparedBase,
    /// Vertex ids of each strip row, `rows[0]` at `v = 0` (the `p0` end).
    pub rows: Vec<Vec<usize>>,
    pub rows_s: Vec<Vec<f64>>,
    pub rows_v: Vec<f64>,
    pub base_chart: usize,
    pub cusp_chart: usize,
}

fn locate_interval(
    mesh: &Mesh,
    cycle: &[usize],
    chart: &Chart,
    anchor: Point,
    reach: f64,
    width: f64,
) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = cycle
        .iter()
        .filter(|&&v| dist(mesh.vertices[v], anchor) < reach)
        .map(|&v| (chart.forward(mesh.vertices[v])[0], v))
        .filter(|(a, _)| a.abs() <= 0.5 * width * (1.0 + 1e-9))
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

fn curve_reach(curve: &BoundaryCurve) -> f64 {
    match *curve {
        BoundaryCurve::Circle { radius, .. } => 0.5 * radius,
        BoundaryCurve::Polygon => f64::INFINITY,
    }
}

pub fn prepare_base(
    base: &Mesh,
    metric: &ConformalMetric,
    params: &GlueParams,
    opts: &GlueOptions,
) -> Result<PreparedBase, GeometryError> {
    params.validate()?;
    base.validate()?;
    metric.validate(base)?;
    if base.charts.len() != 1 || !base.seams.is_empty() {
        return Err(GeometryError::InvalidMesh { detail: "the base must be a single-chart mesh".into() });
    }
    let cycles = base.boundary_cycles()?;
    let curves: Vec<BoundaryCurve> = cycles.iter().map(|c| fit_curve(base, c)).collect();
    let (w0, w1) = params.interval_widths();
    let mut anchors = Vec::new();
    for (p, w) in [(params.p0, w0), (params.p1, w1)] {
        if p.component >= cycles.len() {
            return Err(GeometryError::InvalidParams {
                detail: format!("boundary component {} does not exist ({} present)", p.component, cycles.len()),
            });
        }
        let (point, chart) = chart_at(base, &cycles[p.component], &curves[p.component], p.arclength)?;
        anchors.push((point, chart, w, p.component));
    }
    if params.p0.component == params.p1.component && dist(anchors[0].0, anchors[1].0) < 4.0 * (w0 + w1) {
        return Err(GeometryError::InvalidParams { detail: "attachment intervals overlap".into() });
    }

    let mut refiner = Refiner::new(base, &metric.log_factor, &curves)?;
    if opts.refine {
        let targets: Vec<(Point, f64)> =
            anchors.iter().map(|(p, _, w, _)| (*p, w / opts.seam_edges.max(1) as f64)).collect();
        refiner.refine_towards(&targets, opts.grading);
    }
    let (mesh, _) = refiner_snapshot(&refiner, base);
    let cycles_now = mesh.boundary_cycles()?;
    for (p, chart, w, comp) in &anchors {
        let found = locate_interval(&mesh, &cycles_now[*comp], chart, *p, curve_reach(&curves[*comp]), *w);
        if found.len() < 2 {
            return Err(GeometryError::ResolutionMismatch {
                detail: format!("attachment interval of chart width {w:e} contains {} base boundary vertices", found.len()),
            });
        }
    }
    for (p, chart, w, comp) in &anchors {
        for sign in [-1.0, 1.0] {
            let target = sign * 0.5 * w;
            let q = chart.inverse([target, 0.0]);
            let edge = refiner
                .boundary_edges_of_cycle(*comp)
                .into_iter()
                .filter(|&(a, b)| {
                    dist(refiner.vertices[a], *p) < curve_reach(&curves[*comp])
                        && dist(refiner.vertices[b], *p) < curve_reach(&curves[*comp])
                })
                .find(|&(a, b)| {
                    let ca = chart.forward(refiner.vertices[a])[0] - target;
                    let cb = chart.forward(refiner.vertices[b])[0] - target;
                    ca * cb <= 0.0
                })
                .ok_or_else(|| GeometryError::ResolutionMismatch { detail: "interval endpoint not bracketed".into() })?;
            refiner.place_boundary_point(edge.0, edge.1, q, 0.3);
        }
    }
    let (mesh, omega) = refiner.into_mesh(base);
    mesh.validate()?;
    let cycles_now = mesh.boundary_cycles()?;
    let mut seams = Vec::new();
    for (p, chart, w, comp) in &anchors {
        let found = locate_interval(&mesh, &cycles_now[*comp], chart, *p, curve_reach(&curves[*comp]), *w);
        let mut coords: Vec<f64> = found.iter().map(|f| f.0).collect();
        let vertices: Vec<usize> = found.iter().map(|f| f.1).collect();
        let n = coords.len();
        if n < 2 || (coords[0] + 0.5 * w).abs() > 1e-9 * w || (coords[n - 1] - 0.5 * w).abs() > 1e-9 * w {
            return Err(GeometryError::ResolutionMismatch { detail: "interval endpoints were not realized".into() });
        }
        coords[0] = -0.5 * w;
        coords[n - 1] = 0.5 * w;
        let boundary: HashSet<(usize, usize)> = mesh.boundary_edges.iter().map(|e| edge_key(e.a, e.b)).collect();
        if vertices.windows(2).any(|p| !boundary.contains(&edge_key(p[0], p[1]))) {
            return Err(GeometryError::ResolutionMismatch { detail: "interval vertices are not consecutive".into() });
        }
        seams.push(SeamInterval { vertices, coords, width: *w, chart: *chart, cycle: *comp });
    }
    let shared = seams[0].vertices.iter().any(|v| seams[1].vertices.contains(v));
    if shared {
        return Err(GeometryError::InvalidParams { detail: "attachment intervals overlap".into() });
    }
    let s1 = seams.pop().expect("two seams");
    let s0 = seams.pop().expect("two seams");
    Ok(PreparedBase { mesh, metric: ConformalMetric::from_values(omega), seams: [s0, s1], curves })
}

fn refiner_snapshot(refiner: &Refiner, base: &Mesh) -> (Mesh, Vec<f64>) {
    refiner.clone().into_mesh(base)
}

pub fn glue(base: &Mesh, metric: &ConformalMetric, params: &GlueParams) -> Result<GluedSurface, GeometryError> {
    glue_with(base, metric, params, &GlueOptions::default())
}

/// Orientation of the glueing predicted from the flags: the strip keeps the
/// base orientation exactly when both flags agree.
pub fn flags_orientable(params: &GlueParams) -> bool {
    params.orientation_flags.0 == params.orientation_flags.1
}

pub fn glue_with(
    base: &Mesh,
    metric: &ConformalMetric,
    params: &GlueParams,
    opts: &GlueOptions,
) -> Result<GluedSurface, GeometryError> {
    if opts.cusp.layers < 4 {
        return Err(GeometryError::InvalidParams { detail: "the strip needs at least 4 layers".into() });
    }
    let prepared = prepare_base(base, metric, params, opts)?;
    attach_strip(prepared, params, opts)
}

pub fn attach_strip(prepared: PreparedBase, params: &GlueParams, opts: &GlueOptions) -> Result<GluedSurface, GeometryError> {
    let mut mesh = prepared.mesh.clone();
    let base_chart = 0;
    mesh.charts = vec![BASE_CHART.to_string(), CUSP_CHART.to_string()];
    let cusp_chart = 1;
    let (eps, er) = (params.eps, params.eps * params.r);
    let sign0 = if params.orientation_flags.0 { -1.0 } else { 1.0 };
    let sign1 = if params.orientation_flags.1 { 1.0 } else { -1.0 };

    let end_row = |seam: &SeamInterval, sign: f64, y: f64| -> Vec<(f64, usize)> {
        let n = seam.vertices.len();
        let mut row: Vec<(f64, usize)> = (0..n)
            .map(|k| {
                let s = if k == 0 || k + 1 == n {
                    sign * if k == 0 { -1.0 } else { 1.0 }
                } else {
                    (sign * 2.0 * seam.coords[k] / (y * y)).clamp(-1.0, 1.0)
                };
                (s, seam.vertices[k])
            })
            .collect();
        row.sort_by(|a, b| a.0.total_cmp(&b.0));
        row
    };
    let top = end_row(&prepared.seams[0], sign0, eps);
    let bottom = end_row(&prepared.seams[1], sign1, er);

    let layers = opts.cusp.layers;
    let cols = opts.cusp.resolved_columns();
    let mut grid = CuspGrid { rows_s: Vec::new(), rows_v: (0..=layers).map(|k| k as f64 / layers as f64).collect() };
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut cusp_pos: HashMap<usize, Point> = HashMap::new();
    for k in 0..=layers {
        let v = grid.rows_v[k];
        let y = cusp_height(params, v);
        let row: Vec<(f64, usize)> = if k == 0 {
            top.clone()
        } else if k == layers {
            bottom.clone()
        } else {
            uniform_row(cols)
                .into_iter()
                .map(|s| {
                    mesh.vertices.push([s * y * y / 2.0, y]);
                    (s, mesh.vertices.len() - 1)
                })
                .collect()
        };
        for &(s, id) in &row {
            cusp_pos.insert(id, [s * y * y / 2.0, y]);
        }
        grid.rows_s.push(row.iter().map(|r| r.0).collect());
        rows.push(row.iter().map(|r| r.1).collect());
    }
    let cusp_tris = zipper_rows(&grid, &rows, &|v| cusp_pos[&v]);
    for t in cusp_tris {
        mesh.triangles.push(t);
        mesh.triangle_charts.push(cusp_chart);
    }
    let mut seam_ids: Vec<usize> = rows[0].iter().chain(rows[layers].iter()).copied().collect();
    seam_ids.sort_unstable();
    mesh.seams = seam_ids
        .iter()
        .map(|&v| SeamPosition { vertex: v, chart: cusp_chart, position: cusp_pos[&v] })
        .collect();

    let base_tags: BTreeMap<(usize, usize), String> =
        prepared.mesh.boundary_edges.iter().map(|e| (edge_key(e.a, e.b), e.tag.clone())).collect();
    let plus_side: HashSet<usize> = rows.iter().map(|r| *r.last().expect("row")).collect();
    mesh.boundary_edges = mesh
        .oriented_boundary_edges()
        .into_iter()
        .map(|(a, b)| {
            let tag = match base_tags.get(&edge_key(a, b)) {
                Some(t) => t.clone(),
                None if plus_side.contains(&a) && plus_side.contains(&b) => TAG_SIDE_PLUS.to_string(),
                None => TAG_SIDE_MINUS.to_string(),
            };
            BoundaryEdge { a, b, tag }
        })
        .collect();

    let mut log_factor = prepared.metric.log_factor.clone();
    let cusp_omega = -params.t.ln();
    log_factor.resize(mesh.vertices.len(), cusp_omega);
    let chart_overrides = seam_ids.iter().map(|&v| ((v, cusp_chart), cusp_omega)).collect();
    let metric = ConformalMetric { log_factor, chart_overrides };

    mesh.validate()?;
    let topology = topology_invariants(&mesh)?;
    if let Some(want) = params.require_orientable {
        if want != topology.orientable {
            return Err(GeometryError::OrientationError {
                detail: format!(
                    "orientation flags {:?} give an {} surface, {} requested",
                    params.orientation_flags,
                    if topology.orientable { "orientable" } else { "non-orientable" },
                    if want { "orientable" } else { "non-orientable" }
                ),
            });
        }
    }
    Ok(GluedSurface {
        mesh,
        metric,
        topology,
        params: params.clone(),
        base: prepared,
        rows,
        rows_s: grid.rows_s,
        rows_v: grid.rows_v,
        base_chart,
        cusp_chart,
    })
}

impl GluedSurface {
    /// The same surface with dilation `t`; only the strip's conformal factor changes.
    pub fn with_t(&self, t: f64) -> Self {
        let mut out = self.clone();
        let old = -self.params.t.ln();
        let new = -t.ln();
        let nb = self.base.mesh.num_vertices();
        for w in out.metric.log_factor[nb..].iter_mut() {
            debug_assert_eq!(*w, old);
            *w = new;
        }
        for w in out.metric.chart_overrides.values_mut() {
            *w = new;
        }
        out.params.t = t;
        out
    }

    /// Vertices of the strip including both seam rows.
    pub fn cusp_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rows.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_side_edge(tag: &str) -> bool {
        tag == TAG_SIDE_PLUS || tag == TAG_SIDE_MINUS
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    fn disk() -> (Mesh, ConformalMetric) {
        let m = build_disk_mesh(3);
        let n = m.num_vertices();
        (m, ConformalMetric::flat(n))
    }

    #[test]
    fn same_component_glue_adds_a_boundary_component() {
        let (m, g) = disk();
        let p = GlueParams::new(0.1, 0.45, 1.0);
        let s = glue(&m, &g, &p).unwrap();
        assert_eq!((s.topology.genus, s.topology.boundary_components, s.topology.orientable), (0, 2, true));
        assert_eq!(s.mesh.euler_characteristic(), m.euler_characteristic() - 1);
        assert_eq!(s.mesh.boundary_cycles().unwrap().len(), 2);
        s.metric.validate(&s.mesh).unwrap();
        assert!(s.base.seams.iter().all(|seam| seam.vertices.len() >= 3));
        for tag in [TAG_SIDE_PLUS, TAG_SIDE_MINUS] {
            assert_eq!(s.mesh.boundary_edges.iter().filter(|e| e.tag == tag).count(), 32);
        }
    }

    #[test]
    fn flipped_flag_is_non_orientable() {
        let (m, g) = disk();
        let mut p = GlueParams::new(0.1, 0.45, 1.0);
        p.orientation_flags = (true, false);
        assert!(!flags_orientable(&p));
        let s = glue(&m, &g, &p).unwrap();
        assert_eq!((s.topology.genus, s.topology.boundary_components, s.topology.orientable), (1, 1, false));
        p.require_orientable = Some(true);
        assert!(matches!(glue(&m, &g, &p), Err(GeometryError::OrientationError { .. })));
        p.orientation_flags = (true, true);
        assert!(glue(&m, &g, &p).unwrap().topology.orientable);
    }

    #[test]
    fn unresolved_interval_is_rejected() {
        let (m, g) = disk();
        let p = GlueParams::new(0.1, 0.45, 1.0);
        let opts = GlueOptions { refine: false, ..GlueOptions::default() };
        assert!(matches!(glue_with(&m, &g, &p, &opts), Err(GeometryError::ResolutionMismatch { .. })));
    }

    #[test]
    fn seam_rows_sit_on_the_strip_ends() {
        let (m, g) = disk();
        let p = GlueParams::new(0.2, 0.4, 0.5);
        let s = glue(&m, &g, &p).unwrap();
        let cusp = s.cusp_chart;
        for (row, y) in [(&s.rows[0], p.eps), (s.rows.last().unwrap(), p.eps * p.r)] {
            let first = s.mesh.position(row[0], cusp);
            let last = s.mesh.position(*row.last().unwrap(), cusp);
            assert_eq!(first, [-y * y / 2.0, y]);
            assert_eq!(last, [y * y / 2.0, y]);
        }
        let u = s.with_t(2.0);
        assert_eq!(u.metric.omega(s.rows[0][1], cusp), -(2.0f64).ln());
        assert_eq!(u.metric.omega(s.rows[0][1], s.base_chart), s.metric.omega(s.rows[0][1], s.base_chart));
    }
}
