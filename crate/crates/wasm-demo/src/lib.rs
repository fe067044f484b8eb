//! Three interactive operations for the browser page in `www/`.

use steklov_core::asymptotics::upper_bound_first;
use steklov_core::geometry::{build_annulus_mesh, build_disk_mesh, glue, ConformalMetric, GlueParams, Mesh};
use steklov_core::lab::cusp_law_point;
use steklov_core::steklov::steklov_spectrum;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn base_mesh(shape: &str, refinement: u32) -> Result<Mesh, JsError> {
    match shape {
        "disk" => Ok(build_disk_mesh(refinement)),
        "annulus" => Ok(build_annulus_mesh(0.5, refinement)),
        other => Err(JsError::new(&format!("unknown shape `{other}`"))),
    }
}

/// Spectrum of a base surface with one eigenfunction sampled on every triangle corner.
#[wasm_bindgen]
pub struct BaseSpectrum {
    eigenvalues: Vec<f64>,
    sigma1_l: f64,
    corners: Vec<f64>,
    values: Vec<f64>,
}

#[wasm_bindgen]
impl BaseSpectrum {
    #[wasm_bindgen(getter)]
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn sigma1_l(&self) -> f64 {
        self.sigma1_l
    }

    /// `x, y` of each triangle corner, three corners per triangle.
    #[wasm_bindgen(getter)]
    pub fn corners(&self) -> Vec<f64> {
        self.corners.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
}

#[wasm_bindgen]
pub fn base_spectrum(shape: &str, refinement: u32, count: usize, mode: usize) -> Result<BaseSpectrum, JsError> {
    let mesh = base_mesh(shape, refinement.min(5))?;
    let metric = ConformalMetric::flat(mesh.num_vertices());
    let spec = steklov_spectrum(&mesh, &metric, count.max(2)).map_err(js_err)?;
    let mode = mode.min(spec.len() - 1);
    let u = spec.eigenfunction(mode);
    let mut corners = Vec::with_capacity(6 * mesh.triangles.len());
    let mut values = Vec::with_capacity(3 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for (p, &v) in mesh.triangle_points(t).iter().zip(tri) {
            corners.extend_from_slice(p);
            values.push(u[v]);
        }
    }
    Ok(BaseSpectrum { sigma1_l: spec.sigma1_l(), eigenvalues: spec.eigenvalues, corners, values })
}

/// `[r, σ₁, 2(σ₁ − 1/8) ln²r, relative error against π²]` for the isolated cusp at `t = 1`.
#[wasm_bindgen]
pub fn cusp_law(eps: f64, alpha: f64, layers: usize) -> Result<Vec<f64>, JsError> {
    let row = cusp_law_point(eps, alpha, layers.clamp(4, 64)).map_err(js_err)?;
    Ok(vec![row.r, row.sigma1, row.quantity, row.rel_error])
}

/// Glued unit disk: `[genus, boundary components, σ₁, σ₁·L, bound, error scale, σ₂]`.
#[wasm_bindgen]
pub fn glued_disk(eps: f64, alpha: f64, t: f64, orientable: bool) -> Result<Vec<f64>, JsError> {
    let mesh = build_disk_mesh(3);
    let metric = ConformalMetric::flat(mesh.num_vertices());
    let mut params = GlueParams::new(eps, alpha, t);
    params.orientation_flags = (false, !orientable);
    params.validate().map_err(js_err)?;
    let base = steklov_spectrum(&mesh, &metric, 2).map_err(js_err)?;
    let glued = glue(&mesh, &metric, &params).map_err(js_err)?;
    let spec = steklov_spectrum(&glued.mesh, &glued.metric, 3).map_err(js_err)?;
    let bound = upper_bound_first(&params, base.eigenvalues[1]);
    Ok(vec![
        glued.topology.genus as f64,
        glued.topology.boundary_components as f64,
        spec.eigenvalues[1],
        spec.sigma1_l(),
        bound.bound,
        bound.error_scale,
        spec.eigenvalues[2],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_corners_match_values() {
        let s = base_spectrum("disk", 2, 4, 1).unwrap();
        assert_eq!(s.corners.len(), 2 * s.values.len());
        assert!((s.eigenvalues[1] - 1.0).abs() < 0.05);
    }

    #[test]
    fn cusp_law_returns_four_numbers() {
        let v = cusp_law(0.2, 0.4, 8).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v[2] > 0.0);
    }
}
