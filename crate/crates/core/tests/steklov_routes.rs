use std::time::Instant;

use steklov_core::geometry::{
    build_annulus_mesh, build_cusp_mesh, build_disk_mesh, build_square_mesh, glue, ConformalMetric, GlueParams, Mesh,
};
use steklov_core::steklov::{full_pencil_spectrum, steklov_spectrum};

fn meshes() -> Vec<(&'static str, Mesh, ConformalMetric)> {
    let mut out = Vec::new();
    let flat = |m: Mesh| {
        let g = ConformalMetric::flat(m.num_vertices());
        (m, g)
    };
    let (m, g) = flat(build_disk_mesh(3));
    out.push(("disk", m, g));
    let (m, g) = flat(build_annulus_mesh(0.4, 2));
    out.push(("annulus", m, g));
    let (m, g) = flat(build_square_mesh(8));
    out.push(("square", m, g));
    let (m, g) = flat(build_cusp_mesh(&GlueParams::new(0.1, 0.45, 1.0), 16).unwrap());
    out.push(("cusp", m, g));
    let base = build_disk_mesh(3);
    let bg = ConformalMetric::constant(base.num_vertices(), -(2.0 * std::f64::consts::PI).ln());
    let s = glue(&base, &bg, &GlueParams::new(0.1, 0.45, 0.5)).unwrap();
    out.push(("glued", s.mesh, s.metric));
    out
}

#[test]
fn schur_and_full_pencil_agree() {
    for (name, m, g) in meshes() {
        let t0 = Instant::now();
        let a = steklov_spectrum(&m, &g, 6).unwrap();
        let t1 = Instant::now();
        let b = full_pencil_spectrum(&m, &g, 6).unwrap();
        let t2 = Instant::now();
        for k in 1..=6 {
            let rel = (a.eigenvalues[k] - b.eigenvalues[k]).abs() / a.eigenvalues[k];
            assert!(rel <= 1e-8, "{name} σ{k}: {} vs {} ({rel:e})", a.eigenvalues[k], b.eigenvalues[k]);
        }
        assert!(b.eigenvalues[0].abs() <= 1e-8 * b.eigenvalues[1]);
        eprintln!("{name}: n={} schur {:?} pencil {:?} σ={:?}", m.num_vertices(), t1 - t0, t2 - t1, &a.eigenvalues[..4]);
    }
}

#[test]
fn returned_pairs_are_accurate_and_orthogonal() {
    for (name, m, g) in meshes() {
        let s = steklov_spectrum(&m, &g, 6).unwrap();
        let b = steklov_core::steklov::assemble_boundary_mass(&m, &g).unwrap();
        assert!(s.residuals.iter().all(|r| *r <= 1e-8), "{name}: {:?}", s.residuals);
        for i in 0..s.len() {
            for j in 0..s.len() {
                let ip = b.bilinear(&s.eigenfunction(i), &s.eigenfunction(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() <= 1e-8, "{name} ({i},{j}) {ip}");
            }
        }
    }
}
