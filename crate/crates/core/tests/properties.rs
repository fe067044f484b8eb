use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use steklov_core::asymptotics::upper_bound_first;
use steklov_core::geometry::{
    build_annulus_mesh, build_disk_mesh, glue, parabola_arc, topology_invariants, truncation, ConformalMetric,
    GlueParams, GluedSurface, Mesh,
};
use steklov_core::reduced1d::{arc_factor, solve_reduced, BoundaryConditions, ReducedOptions};
use steklov_core::shapeopt::{
    extract_immersion, minimality_residuals, optimize_density, DensityParam, OptimizeOptions, Parametrization,
};
use steklov_core::steklov::{
    assemble_boundary_mass, assemble_stiffness, boundary_edge_lengths, steklov_spectrum, MassKind, SteklovProblem,
};

fn small_disk() -> (Mesh, ConformalMetric) {
    let m = build_disk_mesh(2);
    let g = ConformalMetric::flat(m.num_vertices());
    (m, g)
}

fn glued(eps: f64, alpha: f64, t: f64, p1: f64, flip: bool) -> GluedSurface {
    let (m, g) = small_disk();
    let mut p = GlueParams::new(eps, alpha, t);
    p.p1.arclength = p1;
    p.orientation_flags = (false, flip);
    glue(&m, &g, &p).unwrap()
}

fn edge_length_sum(mesh: &Mesh, metric: &ConformalMetric, keep: impl Fn(usize, usize, &str) -> bool) -> f64 {
    boundary_edge_lengths(mesh, metric)
        .iter()
        .zip(&mesh.boundary_edges)
        .filter(|(_, e)| keep(e.a, e.b, &e.tag))
        .map(|(l, _)| l)
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_the_closed_form_and_decreases_in_alpha(
        eps in 0.01f64..0.99,
        a in 0.05f64..0.95,
        b in 0.05f64..0.95,
    ) {
        prop_assert_eq!(truncation(eps, a).to_bits(), (-eps.powf(-a)).exp().to_bits());
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(lo < hi);
        prop_assert!(truncation(eps, lo) > truncation(eps, hi));
    }

    #[test]
    fn first_bound_rises_with_t_then_saturates(
        eps in 0.02f64..0.3,
        alpha in 0.3f64..0.6,
        t0 in 0.1f64..20.0,
        dt in 0.0f64..10.0,
        sigma_star in 0.2f64..3.0,
    ) {
        let b0 = upper_bound_first(&GlueParams::new(eps, alpha, t0), sigma_star);
        let b1 = upper_bound_first(&GlueParams::new(eps, alpha, t0 + dt), sigma_star);
        prop_assert!(b1.branch_cusp >= b0.branch_cusp);
        prop_assert!(b1.bound >= b0.bound);
        if b0.branch_cusp >= sigma_star {
            prop_assert_eq!(b0.bound, sigma_star);
            prop_assert_eq!(b1.bound, sigma_star);
        }
    }

    #[test]
    fn reduced_modes_are_orthogonal(eps in 0.02f64..0.3, alpha in 0.3f64..0.6, robin in proptest::bool::ANY) {
        let p = GlueParams::new(eps, alpha, 1.0);
        let bc = if robin {
            BoundaryConditions::robin_dirichlet(0.5, 1.0 / p.log_inv_r())
        } else {
            BoundaryConditions::dirichlet()
        };
        let n = 200;
        let s = solve_reduced(&p, &bc, &ReducedOptions { intervals: n, modes: 3, truncated: false }).unwrap();
        let h = 1.0 / n as f64;
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..=n)
                    .map(|i| {
                        let w = if i == 0 || i == n { 0.5 * h } else { h };
                        2.0 * w * arc_factor(&p, i as f64 * h) * s[a].theta[i] * s[b].theta[i]
                    })
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn boundary_cycles_match_the_topology(
        eps in 0.05f64..0.25,
        alpha in 0.35f64..0.5,
        p1 in 1.5f64..4.5,
        flip in proptest::bool::ANY,
    ) {
        let s = glued(eps, alpha, 1.0, p1, flip);
        let cycles = s.mesh.boundary_cycles().unwrap();
        prop_assert_eq!(cycles.len() as u32, s.topology.boundary_components);
        let mut seen: Vec<usize> = cycles.iter().flatten().copied().collect();
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        prop_assert_eq!(seen.len(), total);
        prop_assert_eq!(topology_invariants(&s.mesh).unwrap(), s.topology);
        for m in [build_disk_mesh(2), build_annulus_mesh(0.5, 2)] {
            prop_assert_eq!(m.boundary_cycles().unwrap().len() as u32, topology_invariants(&m).unwrap().boundary_components);
        }
    }

    #[test]
    fn glue_preserves_length_bookkeeping(
        eps in 0.05f64..0.25,
        alpha in 0.35f64..0.5,
        t in 0.3f64..5.0,
        p1 in 1.5f64..4.5,
    ) {
        let s = glued(eps, alpha, t, p1, false);
        let prep = &s.base;
        let seams = prep.seam_edge_set();
        let before = edge_length_sum(&prep.mesh, &prep.metric, |_, _, _| true);
        let removed = edge_length_sum(&prep.mesh, &prep.metric, |a, b, _| seams.contains(&(a.min(b), a.max(b))));
        let sides = 2.0 * parabola_arc(eps * s.params.r, eps) / t;
        let after = edge_length_sum(&s.mesh, &s.metric, |_, _, _| true);
        let want = before - removed + sides;
        prop_assert!((after - want).abs() <= 1e-10 * want, "{} vs {}", after, want);
        let measured_sides = edge_length_sum(&s.mesh, &s.metric, |_, _, tag| GluedSurface::is_side_edge(tag));
        prop_assert!((measured_sides - sides).abs() <= 1e-10 * sides);
    }

    #[test]
    fn sigma1_l_is_scale_invariant(c in -3.0f64..3.0) {
        let (m, g) = small_disk();
        let a = steklov_spectrum(&m, &g, 1).unwrap().sigma1_l();
        let b = steklov_spectrum(&m, &g.shifted(c), 1).unwrap().sigma1_l();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn stiffness_ignores_interior_conformal_factor(seed in any::<u64>(), amp in 0.0f64..3.0) {
        let (m, g) = small_disk();
        let boundary: std::collections::HashSet<usize> = m.boundary_vertices().into_iter().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let omega: Vec<f64> = (0..m.num_vertices())
            .map(|v| if boundary.contains(&v) { 0.0 } else { amp * rand::Rng::gen_range(&mut rng, -1.0..1.0) })
            .collect();
        let a = assemble_stiffness(&m, &g).unwrap();
        let b = assemble_stiffness(&m, &ConformalMetric::from_values(omega)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pencil_pairs_are_accurate_and_orthogonal(seed in any::<u64>(), amp in 0.0f64..0.8) {
        let (m, _) = small_disk();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let omega: Vec<f64> = (0..m.num_vertices()).map(|_| amp * rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let g = ConformalMetric::from_values(omega);
        let s = steklov_spectrum(&m, &g, 6).unwrap();
        prop_assert!(s.residuals.iter().all(|&r| r <= 1e-8));
        let b = assemble_boundary_mass(&m, &g).unwrap();
        for i in 0..s.len() {
            for j in 0..i {
                let d = b.bilinear(&s.eigenfunction(i), &s.eigenfunction(j));
                prop_assert!(d.abs() <= 1e-8, "{} {} {}", i, j, d);
            }
        }
    }

    #[test]
    fn length_normalization_is_idempotent(seed in any::<u64>(), amp in 0.0f64..1.0) {
        let (m, g) = small_disk();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut d = DensityParam::random(&m, Parametrization::Fourier { modes: 8 }, amp, &mut rng).unwrap();
        d.normalize(&m, &g);
        let once = d.clone();
        d.normalize(&m, &g);
        prop_assert_eq!(once.coeffs.iter().map(|c| c.to_bits()).collect::<Vec<_>>(), d.coeffs.iter().map(|c| c.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn immersion_residuals_are_rotation_invariant(angle in 0.0f64..(2.0 * PI), mirror in proptest::bool::ANY) {
        let (m, g) = small_disk();
        let problem = SteklovProblem::new(&m, &g, MassKind::Consistent).unwrap();
        let spec = problem.solve(4, 1e-3).unwrap();
        let imm = extract_immersion(&spec, &problem, 1e-3);
        prop_assert_eq!(imm.n, 2);
        let (s, c) = angle.sin_cos();
        let f = if mirror { -1.0 } else { 1.0 };
        let q = DMatrix::from_row_slice(2, 2, &[c, -s * f, s, c * f]);
        let a = minimality_residuals(&imm, &problem);
        let b = minimality_residuals(&imm.rotated(&q), &problem);
        prop_assert!((a.harmonicity - b.harmonicity).abs() <= 1e-12);
        prop_assert!((a.sphere_deviation - b.sphere_deviation).abs() <= 1e-12);
        prop_assert!((a.angle - b.angle).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn optimizer_history_never_decreases(seed in any::<u64>()) {
        let (m, g) = small_disk();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let init = DensityParam::random(&m, Parametrization::Fourier { modes: 6 }, 0.3, &mut rng).unwrap();
        let opts = OptimizeOptions { max_iter: 6, ..OptimizeOptions::default() };
        let res = optimize_density(&m, &g, init, &opts).unwrap();
        for w in res.history.windows(2) {
            prop_assert!(w[1].sigma1_l >= w[0].sigma1_l - 1e-12);
        }
    }
}
