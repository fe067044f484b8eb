//! Dispatch of every run kind to the core library and emission of artifacts.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rayon::prelude::*;
use steklov_core::geometry::{
    build_annulus_mesh, build_cusp_mesh, build_disk_mesh, build_square_mesh, glue_with, read_mesh, topology_invariants,
    write_mesh, ConformalMetric, Mesh,
};
use steklov_core::lab::{self, GluedBase, LabError, ReduceOptions};
use steklov_core::shapeopt::{
    extract_immersion, minimality_residuals, mobius_fit, optimize_density, DensityParam, Termination,
};
use steklov_core::steklov::{
    boundary_length, eigenfunctions_csv, spectrum_csv, steklov_spectrum_with, SolverOptions, SteklovSpectrum,
};

use crate::config::{BaseKind, ConfigError, Experiment, Kind, Route, RunConfig, TScale};
use crate::output::{self, float, opt_float, Table};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {detail}")]
    Solver { context: String, detail: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for configuration errors, 3 for solver failures, 1 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Solver { .. } => 3,
            RunError::Io(_) => 1,
        }
    }

    fn solver(context: impl Into<String>, e: impl std::fmt::Display) -> Self {
        RunError::Solver { context: context.into(), detail: e.to_string() }
    }
}

fn lab_err(context: &str) -> impl Fn(LabError) -> RunError + '_ {
    move |e| RunError::solver(context, e)
}

/// Runs `cfg`, writing artifacts into `out`; `threads = 0` uses every core.
pub fn run(cfg: &RunConfig, out: &Path, threads: usize) -> Result<Vec<PathBuf>, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::solver("thread pool", e))?;
    pool.install(|| {
        let mut r = Runner { cfg, out, hash: cfg.hash(), written: Vec::new() };
        match cfg.kind {
            Kind::Mesh => r.mesh(),
            Kind::Spectrum => r.spectrum(),
            Kind::Glue => r.glue(),
            Kind::Reduce => r.reduce(),
            Kind::VerifyAsymptotics => r.verify(),
            Kind::Optimize => r.optimize(),
            Kind::Sweep => r.sweep(),
        }?;
        Ok(r.written)
    })
}

/// Maps `f` over `items` in parallel and returns the first error in item order.
fn par_rows<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Result<R, RunError> + Sync) -> Result<Vec<R>, RunError> {
    items.par_iter().map(&f).collect::<Vec<_>>().into_iter().collect()
}

fn product<A: Copy, B: Copy>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    hash: String,
    written: Vec<PathBuf>,
}

impl Runner<'_> {
    fn emit(&mut self, name: &str, content: &str) -> Result<(), RunError> {
        self.written.push(output::write(self.out, name, content)?);
        Ok(())
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<(), RunError> {
        let text = t.render(&self.hash);
        self.emit(name, &text)
    }

    fn base(&self) -> Result<(Mesh, ConformalMetric), RunError> {
        let g = &self.cfg.geometry;
        let mut omega = g.omega;
        let mesh = match g.base {
            BaseKind::Disk => build_disk_mesh(g.refinement),
            BaseKind::Annulus => build_annulus_mesh(g.inner_radius, g.refinement),
            BaseKind::Square => build_square_mesh(g.cells),
            BaseKind::Cusp => {
                omega -= self.cfg.glue.t.ln();
                build_cusp_mesh(&self.cfg.glue.params(), self.cfg.glue.layers).map_err(|e| RunError::solver("cusp mesh", e))?
            }
            BaseKind::File => {
                let path = g.path.as_ref().ok_or_else(|| ConfigError::new("geometry.path", "missing"))?;
                let text = std::fs::read_to_string(path)?;
                read_mesh(&text).map_err(|e| ConfigError::new("geometry.path", e.to_string()))?
            }
        };
        let metric = ConformalMetric::constant(mesh.num_vertices(), omega);
        Ok((mesh, metric))
    }

    fn glued_base(&self) -> Result<GluedBase, RunError> {
        let (mesh, metric) = self.base()?;
        let mut b = GluedBase::new(mesh, metric);
        b.glue = self.cfg.glue.options();
        b.mass = self.cfg.solver.mass_kind();
        Ok(b)
    }

    fn solve(&self, mesh: &Mesh, metric: &ConformalMetric) -> Result<SteklovSpectrum, RunError> {
        let s = &self.cfg.solver;
        let opts = SolverOptions {
            mass: s.mass_kind(),
            cluster_tol: s.cluster_tol,
            full_pencil: s.route == Route::Full,
            ..SolverOptions::default()
        };
        steklov_spectrum_with(mesh, metric, s.count, &opts).map_err(|e| RunError::solver("spectrum", e))
    }

    fn emit_spectrum(&mut self, spec: &SteklovSpectrum) -> Result<(), RunError> {
        let text = output::with_hash(&self.hash, &spectrum_csv(spec));
        self.emit("spectrum.csv", &text)?;
        if self.cfg.eigenfunctions {
            let text = output::with_hash(&self.hash, &eigenfunctions_csv(spec));
            self.emit("eigenfunctions.csv", &text)?;
        }
        Ok(())
    }

    fn mesh(&mut self) -> Result<(), RunError> {
        let (mesh, metric) = self.base()?;
        let topo = topology_invariants(&mesh).map_err(|e| RunError::solver("topology", e))?;
        self.emit("mesh.txt", &write_mesh(&mesh))?;
        let mut t = Table::new(&[
            "vertices",
            "edges",
            "triangles",
            "boundary_edges",
            "euler_characteristic",
            "genus",
            "boundary_components",
            "orientable",
            "boundary_length",
        ]);
        t.push(vec![
            mesh.num_vertices().to_string(),
            mesh.num_edges().to_string(),
            mesh.triangles.len().to_string(),
            mesh.boundary_edges.len().to_string(),
            mesh.euler_characteristic().to_string(),
            topo.genus.to_string(),
            topo.boundary_components.to_string(),
            topo.orientable.to_string(),
            float(boundary_length(&mesh, &metric)),
        ]);
        self.table("topology.csv", &t)
    }

    fn spectrum(&mut self) -> Result<(), RunError> {
        let (mesh, metric) = self.base()?;
        let spec = self.solve(&mesh, &metric)?;
        self.emit_spectrum(&spec)
    }

    fn glue(&mut self) -> Result<(), RunError> {
        let (mesh, metric) = self.base()?;
        let p = self.cfg.glue.params();
        let glued =
            glue_with(&mesh, &metric, &p, &self.cfg.glue.options()).map_err(|e| RunError::solver("glue", e))?;
        let spec = self.solve(&glued.mesh, &glued.metric)?;
        self.emit("glued_mesh.txt", &write_mesh(&glued.mesh))?;
        let mut t = Table::new(&[
            "eps",
            "alpha",
            "r",
            "t",
            "vertices",
            "triangles",
            "genus",
            "boundary_components",
            "orientable",
            "base_boundary_length",
            "boundary_length",
            "sigma1",
            "sigma1L",
        ]);
        t.push(vec![
            float(p.eps),
            float(p.alpha_effective()),
            float(p.r),
            float(p.t),
            glued.mesh.num_vertices().to_string(),
            glued.mesh.triangles.len().to_string(),
            glued.topology.genus.to_string(),
            glued.topology.boundary_components.to_string(),
            glued.topology.orientable.to_string(),
            float(boundary_length(&mesh, &metric)),
            float(spec.boundary_length),
            float(spec.eigenvalues[1]),
            float(spec.sigma1_l()),
        ]);
        self.table("glue.csv", &t)?;
        self.emit_spectrum(&spec)
    }

    fn reduce_table(&self) -> Result<(Table, Vec<lab::ReduceRow>), RunError> {
        let base = self.glued_base()?;
        let cfg = self.cfg;
        let pts: Vec<(f64, (f64, f64))> =
            product(&cfg.eps_grid(), &product(&cfg.alpha_grid(), &cfg.xi_grid())).into_iter().collect();
        let rows = par_rows(&pts, |&(eps, (alpha, xi))| {
            let p = cfg.glue.params_at(eps, alpha, cfg.glue.t);
            let opts = ReduceOptions { xi, intervals: cfg.reduce.intervals };
            lab::reduce_point(&base, &p, &opts).map_err(lab_err("reduce"))
        })?;
        let mut t = Table::new(&[
            "eps",
            "alpha",
            "t",
            "sigma_reduced",
            "sigma_coupled",
            "sigma_fem",
            "c0",
            "c1",
            "gamma",
            "improved_bound",
            "xi",
            "mass",
            "coupled_rel_error",
            "second_mode",
            "d1",
            "single_bound",
        ]);
        for r in &rows {
            let c = r.combined.as_ref();
            t.push(vec![
                float(r.eps),
                float(r.alpha),
                float(r.t),
                float(r.sigma_reduced),
                float(r.sigma_coupled),
                float(r.sigma_fem),
                float(r.c0),
                float(r.c1),
                opt_float(c.map(|c| c.gamma)),
                opt_float(c.map(|c| c.bound)),
                float(r.xi),
                float(r.mass),
                float(r.coupled_rel_error()),
                r.second.map(|l| l.to_string()).unwrap_or_default(),
                opt_float(r.d1),
                opt_float(c.map(|c| c.single_bound)),
            ]);
        }
        Ok((t, rows))
    }

    fn reduce(&mut self) -> Result<(), RunError> {
        let (t, _) = self.reduce_table()?;
        self.table("reduce.csv", &t)
    }

    fn verify(&mut self) -> Result<(), RunError> {
        let base = self.glued_base()?;
        let cfg = self.cfg;
        let star = cfg.grid.t_scale == TScale::TStar && !cfg.grid.t.is_empty();
        let pts = product(&cfg.eps_grid(), &product(&cfg.alpha_grid(), &cfg.t_grid()));
        let rows = par_rows(&pts, |&(eps, (alpha, t))| {
            let p = cfg.glue.params_at(eps, alpha, 1.0);
            lab::asymptotics_point(&base, &p, t, star).map_err(lab_err("verify-asymptotics"))
        })?;
        let mut t = Table::new(&[
            "eps",
            "alpha",
            "t",
            "r",
            "sigma_star",
            "branch_star",
            "branch_cusp",
            "bound_first",
            "error_scale_first",
            "bound_kplus1",
            "error_scale_kplus1",
            "expansion_sigma",
            "expansion_error_scale",
            "sigma1_fem",
            "sigma_kplus1_fem",
            "c0",
            "c1",
            "residual_first",
            "residual_kplus1",
            "residual_expansion",
        ]);
        for r in &rows {
            t.push(vec![
                float(r.eps),
                float(r.alpha),
                float(r.t),
                float(r.r),
                float(r.sigma_star),
                float(r.first.branch_star),
                float(r.first.branch_cusp),
                float(r.first.bound),
                float(r.first.error_scale),
                float(r.kplus1.bound),
                float(r.kplus1.error_scale),
                float(r.expansion.sigma),
                float(r.expansion.error_scale),
                float(r.sigma1),
                float(r.sigma_k1),
                float(r.c0),
                float(r.c1),
                float(r.residual_first()),
                float(r.residual_kplus1()),
                float(r.residual_expansion()),
            ]);
        }
        self.table("asymptotics.csv", &t)
    }

    fn optimize(&mut self) -> Result<(), RunError> {
        let (mesh, metric) = self.base()?;
        let o = &self.cfg.optimize;
        let param = o.parametrization();
        let err = |e| RunError::solver("optimize", e);
        let init = if o.amplitude == 0.0 {
            DensityParam::zero(&mesh, param).map_err(err)?
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.cfg.seed);
            DensityParam::random(&mesh, param, o.amplitude, &mut rng).map_err(err)?
        };
        let opts = o.options(self.cfg.solver.mass_kind());
        let res = optimize_density(&mesh, &metric, init, &opts).map_err(err)?;

        let mut h = Table::new(&["iter", "sigma1L", "clustersize", "stepsize"]);
        for row in &res.history {
            h.push(vec![row.iter.to_string(), float(row.sigma1_l), row.cluster_size.to_string(), float(row.step)]);
        }
        self.table("history.csv", &h)?;

        let mut d = Table::new(&["vertex", "x", "y", "log_density"]);
        for (v, psi) in res.density.values() {
            let [x, y] = mesh.vertices[v];
            d.push(vec![v.to_string(), float(x), float(y), float(psi)]);
        }
        self.table("density.csv", &d)?;

        let imm = extract_immersion(&res.spectrum, &res.problem, o.cluster_tol);
        let mut header: Vec<String> = ["vertex", "x", "y"].map(String::from).to_vec();
        header.extend((1..=imm.n).map(|k| format!("phi{k}")));
        let mut c = Table::new(&header);
        for v in 0..mesh.num_vertices() {
            let [x, y] = mesh.vertices[v];
            let mut row = vec![v.to_string(), float(x), float(y)];
            row.extend((0..imm.n).map(|k| float(imm.coords[(v, k)])));
            c.push(row);
        }
        self.table("immersion.csv", &c)?;

        let rep = minimality_residuals(&imm, &res.problem);
        let gauge = mobius_fit(&mesh, &res.density).map(|f| f.residual);
        let mut s = Table::new(&[
            "sigma1L",
            "termination",
            "iterations",
            "raw_flatness",
            "gauge_flatness",
            "n",
            "harmonicity",
            "sphere_deviation",
            "angle",
        ]);
        s.push(vec![
            float(res.sigma1_l),
            termination_word(res.termination).into(),
            (res.history.len() - 1).to_string(),
            float(res.density.flatness()),
            opt_float(gauge),
            imm.n.to_string(),
            float(rep.harmonicity),
            float(rep.sphere_deviation),
            float(rep.angle),
        ]);
        self.table("optimize.csv", &s)
    }

    fn sweep(&mut self) -> Result<(), RunError> {
        let cfg = self.cfg;
        let t = match cfg.sweep.experiment {
            Experiment::CuspLaw => {
                let pts = product(&cfg.grid.alpha, &cfg.grid.eps);
                let rows = par_rows(&pts, |&(alpha, eps)| {
                    lab::cusp_law_point(eps, alpha, cfg.sweep.layers).map_err(lab_err("cusp-law"))
                })?;
                let mut t = Table::new(&["row", "eps", "alpha", "r", "sigma1", "quantity", "rel_error", "monotone"]);
                for (k, r) in rows.iter().enumerate() {
                    t.push(vec![
                        k.to_string(),
                        float(r.eps),
                        float(r.alpha),
                        float(r.r),
                        float(r.sigma1),
                        float(r.quantity),
                        float(r.rel_error),
                        String::new(),
                    ]);
                }
                let eps_min = cfg.grid.eps.iter().copied().fold(f64::INFINITY, f64::min);
                let worst = rows.iter().filter(|r| r.eps == eps_min).map(|r| r.rel_error.abs()).fold(0.0, f64::max);
                t.push(summary(8, &[(6, float(worst)), (7, lab::cusp_law_monotone(&rows).to_string())]));
                t
            }
            Experiment::Bounds => {
                let base = self.glued_base()?;
                let pts = product(&cfg.grid.eps, &product(&cfg.grid.alpha, &cfg.grid.t));
                let rows = par_rows(&pts, |&(eps, (alpha, f))| {
                    let p = cfg.glue.params_at(eps, alpha, 1.0);
                    lab::bound_point(&base, &p, f, cfg.sweep.slack).map_err(lab_err("bounds"))
                })?;
                let mut t = Table::new(&[
                    "row",
                    "eps",
                    "alpha",
                    "t",
                    "sigma_star",
                    "k",
                    "sigma1",
                    "bound_first",
                    "error_scale_first",
                    "excess_first",
                    "sigma_kplus1",
                    "bound_kplus1",
                    "error_scale_kplus1",
                    "excess_kplus1",
                    "slack",
                    "holds",
                ]);
                for (k, r) in rows.iter().enumerate() {
                    t.push(vec![
                        k.to_string(),
                        float(r.eps),
                        float(r.alpha),
                        float(r.t),
                        float(r.sigma_star),
                        r.k.to_string(),
                        float(r.sigma1),
                        float(r.first.bound),
                        float(r.first.error_scale),
                        float(r.excess_first),
                        float(r.sigma_k1),
                        float(r.kplus1.bound),
                        float(r.kplus1.error_scale),
                        float(r.excess_kplus1),
                        float(r.slack),
                        r.holds().to_string(),
                    ]);
                }
                let max = |f: fn(&lab::BoundRow) -> f64| float(rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max));
                t.push(summary(
                    16,
                    &[
                        (9, max(|r| r.excess_first)),
                        (13, max(|r| r.excess_kplus1)),
                        (14, float(cfg.sweep.slack)),
                        (15, rows.iter().all(|r| r.holds()).to_string()),
                    ],
                ));
                t
            }
            Experiment::Reduce => {
                let (inner, rows) = self.reduce_table()?;
                let mut t = Table::new(&[
                    "row",
                    "eps",
                    "alpha",
                    "xi",
                    "t",
                    "sigma_fem",
                    "sigma_coupled",
                    "coupled_rel_error",
                    "c1",
                    "d1",
                    "single_bound",
                    "improved_bound",
                    "gap",
                    "improved_ge_single",
                ]);
                let _ = inner;
                for (k, r) in rows.iter().enumerate() {
                    let c = r.combined.as_ref();
                    t.push(vec![
                        k.to_string(),
                        float(r.eps),
                        float(r.alpha),
                        float(r.xi),
                        float(r.t),
                        float(r.sigma_fem),
                        float(r.sigma_coupled),
                        float(r.coupled_rel_error()),
                        float(r.c1),
                        opt_float(r.d1),
                        opt_float(c.map(|c| c.single_bound)),
                        opt_float(c.map(|c| c.bound)),
                        opt_float(c.map(|c| c.bound - c.single_bound)),
                        c.map(|c| (c.bound >= c.single_bound - 1e-12).to_string()).unwrap_or_default(),
                    ]);
                }
                let worst = rows.iter().map(|r| r.coupled_rel_error().abs()).fold(0.0, f64::max);
                let ok = rows
                    .iter()
                    .filter(|r| r.c1.abs() > 1e-6)
                    .all(|r| r.combined.as_ref().is_some_and(|c| c.bound >= c.single_bound - 1e-12));
                t.push(summary(14, &[(7, float(worst)), (13, ok.to_string())]));
                t
            }
            Experiment::Weinstock => {
                let (mesh, _) = self.base()?;
                let o = &cfg.optimize;
                let opts = o.options(cfg.solver.mass_kind());
                let rows = par_rows(&cfg.grid.seeds, |&seed| {
                    lab::weinstock_point(&mesh, seed, o.amplitude, o.parametrization(), &opts)
                        .map_err(lab_err("weinstock"))
                })?;
                let mut t = Table::new(&[
                    "row",
                    "seed",
                    "initial_sigma1L",
                    "sigma1L",
                    "rel_error",
                    "termination",
                    "iterations",
                    "raw_flatness",
                    "gauge_flatness",
                    "n",
                    "harmonicity",
                    "sphere_deviation",
                    "angle",
                ]);
                for (k, r) in rows.iter().enumerate() {
                    t.push(vec![
                        k.to_string(),
                        r.seed.to_string(),
                        float(r.initial),
                        float(r.sigma1_l),
                        float(r.rel_error),
                        termination_word(r.termination).into(),
                        r.iterations.to_string(),
                        float(r.raw_flatness),
                        float(r.gauge_flatness),
                        r.n.to_string(),
                        float(r.residuals.harmonicity),
                        float(r.residuals.sphere_deviation),
                        float(r.residuals.angle),
                    ]);
                }
                let max = |f: &dyn Fn(&lab::WeinstockRow) -> f64| float(rows.iter().map(f).fold(0.0, f64::max));
                t.push(summary(
                    13,
                    &[
                        (4, max(&|r| r.rel_error.abs())),
                        (8, max(&|r| r.gauge_flatness)),
                        (11, max(&|r| r.residuals.sphere_deviation)),
                        (12, max(&|r| r.residuals.angle)),
                    ],
                ));
                t
            }
        };
        self.table("sweep.csv", &t)
    }
}

/// A row labelled `summary` with the given cells filled in.
fn summary(width: usize, cells: &[(usize, String)]) -> Vec<String> {
    let mut row = vec![String::new(); width];
    row[0] = "summary".into();
    for (k, v) in cells {
        row[*k] = v.clone();
    }
    row
}

fn termination_word(t: Termination) -> &'static str {
    match t {
        Termination::Stationary => "stationary",
        Termination::Stalled => "stalled",
        Termination::MaxIterations => "max-iterations",
    }
}
