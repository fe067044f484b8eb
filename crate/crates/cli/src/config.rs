//! Run configuration: a sectioned key-value file with a canonical serialization.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ini::Ini;
use sha2::{Digest, Sha256};
use steklov_core::geometry::cusp::{BoundaryPoint, CuspMeshOptions};
use steklov_core::geometry::{GlueOptions, GlueParams};
use steklov_core::shapeopt::{OptimizeOptions, Parametrization};
use steklov_core::steklov::MassKind;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error at `{key}`: {detail}")]
pub struct ConfigError {
    pub key: String,
    pub detail: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { key: key.into(), detail: detail.into() }
    }
}

macro_rules! keywords {
    ($name:ident { $($variant:ident = $word:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const WORDS: &'static [(&'static str, $name)] = &[$(($word, $name::$variant)),+];

            pub fn word(self) -> &'static str {
                Self::WORDS.iter().find(|w| w.1 == self).map(|w| w.0).unwrap_or("")
            }
        }
    };
}

keywords!(Kind {
    Mesh = "mesh",
    Spectrum = "spectrum",
    Glue = "glue",
    Reduce = "reduce",
    VerifyAsymptotics = "verify-asymptotics",
    Optimize = "optimize",
    Sweep = "sweep",
});
keywords!(BaseKind { Disk = "disk", Annulus = "annulus", Square = "square", Cusp = "cusp", File = "file" });
keywords!(Corners { Keep = "keep" });
keywords!(Route { Dtn = "dtn", Full = "full" });
keywords!(Mass { Consistent = "consistent", Lumped = "lumped" });
keywords!(Param { Fourier = "fourier", Vertex = "vertex" });
keywords!(TScale { Absolute = "absolute", TStar = "t-star" });
keywords!(Experiment { CuspLaw = "cusp-law", Bounds = "bounds", Reduce = "reduce", Weinstock = "weinstock" });

#[derive(Clone, Debug, PartialEq)]
pub struct GeometrySpec {
    pub base: BaseKind,
    pub refinement: u32,
    pub inner_radius: f64,
    pub cells: usize,
    /// Mesh file for `base = file`, resolved against the config's directory.
    pub path: Option<PathBuf>,
    /// Constant log conformal factor added to the base metric.
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlueSpec {
    pub eps: f64,
    pub alpha: f64,
    /// Explicit truncation; overrides `alpha` when set.
    pub r: Option<f64>,
    pub t: f64,
    pub p0: (usize, f64),
    pub p1: (usize, f64),
    pub flip: (bool, bool),
    pub orientable: Option<bool>,
    pub layers: usize,
    pub seam_edges: usize,
    pub grading: f64,
    pub refine: bool,
    /// Discrete treatment of the four seam corner points.
    pub corners: Corners,
}

impl GlueSpec {
    pub fn params(&self) -> GlueParams {
        self.params_at(self.eps, self.alpha, self.t)
    }

    pub fn params_at(&self, eps: f64, alpha: f64, t: f64) -> GlueParams {
        let mut p = match self.r {
            Some(r) => GlueParams::with_r(eps, r, t),
            None => GlueParams::new(eps, alpha, t),
        };
        p.p0 = BoundaryPoint { component: self.p0.0, arclength: self.p0.1 };
        p.p1 = BoundaryPoint { component: self.p1.0, arclength: self.p1.1 };
        p.orientation_flags = self.flip;
        p.require_orientable = self.orientable;
        p
    }

    pub fn options(&self) -> GlueOptions {
        GlueOptions {
            refine: self.refine,
            seam_edges: self.seam_edges,
            grading: self.grading,
            cusp: CuspMeshOptions::with_layers(self.layers),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSpec {
    pub count: usize,
    pub mass: Mass,
    pub route: Route,
    pub cluster_tol: f64,
}

impl SolverSpec {
    pub fn mass_kind(&self) -> MassKind {
        match self.mass {
            Mass::Consistent => MassKind::Consistent,
            Mass::Lumped => MassKind::Lumped,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReduceSpec {
    pub xi: f64,
    pub intervals: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeSpec {
    pub max_iter: usize,
    pub parametrization: Param,
    pub modes: usize,
    /// Amplitude of the random initial density; 0 starts from the base metric.
    pub amplitude: f64,
    pub cluster_tol: f64,
    pub mobius_slice: bool,
}

impl OptimizeSpec {
    pub fn parametrization(&self) -> Parametrization {
        match self.parametrization {
            Param::Fourier => Parametrization::Fourier { modes: self.modes },
            Param::Vertex => Parametrization::PerVertex,
        }
    }

    pub fn options(&self, mass: MassKind) -> OptimizeOptions {
        OptimizeOptions {
            max_iter: self.max_iter,
            cluster_tol: self.cluster_tol,
            mobius_slice: self.mobius_slice,
            mass,
            ..OptimizeOptions::default()
        }
    }
}

/// Grids for `reduce`, `verify-asymptotics` and `sweep`; an empty list falls
/// back to the matching scalar where one exists.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub eps: Vec<f64>,
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    pub t_scale: TScale,
    pub xi: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub experiment: Experiment,
    pub slack: f64,
    pub layers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub kind: Kind,
    pub seed: u64,
    pub eigenfunctions: bool,
    pub geometry: GeometrySpec,
    pub glue: GlueSpec,
    pub solver: SolverSpec,
    pub reduce: ReduceSpec,
    pub optimize: OptimizeSpec,
    pub grid: GridSpec,
    pub sweep: SweepSpec,
}

impl RunConfig {
    /// Defaults for every key except `run.kind`.
    pub fn with_kind(kind: Kind) -> Self {
        Self {
            kind,
            seed: 0,
            eigenfunctions: false,
            geometry: GeometrySpec {
                base: BaseKind::Disk,
                refinement: 4,
                inner_radius: 0.5,
                cells: 16,
                path: None,
                omega: 0.0,
            },
            glue: GlueSpec {
                eps: 0.1,
                alpha: 0.45,
                r: None,
                t: 1.0,
                p0: (0, 0.0),
                p1: (0, std::f64::consts::PI),
                flip: (false, false),
                orientable: None,
                layers: 32,
                seam_edges: 6,
                grading: 0.25,
                refine: true,
                corners: Corners::Keep,
            },
            solver: SolverSpec { count: 6, mass: Mass::Consistent, route: Route::Dtn, cluster_tol: 1e-6 },
            reduce: ReduceSpec { xi: 0.5, intervals: 400 },
            optimize: OptimizeSpec {
                max_iter: 200,
                parametrization: Param::Fourier,
                modes: 16,
                amplitude: 0.3,
                cluster_tol: 1e-3,
                mobius_slice: true,
            },
            grid: GridSpec { eps: vec![], alpha: vec![], t: vec![], t_scale: TScale::TStar, xi: vec![], seeds: vec![] },
            sweep: SweepSpec { experiment: Experiment::CuspLaw, slack: 3.0, layers: 32 },
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, dir)
    }

    /// Parses `text`; relative paths are resolved against `dir` and must exist.
    pub fn parse(text: &str, dir: &Path) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError::new("syntax", e.to_string()))?;
        let mut r = Reader { ini: &ini, seen: BTreeSet::new() };
        let kind = r.keyword("run", "kind", None, Kind::WORDS)?;
        let mut c = Self::with_kind(kind);
        c.seed = r.num("run", "seed", c.seed)?;
        c.eigenfunctions = r.boolean("run", "eigenfunctions", c.eigenfunctions)?;

        let g = &mut c.geometry;
        g.base = r.keyword("geometry", "base", Some(g.base), BaseKind::WORDS)?;
        g.refinement = r.num("geometry", "refinement", g.refinement)?;
        g.inner_radius = r.float("geometry", "inner_radius", g.inner_radius)?;
        g.cells = r.num("geometry", "cells", g.cells)?;
        g.omega = r.float("geometry", "omega", g.omega)?;
        if let Some(p) = r.raw("geometry", "path")? {
            let joined = dir.join(p);
            let found = std::fs::canonicalize(&joined)
                .map_err(|e| ConfigError::new("geometry.path", format!("{}: {e}", joined.display())))?;
            g.path = Some(found);
        }
        if g.base == BaseKind::File && g.path.is_none() {
            return Err(ConfigError::new("geometry.path", "required when base = file"));
        }
        if !(g.inner_radius > 0.0 && g.inner_radius < 1.0) {
            return Err(ConfigError::new("geometry.inner_radius", "must lie in (0, 1)"));
        }
        if g.cells == 0 {
            return Err(ConfigError::new("geometry.cells", "must be positive"));
        }

        let u = &mut c.glue;
        u.eps = r.float("glue", "eps", u.eps)?;
        u.alpha = r.float("glue", "alpha", u.alpha)?;
        u.r = r.raw("glue", "r")?.map(|v| parse_float("glue.r", v)).transpose()?;
        u.t = r.float("glue", "t", u.t)?;
        u.p0 = (r.num("glue", "p0_component", u.p0.0)?, r.float("glue", "p0", u.p0.1)?);
        u.p1 = (r.num("glue", "p1_component", u.p1.0)?, r.float("glue", "p1", u.p1.1)?);
        u.flip = (r.boolean("glue", "flip_p0", u.flip.0)?, r.boolean("glue", "flip_p1", u.flip.1)?);
        u.orientable = match r.raw("glue", "orientable")? {
            None | Some("any") => None,
            Some(v) => Some(parse_bool("glue.orientable", v)?),
        };
        u.layers = r.num("glue", "layers", u.layers)?;
        u.seam_edges = r.num("glue", "seam_edges", u.seam_edges)?;
        u.grading = r.float("glue", "grading", u.grading)?;
        u.refine = r.boolean("glue", "refine", u.refine)?;
        u.corners = r.keyword("glue", "corners", Some(u.corners), Corners::WORDS)?;
        if u.layers < 4 {
            return Err(ConfigError::new("glue.layers", "must be at least 4"));
        }
        u.params().validate().map_err(|e| ConfigError::new("glue", e.to_string()))?;

        let s = &mut c.solver;
        s.count = r.num("solver", "count", s.count)?;
        s.mass = r.keyword("solver", "mass", Some(s.mass), Mass::WORDS)?;
        s.route = r.keyword("solver", "route", Some(s.route), Route::WORDS)?;
        s.cluster_tol = r.float("solver", "cluster_tol", s.cluster_tol)?;
        if s.count == 0 {
            return Err(ConfigError::new("solver.count", "must be at least 1"));
        }

        c.reduce.xi = r.float("reduce", "xi", c.reduce.xi)?;
        c.reduce.intervals = r.num("reduce", "intervals", c.reduce.intervals)?;

        let o = &mut c.optimize;
        o.max_iter = r.num("optimize", "max_iter", o.max_iter)?;
        o.parametrization = r.keyword("optimize", "parametrization", Some(o.parametrization), Param::WORDS)?;
        o.modes = r.num("optimize", "modes", o.modes)?;
        o.amplitude = r.float("optimize", "amplitude", o.amplitude)?;
        o.cluster_tol = r.float("optimize", "cluster_tol", o.cluster_tol)?;
        o.mobius_slice = r.boolean("optimize", "mobius_slice", o.mobius_slice)?;

        let gr = &mut c.grid;
        gr.eps = r.floats("grid", "eps")?;
        gr.alpha = r.floats("grid", "alpha")?;
        gr.t = r.floats("grid", "t")?;
        gr.t_scale = r.keyword("grid", "t_scale", Some(gr.t_scale), TScale::WORDS)?;
        gr.xi = r.floats("grid", "xi")?;
        gr.seeds = r.list("grid", "seeds", |k, v| v.parse::<u64>().map_err(|e| ConfigError::new(k, format!("`{v}`: {e}"))))?;

        c.sweep.experiment = r.keyword("sweep", "experiment", Some(c.sweep.experiment), Experiment::WORDS)?;
        c.sweep.slack = r.float("sweep", "slack", c.sweep.slack)?;
        c.sweep.layers = r.num("sweep", "layers", c.sweep.layers)?;

        r.reject_unknown()?;
        if kind == Kind::Sweep {
            let need: &[(&str, bool)] = match c.sweep.experiment {
                Experiment::CuspLaw => &[("grid.eps", c.grid.eps.is_empty()), ("grid.alpha", c.grid.alpha.is_empty())],
                Experiment::Bounds => &[
                    ("grid.eps", c.grid.eps.is_empty()),
                    ("grid.alpha", c.grid.alpha.is_empty()),
                    ("grid.t", c.grid.t.is_empty()),
                ],
                Experiment::Reduce => &[("grid.eps", c.grid.eps.is_empty()), ("grid.alpha", c.grid.alpha.is_empty())],
                Experiment::Weinstock => &[("grid.seeds", c.grid.seeds.is_empty())],
            };
            if let Some((key, _)) = need.iter().find(|n| n.1) {
                return Err(ConfigError::new(*key, "sweep grids must be nonempty"));
            }
        }
        Ok(c)
    }

    /// Canonical text: every key, fixed order, shortest round-trip floats.
    pub fn to_ini(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let (g, u, o, gr) = (&self.geometry, &self.glue, &self.optimize, &self.grid);
        let mut geometry = vec![
            ("base", g.base.word().to_string()),
            ("refinement", g.refinement.to_string()),
            ("inner_radius", g.inner_radius.to_string()),
            ("cells", g.cells.to_string()),
        ];
        if let Some(p) = &g.path {
            geometry.push(("path", p.display().to_string()));
        }
        geometry.push(("omega", g.omega.to_string()));
        let mut glue = vec![("eps", u.eps.to_string()), ("alpha", u.alpha.to_string())];
        if let Some(r) = u.r {
            glue.push(("r", r.to_string()));
        }
        glue.extend([
            ("t", u.t.to_string()),
            ("p0_component", u.p0.0.to_string()),
            ("p0", u.p0.1.to_string()),
            ("p1_component", u.p1.0.to_string()),
            ("p1", u.p1.1.to_string()),
            ("flip_p0", u.flip.0.to_string()),
            ("flip_p1", u.flip.1.to_string()),
            ("orientable", u.orientable.map_or("any".into(), |b| b.to_string())),
            ("layers", u.layers.to_string()),
            ("seam_edges", u.seam_edges.to_string()),
            ("grading", u.grading.to_string()),
            ("refine", u.refine.to_string()),
            ("corners", u.corners.word().to_string()),
        ]);
        let sections = [
            (
                "run",
                vec![
                    ("kind", self.kind.word().to_string()),
                    ("seed", self.seed.to_string()),
                    ("eigenfunctions", self.eigenfunctions.to_string()),
                ],
            ),
            ("geometry", geometry),
            ("glue", glue),
            (
                "solver",
                vec![
                    ("count", self.solver.count.to_string()),
                    ("mass", self.solver.mass.word().to_string()),
                    ("route", self.solver.route.word().to_string()),
                    ("cluster_tol", self.solver.cluster_tol.to_string()),
                ],
            ),
            ("reduce", vec![("xi", self.reduce.xi.to_string()), ("intervals", self.reduce.intervals.to_string())]),
            (
                "optimize",
                vec![
                    ("max_iter", o.max_iter.to_string()),
                    ("parametrization", o.parametrization.word().to_string()),
                    ("modes", o.modes.to_string()),
                    ("amplitude", o.amplitude.to_string()),
                    ("cluster_tol", o.cluster_tol.to_string()),
                    ("mobius_slice", o.mobius_slice.to_string()),
                ],
            ),
            (
                "grid",
                vec![
                    ("eps", list(&gr.eps)),
                    ("alpha", list(&gr.alpha)),
                    ("t", list(&gr.t)),
                    ("t_scale", gr.t_scale.word().to_string()),
                    ("xi", list(&gr.xi)),
                    ("seeds", gr.seeds.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
                ],
            ),
            (
                "sweep",
                vec![
                    ("experiment", self.sweep.experiment.word().to_string()),
                    ("slack", self.sweep.slack.to_string()),
                    ("layers", self.sweep.layers.to_string()),
                ],
            ),
        ];
        let mut s = String::new();
        for (k, (name, keys)) in sections.iter().enumerate() {
            if k > 0 {
                s.push('\n');
            }
            let _ = writeln!(s, "[{name}]");
            for (key, v) in keys {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        s
    }

    /// SHA-256 of the canonical text, lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_ini().as_bytes()).iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn eps_grid(&self) -> Vec<f64> {
        or_scalar(&self.grid.eps, self.glue.eps)
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        or_scalar(&self.grid.alpha, self.glue.alpha)
    }

    pub fn t_grid(&self) -> Vec<f64> {
        or_scalar(&self.grid.t, self.glue.t)
    }

    pub fn xi_grid(&self) -> Vec<f64> {
        or_scalar(&self.grid.xi, self.reduce.xi)
    }

    pub fn seed_grid(&self) -> Vec<u64> {
        if self.grid.seeds.is_empty() {
            vec![self.seed]
        } else {
            self.grid.seeds.clone()
        }
    }
}

fn or_scalar(v: &[f64], x: f64) -> Vec<f64> {
    if v.is_empty() {
        vec![x]
    } else {
        v.to_vec()
    }
}

fn parse_float(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(ConfigError::new(key, format!("`{v}` is not finite"))),
        Err(e) => Err(ConfigError::new(key, format!("`{v}`: {e}"))),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::new(key, format!("expected true or false, got `{v}`"))),
    }
}

struct Reader<'a> {
    ini: &'a Ini,
    seen: BTreeSet<(String, String)>,
}

impl Reader<'_> {
    fn raw(&mut self, section: &str, key: &str) -> Result<Option<&str>, ConfigError> {
        let Some(props) = self.ini.section(Some(section)) else { return Ok(None) };
        let all: Vec<&str> = props.get_all(key).collect();
        if all.len() > 1 {
            return Err(ConfigError::new(format!("{section}.{key}"), "given more than once"));
        }
        self.seen.insert((section.into(), key.into()));
        Ok(all.first().map(|v| v.trim()))
    }

    fn float(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.raw(section, key)?.map_or(Ok(default), |v| parse_float(&format!("{section}.{key}"), v))
    }

    fn num<T: std::str::FromStr>(&mut self, section: &str, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key)? {
            None => Ok(default),
            Some(v) => v.parse::<T>().map_err(|e| ConfigError::new(format!("{section}.{key}"), format!("`{v}`: {e}"))),
        }
    }

    fn boolean(&mut self, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
        self.raw(section, key)?.map_or(Ok(default), |v| parse_bool(&format!("{section}.{key}"), v))
    }

    fn keyword<T: Copy>(
        &mut self,
        section: &str,
        key: &str,
        default: Option<T>,
        words: &[(&str, T)],
    ) -> Result<T, ConfigError> {
        let full = format!("{section}.{key}");
        let names = || words.iter().map(|w| w.0).collect::<Vec<_>>().join(", ");
        match (self.raw(section, key)?, default) {
            (None, Some(d)) => Ok(d),
            (None, None) => Err(ConfigError::new(full, format!("required; one of {}", names()))),
            (Some(v), _) => words
                .iter()
                .find(|w| w.0 == v)
                .map(|w| w.1)
                .ok_or_else(|| ConfigError::new(full, format!("unknown value `{v}`; expected one of {}", names()))),
        }
    }

    fn list<T>(
        &mut self,
        section: &str,
        key: &str,
        item: impl Fn(&str, &str) -> Result<T, ConfigError>,
    ) -> Result<Vec<T>, ConfigError> {
        let full = format!("{section}.{key}");
        match self.raw(section, key)? {
            None => Ok(Vec::new()),
            Some(v) => v.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| item(&full, x)).collect(),
        }
    }

    fn floats(&mut self, section: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.list(section, key, parse_float)
    }

    fn reject_unknown(&self) -> Result<(), ConfigError> {
        for (name, props) in self.ini.iter() {
            let Some(name) = name else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(ConfigError::new(k, "key outside any section"));
                }
                continue;
            };
            for (k, _) in props.iter() {
                if !self.seen.contains(&(name.to_string(), k.to_string())) {
                    return Err(ConfigError::new(format!("{name}.{k}"), "unknown key"));
                }
            }
            if props.is_empty() && !KNOWN_SECTIONS.contains(&name) {
                return Err(ConfigError::new(name, "unknown section"));
            }
        }
        Ok(())
    }
}

const KNOWN_SECTIONS: &[&str] = &["run", "geometry", "glue", "solver", "reduce", "optimize", "grid", "sweep"];

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(text, Path::new("."))
    }

    #[test]
    fn canonical_text_round_trips() {
        let c = parse("[run]\nkind = sweep\nseed = 7\n[grid]\neps = 0.2, 0.1\nalpha = 0.4\n[glue]\nr = 0.05\norientable = false\n").unwrap();
        let text = c.to_ini();
        let again = parse(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_ini(), text);
        assert_eq!(again.hash(), c.hash());
    }

    #[test]
    fn errors_name_the_offending_key() {
        assert_eq!(parse("[run]\nseed = 1\n").unwrap_err().key, "run.kind");
        assert_eq!(parse("[run]\nkind = spectrum\n[glue]\neps = abc\n").unwrap_err().key, "glue.eps");
        assert_eq!(parse("[run]\nkind = spectrum\n[glue]\nepsilon = 0.1\n").unwrap_err().key, "glue.epsilon");
        assert_eq!(parse("[run]\nkind = spectrum\n[solver]\nmass = heavy\n").unwrap_err().key, "solver.mass");
        assert_eq!(parse("[run]\nkind = sweep\n[sweep]\nexperiment = bounds\n").unwrap_err().key, "grid.eps");
        assert_eq!(parse("[run]\nkind = mesh\n[geometry]\nbase = file\npath = missing.txt\n").unwrap_err().key, "geometry.path");
        assert_eq!(parse("[run]\nkind = mesh\n[glue]\neps = 0.7\n").unwrap_err().key, "glue");
    }

    #[test]
    fn empty_grids_fall_back_to_scalars() {
        let c = parse("[run]\nkind = reduce\n[glue]\neps = 0.05\n").unwrap();
        assert_eq!(c.eps_grid(), vec![0.05]);
        assert_eq!(c.xi_grid(), vec![0.5]);
    }
}
