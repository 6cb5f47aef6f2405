//! Run configuration: a flat JSON object whose keys can all be overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mindisk_core::multigraph::RayMode;
use mindisk_core::solver::SolverConfig;
use mindisk_core::surface::DerivMode;
use serde::{Deserialize, Serialize};

use crate::failure::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    Helicoid,
    Catenoid,
    Ruled,
    Graph,
    HelicoidSheet,
    Nonproper,
}

impl SurfaceKind {
    pub fn is_multigraph(self) -> bool {
        matches!(self, Self::HelicoidSheet | Self::Nonproper)
    }
}

/// Height functions for `--surface graph`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFn {
    /// `height`
    Plane,
    /// `height + amplitude x²`
    Parabola,
    /// `height + amplitude (x² − y²)`
    Saddle,
    /// `height + arccosh √(x² + y²)`, the upper half-catenoid
    Arccosh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Constant,
    Theta,
    Arccosh,
    /// `θ` on every edge except `θ + perturbation cos θ` on the outer circle.
    PerturbedHelicoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Blowup,
    Structure,
    OneSided,
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RescaledHelicoid,
    RescaledCatenoid,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Ray {
    Center,
    Max,
}

impl From<Ray> for RayMode {
    fn from(r: Ray) -> Self {
        match r {
            Ray::Center => RayMode::Center,
            Ray::Max => RayMode::MaxOverTheta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Deriv {
    Analytic,
    CentralDifference,
}

impl From<Deriv> for DerivMode {
    fn from(d: Deriv) -> Self {
        match d {
            Deriv::Analytic => DerivMode::Analytic,
            Deriv::CentralDifference => DerivMode::CentralDifference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Obj,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub output: PathBuf,
    pub input: Option<PathBuf>,
    /// Mesh CSV (`x,y,z,nx,ny,nz,A2`) supplying exact curvature for `input`.
    pub a2: Option<PathBuf>,
    pub problem: Option<PathBuf>,

    pub surface: SurfaceKind,
    pub s: [f64; 2],
    pub t: [f64; 2],
    /// Patch cells `[n_s, n_t]`; for multi-valued graphs `[n_rho, cells per sheet]`.
    pub grid: [usize; 2],
    pub deriv: Deriv,
    pub scale: f64,
    pub graph_fn: GraphFn,
    pub height: f64,
    pub amplitude: f64,
    /// Ruled surfaces: directrix `(0, 0, t)`, rulings `(cos kt, sin kt, 0)`.
    pub twist: f64,
    pub weld: bool,
    pub clip_center: Option<[f64; 3]>,
    pub clip_radius: Option<f64>,
    pub rin: f64,
    pub rout: f64,
    pub sheets: usize,
    pub sheet: u8,

    pub boundary: Boundary,
    pub constant: f64,
    pub perturbation: f64,
    pub solver: SolverConfig,
    pub convergence: bool,
    pub resolutions: Vec<usize>,

    pub suite: Option<Suite>,
    pub family: Family,
    pub count: usize,
    pub spacing: f64,
    pub max_dt: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub delta: f64,
    pub epsilon: Option<f64>,
    pub r0: f64,
    pub center: [f64; 3],
    pub topology_override: bool,
    pub probe_step: f64,
    pub probe_half_width: f64,
    pub probe_radius: f64,
    pub threshold_base: f64,
    pub burn_in: usize,
    pub delta0: f64,
    pub exclusion: f64,
    pub rho0: f64,
    pub ray: Ray,
    pub window: Option<[f64; 2]>,
    pub seed: u64,
    /// Probe jitter as a fraction of the probe step.
    pub jitter: f64,

    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            output: PathBuf::from("out"),
            input: None,
            a2: None,
            problem: None,
            surface: SurfaceKind::Helicoid,
            s: [-1.0, 1.0],
            t: [-std::f64::consts::PI, std::f64::consts::PI],
            grid: [64, 64],
            deriv: Deriv::Analytic,
            scale: 1.0,
            graph_fn: GraphFn::Plane,
            height: 0.0,
            amplitude: 1.0,
            twist: 1.0,
            weld: false,
            clip_center: None,
            clip_radius: None,
            rin: 1.0,
            rout: 10.0,
            sheets: 2,
            sheet: 1,
            boundary: Boundary::Theta,
            constant: 0.0,
            perturbation: 0.5,
            solver: SolverConfig::default(),
            convergence: false,
            resolutions: vec![64, 128, 256],
            suite: None,
            family: Family::RescaledHelicoid,
            count: 6,
            spacing: 0.01,
            max_dt: 0.1,
            c: 5.0,
            delta: 1.0,
            epsilon: None,
            r0: 1.0,
            center: [0.0; 3],
            topology_override: false,
            probe_step: 0.1,
            probe_half_width: 0.5,
            probe_radius: 0.05,
            threshold_base: 4.0,
            burn_in: 0,
            delta0: 1.0,
            exclusion: 0.05,
            rho0: 1.0,
            ray: Ray::Center,
            window: None,
            seed: 0,
            jitter: 0.0,
            format: None,
        }
    }
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| format!("{a:?}: {e}"))?;
    let hi = b.trim().parse::<f64>().map_err(|e| format!("{b:?}: {e}"))?;
    Ok([lo, hi])
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once('x').ok_or_else(|| format!("expected NxM, got {s:?}"))?;
    Ok([a.parse().map_err(|e| format!("{a:?}: {e}"))?, b.parse().map_err(|e| format!("{b:?}: {e}"))?])
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> =
        s.split(',').map(|c| c.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| format!("{s:?}: {e}"))?;
    v.try_into().map_err(|_| format!("expected x,y,z, got {s:?}"))
}

/// Command-line overrides; every flag maps to the config key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub a2: Option<PathBuf>,
    /// Dirichlet problem file (domain, boundary, config).
    #[arg(long)]
    pub problem: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub surface: Option<SurfaceKind>,
    /// Parameter range `lo:hi` in s (or x for graphs).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub s: Option<[f64; 2]>,
    /// Parameter range `lo:hi` in t (or y for graphs).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub t: Option<[f64; 2]>,
    /// Cells `NxM`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<[usize; 2]>,
    #[arg(long, value_enum)]
    pub deriv: Option<Deriv>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, value_enum)]
    pub graph_fn: Option<GraphFn>,
    #[arg(long, allow_hyphen_values = true)]
    pub height: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub twist: Option<f64>,
    #[arg(long)]
    pub weld: bool,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub clip_center: Option<[f64; 3]>,
    #[arg(long)]
    pub clip_radius: Option<f64>,
    #[arg(long)]
    pub rin: Option<f64>,
    #[arg(long)]
    pub rout: Option<f64>,
    #[arg(long)]
    pub sheets: Option<usize>,
    /// Helicoid sheet, 1 (`u = θ`) or 2 (`u = θ + π`).
    #[arg(long)]
    pub sheet: Option<u8>,

    #[arg(long, value_enum)]
    pub boundary: Option<Boundary>,
    #[arg(long, allow_hyphen_values = true)]
    pub constant: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub perturbation: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_newton_iters: Option<usize>,
    #[arg(long)]
    pub linear_tol: Option<f64>,
    /// Run a grid-refinement study instead of a single solve.
    #[arg(long)]
    pub convergence: bool,
    /// Doubling resolutions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub resolutions: Option<Vec<usize>>,

    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long)]
    pub max_dt: Option<f64>,
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<[f64; 3]>,
    #[arg(long)]
    pub topology_override: bool,
    #[arg(long)]
    pub probe_step: Option<f64>,
    #[arg(long)]
    pub probe_half_width: Option<f64>,
    #[arg(long)]
    pub probe_radius: Option<f64>,
    #[arg(long)]
    pub threshold_base: Option<f64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub delta0: Option<f64>,
    #[arg(long)]
    pub exclusion: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    #[arg(long, value_enum)]
    pub ray: Option<Ray>,
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<[f64; 2]>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jitter: Option<f64>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $flags.$field.clone() { $cfg.$field = v; } )*
    };
}

macro_rules! overlay_opt {
    ($cfg:ident, $flags:ident; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $flags.$field.clone() { $cfg.$field = Some(v); } )*
    };
}

impl RunConfig {
    pub fn load(command: &str, flags: &Flags) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))
                    .map_err(Usage::wrap)?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Usage::new(format!("malformed config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(c) = &cfg.command {
            if c != command {
                return Err(Usage::new(format!("config is for command {c:?}, not {command:?}")).into());
            }
        }
        cfg.command = Some(command.to_string());
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, f: &Flags) {
        overlay!(self, f; output, surface, s, t, grid, deriv, scale, graph_fn, height, amplitude, twist, rin, rout,
            sheets, sheet, boundary, constant, perturbation, resolutions, family, count, spacing, max_dt, c, delta,
            r0, center, probe_step, probe_half_width, probe_radius, threshold_base, burn_in, delta0, exclusion, rho0,
            ray, seed, jitter);
        overlay_opt!(self, f; input, a2, problem, clip_center, clip_radius, suite, epsilon, window, format);
        if let Some(v) = f.tol {
            self.solver.tol_residual = v;
        }
        if let Some(v) = f.max_newton_iters {
            self.solver.max_newton_iters = v;
        }
        if let Some(v) = f.linear_tol {
            self.solver.linear_tol = v;
        }
        self.weld |= f.weld;
        self.convergence |= f.convergence;
        self.topology_override |= f.topology_override;
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("scale", self.scale),
            ("rin", self.rin),
            ("rout", self.rout),
            ("spacing", self.spacing),
            ("max-dt", self.max_dt),
            ("C", self.c),
            ("delta", self.delta),
            ("r0", self.r0),
            ("probe-step", self.probe_step),
            ("probe-half-width", self.probe_half_width),
            ("probe-radius", self.probe_radius),
            ("threshold-base", self.threshold_base),
            ("delta0", self.delta0),
            ("exclusion", self.exclusion),
            ("rho0", self.rho0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!(Usage::new(format!("--{name} must be positive and finite, got {v}")));
            }
        }
        let finite = [("height", self.height), ("amplitude", self.amplitude), ("twist", self.twist), ("constant", self.constant)];
        for (name, v) in finite.into_iter().chain([("perturbation", self.perturbation)]) {
            if !v.is_finite() {
                bail!(Usage::new(format!("--{name} must be finite")));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                bail!(Usage::new(format!("--epsilon must be positive, got {e}")));
            }
        }
        if let Some(r) = self.clip_radius {
            if !(r > 0.0 && r.is_finite()) {
                bail!(Usage::new(format!("--clip-radius must be positive, got {r}")));
            }
        }
        if self.rout <= self.rin {
            bail!(Usage::new(format!("--rout {} must exceed --rin {}", self.rout, self.rin)));
        }
        if self.grid[0] < 2 || self.grid[1] < 2 {
            bail!(Usage::new(format!("--grid needs at least 2 cells per direction, got {:?}", self.grid)));
        }
        if !(1..=12).contains(&self.count) {
            bail!(Usage::new(format!("--count {} outside 1..=12", self.count)));
        }
        if !(0.0..0.5).contains(&self.jitter) {
            bail!(Usage::new(format!("--jitter {} outside [0, 0.5)", self.jitter)));
        }
        if !matches!(self.sheet, 1 | 2) {
            bail!(Usage::new(format!("--sheet must be 1 or 2, got {}", self.sheet)));
        }
        self.solver.validate().map_err(|e| Usage::new(e.to_string()))?;
        Ok(())
    }

    /// Refuse inputs that would be overwritten by one of `outputs`.
    pub fn check_paths(&self, outputs: &[&str]) -> Result<()> {
        let targets: Vec<PathBuf> = outputs.iter().map(|n| absolutize(&self.output.join(n))).collect();
        for p in [&self.input, &self.a2, &self.problem].into_iter().flatten() {
            let a = absolutize(p);
            if targets.contains(&a) {
                bail!(Usage::new(format!("input {} would be overwritten by an output", p.display())));
            }
        }
        if let (Some(a), Some(b)) = (&self.input, &self.a2) {
            if absolutize(a) == absolutize(b) {
                bail!(Usage::new("--input and --a2 name the same file".to_string()));
            }
        }
        Ok(())
    }
}

fn absolutize(p: &Path) -> PathBuf {
    std::fs::canonicalize(p).unwrap_or_else(|_| std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.to_path_buf()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_pair("-2.5:2.5").unwrap(), [-2.5, 2.5]);
        assert_eq!(parse_grid("128x256").unwrap(), [128, 256]);
        assert_eq!(parse_point("0,0,-1.5").unwrap(), [0.0, 0.0, -1.5]);
        assert!(parse_pair("1").is_err() && parse_grid("12").is_err() && parse_point("1,2").is_err());
    }

    #[test]
    fn list_and_pair_flags_parse() {
        #[derive(clap::Parser)]
        struct Wrap {
            #[command(flatten)]
            flags: Flags,
        }
        use clap::Parser;
        let w = Wrap::try_parse_from(["x", "--resolutions", "64,128,256", "--t", "-2.5:2.5", "--C", "3"]).unwrap();
        assert_eq!(w.flags.resolutions, Some(vec![64, 128, 256]));
        assert_eq!(w.flags.t, Some([-2.5, 2.5]));
        assert_eq!(w.flags.c, Some(3.0));
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg: RunConfig = serde_json::from_str(r#"{"surface": "catenoid", "C": 3.0, "grid": [8, 8]}"#).unwrap();
        assert_eq!(cfg.surface, SurfaceKind::Catenoid);
        let flags = Flags { c: Some(7.0), tol: Some(1e-11), ..Flags::default() };
        cfg.apply(&flags);
        assert_eq!((cfg.c, cfg.grid, cfg.solver.tol_residual), (7.0, [8, 8], 1e-11));
        assert!(serde_json::from_str::<RunConfig>(r#"{"surfac": "catenoid"}"#).is_err());
    }

    #[test]
    fn validation() {
        let cfg = RunConfig { rout: 0.5, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { jitter: 0.7, ..RunConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }
}
