//! N-valued graphs over the universal cover of the punctured plane.
//!
//! A [`MultiGraph`] stores a height `u(ρ, θ)` on `[r_in, r_out] × [θc − Nπ, θc + Nπ]`
//! with `ρ` sampled log-uniformly. The θ-spacing divides `2π`, so the separation
//! `w(ρ, θ) = u(ρ, θ + 2π) − u(ρ, θ)` is a difference of stored nodes.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::surface::ParamPatch;
use crate::Vec3;

/// Upper bound on the sheet count.
pub const MAX_SHEETS: usize = 64;
/// Absolute exponent margin used by the sublinear envelope check.
pub const ENVELOPE_MARGIN: f64 = 0.05;
/// Largest relative deviation still classified as logarithmic decay.
pub const LOG_FIT_TOLERANCE: f64 = 0.1;
/// Minimum number of distinct ρ samples for a growth fit.
pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiGraph {
    r_in: f64,
    r_out: f64,
    sheets: usize,
    n_rho: usize,
    n_theta: usize,
    theta_center: f64,
    u: Vec<f64>,
}

impl MultiGraph {
    /// Heights `u[i * (n_theta + 1) + j]` at `(ρ_i, θ_j)`.
    pub fn new(r_in: f64, r_out: f64, sheets: usize, n_rho: usize, n_theta: usize, u: Vec<f64>) -> Result<Self> {
        Self::validate(r_in, r_out, sheets, n_rho, n_theta)?;
        let expected = (n_rho + 1) * (n_theta + 1);
        if u.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: u.len() });
        }
        Ok(Self { r_in, r_out, sheets, n_rho, n_theta, theta_center: 0.0, u })
    }

    pub fn from_fn(
        r_in: f64,
        r_out: f64,
        sheets: usize,
        n_rho: usize,
        n_theta: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        Self::from_fn_centered(r_in, r_out, sheets, n_rho, n_theta, 0.0, f)
    }

    /// As [`MultiGraph::from_fn`] on the window `[c − Nπ, c + Nπ]`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn_centered(
        r_in: f64,
        r_out: f64,
        sheets: usize,
        n_rho: usize,
        n_theta: usize,
        theta_center: f64,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        Self::validate(r_in, r_out, sheets, n_rho, n_theta)?;
        let mut g = Self { r_in, r_out, sheets, n_rho, n_theta, theta_center, u: Vec::new() };
        g.u = (0..g.node_count())
            .map(|p| {
                let (i, j) = g.node(p);
                f(g.rho(i), g.theta(j))
            })
            .collect();
        Ok(g)
    }

    pub(crate) fn validate(r_in: f64, r_out: f64, sheets: usize, n_rho: usize, n_theta: usize) -> Result<()> {
        if !(r_in > 0.0 && r_in.is_finite() && r_out.is_finite() && r_out > r_in) {
            return Err(Error::InvalidDomain(format!("radii must satisfy 0 < r_in < r_out, got [{r_in}, {r_out}]")));
        }
        if sheets == 0 || sheets > MAX_SHEETS {
            return Err(Error::InvalidDomain(format!("sheet count {sheets} outside 1..={MAX_SHEETS}")));
        }
        if n_rho < 2 {
            return Err(Error::InvalidDomain(format!("n_rho = {n_rho} needs at least 2 cells")));
        }
        if !n_theta.is_multiple_of(sheets) || n_theta / sheets < 2 {
            return Err(Error::InvalidDomain(format!(
                "n_theta = {n_theta} must be a multiple of the sheet count {sheets} with at least 2 cells per turn"
            )));
        }
        Ok(())
    }

    /// Rotate the θ-window to `[c − Nπ, c + Nπ]`; heights are unchanged.
    pub fn with_theta_center(mut self, c: f64) -> Self {
        self.theta_center = c;
        self
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }
    pub fn r_out(&self) -> f64 {
        self.r_out
    }
    pub fn sheets(&self) -> usize {
        self.sheets
    }
    pub fn n_rho(&self) -> usize {
        self.n_rho
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn theta_center(&self) -> f64 {
        self.theta_center
    }
    pub fn values(&self) -> &[f64] {
        &self.u
    }
    pub fn node_count(&self) -> usize {
        (self.n_rho + 1) * (self.n_theta + 1)
    }
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.n_theta + 1) + j
    }
    pub fn node(&self, p: usize) -> (usize, usize) {
        (p / (self.n_theta + 1), p % (self.n_theta + 1))
    }
    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.u[self.index(i, j)]
    }

    /// Uniform spacing in `σ = log ρ`.
    pub fn d_sigma(&self) -> f64 {
        (self.r_out / self.r_in).ln() / self.n_rho as f64
    }

    pub fn d_theta(&self) -> f64 {
        2.0 * PI * self.sheets as f64 / self.n_theta as f64
    }

    /// Nodes per full turn.
    pub fn period_nodes(&self) -> usize {
        self.n_theta / self.sheets
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.r_in.ln() + i as f64 * self.d_sigma()
    }

    pub fn rho(&self, i: usize) -> f64 {
        match i {
            0 => self.r_in,
            i if i == self.n_rho => self.r_out,
            i => self.sigma(i).exp(),
        }
    }

    pub fn theta(&self, j: usize) -> f64 {
        let half = PI * self.sheets as f64;
        if j == self.n_theta {
            self.theta_center + half
        } else {
            self.theta_center - half + j as f64 * self.d_theta()
        }
    }

    /// Column closest to `θ = θc`.
    pub fn center_column(&self) -> usize {
        self.n_theta / 2
    }

    /// Same grid with new heights.
    pub fn with_values(&self, u: Vec<f64>) -> Result<Self> {
        if u.len() != self.node_count() {
            return Err(Error::ShapeMismatch { expected: self.node_count(), got: u.len() });
        }
        Ok(Self { u, ..self.clone() })
    }

    /// Homothety by `a > 0`: radii and heights scale, angles do not.
    pub fn rescale(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidScale(a));
        }
        Ok(Self { r_in: self.r_in * a, r_out: self.r_out * a, u: self.u.iter().map(|v| v * a).collect(), ..self.clone() })
    }
}

/// `w(ρ, θ) = u(ρ, θ + 2π) − u(ρ, θ)` on `θ ∈ [θc − Nπ, θc + Nπ − 2π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationProfile {
    pub rho: Vec<f64>,
    pub theta: Vec<f64>,
    /// Row-major `rho.len() × theta.len()`.
    pub w: Vec<f64>,
    center_column: usize,
}

impl SeparationProfile {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.theta.len() + j]
    }

    pub fn min_abs(&self) -> f64 {
        self.w.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }

    /// `+1` / `-1` when one-signed, `0` otherwise.
    pub fn sign(&self) -> i8 {
        if self.w.iter().all(|v| *v > 0.0) {
            1
        } else if self.w.iter().all(|v| *v < 0.0) {
            -1
        } else {
            0
        }
    }

    /// Column index of the `θ = θc` ray.
    pub fn center_column(&self) -> usize {
        self.center_column
    }

    /// `(ρ, |w|)` along a ray or aggregated over columns.
    pub fn radial_samples(&self, mode: RayMode) -> Vec<(f64, f64)> {
        let cols = self.theta.len();
        self.rho
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let v = match mode {
                    RayMode::Center => self.at(i, self.center_column).abs(),
                    RayMode::MaxOverTheta => (0..cols).map(|j| self.at(i, j).abs()).fold(0.0, f64::max),
                };
                (r, v)
            })
            .collect()
    }
}

pub fn separation(g: &MultiGraph) -> Result<SeparationProfile> {
    if g.sheets() < 2 {
        return Err(Error::NoOverlap(g.sheets()));
    }
    let p = g.period_nodes();
    let cols = g.n_theta() - p + 1;
    let mut w = Vec::with_capacity((g.n_rho() + 1) * cols);
    for i in 0..=g.n_rho() {
        for j in 0..cols {
            w.push(g.u(i, j + p) - g.u(i, j));
        }
    }
    // θ = θc sits at column n_theta / 2 of the graph, which lies in the profile for N >= 2
    Ok(SeparationProfile {
        rho: (0..=g.n_rho()).map(|i| g.rho(i)).collect(),
        theta: (0..cols).map(|j| g.theta(j)).collect(),
        w,
        center_column: g.center_column(),
    })
}

/// `(embedded, min |w|)`
pub fn is_embedded(g: &MultiGraph) -> Result<(bool, f64)> {
    let prof = separation(g)?;
    let m = prof.min_abs();
    Ok((m > 0.0, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Handedness {
    Left,
    Right,
}

pub fn handedness(g: &MultiGraph) -> Result<Handedness> {
    let prof = separation(g)?;
    match prof.sign() {
        1 => Ok(Handedness::Right),
        -1 => Ok(Handedness::Left),
        _ => Err(Error::UndefinedHandedness { min_abs_w: prof.min_abs() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    First,
    Second,
}

/// One of the two sheets of the helicoid minus its axis: `u = θ` or `u = θ + π`.
pub fn helicoid_sheet(which: Sheet, r_in: f64, r_out: f64, sheets: usize, n_rho: usize, n_theta: usize) -> Result<MultiGraph> {
    let offset = match which {
        Sheet::First => 0.0,
        Sheet::Second => PI,
    };
    MultiGraph::from_fn(r_in, r_out, sheets, n_rho, n_theta, |_, t| t + offset)
}

/// The harmonic ∞-valued graph `u = arctan(θ / log ρ)`, which stays in the slab `|x₃| < π/2`.
pub fn nonproper_graph(r_in: f64, r_out: f64, sheets: usize, n_rho: usize, n_theta: usize) -> Result<MultiGraph> {
    if !(r_in > 1.0) {
        return Err(Error::LogSingularity(r_in));
    }
    MultiGraph::from_fn(r_in, r_out, sheets, n_rho, n_theta, |r, t| (t / r.ln()).atan())
}

/// `(ρ cos θ, ρ sin θ, u)` as a patch over `(σ, θ) = (log ρ, θ)`.
pub fn embed_to_r3(g: &MultiGraph) -> Result<ParamPatch> {
    let positions = (0..g.node_count())
        .map(|p| {
            let (i, j) = g.node(p);
            let (r, t) = (g.rho(i), g.theta(j));
            Vec3::new(r * t.cos(), r * t.sin(), g.values()[p])
        })
        .collect();
    ParamPatch::from_positions(
        (g.r_in().ln(), g.r_out().ln()),
        (g.theta(0), g.theta(g.n_theta())),
        g.n_rho(),
        g.n_theta(),
        positions,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayMode {
    /// The `θ = θc` ray (θ = 0 for centred graphs).
    Center,
    /// Largest `|w|` over all columns at each radius.
    MaxOverTheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub rho0: f64,
    pub mode: RayMode,
    /// Optional `[ρ_lo, ρ_hi]` restriction of the samples.
    pub window: Option<(f64, f64)>,
}

impl FitOptions {
    pub fn new(rho0: f64) -> Self {
        Self { rho0, mode: RayMode::Center, window: None }
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn with_mode(mut self, mode: RayMode) -> Self {
        self.mode = mode;
        self
    }

    fn select(&self, samples: Vec<(f64, f64)>, strict: bool) -> Result<Vec<(f64, f64)>> {
        let eps = 1e-12 * self.rho0.abs();
        let chosen: Vec<(f64, f64)> = samples
            .into_iter()
            .filter(|(r, _)| if strict { *r > self.rho0 + eps } else { *r >= self.rho0 - eps })
            .filter(|(r, _)| self.window.is_none_or(|(lo, hi)| *r >= lo * (1.0 - 1e-12) && *r <= hi * (1.0 + 1e-12)))
            .collect();
        if chosen.len() < MIN_FIT_SAMPLES {
            return Err(Error::FitUndefined(format!(
                "{} radial samples beyond rho0 = {}, need {MIN_FIT_SAMPLES}",
                chosen.len(),
                self.rho0
            )));
        }
        if let Some((r, _)) = chosen.iter().find(|(_, w)| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::FitUndefined(format!("separation vanishes at rho = {r}")));
        }
        Ok(chosen)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublinearFit {
    pub rho0: f64,
    pub alpha_hat: f64,
    pub slope: f64,
    /// RMS residual of the log-log regression.
    pub residual: f64,
    /// `(ρ/ρ_ref)^{-(α̂+m)} |w_ref| ≤ |w(ρ)| ≤ (ρ/ρ_ref)^{α̂+m} |w_ref|` at every sample.
    pub envelope_holds: bool,
    pub samples: usize,
}

/// Least-squares slope of `log |w(ρ)|` against `log ρ`.
pub fn fit_sublinear_exponent(profile: &SeparationProfile, opts: &FitOptions) -> Result<SublinearFit> {
    let samples = opts.select(profile.radial_samples(opts.mode), false)?;
    let xs: Vec<f64> = samples.iter().map(|(r, _)| r.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, w)| w.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    let alpha_hat = slope.abs();
    let (r_ref, w_ref) = samples[0];
    let e = alpha_hat + ENVELOPE_MARGIN;
    let envelope_holds = samples.iter().all(|(r, w)| {
        let f = (r / r_ref).powf(e);
        let tol = 1e-12 * w_ref;
        *w <= f * w_ref + tol && *w >= w_ref / f - tol
    });
    Ok(SublinearFit { rho0: opts.rho0, alpha_hat, slope, residual, envelope_holds, samples: samples.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub rho0: f64,
    pub c_hat: f64,
    /// `max |w log(ρ/ρ₀) − ĉ| / ĉ`
    pub max_rel_deviation: f64,
    /// RMS relative deviation.
    pub residual: f64,
    pub logarithmic: bool,
    pub samples: usize,
}

/// Least-squares constant fit of `|w(ρ)| log(ρ/ρ₀)`.
pub fn fit_log_decay(profile: &SeparationProfile, opts: &FitOptions) -> Result<LogFit> {
    let samples = opts.select(profile.radial_samples(opts.mode), true)?;
    let ys: Vec<f64> = samples.iter().map(|(r, w)| w * (r / opts.rho0).ln()).collect();
    let n = ys.len() as f64;
    let c_hat = ys.iter().sum::<f64>() / n;
    let max_rel_deviation = ys.iter().fold(0.0f64, |m, y| m.max((y - c_hat).abs() / c_hat));
    let residual = (ys.iter().map(|y| ((y - c_hat) / c_hat).powi(2)).sum::<f64>() / n).sqrt();
    Ok(LogFit {
        rho0: opts.rho0,
        c_hat,
        max_rel_deviation,
        residual,
        logarithmic: max_rel_deviation <= LOG_FIT_TOLERANCE,
        samples: samples.len(),
    })
}

/// Separation profile of synthetic radial data `w(ρ)` (same value at every column);
/// convenient for exercising the fits on exact models.
pub fn radial_profile(rho: Vec<f64>, w: impl Fn(f64) -> f64) -> SeparationProfile {
    let values = rho.iter().map(|r| w(*r)).collect();
    SeparationProfile { rho, theta: vec![0.0], w: values, center_column: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sheet_values() {
        let g1 = helicoid_sheet(Sheet::First, 1.0, 5.0, 4, 4, 16).unwrap();
        let g2 = helicoid_sheet(Sheet::Second, 1.0, 5.0, 4, 4, 16).unwrap();
        let j0 = g1.center_column();
        assert_eq!(g1.theta(j0), 0.0);
        assert_eq!(g1.u(0, j0), 0.0);
        assert_eq!(g2.u(0, j0), PI);
        // θ = 4π is the last column of a 4-sheet window
        assert_eq!(g1.u(4, 16), 4.0 * PI);
        assert_eq!(g1.rho(4), 5.0);
    }

    #[test]
    fn domain_validation() {
        assert!(matches!(MultiGraph::from_fn(0.0, 1.0, 2, 4, 8, |_, _| 0.0), Err(Error::InvalidDomain(_))));
        assert!(matches!(MultiGraph::from_fn(1.0, 2.0, 3, 4, 8, |_, _| 0.0), Err(Error::InvalidDomain(_))));
        assert!(matches!(MultiGraph::from_fn(1.0, 2.0, 65, 4, 650, |_, _| 0.0), Err(Error::InvalidDomain(_))));
        assert_eq!(nonproper_graph(1.0, 3.0, 2, 4, 8), Err(Error::LogSingularity(1.0)));
    }

    #[test]
    fn single_sheet_has_no_separation() {
        let g = helicoid_sheet(Sheet::First, 1.0, 2.0, 1, 4, 8).unwrap();
        assert_eq!(separation(&g), Err(Error::NoOverlap(1)));
        assert_eq!(handedness(&g), Err(Error::NoOverlap(1)));
    }

    #[test]
    fn flat_graph_is_not_embedded() {
        let g = MultiGraph::from_fn(1.0, 2.0, 3, 4, 12, |_, _| 0.0).unwrap();
        assert_eq!(is_embedded(&g).unwrap(), (false, 0.0));
        assert!(matches!(handedness(&g), Err(Error::UndefinedHandedness { .. })));
    }

    #[test]
    fn nonproper_values() {
        let e = std::f64::consts::E;
        let g = nonproper_graph(e, 10.0, 2, 4, 8).unwrap();
        assert_eq!(g.u(0, 4), 0.0);
        let h = MultiGraph::from_fn(e, 10.0, 2, 4, 8, |r, _| (1.0 / r.ln()).atan()).unwrap();
        assert!((h.u(0, 0) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn log_fit_constant_is_not_logarithmic() {
        let rho: Vec<f64> = (0..20).map(|k| (1.0 + k as f64).exp()).collect();
        let prof = radial_profile(rho, |_| 2.0);
        let fit = fit_log_decay(&prof, &FitOptions::new(1.0)).unwrap();
        assert!(!fit.logarithmic);
        assert!(fit.max_rel_deviation > 0.5);
    }

    #[test]
    fn fits_need_enough_nonvanishing_samples() {
        let prof = radial_profile(vec![1.0, 2.0, 3.0], |_| 1.0);
        assert!(matches!(fit_sublinear_exponent(&prof, &FitOptions::new(1.0)), Err(Error::FitUndefined(_))));
        let rho: Vec<f64> = (1..=12).map(|k| k as f64).collect();
        let prof = radial_profile(rho, |r| if r > 5.0 { 0.0 } else { 1.0 });
        assert!(matches!(fit_sublinear_exponent(&prof, &FitOptions::new(1.0)), Err(Error::FitUndefined(_))));
    }
}
