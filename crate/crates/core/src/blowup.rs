//! Blow-up pairs `(y, s)` on sampled disks and their verification.
//!
//! With `r(z) = |z − x|` and `F(z) = (r₀ − r(z))² |A|²(z)`, the pair is `y = argmax F`,
//! `s = C / |A|(y)`. Any vertex within `s` of `y` then has `|A|² ≤ 4C²/s²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;
use crate::multigraph::MultiGraph;
use crate::Vec3;

/// Relative tolerance for boundary vertices sitting on `∂B_{r₀}(x)`.
pub const SPHERE_TOL: f64 = 1e-9;

/// A sampled surface in a closed ball `B_{r₀}(x)` around one of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskSample {
    mesh: SurfaceMesh,
    center: usize,
    r0: f64,
}

impl DiskSample {
    /// Checks containment in the ball, boundary-on-sphere, connectedness and `V − E + F = 1`.
    pub fn new(mesh: SurfaceMesh, center: usize, r0: f64) -> Result<Self> {
        let d = Self::new_unchecked_topology(mesh, center, r0)?;
        if !d.mesh.is_connected() {
            return Err(Error::Hypothesis("disk sample is not connected".into()));
        }
        let chi = d.mesh.euler_characteristic();
        if chi != 1 {
            return Err(Error::Hypothesis(format!("disk sample has Euler characteristic {chi}, expected 1")));
        }
        Ok(d)
    }

    /// As [`DiskSample::new`] without the topology checks.
    pub fn new_unchecked_topology(mesh: SurfaceMesh, center: usize, r0: f64) -> Result<Self> {
        if center >= mesh.vertex_count() {
            return Err(Error::InvalidInput(format!("center vertex {center} out of range")));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidInput(format!("ball radius {r0} must be positive")));
        }
        let x = mesh.vertices()[center];
        let tol = SPHERE_TOL * r0;
        if let Some(v) = (0..mesh.vertex_count()).find(|v| (mesh.vertices()[*v] - x).norm() > r0 + tol) {
            return Err(Error::Hypothesis(format!("vertex {v} lies outside the ball of radius {r0}")));
        }
        if let Some(v) = mesh.boundary_vertices().into_iter().find(|v| ((mesh.vertices()[*v] - x).norm() - r0).abs() > tol) {
            return Err(Error::Hypothesis(format!("boundary vertex {v} is not on the sphere of radius {r0}")));
        }
        Ok(Self { mesh, center, r0 })
    }

    /// Clip `mesh` to `B_{r₀}(p)` and centre the sample at the vertex nearest `p`.
    /// The ball is then taken about that vertex, which may shift it slightly from `p`.
    pub fn from_mesh_ball(mesh: &SurfaceMesh, p: Vec3, r0: f64) -> Result<Self> {
        let v = mesh.nearest_vertex(p).ok_or_else(|| Error::InvalidInput("empty mesh".into()))?;
        let x = mesh.vertices()[v];
        let clipped = mesh.clip_ball(x, r0)?;
        let center = clipped.nearest_vertex(x).ok_or_else(|| Error::InvalidInput("empty clip".into()))?;
        let comps = clipped.components();
        let comp = comps.iter().find(|c| c.binary_search(&center).is_ok()).cloned().unwrap_or_default();
        let mut keep = vec![false; clipped.vertex_count()];
        for k in comp {
            keep[k] = true;
        }
        let (sub, origin) = clipped.submesh(&keep)?;
        let center = origin.iter().position(|o| *o == center).ok_or_else(|| Error::InvalidInput("center dropped".into()))?;
        Self::new(sub, center, r0)
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }
    pub fn center(&self) -> usize {
        self.center
    }
    pub fn center_position(&self) -> Vec3 {
        self.mesh.vertices()[self.center]
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// `r(z)` for every vertex.
    pub fn radii(&self) -> Vec<f64> {
        let x = self.center_position();
        self.mesh.vertices().iter().map(|p| (p - x).norm()).collect()
    }

    /// `F(z) = (r₀ − r(z))² |A|²(z)`, clamped at `r(z) ≤ r₀`.
    pub fn f_values(&self) -> Vec<f64> {
        self.radii().iter().zip(self.mesh.a2()).map(|(r, a)| (self.r0 - r).max(0.0).powi(2) * a).collect()
    }

    /// Homothety about the origin by `k`.
    pub fn rescale(&self, k: f64) -> Result<Self> {
        Ok(Self { mesh: self.mesh.rescale(k)?, center: self.center, r0: self.r0 * k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BallMode {
    Extrinsic,
    /// Shortest paths along mesh edges, which overestimate geodesic distance.
    Intrinsic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUpPair {
    pub y: usize,
    pub s: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub ball_mode: BallMode,
    pub ball_multiple: f64,
}

impl BlowUpPair {
    pub fn with_ball(mut self, mode: BallMode, multiple: f64) -> Self {
        self.ball_mode = mode;
        self.ball_multiple = multiple;
        self
    }
}

/// Dimensionless margins; every one is non-negative on success.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// `1 − s² sup|A|² / (4C²)` over the ball of radius `m·s` about `y`.
    pub sup_bound: f64,
    /// `1 − 2s / (r₀ − r(y))`; extrinsic mode only.
    pub half_distance: Option<f64>,
    /// `F(x) / (4C²) − 1`.
    #[serde(rename = "center_F")]
    pub center_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub y_index: usize,
    pub y_position: [f64; 3],
    pub s: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub mode: BallMode,
    pub multiple: f64,
    pub margins: Margins,
    pub f_center: f64,
    pub f_max: f64,
    pub f_min: f64,
    /// Largest `F` over boundary vertices relative to `F(x)`.
    pub boundary_f_ratio: f64,
    /// `|A|(y) s / C − 1`
    pub scale_identity_error: f64,
    pub ball_vertices: usize,
    pub warnings: Vec<String>,
}

impl PairReport {
    pub fn passed(&self) -> bool {
        self.margins.sup_bound >= 0.0 && self.margins.half_distance.is_none_or(|m| m >= 0.0) && self.margins.center_f >= 0.0
    }
}

/// Extrinsic pair with ball multiple 1.
pub fn find_blowup_pair(disk: &DiskSample, c: f64) -> Result<(BlowUpPair, PairReport)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    let a2x = disk.mesh.a2()[disk.center];
    let needed = 4.0 * c * c / (disk.r0 * disk.r0);
    if a2x < needed {
        return Err(Error::CurvatureTooSmall { ratio: a2x / needed });
    }
    let f = disk.f_values();
    let mut y = 0;
    for (k, v) in f.iter().enumerate() {
        if *v > f[y] {
            y = k;
        }
    }
    let s = c / disk.mesh.a2()[y].sqrt();
    let pair = BlowUpPair { y, s, c, ball_mode: BallMode::Extrinsic, ball_multiple: 1.0 };
    let report = verify_pair(disk, &pair)?;
    Ok((pair, report))
}

pub fn verify_pair(disk: &DiskSample, pair: &BlowUpPair) -> Result<PairReport> {
    let mesh = &disk.mesh;
    if pair.y >= mesh.vertex_count() {
        return Err(Error::InvalidInput(format!("pair vertex {} out of range", pair.y)));
    }
    if !(pair.s > 0.0 && pair.ball_multiple > 0.0) {
        return Err(Error::InvalidInput("pair radius and ball multiple must be positive".into()));
    }
    let radius = pair.ball_multiple * pair.s;
    let yp = mesh.vertices()[pair.y];
    let mut warnings = Vec::new();
    let ball: Vec<usize> = match pair.ball_mode {
        BallMode::Extrinsic => (0..mesh.vertex_count()).filter(|v| (mesh.vertices()[*v] - yp).norm() <= radius).collect(),
        BallMode::Intrinsic => {
            let d = mesh.edge_distances(pair.y, radius);
            if let Some(v) = mesh.boundary_vertices().into_iter().find(|v| d[*v] <= radius) {
                return Err(Error::BallEscape { vertex: v, radius });
            }
            warnings.push("intrinsic ball uses edge-graph distances, which overestimate geodesic distance".into());
            (0..mesh.vertex_count()).filter(|v| d[*v] <= radius).collect()
        }
    };
    let sup = ball.iter().map(|v| mesh.a2()[*v]).fold(0.0, f64::max);
    let c2 = pair.c * pair.c;
    let sup_bound = 1.0 - pair.s * pair.s * sup / (4.0 * c2);
    let radii = disk.radii();
    let half_distance = match pair.ball_mode {
        BallMode::Extrinsic => Some(1.0 - 2.0 * pair.s / (disk.r0 - radii[pair.y])),
        BallMode::Intrinsic => None,
    };
    let f = disk.f_values();
    let f_center = f[disk.center];
    let center_f = f_center / (4.0 * c2) - 1.0;
    let f_max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let f_min = f.iter().copied().fold(f64::INFINITY, f64::min);
    let boundary_f = mesh.boundary_vertices().iter().map(|v| f[*v]).fold(0.0, f64::max);
    let boundary_f_ratio = if f_center > 0.0 { boundary_f / f_center } else { boundary_f };
    if sup_bound < 0.0 {
        warnings.push(format!("sup bound violated at mesh scale (margin {sup_bound:e})"));
    }
    if half_distance.is_some_and(|m| m < 0.0) {
        warnings.push(format!("half-distance bound violated at mesh scale (margin {:e})", half_distance.unwrap_or(0.0)));
    }
    Ok(PairReport {
        y_index: pair.y,
        y_position: [yp.x, yp.y, yp.z],
        s: pair.s,
        c: pair.c,
        mode: pair.ball_mode,
        multiple: pair.ball_multiple,
        margins: Margins { sup_bound, half_distance, center_f },
        f_center,
        f_max,
        f_min,
        boundary_f_ratio,
        scale_identity_error: mesh.a2()[pair.y].sqrt() * pair.s / pair.c - 1.0,
        ball_vertices: ball.len(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRatio {
    pub s: f64,
    /// `min_θ |w(s, θ)| / s`
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub window: Option<(f64, f64)>,
    pub within_window: Option<bool>,
}

/// Ratio of the initial separation of `g` at its inner radius `s` to `s`.
pub fn initial_separation_check(
    disk: &DiskSample,
    pair: &BlowUpPair,
    g: &MultiGraph,
    window: Option<(f64, f64)>,
) -> Result<SeparationRatio> {
    if pair.y >= disk.mesh.vertex_count() {
        return Err(Error::InvalidInput(format!("pair vertex {} out of range", pair.y)));
    }
    if (g.r_in() - pair.s).abs() > 1e-9 * pair.s {
        return Err(Error::RadiusMismatch { inner: g.r_in(), scale: pair.s });
    }
    let prof = crate::multigraph::separation(g)?;
    let row: Vec<f64> = (0..prof.theta.len()).map(|j| prof.at(0, j).abs() / pair.s).collect();
    let min_ratio = row.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = row.iter().copied().fold(0.0, f64::max);
    let within_window = window.map(|(lo, hi)| min_ratio >= lo && max_ratio <= hi);
    Ok(SeparationRatio { s: pair.s, min_ratio, max_ratio, window, within_window })
}
