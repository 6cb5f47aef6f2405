//! Checks of the limit picture on sequences of sampled minimal disks: the curvature
//! blow-up set, the cone property and Lipschitz parameterization of that set, the
//! two-sheet decomposition away from it, convergence to a foliation by planes, and the
//! one-sided curvature estimate.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::blowup::{DiskSample, SPHERE_TOL};
use crate::error::{Error, Result};
use crate::mesh::{PlanarLocator, PointGrid, SurfaceMesh};
use crate::par;
use crate::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceEntry {
    /// Position `j` in the paper-style indexing of the family.
    pub index: usize,
    pub mesh: SurfaceMesh,
    pub scale: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSequence {
    entries: Vec<SequenceEntry>,
}

impl SurfaceSequence {
    /// Scales must be positive and radii strictly increasing.
    pub fn new(entries: Vec<SequenceEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| !(e.scale > 0.0 && e.radius > 0.0)) {
            return Err(Error::InvalidInput(format!("entry {} has non-positive scale or radius", e.index)));
        }
        if entries.windows(2).any(|w| w[1].radius <= w[0].radius) {
            return Err(Error::InvalidInput("enclosing radii must increase along the sequence".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[SequenceEntry] {
        &self.entries
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Twice the shortest mesh edge over the sequence.
    pub fn default_slack(&self) -> f64 {
        2.0 * self.entries.iter().map(|e| e.mesh.min_edge_length()).fold(f64::INFINITY, f64::min)
    }
}

/// Cubic probe lattice `center + step · (i, j, k)` with `|step · i| ≤ half_width`.
pub fn probe_lattice(center: Vec3, half_width: f64, step: f64) -> Vec<Vec3> {
    let n = (half_width / step + 1e-9).floor() as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                out.push(center + Vec3::new(i as f64, j as f64, k as f64) * step);
            }
        }
    }
    out
}

/// `T_j = base^j` for each entry index `j`.
pub fn threshold_schedule(seq: &SurfaceSequence, base: f64) -> Vec<f64> {
    seq.entries.iter().map(|e| base.powi(e.index as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSet {
    pub points: Vec<[f64; 3]>,
    /// Per retained point, `sup |A|²` over `B_r(p) ∩ Σ_j` for every sequence entry.
    pub witnesses: Vec<Vec<f64>>,
    pub radius: f64,
    pub thresholds: Vec<f64>,
    pub burn_in: usize,
    /// Whether the global curvature maximum exceeds `T_j` at every entry past burn-in.
    pub curvature_unbounded: bool,
}

impl SingularSet {
    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()
    }
}

/// Probe points `p` whose ball `B_r(p)` carries `sup |A|² ≥ T_j` on every entry from
/// `burn_in` on.
pub fn blowup_set(
    seq: &SurfaceSequence,
    probes: &[Vec3],
    radius: f64,
    thresholds: &[f64],
    burn_in: usize,
) -> Result<SingularSet> {
    if seq.is_empty() {
        return Err(Error::InvalidInput("empty surface sequence".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput(format!("probe radius {radius} must be positive")));
    }
    if thresholds.len() != seq.len() {
        return Err(Error::InvalidInput(format!("{} thresholds for {} surfaces", thresholds.len(), seq.len())));
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("thresholds must be strictly increasing".into()));
    }
    if burn_in >= seq.len() {
        return Err(Error::InvalidInput(format!("burn-in {burn_in} leaves no surfaces")));
    }
    let sups: Vec<Vec<f64>> = seq
        .entries
        .iter()
        .map(|e| {
            let grid = PointGrid::new(e.mesh.vertices(), radius);
            par::map_indexed(probes.len(), |k| {
                grid.within(e.mesh.vertices(), probes[k], radius).iter().map(|v| e.mesh.a2()[*v]).fold(0.0, f64::max)
            })
        })
        .collect();
    let mut points = Vec::new();
    let mut witnesses = Vec::new();
    for (k, p) in probes.iter().enumerate() {
        if (burn_in..seq.len()).all(|j| sups[j][k] >= thresholds[j]) {
            points.push([p.x, p.y, p.z]);
            witnesses.push((0..seq.len()).map(|j| sups[j][k]).collect());
        }
    }
    let curvature_unbounded =
        (burn_in..seq.len()).all(|j| seq.entries[j].mesh.a2().iter().copied().fold(0.0, f64::max) >= thresholds[j]);
    Ok(SingularSet { points, witnesses, radius, thresholds: thresholds.to_vec(), burn_in, curvature_unbounded })
}

/// `(p₃ − x₃)² − δ²((p₁ − x₁)² + (p₂ − x₂)²)`; non-negative inside the cone with vertex `x`.
pub fn cone_membership(p: Vec3, x: Vec3, delta: f64) -> f64 {
    let d = p - x;
    d.z * d.z - delta * delta * (d.x * d.x + d.y * d.y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeViolation {
    pub vertex: usize,
    pub point: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelWitness {
    pub level: f64,
    /// Closest level of `S` in `(t, t + ε]`.
    pub above: Option<f64>,
    /// Closest level of `S` in `[t − ε, t)`.
    pub below: Option<f64>,
    pub exempt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub delta: f64,
    pub epsilon: f64,
    pub slack: f64,
    pub min_margin: f64,
    pub violations: Vec<ConeViolation>,
    pub containment_ok: bool,
    pub levels: Vec<LevelWitness>,
    pub accumulation_ok: bool,
    /// Largest horizontal-to-vertical displacement ratio over pairs.
    pub lipschitz: f64,
    pub lipschitz_ok: bool,
    pub passed: bool,
}

/// Conditions (i) and (ii) of the cone property on a finite sample, with condition (i)
/// relaxed by `slack²`. Levels default to the distinct heights of `S`.
pub fn cone_property_check(s: &[Vec3], delta: f64, epsilon: f64, levels: Option<&[f64]>, slack: f64) -> Result<ConeReport> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty singular set".into()));
    }
    if !(delta > 0.0 && epsilon > 0.0 && slack >= 0.0) {
        return Err(Error::InvalidInput("delta and epsilon must be positive, slack non-negative".into()));
    }
    let mut violations = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut lipschitz = 0.0f64;
    for (i, z) in s.iter().enumerate() {
        for (k, p) in s.iter().enumerate() {
            if i == k {
                continue;
            }
            let m = cone_membership(*p, *z, delta);
            min_margin = min_margin.min(m);
            if m < -slack * slack {
                violations.push(ConeViolation { vertex: i, point: k, margin: m });
            }
            let d = p - z;
            let horiz = d.x.hypot(d.y);
            if horiz > 0.0 {
                lipschitz = lipschitz.max(horiz / d.z.abs());
            }
        }
    }
    if s.len() == 1 {
        min_margin = 0.0;
    }
    let mut heights: Vec<f64> = s.iter().map(|p| p.z).collect();
    heights.sort_by(f64::total_cmp);
    heights.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    let sample: Vec<f64> = levels.map(<[f64]>::to_vec).unwrap_or_else(|| heights.clone());
    let (lo, hi) = (heights[0], heights[heights.len() - 1]);
    let reach = epsilon * (1.0 + 1e-9) + 1e-12;
    let level_report: Vec<LevelWitness> = sample
        .iter()
        .map(|&t| {
            let above = heights.iter().copied().filter(|h| *h > t + 1e-12 && *h - t <= reach).reduce(f64::min);
            let below = heights.iter().copied().filter(|h| *h < t - 1e-12 && t - *h <= reach).reduce(f64::max);
            let exempt = (t - lo).abs() <= 1e-12 || (t - hi).abs() <= 1e-12;
            LevelWitness { level: t, above, below, exempt }
        })
        .collect();
    let accumulation_ok = level_report.iter().all(|l| l.exempt || (l.above.is_some() && l.below.is_some()));
    let containment_ok = violations.is_empty();
    let lipschitz_ok = lipschitz <= 1.0 / delta + slack;
    Ok(ConeReport {
        delta,
        epsilon,
        slack,
        min_margin,
        violations,
        containment_ok,
        levels: level_report,
        accumulation_ok,
        lipschitz,
        lipschitz_ok,
        passed: containment_ok && accumulation_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub point: [f64; 3],
    pub cluster_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCurve {
    pub points: Vec<CurvePoint>,
    /// Largest horizontal displacement per unit height between consecutive levels.
    pub lipschitz: f64,
    pub lipschitz_ok: bool,
    /// Largest horizontal distance of a curve point from the `x₃`-axis.
    pub max_axis_deviation: f64,
}

impl LipschitzCurve {
    pub fn positions(&self) -> Vec<Vec3> {
        self.points.iter().map(|c| Vec3::new(c.point[0], c.point[1], c.point[2])).collect()
    }

    /// Horizontal position at height `t`, linearly interpolated and clamped at the ends.
    pub fn at(&self, t: f64) -> Option<Vec3> {
        let pts = self.positions();
        let first = *pts.first()?;
        let last = *pts.last()?;
        if t <= first.z {
            return Some(Vec3::new(first.x, first.y, t));
        }
        if t >= last.z {
            return Some(Vec3::new(last.x, last.y, t));
        }
        let k = pts.windows(2).position(|w| w[0].z <= t && t <= w[1].z)?;
        let (a, b) = (pts[k], pts[k + 1]);
        let l = (t - a.z) / (b.z - a.z);
        let p = a + (b - a) * l;
        Some(Vec3::new(p.x, p.y, t))
    }
}

/// Group `S` by height (levels closer than `slack` merge) and return one point per level.
pub fn lipschitz_parameterize(s: &[Vec3], delta: f64, slack: f64) -> Result<LipschitzCurve> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty singular set".into()));
    }
    let mut pts = s.to_vec();
    pts.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.x.total_cmp(&b.x)).then(a.y.total_cmp(&b.y)));
    let max_diameter = 2.0 * slack / delta;
    let mut points = Vec::new();
    let mut start = 0;
    while start < pts.len() {
        let mut end = start + 1;
        while end < pts.len() && pts[end].z - pts[start].z <= slack.max(1e-12) {
            end += 1;
        }
        let cluster = &pts[start..end];
        let diameter = cluster.iter().flat_map(|a| cluster.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
        let center = cluster.iter().fold(Vec3::zeros(), |acc, p| acc + p) / cluster.len() as f64;
        if diameter > max_diameter * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::NonGraph { level: center.z });
        }
        points.push(CurvePoint { t: center.z, point: [center.x, center.y, center.z], cluster_size: cluster.len() });
        start = end;
    }
    let mut lipschitz = 0.0f64;
    for w in points.windows(2) {
        let (a, b) = (w[0].point, w[1].point);
        let horiz = (b[0] - a[0]).hypot(b[1] - a[1]);
        lipschitz = lipschitz.max(horiz / (b[2] - a[2]));
    }
    let max_axis_deviation = points.iter().map(|c| c.point[0].hypot(c.point[1])).fold(0.0, f64::max);
    Ok(LipschitzCurve { lipschitz_ok: lipschitz <= 1.0 / delta + slack, points, lipschitz, max_axis_deviation })
}

/// Result of projecting a mesh piece to the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionCheck {
    /// All non-degenerate projected triangles share one orientation.
    pub orientation_consistent: bool,
    pub degenerate_triangles: usize,
    /// No vertex lies strictly inside a projected triangle it does not belong to.
    pub injective: bool,
}

impl ProjectionCheck {
    pub fn is_graph(&self) -> bool {
        self.orientation_consistent && self.injective
    }
}

fn projection_check(loc: &PlanarLocator, triangles: usize) -> ProjectionCheck {
    let coords = loc.coords();
    let scale = {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in coords {
            for k in 0..2 {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        ((hi[0] - lo[0]) * (hi[1] - lo[1])).abs().max(f64::MIN_POSITIVE)
    };
    let (mut pos, mut neg, mut degenerate) = (0usize, 0usize, 0usize);
    for t in 0..triangles {
        let a = loc.signed_area(t);
        if a.abs() <= 1e-14 * scale {
            degenerate += 1;
        } else if a > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    let overlaps = par::sum_indexed(coords.len(), |v| {
        let hits = loc.locate(coords[v], -1e-9);
        if hits.iter().any(|(t, _)| !loc.triangle(*t).contains(&v)) {
            1.0
        } else {
            0.0
        }
    });
    ProjectionCheck { orientation_consistent: pos.min(neg) == 0, degenerate_triangles: degenerate, injective: overlaps == 0.0 }
}

/// Vertical projection check of a whole mesh.
pub fn horizontal_projection_check(mesh: &SurfaceMesh) -> ProjectionCheck {
    let coords = mesh.vertices().iter().map(|p| [p.x, p.y]).collect();
    let loc = PlanarLocator::new(coords, mesh.triangles().to_vec());
    projection_check(&loc, mesh.triangle_count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub euler_characteristic: i64,
    pub components: usize,
    pub overridden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedComponent {
    pub vertices: usize,
    pub min_distance: f64,
    /// `sup |A|² · r₀²`
    pub sup_a2_r0sq: f64,
    pub curvature_ok: bool,
    pub projection: ProjectionCheck,
    pub is_graph: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneSidedReport {
    pub r0: f64,
    pub epsilon: f64,
    pub center: [f64; 3],
    pub topology: Topology,
    /// Components of `Σ ∩ B_{r₀}` that meet `B_{ε r₀}`.
    pub components: Vec<OneSidedComponent>,
    pub passed: bool,
}

/// Curvature and graph checks for the pieces of a disk in the half-space
/// `{x₃ > center₃}` with boundary on `∂B_{2r₀}(center)`. With `topology_override`
/// surfaces that are not disks are accepted and reported.
pub fn one_sided_check(
    mesh: &SurfaceMesh,
    center: Vec3,
    r0: f64,
    epsilon: f64,
    topology_override: bool,
) -> Result<OneSidedReport> {
    if !(r0 > 0.0 && epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidInput("r0 must be positive and epsilon in (0, 1]".into()));
    }
    if let Some(v) = (0..mesh.vertex_count()).find(|v| mesh.vertices()[*v].z <= center.z) {
        return Err(Error::Hypothesis(format!("vertex {v} is not in the open upper half-space")));
    }
    let outer = 2.0 * r0;
    if let Some(v) = (0..mesh.vertex_count()).find(|v| (mesh.vertices()[*v] - center).norm() > outer * (1.0 + SPHERE_TOL)) {
        return Err(Error::Hypothesis(format!("vertex {v} lies outside the ball of radius {outer}")));
    }
    if let Some(v) =
        mesh.boundary_vertices().into_iter().find(|v| ((mesh.vertices()[*v] - center).norm() - outer).abs() > SPHERE_TOL * outer)
    {
        return Err(Error::Hypothesis(format!("boundary vertex {v} is not on the sphere of radius {outer}")));
    }
    let topology = Topology {
        euler_characteristic: mesh.euler_characteristic(),
        components: mesh.components().len(),
        overridden: topology_override,
    };
    if !topology_override && (topology.components != 1 || topology.euler_characteristic != 1) {
        return Err(Error::Hypothesis(format!(
            "surface is not a disk (components {}, Euler characteristic {})",
            topology.components, topology.euler_characteristic
        )));
    }
    let inner = mesh.clip_ball(center, r0)?;
    let mut components = Vec::new();
    for comp in inner.components() {
        let min_distance = comp.iter().map(|v| (inner.vertices()[*v] - center).norm()).fold(f64::INFINITY, f64::min);
        if min_distance > epsilon * r0 {
            continue;
        }
        let mut keep = vec![false; inner.vertex_count()];
        for v in &comp {
            keep[*v] = true;
        }
        let (piece, _) = inner.submesh(&keep)?;
        let sup = piece.a2().iter().copied().fold(0.0, f64::max) * r0 * r0;
        let projection = horizontal_projection_check(&piece);
        components.push(OneSidedComponent {
            vertices: piece.vertex_count(),
            min_distance,
            sup_a2_r0sq: sup,
            curvature_ok: sup <= 1.0,
            is_graph: projection.is_graph(),
            projection,
        });
    }
    let passed = !components.is_empty() && components.iter().all(|c| c.curvature_ok && c.is_graph);
    Ok(OneSidedReport { r0, epsilon, center: [center.x, center.y, center.z], topology, components, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetSeparation {
    pub samples: usize,
    pub min_abs: f64,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// All sampled separations share one sign.
    pub ordering_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusComponent {
    pub vertices: usize,
    /// The polar angle about the curve does not unwrap consistently along edges.
    pub winds_around: bool,
    pub projection: ProjectionCheck,
    pub separation: Option<SheetSeparation>,
    pub is_multigraph: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub cone_vertex: [f64; 3],
    pub delta0: f64,
    pub exclusion: f64,
    pub components: Vec<CensusComponent>,
    pub count: usize,
}

/// Components of `Σ \ (C_{δ₀}(x) ∪ B_excl(x))` where `x` is the point of `curve` at the
/// height of the disk centre, with a multi-valued-graph check for each.
///
/// Each piece is lifted to `(log ρ, θ̃)` about the vertical line through `x`, with `θ̃`
/// unwrapped along mesh edges. A piece is a multi-valued graph when its lift is an
/// orientation-consistent injective projection and the height gap to the sheet one
/// turn above has a single sign.
pub fn two_graph_decomposition(disk: &DiskSample, curve: &LipschitzCurve, delta0: f64, exclusion: f64) -> Result<Census> {
    if !(delta0 > 0.0 && exclusion >= 0.0) {
        return Err(Error::InvalidInput("delta0 must be positive and exclusion non-negative".into()));
    }
    let mesh = disk.mesh();
    let x = curve.at(disk.center_position().z).ok_or_else(|| Error::InvalidInput("empty singular curve".into()))?;
    let keep: Vec<bool> =
        mesh.vertices().iter().map(|p| cone_membership(*p, x, delta0) < 0.0 && (p - x).norm() > exclusion).collect();
    let (rest, _) = mesh.submesh(&keep)?;
    let comps = rest.components();
    let components = comps
        .iter()
        .map(|comp| {
            let mut sel = vec![false; rest.vertex_count()];
            for v in comp {
                sel[*v] = true;
            }
            rest.submesh(&sel).map(|(piece, _)| census_component(&piece, x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Census { cone_vertex: [x.x, x.y, x.z], delta0, exclusion, count: components.len(), components })
}

fn census_component(piece: &SurfaceMesh, x: Vec3) -> CensusComponent {
    let n = piece.vertex_count();
    let polar: Vec<(f64, f64)> = piece
        .vertices()
        .iter()
        .map(|p| {
            let d = p - x;
            (d.x.hypot(d.y), d.y.atan2(d.x))
        })
        .collect();
    let wrap = |a: f64| a - 2.0 * PI * (a / (2.0 * PI)).round();
    let mut adj = vec![Vec::new(); n];
    for (a, b) in piece.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut theta = vec![f64::NAN; n];
    theta[0] = polar[0].1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if theta[w].is_nan() {
                theta[w] = theta[v] + wrap(polar[w].1 - polar[v].1);
                queue.push_back(w);
            }
        }
    }
    let winds_around = piece.edges().iter().any(|(a, b)| (theta[*b] - theta[*a] - wrap(polar[*b].1 - polar[*a].1)).abs() > 1e-6);
    let coords: Vec<[f64; 2]> = if winds_around {
        piece.vertices().iter().map(|p| [p.x - x.x, p.y - x.y]).collect()
    } else {
        (0..n).map(|v| [polar[v].0.max(f64::MIN_POSITIVE).ln(), theta[v]]).collect()
    };
    let loc = PlanarLocator::new(coords.clone(), piece.triangles().to_vec());
    let projection = projection_check(&loc, piece.triangle_count());
    let separation = if winds_around {
        None
    } else {
        let gaps: Vec<f64> = (0..n)
            .filter_map(|v| {
                let q = [coords[v][0], coords[v][1] + 2.0 * PI];
                let hits = loc.locate(q, 1e-12);
                let (t, l) = hits.first()?;
                let tri = loc.triangle(*t);
                let z = (0..3).map(|k| l[k] * piece.vertices()[tri[k]].z).sum::<f64>();
                Some(z - piece.vertices()[v].z)
            })
            .collect();
        (!gaps.is_empty()).then(|| {
            let abs: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
            SheetSeparation {
                samples: gaps.len(),
                min_abs: abs.iter().copied().fold(f64::INFINITY, f64::min),
                max_abs: abs.iter().copied().fold(0.0, f64::max),
                mean_abs: abs.iter().sum::<f64>() / abs.len() as f64,
                ordering_consistent: gaps.iter().all(|g| *g > 0.0) || gaps.iter().all(|g| *g < 0.0),
            }
        })
    };
    let is_multigraph = projection.is_graph() && separation.as_ref().is_none_or(|s| s.ordering_consistent);
    CensusComponent { vertices: n, winds_around, projection, separation, is_multigraph }
}

/// Annular test region `{ρ_min ≤ ρ ≤ ρ_max, z_min ≤ x₃ ≤ z_max}` about the `x₃`-axis,
/// required to stay out of the tube of radius `tube` around the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularBox {
    pub rho_min: f64,
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub tube: f64,
    /// Radius of the vertical reference line at `θ = 0`.
    pub reference_rho: f64,
}

impl AnnularBox {
    pub fn standard() -> Self {
        Self { rho_min: 0.5, rho_max: 1.0, z_min: -0.5, z_max: 0.5, tube: 0.25, reference_rho: 0.75 }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let rho = p.x.hypot(p.y);
        rho >= self.rho_min && rho <= self.rho_max && p.z >= self.z_min && p.z <= self.z_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoliationEntry {
    pub index: usize,
    pub scale: f64,
    pub vertices_in_region: usize,
    /// Heights where the reference line crosses the surface.
    pub reference_heights: Vec<f64>,
    /// Crossings with `|x₃| ≤ z_max` at the reference line; counts sheets through the region.
    pub sheet_count: usize,
    pub leaf_distance: f64,
    pub tilt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoliationReport {
    pub region: AnnularBox,
    pub entries: Vec<FoliationEntry>,
    pub distances_decreasing: bool,
    pub tilts_decreasing: bool,
}

/// Distance from `Σ_j ∩ K` to the horizontal leaves through the points where `Σ_j`
/// meets the vertical line `(ρ_ref, 0, ·)`, and the largest tilt of the normal from
/// vertical, for every entry.
pub fn foliation_convergence(seq: &SurfaceSequence, region: &AnnularBox) -> Result<FoliationReport> {
    if !(region.tube > 0.0 && region.rho_min > region.tube) {
        return Err(Error::InvalidRegion(format!(
            "region starts at rho = {} inside the tube of radius {}",
            region.rho_min, region.tube
        )));
    }
    if !(region.rho_max > region.rho_min && region.z_max > region.z_min) {
        return Err(Error::InvalidRegion("empty annular box".into()));
    }
    let entries = seq
        .entries
        .iter()
        .map(|e| {
            let mesh = &e.mesh;
            let heights = mesh.vertical_crossings(region.reference_rho, 0.0);
            let inside: Vec<usize> = (0..mesh.vertex_count()).filter(|v| region.contains(&mesh.vertices()[*v])).collect();
            let leaf_distance = inside
                .iter()
                .map(|v| {
                    let z = mesh.vertices()[*v].z;
                    heights.iter().map(|h| (z - h).abs()).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            let tilt = inside.iter().map(|v| mesh.normals()[*v].z.abs().min(1.0).acos()).fold(0.0, f64::max);
            FoliationEntry {
                index: e.index,
                scale: e.scale,
                vertices_in_region: inside.len(),
                sheet_count: heights.iter().filter(|h| **h >= region.z_min && **h <= region.z_max).count(),
                reference_heights: heights,
                leaf_distance,
                tilt,
            }
        })
        .collect::<Vec<_>>();
    let distances_decreasing = entries.windows(2).all(|w| w[1].leaf_distance < w[0].leaf_distance);
    let tilts_decreasing = entries.windows(2).all(|w| w[1].tilt < w[0].tilt);
    Ok(FoliationReport { region: *region, entries, distances_decreasing, tilts_decreasing })
}
