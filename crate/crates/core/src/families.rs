//! Desk-scale sequences of rescaled canonical surfaces.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;
use crate::structure::{SequenceEntry, SurfaceSequence};
use crate::surface::{make_catenoid, make_graph_fn, make_helicoid, rescale, DerivMode};
use crate::Vec3;

/// Sampling controls shared by the family builders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    /// Target spacing in space along the rulings, `a · ds`.
    pub spacing: f64,
    /// Largest parameter step around the axis.
    pub max_dt: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { spacing: 0.01, max_dt: 0.1 }
    }
}

fn even_cells(len: f64, step: f64) -> usize {
    let n = (len / step).ceil() as usize;
    (n + n % 2).max(2)
}

/// The helicoid `a · (s cos t, s sin t, t)` clipped to `B_r(0)`. The parameter grid
/// contains `s = 0` and `t = 0`.
pub fn helicoid_in_ball(a: f64, r: f64, sampling: Sampling) -> Result<SurfaceMesh> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidScale(a));
    }
    let h = 1.01 * r / a;
    let ds = sampling.spacing / a;
    let dt = sampling.max_dt.min(sampling.spacing / a);
    let patch = make_helicoid((-h, h), (-h, h), even_cells(2.0 * h, ds), even_cells(2.0 * h, dt), DerivMode::Analytic)?;
    SurfaceMesh::from_patch(&rescale(&patch, a)?, false)?.clip_ball(Vec3::zeros(), r)
}

/// The catenoid `a · (cosh s cos t, cosh s sin t, s)` shifted by `offset` and clipped to
/// `B_r(0)`.
pub fn catenoid_in_ball(a: f64, r: f64, offset: Vec3, sampling: Sampling) -> Result<SurfaceMesh> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidScale(a));
    }
    let h = ((r + offset.norm()) / a).max(1.0).acosh() * 1.01 + 0.1;
    let ns = even_cells(2.0 * h, (sampling.spacing / a).min(0.05));
    let nt = even_cells(2.0 * PI, sampling.max_dt.min(0.05));
    let patch = make_catenoid((-h, h), (0.0, 2.0 * PI), ns, nt, DerivMode::Analytic)?;
    SurfaceMesh::from_patch(&rescale(&patch, a)?, true)?.translate(offset).clip_ball(Vec3::zeros(), r)
}

/// The plane `{x₃ = height}` clipped to `B_r(0)`.
pub fn plane_in_ball(height: f64, r: f64, cells: usize) -> Result<SurfaceMesh> {
    let h = 1.01 * r;
    let patch = make_graph_fn((-h, h), (-h, h), cells, cells, |_, _| height)?;
    SurfaceMesh::from_patch(&patch, false)?.clip_ball(Vec3::zeros(), r)
}

/// Scales `a_j = 2^{-j}` and radii `R_j = 1.5 + 0.01 j` for `j = 1..=count`.
pub fn standard_schedule(count: usize) -> Vec<(usize, f64, f64)> {
    (1..=count).map(|j| (j, 2f64.powi(-(j as i32)), 1.5 + 0.01 * j as f64)).collect()
}

pub fn rescaled_helicoids(count: usize, sampling: Sampling) -> Result<SurfaceSequence> {
    let entries = crate::par::map_indexed(count, |k| {
        let (j, a, r) = standard_schedule(count)[k];
        helicoid_in_ball(a, r, sampling).map(|mesh| SequenceEntry { index: j, mesh, scale: a, radius: r })
    });
    SurfaceSequence::new(entries.into_iter().collect::<Result<Vec<_>>>()?)
}

pub fn rescaled_catenoids(count: usize, sampling: Sampling) -> Result<SurfaceSequence> {
    let entries = crate::par::map_indexed(count, |k| {
        let (j, a, r) = standard_schedule(count)[k];
        catenoid_in_ball(a, r, Vec3::zeros(), sampling).map(|mesh| SequenceEntry { index: j, mesh, scale: a, radius: r })
    });
    SurfaceSequence::new(entries.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Copies of the plane `{x₃ = 0}` with the same radii as the other families.
pub fn planes(count: usize, cells: usize) -> Result<SurfaceSequence> {
    let entries = standard_schedule(count)
        .into_iter()
        .map(|(j, _, r)| plane_in_ball(0.0, r, cells).map(|mesh| SequenceEntry { index: j, mesh, scale: 1.0, radius: r }))
        .collect::<Result<Vec<_>>>()?;
    SurfaceSequence::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helicoid_axis_sample_has_exact_curvature() {
        let a = 0.125;
        let m = helicoid_in_ball(a, 1.0, Sampling::default()).unwrap();
        let v = m.nearest_vertex(Vec3::zeros()).unwrap();
        assert_eq!(m.vertices()[v].norm(), 0.0);
        assert!((m.a2()[v] - 2.0 / (a * a)).abs() < 1e-9);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn catenoid_in_ball_is_an_annulus() {
        let m = catenoid_in_ball(0.1, 1.0, Vec3::zeros(), Sampling { spacing: 0.02, max_dt: 0.1 }).unwrap();
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.boundary_vertices().iter().all(|v| (m.vertices()[*v].norm() - 1.0).abs() < 1e-12));
    }
}
