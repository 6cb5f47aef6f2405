use serde::{Deserialize, Serialize};

use super::geometry::{area, degenerate_node, fundamental_forms, tangents, trapezoid_weight};
use super::patch::ParamPatch;
use crate::error::{Error, Result};
use crate::par;

/// Number of node rings next to the boundary on which a variation must vanish.
/// Matches the reach of the interior difference stencils.
pub const SUPPORT_BAND: usize = 2;

/// Compactly supported normal speed `φ` on the nodes of a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationField {
    values: Vec<f64>,
}

impl VariationField {
    /// Validate that `values` vanish on the boundary band of `patch`.
    pub fn new(patch: &ParamPatch, values: Vec<f64>) -> Result<Self> {
        if values.len() != patch.node_count() {
            return Err(Error::ShapeMismatch { expected: patch.node_count(), got: values.len() });
        }
        for (p, v) in values.iter().enumerate() {
            let (i, j) = patch.node(p);
            let near = i < SUPPORT_BAND || j < SUPPORT_BAND || i + SUPPORT_BAND > patch.n_s() || j + SUPPORT_BAND > patch.n_t();
            if near && *v != 0.0 {
                return Err(Error::UnsupportedVariation { i, j });
            }
        }
        Ok(Self { values })
    }

    /// Sample `f(s, t)` at the nodes.
    pub fn from_fn(patch: &ParamPatch, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..patch.node_count())
            .map(|p| {
                let (i, j) = patch.node(p);
                f(patch.s(i), patch.t(j))
            })
            .collect();
        Self::new(patch, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Support mask (`φ ≠ 0`).
    pub fn support_mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| *v != 0.0).collect()
    }
}

/// Both sides of the first variation formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstVariation {
    /// Central difference of `Area(Σ_{t,φ})` at `t = 0`.
    pub numeric_derivative: f64,
    /// Trapezoidal sum of `φ H dA`.
    pub integral_phi_h: f64,
}

impl FirstVariation {
    pub fn abs_gap(&self) -> f64 {
        (self.numeric_derivative - self.integral_phi_h).abs()
    }
}

/// Compare `d/dt Area(X + t φ n)` at `t = 0` with `∫ φ H`.
///
/// The perturbed patches are measured in difference mode; the integral uses the
/// patch's own derivative mode.
pub fn first_variation(patch: &ParamPatch, phi: &VariationField, step: f64) -> Result<FirstVariation> {
    if phi.values().len() != patch.node_count() {
        return Err(Error::ShapeMismatch { expected: patch.node_count(), got: phi.values().len() });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::StepTooLarge(format!("step {step} must be positive and finite")));
    }
    let geom = fundamental_forms(patch)?;
    let perturbed = |sign: f64| -> Result<f64> {
        let positions =
            par::map_indexed(patch.node_count(), |p| patch.positions()[p] + geom.normal[p] * (sign * step * phi.values()[p]));
        let moved = patch.with_positions(positions)?;
        let (xs, xt) = tangents(&moved);
        if let Some(p) = degenerate_node(&xs, &xt) {
            let (i, j) = patch.node(p);
            return Err(Error::StepTooLarge(format!("perturbed patch degenerates at node ({i}, {j})")));
        }
        Ok(area(&moved))
    };
    let plus = perturbed(1.0)?;
    let minus = perturbed(-1.0)?;
    let integral = par::sum_indexed(patch.node_count(), |p| {
        trapezoid_weight(patch, p) * phi.values()[p] * geom.mean[p] * geom.area_element(p)
    });
    Ok(FirstVariation { numeric_derivative: (plus - minus) / (2.0 * step), integral_phi_h: integral })
}

#[cfg(test)]
mod tests {
    use super::super::patch::*;
    use super::*;

    #[test]
    fn boundary_band_is_enforced() {
        let p = make_graph_fn((0.0, 1.0), (0.0, 1.0), 8, 8, |_, _| 0.0).unwrap();
        let mut v = vec![0.0; p.node_count()];
        v[p.index(1, 4)] = 1.0;
        assert_eq!(VariationField::new(&p, v), Err(Error::UnsupportedVariation { i: 1, j: 4 }));
        let mut v = vec![0.0; p.node_count()];
        v[p.index(4, 4)] = 1.0;
        assert!(VariationField::new(&p, v).is_ok());
    }

    #[test]
    fn plane_has_no_first_variation() {
        let p = make_graph_fn((0.0, 1.0), (0.0, 1.0), 16, 16, |_, _| 0.0).unwrap();
        let mut v = vec![0.0; p.node_count()];
        v[p.index(8, 8)] = 1.0;
        v[p.index(7, 9)] = 0.5;
        let phi = VariationField::new(&p, v).unwrap();
        let fv = first_variation(&p, &phi, 1e-4).unwrap();
        assert!(fv.integral_phi_h == 0.0);
        // area is even in t for a plane
        assert!(fv.numeric_derivative.abs() < 1e-10);
    }
}
