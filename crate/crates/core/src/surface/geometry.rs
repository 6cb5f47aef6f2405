use serde::{Deserialize, Serialize};

use super::patch::{DerivMode, Jet, ParamPatch};
use super::stencil::{self, Axis};
use crate::error::{Error, Result};
use crate::par;
use crate::Vec3;

/// Per-node differential geometry of a patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeomData {
    /// `(E, F, G)`
    pub first: Vec<[f64; 3]>,
    /// `(e, f, g)` measured against [`GeomData::normal`].
    pub second: Vec<[f64; 3]>,
    pub mean: Vec<f64>,
    pub gauss: Vec<f64>,
    /// `|A|² = κ₁² + κ₂²`, computed as the trace of the squared shape operator.
    pub a2: Vec<f64>,
    pub normal: Vec<Vec3>,
}

impl GeomData {
    /// `√(EG − F²)` at node `p`.
    pub fn area_element(&self, p: usize) -> f64 {
        let [e, f, g] = self.first[p];
        (e * g - f * f).max(0.0).sqrt()
    }

    pub fn max_abs_mean(&self) -> f64 {
        self.mean.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

pub(crate) fn tangents(patch: &ParamPatch) -> (Vec<Vec3>, Vec<Vec3>) {
    match patch.deriv_mode() {
        DerivMode::Analytic => {
            let jets = analytic_jets(patch);
            (jets.iter().map(|j| j.xs).collect(), jets.iter().map(|j| j.xt).collect())
        }
        DerivMode::CentralDifference => {
            let (n_s, n_t) = (patch.n_s(), patch.n_t());
            (
                stencil::apply(patch.positions(), n_s, n_t, patch.ds(), Axis::S, 1),
                stencil::apply(patch.positions(), n_s, n_t, patch.dt(), Axis::T, 1),
            )
        }
    }
}

fn analytic_jets(patch: &ParamPatch) -> Vec<Jet> {
    par::map_indexed(patch.node_count(), |p| {
        let (i, j) = patch.node(p);
        patch.analytic_jet(i, j).expect("analytic mode requires closed-form data")
    })
}

fn jets(patch: &ParamPatch) -> Vec<Jet> {
    match patch.deriv_mode() {
        DerivMode::Analytic => analytic_jets(patch),
        DerivMode::CentralDifference => {
            let (n_s, n_t) = (patch.n_s(), patch.n_t());
            let (ds, dt) = (patch.ds(), patch.dt());
            let x = patch.positions();
            let xs = stencil::apply(x, n_s, n_t, ds, Axis::S, 1);
            let xt = stencil::apply(x, n_s, n_t, dt, Axis::T, 1);
            let xss = stencil::apply(x, n_s, n_t, ds, Axis::S, 2);
            let xtt = stencil::apply(x, n_s, n_t, dt, Axis::T, 2);
            let xst = stencil::apply(&xt, n_s, n_t, ds, Axis::S, 1);
            (0..x.len()).map(|p| Jet { xs: xs[p], xt: xt[p], xss: xss[p], xst: xst[p], xtt: xtt[p] }).collect()
        }
    }
}

/// Index of the first node whose tangents are numerically dependent.
pub(crate) fn degenerate_node(xs: &[Vec3], xt: &[Vec3]) -> Option<usize> {
    xs.iter().zip(xt).position(|(a, b)| {
        let c = a.cross(b).norm();
        !(c > 1e-13 * a.norm() * b.norm()) || !c.is_finite()
    })
}

/// First and second fundamental forms, curvatures and normals at every node.
pub fn fundamental_forms(patch: &ParamPatch) -> Result<GeomData> {
    let jets = jets(patch);
    let xs: Vec<Vec3> = jets.iter().map(|j| j.xs).collect();
    let xt: Vec<Vec3> = jets.iter().map(|j| j.xt).collect();
    if let Some(p) = degenerate_node(&xs, &xt) {
        let (i, j) = patch.node(p);
        return Err(Error::ImmersionFailure { i, j });
    }
    let per_node = par::map_indexed(jets.len(), |p| node_geometry(&jets[p]));
    let mut out = GeomData {
        first: Vec::with_capacity(jets.len()),
        second: Vec::with_capacity(jets.len()),
        mean: Vec::with_capacity(jets.len()),
        gauss: Vec::with_capacity(jets.len()),
        a2: Vec::with_capacity(jets.len()),
        normal: Vec::with_capacity(jets.len()),
    };
    for g in per_node {
        out.first.push(g.0);
        out.second.push(g.1);
        out.mean.push(g.2);
        out.gauss.push(g.3);
        out.a2.push(g.4);
        out.normal.push(g.5);
    }
    Ok(out)
}

fn node_geometry(jet: &Jet) -> ([f64; 3], [f64; 3], f64, f64, f64, Vec3) {
    let cross = jet.xs.cross(&jet.xt);
    let n = cross / cross.norm();
    let big_e = jet.xs.dot(&jet.xs);
    let big_f = jet.xs.dot(&jet.xt);
    let big_g = jet.xt.dot(&jet.xt);
    let e = jet.xss.dot(&n);
    let f = jet.xst.dot(&n);
    let g = jet.xtt.dot(&n);
    let det = big_e * big_g - big_f * big_f;
    // shape operator I⁻¹ II
    let s11 = (big_g * e - big_f * f) / det;
    let s12 = (big_g * f - big_f * g) / det;
    let s21 = (-big_f * e + big_e * f) / det;
    let s22 = (-big_f * f + big_e * g) / det;
    let trace = s11 + s22;
    let gauss = (e * g - f * f) / det;
    let a2 = s11 * s11 + 2.0 * s12 * s21 + s22 * s22;
    ([big_e, big_f, big_g], [e, f, g], -trace, gauss, a2, n)
}

/// Trapezoidal weight of node `(i, j)` including the cell size.
pub(crate) fn trapezoid_weight(patch: &ParamPatch, p: usize) -> f64 {
    let (i, j) = patch.node(p);
    let ws = if i == 0 || i == patch.n_s() { 0.5 } else { 1.0 };
    let wt = if j == 0 || j == patch.n_t() { 0.5 } else { 1.0 };
    ws * wt * patch.ds() * patch.dt()
}

/// Area as the trapezoidal sum of `√(EG − F²)` over the parameter grid.
pub fn area(patch: &ParamPatch) -> f64 {
    let (xs, xt) = tangents(patch);
    par::sum_indexed(patch.node_count(), |p| trapezoid_weight(patch, p) * xs[p].cross(&xt[p]).norm())
}

#[cfg(test)]
mod tests {
    use super::super::patch::*;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_square() {
        let p = make_graph_fn((0.0, 1.0), (0.0, 1.0), 8, 8, |_, _| 0.0).unwrap();
        let g = fundamental_forms(&p).unwrap();
        assert!(g.mean.iter().all(|h| *h == 0.0));
        assert!(g.gauss.iter().all(|k| *k == 0.0));
        assert!((area(&p) - 1.0).abs() < 1e-12);
        let lifted = make_graph_fn((0.0, 1.0), (0.0, 1.0), 8, 8, |_, _| 5.0).unwrap();
        assert!((area(&lifted) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_sphere_cap_has_positive_mean_curvature_outward() {
        // (sin s cos t, sin s sin t, cos s): X_s × X_t points outward
        let n = 40;
        let s_range = (0.5, 1.0);
        let t_range = (0.0, 1.0);
        let mut pos = Vec::new();
        for i in 0..=n {
            let s = s_range.0 + (s_range.1 - s_range.0) * i as f64 / n as f64;
            for j in 0..=n {
                let t = t_range.0 + (t_range.1 - t_range.0) * j as f64 / n as f64;
                pos.push(Vec3::new(s.sin() * t.cos(), s.sin() * t.sin(), s.cos()));
            }
        }
        let p = ParamPatch::from_positions(s_range, t_range, n, n, pos).unwrap();
        let g = fundamental_forms(&p).unwrap();
        let mid = p.index(n / 2, n / 2);
        assert!((g.mean[mid] - 2.0).abs() < 1e-5, "H = {}", g.mean[mid]);
        assert!((g.gauss[mid] - 1.0).abs() < 1e-5);
        assert!(g.normal[mid].dot(&p.positions()[mid]) > 0.99);
    }

    #[test]
    fn degenerate_patch_names_the_node() {
        let mut pos = vec![Vec3::zeros(); 16];
        for (p, x) in pos.iter_mut().enumerate() {
            *x = Vec3::new((p / 4) as f64, 0.0, 0.0);
        }
        let p = ParamPatch::from_positions((0.0, 1.0), (0.0, 1.0), 3, 3, pos).unwrap();
        assert_eq!(fundamental_forms(&p), Err(Error::ImmersionFailure { i: 0, j: 0 }));
    }

    #[test]
    fn helicoid_closed_forms() {
        let p = make_helicoid((-2.0, 2.0), (0.0, PI), 8, 8, DerivMode::Analytic).unwrap();
        let g = fundamental_forms(&p).unwrap();
        for q in 0..p.node_count() {
            let (i, _) = p.node(q);
            let s = p.s(i);
            assert!(g.mean[q].abs() < 1e-14);
            assert!((g.a2[q] - 2.0 / (1.0 + s * s).powi(2)).abs() < 1e-14);
        }
    }
}
