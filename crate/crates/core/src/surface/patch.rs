use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

/// How tangent and curvature data are obtained at the nodes of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivMode {
    /// Closed-form derivatives of a built-in surface.
    Analytic,
    /// Finite differences of the sampled positions.
    CentralDifference,
}

/// Built-in surfaces with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticSurface {
    /// `(s cos t, s sin t, t)`
    Helicoid,
    /// `(cosh s cos t, cosh s sin t, s)`
    Catenoid,
}

/// Position and derivatives up to second order at one parameter point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub xs: Vec3,
    pub xt: Vec3,
    pub xss: Vec3,
    pub xst: Vec3,
    pub xtt: Vec3,
}

impl AnalyticSurface {
    fn position(self, s: f64, t: f64) -> Vec3 {
        match self {
            Self::Helicoid => Vec3::new(s * t.cos(), s * t.sin(), t),
            Self::Catenoid => Vec3::new(s.cosh() * t.cos(), s.cosh() * t.sin(), s),
        }
    }

    fn jet(self, s: f64, t: f64) -> Jet {
        let (st, ct) = t.sin_cos();
        match self {
            Self::Helicoid => Jet {
                xs: Vec3::new(ct, st, 0.0),
                xt: Vec3::new(-s * st, s * ct, 1.0),
                xss: Vec3::zeros(),
                xst: Vec3::new(-st, ct, 0.0),
                xtt: Vec3::new(-s * ct, -s * st, 0.0),
            },
            Self::Catenoid => {
                let (sh, ch) = (s.sinh(), s.cosh());
                Jet {
                    xs: Vec3::new(sh * ct, sh * st, 1.0),
                    xt: Vec3::new(-ch * st, ch * ct, 0.0),
                    xss: Vec3::new(ch * ct, ch * st, 0.0),
                    xst: Vec3::new(-sh * st, sh * ct, 0.0),
                    xtt: Vec3::new(-ch * ct, -ch * st, 0.0),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Analytic {
    surface: AnalyticSurface,
    scale: f64,
}

/// A surface sampled on a uniform `(n_s + 1) × (n_t + 1)` grid over
/// `[s0, s1] × [t0, t1]`. Node `(i, j)` is stored at `i * (n_t + 1) + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPatch {
    s_range: (f64, f64),
    t_range: (f64, f64),
    n_s: usize,
    n_t: usize,
    positions: Vec<Vec3>,
    deriv_mode: DerivMode,
    analytic: Option<Analytic>,
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    if !(r.0.is_finite() && r.1.is_finite() && r.1 > r.0) {
        return Err(Error::InvalidDomain(format!("{name} range [{}, {}] is degenerate", r.0, r.1)));
    }
    Ok(())
}

fn check_resolution(n_s: usize, n_t: usize) -> Result<()> {
    if n_s < 2 || n_t < 2 {
        return Err(Error::InvalidDomain(format!("grid {n_s}x{n_t} needs at least 2 cells per direction")));
    }
    Ok(())
}

impl ParamPatch {
    /// Patch from raw positions; only central-difference derivatives are available.
    pub fn from_positions(
        s_range: (f64, f64),
        t_range: (f64, f64),
        n_s: usize,
        n_t: usize,
        positions: Vec<Vec3>,
    ) -> Result<Self> {
        check_range("s", s_range)?;
        check_range("t", t_range)?;
        check_resolution(n_s, n_t)?;
        let expected = (n_s + 1) * (n_t + 1);
        if positions.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: positions.len() });
        }
        Ok(Self { s_range, t_range, n_s, n_t, positions, deriv_mode: DerivMode::CentralDifference, analytic: None })
    }

    fn analytic(
        surface: AnalyticSurface,
        s_range: (f64, f64),
        t_range: (f64, f64),
        n_s: usize,
        n_t: usize,
        deriv_mode: DerivMode,
    ) -> Result<Self> {
        check_range("s", s_range)?;
        check_range("t", t_range)?;
        check_resolution(n_s, n_t)?;
        let mut patch = Self {
            s_range,
            t_range,
            n_s,
            n_t,
            positions: Vec::new(),
            deriv_mode,
            analytic: Some(Analytic { surface, scale: 1.0 }),
        };
        patch.positions = (0..patch.node_count())
            .map(|p| {
                let (i, j) = patch.node(p);
                surface.position(patch.s(i), patch.t(j))
            })
            .collect();
        Ok(patch)
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn s_range(&self) -> (f64, f64) {
        self.s_range
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn node_count(&self) -> usize {
        (self.n_s + 1) * (self.n_t + 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.n_t + 1) + j
    }

    pub fn node(&self, p: usize) -> (usize, usize) {
        (p / (self.n_t + 1), p % (self.n_t + 1))
    }

    pub fn ds(&self) -> f64 {
        (self.s_range.1 - self.s_range.0) / self.n_s as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_range.1 - self.t_range.0) / self.n_t as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        if i == self.n_s {
            self.s_range.1
        } else {
            self.s_range.0 + i as f64 * self.ds()
        }
    }

    pub fn t(&self, j: usize) -> f64 {
        if j == self.n_t {
            self.t_range.1
        } else {
            self.t_range.0 + j as f64 * self.dt()
        }
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn position(&self, i: usize, j: usize) -> Vec3 {
        self.positions[self.index(i, j)]
    }

    pub fn deriv_mode(&self) -> DerivMode {
        self.deriv_mode
    }

    pub fn analytic_surface(&self) -> Option<(AnalyticSurface, f64)> {
        self.analytic.map(|a| (a.surface, a.scale))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n_s || j == self.n_t
    }

    /// Per-node flag marking the grid boundary.
    pub fn boundary_mask(&self) -> Vec<bool> {
        (0..self.node_count())
            .map(|p| {
                let (i, j) = self.node(p);
                self.is_boundary(i, j)
            })
            .collect()
    }

    /// Same samples with another derivative mode.
    pub fn with_deriv_mode(&self, mode: DerivMode) -> Result<Self> {
        if mode == DerivMode::Analytic && self.analytic.is_none() {
            return Err(Error::AnalyticUnavailable);
        }
        Ok(Self { deriv_mode: mode, ..self.clone() })
    }

    /// Same grid with replaced positions (difference mode; analytic data is dropped).
    pub fn with_positions(&self, positions: Vec<Vec3>) -> Result<Self> {
        Self::from_positions(self.s_range, self.t_range, self.n_s, self.n_t, positions)
    }

    /// Rigid translation. Closed-form derivatives are unaffected.
    pub fn translate(&self, offset: Vec3) -> Self {
        let mut out = self.clone();
        out.positions.iter_mut().for_each(|p| *p += offset);
        out
    }

    pub(crate) fn analytic_jet(&self, i: usize, j: usize) -> Option<Jet> {
        let a = self.analytic?;
        let jet = a.surface.jet(self.s(i), self.t(j));
        let k = a.scale;
        Some(Jet { xs: jet.xs * k, xt: jet.xt * k, xss: jet.xss * k, xst: jet.xst * k, xtt: jet.xtt * k })
    }
}

/// Helicoid `(s cos t, s sin t, t)`.
pub fn make_helicoid(
    s_range: (f64, f64),
    t_range: (f64, f64),
    n_s: usize,
    n_t: usize,
    deriv_mode: DerivMode,
) -> Result<ParamPatch> {
    ParamPatch::analytic(AnalyticSurface::Helicoid, s_range, t_range, n_s, n_t, deriv_mode)
}

/// Catenoid `(cosh s cos t, cosh s sin t, s)`.
pub fn make_catenoid(
    s_range: (f64, f64),
    t_range: (f64, f64),
    n_s: usize,
    n_t: usize,
    deriv_mode: DerivMode,
) -> Result<ParamPatch> {
    ParamPatch::analytic(AnalyticSurface::Catenoid, s_range, t_range, n_s, n_t, deriv_mode)
}

/// Ruled surface `X(s, t) = β(t) + s δ(t)` from directrix and direction samples on a
/// common uniform t-grid (`n_t = samples - 1`).
pub fn make_ruled(
    directrix: &[Vec3],
    direction: &[Vec3],
    s_range: (f64, f64),
    t_range: (f64, f64),
    n_s: usize,
) -> Result<ParamPatch> {
    if directrix.len() != direction.len() {
        return Err(Error::ShapeMismatch { expected: directrix.len(), got: direction.len() });
    }
    if directrix.len() < 3 {
        return Err(Error::InvalidDomain("ruled surface needs at least 3 t-samples".into()));
    }
    if let Some(index) = direction.iter().position(|d| d.norm() == 0.0) {
        return Err(Error::InvalidRuling { index });
    }
    let n_t = directrix.len() - 1;
    check_range("s", s_range)?;
    check_resolution(n_s, n_t)?;
    let ds = (s_range.1 - s_range.0) / n_s as f64;
    let mut positions = Vec::with_capacity((n_s + 1) * (n_t + 1));
    for i in 0..=n_s {
        let s = if i == n_s { s_range.1 } else { s_range.0 + i as f64 * ds };
        positions.extend(directrix.iter().zip(direction).map(|(b, d)| b + d * s));
    }
    ParamPatch::from_positions(s_range, t_range, n_s, n_t, positions)
}

/// Graph `(x₁, x₂, u(x₁, x₂))` of samples `u` on the rectangle, node `(i, j)` at
/// `u[i * (n_y + 1) + j]`.
pub fn make_graph_patch(
    x_range: (f64, f64),
    y_range: (f64, f64),
    n_x: usize,
    n_y: usize,
    u: &[f64],
    deriv_mode: DerivMode,
) -> Result<ParamPatch> {
    if deriv_mode == DerivMode::Analytic {
        return Err(Error::AnalyticUnavailable);
    }
    let expected = (n_x + 1) * (n_y + 1);
    if u.len() != expected {
        return Err(Error::ShapeMismatch { expected, got: u.len() });
    }
    check_range("x", x_range)?;
    check_range("y", y_range)?;
    check_resolution(n_x, n_y)?;
    let dx = (x_range.1 - x_range.0) / n_x as f64;
    let dy = (y_range.1 - y_range.0) / n_y as f64;
    let positions = (0..expected)
        .map(|p| {
            let (i, j) = (p / (n_y + 1), p % (n_y + 1));
            let x = if i == n_x { x_range.1 } else { x_range.0 + i as f64 * dx };
            let y = if j == n_y { y_range.1 } else { y_range.0 + j as f64 * dy };
            Vec3::new(x, y, u[p])
        })
        .collect();
    ParamPatch::from_positions(x_range, y_range, n_x, n_y, positions)
}

/// Graph patch sampled from a function.
pub fn make_graph_fn(
    x_range: (f64, f64),
    y_range: (f64, f64),
    n_x: usize,
    n_y: usize,
    f: impl Fn(f64, f64) -> f64,
) -> Result<ParamPatch> {
    check_range("x", x_range)?;
    check_range("y", y_range)?;
    check_resolution(n_x, n_y)?;
    let dx = (x_range.1 - x_range.0) / n_x as f64;
    let dy = (y_range.1 - y_range.0) / n_y as f64;
    let mut u = Vec::with_capacity((n_x + 1) * (n_y + 1));
    for i in 0..=n_x {
        let x = if i == n_x { x_range.1 } else { x_range.0 + i as f64 * dx };
        for j in 0..=n_y {
            let y = if j == n_y { y_range.1 } else { y_range.0 + j as f64 * dy };
            u.push(f(x, y));
        }
    }
    make_graph_patch(x_range, y_range, n_x, n_y, &u, DerivMode::CentralDifference)
}

/// Homothety `X ↦ a X` about the origin.
pub fn rescale(patch: &ParamPatch, a: f64) -> Result<ParamPatch> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidScale(a));
    }
    let mut out = patch.clone();
    out.positions.iter_mut().for_each(|p| *p *= a);
    if let Some(an) = out.analytic.as_mut() {
        an.scale *= a;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn helicoid_nodes() {
        let p = make_helicoid((0.0, 2.0), (0.0, PI), 2, 2, DerivMode::Analytic).unwrap();
        assert_eq!(p.position(0, 0), Vec3::zeros());
        let q = p.position(1, 1);
        assert!((q - Vec3::new(0.0, 1.0, PI / 2.0)).norm() < 1e-15);
        let r = p.position(2, 2);
        assert!((r - Vec3::new(-2.0, 0.0, PI)).norm() < 1e-15);
    }

    #[test]
    fn catenoid_nodes() {
        let p = make_catenoid((0.0, 1.0), (0.0, PI), 2, 2, DerivMode::Analytic).unwrap();
        assert_eq!(p.position(0, 0), Vec3::new(1.0, 0.0, 0.0));
        assert!((p.position(0, 2) - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(make_helicoid((1.0, 1.0), (0.0, 1.0), 4, 4, DerivMode::Analytic), Err(Error::InvalidDomain(_))));
        assert!(matches!(make_catenoid((0.0, 1.0), (0.0, 1.0), 1, 4, DerivMode::Analytic), Err(Error::InvalidDomain(_))));
        let b = vec![Vec3::zeros(); 4];
        let mut d = vec![Vec3::x(); 4];
        d[2] = Vec3::zeros();
        assert_eq!(make_ruled(&b, &d, (0.0, 1.0), (0.0, 1.0), 3), Err(Error::InvalidRuling { index: 2 }));
    }

    #[test]
    fn ruled_constant_direction_is_a_segment_family() {
        let b = vec![Vec3::zeros(); 5];
        let d = vec![Vec3::x(); 5];
        let p = make_ruled(&b, &d, (0.0, 1.0), (0.0, 1.0), 4).unwrap();
        for i in 0..=4 {
            for j in 0..=4 {
                assert_eq!(p.position(i, j), Vec3::new(p.s(i), 0.0, 0.0));
            }
        }
    }

    #[test]
    fn rescale_rules() {
        let p = make_helicoid((0.0, 1.0), (0.0, 1.0), 3, 3, DerivMode::Analytic).unwrap();
        assert_eq!(rescale(&p, 1.0).unwrap(), p);
        assert_eq!(rescale(&p, 0.0), Err(Error::InvalidScale(0.0)));
        assert_eq!(rescale(&p, -2.0), Err(Error::InvalidScale(-2.0)));
    }

    #[test]
    fn graph_patch_shape_and_mode() {
        let u = vec![0.0; 9];
        assert!(make_graph_patch((0.0, 1.0), (0.0, 1.0), 2, 2, &u, DerivMode::CentralDifference).is_ok());
        assert_eq!(
            make_graph_patch((0.0, 1.0), (0.0, 1.0), 2, 3, &u, DerivMode::CentralDifference),
            Err(Error::ShapeMismatch { expected: 12, got: 9 })
        );
        assert_eq!(make_graph_patch((0.0, 1.0), (0.0, 1.0), 2, 2, &u, DerivMode::Analytic), Err(Error::AnalyticUnavailable));
    }
}
