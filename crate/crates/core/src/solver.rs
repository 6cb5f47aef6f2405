//! Dirichlet problems for the minimal surface equation on universal-cover annuli.
//!
//! The unknown height lives on the `(σ, θ)` rectangle with `σ = log ρ`. The discrete
//! operator is the gradient of a cell-wise area energy
//!
//! `E(u) = Σ_c hσ hθ w_c √(1 + e^{-2σ_c} Q_c(u))`,
//!
//! where `w_c` is the exact cell average of `e^{2σ}` and `Q_c` averages the squared
//! edge differences of the cell. `E` is convex, so its Hessian is SPD and Newton steps
//! are solved with conjugate gradients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pcg, StencilMatrix};
use crate::multigraph::MultiGraph;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularDomain {
    pub r_in: f64,
    pub r_out: f64,
    pub sheets: usize,
    pub n_sigma: usize,
    pub n_theta: usize,
    /// Centre of the θ-window `[c − Nπ, c + Nπ]`.
    #[serde(default)]
    pub theta_center: f64,
}

impl AnnularDomain {
    pub fn new(r_in: f64, r_out: f64, sheets: usize, n_sigma: usize, n_theta: usize) -> Result<Self> {
        let d = Self { r_in, r_out, sheets, n_sigma, n_theta, theta_center: 0.0 };
        d.validate()?;
        Ok(d)
    }

    /// `n` cells in σ and `n` per sheet in θ.
    pub fn square(r_in: f64, r_out: f64, sheets: usize, n: usize) -> Result<Self> {
        Self::new(r_in, r_out, sheets, n, n * sheets)
    }

    pub fn with_theta_center(mut self, c: f64) -> Self {
        self.theta_center = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        MultiGraph::validate(self.r_in, self.r_out, self.sheets, self.n_sigma, self.n_theta)
    }

    pub fn graph_from_fn(&self, f: impl Fn(f64, f64) -> f64) -> Result<MultiGraph> {
        MultiGraph::from_fn_centered(self.r_in, self.r_out, self.sheets, self.n_sigma, self.n_theta, self.theta_center, f)
    }

    fn template(&self) -> Result<MultiGraph> {
        self.graph_from_fn(|_, _| 0.0)
    }
}

/// Dirichlet values on the four sides of the cover rectangle.
///
/// `inner` and `outer` run over θ (`n_theta + 1` values); `theta_min` and `theta_max`
/// run over ρ (`n_sigma + 1` values). Corner nodes take the `inner` / `outer` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
    pub theta_min: Vec<f64>,
    pub theta_max: Vec<f64>,
}

impl BoundaryData {
    pub fn from_fn(domain: &AnnularDomain, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Ok(Self::from_graph(&domain.graph_from_fn(f)?))
    }

    /// Edge values of an existing graph.
    pub fn from_graph(g: &MultiGraph) -> Self {
        let (nr, nt) = (g.n_rho(), g.n_theta());
        Self {
            inner: (0..=nt).map(|j| g.u(0, j)).collect(),
            outer: (0..=nt).map(|j| g.u(nr, j)).collect(),
            theta_min: (0..=nr).map(|i| g.u(i, 0)).collect(),
            theta_max: (0..=nr).map(|i| g.u(i, nt)).collect(),
        }
    }

    pub fn validate(&self, domain: &AnnularDomain) -> Result<()> {
        let (nr, nt) = (domain.n_sigma + 1, domain.n_theta + 1);
        for (side, v, n) in [
            ("inner", &self.inner, nt),
            ("outer", &self.outer, nt),
            ("theta_min", &self.theta_min, nr),
            ("theta_max", &self.theta_max, nr),
        ] {
            if v.len() != n {
                return Err(Error::InvalidInput(format!("boundary side {side} has {} values, expected {n}", v.len())));
            }
            if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("boundary side {side} is not finite at index {k}")));
            }
        }
        let corners = [
            (self.inner[0], self.theta_min[0]),
            (self.inner[nt - 1], self.theta_max[0]),
            (self.outer[0], self.theta_min[nr - 1]),
            (self.outer[nt - 1], self.theta_max[nr - 1]),
        ];
        for (a, b) in corners {
            if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::InvalidInput(format!("inconsistent corner values {a} and {b}")));
            }
        }
        Ok(())
    }

    /// Whether `g` carries these values on its edge nodes, bit for bit.
    pub fn reproduced_by(&self, g: &MultiGraph) -> bool {
        let b = Self::from_graph(g);
        let nr = g.n_rho();
        self.inner == b.inner
            && self.outer == b.outer
            && self.theta_min[1..nr] == b.theta_min[1..nr]
            && self.theta_max[1..nr] == b.theta_max[1..nr]
    }

    /// Bilinear transfinite interpolation of the edge values.
    pub fn transfinite(&self, domain: &AnnularDomain) -> Result<MultiGraph> {
        self.validate(domain)?;
        let g = domain.template()?;
        let (nr, nt) = (domain.n_sigma, domain.n_theta);
        let mut u = vec![0.0; g.node_count()];
        for i in 0..=nr {
            for j in 0..=nt {
                let p = g.index(i, j);
                u[p] = if i == 0 {
                    self.inner[j]
                } else if i == nr {
                    self.outer[j]
                } else if j == 0 {
                    self.theta_min[i]
                } else if j == nt {
                    self.theta_max[i]
                } else {
                    let s = i as f64 / nr as f64;
                    let t = j as f64 / nt as f64;
                    (1.0 - s) * self.inner[j] + s * self.outer[j] + (1.0 - t) * self.theta_min[i] + t * self.theta_max[i]
                        - ((1.0 - s) * (1.0 - t) * self.inner[0]
                            + (1.0 - s) * t * self.inner[nt]
                            + s * (1.0 - t) * self.outer[0]
                            + s * t * self.outer[nt])
                };
            }
        }
        g.with_values(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Stop once the max-norm of the scaled residual is at most this.
    pub tol_residual: f64,
    pub max_newton_iters: usize,
    pub backtrack_factor: f64,
    pub min_step: f64,
    pub linear_tol: f64,
    pub linear_max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-9,
            max_newton_iters: 50,
            backtrack_factor: 0.5,
            min_step: 2f64.powi(-20),
            linear_tol: 1e-10,
            linear_max_iters: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidInput(format!("tol_residual must be positive, got {}", self.tol_residual)));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::InvalidInput(format!("backtrack factor {} outside (0, 1)", self.backtrack_factor)));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return Err(Error::InvalidInput(format!("minimum step {} outside (0, 1]", self.min_step)));
        }
        if !(self.linear_tol > 0.0 && self.linear_tol < 1.0) {
            return Err(Error::InvalidInput(format!("linear tolerance {} outside (0, 1)", self.linear_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Max-norm of the scaled residual before the first and after every Newton step.
    pub residual_history: Vec<f64>,
    pub final_max_residual: f64,
    pub step_lengths: Vec<f64>,
    pub linear_iterations: Vec<usize>,
    pub area_initial: f64,
    pub area_final: f64,
}

impl SolveReport {
    pub fn is_monotone(&self) -> bool {
        self.residual_history.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Residual of the discrete operator at every node (zero on edge nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    /// Approximates `div(∇u / √(1 + |∇u|²))`.
    pub values: Vec<f64>,
    pub max_norm: f64,
    /// Max-norm of `ρ · values`, the dimensionless quantity the solver drives to zero.
    pub scaled_max_norm: f64,
}

// local node order in a cell: (0,0) (1,0) (0,1) (1,1)
const OFFSETS: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

struct Cells<'a> {
    g: &'a MultiGraph,
    alpha: f64,
    gamma: f64,
    /// `hσ hθ w_c` and `e^{-2σ_c}` per cell.
    weight: Vec<f64>,
    beta: Vec<f64>,
}

struct CellState {
    sqrt_term: f64,
    grad_q: [f64; 4],
}

impl<'a> Cells<'a> {
    fn new(g: &'a MultiGraph) -> Self {
        let (hs, ht) = (g.d_sigma(), g.d_theta());
        let (nr, nt) = (g.n_rho(), g.n_theta());
        let mut weight = vec![0.0; nr * nt];
        let mut beta = vec![0.0; nr * nt];
        for i in 0..nr {
            let (s0, s1) = (g.sigma(i), g.sigma(i + 1));
            let w = ((2.0 * s1).exp() - (2.0 * s0).exp()) / (2.0 * hs);
            let b = (-(s0 + s1)).exp();
            for j in 0..nt {
                weight[i * nt + j] = hs * ht * w;
                beta[i * nt + j] = b;
            }
        }
        Self { g, alpha: 1.0 / (hs * hs), gamma: 1.0 / (ht * ht), weight, beta }
    }

    fn count(&self) -> usize {
        self.weight.len()
    }

    fn local(&self, c: usize, u: &[f64]) -> [f64; 4] {
        let nt = self.g.n_theta();
        let (ci, cj) = (c / nt, c % nt);
        OFFSETS.map(|(di, dj)| u[self.g.index(ci + di, cj + dj)])
    }

    fn hq(&self) -> [[f64; 4]; 4] {
        let (a, g) = (self.alpha, self.gamma);
        [[a + g, -a, -g, 0.0], [-a, a + g, 0.0, -g], [-g, 0.0, a + g, -a], [0.0, -g, -a, a + g]]
    }

    fn state(&self, c: usize, u: &[f64]) -> CellState {
        let v = self.local(c, u);
        let (d0, d1, e0, e1) = (v[1] - v[0], v[3] - v[2], v[2] - v[0], v[3] - v[1]);
        let q = 0.5 * self.alpha * (d0 * d0 + d1 * d1) + 0.5 * self.gamma * (e0 * e0 + e1 * e1);
        let (a, g) = (self.alpha, self.gamma);
        CellState {
            sqrt_term: (1.0 + self.beta[c] * q).sqrt(),
            grad_q: [-a * d0 - g * e0, a * d0 - g * e1, -a * d1 + g * e0, a * d1 + g * e1],
        }
    }

    fn energy(&self, u: &[f64]) -> f64 {
        par::sum_indexed(self.count(), |c| self.weight[c] * self.state(c, u).sqrt_term)
    }

    /// `∂E/∂u` at every node.
    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let states: Vec<CellState> = par::map_indexed(self.count(), |c| self.state(c, u));
        let (nr, nt) = (self.g.n_rho(), self.g.n_theta());
        par::map_indexed(self.g.node_count(), |p| {
            let (i, j) = self.g.node(p);
            let mut acc = 0.0;
            for (k, (di, dj)) in OFFSETS.iter().enumerate() {
                if i < *di || j < *dj || i - di >= nr || j - dj >= nt {
                    continue;
                }
                let c = (i - di) * nt + (j - dj);
                let st = &states[c];
                acc += self.weight[c] * self.beta[c] * st.grad_q[k] / (2.0 * st.sqrt_term);
            }
            acc
        })
    }

    /// Hessian of `E` restricted to interior nodes.
    fn hessian(&self, u: &[f64]) -> StencilMatrix {
        let states: Vec<CellState> = par::map_indexed(self.count(), |c| self.state(c, u));
        let (nr, nt) = (self.g.n_rho(), self.g.n_theta());
        let hq = self.hq();
        let mut m = StencilMatrix::zeros(nr - 1, nt - 1);
        par::for_each_mut(&mut m.coeffs, |q, row| {
            let (i, j) = (q / (nt - 1) + 1, q % (nt - 1) + 1);
            for (k, (di, dj)) in OFFSETS.iter().enumerate() {
                let (ci, cj) = (i - di, j - dj);
                if ci >= nr || cj >= nt {
                    continue;
                }
                let c = ci * nt + cj;
                let st = &states[c];
                let s = st.sqrt_term;
                let coef = self.weight[c] * self.beta[c] / (2.0 * s);
                let curv = self.weight[c] * self.beta[c] * self.beta[c] / (4.0 * s * s * s);
                for (l, (ei, ej)) in OFFSETS.iter().enumerate() {
                    let (ni, nj) = (ci + ei, cj + ej);
                    if ni == 0 || ni == nr || nj == 0 || nj == nt {
                        continue;
                    }
                    let slot = 3 * (ni + 1 - i) + (nj + 1 - j);
                    row[slot] += coef * hq[k][l] - curv * st.grad_q[k] * st.grad_q[l];
                }
            }
        });
        m
    }

    fn node_scale(&self, p: usize) -> f64 {
        let (i, _) = self.g.node(p);
        self.g.d_sigma() * self.g.d_theta() * self.g.rho(i)
    }

    fn is_interior(&self, p: usize) -> bool {
        let (i, j) = self.g.node(p);
        i > 0 && i < self.g.n_rho() && j > 0 && j < self.g.n_theta()
    }

    fn scaled_residual_max(&self, grad: &[f64]) -> f64 {
        par::max_indexed(grad.len(), |p| if self.is_interior(p) { (grad[p] / self.node_scale(p)).abs() } else { 0.0 }).max(0.0)
    }
}

pub fn discrete_mse_residual(g: &MultiGraph) -> ResidualField {
    let cells = Cells::new(g);
    let grad = cells.gradient(g.values());
    let values: Vec<f64> = par::map_indexed(grad.len(), |p| {
        if cells.is_interior(p) {
            -grad[p] / (cells.node_scale(p) * g.rho(g.node(p).0))
        } else {
            0.0
        }
    });
    let max_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ResidualField { max_norm, scaled_max_norm: cells.scaled_residual_max(&grad), values }
}

/// Discrete area `∫∫ √(1 + |∇u|²) ρ dρ dθ` over the cover rectangle.
pub fn area_functional(g: &MultiGraph) -> f64 {
    Cells::new(g).energy(g.values())
}

/// Damped Newton iteration from the transfinite interpolant of `boundary`.
pub fn solve(domain: &AnnularDomain, boundary: &BoundaryData, config: &SolverConfig) -> Result<(MultiGraph, SolveReport)> {
    domain.validate()?;
    config.validate()?;
    let mut g = boundary.transfinite(domain)?;
    let cells = Cells::new(&g);
    let (nr, nt) = (domain.n_sigma, domain.n_theta);
    let mut u = g.values().to_vec();
    let mut grad = cells.gradient(&u);
    let mut res = cells.scaled_residual_max(&grad);
    let mut report = SolveReport {
        iterations: 0,
        residual_history: vec![res],
        final_max_residual: res,
        step_lengths: Vec::new(),
        linear_iterations: Vec::new(),
        area_initial: cells.energy(&u),
        area_final: 0.0,
    };
    let interior = |q: usize| (q / (nt - 1) + 1) * (nt + 1) + q % (nt - 1) + 1;
    while res > config.tol_residual {
        if report.iterations == config.max_newton_iters {
            return Err(Error::NonConvergence {
                iterations: report.iterations,
                last_residual: res,
                history: report.residual_history,
            });
        }
        let h = cells.hessian(&u);
        let rhs: Vec<f64> = (0..h.len()).map(|q| -grad[interior(q)]).collect();
        let mut delta = vec![0.0; h.len()];
        let stats = pcg(&h, &rhs, &mut delta, config.linear_tol, config.linear_max_iters)?;
        report.linear_iterations.push(stats.iterations);

        let mut t = 1.0;
        loop {
            let mut trial = u.clone();
            for (q, d) in delta.iter().enumerate() {
                trial[interior(q)] += t * d;
            }
            let trial_grad = cells.gradient(&trial);
            let trial_res = cells.scaled_residual_max(&trial_grad);
            if trial_res.is_finite() && trial_res <= (1.0 - 1e-4 * t) * res {
                u = trial;
                grad = trial_grad;
                res = trial_res;
                break;
            }
            t *= config.backtrack_factor;
            if t < config.min_step {
                report.iterations += 1;
                return Err(Error::NonConvergence {
                    iterations: report.iterations,
                    last_residual: res,
                    history: report.residual_history,
                });
            }
        }
        report.iterations += 1;
        report.step_lengths.push(t);
        report.residual_history.push(res);
    }
    report.final_max_residual = res;
    report.area_final = cells.energy(&u);
    debug_assert!(nr >= 2);
    g = g.with_values(u)?;
    Ok((g, report))
}

/// Amount by which interior values leave the boundary range (zero when the discrete
/// maximum principle holds).
pub fn max_principle_excess(g: &MultiGraph) -> f64 {
    let (nr, nt) = (g.n_rho(), g.n_theta());
    let (mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut imin, mut imax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=nr {
        for j in 0..=nt {
            let v = g.u(i, j);
            if i == 0 || i == nr || j == 0 || j == nt {
                bmin = bmin.min(v);
                bmax = bmax.max(v);
            } else {
                imin = imin.min(v);
                imax = imax.max(v);
            }
        }
    }
    (imax - bmax).max(bmin - imin).max(0.0)
}

/// Known exact solutions used for convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactSolution {
    Constant(f64),
    Theta,
    Arccosh,
}

impl ExactSolution {
    pub fn eval(&self, rho: f64, theta: f64) -> f64 {
        match self {
            ExactSolution::Constant(c) => *c,
            ExactSolution::Theta => theta,
            ExactSolution::Arccosh => rho.acosh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderEstimate {
    /// Errors at rounding level on every grid.
    Exact,
    /// Least-squares slope of `log error` against `log h`.
    Slope(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderStudy {
    pub resolutions: Vec<usize>,
    pub max_errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for consecutive grids.
    pub pairwise_orders: Vec<f64>,
    pub order: OrderEstimate,
    /// False when the errors do not decrease under refinement.
    pub monotone: bool,
    pub reports: Vec<SolveReport>,
}

/// Relative error level below which a solution counts as reproduced exactly.
pub const EXACT_LEVEL: f64 = 1e-11;

/// Solve the Dirichlet problem sampled from `exact` on doubling grids
/// (`n` cells in σ and `n` per sheet in θ) and estimate the order of the max-norm error.
pub fn convergence_order(
    exact: ExactSolution,
    r_in: f64,
    r_out: f64,
    sheets: usize,
    resolutions: &[usize],
    config: &SolverConfig,
) -> Result<OrderStudy> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidInput(format!("{} resolutions given, need at least 3", resolutions.len())));
    }
    if resolutions.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidInput(format!("resolutions {resolutions:?} do not double")));
    }
    let mut max_errors = Vec::new();
    let mut reports = Vec::new();
    let mut scale = 0.0f64;
    for &n in resolutions {
        let domain = AnnularDomain::square(r_in, r_out, sheets, n)?;
        let reference = domain.graph_from_fn(|r, t| exact.eval(r, t))?;
        let boundary = BoundaryData::from_graph(&reference);
        let (g, report) = solve(&domain, &boundary, config)?;
        let err = g.values().iter().zip(reference.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        scale = scale.max(reference.values().iter().fold(0.0f64, |m, v| m.max(v.abs())));
        max_errors.push(err);
        reports.push(report);
    }
    let pairwise_orders: Vec<f64> = max_errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let monotone = max_errors.windows(2).all(|w| w[1] < w[0]);
    let order = if max_errors.iter().all(|e| *e <= EXACT_LEVEL * (1.0 + scale)) {
        OrderEstimate::Exact
    } else {
        let xs: Vec<f64> = resolutions.iter().map(|n| -(*n as f64).ln()).collect();
        let ys: Vec<f64> = max_errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        OrderEstimate::Slope(sxy / sxx)
    };
    Ok(OrderStudy { resolutions: resolutions.to_vec(), max_errors, pairwise_orders, order, monotone, reports })
}

/// A complete Dirichlet problem as read from a JSON problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub domain: AnnularDomain,
    pub boundary: BoundaryData,
    #[serde(default)]
    pub config: SolverConfig,
}

impl Problem {
    pub fn solve(&self) -> Result<(MultiGraph, SolveReport)> {
        solve(&self.domain, &self.boundary, &self.config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_annulus_area_is_exact() {
        let d = AnnularDomain::square(1.0, 2.0, 1, 16).unwrap();
        let g = d.graph_from_fn(|_, _| 0.0).unwrap();
        assert!((area_functional(&g) - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn constant_data_needs_no_iterations() {
        let d = AnnularDomain::square(1.0, 3.0, 2, 8).unwrap();
        let b = BoundaryData::from_fn(&d, |_, _| 7.0).unwrap();
        let (g, rep) = solve(&d, &b, &SolverConfig::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(g.values().iter().all(|v| *v == 7.0));
        assert_eq!(discrete_mse_residual(&g).max_norm, 0.0);
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let d = AnnularDomain::new(1.0, 2.0, 1, 4, 6).unwrap();
        let g = d.graph_from_fn(|r, t| 0.3 * r * t.sin() + 0.1 * t * t).unwrap();
        let cells = Cells::new(&g);
        let u = g.values().to_vec();
        let h = cells.hessian(&u);
        let nt = g.n_theta();
        let col = 4; // interior unknown (1+4/5, ...)
        let p = (col / (nt - 1) + 1) * (nt + 1) + col % (nt - 1) + 1;
        let eps = 1e-6;
        let mut up = u.clone();
        up[p] += eps;
        let mut um = u.clone();
        um[p] -= eps;
        let (gp, gm) = (cells.gradient(&up), cells.gradient(&um));
        let mut e = vec![0.0; h.len()];
        e[col] = 1.0;
        let mut he = vec![0.0; h.len()];
        h.apply(&e, &mut he);
        for q in 0..h.len() {
            let pq = (q / (nt - 1) + 1) * (nt + 1) + q % (nt - 1) + 1;
            let fd = (gp[pq] - gm[pq]) / (2.0 * eps);
            assert!((fd - he[q]).abs() < 1e-7 * (1.0 + fd.abs()), "row {q}: {fd} vs {}", he[q]);
        }
        assert!(h.asymmetry() < 1e-14);
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig { backtrack_factor: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { tol_residual: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn corner_mismatch_is_rejected() {
        let d = AnnularDomain::square(1.0, 2.0, 1, 4).unwrap();
        let mut b = BoundaryData::from_fn(&d, |r, _| r).unwrap();
        b.theta_min[0] = 5.0;
        assert!(matches!(b.validate(&d), Err(Error::InvalidInput(_))));
    }
}
