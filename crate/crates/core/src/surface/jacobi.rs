use super::geometry::fundamental_forms;
use super::patch::ParamPatch;
use crate::error::{Error, Result};
use crate::linalg::{lowest_eigenvalues, StencilMatrix};
use crate::par;

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// The `k` smallest Dirichlet eigenvalues of `−(Δ_Σ + |A|²)` on a patch, ascending.
///
/// `Δ_Σ` is discretised in divergence form with coefficients `√g g^{ij}` from the
/// intrinsic metric, using bilinear elements on the parameter grid (2 × 2 Gauss
/// quadrature, coefficients interpolated from the nodes) and a row-sum lumped mass.
/// The assembled operator is symmetric, so the spectrum is real.
pub fn jacobi_smallest_eigenvalues(patch: &ParamPatch, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let geom = fundamental_forms(patch)?;
    let (n_s, n_t) = (patch.n_s(), patch.n_t());
    let (ds, dt) = (patch.ds(), patch.dt());
    // nodal coefficients: (sqrt g, G/sqrt g, -F/sqrt g, E/sqrt g)
    let coef: Vec<[f64; 4]> = geom
        .first
        .iter()
        .map(|[e, f, g]| {
            let root = (e * g - f * f).sqrt();
            [root, g / root, -f / root, e / root]
        })
        .collect();
    let cells = n_s * n_t;
    // local stiffness (4x4) and lumped mass (4) per cell; local order 00, 10, 01, 11
    let locals: Vec<([[f64; 4]; 4], [f64; 4])> = par::map_indexed(cells, |c| {
        let (ci, cj) = (c / n_t, c % n_t);
        let corner = [patch.index(ci, cj), patch.index(ci + 1, cj), patch.index(ci, cj + 1), patch.index(ci + 1, cj + 1)];
        let mut stiff = [[0.0; 4]; 4];
        let mut mass = [0.0; 4];
        for &xi in &GAUSS {
            for &eta in &GAUSS {
                let n = [(1.0 - xi) * (1.0 - eta), xi * (1.0 - eta), (1.0 - xi) * eta, xi * eta];
                let dn_s = [-(1.0 - eta) / ds, (1.0 - eta) / ds, -eta / ds, eta / ds];
                let dn_t = [-(1.0 - xi) / dt, -xi / dt, (1.0 - xi) / dt, xi / dt];
                let mut q = [0.0; 4];
                for (a, &node) in corner.iter().enumerate() {
                    for (qm, cm) in q.iter_mut().zip(coef[node]) {
                        *qm += n[a] * cm;
                    }
                }
                let w = 0.25 * ds * dt;
                for a in 0..4 {
                    mass[a] += w * q[0] * n[a];
                    for b in 0..4 {
                        stiff[a][b] += w
                            * (q[1] * dn_s[a] * dn_s[b]
                                + q[2] * (dn_s[a] * dn_t[b] + dn_t[a] * dn_s[b])
                                + q[3] * dn_t[a] * dn_t[b]);
                    }
                }
            }
        }
        (stiff, mass)
    });
    // interior unknowns (i, j) with 1 <= i < n_s, 1 <= j < n_t
    let (nx, ny) = (n_s - 1, n_t - 1);
    let mut matrix = StencilMatrix::zeros(nx, ny);
    let masses: Vec<f64> = par::map_indexed(nx * ny, |u| {
        let (i, j) = (u / ny + 1, u % ny + 1);
        let mut m = 0.0;
        for (ci, cj, local) in cells_around(i, j) {
            m += locals[ci * n_t + cj].1[local];
        }
        m
    });
    let a2_max = geom.a2.iter().fold(0.0f64, |m, v| m.max(*v));
    par::for_each_mut(&mut matrix.coeffs, |u, row| {
        let (i, j) = (u / ny + 1, u % ny + 1);
        for (ci, cj, local) in cells_around(i, j) {
            let stiff = &locals[ci * n_t + cj].0;
            for other in 0..4 {
                let (oi, oj) = (ci + (other & 1), cj + (other >> 1));
                if oi == 0 || oj == 0 || oi == n_s || oj == n_t {
                    continue;
                }
                let di = oi as isize - i as isize;
                let dj = oj as isize - j as isize;
                let k = (3 * (di + 1) + (dj + 1)) as usize;
                let v = (oi - 1) * ny + (oj - 1);
                row[k] += stiff[local][other] / (masses[u] * masses[v]).sqrt();
            }
        }
        row[4] -= geom.a2[patch.index(i, j)];
    });
    let shift = 1.01 * a2_max;
    let wanted = k.min(matrix.len());
    lowest_eigenvalues(&matrix, wanted, shift, 2000)
}

/// Cells touching node `(i, j)` with the local index of the node in each.
fn cells_around(i: usize, j: usize) -> [(usize, usize, usize); 4] {
    [(i - 1, j - 1, 3), (i, j - 1, 2), (i - 1, j, 1), (i, j, 0)]
}

#[cfg(test)]
mod tests {
    use super::super::patch::*;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_square_spectrum() {
        let p = make_graph_fn((0.0, 1.0), (0.0, 1.0), 32, 32, |_, _| 0.0).unwrap();
        let ev = jacobi_smallest_eigenvalues(&p, 3).unwrap();
        assert!((ev[0] / (2.0 * PI * PI) - 1.0).abs() < 0.01, "{ev:?}");
        assert!((ev[1] / (5.0 * PI * PI) - 1.0).abs() < 0.03, "{ev:?}");
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        assert!(ev.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn zero_k_is_rejected() {
        let p = make_graph_fn((0.0, 1.0), (0.0, 1.0), 4, 4, |_, _| 0.0).unwrap();
        assert!(jacobi_smallest_eigenvalues(&p, 0).is_err());
    }
}
