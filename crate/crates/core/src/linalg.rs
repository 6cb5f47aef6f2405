//! Sparse linear algebra on structured grids: nine-point stencil matrices,
//! Jacobi-preconditioned conjugate gradients, banded Cholesky and a shift-invert
//! subspace iteration for the lowest eigenvalues of symmetric operators.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::par;

/// Symmetric-or-not nine-point operator on an `nx × ny` grid of unknowns.
///
/// Unknown `(i, j)` has flat index `i * ny + j`; `coeffs[p][3 * (di + 1) + (dj + 1)]`
/// couples `p` to its neighbour at offset `(di, dj)`. Couplings that fall outside the
/// grid are ignored.
#[derive(Debug, Clone)]
pub struct StencilMatrix {
    pub nx: usize,
    pub ny: usize,
    pub coeffs: Vec<[f64; 9]>,
}

impl StencilMatrix {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self { nx, ny, coeffs: vec![[0.0; 9]; nx * ny] }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c[4]).collect()
    }

    /// `y = A x`
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        par::for_each_mut(y, |p, out| {
            let i = p as isize / ny;
            let j = p as isize % ny;
            let c = &self.coeffs[p];
            let mut acc = 0.0;
            for di in -1..=1isize {
                let ii = i + di;
                if ii < 0 || ii >= nx {
                    continue;
                }
                for dj in -1..=1isize {
                    let jj = j + dj;
                    if jj < 0 || jj >= ny {
                        continue;
                    }
                    let k = (3 * (di + 1) + (dj + 1)) as usize;
                    acc += c[k] * x[(ii * ny + jj) as usize];
                }
            }
            *out = acc;
        });
    }

    /// Largest relative asymmetry `|a_pq - a_qp| / max|a|`.
    pub fn asymmetry(&self) -> f64 {
        let ny = self.ny as isize;
        let scale = self.coeffs.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for p in 0..self.len() {
            let i = p as isize / ny;
            let j = p as isize % ny;
            for di in -1..=1isize {
                for dj in -1..=1isize {
                    let (ii, jj) = (i + di, j + dj);
                    if ii < 0 || ii >= self.nx as isize || jj < 0 || jj >= ny {
                        continue;
                    }
                    let q = (ii * ny + jj) as usize;
                    let k = (3 * (di + 1) + (dj + 1)) as usize;
                    let back = (3 * (1 - di) + (1 - dj)) as usize;
                    worst = worst.max((self.coeffs[p][k] - self.coeffs[q][back]).abs());
                }
            }
        }
        worst / scale
    }
}

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for SPD `a`, started from `x`.
pub fn pcg(a: &StencilMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<CgStats> {
    let n = a.len();
    let diag = a.diagonal();
    if let Some(p) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::LinearSolve(format!("non-positive diagonal entry at unknown {p}")));
    }
    let b_norm = par::dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    par::for_each_mut(&mut r, |i, ri| *ri = b[i] - *ri);
    let mut z: Vec<f64> = par::map_indexed(n, |i| r[i] / diag[i]);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = par::dot(&r, &z);
    for it in 0..=max_iter {
        let res = par::dot(&r, &r).sqrt() / b_norm;
        if res <= rel_tol {
            return Ok(CgStats { iterations: it, relative_residual: res });
        }
        if it == max_iter {
            break;
        }
        a.apply(&p, &mut ap);
        let pap = par::dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::LinearSolve(format!("operator not positive definite (pAp = {pap:e})")));
        }
        let alpha = rz / pap;
        par::for_each_mut(x, |i, xi| *xi += alpha * p[i]);
        par::for_each_mut(&mut r, |i, ri| *ri -= alpha * ap[i]);
        par::for_each_mut(&mut z, |i, zi| *zi = r[i] / diag[i]);
        let rz_new = par::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        par::for_each_mut(&mut p, |i, pi| *pi = z[i] + beta * *pi);
    }
    let res = par::dot(&r, &r).sqrt() / b_norm;
    Err(Error::LinearSolve(format!("conjugate gradients stalled after {max_iter} iterations (relative residual {res:e})")))
}

/// Cholesky factor of a banded SPD matrix, stored row-wise: `band[p][k]` holds
/// `L(p, p + k - bw)`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedCholesky {
    /// Factor `a + shift * I`.
    pub fn factor(a: &StencilMatrix, shift: f64) -> Result<Self> {
        let n = a.len();
        let ny = a.ny;
        let bw = ny + 1;
        let w = bw + 1;
        let mut band = vec![0.0; n * w];
        // lower triangle of A into the band
        for p in 0..n {
            let i = p / ny;
            let j = p % ny;
            for di in -1..=0isize {
                for dj in -1..=1isize {
                    if di == 0 && dj > 0 {
                        continue;
                    }
                    let ii = i as isize + di;
                    let jj = j as isize + dj;
                    if ii < 0 || jj < 0 || jj >= ny as isize {
                        continue;
                    }
                    let q = ii as usize * ny + jj as usize;
                    let k = (3 * (di + 1) + (dj + 1)) as usize;
                    band[p * w + (q + bw - p)] = a.coeffs[p][k];
                }
            }
            band[p * w + bw] += shift;
        }
        for p in 0..n {
            let lo = p.saturating_sub(bw);
            for q in lo..=p {
                let mut sum = band[p * w + (q + bw - p)];
                let rlo = lo.max(q.saturating_sub(bw));
                for r in rlo..q {
                    sum -= band[p * w + (r + bw - p)] * band[q * w + (r + bw - q)];
                }
                if q == p {
                    if !(sum > 0.0) {
                        return Err(Error::Numeric(format!("matrix not positive definite at pivot {p} (pivot {sum:e})")));
                    }
                    band[p * w + bw] = sum.sqrt();
                } else {
                    band[p * w + (q + bw - p)] = sum / band[q * w + bw];
                }
            }
        }
        Ok(Self { n, bw, band })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        for p in 0..n {
            let lo = p.saturating_sub(bw);
            let mut s = x[p];
            for r in lo..p {
                s -= self.band[p * w + (r + bw - p)] * x[r];
            }
            x[p] = s / self.band[p * w + bw];
        }
        for p in (0..n).rev() {
            let hi = (p + bw).min(n - 1);
            let mut s = x[p];
            for r in p + 1..=hi {
                s -= self.band[r * w + (p + bw - r)] * x[r];
            }
            x[p] = s / self.band[p * w + bw];
        }
    }
}

/// Lowest `k` eigenvalues (ascending) of the symmetric stencil operator `a`.
///
/// Block inverse iteration on `a + shift I` with Rayleigh–Ritz; `shift` must make
/// the shifted operator positive definite.
pub fn lowest_eigenvalues(a: &StencilMatrix, k: usize, shift: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = a.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("requested {k} eigenvalues of a {n}-dimensional operator")));
    }
    let chol = BandedCholesky::factor(a, shift)?;
    let b = (k + 6).min(n);
    // deterministic start block
    let mut block: Vec<Vec<f64>> = (0..b)
        .map(|c| {
            (0..n)
                .map(|p| {
                    let x = (p as f64 + 1.0) * (c as f64 + 1.0);
                    (x * 0.618_033_988_749_895).fract() - 0.5 + if c == 0 { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    orthonormalize(&mut block);
    let mut prev: Option<Vec<f64>> = None;
    let mut scratch = vec![0.0; n];
    for _ in 0..max_iter {
        for v in block.iter_mut() {
            chol.solve_in_place(v);
        }
        orthonormalize(&mut block);
        let av: Vec<Vec<f64>> = block
            .iter()
            .map(|v| {
                a.apply(v, &mut scratch);
                scratch.clone()
            })
            .collect();
        let mut t = DMatrix::<f64>::zeros(b, b);
        for r in 0..b {
            for c in r..b {
                let val = par::dot(&block[r], &av[c]);
                t[(r, c)] = val;
                t[(c, r)] = val;
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
        let ritz: Vec<f64> = order.iter().map(|&o| eig.eigenvalues[o]).collect();
        let rotated: Vec<Vec<f64>> = order
            .iter()
            .map(|&o| {
                let mut out = vec![0.0; n];
                for (r, v) in block.iter().enumerate() {
                    let coef = eig.eigenvectors[(r, o)];
                    out.iter_mut().zip(v).for_each(|(acc, x)| *acc += coef * x);
                }
                out
            })
            .collect();
        block = rotated;
        let scale = ritz.iter().take(k).fold(1.0f64, |m, v| m.max(v.abs()));
        if let Some(p) = &prev {
            let change = ritz.iter().zip(p).take(k).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            if change <= 1e-13 * scale {
                // residual check on the wanted pairs
                let ok = (0..k).all(|c| {
                    a.apply(&block[c], &mut scratch);
                    let res: f64 = scratch.iter().zip(&block[c]).map(|(av, v)| (av - ritz[c] * v).powi(2)).sum::<f64>().sqrt();
                    res <= 1e-6 * scale.max(shift.abs())
                });
                if ok {
                    return Ok(ritz.into_iter().take(k).collect());
                }
            }
        }
        prev = Some(ritz);
    }
    Err(Error::EigenNonConvergence { iterations: max_iter })
}

fn orthonormalize(block: &mut [Vec<f64>]) {
    for c in 0..block.len() {
        for _pass in 0..2 {
            for r in 0..c {
                let proj = par::dot(&block[r], &block[c]);
                let (head, tail) = block.split_at_mut(c);
                tail[0].iter_mut().zip(&head[r]).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = par::dot(&block[c], &block[c]).sqrt();
        if norm > 0.0 {
            block[c].iter_mut().for_each(|x| *x /= norm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(nx: usize, ny: usize) -> StencilMatrix {
        let mut m = StencilMatrix::zeros(nx, ny);
        for c in m.coeffs.iter_mut() {
            c[4] = 4.0;
            c[1] = -1.0;
            c[3] = -1.0;
            c[5] = -1.0;
            c[7] = -1.0;
        }
        m
    }

    #[test]
    fn cg_and_cholesky_agree() {
        let a = laplacian(12, 9);
        let b: Vec<f64> = (0..a.len()).map(|i| (i as f64 * 0.3).cos()).collect();
        let mut x = vec![0.0; a.len()];
        let stats = pcg(&a, &b, &mut x, 1e-12, 1000).unwrap();
        assert!(stats.relative_residual <= 1e-12);
        let chol = BandedCholesky::factor(&a, 0.0).unwrap();
        let mut y = b.clone();
        chol.solve_in_place(&mut y);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn five_point_spectrum_matches_closed_form() {
        let (nx, ny) = (15, 11);
        let a = laplacian(nx, ny);
        let got = lowest_eigenvalues(&a, 3, 0.0, 500).unwrap();
        let mut exact: Vec<f64> = Vec::new();
        for p in 1..=nx {
            for q in 1..=ny {
                let lx = 2.0 - 2.0 * (p as f64 * std::f64::consts::PI / (nx as f64 + 1.0)).cos();
                let ly = 2.0 - 2.0 * (q as f64 * std::f64::consts::PI / (ny as f64 + 1.0)).cos();
                exact.push(lx + ly);
            }
        }
        exact.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&exact) {
            assert!((g - e).abs() < 1e-9, "{g} vs {e}");
        }
    }

    #[test]
    fn indefinite_shift_is_reported() {
        let a = laplacian(4, 4);
        assert!(matches!(BandedCholesky::factor(&a, -10.0), Err(Error::Numeric(_))));
    }
}
