//! Finite-difference stencils along one grid line of `n + 1` nodes.
//!
//! Fourth-order central stencils two or more nodes away from the ends, second-order
//! central stencils one node in, and second-order one-sided stencils on the end nodes.

use crate::par;
use crate::Vec3;

/// `(first node, weights)` of the first-derivative stencil at node `k`, unscaled by `h`.
pub(crate) fn first(k: usize, n: usize) -> (usize, &'static [f64]) {
    const FOURTH: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
    const CENTRAL: [f64; 3] = [-0.5, 0.0, 0.5];
    const LEFT: [f64; 3] = [-1.5, 2.0, -0.5];
    const RIGHT: [f64; 3] = [0.5, -2.0, 1.5];
    if k == 0 {
        (0, &LEFT)
    } else if k == n {
        (n - 2, &RIGHT)
    } else if k >= 2 && k + 2 <= n {
        (k - 2, &FOURTH)
    } else {
        (k - 1, &CENTRAL)
    }
}

/// Second-derivative stencil at node `k`, unscaled by `h²`.
pub(crate) fn second(k: usize, n: usize) -> (usize, &'static [f64]) {
    const FOURTH: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
    const CENTRAL: [f64; 3] = [1.0, -2.0, 1.0];
    const LEFT4: [f64; 4] = [2.0, -5.0, 4.0, -1.0];
    const RIGHT4: [f64; 4] = [-1.0, 4.0, -5.0, 2.0];
    if k == 0 {
        if n >= 3 {
            (0, &LEFT4)
        } else {
            (0, &CENTRAL)
        }
    } else if k == n {
        if n >= 3 {
            (n - 3, &RIGHT4)
        } else {
            (n - 2, &CENTRAL)
        }
    } else if k >= 2 && k + 2 <= n {
        (k - 2, &FOURTH)
    } else {
        (k - 1, &CENTRAL)
    }
}

/// Direction of differentiation on a row-major `(n_s + 1) × (n_t + 1)` field.
#[derive(Clone, Copy)]
pub(crate) enum Axis {
    S,
    T,
}

pub(crate) fn apply<T>(field: &[T], n_s: usize, n_t: usize, h: f64, axis: Axis, order: u8) -> Vec<T>
where
    T: Copy + Send + Sync + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Zero,
{
    let scale = if order == 1 { 1.0 / h } else { 1.0 / (h * h) };
    par::map_indexed(field.len(), |p| {
        let (i, j) = (p / (n_t + 1), p % (n_t + 1));
        let (k, n) = match axis {
            Axis::S => (i, n_s),
            Axis::T => (j, n_t),
        };
        let (start, w) = if order == 1 { first(k, n) } else { second(k, n) };
        let mut acc = T::zero();
        for (m, wm) in w.iter().enumerate() {
            if *wm == 0.0 {
                continue;
            }
            let q = match axis {
                Axis::S => (start + m) * (n_t + 1) + j,
                Axis::T => i * (n_t + 1) + start + m,
            };
            acc = acc + field[q] * *wm;
        }
        acc * scale
    })
}

pub(crate) trait Zero {
    fn zero() -> Self;
}

impl Zero for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Zero for Vec3 {
    fn zero() -> Self {
        Vec3::zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(f: impl Fn(f64) -> f64, n: usize, h: f64) -> Vec<f64> {
        // an (n+1) x 3 field constant along t
        (0..=n).flat_map(|k| [f(k as f64 * h); 3]).collect()
    }

    #[test]
    fn stencils_are_exact_on_quadratics() {
        let (n, h) = (8, 0.1);
        let field = line(|x| 3.0 * x * x - 2.0 * x + 1.0, n, h);
        let d1 = apply(&field, n, 2, h, Axis::S, 1);
        let d2 = apply(&field, n, 2, h, Axis::S, 2);
        for k in 0..=n {
            let x = k as f64 * h;
            assert!((d1[k * 3] - (6.0 * x - 2.0)).abs() < 1e-11, "first at {k}");
            assert!((d2[k * 3] - 6.0).abs() < 1e-9, "second at {k}");
        }
    }

    #[test]
    fn interior_stencils_are_exact_on_quartics() {
        let (n, h) = (8, 0.1);
        let field = line(|x| x.powi(4) - x.powi(3), n, h);
        let d1 = apply(&field, n, 2, h, Axis::S, 1);
        let d2 = apply(&field, n, 2, h, Axis::S, 2);
        for k in 2..=n - 2 {
            let x = k as f64 * h;
            assert!((d1[k * 3] - (4.0 * x.powi(3) - 3.0 * x * x)).abs() < 1e-11, "first at {k}");
            assert!((d2[k * 3] - (12.0 * x * x - 6.0 * x)).abs() < 1e-9, "second at {k}");
        }
    }

    #[test]
    fn weights_sum_to_zero() {
        for n in [2usize, 3, 4, 9] {
            for k in 0..=n {
                assert!(first(k, n).1.iter().sum::<f64>().abs() < 1e-15);
                assert!(second(k, n).1.iter().sum::<f64>().abs() < 1e-14);
            }
        }
    }
}
