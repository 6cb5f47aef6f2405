use std::f64::consts::PI;

use approx::assert_relative_eq;
use mindisk_core::surface::*;
use mindisk_core::Vec3;

fn bump(z: f64) -> f64 {
    if z.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - z * z)).exp()
    } else {
        0.0
    }
}

type Maker = fn((f64, f64), (f64, f64), usize, usize, DerivMode) -> mindisk_core::Result<ParamPatch>;

fn max_mean_cd(surface: Maker, n: usize) -> f64 {
    let p = surface((-1.0, 1.0), (-PI / 2.0, PI / 2.0), n, n, DerivMode::CentralDifference).unwrap();
    fundamental_forms(&p).unwrap().max_abs_mean()
}

#[test]
fn analytic_helicoid_and_catenoid_are_minimal() {
    let h = make_helicoid((-3.0, 3.0), (-2.0 * PI, 2.0 * PI), 64, 256, DerivMode::Analytic).unwrap();
    let c = make_catenoid((-2.0, 2.0), (0.0, 2.0 * PI), 64, 128, DerivMode::Analytic).unwrap();
    for p in [&h, &c] {
        let g = fundamental_forms(p).unwrap();
        assert!(g.max_abs_mean() <= 1e-10, "{}", g.max_abs_mean());
    }
}

#[test]
fn difference_mode_mean_curvature_is_second_order() {
    for surface in [make_helicoid, make_catenoid] {
        let e: Vec<f64> = [64, 128, 256].iter().map(|&n| max_mean_cd(surface, n)).collect();
        for k in 0..2 {
            let order = (e[k] / e[k + 1]).log2();
            assert!(order >= 1.9, "errors {e:?}");
        }
    }
}

#[test]
fn closed_form_curvatures() {
    let h = make_helicoid((-2.0, 2.0), (0.0, 1.0), 16, 4, DerivMode::Analytic).unwrap();
    let g = fundamental_forms(&h).unwrap();
    for p in 0..h.node_count() {
        let s = h.s(h.node(p).0);
        assert_relative_eq!(g.a2[p], 2.0 / (1.0 + s * s).powi(2), max_relative = 1e-13);
    }
    let c = make_catenoid((-1.0, 1.0), (0.0, PI), 2, 2, DerivMode::Analytic).unwrap();
    let g = fundamental_forms(&c).unwrap();
    assert_relative_eq!(g.a2[c.index(1, 1)], 2.0, max_relative = 1e-14);
    assert_relative_eq!(g.a2[c.index(0, 0)], 2.0 / 1f64.cosh().powi(4), max_relative = 1e-13);
}

#[test]
fn curvature_identity_on_minimal_nodes() {
    let patches = [
        make_helicoid((-3.0, 3.0), (-PI, PI), 64, 64, DerivMode::Analytic).unwrap(),
        make_catenoid((-2.0, 2.0), (0.0, 2.0 * PI), 64, 64, DerivMode::Analytic).unwrap(),
        rescale(&make_helicoid((-50.0, 50.0), (-PI, PI), 64, 64, DerivMode::Analytic).unwrap(), 0.01).unwrap(),
    ];
    let mut checked = 0;
    for p in &patches {
        let g = fundamental_forms(p).unwrap();
        for k in 0..g.len() {
            if g.mean[k].abs() <= 1e-8 {
                assert!((g.a2[k] + 2.0 * g.gauss[k]).abs() <= 1e-8 * (1.0 + g.gauss[k].abs()));
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 3 * 65 * 65);
}

#[test]
fn rescaling_covariance() {
    let p = make_helicoid((-2.0, 2.0), (-PI, PI), 32, 32, DerivMode::Analytic).unwrap();
    let g = fundamental_forms(&p).unwrap();
    let axis = g.a2[p.index(16, 16)];
    assert_relative_eq!(axis, 2.0, max_relative = 1e-15);
    for a in [2.0, 0.1] {
        let q = rescale(&p, a).unwrap();
        let gq = fundamental_forms(&q).unwrap();
        for k in 0..g.len() {
            assert_relative_eq!(gq.a2[k], g.a2[k] / (a * a), max_relative = 1e-12);
        }
        assert_relative_eq!(area(&q), a * a * area(&p), max_relative = 1e-12);
    }
    assert_eq!(rescale(&p, 1.0).unwrap(), p);
    assert!(rescale(&p, 0.0).is_err());
}

#[test]
fn areas() {
    let flat = make_graph_fn((0.0, 1.0), (0.0, 1.0), 16, 16, |_, _| 0.0).unwrap();
    assert!((area(&flat) - 1.0).abs() < 1e-12);
    let lifted = make_graph_fn((0.0, 1.0), (0.0, 1.0), 16, 16, |_, _| 5.0).unwrap();
    assert!((area(&lifted) - 1.0).abs() < 1e-12);
    let exact = PI * (2f64.sqrt() + 1f64.asinh());
    let e: Vec<f64> = [32, 64]
        .iter()
        .map(|&n| {
            let h = make_helicoid((0.0, 1.0), (0.0, 2.0 * PI), n, n, DerivMode::Analytic).unwrap();
            (area(&h) - 7.211799724207046).abs()
        })
        .collect();
    assert!((exact - 7.211799724207046).abs() < 1e-14);
    assert!(e[1] < 1e-3 && (e[0] / e[1]).log2() > 1.9, "{e:?}");
}

#[test]
fn ruled_helicoid_matches_generator() {
    let n_t = 32;
    let ts: Vec<f64> = (0..=n_t).map(|j| -PI + 2.0 * PI * j as f64 / n_t as f64).collect();
    let beta: Vec<Vec3> = ts.iter().map(|&t| Vec3::new(0.0, 0.0, t)).collect();
    let delta: Vec<Vec3> = ts.iter().map(|&t| Vec3::new(t.cos(), t.sin(), 0.0)).collect();
    let r = make_ruled(&beta, &delta, (-1.0, 1.0), (-PI, PI), 16).unwrap();
    let h = make_helicoid((-1.0, 1.0), (-PI, PI), 16, n_t, DerivMode::Analytic).unwrap();
    for (a, b) in r.positions().iter().zip(h.positions()) {
        assert!((a - b).norm() < 1e-15);
    }
    let g = fundamental_forms(&r).unwrap();
    for i in 1..16 {
        for j in 1..n_t {
            assert!(g.gauss[r.index(i, j)] <= 1e-12);
        }
    }
    let zero = vec![Vec3::zeros(); 5];
    assert!(make_ruled(&beta[..5], &zero, (0.0, 1.0), (0.0, 1.0), 4).is_err());
}

#[test]
fn parabolic_graph_pinned_curvature() {
    let p = make_graph_fn((-0.5, 0.5), (-0.5, 0.5), 64, 64, |x, _| x * x).unwrap();
    let g = fundamental_forms(&p).unwrap();
    assert!((g.mean[p.index(32, 32)] + 2.0).abs() < 1e-12);
    let q = p.index(48, 32);
    assert!((g.mean[q] + 1.4310835055998654).abs() < 1e-3);
}

#[test]
fn half_catenoid_graph_converges() {
    let e: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let p = make_graph_fn((1.5, 2.5), (-1.0, 1.0), n, n, |x, y| (x * x + y * y).sqrt().acosh()).unwrap();
            fundamental_forms(&p).unwrap().max_abs_mean()
        })
        .collect();
    assert!((e[0] / e[1]).log2() > 1.9 && (e[1] / e[2]).log2() > 1.9, "{e:?}");
}

#[test]
fn first_variation_vanishes_on_helicoid() {
    let p = make_helicoid((-1.0, 1.0), (-PI / 2.0, PI / 2.0), 128, 128, DerivMode::Analytic).unwrap();
    let phi = VariationField::from_fn(&p, |s, t| bump(s / 0.8) * bump(t / 1.2)).unwrap();
    let v = first_variation(&p, &phi, 1e-4).unwrap();
    assert!(v.numeric_derivative.abs() <= 1e-6 && v.integral_phi_h.abs() <= 1e-6, "{v:?}");
    let plane = make_graph_fn((0.0, 1.0), (0.0, 1.0), 32, 32, |_, _| 0.0).unwrap();
    let phi = VariationField::from_fn(&plane, |x, y| bump((x - 0.5) / 0.3) * bump((y - 0.5) / 0.3)).unwrap();
    let v = first_variation(&plane, &phi, 1e-3).unwrap();
    assert!(v.numeric_derivative.abs() < 1e-12 && v.integral_phi_h.abs() < 1e-12);
}

#[test]
fn first_variation_on_parabolic_graph() {
    let p = make_graph_fn((-0.5, 0.5), (-0.5, 0.5), 256, 256, |x, _| x * x).unwrap();
    let oracle = [
        ((0.0, 0.0, 0.3, 0.3, 1.0), -0.24882623643949764),
        ((0.1, -0.05, 0.25, 0.35, 0.5), -0.11881255155140741),
        ((-0.15, 0.1, 0.2, 0.2, 2.0), -0.21052585687858547),
    ];
    for ((cx, cy, rx, ry, amp), value) in oracle {
        let phi = VariationField::from_fn(&p, |x, y| amp * bump((x - cx) / rx) * bump((y - cy) / ry)).unwrap();
        let v = first_variation(&p, &phi, 1e-4).unwrap();
        let rel = v.abs_gap() / v.integral_phi_h.abs();
        assert!(rel < 1e-3, "{v:?}");
        assert!(((v.integral_phi_h - value) / value).abs() < 1e-3, "{v:?} vs {value}");
    }
}

#[test]
fn jacobi_spectrum() {
    let plane = make_graph_fn((0.0, 1.0), (0.0, 1.0), 64, 64, |_, _| 0.0).unwrap();
    let ev = jacobi_smallest_eigenvalues(&plane, 3).unwrap();
    assert!((ev[0] / (2.0 * PI * PI) - 1.0).abs() < 0.02, "{ev:?}");
    assert!(ev.windows(2).all(|w| w[0] <= w[1]) && ev[0] > 0.0);
    let cat = make_graph_fn((1.2, 2.8), (-1.0, 1.0), 64, 64, |x, y| (x * x + y * y).sqrt().acosh()).unwrap();
    let ev = jacobi_smallest_eigenvalues(&cat, 1).unwrap();
    assert!(ev[0] >= -1e-4, "{ev:?}");
    assert!(jacobi_smallest_eigenvalues(&cat, 0).is_err());
}
