use std::f64::consts::{E, PI};
use std::time::Instant;

use mindisk_core::multigraph::*;
use mindisk_core::Error;

#[test]
fn helicoid_sheet_values_and_deck_shift() {
    let g1 = helicoid_sheet(Sheet::First, 1.0, 5.0, 6, 8, 48).unwrap();
    let g2 = helicoid_sheet(Sheet::Second, 1.0, 5.0, 6, 8, 48).unwrap();
    let c = g1.center_column();
    assert_eq!(g1.u(0, c), 0.0);
    assert_eq!(g2.u(0, c), PI);
    let p = g1.period_nodes();
    for i in 0..=g1.n_rho() {
        for j in 0..=g1.n_theta() - p {
            assert!((g1.u(i, j + p) - (g1.u(i, j) + 2.0 * PI)).abs() < 1e-12);
        }
    }
}

#[test]
fn helicoid_separation_is_two_pi() {
    let t = Instant::now();
    for n in [2, 4, 16, 64] {
        let g = helicoid_sheet(Sheet::First, 0.5, 50.0, n, 32, 8 * n).unwrap();
        let prof = separation(&g).unwrap();
        assert!(prof.w.iter().all(|w| (w - 2.0 * PI).abs() < 1e-12));
        let (emb, m) = is_embedded(&g).unwrap();
        assert!(emb && (m - 2.0 * PI).abs() < 1e-12);
        assert_eq!(handedness(&g).unwrap(), Handedness::Right);
    }
    assert!(t.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn separation_errors_and_trivial_cases() {
    let g = helicoid_sheet(Sheet::First, 1.0, 2.0, 1, 4, 8).unwrap();
    assert_eq!(separation(&g).unwrap_err(), Error::NoOverlap(1));
    let flat = MultiGraph::from_fn(1.0, 2.0, 3, 4, 12, |_, _| 0.0).unwrap();
    assert_eq!(is_embedded(&flat).unwrap(), (false, 0.0));
    assert!(matches!(handedness(&flat), Err(Error::UndefinedHandedness { .. })));
    let left = MultiGraph::from_fn(1.0, 2.0, 3, 4, 12, |_, t| -t).unwrap();
    assert_eq!(handedness(&left).unwrap(), Handedness::Left);
    let shifted = MultiGraph::from_fn(1.0, 2.0, 3, 4, 12, |_, t| t + 1000.0).unwrap();
    assert_eq!(handedness(&shifted).unwrap(), Handedness::Right);
    assert!(MultiGraph::from_fn(1.0, 2.0, 3, 4, 13, |_, t| t).is_err());
    assert!(MultiGraph::from_fn(1.0, 2.0, 65, 4, 130, |_, t| t).is_err());
}

#[test]
fn nonproper_graph_values() {
    assert!(matches!(nonproper_graph(1.0, 5.0, 2, 4, 8), Err(Error::LogSingularity(_))));
    let g = nonproper_graph(2.0, 100.0, 6, 64, 96).unwrap();
    assert!(g.values().iter().all(|u| u.abs() < PI / 2.0));
    let (emb, m) = is_embedded(&g).unwrap();
    assert!(emb);
    assert!((m - 0.018347023011967334).abs() < 1e-12, "{m}");
    let h = MultiGraph::from_fn(E, 10.0, 2, 4, 8, |r, t| (t / r.ln()).atan()).unwrap();
    assert_eq!(h.u(0, h.center_column()), 0.0);
    assert!(((1.0f64 / E.ln()).atan() - PI / 4.0).abs() < 1e-15);
    let q = MultiGraph::from_fn((2.0 * PI).exp(), 1e4, 2, 4, 8, |r, t| (t / r.ln()).atan()).unwrap();
    let prof = separation(&q).unwrap();
    assert!((prof.at(0, prof.center_column()) - PI / 4.0).abs() < 1e-12);
    let patch = embed_to_r3(&g).unwrap();
    assert!(patch.positions().iter().all(|x| x.z.abs() < PI / 2.0));
}

#[test]
fn nonproper_log_decay() {
    let t = Instant::now();
    let g = nonproper_graph(E, 40f64.exp(), 2, 390, 8).unwrap();
    let prof = separation(&g).unwrap();
    let fit = fit_log_decay(&prof, &FitOptions::new(1.0).with_window(10f64.exp(), 40f64.exp())).unwrap();
    assert!((fit.c_hat / (2.0 * PI) - 1.0).abs() < 0.05, "{fit:?}");
    assert!(fit.logarithmic, "{fit:?}");
    assert!(fit.samples > 290);
    assert!(t.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn fits_on_exact_models() {
    let rho: Vec<f64> = (0..=40).map(|k| (0.25 * k as f64).exp()).collect();
    let c = fit_sublinear_exponent(&radial_profile(rho.clone(), |_| 2.0 * PI), &FitOptions::new(1.0)).unwrap();
    assert!(c.alpha_hat < 1e-12 && c.envelope_holds);
    let h = fit_sublinear_exponent(&radial_profile(rho.clone(), f64::sqrt), &FitOptions::new(1.0)).unwrap();
    assert!((h.alpha_hat - 0.5).abs() < 1e-6 && h.residual < 1e-12 && h.envelope_holds);
    let l = fit_log_decay(&radial_profile(rho.clone(), |r| 3.0 / r.ln()), &FitOptions::new(1.0)).unwrap();
    assert!((l.c_hat - 3.0).abs() < 1e-6 && l.logarithmic);
    let k = fit_log_decay(&radial_profile(rho.clone(), |_| 1.0), &FitOptions::new(1.0)).unwrap();
    assert!(!k.logarithmic);
    let zero = radial_profile(rho.clone(), |r| if r > 5.0 && r < 6.0 { 0.0 } else { 1.0 });
    assert!(matches!(fit_sublinear_exponent(&zero, &FitOptions::new(1.0)), Err(Error::FitUndefined(_))));
    assert!(matches!(
        fit_log_decay(&radial_profile(rho[..5].to_vec(), |_| 1.0), &FitOptions::new(1.0)),
        Err(Error::FitUndefined(_))
    ));
}

#[test]
fn ray_modes() {
    let g = MultiGraph::from_fn(1.0, 50.0, 4, 16, 32, |r, t| t * (1.0 + 0.1 * t.cos()) * r.powf(0.25)).unwrap();
    let prof = separation(&g).unwrap();
    let c = prof.radial_samples(RayMode::Center);
    let m = prof.radial_samples(RayMode::MaxOverTheta);
    assert!(c.iter().zip(&m).all(|(a, b)| a.1 <= b.1 && a.0 == b.0));
}

#[test]
fn embedding_of_helicoid_sheets() {
    for which in [Sheet::First, Sheet::Second] {
        let g = helicoid_sheet(which, 0.5, 3.0, 4, 16, 64).unwrap();
        let patch = embed_to_r3(&g).unwrap();
        for (p, x) in patch.positions().iter().enumerate() {
            let (i, j) = g.node(p);
            let rho = g.rho(i);
            // a point (s cos t, s sin t, t) with t = x₃ and s = ±ρ
            let t = x.z;
            let s = if (t.cos() * x.x + t.sin() * x.y) >= 0.0 { rho } else { -rho };
            assert!((x.x - s * t.cos()).abs() < 1e-12 && (x.y - s * t.sin()).abs() < 1e-12, "{i} {j}");
        }
    }
}
