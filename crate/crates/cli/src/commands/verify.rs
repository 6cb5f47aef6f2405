use anyhow::{Context, Result};
use mindisk_core::blowup::{find_blowup_pair, initial_separation_check, BlowUpPair, DiskSample, PairReport, SeparationRatio};
use mindisk_core::families::{
    catenoid_in_ball, helicoid_in_ball, plane_in_ball, planes, rescaled_catenoids, rescaled_helicoids, Sampling,
};
use mindisk_core::io::{fmt_f64, write_points_csv};
use mindisk_core::multigraph::{
    fit_log_decay, fit_sublinear_exponent, handedness, helicoid_sheet, is_embedded, nonproper_graph, separation, FitOptions,
    LogFit, MultiGraph, Sheet, SublinearFit,
};
use mindisk_core::structure::{
    blowup_set, cone_property_check, foliation_convergence, lipschitz_parameterize, one_sided_check, probe_lattice,
    threshold_schedule, two_graph_decomposition, AnnularBox, Census, ConeReport, FoliationReport, LipschitzCurve, OneSidedReport,
    SingularSet, SurfaceSequence,
};
use mindisk_core::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Outcome;
use crate::config::{Family, RunConfig, Suite, SurfaceKind};
use crate::failure::Usage;
use crate::inputs::{load_mesh, load_multigraph};
use crate::output::OutputDir;

fn point(p: [f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

fn sampling(cfg: &RunConfig) -> Sampling {
    Sampling { spacing: cfg.spacing, max_dt: cfg.max_dt }
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let suite = cfg.suite.ok_or_else(|| Usage::new("verify needs --suite blowup|structure|one-sided|separation"))?;
    let passed = match suite {
        Suite::Blowup => blowup(cfg, out)?,
        Suite::Structure => structure(cfg, out)?,
        Suite::OneSided => one_sided(cfg, out)?,
        Suite::Separation => separation_suite(cfg, out)?,
    };
    println!("suite {suite:?}: {}", if passed { "pass" } else { "FAIL" });
    Ok(if passed { Outcome::ok() } else { Outcome::check_failed() })
}

#[derive(Serialize)]
struct BlowupReport {
    curvature_source: &'static str,
    disk_vertices: usize,
    center: [f64; 3],
    r0: f64,
    pair: BlowUpPair,
    report: PairReport,
    initial_separation: Option<SeparationRatio>,
    passed: bool,
}

fn blowup(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let (disk, source) = match &cfg.input {
        Some(path) => {
            let (mesh, source) = load_mesh(path, cfg.a2.as_deref())?;
            (DiskSample::from_mesh_ball(&mesh, point(cfg.center), cfg.r0)?, source)
        }
        None => {
            let mesh = match cfg.family {
                Family::RescaledHelicoid => helicoid_in_ball(cfg.scale, cfg.r0, sampling(cfg))?,
                Family::RescaledCatenoid => catenoid_in_ball(cfg.scale, cfg.r0, Vec3::zeros(), sampling(cfg))?,
                Family::Plane => plane_in_ball(0.0, cfg.r0, cfg.grid[0])?,
            };
            let c = mesh.nearest_vertex(Vec3::zeros()).ok_or_else(|| Usage::new("empty mesh"))?;
            (DiskSample::new(mesh, c, cfg.r0)?, "analytic")
        }
    };
    let (pair, report) = find_blowup_pair(&disk, cfg.c)?;
    let initial_separation = if cfg.input.is_none() && cfg.family == Family::RescaledHelicoid {
        let a = cfg.scale;
        let g = helicoid_sheet(Sheet::First, pair.s / a, 10.0 * pair.s / a, 2, 8, 32)?.rescale(a)?;
        Some(initial_separation_check(&disk, &pair, &g, None)?)
    } else {
        None
    };
    let passed = report.passed();
    let x = disk.center_position();
    println!(
        "blow-up pair: y = {:?}, s = {}, margins sup {} center_F {}",
        report.y_position, pair.s, report.margins.sup_bound, report.margins.center_f
    );
    let rep = BlowupReport {
        curvature_source: source,
        disk_vertices: disk.mesh().vertex_count(),
        center: [x.x, x.y, x.z],
        r0: cfg.r0,
        pair,
        report,
        initial_separation,
        passed,
    };
    out.write_json("blowup.json", &rep)?;
    Ok(passed)
}

#[derive(Serialize)]
struct CensusEntry {
    index: usize,
    scale: f64,
    census: Census,
}

#[derive(Serialize)]
struct StructureReport {
    family: Family,
    count: usize,
    probes: usize,
    slack: f64,
    singular_set: SingularSet,
    cone: Option<ConeReport>,
    curve: Option<LipschitzCurve>,
    axis_recovered: Option<bool>,
    census: Vec<CensusEntry>,
    foliation: FoliationReport,
    foliation_ok: bool,
    passed: bool,
}

fn probes(cfg: &RunConfig) -> Vec<Vec3> {
    let mut pts = probe_lattice(point(cfg.center), cfg.probe_half_width, cfg.probe_step);
    if cfg.jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let amp = cfg.jitter * cfg.probe_step;
        for p in &mut pts {
            *p += Vec3::new(rng.random_range(-amp..=amp), rng.random_range(-amp..=amp), rng.random_range(-amp..=amp));
        }
    }
    pts
}

fn family(cfg: &RunConfig) -> Result<SurfaceSequence> {
    Ok(match cfg.family {
        Family::RescaledHelicoid => rescaled_helicoids(cfg.count, sampling(cfg))?,
        Family::RescaledCatenoid => rescaled_catenoids(cfg.count, sampling(cfg))?,
        Family::Plane => planes(cfg.count, cfg.grid[0])?,
    })
}

fn structure(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let seq = family(cfg)?;
    let probes = probes(cfg);
    let thresholds = threshold_schedule(&seq, cfg.threshold_base);
    let set = blowup_set(&seq, &probes, cfg.probe_radius, &thresholds, cfg.burn_in)?;
    let pts = set.positions();
    let slack = seq.default_slack();
    // jitter widens the gaps between probe levels to at most step · (1 + 2 jitter)
    let epsilon = cfg.epsilon.unwrap_or(cfg.probe_step * (1.0 + 2.0 * cfg.jitter));
    let (mut cone, mut curve, mut census) = (None, None, Vec::new());
    if !pts.is_empty() {
        let c = cone_property_check(&pts, cfg.delta, epsilon, None, slack)?;
        if c.passed {
            let lc = lipschitz_parameterize(&pts, cfg.delta, slack)?;
            for e in seq.entries() {
                let census_j = DiskSample::from_mesh_ball(&e.mesh, point(cfg.center), cfg.r0)
                    .and_then(|disk| two_graph_decomposition(&disk, &lc, cfg.delta0, cfg.exclusion))
                    .with_context(|| format!("census of entry j = {}", e.index))?;
                census.push(CensusEntry { index: e.index, scale: e.scale, census: census_j });
            }
            curve = Some(lc);
        }
        cone = Some(c);
    }
    let foliation = foliation_convergence(&seq, &AnnularBox::standard())?;
    let foliation_ok = foliation.distances_decreasing || foliation.entries.iter().all(|e| e.leaf_distance == 0.0);
    let axis_recovered = curve.as_ref().map(|c| c.lipschitz_ok && c.max_axis_deviation <= cfg.probe_step);
    let passed = cone.as_ref().is_none_or(|c| c.passed) && axis_recovered.unwrap_or(true) && foliation_ok;
    out.write("singular_set.csv", |w| write_points_csv(&pts, w))?;
    if let Some(c) = &curve {
        out.write("curve.csv", |w| write_points_csv(&c.positions(), w))?;
    }
    println!(
        "singular set: {} points; cone {}; census counts {:?}; foliation distances decreasing {}",
        pts.len(),
        cone.as_ref().map_or("skipped (empty set)".into(), |c| if c.passed { "pass".to_string() } else { "fail".to_string() }),
        census.iter().map(|c| c.census.count).collect::<Vec<_>>(),
        foliation.distances_decreasing
    );
    let rep = StructureReport {
        family: cfg.family,
        count: cfg.count,
        probes: probes.len(),
        slack,
        singular_set: set,
        cone,
        curve,
        axis_recovered,
        census,
        foliation,
        foliation_ok,
        passed,
    };
    out.write_json("structure.json", &rep)?;
    Ok(passed)
}

#[derive(Serialize)]
struct OneSidedOutput {
    curvature_source: &'static str,
    #[serde(flatten)]
    report: OneSidedReport,
}

fn one_sided(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let path = cfg.input.as_ref().ok_or_else(|| Usage::new("the one-sided suite needs --input mesh.obj"))?;
    let (mesh, source) = load_mesh(path, cfg.a2.as_deref())?;
    let report = one_sided_check(&mesh, point(cfg.center), cfg.r0, cfg.epsilon.unwrap_or(0.1), cfg.topology_override)?;
    let passed = report.passed;
    for (k, c) in report.components.iter().enumerate() {
        println!("component {k}: sup |A|^2 r0^2 = {}, graph {}", c.sup_a2_r0sq, c.is_graph);
    }
    out.write_json("one_sided.json", &OneSidedOutput { curvature_source: source, report })?;
    Ok(passed)
}

#[derive(Serialize)]
struct SeparationReport {
    sheets: usize,
    embedded: bool,
    min_abs_w: f64,
    handedness: Option<String>,
    sublinear: Result<SublinearFit, String>,
    logarithmic: Result<LogFit, String>,
}

fn source_graph(cfg: &RunConfig) -> Result<MultiGraph> {
    if let Some(path) = &cfg.input {
        return load_multigraph(path);
    }
    let [n_rho, per_sheet] = cfg.grid;
    let n_theta = per_sheet * cfg.sheets;
    Ok(match cfg.surface {
        SurfaceKind::HelicoidSheet => helicoid_sheet(
            if cfg.sheet == 1 { Sheet::First } else { Sheet::Second },
            cfg.rin,
            cfg.rout,
            cfg.sheets,
            n_rho,
            n_theta,
        )?,
        SurfaceKind::Nonproper => nonproper_graph(cfg.rin, cfg.rout, cfg.sheets, n_rho, n_theta)?,
        other => return Err(Usage::new(format!("separation needs --input or a multi-valued surface, not {other:?}")).into()),
    })
}

fn separation_suite(cfg: &RunConfig, out: &mut OutputDir) -> Result<bool> {
    let g = source_graph(cfg)?;
    let prof = separation(&g)?;
    let (embedded, min_abs_w) = is_embedded(&g)?;
    let mut opts = FitOptions::new(cfg.rho0).with_mode(cfg.ray.into());
    if let Some([lo, hi]) = cfg.window {
        opts = opts.with_window(lo, hi);
    }
    let rep = SeparationReport {
        sheets: g.sheets(),
        embedded,
        min_abs_w,
        handedness: handedness(&g).ok().map(|h| format!("{h:?}").to_lowercase()),
        sublinear: fit_sublinear_exponent(&prof, &opts).map_err(|e| e.to_string()),
        logarithmic: fit_log_decay(&prof, &opts).map_err(|e| e.to_string()),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rho0", "alpha_hat", "c_hat", "residual", "kind"])?;
    if let Ok(f) = &rep.sublinear {
        w.write_record([fmt_f64(f.rho0), fmt_f64(f.alpha_hat), String::new(), fmt_f64(f.residual), "sublinear".into()])?;
    }
    if let Ok(f) = &rep.logarithmic {
        w.write_record([fmt_f64(f.rho0), String::new(), fmt_f64(f.c_hat), fmt_f64(f.residual), "logarithmic".into()])?;
    }
    let table = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    out.write_bytes("fits.csv", &table)?;
    println!(
        "embedded {embedded} (min |w| = {min_abs_w}); alpha_hat {}; c_hat {}",
        rep.sublinear.as_ref().map_or("undefined".into(), |f| f.alpha_hat.to_string()),
        rep.logarithmic.as_ref().map_or("undefined".into(), |f| f.c_hat.to_string())
    );
    out.write_json("separation.json", &rep)?;
    Ok(embedded)
}
