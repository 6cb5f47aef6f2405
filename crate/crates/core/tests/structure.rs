use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use mindisk_core::blowup::DiskSample;
use mindisk_core::families::*;
use mindisk_core::mesh::SurfaceMesh;
use mindisk_core::multigraph::embed_to_r3;
use mindisk_core::solver::*;
use mindisk_core::structure::*;
use mindisk_core::{Error, Vec3};

const STEP: f64 = 0.1;

fn helicoids() -> &'static SurfaceSequence {
    static SEQ: OnceLock<SurfaceSequence> = OnceLock::new();
    SEQ.get_or_init(|| rescaled_helicoids(6, Sampling::default()).unwrap())
}

fn axis_set(seq: &SurfaceSequence, burn_in: usize) -> SingularSet {
    let probes = probe_lattice(Vec3::zeros(), 0.5, STEP);
    blowup_set(seq, &probes, 0.05, &threshold_schedule(seq, 4.0), burn_in).unwrap()
}

#[test]
fn helicoid_structure_suite() {
    let t = Instant::now();
    let seq = helicoids();
    let set = axis_set(seq, 0);
    let pts = set.positions();
    assert_eq!(pts.len(), 11);
    assert!(set.curvature_unbounded);
    assert!(pts.iter().all(|p| p.x.hypot(p.y) <= STEP));
    let slack = seq.default_slack();
    let cone = cone_property_check(&pts, 1.0, STEP, None, slack).unwrap();
    assert!(cone.passed && cone.containment_ok && cone.accumulation_ok && cone.lipschitz_ok, "{cone:?}");
    let curve = lipschitz_parameterize(&pts, 1.0, slack).unwrap();
    assert!(curve.lipschitz_ok && curve.max_axis_deviation <= STEP);
    assert_eq!(curve.points.len(), 11);
    for e in seq.entries() {
        let disk = DiskSample::from_mesh_ball(&e.mesh, Vec3::zeros(), 1.0).unwrap();
        let census = two_graph_decomposition(&disk, &curve, 1.0, 0.05).unwrap();
        assert_eq!(census.count, 2, "j = {}", e.index);
        assert!(census.components.iter().all(|c| c.is_multigraph));
    }
    let fol = foliation_convergence(seq, &AnnularBox::standard()).unwrap();
    assert!(fol.distances_decreasing && fol.tilts_decreasing);
    for e in &fol.entries {
        assert!(e.leaf_distance <= PI * e.scale, "{e:?}");
    }
    assert!(t.elapsed().as_secs_f64() < 120.0);
}

#[test]
fn helicoid_sheets_in_the_census_are_spaced_by_the_pitch() {
    let seq = helicoids();
    let pts = axis_set(seq, 0).positions();
    let curve = lipschitz_parameterize(&pts, 1.0, seq.default_slack()).unwrap();
    let e = &seq.entries()[4];
    let disk = DiskSample::from_mesh_ball(&e.mesh, Vec3::zeros(), 1.0).unwrap();
    let census = two_graph_decomposition(&disk, &curve, 1.0, 0.05).unwrap();
    for c in &census.components {
        let sep = c.separation.as_ref().unwrap();
        assert!(sep.ordering_consistent);
        assert!((sep.mean_abs / (2.0 * PI * e.scale) - 1.0).abs() < 1e-3, "{sep:?}");
    }
}

#[test]
fn catenoids_concentrate_at_the_origin() {
    let seq = rescaled_catenoids(6, Sampling::default()).unwrap();
    let set = axis_set(&seq, 4);
    assert_eq!(set.positions(), vec![Vec3::zeros()]);
    assert!(axis_set(&seq, 0).points.is_empty());
    let fol = foliation_convergence(&seq, &AnnularBox::standard()).unwrap();
    assert!(fol.distances_decreasing && fol.tilts_decreasing);
    assert!(fol.entries.iter().all(|e| e.sheet_count == 2));
}

#[test]
fn planes_have_no_singular_points() {
    let seq = planes(6, 100).unwrap();
    let set = axis_set(&seq, 0);
    assert!(set.points.is_empty() && !set.curvature_unbounded);
    let fol = foliation_convergence(&seq, &AnnularBox::standard()).unwrap();
    assert!(fol.entries.iter().all(|e| e.leaf_distance == 0.0 && e.tilt == 0.0));
    let m = plane_in_ball(0.0, 1.0, 100).unwrap();
    let c = m.nearest_vertex(Vec3::zeros()).unwrap();
    let disk = DiskSample::new(m, c, 1.0).unwrap();
    let axis = lipschitz_parameterize(&[Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0)], 1.0, 0.0).unwrap();
    let census = two_graph_decomposition(&disk, &axis, 1.0, 0.05).unwrap();
    assert_eq!(census.count, 1);
}

#[test]
fn one_sided_passes_on_a_flat_solved_graph() {
    let dom = AnnularDomain::square(1.0, 9.0, 1, 64).unwrap();
    let b = BoundaryData::from_fn(&dom, |r, t| 0.01 * t.cos() * (r - 1.0) / 8.0).unwrap();
    let (g, _) = solve(&dom, &b, &SolverConfig::default()).unwrap();
    let mesh = SurfaceMesh::from_patch(&embed_to_r3(&g).unwrap(), false).unwrap().translate(Vec3::new(0.0, 0.0, 0.1));
    let center = Vec3::new(5.0, 0.0, 0.0);
    let disk = mesh.clip_ball(center, 3.0).unwrap();
    assert_eq!(disk.euler_characteristic(), 1);
    let rep = one_sided_check(&disk, center, 1.5, 0.1, false).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(rep.components.iter().all(|c| c.is_graph && c.sup_a2_r0sq <= 1.0));
    // scaling the whole configuration leaves the dimensionless report unchanged
    let k = 3.0;
    let scaled = disk.rescale(k).unwrap();
    let rk = one_sided_check(&scaled, center * k, 1.5 * k, 0.1, false).unwrap();
    assert!(rk.passed);
    assert!(
        (rk.components[0].sup_a2_r0sq - rep.components[0].sup_a2_r0sq).abs() < 1e-9 * rep.components[0].sup_a2_r0sq.max(1e-12)
    );
}

#[test]
fn one_sided_fails_on_the_catenoid_neck() {
    let mesh = catenoid_in_ball(0.01, 2.0, Vec3::new(0.0, 0.0, 0.1), Sampling { spacing: 0.002, max_dt: 0.05 }).unwrap();
    assert_eq!(mesh.euler_characteristic(), 0);
    let err = one_sided_check(&mesh, Vec3::zeros(), 1.0, 0.2, false).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(ref m) if m.contains("not a disk")), "{err:?}");
    let rep = one_sided_check(&mesh, Vec3::zeros(), 1.0, 0.2, true).unwrap();
    assert!(rep.topology.overridden && !rep.passed);
    let sup = rep.components.iter().map(|c| c.sup_a2_r0sq).fold(0.0, f64::max);
    assert!(sup > 1.0);
    assert!((sup / 2e4 - 1.0).abs() < 1e-9, "{sup}");
}

#[test]
fn one_sided_hypotheses() {
    let m = plane_in_ball(0.0, 2.0, 40).unwrap();
    // surface touches the lower half-space
    let r = one_sided_check(&m, Vec3::new(0.0, 0.0, 0.0), 1.0, 0.2, false);
    assert!(matches!(r, Err(Error::Hypothesis(_))));
    let lifted = m.translate(Vec3::new(0.0, 0.0, 0.1));
    let r = one_sided_check(&lifted, Vec3::zeros(), 0.5, 0.2, false);
    assert!(matches!(r, Err(Error::Hypothesis(_))), "{r:?}");
}
