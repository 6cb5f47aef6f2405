use std::f64::consts::PI;

use anyhow::Result;
use mindisk_core::io::{write_geometry_csv, write_mesh_csv, write_multigraph_csv, write_obj, write_separation_csv};
use mindisk_core::mesh::SurfaceMesh;
use mindisk_core::multigraph::{embed_to_r3, handedness, helicoid_sheet, is_embedded, nonproper_graph, separation, Sheet};
use mindisk_core::surface::{
    area, fundamental_forms, make_catenoid, make_graph_fn, make_helicoid, make_ruled, rescale, GeomData, ParamPatch,
};
use mindisk_core::Vec3;
use serde::Serialize;

use super::Outcome;
use crate::config::{GraphFn, RunConfig, SurfaceKind};
use crate::output::OutputDir;

#[derive(Serialize)]
struct PatchSummary {
    surface: SurfaceKind,
    nodes: usize,
    mesh_vertices: usize,
    mesh_triangles: usize,
    area: f64,
    max_abs_h: f64,
    max_a2: f64,
    min_gauss: f64,
    max_gauss: f64,
}

#[derive(Serialize)]
struct GraphSummary {
    surface: SurfaceKind,
    r_in: f64,
    r_out: f64,
    sheets: usize,
    n_rho: usize,
    n_theta: usize,
    max_abs_u: f64,
    embedded: Option<bool>,
    min_abs_w: Option<f64>,
    handedness: Option<String>,
}

pub fn build_patch(cfg: &RunConfig) -> Result<ParamPatch> {
    let (s, t) = ((cfg.s[0], cfg.s[1]), (cfg.t[0], cfg.t[1]));
    let [ns, nt] = cfg.grid;
    let patch = match cfg.surface {
        SurfaceKind::Helicoid => make_helicoid(s, t, ns, nt, cfg.deriv.into())?,
        SurfaceKind::Catenoid => make_catenoid(s, t, ns, nt, cfg.deriv.into())?,
        SurfaceKind::Ruled => {
            let k = cfg.twist;
            let ts: Vec<f64> = (0..=nt).map(|j| if j == nt { t.1 } else { t.0 + (t.1 - t.0) * j as f64 / nt as f64 }).collect();
            let beta: Vec<Vec3> = ts.iter().map(|&t| Vec3::new(0.0, 0.0, t)).collect();
            let delta: Vec<Vec3> = ts.iter().map(|&t| Vec3::new((k * t).cos(), (k * t).sin(), 0.0)).collect();
            make_ruled(&beta, &delta, s, t, ns)?
        }
        SurfaceKind::Graph => {
            let (h, a) = (cfg.height, cfg.amplitude);
            match cfg.graph_fn {
                GraphFn::Plane => make_graph_fn(s, t, ns, nt, |_, _| h)?,
                GraphFn::Parabola => make_graph_fn(s, t, ns, nt, |x, _| h + a * x * x)?,
                GraphFn::Saddle => make_graph_fn(s, t, ns, nt, |x, y| h + a * (x * x - y * y))?,
                GraphFn::Arccosh => make_graph_fn(s, t, ns, nt, |x, y| h + (x * x + y * y).sqrt().acosh())?,
            }
        }
        SurfaceKind::HelicoidSheet | SurfaceKind::Nonproper => unreachable!("multi-valued graphs are not patches"),
    };
    if cfg.scale == 1.0 {
        Ok(patch)
    } else {
        Ok(rescale(&patch, cfg.scale)?)
    }
}

fn clip(cfg: &RunConfig, mesh: SurfaceMesh) -> Result<SurfaceMesh> {
    match cfg.clip_radius {
        Some(r) => {
            let c = cfg.clip_center.unwrap_or([0.0; 3]);
            Ok(mesh.clip_ball(Vec3::new(c[0], c[1], c[2]), r)?)
        }
        None => Ok(mesh),
    }
}

fn extremes(g: &GeomData) -> (f64, f64, f64) {
    let max_a2 = g.a2.iter().copied().fold(0.0, f64::max);
    let kmin = g.gauss.iter().copied().fold(f64::INFINITY, f64::min);
    let kmax = g.gauss.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (max_a2, kmin, kmax)
}

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    if cfg.surface.is_multigraph() {
        return run_graph(cfg, out);
    }
    let patch = build_patch(cfg)?;
    let geom = fundamental_forms(&patch)?;
    let mesh = clip(cfg, SurfaceMesh::from_patch(&patch, cfg.weld)?)?;
    out.write("mesh.obj", |w| write_obj(&mesh, w))?;
    out.write("mesh.csv", |w| write_mesh_csv(&mesh, w))?;
    out.write("geometry.csv", |w| write_geometry_csv(&patch, &geom, w))?;
    let (max_a2, min_gauss, max_gauss) = extremes(&geom);
    let summary = PatchSummary {
        surface: cfg.surface,
        nodes: patch.node_count(),
        mesh_vertices: mesh.vertex_count(),
        mesh_triangles: mesh.triangle_count(),
        area: area(&patch),
        max_abs_h: geom.max_abs_mean(),
        max_a2,
        min_gauss,
        max_gauss,
    };
    out.write_json("summary.json", &summary)?;
    println!(
        "{:?}: {} nodes, mesh {} vertices, max|H| = {:e}, max|A|^2 = {}",
        cfg.surface, summary.nodes, summary.mesh_vertices, summary.max_abs_h, summary.max_a2
    );
    Ok(Outcome::ok())
}

fn run_graph(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let [n_rho, per_sheet] = cfg.grid;
    let n_theta = per_sheet * cfg.sheets;
    let g = match cfg.surface {
        SurfaceKind::HelicoidSheet => {
            let which = if cfg.sheet == 1 { Sheet::First } else { Sheet::Second };
            helicoid_sheet(which, cfg.rin, cfg.rout, cfg.sheets, n_rho, n_theta)?
        }
        _ => nonproper_graph(cfg.rin, cfg.rout, cfg.sheets, n_rho, n_theta)?,
    };
    let g = if cfg.scale == 1.0 { g } else { g.rescale(cfg.scale)? };
    out.write("multigraph.csv", |w| write_multigraph_csv(&g, w))?;
    let mesh = SurfaceMesh::from_patch(&embed_to_r3(&g)?, false)?;
    out.write("mesh.obj", |w| write_obj(&mesh, w))?;
    let (mut embedded, mut min_abs_w, mut hand) = (None, None, None);
    if g.sheets() >= 2 {
        let prof = separation(&g)?;
        out.write("separation.csv", |w| write_separation_csv(&prof, w))?;
        let (e, m) = is_embedded(&g)?;
        embedded = Some(e);
        min_abs_w = Some(m);
        hand = handedness(&g).ok().map(|h| format!("{h:?}").to_lowercase());
    }
    let max_abs_u = g.values().iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let summary = GraphSummary {
        surface: cfg.surface,
        r_in: g.r_in(),
        r_out: g.r_out(),
        sheets: g.sheets(),
        n_rho,
        n_theta,
        max_abs_u,
        embedded,
        min_abs_w,
        handedness: hand,
    };
    out.write_json("summary.json", &summary)?;
    let slab = if cfg.surface == SurfaceKind::Nonproper { format!(" (slab bound pi/2 = {})", PI / 2.0) } else { String::new() };
    println!("{:?}: {} sheets, max|u| = {max_abs_u}{slab}", cfg.surface, g.sheets());
    Ok(Outcome::ok())
}
