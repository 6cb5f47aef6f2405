use anyhow::Result;
use mindisk_core::io::{write_mesh_csv, write_obj, write_separation_csv};
use mindisk_core::mesh::SurfaceMesh;
use mindisk_core::multigraph::{embed_to_r3, separation};
use mindisk_core::Vec3;

use super::Outcome;
use crate::config::{Format, RunConfig};
use crate::failure::Usage;
use crate::inputs::{load_mesh, load_multigraph};
use crate::output::OutputDir;

/// Converts an OBJ mesh to the mesh CSV (with estimated curvature), or a multi-valued
/// graph table to an OBJ embedding.
pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome> {
    let input = cfg.input.as_ref().ok_or_else(|| Usage::new("export needs --input FILE.obj or FILE.csv"))?;
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "obj" => {
            let (mesh, source) = load_mesh(input, cfg.a2.as_deref())?;
            let mesh = match (cfg.clip_center, cfg.clip_radius) {
                (Some(c), Some(r)) => mesh.clip_ball(Vec3::new(c[0], c[1], c[2]), r)?,
                (None, Some(r)) => mesh.clip_ball(Vec3::zeros(), r)?,
                _ => mesh,
            };
            let clipped = cfg.clip_radius.is_some();
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => out.write("mesh.csv", |w| write_mesh_csv(&mesh, w))?,
                Format::Obj => out.write("mesh.obj", |w| write_obj(&mesh, w))?,
            }
            if clipped && cfg.format.is_none() {
                out.write("mesh.obj", |w| write_obj(&mesh, w))?;
            }
            println!("{} vertices, curvature from {source}", mesh.vertex_count());
        }
        "csv" => {
            let g = load_multigraph(input)?;
            if cfg.format == Some(Format::Csv) {
                let mesh = SurfaceMesh::from_patch(&embed_to_r3(&g)?, false)?;
                out.write("mesh.csv", |w| write_mesh_csv(&mesh, w))?;
            } else {
                let mesh = SurfaceMesh::from_patch(&embed_to_r3(&g)?, false)?;
                out.write("mesh.obj", |w| write_obj(&mesh, w))?;
            }
            if g.sheets() >= 2 {
                let prof = separation(&g)?;
                out.write("separation.csv", |w| write_separation_csv(&prof, w))?;
            }
            println!("{} sheets, {} x {} nodes", g.sheets(), g.n_rho(), g.n_theta());
        }
        _ => return Err(Usage::new(format!("cannot export {}: expected .obj or .csv", input.display())).into()),
    }
    Ok(Outcome::ok())
}
