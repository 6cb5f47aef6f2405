//! Readers for files produced by earlier runs.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use mindisk_core::io::read_obj;
use mindisk_core::mesh::SurfaceMesh;
use mindisk_core::multigraph::MultiGraph;
use mindisk_core::Vec3;

use crate::failure::Usage;

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(Usage::wrap)?;
    Ok(BufReader::new(f))
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> anyhow::Error {
    Usage::new(format!("{}: {e}", path.display())).into()
}

/// Mesh from an OBJ file; `|A|²` comes from a mesh CSV when given, otherwise from the
/// quadric-fit estimate.
pub fn load_mesh(obj: &Path, a2: Option<&Path>) -> Result<(SurfaceMesh, &'static str)> {
    let (vertices, triangles) = read_obj(open(obj)?).map_err(|e| parse_err(obj, e))?;
    let Some(csv_path) = a2 else {
        return Ok((SurfaceMesh::from_geometry(vertices, triangles)?, "quadric-fit"));
    };
    let mut rd = csv::Reader::from_reader(open(csv_path)?);
    let headers = rd.headers().map_err(|e| parse_err(csv_path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y", "z", "nx", "ny", "nz", "A2"] {
        return Err(parse_err(csv_path, format!("unexpected header {headers:?}")));
    }
    let mut curv = Vec::new();
    let mut normals = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(csv_path, e))?;
        let v: Vec<f64> = rec
            .iter()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(csv_path, format!("row {}: {e}", k + 2)))?;
        let p = Vec3::new(v[0], v[1], v[2]);
        match vertices.get(k) {
            Some(q) if (p - q).norm() <= 1e-12 * (1.0 + q.norm()) => {}
            _ => return Err(parse_err(csv_path, format!("row {} does not match vertex {k} of {}", k + 2, obj.display()))),
        }
        normals.push(Vec3::new(v[3], v[4], v[5]));
        curv.push(v[6]);
    }
    if curv.len() != vertices.len() {
        return Err(parse_err(csv_path, format!("{} rows for {} vertices", curv.len(), vertices.len())));
    }
    Ok((SurfaceMesh::new(vertices, triangles, curv)?.with_normals(normals)?, "csv"))
}

/// Multi-valued graph from a `rho,theta,u` table in row-major `(ρ, θ)` order.
pub fn load_multigraph(path: &Path) -> Result<MultiGraph> {
    let mut rd = csv::Reader::from_reader(open(path)?);
    let headers = rd.headers().map_err(|e| parse_err(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["rho", "theta", "u"] {
        return Err(parse_err(path, format!("unexpected header {headers:?}")));
    }
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(path, e))?;
        let v: Vec<f64> =
            rec.iter().map(str::parse).collect::<Result<_, _>>().map_err(|e| parse_err(path, format!("row {}: {e}", k + 2)))?;
        rows.push([v[0], v[1], v[2]]);
    }
    let cols = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
    if cols < 2 || rows.len() % cols != 0 {
        return Err(parse_err(path, "rows do not form a rectangular (rho, theta) grid"));
    }
    let (n_rho, n_theta) = (rows.len() / cols - 1, cols - 1);
    let (t0, t1) = (rows[0][1], rows[n_theta][1]);
    let sheets = ((t1 - t0) / (2.0 * std::f64::consts::PI)).round() as usize;
    let g =
        MultiGraph::new(rows[0][0], rows[rows.len() - 1][0], sheets.max(1), n_rho, n_theta, rows.iter().map(|r| r[2]).collect())
            .map_err(|e| parse_err(path, e))?
            .with_theta_center(0.5 * (t0 + t1));
    for (p, r) in rows.iter().enumerate() {
        let (i, j) = g.node(p);
        let (rho, theta) = (g.rho(i), g.theta(j));
        if (rho - r[0]).abs() > 1e-9 * rho || (theta - r[1]).abs() > 1e-9 * (1.0 + theta.abs()) {
            return Err(parse_err(path, format!("row {} is off the log-uniform grid", p + 2)));
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mindisk_core::io::{write_mesh_csv, write_multigraph_csv, write_obj};
    use mindisk_core::multigraph::nonproper_graph;

    #[test]
    fn multigraph_round_trip() {
        let g = nonproper_graph(2.0, 50.0, 3, 6, 12).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        let mut buf = Vec::new();
        write_multigraph_csv(&g, &mut buf).unwrap();
        std::fs::write(&p, buf).unwrap();
        let h = load_multigraph(&p).unwrap();
        assert_eq!((h.sheets(), h.n_rho(), h.n_theta()), (3, 6, 12));
        assert_eq!(h.values(), g.values());
    }

    #[test]
    fn mesh_with_curvature_table() {
        let patch =
            mindisk_core::surface::make_helicoid((-1.0, 1.0), (-1.0, 1.0), 4, 4, mindisk_core::surface::DerivMode::Analytic)
                .unwrap();
        let m = SurfaceMesh::from_patch(&patch, false).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (obj, csv) = (dir.path().join("m.obj"), dir.path().join("m.csv"));
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_obj(&m, &mut a).unwrap();
        write_mesh_csv(&m, &mut b).unwrap();
        std::fs::write(&obj, a).unwrap();
        std::fs::write(&csv, b).unwrap();
        let (loaded, src) = load_mesh(&obj, Some(&csv)).unwrap();
        assert_eq!(src, "csv");
        assert_eq!(loaded.a2(), m.a2());
        let (_, src) = load_mesh(&obj, None).unwrap();
        assert_eq!(src, "quadric-fit");
        assert!(load_mesh(&dir.path().join("missing.obj"), None).is_err());
    }
}
