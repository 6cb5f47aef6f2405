//! Text formats: Wavefront OBJ meshes and plot-ready CSV tables.
//!
//! Floats are written with 17 significant digits so that they read back exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;
use crate::multigraph::{MultiGraph, SeparationProfile};
use crate::surface::{GeomData, ParamPatch};
use crate::Vec3;

/// Round-trip float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_obj(mesh: &SurfaceMesh, w: &mut impl Write) -> Result<()> {
    for p in mesh.vertices() {
        writeln!(w, "v {} {} {}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z))?;
    }
    for t in mesh.triangles() {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// Vertices and triangles of an OBJ file. Polygonal faces are fan-triangulated;
/// texture and normal indices (`f 1/2/3 ...`) are ignored.
pub fn read_obj(r: impl BufRead) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let mut parts = line.split_whitespace();
        let err = |message: String| Error::Parse { line: k + 1, message };
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|e| err(format!("bad coordinate {s:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(err("vertex needs three coordinates".into()));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|s| {
                        let head = s.split('/').next().unwrap_or("");
                        let i: i64 = head.parse().map_err(|e| err(format!("bad face index {s:?}: {e}")))?;
                        let n = vertices.len() as i64;
                        let z = if i < 0 { n + i } else { i - 1 };
                        if z < 0 || z >= n {
                            return Err(err(format!("face index {i} out of range")));
                        }
                        Ok(z as usize)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err("face needs at least three vertices".into()));
                }
                for m in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[m], idx[m + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok((vertices, triangles))
}

/// Per-vertex table `x,y,z,nx,ny,nz,A2`.
pub fn write_mesh_csv(mesh: &SurfaceMesh, w: &mut impl Write) -> Result<()> {
    writeln!(w, "x,y,z,nx,ny,nz,A2")?;
    for ((p, n), a) in mesh.vertices().iter().zip(mesh.normals()).zip(mesh.a2()) {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z),
            fmt_f64(n.x),
            fmt_f64(n.y),
            fmt_f64(n.z),
            fmt_f64(*a)
        )?;
    }
    Ok(())
}

/// Per-node table `s,t,x,y,z,H,K,A2`.
pub fn write_geometry_csv(patch: &ParamPatch, geom: &GeomData, w: &mut impl Write) -> Result<()> {
    writeln!(w, "s,t,x,y,z,H,K,A2")?;
    for p in 0..patch.node_count() {
        let (i, j) = patch.node(p);
        let x = patch.positions()[p];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(patch.s(i)),
            fmt_f64(patch.t(j)),
            fmt_f64(x.x),
            fmt_f64(x.y),
            fmt_f64(x.z),
            fmt_f64(geom.mean[p]),
            fmt_f64(geom.gauss[p]),
            fmt_f64(geom.a2[p])
        )?;
    }
    Ok(())
}

/// `rho,theta,u`, row-major in `(ρ, θ)`.
pub fn write_multigraph_csv(g: &MultiGraph, w: &mut impl Write) -> Result<()> {
    writeln!(w, "rho,theta,u")?;
    for i in 0..=g.n_rho() {
        for j in 0..=g.n_theta() {
            writeln!(w, "{},{},{}", fmt_f64(g.rho(i)), fmt_f64(g.theta(j)), fmt_f64(g.u(i, j)))?;
        }
    }
    Ok(())
}

/// `rho,theta,w`
pub fn write_separation_csv(p: &SeparationProfile, w: &mut impl Write) -> Result<()> {
    writeln!(w, "rho,theta,w")?;
    for (i, r) in p.rho.iter().enumerate() {
        for (j, t) in p.theta.iter().enumerate() {
            writeln!(w, "{},{},{}", fmt_f64(*r), fmt_f64(*t), fmt_f64(p.at(i, j)))?;
        }
    }
    Ok(())
}

/// `x,y,z`
pub fn write_points_csv(points: &[Vec3], w: &mut impl Write) -> Result<()> {
    writeln!(w, "x,y,z")?;
    for p in points {
        writeln!(w, "{},{},{}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z))?;
    }
    Ok(())
}
