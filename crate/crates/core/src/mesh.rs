//! Triangle meshes with per-vertex `|A|²`, used by the blow-up and structure checks.

use std::collections::{BinaryHeap, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::surface::{fundamental_forms, ParamPatch};
use crate::Vec3;

#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    a2: Vec<f64>,
    normals: Vec<Vec3>,
    boundary: Vec<bool>,
    adjacency: OnceLock<Vec<Vec<(usize, f64)>>>,
}

impl PartialEq for SurfaceMesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.triangles == other.triangles && self.a2 == other.a2
    }
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, a2: Vec<f64>) -> Result<Self> {
        if a2.len() != vertices.len() {
            return Err(Error::ShapeMismatch { expected: vertices.len(), got: a2.len() });
        }
        let n = vertices.len();
        if let Some(t) = triangles.iter().position(|t| t.iter().any(|v| *v >= n) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
        {
            return Err(Error::InvalidInput(format!("triangle {t} has an invalid vertex index")));
        }
        if let Some(v) = vertices.iter().position(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
            return Err(Error::InvalidInput(format!("vertex {v} is not finite")));
        }
        if let Some(v) = a2.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidInput(format!("|A|^2 at vertex {v} is not a finite non-negative number")));
        }
        let mut boundary = vec![false; n];
        for ((a, b), count) in edge_counts(&triangles) {
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        let mut mesh = Self { vertices, triangles, a2, normals: Vec::new(), boundary, adjacency: OnceLock::new() };
        mesh.normals = mesh.vertex_normals();
        Ok(mesh)
    }

    /// Replace the area-weighted vertex normals, e.g. by exact ones.
    pub fn with_normals(mut self, normals: Vec<Vec3>) -> Result<Self> {
        if normals.len() != self.vertex_count() {
            return Err(Error::ShapeMismatch { expected: self.vertex_count(), got: normals.len() });
        }
        self.normals = normals;
        Ok(self)
    }

    /// Triangulate a parameter grid, splitting each cell along its `(i, j)–(i+1, j+1)`
    /// diagonal. With `weld_t` the last t-column is identified with the first, which
    /// closes periodic patches such as the catenoid.
    pub fn from_patch(patch: &ParamPatch, weld_t: bool) -> Result<Self> {
        let geom = fundamental_forms(patch)?;
        let (ns, nt) = (patch.n_s(), patch.n_t());
        let cols = if weld_t { nt } else { nt + 1 };
        let id = |i: usize, j: usize| i * cols + if weld_t && j == nt { 0 } else { j };
        let mut vertices = Vec::with_capacity((ns + 1) * cols);
        let mut a2 = Vec::with_capacity((ns + 1) * cols);
        let mut normals = Vec::with_capacity((ns + 1) * cols);
        for i in 0..=ns {
            for j in 0..cols {
                let p = patch.index(i, j);
                vertices.push(patch.positions()[p]);
                a2.push(geom.a2[p]);
                normals.push(geom.normal[p]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * ns * nt);
        for i in 0..ns {
            for j in 0..nt {
                let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Self::new(vertices, triangles, a2)?.with_normals(normals)
    }

    /// Mesh from bare geometry, e.g. an OBJ file. `|A|²` is estimated per vertex by a
    /// least-squares quadric fit over the two-ring in the tangent frame of the vertex
    /// normal; the estimate is exact on planes and second-order on smooth graphs.
    pub fn from_geometry(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidInput("mesh has no vertices".into()));
        }
        let zeros = vec![0.0; vertices.len()];
        let mut mesh = Self::new(vertices, triangles, zeros)?;
        mesh.a2 = crate::par::map_indexed(mesh.vertex_count(), |v| mesh.fitted_a2(v));
        Ok(mesh)
    }

    fn fitted_a2(&self, v: usize) -> f64 {
        let adj = self.adjacency();
        let mut ring: Vec<usize> = adj[v].iter().map(|(w, _)| *w).collect();
        for &(w, _) in &adj[v] {
            ring.extend(adj[w].iter().map(|(u, _)| *u));
        }
        ring.sort_unstable();
        ring.dedup();
        ring.retain(|w| *w != v);
        let n = self.normals[v];
        if ring.len() < 5 || n.norm() == 0.0 {
            return 0.0;
        }
        let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = n.cross(&helper).normalize();
        let e2 = n.cross(&e1);
        let p = self.vertices[v];
        let scale = ring.iter().map(|w| (self.vertices[*w] - p).norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let rows: Vec<[f64; 6]> = ring
            .iter()
            .map(|w| {
                let q = (self.vertices[*w] - p) / scale;
                let (x, y, z) = (q.dot(&e1), q.dot(&e2), q.dot(&n));
                [x * x, x * y, y * y, x, y, z]
            })
            .collect();
        let a = nalgebra::DMatrix::from_fn(rows.len(), 5, |r, c| rows[r][c]);
        let b = nalgebra::DVector::from_iterator(rows.len(), rows.iter().map(|r| r[5]));
        let Ok(c) = a.svd(true, true).solve(&b, 1e-12) else { return 0.0 };
        let (d, e) = (c[3], c[4]);
        let w = (1.0 + d * d + e * e).sqrt();
        let first = nalgebra::Matrix2::new(1.0 + d * d, d * e, d * e, 1.0 + e * e);
        let second = nalgebra::Matrix2::new(2.0 * c[0], c[1], c[1], 2.0 * c[2]) / w;
        let Some(inv) = first.try_inverse() else { return 0.0 };
        let shape = inv * second;
        (shape * shape).trace().max(0.0) / (scale * scale)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn a2(&self) -> &[f64] {
        &self.a2
    }
    /// Unit vertex normals.
    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }
    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|v| self.boundary[*v]).collect()
    }

    /// Homothety about the origin: positions scale by `k`, `|A|²` by `k^{-2}`.
    pub fn rescale(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidScale(k));
        }
        Self::new(
            self.vertices.iter().map(|p| p * k).collect(),
            self.triangles.clone(),
            self.a2.iter().map(|x| x / (k * k)).collect(),
        )?
        .with_normals(self.normals.clone())
    }

    pub fn translate(&self, offset: Vec3) -> Self {
        Self { vertices: self.vertices.iter().map(|p| p + offset).collect(), adjacency: OnceLock::new(), ..self.clone() }
    }

    /// Unique undirected edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = edge_counts(&self.triangles).into_keys().collect();
        e.sort_unstable();
        e
    }

    pub fn euler_characteristic(&self) -> i64 {
        let used = self.used_vertices().iter().filter(|u| **u).count() as i64;
        used - self.edges().len() as i64 + self.triangle_count() as i64
    }

    fn used_vertices(&self) -> Vec<bool> {
        let mut used = vec![false; self.vertex_count()];
        for t in &self.triangles {
            for v in t {
                used[*v] = true;
            }
        }
        used
    }

    /// Vertex sets of the edge-connected components, ordered by smallest vertex.
    /// Vertices in no triangle are ignored.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (find(&mut parent, t[k]), find(&mut parent, t[(k + 1) % 3]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let used = self.used_vertices();
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut order = Vec::new();
        for v in 0..n {
            if !used[v] {
                continue;
            }
            let r = find(&mut parent, v);
            let g = groups.entry(r).or_default();
            if g.is_empty() {
                order.push(r);
            }
            g.push(v);
        }
        order.into_iter().map(|r| groups.remove(&r).unwrap_or_default()).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Triangles whose three vertices are kept, with vertices renumbered in
    /// increasing original order. Also returns the original index of each new vertex.
    pub fn submesh(&self, keep: &[bool]) -> Result<(SurfaceMesh, Vec<usize>)> {
        let tris: Vec<[usize; 3]> = self.triangles.iter().filter(|t| t.iter().all(|v| keep[*v])).copied().collect();
        let mut used = vec![false; self.vertex_count()];
        for t in &tris {
            for v in t {
                used[*v] = true;
            }
        }
        let origin: Vec<usize> = (0..self.vertex_count()).filter(|v| used[*v]).collect();
        let mut remap = vec![usize::MAX; self.vertex_count()];
        for (k, v) in origin.iter().enumerate() {
            remap[*v] = k;
        }
        let mesh = SurfaceMesh::new(
            origin.iter().map(|v| self.vertices[*v]).collect(),
            tris.iter().map(|t| t.map(|v| remap[v])).collect(),
            origin.iter().map(|v| self.a2[*v]).collect(),
        )?
        .with_normals(origin.iter().map(|v| self.normals[*v]).collect())?;
        Ok((mesh, origin))
    }

    /// Exact intersection with the closed ball `B_r(center)`: edges crossing the sphere
    /// are cut at the sphere, so new boundary vertices lie on it. `|A|²` at cut points
    /// is interpolated along the edge.
    pub fn clip_ball(&self, center: Vec3, r: f64) -> Result<SurfaceMesh> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidRegion(format!("ball radius {r} must be positive")));
        }
        #[derive(Clone, Copy, PartialEq, Eq, Hash)]
        enum Ref {
            Orig(usize),
            Cut(usize, usize),
        }
        let inside: Vec<bool> = self.vertices.iter().map(|p| (p - center).norm() <= r).collect();
        // edge -> (position, curvature, normal, new index)
        type Cut = (Vec3, f64, Vec3, Option<usize>);
        let mut cuts: HashMap<(usize, usize), Cut> = HashMap::new();
        let mut cut_for = |p: usize, q: usize| -> Ref {
            let key = (p.min(q), p.max(q));
            let entry = cuts.entry(key).or_insert_with(|| {
                // p inside, q outside
                let (a, b) = (self.vertices[p], self.vertices[q]);
                let d = b - a;
                let pa = a - center;
                let qa = d.norm_squared();
                let qb = 2.0 * pa.dot(&d);
                let qc = (pa.norm_squared() - r * r).min(0.0);
                let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
                let lambda = if qb + disc > 0.0 { -2.0 * qc / (qb + disc) } else { 0.0 };
                if lambda <= 1e-12 {
                    return (a, self.a2[p], self.normals[p], Some(p));
                }
                let x = a + d * lambda;
                let x = center + (x - center) * (r / (x - center).norm());
                let n = self.normals[p] * (1.0 - lambda) + self.normals[q] * lambda;
                let n = if n.norm() > 0.0 { n.normalize() } else { self.normals[p] };
                (x, self.a2[p] + lambda * (self.a2[q] - self.a2[p]), n, None)
            });
            match entry.3 {
                Some(v) => Ref::Orig(v),
                None => Ref::Cut(key.0, key.1),
            }
        };
        let mut out: Vec<[Ref; 3]> = Vec::new();
        for t in &self.triangles {
            let mut poly: Vec<Ref> = Vec::with_capacity(4);
            for k in 0..3 {
                let (p, q) = (t[k], t[(k + 1) % 3]);
                if inside[p] {
                    poly.push(Ref::Orig(p));
                    if !inside[q] {
                        poly.push(cut_for(p, q));
                    }
                } else if inside[q] {
                    poly.push(cut_for(q, p));
                }
            }
            poly.dedup();
            if poly.len() > 1 && poly.first() == poly.last() {
                poly.pop();
            }
            for k in 1..poly.len().saturating_sub(1) {
                let tri = [poly[0], poly[k], poly[k + 1]];
                if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
                    out.push(tri);
                }
            }
        }
        let mut orig_used = vec![false; self.vertex_count()];
        let mut cut_order: Vec<(usize, usize)> = Vec::new();
        let mut cut_index: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &out {
            for r in tri {
                match r {
                    Ref::Orig(v) => orig_used[*v] = true,
                    Ref::Cut(a, b) => {
                        if let std::collections::hash_map::Entry::Vacant(e) = cut_index.entry((*a, *b)) {
                            e.insert(cut_order.len());
                            cut_order.push((*a, *b));
                        }
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; self.vertex_count()];
        let mut vertices = Vec::new();
        let mut a2 = Vec::new();
        let mut normals = Vec::new();
        for v in 0..self.vertex_count() {
            if orig_used[v] {
                remap[v] = vertices.len();
                vertices.push(self.vertices[v]);
                a2.push(self.a2[v]);
                normals.push(self.normals[v]);
            }
        }
        let base = vertices.len();
        for key in &cut_order {
            let (x, val, n, _) = cuts[key];
            vertices.push(x);
            a2.push(val);
            normals.push(n);
        }
        let triangles = out
            .iter()
            .map(|tri| {
                tri.map(|r| match r {
                    Ref::Orig(v) => remap[v],
                    Ref::Cut(a, b) => base + cut_index[&(a, b)],
                })
            })
            .collect();
        SurfaceMesh::new(vertices, triangles, a2)?.with_normals(normals)
    }

    /// Unit normal of every triangle (zero for degenerate ones).
    pub fn triangle_normals(&self) -> Vec<Vec3> {
        self.triangles
            .iter()
            .map(|t| {
                let n = (self.vertices[t[1]] - self.vertices[t[0]]).cross(&(self.vertices[t[2]] - self.vertices[t[0]]));
                let len = n.norm();
                if len > 0.0 {
                    n / len
                } else {
                    Vec3::zeros()
                }
            })
            .collect()
    }

    /// Area-weighted vertex normals.
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut acc = vec![Vec3::zeros(); self.vertex_count()];
        for t in &self.triangles {
            let n = (self.vertices[t[1]] - self.vertices[t[0]]).cross(&(self.vertices[t[2]] - self.vertices[t[0]]));
            for v in t {
                acc[*v] += n;
            }
        }
        acc.into_iter()
            .map(|n| {
                let len = n.norm();
                if len > 0.0 {
                    n / len
                } else {
                    n
                }
            })
            .collect()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges()
            .iter()
            .map(|(a, b)| (self.vertices[*a] - self.vertices[*b]).norm())
            .filter(|l| *l > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    fn adjacency(&self) -> &Vec<Vec<(usize, f64)>> {
        self.adjacency.get_or_init(|| {
            let mut adj = vec![Vec::new(); self.vertex_count()];
            for (a, b) in self.edges() {
                let l = (self.vertices[a] - self.vertices[b]).norm();
                adj[a].push((b, l));
                adj[b].push((a, l));
            }
            adj
        })
    }

    /// Shortest-path distances along mesh edges from `source`, explored up to `limit`
    /// (`f64::INFINITY` beyond it).
    pub fn edge_distances(&self, source: usize, limit: f64) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let adj = self.adjacency();
        let mut dist = vec![f64::INFINITY; self.vertex_count()];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Item(0.0, source));
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, l) in &adj[v] {
                let nd = d + l;
                if nd <= limit && nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Item(nd, w));
                }
            }
        }
        dist
    }

    /// Heights at which the vertical line through `(x, y)` meets the triangles,
    /// ascending; crossings closer than `1e-9` are merged.
    pub fn vertical_crossings(&self, x: f64, y: f64) -> Vec<f64> {
        let hits = crate::par::map_indexed(self.triangle_count(), |t| {
            let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
            let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
            if det == 0.0 {
                return None;
            }
            let l1 = ((x - a.x) * (c.y - a.y) - (c.x - a.x) * (y - a.y)) / det;
            let l2 = ((b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y)) / det;
            let l0 = 1.0 - l1 - l2;
            let tol = -1e-12;
            (l0 >= tol && l1 >= tol && l2 >= tol).then(|| l0 * a.z + l1 * b.z + l2 * c.z)
        });
        let mut h: Vec<f64> = hits.into_iter().flatten().collect();
        h.sort_by(f64::total_cmp);
        h.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        h
    }

    pub fn nearest_vertex(&self, p: Vec3) -> Option<usize> {
        (0..self.vertex_count()).min_by(|a, b| (self.vertices[*a] - p).norm().total_cmp(&(self.vertices[*b] - p).norm()))
    }
}

fn edge_counts(triangles: &[[usize; 3]]) -> HashMap<(usize, usize), usize> {
    let mut m = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    m
}

/// Uniform hash grid over points for radius queries.
#[derive(Debug, Clone)]
pub struct PointGrid {
    cell: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
}

impl PointGrid {
    pub fn new(points: &[Vec3], cell: f64) -> Self {
        let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (k, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell)).or_default().push(k);
        }
        Self { cell, cells }
    }

    fn key(p: &Vec3, cell: f64) -> [i64; 3] {
        [(p.x / cell).floor() as i64, (p.y / cell).floor() as i64, (p.z / cell).floor() as i64]
    }

    /// Indices within distance `r` of `q`, ascending.
    pub fn within(&self, points: &[Vec3], q: Vec3, r: f64) -> Vec<usize> {
        let lo = Self::key(&(q - Vec3::repeat(r)), self.cell);
        let hi = Self::key(&(q + Vec3::repeat(r)), self.cell);
        let mut out = Vec::new();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(v) = self.cells.get(&[x, y, z]) {
                        out.extend(v.iter().copied().filter(|k| (points[*k] - q).norm() <= r));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Point location among triangles with arbitrary planar vertex coordinates.
#[derive(Debug, Clone)]
pub struct PlanarLocator {
    coords: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    origin: [f64; 2],
    cell: f64,
    cells: HashMap<[i64; 2], Vec<usize>>,
}

impl PlanarLocator {
    pub fn new(coords: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for c in &coords {
            for k in 0..2 {
                lo[k] = lo[k].min(c[k]);
                hi[k] = hi[k].max(c[k]);
            }
        }
        let area = ((hi[0] - lo[0]) * (hi[1] - lo[1])).max(f64::MIN_POSITIVE);
        let cell = (2.0 * (area / triangles.len().max(1) as f64).sqrt()).max(1e-12);
        let mut loc = Self { coords, triangles, origin: lo, cell, cells: HashMap::new() };
        for (t, tri) in loc.triangles.iter().enumerate() {
            let (a, b) = loc.bbox(tri);
            let (ka, kb) = (loc.key(a), loc.key(b));
            for x in ka[0]..=kb[0] {
                for y in ka[1]..=kb[1] {
                    loc.cells.entry([x, y]).or_default().push(t);
                }
            }
        }
        loc
    }

    fn bbox(&self, tri: &[usize; 3]) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in tri {
            for k in 0..2 {
                lo[k] = lo[k].min(self.coords[*v][k]);
                hi[k] = hi[k].max(self.coords[*v][k]);
            }
        }
        (lo, hi)
    }

    fn key(&self, p: [f64; 2]) -> [i64; 2] {
        [((p[0] - self.origin[0]) / self.cell).floor() as i64, ((p[1] - self.origin[1]) / self.cell).floor() as i64]
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    /// Signed area of triangle `t` in the planar coordinates.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.coords[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Triangles containing `q` together with its barycentric coordinates; a point
    /// counts as contained when every coordinate is at least `-tol`.
    pub fn locate(&self, q: [f64; 2], tol: f64) -> Vec<(usize, [f64; 3])> {
        let Some(cands) = self.cells.get(&self.key(q)) else {
            return Vec::new();
        };
        cands
            .iter()
            .filter_map(|t| {
                let [a, b, c] = self.triangles[*t].map(|v| self.coords[v]);
                let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
                if det == 0.0 {
                    return None;
                }
                let l1 = ((q[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (q[1] - a[1])) / det;
                let l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1])) / det;
                let l0 = 1.0 - l1 - l2;
                (l0 >= -tol && l1 >= -tol && l2 >= -tol).then_some((*t, [l0, l1, l2]))
            })
            .collect()
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_catenoid, make_graph_fn, make_helicoid, DerivMode};
    use std::f64::consts::PI;

    fn flat(n: usize, h: f64) -> SurfaceMesh {
        let p = make_graph_fn((-h, h), (-h, h), n, n, |_, _| 0.0).unwrap();
        SurfaceMesh::from_patch(&p, false).unwrap()
    }

    #[test]
    fn grid_mesh_is_a_disk() {
        let m = flat(8, 1.0);
        assert_eq!(m.vertex_count(), 81);
        assert_eq!(m.triangle_count(), 128);
        assert_eq!(m.euler_characteristic(), 1);
        assert_eq!(m.boundary_vertices().len(), 32);
        assert!(m.is_connected());
    }

    #[test]
    fn welded_catenoid_is_an_annulus() {
        let p = make_catenoid((-1.0, 1.0), (0.0, 2.0 * PI), 8, 16, DerivMode::Analytic).unwrap();
        let m = SurfaceMesh::from_patch(&p, true).unwrap();
        assert_eq!(m.vertex_count(), 9 * 16);
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn clipped_boundary_lies_on_the_sphere() {
        let m = flat(20, 2.0).clip_ball(Vec3::zeros(), 1.0).unwrap();
        assert_eq!(m.euler_characteristic(), 1);
        for v in m.boundary_vertices() {
            assert!(((m.vertices()[v]).norm() - 1.0).abs() < 1e-14);
        }
        assert!(m.vertices().iter().all(|p| p.norm() <= 1.0 + 1e-14));
        // polygon area approaches π from below
        let area: f64 = m
            .triangles()
            .iter()
            .map(|t| 0.5 * (m.vertices()[t[1]] - m.vertices()[t[0]]).cross(&(m.vertices()[t[2]] - m.vertices()[t[0]])).norm())
            .sum();
        assert!(area < PI && area > PI - 0.05, "{area}");
    }

    #[test]
    fn edge_distance_on_flat_grid() {
        let m = flat(4, 1.0);
        let d = m.edge_distances(0, f64::INFINITY);
        // corner to corner along the diagonal
        assert!((d[24] - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let d = m.edge_distances(0, 0.6);
        assert!(d[24].is_infinite());
    }

    #[test]
    fn helicoid_components_after_removing_axis() {
        let p = make_helicoid((-1.0, 1.0), (-3.0, 3.0), 8, 24, DerivMode::Analytic).unwrap();
        let m = SurfaceMesh::from_patch(&p, false).unwrap();
        let keep: Vec<bool> = m.vertices().iter().map(|q| q.x.hypot(q.y) > 0.2).collect();
        let (sub, origin) = m.submesh(&keep).unwrap();
        assert_eq!(sub.components().len(), 2);
        assert!(origin.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn point_grid_matches_brute_force() {
        let m = flat(10, 1.0);
        let g = PointGrid::new(m.vertices(), 0.3);
        let q = Vec3::new(0.13, -0.2, 0.05);
        let brute: Vec<usize> = (0..m.vertex_count()).filter(|k| (m.vertices()[*k] - q).norm() <= 0.45).collect();
        assert_eq!(g.within(m.vertices(), q, 0.45), brute);
    }

    #[test]
    fn locator_finds_containing_triangle() {
        let m = flat(4, 1.0);
        let coords = m.vertices().iter().map(|p| [p.x, p.y]).collect();
        let loc = PlanarLocator::new(coords, m.triangles().to_vec());
        let hits = loc.locate([0.1, 0.3], 0.0);
        assert_eq!(hits.len(), 1);
        assert!((hits[0].1.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fitted_curvature() {
        let plane = make_graph_fn((-1.0, 1.0), (-1.0, 1.0), 8, 8, |x, y| 0.3 * x - 0.2 * y + 1.0).unwrap();
        let m = SurfaceMesh::from_patch(&plane, false).unwrap();
        let fitted = SurfaceMesh::from_geometry(m.vertices().to_vec(), m.triangles().to_vec()).unwrap();
        assert!(fitted.a2().iter().all(|a| *a < 1e-20));
        // sphere cap of radius 2: |A|² = 2 / 4
        let cap = make_graph_fn((-0.5, 0.5), (-0.5, 0.5), 32, 32, |x, y| (4.0 - x * x - y * y).sqrt()).unwrap();
        let m = SurfaceMesh::from_patch(&cap, false).unwrap();
        let fitted = SurfaceMesh::from_geometry(m.vertices().to_vec(), m.triangles().to_vec()).unwrap();
        for v in 0..m.vertex_count() {
            let tol = if m.is_boundary(v) { 2e-2 } else { 2e-3 };
            assert!((fitted.a2()[v] - 0.5).abs() < tol, "{v} {}", fitted.a2()[v]);
        }
        assert!(SurfaceMesh::from_geometry(Vec::new(), Vec::new()).is_err());
    }
}
