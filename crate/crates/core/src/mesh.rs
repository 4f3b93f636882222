//! Indexed triangle meshes: construction from parametric patches and
//! validity reports.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{RigidMotion, Vec3};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<TriMesh> {
        let n = vertices.len() as u64;
        if triangles.iter().flatten().any(|&i| i as u64 >= n) {
            return Err(invalid("TriMesh::new", "triangle index out of range"));
        }
        Ok(TriMesh {
            vertices,
            triangles,
        })
    }

    pub fn corners(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Unit normal of triangle `t` (zero for a degenerate triangle).
    pub fn normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.corners(t);
        (b - a).cross(c - a).normalized().unwrap_or(Vec3::ZERO)
    }

    pub fn normals(&self) -> Vec<Vec3> {
        (0..self.triangles.len()).map(|t| self.normal(t)).collect()
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * (b - a).cross(c - a).norm()
    }

    /// Enclosed volume; positive when the triangles face outward.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.corners(t);
                a.dot(b.cross(c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn transformed(&self, m: &RigidMotion) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|&v| m.apply(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn flip(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
    }

    /// Disjoint union.
    pub fn append(&mut self, other: &TriMesh) {
        let off = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + off, t[1] + off, t[2] + off]),
        );
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        let inf = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        self.vertices
            .iter()
            .fold((inf, -inf), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Merge vertices with bit-identical coordinates and drop triangles
    /// that collapse.
    pub fn weld(&self) -> TriMesh {
        let mut map: HashMap<[u64; 3], u32> = HashMap::new();
        let mut vertices = Vec::new();
        let remap: Vec<u32> = self
            .vertices
            .iter()
            .map(|v| {
                let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
                *map.entry(key).or_insert_with(|| {
                    vertices.push(*v);
                    vertices.len() as u32 - 1
                })
            })
            .collect();
        let triangles = self
            .triangles
            .iter()
            .map(|t| {
                [
                    remap[t[0] as usize],
                    remap[t[1] as usize],
                    remap[t[2] as usize],
                ]
            })
            .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
            .collect();
        TriMesh {
            vertices,
            triangles,
        }
    }

    /// Undirected edges used by exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(u32, u32), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut open: Vec<_> = count
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|((a, b), _)| (a as usize, b as usize))
            .collect();
        open.sort_unstable();
        open
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub vertex_count: usize,
    pub triangle_count: usize,
    /// Every edge is shared by exactly two triangles.
    pub watertight: bool,
    /// Every shared edge is traversed once in each direction.
    pub orientation_consistent: bool,
    pub boundary_edges: usize,
    pub nonmanifold_edges: usize,
    pub degenerate_triangles: usize,
    pub euler_characteristic: i64,
    pub component_count: usize,
    pub component_euler: Vec<i64>,
    /// Smallest `4√3·area / Σ edge²` over all triangles (1 for equilateral).
    pub min_triangle_quality: f64,
    pub signed_volume: f64,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Topological and geometric health report; never fails.
pub fn validate(mesh: &TriMesh) -> MeshReport {
    let nv = mesh.vertices.len();
    let mut directed: HashMap<(u32, u32), usize> = HashMap::new();
    let mut undirected: HashMap<(u32, u32), usize> = HashMap::new();
    let mut degenerate = 0;
    let mut min_quality = f64::INFINITY;
    let mut parent: Vec<usize> = (0..nv).collect();
    let valid_index = |t: &[u32; 3]| t.iter().all(|&i| (i as usize) < nv);

    for (ti, t) in mesh.triangles.iter().enumerate() {
        if !valid_index(t) {
            degenerate += 1;
            continue;
        }
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *directed.entry((a, b)).or_default() += 1;
            *undirected.entry((a.min(b), a.max(b))).or_default() += 1;
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let [p, q, r] = mesh.corners(ti);
        let area = 0.5 * (q - p).cross(r - p).norm();
        let l2 = (q - p).norm_sq() + (r - q).norm_sq() + (p - r).norm_sq();
        if area <= 1e-14 || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            degenerate += 1;
        }
        let quality = if l2 > 0.0 {
            4.0 * 3f64.sqrt() * area / l2
        } else {
            0.0
        };
        min_quality = min_quality.min(quality);
    }

    let boundary = undirected.values().filter(|&&c| c == 1).count();
    let nonmanifold = undirected.values().filter(|&&c| c > 2).count();
    let watertight = !mesh.triangles.is_empty() && boundary == 0 && nonmanifold == 0;
    let orientation_consistent = directed
        .iter()
        .all(|(&(a, b), &c)| c == 1 && directed.get(&(b, a)).copied() == Some(1));

    // per-component V − E + F over vertices actually used
    let mut used = vec![false; nv];
    for t in mesh.triangles.iter().filter(|t| valid_index(t)) {
        for &i in t {
            used[i as usize] = true;
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut chi: HashMap<usize, i64> = HashMap::new();
    for v in 0..nv {
        if used[v] {
            let r = find(&mut parent, v);
            if !chi.contains_key(&r) {
                roots.push(r);
            }
            *chi.entry(r).or_default() += 1;
        }
    }
    for &(a, _) in undirected.keys() {
        let r = find(&mut parent, a as usize);
        *chi.entry(r).or_default() -= 1;
    }
    for t in mesh.triangles.iter().filter(|t| valid_index(t)) {
        let r = find(&mut parent, t[0] as usize);
        *chi.entry(r).or_default() += 1;
    }
    let component_euler: Vec<i64> = roots.iter().map(|r| chi[r]).collect();

    MeshReport {
        vertex_count: nv,
        triangle_count: mesh.triangles.len(),
        watertight,
        orientation_consistent,
        boundary_edges: boundary,
        nonmanifold_edges: nonmanifold,
        degenerate_triangles: degenerate,
        euler_characteristic: component_euler.iter().sum(),
        component_count: roots.len(),
        component_euler,
        min_triangle_quality: if min_quality.is_finite() {
            min_quality
        } else {
            0.0
        },
        signed_volume: mesh.signed_volume(),
    }
}

/// Triangulate a `rows × cols` grid of points (row-major). Periodic
/// directions are closed up; each quad is split along the same diagonal.
pub fn grid_mesh(
    points: Vec<Vec3>,
    rows: usize,
    cols: usize,
    wrap_rows: bool,
    wrap_cols: bool,
) -> TriMesh {
    assert_eq!(points.len(), rows * cols, "grid size mismatch");
    let mut triangles = Vec::new();
    let r_cells = if wrap_rows { rows } else { rows - 1 };
    let c_cells = if wrap_cols { cols } else { cols - 1 };
    let id = |i: usize, j: usize| ((i % rows) * cols + (j % cols)) as u32;
    for i in 0..r_cells {
        for j in 0..c_cells {
            let (a, b, c, d) = (id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriMesh {
        vertices: points,
        triangles,
    }
}

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Ear-clipping triangulation of a simple polygon. Triangles come out
/// counter-clockwise whatever the input orientation.
pub fn triangulate_polygon(points: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 3 {
        return Err(invalid("triangulate_polygon", "need at least three points"));
    }
    let area: f64 = (0..n)
        .map(|i| cross2([0.0, 0.0], points[i], points[(i + 1) % n]))
        .sum();
    if area == 0.0 {
        return Err(invalid("triangulate_polygon", "polygon has zero area"));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if area < 0.0 {
        idx.reverse();
    }
    let scale = area.abs();
    let mut out = Vec::with_capacity(n - 2);
    let (mut i, mut misses) = (0, 0);
    while idx.len() > 3 {
        let m = idx.len();
        let (a, b, c) = (idx[(i + m - 1) % m], idx[i % m], idx[(i + 1) % m]);
        let (pa, pb, pc) = (points[a], points[b], points[c]);
        let convex = cross2(pa, pb, pc) > 1e-14 * scale;
        let blocked = convex
            && idx.iter().any(|&k| {
                let q = points[k];
                if k == a || k == b || k == c || q == pa || q == pb || q == pc {
                    return false;
                }
                cross2(pa, pb, q) >= 0.0 && cross2(pb, pc, q) >= 0.0 && cross2(pc, pa, q) >= 0.0
            });
        if convex && !blocked {
            out.push([a, b, c]);
            idx.remove(i % m);
            misses = 0;
        } else {
            i += 1;
            misses += 1;
            if misses > m {
                return Err(invalid("triangulate_polygon", "polygon is not simple"));
            }
        }
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

/// Solid swept by a planar section that turns by 2π per `pitch` of rise
/// about the z axis; slice `i` lies at `z0 + i·dz`. Both ends are capped.
pub fn helical_sweep(
    section: &[[f64; 2]],
    pitch: f64,
    z0: f64,
    dz: f64,
    slices: usize,
) -> Result<TriMesh> {
    if !(dz > 0.0) || slices == 0 || !pitch.is_finite() || pitch == 0.0 {
        return Err(invalid(
            "helical_sweep",
            "need positive slice spacing, a slice and a non-zero pitch",
        ));
    }
    let cap = triangulate_polygon(section)?;
    let mut ring: Vec<[f64; 2]> = section.to_vec();
    let area: f64 = (0..ring.len())
        .map(|i| cross2([0.0, 0.0], ring[i], ring[(i + 1) % ring.len()]))
        .sum();
    let ccw = area > 0.0;
    if !ccw {
        ring.reverse();
    }
    let m = ring.len();
    // cap indices refer to the caller's order
    let remap = |k: usize| if ccw { k } else { m - 1 - k };
    let mut vertices = Vec::with_capacity((slices + 1) * m);
    for i in 0..=slices {
        let z = z0 + i as f64 * dz;
        let (s, c) = (std::f64::consts::TAU * z / pitch).sin_cos();
        vertices.extend(
            ring.iter()
                .map(|p| Vec3::new(c * p[0] - s * p[1], s * p[0] + c * p[1], z)),
        );
    }
    let id = |i: usize, j: usize| (i * m + j % m) as u32;
    let mut triangles = Vec::with_capacity(2 * slices * m + 2 * cap.len());
    for i in 0..slices {
        for j in 0..m {
            triangles.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
        }
    }
    for t in &cap {
        let [a, b, c] = t.map(remap);
        triangles.push([id(slices, a), id(slices, b), id(slices, c)]);
        triangles.push([id(0, a), id(0, c), id(0, b)]);
    }
    TriMesh::new(vertices, triangles)
}

/// A parametric surface piece on `[0, 1]²`.
pub trait Patch: Sync {
    fn point(&self, u: f64, v: f64) -> Vec3;
    /// Whether the patch closes on itself in u and in v.
    fn periodic(&self) -> (bool, bool) {
        (false, false)
    }
}

fn iso_length(p: &dyn Patch, along_u: bool) -> f64 {
    const PROBES: usize = 9;
    const SEGS: usize = 64;
    (0..PROBES)
        .map(|k| {
            let w = k as f64 / (PROBES - 1) as f64;
            (0..SEGS)
                .map(|s| {
                    let (a, b) = (s as f64 / SEGS as f64, (s + 1) as f64 / SEGS as f64);
                    if along_u {
                        p.point(a, w).dist(p.point(b, w))
                    } else {
                        p.point(w, a).dist(p.point(w, b))
                    }
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Mesh a closed surface given as patches whose shared boundaries are
/// evaluated identically. `resolution` bounds the grid spacing.
pub fn triangulate(patches: &[&dyn Patch], resolution: f64) -> Result<TriMesh> {
    if !(resolution > 0.0) {
        return Err(invalid("triangulate", "resolution must be positive"));
    }
    let mut soup = TriMesh::default();
    for p in patches {
        let (pu, pv) = p.periodic();
        let nu = ((iso_length(*p, true) / resolution).ceil() as usize).max(if pu { 3 } else { 1 });
        let nv = ((iso_length(*p, false) / resolution).ceil() as usize).max(if pv { 3 } else { 1 });
        let (cols, rows) = (if pu { nu } else { nu + 1 }, if pv { nv } else { nv + 1 });
        let mut pts = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                pts.push(p.point(j as f64 / nu as f64, i as f64 / nv as f64));
            }
        }
        soup.append(&grid_mesh(pts, rows, cols, pv, pu));
    }
    let mesh = soup.weld();
    let open = mesh.boundary_edges();
    if !open.is_empty() {
        return Err(Error::NonWatertight {
            op: "triangulate",
            edges: open,
        });
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    struct Torus;
    impl Patch for Torus {
        fn point(&self, u: f64, v: f64) -> Vec3 {
            let (a, b) = (TAU * u, TAU * v);
            Vec3::new(
                (2.0 + 0.5 * b.cos()) * a.cos(),
                (2.0 + 0.5 * b.cos()) * a.sin(),
                0.5 * b.sin(),
            )
        }
        fn periodic(&self) -> (bool, bool) {
            (true, true)
        }
    }

    struct Flat;
    impl Patch for Flat {
        fn point(&self, u: f64, v: f64) -> Vec3 {
            Vec3::new(u, v, 0.0)
        }
    }

    #[test]
    fn torus_euler_zero() {
        for res in [0.5, 0.2, 0.1] {
            let m = triangulate(&[&Torus], res).unwrap();
            let r = validate(&m);
            assert!(r.watertight && r.orientation_consistent, "{r:?}");
            assert_eq!(r.euler_characteristic, 0);
            assert_eq!(r.component_count, 1);
        }
    }

    #[test]
    fn open_patch_rejected() {
        match triangulate(&[&Flat], 0.25) {
            Err(Error::NonWatertight { edges, .. }) => assert_eq!(edges.len(), 16),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deleted_triangle_reported() {
        let mut m = triangulate(&[&Torus], 0.5).unwrap();
        m.triangles.pop();
        let r = validate(&m);
        assert!(!r.watertight);
        assert_eq!(r.boundary_edges, 3);
    }

    #[test]
    fn weld_merges_duplicates() {
        let v = vec![Vec3::ZERO, Vec3::X, Vec3::Y, Vec3::X, Vec3::ZERO];
        let m = TriMesh::new(v, vec![[0, 1, 2], [3, 4, 2], [0, 3, 1]]).unwrap();
        let w = m.weld();
        assert_eq!(w.vertices.len(), 3);
        assert_eq!(w.triangles.len(), 2);
    }

    #[test]
    fn index_out_of_range() {
        assert!(TriMesh::new(vec![Vec3::ZERO], vec![[0, 0, 1]]).is_err());
    }
}
