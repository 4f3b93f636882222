//! Signed clearance between moving triangle meshes.
//!
//! Distances are exact vertex-to-triangle distances found through a
//! bounding volume hierarchy; the sign comes from ray parity.

use rayon::prelude::*;

use crate::distance::point_circle_distance;
use crate::error::{Error, Result};
use crate::geometry::{Circle3, RigidMotion, Vec3};
use crate::mesh::{validate, TriMesh};

const LEAF: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    lo: Vec3,
    hi: Vec3,
    // leaf: first triangle slot and count; inner: child indices
    a: u32,
    b: u32,
    leaf: bool,
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

fn box_dist_sq(p: Vec3, lo: Vec3, hi: Vec3) -> f64 {
    let d = |v: f64, l: f64, h: f64| {
        if v < l {
            l - v
        } else if v > h {
            v - h
        } else {
            0.0
        }
    };
    let (x, y, z) = (d(p.x, lo.x, hi.x), d(p.y, lo.y, hi.y), d(p.z, lo.z, hi.z));
    x * x + y * y + z * z
}

/// Closest point to `p` on triangle `abc`.
pub fn closest_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d1, d2) = (ab.dot(ap), ac.dot(ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let (d3, d4) = (ab.dot(bp), ac.dot(bp));
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let (d5, d6) = (ab.dot(cp), ac.dot(cp));
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

impl Bvh {
    pub fn build(mesh: &TriMesh) -> Bvh {
        let n = mesh.triangles.len();
        let boxes: Vec<(Vec3, Vec3, Vec3)> = (0..n)
            .map(|t| {
                let [a, b, c] = mesh.corners(t);
                let lo = a.min(b).min(c);
                let hi = a.max(b).max(c);
                (lo, hi, (lo + hi) * 0.5)
            })
            .collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF + 1);
        if n > 0 {
            Self::split(&boxes, &mut order, 0, n, &mut nodes);
        }
        Bvh { nodes, order }
    }

    fn split(
        boxes: &[(Vec3, Vec3, Vec3)],
        order: &mut [u32],
        start: usize,
        end: usize,
        nodes: &mut Vec<Node>,
    ) -> u32 {
        let inf = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let (mut lo, mut hi, mut clo, mut chi) = (inf, -inf, inf, -inf);
        for &t in &order[start..end] {
            let (l, h, c) = boxes[t as usize];
            lo = lo.min(l);
            hi = hi.max(h);
            clo = clo.min(c);
            chi = chi.max(c);
        }
        let id = nodes.len() as u32;
        nodes.push(Node {
            lo,
            hi,
            a: start as u32,
            b: (end - start) as u32,
            leaf: true,
        });
        if end - start <= LEAF {
            return id;
        }
        let ext = chi - clo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        order[start..end].select_nth_unstable_by(mid - start, |&p, &q| {
            boxes[p as usize]
                .2
                .axis(axis)
                .total_cmp(&boxes[q as usize].2.axis(axis))
        });
        let l = Self::split(boxes, order, start, mid, nodes);
        let r = Self::split(boxes, order, mid, end, nodes);
        nodes[id as usize] = Node {
            lo,
            hi,
            a: l,
            b: r,
            leaf: false,
        };
        id
    }

    /// Distance from `p` to the root box.
    pub fn box_distance(&self, p: Vec3) -> f64 {
        self.nodes
            .first()
            .map_or(f64::INFINITY, |n| box_dist_sq(p, n.lo, n.hi).sqrt())
    }

    /// Nearest surface point to `p` if closer than `bound`:
    /// `(distance, triangle, point)`.
    pub fn nearest(&self, mesh: &TriMesh, p: Vec3, bound: f64) -> Option<(f64, usize, Vec3)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best_sq = if bound.is_finite() {
            bound * bound
        } else {
            f64::INFINITY
        };
        let mut best: Option<(usize, Vec3)> = None;
        let mut stack: Vec<(u32, f64)> =
            vec![(0, box_dist_sq(p, self.nodes[0].lo, self.nodes[0].hi))];
        while let Some((ni, dsq)) = stack.pop() {
            if dsq >= best_sq {
                continue;
            }
            let node = &self.nodes[ni as usize];
            if node.leaf {
                for &t in &self.order[node.a as usize..(node.a + node.b) as usize] {
                    let [a, b, c] = mesh.corners(t as usize);
                    let q = closest_on_triangle(p, a, b, c);
                    let d = (q - p).norm_sq();
                    if d < best_sq {
                        best_sq = d;
                        best = Some((t as usize, q));
                    }
                }
            } else {
                let (l, r) = (&self.nodes[node.a as usize], &self.nodes[node.b as usize]);
                let (dl, dr) = (box_dist_sq(p, l.lo, l.hi), box_dist_sq(p, r.lo, r.hi));
                // push the farther child first so the nearer one pops next
                if dl < dr {
                    stack.push((node.b, dr));
                    stack.push((node.a, dl));
                } else {
                    stack.push((node.a, dl));
                    stack.push((node.b, dr));
                }
            }
        }
        best.map(|(t, q)| (best_sq.sqrt(), t, q))
    }

    /// Parity of ray crossings from `origin` along `dir`; `None` when the
    /// ray grazes an edge or vertex.
    fn ray_parity(&self, mesh: &TriMesh, origin: Vec3, dir: Vec3) -> Option<bool> {
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut inside = false;
        let mut stack = vec![0u32];
        while let Some(ni) = stack.pop() {
            let node = &self.nodes[ni as usize];
            if !slab_hit(origin, inv, node.lo, node.hi) {
                continue;
            }
            if !node.leaf {
                stack.push(node.a);
                stack.push(node.b);
                continue;
            }
            for &t in &self.order[node.a as usize..(node.a + node.b) as usize] {
                let [a, b, c] = mesh.corners(t as usize);
                match ray_triangle(origin, dir, a, b, c) {
                    Hit::Miss => {}
                    Hit::Cross => inside = !inside,
                    Hit::Graze => return None,
                }
            }
        }
        Some(inside)
    }

    /// Whether `p` lies inside the closed mesh.
    pub fn contains(&self, mesh: &TriMesh, p: Vec3) -> bool {
        const DIRS: [Vec3; 4] = [
            Vec3::new(0.577_215_664_9, 0.618_033_988_7, 0.529_964_273_3),
            Vec3::new(-0.301_029_995_6, 0.693_147_180_5, -0.654_983_446_2),
            Vec3::new(0.841_470_984_8, -0.247_403_959_3, 0.480_181_268_1),
            Vec3::new(-0.112_701_665_4, -0.435_889_894_4, 0.892_946_437_8),
        ];
        let mut votes: i32 = 0;
        for (k, d) in DIRS.iter().enumerate() {
            match self.ray_parity(mesh, p, *d) {
                Some(inside) if k == 0 => return inside,
                Some(inside) => votes += if inside { 1 } else { -1 },
                None => {}
            }
            if votes.abs() >= 2 {
                break;
            }
        }
        votes > 0
    }
}

fn slab_hit(o: Vec3, inv: Vec3, lo: Vec3, hi: Vec3) -> bool {
    let mut tmin: f64 = 0.0;
    let mut tmax = f64::INFINITY;
    for k in 0..3 {
        let (a, b) = (
            (lo.axis(k) - o.axis(k)) * inv.axis(k),
            (hi.axis(k) - o.axis(k)) * inv.axis(k),
        );
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        tmin = tmin.max(a);
        tmax = tmax.min(b);
        if tmin > tmax {
            return false;
        }
    }
    true
}

enum Hit {
    Miss,
    Cross,
    Graze,
}

fn ray_triangle(o: Vec3, d: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Hit {
    const EPS: f64 = 1e-12;
    let (e1, e2) = (b - a, c - a);
    let p = d.cross(e2);
    let det = e1.dot(p);
    let scale = e1.norm() * e2.norm();
    if det.abs() <= EPS * scale {
        return Hit::Miss;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(p) * inv;
    let q = s.cross(e1);
    let v = d.dot(q) * inv;
    let t = e2.dot(q) * inv;
    if u < -EPS || v < -EPS || u + v > 1.0 + EPS || t < -EPS {
        return Hit::Miss;
    }
    if u < EPS || v < EPS || u + v > 1.0 - EPS || t < EPS {
        return Hit::Graze;
    }
    Hit::Cross
}

/// Cheap bound on the region a solid occupies: every point of the solid is
/// within `max_radius` of the core, and every point within `min_radius` of
/// the core is inside the solid.
#[derive(Debug, Clone, Copy)]
pub enum CoreHint {
    Circle {
        core: Circle3,
        min_radius: f64,
        max_radius: f64,
    },
    Line {
        point: Vec3,
        direction: Vec3,
        min_radius: f64,
        max_radius: f64,
    },
}

impl CoreHint {
    fn radial(&self, p: Vec3) -> (f64, f64, f64) {
        match *self {
            CoreHint::Circle {
                core,
                min_radius,
                max_radius,
            } => (
                point_circle_distance(p, &core).distance,
                min_radius,
                max_radius,
            ),
            CoreHint::Line {
                point,
                direction,
                min_radius,
                max_radius,
            } => {
                let d = p - point;
                (
                    (d - direction * d.dot(direction)).norm(),
                    min_radius,
                    max_radius,
                )
            }
        }
    }
}

/// A closed mesh prepared for distance queries.
#[derive(Debug, Clone)]
pub struct Collider {
    pub mesh: TriMesh,
    bvh: Bvh,
    pub hint: Option<CoreHint>,
}

impl Collider {
    pub fn new(mesh: TriMesh, hint: Option<CoreHint>) -> Result<Collider> {
        let report = validate(&mesh);
        if !report.watertight {
            return Err(Error::NonWatertight {
                op: "min_clearance",
                edges: mesh.boundary_edges(),
            });
        }
        let bvh = Bvh::build(&mesh);
        Ok(Collider { mesh, bvh, hint })
    }

    /// Signed distance of `p` to the surface; negative inside.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        let d = self
            .bvh
            .nearest(&self.mesh, p, f64::INFINITY)
            .map_or(f64::INFINITY, |r| r.0);
        if self.bvh.contains(&self.mesh, p) {
            -d
        } else {
            d
        }
    }

    pub fn contains(&self, p: Vec3) -> bool {
        self.bvh.contains(&self.mesh, p)
    }

    /// Smallest signed distance of `points` to this solid, if below `bound`.
    /// Returns `(value, index of point, nearest surface point)`.
    fn min_signed(&self, points: &[Vec3], bound: f64) -> Option<(f64, usize, Vec3)> {
        let mut best = bound;
        let mut hit = None;
        for (i, &p) in points.iter().enumerate() {
            let (lb, maybe_inside) = match &self.hint {
                Some(h) => {
                    let (r, _, rmax) = h.radial(p);
                    (r - rmax, r <= rmax)
                }
                None => {
                    let b = self.bvh.box_distance(p);
                    (b, b <= 0.0)
                }
            };
            if lb >= best {
                continue;
            }
            if maybe_inside && self.bvh.contains(&self.mesh, p) {
                if let Some((d, _, q)) = self.bvh.nearest(&self.mesh, p, f64::INFINITY) {
                    if -d < best {
                        best = -d;
                        hit = Some((-d, i, q));
                    }
                }
                continue;
            }
            if let Some((d, _, q)) = self.bvh.nearest(&self.mesh, p, best) {
                best = d;
                hit = Some((d, i, q));
            }
        }
        hit
    }
}

/// Closest approach of two placed solids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approach {
    /// Signed clearance; negative when a vertex of one solid lies inside the
    /// other.
    pub clearance: f64,
    /// World-space vertex realising the clearance.
    pub vertex: Vec3,
    /// Nearest world-space point on the other surface.
    pub surface: Vec3,
    /// Whether `vertex` belongs to the first solid.
    pub vertex_on_first: bool,
}

/// Signed vertex-to-surface clearance between two placed solids.
pub fn approach(a: &Collider, ma: &RigidMotion, b: &Collider, mb: &RigidMotion) -> Approach {
    let mut out = Approach {
        clearance: f64::INFINITY,
        vertex: Vec3::ZERO,
        surface: Vec3::ZERO,
        vertex_on_first: true,
    };
    for (first, (x, mx), (y, my)) in [(true, (a, ma), (b, mb)), (false, (b, mb), (a, ma))] {
        // x's vertices in y's frame
        let rel = crate::geometry::compose(&my.inverse(), mx);
        let pts: Vec<Vec3> = x.mesh.vertices.iter().map(|&v| rel.apply(v)).collect();
        if let Some((d, i, q)) = y.min_signed(&pts, out.clearance) {
            out = Approach {
                clearance: d,
                vertex: my.apply(pts[i]),
                surface: my.apply(q),
                vertex_on_first: first,
            };
        }
    }
    out
}

/// A solid and its placement as a function of time.
pub struct MovingBody<'a> {
    pub collider: &'a Collider,
    pub motion: Box<dyn Fn(f64) -> RigidMotion + Sync + 'a>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceSample {
    pub step: usize,
    pub time: f64,
    pub pair: (usize, usize),
    pub approach: Approach,
}

/// Clearance of every listed pair at every time, ordered by step then pair.
pub fn sweep(
    bodies: &[MovingBody],
    pairs: &[(usize, usize)],
    times: &[f64],
) -> Vec<ClearanceSample> {
    times
        .par_iter()
        .enumerate()
        .flat_map_iter(|(step, &time)| {
            let placed: Vec<RigidMotion> = bodies.iter().map(|b| (b.motion)(time)).collect();
            pairs
                .iter()
                .map(|&(i, j)| ClearanceSample {
                    step,
                    time,
                    pair: (i, j),
                    approach: approach(
                        bodies[i].collider,
                        &placed[i],
                        bodies[j].collider,
                        &placed[j],
                    ),
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Minimum over a sweep, with the sample that attains it (earliest on ties).
pub fn minimum(samples: &[ClearanceSample]) -> Option<ClearanceSample> {
    samples.iter().copied().reduce(|a, b| {
        if b.approach.clearance < a.approach.clearance {
            b
        } else {
            a
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_point(k: u64) -> Vec3 {
        let f = |s: u64| {
            ((s.wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407)
                >> 11) as f64)
                / (1u64 << 53) as f64
        };
        Vec3::new(
            f(3 * k + 1) * 2.0 - 1.0,
            f(3 * k + 2) * 2.0 - 1.0,
            f(3 * k + 3) * 2.0 - 1.0,
        )
    }

    #[test]
    fn closest_point_matches_brute_force() {
        let (a, b, c) = (
            Vec3::new(0.1, 0.0, 0.2),
            Vec3::new(1.0, 0.3, -0.1),
            Vec3::new(0.2, 0.9, 0.4),
        );
        for k in 0..200 {
            let p = rand_point(k) * 2.0;
            let q = closest_on_triangle(p, a, b, c);
            let mut best = f64::INFINITY;
            let n = 300;
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let (u, v) = (i as f64 / n as f64, j as f64 / n as f64);
                    best = best.min(p.dist(a + (b - a) * u + (c - a) * v));
                }
            }
            assert!(p.dist(q) <= best + 1e-12);
            assert!(best - p.dist(q) < 5e-3);
        }
    }
}
