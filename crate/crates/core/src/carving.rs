//! Gear teeth carved from the relative motion of neighbouring rings.
//!
//! A gear is stored as a height field over its torus chart: the tube radius
//! `T(α, β)` measured from the core circle. Ring 0 carries master teeth on
//! the innermost longitude; its two outer gearing longitudes start as
//! blanks and are carved by sweeping the neighbour's gap-offset master teeth
//! through the relative motion, keeping on every chart ray the swept point
//! closest to the core circle. The second outer band follows from the
//! first by the half-turn symmetry (α, β) ↦ (−α, −β) of the design, and the
//! other two gears are rotated copies.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::clearance::{Collider, CoreHint};
use crate::design::{contact_points, DesignConfig};
use crate::distance::{circle_circle_distance, point_circle_distance, DEFAULT_TOL};
use crate::error::{invalid, Error, Result};
use crate::geometry::{chart_coords, chart_point, rot_z, wrap_angle, Circle3, TorusCoords, Vec3};
use crate::kinematics::relative_motion;
use crate::mesh::{grid_mesh, validate, TriMesh};
use crate::numeric::brent_min;
use crate::profile::{master_tooth_profile, offset_profile, ToothProfile};
use crate::spline::HermiteSpline;

/// Gearing longitudes of ring 0: (inner |β|, outer |β|) from its contacts.
pub fn gearing_longitudes(cfg: &DesignConfig) -> Result<(f64, f64)> {
    let contacts = if cfg.contacts.len() == 4 {
        cfg.contacts.clone()
    } else {
        contact_points(cfg)?
    };
    let (mut inner, mut outer) = (Vec::new(), Vec::new());
    for c in &contacts {
        if c.beta.abs() > PI / 2.0 {
            inner.push(c.beta.abs());
        } else {
            outer.push(c.beta.abs());
        }
    }
    if inner.len() != 2 || outer.len() != 2 {
        return Err(invalid(
            "assemble_gear",
            "expected two inner and two outer contacts",
        ));
    }
    Ok(((inner[0] + inner[1]) / 2.0, (outer[0] + outer[1]) / 2.0))
}

/// Chart slope dα/dβ of the relative sliding direction at the inner contact
/// of ring 0: tooth lines laid along it let mating teeth slide lengthwise.
pub fn default_flank_slope(cfg: &DesignConfig) -> Result<f64> {
    let core = cfg.circles[0];
    let rho = cfg.thickness;
    for ring in 1..3 {
        let other = cfg.circles[ring];
        let d = circle_circle_distance(&core, &other, DEFAULT_TOL)?;
        for &(sa, sb) in &d.minimizers {
            let p = (core.point(sa) + other.point(sb)) * 0.5;
            let (alpha, beta, _) = chart_coords(&core, p);
            if beta.abs() < PI / 2.0 {
                continue;
            }
            let v0 = core.normal().cross(p - core.center);
            let v1 = other.normal().cross(p - other.center);
            let v = v1 - v0;
            let e = 1e-6;
            let ea = (chart_point(&core, alpha + e, beta, rho)
                - chart_point(&core, alpha - e, beta, rho))
                / (2.0 * e);
            let eb = (chart_point(&core, alpha, beta + e, rho)
                - chart_point(&core, alpha, beta - e, rho))
                / (2.0 * e);
            // least squares v ≈ x·ea + y·eb (ea ⟂ eb)
            let x = v.dot(ea) / ea.norm_sq();
            let y = v.dot(eb) / eb.norm_sq();
            return Ok(x / y);
        }
    }
    Err(invalid("default_flank_slope", "no inner contact found"))
}

/// Tooth and carving parameters of a gear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GearSpec {
    #[serde(flatten)]
    pub profile: ToothProfile,
    /// Print gap left between mating teeth.
    pub gap: f64,
    /// Half-width in β of the master tooth band.
    pub inner_half_width: f64,
    /// Half-width in β of each outer (carved) band.
    pub outer_half_width: f64,
    /// β distance over which tooth bands blend into the plain body.
    pub fade: f64,
    pub hollow: bool,
    /// Mesh nodes per tooth pitch along the ring.
    pub pitch_nodes: usize,
    /// β spacing of mesh rows in the outer bands and elsewhere.
    pub band_step: f64,
    pub body_step: f64,
    /// Sweep instants per tooth pitch of rotation.
    pub carve_steps: usize,
}

impl GearSpec {
    /// Defaults: 12 teeth, addendum = dedendum = ρ/4, top land 0.2 of the
    /// pitch, gap 0.02, tooth lines along the sliding direction.
    pub fn for_design(cfg: &DesignConfig) -> Result<GearSpec> {
        let (inner, _) = gearing_longitudes(cfg)?;
        let rho = cfg.thickness;
        Ok(GearSpec {
            profile: ToothProfile {
                beta0: inner,
                tooth_count: 12,
                addendum: 0.25 * rho,
                dedendum: 0.25 * rho,
                flank_slope: default_flank_slope(cfg)?,
                top_land_fraction: 0.2,
            },
            gap: 0.02,
            inner_half_width: 0.35,
            outer_half_width: 0.5,
            fade: 0.08,
            hollow: false,
            pitch_nodes: 20,
            band_step: 0.012,
            body_step: 0.05,
            carve_steps: 120,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        let ok = self.gap >= 0.0
            && self.inner_half_width > 0.0
            && self.outer_half_width > 0.0
            && self.fade > 0.0
            && self.pitch_nodes >= 8
            && self.band_step > 0.0
            && self.body_step >= self.band_step
            && self.carve_steps >= 8;
        if !ok {
            return Err(invalid(
                "assemble_gear",
                "gear spec has non-positive widths or too few samples",
            ));
        }
        Ok(())
    }
}

fn window(db: f64, half_width: f64, fade: f64) -> f64 {
    ((half_width - db.abs()) / fade).clamp(0.0, 1.0)
}

/// Radial layout of ring 0 before carving.
#[derive(Debug, Clone)]
struct Layout {
    rho: f64,
    spec: GearSpec,
    outer_beta: f64,
    /// Offset master heights over one turn at the band centre, indexed by α.
    carver_table: Vec<f64>,
}

impl Layout {
    fn new(cfg: &DesignConfig, spec: &GearSpec) -> Result<Layout> {
        spec.validate()?;
        let (_, outer_beta) = gearing_longitudes(cfg)?;
        let rho = cfg.thickness;
        let master = master_tooth_profile(&spec.profile, true)?;
        let ell = cfg.circles[0].radius - rho;
        let offset = offset_profile(&master.developed(ell), spec.gap)?;
        let n = spec.profile.tooth_count * 256;
        let carver_table = offset.upper_envelope(-PI * ell, n);
        if carver_table.iter().any(|h| !h.is_finite()) {
            return Err(Error::OffsetTooLarge { gap: spec.gap });
        }
        Ok(Layout {
            rho,
            spec: *spec,
            outer_beta,
            carver_table,
        })
    }

    fn profile(&self) -> ToothProfile {
        ToothProfile {
            beta0: PI,
            ..self.spec.profile
        }
    }

    fn inner_window(&self, beta: f64) -> f64 {
        window(
            wrap_angle(beta - PI),
            self.spec.inner_half_width,
            self.spec.fade,
        )
    }

    fn master(&self, alpha: f64, beta: f64) -> f64 {
        let p = self.profile();
        let d = p.dedendum;
        self.rho - d + (p.height(p.phase(alpha, beta)) + d) * self.inner_window(beta)
    }

    fn blank(&self, beta: f64) -> f64 {
        let p = &self.spec.profile;
        let (w, f) = (self.spec.outer_half_width, self.spec.fade);
        let on = window(beta - self.outer_beta, w, f).max(window(beta + self.outer_beta, w, f));
        self.rho - p.dedendum + (p.addendum + p.dedendum) * on
    }

    fn base(&self, alpha: f64, beta: f64) -> f64 {
        self.blank(beta).max(self.master(alpha, beta))
    }

    /// Tube radius of the gap-offset master region used as the carver.
    fn carver(&self, alpha: f64, beta: f64) -> f64 {
        let p = self.profile();
        let n = self.carver_table.len();
        let x = wrap_angle(alpha - p.flank_slope * wrap_angle(beta - PI));
        let f = (x + PI) / TAU * n as f64;
        let i = f.floor();
        let w = f - i;
        let (a, b) = (
            self.carver_table[(i as usize) % n],
            self.carver_table[(i as usize + 1) % n],
        );
        let h = a + (b - a) * w;
        let body = -p.dedendum + self.spec.gap;
        self.rho + body + (h - body) * self.inner_window(beta)
    }

    fn carver_extent(&self) -> f64 {
        self.spec.inner_half_width + self.spec.fade + 0.05
    }

    fn outer_extent(&self) -> (f64, f64) {
        let w = self.spec.outer_half_width + self.spec.fade + 0.05;
        (
            (self.outer_beta - w).max(0.0),
            (self.outer_beta + w).min(PI),
        )
    }
}

/// Nearest-to-core envelope of the swept carver, folded to one pitch in α.
#[derive(Debug, Clone)]
struct CarveGrid {
    pitch: f64,
    na: usize,
    beta_lo: f64,
    beta_step: f64,
    nb: usize,
    values: Vec<f64>,
}

impl CarveGrid {
    fn new(pitch: f64, na: usize, beta_hi: f64, beta_step: f64) -> CarveGrid {
        let nb = (2.0 * beta_hi / beta_step).ceil() as usize + 1;
        CarveGrid {
            pitch,
            na,
            beta_lo: -beta_hi,
            beta_step,
            nb,
            values: vec![f64::INFINITY; na * nb],
        }
    }

    fn splat(&mut self, alpha: f64, beta: f64, d: f64) {
        let fa = alpha.rem_euclid(self.pitch) / self.pitch * self.na as f64;
        let fb = (beta - self.beta_lo) / self.beta_step;
        if fb < 0.0 || fb >= (self.nb - 1) as f64 {
            return;
        }
        let (i, j) = (fa as usize % self.na, fb as usize);
        for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let slot = &mut self.values[(j + dj) * self.na + (i + di) % self.na];
            if d < *slot {
                *slot = d;
            }
        }
    }

    fn sample(&self, alpha: f64, beta: f64) -> f64 {
        let fa = alpha.rem_euclid(self.pitch) / self.pitch * self.na as f64;
        let fb = (beta - self.beta_lo) / self.beta_step;
        if fb < 0.0 || fb > (self.nb - 1) as f64 {
            return f64::INFINITY;
        }
        let (i, j) = (
            fa.floor() as usize % self.na,
            (fb.floor() as usize).min(self.nb - 2),
        );
        let (u, v) = (fa - fa.floor(), fb - j as f64);
        let at = |jj: usize, ii: usize| self.values[jj * self.na + ii % self.na];
        let (a, b, c, d) = (at(j, i), at(j, i + 1), at(j + 1, i), at(j + 1, i + 1));
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite()) {
            // carving border: err toward removing material
            return a.min(b).min(c).min(d);
        }
        (a * (1.0 - u) + b * u) * (1.0 - v) + (c * (1.0 - u) + d * u) * v
    }
}

fn carve(cfg: &DesignConfig, layout: &Layout) -> CarveGrid {
    let p = layout.profile();
    let pitch = p.pitch();
    let (_, hi) = layout.outer_extent();
    let mut grid = CarveGrid::new(pitch, 72, hi, 0.004);
    let driver_core = cfg.circles[1];
    let target = cfg.circles[0];
    let reach = layout.rho + p.addendum + 0.1;

    // carver samples in the driver's rest frame (same chart layout as ring 0)
    let na = p.tooth_count * 120;
    let ext = layout.carver_extent();
    let nb = (2.0 * ext / 0.004).ceil() as usize + 1;
    let steps = layout.spec.carve_steps;
    let times: Vec<f64> = (0..steps)
        .map(|k| pitch * k as f64 / steps as f64)
        .collect();
    let motions: Vec<_> = times
        .iter()
        .map(|&t| relative_motion(cfg, 0, 1, 1.0, t))
        .collect();
    let mut points = Vec::new();
    for j in 0..nb {
        let beta = PI - ext + 2.0 * ext * j as f64 / (nb - 1) as f64;
        for i in 0..na {
            let alpha = -PI + TAU * i as f64 / na as f64;
            let q = chart_point(&driver_core, alpha, beta, layout.carver(alpha, beta));
            // keep samples that come within reach of the target core
            let near = motions
                .iter()
                .step_by(8)
                .chain(motions.last())
                .any(|m| point_circle_distance(m.apply(q), &target).distance < reach);
            if near {
                points.push(q);
            }
        }
    }
    for m in &motions {
        for &q in &points {
            let (a, b, d) = chart_coords(&target, m.apply(q));
            grid.splat(a, b, d);
        }
    }
    grid
}

/// Chart-grid surface piece of a gear: node (r, c) sits at chart angles
/// `alpha[r·cols + c]`, `beta[..]` and distance `h[..]` from the core.
#[derive(Debug, Clone, PartialEq)]
pub struct GearPatch {
    pub core: Circle3,
    pub pitch_radius: f64,
    pub addendum: f64,
    pub dedendum: f64,
    pub rows: usize,
    pub cols: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub h: Vec<f64>,
}

impl GearPatch {
    pub fn point(&self, r: usize, c: usize) -> Vec3 {
        let k = r * self.cols + c;
        chart_point(&self.core, self.alpha[k], self.beta[k], self.h[k])
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .map(|(r, c)| self.point(r, c))
            .collect()
    }
}

fn quantile(mut v: Vec<f64>, q: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = ((v.len() - 1) as f64 * q).round() as usize;
    v[k]
}

/// Cut tooth tips so that along every row a `land` fraction sits on a flat
/// top, never above the addendum surface.
pub fn truncate_top_land(patches: &[GearPatch], land: f64) -> Result<Vec<GearPatch>> {
    if !(land > 0.0 && land < 0.5) {
        return Err(invalid(
            "truncate_top_land",
            format!("land fraction {land} outside (0, 0.5)"),
        ));
    }
    let mut out = patches.to_vec();
    for p in &mut out {
        let top = p.pitch_radius + p.addendum;
        for r in 0..p.rows {
            let row = &mut p.h[r * p.cols..(r + 1) * p.cols];
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
                .min(top);
            let level = quantile(row.to_vec(), 1.0 - land).min(top);
            let relief = hi - lo;
            if relief > 0.5 * (p.addendum + p.dedendum) && level <= lo + 0.1 * relief {
                return Err(invalid(
                    "truncate_top_land",
                    format!("land fraction {land} removes the teeth"),
                ));
            }
            for h in row.iter_mut() {
                *h = h.min(level);
            }
        }
    }
    Ok(out)
}

/// Sampled gear surface: tube radius on a chart grid. Row `i` lies at
/// β = `betas[i]`; node `j` of that row at α = `alphas[j] + shear·sin(β − π)`,
/// which keeps grid columns on the master tooth corners.
#[derive(Debug, Clone, PartialEq)]
pub struct GearField {
    pub core: Circle3,
    pub pitch_radius: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub shear: f64,
    pub heights: Vec<f64>,
}

impl GearField {
    pub fn alpha_at(&self, i: usize, j: usize) -> f64 {
        self.alphas[j] + self.shear * (self.betas[i] - PI).sin()
    }

    pub fn height(&self, i: usize, j: usize) -> f64 {
        self.heights[i * self.alphas.len() + j]
    }

    pub fn point(&self, i: usize, j: usize) -> Vec3 {
        chart_point(
            &self.core,
            self.alpha_at(i, j),
            self.betas[i],
            self.height(i, j),
        )
    }

    fn shell(&self, inset: f64) -> TriMesh {
        let (rows, cols) = (self.betas.len(), self.alphas.len());
        let pts = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| {
                chart_point(
                    &self.core,
                    self.alpha_at(i, j),
                    self.betas[i],
                    self.height(i, j) - inset,
                )
            })
            .collect();
        let mut m = grid_mesh(pts, rows, cols, true, true);
        if m.signed_volume() < 0.0 {
            m.flip();
        }
        m
    }

    /// Closed surface; with `wall` a second, inward-facing shell sits at
    /// that radial depth below the first.
    pub fn mesh(&self, wall: Option<f64>) -> TriMesh {
        let mut m = self.shell(0.0);
        if let Some(w) = wall {
            let mut inner = self.shell(w);
            inner.flip();
            m.append(&inner);
        }
        m
    }

    /// Number of teeth along the row nearest to `beta`.
    pub fn teeth_on_row(&self, beta: f64) -> usize {
        let i = (0..self.betas.len())
            .min_by(|&a, &b| {
                wrap_angle(self.betas[a] - beta)
                    .abs()
                    .total_cmp(&wrap_angle(self.betas[b] - beta).abs())
            })
            .unwrap_or(0);
        let row: Vec<f64> = (0..self.alphas.len()).map(|j| self.height(i, j)).collect();
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-9 {
            return 0;
        }
        let mid = 0.5 * (lo + hi);
        let n = row.len();
        (0..n)
            .filter(|&j| row[j] < mid && row[(j + 1) % n] >= mid)
            .count()
    }

    /// Rows `[r0, r1)` as a patch.
    pub fn patch(&self, r0: usize, r1: usize, profile: &ToothProfile) -> GearPatch {
        let cols = self.alphas.len();
        let mut p = GearPatch {
            core: self.core,
            pitch_radius: self.pitch_radius,
            addendum: profile.addendum,
            dedendum: profile.dedendum,
            rows: r1 - r0,
            cols,
            alpha: Vec::new(),
            beta: Vec::new(),
            h: Vec::new(),
        };
        for i in r0..r1 {
            for j in 0..cols {
                p.alpha.push(self.alpha_at(i, j));
                p.beta.push(self.betas[i]);
                p.h.push(self.height(i, j));
            }
        }
        p
    }
}

/// A finished gear.
#[derive(Debug, Clone)]
pub struct GearSolid {
    pub mesh: TriMesh,
    pub field: GearField,
    pub spec: GearSpec,
    /// Design parameters (r, φ, θ) the gear was carved for.
    pub provenance: [f64; 3],
    pub hollow: bool,
}

fn beta_rows(layout: &Layout) -> Vec<f64> {
    let (lo, hi) = layout.outer_extent();
    let inner = PI - layout.carver_extent();
    // breakpoints on [0, π] with their spacing, mirrored to (−π, 0)
    let spans = [
        (0.0, lo, layout.spec.body_step),
        (lo, hi, layout.spec.band_step),
        (hi, inner, layout.spec.body_step),
        (inner, PI, 0.03),
    ];
    let mut half = vec![0.0];
    for (a, b, step) in spans {
        if b <= a {
            continue;
        }
        let n = ((b - a) / step).ceil() as usize;
        for k in 1..=n {
            half.push(a + (b - a) * k as f64 / n as f64);
        }
    }
    let mut out: Vec<f64> = half[1..half.len() - 1].iter().rev().map(|b| -b).collect();
    out.extend(half);
    out
}

fn alpha_nodes(profile: &ToothProfile, per_pitch: usize) -> Vec<f64> {
    let t = profile.top_land_fraction;
    // pitch phases from −1/2 with the four corners as nodes
    let corners = [-0.5, -0.5 + 0.5 * t, -0.5 * t, 0.5 * t, 0.5 - 0.5 * t, 0.5];
    let mut phases = Vec::new();
    for w in corners.windows(2) {
        let k = ((w[1] - w[0]) * per_pitch as f64).round().max(1.0) as usize;
        for s in 0..k {
            phases.push(w[0] + (w[1] - w[0]) * s as f64 / k as f64);
        }
    }
    let pitch = profile.pitch();
    (0..profile.tooth_count)
        .flat_map(|k| {
            phases
                .iter()
                .map(move |u| -PI + pitch * (k as f64 + 0.5 + u))
        })
        .collect()
}

/// Carve and assemble the gear of ring 0.
pub fn assemble_gear(cfg: &DesignConfig, spec: &GearSpec) -> Result<GearSolid> {
    let layout = Layout::new(cfg, spec)?;
    let grid = carve(cfg, &layout);
    let profile = layout.profile();
    let betas = beta_rows(&layout);
    let alphas = alpha_nodes(&profile, spec.pitch_nodes);
    let mut field = GearField {
        core: cfg.circles[0],
        pitch_radius: layout.rho,
        alphas,
        betas,
        shear: profile.flank_slope,
        heights: Vec::new(),
    };
    let (rows, cols) = (field.betas.len(), field.alphas.len());
    field.heights = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .map(|(i, j)| {
            let (a, b) = (field.alpha_at(i, j), field.betas[i]);
            let carved = grid.sample(a, b).min(grid.sample(-a, -b));
            layout.base(a, b).min(carved)
        })
        .collect();

    // top lands on the carved bands
    let (lo, hi) = layout.outer_extent();
    for sign in [-1.0, 1.0] {
        let inside: Vec<usize> = (0..rows)
            .filter(|&i| (sign * field.betas[i] >= lo) && (sign * field.betas[i] <= hi))
            .collect();
        let (r0, r1) = (inside[0], inside[inside.len() - 1] + 1);
        let patch = field.patch(r0, r1, &profile);
        let cut = truncate_top_land(&[patch], profile.top_land_fraction)?;
        field.heights[r0 * cols..r1 * cols].copy_from_slice(&cut[0].h);
    }

    let wall = spec.hollow.then_some(0.15 * layout.rho);
    let mesh = field.mesh(wall);
    let report = validate(&mesh);
    if !report.watertight {
        return Err(Error::NonWatertight {
            op: "assemble_gear",
            edges: mesh.boundary_edges(),
        });
    }
    let prm = cfg.params;
    Ok(GearSolid {
        mesh,
        field,
        spec: *spec,
        provenance: [prm.r, prm.phi, prm.theta],
        hollow: spec.hollow,
    })
}

/// Toothless ring of constant tube radius on the mesh grid of `spec`.
pub fn smooth_gear(cfg: &DesignConfig, spec: &GearSpec, tube_radius: f64) -> Result<GearSolid> {
    let layout = Layout::new(cfg, spec)?;
    if !(tube_radius > 0.0 && tube_radius < cfg.circles[0].radius) {
        return Err(invalid(
            "smooth_gear",
            format!("tube radius {tube_radius} out of range"),
        ));
    }
    let profile = layout.profile();
    let field = GearField {
        core: cfg.circles[0],
        pitch_radius: tube_radius,
        alphas: alpha_nodes(&profile, spec.pitch_nodes),
        betas: beta_rows(&layout),
        shear: profile.flank_slope,
        heights: Vec::new(),
    };
    let field = GearField {
        heights: vec![tube_radius; field.alphas.len() * field.betas.len()],
        ..field
    };
    let mesh = field.mesh(spec.hollow.then_some(0.15 * tube_radius));
    let prm = cfg.params;
    Ok(GearSolid {
        mesh,
        field,
        spec: *spec,
        provenance: [prm.r, prm.phi, prm.theta],
        hollow: spec.hollow,
    })
}

/// All three gears: ring 0's gear and its rotates by 2π/3 and 4π/3.
pub fn assemble_triple(cfg: &DesignConfig, spec: &GearSpec) -> Result<[GearSolid; 3]> {
    let g0 = assemble_gear(cfg, spec)?;
    let rotate = |k: f64| {
        let m = rot_z(k * TAU / 3.0);
        GearSolid {
            mesh: g0.mesh.transformed(&m),
            field: GearField {
                core: g0.field.core.transformed(&m),
                ..g0.field.clone()
            },
            ..g0.clone()
        }
    };
    let (g1, g2) = (rotate(1.0), rotate(2.0));
    Ok([g0, g1, g2])
}

impl GearSolid {
    /// Collider bounded by the field's lowest and highest tube radius.
    pub fn collider(&self) -> Result<Collider> {
        let lo = self
            .field
            .heights
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let hi = self.field.heights.iter().copied().fold(0.0, f64::max);
        // facets cut a little below the lowest node on the convex side
        let inner = if self.hollow { 0.0 } else { 0.9 * lo };
        let hint = CoreHint::Circle {
            core: self.field.core,
            min_radius: inner,
            max_radius: hi + 1e-3,
        };
        Collider::new(self.mesh.clone(), Some(hint))
    }
}

/// Envelope points left by one curve of the driver ring, with a fitted
/// smooth curve through them.
#[derive(Debug, Clone)]
pub struct FlankCurve {
    pub times: Vec<f64>,
    /// Envelope points in the target ring's rest frame.
    pub samples: Vec<Vec3>,
    pub chart_samples: Vec<TorusCoords>,
    /// Distance of each sample from the target core.
    pub depths: Vec<f64>,
    pub target_core: Circle3,
    pub fit: HermiteSpline,
    pub residual: f64,
}

impl FlankCurve {
    /// Sample `k` rebuilt from its chart coordinates.
    pub fn chart_point(&self, k: usize) -> Vec3 {
        let c = self.chart_samples[k];
        chart_point(&self.target_core, c.alpha, c.beta, self.depths[k])
    }
}

/// A driver curve placed in the target ring's frame at time `t`.
pub fn sweep_family(
    curve: &[Vec3],
    cfg: &DesignConfig,
    driver: usize,
    target: usize,
    omega: f64,
    t: f64,
) -> Vec<Vec3> {
    let m = relative_motion(cfg, target, driver, omega, t);
    curve.iter().map(|&p| m.apply(p)).collect()
}

fn closest_on_polyline(pts: &[Vec3], core: &Circle3, step: usize) -> Result<Vec3> {
    let d: Vec<f64> = pts
        .iter()
        .map(|&p| point_circle_distance(p, core).distance)
        .collect();
    let n = d.len();
    let best = (0..n)
        .min_by(|&a, &b| d[a].total_cmp(&d[b]))
        .expect("non-empty curve");
    // a second, separate local minimum as low as the best is ambiguous
    for k in 0..n {
        let local = (k == 0 || d[k] <= d[k - 1]) && (k + 1 == n || d[k] <= d[k + 1]);
        if local && k.abs_diff(best) > 2 && d[k] <= d[best] + 1e-9 {
            return Err(Error::Ambiguous { step });
        }
    }
    let mut cand = (d[best], pts[best]);
    for (a, b) in [
        (best.saturating_sub(1), best),
        (best, (best + 1).min(n - 1)),
    ] {
        if a == b {
            continue;
        }
        let (pa, pb) = (pts[a], pts[b]);
        let (s, v) = brent_min(
            |s| point_circle_distance(pa + (pb - pa) * s, core).distance,
            0.0,
            1.0,
            1e-12,
        );
        if v < cand.0 {
            cand = (v, pa + (pb - pa) * s);
        }
    }
    Ok(cand.1)
}

/// Sweep `curve` (driver rest frame) through the driver's motion relative
/// to `target`; at each instant keep its point nearest the target core and
/// fit a C¹ cubic through those points over time.
pub fn carve_flank(
    curve: &[Vec3],
    cfg: &DesignConfig,
    driver: usize,
    target: usize,
    omega: f64,
    times: &[f64],
) -> Result<FlankCurve> {
    const FIT_LIMIT: f64 = 1e-4;
    if times.len() < 180 {
        return Err(invalid(
            "carve_flank",
            format!("need at least 180 steps, got {}", times.len()),
        ));
    }
    if curve.len() < 2 {
        return Err(invalid("carve_flank", "curve needs at least two points"));
    }
    let core = cfg.circles[target];
    let mut samples = Vec::with_capacity(times.len());
    for (step, &t) in times.iter().enumerate() {
        let family = sweep_family(curve, cfg, driver, target, omega, t);
        samples.push(closest_on_polyline(&family, &core, step)?);
    }
    let mut chart_samples = Vec::new();
    let mut depths = Vec::new();
    for &p in &samples {
        let (a, b, h) = chart_coords(&core, p);
        chart_samples.push(TorusCoords { alpha: a, beta: b });
        depths.push(h);
    }
    let segments = (times.len() / 12).max(1);
    let (fit, residual) = HermiteSpline::fit(times, &samples, segments)?;
    if residual > FIT_LIMIT {
        return Err(Error::FitFailure {
            residual,
            limit: FIT_LIMIT,
        });
    }
    Ok(FlankCurve {
        times: times.to_vec(),
        samples,
        chart_samples,
        depths,
        target_core: core,
        fit,
        residual,
    })
}

/// Loft consecutive flank curves into chart-grid patches; row `k` of the
/// combined grid runs through the samples of flank `k`, so all flanks need
/// the same number of samples.
pub fn flank_surface(
    flanks: &[FlankCurve],
    profile: &ToothProfile,
    pitch_radius: f64,
) -> Result<Vec<GearPatch>> {
    if flanks.len() < 2 {
        return Err(invalid("flank_surface", "need at least two flanks"));
    }
    let cols = flanks[0].samples.len();
    if cols < 2 || flanks.iter().any(|f| f.samples.len() != cols) {
        return Err(invalid(
            "flank_surface",
            "flanks need equal sample counts of at least two",
        ));
    }
    let core = flanks[0].target_core;
    let rows: Vec<Vec<(f64, f64, f64)>> = flanks
        .iter()
        .map(|f| {
            (0..cols)
                .map(|c| {
                    (
                        f.chart_samples[c].alpha,
                        f.chart_samples[c].beta,
                        f.depths[c],
                    )
                })
                .collect()
        })
        .collect();
    let lift = |q: [f64; 2], base: [f64; 2]| {
        [
            base[0] + wrap_angle(q[0] - base[0]),
            base[1] + wrap_angle(q[1] - base[1]),
        ]
    };
    for k in 0..rows.len() - 1 {
        let (a, b) = (&rows[k], &rows[k + 1]);
        for i in 0..cols - 1 {
            let a0 = [a[i].0, a[i].1];
            let a1 = lift([a[i + 1].0, a[i + 1].1], a0);
            for j in 0..cols - 1 {
                let b0 = lift([b[j].0, b[j].1], a0);
                let b1 = lift([b[j + 1].0, b[j + 1].1], a0);
                if crate::profile::segments_cross(a0, a1, b0, b1) {
                    return Err(Error::DegenerateTooth {
                        first: k,
                        second: k + 1,
                    });
                }
            }
        }
    }
    let mut patches = Vec::new();
    for k in 0..rows.len() - 1 {
        let mut p = GearPatch {
            core,
            pitch_radius,
            addendum: profile.addendum,
            dedendum: profile.dedendum,
            rows: 2,
            cols,
            alpha: Vec::new(),
            beta: Vec::new(),
            h: Vec::new(),
        };
        for r in [&rows[k], &rows[k + 1]] {
            for &(a, b, h) in r {
                p.alpha.push(a);
                p.beta.push(b);
                p.h.push(h);
            }
        }
        patches.push(p);
    }
    // orient so that (∂/∂col × ∂/∂row) points away from the core
    let probe = &patches[0];
    let (p, pc, pr) = (probe.point(0, 0), probe.point(0, 1), probe.point(1, 0));
    let n = (pc - p).cross(pr - p);
    let out = p - point_circle_distance(p, &core).closest;
    if n.dot(out) < 0.0 {
        for patch in &mut patches {
            for r in 0..patch.rows {
                let s = r * patch.cols;
                patch.alpha[s..s + patch.cols].reverse();
                patch.beta[s..s + patch.cols].reverse();
                patch.h[s..s + patch.cols].reverse();
            }
        }
    }
    Ok(patches)
}
