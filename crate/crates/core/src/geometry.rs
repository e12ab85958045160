//! Spacetime loops, spanning surfaces, and the quadratures that integrate
//! 1-forms along loops and 2-forms over surfaces.
//!
//! Every integral uses the composite midpoint rule. Along a path each segment
//! contributes `A(x(τ_mid)) · (x(τ_k+1) - x(τ_k))`. On a surface each grid cell
//! contributes the 2-form at the cell center contracted with tangent vectors
//! taken as differences of the map across the cell; a disk whose angular cell
//! count equals the loop's step count therefore sees exactly the same
//! polygonal geometry as the line integral around its rim.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gaugefield::{ColorTwoForm, GaugeField, SpacetimePoint};
use crate::numeric::{ordered_map, pairwise_sum_rows};

/// Distance below which boundary samples are identified.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Segments per boundary edge or path piece used when matching boundaries.
pub const BOUNDARY_SAMPLES: usize = 64;
const ANTISYMMETRY_TOL: f64 = 1e-10;
const SPATIAL_TOL: f64 = 1e-12;

type CurveFn = Arc<dyn Fn(f64) -> SpacetimePoint + Send + Sync>;
type SheetFn = Arc<dyn Fn(f64, f64) -> SpacetimePoint + Send + Sync>;

/// Quadrature resolution: loop segments and surface grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub steps: usize,
    pub grid_u: usize,
    pub grid_v: usize,
}

impl Resolution {
    pub const fn uniform(n: usize) -> Self {
        Resolution {
            steps: n,
            grid_u: n,
            grid_v: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("steps", self.steps), ("grid_u", self.grid_u), ("grid_v", self.grid_v)] {
            if v == 0 {
                return Err(LabError::Range {
                    key: name.into(),
                    message: "must be at least 1".into(),
                });
            }
        }
        Ok(())
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution::uniform(256)
    }
}

/// One smooth piece of a path, parameterized on `[0, 1]`.
#[derive(Clone)]
struct PathPiece {
    map: CurveFn,
    steps: usize,
}

/// A discretized segment: midpoint of the parameter interval and coordinate increment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub mid: SpacetimePoint,
    pub delta: [f64; 4],
}

/// Piecewise-smooth path through spacetime.
#[derive(Clone)]
pub struct SpacetimePath {
    pieces: Vec<PathPiece>,
    label: String,
}

impl std::fmt::Debug for SpacetimePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpacetimePath")
            .field("label", &self.label)
            .field("pieces", &self.pieces.len())
            .field("steps", &self.steps())
            .finish()
    }
}

impl SpacetimePath {
    pub fn from_fn<F>(label: impl Into<String>, steps: usize, map: F) -> Self
    where
        F: Fn(f64) -> SpacetimePoint + Send + Sync + 'static,
    {
        SpacetimePath {
            pieces: vec![PathPiece {
                map: Arc::new(map),
                steps: steps.max(1),
            }],
            label: label.into(),
        }
    }

    /// Straight segment from `a` to `b`.
    pub fn straight(a: SpacetimePoint, b: SpacetimePoint, steps: usize) -> Self {
        SpacetimePath::from_fn("straight", steps, move |s| {
            let (pa, pb) = (a.to_array(), b.to_array());
            SpacetimePoint::from_array(std::array::from_fn(|i| pa[i] + s * (pb[i] - pa[i])))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn steps(&self) -> usize {
        self.pieces.iter().map(|p| p.steps).sum()
    }

    pub fn start(&self) -> SpacetimePoint {
        (self.pieces[0].map)(0.0)
    }

    pub fn end(&self) -> SpacetimePoint {
        (self.pieces[self.pieces.len() - 1].map)(1.0)
    }

    pub fn closure_gap(&self) -> f64 {
        self.start().distance(&self.end())
    }

    pub fn is_closed(&self) -> bool {
        self.closure_gap() < 1e-12
    }

    pub fn ensure_closed(&self) -> Result<()> {
        let gap = self.closure_gap();
        if gap < 1e-12 {
            Ok(())
        } else {
            Err(LabError::OpenPath(gap))
        }
    }

    /// Vertices at the parameter grid, one list per piece.
    fn piece_vertices(piece: &PathPiece, steps: usize) -> Vec<SpacetimePoint> {
        (0..=steps)
            .map(|k| (piece.map)(k as f64 / steps as f64))
            .collect()
    }

    /// Segments in path order.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.steps());
        for piece in &self.pieces {
            let n = piece.steps;
            let verts = Self::piece_vertices(piece, n);
            for k in 0..n {
                let mid = (piece.map)((k as f64 + 0.5) / n as f64);
                let (a, b) = (verts[k].to_array(), verts[k + 1].to_array());
                out.push(Segment {
                    mid,
                    delta: std::array::from_fn(|i| b[i] - a[i]),
                });
            }
        }
        out
    }

    /// Polygonal length in the Euclidean metric on (t, x, y, z).
    pub fn length(&self) -> f64 {
        self.segments()
            .iter()
            .map(|s| s.delta.iter().map(|d| d * d).sum::<f64>().sqrt())
            .sum()
    }

    /// The same curve traversed backward.
    pub fn reversed(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| {
                let map = p.map.clone();
                PathPiece {
                    map: Arc::new(move |s| map(1.0 - s)),
                    steps: p.steps,
                }
            })
            .collect();
        SpacetimePath {
            pieces,
            label: format!("reverse({})", self.label),
        }
    }

    /// `other ∘ self`: traverse `self`, then `other`.
    pub fn then(&self, other: &SpacetimePath) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        SpacetimePath {
            pieces,
            label: format!("{}+{}", self.label, other.label),
        }
    }

    /// Oriented segments sampled with `samples` per piece, for boundary matching.
    fn chain(&self, samples: usize) -> Vec<([f64; 4], [f64; 4])> {
        let mut out = Vec::new();
        for piece in &self.pieces {
            let v = Self::piece_vertices(piece, samples);
            out.extend(v.windows(2).map(|w| (w[0].to_array(), w[1].to_array())));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Xy,
    Yz,
    Zx,
}

impl Plane {
    fn axes(self) -> ([f64; 3], [f64; 3]) {
        match self {
            Plane::Xy => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
            Plane::Yz => ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
            Plane::Zx => ([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
        }
    }
}

/// Circle of radius `radius` around `center`, counterclockwise about the plane normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: [f64; 3],
    pub radius: f64,
    pub plane: Plane,
}

impl Circle {
    pub fn new(center: [f64; 3], radius: f64, plane: Plane) -> Self {
        Circle { center, radius, plane }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(LabError::invalid("radius", format!("loop radius must be positive, got {}", self.radius)));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(LabError::invalid("center", "must be finite"));
        }
        Ok(())
    }

    /// Point at parameter `s ∈ [0, 1]` on the circle scaled radially by `scale`.
    pub fn point(&self, s: f64, scale: f64, t: f64) -> SpacetimePoint {
        let (e1, e2) = self.plane.axes();
        let theta = 2.0 * PI * s;
        let r = self.radius * scale;
        let (c, sn) = (theta.cos(), theta.sin());
        SpacetimePoint::new(
            t,
            self.center[0] + r * (c * e1[0] + sn * e2[0]),
            self.center[1] + r * (c * e1[1] + sn * e2[1]),
            self.center[2] + r * (c * e1[2] + sn * e2[2]),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoopKind {
    /// Spatial circle at fixed time.
    Circle { circle: Circle, time: f64 },
    /// Leg up in time at the circle's start point, circle at `t1` forward,
    /// leg down, circle at `t0` backward.
    TwoTime { circle: Circle, t0: f64, t1: f64 },
}

pub fn build_loop(kind: LoopKind, steps: usize) -> Result<SpacetimePath> {
    if steps == 0 {
        return Err(LabError::invalid("steps", "must be at least 1"));
    }
    match kind {
        LoopKind::Circle { circle, time } => {
            circle.validate()?;
            if !time.is_finite() {
                return Err(LabError::invalid("time", "must be finite"));
            }
            Ok(SpacetimePath::from_fn(format!("circle(t={time})"), steps, move |s| {
                circle.point(s, 1.0, time)
            }))
        }
        LoopKind::TwoTime { circle, t0, t1 } => {
            circle.validate()?;
            if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
                return Err(LabError::invalid("t1", format!("need t0 < t1, got {t0} and {t1}")));
            }
            let anchor = circle.point(0.0, 1.0, t0);
            let top = SpacetimePoint { t: t1, ..anchor };
            let up = SpacetimePath::straight(anchor, top, steps);
            let late = build_loop(LoopKind::Circle { circle, time: t1 }, steps)?;
            let down = up.reversed();
            let early = build_loop(LoopKind::Circle { circle, time: t0 }, steps)?.reversed();
            let mut path = up.then(&late).then(&down).then(&early);
            path.label = format!("two_time_loop(t0={t0}, t1={t1})");
            Ok(path)
        }
    }
}

/// Grid cell of a surface: center point, tangent vectors and parameter area.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub mid: SpacetimePoint,
    pub tangent_u: [f64; 4],
    pub tangent_v: [f64; 4],
    pub weight: f64,
}

impl Cell {
    /// `(t_u^μ t_v^ν - t_v^μ t_u^ν) Δu Δv`.
    #[inline]
    pub fn bivector(&self, mu: usize, nu: usize) -> f64 {
        (self.tangent_u[mu] * self.tangent_v[nu] - self.tangent_v[mu] * self.tangent_u[nu]) * self.weight
    }

    /// `Σ_{μ<ν} w[μ][ν] · bivector(μ, ν)`.
    #[inline]
    pub fn contract(&self, w: &[[f64; 4]; 4]) -> f64 {
        let mut s = 0.0;
        for mu in 0..4 {
            for nu in (mu + 1)..4 {
                s += w[mu][nu] * self.bivector(mu, nu);
            }
        }
        s
    }
}

/// Parameterized surface `(u, v) ∈ [0,1]² → spacetime`. Its induced boundary
/// runs along `v = 0` forward, `u = 1` forward, `v = 1` backward, `u = 0` backward.
#[derive(Clone)]
pub struct SurfacePatch {
    map: SheetFn,
    n_u: usize,
    n_v: usize,
    label: String,
}

impl std::fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("label", &self.label)
            .field("grid", &(self.n_u, self.n_v))
            .finish()
    }
}

impl SurfacePatch {
    pub fn from_fn<F>(label: impl Into<String>, n_u: usize, n_v: usize, map: F) -> Self
    where
        F: Fn(f64, f64) -> SpacetimePoint + Send + Sync + 'static,
    {
        SurfacePatch {
            map: Arc::new(map),
            n_u: n_u.max(1),
            n_v: n_v.max(1),
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.n_u, self.n_v)
    }

    pub fn point(&self, u: f64, v: f64) -> SpacetimePoint {
        (self.map)(u, v)
    }

    /// Same surface with opposite orientation (`u → 1 - u`).
    pub fn reversed(&self) -> Self {
        let map = self.map.clone();
        SurfacePatch {
            map: Arc::new(move |u, v| map(1.0 - u, v)),
            n_u: self.n_u,
            n_v: self.n_v,
            label: format!("reverse({})", self.label),
        }
    }

    /// Sub-patch covering `u ∈ [u0, u1]` with `n_u` cells, same orientation.
    pub fn restrict_u(&self, u0: f64, u1: f64, n_u: usize) -> Self {
        let map = self.map.clone();
        SurfacePatch {
            map: Arc::new(move |u, v| map(u0 + u * (u1 - u0), v)),
            n_u: n_u.max(1),
            n_v: self.n_v,
            label: format!("{}[u={u0}..{u1}]", self.label),
        }
    }

    /// All grid cells in row-major `(v, u)` order.
    pub fn cells(&self) -> Vec<Cell> {
        let (nu, nv) = (self.n_u, self.n_v);
        let (du, dv) = (1.0 / nu as f64, 1.0 / nv as f64);
        ordered_map(nu * nv, |idx| {
            let (j, i) = (idx / nu, idx % nu);
            let (u0, u1) = (i as f64 * du, (i + 1) as f64 * du);
            let (v0, v1) = (j as f64 * dv, (j + 1) as f64 * dv);
            let (um, vm) = ((i as f64 + 0.5) * du, (j as f64 + 0.5) * dv);
            let diff = |a: SpacetimePoint, b: SpacetimePoint, h: f64| -> [f64; 4] {
                let (a, b) = (a.to_array(), b.to_array());
                std::array::from_fn(|k| (b[k] - a[k]) / h)
            };
            Cell {
                mid: (self.map)(um, vm),
                tangent_u: diff((self.map)(u0, vm), (self.map)(u1, vm), u1 - u0),
                tangent_v: diff((self.map)(um, v0), (self.map)(um, v1), v1 - v0),
                weight: (u1 - u0) * (v1 - v0),
            }
        })
    }

    /// Oriented boundary segments, `samples` per edge.
    fn boundary_chain(&self, samples: usize) -> Vec<([f64; 4], [f64; 4])> {
        let n = samples as f64;
        let edge = |f: &dyn Fn(f64) -> SpacetimePoint| -> Vec<([f64; 4], [f64; 4])> {
            (0..samples)
                .map(|k| (f(k as f64 / n).to_array(), f((k + 1) as f64 / n).to_array()))
                .collect()
        };
        let mut out = Vec::with_capacity(4 * samples);
        out.extend(edge(&|s| (self.map)(s, 0.0)));
        out.extend(edge(&|s| (self.map)(1.0, s)));
        out.extend(edge(&|s| (self.map)(1.0 - s, 1.0)));
        out.extend(edge(&|s| (self.map)(0.0, 1.0 - s)));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    /// Flat disk spanning the circle at fixed time; boundary = circle.
    Disk { circle: Circle, time: f64 },
    /// `circle × [t0, t1]`; boundary = circle(t0) - circle(t1).
    Cylinder { circle: Circle, t0: f64, t1: f64 },
}

pub fn build_surface(kind: SurfaceKind, n_u: usize, n_v: usize) -> Result<SurfacePatch> {
    if n_u == 0 || n_v == 0 {
        return Err(LabError::invalid("grid", "must be at least 1x1"));
    }
    match kind {
        SurfaceKind::Disk { circle, time } => {
            circle.validate()?;
            Ok(SurfacePatch::from_fn(format!("disk(t={time})"), n_u, n_v, move |u, v| {
                circle.point(u, 1.0 - v, time)
            }))
        }
        SurfaceKind::Cylinder { circle, t0, t1 } => {
            circle.validate()?;
            if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
                return Err(LabError::invalid("t1", format!("need t0 < t1, got {t0} and {t1}")));
            }
            Ok(SurfacePatch::from_fn(format!("cylinder(t0={t0}, t1={t1})"), n_u, n_v, move |u, v| {
                circle.point(u, 1.0, t0 + v * (t1 - t0))
            }))
        }
    }
}

/// Cancel degenerate and mutually opposite segments; return what is left.
fn reduce_chain(mut segs: Vec<([f64; 4], [f64; 4])>) -> Vec<([f64; 4], [f64; 4])> {
    let dist = |a: &[f64; 4], b: &[f64; 4]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    segs.retain(|(a, b)| dist(a, b) > BOUNDARY_TOL);
    let mut alive = vec![true; segs.len()];
    for i in 0..segs.len() {
        if !alive[i] {
            continue;
        }
        for j in (i + 1)..segs.len() {
            if alive[j]
                && dist(&segs[i].0, &segs[j].1) < BOUNDARY_TOL
                && dist(&segs[i].1, &segs[j].0) < BOUNDARY_TOL
            {
                alive[i] = false;
                alive[j] = false;
                break;
            }
        }
    }
    segs.into_iter()
        .zip(alive)
        .filter_map(|(s, keep)| keep.then_some(s))
        .collect()
}

/// Discrete mismatch between `∂(Σ surfaces)` and `path`: after cancelling the
/// boundary chain against the reversed path, the longest uncancelled segment.
pub fn boundary_residual(path: &SpacetimePath, surfaces: &[SurfacePatch]) -> f64 {
    let mut chain: Vec<_> = surfaces
        .iter()
        .flat_map(|s| s.boundary_chain(BOUNDARY_SAMPLES))
        .collect();
    chain.extend(path.reversed().chain(BOUNDARY_SAMPLES));
    reduce_chain(chain)
        .iter()
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// A closed path with surfaces whose oriented boundary sum is the path.
#[derive(Debug, Clone)]
pub struct LoopSurfacePair {
    pub path: SpacetimePath,
    pub surfaces: Vec<SurfacePatch>,
}

impl LoopSurfacePair {
    pub fn new(path: SpacetimePath, surfaces: Vec<SurfacePatch>) -> Result<Self> {
        path.ensure_closed()?;
        let residual = boundary_residual(&path, &surfaces);
        if residual > BOUNDARY_TOL {
            return Err(LabError::OrientationMismatch(residual));
        }
        Ok(LoopSurfacePair { path, surfaces })
    }
}

/// Disk at `t1` plus the cylinder `[t0, t1]` over one spatial circle. The
/// oriented boundary of the pair is the circle at `t0`.
#[derive(Debug, Clone)]
pub struct TwoTimeAssembly {
    pub circle: Circle,
    pub t0: f64,
    pub t1: f64,
    pub resolution: Resolution,
    pub pair: LoopSurfacePair,
}

impl TwoTimeAssembly {
    pub fn new(circle: Circle, t0: f64, t1: f64, resolution: Resolution) -> Result<Self> {
        resolution.validate()?;
        let path = build_loop(LoopKind::Circle { circle, time: t0 }, resolution.steps)?;
        let disk = build_surface(SurfaceKind::Disk { circle, time: t1 }, resolution.grid_u, resolution.grid_v)?;
        let cylinder = build_surface(
            SurfaceKind::Cylinder { circle, t0, t1 },
            resolution.grid_u,
            resolution.grid_v,
        )?;
        let pair = LoopSurfacePair::new(path, vec![disk, cylinder])?;
        Ok(TwoTimeAssembly {
            circle,
            t0,
            t1,
            resolution,
            pair,
        })
    }

    pub fn disk(&self) -> &SurfacePatch {
        &self.pair.surfaces[0]
    }

    pub fn cylinder(&self) -> &SurfacePatch {
        &self.pair.surfaces[1]
    }

    /// The spatial circle at time `t`, discretized with `resolution.steps`.
    pub fn loop_at(&self, t: f64) -> Result<SpacetimePath> {
        build_loop(LoopKind::Circle { circle: self.circle, time: t }, self.resolution.steps)
    }

    pub fn two_time_loop(&self) -> Result<SpacetimePath> {
        build_loop(
            LoopKind::TwoTime {
                circle: self.circle,
                t0: self.t0,
                t1: self.t1,
            },
            self.resolution.steps,
        )
    }
}

/// `I[a] = Σ_segments A[a][μ](mid) Δx^μ`.
pub fn line_integral(fld: &GaugeField, path: &SpacetimePath) -> Result<Vec<f64>> {
    let segs = path.segments();
    let n = fld.colors();
    let rows = ordered_map(segs.len(), |k| -> Result<Vec<f64>> {
        let s = &segs[k];
        let a = fld.potential(&s.mid)?;
        Ok(a.iter()
            .map(|row| row.iter().zip(&s.delta).map(|(x, d)| x * d).sum())
            .collect())
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum_rows(&rows, n))
}

/// `∫ Σ_{μ<ν} w[a][μ][ν] dx^μ∧dx^ν` over the patch, per color.
pub fn surface_integral_2form<F>(form: F, colors: usize, patch: &SurfacePatch) -> Result<Vec<f64>>
where
    F: Fn(&SpacetimePoint) -> Result<ColorTwoForm> + Sync,
{
    let cells = patch.cells();
    let rows = ordered_map(cells.len(), |k| -> Result<Vec<f64>> {
        let cell = &cells[k];
        let w = form(&cell.mid)?;
        if w.len() != colors {
            return Err(LabError::DimensionMismatch(format!(
                "2-form has {} colors, expected {colors}",
                w.len()
            )));
        }
        for (color, wa) in w.iter().enumerate() {
            for mu in 0..4 {
                for nu in mu..4 {
                    let defect = (wa[mu][nu] + wa[nu][mu]).abs();
                    if defect > ANTISYMMETRY_TOL || !defect.is_finite() {
                        return Err(LabError::Asymmetry { color, mu, nu, defect });
                    }
                }
            }
        }
        Ok(w.iter().map(|wa| cell.contract(wa)).collect())
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum_rows(&rows, colors))
}

/// Oriented spatial area element at a cell center.
#[derive(Debug, Clone, Copy)]
pub struct AreaElement {
    pub point: SpacetimePoint,
    /// `dS_i = ½ ε_ijk dx^j∧dx^k`, i.e. `(t_u × t_v) Δu Δv`.
    pub ds: [f64; 3],
}

/// Area vectors of a fixed-time patch.
pub fn wedge_area_elements(patch: &SurfacePatch) -> Result<Vec<AreaElement>> {
    let cells = patch.cells();
    let t_ref = cells.first().map(|c| c.mid.t).unwrap_or(0.0);
    let mut spread = 0.0f64;
    for c in &cells {
        spread = spread
            .max((c.mid.t - t_ref).abs())
            .max((c.tangent_u[0] * c.weight).abs())
            .max((c.tangent_v[0] * c.weight).abs());
    }
    if spread > SPATIAL_TOL {
        return Err(LabError::NonSpatialPatch(spread));
    }
    Ok(cells
        .iter()
        .map(|c| AreaElement {
            point: c.mid,
            ds: [c.bivector(2, 3), c.bivector(3, 1), c.bivector(1, 2)],
        })
        .collect())
}

/// `|∮ A - Σ ∫ dA|` per color, with `dA` the plain exterior derivative.
pub fn stokes_residual(fld: &GaugeField, pair: &LoopSurfacePair) -> Result<Vec<f64>> {
    let line = line_integral(fld, &pair.path)?;
    let mut surf = vec![0.0; fld.colors()];
    for s in &pair.surfaces {
        let part = surface_integral_2form(|p| fld.exterior_derivative(p), fld.colors(), s)?;
        for (acc, v) in surf.iter_mut().zip(part) {
            *acc += v;
        }
    }
    Ok(line.iter().zip(&surf).map(|(l, s)| (l - s).abs()).collect())
}
