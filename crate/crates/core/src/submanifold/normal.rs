//! Normal connection: parallel normal frames, holonomy and the Terng check.
//!
//! In the reference normal frame `(ν1, ν2)` of the patch, a unit normal
//! field `cos φ ν1 + sin φ ν2` is parallel along a curve exactly when
//! `φ' = −ω(γ')`, `ω(X) = <∇_X ν1, ν2>`. Parallel transport thus reduces to
//! quadrature of the connection form.

use std::f64::consts::PI;

use nalgebra::Vector4;

use super::{PatchPoint, SurfacePatch};
use crate::error::{GeometryError, Result};
use crate::numerics::sym_eigen2;

/// Sampling and tolerance settings for the patch-level checks.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SamplingConfig {
    /// Grid points per side.
    pub grid: usize,
    /// Number of initial normal directions.
    pub directions: usize,
    /// Displacement radii in units of `1/sqrt|c|`.
    pub radii: Vec<f64>,
    /// Eigenvalue spread tolerance in units of `sqrt|c|`.
    pub spread_tol: f64,
    /// Normal curvature tolerance in units of `|c|`.
    pub normal_tol: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            grid: 21,
            directions: 8,
            radii: vec![0.01, 0.02, 0.05],
            spread_tol: 1e-4,
            normal_tol: 1e-5,
        }
    }
}

/// Connection form `ω(X) = <∇_X ν1, ν2>` for `X = dir · ∂u`.
pub fn connection_form(patch: &SurfacePatch, p: &PatchPoint, dir: [f64; 2]) -> Result<f64> {
    let len = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    if len == 0.0 {
        return Ok(0.0);
    }
    let h = 1e-4 / patch.space.scale() / len;
    let at = |k: f64| patch.at([p.u[0] + k * h * dir[0], p.u[1] + k * h * dir[1]]);
    let plus = at(1.0)?;
    let minus = at(-1.0)?;
    let dnu = (plus.normal[0] - minus.normal[0]) / (2.0 * h);
    let x = p.du[0] * dir[0] + p.du[1] * dir[1];
    let cov = dnu + p.local.gamma(&x, &p.normal[0]);
    Ok(p.local.inner(&cov, &p.normal[1]))
}

/// Change of the parallel angle along the straight segment `a → b`
/// (Simpson's rule).
fn angle_increment(patch: &SurfacePatch, a: &PatchPoint, b: &PatchPoint) -> Result<f64> {
    let dir = [b.u[0] - a.u[0], b.u[1] - a.u[1]];
    if dir == [0.0, 0.0] {
        return Ok(0.0);
    }
    let mid = patch.at([0.5 * (a.u[0] + b.u[0]), 0.5 * (a.u[1] + b.u[1])])?;
    let w = connection_form(patch, a, dir)? + 4.0 * connection_form(patch, &mid, dir)?
        + connection_form(patch, b, dir)?;
    Ok(-w / 6.0)
}

/// One sample of a normal frame along a curve.
#[derive(Clone, Debug)]
pub struct NormalFrameSample {
    pub u: [f64; 2],
    pub point: [f64; 4],
    pub xi: Vector4<f64>,
    pub eta: Vector4<f64>,
}

/// Unit normal fields `ξ, η` sampled along a curve in the domain.
#[derive(Clone, Debug)]
pub struct AdaptedNormalFrame {
    pub samples: Vec<NormalFrameSample>,
    pub parallel: bool,
}

pub(crate) fn frame_at(p: &PatchPoint, angle: f64) -> (Vector4<f64>, Vector4<f64>) {
    let (c, s) = (angle.cos(), angle.sin());
    (
        p.normal[0] * c + p.normal[1] * s,
        p.normal[1] * c - p.normal[0] * s,
    )
}

/// Angle of a unit normal in the reference frame.
pub fn normal_angle(p: &PatchPoint, xi: &Vector4<f64>) -> Result<f64> {
    p.check_unit_normal(xi, 1e-6)?;
    let [a, b] = p.normal_coords(xi);
    Ok(b.atan2(a))
}

/// Parallel transport of the unit normal `xi0` along the polygon through
/// `curve` (parameters in the domain).
pub fn parallel_normal_frame(
    patch: &SurfacePatch,
    curve: &[[f64; 2]],
    xi0: &Vector4<f64>,
) -> Result<AdaptedNormalFrame> {
    let first = *curve
        .first()
        .ok_or_else(|| GeometryError::Invalid("empty curve".into()))?;
    let mut prev = patch.at(first)?;
    let mut angle = normal_angle(&prev, xi0)?;
    let mut samples = Vec::with_capacity(curve.len());
    let (xi, eta) = frame_at(&prev, angle);
    samples.push(NormalFrameSample {
        u: first,
        point: prev.x,
        xi,
        eta,
    });
    for u in &curve[1..] {
        let next = patch.at(*u)?;
        angle += angle_increment(patch, &prev, &next)?;
        let (xi, eta) = frame_at(&next, angle);
        samples.push(NormalFrameSample {
            u: *u,
            point: next.x,
            xi,
            eta,
        });
        prev = next;
    }
    Ok(AdaptedNormalFrame {
        samples,
        parallel: true,
    })
}

/// Rotation angle of `∇^⊥` holonomy around a closed polygon, in `(−π, π]`.
pub fn loop_holonomy(patch: &SurfacePatch, polygon: &[[f64; 2]]) -> Result<f64> {
    let mut pts: Vec<[f64; 2]> = polygon.to_vec();
    if pts.first() != pts.last() {
        pts.push(pts[0]);
    }
    let mut total = 0.0;
    let mut prev = patch.at(pts[0])?;
    for u in &pts[1..] {
        let next = patch.at(*u)?;
        total += angle_increment(patch, &prev, &next)?;
        prev = next;
    }
    Ok(wrap(total))
}

fn wrap(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

/// Patch geometry on an `n × n` grid together with the parallel angle
/// obtained by transport from the grid center, first along the center row
/// in `s`, then along each `t`-line.
#[derive(Clone, Debug)]
pub struct GridFrames {
    pub n: usize,
    pub points: Vec<PatchPoint>,
    /// Parallel angle at each grid point (same indexing as `points`).
    pub phi: Vec<f64>,
}

impl GridFrames {
    pub fn build(patch: &SurfacePatch, n: usize) -> Result<Self> {
        let n = n.max(3);
        let params = patch.grid(n);
        let points: Vec<PatchPoint> = params.iter().map(|u| patch.at(*u)).collect::<Result<_>>()?;
        let idx = |i: usize, j: usize| i * n + j;
        let c = n / 2;
        let mut phi = vec![0.0; n * n];
        // Center row (varying s at t = t_c).
        for i in (c + 1)..n {
            phi[idx(i, c)] = phi[idx(i - 1, c)] + angle_increment(patch, &points[idx(i - 1, c)], &points[idx(i, c)])?;
        }
        for i in (0..c).rev() {
            phi[idx(i, c)] = phi[idx(i + 1, c)] + angle_increment(patch, &points[idx(i + 1, c)], &points[idx(i, c)])?;
        }
        for i in 0..n {
            for j in (c + 1)..n {
                phi[idx(i, j)] = phi[idx(i, j - 1)] + angle_increment(patch, &points[idx(i, j - 1)], &points[idx(i, j)])?;
            }
            for j in (0..c).rev() {
                phi[idx(i, j)] = phi[idx(i, j + 1)] + angle_increment(patch, &points[idx(i, j + 1)], &points[idx(i, j)])?;
            }
        }
        Ok(GridFrames { n, points, phi })
    }

    pub fn center_index(&self) -> usize {
        (self.n / 2) * self.n + self.n / 2
    }

    /// Parallel field through direction `theta` at the center.
    pub fn field(&self, k: usize, theta: f64) -> (Vector4<f64>, Vector4<f64>) {
        frame_at(&self.points[k], self.phi[k] + theta)
    }
}

/// Patch-level summary of principal curvatures along parallel normal
/// fields.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ShapeReport {
    pub samples: usize,
    pub directions: usize,
    /// Largest variation of either principal curvature over the grid, over
    /// all parallel directions.
    pub eigenvalue_spread: f64,
    pub spread_per_direction: Vec<f64>,
    /// Principal curvatures `(λ1 ≥ λ2)` at the grid center, per direction.
    pub center_spectra: Vec<[f64; 2]>,
    pub normal_curvature_max: f64,
    pub kaehler_angle_min: f64,
    pub kaehler_angle_max: f64,
    /// Samples where `λ1 − λ2` is below the spread tolerance.
    pub umbilic_samples: usize,
    pub spread_tol: f64,
    pub normal_tol: f64,
    pub pass: bool,
}

/// Terng check for surfaces: flat normal bundle and constant principal
/// curvatures along parallel normal fields.
pub fn terng_check(patch: &SurfacePatch, cfg: &SamplingConfig) -> Result<ShapeReport> {
    let frames = GridFrames::build(patch, cfg.grid)?;
    Ok(terng_from_frames(patch, &frames, cfg))
}

pub(crate) fn terng_from_frames(patch: &SurfacePatch, frames: &GridFrames, cfg: &SamplingConfig) -> ShapeReport {
    let scale = patch.space.scale();
    let spread_tol = cfg.spread_tol * scale;
    let normal_tol = cfg.normal_tol * patch.space.c().abs();
    let nd = cfg.directions.max(1);
    let mut spread_per_direction = Vec::with_capacity(nd);
    let mut center_spectra = Vec::with_capacity(nd);
    let mut umbilic = 0usize;
    for d in 0..nd {
        let theta = 2.0 * PI * d as f64 / nd as f64;
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (k, p) in frames.points.iter().enumerate() {
            let (xi, _) = frames.field(k, theta);
            let (l, _) = sym_eigen2(&p.shape_matrix(&xi));
            if d == 0 && l[0] - l[1] < spread_tol {
                umbilic += 1;
            }
            for i in 0..2 {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(l[i]);
            }
        }
        spread_per_direction.push((hi[0] - lo[0]).max(hi[1] - lo[1]));
        let (xi, _) = frames.field(frames.center_index(), theta);
        center_spectra.push(sym_eigen2(&frames.points[frames.center_index()].shape_matrix(&xi)).0);
    }
    let eigenvalue_spread = spread_per_direction.iter().cloned().fold(0.0, f64::max);
    let normal_curvature_max = frames
        .points
        .iter()
        .map(|p| p.oriented_normal_curvature().abs())
        .fold(0.0, f64::max);
    let angles: Vec<f64> = frames.points.iter().map(|p| p.kaehler_angle()).collect();
    ShapeReport {
        samples: frames.points.len(),
        directions: nd,
        eigenvalue_spread,
        spread_per_direction,
        center_spectra,
        normal_curvature_max,
        kaehler_angle_min: angles.iter().cloned().fold(f64::INFINITY, f64::min),
        kaehler_angle_max: angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        umbilic_samples: umbilic,
        spread_tol,
        normal_tol,
        pass: eigenvalue_spread < spread_tol && normal_curvature_max < normal_tol,
    }
}
