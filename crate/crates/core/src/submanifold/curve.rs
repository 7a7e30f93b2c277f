//! Curves sampled at uniform arc length.

use nalgebra::Vector4;

use crate::ambient::{LocalGeometry, SpaceForm};
use crate::error::{GeometryError, Result};

/// A unit-speed curve sampled at spacing `ds`.
#[derive(Clone, Debug)]
pub struct Curve {
    pub space: SpaceForm,
    pub points: Vec<[f64; 4]>,
    pub ds: f64,
}

/// Velocity, acceleration `∇_T T` and frozen geometry at an interior sample.
#[derive(Clone, Debug)]
pub struct CurveSample {
    pub local: LocalGeometry,
    pub t: Vector4<f64>,
    pub a: Vector4<f64>,
}

impl Curve {
    pub fn new(space: SpaceForm, points: Vec<[f64; 4]>, ds: f64) -> Result<Self> {
        if points.len() < 9 {
            return Err(GeometryError::Invalid("curve needs at least 9 samples".into()));
        }
        if !(ds > 0.0) {
            return Err(GeometryError::Invalid(format!("sample spacing {ds}")));
        }
        Ok(Curve { space, points, ds })
    }

    /// Indices where the five-point stencils are available.
    pub fn interior(&self) -> std::ops::Range<usize> {
        2..self.points.len() - 2
    }

    /// Five-point derivatives at sample `k`.
    pub fn sample(&self, k: usize) -> Result<CurveSample> {
        let x = |i: usize| Vector4::from(self.points[i]);
        let h = self.ds;
        let t = (x(k - 2) - x(k - 1) * 8.0 + x(k + 1) * 8.0 - x(k + 2)) / (12.0 * h);
        let dd = (-x(k - 2) + x(k - 1) * 16.0 - x(k) * 30.0 + x(k + 1) * 16.0 - x(k + 2)) / (12.0 * h * h);
        let local = LocalGeometry::at(&self.space, &self.points[k])?;
        let a = dd + local.gamma(&t, &t);
        Ok(CurveSample { local, t, a })
    }

    /// `|∇_T T|` at an interior sample.
    pub fn geodesic_curvature(&self, k: usize) -> Result<f64> {
        let s = self.sample(k)?;
        Ok(s.local.norm(&s.a))
    }
}

/// Terng-type check for a curve.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CurveReport {
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// Largest variation of `<∇_T T, ξ>` along parallel normal fields.
    pub principal_spread: f64,
    /// Curvature invariance residual of the (rank three) normal space.
    pub section_residual_max: f64,
    pub spread_tol: f64,
    pub pass: bool,
}

impl CurveReport {
    pub fn kappa_spread(&self) -> f64 {
        self.kappa_max - self.kappa_min
    }

    pub fn kappa_mean(&self) -> f64 {
        0.5 * (self.kappa_max + self.kappa_min)
    }
}

fn normal_basis(s: &CurveSample) -> Vec<Vector4<f64>> {
    let unit = |k: usize| Vector4::from_fn(|i, _| if i == k { 1.0 } else { 0.0 });
    let mut v = vec![s.t];
    v.extend((0..4).map(unit));
    let frame = s.local.orthonormalize(&v);
    frame[1..4].to_vec()
}

/// For every parallel normal field `ξ` along a curve (parallel for the
/// normal connection: `∇_T ξ = −<ξ, ∇_T T> T`), the single principal
/// curvature is `<∇_T T, ξ>`. The normal bundle is flat automatically.
pub fn curve_terng_check(curve: &Curve, spread_tol: f64) -> Result<CurveReport> {
    let idx: Vec<usize> = curve.interior().collect();
    let samples: Vec<CurveSample> = idx.iter().map(|&k| curve.sample(k)).collect::<Result<_>>()?;
    let kappas: Vec<f64> = samples.iter().map(|s| s.local.norm(&s.a)).collect();
    let kappa_min = kappas.iter().cloned().fold(f64::INFINITY, f64::min);
    let kappa_max = kappas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let basis = normal_basis(&samples[0]);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let r3 = 1.0 / 3f64.sqrt();
    let combos: [[f64; 3]; 8] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [r2, r2, 0.0],
        [0.0, r2, r2],
        [r2, 0.0, r2],
        [r2, -r2, 0.0],
        [r3, r3, r3],
    ];
    let mut principal_spread: f64 = 0.0;
    for w in combos {
        let mut xi = basis[0] * w[0] + basis[1] * w[1] + basis[2] * w[2];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let rhs = |s: &CurveSample, xi: &Vector4<f64>| -> Vector4<f64> {
            -s.local.gamma(&s.t, xi) - s.t * s.local.inner(xi, &s.a)
        };
        // RK4 over pairs of steps; the midpoint stage uses the middle sample.
        let mut k = 0;
        loop {
            let s = &samples[k];
            let val = s.local.inner(&s.a, &xi);
            lo = lo.min(val);
            hi = hi.max(val);
            if k + 2 >= samples.len() {
                break;
            }
            let h = 2.0 * curve.ds;
            let (s0, s1, s2) = (&samples[k], &samples[k + 1], &samples[k + 2]);
            let k1 = rhs(s0, &xi);
            let k2 = rhs(s1, &(xi + k1 * (h / 2.0)));
            let k3 = rhs(s1, &(xi + k2 * (h / 2.0)));
            let k4 = rhs(s2, &(xi + k3 * h));
            xi += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            k += 2;
        }
        principal_spread = principal_spread.max(hi - lo);
    }

    let mut section_residual_max: f64 = 0.0;
    for s in samples.iter().step_by(50) {
        let n = normal_basis(s);
        let tn = s.t / s.local.norm(&s.t);
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    let r = s.local.curvature(&n[i], &n[j], &n[l]);
                    section_residual_max = section_residual_max.max(s.local.inner(&r, &tn).abs());
                }
            }
        }
    }
    let tol = spread_tol * curve.space.scale();
    Ok(CurveReport {
        kappa_min,
        kappa_max,
        principal_spread,
        section_residual_max,
        spread_tol: tol,
        pass: principal_spread < tol && kappa_max - kappa_min < tol,
    })
}
