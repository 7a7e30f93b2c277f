//! Geodesics and parallel transport by fixed-step classical Runge–Kutta.

use nalgebra::Vector4;

use super::{AmbientPoint, AmbientTangent, LocalGeometry, SpaceForm};
use crate::error::{GeometryError, Result};

/// Largest admissible step: `1e-3 / sqrt|c|`.
pub fn max_step(space: &SpaceForm) -> f64 {
    1e-3 / space.scale()
}

/// Longest admissible geodesic parameter range.
pub fn horizon(space: &SpaceForm) -> f64 {
    20.0 / space.scale()
}

/// Position, velocity and any vectors transported along the geodesic.
#[derive(Clone, Debug)]
pub struct GeodesicState {
    pub point: [f64; 4],
    pub velocity: Vector4<f64>,
    pub transported: Vec<Vector4<f64>>,
}

fn rhs(space: &SpaceForm, st: &GeodesicState) -> Result<GeodesicState> {
    let local = LocalGeometry::at(space, &st.point)?;
    let v = st.velocity;
    Ok(GeodesicState {
        point: v.into(),
        velocity: -local.gamma(&v, &v),
        transported: st.transported.iter().map(|w| -local.gamma(&v, w)).collect(),
    })
}

fn axpy(base: &GeodesicState, k: &GeodesicState, h: f64) -> GeodesicState {
    GeodesicState {
        point: std::array::from_fn(|i| base.point[i] + h * k.point[i]),
        velocity: base.velocity + k.velocity * h,
        transported: base
            .transported
            .iter()
            .zip(k.transported.iter())
            .map(|(a, b)| a + b * h)
            .collect(),
    }
}

fn rk4_step(space: &SpaceForm, st: &GeodesicState, h: f64) -> Result<GeodesicState> {
    let k1 = rhs(space, st)?;
    let k2 = rhs(space, &axpy(st, &k1, h / 2.0))?;
    let k3 = rhs(space, &axpy(st, &k2, h / 2.0))?;
    let k4 = rhs(space, &axpy(st, &k3, h))?;
    let mut out = st.clone();
    for i in 0..4 {
        out.point[i] += h / 6.0 * (k1.point[i] + 2.0 * k2.point[i] + 2.0 * k3.point[i] + k4.point[i]);
    }
    out.velocity += (k1.velocity + k2.velocity * 2.0 + k3.velocity * 2.0 + k4.velocity) * (h / 6.0);
    for (n, w) in out.transported.iter_mut().enumerate() {
        *w += (k1.transported[n] + k2.transported[n] * 2.0 + k3.transported[n] * 2.0
            + k4.transported[n])
            * (h / 6.0);
    }
    Ok(out)
}

/// Integrates the geodesic with `γ(0) = p`, `γ'(0) = v` up to parameter `t`,
/// parallel transporting `vectors` along it.
pub fn geodesic_with_transport(
    space: &SpaceForm,
    p: &AmbientPoint,
    v: &Vector4<f64>,
    t: f64,
    vectors: &[Vector4<f64>],
) -> Result<GeodesicState> {
    space.check_point(&p.0)?;
    let hz = horizon(space);
    if t.abs() > hz {
        return Err(GeometryError::BeyondHorizon { t, horizon: hz });
    }
    let mut st = GeodesicState {
        point: p.0,
        velocity: *v,
        transported: vectors.to_vec(),
    };
    if t == 0.0 {
        return Ok(st);
    }
    let n = (t.abs() / max_step(space)).ceil().max(1.0) as usize;
    let h = t / n as f64;
    for k in 0..n {
        st = rk4_step(space, &st, h).map_err(|e| match e {
            GeometryError::OutsideChart(x) => GeometryError::LeftChart {
                position: x,
                t: k as f64 * h,
            },
            other => other,
        })?;
        if !space.contains(&st.point) {
            return Err(GeometryError::LeftChart {
                position: st.point,
                t: (k + 1) as f64 * h,
            });
        }
    }
    Ok(st)
}

pub fn geodesic(
    space: &SpaceForm,
    p: &AmbientPoint,
    v: &AmbientTangent,
    t: f64,
) -> Result<(AmbientPoint, AmbientTangent)> {
    if v.base.0 != p.0 {
        return Err(GeometryError::BaseMismatch);
    }
    let st = geodesic_with_transport(space, p, &v.vector(), t, &[])?;
    let q = AmbientPoint(st.point);
    Ok((q, AmbientTangent::new(q, st.velocity.into())))
}

/// A curve given by chart-coordinate samples; transport follows the
/// polygon through the samples.
#[derive(Clone, Debug)]
pub struct SampledCurve {
    pub points: Vec<[f64; 4]>,
}

impl SampledCurve {
    pub fn new(points: Vec<[f64; 4]>) -> Self {
        SampledCurve { points }
    }

    fn is_constant(&self) -> bool {
        self.points.windows(2).all(|w| w[0] == w[1])
    }
}

/// Parallel transport of `x` along the sampled curve, returned at the last
/// sample. Each polygon edge is subdivided so that no RK4 step exceeds
/// [`max_step`] in metric length.
pub fn parallel_transport(
    space: &SpaceForm,
    curve: &SampledCurve,
    x: &AmbientTangent,
) -> Result<AmbientTangent> {
    let first = curve
        .points
        .first()
        .ok_or_else(|| GeometryError::Invalid("empty curve".into()))?;
    if x.base.0 != *first {
        return Err(GeometryError::BaseMismatch);
    }
    let last = *curve.points.last().unwrap();
    if curve.is_constant() {
        return Ok(AmbientTangent::new(AmbientPoint(last), x.components));
    }
    let mut w = x.vector();
    for (idx, edge) in curve.points.windows(2).enumerate() {
        let a = edge[0];
        let d = Vector4::from_fn(|i, _| edge[1][i] - a[i]);
        if d.norm() == 0.0 {
            return Err(GeometryError::DegenerateStep(idx));
        }
        let local = LocalGeometry::at(space, &a)?;
        let len = local.norm(&d);
        let n = (len / max_step(space)).ceil().max(1.0) as usize;
        let h = 1.0 / n as f64;
        let at = |tau: f64| -> [f64; 4] { std::array::from_fn(|i| a[i] + tau * d[i]) };
        let f = |tau: f64, w: &Vector4<f64>| -> Result<Vector4<f64>> {
            let lg = LocalGeometry::at(space, &at(tau))?;
            Ok(-lg.gamma(&d, w))
        };
        for k in 0..n {
            let tau = k as f64 * h;
            let k1 = f(tau, &w)?;
            let k2 = f(tau + h / 2.0, &(w + k1 * (h / 2.0)))?;
            let k3 = f(tau + h / 2.0, &(w + k2 * (h / 2.0)))?;
            let k4 = f(tau + h, &(w + k3 * h))?;
            w += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
    }
    Ok(AmbientTangent::new(AmbientPoint(last), w.into()))
}
