//! Chart maps of surface patches: compositions of built-in primitives.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::Vector4;

use crate::ambient::{an, geodesic_with_transport, AmbientPoint, LeftInvariantVector, Model, SpaceForm};
use crate::autodiff::{Jet, Scalar};
use crate::error::{GeometryError, Result};

/// Value, first and second derivatives of a chart map at a parameter.
#[derive(Clone, Copy, Debug)]
pub struct MapJet {
    pub x: [f64; 4],
    /// `du[i] = ∂x/∂u_i`.
    pub du: [Vector4<f64>; 2],
    /// `ddu[i][j] = ∂²x/∂u_i∂u_j`.
    pub ddu: [[Vector4<f64>; 2]; 2],
}

/// An immersion `(s, t) ↦` chart coordinates.
pub trait ChartMap: Send + Sync + Debug {
    fn point(&self, space: &SpaceForm, u: [f64; 2]) -> Result<[f64; 4]>;

    /// Derivatives up to order two; central differences unless the map
    /// can do better.
    fn jet(&self, space: &SpaceForm, u: [f64; 2]) -> Result<MapJet> {
        finite_difference_jet(|v| self.point(space, v), u, 1e-4 / space.scale())
    }
}

/// Central-difference jet with step `h`.
pub fn finite_difference_jet(
    f: impl Fn([f64; 2]) -> Result<[f64; 4]>,
    u: [f64; 2],
    h: f64,
) -> Result<MapJet> {
    let at = |a: f64, b: f64| -> Result<Vector4<f64>> {
        Ok(Vector4::from(f([u[0] + a * h, u[1] + b * h])?))
    };
    let x0 = at(0.0, 0.0)?;
    let xp = [at(1.0, 0.0)?, at(0.0, 1.0)?];
    let xm = [at(-1.0, 0.0)?, at(0.0, -1.0)?];
    let du = [(xp[0] - xm[0]) / (2.0 * h), (xp[1] - xm[1]) / (2.0 * h)];
    let d00 = (xp[0] - x0 * 2.0 + xm[0]) / (h * h);
    let d11 = (xp[1] - x0 * 2.0 + xm[1]) / (h * h);
    let d01 = (at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h * h);
    Ok(MapJet {
        x: x0.into(),
        du,
        ddu: [[d00, d01], [d01, d11]],
    })
}

/// Source of a primitive's real parameter.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    S,
    T,
    Const(f64),
}

impl Param {
    fn get<S: Scalar>(&self, u: &[S; 2]) -> S {
        match self {
            Param::S => u[0],
            Param::T => u[1],
            Param::Const(v) => S::cst(*v),
        }
    }
}

/// A step of a composed chart map, applied to the current point.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    /// `g ↦ g · exp(p ξ)`: flow of the left-invariant field `ξ` (AN only).
    Flow { xi: LeftInvariantVector, param: Param },
    /// `x ↦ x + p v` in chart coordinates.
    Translate { v: [f64; 4], param: Param },
    /// `x ↦ exp_x(p v)` with `v` in chart components (or frame components
    /// on AN). Evaluated numerically.
    Geodesic { v: [f64; 4], param: Param },
    /// Ball or chart coordinates `ρ e^{i p_psi}(cos p_theta, sin p_theta)`,
    /// replacing the current point.
    SphereSlice { rho: f64, theta: Param, psi: Param },
}

/// Composition of primitives starting from the chart origin.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedMap {
    pub steps: Vec<Primitive>,
}

impl ComposedMap {
    pub fn new(steps: Vec<Primitive>) -> Self {
        ComposedMap { steps }
    }

    pub fn validate(&self, space: &SpaceForm) -> Result<()> {
        for p in &self.steps {
            match p {
                Primitive::Flow { .. } if space.model() != Model::AnSolvable => {
                    return Err(GeometryError::Invalid(
                        "flow primitives require the AN model".into(),
                    ))
                }
                Primitive::SphereSlice { rho, .. } => {
                    if space.model() == Model::AnSolvable {
                        return Err(GeometryError::Invalid(
                            "sphere slices require ball or chart coordinates".into(),
                        ));
                    }
                    if space.model() == Model::BergmanBall && !(rho.abs() < 1.0) {
                        return Err(GeometryError::OutsideChart([*rho, 0.0, 0.0, 0.0]));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn analytic(&self) -> bool {
        !self
            .steps
            .iter()
            .any(|p| matches!(p, Primitive::Geodesic { .. }))
    }

    fn eval<S: Scalar>(&self, space: &SpaceForm, u: [S; 2]) -> Result<[S; 4]> {
        let sc = space.scale();
        let mut x = [S::zero(); 4];
        for p in &self.steps {
            match p {
                Primitive::Flow { xi, param } => {
                    let t = param.get(&u);
                    let v: [S; 4] = std::array::from_fn(|i| t * xi.0[i]);
                    x = an::group_mul(sc, &x, &an::group_exp(sc, &v));
                }
                Primitive::Translate { v, param } => {
                    let t = param.get(&u);
                    for i in 0..4 {
                        x[i] = x[i] + t * v[i];
                    }
                }
                Primitive::SphereSlice { rho, theta, psi } => {
                    let th = theta.get(&u);
                    let ps = psi.get(&u);
                    let (ct, st) = (th.cos() * *rho, th.sin() * *rho);
                    let (cp, sp) = (ps.cos(), ps.sin());
                    x = [ct * cp, ct * sp, st * cp, st * sp];
                }
                Primitive::Geodesic { .. } => unreachable!("geodesic steps use the numeric path"),
            }
        }
        Ok(x)
    }

    fn eval_numeric(&self, space: &SpaceForm, u: [f64; 2]) -> Result<[f64; 4]> {
        let sc = space.scale();
        let mut x = [0.0; 4];
        for p in &self.steps {
            x = match p {
                Primitive::Geodesic { v, param } => {
                    let t = param.get(&u);
                    let vel = if space.model() == Model::AnSolvable {
                        crate::ambient::to_matrix(&an::frame(sc, &x)) * Vector4::from(*v)
                    } else {
                        Vector4::from(*v)
                    };
                    geodesic_with_transport(space, &AmbientPoint(x), &vel, t, &[])?.point
                }
                Primitive::Flow { xi, param } => {
                    let v = xi.0.map(|c| c * param.get(&u));
                    an::group_mul(sc, &x, &an::group_exp(sc, &v))
                }
                Primitive::Translate { v, param } => {
                    let t = param.get(&u);
                    std::array::from_fn(|i| x[i] + t * v[i])
                }
                slice @ Primitive::SphereSlice { .. } => {
                    ComposedMap::new(vec![slice.clone()]).eval(space, u)?
                }
            };
        }
        Ok(x)
    }
}

impl ChartMap for ComposedMap {
    fn point(&self, space: &SpaceForm, u: [f64; 2]) -> Result<[f64; 4]> {
        let x = if self.analytic() {
            self.eval(space, u)?
        } else {
            self.eval_numeric(space, u)?
        };
        space.check_point(&x)?;
        Ok(x)
    }

    fn jet(&self, space: &SpaceForm, u: [f64; 2]) -> Result<MapJet> {
        if !self.analytic() {
            return finite_difference_jet(|v| self.point(space, v), u, 1e-4 / space.scale());
        }
        let vars = Jet::<2>::variables(u);
        let xj = self.eval(space, vars)?;
        let x = xj.map(|v| v.v);
        space.check_point(&x)?;
        let du = std::array::from_fn(|i| Vector4::from_fn(|k, _| xj[k].d[i]));
        let ddu = std::array::from_fn(|i| {
            std::array::from_fn(|j| Vector4::from_fn(|k, _| xj[k].h[i][j]))
        });
        Ok(MapJet { x, du, ddu })
    }
}

/// Map defined by an arbitrary closure (derivatives by central differences).
#[derive(Clone)]
pub struct FnMap {
    pub name: String,
    #[allow(clippy::type_complexity)]
    pub f: Arc<dyn Fn([f64; 2]) -> Result<[f64; 4]> + Send + Sync>,
    pub h: f64,
}

impl Debug for FnMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FnMap({})", self.name)
    }
}

impl ChartMap for FnMap {
    fn point(&self, space: &SpaceForm, u: [f64; 2]) -> Result<[f64; 4]> {
        let x = (self.f)(u)?;
        space.check_point(&x)?;
        Ok(x)
    }

    fn jet(&self, space: &SpaceForm, u: [f64; 2]) -> Result<MapJet> {
        finite_difference_jet(|v| self.point(space, v), u, self.h)
    }
}
