//! Named submanifolds: Chen's surface, totally geodesic planes, circles and
//! geodesic spheres.

use std::sync::Arc;

use nalgebra::Vector4;

use crate::ambient::{lie_bracket_an, LeftInvariantVector as L, LocalGeometry, SpaceForm};
use crate::error::{GeometryError, Result};
use crate::submanifold::{ComposedMap, Curve, Param, Primitive, SurfacePatch};

/// Lie-algebra data of Chen's surface: the subalgebra spanned by
/// `U1 = (√2 B + JV)/√3`, `U2 = (V + √2 Z)/√3`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ChenSurfaceSpec {
    pub c: f64,
    pub u1: L,
    pub u2: L,
}

impl ChenSurfaceSpec {
    pub fn new(c: f64) -> Result<Self> {
        negative(c)?;
        let r2 = 2f64.sqrt();
        let r3 = 3f64.sqrt();
        Ok(ChenSurfaceSpec {
            c,
            u1: L::new(r2 / r3, 0.0, 1.0 / r3, 0.0),
            u2: L::new(0.0, 1.0 / r3, 0.0, r2 / r3),
        })
    }

    /// Largest deviation among `|U_i| = 1`, `<U1,U2> = 0`, `<JU1,U2> = 1/3`,
    /// and the component of `[U1, U2]` off `span{U1, U2}`.
    pub fn invariant_residual(&self) -> Result<f64> {
        let (u1, u2) = (self.u1, self.u2);
        let br = lie_bracket_an(self.c, &u1, &u2)?;
        let off = br - u1 * br.dot(&u1) - u2 * br.dot(&u2);
        Ok([
            (u1.norm() - 1.0).abs(),
            (u2.norm() - 1.0).abs(),
            u1.dot(&u2).abs(),
            (u1.j().dot(&u2) - 1.0 / 3.0).abs(),
            off.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    }
}

fn negative(c: f64) -> Result<()> {
    if c < 0.0 && c.is_finite() {
        Ok(())
    } else if c == 0.0 {
        Err(GeometryError::ZeroCurvature)
    } else {
        Err(GeometryError::ModelCurvatureMismatch {
            model: "an",
            required: "negative",
            c,
        })
    }
}

/// Default domain `[−1/2, 1/2]² / sqrt|c|`.
pub fn default_domain(space: &SpaceForm) -> [[f64; 2]; 2] {
    let h = 0.5 / space.scale();
    [[-h, h], [-h, h]]
}

/// Patch `(s, t) ↦ exp(s ξ1) · exp(t ξ2)` on AN.
pub fn flow_patch(c: f64, xi1: L, xi2: L) -> Result<SurfacePatch> {
    let space = SpaceForm::an(c)?;
    let map = ComposedMap::new(vec![
        Primitive::Flow { xi: xi1, param: Param::S },
        Primitive::Flow { xi: xi2, param: Param::T },
    ]);
    SurfacePatch::new(space, default_domain(&space), Arc::new(map))
}

/// Chen's surface: the orbit through the identity of the subgroup with Lie
/// algebra `span{U1, U2}`.
pub fn chen_surface(c: f64) -> Result<SurfacePatch> {
    let spec = ChenSurfaceSpec::new(c)?;
    flow_patch(c, spec.u1, spec.u2)
}

/// Totally geodesic real hyperbolic plane, the orbit of `exp span{B, V}`.
pub fn totally_geodesic_rh2(c: f64) -> Result<SurfacePatch> {
    negative(c)?;
    flow_patch(c, L::B, L::V)
}

/// Totally geodesic complex line, the orbit of `exp span{B, Z}`.
pub fn complex_line(c: f64) -> Result<SurfacePatch> {
    negative(c)?;
    flow_patch(c, L::B, L::Z)
}

/// Flat Lagrangian orbit of the abelian subgroup `exp span{V, Z}`: a
/// principal orbit of a polar action.
pub fn flat_lagrangian(c: f64) -> Result<SurfacePatch> {
    negative(c)?;
    flow_patch(c, L::V, L::Z)
}

/// Initial data of a circle: start point and orthonormal `(T, N)` in chart
/// components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleSpec {
    pub kappa: f64,
    pub length: f64,
    pub start: [f64; 4],
    pub tangent: [f64; 4],
    pub normal: [f64; 4],
}

impl CircleSpec {
    /// Unit-length-in-`1/sqrt|c|` circle at the origin, with `T` and `N`
    /// spanning a totally real plane.
    pub fn default_for(space: &SpaceForm, kappa: f64) -> Result<Self> {
        let local = LocalGeometry::at(space, &space.origin().0)?;
        let e = |k: usize| Vector4::from_fn(|i, _| if i == k { 1.0 } else { 0.0 });
        // AN: B and V; charts: d/dx1 and d/dx2.
        let second = if space.model() == crate::ambient::Model::AnSolvable { 1 } else { 2 };
        let t = e(0) / local.norm(&e(0));
        let n = e(second) / local.norm(&e(second));
        Ok(CircleSpec {
            kappa,
            length: 2.0 / space.scale(),
            start: space.origin().0,
            tangent: t.into(),
            normal: n.into(),
        })
    }
}

/// Integrates `∇_T T = κN`, `∇_T N = −κT` with RK4 at arc-length spacing
/// `1e-3 / sqrt|c|`.
pub fn circle_from(space: &SpaceForm, spec: &CircleSpec) -> Result<Curve> {
    if !(spec.kappa >= 0.0) {
        return Err(GeometryError::Invalid(format!("negative curvature {}", spec.kappa)));
    }
    let local = LocalGeometry::at(space, &spec.start)?;
    let (t0, n0) = (Vector4::from(spec.tangent), Vector4::from(spec.normal));
    let orth = (local.inner(&t0, &t0) - 1.0)
        .abs()
        .max((local.inner(&n0, &n0) - 1.0).abs())
        .max(local.inner(&t0, &n0).abs());
    if orth > 1e-8 {
        return Err(GeometryError::Invalid(format!(
            "circle tangent and normal are not orthonormal (residual {orth})"
        )));
    }
    let ds = crate::ambient::geodesic::max_step(space);
    let n = (spec.length / ds).ceil() as usize;
    let k = spec.kappa;
    type State = (Vector4<f64>, Vector4<f64>, Vector4<f64>);
    let rhs = |st: &State| -> Result<State> {
        let lg = LocalGeometry::at(space, &st.0.into())?;
        Ok((
            st.1,
            -lg.gamma(&st.1, &st.1) + st.2 * k,
            -lg.gamma(&st.1, &st.2) - st.1 * k,
        ))
    };
    let add = |a: &State, b: &State, h: f64| -> State { (a.0 + b.0 * h, a.1 + b.1 * h, a.2 + b.2 * h) };
    let mut st: State = (Vector4::from(spec.start), t0, n0);
    let mut points = Vec::with_capacity(n + 1);
    points.push(spec.start);
    for _ in 0..n {
        let k1 = rhs(&st)?;
        let k2 = rhs(&add(&st, &k1, ds / 2.0))?;
        let k3 = rhs(&add(&st, &k2, ds / 2.0))?;
        let k4 = rhs(&add(&st, &k3, ds))?;
        st.0 += (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (ds / 6.0);
        st.1 += (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (ds / 6.0);
        st.2 += (k1.2 + k2.2 * 2.0 + k3.2 * 2.0 + k4.2) * (ds / 6.0);
        space.check_point(&st.0.into())?;
        points.push(st.0.into());
    }
    Curve::new(*space, points, ds)
}

/// Circle of geodesic curvature `kappa` through the origin of the default
/// model for `c`.
pub fn circle(c: f64, kappa: f64) -> Result<Curve> {
    let space = SpaceForm::default_for(c)?;
    let spec = CircleSpec::default_for(&space, kappa)?;
    circle_from(&space, &spec)
}

/// Radial chart coordinate of the geodesic sphere of the given radius.
pub fn sphere_chart_radius(c: f64, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(GeometryError::Invalid(format!("radius {radius} must be positive")));
    }
    let s = c.abs().sqrt();
    if c < 0.0 {
        Ok((radius * s / 2.0).tanh())
    } else if c > 0.0 {
        if radius * s >= std::f64::consts::PI {
            return Err(GeometryError::Invalid(format!(
                "radius {radius} reaches the first conjugate radius pi/sqrt(c)"
            )));
        }
        Ok((radius * s / 2.0).tan())
    } else {
        Err(GeometryError::ZeroCurvature)
    }
}

/// Two-parameter slice of the geodesic sphere about the chart origin,
/// `ρ e^{iψ}(cos θ, sin θ)`: tangent to a direction orthogonal to `Jξ` and
/// to the Hopf direction `Jξ`. Ball model for `c < 0`, affine chart for
/// `c > 0`.
pub fn geodesic_sphere(c: f64, radius: f64) -> Result<SurfacePatch> {
    let space = if c < 0.0 { SpaceForm::ball(c)? } else { SpaceForm::fubini(c)? };
    let rho = sphere_chart_radius(c, radius)?;
    let map = ComposedMap::new(vec![Primitive::SphereSlice {
        rho,
        theta: Param::S,
        psi: Param::T,
    }]);
    map.validate(&space)?;
    let centre = std::f64::consts::FRAC_PI_4;
    SurfacePatch::new(space, [[centre - 0.5, centre + 0.5], [-0.5, 0.5]], Arc::new(map))
}

/// Outward unit normal of a geodesic sphere slice at parameter `u`.
pub fn sphere_outward_normal(patch: &SurfacePatch, u: [f64; 2]) -> Result<Vector4<f64>> {
    let x = patch.point(u)?;
    let local = LocalGeometry::at(&patch.space, &x)?;
    let v = Vector4::from(x);
    Ok(v / local.norm(&v))
}

/// Catalog entries addressable by name.
pub const NAMES: [&str; 4] = ["chen", "rh2", "circle", "sphere"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chen_spec_invariants() {
        let spec = ChenSurfaceSpec::new(-4.0).unwrap();
        assert!(spec.invariant_residual().unwrap() < 1e-12);
        assert!(ChenSurfaceSpec::new(4.0).is_err());
        assert!(chen_surface(0.0).is_err());
    }

    #[test]
    fn chen_tangent_frame_at_origin() {
        let patch = chen_surface(-4.0).unwrap();
        let p = patch.at([0.0, 0.0]).unwrap();
        let spec = ChenSurfaceSpec::new(-4.0).unwrap();
        assert!((p.du[0] - Vector4::from(spec.u1.0)).norm() < 1e-14);
        assert!((p.du[1] - Vector4::from(spec.u2.0)).norm() < 1e-14);
        assert!((p.kaehler_angle() - (1.0f64 / 3.0).acos()).abs() < 1e-12);
    }

    #[test]
    fn sphere_radius_limits() {
        assert!(geodesic_sphere(4.0, 1.6).is_err());
        assert!(geodesic_sphere(4.0, 1.2).is_ok());
        assert!(geodesic_sphere(-4.0, -0.1).is_err());
    }
}
