//! Complex space forms of complex dimension two.
//!
//! Three charted models are available:
//!
//! * [`Model::AnSolvable`] (`c < 0`): the solvable group `AN` with global
//!   coordinates `(x_a, v1, v2, x_z)`. A point is `exp(v1 V + v2 JV + x_z Z) ·
//!   exp(x_a B)`, and the metric is the left-invariant one that makes the
//!   frame `{B, V, JV, Z}` orthonormal.
//! * [`Model::BergmanBall`] (`c < 0`): the unit ball in `C^2`.
//! * [`Model::FubiniChart`] (`c > 0`): an affine chart `C^2` of the
//!   projective plane.
//!
//! Ball and chart coordinates are `(Re z1, Im z1, Re z2, Im z2)`; the complex
//! structure is multiplication by `i`. Both metrics are `4/|c|` times the
//! real part of the Kähler metric `∂∂̄ log(1 + σ|z|²)^σ`, `σ = sign c`, which
//! makes the holomorphic sectional curvature equal to `c`.

pub mod an;
pub mod curvature;
pub mod geodesic;

use nalgebra::{Matrix4, Vector4};

use crate::autodiff::{Dual, Scalar};
use crate::error::{GeometryError, Result};

pub use an::{
    connection_an, connection_fidelity, coordinate_bracket, curvature_an, lie_bracket_an, ConnectionFidelity,
    LeftInvariantVector,
};
pub use curvature::{
    christoffels_fd, christoffels_numeric, curvature_closed_form, curvature_numeric, Christoffels,
};
pub use geodesic::{
    geodesic, geodesic_with_transport, parallel_transport, GeodesicState, SampledCurve,
};

/// Chart model of a complex space form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    AnSolvable,
    BergmanBall,
    FubiniChart,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::AnSolvable => "an",
            Model::BergmanBall => "ball",
            Model::FubiniChart => "fubini",
        }
    }
}

/// Ambient geometry descriptor: holomorphic curvature `c` and chart model.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SpaceForm {
    c: f64,
    model: Model,
}

impl SpaceForm {
    pub fn new(c: f64, model: Model) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(GeometryError::ZeroCurvature);
        }
        let ok = match model {
            Model::AnSolvable | Model::BergmanBall => c < 0.0,
            Model::FubiniChart => c > 0.0,
        };
        if !ok {
            let required = if c < 0.0 { "positive" } else { "negative" };
            return Err(GeometryError::ModelCurvatureMismatch {
                model: model.name(),
                required,
                c,
            });
        }
        Ok(SpaceForm { c, model })
    }

    pub fn an(c: f64) -> Result<Self> {
        Self::new(c, Model::AnSolvable)
    }

    pub fn ball(c: f64) -> Result<Self> {
        Self::new(c, Model::BergmanBall)
    }

    pub fn fubini(c: f64) -> Result<Self> {
        Self::new(c, Model::FubiniChart)
    }

    /// The natural model for the sign of `c`: `AN` for `c < 0`, the affine
    /// chart for `c > 0`.
    pub fn default_for(c: f64) -> Result<Self> {
        if c < 0.0 {
            Self::an(c)
        } else {
            Self::fubini(c)
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// `sqrt(|c|)`, the natural inverse length scale.
    pub fn scale(&self) -> f64 {
        self.c.abs().sqrt()
    }

    /// Coordinates of the base point: the identity of `AN`, or the chart origin.
    pub fn origin(&self) -> AmbientPoint {
        AmbientPoint([0.0; 4])
    }

    pub fn contains(&self, x: &[f64; 4]) -> bool {
        if !x.iter().all(|v| v.is_finite()) {
            return false;
        }
        match self.model {
            Model::AnSolvable => x[0].abs() < 200.0 / self.scale(),
            Model::BergmanBall => x.iter().map(|v| v * v).sum::<f64>() < 1.0,
            Model::FubiniChart => x.iter().map(|v| v * v).sum::<f64>() < 1e8,
        }
    }

    pub fn check_point(&self, x: &[f64; 4]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(GeometryError::OutsideChart(*x))
        }
    }

    /// Metric coefficients `g_ij` at chart coordinates `x`.
    pub fn metric_tensor<S: Scalar>(&self, x: &[S; 4]) -> [[S; 4]; 4] {
        match self.model {
            Model::AnSolvable => {
                let theta = an::coframe(self.scale(), x);
                let mut g = [[S::zero(); 4]; 4];
                for i in 0..4 {
                    for j in i..4 {
                        let mut acc = S::zero();
                        for row in theta.iter() {
                            acc = acc + row[i] * row[j];
                        }
                        g[i][j] = acc;
                        g[j][i] = acc;
                    }
                }
                g
            }
            Model::BergmanBall | Model::FubiniChart => kahler_chart_metric(self.c, x),
        }
    }

    /// Matrix of the complex structure acting on coordinate components.
    pub fn complex_structure_matrix(&self, x: &[f64; 4]) -> Matrix4<f64> {
        match self.model {
            Model::AnSolvable => {
                let s = self.scale();
                let e = to_matrix(&an::frame(s, x));
                let theta = to_matrix(&an::coframe(s, x));
                e * an::j_frame_matrix() * theta
            }
            Model::BergmanBall | Model::FubiniChart => chart_j_matrix(),
        }
    }
}

/// `4/|c| · Re h` with `h = ∂∂̄` of the Kähler potential of the ball or chart.
fn kahler_chart_metric<S: Scalar>(c: f64, x: &[S; 4]) -> [[S; 4]; 4] {
    let sigma = c.signum();
    let k = 4.0 / c.abs();
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
    let rho = r2 * sigma + 1.0;
    // <e_a, z> for the real basis d/dx1, d/dy1, d/dx2, d/dy2, as (re, im).
    let alpha = [
        (x[0], -x[1]),
        (x[1], x[0]),
        (x[2], -x[3]),
        (x[3], x[2]),
    ];
    let inv = S::one() / rho;
    let inv2 = inv * inv;
    let mut g = [[S::zero(); 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let cross = alpha[a].0 * alpha[b].0 + alpha[a].1 * alpha[b].1;
            let mut val = -(cross * inv2) * sigma;
            if a == b {
                val = val + inv;
            }
            g[a][b] = val * k;
            g[b][a] = g[a][b];
        }
    }
    g
}

fn chart_j_matrix() -> Matrix4<f64> {
    // J d/dx = d/dy, J d/dy = -d/dx in each complex coordinate.
    Matrix4::new(
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0,
    )
}

pub(crate) fn to_matrix(a: &[[f64; 4]; 4]) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| a[i][j])
}

/// Chart coordinates of a point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AmbientPoint(pub [f64; 4]);

/// Tangent vector given by its chart components at a base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientTangent {
    pub base: AmbientPoint,
    pub components: [f64; 4],
}

impl AmbientTangent {
    pub fn new(base: AmbientPoint, components: [f64; 4]) -> Self {
        AmbientTangent { base, components }
    }

    pub fn vector(&self) -> Vector4<f64> {
        Vector4::from(self.components)
    }

    /// Tangent vector at `base` with the given coefficients in the
    /// left-invariant frame `{B, V, JV, Z}` (AN model only).
    pub fn from_frame(space: &SpaceForm, base: AmbientPoint, coeffs: [f64; 4]) -> Result<Self> {
        if space.model() != Model::AnSolvable {
            return Err(GeometryError::Invalid(
                "left-invariant frame exists only on the AN model".into(),
            ));
        }
        let e = to_matrix(&an::frame(space.scale(), &base.0));
        let v = e * Vector4::from(coeffs);
        Ok(AmbientTangent::new(base, v.into()))
    }
}

fn same_base(x: &AmbientTangent, y: &AmbientTangent) -> Result<()> {
    if x.base.0 == y.base.0 {
        Ok(())
    } else {
        Err(GeometryError::BaseMismatch)
    }
}

/// Riemannian inner product of two tangent vectors at a common base point.
pub fn metric(space: &SpaceForm, x: &AmbientTangent, y: &AmbientTangent) -> Result<f64> {
    same_base(x, y)?;
    let local = LocalGeometry::metric_only(space, &x.base.0)?;
    Ok(local.inner(&x.vector(), &y.vector()))
}

pub fn complex_structure(space: &SpaceForm, x: &AmbientTangent) -> Result<AmbientTangent> {
    space.check_point(&x.base.0)?;
    let jx = space.complex_structure_matrix(&x.base.0) * x.vector();
    Ok(AmbientTangent::new(x.base, jx.into()))
}

/// Metric, complex structure and (optionally) Christoffel symbols frozen at
/// a point, so that repeated pointwise linear algebra is cheap.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub c: f64,
    pub point: [f64; 4],
    pub g: Matrix4<f64>,
    pub g_inv: Matrix4<f64>,
    pub j: Matrix4<f64>,
    /// `gamma[k][(i, j)] = Γ^k_ij`.
    pub gamma: [Matrix4<f64>; 4],
}

impl LocalGeometry {
    pub fn at(space: &SpaceForm, x: &[f64; 4]) -> Result<Self> {
        space.check_point(x)?;
        let vars: [Dual<4>; 4] = std::array::from_fn(|i| Dual::variable(x[i], i));
        let gd = space.metric_tensor(&vars);
        let g = Matrix4::from_fn(|i, j| gd[i][j].v);
        let g_inv = g
            .try_inverse()
            .ok_or_else(|| GeometryError::OutsideChart(*x))?;
        let gamma = christoffel_contract(&g_inv, |k, i, j| gd[i][j].d[k]);
        Ok(LocalGeometry {
            c: space.c(),
            point: *x,
            g,
            g_inv,
            j: space.complex_structure_matrix(x),
            gamma,
        })
    }

    fn metric_only(space: &SpaceForm, x: &[f64; 4]) -> Result<Self> {
        space.check_point(x)?;
        let gm = space.metric_tensor(x);
        let g = to_matrix(&gm);
        let g_inv = g
            .try_inverse()
            .ok_or_else(|| GeometryError::OutsideChart(*x))?;
        Ok(LocalGeometry {
            c: space.c(),
            point: *x,
            g,
            g_inv,
            j: space.complex_structure_matrix(x),
            gamma: [Matrix4::zeros(); 4],
        })
    }

    pub fn inner(&self, a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
        (a.transpose() * self.g * b)[(0, 0)]
    }

    pub fn norm(&self, a: &Vector4<f64>) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn j(&self, a: &Vector4<f64>) -> Vector4<f64> {
        self.j * a
    }

    /// `Γ(a, b)^k = Γ^k_ij a^i b^j`.
    pub fn gamma(&self, a: &Vector4<f64>, b: &Vector4<f64>) -> Vector4<f64> {
        Vector4::from_fn(|k, _| (a.transpose() * self.gamma[k] * b)[(0, 0)])
    }

    /// Closed-form curvature tensor of the space form.
    pub fn curvature(
        &self,
        x: &Vector4<f64>,
        y: &Vector4<f64>,
        z: &Vector4<f64>,
    ) -> Vector4<f64> {
        let jx = self.j(x);
        let jy = self.j(y);
        let jz = self.j(z);
        (x * self.inner(y, z) - y * self.inner(x, z) + jx * self.inner(&jy, z)
            - jy * self.inner(&jx, z)
            - jz * (2.0 * self.inner(&jx, y)))
            * (self.c / 4.0)
    }

    /// Gram–Schmidt in the ambient metric; vectors that become (numerically)
    /// dependent are dropped.
    pub fn orthonormalize(&self, vs: &[Vector4<f64>]) -> Vec<Vector4<f64>> {
        let mut out: Vec<Vector4<f64>> = Vec::new();
        for v in vs {
            let mut w = *v;
            for _ in 0..2 {
                for e in &out {
                    w -= e * self.inner(e, &w);
                }
            }
            let n = self.norm(&w);
            if n > 1e-10 * self.norm(v).max(1e-300) {
                out.push(w / n);
            }
        }
        out
    }

    /// Sign of the orientation of a frame relative to the complex
    /// orientation, read off from the Pfaffian of the Kähler form.
    pub fn orientation(&self, e: &[Vector4<f64>; 4]) -> f64 {
        let w = |a: usize, b: usize| self.inner(&self.j(&e[a]), &e[b]);
        let pf = w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        pf.signum()
    }
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_lj + ∂_j g_li − ∂_l g_ij)` from a derivative
/// accessor `dg(l, i, j) = ∂_l g_ij`.
pub(crate) fn christoffel_contract(
    g_inv: &Matrix4<f64>,
    dg: impl Fn(usize, usize, usize) -> f64,
) -> [Matrix4<f64>; 4] {
    let mut lowered = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                lowered[l][i][j] = 0.5 * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
            }
        }
    }
    std::array::from_fn(|k| {
        Matrix4::from_fn(|i, j| (0..4).map(|l| g_inv[(k, l)] * lowered[l][i][j]).sum())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_sign_compatibility() {
        assert!(SpaceForm::an(-4.0).is_ok());
        assert!(SpaceForm::ball(-1.0).is_ok());
        assert!(SpaceForm::fubini(4.0).is_ok());
        assert!(matches!(
            SpaceForm::an(4.0),
            Err(GeometryError::ModelCurvatureMismatch { .. })
        ));
        assert!(SpaceForm::fubini(-4.0).is_err());
        assert_eq!(SpaceForm::ball(0.0), Err(GeometryError::ZeroCurvature));
    }

    #[test]
    fn frame_is_orthonormal_at_identity() {
        let space = SpaceForm::an(-4.0).unwrap();
        let o = space.origin();
        let b = AmbientTangent::from_frame(&space, o, [1.0, 0.0, 0.0, 0.0]).unwrap();
        let z = AmbientTangent::from_frame(&space, o, [0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((metric(&space, &b, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(metric(&space, &b, &z).unwrap().abs() < 1e-15);
        let jb = complex_structure(&space, &b).unwrap();
        assert!((jb.vector() - z.vector()).norm() < 1e-15);
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let space = SpaceForm::ball(-4.0).unwrap();
        let x = AmbientTangent::new(AmbientPoint([0.0; 4]), [1.0, 0.0, 0.0, 0.0]);
        let y = AmbientTangent::new(AmbientPoint([0.1, 0.0, 0.0, 0.0]), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(metric(&space, &x, &y), Err(GeometryError::BaseMismatch));
        let out = AmbientTangent::new(AmbientPoint([0.9, 0.5, 0.0, 0.0]), [1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            metric(&space, &out, &out),
            Err(GeometryError::OutsideChart(_))
        ));
    }

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        for space in [
            SpaceForm::an(-4.0).unwrap(),
            SpaceForm::ball(-4.0).unwrap(),
            SpaceForm::fubini(4.0).unwrap(),
        ] {
            let p = [0.2, -0.1, 0.3, 0.15];
            let j = space.complex_structure_matrix(&p);
            assert!((j * j + Matrix4::identity()).norm() < 1e-12);
            let local = LocalGeometry::at(&space, &p).unwrap();
            // Hermitian: J is an isometry.
            let g = local.g;
            assert!((j.transpose() * g * j - g).norm() < 1e-12);
        }
    }
}
