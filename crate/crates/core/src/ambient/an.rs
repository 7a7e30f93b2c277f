//! The solvable group `AN` acting simply transitively on the complex
//! hyperbolic plane.
//!
//! Lie algebra `a ⊕ g_α ⊕ g_2α` with orthonormal basis `{B, V, JV, Z}`,
//! `Z = JB`. With `s = sqrt(-c)` the brackets are
//! `[B, V] = s/2 V`, `[B, JV] = s/2 JV`, `[B, Z] = s Z`, `[V, JV] = s Z`.
//! Group elements use coordinates of the second kind
//! `g = exp(v1 V + v2 JV + x_z Z) · exp(x_a B)`, stored as `[x_a, v1, v2, x_z]`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix4;

use crate::autodiff::{expm1_over, Dual, Scalar};
use crate::error::{GeometryError, Result};

/// Coefficients `(a, u1, u2, x)` of `aB + u1 V + u2 JV + xZ`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LeftInvariantVector(pub [f64; 4]);

impl LeftInvariantVector {
    pub const B: Self = LeftInvariantVector([1.0, 0.0, 0.0, 0.0]);
    pub const V: Self = LeftInvariantVector([0.0, 1.0, 0.0, 0.0]);
    pub const JV: Self = LeftInvariantVector([0.0, 0.0, 1.0, 0.0]);
    pub const Z: Self = LeftInvariantVector([0.0, 0.0, 0.0, 1.0]);

    pub fn new(a: f64, u1: f64, u2: f64, x: f64) -> Self {
        LeftInvariantVector([a, u1, u2, x])
    }

    pub fn zero() -> Self {
        LeftInvariantVector([0.0; 4])
    }

    /// The frame is orthonormal, so the metric is the Euclidean pairing.
    pub fn dot(&self, o: &Self) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `JB = Z`, `JZ = -B`, `J V = JV`, `J JV = -V`.
    pub fn j(&self) -> Self {
        let [a, u1, u2, x] = self.0;
        LeftInvariantVector([-x, -u2, u1, a])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add for LeftInvariantVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        LeftInvariantVector(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for LeftInvariantVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        LeftInvariantVector(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for LeftInvariantVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        LeftInvariantVector(self.0.map(|v| v * k))
    }
}

impl Neg for LeftInvariantVector {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

fn require_negative(c: f64) -> Result<f64> {
    if c < 0.0 && c.is_finite() {
        Ok((-c).sqrt())
    } else {
        Err(GeometryError::ModelCurvatureMismatch {
            model: "an",
            required: "negative",
            c,
        })
    }
}

/// Levi-Civita connection on left-invariant fields:
///
/// `∇_{aB+U+xZ}(bB+W+yZ) / s = (xy + ½<U,W>) B − ½(bU + yJU + xJW) + (−bx + ½<JU,W>) Z`.
pub fn connection_an(
    c: f64,
    x: &LeftInvariantVector,
    y: &LeftInvariantVector,
) -> Result<LeftInvariantVector> {
    let s = require_negative(c)?;
    let [_, u1, u2, xz] = x.0;
    let [b, w1, w2, yz] = y.0;
    let (ju1, ju2) = (-u2, u1);
    let (jw1, jw2) = (-w2, w1);
    let uw = u1 * w1 + u2 * w2;
    let juw = ju1 * w1 + ju2 * w2;
    let out = [
        xz * yz + 0.5 * uw,
        -0.5 * (b * u1 + yz * ju1 + xz * jw1),
        -0.5 * (b * u2 + yz * ju2 + xz * jw2),
        -b * xz + 0.5 * juw,
    ];
    Ok(LeftInvariantVector(out.map(|v| v * s)))
}

/// `[X, Y] = ∇_X Y − ∇_Y X`.
pub fn lie_bracket_an(
    c: f64,
    x: &LeftInvariantVector,
    y: &LeftInvariantVector,
) -> Result<LeftInvariantVector> {
    Ok(connection_an(c, x, y)? - connection_an(c, y, x)?)
}

/// `R(X,Y)W = ∇_X∇_Y W − ∇_Y∇_X W − ∇_[X,Y] W` evaluated purely in the
/// Lie algebra.
pub fn curvature_an(
    c: f64,
    x: &LeftInvariantVector,
    y: &LeftInvariantVector,
    w: &LeftInvariantVector,
) -> Result<LeftInvariantVector> {
    let xy = lie_bracket_an(c, x, y)?;
    Ok(connection_an(c, x, &connection_an(c, y, w)?)?
        - connection_an(c, y, &connection_an(c, x, w)?)?
        - connection_an(c, &xy, w)?)
}

/// Bracket of left-invariant fields computed from the coordinate vector
/// fields of [`frame`] at the point `at`, independently of the connection.
pub fn coordinate_bracket(
    c: f64,
    x: &LeftInvariantVector,
    y: &LeftInvariantVector,
    at: &[f64; 4],
) -> Result<LeftInvariantVector> {
    let s = require_negative(c)?;
    let p: [Dual<4>; 4] = std::array::from_fn(|i| Dual::variable(at[i], i));
    let fr = frame(s, &p);
    let field = |v: &LeftInvariantVector| -> [Dual<4>; 4] {
        std::array::from_fn(|i| (0..4).fold(Dual::constant(0.0), |acc, a| acc + fr[i][a] * v.0[a]))
    };
    let (fx, fy) = (field(x), field(y));
    let br: [f64; 4] = std::array::from_fn(|i| {
        (0..4)
            .map(|j| fx[j].v * fy[i].d[j] - fy[j].v * fx[i].d[j])
            .sum()
    });
    let co = coframe(s, at);
    Ok(LeftInvariantVector(std::array::from_fn(|a| {
        (0..4).map(|i| co[a][i] * br[i]).sum()
    })))
}

/// Fidelity of [`connection_an`] on the frame basis.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ConnectionFidelity {
    /// `max |∇_X Y − ∇_Y X − [X, Y]|` with the coordinate bracket.
    pub torsion: f64,
    /// `max |<∇_X Y, W> + <Y, ∇_X W>|`.
    pub metric: f64,
    /// `max |K(X, JX) − c|` over the basis and a few mixed unit vectors.
    pub holomorphic: f64,
}

pub fn connection_fidelity(c: f64, at: &[f64; 4]) -> Result<ConnectionFidelity> {
    let basis = [LeftInvariantVector::B, LeftInvariantVector::V, LeftInvariantVector::JV, LeftInvariantVector::Z];
    let mut out = ConnectionFidelity {
        torsion: 0.0,
        metric: 0.0,
        holomorphic: 0.0,
    };
    for x in &basis {
        for y in &basis {
            let t = connection_an(c, x, y)? - connection_an(c, y, x)? - coordinate_bracket(c, x, y, at)?;
            out.torsion = out.torsion.max(t.max_abs());
            for w in &basis {
                let m = connection_an(c, x, y)?.dot(w) + y.dot(&connection_an(c, x, w)?);
                out.metric = out.metric.max(m.abs());
            }
        }
    }
    let mut units: Vec<LeftInvariantVector> = basis.to_vec();
    units.push(LeftInvariantVector::new(0.3, -0.5, 0.2, 0.7));
    units.push(LeftInvariantVector::new(1.0, 1.0, 0.0, 0.0));
    units.push(LeftInvariantVector::new(0.0, 1.0, -2.0, 0.5));
    for x in units {
        let x = x * (1.0 / x.norm());
        let jx = x.j();
        let k = curvature_an(c, &x, &jx, &jx)?.dot(&x);
        out.holomorphic = out.holomorphic.max((k - c).abs());
    }
    Ok(out)
}

/// Frame coefficients: `J` acting on `(a, u1, u2, x)`.
pub(crate) fn j_frame_matrix() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, -1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0,
    )
}

/// Coordinate components of the left-invariant fields at `x`:
/// `frame[i][a]` is the `i`-th coordinate of field `a ∈ {B, V, JV, Z}`.
pub fn frame<S: Scalar>(s: f64, x: &[S; 4]) -> [[S; 4]; 4] {
    let eh = (x[0] * (s / 2.0)).exp();
    let ef = (x[0] * s).exp();
    let z = S::zero();
    let one = S::one();
    [
        [one, z, z, z],
        [z, eh, z, z],
        [z, z, eh, z],
        [z, -(eh * x[2]) * (s / 2.0), eh * x[1] * (s / 2.0), ef],
    ]
}

/// Dual coframe `θ^a_i`, rows indexed by `a ∈ {B, V, JV, Z}`.
pub fn coframe<S: Scalar>(s: f64, x: &[S; 4]) -> [[S; 4]; 4] {
    let emh = (x[0] * (-s / 2.0)).exp();
    let emf = (x[0] * (-s)).exp();
    let z = S::zero();
    [
        [S::one(), z, z, z],
        [z, emh, z, z],
        [z, z, emh, z],
        [z, emf * x[2] * (s / 2.0), -(emf * x[1]) * (s / 2.0), emf],
    ]
}

/// Group exponential of `aB + u1 V + u2 JV + xZ` (frame coefficients of
/// generic scalar type).
pub fn group_exp<S: Scalar>(s: f64, xi: &[S; 4]) -> [S; 4] {
    let [a, u1, u2, x] = *xi;
    let half = expm1_over(a * (s / 2.0));
    let full = expm1_over(a * s);
    [a, u1 * half, u2 * half, x * full]
}

/// Group product in coordinates of the second kind.
pub fn group_mul<S: Scalar>(s: f64, g: &[S; 4], h: &[S; 4]) -> [S; 4] {
    let eh = (g[0] * (s / 2.0)).exp();
    let w1 = h[1] * eh;
    let w2 = h[2] * eh;
    [
        g[0] + h[0],
        g[1] + w1,
        g[2] + w2,
        g[3] + h[3] * eh * eh + (g[1] * w2 - g[2] * w1) * (s / 2.0),
    ]
}

pub fn group_inv(s: f64, g: &[f64; 4]) -> [f64; 4] {
    // Solve g * h = e.
    let e = (-g[0] * s / 2.0).exp();
    let h1 = -g[1] * e;
    let h2 = -g[2] * e;
    let w1 = h1 / e;
    let w2 = h2 / e;
    let h3 = -(g[3] + (g[1] * w2 - g[2] * w1) * (s / 2.0)) * e * e;
    [-g[0], h1, h2, h3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::Dual;
    use LeftInvariantVector as L;

    const C: f64 = -4.0;

    fn basis() -> [L; 4] {
        [L::B, L::V, L::JV, L::Z]
    }

    fn close(a: &L, b: &L, tol: f64) -> bool {
        (*a - *b).max_abs() < tol
    }

    #[test]
    fn displayed_connection_values() {
        let s = 2.0;
        assert!(close(&connection_an(C, &L::V, &L::B).unwrap(), &(L::V * (-s / 2.0)), 1e-15));
        assert!(close(&connection_an(C, &L::B, &L::B).unwrap(), &L::zero(), 1e-15));
        assert!(close(&connection_an(C, &L::Z, &L::Z).unwrap(), &(L::B * s), 1e-15));
        assert!(connection_an(4.0, &L::B, &L::B).is_err());
        assert!(connection_an(0.0, &L::B, &L::B).is_err());
    }

    #[test]
    fn bracket_values_and_grading() {
        let s = 2.0;
        assert!(close(&lie_bracket_an(C, &L::B, &L::V).unwrap(), &(L::V * (s / 2.0)), 1e-15));
        assert!(close(&lie_bracket_an(C, &L::V, &L::JV).unwrap(), &(L::Z * s), 1e-15));
        assert!(close(&lie_bracket_an(C, &L::Z, &L::V).unwrap(), &L::zero(), 1e-15));
        // [a, g_α] ⊂ g_α and [g_α, g_α] ⊂ g_2α.
        let ba = lie_bracket_an(C, &L::B, &L::new(0.0, 0.3, -0.8, 0.0)).unwrap();
        assert_eq!((ba.0[0], ba.0[3]), (0.0, 0.0));
        let aa = lie_bracket_an(C, &L::new(0.0, 0.3, -0.8, 0.0), &L::new(0.0, 1.1, 0.4, 0.0)).unwrap();
        assert!(aa.0[..3].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn jacobi_identity_on_basis() {
        for x in basis() {
            for y in basis() {
                for z in basis() {
                    let br = |a: &L, b: &L| lie_bracket_an(C, a, b).unwrap();
                    let sum = br(&x, &br(&y, &z)) + br(&y, &br(&z, &x)) + br(&z, &br(&x, &y));
                    assert!(sum.max_abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn metric_compatible_and_kahler() {
        for x in basis() {
            for y in basis() {
                for w in basis() {
                    let lhs = connection_an(C, &x, &y).unwrap().dot(&w)
                        + y.dot(&connection_an(C, &x, &w).unwrap());
                    assert!(lhs.abs() < 1e-14);
                }
                // ∇J = 0 on left-invariant fields.
                let nj = connection_an(C, &x, &y.j()).unwrap() - connection_an(C, &x, &y).unwrap().j();
                assert!(nj.max_abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exp_is_a_one_parameter_subgroup() {
        let s = 2.0;
        let xi = [0.4, -0.3, 0.7, 0.2];
        let half = xi.map(|v| v * 0.5);
        let g = group_exp(s, &xi);
        let h = group_exp(s, &half);
        let gg = group_mul(s, &h, &h);
        for i in 0..4 {
            assert!((g[i] - gg[i]).abs() < 1e-14);
        }
        let inv = group_inv(s, &g);
        let e = group_mul(s, &g, &inv);
        assert!(e.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn right_translation_velocity_is_the_left_invariant_field() {
        // d/dε g · exp(εX) at ε = 0 must equal frame(g) X.
        let s = 2.0;
        let g = [0.3, -0.2, 0.5, 0.1];
        for a in 0..4 {
            let eps = Dual::<1>::variable(0.0, 0);
            let mut xi = [Dual::<1>::constant(0.0); 4];
            xi[a] = eps;
            let gd = g.map(Dual::<1>::constant);
            let prod = group_mul(s, &gd, &group_exp(s, &xi));
            let e = frame(s, &g);
            for i in 0..4 {
                assert!((prod[i].d[0] - e[i][a]).abs() < 1e-14, "field {a}, coord {i}");
            }
        }
    }

    #[test]
    fn coframe_inverts_frame() {
        let s = 2.0;
        let x = [0.7, 0.1, -0.4, 0.2];
        let e = crate::ambient::to_matrix(&frame(s, &x));
        let t = crate::ambient::to_matrix(&coframe(s, &x));
        assert!((t * e - Matrix4::identity()).norm() < 1e-14);
    }

    #[test]
    fn holomorphic_curvature_of_the_algebra() {
        let x = L::new(0.3, -0.5, 0.2, 0.7);
        let x = x * (1.0 / x.norm());
        let jx = x.j();
        let k = curvature_an(C, &x, &jx, &jx).unwrap().dot(&x);
        assert!((k - C).abs() < 1e-12);
    }

    #[test]
    fn coordinate_bracket_agrees_away_from_identity() {
        let at = [0.4, -0.2, 0.9, 0.3];
        let f = connection_fidelity(C, &at).unwrap();
        assert!(f.torsion < 1e-12 && f.metric < 1e-12 && f.holomorphic < 1e-12, "{f:?}");
        let br = coordinate_bracket(C, &L::V, &L::JV, &at).unwrap();
        assert!(close(&br, &(L::Z * 2.0), 1e-12));
    }
}
