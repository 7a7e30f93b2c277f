//! Jacobi fields along normal geodesics and the geometry of parallel
//! (tube-type) displacements.
//!
//! Along a unit speed geodesic `γ`, with `q = Jγ'` parallel, a Jacobi field
//! orthogonal to `γ'` obeys `4X'' + cX + 3c<X, q> q = 0`. In a parallel
//! orthonormal frame of `γ'^⊥` this is a constant coefficient linear system:
//! components orthogonal to `q` oscillate at rate `sqrt|c|/2`, the `q`
//! component at rate `sqrt|c|`.
//!
//! For a surface with unit normal `ξ`, principal curvatures `λ_i` with
//! eigenvectors `U_i`, and `w_i = <U_i, Jξ>`, the field with `X(0) = U_i`,
//! `X'(0) = -λ_i U_i` is `f_{λ_i} P(U_i) + w_i g_{λ_i} Jγ'`.

use nalgebra::{Matrix2, Matrix3x2, Vector3};

use crate::error::{GeometryError, Result};
use crate::numerics::{bisect, golden_min};

/// Data governing the closed-form evolution of a parallel displacement.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct JacobiProfile {
    pub c: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `w_i = <U_i, Jξ>`.
    pub w1: f64,
    pub w2: f64,
}

impl JacobiProfile {
    pub fn new(c: f64, lambda1: f64, lambda2: f64, w1: f64, w2: f64) -> Result<Self> {
        nonzero(c)?;
        let ww = w1 * w1 + w2 * w2;
        if !(ww <= 1.0 + 1e-12) {
            return Err(GeometryError::Invalid(format!(
                "w1^2 + w2^2 = {ww} exceeds 1"
            )));
        }
        Ok(JacobiProfile {
            c,
            lambda1,
            lambda2,
            w1,
            w2,
        })
    }

    /// Profile with `Jξ` tangent, `(w1, w2) = (cos θ, sin θ)`.
    pub fn lagrangian(c: f64, lambda1: f64, lambda2: f64, theta: f64) -> Result<Self> {
        Self::new(c, lambda1, lambda2, theta.cos(), theta.sin())
    }

    /// Normal component `sqrt(1 - w1² - w2²)` of `Jξ`.
    pub fn normal_weight(&self) -> f64 {
        (1.0 - self.w1 * self.w1 - self.w2 * self.w2).max(0.0).sqrt()
    }

    /// `Jξ` in the frame `{U1, U2, η}`.
    pub fn q(&self) -> Vector3<f64> {
        Vector3::new(self.w1, self.w2, self.normal_weight())
    }

    pub fn is_lagrangian(&self, tol: f64) -> bool {
        (self.w1 * self.w1 + self.w2 * self.w2 - 1.0).abs() < tol
    }

    fn lambdas(&self) -> [f64; 2] {
        [self.lambda1, self.lambda2]
    }

    fn ws(&self) -> [f64; 2] {
        [self.w1, self.w2]
    }
}

fn nonzero(c: f64) -> Result<f64> {
    if c == 0.0 || !c.is_finite() {
        Err(GeometryError::ZeroCurvature)
    } else {
        Ok(c.abs().sqrt())
    }
}

/// `(cosh, sinh)` for `c < 0`, `(cos, sin)` for `c > 0`, and the sign
/// `ε = -sign c` with `C' = ε (s/..) S`.
fn trig(c: f64, x: f64) -> (f64, f64, f64) {
    if c < 0.0 {
        (x.cosh(), x.sinh(), 1.0)
    } else {
        (x.cos(), x.sin(), -1.0)
    }
}

/// `f_λ(t)`, `g_λ(t)` and their first derivatives.
///
/// With `s = sqrt|c|`, `C = cosh(ts/2)`, `S = sinh(ts/2)` and `k = 2λ/s`:
/// `f = C − kS`, `g = (C − 1)(1 + 2C − kS)`; trigonometric functions for
/// `c > 0`.
pub fn f_g(lambda: f64, c: f64, t: f64) -> Result<(f64, f64, f64, f64)> {
    let s = nonzero(c)?;
    let (ch, sh, eps) = trig(c, t * s / 2.0);
    let k = 2.0 * lambda / s;
    let f = ch - k * sh;
    let g = (ch - 1.0) * (1.0 + 2.0 * ch - k * sh);
    // C' = ε (s/2) S, S' = (s/2) C.
    let dch = eps * s / 2.0 * sh;
    let dsh = s / 2.0 * ch;
    let df = dch - k * dsh;
    let dg = dch * (1.0 + 2.0 * ch - k * sh) + (ch - 1.0) * (2.0 * dch - k * dsh);
    Ok((f, g, df, dg))
}

/// Second derivatives `(f'', g'')`, read off from the Jacobi equation:
/// `f'' = −(c/4) f`, `(f + g)'' = −c (f + g)`.
pub fn f_g_second(lambda: f64, c: f64, t: f64) -> Result<(f64, f64)> {
    let (f, g, _, _) = f_g(lambda, c, t)?;
    let ddf = -c / 4.0 * f;
    Ok((ddf, -c * (f + g) - ddf))
}

/// Largest step admitted by the Jacobi integrator, `1e-3 / sqrt|c|`.
pub fn max_step(c: f64) -> f64 {
    1e-3 / c.abs().sqrt()
}

fn jacobi_rhs(c: f64, x: &Vector3<f64>) -> Vector3<f64> {
    // x'' = −(c/4)(x + 3 x_0 e_0), e_0 = Jγ'.
    let mut a = -c / 4.0 * x;
    a[0] -= 3.0 * c / 4.0 * x[0];
    a
}

/// Numerical solution of the Jacobi equation in the abstract 3-component
/// model of `γ'^⊥`, with component 0 along `Jγ'`. Returns `(X(t), X'(t))`.
pub fn jacobi_ode(c: f64, x0: [f64; 3], dx0: [f64; 3], t: f64) -> Result<([f64; 3], [f64; 3])> {
    nonzero(c)?;
    let n = (t.abs() / max_step(c)).ceil().max(1.0);
    jacobi_ode_with_step(c, x0, dx0, t, t.abs() / n)
}

/// As [`jacobi_ode`] with an explicit step; steps above [`max_step`] are
/// refused.
pub fn jacobi_ode_with_step(
    c: f64,
    x0: [f64; 3],
    dx0: [f64; 3],
    t: f64,
    step: f64,
) -> Result<([f64; 3], [f64; 3])> {
    nonzero(c)?;
    if !(step > 0.0) || step > max_step(c) * (1.0 + 1e-12) {
        return Err(GeometryError::StepTooLarge {
            step,
            c_abs: c.abs(),
        });
    }
    let n = (t.abs() / step).round().max(1.0) as usize;
    let h = t / n as f64;
    let mut x = Vector3::from(x0);
    let mut v = Vector3::from(dx0);
    if t == 0.0 {
        return Ok((x0, dx0));
    }
    for _ in 0..n {
        let k1x = v;
        let k1v = jacobi_rhs(c, &x);
        let k2x = v + k1v * (h / 2.0);
        let k2v = jacobi_rhs(c, &(x + k1x * (h / 2.0)));
        let k3x = v + k2v * (h / 2.0);
        let k3v = jacobi_rhs(c, &(x + k2x * (h / 2.0)));
        let k4x = v + k3v * h;
        let k4v = jacobi_rhs(c, &(x + k3x * h));
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
    }
    Ok((x.into(), v.into()))
}

/// Closed-form solution of the Jacobi equation in a parallel frame of
/// `γ'^⊥` where `q = Jγ'` has the given (unit) components. Returns
/// `(X(t), X'(t))`.
pub fn jacobi_closed(
    c: f64,
    q: &Vector3<f64>,
    x0: &Vector3<f64>,
    dx0: &Vector3<f64>,
    t: f64,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let s = nonzero(c)?;
    let split = |v: &Vector3<f64>| {
        let a = q.dot(v);
        (a, v - q * a)
    };
    let (a0, p0) = split(x0);
    let (b0, dp0) = split(dx0);
    let (ch, sh, eps) = trig(c, t * s / 2.0);
    let (chf, shf, _) = trig(c, t * s);
    let p = p0 * ch + dp0 * (2.0 / s * sh);
    let dp = p0 * (eps * s / 2.0 * sh) + dp0 * ch;
    let a = a0 * chf + b0 * shf / s;
    let da = a0 * eps * s * shf + b0 * chf;
    Ok((p + q * a, dp + q * da))
}

/// Fields `X_{U_i}` as the columns of a 3×2 matrix (rows: `U1, U2, η`
/// transported), for a base surface with shape operator `s0` (2×2, in the
/// basis `U1, U2`) and `q = Jξ` in the frame `{U1, U2, η}`.
pub fn tube_fields(
    c: f64,
    s0: &Matrix2<f64>,
    q: &Vector3<f64>,
    r: f64,
) -> Result<(Matrix3x2<f64>, Matrix3x2<f64>)> {
    let mut a = Matrix3x2::zeros();
    let mut da = Matrix3x2::zeros();
    for i in 0..2 {
        let mut x0 = Vector3::zeros();
        x0[i] = 1.0;
        let dx0 = Vector3::new(-s0[(0, i)], -s0[(1, i)], 0.0);
        let (x, dx) = jacobi_closed(c, q, &x0, &dx0, r)?;
        a.set_column(i, &x);
        da.set_column(i, &dx);
    }
    Ok((a, da))
}

/// [`tube_fields`] by numerical integration (the generic path).
pub fn tube_fields_ode(
    c: f64,
    s0: &Matrix2<f64>,
    q: &Vector3<f64>,
    r: f64,
) -> Result<(Matrix3x2<f64>, Matrix3x2<f64>)> {
    // Rotate into the model frame where component 0 is q.
    let frame = q_frame(q);
    let mut a = Matrix3x2::zeros();
    let mut da = Matrix3x2::zeros();
    for i in 0..2 {
        let mut x0 = Vector3::zeros();
        x0[i] = 1.0;
        let dx0 = Vector3::new(-s0[(0, i)], -s0[(1, i)], 0.0);
        let (x, dx) = jacobi_ode(c, (frame.transpose() * x0).into(), (frame.transpose() * dx0).into(), r)?;
        a.set_column(i, &(frame * Vector3::from(x)));
        da.set_column(i, &(frame * Vector3::from(dx)));
    }
    Ok((a, da))
}

/// Orthogonal matrix whose first column is `q`.
fn q_frame(q: &Vector3<f64>) -> nalgebra::Matrix3<f64> {
    let e0 = q.normalize();
    let trial = if e0[0].abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = (trial - e0 * e0.dot(&trial)).normalize();
    let e2 = e0.cross(&e1);
    nalgebra::Matrix3::from_columns(&[e0, e1, e2])
}

/// `D_ξ(t)` and `D_ξ'(t)`: `D[j][i] = f_i δ_ij + g_i w_i w_j`.
pub fn d_matrix(p: &JacobiProfile, t: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let l = p.lambdas();
    let w = p.ws();
    let fg = [f_g(l[0], p.c, t)?, f_g(l[1], p.c, t)?];
    let d = Matrix2::from_fn(|j, i| {
        let diag = if i == j { fg[i].0 } else { 0.0 };
        diag + fg[i].1 * w[i] * w[j]
    });
    let dd = Matrix2::from_fn(|j, i| {
        let diag = if i == j { fg[i].2 } else { 0.0 };
        diag + fg[i].3 * w[i] * w[j]
    });
    Ok((d, dd))
}

/// `det D_ξ = f_{λ1} f_{λ2} + w1² f_{λ2} g_{λ1} + w2² f_{λ1} g_{λ2}`.
pub fn det_d(p: &JacobiProfile, t: f64) -> Result<f64> {
    Ok(det_d_and_derivative(p, t)?.0)
}

/// `det D_ξ` and its `t`-derivative in closed form.
pub fn det_d_and_derivative(p: &JacobiProfile, t: f64) -> Result<(f64, f64)> {
    let (f1, g1, df1, dg1) = f_g(p.lambda1, p.c, t)?;
    let (f2, g2, df2, dg2) = f_g(p.lambda2, p.c, t)?;
    let (a, b) = (p.w1 * p.w1, p.w2 * p.w2);
    let det = f1 * f2 + a * f2 * g1 + b * f1 * g2;
    let ddet = df1 * f2 + f1 * df2 + a * (df2 * g1 + f2 * dg1) + b * (df1 * g2 + f1 * dg2);
    Ok((det, ddet))
}

/// Determinants below this are treated as focal.
pub const FOCAL_EPS: f64 = 1e-12;

/// Mean curvature in radial direction, `h = −(det D)' / (2 det D)`.
pub fn radial_mean_curvature(p: &JacobiProfile, r: f64) -> Result<f64> {
    let (det, ddet) = det_d_and_derivative(p, r)?;
    if det.abs() < FOCAL_EPS {
        return Err(GeometryError::FocalPoint { r, det });
    }
    Ok(-ddet / (2.0 * det))
}

/// Taylor coefficients `(c0, c1, c2)` of the radial mean curvature at `r = 0`.
///
/// `c1 = (2c + 3c(w1² + w2²) + 4(λ1² + λ2²))/8`, which is
/// `(5c/4 + λ1² + λ2²)/2` when `Jξ` is tangent.
pub fn taylor_coefficients(p: &JacobiProfile) -> (f64, f64, f64) {
    let s = taylor_series(p);
    (s[0], s[1], s[2])
}

/// Taylor coefficients of the radial mean curvature up to `r³`.
pub fn taylor_series(p: &JacobiProfile) -> [f64; 4] {
    let (c, l1, l2) = (p.c, p.lambda1, p.lambda2);
    let (a, b) = (p.w1 * p.w1, p.w2 * p.w2);
    let c0 = (l1 + l2) / 2.0;
    let c1 = (2.0 * c + 3.0 * c * (a + b) + 4.0 * (l1 * l1 + l2 * l2)) / 8.0;
    let c2 = (c * (l1 + l2) + 4.0 * (l1.powi(3) + l2.powi(3)) + 3.0 * c * (l1 * a + l2 * b)) / 8.0;
    let c3 = (27.0 * a * a * c * c
        + 54.0 * a * b * c * c
        + 3.0 * a * c * c
        + 96.0 * a * c * l1 * l1
        + 27.0 * b * b * c * c
        + 3.0 * b * c * c
        + 96.0 * b * c * l2 * l2
        + 4.0 * c * c
        + 32.0 * c * (l1 * l1 + l2 * l2)
        + 96.0 * (l1.powi(4) + l2.powi(4)))
        / 192.0;
    [c0, c1, c2, c3]
}

/// Shape operator of a parallel displacement at distance `r`, as a 2×2
/// matrix in the transported basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TubeOperator {
    pub r: f64,
    pub matrix: Matrix2<f64>,
}

impl TubeOperator {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn asymmetry(&self) -> f64 {
        (self.matrix[(0, 1)] - self.matrix[(1, 0)]).abs()
    }

    /// Eigenvalues of the symmetrised matrix, in decreasing order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = self.matrix;
        crate::numerics::sym_eigen2(&((m + m.transpose()) * 0.5)).0
    }
}

/// `S^{r,ξ} = −D'(r) D(r)^{-1}` in the basis `{P(U1), P(U2)}`.
pub fn parallel_shape_operator(p: &JacobiProfile, r: f64) -> Result<TubeOperator> {
    let (d, dd) = d_matrix(p, r)?;
    let det = d.determinant();
    if det.abs() < FOCAL_EPS {
        return Err(GeometryError::FocalPoint { r, det });
    }
    let inv = d.try_inverse().ok_or(GeometryError::FocalPoint { r, det })?;
    Ok(TubeOperator {
        r,
        matrix: -dd * inv,
    })
}

/// Shape operator of the displaced surface from the full three component
/// fields: `−` the tangential part of `X'`, written in the orthonormal basis
/// obtained from `X_{U1}, X_{U2}` by Gram–Schmidt. Exact also when `Jξ`
/// has a normal component.
pub fn exact_shape_operator(
    c: f64,
    s0: &Matrix2<f64>,
    q: &Vector3<f64>,
    r: f64,
) -> Result<TubeOperator> {
    let (a, da) = tube_fields(c, s0, q, r)?;
    shape_from_fields(r, &a, &da)
}

pub(crate) fn shape_from_fields(
    r: f64,
    a: &Matrix3x2<f64>,
    da: &Matrix3x2<f64>,
) -> Result<TubeOperator> {
    let gram = a.transpose() * a;
    let det = gram.determinant();
    if det < FOCAL_EPS {
        return Err(GeometryError::FocalPoint { r, det });
    }
    let m = -gram.try_inverse().unwrap() * a.transpose() * da;
    let qr = a.qr();
    let rr = qr.r();
    let rinv = rr.try_inverse().ok_or(GeometryError::FocalPoint { r, det })?;
    Ok(TubeOperator {
        r,
        matrix: rr * m * rinv,
    })
}

/// Smallest positive zero of `det D_ξ` within `10/sqrt|c|`, located to
/// `1e-10`. Double zeros (no sign change) are found by minimising `|det|`.
pub fn focal_radius(p: &JacobiProfile) -> Option<f64> {
    let s = p.c.abs().sqrt();
    let horizon = 10.0 / s;
    let det = |t: f64| det_d(p, t).unwrap_or(f64::NAN);
    let n = 20_000;
    let h = horizon / n as f64;
    let mut prev = (0.0, det(0.0));
    let mut before = prev;
    for k in 1..=n {
        let t = k as f64 * h;
        let v = det(t);
        if v == 0.0 {
            return Some(t);
        }
        if (v < 0.0) != (prev.1 < 0.0) {
            return Some(bisect(det, prev.0, t, 1e-10));
        }
        // Touching zero: a local minimum of |det| that is tiny.
        if k >= 2 && prev.1.abs() < before.1.abs() && prev.1.abs() <= v.abs() {
            let tm = golden_min(|x| det(x).abs(), before.0, t, 1e-10);
            if det(tm).abs() < 1e-9 {
                return Some(tm);
            }
        }
        before = prev;
        prev = (t, v);
    }
    None
}

/// Principal curvatures of the geodesic sphere of radius `radius` with
/// respect to the outward normal: `[direction ⊥ Jξ, Hopf direction Jξ]`.
pub fn sphere_principal_curvatures(c: f64, radius: f64) -> Result<[f64; 2]> {
    let s = nonzero(c)?;
    if c < 0.0 {
        Ok([
            -s / 2.0 / (radius * s / 2.0).tanh(),
            -s / (radius * s).tanh(),
        ])
    } else {
        Ok([
            -s / 2.0 / (radius * s / 2.0).tan(),
            -s / (radius * s).tan(),
        ])
    }
}

/// The same curvatures from the Jacobi integrator with `X(0) = 0`,
/// `X'(0) = e`: `λ = −X'(r)/X(r)` along each eigendirection.
pub fn sphere_principal_curvatures_ode(c: f64, radius: f64) -> Result<[f64; 2]> {
    let (x, dx) = jacobi_ode(c, [0.0; 3], [0.0, 1.0, 0.0], radius)?;
    let (y, dy) = jacobi_ode(c, [0.0; 3], [1.0, 0.0, 0.0], radius)?;
    Ok([-dx[1] / x[1], -dy[0] / y[0]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_conditions() {
        for c in [-4.0, 4.0, -1.0] {
            for l in [-2.0, 0.0, 0.7] {
                let (f, g, df, dg) = f_g(l, c, 0.0).unwrap();
                assert_eq!((f, g, df, dg), (1.0, 0.0, -l, 0.0));
            }
        }
        assert_eq!(f_g(1.0, 0.0, 1.0), Err(GeometryError::ZeroCurvature));
    }

    #[test]
    fn reference_values() {
        let (f, ..) = f_g(0.0, -4.0, 1.0).unwrap();
        assert!((f - 1.0f64.cosh()).abs() < 1e-15);
        let (f, ..) = f_g(0.0, 4.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(f.abs() < 1e-15);
        let (x, _) = jacobi_ode(4.0, [0.0, 1.0, 0.0], [0.0; 3], std::f64::consts::FRAC_PI_2).unwrap();
        assert!(x[1].abs() < 1e-10);
    }

    #[test]
    fn oversized_step_is_refused() {
        assert!(matches!(
            jacobi_ode_with_step(-4.0, [1.0, 0.0, 0.0], [0.0; 3], 1.0, 0.01),
            Err(GeometryError::StepTooLarge { .. })
        ));
        assert_eq!(
            jacobi_ode(-4.0, [0.0; 3], [0.0; 3], 1.3).unwrap(),
            ([0.0; 3], [0.0; 3])
        );
    }

    #[test]
    fn taylor_reference() {
        let p = JacobiProfile::new(-4.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let (c0, c1, c2) = taylor_coefficients(&p);
        assert!((c0 - 0.5).abs() < 1e-15);
        assert!((c1 + 2.0).abs() < 1e-15);
        assert!((c2 + 1.5).abs() < 1e-15);
        let p = JacobiProfile::lagrangian(-4.0, 0.0, 0.0, 0.4).unwrap();
        assert!((taylor_coefficients(&p).1 + 2.5).abs() < 1e-14);
    }

    #[test]
    fn focal_examples() {
        // Totally geodesic fibre: det = cosh²(t), no zero.
        let p = JacobiProfile::new(-4.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let d = det_d(&p, 0.8).unwrap();
        assert!((d - 0.8f64.cosh().powi(2)).abs() < 1e-13);
        assert_eq!(focal_radius(&p), None);
        let p = JacobiProfile::new(-4.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(focal_radius(&p), None);
        // Double zero at π/2 (cos²) is still found.
        let p = JacobiProfile::new(4.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let r = focal_radius(&p).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-7, "{r}");
    }

    #[test]
    fn shape_operator_at_zero_is_diagonal() {
        let p = JacobiProfile::lagrangian(-4.0, 1.3, -0.4, 0.7).unwrap();
        let s = parallel_shape_operator(&p, 0.0).unwrap();
        assert!((s.matrix - Matrix2::new(1.3, 0.0, 0.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn sphere_curvatures_agree_with_oracle() {
        for c in [-4.0, 4.0] {
            let a = sphere_principal_curvatures(c, 0.3).unwrap();
            let b = sphere_principal_curvatures_ode(c, 0.3).unwrap();
            assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }
    }
}
