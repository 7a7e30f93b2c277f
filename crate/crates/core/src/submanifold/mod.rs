//! Extrinsic geometry of immersed surfaces and curves.

pub mod curve;
pub mod map;
pub mod normal;
pub mod parallel;

use std::sync::Arc;

use nalgebra::{Matrix2, Vector4};

use crate::ambient::{LocalGeometry, SpaceForm};
use crate::error::{GeometryError, Result};

pub use curve::{curve_terng_check, Curve, CurveReport};
pub use map::{finite_difference_jet, ChartMap, ComposedMap, FnMap, MapJet, Param, Primitive};
pub use normal::{
    loop_holonomy, parallel_normal_frame, terng_check, AdaptedNormalFrame, NormalFrameSample,
    SamplingConfig, ShapeReport,
};
pub use parallel::{
    displaced_geometry, isoparametric_check, parallel_map, DisplacedGeometry, IsoparametricReport, ParallelField,
    ParallelMap,
};

/// Tolerance for "vector is tangent / normal" preconditions.
pub const TANGENCY_TOL: f64 = 1e-8;

/// Immersion of a rectangle `[s0, s1] × [t0, t1]`.
#[derive(Clone, Debug)]
pub struct SurfacePatch {
    pub space: SpaceForm,
    pub domain: [[f64; 2]; 2],
    pub map: Arc<dyn ChartMap>,
    /// Coordinate directions completing the tangent plane to a frame,
    /// fixed once per patch so that the reference normal frame is smooth.
    normal_picks: [usize; 2],
}

impl SurfacePatch {
    pub fn new(space: SpaceForm, domain: [[f64; 2]; 2], map: Arc<dyn ChartMap>) -> Result<Self> {
        if !(domain[0][0] < domain[0][1] && domain[1][0] < domain[1][1]) {
            return Err(GeometryError::Invalid(format!("empty domain {domain:?}")));
        }
        let mut patch = SurfacePatch {
            space,
            domain,
            map,
            normal_picks: [0, 1],
        };
        let center = patch.center();
        let jet = patch.map.jet(&space, center)?;
        let local = LocalGeometry::at(&space, &jet.x)?;
        patch.normal_picks = choose_normal_picks(&local, &jet.du);
        Ok(patch)
    }

    pub fn center(&self) -> [f64; 2] {
        [
            0.5 * (self.domain[0][0] + self.domain[0][1]),
            0.5 * (self.domain[1][0] + self.domain[1][1]),
        ]
    }

    /// `n × n` grid over the domain, row-major in `s`.
    pub fn grid(&self, n: usize) -> Vec<[f64; 2]> {
        let n = n.max(2);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.lerp([i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64]));
            }
        }
        out
    }

    /// Parameter at relative position `a ∈ [0,1]²`.
    pub fn lerp(&self, a: [f64; 2]) -> [f64; 2] {
        [
            self.domain[0][0] + a[0] * (self.domain[0][1] - self.domain[0][0]),
            self.domain[1][0] + a[1] * (self.domain[1][1] - self.domain[1][0]),
        ]
    }

    pub fn point(&self, u: [f64; 2]) -> Result<[f64; 4]> {
        self.map.point(&self.space, u)
    }

    /// Full pointwise extrinsic data at parameter `u`.
    pub fn at(&self, u: [f64; 2]) -> Result<PatchPoint> {
        let jet = self.map.jet(&self.space, u)?;
        PatchPoint::from_jet(&self.space, u, &jet, self.normal_picks)
    }
}

pub(crate) fn choose_normal_picks(local: &LocalGeometry, du: &[Vector4<f64>; 2]) -> [usize; 2] {
    // Pick the pair of coordinate directions whose normal projections are
    // best conditioned.
    let tangent = local.orthonormalize(du);
    let proj = |k: usize| {
        let mut e = Vector4::zeros();
        e[k] = 1.0;
        for t in &tangent {
            e -= t * local.inner(t, &e);
        }
        e
    };
    let mut best = ([0, 1], -1.0);
    for a in 0..4 {
        for b in (a + 1)..4 {
            let (pa, pb) = (proj(a), proj(b));
            let gram = local.inner(&pa, &pa) * local.inner(&pb, &pb) - local.inner(&pa, &pb).powi(2);
            let scale = local.g[(a, a)] * local.g[(b, b)];
            let q = gram / scale;
            if q > best.1 + 1e-9 {
                best = ([a, b], q);
            }
        }
    }
    best.0
}

/// Extrinsic data of a surface at one parameter value.
#[derive(Clone, Debug)]
pub struct PatchPoint {
    pub u: [f64; 2],
    pub x: [f64; 4],
    pub local: LocalGeometry,
    pub du: [Vector4<f64>; 2],
    /// First fundamental form in the coordinate basis.
    pub first_form: Matrix2<f64>,
    /// Orthonormal tangent basis (Gram–Schmidt of `du`).
    pub tangent: [Vector4<f64>; 2],
    /// Orthonormal normal basis, smooth over the patch.
    pub normal: [Vector4<f64>; 2],
    /// `ii[i][j] = II(∂_i, ∂_j)`.
    pub ii: [[Vector4<f64>; 2]; 2],
}

impl PatchPoint {
    pub fn from_jet(space: &SpaceForm, u: [f64; 2], jet: &MapJet, picks: [usize; 2]) -> Result<Self> {
        let local = LocalGeometry::at(space, &jet.x)?;
        let du = jet.du;
        let first_form = Matrix2::from_fn(|i, j| local.inner(&du[i], &du[j]));
        let det = first_form.determinant();
        let scale = first_form.trace().powi(2).max(1e-300);
        if !(det > 1e-10 * scale) {
            return Err(GeometryError::NotImmersed(u, det));
        }
        let tangent = local.orthonormalize(&du);
        let tangent = [tangent[0], tangent[1]];
        let mut coord = [Vector4::zeros(), Vector4::zeros()];
        coord[0][picks[0]] = 1.0;
        coord[1][picks[1]] = 1.0;
        let mut frame = local.orthonormalize(&[tangent[0], tangent[1], coord[0], coord[1]]);
        if frame.len() < 4 {
            // Pointwise fallback; not smooth across the patch.
            let mut all = vec![tangent[0], tangent[1]];
            all.extend((0..4).map(|k| Vector4::from_fn(|i, _| if i == k { 1.0 } else { 0.0 })));
            frame = local.orthonormalize(&all);
        }
        if frame.len() < 4 {
            return Err(GeometryError::Degenerate(format!(
                "normal frame construction failed at {u:?}"
            )));
        }
        let normal = [frame[2], frame[3]];
        let ii = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let acc = jet.ddu[i][j] + local.gamma(&du[i], &du[j]);
                project(&local, &normal, &acc)
            })
        });
        Ok(PatchPoint {
            u,
            x: jet.x,
            local,
            du,
            first_form,
            tangent,
            normal,
            ii,
        })
    }

    /// Coordinates of a tangent vector in the basis `du`; errors if the
    /// vector has a normal component.
    pub fn tangent_coords(&self, v: &Vector4<f64>) -> Result<[f64; 2]> {
        let rhs = nalgebra::Vector2::new(self.local.inner(&self.du[0], v), self.local.inner(&self.du[1], v));
        let a = self.first_form.try_inverse().unwrap() * rhs;
        let resid = v - self.du[0] * a[0] - self.du[1] * a[1];
        let n = self.local.norm(&resid);
        if n > TANGENCY_TOL * self.local.norm(v).max(1.0) {
            return Err(GeometryError::NotTangent(n));
        }
        Ok([a[0], a[1]])
    }

    /// `II(X, Y)` for tangent vectors given in chart components.
    pub fn second_fundamental_form(&self, x: &Vector4<f64>, y: &Vector4<f64>) -> Result<Vector4<f64>> {
        let a = self.tangent_coords(x)?;
        let b = self.tangent_coords(y)?;
        let mut out = Vector4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out += self.ii[i][j] * (a[i] * b[j]);
            }
        }
        Ok(out)
    }

    /// `II` on the orthonormal tangent basis.
    pub fn ii_orthonormal(&self) -> [[Vector4<f64>; 2]; 2] {
        let e = self.tangent;
        std::array::from_fn(|i| {
            std::array::from_fn(|j| self.second_fundamental_form(&e[i], &e[j]).expect("tangent basis"))
        })
    }

    pub fn mean_curvature(&self) -> Vector4<f64> {
        let ii = self.ii_orthonormal();
        (ii[0][0] + ii[1][1]) * 0.5
    }

    pub fn check_unit_normal(&self, xi: &Vector4<f64>, tol: f64) -> Result<()> {
        let t = self.tangent.iter().map(|e| self.local.inner(e, xi).abs()).fold(0.0, f64::max);
        let n = (self.local.norm(xi) - 1.0).abs();
        let r = t.max(n);
        if r > tol {
            return Err(GeometryError::NotUnitNormal(r));
        }
        Ok(())
    }

    /// `S_ξ` in the orthonormal tangent basis.
    pub fn shape_operator(&self, xi: &Vector4<f64>) -> Result<Matrix2<f64>> {
        self.check_unit_normal(xi, 1e-6)?;
        Ok(self.shape_matrix(xi))
    }

    fn shape_matrix(&self, xi: &Vector4<f64>) -> Matrix2<f64> {
        let ii = self.ii_orthonormal();
        Matrix2::from_fn(|i, j| self.local.inner(&ii[i][j], xi))
    }

    /// `arccos |<J e1, e2>|`.
    pub fn kaehler_angle(&self) -> f64 {
        let [e1, e2] = self.tangent;
        self.local.inner(&self.local.j(&e1), &e2).abs().min(1.0).acos()
    }

    /// Gauss equation: `<R(e1,e2)e2,e1> + <II11,II22> − |II12|²`.
    pub fn gaussian_curvature(&self) -> f64 {
        let [e1, e2] = self.tangent;
        let ii = self.ii_orthonormal();
        let sec = self.local.inner(&self.local.curvature(&e1, &e2, &e2), &e1);
        sec + self.local.inner(&ii[0][0], &ii[1][1]) - self.local.inner(&ii[0][1], &ii[0][1])
    }

    /// Ricci equation: `<R(e1,e2)ξ,η> + <[S_ξ,S_η]e1,e2>` for an
    /// orthonormal normal pair.
    pub fn normal_curvature(&self, xi: &Vector4<f64>, eta: &Vector4<f64>) -> Result<f64> {
        self.check_unit_normal(xi, 1e-6)?;
        self.check_unit_normal(eta, 1e-6)?;
        let cross = self.local.inner(xi, eta);
        if cross.abs() > 1e-6 {
            return Err(GeometryError::NormalRank(1, 2));
        }
        let [e1, e2] = self.tangent;
        let sx = self.shape_matrix(xi);
        let se = self.shape_matrix(eta);
        let comm = sx * se - se * sx;
        Ok(self.local.inner(&self.local.curvature(&e1, &e2, xi), eta) + comm[(1, 0)])
    }

    /// Normal basis `(ν1, ν2)` reordered so that `(e1, e2, ν1, ν2)` is
    /// positively oriented for the complex orientation.
    pub fn oriented_normal(&self) -> [Vector4<f64>; 2] {
        let [n1, n2] = self.normal;
        let o = self
            .local
            .orientation(&[self.tangent[0], self.tangent[1], n1, n2]);
        if o < 0.0 {
            [n1, -n2]
        } else {
            [n1, n2]
        }
    }

    /// Normal curvature in the oriented normal frame.
    pub fn oriented_normal_curvature(&self) -> f64 {
        let [n1, n2] = self.oriented_normal();
        self.normal_curvature(&n1, &n2).expect("orthonormal normal frame")
    }

    /// Curvature invariance of the normal plane: largest tangential
    /// component of `R(ν_i, ν_j)ν_k`.
    pub fn section_residual(&self) -> f64 {
        let n = self.normal;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let r = self.local.curvature(&n[i], &n[j], &n[k]);
                    for e in &self.tangent {
                        worst = worst.max(self.local.inner(e, &r).abs());
                    }
                }
            }
        }
        worst
    }

    /// Expresses a normal vector in the basis `normal`.
    pub fn normal_coords(&self, v: &Vector4<f64>) -> [f64; 2] {
        [self.local.inner(&self.normal[0], v), self.local.inner(&self.normal[1], v)]
    }
}

/// Orthogonal projection onto the span of an orthonormal family.
pub(crate) fn project(local: &LocalGeometry, basis: &[Vector4<f64>], v: &Vector4<f64>) -> Vector4<f64> {
    basis.iter().fold(Vector4::zeros(), |acc, b| acc + b * local.inner(b, v))
}

/// Result of [`section_test`].
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SectionTest {
    pub pass: bool,
    pub residual: f64,
}

/// Tolerance of the section test relative to `|c|`.
pub const SECTION_TOL: f64 = 1e-8;

/// Whether the normal plane at `u` is curvature invariant.
pub fn section_test(patch: &SurfacePatch, u: [f64; 2]) -> Result<SectionTest> {
    let p = patch.at(u)?;
    let residual = p.section_residual();
    Ok(SectionTest {
        pass: residual < SECTION_TOL * patch.space.c().abs(),
        residual,
    })
}

/// Pointwise wrappers with the tangent/normal vectors in chart components.
pub fn second_fundamental_form(
    patch: &SurfacePatch,
    u: [f64; 2],
    x: &Vector4<f64>,
    y: &Vector4<f64>,
) -> Result<Vector4<f64>> {
    patch.at(u)?.second_fundamental_form(x, y)
}

pub fn shape_operator(patch: &SurfacePatch, u: [f64; 2], xi: &Vector4<f64>) -> Result<Matrix2<f64>> {
    patch.at(u)?.shape_operator(xi)
}

pub fn kaehler_angle(patch: &SurfacePatch, u: [f64; 2]) -> Result<f64> {
    Ok(patch.at(u)?.kaehler_angle())
}

pub fn gaussian_curvature(patch: &SurfacePatch, u: [f64; 2]) -> Result<f64> {
    Ok(patch.at(u)?.gaussian_curvature())
}

pub fn normal_curvature(
    patch: &SurfacePatch,
    u: [f64; 2],
    xi: &Vector4<f64>,
    eta: &Vector4<f64>,
) -> Result<f64> {
    patch.at(u)?.normal_curvature(xi, eta)
}

/// Intrinsic Gaussian curvature from the induced metric alone (Brioschi
/// formula, derivatives of `E, F, G` by central differences).
pub fn gaussian_curvature_intrinsic(patch: &SurfacePatch, u: [f64; 2]) -> Result<f64> {
    let h = 1e-3 / patch.space.scale();
    let efg = |a: f64, b: f64| -> Result<[f64; 3]> {
        let jet = patch.map.jet(&patch.space, [u[0] + a * h, u[1] + b * h])?;
        let local = LocalGeometry::at(&patch.space, &jet.x)?;
        Ok([
            local.inner(&jet.du[0], &jet.du[0]),
            local.inner(&jet.du[0], &jet.du[1]),
            local.inner(&jet.du[1], &jet.du[1]),
        ])
    };
    let c0 = efg(0.0, 0.0)?;
    let (sp, sm, tp, tm) = (efg(1.0, 0.0)?, efg(-1.0, 0.0)?, efg(0.0, 1.0)?, efg(0.0, -1.0)?);
    let (pp, pm, mp, mm) = (efg(1.0, 1.0)?, efg(1.0, -1.0)?, efg(-1.0, 1.0)?, efg(-1.0, -1.0)?);
    let du = |k: usize| (sp[k] - sm[k]) / (2.0 * h);
    let dv = |k: usize| (tp[k] - tm[k]) / (2.0 * h);
    let duu = |k: usize| (sp[k] - 2.0 * c0[k] + sm[k]) / (h * h);
    let dvv = |k: usize| (tp[k] - 2.0 * c0[k] + tm[k]) / (h * h);
    let duv = |k: usize| (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
    let [e, f, g] = c0;
    let m1 = nalgebra::Matrix3::new(
        -0.5 * dvv(0) + duv(1) - 0.5 * duu(2),
        0.5 * du(0),
        du(1) - 0.5 * dv(0),
        dv(1) - 0.5 * du(2),
        e,
        f,
        0.5 * dv(2),
        f,
        g,
    );
    let m2 = nalgebra::Matrix3::new(0.0, 0.5 * dv(0), 0.5 * du(2), 0.5 * dv(0), e, f, 0.5 * du(2), f, g);
    Ok((m1.determinant() - m2.determinant()) / (e * g - f * f).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::LeftInvariantVector as L;

    fn flow_patch(a: L, b: L) -> SurfacePatch {
        let space = SpaceForm::an(-4.0).unwrap();
        let map = ComposedMap::new(vec![
            Primitive::Flow { xi: a, param: Param::S },
            Primitive::Flow { xi: b, param: Param::T },
        ]);
        SurfacePatch::new(space, [[-0.25, 0.25], [-0.25, 0.25]], Arc::new(map)).unwrap()
    }

    #[test]
    fn totally_real_plane_is_totally_geodesic() {
        let patch = flow_patch(L::B, L::V);
        for u in patch.grid(4) {
            let p = patch.at(u).unwrap();
            let ii = p.ii_orthonormal();
            let worst = ii.iter().flatten().map(|v| p.local.norm(v)).fold(0.0, f64::max);
            assert!(worst < 1e-10, "{worst}");
            assert!((p.kaehler_angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
            assert!((p.gaussian_curvature() + 1.0).abs() < 1e-10);
            assert!((p.oriented_normal_curvature() + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_line() {
        let patch = flow_patch(L::B, L::Z);
        let p = patch.at([0.1, -0.2]).unwrap();
        assert!(p.kaehler_angle() < 1e-7);
        assert!((p.gaussian_curvature() + 4.0).abs() < 1e-9);
        assert!(p.section_residual() < 1e-10);
    }

    #[test]
    fn intrinsic_and_extrinsic_gauss_curvature_agree() {
        let patch = flow_patch(L::new(0.3, 0.5, 0.1, 0.0), L::new(0.0, -0.2, 0.6, 0.7));
        let u = [0.05, -0.1];
        let a = gaussian_curvature(&patch, u).unwrap();
        let b = gaussian_curvature_intrinsic(&patch, u).unwrap();
        assert!((a - b).abs() < 1e-4, "{a} {b}");
    }

    #[test]
    fn preconditions() {
        let patch = flow_patch(L::B, L::V);
        let p = patch.at([0.0, 0.0]).unwrap();
        let normal = p.normal[0];
        assert!(matches!(
            p.second_fundamental_form(&normal, &p.tangent[0]),
            Err(GeometryError::NotTangent(_))
        ));
        assert!(matches!(
            p.shape_operator(&p.tangent[0]),
            Err(GeometryError::NotUnitNormal(_))
        ));
        assert_eq!(
            p.normal_curvature(&normal, &normal),
            Err(GeometryError::NormalRank(1, 2))
        );
        let degenerate = flow_patch(L::B, L::B);
        assert!(matches!(
            degenerate.at([0.0, 0.0]),
            Err(GeometryError::NotImmersed(..))
        ));
    }
}
