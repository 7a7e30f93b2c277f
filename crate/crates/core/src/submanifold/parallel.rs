//! Parallel displacement `Φ^{r,ξ}: p ↦ exp_p(r ξ_p)` and the
//! isoparametric check.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector3, Vector4};

use super::normal::{frame_at, GridFrames, SamplingConfig};
use super::{ChartMap, MapJet, SurfacePatch};
use crate::ambient::{geodesic_with_transport, AmbientPoint, SpaceForm};
use crate::error::Result;
use crate::jacobi::exact_shape_operator;

/// A parallel unit normal field on a patch, fixed by its angle `theta0` in
/// the reference normal frame at `base`. Values elsewhere come from
/// transport along the path `base → (s, t_base) → (s, t)`.
#[derive(Clone, Debug)]
pub struct ParallelField {
    pub patch: SurfacePatch,
    pub base: [f64; 2],
    pub theta0: f64,
    pub panels: usize,
}

impl ParallelField {
    pub fn new(patch: &SurfacePatch, base: [f64; 2], theta0: f64) -> Self {
        ParallelField {
            patch: patch.clone(),
            base,
            theta0,
            panels: 16,
        }
    }

    /// Field through the unit normal `xi0` at `base`.
    pub fn through(patch: &SurfacePatch, base: [f64; 2], xi0: &Vector4<f64>) -> Result<Self> {
        let p = patch.at(base)?;
        let theta0 = super::normal::normal_angle(&p, xi0)?;
        Ok(Self::new(patch, base, theta0))
    }

    fn leg(&self, from: [f64; 2], to: [f64; 2]) -> Result<f64> {
        if from == to {
            return Ok(0.0);
        }
        let n = self.panels;
        let mut pts = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let a = k as f64 / n as f64;
            pts.push([from[0] + a * (to[0] - from[0]), from[1] + a * (to[1] - from[1])]);
        }
        let mut total = 0.0;
        let mut prev = self.patch.at(pts[0])?;
        for u in &pts[1..] {
            let next = self.patch.at(*u)?;
            let mid = self.patch.at([0.5 * (prev.u[0] + next.u[0]), 0.5 * (prev.u[1] + next.u[1])])?;
            let dir = [next.u[0] - prev.u[0], next.u[1] - prev.u[1]];
            let w = super::normal::connection_form(&self.patch, &prev, dir)?
                + 4.0 * super::normal::connection_form(&self.patch, &mid, dir)?
                + super::normal::connection_form(&self.patch, &next, dir)?;
            total -= w / 6.0;
            prev = next;
        }
        Ok(total)
    }

    /// `(ξ, η)` at `u`.
    pub fn frame(&self, u: [f64; 2]) -> Result<(Vector4<f64>, Vector4<f64>)> {
        let corner = [u[0], self.base[1]];
        let phi = self.theta0 + self.leg(self.base, corner)? + self.leg(corner, u)?;
        Ok(frame_at(&self.patch.at(u)?, phi))
    }
}

/// `Φ^{r,ξ}` as a chart map.
#[derive(Clone, Debug)]
pub struct ParallelMap {
    pub field: ParallelField,
    pub r: f64,
}

impl ParallelMap {
    /// End point, radial velocity and transported orthonormal tangent
    /// basis of the normal geodesic from `u`.
    pub fn geodesic_data(&self, u: [f64; 2]) -> Result<([f64; 4], Vector4<f64>, [Vector4<f64>; 2])> {
        let p = self.field.patch.at(u)?;
        let (xi, _) = self.field.frame(u)?;
        let st = geodesic_with_transport(
            &self.field.patch.space,
            &AmbientPoint(p.x),
            &xi,
            self.r,
            &p.tangent,
        )?;
        Ok((st.point, st.velocity, [st.transported[0], st.transported[1]]))
    }
}

impl ChartMap for ParallelMap {
    fn point(&self, space: &SpaceForm, u: [f64; 2]) -> Result<[f64; 4]> {
        let p = self.field.patch.point(u)?;
        if self.r == 0.0 {
            return Ok(p);
        }
        let (xi, _) = self.field.frame(u)?;
        let st = geodesic_with_transport(space, &AmbientPoint(p), &xi, self.r, &[])?;
        Ok(st.point)
    }

    fn jet(&self, space: &SpaceForm, u: [f64; 2]) -> Result<MapJet> {
        if self.r == 0.0 {
            return self.field.patch.map.jet(space, u);
        }
        super::finite_difference_jet(|v| self.point(space, v), u, 1e-4 / space.scale())
    }
}

/// The displaced patch `Φ^{r,ξ}(M)` on the same domain.
pub fn parallel_map(patch: &SurfacePatch, field: &ParallelField, r: f64) -> Result<SurfacePatch> {
    let map = ParallelMap {
        field: field.clone(),
        r,
    };
    SurfacePatch::new(patch.space, patch.domain, Arc::new(map))
}

/// Directly computed geometry of `Φ^{r,ξ}(M)` at one base parameter.
#[derive(Clone, Debug)]
pub struct DisplacedGeometry {
    /// Shape operator of the image along the radial normal, orthonormal
    /// basis.
    pub shape: Matrix2<f64>,
    /// Largest normal component of the transported tangent basis relative
    /// to the image tangent plane.
    pub transport_residual: f64,
}

impl DisplacedGeometry {
    pub fn eigenvalues(&self) -> [f64; 2] {
        crate::numerics::sym_eigen2(&self.shape).0
    }

    pub fn mean_curvature(&self) -> f64 {
        0.5 * self.shape.trace()
    }
}

pub fn displaced_geometry(field: &ParallelField, r: f64, u: [f64; 2]) -> Result<DisplacedGeometry> {
    let pm = ParallelMap {
        field: field.clone(),
        r,
    };
    let space = field.patch.space;
    let jet = pm.jet(&space, u)?;
    let local = crate::ambient::LocalGeometry::at(&space, &jet.x)?;
    let picks = super::choose_normal_picks(&local, &jet.du);
    let image = super::PatchPoint::from_jet(&space, u, &jet, picks)?;
    let (_, velocity, transported) = pm.geodesic_data(u)?;
    let shape = image.shape_operator(&velocity)?;
    let mut worst: f64 = 0.0;
    for v in &transported {
        let tan = super::project(&image.local, &image.tangent, v);
        worst = worst.max(image.local.norm(&(v - tan)));
    }
    Ok(DisplacedGeometry {
        shape,
        transport_residual: worst,
    })
}

/// Result of [`isoparametric_check`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct IsoparametricReport {
    /// Largest spread over base points of the radial mean curvature, over
    /// all sampled directions and radii.
    pub radial_spread: f64,
    pub normal_curvature_max: f64,
    pub section_residual_max: f64,
    pub flat: bool,
    pub sections: bool,
    pub constant_radial_mean_curvature: bool,
    pub pass: bool,
}

/// Almost-isoparametric test plus sections. Radial mean curvatures of the
/// parallel surfaces come from the exact Jacobi-field tube operators built
/// from the pointwise data `(S_ξ, Jξ)` along parallel fields.
pub fn isoparametric_check(patch: &SurfacePatch, cfg: &SamplingConfig) -> Result<IsoparametricReport> {
    let frames = GridFrames::build(patch, cfg.grid)?;
    let c = patch.space.c();
    let scale = patch.space.scale();
    let spread_tol = cfg.spread_tol * scale;
    let normal_tol = cfg.normal_tol * c.abs();
    let nd = cfg.directions.max(1);
    let mut radial_spread: f64 = 0.0;
    for d in 0..nd {
        let theta = 2.0 * PI * d as f64 / nd as f64;
        for &r in &cfg.radii {
            let r = r / scale;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (k, p) in frames.points.iter().enumerate() {
                let (xi, eta) = frames.field(k, theta);
                let s0 = p.shape_matrix(&xi);
                let jxi = p.local.j(&xi);
                let q = Vector3::new(
                    p.local.inner(&jxi, &p.tangent[0]),
                    p.local.inner(&jxi, &p.tangent[1]),
                    p.local.inner(&jxi, &eta),
                );
                let h = 0.5 * exact_shape_operator(c, &s0, &q, r)?.trace();
                lo = lo.min(h);
                hi = hi.max(h);
            }
            radial_spread = radial_spread.max(hi - lo);
        }
    }
    let normal_curvature_max = frames
        .points
        .iter()
        .map(|p| p.oriented_normal_curvature().abs())
        .fold(0.0, f64::max);
    let section_residual_max = frames
        .points
        .iter()
        .map(|p| p.section_residual())
        .fold(0.0, f64::max);
    let flat = normal_curvature_max < normal_tol;
    let sections = section_residual_max < super::SECTION_TOL * c.abs();
    let constant = radial_spread < spread_tol;
    Ok(IsoparametricReport {
        radial_spread,
        normal_curvature_max,
        section_residual_max,
        flat,
        sections,
        constant_radial_mean_curvature: constant,
        pass: flat && sections && constant,
    })
}
