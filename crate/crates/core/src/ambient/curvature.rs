use nalgebra::{Matrix4, Vector4};

use super::{christoffel_contract, same_base, AmbientPoint, AmbientTangent, LocalGeometry, SpaceForm};
use crate::autodiff::Jet;
use crate::error::{GeometryError, Result};

/// Christoffel symbols at a point together with their first derivatives.
#[derive(Clone, Debug)]
pub struct Christoffels {
    /// `gamma[k][i][j] = Γ^k_ij`.
    pub gamma: [[[f64; 4]; 4]; 4],
    /// `dgamma[l][k][i][j] = ∂_l Γ^k_ij`.
    pub dgamma: [[[[f64; 4]; 4]; 4]; 4],
    /// Largest `|∇_k g_ij|` computed from the symbols.
    pub compatibility_residual: f64,
}

/// Christoffel symbols by forward-mode differentiation of the chart metric.
pub fn christoffels_numeric(space: &SpaceForm, p: &AmbientPoint) -> Result<Christoffels> {
    space.check_point(&p.0)?;
    let vars = Jet::<4>::variables(p.0);
    let gj = space.metric_tensor(&vars);
    let g = Matrix4::from_fn(|i, j| gj[i][j].v);
    let g_inv = g.try_inverse().ok_or(GeometryError::OutsideChart(p.0))?;
    let dg = |l: usize, i: usize, j: usize| gj[i][j].d[l];
    let d2g = |m: usize, l: usize, i: usize, j: usize| gj[i][j].h[m][l];
    let gamma_m = christoffel_contract(&g_inv, dg);

    // ∂_m Γ^k_ij = ∂_m g^{kl} L_lij + g^{kl} ∂_m L_lij,  ∂_m g^{-1} = -g^{-1} ∂_m g g^{-1}.
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for m in 0..4 {
        let dgm = Matrix4::from_fn(|i, j| dg(m, i, j));
        let dginv = -g_inv * dgm * g_inv;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let mut acc = 0.0;
                    for l in 0..4 {
                        let low = 0.5 * (dg(i, l, j) + dg(j, l, i) - dg(l, i, j));
                        let dlow = 0.5 * (d2g(m, i, l, j) + d2g(m, j, l, i) - d2g(m, l, i, j));
                        acc += dginv[(k, l)] * low + g_inv[(k, l)] * dlow;
                    }
                    dgamma[m][k][i][j] = acc;
                }
            }
        }
    }
    let gamma: [[[f64; 4]; 4]; 4] =
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| gamma_m[k][(i, j)])));
    let compatibility_residual = compatibility(&g, &gamma, dg);
    Ok(Christoffels {
        gamma,
        dgamma,
        compatibility_residual,
    })
}

fn compatibility(
    g: &Matrix4<f64>,
    gamma: &[[[f64; 4]; 4]; 4],
    dg: impl Fn(usize, usize, usize) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut r = dg(k, i, j);
                for m in 0..4 {
                    r -= gamma[m][k][i] * g[(m, j)] + gamma[m][k][j] * g[(i, m)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

/// Central-difference fallback for the Christoffel symbols (step
/// `h = 1e-5 / sqrt|c|`). Only `gamma` is populated; `dgamma` is zero.
pub fn christoffels_fd(space: &SpaceForm, p: &AmbientPoint) -> Result<Christoffels> {
    space.check_point(&p.0)?;
    let h = 1e-5 / space.scale();
    let mut dg = [[[0.0; 4]; 4]; 4];
    for l in 0..4 {
        let mut xp = p.0;
        let mut xm = p.0;
        xp[l] += h;
        xm[l] -= h;
        space.check_point(&xp)?;
        space.check_point(&xm)?;
        let gp = space.metric_tensor(&xp);
        let gm = space.metric_tensor(&xm);
        for i in 0..4 {
            for j in 0..4 {
                dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
            }
        }
    }
    let g = super::to_matrix(&space.metric_tensor(&p.0));
    let g_inv = g.try_inverse().ok_or(GeometryError::OutsideChart(p.0))?;
    let gm = christoffel_contract(&g_inv, |l, i, j| dg[l][i][j]);
    let gamma = std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| gm[k][(i, j)])));
    let compatibility_residual = compatibility(&g, &gamma, |l, i, j| dg[l][i][j]);
    Ok(Christoffels {
        gamma,
        dgamma: [[[[0.0; 4]; 4]; 4]; 4],
        compatibility_residual,
    })
}

/// Closed-form curvature `(c/4)(<Y,Z>X − <X,Z>Y + <JY,Z>JX − <JX,Z>JY − 2<JX,Y>JZ)`.
pub fn curvature_closed_form(
    space: &SpaceForm,
    x: &AmbientTangent,
    y: &AmbientTangent,
    z: &AmbientTangent,
) -> Result<AmbientTangent> {
    same_base(x, y)?;
    same_base(x, z)?;
    let local = LocalGeometry::metric_only(space, &x.base.0)?;
    let r = local.curvature(&x.vector(), &y.vector(), &z.vector());
    Ok(AmbientTangent::new(x.base, r.into()))
}

/// Curvature from derivatives of the numerically computed Christoffel
/// symbols: `R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`.
pub fn curvature_numeric(
    space: &SpaceForm,
    x: &AmbientTangent,
    y: &AmbientTangent,
    z: &AmbientTangent,
) -> Result<AmbientTangent> {
    same_base(x, y)?;
    same_base(x, z)?;
    let ch = christoffels_numeric(space, &x.base)?;
    let r = riemann_apply(&ch, &x.vector(), &y.vector(), &z.vector());
    Ok(AmbientTangent::new(x.base, r.into()))
}

pub(crate) fn riemann_apply(
    ch: &Christoffels,
    x: &Vector4<f64>,
    y: &Vector4<f64>,
    z: &Vector4<f64>,
) -> Vector4<f64> {
    let g = &ch.gamma;
    let dg = &ch.dgamma;
    let mut out = Vector4::zeros();
    for l in 0..4 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..4 {
                    let mut r = dg[i][l][j][k] - dg[j][l][i][k];
                    for m in 0..4 {
                        r += g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k];
                    }
                    acc += r * xy * z[k];
                }
            }
        }
        out[l] = acc;
    }
    out
}
