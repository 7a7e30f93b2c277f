//! Structure equations of a Terng-isoparametric surface with parallel mean
//! curvature direction, checked as numerical residuals, and the resulting
//! classification.
//!
//! Frame conventions: `ξ = H/|H|`, `η ⊥ H` with `a = <Jξ, η> ≥ 0`,
//! `S_ξ U_i = λ_i U_i` with `λ1 > λ2`, `b1 = <Jξ, U1> ≥ 0`, and `U2` signed
//! so that `(U1, U2, ξ, η)` is negatively oriented for the complex
//! orientation (equivalently `<JU1, U2> = −a`).

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::numerics::sym_eigen2;
use crate::submanifold::{
    curve_terng_check, terng_check, Curve, CurveReport, PatchPoint, SamplingConfig, ShapeReport, SurfacePatch,
    SECTION_TOL,
};

/// Scalar frame data `Jξ = b1 U1 + b2 U2 + a η`, `μ = <S_η U1, U1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrincipalData {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub mu: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// The adapted frame at one point.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub point: PatchPoint,
    pub xi: Vector4<f64>,
    pub eta: Vector4<f64>,
    pub u1: Vector4<f64>,
    pub u2: Vector4<f64>,
    /// `S_ξ` and `S_η` in the basis `(U1, U2)`.
    pub s_xi: Matrix2<f64>,
    pub s_eta: Matrix2<f64>,
    pub data: PrincipalData,
}

impl AdaptedFrame {
    fn assemble(point: PatchPoint, xi: Vector4<f64>, eta: Vector4<f64>, u1: Vector4<f64>, u2: Vector4<f64>) -> Result<Self> {
        let l = &point.local;
        let jxi = l.j(&xi);
        let u = [u1, u2];
        let mut s_xi = Matrix2::zeros();
        let mut s_eta = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let ii = point.second_fundamental_form(&u[i], &u[j])?;
                s_xi[(i, j)] = l.inner(&ii, &xi);
                s_eta[(i, j)] = l.inner(&ii, &eta);
            }
        }
        let data = PrincipalData {
            a: l.inner(&jxi, &eta),
            b1: l.inner(&jxi, &u1),
            b2: l.inner(&jxi, &u2),
            mu: s_eta[(0, 0)],
            lambda1: s_xi[(0, 0)],
            lambda2: s_xi[(1, 1)],
        };
        Ok(AdaptedFrame {
            point,
            xi,
            eta,
            u1,
            u2,
            s_xi,
            s_eta,
            data,
        })
    }

    fn flipped(&self, f1: bool, f2: bool) -> Result<Self> {
        let sg = |f: bool| if f { -1.0 } else { 1.0 };
        Self::assemble(self.point.clone(), self.xi, self.eta, self.u1 * sg(f1), self.u2 * sg(f2))
    }
}

/// Adapted frame at a patch point, with `ξ` rotated away from the mean
/// curvature direction by `rotation` radians inside the normal plane
/// (zero for the genuine frame).
pub fn adapted_frame_at(p: &PatchPoint, rotation: f64) -> Result<AdaptedFrame> {
    let l = &p.local;
    let scale = l.c.abs().sqrt();
    let h = p.mean_curvature();
    let hn = l.norm(&h);
    if hn < 1e-8 * scale {
        return Err(GeometryError::Degenerate(format!("minimal point at {:?}: H = 0", p.u)));
    }
    let xi0 = h / hn;
    let [x1, x2] = p.normal_coords(&xi0);
    let eta0 = p.normal[1] * x1 - p.normal[0] * x2;
    let (cr, sr) = (rotation.cos(), rotation.sin());
    let xi = xi0 * cr + eta0 * sr;
    let mut eta = eta0 * cr - xi0 * sr;
    if l.inner(&l.j(&xi), &eta) < 0.0 {
        eta = -eta;
    }
    let s = p.shape_operator(&xi)?;
    let (lam, vecs) = sym_eigen2(&s);
    if lam[0] - lam[1] < 1e-6 * scale {
        return Err(GeometryError::Degenerate(format!("umbilic point at {:?} for S_xi", p.u)));
    }
    let [e1, e2] = p.tangent;
    let mut u1 = e1 * vecs[(0, 0)] + e2 * vecs[(1, 0)];
    let mut u2 = e1 * vecs[(0, 1)] + e2 * vecs[(1, 1)];
    if l.inner(&l.j(&xi), &u1) < 0.0 {
        u1 = -u1;
    }
    if l.orientation(&[u1, u2, xi, eta]) > 0.0 {
        u2 = -u2;
    }
    AdaptedFrame::assemble(p.clone(), xi, eta, u1, u2)
}

/// Adapted frame at parameter `u`.
pub fn adapted_frame(patch: &SurfacePatch, u: [f64; 2]) -> Result<AdaptedFrame> {
    adapted_frame_at(&patch.at(u)?, 0.0)
}

/// Tier tolerances: algebraic identities, first-derivative identities, and
/// identities needing second derivatives. All are multiplied by `|c|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub alg: f64,
    pub d1: f64,
    pub d2: f64,
    /// Deviation allowed from the terminal constants of Chen's surface.
    pub terminal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            alg: 1e-5,
            d1: 1e-3,
            d2: 1e-3,
            terminal: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifierConfig {
    pub sampling: SamplingConfig,
    pub tol: Tolerances,
    /// Number of random sample points for the residual suites.
    pub samples: usize,
    pub seed: u64,
    /// Finite-difference step along `U_i` in units of `1/sqrt|c|`.
    pub fd_step: f64,
    /// Grid per side for the constants check.
    pub constants_grid: usize,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            sampling: SamplingConfig::default(),
            tol: Tolerances::default(),
            samples: 20,
            seed: 42,
            fd_step: 1e-4,
            constants_grid: 5,
        }
    }
}

/// Seeded uniform sample points in the inner 90% of the domain.
pub fn sample_points(patch: &SurfacePatch, n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| patch.lerp([0.05 + 0.9 * rng.gen::<f64>(), 0.05 + 0.9 * rng.gen::<f64>()]))
        .collect()
}

/// Named residuals at one point.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub values: BTreeMap<String, f64>,
    /// Neighbor frames whose sign conventions disagreed with continuity.
    pub sign_flips: usize,
}

impl Residuals {
    fn put(&mut self, name: &str, v: f64) {
        let e = self.values.entry(name.to_string()).or_insert(0.0);
        *e = e.max(v.abs());
    }

    pub fn max(&self) -> f64 {
        self.values.values().cloned().fold(0.0, f64::max)
    }
}

/// Frame at `u + k·h·δ_i` along the direction of `U_i`, sign-matched to
/// `center`.
fn neighbor(
    patch: &SurfacePatch,
    center: &AdaptedFrame,
    i: usize,
    k: f64,
    h: f64,
    rotation: f64,
) -> Result<(AdaptedFrame, bool)> {
    let ui = if i == 0 { center.u1 } else { center.u2 };
    let d = center.point.tangent_coords(&ui)?;
    let u = center.point.u;
    let q = patch.at([u[0] + k * h * d[0], u[1] + k * h * d[1]])?;
    let f = adapted_frame_at(&q, rotation)?;
    let l = &center.point.local;
    let al = [l.inner(&f.u1, &center.u1), l.inner(&f.u2, &center.u2)];
    for a in al {
        if a.abs() < 0.5 {
            return Err(GeometryError::FrameContinuation { u: q.u, alignment: a });
        }
    }
    let (f1, f2) = (al[0] < 0.0, al[1] < 0.0);
    if f1 || f2 {
        Ok((f.flipped(f1, f2)?, true))
    } else {
        Ok((f, false))
    }
}

fn gap(d: &PrincipalData) -> f64 {
    d.lambda1 - d.lambda2
}

/// Algebraic relations of the adapted frame and the induced connection
/// `∇_{U_i}U_i = −k_i U_j`, `∇_{U_i}U_j = k_i U_i`, `k_i = 3cab_i/(4(λ1−λ2))`.
pub fn residual_structural_with(patch: &SurfacePatch, u: [f64; 2], rotation: f64, fd_step: f64) -> Result<Residuals> {
    let f = adapted_frame_at(&patch.at(u)?, rotation)?;
    let c = patch.space.c();
    let l = &f.point.local;
    let PrincipalData { a, b1, b2, .. } = f.data;
    let dl = gap(&f.data);
    let (xi, eta, u1, u2) = (f.xi, f.eta, f.u1, f.u2);
    let mut r = Residuals::default();

    let jr = [
        l.j(&xi) - (u1 * b1 + u2 * b2 + eta * a),
        l.j(&eta) - (-u1 * b2 + u2 * b1 - xi * a),
        l.j(&u1) - (-u2 * a - xi * b1 + eta * b2),
        l.j(&u2) - (u1 * a - xi * b2 - eta * b1),
    ];
    for v in &jr {
        r.put("j_relations", l.norm(v));
    }
    r.put("unit_j_xi", b1 * b1 + b2 * b2 + a * a - 1.0);
    r.put("eta_mean_curvature", l.inner(&f.point.mean_curvature(), &eta));
    r.put("s_xi_offdiagonal", f.s_xi[(0, 1)]);
    r.put("s_eta_trace", f.s_eta.trace());
    let off = -c * (1.0 - 3.0 * a * a) / (4.0 * dl);
    r.put("s_eta_offdiagonal", f.s_eta[(0, 1)] - off);

    let ricci = c / 4.0 * (-b1 * b1 - b2 * b2 + 2.0 * a * a);
    r.put("ricci", l.inner(&l.curvature(&u1, &u2, &xi), &eta) - ricci);
    let b = [b1, b2];
    let uu = [u1, u2];
    for i in 0..2 {
        let j = 1 - i;
        let sign = if i == 0 { -1.0 } else { 1.0 };
        let rc = l.curvature(&u1, &u2, &uu[i]);
        r.put("codazzi_xi", l.inner(&rc, &xi) + 3.0 * c * a * b[i] / 4.0);
        r.put("codazzi_eta", l.inner(&rc, &eta) + 3.0 * c * sign * a * b[j] / 4.0);
    }

    let h = fd_step / patch.space.scale();
    for i in 0..2 {
        let j = 1 - i;
        let (plus, fp) = neighbor(patch, &f, i, 1.0, h, rotation)?;
        let (minus, fm) = neighbor(patch, &f, i, -1.0, h, rotation)?;
        r.sign_flips += fp as usize + fm as usize;
        let pu = [plus.u1, plus.u2];
        let mu = [minus.u1, minus.u2];
        let k = 3.0 * c * a * b[i] / (4.0 * dl);
        for (t, expect) in [(i, -uu[j] * k), (j, uu[i] * k)] {
            let deriv = (pu[t] - mu[t]) / (2.0 * h) + l.gamma(&uu[i], &uu[t]);
            let tangential = uu[0] * l.inner(&uu[0], &deriv) + uu[1] * l.inner(&uu[1], &deriv);
            r.put("connection", l.norm(&(tangential - expect)));
        }
    }
    Ok(r)
}

/// [`residual_structural_with`] on the genuine frame and the default step.
pub fn residual_structural(patch: &SurfacePatch, u: [f64; 2]) -> Result<Residuals> {
    residual_structural_with(patch, u, 0.0, 1e-4)
}

/// Central differences of the frame functions along `U1` and `U2`.
fn frame_derivatives(patch: &SurfacePatch, f: &AdaptedFrame, h: f64) -> Result<([[f64; 6]; 2], usize)> {
    let mut out = [[0.0; 6]; 2];
    let mut flips = 0;
    for i in 0..2 {
        let (p, fp) = neighbor(patch, f, i, 1.0, h, 0.0)?;
        let (m, fm) = neighbor(patch, f, i, -1.0, h, 0.0)?;
        flips += fp as usize + fm as usize;
        let v = |d: &PrincipalData| [d.a, d.b1, d.b2, d.mu, d.lambda1, d.lambda2];
        let (vp, vm) = (v(&p.data), v(&m.data));
        for k in 0..6 {
            out[i][k] = (vp[k] - vm[k]) / (2.0 * h);
        }
    }
    Ok((out, flips))
}

/// The first-order system for `(b1, b2, a, μ)` along `U1` and `U2`.
pub fn residual_derivative_system_with(patch: &SurfacePatch, u: [f64; 2], fd_step: f64) -> Result<Residuals> {
    let f = adapted_frame(patch, u)?;
    let c = patch.space.c();
    let PrincipalData {
        a,
        b1,
        b2,
        mu,
        lambda1,
        lambda2,
    } = f.data;
    let dl = gap(&f.data);
    let h = fd_step / patch.space.scale();
    let (d, flips) = frame_derivatives(patch, &f, h)?;
    // d[i] = U_i applied to (a, b1, b2, μ, λ1, λ2).
    let b = [b1, b2];
    let lam = [lambda1, lambda2];
    let mut r = Residuals {
        sign_flips: flips,
        ..Default::default()
    };
    for i in 0..2 {
        let j = 1 - i;
        let sign = if i == 0 { -1.0 } else { 1.0 };
        let name = |q: &str| format!("u{}_{}", i + 1, q);
        let k = 3.0 * c * a / (4.0 * dl);
        let ub_i = -k * b1 * b2 - a * sign * mu;
        let ub_j = k * b[i] * b[i] - c * a * (1.0 - 3.0 * a * a) / (4.0 * dl) - a * sign * lam[i];
        let ua = sign * (b[j] * lam[i] + b[i] * mu) + c * b[j] * (1.0 - 3.0 * a * a) / (4.0 * dl);
        let umu = k * (b[i] * lam[i] - 3.0 * b[i] * lam[j] - 4.0 * b[j] * mu);
        r.put(&name(&format!("b{}", i + 1)), d[i][1 + i] - ub_i);
        r.put(&name(&format!("b{}", j + 1)), d[i][1 + j] - ub_j);
        r.put(&name("a"), d[i][0] - ua);
        r.put(&name("mu"), d[i][3] - umu);
        r.put("lambda_gradient", d[i][4]);
        r.put("lambda_gradient", d[i][5]);
    }
    let sum = d[0][1] + d[1][2];
    r.put("u1b1_plus_u2b2", sum.abs().max((3.0 * c * a * b1 * b2 / (2.0 * dl)).abs()));
    Ok(r)
}

pub fn residual_derivative_system(patch: &SurfacePatch, u: [f64; 2]) -> Result<Residuals> {
    residual_derivative_system_with(patch, u, 1e-4)
}

/// Directional derivatives `|U_i a|` and `|U_i μ|` (both vanish when the
/// frame functions are constant).
pub fn frame_gradients(patch: &SurfacePatch, u: [f64; 2], fd_step: f64) -> Result<[f64; 2]> {
    let f = adapted_frame(patch, u)?;
    let (d, _) = frame_derivatives(patch, &f, fd_step / patch.space.scale())?;
    Ok([
        d[0][0].abs().max(d[1][0].abs()),
        d[0][3].abs().max(d[1][3].abs()),
    ])
}

/// `a(c + 12λ2²)/(4λ2)` must vanish; this returns the factor `c + 12λ2²`.
pub fn obstruction(c: f64, lambda2: f64) -> f64 {
    c + 12.0 * lambda2 * lambda2
}

/// The obstruction evaluated at the Chen-scale value `λ2² = |c|/12`, the
/// only root when `c < 0`. For `c > 0` it is `2c`; every `λ2` gives a value
/// at least `c`, so no solution exists.
pub fn chen_obstruction(c: f64) -> f64 {
    obstruction(c, (3.0 * c.abs()).sqrt() / 6.0)
}

/// Terminal values of the Chen structure at curvature `c < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChenConstants {
    pub lambda1: f64,
    pub lambda2: f64,
    pub s_eta_offdiagonal: f64,
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub mu: f64,
}

impl ChenConstants {
    pub fn for_curvature(c: f64) -> Self {
        let r = (-3.0 * c).sqrt();
        ChenConstants {
            lambda1: r / 2.0,
            lambda2: r / 6.0,
            s_eta_offdiagonal: r / 6.0,
            a: 1.0 / 3.0,
            b1: 2.0 * 2f64.sqrt() / 3.0,
            b2: 0.0,
            mu: 0.0,
        }
    }
}

/// Result of [`constants_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub values: BTreeMap<String, f64>,
    /// Quantities outside tolerance, by name.
    pub failures: Vec<String>,
    /// `c + 12λ2²` with the measured `λ2` (the Chen-scale value if `c > 0`).
    pub obstruction: f64,
    pub pass: bool,
}

/// Checks `tr S_η = 0`, the `tr S_η²` identity and its constancy, and the
/// terminal values of the frame functions on a grid.
pub fn constants_check(patch: &SurfacePatch, cfg: &VerifierConfig) -> ConstantsReport {
    let c = patch.space.c();
    let mut values = BTreeMap::new();
    let mut failures = Vec::new();
    if c > 0.0 {
        let ob = chen_obstruction(c);
        values.insert("obstruction".to_string(), ob);
        failures.push(format!("obstruction: c + 12 lambda2^2 = {ob} > 0 has no root"));
        return ConstantsReport {
            values,
            failures,
            obstruction: ob,
            pass: false,
        };
    }
    let frames: Result<Vec<AdaptedFrame>> = patch
        .grid(cfg.constants_grid.max(2))
        .into_iter()
        .map(|u| adapted_frame(patch, u))
        .collect();
    let frames = match frames {
        Ok(f) => f,
        Err(e) => {
            failures.push(format!("adapted_frame: {e}"));
            return ConstantsReport {
                values,
                failures,
                obstruction: f64::NAN,
                pass: false,
            };
        }
    };
    let target = ChenConstants::for_curvature(c);
    let mut put = |name: &str, v: f64| {
        let e = values.entry(name.to_string()).or_insert(0.0f64);
        *e = e.max(v.abs());
    };
    let mut sq_lo = f64::INFINITY;
    let mut sq_hi = f64::NEG_INFINITY;
    let mut lambda2_sum = 0.0;
    for f in &frames {
        let d = &f.data;
        let dl = gap(d);
        put("s_eta_trace", f.s_eta.trace());
        let sq = (f.s_eta * f.s_eta).trace();
        let formula = 2.0 * d.mu * d.mu + c * c * (1.0 - 3.0 * d.a * d.a).powi(2) / (8.0 * dl * dl);
        put("s_eta_square_identity", sq - formula);
        sq_lo = sq_lo.min(sq);
        sq_hi = sq_hi.max(sq);
        put("terminal.lambda1", d.lambda1 - target.lambda1);
        put("terminal.lambda2", d.lambda2 - target.lambda2);
        put("terminal.s_xi_offdiagonal", f.s_xi[(0, 1)]);
        put("terminal.s_eta_diagonal", f.s_eta[(0, 0)].abs().max(f.s_eta[(1, 1)].abs()));
        put("terminal.s_eta_offdiagonal", f.s_eta[(0, 1)] - target.s_eta_offdiagonal);
        put("terminal.a", d.a - target.a);
        put("terminal.b1", d.b1 - target.b1);
        put("terminal.b2", d.b2 - target.b2);
        put("terminal.mu", d.mu - target.mu);
        lambda2_sum += d.lambda2;
    }
    put("s_eta_square_spread", sq_hi - sq_lo);
    let ob = obstruction(c, lambda2_sum / frames.len() as f64);
    values.insert("obstruction".to_string(), ob);
    let ca = c.abs();
    for (name, v) in &values {
        let tol = if name.starts_with("terminal.") || name == "obstruction" {
            cfg.tol.terminal * ca
        } else {
            cfg.tol.alg * ca
        };
        if v.abs() > tol {
            failures.push(format!("{name} = {v:e} exceeds {tol:e}"));
        }
    }
    let pass = failures.is_empty();
    ConstantsReport {
        values,
        failures,
        obstruction: ob,
        pass,
    }
}

/// Classification outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    IsoparametricCandidate,
    ChenLike,
    CircleLike,
    NotTerng,
    Degenerate,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::IsoparametricCandidate => "ISOPARAMETRIC_CANDIDATE",
            Verdict::ChenLike => "CHEN_LIKE",
            Verdict::CircleLike => "CIRCLE_LIKE",
            Verdict::NotTerng => "NOT_TERNG",
            Verdict::Degenerate => "DEGENERATE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What to classify.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Surface(&'a SurfacePatch),
    Curve(&'a Curve),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
    pub terng: Option<ShapeReport>,
    pub curve: Option<CurveReport>,
    pub section_residual_max: Option<f64>,
    pub constants: Option<ConstantsReport>,
}

/// Decision tree: curves with constant geodesic curvature are circle-like;
/// surfaces failing the Terng check are not Terng; passing surfaces with
/// sections are isoparametric candidates; without sections they are
/// Chen-like exactly when the constants check passes.
pub fn classify(subject: Subject<'_>, cfg: &VerifierConfig) -> Classification {
    let mut out = Classification {
        verdict: Verdict::Degenerate,
        diagnostics: Vec::new(),
        terng: None,
        curve: None,
        section_residual_max: None,
        constants: None,
    };
    match subject {
        Subject::Curve(curve) => match curve_terng_check(curve, cfg.sampling.spread_tol) {
            Ok(rep) => {
                out.verdict = if rep.pass { Verdict::CircleLike } else { Verdict::NotTerng };
                if !rep.pass {
                    out.diagnostics.push(format!(
                        "geodesic curvature spread {:e}, principal spread {:e}",
                        rep.kappa_spread(),
                        rep.principal_spread
                    ));
                }
                out.curve = Some(rep);
            }
            Err(e) => out.diagnostics.push(format!("curve check: {e}")),
        },
        Subject::Surface(patch) => {
            let terng = match terng_check(patch, &cfg.sampling) {
                Ok(t) => t,
                Err(e) => {
                    out.diagnostics.push(format!("terng_check: {e}"));
                    return out;
                }
            };
            let pass = terng.pass;
            if !pass {
                out.diagnostics.push(format!(
                    "terng_check failed: spread {:e} (tol {:e}), normal curvature {:e} (tol {:e})",
                    terng.eigenvalue_spread, terng.spread_tol, terng.normal_curvature_max, terng.normal_tol
                ));
                out.verdict = Verdict::NotTerng;
                out.terng = Some(terng);
                return out;
            }
            out.terng = Some(terng);
            let mut worst: f64 = 0.0;
            for u in patch.grid(cfg.sampling.grid.max(3)) {
                match patch.at(u) {
                    Ok(p) => worst = worst.max(p.section_residual()),
                    Err(e) => {
                        out.diagnostics.push(format!("section_test: {e}"));
                        return out;
                    }
                }
            }
            out.section_residual_max = Some(worst);
            if worst < SECTION_TOL * patch.space.c().abs() {
                out.verdict = Verdict::IsoparametricCandidate;
                return out;
            }
            let cons = constants_check(patch, cfg);
            if cons.pass {
                out.verdict = Verdict::ChenLike;
            } else {
                out.diagnostics.extend(cons.failures.iter().cloned());
            }
            out.constants = Some(cons);
        }
    }
    out
}

/// Residual suites over random samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub samples: usize,
    /// Worst value of every structural and derivative residual.
    pub structural: BTreeMap<String, f64>,
    pub derivative: BTreeMap<String, f64>,
    pub structural_max: f64,
    pub derivative_max: f64,
    pub sign_flips: usize,
    pub pass: bool,
}

pub fn residual_suite(patch: &SurfacePatch, cfg: &VerifierConfig) -> Result<ResidualReport> {
    let pts = sample_points(patch, cfg.samples, cfg.seed);
    let mut st = Residuals::default();
    let mut dv = Residuals::default();
    for u in &pts {
        let s = residual_structural_with(patch, *u, 0.0, cfg.fd_step)?;
        let d = residual_derivative_system_with(patch, *u, cfg.fd_step)?;
        for (k, v) in s.values {
            st.put(&k, v);
        }
        for (k, v) in d.values {
            dv.put(&k, v);
        }
        st.sign_flips += s.sign_flips;
        dv.sign_flips += d.sign_flips;
    }
    let ca = patch.space.c().abs();
    let (smax, dmax) = (st.max(), dv.max());
    Ok(ResidualReport {
        samples: pts.len(),
        structural_max: smax,
        derivative_max: dmax,
        sign_flips: st.sign_flips + dv.sign_flips,
        pass: smax < cfg.tol.alg * ca && dmax < cfg.tol.d1 * ca,
        structural: st.values,
        derivative: dv.values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{chen_surface, circle, complex_line, flat_lagrangian, totally_geodesic_rh2};

    #[test]
    fn chen_frame_data() {
        let patch = chen_surface(-4.0).unwrap();
        let f = adapted_frame(&patch, [0.1, -0.05]).unwrap();
        let d = f.data;
        let s3 = 3f64.sqrt();
        assert!((d.a - 1.0 / 3.0).abs() < 1e-8, "{d:?}");
        assert!((d.b1 - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-8);
        assert!(d.b2.abs() < 1e-8 && d.mu.abs() < 1e-8);
        assert!((d.lambda1 - s3).abs() < 1e-8 && (d.lambda2 - s3 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn chen_residuals_are_small() {
        let patch = chen_surface(-4.0).unwrap();
        let s = residual_structural(&patch, [0.05, 0.1]).unwrap();
        assert!(s.max() < 1e-6, "{s:?}");
        let d = residual_derivative_system(&patch, [0.05, 0.1]).unwrap();
        assert!(d.max() < 1e-5, "{d:?}");
        assert_eq!(s.sign_flips + d.sign_flips, 0);
    }

    #[test]
    fn rotated_frame_is_detected() {
        let patch = chen_surface(-4.0).unwrap();
        let s = residual_structural_with(&patch, [0.0, 0.0], 0.01, 1e-4).unwrap();
        assert!(s.max() > 1e-3, "{s:?}");
    }

    #[test]
    fn obstruction_values() {
        assert!(chen_obstruction(-4.0).abs() < 1e-12);
        assert!((chen_obstruction(4.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn totally_geodesic_planes_are_minimal() {
        let patch = totally_geodesic_rh2(-4.0).unwrap();
        assert!(matches!(adapted_frame(&patch, [0.0, 0.0]), Err(GeometryError::Degenerate(_))));
        let patch = complex_line(-4.0).unwrap();
        assert!(matches!(adapted_frame(&patch, [0.0, 0.0]), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn verdicts() {
        let cfg = VerifierConfig::default();
        let chen = chen_surface(-4.0).unwrap();
        let rh2 = totally_geodesic_rh2(-4.0).unwrap();
        let flat = flat_lagrangian(-4.0).unwrap();
        let circ = circle(-4.0, 1.0).unwrap();
        assert_eq!(classify(Subject::Surface(&chen), &cfg).verdict, Verdict::ChenLike);
        assert_eq!(classify(Subject::Surface(&rh2), &cfg).verdict, Verdict::NotTerng);
        assert_eq!(classify(Subject::Surface(&flat), &cfg).verdict, Verdict::IsoparametricCandidate);
        assert_eq!(classify(Subject::Curve(&circ), &cfg).verdict, Verdict::CircleLike);
    }
}
