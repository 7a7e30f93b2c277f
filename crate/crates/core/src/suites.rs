//! Named verification suites run by the command-line tool.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient::{
    connection_fidelity, curvature_closed_form, curvature_numeric, AmbientPoint, AmbientTangent, LocalGeometry,
    Model, SpaceForm,
};
use crate::catalog;
use crate::error::{GeometryError, Result};
use crate::jacobi::{self, JacobiProfile};
use crate::numerics::{polyfit, sym_eigen2};
use crate::submanifold::{
    displaced_geometry, gaussian_curvature_intrinsic, terng_check, ParallelField, SamplingConfig, SurfacePatch,
};
use crate::verifier::{
    adapted_frame, chen_obstruction, classify, residual_suite, sample_points, Subject, Tolerances, Verdict,
    VerifierConfig,
};

/// Suite names accepted by `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Chen,
    Rh2,
    Circle,
    Sphere,
    Jacobi,
    Curvature,
    All,
}

impl Target {
    pub const ALL: [Target; 7] = [
        Target::Chen,
        Target::Rh2,
        Target::Circle,
        Target::Sphere,
        Target::Jacobi,
        Target::Curvature,
        Target::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Chen => "chen",
            Target::Rh2 => "rh2",
            Target::Circle => "circle",
            Target::Sphere => "sphere",
            Target::Jacobi => "jacobi",
            Target::Curvature => "curvature",
            Target::All => "all",
        }
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Target::ALL
            .iter()
            .find(|t| t.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = Target::ALL.iter().map(|t| t.name()).collect();
                format!("unknown target '{s}' (expected one of: {})", names.join(", "))
            })
    }
}

/// Validated run settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub c: f64,
    pub grid: usize,
    /// Displacement radii in units of `1/sqrt|c|`.
    pub radii: Vec<f64>,
    pub tol_alg: f64,
    pub tol_d1: f64,
    pub tol_d2: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        RunConfig {
            c: -4.0,
            grid: 21,
            radii: SamplingConfig::default().radii,
            tol_alg: t.alg,
            tol_d1: t.d1,
            tol_d2: t.d2,
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c == 0.0 || !self.c.is_finite() {
            return Err(GeometryError::ZeroCurvature);
        }
        if self.grid < 3 {
            return Err(GeometryError::Invalid(format!("grid size {} must be at least 3", self.grid)));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(GeometryError::Invalid("radii must be a nonempty list of positive values".into()));
        }
        for (name, v) in [("tol-alg", self.tol_alg), ("tol-d1", self.tol_d1), ("tol-d2", self.tol_d2)] {
            if !(v > 0.0) {
                return Err(GeometryError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn verifier(&self) -> VerifierConfig {
        let mut cfg = VerifierConfig {
            seed: self.seed,
            ..Default::default()
        };
        cfg.sampling.grid = self.grid;
        cfg.sampling.radii = self.radii.clone();
        cfg.tol.alg = self.tol_alg;
        cfg.tol.d1 = self.tol_d1;
        cfg.tol.d2 = self.tol_d2;
        cfg
    }
}

/// One assertion of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `near`, `below`, `above` or `flag`.
    pub relation: &'static str,
    pub expected: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn near(name: &str, value: f64, expected: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "near",
            expected: Some(expected),
            tolerance: tol,
            pass: (value - expected).abs() < tol,
        }
    }

    pub fn below(name: &str, value: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "below",
            expected: None,
            tolerance: tol,
            pass: value < tol,
        }
    }

    pub fn above(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "above",
            expected: None,
            tolerance: bound,
            pass: value > bound,
        }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            relation: "flag",
            expected: Some(1.0),
            tolerance: 0.5,
            pass: ok,
        }
    }
}

/// Outcome of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub target: String,
    /// Measured value of every check, plus informational quantities.
    pub residuals: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub verdict: Option<Verdict>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(target: &str) -> Self {
        SuiteReport {
            target: target.into(),
            residuals: BTreeMap::new(),
            checks: Vec::new(),
            verdict: None,
            verdicts: BTreeMap::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    fn check(&mut self, c: Check) {
        self.residuals.insert(c.name.clone(), finite(c.value));
        self.pass &= c.pass;
        self.checks.push(c);
    }

    fn info(&mut self, name: &str, v: f64) {
        self.residuals.insert(name.into(), finite(v));
    }

    fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn finite(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Worst-case tracker: keeps the sample value that deviates most.
struct Worst {
    value: f64,
    dev: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: f64::NAN,
            dev: -1.0,
        }
    }

    fn add(&mut self, v: f64, expected: f64) {
        let d = (v - expected).abs();
        if d > self.dev || d.is_nan() {
            self.dev = d;
            self.value = v;
        }
    }
}

/// Runs one suite. Configuration problems are errors; failed assertions
/// are recorded in the report.
pub fn run(target: Target, cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    match target {
        Target::Chen => chen(cfg),
        Target::Rh2 => rh2(cfg),
        Target::Circle => circle(cfg),
        Target::Sphere => sphere(cfg),
        Target::Jacobi => jacobi_suite(cfg),
        Target::Curvature => curvature(cfg),
        Target::All => all(cfg),
    }
}

fn all(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("all");
    let targets = [
        Target::Curvature,
        Target::Jacobi,
        Target::Chen,
        Target::Rh2,
        Target::Circle,
        Target::Sphere,
    ];
    for t in targets {
        if t == Target::Rh2 && cfg.c > 0.0 {
            out.notes.push("rh2: skipped, the catalog plane lives in the complex hyperbolic plane".into());
            continue;
        }
        let r = run(t, cfg)?;
        for mut c in r.checks {
            c.name = format!("{}.{}", t.name(), c.name);
            out.check(c);
        }
        for (k, v) in r.residuals {
            out.residuals.entry(format!("{}.{}", t.name(), k)).or_insert(v);
        }
        if let Some(v) = r.verdict {
            out.verdicts.insert(t.name().into(), v);
        }
        out.notes.extend(r.notes.into_iter().map(|n| format!("{}: {n}", t.name())));
    }
    Ok(out)
}

/// Eigenvalues of a shape operator, decreasing.
fn spectrum(m: &Matrix2<f64>) -> [f64; 2] {
    sym_eigen2(m).0
}

fn chen(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("chen");
    let c = cfg.c;
    if c > 0.0 {
        out.notes.push("no Chen surface exists for c > 0; reporting the obstruction".into());
        out.check(Check::above("obstruction", chen_obstruction(c), 0.0));
        return Ok(out);
    }
    let vcfg = cfg.verifier();
    let patch = catalog::chen_surface(c)?;
    let r = (-3.0 * c).sqrt();
    let pts = sample_points(&patch, vcfg.samples, cfg.seed);
    let mut angle = Worst::new();
    let mut k = Worst::new();
    let mut k_intr = Worst::new();
    let mut hh = Worst::new();
    let (mut sx1, mut sx2, mut se1, mut se2) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    let (mut a, mut b1, mut b2, mut mu) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    let mut normal_curv: f64 = 0.0;
    for u in &pts {
        let p = patch.at(*u)?;
        angle.add(p.kaehler_angle(), (1.0f64 / 3.0).acos());
        let kg = p.gaussian_curvature();
        k.add(kg, c / 6.0);
        k_intr.add(gaussian_curvature_intrinsic(&patch, *u)? - kg, 0.0);
        let h = p.mean_curvature();
        hh.add(p.local.inner(&h, &h), -c / 3.0);
        normal_curv = normal_curv.max(p.oriented_normal_curvature().abs());
        let f = adapted_frame(&patch, *u)?;
        let [l1, l2] = spectrum(&f.s_xi);
        sx1.add(l1, r / 2.0);
        sx2.add(l2, r / 6.0);
        let [e1, e2] = spectrum(&f.s_eta);
        se1.add(e1, r / 6.0);
        se2.add(e2, -r / 6.0);
        a.add(f.data.a, 1.0 / 3.0);
        b1.add(f.data.b1, 2.0 * 2f64.sqrt() / 3.0);
        b2.add(f.data.b2, 0.0);
        mu.add(f.data.mu, 0.0);
    }
    out.check(Check::near("kaehler_angle", angle.value, (1.0f64 / 3.0).acos(), 1e-6));
    out.check(Check::near("gaussian_curvature", k.value, c / 6.0, 1e-4));
    out.check(Check::below("gauss_equation_consistency", k_intr.dev, cfg.tol_d2));
    out.check(Check::near("mean_curvature_squared", hh.value, -c / 3.0, 1e-4));
    out.check(Check::near("s_xi_lambda1", sx1.value, r / 2.0, 1e-4));
    out.check(Check::near("s_xi_lambda2", sx2.value, r / 6.0, 1e-4));
    out.check(Check::near("s_eta_plus", se1.value, r / 6.0, 1e-4));
    out.check(Check::near("s_eta_minus", se2.value, -r / 6.0, 1e-4));
    out.check(Check::near("a", a.value, 1.0 / 3.0, 1e-4));
    out.check(Check::near("b1", b1.value, 2.0 * 2f64.sqrt() / 3.0, 1e-4));
    out.check(Check::near("b2", b2.value, 0.0, 1e-4));
    out.check(Check::near("mu", mu.value, 0.0, 1e-4));
    out.check(Check::below("normal_curvature", normal_curv, 1e-6));

    let terng = terng_check(&patch, &vcfg.sampling)?;
    out.check(Check::flag("terng_check", terng.pass));
    out.info("terng_eigenvalue_spread", terng.eigenvalue_spread);
    let section = patch.grid(5).iter().map(|u| patch.at(*u).map(|p| p.section_residual())).collect::<Result<Vec<_>>>()?;
    let section_min = section.iter().cloned().fold(f64::INFINITY, f64::min);
    out.check(Check::above("section_residual", section_min, 0.1 * c.abs()));

    let res = residual_suite(&patch, &vcfg)?;
    out.check(Check::below("structural_residual", res.structural_max, 1e-4));
    out.check(Check::below("derivative_residual", res.derivative_max, 1e-3));
    for (k, v) in &res.structural {
        out.info(&format!("structural.{k}"), *v);
    }
    for (k, v) in &res.derivative {
        out.info(&format!("derivative.{k}"), *v);
    }
    out.info("sign_flips", res.sign_flips as f64);
    out.check(Check::near("obstruction", chen_obstruction(c), 0.0, 1e-12));

    let dev = chen_parallel_deviation(&patch, &pts[..2])?;
    out.check(Check::below("parallel_map_consistency", dev, 1e-3));

    let cls = classify(Subject::Surface(&patch), &vcfg);
    out.check(Check::flag("classify_chen_like", cls.verdict == Verdict::ChenLike));
    out.notes.extend(cls.diagnostics);
    out.verdict = Some(cls.verdict);
    Ok(out)
}

/// Radii of the parallel-map comparisons, `{0.01, 0.05} · 2/sqrt|c|`.
pub fn comparison_radii(c: f64) -> [f64; 2] {
    let l = 2.0 / c.abs().sqrt();
    [0.01 * l, 0.05 * l]
}

/// Largest eigenvalue deviation between the direct shape operator of
/// `Φ^{r,ξ}(M)` and `−D'D⁻¹` on Chen's surface, `ξ = H/|H|`.
pub fn chen_parallel_deviation(patch: &SurfacePatch, at: &[[f64; 2]]) -> Result<f64> {
    let c = patch.space.c();
    let mut worst: f64 = 0.0;
    for u in at {
        let f = adapted_frame(patch, *u)?;
        let d = f.data;
        let prof = JacobiProfile::new(c, d.lambda1, d.lambda2, d.b1, d.b2)?;
        let field = ParallelField::through(patch, *u, &f.xi)?;
        for r in comparison_radii(c) {
            let direct = displaced_geometry(&field, r, *u)?.eigenvalues();
            let model = jacobi::parallel_shape_operator(&prof, r)?.eigenvalues();
            worst = worst.max((direct[0] - model[0]).abs()).max((direct[1] - model[1]).abs());
        }
    }
    Ok(worst)
}

fn rh2(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("rh2");
    let c = cfg.c;
    if c > 0.0 {
        return Err(GeometryError::Invalid("rh2 requires c < 0".into()));
    }
    let vcfg = cfg.verifier();
    let patch = catalog::totally_geodesic_rh2(c)?;
    let mut ii: f64 = 0.0;
    let mut nc = Worst::new();
    let mut ang = Worst::new();
    for u in patch.grid(cfg.grid.min(11)) {
        let p = patch.at(u)?;
        for row in p.ii_orthonormal() {
            for v in row {
                ii = ii.max(p.local.norm(&v));
            }
        }
        nc.add(p.oriented_normal_curvature(), c / 4.0);
        ang.add(p.kaehler_angle(), FRAC_PI_2);
    }
    out.check(Check::below("second_fundamental_form", ii, 1e-6));
    out.check(Check::near("normal_curvature", nc.value, c / 4.0, 1e-6));
    out.check(Check::near("kaehler_angle", ang.value, FRAC_PI_2, 1e-6));
    let cls = classify(Subject::Surface(&patch), &vcfg);
    out.check(Check::flag("classify_not_terng", cls.verdict == Verdict::NotTerng));
    out.notes.extend(cls.diagnostics);
    out.verdict = Some(cls.verdict);
    Ok(out)
}

/// Geodesic curvature of the catalog circle, `sqrt|c|/2`.
pub fn default_kappa(c: f64) -> f64 {
    c.abs().sqrt() / 2.0
}

fn circle(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("circle");
    let kappa = default_kappa(cfg.c);
    let curve = catalog::circle(cfg.c, kappa)?;
    let vcfg = cfg.verifier();
    let cls = classify(Subject::Curve(&curve), &vcfg);
    let rep = cls
        .curve
        .clone()
        .ok_or_else(|| GeometryError::Degenerate(cls.diagnostics.join("; ")))?;
    let dev = (rep.kappa_max - kappa).abs().max((rep.kappa_min - kappa).abs());
    out.check(Check::below("geodesic_curvature_error", dev, 1e-6));
    out.check(Check::below("principal_spread", rep.principal_spread, rep.spread_tol));
    out.check(Check::flag("terng_check", rep.pass));
    out.info("kappa", kappa);
    out.info("section_residual", rep.section_residual_max);
    out.check(Check::flag("classify_circle_like", cls.verdict == Verdict::CircleLike));
    out.notes.push(
        "a three-dimensional normal space is never curvature invariant, so the circle has no sections".into(),
    );
    out.verdict = Some(cls.verdict);
    Ok(out)
}

/// Radius of the sphere suite, `0.6/sqrt|c|`.
pub fn default_sphere_radius(c: f64) -> f64 {
    0.6 / c.abs().sqrt()
}

fn sphere(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("sphere");
    let c = cfg.c;
    let radius = default_sphere_radius(c);
    let patch = catalog::geodesic_sphere(c, radius)?;
    let oracle = jacobi::sphere_principal_curvatures(c, radius)?;
    let mut oracle_sorted = oracle;
    oracle_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let ode = jacobi::sphere_principal_curvatures_ode(c, radius)?;
    out.check(Check::below(
        "ode_oracle",
        (ode[0] - oracle[0]).abs().max((ode[1] - oracle[1]).abs()),
        1e-6,
    ));
    let pts = sample_points(&patch, 50, cfg.seed);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut dev: f64 = 0.0;
    for u in &pts {
        let p = patch.at(*u)?;
        let nu = catalog::sphere_outward_normal(&patch, *u)?;
        let l = spectrum(&p.shape_operator(&nu)?);
        for i in 0..2 {
            lo[i] = lo[i].min(l[i]);
            hi[i] = hi[i].max(l[i]);
            dev = dev.max((l[i] - oracle_sorted[i]).abs());
        }
    }
    out.check(Check::below("principal_spread", (hi[0] - lo[0]).max(hi[1] - lo[1]), 1e-4));
    out.check(Check::below("oracle_deviation", dev, 1e-4));
    out.info("radius", radius);
    out.info("lambda_theta", oracle[0]);
    out.info("lambda_hopf", oracle[1]);
    let pd = sphere_parallel_deviation(&patch, radius, &pts[..2])?;
    out.check(Check::below("parallel_map_consistency", pd, 1e-3));
    Ok(out)
}

/// As [`chen_parallel_deviation`] for a geodesic sphere slice along its
/// outward normal (profile with `Jξ` equal to the Hopf direction).
pub fn sphere_parallel_deviation(patch: &SurfacePatch, radius: f64, at: &[[f64; 2]]) -> Result<f64> {
    let c = patch.space.c();
    let [lt, lh] = jacobi::sphere_principal_curvatures(c, radius)?;
    let prof = JacobiProfile::new(c, lt, lh, 0.0, 1.0)?;
    let mut worst: f64 = 0.0;
    for u in at {
        let nu = catalog::sphere_outward_normal(patch, *u)?;
        let field = ParallelField::through(patch, *u, &nu)?;
        for r in comparison_radii(c) {
            let direct = displaced_geometry(&field, r, *u)?.eigenvalues();
            let model = jacobi::parallel_shape_operator(&prof, r)?.eigenvalues();
            worst = worst.max((direct[0] - model[0]).abs()).max((direct[1] - model[1]).abs());
        }
    }
    Ok(worst)
}

/// A random profile: `λ_i ∈ [−3, 3]`, `w` uniform in the unit disc, or on
/// the unit circle when `lagrangian`.
pub fn random_profile(rng: &mut impl Rng, c: f64, lagrangian: bool) -> Result<JacobiProfile> {
    let l1 = rng.gen_range(-3.0..3.0);
    let l2 = rng.gen_range(-3.0..3.0);
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let rho = if lagrangian { 1.0 } else { rng.gen::<f64>().sqrt() };
    JacobiProfile::new(c, l1, l2, rho * th.cos(), rho * th.sin())
}

/// Measured quantities of the Jacobi closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobiFidelity {
    /// Closed-form fields `f e_i + w_i g Jγ'` against the integrated ODE.
    pub field_residual: f64,
    /// Closed-form `det D` against the determinant of integrated fields,
    /// before the first focal point.
    pub det_residual: f64,
}

pub fn jacobi_fidelity(c: f64, samples: usize, rng: &mut impl Rng) -> Result<JacobiFidelity> {
    let s = c.abs().sqrt();
    let mut out = JacobiFidelity {
        field_residual: 0.0,
        det_residual: 0.0,
    };
    for _ in 0..samples {
        let p = random_profile(rng, c, false)?;
        let q = p.q();
        let s0 = Matrix2::new(p.lambda1, 0.0, 0.0, p.lambda2);
        let horizon = jacobi::focal_radius(&p).map_or(1.0 / s, |f| f.min(1.0 / s));
        let t = rng.gen_range(0.05..0.9) * horizon;
        let (a, da) = jacobi::tube_fields_ode(c, &s0, &q, t)?;
        let lam = [p.lambda1, p.lambda2];
        let w = [p.w1, p.w2];
        for i in 0..2 {
            let (f, g, df, dg) = jacobi::f_g(lam[i], c, t)?;
            let mut e = Vector3::zeros();
            e[i] = 1.0;
            let x = e * f + q * (w[i] * g);
            let dx = e * df + q * (w[i] * dg);
            let err = (a.column(i) - x).norm().max((da.column(i) - dx).norm());
            out.field_residual = out.field_residual.max(err);
        }
        let top = Matrix2::new(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        out.det_residual = out.det_residual.max((top.determinant() - jacobi::det_d(&p, t)?).abs());
    }
    Ok(out)
}

/// Largest deviation of `(c0, c1, c2)` from a least-squares polynomial fit
/// of the radial mean curvature on `r ∈ [0, 0.05 · 2/sqrt|c|]`.
pub fn taylor_fit_deviation(c: f64, samples: usize, degree: usize, rng: &mut impl Rng) -> Result<f64> {
    let rmax = 0.05 * 2.0 / c.abs().sqrt();
    let n = 201;
    let xs: Vec<f64> = (0..n).map(|k| rmax * k as f64 / (n - 1) as f64).collect();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let p = random_profile(rng, c, true)?;
        let ys: Vec<f64> = xs.iter().map(|r| jacobi::radial_mean_curvature(&p, *r)).collect::<Result<_>>()?;
        let fit = polyfit(&xs, &ys, degree);
        let (c0, c1, c2) = jacobi::taylor_coefficients(&p);
        for (k, v) in [c0, c1, c2].into_iter().enumerate() {
            worst = worst.max((fit[k] - v).abs());
        }
    }
    Ok(worst)
}

fn jacobi_suite(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("jacobi");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fid = jacobi_fidelity(cfg.c, 100, &mut rng)?;
    out.check(Check::below("closed_form_ode_residual", fid.field_residual, 1e-8));
    out.check(Check::below("det_ode_residual", fid.det_residual, 1e-6));
    let d2 = taylor_fit_deviation(cfg.c, 50, 2, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    out.check(Check::below("taylor_fit_degree2", d2, 1e-4));
    let d8 = taylor_fit_deviation(cfg.c, 50, 8, &mut ChaCha8Rng::seed_from_u64(cfg.seed))?;
    out.check(Check::below("taylor_fit_degree8", d8, 1e-4));
    if d2 >= 1e-4 && d8 < 1e-4 {
        out.notes.push(
            "the degree-2 fit absorbs the cubic term of the expansion; the degree-8 fit isolates the coefficients".into(),
        );
    }
    Ok(out)
}

/// Random points in a chart, well inside its domain.
pub fn random_point(space: &SpaceForm, rng: &mut impl Rng) -> [f64; 4] {
    let span = match space.model() {
        Model::AnSolvable => 0.8 / space.scale(),
        Model::BergmanBall => 0.4,
        Model::FubiniChart => 1.0,
    };
    std::array::from_fn(|_| rng.gen_range(-span..span))
}

/// `max ‖R_numeric − R_closed‖ / (|c| |x||y||z|)` over random samples.
pub fn curvature_cross_validation(space: &SpaceForm, samples: usize, rng: &mut impl Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let base = AmbientPoint(random_point(space, rng));
        let local = LocalGeometry::at(space, &base.0)?;
        let v: [Vector4<f64>; 3] = std::array::from_fn(|_| Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
        let t = |x: &Vector4<f64>| AmbientTangent::new(base, (*x).into());
        let rn = curvature_numeric(space, &t(&v[0]), &t(&v[1]), &t(&v[2]))?.vector();
        let rc = curvature_closed_form(space, &t(&v[0]), &t(&v[1]), &t(&v[2]))?.vector();
        let scale = space.c().abs() * local.norm(&v[0]) * local.norm(&v[1]) * local.norm(&v[2]);
        worst = worst.max(local.norm(&(rn - rc)) / scale);
    }
    Ok(worst)
}

/// `max |K(X, JX) − c|` from the numerically computed curvature tensor.
pub fn holomorphic_curvature_numeric(space: &SpaceForm, samples: usize, rng: &mut impl Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let base = AmbientPoint(random_point(space, rng));
        let local = LocalGeometry::at(space, &base.0)?;
        let x = Vector4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let x = x / local.norm(&x);
        let jx = local.j(&x);
        let t = |v: &Vector4<f64>| AmbientTangent::new(base, (*v).into());
        let r = curvature_numeric(space, &t(&x), &t(&jx), &t(&jx))?.vector();
        worst = worst.max((local.inner(&r, &x) - space.c()).abs());
    }
    Ok(worst)
}

fn curvature(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("curvature");
    let c = cfg.c;
    let models: Vec<SpaceForm> = if c < 0.0 {
        vec![SpaceForm::ball(c)?, SpaceForm::an(c)?]
    } else {
        vec![SpaceForm::fubini(c)?]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for space in &models {
        let name = space.model().name();
        let e = curvature_cross_validation(space, 100, &mut rng)?;
        out.check(Check::below(&format!("cross_validation_{name}"), e, 1e-5));
        let h = holomorphic_curvature_numeric(space, 20, &mut rng)?;
        out.check(Check::below(&format!("holomorphic_curvature_{name}"), h, 1e-8));
    }
    if c < 0.0 {
        let at = random_point(&SpaceForm::an(c)?, &mut rng);
        let f = connection_fidelity(c, &at)?;
        out.check(Check::below("an_torsion", f.torsion, 1e-12));
        out.check(Check::below("an_metric_compatibility", f.metric, 1e-12));
        out.check(Check::below("an_holomorphic_curvature", f.holomorphic, 1e-8));
    }
    Ok(out)
}

/// Summary line for text output.
pub fn summary(r: &SuiteReport) -> String {
    let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        format!("{}: PASS ({} checks)", r.target, r.checks.len())
    } else {
        format!("{}: FAIL ({} of {} checks failed: {})", r.target, failed.len(), r.checks.len(), failed.join(", "))
    }
}
