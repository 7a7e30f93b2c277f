use isoparam::catalog::*;
use isoparam::verifier::*;

const C: f64 = -4.0;

#[test]
fn chen_frame_functions() {
    let patch = chen_surface(C).unwrap();
    let r3 = 3f64.sqrt();
    for u in sample_points(&patch, 10, 4) {
        let d = adapted_frame(&patch, u).unwrap().data;
        assert!((d.a - 1.0 / 3.0).abs() < 1e-5);
        assert!((d.b1 - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-5);
        assert!(d.b2.abs() < 1e-5 && d.mu.abs() < 1e-5);
        assert!((d.lambda1 - 3.0 * d.lambda2).abs() < 1e-5);
        assert!((d.lambda2 - r3 / 3.0).abs() < 1e-5);
        assert!((d.a * d.a + d.b1 * d.b1 + d.b2 * d.b2 - 1.0).abs() < 1e-10);
    }
}

#[test]
fn structural_residuals() {
    let patch = chen_surface(C).unwrap();
    for u in sample_points(&patch, 20, 42) {
        let r = residual_structural(&patch, u).unwrap();
        assert!(r.max() < 1e-4, "{r:?}");
    }
    let u = patch.center();
    let rotated = residual_structural_with(&patch, u, 0.01, 1e-4).unwrap();
    assert!(rotated.max() > 1e-3);
}

#[test]
fn derivative_system() {
    let patch = chen_surface(C).unwrap();
    for u in sample_points(&patch, 20, 42) {
        let r = residual_derivative_system(&patch, u).unwrap();
        assert!(r.max() < 1e-3, "{r:?}");
        assert!(r.values["u1b1_plus_u2b2"] < 1e-3);
        let [da, dmu] = frame_gradients(&patch, u, 1e-4).unwrap();
        assert!(da < 1e-6 && dmu < 1e-6);
    }
}

#[test]
fn constants_and_obstruction() {
    let patch = chen_surface(C).unwrap();
    let rep = constants_check(&patch, &VerifierConfig::default());
    assert!(rep.pass, "{:?}", rep.failures);
    assert!(rep.obstruction.abs() < 1e-10);
    assert_eq!(obstruction(-4.0, 3f64.sqrt() / 3.0).abs() < 1e-14, true);
    assert!((chen_obstruction(4.0) - 8.0).abs() < 1e-12);
    let k = ChenConstants::for_curvature(C);
    assert!((k.lambda1 - 3f64.sqrt()).abs() < 1e-15 && (k.s_eta_offdiagonal - 3f64.sqrt() / 3.0).abs() < 1e-15);
    let fs = geodesic_sphere(4.0, 0.4).unwrap();
    let rep = constants_check(&fs, &VerifierConfig::default());
    assert!(!rep.pass && (rep.obstruction - 8.0).abs() < 1e-12);
}

#[test]
fn degenerate_inputs_are_reported() {
    let rh2 = totally_geodesic_rh2(C).unwrap();
    assert!(adapted_frame(&rh2, rh2.center()).is_err());
    assert!(residual_structural(&rh2, rh2.center()).is_err());
    let sphere = geodesic_sphere(C, 0.3).unwrap();
    // Both principal pairs exist but the sphere is not Chen-like.
    let cls = classify(Subject::Surface(&sphere), &VerifierConfig::default());
    assert_ne!(cls.verdict, Verdict::ChenLike);
}

#[test]
fn classification() {
    let cfg = VerifierConfig::default();
    let chen = chen_surface(C).unwrap();
    assert_eq!(classify(Subject::Surface(&chen), &cfg).verdict, Verdict::ChenLike);
    let k = circle(C, 1.0).unwrap();
    assert_eq!(classify(Subject::Curve(&k), &cfg).verdict, Verdict::CircleLike);
    let rh2 = totally_geodesic_rh2(C).unwrap();
    assert_eq!(classify(Subject::Surface(&rh2), &cfg).verdict, Verdict::NotTerng);
    let flat = flat_lagrangian(C).unwrap();
    assert_eq!(classify(Subject::Surface(&flat), &cfg).verdict, Verdict::IsoparametricCandidate);
}

#[test]
fn reports_are_deterministic() {
    let patch = chen_surface(C).unwrap();
    let cfg = VerifierConfig::default();
    let a = serde_json::to_string(&residual_suite(&patch, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&residual_suite(&patch, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}
