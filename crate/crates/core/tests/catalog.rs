use isoparam::ambient::an::coframe;
use isoparam::catalog::*;
use isoparam::jacobi;
use isoparam::submanifold::*;
use isoparam::verifier::sample_points;
use nalgebra::Vector4;

const C: f64 = -4.0;

#[test]
fn chen_frame_and_mean_curvature_at_origin() {
    let spec = ChenSurfaceSpec::new(C).unwrap();
    assert!((spec.u1.j().dot(&spec.u2) - 1.0 / 3.0).abs() < 1e-15);
    let patch = chen_surface(C).unwrap();
    let p = patch.at([0.0, 0.0]).unwrap();
    let h = p.mean_curvature();
    let cf = coframe(2.0, &p.x);
    let hf: Vec<f64> = (0..4).map(|i| (0..4).map(|j| cf[i][j] * h[j]).sum()).collect();
    let k = (-C).sqrt() / 3.0;
    let expected = [k, 0.0, -k * 2f64.sqrt(), 0.0];
    for i in 0..4 {
        assert!((hf[i] - expected[i]).abs() < 1e-8, "{hf:?}");
    }
}

#[test]
fn chen_curvature_is_homogeneous() {
    let patch = chen_surface(C).unwrap();
    for u in sample_points(&patch, 5, 1) {
        assert!((gaussian_curvature(&patch, u).unwrap() - C / 6.0).abs() < 1e-4);
    }
}

#[test]
fn totally_geodesic_plane() {
    let patch = totally_geodesic_rh2(C).unwrap();
    for u in sample_points(&patch, 10, 2) {
        let p = patch.at(u).unwrap();
        for row in p.ii_orthonormal() {
            for v in row {
                assert!(p.local.norm(&v) < 1e-6);
            }
        }
        assert!((p.kaehler_angle() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((p.oriented_normal_curvature() - C / 4.0).abs() < 1e-6);
    }
}

#[test]
fn circles() {
    let k = circle(C, 1.0).unwrap();
    for i in k.interior().step_by(50) {
        assert!((k.geodesic_curvature(i).unwrap() - 1.0).abs() < 1e-6);
    }
    let g = circle(C, 0.0).unwrap();
    for i in g.interior().step_by(50) {
        assert!(g.geodesic_curvature(i).unwrap().abs() < 1e-6);
    }
    // κ = 0 reproduces the geodesic through the same initial data.
    let space = isoparam::ambient::SpaceForm::an(C).unwrap();
    let spec = CircleSpec::default_for(&space, 0.0).unwrap();
    let o = space.origin();
    let v = isoparam::ambient::AmbientTangent::new(o, spec.tangent);
    let ds = (spec.length / (g.points.len() - 1) as f64).abs();
    let t = ds * (g.points.len() - 1) as f64;
    let (end, _) = isoparam::ambient::geodesic(&space, &o, &v, t).unwrap();
    let last = g.points.last().unwrap();
    assert!((Vector4::from(end.0) - Vector4::from(*last)).norm() < 1e-8);
    let fs = circle(4.0, 1.0).unwrap();
    assert!((fs.geodesic_curvature(fs.interior().start + 10).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn geodesic_spheres() {
    for (c, r) in [(C, 0.3), (4.0, 0.4)] {
        let patch = geodesic_sphere(c, r).unwrap();
        let oracle = jacobi::sphere_principal_curvatures_ode(c, r).unwrap();
        let mut oracle = oracle;
        oracle.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for u in sample_points(&patch, 50, 3) {
            let p = patch.at(u).unwrap();
            let nu = sphere_outward_normal(&patch, u).unwrap();
            let l = isoparam::numerics::sym_eigen2(&p.shape_operator(&nu).unwrap()).0;
            for i in 0..2 {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(l[i]);
                assert!((l[i] - oracle[i]).abs() < 1e-4, "{l:?} vs {oracle:?}");
            }
        }
        assert!(hi[0] - lo[0] < 1e-4 && hi[1] - lo[1] < 1e-4);
    }
}

#[test]
fn small_spheres_blow_up_like_the_inverse_radius() {
    let rs = [0.02, 0.01, 0.005];
    for r in rs {
        let patch = geodesic_sphere(C, r).unwrap();
        let u = patch.center();
        let p = patch.at(u).unwrap();
        let nu = sphere_outward_normal(&patch, u).unwrap();
        let l = isoparam::numerics::sym_eigen2(&p.shape_operator(&nu).unwrap()).0;
        let tr = (l[0] + l[1]) * r;
        assert!((tr + 2.0).abs() < 0.01, "r = {r}: r·(λ1+λ2) = {tr}");
        for li in l {
            assert!((li * r + 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn catalog_rejects_bad_curvature() {
    assert!(chen_surface(4.0).is_err());
    assert!(totally_geodesic_rh2(0.0).is_err());
    assert!(geodesic_sphere(4.0, 2.0).is_err());
    assert!(circle(0.0, 1.0).is_err());
}
