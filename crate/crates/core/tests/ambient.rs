use isoparam::ambient::*;
use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C: f64 = -4.0;
const S: f64 = 2.0;

fn l(v: [f64; 4]) -> LeftInvariantVector {
    LeftInvariantVector(v)
}

const B: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
const V: [f64; 4] = [0.0, 1.0, 0.0, 0.0];
const JV: [f64; 4] = [0.0, 0.0, 1.0, 0.0];
const Z: [f64; 4] = [0.0, 0.0, 0.0, 1.0];

fn close(a: &LeftInvariantVector, b: [f64; 4], tol: f64) {
    let d = (a.clone() - l(b)).max_abs();
    assert!(d <= tol, "{a:?} vs {b:?}");
}

#[test]
fn frame_inner_products_at_identity() {
    assert_eq!(l(B).dot(&l(B)), 1.0);
    assert_eq!(l(B).dot(&l(Z)), 0.0);
    let space = SpaceForm::an(C).unwrap();
    let o = space.origin();
    let b = AmbientTangent::from_frame(&space, o, B).unwrap();
    let z = AmbientTangent::from_frame(&space, o, Z).unwrap();
    assert!((metric(&space, &b, &b).unwrap() - 1.0).abs() < 1e-14);
    assert!(metric(&space, &b, &z).unwrap().abs() < 1e-14);
}

#[test]
fn complex_structure_is_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for space in [SpaceForm::an(C).unwrap(), SpaceForm::ball(C).unwrap(), SpaceForm::fubini(4.0).unwrap()] {
        for _ in 0..20 {
            let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
            let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let t = AmbientTangent::new(AmbientPoint(x), v);
            let jt = complex_structure(&space, &t).unwrap();
            let a = metric(&space, &t, &t).unwrap();
            let b = metric(&space, &jt, &jt).unwrap();
            assert!((a - b).abs() < 1e-10 * a.max(1.0));
            let jjt = complex_structure(&space, &jt).unwrap();
            assert!((jjt.vector() + t.vector()).norm() < 1e-10 * t.vector().norm().max(1.0));
        }
    }
}

#[test]
fn j_on_the_algebra() {
    close(&l(B).j(), Z, 0.0);
    close(&l(V).j().j(), [0.0, -1.0, 0.0, 0.0], 0.0);
}

#[test]
fn parallel_transport_commutes_with_j() {
    let space = SpaceForm::an(C).unwrap();
    let p = AmbientPoint([0.1, -0.2, 0.05, 0.1]);
    let local = LocalGeometry::at(&space, &p.0).unwrap();
    let dir = Vector4::new(0.3, 0.5, -0.2, 0.4);
    let dir = dir / local.norm(&dir);
    let x = Vector4::new(0.2, -0.7, 0.1, 0.5);
    let jx = local.j(&x);
    let st = geodesic_with_transport(&space, &p, &dir, 0.4, &[x, jx]).unwrap();
    let end = LocalGeometry::at(&space, &st.point).unwrap();
    let err = (end.j(&st.transported[0]) - st.transported[1]).norm();
    assert!(err < 1e-6, "{err}");
}

#[test]
fn connection_values() {
    close(&connection_an(C, &l(V), &l(B)).unwrap(), [0.0, -S / 2.0, 0.0, 0.0], 1e-15);
    close(&connection_an(C, &l(B), &l(B)).unwrap(), [0.0; 4], 0.0);
    close(&connection_an(C, &l(Z), &l(Z)).unwrap(), [S, 0.0, 0.0, 0.0], 1e-15);
}

#[test]
fn bracket_values() {
    close(&lie_bracket_an(C, &l(B), &l(V)).unwrap(), [0.0, S / 2.0, 0.0, 0.0], 1e-15);
    close(&lie_bracket_an(C, &l(V), &l(JV)).unwrap(), [0.0, 0.0, 0.0, S], 1e-15);
    close(&lie_bracket_an(C, &l(Z), &l(V)).unwrap(), [0.0; 4], 1e-15);
    let at = [0.3, 0.2, -0.1, 0.15];
    for (x, y) in [(B, V), (V, JV), (Z, V), (B, Z)] {
        let lb = lie_bracket_an(C, &l(x), &l(y)).unwrap();
        let cb = coordinate_bracket(C, &l(x), &l(y), &at).unwrap();
        close(&lb, cb.0, 1e-10);
    }
}

#[test]
fn curvature_tensor_values() {
    let r = curvature_an(C, &l(B), &l(V), &l(JV)).unwrap();
    assert!((r.dot(&l(Z)) - C / 4.0).abs() < 1e-14);
    let x = l([0.6, 0.0, 0.8, 0.0]);
    let hol = curvature_an(C, &x, &x.j(), &x.j()).unwrap().dot(&x);
    assert!((hol - C).abs() < 1e-14);
    let y = l(V);
    let tr = curvature_an(C, &l(B), &y, &y).unwrap().dot(&l(B));
    assert!((tr - C / 4.0).abs() < 1e-14);
}

#[test]
fn christoffel_symbols() {
    let ball = SpaceForm::ball(C).unwrap();
    let g0 = christoffels_numeric(&ball, &ball.origin()).unwrap();
    assert!(g0.gamma.iter().flatten().flatten().all(|v| *v == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for space in [SpaceForm::an(C).unwrap(), ball, SpaceForm::fubini(4.0).unwrap()] {
        for _ in 0..20 {
            let p = AmbientPoint(std::array::from_fn(|_| rng.gen_range(-0.3..0.3)));
            let g = christoffels_numeric(&space, &p).unwrap();
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        assert_eq!(g.gamma[k][i][j], g.gamma[k][j][i]);
                    }
                }
            }
            assert!(g.compatibility_residual < 1e-7);
        }
    }
}

#[test]
fn geodesics_conserve_speed() {
    let space = SpaceForm::an(C).unwrap();
    let p = AmbientPoint([0.1, 0.2, -0.1, 0.3]);
    let v = AmbientTangent::new(p, [0.4, -0.3, 0.2, 0.1]);
    let (q0, v0) = geodesic(&space, &p, &v, 0.0).unwrap();
    assert_eq!(q0, p);
    assert_eq!(v0.components, v.components);
    let speed0 = metric(&space, &v, &v).unwrap().sqrt();
    for t in [0.25, 0.5, 1.0] {
        let (_, vt) = geodesic(&space, &p, &v, t).unwrap();
        let st = metric(&space, &vt, &vt).unwrap().sqrt();
        assert!((st - speed0).abs() < 1e-8);
    }
    let o = space.origin();
    let b = AmbientTangent::from_frame(&space, o, B).unwrap();
    let (q, _) = geodesic(&space, &o, &b, 0.7).unwrap();
    assert!(q.0[1].abs() < 1e-14 && q.0[2].abs() < 1e-14 && q.0[3].abs() < 1e-14);
}

#[test]
fn transport_is_isometric_and_has_holonomy() {
    let space = SpaceForm::ball(C).unwrap();
    let p = [0.05, 0.02, -0.03, 0.01];
    let x = AmbientTangent::new(AmbientPoint(p), [0.3, -0.2, 0.5, 0.1]);
    let constant = SampledCurve::new(vec![p; 5]);
    assert_eq!(parallel_transport(&space, &constant, &x).unwrap().components, x.components);

    let h = 0.04;
    let corners = [p, [p[0] + h, p[1], p[2], p[3]], [p[0] + h, p[1] + h, p[2], p[3]], [p[0], p[1] + h, p[2], p[3]], p];
    let mut pts = Vec::new();
    for w in corners.windows(2) {
        for k in 0..200 {
            let t = k as f64 / 200.0;
            pts.push(std::array::from_fn(|i| w[0][i] + t * (w[1][i] - w[0][i])));
        }
    }
    pts.push(p);
    let back = parallel_transport(&space, &SampledCurve::new(pts), &x).unwrap();
    let n0 = metric(&space, &x, &x).unwrap();
    let n1 = metric(&space, &back, &back).unwrap();
    assert!((n0 - n1).abs() < 1e-8);
    let dev = (back.vector() - x.vector()).norm();
    assert!(dev > 1e-5, "holonomy {dev}");
    assert!(dev < 10.0 * h * h * C.abs(), "holonomy {dev}");
}

#[test]
fn numeric_curvature_agrees_and_satisfies_bianchi() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let space = SpaceForm::ball(C).unwrap();
    for _ in 0..50 {
        let b = AmbientPoint(std::array::from_fn(|_| rng.gen_range(-0.3..0.3)));
        let mk = |rng: &mut ChaCha8Rng| AmbientTangent::new(b, std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let (x, y, z) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
        let rn = curvature_numeric(&space, &x, &y, &z).unwrap().vector();
        let rc = curvature_closed_form(&space, &x, &y, &z).unwrap().vector();
        assert!((rn - rc).norm() < 1e-5 * rc.norm().max(1.0));
        let swap = curvature_numeric(&space, &y, &x, &z).unwrap().vector();
        assert!((rn + swap).norm() < 1e-12);
        let b1 = rn
            + curvature_numeric(&space, &y, &z, &x).unwrap().vector()
            + curvature_numeric(&space, &z, &x, &y).unwrap().vector();
        assert!(b1.norm() < 1e-6);
    }
}

#[test]
fn invalid_inputs() {
    assert!(SpaceForm::an(4.0).is_err());
    assert!(SpaceForm::fubini(-4.0).is_err());
    assert!(SpaceForm::ball(0.0).is_err());
    let ball = SpaceForm::ball(C).unwrap();
    assert!(ball.check_point(&[1.0, 0.0, 0.0, 0.0]).is_err());
}
