//! Small numerical helpers shared by the geometry modules.

use nalgebra::{DMatrix, DVector, Matrix2};

/// Least-squares polynomial fit; returns coefficients in increasing degree.
/// The abscissae are rescaled to `[-1, 1]` internally for conditioning.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() > degree, "not enough samples for the requested degree");
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let half = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE);
    let n = degree + 1;
    let a = DMatrix::from_fn(xs.len(), n, |i, j| ((xs[i] - mid) / half).powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let u = svd.solve(&b, 1e-14).expect("SVD solve");
    // Expand p(u) with u = (x - mid)/half back to powers of x.
    let mut out = vec![0.0; n];
    // binomial expansion of ((x - mid)/half)^j
    for (j, uj) in u.iter().enumerate() {
        let scale = uj / half.powi(j as i32);
        let mut binom = 1.0;
        for k in 0..=j {
            out[k] += scale * binom * (-mid).powi((j - k) as i32);
            binom = binom * (j - k) as f64 / (k + 1) as f64;
        }
    }
    out
}

/// Eigen-decomposition of a symmetric 2×2 matrix: eigenvalues in
/// decreasing order and the matching unit eigenvectors (columns).
pub fn sym_eigen2(m: &Matrix2<f64>) -> ([f64; 2], Matrix2<f64>) {
    let a = m[(0, 0)];
    let d = m[(1, 1)];
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
    let l1 = mean + rad;
    let l2 = mean - rad;
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (c, s) = (theta.cos(), theta.sin());
    (
        [l1, l2],
        Matrix2::new(c, -s, s, c),
    )
}

/// Bisection on a bracket with a sign change, to absolute width `tol`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv * (hi - lo);
    let mut x2 = lo + inv * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyfit_recovers_a_cubic() {
        let xs: Vec<f64> = (0..40).map(|i| 0.1 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x + 3.0 * x * x * x).collect();
        let p = polyfit(&xs, &ys, 3);
        for (a, b) in p.iter().zip([1.0, -2.0, 0.5, 3.0]) {
            assert!((a - b).abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn eigen2_reconstructs() {
        let m = Matrix2::new(1.0, 0.3, 0.3, -2.0);
        let (l, v) = sym_eigen2(&m);
        let back = v * Matrix2::new(l[0], 0.0, 0.0, l[1]) * v.transpose();
        assert!((back - m).norm() < 1e-14);
        assert!(l[0] >= l[1]);
    }

    #[test]
    fn root_and_minimum() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
        let m = golden_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 1e-9);
        assert!((m - 0.3).abs() < 1e-8);
    }
}
