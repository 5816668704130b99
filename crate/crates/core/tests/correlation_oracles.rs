mod common;

use common::*;
use multicorr::correlation::*;
use multicorr::cyclic::root_of_unity;
use multicorr::Complex64;
use nalgebra::DMatrix;
use rand::Rng;

fn random_functions<R: Rng>(r: &mut R, size: usize) -> Vec<Vec<Complex64>> {
    (0..3).map(|_| (0..size).map(|_| disc_point(r)).collect()).collect()
}

fn weighted_inner(w: &[f64], a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y.conj() * *w).sum()
}

#[test]
fn projections_resolve_the_koopman_operator() {
    let mut r = rng(1);
    for _ in 0..20 {
        let sys = FiniteSystem::random(&mut r, 8, 60);
        let m = sys.order();
        let n = sys.size();
        let proj = koopman_projections(sys.t(), sys.weights(), m).unwrap();
        let identity = DMatrix::<Complex64>::identity(n, n);
        let total = proj.iter().fold(DMatrix::zeros(n, n), |a, p| a + p);
        assert!((total - &identity).norm() < 1e-10);
        // U f = f ∘ T as a matrix: row x has a 1 in column T x.
        let u = DMatrix::from_fn(n, n, |x, y| c(if sys.t()[x] == y { 1.0 } else { 0.0 }));
        let spectral = proj.iter().enumerate().fold(DMatrix::zeros(n, n), |a, (j, p)| a + p * root_of_unity(j as i128, m));
        assert!((spectral - u).norm() < 1e-10);
        for (i, p) in proj.iter().enumerate() {
            assert!((p * p - p).norm() < 1e-10);
            for q in &proj[i + 1..] {
                assert!((p * q).norm() < 1e-10);
            }
            // Self-adjoint for the weighted inner product.
            let f: Vec<Complex64> = (0..n).map(|_| disc_point(&mut r)).collect();
            let g: Vec<Complex64> = (0..n).map(|_| disc_point(&mut r)).collect();
            let pf: Vec<Complex64> = (p * nalgebra::DVector::from_column_slice(&f)).iter().copied().collect();
            let pg: Vec<Complex64> = (p * nalgebra::DVector::from_column_slice(&g)).iter().copied().collect();
            assert!((weighted_inner(sys.weights(), &pf, &g) - weighted_inner(sys.weights(), &f, &pg)).norm() < 1e-10);
        }
    }
}

#[test]
fn bilinear_form_at_characters_is_the_correlation() {
    let mut r = rng(2);
    for _ in 0..10 {
        let sys = FiniteSystem::random(&mut r, 6, 12);
        let m = sys.order();
        let fs = random_functions(&mut r, sys.size());
        for _ in 0..5 {
            let (g1, g2) = (r.gen_range(-20i64..20), r.gen_range(-20i64..20));
            let phi = evaluation(m, g1);
            let psi = evaluation(m, g2);
            let b = bilinear_form(&sys, &fs[0], &fs[1], &fs[2], &phi, &psi).unwrap();
            let direct = correlation(&sys, &fs[0], &fs[1], &fs[2], g1, g2).unwrap();
            assert!((b - direct).norm() < 1e-10);
        }
    }
}

#[test]
fn correlations_are_periodic_in_the_order() {
    let mut r = rng(3);
    let sys = FiniteSystem::random(&mut r, 8, 60);
    let m = sys.order() as i64;
    let fs = random_functions(&mut r, sys.size());
    for (g1, g2) in [(0, 0), (1, 3), (-2, 5)] {
        let a = correlation(&sys, &fs[0], &fs[1], &fs[2], g1, g2).unwrap();
        let b = correlation(&sys, &fs[0], &fs[1], &fs[2], g1 + m, g2 - m).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn spectral_identity_on_random_systems() {
    let mut r = rng(4);
    for _ in 0..15 {
        let sys = FiniteSystem::random(&mut r, 8, 60);
        let fs = random_functions(&mut r, sys.size());
        let pair = spectral_pair(&sys, &fs[0], &fs[1], &fs[2]).unwrap();
        assert_eq!(pair.order, sys.order());
        assert!((pair.lambda_weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(identity_error(&pair, &sys, &fs[0], &fs[1], &fs[2]).unwrap() <= 1e-9);
    }
}

#[test]
fn operator_norm_matches_singular_values() {
    let mut r = rng(5);
    for _ in 0..10 {
        let sys = FiniteSystem::random(&mut r, 8, 30);
        let fs = random_functions(&mut r, sys.size());
        let pair = spectral_pair(&sys, &fs[0], &fs[1], &fs[2]).unwrap();
        let svd = pair.g_matrix.clone().svd(false, false);
        let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
        assert!((pair.operator_norm() - top).abs() <= 1e-8 * top.max(1.0));
    }
}

#[test]
fn bilinear_bound_on_random_coefficients() {
    let mut r = rng(6);
    for _ in 0..10 {
        let sys = FiniteSystem::random(&mut r, 8, 40);
        let fs = random_functions(&mut r, sys.size());
        let pair = spectral_pair(&sys, &fs[0], &fs[1], &fs[2]).unwrap();
        let m = pair.order;
        let checker = BoundChecker::new(pair, &sys, &fs[0], &fs[1], &fs[2]).unwrap();
        for _ in 0..20 {
            let a: Vec<Complex64> = (0..m).map(|_| disc_point(&mut r)).collect();
            let b: Vec<Complex64> = (0..m).map(|_| disc_point(&mut r)).collect();
            let rep = checker.check(&a, &b).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
        assert!(checker.check(&[], &[]).is_err());
    }
}

#[test]
fn indicator_correlations_pair_non_negatively_with_kernel_products() {
    let mut r = rng(7);
    for _ in 0..10 {
        let sys = FiniteSystem::random(&mut r, 8, 30);
        let ind: Vec<Complex64> = (0..sys.size()).map(|_| c(f64::from(u8::from(r.gen_bool(0.6))))).collect();
        let pair = spectral_pair(&sys, &ind, &ind, &ind).unwrap();
        let m = pair.order;
        let kernel: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..2.0)).collect();
        for _ in 0..5 {
            let pts = [0; 4].map(|_| r.gen_range(0..m));
            let outer = kernel_product_coefficients(&kernel, pts);
            let inner = kernel_product_coefficients(&kernel, [0; 4].map(|_| r.gen_range(0..m)));
            let v = kernel_pairing(&pair, &outer, &inner);
            assert!(v.re >= -1e-9 && v.im.abs() <= 1e-9, "{v}");
        }
    }
}

#[test]
fn order_budget_is_enforced() {
    // Cycle lengths 7, 8, 9, 11, 13 give order 72072 > 1000.
    let mut t = Vec::new();
    let mut start = 0;
    for len in [7usize, 8, 9, 11, 13] {
        for i in 0..len {
            t.push(start + (i + 1) % len);
        }
        start += len;
    }
    let n = t.len();
    let sys = FiniteSystem::uniform(t, (0..n).collect()).unwrap();
    let one = vec![c(1.0); n];
    assert!(spectral_pair(&sys, &one, &one, &one).is_err());
}
