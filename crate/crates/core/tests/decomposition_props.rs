mod common;

use common::*;
use multicorr::cyclic::{choose_modulus, convolve, CyclicSignal};
use multicorr::decomposition::*;
use multicorr::gowers::gowers_u2_fourier;
use multicorr::multiplicative::MultiplicativeFunction;
use multicorr::Complex64;
use proptest::prelude::*;

fn params(q: u64, k1: u64, w1: u64, k2: u64, w2: u64) -> DecompositionParams {
    DecompositionParams { q, k1, w1, k2, w2 }
}

#[test]
fn kernel_examples() {
    let f1 = fejer_kernel(13, 1).unwrap();
    assert!(f1.signal().values().iter().all(|v| (v - c(1.0)).norm() < 1e-12));
    let f2 = fejer_kernel(5, 2).unwrap();
    for n in 0..5 {
        let expect = 1.0 + (std::f64::consts::TAU * n as f64 / 5.0).cos();
        assert!((f2.signal().values()[n].re - expect).abs() < 1e-12);
    }
    let a = progression_kernel(11, 3, 4).unwrap();
    for n in 0..11 {
        let expect = if [0, 3, 6, 9].contains(&n) { 11.0 / 4.0 } else { 0.0 };
        assert!((a.signal().values()[n].re - expect).abs() < 1e-12);
    }
    let point = progression_kernel(7, 2, 1).unwrap();
    assert!((point.signal().values()[0].re - 7.0).abs() < 1e-12);
    let full = progression_kernel(7, 1, 7).unwrap();
    assert!(full.signal().values().iter().all(|v| (v.re - 1.0).abs() < 1e-12));
    assert!(fejer_kernel(7, 0).is_err());
    assert!(fejer_kernel(7, 8).is_err());
    assert!(progression_kernel(7, 1, 8).is_err());
    assert!(progression_kernel(8, 1, 2).is_err());
    assert!(Kernel::from_values(&[1.0, 1.0, -0.5]).is_err());
    assert!(Kernel::from_values(&[2.0, 0.0, 0.0]).is_err());
}

#[test]
fn fejer_mean_is_one() {
    for w in [1, 2, 7, 50, 101] {
        let k = fejer_kernel(101, w).unwrap();
        assert!((k.signal().mean().re - 1.0).abs() < 1e-12);
        assert!(k.signal().values().iter().all(|v| v.re >= 0.0));
    }
}

#[test]
fn liouville_reconstruction_with_two_kernels() {
    let m = choose_modulus(50, 4).unwrap();
    assert_eq!(m, 2003);
    let lambda = MultiplicativeFunction::liouville();
    let dec = decompose(&lambda, 50, m, params(4, 10, 10, 40, 40)).unwrap();
    let chi = lambda.truncation(50, m).unwrap();
    assert!(dec.reconstruct().max_abs_diff(&chi).unwrap() < 1e-12);
    let diag = diagnostics(&dec, 3).unwrap();
    assert!(diag.sup_st <= 1.0 + 1e-12 && diag.sup_un <= 2.0 + 1e-12 && diag.sup_er <= 2.0 + 1e-12);
    assert!(diag.lipschitz_q <= 2.0 / 10.0 + 1e-10);
    assert!(diag.l1_er > 0.0);
    assert!(diag.u3_un.is_some());
}

#[test]
fn constant_one_mean_is_preserved() {
    let m = 101u64;
    let one = MultiplicativeFunction::one();
    let dec = decompose(&one, m - 1, m, DecompositionParams::defaults(m)).unwrap();
    assert!((dec.st.mean().re - (m - 1) as f64 / m as f64).abs() < 1e-12);
    let rest = dec.un.add(&dec.er).unwrap();
    let chi = one.truncation(m - 1, m).unwrap();
    assert!(rest.max_abs_diff(&chi.sub(&dec.st).unwrap()).unwrap() < 1e-12);
}

#[test]
fn equal_kernels_leave_no_error() {
    let m = 211;
    let dec = decompose(&MultiplicativeFunction::random(3), 20, m, params(2, 5, 6, 5, 6)).unwrap();
    assert_eq!(diagnostics(&dec, 2).unwrap().l1_er, 0.0);
}

#[test]
fn parameter_validation() {
    let chi = MultiplicativeFunction::one();
    assert!(decompose(&chi, 10, 101, params(1, 5, 5, 4, 5)).is_err());
    assert!(decompose(&chi, 10, 101, params(1, 5, 5, 5, 4)).is_err());
    assert!(decompose(&chi, 10, 101, params(10, 11, 5, 11, 5)).is_err());
    assert!(decompose(&chi, 10, 101, params(0, 1, 1, 1, 1)).is_err());
    assert!(decompose(&chi, 10, 100, params(1, 1, 1, 1, 1)).is_err());
    assert!(decompose(&chi, 200, 101, params(1, 1, 1, 1, 1)).is_err());
}

/// Growing `K2` and `W2` together pushes the uniform part of χ ≡ 1 down. The
/// Fejér width alone does the same; the progression length alone does not,
/// because a longer progression average is a wider kernel.
#[test]
fn u2_of_uniform_part_along_grid() {
    let n = 200;
    let m = choose_modulus(n, 4).unwrap();
    let one = MultiplicativeFunction::one();
    let grid = [10u64, 20, 40];
    let mut table = [[0.0f64; 3]; 3];
    for (i, &k2) in grid.iter().enumerate() {
        for (j, &w2) in grid.iter().enumerate() {
            let dec = decompose(&one, n, m, params(1, 10, 10, k2, w2)).unwrap();
            table[i][j] = gowers_u2_fourier(&dec.un);
        }
    }
    for i in 0..2 {
        assert!(table[i + 1][i + 1] < table[i][i], "diagonal: {table:?}");
        for j in 0..3 {
            assert!(table[j][i + 1] < table[j][i], "W2 step: {table:?}");
            assert!(table[i + 1][j] >= table[i][j], "K2 step: {table:?}");
        }
    }
}

#[test]
fn empirical_mass_averages_samples() {
    let m = 211;
    let p = params(1, 3, 3, 9, 9);
    let sample = [MultiplicativeFunction::one(), MultiplicativeFunction::liouville()];
    let avg = empirical_l1_mass(&sample, 20, m, p).unwrap();
    let each: Vec<f64> = sample.iter().map(|chi| diagnostics(&decompose(chi, 20, m, p).unwrap(), 2).unwrap().l1_er).collect();
    assert!((avg - (each[0] + each[1]) / 2.0).abs() < 1e-15);
    assert!(empirical_l1_mass(&[], 20, m, p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let m = 127;
        let p = params(3, 4, 5, 8, 9);
        let mut r = rng(seed);
        let f = bounded_signal(&mut r, m);
        let g = bounded_signal(&mut r, m);
        let (ca, cb) = (Complex64::new(a, 0.5), Complex64::new(b, -0.25));
        let df = decompose_signal(&f, p).unwrap();
        let dg = decompose_signal(&g, p).unwrap();
        let (st, un, er) = combine(&[(ca, &df), (cb, &dg)]).unwrap();
        let mix = f.scale(ca).add(&g.scale(cb)).unwrap();
        let dm = decompose_signal(&mix, p).unwrap();
        prop_assert!(dm.st.max_abs_diff(&st).unwrap() < 1e-10);
        prop_assert!(dm.un.max_abs_diff(&un).unwrap() < 1e-10);
        prop_assert!(dm.er.max_abs_diff(&er).unwrap() < 1e-10);
    }

    #[test]
    fn positivity_transfers(seed in any::<u64>()) {
        let m = 131;
        let mut r = rng(seed);
        let f = CyclicSignal::from_real(&(0..m).map(|_| rand::Rng::gen::<f64>(&mut r)).collect::<Vec<_>>()).unwrap();
        let dec = decompose_signal(&f, params(2, 3, 4, 6, 8)).unwrap();
        let smooth = dec.st.add(&dec.er).unwrap();
        prop_assert!(dec.st.values().iter().all(|v| v.re >= -1e-12 && v.im.abs() < 1e-12));
        prop_assert!(smooth.values().iter().all(|v| v.re >= -1e-12));
    }

    #[test]
    fn lipschitz_bound_for_unimodular_truncations(seed in any::<u64>(), q in 1u64..6, k1 in 1u64..30, extra in 0u64..20) {
        let m = 307;
        let chi = MultiplicativeFunction::random(seed);
        let dec = decompose(&chi, 60, m, params(q, k1, 7, k1 + extra, 7 + extra)).unwrap();
        let d = diagnostics(&dec, 2).unwrap();
        prop_assert!(d.lipschitz_q <= 2.0 / k1 as f64 + 1e-10);
        prop_assert!(d.sup_st <= 1.0 + 1e-12);
        prop_assert!(dec.reconstruct().max_abs_diff(&chi.truncation(60, m).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn structured_part_is_a_convolution(seed in any::<u64>()) {
        let m = 97;
        let p = params(1, 4, 4, 6, 6);
        let mut r = rng(seed);
        let f = bounded_signal(&mut r, m);
        let psi = progression_kernel(m as u64, 1, 4).unwrap().compose(&fejer_kernel(m as u64, 4).unwrap()).unwrap();
        let expect = convolve(&f, psi.signal()).unwrap();
        prop_assert!(decompose_signal(&f, p).unwrap().st.max_abs_diff(&expect).unwrap() < 1e-12);
    }
}
