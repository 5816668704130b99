mod common;

use common::*;
use multicorr::cyclic::*;
use multicorr::Complex64;
use proptest::prelude::*;

#[test]
fn dft_matches_naive_sum_on_prime_length() {
    let mut r = rng(97);
    for m in [97usize, 101, 64, 1, 2] {
        let f = bounded_signal(&mut r, m);
        let fast = dft(&f);
        let slow = naive_dft(f.values());
        let err = fast.coefficients().iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "M={m}: {err}");
    }
}

#[test]
fn convolution_matches_direct_average() {
    let mut r = rng(5);
    let m = 53;
    let f = bounded_signal(&mut r, m);
    let g = bounded_signal(&mut r, m);
    let h = convolve(&f, &g).unwrap();
    for n in 0..m as i64 {
        let direct: Complex64 = (0..m as i64).map(|k| f.at(n - k) * g.at(k)).sum::<Complex64>() / m as f64;
        assert!((h.at(n) - direct).norm() < 1e-12);
    }
}

#[test]
fn convolution_multiplies_spectra() {
    let mut r = rng(6);
    let f = bounded_signal(&mut r, 31);
    let g = bounded_signal(&mut r, 31);
    let h = dft(&convolve(&f, &g).unwrap());
    let (ff, gg) = (dft(&f), dft(&g));
    for xi in 0..31 {
        assert!((h.coefficients()[xi] - ff.coefficients()[xi] * gg.coefficients()[xi]).norm() < 1e-13);
    }
}

#[test]
fn modulus_examples() {
    assert_eq!(choose_modulus(1, 1).unwrap(), 11);
    assert_eq!(choose_modulus(2, 1).unwrap(), 23);
    assert_eq!(choose_modulus(10, 7).unwrap(), 701);
    assert_eq!(choose_modulus(50, 4).unwrap(), 2003);
    assert!(choose_modulus(u64::MAX / 2, 7).is_err());
}

fn signal_strategy() -> impl Strategy<Value = CyclicSignal> {
    (1usize..80).prop_flat_map(|m| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m)
            .prop_map(|v| CyclicSignal::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn inverse_undoes_forward(f in signal_strategy()) {
        let back = inverse_dft(&dft(&f));
        prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-10);
    }

    #[test]
    fn parseval(f in signal_strategy()) {
        let e = f.energy();
        prop_assert!((dft(&f).energy() - e).abs() <= 1e-9 * e.max(1e-300));
    }

    #[test]
    fn convolution_commutes(seed in any::<u64>(), m in 1usize..60) {
        let mut r = rng(seed);
        let f = bounded_signal(&mut r, m);
        let g = bounded_signal(&mut r, m);
        prop_assert!(convolve(&f, &g).unwrap().max_abs_diff(&convolve(&g, &f).unwrap()).unwrap() < 1e-12);
    }
}
