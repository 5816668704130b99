mod common;

use common::*;
use multicorr::arith::is_prime;
use multicorr::multiplicative::*;
use multicorr::subset::SubsetMask;
use num_rational::Ratio;
use proptest::prelude::*;

fn catalogue() -> Vec<MultiplicativeFunction> {
    vec![
        MultiplicativeFunction::one(),
        MultiplicativeFunction::liouville(),
        MultiplicativeFunction::random(7),
        MultiplicativeFunction::character(7, 1).unwrap(),
        MultiplicativeFunction::character(9, 2).unwrap(),
        "2:0.5,3:0.25,11:0.125".parse().unwrap(),
    ]
}

proptest! {
    #[test]
    fn complete_multiplicativity(m in 1u64..5000, n in 1u64..5000) {
        for chi in catalogue() {
            let lhs = chi.evaluate(m * n).unwrap();
            let rhs = chi.evaluate(m).unwrap() * chi.evaluate(n).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12, "{}: {m}·{n}", chi.label());
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_is_reproducible(seed in any::<u64>(), n in 1u64..10_000) {
        let a = MultiplicativeFunction::random(seed).evaluate(n).unwrap();
        let b = MultiplicativeFunction::random(seed).evaluate(n).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn characters_are_periodic_on_units() {
    let chi = MultiplicativeFunction::character(13, 5).unwrap();
    for n in 1..200u64 {
        if n % 13 != 0 {
            assert!((chi.evaluate(n).unwrap() - chi.evaluate(n + 13).unwrap()).norm() < 1e-12);
        }
    }
    // Orthogonality: Σ_{n mod q} χ(n) over units vanishes for non-principal χ.
    let s: multicorr::Complex64 = (1..13u64).map(|n| chi.evaluate(n).unwrap()).sum();
    assert!(s.norm() < 1e-12);
    assert!(MultiplicativeFunction::character(8, 1).is_err());
}

#[test]
fn liouville_against_prime_factor_count() {
    let lambda = MultiplicativeFunction::liouville();
    for n in 1..3000u64 {
        let mut omega = 0;
        let mut m = n;
        let mut p = 2;
        while m > 1 {
            while m % p == 0 {
                m /= p;
                omega += 1;
            }
            p += 1;
        }
        let expect = if omega % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(lambda.evaluate(n).unwrap(), c(expect), "n={n}");
    }
}

#[test]
fn parsing_round_trip() {
    assert_eq!("random(9)".parse::<MultiplicativeFunction>().unwrap().label(), "random(9)");
    assert_eq!("character(5, 1)".parse::<MultiplicativeFunction>().unwrap().label(), "character(5,1)");
    for bad in ["", "zeta", "4:0.5", "2:x", "random(a)", "character(5)"] {
        assert!(bad.parse::<MultiplicativeFunction>().is_err(), "{bad:?}");
    }
    let f: MultiplicativeFunction = "2:0.5".parse().unwrap();
    assert_eq!(f.evaluate(2).unwrap().re, -1.0);
    assert_eq!(f.evaluate(3).unwrap(), c(1.0));
}

#[test]
fn folner_boxes() {
    let spec = FolnerSpec::new(vec![2, 3], 2).unwrap();
    assert_eq!(folner_set(&spec).unwrap(), vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
    assert_eq!(spec.size(), Some(9));
    assert!(FolnerSpec::new(vec![2, 4], 2).is_err());
    let first = FolnerSpec::first_primes(3, 1);
    assert!(first.primes.iter().all(|&p| is_prime(p)));
    assert!(folner_set(&FolnerSpec::first_primes(12, 4)).is_err());
    assert!(folner_set(&FolnerSpec::new(vec![2], 70).unwrap()).is_err());
}

#[test]
fn defect_shrinks_along_growing_boxes() {
    let mut last = f64::INFINITY;
    for e in [2u32, 4, 8, 12] {
        let set = folner_set(&FolnerSpec::new(vec![2, 3, 5], e).unwrap()).unwrap();
        let d = folner_defect(&set, Ratio::new(2, 3)).unwrap();
        // Exactly the boundary layers in the 2- and 3-directions fail.
        let k = f64::from(e) + 1.0;
        assert!((d - 2.0 * (2.0 * k - 1.0) / (k * k)).abs() < 1e-12, "e={e}: {d}");
        assert!(d < last);
        last = d;
    }
}

#[test]
fn density_of_multiples() {
    let specs: Vec<FolnerSpec> = (1..=6).map(|e| FolnerSpec::new(vec![2, 3, 5], e).unwrap()).collect();
    let check = |est: &DensityEstimates| {
        for (s, e) in est.stages.iter().zip(1..) {
            assert!((s.estimate - f64::from(e) / f64::from(e + 1)).abs() < 1e-12);
            assert_eq!(s.size, ((e + 1) * (e + 1) * (e + 1)) as usize);
        }
    };
    // 30^4 fits under 10^6, 30^5 does not.
    let evens = SubsetMask::multiples(2, 1_000_000).unwrap();
    check(&mult_density_estimate(&evens, &specs[..4]).unwrap());
    assert!(mult_density_estimate(&evens, &specs[..5]).is_err());
    check(&mult_density_estimate(&Predicate(|n: u64| n % 2 == 0), &specs).unwrap());
}
