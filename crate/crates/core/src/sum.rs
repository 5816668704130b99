//! Pairwise summation. Results depend only on the input order, never on
//! how the inputs were produced, so parallel map + ordered collect + this
//! reduction is reproducible across thread counts.

use num_complex::Complex64;

const BLOCK: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum_complex(a) + pairwise_sum_complex(b)
    }
}

pub fn mean_complex(xs: &[Complex64]) -> Complex64 {
    pairwise_sum_complex(xs) / xs.len() as f64
}
