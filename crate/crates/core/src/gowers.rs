//! Gowers uniformity norms on Z/M and the four-term linear-forms average.
//!
//! Three independent routes are provided: the defining average over
//! parallelepipeds, the derivative recursion, and the U² Fourier identity
//! `‖f‖_{U²}⁴ = Σ_ξ |f̂(ξ)|⁴`. They are cross-checked in the tests.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclic::{check_moduli, dft, CyclicSignal};
use crate::error::{invalid, Error, Result};
use crate::sum::{pairwise_sum, pairwise_sum_complex};

/// Averages in `[-1e-12, 0)` are rounding noise and get clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// Work limit `M^{d+1}` for the defining-formula route.
pub const DIRECT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Recursive,
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GowersReport {
    pub norm_u2: f64,
    pub norm_u3: f64,
    pub method: Method,
}

fn root_of_average(avg: f64, d: u32) -> Result<f64> {
    if avg < -NEGATIVE_CLAMP {
        return Err(Error::NegativeAverage(avg));
    }
    Ok(avg.max(0.0).powf(1.0 / f64::from(1u32 << d)))
}

/// `‖f‖_{U^d}` straight from the definition, `d ∈ {1,2,3}`.
pub fn gowers_norm_direct(f: &CyclicSignal, d: u32) -> Result<f64> {
    if !(1..=3).contains(&d) {
        return Err(invalid(format!("direct Gowers norm supports d in 1..=3, got {d}")));
    }
    let m = f.modulus();
    let work = (m as u128).pow(d + 1);
    if work > DIRECT_BUDGET {
        return Err(Error::BudgetExceeded { what: "direct Gowers average", size: work, limit: DIRECT_BUDGET });
    }
    let vals = f.values();
    let conj: Vec<Complex64> = vals.iter().map(|z| z.conj()).collect();
    let corners = 1usize << d;
    let h_count = m.pow(d);

    // Per-x partial sums, reduced in x order afterwards.
    let per_x: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut h = vec![0usize; d as usize];
            for flat in 0..h_count {
                let mut rest = flat;
                for slot in h.iter_mut() {
                    *slot = rest % m;
                    rest /= m;
                }
                let mut prod = Complex64::new(1.0, 0.0);
                for omega in 0..corners {
                    let mut pos = x;
                    for (i, &hi) in h.iter().enumerate() {
                        if omega >> i & 1 == 1 {
                            pos += hi;
                        }
                    }
                    let pos = pos % m;
                    prod *= if omega.count_ones() % 2 == 1 { conj[pos] } else { vals[pos] };
                }
                acc += prod;
            }
            acc
        })
        .collect();
    let avg = pairwise_sum_complex(&per_x) / (m as f64 * h_count as f64);
    root_of_average(avg.re, d)
}

/// `‖f‖_{U²}` via the fourth moment of the spectrum.
pub fn gowers_u2_fourier(f: &CyclicSignal) -> f64 {
    dft(f).fourth_moment().max(0.0).powf(0.25)
}

/// `‖f‖_{U^d}^{2^d}` by the recursion `E_h ‖Δ_h f‖_{U^{d−1}}^{2^{d−1}}`,
/// bottoming out at `|E f|²` (d = 1) and the Fourier identity (d = 2).
fn gowers_power(f: &CyclicSignal, d: u32) -> f64 {
    match d {
        1 => f.mean().norm_sqr(),
        2 => dft(f).fourth_moment(),
        _ => {
            let m = f.modulus() as i64;
            let per_h: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|h| gowers_power(&f.derivative(h), d - 1))
                .collect();
            pairwise_sum(&per_h) / m as f64
        }
    }
}

/// `‖f‖_{U^d}` by the multiplicative-derivative recursion, `d ∈ 1..=4`.
pub fn gowers_norm_recursive(f: &CyclicSignal, d: u32) -> Result<f64> {
    if !(1..=4).contains(&d) {
        return Err(invalid(format!("recursive Gowers norm supports d in 1..=4, got {d}")));
    }
    root_of_average(gowers_power(f, d), d)
}

pub fn gowers_report(f: &CyclicSignal, method: Method) -> Result<GowersReport> {
    let (norm_u2, norm_u3) = match method {
        Method::Direct => (gowers_norm_direct(f, 2)?, gowers_norm_direct(f, 3)?),
        Method::Recursive => (gowers_norm_recursive(f, 2)?, gowers_norm_recursive(f, 3)?),
        Method::Fourier => (gowers_u2_fourier(f), gowers_norm_recursive(f, 3)?),
    };
    Ok(GowersReport { norm_u2, norm_u3, method })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParts {
    /// `(|value| − 2/Ñ) / min_u3_root`, absent when every input has zero U³ norm.
    pub c2_candidate: Option<f64>,
    /// `min_j ‖a_j‖_{U³}^{1/2}`.
    pub min_u3_root: f64,
    /// `2/Ñ`.
    pub tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFormsAverage {
    pub value: Complex64,
    pub bound_parts: BoundParts,
}

const BOUNDED_SLACK: f64 = 1e-12;

/// `E_{m,n∈Z/Ñ} 1_{[N]}(n)·a₀(m)·a₁(m+l₁n)·a₂(m+l₂n)·a₃(m+l₃n)` together with
/// the pieces of the U³ bound for it.
pub fn linear_forms_average(a: [&CyclicSignal; 4], ls: [u64; 3], n: u64) -> Result<LinearFormsAverage> {
    let modulus = a[0].modulus();
    for s in &a[1..] {
        check_moduli(modulus, s.modulus())?;
    }
    if ls.contains(&0) {
        return Err(invalid("l1, l2, l3 must be positive"));
    }
    if ls[0] == ls[1] || ls[0] == ls[2] || ls[1] == ls[2] {
        return Err(invalid(format!("l1, l2, l3 must be distinct, got {ls:?}")));
    }
    let l_sum: u128 = ls.iter().map(|&l| l as u128).sum();
    if (modulus as u128) <= 10 * l_sum * n as u128 {
        return Err(invalid(format!(
            "modulus {modulus} must exceed 10·(l1+l2+l3)·N = {}",
            10 * l_sum * n as u128
        )));
    }
    if let Some(j) = a.iter().position(|s| s.sup_norm() > 1.0 + BOUNDED_SLACK) {
        return Err(invalid(format!("input a{j} is not 1-bounded")));
    }

    let m = modulus;
    let (v0, v1, v2, v3) = (a[0].values(), a[1].values(), a[2].values(), a[3].values());
    let per_n: Vec<Complex64> = (1..=n as usize)
        .into_par_iter()
        .map(|k| {
            let steps = [ls[0] as usize * k % m, ls[1] as usize * k % m, ls[2] as usize * k % m];
            let terms: Vec<Complex64> = (0..m)
                .map(|x| v0[x] * v1[(x + steps[0]) % m] * v2[(x + steps[1]) % m] * v3[(x + steps[2]) % m])
                .collect();
            pairwise_sum_complex(&terms)
        })
        .collect();
    let value = pairwise_sum_complex(&per_n) / (m as f64 * m as f64);

    let mut min_u3_root = f64::INFINITY;
    for s in a {
        min_u3_root = min_u3_root.min(gowers_norm_recursive(s, 3)?.sqrt());
    }
    let tail = 2.0 / m as f64;
    let c2_candidate = (min_u3_root > 0.0).then(|| (value.norm() - tail) / min_u3_root);
    Ok(LinearFormsAverage { value, bound_parts: BoundParts { c2_candidate, min_u3_root, tail } })
}
