//! Structured + uniform + error splitting of truncated multiplicative
//! functions using explicit kernels.
//!
//! Both kernels have the form `ψ = A_{Q,K} ∗ F_W`: an average along the
//! progression `{0, Q, …, (K−1)Q}` composed with a Fejér kernel. With
//! `st = χ_N ∗ ψ₁`, `st + er = χ_N ∗ ψ₂` and `un = χ_N − χ_N ∗ ψ₂`, the sup
//! bounds `|st| ≤ 1`, `|un|, |er| ≤ 2` hold for every unimodular χ, and
//! `|st(n+Q) − st(n)| ≤ 2/K₁` by telescoping along the progression.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, isqrt_u128};
use crate::cyclic::{check_moduli, convolve, CyclicSignal};
use crate::error::{invalid, Result};
use crate::gowers::{gowers_norm_recursive, gowers_u2_fourier};
use crate::multiplicative::MultiplicativeFunction;
use crate::sum::pairwise_sum;

const CLAMP: f64 = 1e-12;

/// A non-negative real function on Z/M with mean 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    signal: CyclicSignal,
}

impl Kernel {
    /// Accepts values down to `−1e−12` (clamped to 0) and a mean within `1e−12` of 1.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| v < -CLAMP) {
            return Err(invalid(format!("kernel value {} at {i} is negative", values[i])));
        }
        let clamped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
        let signal = CyclicSignal::from_real(&clamped)?;
        let mean = signal.mean().re;
        if (mean - 1.0).abs() > CLAMP {
            return Err(invalid(format!("kernel mean is {mean}, not 1")));
        }
        Ok(Self { signal })
    }

    fn from_signal(signal: &CyclicSignal) -> Result<Self> {
        if let Some(z) = signal.values().iter().find(|z| z.im.abs() > CLAMP) {
            return Err(invalid(format!("kernel value {z} is not real")));
        }
        let re: Vec<f64> = signal.values().iter().map(|z| z.re).collect();
        Self::from_values(&re)
    }

    pub fn signal(&self) -> &CyclicSignal {
        &self.signal
    }

    pub fn modulus(&self) -> usize {
        self.signal.modulus()
    }

    /// Convolution of two kernels, again a kernel.
    pub fn compose(&self, other: &Kernel) -> Result<Kernel> {
        Kernel::from_signal(&convolve(&self.signal, &other.signal)?)
    }
}

/// `F_W(n) = (1/W)·|Σ_{j<W} e(jn/Ñ)|²`.
pub fn fejer_kernel(modulus: u64, width: u64) -> Result<Kernel> {
    if width == 0 || width > modulus {
        return Err(invalid(format!("Fejér width {width} must lie in 1..={modulus}")));
    }
    let w = width as f64;
    let values: Vec<f64> = (0..modulus)
        .map(|n| {
            if n == 0 {
                return w;
            }
            // sin²(πWn/Ñ) / (W·sin²(πn/Ñ)) with both angles reduced mod Ñ.
            let top = (std::f64::consts::PI * ((width as u128 * n as u128) % modulus as u128) as f64 / modulus as f64).sin();
            let bottom = (std::f64::consts::PI * n as f64 / modulus as f64).sin();
            top * top / (w * bottom * bottom)
        })
        .collect();
    Kernel::from_values(&values)
}

/// `A_{Q,K} = (Ñ/K)·1_{{kQ mod Ñ : 0 ≤ k < K}}`.
pub fn progression_kernel(modulus: u64, step: u64, length: u64) -> Result<Kernel> {
    if !is_prime(modulus) {
        return Err(invalid(format!("progression kernels need a prime modulus, got {modulus}")));
    }
    if length == 0 || length > modulus {
        return Err(invalid(format!("progression length {length} must lie in 1..={modulus}")));
    }
    if step.is_multiple_of(modulus) && length > 1 {
        return Err(invalid("progression step must be nonzero mod the modulus"));
    }
    let mut values = vec![0.0; modulus as usize];
    let height = modulus as f64 / length as f64;
    for k in 0..length {
        values[((k as u128 * step as u128) % modulus as u128) as usize] = height;
    }
    Kernel::from_values(&values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecompositionParams {
    #[serde(rename = "Q")]
    pub q: u64,
    #[serde(rename = "K1")]
    pub k1: u64,
    #[serde(rename = "W1")]
    pub w1: u64,
    #[serde(rename = "K2")]
    pub k2: u64,
    #[serde(rename = "W2")]
    pub w2: u64,
}

impl DecompositionParams {
    /// `Q = 1` and `K = W = ⌊√Ñ⌋` for both kernels.
    pub fn defaults(modulus: u64) -> Self {
        let r = isqrt_u128(u128::from(modulus)) as u64;
        Self { q: 1, k1: r, w1: r, k2: r, w2: r }
    }

    fn validate(&self, modulus: u64) -> Result<()> {
        let Self { q, k1, w1, k2, w2 } = *self;
        if q == 0 || k1 == 0 || k2 == 0 || w1 == 0 || w2 == 0 {
            return Err(invalid("Q, K1, W1, K2, W2 must all be positive"));
        }
        let m = u128::from(modulus);
        if u128::from(k1) * u128::from(q) >= m || u128::from(k2) * u128::from(q) >= m {
            return Err(invalid(format!("need K1·Q < Ñ and K2·Q < Ñ (Ñ = {modulus})")));
        }
        if k2 < k1 || w2 < w1 {
            return Err(invalid("need K2 >= K1 and W2 >= W1"));
        }
        if w2 > modulus {
            return Err(invalid("Fejér widths must not exceed Ñ"));
        }
        Ok(())
    }

    fn kernels(&self, modulus: u64) -> Result<(Kernel, Kernel)> {
        let first = progression_kernel(modulus, self.q, self.k1)?.compose(&fejer_kernel(modulus, self.w1)?)?;
        let second = progression_kernel(modulus, self.q, self.k2)?.compose(&fejer_kernel(modulus, self.w2)?)?;
        Ok((first, second))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub st: CyclicSignal,
    pub un: CyclicSignal,
    pub er: CyclicSignal,
    pub params: DecompositionParams,
}

impl Decomposition {
    pub fn modulus(&self) -> usize {
        self.st.modulus()
    }

    /// `st + un + er`.
    pub fn reconstruct(&self) -> CyclicSignal {
        self.st.add(&self.un).and_then(|s| s.add(&self.er)).expect("parts share a modulus")
    }
}

/// Splits an arbitrary signal on Z/Ñ with the kernel pair from `params`.
pub fn decompose_signal(chi_n: &CyclicSignal, params: DecompositionParams) -> Result<Decomposition> {
    let modulus = chi_n.modulus() as u64;
    if !is_prime(modulus) {
        return Err(invalid(format!("modulus {modulus} is not prime")));
    }
    params.validate(modulus)?;
    let (psi1, psi2) = params.kernels(modulus)?;
    let st = convolve(chi_n, psi1.signal())?;
    let smoothed = convolve(chi_n, psi2.signal())?;
    let er = smoothed.sub(&st)?;
    let un = chi_n.sub(&smoothed)?;
    Ok(Decomposition { st, un, er, params })
}

/// Decomposes `χ_N` on Z/Ñ.
pub fn decompose(chi: &MultiplicativeFunction, n: u64, modulus: u64, params: DecompositionParams) -> Result<Decomposition> {
    if modulus <= n {
        return Err(invalid(format!("modulus {modulus} must exceed N = {n}")));
    }
    decompose_signal(&chi.truncation(n, modulus)?, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionDiagnostics {
    /// `max_n |st(n+Q) − st(n)|`.
    #[serde(rename = "lipschitz_Q")]
    pub lipschitz_q: f64,
    pub u2_un: f64,
    /// Only computed for `s = 3`.
    pub u3_un: Option<f64>,
    /// `E_n |er(n)|`.
    pub l1_er: f64,
    pub sup_st: f64,
    pub sup_un: f64,
    pub sup_er: f64,
}

pub fn diagnostics(dec: &Decomposition, s: u32) -> Result<DecompositionDiagnostics> {
    if !(2..=3).contains(&s) {
        return Err(invalid(format!("uniformity degree s must be 2 or 3, got {s}")));
    }
    let q = dec.params.q as i64;
    let lipschitz_q = (0..dec.modulus() as i64)
        .map(|n| (dec.st.at(n + q) - dec.st.at(n)).norm())
        .fold(0.0, f64::max);
    let u3_un = if s == 3 { Some(gowers_norm_recursive(&dec.un, 3)?) } else { None };
    Ok(DecompositionDiagnostics {
        lipschitz_q,
        u2_un: gowers_u2_fourier(&dec.un),
        u3_un,
        l1_er: dec.er.l1_mean(),
        sup_st: dec.st.sup_norm(),
        sup_un: dec.un.sup_norm(),
        sup_er: dec.er.sup_norm(),
    })
}

/// Average of `E_n |er(n)|` over a finite sample of χ's, standing in for
/// the integral against a measure on the dual.
pub fn empirical_l1_mass(sample: &[MultiplicativeFunction], n: u64, modulus: u64, params: DecompositionParams) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("empirical L1 mass needs a nonempty sample"));
    }
    let masses = sample
        .par_iter()
        .map(|chi| decompose(chi, n, modulus, params).map(|d| d.er.l1_mean()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&masses) / masses.len() as f64)
}

/// `Σ_i c_i·dec(f_i)` part-wise, for linearity checks.
pub fn combine(parts: &[(Complex64, &Decomposition)]) -> Result<(CyclicSignal, CyclicSignal, CyclicSignal)> {
    let first = parts.first().ok_or_else(|| invalid("nothing to combine"))?.1;
    let m = first.modulus();
    let mut acc = (CyclicSignal::zeros(m)?, CyclicSignal::zeros(m)?, CyclicSignal::zeros(m)?);
    for &(c, d) in parts {
        check_moduli(m, d.modulus())?;
        acc = (acc.0.add(&d.st.scale(c))?, acc.1.add(&d.un.scale(c))?, acc.2.add(&d.er.scale(c))?);
    }
    Ok(acc)
}
