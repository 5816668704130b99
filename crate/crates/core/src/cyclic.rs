//! Signals on the cyclic group Z/M, the averaged DFT and cyclic convolution.
//!
//! The transform uses the averaging convention `f̂(ξ) = E_x f(x)·e(−xξ/M)`,
//! so the inverse is an unnormalized sum and `f̂(0)` is the mean of `f`.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::sum::{mean_complex, pairwise_sum};

/// `e(t) = exp(2πi t)`.
#[inline]
pub fn e(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * turns)
}

/// `e(k/m)` with `k` reduced first, which keeps the angle small and accurate.
#[inline]
pub fn root_of_unity(k: i128, m: usize) -> Complex64 {
    let r = k.rem_euclid(m as i128);
    e(r as f64 / m as f64)
}

/// A complex-valued function on Z/M, indexed by residues `0..M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicSignal {
    values: Vec<Complex64>,
}

impl CyclicSignal {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("a cyclic signal needs modulus >= 1"));
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(modulus: usize, f: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new((0..modulus).map(f).collect())
    }

    pub fn zeros(modulus: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); modulus])
    }

    pub fn constant(modulus: usize, value: Complex64) -> Result<Self> {
        Self::new(vec![value; modulus])
    }

    /// The additive character `x ↦ e(θx/M)`.
    pub fn character(modulus: usize, theta: i64) -> Result<Self> {
        Self::from_fn(modulus, |x| root_of_unity(theta as i128 * x as i128, modulus))
    }

    /// `M·1_{{0}}`, the identity for averaged convolution.
    pub fn point_mass(modulus: usize) -> Result<Self> {
        let mut s = Self::zeros(modulus)?;
        s.values[0] = Complex64::new(modulus as f64, 0.0);
        Ok(s)
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at `x mod M`; negative indices wrap.
    #[inline]
    pub fn at(&self, x: i64) -> Complex64 {
        self.values[x.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn mean(&self) -> Complex64 {
        mean_complex(&self.values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `E_x |f(x)|`.
    pub fn l1_mean(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|z| z.norm()).collect();
        pairwise_sum(&abs) / abs.len() as f64
    }

    /// `E_x |f(x)|²`.
    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        pairwise_sum(&sq) / sq.len() as f64
    }

    pub fn conj(&self) -> Self {
        Self { values: self.values.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|&z| z * c).collect() }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_moduli(self.modulus(), other.modulus())?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `x ↦ f(x + h)`.
    pub fn shift(&self, h: i64) -> Self {
        let m = self.modulus() as i64;
        Self::from_fn(self.modulus(), |x| self.at(x as i64 + h.rem_euclid(m))).expect("same modulus")
    }

    /// Multiplicative derivative `Δ_h f(x) = f(x+h)·conj(f(x))`.
    pub fn derivative(&self, h: i64) -> Self {
        let m = self.modulus() as i64;
        let h = h.rem_euclid(m);
        Self {
            values: (0..m).map(|x| self.at(x + h) * self.values[x as usize].conj()).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_moduli(self.modulus(), other.modulus())?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }
}

/// Fourier coefficients `f̂(ξ)` for `ξ ∈ Z/M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        CyclicSignal::new(coefficients).map(|s| Self { coefficients: s.values })
    }

    pub fn modulus(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `Σ_ξ |f̂(ξ)|²`, equal to `E_x |f(x)|²` by Parseval.
    pub fn energy(&self) -> f64 {
        let sq: Vec<f64> = self.coefficients.iter().map(|z| z.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    /// `Σ_ξ |f̂(ξ)|⁴`.
    pub fn fourth_moment(&self) -> f64 {
        let q: Vec<f64> = self.coefficients.iter().map(|z| z.norm_sqr().powi(2)).collect();
        pairwise_sum(&q)
    }
}

pub fn check_moduli(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::ModulusMismatch { left, right })
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Averaged DFT in `O(M log M)` for every `M` (prime lengths go through a
/// chirp-z reduction inside the planner).
pub fn dft(f: &CyclicSignal) -> Spectrum {
    let m = f.modulus();
    let mut buf = f.values.clone();
    plan(m, false).process(&mut buf);
    let inv = 1.0 / m as f64;
    buf.iter_mut().for_each(|z| *z *= inv);
    Spectrum { coefficients: buf }
}

pub fn inverse_dft(spectrum: &Spectrum) -> CyclicSignal {
    let mut buf = spectrum.coefficients.clone();
    plan(buf.len(), true).process(&mut buf);
    CyclicSignal { values: buf }
}

/// `(f∗g)(n) = E_k f(n−k)·g(k)`, computed on the Fourier side.
pub fn convolve(f: &CyclicSignal, g: &CyclicSignal) -> Result<CyclicSignal> {
    check_moduli(f.modulus(), g.modulus())?;
    let (fh, gh) = (dft(f), dft(g));
    let product = fh.coefficients.iter().zip(&gh.coefficients).map(|(a, b)| a * b).collect();
    Ok(inverse_dft(&Spectrum { coefficients: product }))
}

/// Least prime strictly greater than `10·l·N`.
pub fn choose_modulus(n: u64, l: u64) -> Result<u64> {
    if n == 0 || l == 0 {
        return Err(invalid("choose_modulus needs N >= 1 and l >= 1"));
    }
    let bound = 10u64
        .checked_mul(l)
        .and_then(|v| v.checked_mul(n))
        .ok_or_else(|| Error::Overflow(format!("10·{l}·{n} does not fit in u64")))?;
    arith::next_prime_above(bound)
}

/// Embed values given on `[1..N]` into Z/modulus, zero at 0 and above N.
pub fn truncate_embed(values: &[Complex64], modulus: usize) -> Result<CyclicSignal> {
    if modulus <= values.len() {
        return Err(invalid(format!(
            "modulus {modulus} must exceed the truncation length {}",
            values.len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); modulus];
    out[1..=values.len()].copy_from_slice(values);
    CyclicSignal::new(out)
}
