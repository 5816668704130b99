//! Sign value versus unit-vector (Hilbert) value of a real bilinear form.
//!
//! For `M ∈ R^{m×k}` the sign value is `max Σ_ij M_ij ε_i δ_j` over sign
//! vectors, and the Hilbert value replaces the signs by unit vectors in
//! `R^d`. Their ratio is bounded by the real Grothendieck constant.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sum::pairwise_sum;

/// Krivine's upper bound for the real Grothendieck constant, used as a test ceiling.
pub const K_TEST: f64 = 1.7822;

/// Largest side enumerated exhaustively by [`sign_value`].
pub const MAX_SIGN_SIDE: usize = 24;

/// Smallest number of restarts accepted by [`hilbert_value`].
pub const MIN_RESTARTS: usize = 32;

/// A finite real matrix; (de)serializes as an array of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct BilinearMatrix {
    inner: DMatrix<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for BilinearMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<BilinearMatrix> for Vec<Vec<f64>> {
    fn from(m: BilinearMatrix) -> Self {
        m.rows_vec()
    }
}

impl BilinearMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if m == 0 || k == 0 {
            return Err(invalid("matrix must have at least one row and one column"));
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(invalid("matrix rows have different lengths"));
        }
        if let Some(i) = rows.iter().flatten().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { inner: DMatrix::from_fn(m, k, |i, j| rows[i][j]) })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn rows_vec(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|i| self.inner.row(i).iter().copied().collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self { inner: self.inner.transpose() }
    }

    pub fn scale(&self, t: f64) -> Self {
        Self { inner: &self.inner * t }
    }

    fn sign_objective(&self, eps: &[f64]) -> f64 {
        pairwise_sum(&(0..self.cols()).map(|j| (0..self.rows()).map(|i| eps[i] * self.inner[(i, j)]).sum::<f64>().abs()).collect::<Vec<_>>())
    }
}

/// Best sign vector and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct SignOptimum {
    pub value: f64,
    /// Row signs (`±1`); if the matrix was transposed internally these still refer to rows.
    pub row_signs: Vec<f64>,
    pub col_signs: Vec<f64>,
}

/// `max_{ε ∈ {±1}^m} Σ_j |Σ_i ε_i M_ij|`, with the inner maximization over
/// column signs done analytically.
pub fn sign_value(m: &BilinearMatrix) -> Result<f64> {
    Ok(sign_optimum(m)?.value)
}

pub fn sign_optimum(m: &BilinearMatrix) -> Result<SignOptimum> {
    if m.rows() > MAX_SIGN_SIDE {
        if m.cols() <= MAX_SIGN_SIDE {
            let t = sign_optimum(&m.transpose())?;
            return Ok(SignOptimum { value: t.value, row_signs: t.col_signs, col_signs: t.row_signs });
        }
        return Err(Error::BudgetExceeded { what: "sign enumeration side", size: m.rows().min(m.cols()) as u128, limit: MAX_SIGN_SIDE as u128 });
    }
    let rows = m.rows();
    let cols = m.cols();
    // ε₀ = +1 by symmetry; the remaining rows−1 signs are split into
    // independent chunks (fixed count, so the result does not depend on threads).
    let free = rows - 1;
    let chunk_bits = free.min(6);
    let inner_bits = free - chunk_bits;
    let best = (0u64..1 << chunk_bits)
        .into_par_iter()
        .map(|chunk| {
            let mut eps = vec![1.0; rows];
            for b in 0..chunk_bits {
                if chunk >> b & 1 == 1 {
                    eps[1 + inner_bits + b] = -1.0;
                }
            }
            let mut sums: Vec<f64> = (0..cols).map(|j| (0..rows).map(|i| eps[i] * m.inner[(i, j)]).sum()).collect();
            let mut best_val = sums.iter().map(|s| s.abs()).sum::<f64>();
            let mut best_eps = eps.clone();
            for step in 1u64..1 << inner_bits {
                let row = 1 + step.trailing_zeros() as usize;
                eps[row] = -eps[row];
                for (j, s) in sums.iter_mut().enumerate() {
                    *s += 2.0 * eps[row] * m.inner[(row, j)];
                }
                let v: f64 = sums.iter().map(|s| s.abs()).sum();
                if v > best_val {
                    best_val = v;
                    best_eps.copy_from_slice(&eps);
                }
            }
            (m.sign_objective(&best_eps), best_eps)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<(f64, Vec<f64>)>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one chunk");
    let (value, row_signs) = best;
    let col_signs = (0..cols)
        .map(|j| if (0..rows).map(|i| row_signs[i] * m.inner[(i, j)]).sum::<f64>() >= 0.0 { 1.0 } else { -1.0 })
        .collect();
    Ok(SignOptimum { value, row_signs, col_signs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertOptions {
    pub dim: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl HilbertOptions {
    /// `d = m + k`, 64 restarts, 500 sweeps.
    pub fn for_matrix(m: &BilinearMatrix, seed: u64) -> Self {
        Self { dim: m.rows() + m.cols(), restarts: 64, iters: 500, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HilbertValue {
    /// Best objective found; a lower bound for the relaxation optimum.
    pub value: f64,
    pub lower_bound: bool,
    pub restarts: usize,
    pub iters: usize,
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
        true
    } else {
        false
    }
}

fn objective(m: &BilinearMatrix, x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let mut terms = Vec::with_capacity(m.rows() * m.cols());
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            terms.push(m.inner[(i, j)] * xi.iter().zip(yj).map(|(a, b)| a * b).sum::<f64>());
        }
    }
    pairwise_sum(&terms)
}

/// Alternating ascent from `y`; each half-step is an exact block maximization,
/// so the objective never decreases.
fn ascend(m: &BilinearMatrix, mut x: Vec<Vec<f64>>, mut y: Vec<Vec<f64>>, iters: usize) -> f64 {
    let d = y[0].len();
    let mut value = objective(m, &x, &y);
    for _ in 0..iters {
        for (i, xi) in x.iter_mut().enumerate() {
            let mut v = vec![0.0; d];
            for (j, yj) in y.iter().enumerate() {
                let w = m.inner[(i, j)];
                v.iter_mut().zip(yj).for_each(|(a, b)| *a += w * b);
            }
            if normalize(&mut v) {
                *xi = v;
            }
        }
        for (j, yj) in y.iter_mut().enumerate() {
            let mut v = vec![0.0; d];
            for (i, xi) in x.iter().enumerate() {
                let w = m.inner[(i, j)];
                v.iter_mut().zip(xi).for_each(|(a, b)| *a += w * b);
            }
            if normalize(&mut v) {
                *yj = v;
            }
        }
        let next = objective(m, &x, &y);
        let stalled = next - value <= 1e-15 * next.abs().max(1.0);
        value = value.max(next);
        if stalled {
            break;
        }
    }
    value
}

fn random_unit_vectors(rng: &mut ChaCha8Rng, count: usize, d: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| loop {
            let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            if normalize(&mut v) {
                break v;
            }
        })
        .collect()
}

/// Best value of `Σ_ij M_ij ⟨x_i, y_j⟩` over unit vectors in `R^d` found by
/// alternating maximization from seeded random starts (restart `r` uses
/// ChaCha8 seeded with `seed`, stream `r`) plus one start at the best sign
/// vector, so the result never falls below the sign value.
pub fn hilbert_value(m: &BilinearMatrix, opts: &HilbertOptions) -> Result<HilbertValue> {
    if opts.dim < m.rows() + m.cols() {
        return Err(invalid(format!("dimension {} is below rows + cols = {}", opts.dim, m.rows() + m.cols())));
    }
    if opts.restarts < MIN_RESTARTS {
        return Err(invalid(format!("at least {MIN_RESTARTS} restarts are required, got {}", opts.restarts)));
    }
    let d = opts.dim;
    let random_best = (0..opts.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r);
            let x = random_unit_vectors(&mut rng, m.rows(), d);
            let y = random_unit_vectors(&mut rng, m.cols(), d);
            ascend(m, x, y, opts.iters)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let value = if m.rows().min(m.cols()) <= MAX_SIGN_SIDE {
        let signs = sign_optimum(m)?;
        let lift = |s: &[f64]| s.iter().map(|&e| { let mut v = vec![0.0; d]; v[0] = e; v }).collect::<Vec<_>>();
        random_best.max(ascend(m, lift(&signs.row_signs), lift(&signs.col_signs), opts.iters))
    } else {
        random_best
    };
    Ok(HilbertValue { value, lower_bound: true, restarts: opts.restarts, iters: opts.iters })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeReport {
    pub sign_value: f64,
    pub hilbert_value: f64,
    pub ratio: f64,
    /// Set when the sign value vanishes but the Hilbert value does not.
    pub infinite: bool,
}

/// `hilbert_value / sign_value`.
pub fn grothendieck_ratio(m: &BilinearMatrix, opts: &HilbertOptions) -> Result<GaugeReport> {
    let s = sign_value(m)?;
    let h = hilbert_value(m, opts)?.value;
    if s == 0.0 {
        if h == 0.0 {
            return Err(invalid("the zero matrix has no gauge ratio"));
        }
        return Ok(GaugeReport { sign_value: s, hilbert_value: h, ratio: f64::INFINITY, infinite: true });
    }
    Ok(GaugeReport { sign_value: s, hilbert_value: h, ratio: h / s, infinite: false })
}
