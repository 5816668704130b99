//! Exact spectral representation of two-step correlations for finite
//! measure-preserving systems with two (possibly non-commuting) permutations.
//!
//! For finite permutations every correlation `γ, γ′ ↦ ∫ T_γS_{γ′}f·T_γg·h dμ`
//! is periodic mod the order `M`, so the acting group collapses to Z/M. With
//! `λ` uniform on the `M` characters the evaluation maps `ξ_γ` are
//! orthonormal and `G` can be written down directly in the `ξ`-basis:
//! `G(ξ_γ) = Σ_β Φ(ξ_γ, ξ_β)·ξ_{−β}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclic::root_of_unity;
use crate::error::{invalid, Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

/// Largest order accepted by [`spectral_pair`].
pub const ORDER_BUDGET: usize = 1000;

/// Slack on the bilinear bound check.
pub const BOUND_SLACK: f64 = 1e-8;

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Cycles of a permutation, each listed as `x, T x, T² x, …` from its least element.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = perm[x];
        }
        out.push(cycle);
    }
    out
}

fn check_permutation(perm: &[usize], size: usize, name: &str) -> Result<()> {
    if perm.len() != size {
        return Err(invalid(format!("{name} has length {}, expected {size}", perm.len())));
    }
    let mut hit = vec![false; size];
    for &p in perm {
        if p >= size || std::mem::replace(&mut hit[p], true) {
            return Err(invalid(format!("{name} is not a permutation of 0..{size}")));
        }
    }
    Ok(())
}

/// `perm^k` for any integer `k` (negative powers invert).
pub fn perm_power(perm: &[usize], k: i64) -> Vec<usize> {
    let mut out = vec![0; perm.len()];
    for cycle in cycles(perm) {
        let c = cycle.len() as i64;
        for (t, &x) in cycle.iter().enumerate() {
            out[x] = cycle[(t as i64 + k).rem_euclid(c) as usize];
        }
    }
    out
}

/// A finite probability space with two measure-preserving permutations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteSystem {
    weights: Vec<f64>,
    #[serde(rename = "T")]
    t: Vec<usize>,
    #[serde(rename = "S")]
    s: Vec<usize>,
}

impl FiniteSystem {
    pub fn new(weights: Vec<f64>, t: Vec<usize>, s: Vec<usize>) -> Result<Self> {
        let size = weights.len();
        if size == 0 {
            return Err(invalid("a finite system needs at least one point"));
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0 || !w.is_finite()) {
            return Err(invalid("weights must be positive and finite"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        check_permutation(&t, size, "T")?;
        check_permutation(&s, size, "S")?;
        for (name, perm) in [("T", &t), ("S", &s)] {
            if let Some(x) = (0..size).find(|&x| (weights[perm[x]] - weights[x]).abs() > WEIGHT_TOL) {
                return Err(invalid(format!("{name} does not preserve the weight at point {x}")));
            }
        }
        Ok(Self { weights, t, s })
    }

    pub fn uniform(t: Vec<usize>, s: Vec<usize>) -> Result<Self> {
        let n = t.len();
        Self::new(vec![1.0 / n as f64; n], t, s)
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn t(&self) -> &[usize] {
        &self.t
    }

    pub fn s(&self) -> &[usize] {
        &self.s
    }

    /// `lcm` of all cycle lengths of `T` and `S`.
    pub fn order(&self) -> usize {
        cycles(&self.t)
            .iter()
            .chain(cycles(&self.s).iter())
            .fold(1usize, |acc, c| num_integer::lcm(acc, c.len()))
    }

    fn check_functions(&self, fs: [&[Complex64]; 3]) -> Result<()> {
        for (name, f) in ["f", "g", "h"].iter().zip(fs) {
            if f.len() != self.size() {
                return Err(invalid(format!("{name} has length {}, system has {} points", f.len(), self.size())));
            }
        }
        Ok(())
    }

    /// A random system of at most `max_size` points whose order is at most
    /// `max_order`; weights are constant on the joint orbits of `T` and `S`.
    pub fn random<R: Rng>(rng: &mut R, max_size: usize, max_order: usize) -> Self {
        loop {
            let size = rng.gen_range(1..=max_size);
            let mut t: Vec<usize> = (0..size).collect();
            let mut s: Vec<usize> = (0..size).collect();
            t.shuffle(rng);
            s.shuffle(rng);
            let mut orbit: Vec<usize> = (0..size).collect();
            fn root(orbit: &mut [usize], mut x: usize) -> usize {
                while orbit[x] != x {
                    orbit[x] = orbit[orbit[x]];
                    x = orbit[x];
                }
                x
            }
            for x in 0..size {
                for y in [t[x], s[x]] {
                    let (a, b) = (root(&mut orbit, x), root(&mut orbit, y));
                    orbit[a.max(b)] = a.min(b);
                }
            }
            let mass: Vec<f64> = (0..size).map(|_| rng.gen_range(0.5..2.0)).collect();
            let raw: Vec<f64> = (0..size).map(|x| mass[root(&mut orbit, x)]).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            if let Ok(sys) = Self::new(weights, t, s) {
                if sys.order() <= max_order {
                    return sys;
                }
            }
        }
    }
}

/// `Σ_x w(x)·f(S^{γ′}(T^γ x))·g(T^γ x)·h(x)`, i.e. `∫ T_γS_{γ′}f · T_γg · h dμ`
/// with Koopman operators `T_γ f = f ∘ T^γ`.
pub fn correlation(sys: &FiniteSystem, f: &[Complex64], g: &[Complex64], h: &[Complex64], gamma: i64, gamma_p: i64) -> Result<Complex64> {
    sys.check_functions([f, g, h])?;
    let tg = perm_power(&sys.t, gamma);
    let sg = perm_power(&sys.s, gamma_p);
    Ok((0..sys.size())
        .map(|x| {
            let y = tg[x];
            f[sg[y]] * g[y] * h[x] * sys.weights[x]
        })
        .sum())
}

/// Spectral projections `P_j` (`j ∈ Z/M`) of the Koopman operator `f ↦ f∘perm`
/// onto the eigenvalue `e(j/M)`, from the cycle structure.
pub fn koopman_projections(perm: &[usize], weights: &[f64], order: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let size = weights.len();
    check_permutation(perm, size, "permutation")?;
    if order == 0 {
        return Err(invalid("order must be positive"));
    }
    let mut proj = vec![DMatrix::from_element(size, size, c0()); order];
    for cycle in cycles(perm) {
        let c = cycle.len();
        if !order.is_multiple_of(c) {
            return Err(invalid(format!("cycle length {c} does not divide {order}")));
        }
        if cycle.iter().any(|&x| (weights[x] - weights[cycle[0]]).abs() > WEIGHT_TOL) {
            return Err(invalid("weights are not constant on a cycle"));
        }
        for r in 0..c {
            let j = r * (order / c);
            for (t, &xt) in cycle.iter().enumerate() {
                for (u, &xu) in cycle.iter().enumerate() {
                    proj[j][(xt, xu)] += root_of_unity(r as i128 * (t as i128 - u as i128), c) / c as f64;
                }
            }
        }
    }
    Ok(proj)
}

/// `Σ_j φ(j)·P_j`.
fn functional_calculus(proj: &[DMatrix<Complex64>], phi: &[Complex64]) -> DMatrix<Complex64> {
    let size = proj[0].nrows();
    proj.iter()
        .zip(phi)
        .fold(DMatrix::from_element(size, size, c0()), |acc, (p, &v)| acc + p * v)
}

/// `ξ_γ` as a function on the characters: `j ↦ e(jγ/M)`.
pub fn evaluation(order: usize, gamma: i64) -> Vec<Complex64> {
    (0..order).map(|j| root_of_unity(j as i128 * gamma as i128, order)).collect()
}

fn pair_with_h(sys: &FiniteSystem, tphi: &DMatrix<Complex64>, spsi: &DMatrix<Complex64>, f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Complex64 {
    let sf = spsi * DVector::from_column_slice(f);
    let inner = DVector::from_iterator(f.len(), sf.iter().zip(g).map(|(a, b)| a * b));
    let out = tphi * inner;
    (0..sys.size()).map(|x| out[x] * h[x] * sys.weights[x]).sum()
}

/// `Φ(φ, ψ) = ∫ T_φ(S_ψ f · g)·h dμ` for functions `φ, ψ` on the `M` characters.
pub fn bilinear_form(
    sys: &FiniteSystem,
    f: &[Complex64],
    g: &[Complex64],
    h: &[Complex64],
    phi: &[Complex64],
    psi: &[Complex64],
) -> Result<Complex64> {
    sys.check_functions([f, g, h])?;
    let order = phi.len();
    if psi.len() != order {
        return Err(invalid("phi and psi must live on the same character group"));
    }
    let pt = koopman_projections(&sys.t, &sys.weights, order)?;
    let ps = koopman_projections(&sys.s, &sys.weights, order)?;
    Ok(pair_with_h(sys, &functional_calculus(&pt, phi), &functional_calculus(&ps, psi), f, g, h))
}

/// The measure `λ` on the characters of Z/M and the operator `G` in the `ξ`-basis.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    pub order: usize,
    pub lambda_weights: Vec<f64>,
    /// Column `γ` holds the `ξ`-coefficients of `G(ξ_γ)`.
    pub g_matrix: DMatrix<Complex64>,
}

/// Builds `(λ, G)` with `∫ G(ξ_γ)·ξ_{γ′} dλ = ∫ T_γS_{γ′}f·T_γg·h dμ` for all `γ, γ′`.
///
/// `Φ(ξ_γ, ξ_β)` is evaluated through the spectral projections, not through
/// the direct orbit sum used by [`correlation`].
pub fn spectral_pair(sys: &FiniteSystem, f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Result<SpectralPair> {
    sys.check_functions([f, g, h])?;
    let order = sys.order();
    if order > ORDER_BUDGET {
        return Err(Error::BudgetExceeded { what: "spectral pair order", size: order as u128, limit: ORDER_BUDGET as u128 });
    }
    let pt = koopman_projections(&sys.t, &sys.weights, order)?;
    let ps = koopman_projections(&sys.s, &sys.weights, order)?;
    let t_ops: Vec<DMatrix<Complex64>> = (0..order as i64)
        .into_par_iter()
        .map(|gamma| functional_calculus(&pt, &evaluation(order, gamma)))
        .collect();
    let s_ops: Vec<DMatrix<Complex64>> = (0..order as i64)
        .into_par_iter()
        .map(|beta| functional_calculus(&ps, &evaluation(order, beta)))
        .collect();
    let columns: Vec<Vec<Complex64>> = (0..order)
        .into_par_iter()
        .map(|gamma| {
            let mut col = vec![c0(); order];
            for (beta, s_op) in s_ops.iter().enumerate() {
                col[(order - beta) % order] = pair_with_h(sys, &t_ops[gamma], s_op, f, g, h);
            }
            col
        })
        .collect();
    let g_matrix = DMatrix::from_fn(order, order, |row, col| columns[col][row]);
    Ok(SpectralPair { order, lambda_weights: vec![1.0 / order as f64; order], g_matrix })
}

impl SpectralPair {
    /// Values `j ↦ Σ_γ c_γ e(jγ/M)` of the function with `ξ`-coefficients `c`.
    pub fn function_values(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.order;
        (0..m)
            .map(|j| coeffs.iter().enumerate().map(|(gamma, &c)| c * root_of_unity((j * gamma) as i128, m)).sum())
            .collect()
    }

    /// `ξ`-coefficients of `G(Σ c_γ ξ_γ)`.
    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        (&self.g_matrix * DVector::from_column_slice(coeffs)).iter().copied().collect()
    }

    /// `∫ u·v dλ` (bilinear, no conjugate) for functions given by their values.
    pub fn pairing(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter().zip(v).zip(&self.lambda_weights).map(|((a, b), w)| a * b * *w).sum()
    }

    /// `‖u‖_{L²(λ)}` for a function given by its values.
    pub fn l2_norm(&self, u: &[Complex64]) -> f64 {
        u.iter().zip(&self.lambda_weights).map(|(a, w)| a.norm_sqr() * w).sum::<f64>().sqrt()
    }

    /// The table `[γ][γ′] ↦ ∫ G(ξ_γ)·ξ_{γ′} dλ`, evaluated pointwise on the characters.
    pub fn representation_table(&self) -> Vec<Vec<Complex64>> {
        let m = self.order;
        let xi: Vec<Vec<Complex64>> = (0..m as i64).map(|g| evaluation(m, g)).collect();
        (0..m)
            .into_par_iter()
            .map(|gamma| {
                let col: Vec<Complex64> = self.g_matrix.column(gamma).iter().copied().collect();
                let g_values = self.function_values(&col);
                xi.iter().map(|x| self.pairing(&g_values, x)).collect()
            })
            .collect()
    }

    /// `‖G‖_op` on `L²(λ)` by power iteration on `G*G` (200 steps or 1e−12 stagnation).
    pub fn operator_norm(&self) -> f64 {
        let m = self.order;
        let gram = self.g_matrix.adjoint() * &self.g_matrix;
        // Fixed, non-symmetric start so no singular direction is missed by accident.
        let mut v = DVector::from_fn(m, |i, _| Complex64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), 0.25 * (i % 3) as f64));
        v /= Complex64::new(v.norm(), 0.0);
        let mut estimate = 0.0f64;
        for _ in 0..200 {
            let w = &gram * &v;
            let norm = w.norm();
            if norm == 0.0 {
                return 0.0;
            }
            let next = norm.sqrt();
            v = w / Complex64::new(norm, 0.0);
            let done = (next - estimate).abs() <= 1e-12 * next.max(1.0);
            estimate = next;
            if done {
                break;
            }
        }
        estimate
    }
}

/// All correlations `[γ][γ′]` for `γ, γ′ ∈ Z/M`, by direct orbit sums.
pub fn correlation_table(sys: &FiniteSystem, f: &[Complex64], g: &[Complex64], h: &[Complex64], order: usize) -> Result<Vec<Vec<Complex64>>> {
    (0..order as i64)
        .into_par_iter()
        .map(|gamma| (0..order as i64).map(|gp| correlation(sys, f, g, h, gamma, gp)).collect())
        .collect()
}

/// `max_{γ,γ′} |correlation − ∫ G(ξ_γ)ξ_{γ′} dλ|`.
pub fn identity_error(pair: &SpectralPair, sys: &FiniteSystem, f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Result<f64> {
    let direct = correlation_table(sys, f, g, h, pair.order)?;
    let rep = pair.representation_table();
    Ok(direct
        .iter()
        .flatten()
        .zip(rep.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    /// `|Σ a_γ b_{γ′} correlation(γ, γ′)|`.
    pub lhs: f64,
    /// `‖G‖_op · ‖Σ a_γ ξ_γ‖ · ‖Σ b_γ ξ_γ‖`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `|Σ a_γ b_{γ′} ∫ T_γS_{γ′}f·T_γg·h| ≤ ‖G‖_op ‖Σ a ξ‖ ‖Σ b ξ‖` for many
/// coefficient pairs against one system, reusing the correlation table and norm.
pub struct BoundChecker {
    pair: SpectralPair,
    table: Vec<Vec<Complex64>>,
    opnorm: f64,
}

impl BoundChecker {
    pub fn new(pair: SpectralPair, sys: &FiniteSystem, f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Result<Self> {
        let table = correlation_table(sys, f, g, h, pair.order)?;
        let opnorm = pair.operator_norm();
        Ok(Self { pair, table, opnorm })
    }

    pub fn opnorm(&self) -> f64 {
        self.opnorm
    }

    pub fn check(&self, a: &[Complex64], b: &[Complex64]) -> Result<BoundReport> {
        let m = self.pair.order;
        if a.len() != m || b.len() != m {
            return Err(invalid(format!("coefficient vectors must have length {m}")));
        }
        let lhs = a
            .iter()
            .zip(&self.table)
            .map(|(&ag, row)| ag * row.iter().zip(b).map(|(c, &bg)| c * bg).sum::<Complex64>())
            .sum::<Complex64>()
            .norm();
        let rhs = self.opnorm * self.pair.l2_norm(&self.pair.function_values(a)) * self.pair.l2_norm(&self.pair.function_values(b));
        Ok(BoundReport { lhs, rhs, holds: lhs <= rhs + BOUND_SLACK })
    }
}

pub fn verify_bilinear_bound(
    pair: &SpectralPair,
    a: &[Complex64],
    b: &[Complex64],
    sys: &FiniteSystem,
    f: &[Complex64],
    g: &[Complex64],
    h: &[Complex64],
) -> Result<BoundReport> {
    BoundChecker::new(pair.clone(), sys, f, g, h)?.check(a, b)
}

/// `ξ`-coefficients of `ξ_{ψ,n₁}·ξ_{ψ,n₂}·ξ_{ψ,n₃}·ξ_{ψ,n₄}` where
/// `ξ_{ψ,n} = E_k ψ(n−k)·ξ_k`; non-negative whenever `ψ` is.
pub fn kernel_product_coefficients(kernel: &[f64], points: [usize; 4]) -> Vec<f64> {
    let m = kernel.len();
    let single = |n: usize| -> Vec<f64> { (0..m).map(|k| kernel[(n + m - k) % m] / m as f64).collect() };
    let mut acc = single(points[0]);
    for &n in &points[1..] {
        let next = single(n);
        let mut out = vec![0.0; m];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in next.iter().enumerate() {
                out[(i + j) % m] += a * b;
            }
        }
        acc = out;
    }
    acc
}

/// `∫ G(Σ c′_k ξ_k)·(Σ c_k ξ_k) dλ`.
pub fn kernel_pairing(pair: &SpectralPair, outer: &[f64], inner: &[f64]) -> Complex64 {
    let to_c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    let g_outer = pair.function_values(&pair.apply(&to_c(outer)));
    pair.pairing(&g_outer, &pair.function_values(&to_c(inner)))
}
