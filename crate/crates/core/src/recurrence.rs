//! Products of linear forms `m(m+l₁n)`, `(m+l₂n)(m+l₃n)` and searches for
//! the corresponding configurations inside finite sets `E ⊆ [1..n_max]`.

use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::derive_seed;
use crate::error::{invalid, Error, Result};
use crate::multiplicative::{mult_density_estimate, FolnerSpec};
use crate::subset::SubsetMask;

fn parse_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| invalid(format!("bad integer {t:?}"))))
        .collect()
}

fn non_negative(v: &[i64]) -> Result<Vec<u64>> {
    v.iter()
        .map(|&x| u64::try_from(x).map_err(|_| invalid(format!("pattern coefficient {x} is negative"))))
        .collect()
}

/// `(m + l_a n)(m + l_b n)`, exact.
fn pair_product(m: u64, n: u64, la: u64, lb: u64) -> Result<u128> {
    let lin = |l: u64| {
        u128::from(l)
            .checked_mul(u128::from(n))
            .and_then(|t| t.checked_add(u128::from(m)))
    };
    lin(la)
        .zip(lin(lb))
        .and_then(|(u, v)| u.checked_mul(v))
        .ok_or_else(|| Error::Overflow(format!("linear product at (m, n) = ({m}, {n})")))
}

/// `(l₁, l₂, l₃)` with `l₁ ≥ 1` and `l₂ ≠ l₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PatternTwoTerm {
    pub l1: u64,
    pub l2: u64,
    pub l3: u64,
}

impl PatternTwoTerm {
    pub fn new(l1: u64, l2: u64, l3: u64) -> Result<Self> {
        if l1 == 0 {
            return Err(invalid("l1 must be positive"));
        }
        if l2 == l3 {
            return Err(invalid("l2 and l3 must differ"));
        }
        Ok(Self { l1, l2, l3 })
    }

    /// `(L₁, L₂) = (m(m+l₁n), (m+l₂n)(m+l₃n))`.
    pub fn products(&self, m: u64, n: u64) -> Result<(u128, u128)> {
        Ok((pair_product(m, n, 0, self.l1)?, pair_product(m, n, self.l2, self.l3)?))
    }
}

impl FromStr for PatternTwoTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match non_negative(&parse_list(s)?)?[..] {
            [l1, l2, l3] => Self::new(l1, l2, l3),
            _ => Err(invalid("a two-term pattern needs 3 coefficients")),
        }
    }
}

/// `(l₁, …, l₇)` with `l₁ ≠ 0`, `l₂ ≠ l₃`, `l₄ ≠ l₅`, `l₆ ≠ l₇`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PatternThreeTerm {
    pub l: [u64; 7],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearProducts {
    #[serde(rename = "L1")]
    pub l1: u128,
    #[serde(rename = "L2")]
    pub l2: u128,
    #[serde(rename = "L1p")]
    pub l1p: u128,
    #[serde(rename = "L2p")]
    pub l2p: u128,
}

impl PatternThreeTerm {
    pub fn new(l: [u64; 7]) -> Result<Self> {
        if l[0] == 0 {
            return Err(invalid("l1 must be nonzero"));
        }
        if l[1] == l[2] || l[3] == l[4] || l[5] == l[6] {
            return Err(invalid("need l2 != l3, l4 != l5 and l6 != l7"));
        }
        Ok(Self { l })
    }

    /// `L₁, L₂` at `(m, n)` and `L₁′ = (m′+l₄n′)(m′+l₅n′)`, `L₂′ = (m′+l₆n′)(m′+l₇n′)` at `(m′, n′)`.
    pub fn products(&self, m: u64, n: u64, mp: u64, np: u64) -> Result<LinearProducts> {
        let l = self.l;
        Ok(LinearProducts {
            l1: pair_product(m, n, 0, l[0])?,
            l2: pair_product(m, n, l[1], l[2])?,
            l1p: pair_product(mp, np, l[3], l[4])?,
            l2p: pair_product(mp, np, l[5], l[6])?,
        })
    }
}

impl FromStr for PatternThreeTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = non_negative(&parse_list(s)?)?;
        let l: [u64; 7] = v.try_into().map_err(|_| invalid("a three-term pattern needs 7 coefficients"))?;
        Self::new(l)
    }
}

/// `L₁(m,n) = m(m+l₁n)` and `L₂(m,n) = (m+l₂n)(m+l₃n)`.
pub fn linear_products(m: u64, n: u64, pat: &PatternTwoTerm) -> Result<(u128, u128)> {
    pat.products(m, n)
}

/// `R(m,n) = L₂/L₁` in lowest terms.
pub fn ratio(m: u64, n: u64, pat: &PatternTwoTerm) -> Result<Ratio<u128>> {
    if m == 0 {
        return Err(invalid("m = 0 makes L1 vanish"));
    }
    let (l1, l2) = pat.products(m, n)?;
    Ok(Ratio::new(l2, l1))
}

/// `Θ_N = {(m,n) ∈ [N]² : 1 ≤ m + l·n ≤ N for every listed l}`, walked
/// row by row in `n` with the admissible `m` interval per row.
#[derive(Debug, Clone)]
pub struct ThetaDomain {
    rows: Vec<(u64, u64, u64)>,
}

impl ThetaDomain {
    pub fn new(n: u64, ls: &[i64]) -> Self {
        let n_i = i128::from(n);
        let rows = (1..=n)
            .filter_map(|row| {
                let r = i128::from(row);
                let mut lo = 1i128;
                let mut hi = n_i;
                for &l in ls {
                    lo = lo.max(1 - i128::from(l) * r);
                    hi = hi.min(n_i - i128::from(l) * r);
                }
                (lo <= hi).then_some((row, lo as u64, hi as u64))
            })
            .collect();
        Self { rows }
    }

    pub fn count(&self) -> u64 {
        self.rows.iter().map(|&(_, lo, hi)| hi - lo + 1).sum()
    }

    /// Pairs `(m, n)`, ordered by `n` then `m`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.rows.iter().flat_map(|&(n, lo, hi)| (lo..=hi).map(move |m| (m, n)))
    }
}

pub fn theta_domain(n: u64, ls: &[i64]) -> ThetaDomain {
    ThetaDomain::new(n, ls)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoTermWitness {
    pub m: u64,
    pub n: u64,
    pub products: [u128; 2],
}

fn first_some<T: Send>(it: impl ParallelIterator<Item = Result<Option<T>>>) -> Result<Option<T>> {
    it.find_first(|r| !matches!(r, Ok(None))).unwrap_or(Ok(None))
}

/// Least `(n, m)` with `L₁ ≠ L₂` and both in `E`.
pub fn search_two_term(set: &SubsetMask, pat: &PatternTwoTerm, m_max: u64, n_max: u64) -> Result<Option<TwoTermWitness>> {
    first_some((1..=n_max).into_par_iter().map(|n| {
        for m in 1..=m_max {
            let (l1, l2) = pat.products(m, n)?;
            if l1 != l2 && set.contains_wide(l1) && set.contains_wide(l2) {
                return Ok(Some(TwoTermWitness { m, n, products: [l1, l2] }));
            }
        }
        Ok(None)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThreeTermBounds {
    pub m_max: u64,
    pub n_max: u64,
    pub mp_max: u64,
    pub np_max: u64,
}

impl ThreeTermBounds {
    pub fn uniform(b: u64) -> Self {
        Self { m_max: b, n_max: b, mp_max: b, np_max: b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThreeTermWitness {
    pub m: u64,
    pub n: u64,
    pub mp: u64,
    pub np: u64,
    /// `(L₁L₁′, L₁L₂′, L₂L₂′)`.
    pub products: [u128; 3],
}

/// `(L₁L₁′, L₁L₂′, L₂L₂′)`, or `None` when one of them leaves 128 bits.
pub fn three_term_products(p: &LinearProducts) -> Option<[u128; 3]> {
    Some([p.l1.checked_mul(p.l1p)?, p.l1.checked_mul(p.l2p)?, p.l2.checked_mul(p.l2p)?])
}

/// Least `(n, m, n′, m′)` whose three products are pairwise distinct members of `E`.
pub fn search_three_term(set: &SubsetMask, pat: &PatternThreeTerm, bounds: ThreeTermBounds) -> Result<Option<ThreeTermWitness>> {
    let cap = u128::from(set.n_max());
    first_some((1..=bounds.n_max).into_par_iter().map(|n| {
        for m in 1..=bounds.m_max {
            for np in 1..=bounds.np_max {
                for mp in 1..=bounds.mp_max {
                    let lp = pat.products(m, n, mp, np)?;
                    // Products above n_max (or above u128) cannot be members.
                    let Some(q) = three_term_products(&lp) else { continue };
                    if q.iter().any(|&v| v > cap) {
                        continue;
                    }
                    if q[0] != q[1] && q[0] != q[2] && q[1] != q[2] && q.iter().all(|&v| set.contains_wide(v)) {
                        return Ok(Some(ThreeTermWitness { m, n, mp, np, products: q }));
                    }
                }
            }
        }
        Ok(None)
    }))
}

/// Recomputes a two-term witness from scratch.
pub fn recheck_two_term(set: &SubsetMask, pat: &PatternTwoTerm, w: &TwoTermWitness) -> bool {
    let l1 = u128::from(w.m) * (u128::from(w.m) + u128::from(pat.l1) * u128::from(w.n));
    let l2 = (u128::from(w.m) + u128::from(pat.l2) * u128::from(w.n)) * (u128::from(w.m) + u128::from(pat.l3) * u128::from(w.n));
    [l1, l2] == w.products && l1 != l2 && set.contains_wide(l1) && set.contains_wide(l2)
}

/// Recomputes a three-term witness from scratch.
pub fn recheck_three_term(set: &SubsetMask, pat: &PatternThreeTerm, w: &ThreeTermWitness) -> bool {
    let lin = |m: u64, n: u64, l: u64| u128::from(m) + u128::from(l) * u128::from(n);
    let l = pat.l;
    let l1 = lin(w.m, w.n, 0) * lin(w.m, w.n, l[0]);
    let l2 = lin(w.m, w.n, l[1]) * lin(w.m, w.n, l[2]);
    let l1p = lin(w.mp, w.np, l[3]) * lin(w.mp, w.np, l[4]);
    let l2p = lin(w.mp, w.np, l[5]) * lin(w.mp, w.np, l[6]);
    let q = [l1 * l1p, l1 * l2p, l2 * l2p];
    q == w.products && q[0] != q[1] && q[0] != q[2] && q[1] != q[2] && q.iter().all(|&v| set.contains_wide(v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub density: f64,
    pub found: bool,
    /// Scan position of the witness (1-based, `n`-major), or the full scan length.
    pub steps: u64,
    pub m: Option<u64>,
    pub n: Option<u64>,
    /// Last-stage multiplicative density estimate of the sampled set, when requested.
    pub mult_density: Option<f64>,
}

/// Witness search over random sets of each density; the set for the `i`-th
/// density is drawn from the sub-seed `derive_seed(seed, i)`.
pub fn density_profile(
    densities: &[f64],
    seed: u64,
    universe: u64,
    pat: &PatternTwoTerm,
    m_max: u64,
    n_max: u64,
    folner: Option<&FolnerSpec>,
) -> Result<Vec<ProfileRow>> {
    densities
        .iter()
        .enumerate()
        .map(|(i, &density)| {
            let set = SubsetMask::random(density, derive_seed(seed, i as u64), universe)?;
            let w = search_two_term(&set, pat, m_max, n_max)?;
            let mult_density = match folner {
                Some(spec) => mult_density_estimate(&set, std::slice::from_ref(spec))?.stages.last().map(|s| s.estimate),
                None => None,
            };
            Ok(ProfileRow {
                density,
                found: w.is_some(),
                steps: w.map_or(m_max * n_max, |w| (w.n - 1) * m_max + w.m),
                m: w.map(|w| w.m),
                n: w.map(|w| w.n),
                mult_density,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        let p = PatternTwoTerm::new(1, 2, 3).unwrap();
        assert_eq!(p.products(1, 1).unwrap(), (2, 12));
        let (l1, l2) = p.products(7, 0).unwrap();
        assert_eq!((l1, l2), (49, 49));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio(1, 1, &PatternTwoTerm::new(1, 2, 3).unwrap()).unwrap(), Ratio::from_integer(6));
        assert_eq!(ratio(5, 3, &PatternTwoTerm::new(4, 0, 4).unwrap()).unwrap(), Ratio::from_integer(1));
        assert_eq!(ratio(2, 1, &PatternTwoTerm::new(1, 0, 3).unwrap()).unwrap(), Ratio::new(5, 3));
        assert!(ratio(0, 1, &PatternTwoTerm::new(1, 0, 3).unwrap()).is_err());
    }

    #[test]
    fn pattern_validation() {
        assert!(PatternTwoTerm::new(0, 1, 2).is_err());
        assert!(PatternTwoTerm::new(1, 2, 2).is_err());
        assert!("1,-1,2".parse::<PatternTwoTerm>().is_err());
        assert!("1,0".parse::<PatternTwoTerm>().is_err());
        assert!("1,0,2,0,2,1,3".parse::<PatternThreeTerm>().is_ok());
        assert!("0,0,2,0,2,1,3".parse::<PatternThreeTerm>().is_err());
        assert!("1,0,2,2,2,1,3".parse::<PatternThreeTerm>().is_err());
        assert!("1,0,2,0,2,3,3".parse::<PatternThreeTerm>().is_err());
    }

    #[test]
    fn theta_examples() {
        let t = theta_domain(2, &[1]);
        assert_eq!(t.iter().collect::<Vec<_>>(), vec![(1, 1)]);
        assert_eq!(theta_domain(7, &[]).count(), 49);
    }

    #[test]
    fn two_term_examples() {
        let full = SubsetMask::full(100);
        let w = search_two_term(&full, &PatternTwoTerm::new(1, 0, 2).unwrap(), 100, 100).unwrap().unwrap();
        assert_eq!((w.m, w.n, w.products), (1, 1, [2, 3]));
        assert_eq!(search_two_term(&SubsetMask::empty(100), &PatternTwoTerm::new(1, 0, 2).unwrap(), 100, 100).unwrap(), None);
    }

    #[test]
    fn three_term_examples() {
        let pat: PatternThreeTerm = "1,0,2,0,2,1,3".parse().unwrap();
        let lp = pat.products(1, 1, 1, 1).unwrap();
        assert_eq!((lp.l1, lp.l2, lp.l1p, lp.l2p), (2, 3, 3, 8));
        let full = SubsetMask::full(1_000_000);
        let w = search_three_term(&full, &pat, ThreeTermBounds::uniform(10)).unwrap().unwrap();
        assert_eq!((w.m, w.n, w.mp, w.np, w.products), (1, 1, 1, 1, [6, 16, 24]));
        let even = SubsetMask::multiples(2, 1_000_000).unwrap();
        assert_eq!(search_three_term(&even, &pat, ThreeTermBounds::uniform(10)).unwrap().unwrap().products, [6, 16, 24]);
        assert_eq!(search_three_term(&SubsetMask::empty(1000), &pat, ThreeTermBounds::uniform(10)).unwrap(), None);
    }

    #[test]
    fn profile_extremes() {
        let pat = PatternTwoTerm::new(1, 0, 2).unwrap();
        let rows = density_profile(&[1.0, 0.0], 42, 1000, &pat, 30, 30, None).unwrap();
        assert!(rows[0].found && rows[0].steps == 1);
        assert!(!rows[1].found && rows[1].steps == 900);
    }
}
