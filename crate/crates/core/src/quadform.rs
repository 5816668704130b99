//! Quadratic forms `p(x,y,z) = ax² + by² + cz² + dxy + exz + fyz`, the
//! three-discriminant admissibility test and monochromatic-solution searches.
//!
//! Every search returns the lexicographically least witness in its stated
//! order, so results are deterministic and checkable by brute force.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::exact_sqrt;
use crate::error::{invalid, Error, Result};

/// Coloring enumeration limit (`r^{N−1}` after fixing the color of 1).
pub const PR_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub e: i64,
    pub f: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Discriminants {
    pub d1: i128,
    pub d2: i128,
    pub d3: i128,
}

impl Discriminants {
    pub fn as_array(&self) -> [i128; 3] {
        [self.d1, self.d2, self.d3]
    }
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} exceeds 128-bit range"))
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(invalid("coefficients a, b, c must be nonzero"));
        }
        Ok(Self { a, b, c, d, e, f })
    }

    pub fn coefficients(&self) -> [i64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn evaluate(&self, x: i128, y: i128, z: i128) -> Result<i128> {
        let terms = [
            (self.a, x, x),
            (self.b, y, y),
            (self.c, z, z),
            (self.d, x, y),
            (self.e, x, z),
            (self.f, y, z),
        ];
        terms.iter().try_fold(0i128, |acc, &(k, u, v)| {
            i128::from(k)
                .checked_mul(u)
                .and_then(|t| t.checked_mul(v))
                .and_then(|t| acc.checked_add(t))
                .ok_or_else(|| overflow("form value"))
        })
    }

    /// `∇₁ = e² − 4ac`, `∇₂ = f² − 4bc`, `∇₃ = (e+f)² − 4c(a+b+d)`.
    pub fn discriminants(&self) -> Discriminants {
        let [a, b, c, d, e, f] = self.coefficients().map(i128::from);
        Discriminants {
            d1: e * e - 4 * a * c,
            d2: f * f - 4 * b * c,
            d3: (e + f) * (e + f) - 4 * c * (a + b + d),
        }
    }

    /// All three discriminants are nonzero perfect squares.
    pub fn is_admissible(&self) -> bool {
        self.discriminants().as_array().iter().all(|&v| v > 0 && exact_sqrt(v).is_some())
    }

    /// The same form with the roles of x and y exchanged.
    pub fn swap_xy(&self) -> Self {
        Self { a: self.b, b: self.a, c: self.c, d: self.d, e: self.f, f: self.e }
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{},{}", self.a, self.b, self.c, self.d, self.e, self.f)
    }
}

impl FromStr for QuadraticForm {
    type Err = Error;

    /// Six comma-separated integers `a,b,c,d,e,f`.
    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| invalid(format!("bad coefficient {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        match v[..] {
            [a, b, c, d, e, f] => Self::new(a, b, c, d, e, f),
            _ => Err(invalid(format!("a form needs 6 coefficients, got {}", v.len()))),
        }
    }
}

/// Positive solutions `(x, y)`, `x ≠ y`, `y ≤ y_max`, of `p(x, y, n) = 0`,
/// sorted by `(y, x)`.
pub fn solve_fixed_n(p: &QuadraticForm, n: u64, y_max: u64) -> Result<Vec<(u64, u64)>> {
    let [a, b, c, d, e, f] = p.coefficients().map(i128::from);
    let n = i128::from(n);
    let mut out = Vec::new();
    for y in 1..=i128::from(y_max) {
        // a·x² + (dy + en)·x + (by² + cn² + fyn) = 0
        let lin = d
            .checked_mul(y)
            .and_then(|t| e.checked_mul(n).and_then(|u| t.checked_add(u)))
            .ok_or_else(|| overflow("linear coefficient"))?;
        let cst = [(b, y, y), (c, n, n), (f, y, n)]
            .iter()
            .try_fold(0i128, |acc, &(k, u, v)| k.checked_mul(u)?.checked_mul(v)?.checked_add(acc))
            .ok_or_else(|| overflow("constant coefficient"))?;
        let disc = lin
            .checked_mul(lin)
            .and_then(|sq| a.checked_mul(cst)?.checked_mul(4).and_then(|t| sq.checked_sub(t)))
            .ok_or_else(|| overflow("discriminant"))?;
        let Some(root) = exact_sqrt(disc) else { continue };
        for num in [-lin - root, -lin + root] {
            let den = 2 * a;
            if num % den == 0 {
                let x = num / den;
                if x >= 1 && x != y {
                    out.push((x as u64, y as u64));
                }
            }
        }
    }
    out.sort_unstable_by_key(|&(x, y)| (y, x));
    out.dedup();
    Ok(out)
}

/// An assignment of cells `0..r` to the integers `1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub r: u32,
    pub cells: Vec<u32>,
}

impl Coloring {
    pub fn new(cells: Vec<u32>, r: u32) -> Result<Self> {
        if let Some((i, c)) = cells.iter().enumerate().find(|(_, &c)| c >= r) {
            return Err(invalid(format!("cell {c} of integer {} is not below r = {r}", i + 1)));
        }
        Ok(Self { r, cells })
    }

    /// Every integer in one cell.
    pub fn trivial(n_max: u64) -> Self {
        Self { r: 1, cells: vec![0; n_max as usize] }
    }

    pub fn from_fn(n_max: u64, r: u32, cell: impl Fn(u64) -> u32) -> Result<Self> {
        Self::new((1..=n_max).map(cell).collect(), r)
    }

    /// One cell index per line; line `i` colors integer `i`. Blank lines are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let cells = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<u32>().map_err(|_| invalid(format!("bad cell index {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let r = cells.iter().max().map_or(1, |m| m + 1);
        Self::new(cells, r)
    }

    pub fn to_text(&self) -> String {
        self.cells.iter().map(|c| format!("{c}\n")).collect()
    }

    pub fn n_max(&self) -> u64 {
        self.cells.len() as u64
    }

    #[inline]
    pub fn cell(&self, v: u64) -> Option<u32> {
        if v == 0 {
            return None;
        }
        self.cells.get(v as usize - 1).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MonochromaticWitness {
    pub x: u64,
    pub y: u64,
    pub n: u64,
    pub cell: u32,
}

fn first_ok<T: Send>(results: impl ParallelIterator<Item = Result<Option<T>>>) -> Result<Option<T>> {
    results.find_first(|r| !matches!(r, Ok(None))).unwrap_or(Ok(None))
}

/// Least `(n, y, x)` with `x ≠ y` in the same cell and `p(x, y, n) = 0`.
pub fn monochromatic_search(p: &QuadraticForm, coloring: &Coloring, n_max: u64) -> Result<Option<MonochromaticWitness>> {
    let bound = coloring.n_max();
    first_ok((1..=n_max).into_par_iter().map(|n| {
        Ok(solve_fixed_n(p, n, bound)?.into_iter().find_map(|(x, y)| {
            let cx = coloring.cell(x)?;
            (coloring.cell(y)? == cx).then_some(MonochromaticWitness { x, y, n, cell: cx })
        }))
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrCheck {
    pub n: u64,
    pub r: u32,
    /// Every r-coloring of `[1..n]` has a monochromatic solution.
    pub regular: bool,
    /// A coloring avoiding all monochromatic solutions, when one exists.
    pub witness: Option<Coloring>,
    /// Partial colorings visited by the search.
    pub nodes: u64,
}

/// Pairs `{x, y}` with `x ≠ y ≤ N` solving `p(x, y, n) = 0` for some `n ≤ N`,
/// stored as `lower[v] = [u < v …]`.
fn solution_graph(p: &QuadraticForm, n: u64) -> Result<Vec<Vec<u64>>> {
    let mut lower = vec![Vec::new(); n as usize + 1];
    for z in 1..=n {
        for (x, y) in solve_fixed_n(p, z, n)? {
            if x <= n {
                let (lo, hi) = (x.min(y), x.max(y));
                lower[hi as usize].push(lo);
            }
        }
    }
    for list in &mut lower {
        list.sort_unstable();
        list.dedup();
    }
    Ok(lower)
}

/// Decides partition regularity of `p` restricted to `[1..N]` with `r` cells.
///
/// Colorings are enumerated depth-first over `1, 2, …, N` in canonical form
/// (cells introduced in order of first use, so the color of 1 is fixed) and
/// pruned as soon as an assigned pair is monochromatic. The first surviving
/// full coloring is the witness.
pub fn exhaustive_pr_check(p: &QuadraticForm, r: u32, n: u64) -> Result<PrCheck> {
    if r == 0 {
        return Err(invalid("need at least one cell"));
    }
    let size = u128::from(r).checked_pow(n.saturating_sub(1) as u32).unwrap_or(u128::MAX);
    if n > u64::from(u32::MAX) || size > PR_BUDGET {
        return Err(Error::BudgetExceeded { what: "coloring enumeration", size, limit: PR_BUDGET });
    }
    let lower = solution_graph(p, n)?;
    let mut colors = vec![0u32; n as usize + 1];
    let mut nodes = 0u64;

    fn extend(v: u64, used: u32, r: u32, n: u64, lower: &[Vec<u64>], colors: &mut [u32], nodes: &mut u64) -> bool {
        if v > n {
            return true;
        }
        for c in 0..r.min(used + 1) {
            *nodes += 1;
            if lower[v as usize].iter().any(|&u| colors[u as usize] == c) {
                continue;
            }
            colors[v as usize] = c;
            if extend(v + 1, used.max(c + 1), r, n, lower, colors, nodes) {
                return true;
            }
        }
        false
    }

    let found = extend(1, 0, r, n, &lower, &mut colors, &mut nodes);
    let witness = found.then(|| Coloring { r, cells: colors[1..].to_vec() });
    Ok(PrCheck { n, r, regular: !found, witness, nodes })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrThreshold {
    pub r: u32,
    /// Least N at which every r-coloring has a monochromatic solution.
    pub least_n: Option<u64>,
    /// `(N, regular)` for every N examined.
    pub checks: Vec<(u64, bool)>,
    /// The enumeration budget stopped the scan before `n_limit`.
    pub budget_exhausted: bool,
}

/// Runs `exhaustive_pr_check` for `N = 1, 2, …` up to `n_limit`.
pub fn pr_threshold(p: &QuadraticForm, r: u32, n_limit: u64) -> Result<PrThreshold> {
    let mut checks = Vec::new();
    for n in 1..=n_limit {
        match exhaustive_pr_check(p, r, n) {
            Ok(c) => {
                checks.push((n, c.regular));
                if c.regular {
                    return Ok(PrThreshold { r, least_n: Some(n), checks, budget_exhausted: false });
                }
            }
            Err(Error::BudgetExceeded { .. }) => {
                return Ok(PrThreshold { r, least_n: None, checks, budget_exhausted: true })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PrThreshold { r, least_n: None, checks, budget_exhausted: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimultaneousBounds {
    /// Bound on x, y, x′, y′.
    pub x_max: u64,
    /// Bound on n, n′.
    pub n_max: u64,
    pub k_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimultaneousWitness {
    pub x: u64,
    pub y: u64,
    pub n: u64,
    pub xp: u64,
    pub yp: u64,
    pub np: u64,
    pub k: u64,
    /// `(x·x′/k, x·y′/k, y·y′/k)`.
    pub quotients: [u64; 3],
    pub cell: u32,
}

impl SimultaneousWitness {
    fn order_key(&self) -> (u64, u64, u64, u64, u64, u64, u64) {
        (self.n, self.np, self.y, self.yp, self.k, self.x, self.xp)
    }
}

fn quotients(x: u64, y: u64, xp: u64, yp: u64, k: u64, coloring: &Coloring) -> Option<([u64; 3], u32)> {
    let mut q = [0u64; 3];
    for (slot, (u, v)) in q.iter_mut().zip([(x, xp), (x, yp), (y, yp)]) {
        let prod = u128::from(u) * u128::from(v);
        if prod % u128::from(k) != 0 {
            return None;
        }
        *slot = u64::try_from(prod / u128::from(k)).ok()?;
    }
    if q[0] == q[1] || q[0] == q[2] || q[1] == q[2] {
        return None;
    }
    let cell = coloring.cell(q[0])?;
    (coloring.cell(q[1])? == cell && coloring.cell(q[2])? == cell).then_some((q, cell))
}

/// Solutions of both forms plus a divisor `k` whose three quotients
/// `xx′/k, xy′/k, yy′/k` are distinct and share a cell. Least in the order
/// `(n, n′, y, y′, k)`, ties broken by `x` then `x′`.
pub fn simultaneous_pr_search(
    p1: &QuadraticForm,
    p2: &QuadraticForm,
    coloring: &Coloring,
    bounds: SimultaneousBounds,
) -> Result<Option<SimultaneousWitness>> {
    if coloring.n_max() == 0 {
        return Ok(None);
    }
    let within = |sols: Vec<(u64, u64)>| -> Vec<(u64, u64)> {
        sols.into_iter().filter(|&(x, _)| x <= bounds.x_max).collect()
    };
    let second: Vec<Vec<(u64, u64)>> = (1..=bounds.n_max)
        .map(|np| solve_fixed_n(p2, np, bounds.x_max).map(within))
        .collect::<Result<_>>()?;
    first_ok((1..=bounds.n_max).into_par_iter().map(|n| {
        let first = within(solve_fixed_n(p1, n, bounds.x_max)?);
        for (np, sols2) in (1..).zip(&second) {
            let mut best: Option<SimultaneousWitness> = None;
            for &(x, y) in &first {
                for &(xp, yp) in sols2 {
                    for k in 1..=bounds.k_max {
                        if let Some((quotients, cell)) = quotients(x, y, xp, yp, k, coloring) {
                            let w = SimultaneousWitness { x, y, n, xp, yp, np, k, quotients, cell };
                            if best.is_none_or(|b| w.order_key() < b.order_key()) {
                                best = Some(w);
                            }
                        }
                    }
                }
            }
            if best.is_some() {
                return Ok(best);
            }
        }
        Ok(None)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_form() -> QuadraticForm {
        "1,1,-1,2,0,0".parse().unwrap()
    }

    fn pythagoras() -> QuadraticForm {
        "1,1,-1,0,0,0".parse().unwrap()
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(sum_form().discriminants().as_array(), [4, 4, 16]);
        assert_eq!(pythagoras().discriminants().as_array(), [4, 4, 8]);
        let definite: QuadraticForm = "1,1,1,0,0,0".parse().unwrap();
        assert_eq!(definite.discriminants().as_array(), [-4, -4, -8]);
        assert!(sum_form().is_admissible());
        assert!(!pythagoras().is_admissible());
        assert!(!definite.is_admissible());
    }

    #[test]
    fn form_parsing() {
        assert!("0,1,1,0,0,0".parse::<QuadraticForm>().is_err());
        assert!("1,1,1".parse::<QuadraticForm>().is_err());
        assert!("1,1,x,0,0,0".parse::<QuadraticForm>().is_err());
        assert_eq!(sum_form().to_string(), "1,1,-1,2,0,0");
    }

    #[test]
    fn solutions_for_fixed_n() {
        assert_eq!(solve_fixed_n(&sum_form(), 5, 10).unwrap(), vec![(4, 1), (3, 2), (2, 3), (1, 4)]);
        assert_eq!(solve_fixed_n(&pythagoras(), 5, 10).unwrap(), vec![(4, 3), (3, 4)]);
        assert!(solve_fixed_n(&sum_form(), 1, 10).unwrap().is_empty());
        let huge = QuadraticForm::new(i64::MAX, i64::MAX, i64::MAX, i64::MAX, i64::MAX, i64::MAX).unwrap();
        assert!(matches!(solve_fixed_n(&huge, u64::MAX, 2), Err(Error::Overflow(_))));
    }

    #[test]
    fn monochromatic_examples() {
        let w = monochromatic_search(&sum_form(), &Coloring::trivial(10), 10).unwrap().unwrap();
        assert_eq!((w.n, w.y, w.x), (3, 1, 2));
        assert_eq!(monochromatic_search(&sum_form(), &Coloring::trivial(10), 0).unwrap(), None);
        let parity = Coloring::from_fn(20, 2, |x| (x % 2) as u32).unwrap();
        let w = monochromatic_search(&sum_form(), &parity, 20).unwrap().unwrap();
        assert_eq!((w.x, w.y, w.n, w.cell), (3, 1, 4, 1));
    }

    #[test]
    fn coloring_text_roundtrip() {
        let c = Coloring::parse_text("0\n1\n\n2\n").unwrap();
        assert_eq!(c.r, 3);
        assert_eq!(c.cells, vec![0, 1, 2]);
        assert_eq!(Coloring::parse_text(&c.to_text()).unwrap(), c);
        assert!(Coloring::new(vec![0, 3], 3).is_err());
        assert!(Coloring::parse_text("a").is_err());
    }

    #[test]
    fn small_pr_checks() {
        let two_three = exhaustive_pr_check(&sum_form(), 2, 3).unwrap();
        assert!(!two_three.regular);
        let w = two_three.witness.unwrap();
        assert_ne!(w.cell(1), w.cell(2));
        assert!(exhaustive_pr_check(&sum_form(), 1, 3).unwrap().regular);
        assert!(matches!(exhaustive_pr_check(&sum_form(), 3, 40), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn simultaneous_examples() {
        let w = simultaneous_pr_search(
            &sum_form(),
            &sum_form(),
            &Coloring::trivial(100),
            SimultaneousBounds { x_max: 10, n_max: 10, k_max: 10 },
        )
        .unwrap()
        .unwrap();
        assert_eq!((w.n, w.np, w.k), (3, 3, 1));
        let mut q = w.quotients;
        q.sort_unstable();
        assert_eq!(q, [1, 2, 4]);

        let none = simultaneous_pr_search(
            &sum_form(),
            &sum_form(),
            &Coloring::trivial(0),
            SimultaneousBounds { x_max: 10, n_max: 10, k_max: 10 },
        )
        .unwrap();
        assert_eq!(none, None);
    }
}
