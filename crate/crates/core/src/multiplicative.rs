//! Unimodular completely multiplicative functions, their truncations to
//! Z/Ñ, multiplicative Følner boxes and finite-stage density estimates.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{derive_seed, factorize, is_prime};
use crate::cyclic::{e, truncate_embed, CyclicSignal};
use crate::error::{invalid, Error, Result};
use crate::subset::SubsetMask;

/// Largest Følner box we are willing to materialize.
pub const FOLNER_BUDGET: u128 = 10_000_000;

/// Largest modulus accepted by the `character(q, j)` catalogue entry.
pub const CHARACTER_MODULUS_LIMIT: u64 = 1_000_000;

/// The unit complex number `e(turns)`, exact on quarter turns.
pub fn unit_from_turns(turns: f64) -> Complex64 {
    let t = turns.rem_euclid(1.0);
    let quarter = t * 4.0;
    if quarter.fract() == 0.0 {
        return match quarter as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    e(t)
}

#[derive(Clone)]
enum PhaseRule {
    /// The same phase at every prime.
    Constant(f64),
    /// Independent uniform phase per prime, a pure function of `(seed, p)`.
    Random(u64),
    /// `p ↦ e(j·ind_g(p)/φ(q))` for `p ∤ q`, and 1 for `p | q`.
    Character { q: u64, j: u64, phi: u64, dlog: Arc<Vec<u64>> },
}

impl PhaseRule {
    fn turns(&self, p: u64) -> f64 {
        match self {
            Self::Constant(t) => *t,
            Self::Random(seed) => (derive_seed(*seed, p) >> 11) as f64 / (1u64 << 53) as f64,
            Self::Character { q, j, phi, dlog } => {
                if p.is_multiple_of(*q) {
                    0.0
                } else {
                    let idx = dlog[(p % q) as usize];
                    ((*j as u128 * idx as u128) % *phi as u128) as f64 / *phi as f64
                }
            }
        }
    }
}

/// A completely multiplicative `χ: N → S¹`, i.e. a point of the dual of (Q⁺, ·).
///
/// Phases are stored in turns; listed primes override the rule.
#[derive(Clone)]
pub struct MultiplicativeFunction {
    rule: PhaseRule,
    overrides: BTreeMap<u64, f64>,
    name: Option<String>,
}

impl fmt::Debug for MultiplicativeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunction")
            .field("name", &self.label())
            .field("overrides", &self.overrides)
            .finish()
    }
}

impl MultiplicativeFunction {
    pub fn one() -> Self {
        Self { rule: PhaseRule::Constant(0.0), overrides: BTreeMap::new(), name: Some("one".into()) }
    }

    /// Liouville's λ: every prime maps to −1.
    pub fn liouville() -> Self {
        Self { rule: PhaseRule::Constant(0.5), overrides: BTreeMap::new(), name: Some("liouville".into()) }
    }

    /// Every prime maps to `e(turns)`.
    pub fn constant_phase(turns: f64) -> Result<Self> {
        if !turns.is_finite() {
            return Err(invalid("phase must be finite"));
        }
        Ok(Self { rule: PhaseRule::Constant(turns.rem_euclid(1.0)), overrides: BTreeMap::new(), name: None })
    }

    pub fn random(seed: u64) -> Self {
        Self { rule: PhaseRule::Random(seed), overrides: BTreeMap::new(), name: Some(format!("random({seed})")) }
    }

    /// Unimodular lift of the Dirichlet character of index `j` modulo `q`;
    /// `q` must have a primitive root (2, 4, p^k or 2p^k).
    pub fn character(q: u64, j: u64) -> Result<Self> {
        if !(2..=CHARACTER_MODULUS_LIMIT).contains(&q) {
            return Err(invalid(format!("character modulus must lie in 2..={CHARACTER_MODULUS_LIMIT}")));
        }
        let units: Vec<u64> = (1..q).filter(|&a| num_integer::gcd(a, q) == 1).collect();
        let phi = units.len() as u64;
        let generator = units
            .iter()
            .copied()
            .find(|&g| {
                let mut x = 1u64;
                (1..=phi).all(|k| {
                    x = x * g % q;
                    x != 1 || k == phi
                })
            })
            .ok_or_else(|| invalid(format!("(Z/{q})^* is not cyclic")))?;
        let mut dlog = vec![0u64; q as usize];
        let mut x = 1u64;
        for k in 0..phi {
            dlog[x as usize] = k;
            x = x * generator % q;
        }
        Ok(Self {
            rule: PhaseRule::Character { q, j: j % phi, phi, dlog: Arc::new(dlog) },
            overrides: BTreeMap::new(),
            name: Some(format!("character({q},{j})")),
        })
    }

    /// Finitely many prescribed primes (phases in turns), 1 elsewhere.
    pub fn from_prime_phases(phases: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut f = Self { rule: PhaseRule::Constant(0.0), overrides: BTreeMap::new(), name: None };
        for (p, t) in phases {
            f = f.with_phase(p, t)?;
        }
        Ok(f)
    }

    pub fn with_phase(mut self, p: u64, turns: f64) -> Result<Self> {
        if !is_prime(p) {
            return Err(invalid(format!("{p} is not prime")));
        }
        if !turns.is_finite() {
            return Err(invalid("phase must be finite"));
        }
        self.overrides.insert(p, turns.rem_euclid(1.0));
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => self.overrides.iter().map(|(p, t)| format!("{p}:{t}")).collect::<Vec<_>>().join(","),
        }
    }

    /// Phase of `χ(p)` in turns.
    pub fn prime_turns(&self, p: u64) -> f64 {
        self.overrides.get(&p).copied().unwrap_or_else(|| self.rule.turns(p))
    }

    pub fn prime_value(&self, p: u64) -> Complex64 {
        unit_from_turns(self.prime_turns(p))
    }

    /// `χ(n) = Π χ(p)^{v_p(n)}`.
    pub fn evaluate(&self, n: u64) -> Result<Complex64> {
        if n == 0 {
            return Err(invalid("multiplicative functions are defined on n >= 1"));
        }
        let turns: f64 = factorize(n)
            .into_iter()
            .map(|(p, k)| (f64::from(k) * self.prime_turns(p)).rem_euclid(1.0))
            .sum();
        Ok(unit_from_turns(turns))
    }

    /// `χ_N` on Z/Ñ: `χ(n)` for `1 ≤ n ≤ N`, zero elsewhere.
    pub fn truncation(&self, n: u64, modulus: u64) -> Result<CyclicSignal> {
        let values = (1..=n).map(|k| self.evaluate(k)).collect::<Result<Vec<_>>>()?;
        truncate_embed(&values, modulus as usize)
    }
}

impl FromStr for MultiplicativeFunction {
    type Err = Error;

    /// `one`, `liouville`, `random(seed)`, `character(q,j)` or a list of
    /// `prime:turns` pairs such as `2:0.5,3:0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let call = |name: &str| -> Option<Vec<&str>> {
            let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(inner.split(',').map(str::trim).collect())
        };
        let int = |v: &str| v.parse::<u64>().map_err(|_| invalid(format!("bad integer {v:?} in {s:?}")));
        match s {
            "one" => return Ok(Self::one()),
            "liouville" => return Ok(Self::liouville()),
            _ => {}
        }
        if let Some(args) = call("random") {
            if let [seed] = args[..] {
                return Ok(Self::random(int(seed)?));
            }
        }
        if let Some(args) = call("character") {
            if let [q, j] = args[..] {
                return Self::character(int(q)?, int(j)?);
            }
        }
        if s.is_empty() {
            return Err(invalid("empty multiplicative function spec"));
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let (p, t) = item
                .split_once(':')
                .ok_or_else(|| invalid(format!("unknown multiplicative function {s:?}")))?;
            let t: f64 = t.trim().parse().map_err(|_| invalid(format!("bad phase {t:?}")))?;
            pairs.push((int(p.trim())?, t));
        }
        Ok(Self::from_prime_phases(pairs)?.with_name(s))
    }
}

/// The box `{Π p_i^{e_i} : 0 ≤ e_i ≤ E}` over a fixed list of primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolnerSpec {
    pub primes: Vec<u64>,
    pub max_exponent: u32,
}

impl FolnerSpec {
    pub fn new(primes: Vec<u64>, max_exponent: u32) -> Result<Self> {
        let mut seen = HashSet::new();
        for &p in &primes {
            if !is_prime(p) {
                return Err(invalid(format!("{p} is not prime")));
            }
            if !seen.insert(p) {
                return Err(invalid(format!("prime {p} listed twice")));
            }
        }
        Ok(Self { primes, max_exponent })
    }

    /// The first `k` primes with exponents up to `max_exponent`.
    pub fn first_primes(k: usize, max_exponent: u32) -> Self {
        let primes = (2u64..).filter(|&p| is_prime(p)).take(k).collect();
        Self { primes, max_exponent }
    }

    pub fn size(&self) -> Option<u128> {
        u128::from(self.max_exponent + 1).checked_pow(self.primes.len() as u32)
    }

    fn nested_in(&self, next: &Self) -> bool {
        self.max_exponent <= next.max_exponent && self.primes.iter().all(|p| next.primes.contains(p))
    }
}

/// Members of the Følner box, sorted ascending.
pub fn folner_set(spec: &FolnerSpec) -> Result<Vec<u64>> {
    let size = spec
        .size()
        .filter(|&s| s <= FOLNER_BUDGET)
        .ok_or(Error::BudgetExceeded { what: "Følner box", size: spec.size().unwrap_or(u128::MAX), limit: FOLNER_BUDGET })?;
    let mut members = Vec::with_capacity(size as usize);
    members.push(1u64);
    for &p in &spec.primes {
        let mut next = Vec::with_capacity(members.len() * (spec.max_exponent as usize + 1));
        for &base in &members {
            let mut v = base;
            next.push(v);
            for _ in 0..spec.max_exponent {
                v = v
                    .checked_mul(p)
                    .ok_or_else(|| Error::Overflow(format!("Følner member {base}·{p}^k exceeds u64")))?;
                next.push(v);
            }
        }
        members = next;
    }
    members.sort_unstable();
    members.dedup();
    Ok(members)
}

/// `|aΦ △ Φ| / |Φ|` for a positive rational dilation `a`; `set` must be sorted.
pub fn folner_defect(set: &[u64], a: Ratio<u64>) -> Result<f64> {
    if *a.numer() == 0 {
        return Err(invalid("dilation factor must be nonzero"));
    }
    if set.is_empty() {
        return Err(invalid("Følner set is empty"));
    }
    let (p, q) = (u128::from(*a.numer()), u128::from(*a.denom()));
    let common = set
        .iter()
        .filter(|&&x| {
            let px = p * u128::from(x);
            px % q == 0 && u64::try_from(px / q).is_ok_and(|y| set.binary_search(&y).is_ok())
        })
        .count();
    // a·Φ has |Φ| elements, so |aΦ △ Φ| = 2(|Φ| − |aΦ ∩ Φ|).
    Ok(2.0 * (set.len() - common) as f64 / set.len() as f64)
}

/// Something that can answer "is n in E?" on a stated domain.
pub trait Membership: Sync {
    fn member(&self, n: u64) -> Result<bool>;
}

impl Membership for SubsetMask {
    fn member(&self, n: u64) -> Result<bool> {
        if n == 0 || n > self.n_max() {
            return Err(Error::DomainExceeded { value: n, n_max: self.n_max() });
        }
        Ok(self.contains(n))
    }
}

/// A membership predicate defined on all of N.
pub struct Predicate<F>(pub F);

impl<F: Fn(u64) -> bool + Sync> Membership for Predicate<F> {
    fn member(&self, n: u64) -> Result<bool> {
        Ok((self.0)(n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityStage {
    pub primes: Vec<u64>,
    pub max_exponent: u32,
    pub size: usize,
    pub hits: usize,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimates {
    /// Always "finite-stage estimates": no limit is claimed.
    pub label: &'static str,
    pub stages: Vec<DensityStage>,
}

/// `|E ∩ Φ_i| / |Φ_i|` along an increasing (nested) list of Følner boxes.
pub fn mult_density_estimate(set: &dyn Membership, specs: &[FolnerSpec]) -> Result<DensityEstimates> {
    if let Some(w) = specs.windows(2).find(|w| !w[0].nested_in(&w[1])) {
        return Err(invalid(format!("Følner boxes are not increasing: {:?} then {:?}", w[0], w[1])));
    }
    let stages = specs
        .par_iter()
        .map(|spec| {
            let members = folner_set(spec)?;
            let mut hits = 0;
            for &x in &members {
                hits += usize::from(set.member(x)?);
            }
            Ok(DensityStage {
                primes: spec.primes.clone(),
                max_exponent: spec.max_exponent,
                size: members.len(),
                hits,
                estimate: hits as f64 / members.len() as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityEstimates { label: "finite-stage estimates", stages })
}
