//! Parsers for the textual input specs: sets, signals, lists, files.

use std::path::Path;

use multicorr::arith::derive_seed;
use multicorr::correlation::FiniteSystem;
use multicorr::cyclic::{root_of_unity, CyclicSignal};
use multicorr::multiplicative::MultiplicativeFunction;
use multicorr::subset::SubsetMask;
use multicorr::{Complex64, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// Universe used by `multiples:k` and `random:d:seed` when no bound is given.
pub const DEFAULT_UNIVERSE: u64 = 1_000_000;

pub fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("bad {what} {s:?}")))
}

pub fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',').map(|t| num(t, what)).collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))
}

/// `full:N`, `empty:N`, `multiples:k[:N]`, `random:d:seed[:N]`,
/// `file:PATH` (member integers, whitespace separated; domain up to the largest)
/// or `hex:PATH` (hex document with an `n_max` header).
pub fn parse_set(spec: &str) -> Result<SubsetMask> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad(format!("set spec {spec:?} needs a kind prefix")))?;
    let parts: Vec<&str> = rest.split(':').collect();
    match (kind, &parts[..]) {
        ("full", [n]) => Ok(SubsetMask::full(num(n, "bound")?)),
        ("empty", [n]) => Ok(SubsetMask::empty(num(n, "bound")?)),
        ("multiples", [k]) => SubsetMask::multiples(num(k, "step")?, DEFAULT_UNIVERSE),
        ("multiples", [k, n]) => SubsetMask::multiples(num(k, "step")?, num(n, "bound")?),
        ("random", [d, s]) => SubsetMask::random(num(d, "density")?, num(s, "seed")?, DEFAULT_UNIVERSE),
        ("random", [d, s, n]) => SubsetMask::random(num(d, "density")?, num(s, "seed")?, num(n, "bound")?),
        ("file", _) => {
            let text = read_text(Path::new(rest))?;
            let members = text.split_whitespace().map(|t| num::<u64>(t, "member")).collect::<Result<Vec<_>>>()?;
            if members.contains(&0) {
                return Err(bad("set members must be positive"));
            }
            SubsetMask::from_members(members.iter().copied().max().unwrap_or(0), members)
        }
        ("hex", _) => SubsetMask::parse_hex_document(&read_text(Path::new(rest))?),
        _ => Err(bad(format!("unknown set spec {spec:?}"))),
    }
}

/// Uniform points of the closed unit disc, one stream per purpose.
pub fn disc_samples(seed: u64, stream: u64, count: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count)
        .map(|_| Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU))
        .collect()
}

/// `random:M`, `character:M:θ` or `quadratic:M:a`.
pub fn parse_named_signal(spec: &str, seed: u64) -> Result<CyclicSignal> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[..] {
        ["random", m] => CyclicSignal::new(disc_samples(seed, 0, num(m, "modulus")?)),
        ["character", m, t] => CyclicSignal::character(num(m, "modulus")?, num(t, "frequency")?),
        ["quadratic", m, a] => {
            let m: usize = num(m, "modulus")?;
            let a: i128 = num(a, "coefficient")?;
            CyclicSignal::from_fn(m, |x| root_of_unity(a * (x as i128) * (x as i128), m))
        }
        _ => Err(bad(format!("unknown signal spec {spec:?}"))),
    }
}

/// One slot of the forms average: `one`, `random`, `char:θ` or `chi:<function>`.
pub fn parse_forms_input(spec: &str, slot: usize, n: u64, modulus: usize, seed: u64) -> Result<CyclicSignal> {
    if spec == "one" {
        return CyclicSignal::constant(modulus, Complex64::new(1.0, 0.0));
    }
    if spec == "random" {
        return CyclicSignal::new(disc_samples(derive_seed(seed, slot as u64), 0, modulus));
    }
    if let Some(t) = spec.strip_prefix("char:") {
        return CyclicSignal::character(modulus, num(t, "frequency")?);
    }
    if let Some(f) = spec.strip_prefix("chi:") {
        return f.parse::<MultiplicativeFunction>()?.truncation(n, modulus as u64);
    }
    Err(bad(format!("unknown input spec {spec:?}")))
}

/// A complex number written as `x` or `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum JsonComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<JsonComplex> for Complex64 {
    fn from(v: JsonComplex) -> Self {
        match v {
            JsonComplex::Real(re) => Complex64::new(re, 0.0),
            JsonComplex::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub weights: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    pub f: Option<Vec<JsonComplex>>,
    pub g: Option<Vec<JsonComplex>>,
    pub h: Option<Vec<JsonComplex>>,
}

pub struct SystemInput {
    pub system: FiniteSystem,
    pub functions: [Vec<Complex64>; 3],
}

/// Loads a system file, filling absent functions with seeded random values.
pub fn load_system(path: &Path, seed: u64) -> Result<SystemInput> {
    let file: SystemFile =
        serde_json::from_str(&read_text(path)?).map_err(|e| bad(format!("bad system file {}: {e}", path.display())))?;
    let system = FiniteSystem::new(file.weights, file.t, file.s)?;
    let size = system.size();
    let pick = |v: Option<Vec<JsonComplex>>, stream: u64| match v {
        Some(v) => v.into_iter().map(Complex64::from).collect(),
        None => disc_samples(seed, stream, size),
    };
    let functions = [pick(file.f, 1), pick(file.g, 2), pick(file.h, 3)];
    Ok(SystemInput { system, functions })
}

/// A random system and random functions from one seed.
pub fn random_system(seed: u64, max_size: usize, max_order: usize) -> SystemInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = FiniteSystem::random(&mut rng, max_size, max_order);
    let size = system.size();
    let functions = [1, 2, 3].map(|s| disc_samples(seed, s, size));
    SystemInput { system, functions }
}
