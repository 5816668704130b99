//! Command-line and config-file arguments. Every subcommand's arguments
//! double as the `parameters` object of a run config, so optional values stay
//! `Option` here and their defaults are applied in one place.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Direct,
    Recursive,
    Fourier,
}

#[derive(Debug, Parser)]
#[command(name = "multicorr", version, about = "Finite-scale experiments on multiple correlation sequences")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// U² and U³ norms of a truncated multiplicative function or a named signal.
    Gowers(GowersArgs),
    /// Average of four signals along m, m+l₁n, m+l₂n, m+l₃n, with the U³ bound pieces.
    FormsAverage(FormsArgs),
    /// Structured / uniform / error split of truncated multiplicative functions.
    Decompose(DecomposeArgs),
    /// Discriminants of a quadratic form and partition-regularity searches.
    Prcheck(PrcheckArgs),
    /// Least (m, n) with m(m+l₁n) and (m+l₂n)(m+l₃n) distinct members of a set.
    Recurrence2(Recurrence2Args),
    /// Least (m, n, m′, n′) whose three cross products are distinct members of a set.
    Recurrence3(Recurrence3Args),
    /// Multiplicative density estimates along nested Følner boxes.
    Density(DensityArgs),
    /// Exact spectral representation of correlations on a finite system.
    Spectral(SpectralArgs),
    /// Sign value, unit-vector value and their ratio for a real matrix.
    Gauge(GaugeArgs),
    /// Two-term witness search across random sets of several densities (CSV-friendly).
    Profile(ProfileArgs),
    /// Run a subcommand described by a JSON config file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GowersArgs {
    /// Multiplicative function: one, liouville, random(s), character(q,j) or p:turns,…
    #[arg(long, conflicts_with = "signal")]
    pub chi: Option<String>,
    /// Truncation length N for --chi.
    #[arg(long)]
    pub n: Option<u64>,
    /// Modulus; defaults to the least prime above 10·N.
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Named signal: random:M, character:M:θ or quadratic:M:a.
    #[arg(long)]
    pub signal: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<NormMethod>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FormsArgs {
    #[arg(long)]
    pub n: u64,
    /// l₁,l₂,l₃ (distinct, positive).
    #[arg(long, default_value = "1,2,3")]
    #[serde(default = "default_ls")]
    pub l: String,
    /// Modulus; defaults to the least prime above 10·(l₁+l₂+l₃)·N.
    #[arg(long)]
    pub modulus: Option<u64>,
    /// Four inputs a₀..a₃, each one, random, char:θ or chi:<function>.
    #[arg(long = "input", num_args = 1)]
    #[serde(default)]
    pub inputs: Vec<String>,
}

fn default_ls() -> String {
    "1,2,3".into()
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DecomposeArgs {
    /// Multiplicative functions to split (repeatable).
    #[arg(long, required = true, num_args = 1)]
    pub chi: Vec<String>,
    #[arg(long)]
    pub n: u64,
    /// Modulus; defaults to the least prime above 40·N.
    #[arg(long)]
    pub modulus: Option<u64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub k1: Option<u64>,
    #[arg(long)]
    pub w1: Option<u64>,
    #[arg(long)]
    pub k2: Option<u64>,
    #[arg(long)]
    pub w2: Option<u64>,
    /// Uniformity degree for the uniform part (2 or 3).
    #[arg(long)]
    pub s: Option<u32>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PrcheckArgs {
    /// Coefficients a,b,c,d,e,f of ax²+by²+cz²+dxy+exz+fyz.
    #[arg(long, allow_hyphen_values = true)]
    pub form: String,
    /// Cells for the exhaustive threshold search.
    #[arg(long)]
    pub r: Option<u32>,
    /// Largest N tried by the threshold search.
    #[arg(long)]
    pub n_limit: Option<u64>,
    /// Coloring file (one cell per line, line i colors i) for a monochromatic search.
    #[arg(long)]
    pub coloring: Option<PathBuf>,
    /// Largest n for the monochromatic and simultaneous searches.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Second form for the simultaneous search (needs --coloring).
    #[arg(long, allow_hyphen_values = true)]
    pub form2: Option<String>,
    #[arg(long)]
    pub x_max: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Recurrence2Args {
    /// Set: full:N, empty:N, multiples:k[:N], random:d:seed[:N], file:PATH or hex:PATH.
    #[arg(long)]
    pub set: String,
    /// l₁,l₂,l₃.
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Recurrence3Args {
    #[arg(long)]
    pub set: String,
    /// l₁,…,l₇.
    #[arg(long)]
    pub pattern: String,
    /// Common bound for m, n, m′, n′.
    #[arg(long)]
    pub bound: Option<u64>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DensityArgs {
    #[arg(long)]
    pub set: String,
    /// Primes spanning the boxes.
    #[arg(long, default_value = "2,3,5")]
    #[serde(default = "default_primes")]
    pub primes: String,
    /// Boxes use exponents 1..=this.
    #[arg(long)]
    pub max_exponent: Option<u32>,
}

fn default_primes() -> String {
    "2,3,5".into()
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpectralArgs {
    /// System JSON {weights, T, S} with optional f, g, h; a random system when absent.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long)]
    pub max_order: Option<usize>,
    /// Random coefficient pairs for the bilinear bound check.
    #[arg(long)]
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GaugeArgs {
    /// JSON array of rows.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Vector dimension; defaults to rows + cols.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Random starts of the ascent (at least 32; default 64).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Ascent sweeps per start (default 500).
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Debug, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ProfileArgs {
    /// Comma-separated densities.
    #[arg(long)]
    pub densities: String,
    #[arg(long)]
    pub universe: u64,
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Also estimate multiplicative density on the box spanned by these primes.
    #[arg(long)]
    pub folner_primes: Option<String>,
    #[arg(long)]
    pub folner_exponent: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// A whole run described as data.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(default = "empty_object")]
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}
