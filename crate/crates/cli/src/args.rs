use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sofic_core::rational::{self, Rational};

#[derive(Parser, Debug)]
#[command(name = "sofic", version, about = "Finite-level experiments on permutation tuples")]
pub struct Cli {
    /// JSON file overriding degree limits and budgets (missing keys keep defaults).
    #[arg(long, global = true)]
    pub limits: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exhaustive counts compared with their bounds.
    Census(CensusArgs),
    /// Expansion certificate for a tuple, or a sampled expander pair.
    Expander(ExpanderArgs),
    /// Extract a conjugator from an amplified intertwiner.
    Deamplify(DeamplifyArgs),
    /// Combine, cut and decompose tuples from a JSON experiment file.
    Convexity(FileArgs),
    /// Small-Coxeter candidate with commutant evidence.
    Strange(StrangeArgs),
    /// Family of expander pairs that are pairwise far in conjugacy distance.
    Family(FamilyArgs),
    /// Re-validate evidence in emitted artifacts.
    Verify(VerifyArgs),
    /// Wall-clock timing of the core routines.
    Bench(BenchArgs),
    /// Run a JSON list of argument vectors on the worker pool.
    Run(FileArgs),
    /// Success fractions of random pairs as CSV trend tables.
    Trend(TrendArgs),
}

pub fn parse_rat(s: &str) -> Result<Rational, String> {
    rational::parse_rational(s).map_err(|e| e.to_string())
}

/// Degrees given as `4..8` (inclusive), `4,6,8` or a single number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Degrees(pub Vec<usize>);

pub fn parse_degrees(s: &str) -> Result<Degrees, String> {
    let bad = |_| format!("invalid degree list {s:?}");
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(bad)?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(bad)?;
        if lo > hi {
            return Err(format!("empty degree range {s:?}"));
        }
        return Ok(Degrees((lo..=hi).collect()));
    }
    s.split(',').map(|p| p.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(Degrees)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusArgs {
    /// hamming-ball, cycle-commuting, near-commuting, s-ball, l-set, k-set or t-set.
    #[arg(long)]
    pub prop: String,
    #[arg(long, value_parser = parse_degrees)]
    pub n: Degrees,
    /// ε, δ or λ, as "p/q" or an exact decimal.
    #[arg(long, visible_aliases = ["eps", "delta", "lambda"], value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub param: Rational,
    /// Fixed permutation of the count: cycle, identity, reversal or a JSON file.
    /// Defaults to identity for hamming-ball and cycle otherwise.
    #[arg(long)]
    pub center: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Exit 1 if any verdict is VIOLATED.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ExpanderArgs {
    #[arg(long, required_unless_present = "tuple")]
    pub n: Option<usize>,
    /// Comma list of cycle, reversal, identity, random.
    #[arg(long, default_value = "cycle,random", conflicts_with = "tuple")]
    pub gens: String,
    /// JSON tuple file instead of --n/--gens generators.
    #[arg(long)]
    pub tuple: Option<PathBuf>,
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample (a_n, c) until it is an expander with freeness defect below 1/2.
    #[arg(long)]
    pub sample_pair: bool,
    #[arg(long, default_value_t = 20)]
    pub tries: usize,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Where to write the violating subset of a REFUTED certificate.
    #[arg(long)]
    #[serde(skip)]
    pub witness_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DeamplifyArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Permutation of degree n·r as a JSON array of images.
    #[arg(long)]
    pub u: PathBuf,
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    /// Expansion certificate for y; trusted as given.
    #[arg(long, conflicts_with = "certify_y")]
    pub y_cert: Option<PathBuf>,
    /// Compute the expansion certificate for y instead of reading one.
    #[arg(long)]
    pub certify_y: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the full block-defect matrix.
    #[arg(long)]
    pub verbose: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct FileArgs {
    pub file: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct StrangeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "1/3", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub delta: Rational,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub t_tries: usize,
    #[arg(long, default_value_t = 10_000)]
    pub k_trials: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long)]
    pub n: usize,
    /// Number of members requested.
    #[arg(long)]
    pub k: usize,
    /// Expansion constant for each member.
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    /// Pairwise conjugacy distances must exceed this.
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub separation: Rational,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Candidate draws before giving up (exit 3 with the partial family).
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Artifacts written by other subcommands, or bare evidence records.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_degrees, default_value = "1000")]
    pub n: Degrees,
    #[arg(long, default_value_t = 5)]
    pub reps: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendKind {
    /// Fraction of c with (a_n, c) passing the expander check.
    Expander,
    /// Fraction of c with freeness defect below the threshold.
    Freeness,
}

#[derive(Args, Debug, Serialize)]
pub struct TrendArgs {
    #[arg(long, value_enum)]
    pub kind: TrendKind,
    #[arg(long, value_parser = parse_degrees)]
    pub n: Degrees,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// λ for expander trends.
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub lambda: Rational,
    /// Defect threshold for freeness trends.
    #[arg(long, default_value = "1/10", value_parser = parse_rat)]
    #[serde(with = "rational::as_str")]
    pub threshold: Rational,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
