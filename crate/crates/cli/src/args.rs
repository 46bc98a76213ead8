use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "ZETALAB_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "zetalab",
    version,
    about = "Bessel moment integrals, continued fractions and integer relations at arbitrary precision"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory for cached results.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Ignore the cache for this run.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn digits_parser() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(15..=2000)
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Digits {
    /// Decimal digits of precision (at least 15).
    #[arg(long, default_value_t = 50, value_parser = digits_parser())]
    pub digits: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a Bessel moment, either the normalized I_{n,j}^(kappa) or a raw
    /// product u^p K0^a K1^b I0^c I1^d.
    #[command(group(ArgGroup::new("family").required(true).args(["kappa", "p"])))]
    Moment {
        /// Bessel weight of the normalized family.
        #[arg(long)]
        kappa: Option<u32>,
        /// Power n in (1/n!) int u^(n+1) K0^(kappa-j) K1^j.
        #[arg(long, requires = "kappa")]
        n: Option<u32>,
        /// Number of K1 factors.
        #[arg(long, requires = "kappa")]
        j: Option<u32>,
        /// Power of u in a raw product; selects the raw family.
        #[arg(long, conflicts_with = "kappa")]
        p: Option<u32>,
        #[arg(long, default_value_t = 0, requires = "p")]
        a: u32,
        #[arg(long, default_value_t = 0, requires = "p")]
        b: u32,
        #[arg(long, default_value_t = 0, requires = "p")]
        c: u32,
        #[arg(long, default_value_t = 0, requires = "p")]
        d: u32,
        #[command(flatten)]
        digits: Digits,
    },
    /// Exact coordinates of I_{n,j}^(kappa) over 1 and the basis moments.
    Decompose {
        #[arg(long)]
        kappa: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        j: u32,
    },
    /// Continued fractions of the catalog.
    #[command(subcommand)]
    Cf(CfCommand),
    /// Search for an integer relation among decimal values or named constants
    /// (pi, log2, zeta2 ... zeta9).
    Pslq {
        /// Values, at least two.
        #[arg(required = true, num_args = 2.., allow_negative_numbers = true)]
        values: Vec<String>,
        /// Comma separated labels, one per value.
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        /// Largest coefficient magnitude searched for.
        #[arg(long, default_value = "1000000000000000")]
        max_coeff: String,
        /// Detection threshold 10^-confidence; defaults to digits - 10.
        #[arg(long)]
        confidence: Option<u32>,
        #[command(flatten)]
        digits: Digits,
    },
    /// Run a verification suite; exits with 1 when any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[command(flatten)]
        digits: Digits,
    },
    /// Evaluate a Bessel moment as a period integral over the simplex and
    /// compare with direct quadrature.
    Period {
        /// Number of K0 factors.
        #[arg(long)]
        n: u32,
        /// Power of u, 1 or 3.
        #[arg(long, default_value_t = 1)]
        p: u32,
        /// raw_simplex, log_kernel or mixed_i0.
        #[arg(long, default_value = "raw_simplex")]
        form: String,
        /// Decimal digits for the deterministic forms and the direct moment.
        #[arg(long, default_value_t = 20, value_parser = digits_parser())]
        digits: u32,
        /// Seed of the QMC shifts.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// QMC points per shift.
        #[arg(long, default_value_t = 1 << 22)]
        qmc_points: u64,
        /// Use QMC even where deterministic quadrature is available.
        #[arg(long)]
        force_qmc: bool,
    },
    /// Large-n behaviour of 2^(n-1)/n! int u K0^n and 1/n! int K0^n.
    Limits {
        #[arg(long, default_value_t = 40)]
        n_max: u32,
        #[arg(long, default_value_t = 20, value_parser = digits_parser())]
        digits: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum CfCommand {
    /// List the catalog.
    List,
    /// Evaluate a fraction by backward recursion.
    Eval {
        name: String,
        #[arg(long, default_value_t = 300)]
        depth: u32,
        #[command(flatten)]
        digits: Digits,
    },
    /// Exact convergents of the paired recurrence.
    Convergents {
        name: String,
        #[arg(long, default_value_t = 20)]
        k_max: i64,
        /// Initial numerator pair y(0),y(1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        init_num: Option<Vec<i64>>,
        /// Initial denominator pair y(0),y(1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        init_den: Option<Vec<i64>>,
        /// Named constant to measure the ratios against (pi, zeta3, ...).
        #[arg(long)]
        against: Option<String>,
        /// Divide each numerator/denominator pair by its content.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        digits: Digits,
    },
    /// Build z(k) from exact moment decompositions and iterate down to z(0).
    Chain {
        #[arg(long)]
        kappa: u32,
        #[command(flatten)]
        digits: Digits,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Recurrences,
    #[value(name = "appendixA", alias = "appendix-a")]
    AppendixA,
    All,
}
