use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const THETA_HELP: &str = "\
θ is written in a small expression language and evaluated exactly to any precision:

  expr    := ['+'|'-'] product (('+'|'-') product)*
  product := unary (('*'|'/') unary)*
  unary   := '-' unary | atom
  atom    := NUMBER ['i'] | 'i' | 'e' | 'pi' | 'sqrt:' UINT
           | 'conj(' expr ')' | '(' expr ')'

Examples: \"sqrt:2\", \"sqrt:2 + i*sqrt:3\", \"3+2i\", \"(e + sqrt:5)/3 + i*pi\".

Exit status: 0 on success, 1 on invalid input, 2 when a budget or the precision ladder is exhausted.";

/// Experiments on the distribution of pθ modulo Z[i] over Gaussian primes p.
#[derive(Parser, Debug)]
#[command(name = "gal", version, about, after_long_help = THETA_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON lines instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true, env = "GAL_THREADS")]
    pub threads: Option<usize>,
    /// Seed for the pseudo-random coefficient sources.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Starting precision in bits for continued fractions.
    #[arg(long, global = true, default_value_t = 256)]
    pub prec: u32,
    /// Cap on enumerated lattice points.
    #[arg(long, global = true, default_value = "1e8", value_parser = parse_count)]
    pub max_points: u64,
}

/// Integers may be written as `1000000`, `1e6` or `10^6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let v = if let Some((b, e)) = s.split_once('^') {
        let b: u64 = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
        let e: u32 = e.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        b.checked_pow(e).ok_or_else(|| format!("{s} overflows"))? as f64
    } else {
        s.trim().parse::<f64>().map_err(|_| format!("{s:?} is not a number"))?
    };
    if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 {
        Ok(v as u64)
    } else {
        Err(format!("{s:?} is not a non-negative integer"))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count Gaussian primes by norm.
    Sieve {
        #[arg(long, value_parser = parse_count)]
        x: u64,
        /// Count only x/2 < N(p) <= x and report the PNT ratio.
        #[arg(long)]
        annulus: bool,
    },
    /// Hurwitz continued fraction of θ with its convergents.
    Cf {
        #[arg(long)]
        theta: String,
        #[arg(long, default_value_t = 10)]
        terms: usize,
    },
    /// Check |ψ* - ψ| <= σ on a grid for several truncation levels.
    VaalerCheck {
        #[arg(long = "J", value_delimiter = ',', default_values_t = [1u32, 5, 10, 50, 200])]
        j: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Σ e(Im(nκ)) or Σ e(Re(nκ)) over lo < N(n) <= hi, with κ = g·θ.
    Expsum {
        #[arg(long)]
        theta: String,
        /// Multiplier g as "re,im".
        #[arg(long, default_value = "1,0")]
        mult: String,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long, value_enum, default_value_t = PhaseArg::Im)]
        phase: PhaseArg,
    },
    /// #{0 < N(n) <= z : ||Im nθ|| <= d1, ||Re nθ|| <= d2}.
    SigmaCount {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        z: f64,
        #[arg(long)]
        d1: f64,
        #[arg(long)]
        d2: f64,
    },
    /// Measured sums against their bounds, one row per parameter point.
    BoundsReport(BoundsArgs),
    /// S(x, δ) against 4δ²S(x).
    Equidist {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Choose x from a convergent, x = min(N(q)^6, budget).
        #[arg(long, value_parser = parse_count)]
        preset: Option<u64>,
    },
    /// Type I and type II sums over A against 4δ² times the sums over B.
    TypeChecks {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum, default_value_t = CoeffArg::Random)]
        coeffs: CoeffArg,
    },
    /// Gaussian primes with ||pθ|| <= N(p)^(-γ).
    Corollary {
        #[arg(long)]
        theta: String,
        #[arg(long, default_value_t = 1.0 / 24.0)]
        gamma: f64,
        #[arg(long, value_parser = parse_count)]
        x_max: u64,
    },
    /// The ratio S(x, δ)/(4δ²S(x)) over a grid of x and δ.
    Sweep {
        #[arg(long)]
        theta: String,
        #[arg(long, value_delimiter = ',', value_parser = parse_count)]
        xs: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
    },
}

#[derive(Args, Debug, Default)]
pub struct ConfigArgs {
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub theta: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub x: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "J")]
    pub j: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    #[arg(long)]
    pub theta: String,
    /// Number of leading convergents to use.
    #[arg(long, default_value_t = 8)]
    pub convergents: usize,
    /// Largest z in the counting sweep.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    pub z_max: u64,
    #[arg(long, default_value_t = 1e4)]
    pub y: f64,
    #[arg(long, default_value_t = 1e3)]
    pub z: f64,
    #[arg(long, default_value = "1e4", value_parser = parse_count)]
    pub x: u64,
    #[arg(long, default_value_t = 1.0)]
    pub h1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub h2: f64,
    #[arg(long, default_value_t = 100.0)]
    pub m_max: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, default_value_t = 4.0)]
    pub kp: f64,
    #[arg(long, value_enum, default_value_t = CoeffArg::Random)]
    pub coeffs: CoeffArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Linear sums over annuli: measured |Σ| against the linear-sum bound.
    Linear,
    /// Σ_θ against the counting bound for each convergent.
    Counting,
    /// G_θ(y, z) against both case bounds.
    Gtheta,
    /// E3 and F3 against their composite bounds, with dyadic splits.
    E3f3,
    /// Cauchy-Schwarz for F3 on (K, K']; meant for tiny x such as 64.
    Cs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseArg {
    Im,
    Re,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffArg {
    Zeros,
    Ones,
    Random,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn count_notation() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("10^4"), Ok(10_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("2.5").is_err());
        assert!(parse_count("-1").is_err());
        assert!(parse_count("ten").is_err());
    }
}
