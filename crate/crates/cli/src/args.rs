use std::path::PathBuf;

use bsscl::solver_block::SolverChoice;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bsscl", version, about = "Exact stable commutator length in Baumslag-Solitar groups")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute scl of a chain.
    Scl(SclArgs),
    /// Evaluate a closed-form family: eg1[:k], eg2, atAT, ataTAtAT.
    Formula(FormulaArgs),
    /// Evaluate a chain in BS(dm, dl) over a range of d.
    Sweep(SweepArgs),
    /// Extremal-surface analysis of a chain.
    Extremal(ExtremalArgs),
    /// Check a turn cost table and derive a lower bound.
    Certify(CertifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    #[arg(long = "M", allow_negative_numbers = true)]
    pub big_m: i64,
    #[arg(long = "L", allow_negative_numbers = true)]
    pub big_l: i64,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// auto, block or pieces.
    #[arg(long, default_value = "auto")]
    pub solver: SolverChoice,
    /// First turn bound for the piece LP; raised while infeasible.
    #[arg(long)]
    pub max_turns: Option<u32>,
    /// Largest turn bound the piece LP may reach.
    #[arg(long, default_value_t = 8)]
    pub max_turns_cap: u32,
    /// Largest |D_v| for the block LP.
    #[arg(long, default_value_t = bsscl::solver_block::DEFAULT_MAX_DV)]
    pub max_dv: u64,
    /// Ceiling on block LP variables (default: BS_SCL_MAX_CUTS or 2000000).
    #[arg(long)]
    pub max_cuts: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Emit JSON.
    #[arg(long)]
    pub json: bool,
    /// Report zero timings so identical runs print identical bytes.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct SclArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    pub chain: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also run the extremal analysis.
    #[arg(long)]
    pub extremal: bool,
    /// Also check a cost table (file or builtin:eg3, builtin:eg2).
    #[arg(long)]
    pub costs: Option<String>,
    /// Piece bound for --costs.
    #[arg(long, default_value_t = 4)]
    pub bound: u32,
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    pub family: String,
    /// Exponent k for eg1.
    #[arg(long)]
    pub k: Option<i64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub m: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub l: i64,
    /// Range `a..b` (inclusive) or list `a,b,c`.
    #[arg(long)]
    pub d: String,
    pub chain: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Known limit value; adds a difference column.
    #[arg(long)]
    pub limit: Option<String>,
    /// Rows solved at once (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    pub chain: String,
    /// First piece bound tried when matching the exact value.
    #[arg(long, default_value_t = 2)]
    pub max_turns: u32,
    #[arg(long, default_value_t = 8)]
    pub max_turns_cap: u32,
    /// Largest power tried for t-balanced pseudo-inverse pairs.
    #[arg(long, default_value_t = bsscl::extremal::DEFAULT_POWER_BOUND)]
    pub power_bound: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    pub chain: String,
    /// Cost table: a JSON file, or builtin:eg3 / builtin:eg2.
    #[arg(long)]
    pub costs: String,
    /// Pieces with at most this many turns are enumerated.
    #[arg(long, default_value_t = 4)]
    pub bound: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `2..6`, `2..=6` or `2,3,5`.
pub fn parse_d_range(text: &str) -> Result<Vec<i64>, String> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: i64 = a.trim().parse().map_err(|_| format!("bad range start in `{text}`"))?;
        let b: i64 = b.trim().parse().map_err(|_| format!("bad range end in `{text}`"))?;
        if a > b {
            return Err(format!("empty range `{text}`"));
        }
        return Ok((a..=b).collect());
    }
    t.split(',').map(|x| x.trim().parse().map_err(|_| format!("bad value `{x}` in `{text}`"))).collect()
}

pub fn costs_source(text: &str) -> CostSource {
    match text.strip_prefix("builtin:") {
        Some(name) => CostSource::Builtin(name.to_string()),
        None => CostSource::File(PathBuf::from(text)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostSource {
    Builtin(String),
    File(PathBuf),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_d_range("2..6").unwrap(), vec![2, 3, 4, 5, 6]);
        assert_eq!(parse_d_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_d_range("1, 4,9").unwrap(), vec![1, 4, 9]);
        assert!(parse_d_range("5..2").is_err());
        assert!(parse_d_range("x").is_err());
    }
}
