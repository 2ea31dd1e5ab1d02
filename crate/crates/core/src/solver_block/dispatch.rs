//! Solver selection: the block LP when its ceilings allow, the piece LP
//! otherwise, raising the turn bound until the piece LP is feasible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{solve_block, BlockOptions, SclResult};
use crate::bs_words::{Chain, GroupParams};
use crate::error::{Result, SclError};
use crate::solver_pieces::{scl_pieces_with, PieceOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Auto,
    Block,
    Pieces,
}

impl FromStr for SolverChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(SolverChoice::Auto),
            "block" => Ok(SolverChoice::Block),
            "pieces" => Ok(SolverChoice::Pieces),
            other => Err(format!("unknown solver `{other}` (expected auto, block or pieces)")),
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverChoice::Auto => "auto",
            SolverChoice::Block => "block",
            SolverChoice::Pieces => "pieces",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub choice: SolverChoice,
    pub block: BlockOptions,
    /// First turn bound tried by the piece LP.
    pub max_turns: u32,
    /// Largest turn bound tried before giving up.
    pub max_turns_cap: u32,
    pub pieces: PieceOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            choice: SolverChoice::Auto,
            block: BlockOptions::from_env(),
            max_turns: 2,
            max_turns_cap: 8,
            pieces: PieceOptions::new(2),
        }
    }
}

/// A result together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub result: SclResult,
    /// Turn bound of the piece LP that produced the value.
    pub max_turns: Option<u32>,
    /// Why the block LP was skipped under `auto`.
    pub fallback: Option<String>,
}

/// Computes scl with the configured solver.
pub fn scl_with(chain: &Chain, params: &GroupParams, opts: &SolveOptions) -> Result<SolveReport> {
    match opts.choice {
        SolverChoice::Block => {
            let s = solve_block(chain, params, &opts.block)?;
            Ok(SolveReport { result: s.result, max_turns: None, fallback: None })
        }
        SolverChoice::Pieces => escalate(chain, params, opts, None),
        SolverChoice::Auto => match solve_block(chain, params, &opts.block) {
            Ok(s) => Ok(SolveReport { result: s.result, max_turns: None, fallback: None }),
            Err(SclError::Resource(why)) => escalate(chain, params, opts, Some(why)),
            Err(e) => Err(e),
        },
    }
}

fn escalate(chain: &Chain, params: &GroupParams, opts: &SolveOptions, fallback: Option<String>) -> Result<SolveReport> {
    let mut po = opts.pieces.clone();
    let mut bound = opts.max_turns.max(1);
    loop {
        po.max_turns = bound;
        match scl_pieces_with(chain, params, &po) {
            Ok(sol) => return Ok(SolveReport { result: sol.result, max_turns: Some(bound), fallback }),
            Err(SclError::InfeasibleAtBound { .. }) if bound < opts.max_turns_cap => bound += 1,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs_words::parse_chain;
    use crate::Rational;

    #[test]
    fn pieces_escalate_past_an_infeasible_bound() {
        let p = GroupParams::new(2, 3).unwrap();
        let c = parse_chain("atAT", &p).unwrap();
        let opts = SolveOptions { choice: SolverChoice::Pieces, max_turns: 1, ..SolveOptions::default() };
        let r = scl_with(&c, &p, &opts).unwrap();
        assert!(r.max_turns.unwrap() > 1);
        assert_eq!(r.result.value.finite(), Some(&Rational::new(1.into(), 12.into())));
    }

    #[test]
    fn auto_falls_back_on_resource_ceilings() {
        let p = GroupParams::new(2, 3).unwrap();
        let c = parse_chain("atAT", &p).unwrap();
        let mut opts = SolveOptions::default();
        opts.block.max_dv = 2;
        let r = scl_with(&c, &p, &opts).unwrap();
        assert!(r.fallback.is_some());
        assert_eq!(r.result.value.finite(), Some(&Rational::new(1.into(), 12.into())));
        opts.choice = SolverChoice::Block;
        assert!(matches!(scl_with(&c, &p, &opts), Err(SclError::Resource(_))));
    }
}
