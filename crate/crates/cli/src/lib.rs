//! Command implementations behind the `bsscl` binary. Each command returns
//! its exit code and output instead of printing, so tests can call it.

pub mod args;
mod commands;
mod json;

pub use commands::{cmd_certify, cmd_extremal, cmd_formula, cmd_scl, cmd_sweep, run};

use bsscl::solver_block::{BlockOptions, SolveOptions, SolverChoice};
use bsscl::SclError;

pub const EXIT_OK: i32 = 0;
/// Any failure without a dedicated code, including a failed certificate.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_HOMOLOGY: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Everything `scl` needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub big_m: i64,
    pub big_l: i64,
    pub chain: String,
    pub solver: SolverChoice,
    pub max_turns: Option<u32>,
    pub max_turns_cap: u32,
    pub max_dv: u64,
    /// Overrides `BS_SCL_MAX_CUTS` when set.
    pub max_cuts: Option<u64>,
    pub output: OutputFormat,
    pub timing: bool,
    pub extremal: bool,
    /// Cost table source and piece bound.
    pub certify: Option<(String, u32)>,
}

impl RunConfig {
    pub fn new(big_m: i64, big_l: i64, chain: &str) -> RunConfig {
        RunConfig {
            big_m,
            big_l,
            chain: chain.to_string(),
            solver: SolverChoice::Auto,
            max_turns: None,
            max_turns_cap: 8,
            max_dv: bsscl::solver_block::DEFAULT_MAX_DV,
            max_cuts: None,
            output: OutputFormat::Text,
            timing: true,
            extremal: false,
            certify: None,
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        let mut block = BlockOptions::from_env();
        block.max_dv = self.max_dv;
        if let Some(c) = self.max_cuts {
            block.max_cuts = c;
        }
        SolveOptions {
            choice: self.solver,
            block,
            max_turns: self.max_turns.unwrap_or(2),
            max_turns_cap: self.max_turns_cap.max(self.max_turns.unwrap_or(0)),
            ..SolveOptions::default()
        }
    }
}

/// Exit code, standard output and standard error of one command.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn error(e: &SclError) -> Outcome {
        Outcome { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

pub fn exit_code(e: &SclError) -> i32 {
    match e {
        SclError::Parse { .. } | SclError::NonPositiveCoefficient { .. } | SclError::InvalidGroup(_) => EXIT_PARSE,
        SclError::Resource(_) => EXIT_RESOURCE,
        _ => EXIT_FAILURE,
    }
}
