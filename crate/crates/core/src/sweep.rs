//! Surgery families: one chain over `a, t` evaluated in `BS(dm, dl)` for a
//! range of `d`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bs_words::{parse_chain, Chain, GroupParams};
use crate::error::{Result, SclError};
use crate::formulas::formula_for;
use crate::solver_block::{scl_with, SclValue, SolveOptions, SolverTag};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: i64,
    #[serde(rename = "M")]
    pub big_m: i64,
    #[serde(rename = "L")]
    pub big_l: i64,
    /// `None` for an infinite value or a failed row.
    #[serde(with = "crate::serde_rational::option")]
    pub value: Option<Rational>,
    pub infinite: bool,
    pub solver: Option<SolverTag>,
    pub complete: bool,
    pub vars: usize,
    pub constraints: usize,
    pub pivots: u64,
    pub millis: u64,
    /// The words needed no Britton reduction in this group.
    pub tight_without_reduction: bool,
    /// Bounds from a closed-form formula, when one applies.
    #[serde(with = "crate::serde_rational::option")]
    pub lower: Option<Rational>,
    #[serde(with = "crate::serde_rational::option")]
    pub upper: Option<Rational>,
    pub error: Option<String>,
}

impl SweepRow {
    /// The value lies within the formula bounds (true when there are none).
    pub fn within_bounds(&self) -> bool {
        match (&self.value, &self.lower, &self.upper) {
            (Some(v), Some(lo), Some(hi)) => lo <= v && v <= hi,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub chain: String,
    pub m: i64,
    pub l: i64,
    /// Sorted by `d`.
    pub rows: Vec<SweepRow>,
    #[serde(with = "crate::serde_rational::option")]
    pub limit_hint: Option<Rational>,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub solve: SolveOptions,
    /// Rows solved at once; 0 uses the rayon default.
    pub workers: usize,
    pub limit_hint: Option<Rational>,
    /// Report 0 instead of wall-clock times, for reproducible output.
    pub omit_timing: bool,
}

/// Parameters that no Britton pinch can match, for reading a chain freely.
fn free_params() -> GroupParams {
    GroupParams::new(1 << 40, (1 << 40) + 1).expect("valid parameters")
}

fn solve_row(template: &str, free: &Option<Chain>, m: i64, l: i64, d: i64, opts: &SweepOptions) -> SweepRow {
    let mut row = SweepRow {
        d,
        big_m: d * m,
        big_l: d * l,
        value: None,
        infinite: false,
        solver: None,
        complete: false,
        vars: 0,
        constraints: 0,
        pivots: 0,
        millis: 0,
        tight_without_reduction: false,
        lower: None,
        upper: None,
        error: None,
    };
    let start = Instant::now();
    let outcome = GroupParams::new(d * m, d * l).and_then(|p| {
        let chain = parse_chain(template, &p)?;
        row.tight_without_reduction =
            free.as_ref().is_some_and(|f| f.equivalent(&chain) && f.dropped_elliptic == chain.dropped_elliptic);
        if let Some(f) = formula_for(&chain, &p) {
            let (lo, hi) = f.bounds();
            row.lower = Some(lo);
            row.upper = Some(hi);
        }
        scl_with(&chain, &p, &opts.solve)
    });
    if !opts.omit_timing {
        row.millis = start.elapsed().as_millis() as u64;
    }
    match outcome {
        Ok(rep) => {
            let r = rep.result;
            row.solver = Some(r.solver);
            row.complete = r.complete;
            row.vars = r.lp_stats.variables;
            row.constraints = r.lp_stats.constraints;
            row.pivots = r.lp_stats.pivots;
            match r.value {
                SclValue::Finite(v) => row.value = Some(v),
                SclValue::Infinite => row.infinite = true,
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluates `template` in `BS(dm, dl)` for each `d`. Failures are recorded
/// per row; only invalid `m`, `l` or an empty range are errors.
pub fn surgery_sweep(
    template: &str,
    m: i64,
    l: i64,
    ds: impl IntoIterator<Item = i64>,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    let mut ds: Vec<i64> = ds.into_iter().collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.is_empty() {
        return Err(SclError::Invalid("empty range of d".into()));
    }
    if m == 0 || l == 0 || ds[0] <= 0 {
        return Err(SclError::InvalidGroup(format!("m = {m}, l = {l} and d >= 1 are required")));
    }
    let free = parse_chain(template, &free_params()).ok();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| SclError::Resource(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        use rayon::prelude::*;
        ds.par_iter().map(|&d| solve_row(template, &free, m, l, d, opts)).collect::<Vec<_>>()
    });
    Ok(SweepReport { chain: template.to_string(), m, l, rows, limit_hint: opts.limit_hint.clone() })
}

impl SweepReport {
    /// Finite values are nondecreasing in `d` (rows without values skipped).
    pub fn is_monotone(&self) -> bool {
        let vals: Vec<&Rational> = self.rows.iter().filter_map(|r| r.value.as_ref()).collect();
        vals.windows(2).all(|w| w[0] <= w[1])
    }

    /// CSV with columns `d,M,L,num,den,solver,vars,pivots,millis`, followed
    /// by `complete,tight,lower,upper,error` and `diff` when a limit is set.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "d", "M", "L", "num", "den", "solver", "vars", "pivots", "millis", "complete", "tight", "lower", "upper",
            "error",
        ];
        if self.limit_hint.is_some() {
            header.push("diff");
        }
        w.write_record(&header).expect("in-memory write");
        let show = |r: &Option<Rational>| r.as_ref().map_or(String::new(), |v| v.to_string());
        for r in &self.rows {
            let (num, den) = match (&r.value, r.infinite) {
                (Some(v), _) => (v.numer().to_string(), v.denom().to_string()),
                (None, true) => ("inf".to_string(), "1".to_string()),
                (None, false) => (String::new(), String::new()),
            };
            let mut rec = vec![
                r.d.to_string(),
                r.big_m.to_string(),
                r.big_l.to_string(),
                num,
                den,
                r.solver.map_or(String::new(), |s| s.to_string()),
                r.vars.to_string(),
                r.pivots.to_string(),
                r.millis.to_string(),
                r.complete.to_string(),
                r.tight_without_reduction.to_string(),
                show(&r.lower),
                show(&r.upper),
                r.error.clone().unwrap_or_default(),
            ];
            if let Some(lim) = &self.limit_hint {
                rec.push(r.value.as_ref().map_or(String::new(), |v| (lim - v).to_string()));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn eg1_family_with_fixed_k() {
        let r = surgery_sweep("at^2 + 2T", 1, 1, 1..=8, &SweepOptions::default()).unwrap();
        for row in &r.rows {
            assert_eq!(row.value, Some(q(1, 2) - q(1, 2 * row.d)), "d = {}", row.d);
            assert!(row.within_bounds());
        }
        assert!(r.is_monotone());
    }

    #[test]
    fn eg1_family_with_k_equal_to_d() {
        for d in 1..=5 {
            let r = surgery_sweep(&format!("a^{d}t^2 + 2T"), 1, 1, [d], &SweepOptions::default()).unwrap();
            assert_eq!(r.rows[0].value, Some(q(0, 1)));
        }
    }

    #[test]
    fn tightness_flag_and_csv() {
        // t A T pinches when L = 1.
        let opts = SweepOptions { omit_timing: true, limit_hint: Some(q(1, 2)), ..SweepOptions::default() };
        let r = surgery_sweep("a^2tAT", 1, 1, [1, 2, 3], &opts).unwrap();
        assert!(!r.rows[0].tight_without_reduction);
        assert!(r.rows[2].tight_without_reduction);
        let csv = r.to_csv();
        assert!(csv.starts_with("d,M,L,num,den,solver,vars,pivots,millis,complete,tight,lower,upper,error,diff\n"));
        assert_eq!(csv.lines().count(), 4);
        let again = surgery_sweep("a^2tAT", 1, 1, [3, 1, 2], &opts).unwrap();
        assert_eq!(again.to_csv(), csv);
    }

    #[test]
    fn bad_rows_are_recorded() {
        let r = surgery_sweep("t", 2, 3, [1, 2], &SweepOptions::default()).unwrap();
        assert!(r.rows.iter().all(|row| row.infinite && row.error.is_none()));
        assert!(surgery_sweep("atAT", 0, 3, [1], &SweepOptions::default()).is_err());
    }
}
