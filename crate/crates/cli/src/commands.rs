use std::fmt::Write as _;
use std::time::Instant;

use bsscl::bs_words::{parse_chain, Chain, GroupParams};
use bsscl::extremal::{
    extremal_verdict_with, optimal_piece_solution, sufficient_extremal_check, ExtremalVerdict, SufficientCheck,
};
use bsscl::formulas::{Family, FormulaResult, Validity};
use bsscl::solver_block::{scl_with, verify_turn_costs, CostReport, CostTable, SclValue, SolveReport};
use bsscl::sweep::{surgery_sweep, SweepOptions};
use bsscl::{Result, SclError};
use serde_json::{json, Value};

use crate::args::{costs_source, parse_d_range, Command, CostSource, OutputArgs};
use crate::{json, Outcome, OutputFormat, RunConfig, EXIT_FAILURE, EXIT_HOMOLOGY, EXIT_PARSE};

/// Dispatches a parsed subcommand.
pub fn run(command: Command) -> Outcome {
    match command {
        Command::Scl(a) => {
            let mut c = RunConfig::new(a.group.big_m, a.group.big_l, &a.chain);
            c.solver = a.solver.solver;
            c.max_turns = a.solver.max_turns;
            c.max_turns_cap = a.solver.max_turns_cap;
            c.max_dv = a.solver.max_dv;
            c.max_cuts = a.solver.max_cuts;
            c.output = format(&a.output);
            c.timing = !a.output.no_timing;
            c.extremal = a.extremal;
            c.certify = a.costs.map(|s| (s, a.bound));
            cmd_scl(&c)
        }
        Command::Formula(a) => {
            let family = match (Family::from_name(&a.family), a.k) {
                (Some(Family::Eg1 { .. }), Some(k)) => Some(Family::Eg1 { k }),
                (f, _) => f,
            };
            match family {
                Some(f) => cmd_formula(a.group.big_m, a.group.big_l, f, format(&a.output)),
                None => Outcome {
                    code: EXIT_PARSE,
                    stderr: format!("error: unknown family `{}` (expected eg1[:k], eg2, atAT, ataTAtAT)\n", a.family),
                    ..Outcome::default()
                },
            }
        }
        Command::Sweep(a) => {
            let ds = match parse_d_range(&a.d) {
                Ok(ds) => ds,
                Err(e) => return Outcome { code: EXIT_PARSE, stderr: format!("error: {e}\n"), ..Outcome::default() },
            };
            let limit = match a.limit.as_deref().map(bsscl::serde_rational::parse) {
                Some(None) => {
                    return Outcome {
                        code: EXIT_PARSE,
                        stderr: "error: --limit is not a rational\n".into(),
                        ..Outcome::default()
                    }
                }
                Some(Some(v)) => Some(v),
                None => None,
            };
            let mut c = RunConfig::new(1, 1, &a.chain);
            c.solver = a.solver.solver;
            c.max_turns = a.solver.max_turns;
            c.max_turns_cap = a.solver.max_turns_cap;
            c.max_dv = a.solver.max_dv;
            c.max_cuts = a.solver.max_cuts;
            let opts = SweepOptions {
                solve: c.solve_options(),
                workers: a.workers,
                limit_hint: limit,
                omit_timing: a.output.no_timing,
            };
            cmd_sweep(&a.chain, a.m, a.l, &ds, &opts, format(&a.output))
        }
        Command::Extremal(a) => cmd_extremal(
            a.group.big_m,
            a.group.big_l,
            &a.chain,
            (a.max_turns, a.max_turns_cap.max(a.max_turns)),
            a.power_bound,
            format(&a.output),
        ),
        Command::Certify(a) => {
            cmd_certify(a.group.big_m, a.group.big_l, &a.chain, &a.costs, a.bound, format(&a.output))
        }
    }
}

fn format(o: &OutputArgs) -> OutputFormat {
    if o.json {
        OutputFormat::Json
    } else {
        OutputFormat::Text
    }
}

fn setup(big_m: i64, big_l: i64, text: &str) -> Result<(GroupParams, Chain)> {
    let p = GroupParams::new(big_m, big_l)?;
    let c = parse_chain(text, &p)?;
    Ok((p, c))
}

/// `scl`: the value, solver metadata, and optionally the extremal analysis
/// and a cost certificate.
pub fn cmd_scl(config: &RunConfig) -> Outcome {
    let start = Instant::now();
    let (params, chain) = match setup(config.big_m, config.big_l, &config.chain) {
        Ok(x) => x,
        Err(e) => return Outcome::error(&e),
    };
    let report = match scl_with(&chain, &params, &config.solve_options()) {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let infinite = matches!(report.result.value, SclValue::Infinite);
    let extremal = if config.extremal && !infinite {
        Some(extremal_section(&params, &chain, (2, config.max_turns_cap), bsscl::extremal::DEFAULT_POWER_BOUND))
    } else {
        None
    };
    let certificate = match &config.certify {
        Some((src, bound)) if !infinite => match certify(&params, &chain, src, *bound) {
            Ok(r) => Some(r),
            Err(e) => return Outcome::error(&e),
        },
        _ => None,
    };
    let millis = if config.timing { start.elapsed().as_millis() as u64 } else { 0 };
    let code = if infinite { EXIT_HOMOLOGY } else { crate::EXIT_OK };
    let stdout = match config.output {
        OutputFormat::Json => {
            json::render(&scl_json(&params, &chain, &report, extremal.as_ref(), certificate.as_ref(), millis))
        }
        OutputFormat::Text => scl_text(&chain, &report, extremal.as_ref(), certificate.as_ref()),
    };
    Outcome { code, stdout, stderr: String::new() }
}

fn scl_text(
    chain: &Chain,
    report: &SolveReport,
    extremal: Option<&ExtremalSection>,
    cert: Option<&CostReport>,
) -> String {
    let r = &report.result;
    let mut s = String::new();
    match &r.value {
        SclValue::Finite(v) => writeln!(s, "{v}").unwrap(),
        SclValue::Infinite => {
            writeln!(s, "{}", r.homology_note).unwrap();
            return s;
        }
    }
    write!(s, "solver: {}", r.solver).unwrap();
    if let Some(b) = report.max_turns {
        write!(s, " (at most {b} turns per piece)").unwrap();
    }
    writeln!(s, "; rho {}, |D_v| {}", r.rho, r.dv_abs).unwrap();
    writeln!(
        s,
        "lp: {} variables, {} constraints, {} pivots",
        r.lp_stats.variables, r.lp_stats.constraints, r.lp_stats.pivots
    )
    .unwrap();
    if !r.complete {
        writeln!(s, "note: the turn bound does not cover every disk-like piece; the value is an upper bound").unwrap();
    }
    if let Some(why) = &report.fallback {
        writeln!(s, "note: block LP skipped: {why}").unwrap();
    }
    if r.homology_note != "null-homologous" {
        writeln!(s, "note: {}", r.homology_note).unwrap();
    }
    for e in &chain.dropped_elliptic {
        writeln!(s, "dropped elliptic term: {e}").unwrap();
    }
    if let Some(x) = extremal {
        s.push_str(&x.text);
    }
    if let Some(c) = cert {
        writeln!(s, "{}", c.summary()).unwrap();
        writeln!(s, "{}", c.all_lengths_note()).unwrap();
    }
    s
}

fn scl_json(
    params: &GroupParams,
    chain: &Chain,
    report: &SolveReport,
    extremal: Option<&ExtremalSection>,
    cert: Option<&CostReport>,
    millis: u64,
) -> Value {
    let r = &report.result;
    json!({
        "group": json::group(params),
        "chain": chain.to_string(),
        "rho": r.rho,
        "Dv": r.dv_abs,
        "scl": r.value.finite().map(json::rational),
        "infinite": r.value.finite().is_none(),
        "solver": r.solver.to_string(),
        "complete": r.complete,
        "max_turns": report.max_turns,
        "lp": { "vars": r.lp_stats.variables, "constraints": r.lp_stats.constraints, "pivots": r.lp_stats.pivots },
        "homology": r.homology_note,
        "dropped_elliptic": json::dropped(chain),
        "extremal": extremal.map(|x| x.json.clone()),
        "certificate": cert.map(|c| serde_json::to_value(c).expect("reports serialize")),
        "timing_ms": millis,
    })
}

struct ExtremalSection {
    status: String,
    text: String,
    json: Value,
}

fn extremal_section(params: &GroupParams, chain: &Chain, bounds: (u32, u32), power_bound: u32) -> ExtremalSection {
    let sufficient = sufficient_extremal_check(chain, params);
    let mut text = String::new();
    match &sufficient {
        SufficientCheck::Pass => writeln!(text, "sufficient check: pass").unwrap(),
        SufficientCheck::Inconclusive(rs) => {
            writeln!(text, "sufficient check: inconclusive").unwrap();
            for r in rs {
                writeln!(text, "  {r}").unwrap();
            }
        }
    }
    let verdict = optimal_piece_solution(chain, params, bounds.0, bounds.1)
        .and_then(|(sol, b)| extremal_verdict_with(chain, params, &sol, power_bound).map(|v| (v, b)));
    let (status, detail) = match &verdict {
        Ok((v, b)) => {
            match v {
                ExtremalVerdict::Exists { certificate } => {
                    let g = &certificate.surface;
                    let balanced = g.components.iter().filter(|c| c.balanced).count();
                    writeln!(text, "extremal: exists ({:?})", certificate.kind).unwrap();
                    writeln!(
                        text,
                        "  branched surface: {} pieces, components: {} ({balanced} balanced), piece bound {b}",
                        g.pieces.len(),
                        g.components.len()
                    )
                    .unwrap();
                }
                ExtremalVerdict::Unknown { reasons } => {
                    writeln!(text, "extremal: unknown").unwrap();
                    for r in reasons {
                        writeln!(text, "  {r}").unwrap();
                    }
                }
                ExtremalVerdict::NotReduced { witness } => writeln!(
                    text,
                    "extremal: chain is not reduced (words {} and {} with powers {} and {} are pseudo-inverses)",
                    witness.i + 1,
                    witness.j + 1,
                    witness.p,
                    witness.q
                )
                .unwrap(),
            }
            (v.status().to_string(), json!({ "verdict": v, "piece_bound": b }))
        }
        Err(e) => {
            writeln!(text, "extremal: unknown ({e})").unwrap();
            ("unknown".to_string(), json!({ "error": e.to_string() }))
        }
    };
    let mut json = json!({ "status": status, "sufficient": sufficient });
    if let (Value::Object(m), Value::Object(d)) = (&mut json, detail) {
        m.extend(d);
    }
    ExtremalSection { status, text, json }
}

/// `extremal`: sufficient check, reducedness and the one-face verdict.
pub fn cmd_extremal(
    big_m: i64,
    big_l: i64,
    text: &str,
    bounds: (u32, u32),
    power_bound: u32,
    output: OutputFormat,
) -> Outcome {
    let (params, chain) = match setup(big_m, big_l, text) {
        Ok(x) => x,
        Err(e) => return Outcome::error(&e),
    };
    let x = extremal_section(&params, &chain, bounds, power_bound);
    let code = if x.status == "unknown" && x.json.get("error").is_some() { EXIT_FAILURE } else { crate::EXIT_OK };
    let stdout = match output {
        OutputFormat::Text => x.text,
        OutputFormat::Json => json::render(&json!({
            "group": json::group(&params),
            "chain": chain.to_string(),
            "extremal": x.json,
        })),
    };
    Outcome { code, stdout, stderr: String::new() }
}

fn load_costs(params: &GroupParams, src: &str) -> Result<CostTable> {
    match costs_source(src) {
        CostSource::Builtin(name) => match name.as_str() {
            "eg3" => Ok(CostTable::commutator_t_squared()),
            "eg2" => Ok(CostTable::eg2(params)),
            other => Err(SclError::Invalid(format!("unknown builtin cost table `{other}`"))),
        },
        CostSource::File(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| SclError::Invalid(format!("cannot read {}: {e}", path.display())))?;
            CostTable::from_json(&text)
        }
    }
}

fn certify(params: &GroupParams, chain: &Chain, src: &str, bound: u32) -> Result<CostReport> {
    let table = load_costs(params, src)?;
    verify_turn_costs(chain, params, &table, bound)
}

/// `certify`: exits 1 when the table has a disk-like piece costing less than 1.
pub fn cmd_certify(big_m: i64, big_l: i64, text: &str, costs: &str, bound: u32, output: OutputFormat) -> Outcome {
    let report = match setup(big_m, big_l, text).and_then(|(p, c)| certify(&p, &c, costs, bound).map(|r| (p, c, r))) {
        Ok(x) => x,
        Err(e) => return Outcome::error(&e),
    };
    let (params, chain, r) = report;
    let code = if r.passes_bound { crate::EXIT_OK } else { EXIT_FAILURE };
    let stdout = match output {
        OutputFormat::Text => format!("{}\n{}\n", r.summary(), r.all_lengths_note()),
        OutputFormat::Json => json::render(&json!({
            "group": json::group(&params),
            "chain": chain.to_string(),
            "certificate": r,
            "scl_lower": r.scl_lower.as_ref().map(json::rational),
        })),
    };
    Outcome { code, stdout, stderr: String::new() }
}

fn formula_text(r: &FormulaResult) -> String {
    format!("{r}\n")
}

/// `formula`: a closed-form value with its validity.
pub fn cmd_formula(big_m: i64, big_l: i64, family: Family, output: OutputFormat) -> Outcome {
    let result = GroupParams::new(big_m, big_l).and_then(|p| family.evaluate(&p).map(|r| (p, r)));
    let (params, r) = match result {
        Ok(x) => x,
        Err(e) => return Outcome::error(&e),
    };
    match output {
        OutputFormat::Text => Outcome::ok(formula_text(&r)),
        OutputFormat::Json => {
            let (lower, upper) = r.bounds();
            let (validity, condition) = match &r.validity {
                Validity::Exact { condition } => ("exact", condition.clone()),
                Validity::Conditional { condition, .. } => ("conditional", Some(condition.clone())),
            };
            Outcome::ok(json::render(&json!({
                "group": json::group(&params),
                "chain": family.chain_text(),
                "family": family,
                "value": json::rational(&r.value),
                "validity": validity,
                "condition": condition,
                "lower": json::rational(&lower),
                "upper": json::rational(&upper),
            })))
        }
    }
}

/// `sweep`: CSV (or JSON) rows, one per `d`.
pub fn cmd_sweep(template: &str, m: i64, l: i64, ds: &[i64], opts: &SweepOptions, output: OutputFormat) -> Outcome {
    let report = match surgery_sweep(template, m, l, ds.iter().copied(), opts) {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let stderr: String =
        report.rows.iter().filter_map(|r| r.error.as_ref().map(|e| format!("d = {}: {e}\n", r.d))).collect();
    let stdout = match output {
        OutputFormat::Text => report.to_csv(),
        OutputFormat::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
    };
    Outcome { code: crate::EXIT_OK, stdout, stderr }
}
