use bsscl::bs_words::{parse_chain, GroupParams};
use bsscl::extremal::{branched_surface, extremal_verdict, sufficient_extremal_check};
use bsscl::formulas::{eg1_formula, formula_for};
use bsscl::solver_block::{
    scl_block, scl_with, solve_block, verify_turn_costs, BlockOptions, CostTable, SclResult, SclValue, SolveOptions,
    SolverChoice,
};
use bsscl::solver_pieces::{export_surface, scl_pieces};
use bsscl::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn value(text: &str, m: i64, l: i64) -> Rational {
    let p = GroupParams::new(m, l).unwrap();
    let c = parse_chain(text, &p).unwrap();
    scl_block(&c, &p).unwrap().value.finite().cloned().unwrap()
}

#[test]
fn block_values_match_formulas() {
    assert_eq!(value("atAT", 2, 3), q(1, 12));
    assert_eq!(value("atAT", 3, 4), q(5, 24));
    assert_eq!(value("at^2At^-1 + T", 4, 6), q(19, 48));
    for k in 1..=3 {
        let p = GroupParams::new(2, 4).unwrap();
        assert_eq!(value(&format!("a^{k}t^2 + 2T"), 2, 4), eg1_formula(&p, k).value);
    }
}

#[test]
fn piece_and_block_agree_once_the_bound_suffices() {
    let p = GroupParams::new(2, 5).unwrap();
    let c = parse_chain("atAT", &p).unwrap();
    let pieces = scl_pieces(&c, &p, 5).unwrap();
    assert_eq!(pieces.result.value, scl_block(&c, &p).unwrap().value);
    let exported = export_surface(&pieces, None).unwrap();
    assert!(exported.gluing_ok);
    assert_eq!(Some(&exported.scl), pieces.result.value.finite());
}

#[test]
fn formula_lookup_drives_the_same_value() {
    let p = GroupParams::new(6, 9).unwrap();
    let c = parse_chain("T + at^2At^-1", &p).unwrap();
    let f = formula_for(&c, &p).unwrap();
    assert!(f.is_exact());
    assert_eq!(scl_block(&c, &p).unwrap().value, SclValue::Finite(f.value));
}

#[test]
fn results_serialize() {
    let p = GroupParams::new(2, 3).unwrap();
    let c = parse_chain("atAT", &p).unwrap();
    let r = solve_block(&c, &p, &BlockOptions::default()).unwrap().result;
    let text = serde_json::to_string(&r).unwrap();
    let back: SclResult = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
}

#[test]
fn dispatcher_choices_agree() {
    let p = GroupParams::new(3, 5).unwrap();
    let c = parse_chain("ataTAtAT", &p).unwrap();
    let block = scl_with(&c, &p, &SolveOptions { choice: SolverChoice::Block, ..SolveOptions::default() }).unwrap();
    let pieces =
        scl_with(&c, &p, &SolveOptions { choice: SolverChoice::Pieces, max_turns: 5, ..SolveOptions::default() })
            .unwrap();
    assert_eq!(block.result.value, SclValue::Finite(q(1, 6)));
    assert_eq!(pieces.result.value, block.result.value);
}

#[test]
fn eg2_cost_table_matches_the_solver() {
    let p = GroupParams::new(4, 6).unwrap();
    let c = parse_chain("at^2At^-1 + T", &p).unwrap();
    let r = verify_turn_costs(&c, &p, &CostTable::eg2(&p), 5).unwrap();
    assert_eq!(r.scl_lower, Some(q(19, 48)));
    assert_eq!(scl_block(&c, &p).unwrap().value, SclValue::Finite(q(19, 48)));
}

#[test]
fn extremal_pipeline_on_the_commutator() {
    let p = GroupParams::new(2, 3).unwrap();
    let c = parse_chain("atAT", &p).unwrap();
    assert!(!sufficient_extremal_check(&c, &p).passed());
    let sol = scl_pieces(&c, &p, 4).unwrap();
    let g = branched_surface(&sol, &p).unwrap();
    assert!(g.components.iter().all(|c| c.balanced));
    let v = extremal_verdict(&c, &p, &sol).unwrap();
    assert_ne!(v.status(), "exists");
}
