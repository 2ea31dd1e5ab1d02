//! Dual certificates: turn cost tables that bound `kappa` from above.
//!
//! If every disk-like piece costs at least 1, then `kappa(x) <= q(x)` for
//! every admissible vector, and `q(x)` is bounded over all admissible `x`
//! by the gluing and normalizing identities. That bound is computed here as
//! the maximum of `q` over turn counts satisfying those identities.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bs_words::{Chain, GroupParams};
use crate::encoding::{enumerate_turns, turn_winding, winding_context, TurnAlphabet, TurnType, WindingContext};
use crate::error::{Result, SclError};
use crate::exact_lp::{solve, verify_optimality, LPModel, LpStatus, Relation, Sense};
use crate::solver_pieces::{enumerate_pieces, EnumerationMode, PieceVector, DEFAULT_MAX_PIECES};
use crate::Rational;

/// Which winding classes an entry applies to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassRule {
    All,
    Even,
    Odd,
    List(Vec<u64>),
    Residue { modulus: u64, residue: u64 },
}

impl ClassRule {
    fn matches(&self, w: u64) -> bool {
        match self {
            ClassRule::All => true,
            ClassRule::Even => w.is_multiple_of(2),
            ClassRule::Odd => w % 2 == 1,
            ClassRule::List(v) => v.contains(&w),
            ClassRule::Residue { modulus, residue } => *modulus > 0 && w % modulus == residue % modulus,
        }
    }
}

/// Cost of the turns `(a_from, w, a_to)` with `w` in `classes`. Arcs are
/// numbered from 1 in the order of the chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEntry {
    pub from: usize,
    pub to: usize,
    #[serde(default = "all_classes")]
    pub classes: ClassRule,
    #[serde(with = "crate::serde_rational")]
    pub cost: Rational,
}

fn all_classes() -> ClassRule {
    ClassRule::All
}

/// A turn cost table. The first matching entry wins; unmatched turns cost
/// `default`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostTable {
    #[serde(with = "crate::serde_rational", default = "Rational::zero")]
    pub default: Rational,
    pub entries: Vec<CostEntry>,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl CostTable {
    pub fn from_json(text: &str) -> Result<CostTable> {
        serde_json::from_str(text).map_err(|e| SclError::Invalid(format!("cost table: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cost tables serialize")
    }

    /// Cost of one turn.
    pub fn cost(&self, turn: &TurnType) -> Rational {
        self.entries
            .iter()
            .find(|e| e.from == turn.from + 1 && e.to == turn.to + 1 && e.classes.matches(turn.wclass))
            .map_or_else(|| self.default.clone(), |e| e.cost.clone())
    }

    /// The table for `[a, t^2]` in BS(2,3).
    pub fn commutator_t_squared() -> CostTable {
        let e = |from, to, classes, cost| CostEntry { from, to, classes, cost };
        CostTable {
            default: Rational::zero(),
            entries: vec![
                e(1, 1, ClassRule::Even, q(1, 4)),
                e(1, 1, ClassRule::Odd, q(3, 4)),
                e(4, 2, ClassRule::Even, q(1, 1)),
                e(4, 2, ClassRule::Odd, q(1, 2)),
                e(2, 4, ClassRule::All, q(0, 1)),
                e(3, 3, ClassRule::All, q(1, 3)),
                e(2, 1, ClassRule::All, q(1, 3)),
                e(4, 3, ClassRule::All, q(0, 1)),
                e(1, 4, ClassRule::All, q(1, 4)),
                e(3, 2, ClassRule::All, q(1, 1)),
            ],
        }
    }

    /// The winding-independent table for `a t^2 A T + T`, with arcs
    /// `a_1 = a`, `a_2` between the two `t`, `a_3 = A`, `a_4` on `T`.
    pub fn eg2(params: &GroupParams) -> CostTable {
        let (bm, bl) = (params.big_m.abs(), params.big_l.abs());
        let s = q(1, bm) + q(1, bl);
        let half = &s / Rational::from_integer(2.into());
        let one = Rational::from_integer(1.into());
        let e = |from, to, cost: Rational| CostEntry { from, to, classes: ClassRule::All, cost };
        CostTable {
            default: Rational::zero(),
            entries: vec![
                e(1, 1, q(1, bm)),
                e(1, 4, &one - &s),
                e(2, 1, q(1, bm)),
                e(2, 4, &one - &half),
                e(3, 2, q(1, bl)),
                e(3, 3, q(1, bl)),
                e(4, 2, half.clone()),
                e(4, 3, Rational::zero()),
            ],
        }
    }
}

/// Outcome of checking a cost table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub piece_bound: u32,
    pub pieces_checked: usize,
    /// Cheapest piece within the bound, with its cost.
    pub cheapest: Option<(Vec<(TurnType, u64)>, String)>,
    /// Cheapest disk-like piece of any length, from a shortest closed walk.
    pub cheapest_any_length: Option<(Vec<(TurnType, u64)>, String)>,
    /// Every piece within the bound costs at least 1.
    pub passes_bound: bool,
    /// Every disk-like piece, of any length, costs at least 1.
    pub passes_all: bool,
    #[serde(with = "crate::serde_rational::option")]
    pub kappa_upper: Option<Rational>,
    #[serde(with = "crate::serde_rational::option")]
    pub scl_lower: Option<Rational>,
}

impl CostReport {
    /// One-line summary, e.g. `lower bound 5/24 certified up to bound 4`.
    pub fn summary(&self) -> String {
        match (&self.scl_lower, self.passes_bound) {
            (Some(v), true) => format!("lower bound {v} certified up to bound {}", self.piece_bound),
            _ => match &self.cheapest {
                Some((_, c)) => format!("violation: a disk-like piece costs {c} < 1"),
                None => "no disk-like pieces within the bound".into(),
            },
        }
    }

    /// Outcome of the check over pieces of every length.
    pub fn all_lengths_note(&self) -> String {
        match (&self.cheapest_any_length, self.passes_all) {
            (_, true) => "every disk-like piece of any length costs at least 1".into(),
            (Some((p, c)), false) => {
                format!("a disk-like piece with {} turns costs {c} < 1", p.iter().map(|x| x.1).sum::<u64>())
            }
            (None, false) => unreachable!("a failing check has a witness"),
        }
    }
}

/// Checks a cost table against the disk-like pieces with at most
/// `piece_bound` turns and, when it passes, bounds `kappa` and scl.
///
/// Pieces are enumerated in irreducible mode: a walk that revisits a
/// (arc, winding) state splits into two shorter disk-like pieces, each of
/// which is checked, and costs are additive.
pub fn verify_turn_costs(
    chain: &Chain,
    params: &GroupParams,
    costs: &CostTable,
    piece_bound: u32,
) -> Result<CostReport> {
    let ctx = winding_context(chain, params)?;
    let turns = enumerate_turns(chain, &ctx);
    let q: Vec<Rational> = turns.turns.iter().map(|t| costs.cost(t)).collect();
    if let Some(t) = q.iter().position(|c| c.is_negative()) {
        return Err(SclError::Invalid(format!("negative cost {} on turn {:?}", q[t], turns.turns[t])));
    }
    let pieces = enumerate_pieces(&turns, &ctx, params, piece_bound, EnumerationMode::Irreducible, DEFAULT_MAX_PIECES)?;
    let piece_cost =
        |p: &PieceVector| -> Rational { p.turns.iter().map(|&(t, c)| &q[t] * Rational::from_integer(c.into())).sum() };
    let cheapest = pieces.iter().map(|p| (piece_cost(p), p)).min_by(|a, b| a.0.cmp(&b.0));
    let one = Rational::from_integer(1.into());
    let passes_bound = cheapest.as_ref().is_none_or(|(c, _)| *c >= one);
    let any = cheapest_closed_walk(&turns, &ctx, params, &q);
    let passes_all = any.as_ref().is_none_or(|(c, _)| *c >= one);
    let (kappa_upper, scl_lower) = if passes_bound {
        let k = max_cost_over_gluings(chain, &turns, &q)?;
        let v = chain.weighted_arc_count() / Rational::from_integer(4.into()) - &k / Rational::from_integer(2.into());
        (Some(k), Some(v))
    } else {
        (None, None)
    };
    let show = |p: &PieceVector| p.turn_types(&turns);
    Ok(CostReport {
        piece_bound,
        pieces_checked: pieces.len(),
        cheapest: cheapest.as_ref().map(|(c, p)| (show(p), c.to_string())),
        cheapest_any_length: any.map(|(c, p)| (show(&p), c.to_string())),
        passes_bound,
        passes_all,
        kappa_upper,
        scl_lower,
    })
}

/// Maximum of `sum q_t t_t` over nonnegative turn counts with `r_i` turns
/// leaving and entering every arc of loop `i` and paired turns equal.
fn max_cost_over_gluings(chain: &Chain, turns: &TurnAlphabet, q: &[Rational]) -> Result<Rational> {
    let mut model = LPModel::new(Sense::Max);
    model.add_vars(turns.len());
    for (a, arc) in turns.arcs.iter().enumerate() {
        let r = chain.terms[arc.loop_index].coeff.clone();
        let out: Vec<(usize, Rational)> =
            turns.turns_from(a).iter().map(|&t| (t, Rational::from_integer(1.into()))).collect();
        let into: Vec<(usize, Rational)> = (0..turns.len())
            .filter(|&t| turns.turns[t].to == a)
            .map(|t| (t, Rational::from_integer(1.into())))
            .collect();
        model.add_constraint(out, Relation::Eq, r.clone(), None);
        model.add_constraint(into, Relation::Eq, r, None);
    }
    for t in 0..turns.len() {
        let p = turns.pair(t);
        if p > t {
            model.add_constraint(
                vec![(t, Rational::from_integer(1.into())), (p, Rational::from_integer((-1).into()))],
                Relation::Eq,
                Rational::zero(),
                None,
            );
        }
    }
    model.set_objective(q.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect());
    let sol = solve(&model)?;
    if sol.status != LpStatus::Optimal {
        return Err(SclError::Lp(format!("gluing bound LP is {:?}", sol.status)));
    }
    verify_optimality(&model, &sol).map_err(|v| SclError::Lp(format!("gluing bound certificate failed: {v}")))?;
    Ok(sol.objective_value)
}

/// Cheapest closed walk of winding `0 mod |D_v|` under nonnegative costs:
/// Dijkstra from each `(a, 0)` in the (arc, winding) graph.
fn cheapest_closed_walk(
    turns: &TurnAlphabet,
    ctx: &WindingContext,
    params: &GroupParams,
    q: &[Rational],
) -> Option<(Rational, PieceVector)> {
    let dv = ctx.dv_abs;
    let na = turns.arcs.len();
    let step: Vec<u64> = turns.turns.iter().map(|t| turn_winding(t, &turns.arcs, ctx, params)).collect();
    let idx = |a: usize, w: u64| a * dv as usize + w as usize;
    let mut best: Option<(Rational, Vec<u32>)> = None;
    for root in 0..na {
        let mut dist: Vec<Option<Rational>> = vec![None; na * dv as usize];
        let mut parent: Vec<Option<(usize, u32)>> = vec![None; na * dv as usize];
        let mut heap = BinaryHeap::new();
        // The root itself is settled only through a closing turn.
        let mut closing: Option<(Rational, usize, u32)> = None;
        heap.push(Reverse((Rational::zero(), idx(root, 0))));
        let mut settled = vec![false; na * dv as usize];
        while let Some(Reverse((d, u))) = heap.pop() {
            if settled[u] {
                continue;
            }
            settled[u] = true;
            let (a, w) = (u / dv as usize, u as u64 % dv);
            for &t in turns.turns_from(a) {
                let tt = turns.turns[t];
                let v = idx(tt.to, (w + step[t]) % dv);
                let nd = &d + &q[t];
                if v == idx(root, 0) {
                    if closing.as_ref().is_none_or(|(c, _, _)| nd < *c) {
                        closing = Some((nd, u, t as u32));
                    }
                    continue;
                }
                if dist[v].as_ref().is_none_or(|old| nd < *old) {
                    dist[v] = Some(nd.clone());
                    parent[v] = Some((u, t as u32));
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if let Some((c, mut u, t)) = closing {
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                let mut walk = vec![t];
                while u != idx(root, 0) {
                    let (p, tt) = parent[u].expect("settled states have parents");
                    walk.push(tt);
                    u = p;
                }
                best = Some((c, walk));
            }
        }
    }
    best.map(|(c, mut walk)| {
        walk.sort_unstable();
        (c, PieceVector::from_sorted(&walk, 0, dv))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs_words::parse_chain;

    fn setup(text: &str, m: i64, l: i64) -> (Chain, GroupParams) {
        let p = GroupParams::new(m, l).unwrap();
        (parse_chain(text, &p).unwrap(), p)
    }

    #[test]
    fn commutator_table_certifies_five_twentyfourths() {
        let (c, p) = setup("at^2At^-2", 2, 3);
        let r = verify_turn_costs(&c, &p, &CostTable::commutator_t_squared(), 4).unwrap();
        assert!(r.passes_bound && r.passes_all, "{r:?}");
        assert_eq!(r.kappa_upper, Some(q(5, 4) + q(1, 3)));
        assert_eq!(r.scl_lower, Some(q(5, 24)));
        assert_eq!(r.summary(), "lower bound 5/24 certified up to bound 4");
        assert!(r.all_lengths_note().starts_with("every"));
    }

    #[test]
    fn eg2_table_certifies_the_formula() {
        for (m, l) in [(4, 6), (6, 9)] {
            let (c, p) = setup("at^2At^-1 + T", m, l);
            let r = verify_turn_costs(&c, &p, &CostTable::eg2(&p), 6).unwrap();
            assert!(r.passes_all, "{r:?}");
            let expect = q(1, 2) - q(1, 4 * m) - q(1, 4 * l);
            assert_eq!(r.scl_lower, Some(expect));
        }
    }

    #[test]
    fn zero_costs_are_violated() {
        let (c, p) = setup("atAT", 2, 3);
        let zero = CostTable { default: Rational::zero(), entries: Vec::new() };
        let r = verify_turn_costs(&c, &p, &zero, 3).unwrap();
        assert!(!r.passes_bound && !r.passes_all);
        assert_eq!(r.scl_lower, None);
        assert!(r.summary().starts_with("violation"));
    }

    #[test]
    fn json_round_trip() {
        let t = CostTable::commutator_t_squared();
        assert_eq!(CostTable::from_json(&t.to_json()).unwrap(), t);
        let parsed = CostTable::from_json(
            r#"{"entries":[{"from":1,"to":1,"classes":{"residue":{"modulus":3,"residue":1}},"cost":"2/3"},
                           {"from":2,"to":2,"cost":"1"}]}"#,
        )
        .unwrap();
        assert_eq!(parsed.default, Rational::zero());
        assert_eq!(parsed.entries[1].classes, ClassRule::All);
    }
}
