//! Block/cut linear program for scl relative to the vertex group.
//!
//! A disk-like piece of total length divisible by `|D_v|` is cut by chords
//! into blocks of exactly `|D_v|` unit intervals. Blocks are described by
//! cut variables; the LP maximizes the orbifold Euler characteristic of the
//! blocks subject to block closure, chord gluing, turn pairing and the
//! normalizing condition, and `scl = sum r_i A_i / 4 - objective / 2`.

mod costs;
mod dispatch;

pub use costs::{verify_turn_costs, ClassRule, CostEntry, CostReport, CostTable};
pub use dispatch::{scl_with, SolveOptions, SolveReport, SolverChoice};

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bs_words::{Chain, GroupParams};
use crate::encoding::{
    enumerate_turns, generate_cuts, interval_alphabet_scaled, turn_winding, winding_context,
    winding_context_with_ceiling, CutVar, IntervalAlphabet, TurnAlphabet, WindingContext,
};
use crate::error::{Result, SclError};
use crate::exact_lp::colgen::{Master, Phase, ScaledDuals};
use crate::exact_lp::{solve_seeded, verify_optimality, LPModel, LpStatus, Relation, Sense, SimplexOptions};
use crate::solver_pieces::{obstructed_result, PieceVector};
use crate::Rational;

/// A finite scl value, or the infinity flag of a chain that is not null-homologous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SclValue {
    Finite(#[serde(with = "crate::serde_rational")] Rational),
    Infinite,
}

impl SclValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            SclValue::Finite(v) => Some(v),
            SclValue::Infinite => None,
        }
    }
}

impl fmt::Display for SclValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SclValue::Finite(v) => write!(f, "{v}"),
            SclValue::Infinite => write!(f, "infinity"),
        }
    }
}

/// Which path produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    Block,
    Pieces,
    /// |M| = 1 or |L| = 1: scl vanishes identically.
    Solvable,
    /// Homology obstruction, no LP was solved.
    Homology,
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolverTag::Block => "block",
            SolverTag::Pieces => "pieces",
            SolverTag::Solvable => "solvable",
            SolverTag::Homology => "homology",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpStats {
    pub variables: usize,
    pub constraints: usize,
    pub pivots: u64,
    /// Column generation rounds (block path only).
    pub rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SclResult {
    pub value: SclValue,
    pub solver: SolverTag,
    pub rho: u32,
    pub dv_abs: u64,
    pub lp_stats: LpStats,
    /// True when the relative value is also the absolute scl.
    pub absolute_equals_relative: bool,
    pub homology_note: String,
    /// Every LP solve behind the value passed `verify_optimality`.
    pub verified: bool,
    /// The LP covers every disk-like piece. When false (piece LP with a
    /// short turn bound) the value is an upper bound.
    pub complete: bool,
}

/// Outcome of the homology test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomologyCheck {
    Ok { absolute_equals_relative: bool, note: String },
    Obstructed { reason: String },
}

impl HomologyCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, HomologyCheck::Ok { .. })
    }
}

/// `sum r_i h(g_i) = 0`; when `M = L` the a-part of H_1 is free, so the
/// total a-exponent (including dropped elliptic terms) decides whether the
/// relative value is also the absolute one.
pub fn homology_check(chain: &Chain, params: &GroupParams) -> HomologyCheck {
    let th = chain.t_homology();
    if !th.is_zero() {
        return HomologyCheck::Obstructed { reason: format!("scl undefined/infinite: nonzero t-homology ({th})") };
    }
    if params.big_m != params.big_l {
        return HomologyCheck::Ok { absolute_equals_relative: true, note: "null-homologous".into() };
    }
    let mut ah = chain.a_homology();
    for e in &chain.dropped_elliptic {
        ah += &e.coeff * Rational::from_integer(e.power.into());
    }
    if ah.is_zero() {
        HomologyCheck::Ok { absolute_equals_relative: true, note: "null-homologous; a-homology vanishes".into() }
    } else {
        HomologyCheck::Ok {
            absolute_equals_relative: false,
            note: format!("M = L and the total a-exponent is {ah}; value is relative to <a>, absolute scl is infinite"),
        }
    }
}

/// Ceilings and options for the block path.
#[derive(Debug, Clone)]
pub struct BlockOptions {
    /// Largest `|D_v|` accepted.
    pub max_dv: u64,
    /// Ceiling on cut variables (materialized model) or generated block
    /// columns (column generation).
    pub max_cuts: u64,
    pub simplex: SimplexOptions,
}

pub const DEFAULT_MAX_DV: u64 = 64;
pub const DEFAULT_MAX_CUTS: u64 = 2_000_000;

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { max_dv: DEFAULT_MAX_DV, max_cuts: DEFAULT_MAX_CUTS, simplex: SimplexOptions::default() }
    }
}

/// Alphabets shared by both block formulations. With `|D_v| = 1` every
/// length is doubled so that a block can carry two chord ends.
struct BlockSetup {
    ctx: WindingContext,
    turns: TurnAlphabet,
    alpha: IntervalAlphabet,
    /// Rows of the pairing and normalizing constraints touched by each interval
    /// when it is the right end of a cut.
    occ: Vec<Vec<(usize, i64)>>,
    /// Right-hand sides of those rows.
    side_rhs: Vec<Rational>,
}

fn block_setup(chain: &Chain, params: &GroupParams, opts: &BlockOptions) -> Result<BlockSetup> {
    let ctx = winding_context_with_ceiling(chain, params, Some(opts.max_dv))?;
    let turns = enumerate_turns(chain, &ctx);
    let scale = if ctx.dv_abs == 1 { 2 } else { 1 };
    let alpha = interval_alphabet_scaled(&turns, &ctx, params, scale);
    let mut occ = vec![Vec::new(); alpha.len()];
    let mut side_rhs = Vec::new();
    for t in 0..turns.len() {
        let p = turns.pair(t);
        if p > t {
            let r = side_rhs.len();
            side_rhs.push(Rational::zero());
            occ[alpha.turn_first(t) as usize].push((r, 1));
            occ[alpha.turn_first(p) as usize].push((r, -1));
        }
    }
    for (i, &a) in turns.loop_first_arc.iter().enumerate() {
        let r = side_rhs.len();
        side_rhs.push(chain.terms[i].coeff.clone());
        occ[alpha.arc_first(a) as usize].push((r, 1));
    }
    Ok(BlockSetup { ctx, turns, alpha, occ, side_rhs })
}

fn cut_objective(block_len: u32, genuine: bool) -> Rational {
    let chi = Rational::new(1.into(), (block_len as i64).into());
    if genuine {
        chi - Rational::new(1.into(), 2.into())
    } else {
        chi
    }
}

/// Glue-row key of the chord carried by a genuine cut: the `next`-class and
/// `prev`-class it joins. A `k = 1` cut `(b, J)` counts `+1`, a `k = |D_v|`
/// cut `(I, b)` counts `-1` in the key of the chord it glues to.
fn chord_key(alpha: &IntervalAlphabet, cut: &CutVar) -> Option<((u32, u32), i64)> {
    if !cut.genuine {
        return None;
    }
    if cut.k == 1 {
        Some(((alpha.next_class(cut.b), alpha.prev_class(cut.ik1)), 1))
    } else {
        Some(((alpha.class_containing_as_next(cut.b), alpha.class_containing_as_prev(cut.ik)), -1))
    }
}

/// The cut LP written out in full.
#[derive(Debug, Clone)]
pub struct BlockLp {
    pub model: LPModel,
    pub cuts: Vec<CutVar>,
    pub ctx: WindingContext,
    pub turns: TurnAlphabet,
    pub alpha: IntervalAlphabet,
}

/// Materializes every cut variable and constraint.
pub fn build_block_lp(chain: &Chain, params: &GroupParams) -> Result<BlockLp> {
    build_block_lp_with(chain, params, &BlockOptions::default())
}

pub fn build_block_lp_with(chain: &Chain, params: &GroupParams, opts: &BlockOptions) -> Result<BlockLp> {
    if chain.is_empty() {
        return Err(SclError::EmptyChain);
    }
    let setup = block_setup(chain, params, opts)?;
    let alpha = &setup.alpha;
    let cuts = generate_cuts(alpha, opts.max_cuts)?;
    let d = alpha.block_len;
    let mut model = LPModel::new(Sense::Max);
    model.add_vars(cuts.len());
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); setup.side_rhs.len()];
    let mut rhs = setup.side_rhs.clone();
    let mut names: Vec<String> = (0..rhs.len()).map(|i| format!("side{i}")).collect();
    let mut node_rows: HashMap<(u32, u32, u32), usize> = HashMap::new();
    let mut glue_rows: HashMap<(u32, u32), usize> = HashMap::new();
    let new_row =
        |rows: &mut Vec<Vec<(usize, Rational)>>, rhs: &mut Vec<Rational>, names: &mut Vec<String>, name: String| {
            rows.push(Vec::new());
            rhs.push(Rational::zero());
            names.push(name);
            rows.len() - 1
        };
    for (j, cut) in cuts.iter().enumerate() {
        // Flow out of (b, I_k, k) and into (b, I_{k+1}, k+1); the closing
        // node (b, b, d+1) is identified with (b, b, 1).
        let from = (cut.b, cut.ik, cut.k);
        let to_k = if cut.k == d { 1 } else { cut.k + 1 };
        let to = (cut.b, cut.ik1, to_k);
        if from != to {
            for (node, sign) in [(from, -1), (to, 1)] {
                let r = *node_rows.entry(node).or_insert_with(|| {
                    new_row(&mut rows, &mut rhs, &mut names, format!("node{}_{}_{}", node.0, node.1, node.2))
                });
                rows[r].push((j, Rational::from_integer(sign.into())));
            }
        }
        if let Some((key, sign)) = chord_key(alpha, cut) {
            let r = *glue_rows
                .entry(key)
                .or_insert_with(|| new_row(&mut rows, &mut rhs, &mut names, format!("glue{}_{}", key.0, key.1)));
            rows[r].push((j, Rational::from_integer(sign.into())));
        }
        for &(r, c) in &setup.occ[cut.ik1 as usize] {
            rows[r].push((j, Rational::from_integer(c.into())));
        }
    }
    for ((coeffs, b), name) in rows.into_iter().zip(rhs).zip(names) {
        model.add_constraint(coeffs, Relation::Eq, b, Some(name));
    }
    model.set_objective(cuts.iter().enumerate().map(|(j, c)| (j, cut_objective(d, c.genuine))).collect());
    Ok(BlockLp { model, cuts, ctx: setup.ctx, turns: setup.turns, alpha: setup.alpha })
}

/// One block: `b` followed by `|D_v| - 1` further intervals, closing back
/// on `b`. The flags mark genuine cuts at `k = 1` and `k = |D_v|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub b: u32,
    pub intervals: Vec<u32>,
    pub genuine_first: bool,
    pub genuine_last: bool,
}

impl Block {
    /// Interval at position `k` (1-based, `k = 1` is `b`).
    pub fn at(&self, k: u32) -> u32 {
        if k == 1 {
            self.b
        } else {
            self.intervals[k as usize - 2]
        }
    }

    /// The cut variables of the block, `k = 1..=|D_v|`.
    pub fn cuts(&self) -> Vec<CutVar> {
        let d = self.intervals.len() as u32 + 1;
        (1..=d)
            .map(|k| {
                let ik1 = if k == d { self.b } else { self.at(k + 1) };
                let genuine = (k == 1 && self.genuine_first) || (k == d && self.genuine_last);
                CutVar { b: self.b, ik: self.at(k), ik1, k, genuine }
            })
            .collect()
    }

    /// Contribution `1 - s/2` to the objective, `s` the number of genuine cuts.
    pub fn chi(&self) -> Rational {
        let s = self.genuine_first as i64 + self.genuine_last as i64;
        Rational::one() - Rational::new(s.into(), 2.into())
    }
}

/// Optimum of the block LP: the disk-like pieces of a maximizing vector.
#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub result: SclResult,
    pub turns: Option<TurnAlphabet>,
    pub pieces: Vec<PieceVector>,
    pub weights: Vec<Rational>,
    /// Optimal value `kappa` of the Euler characteristic objective.
    pub objective: Rational,
}

/// scl through the block LP with ceilings from [`BlockOptions::from_env`].
pub fn scl_block(chain: &Chain, params: &GroupParams) -> Result<SclResult> {
    Ok(solve_block(chain, params, &BlockOptions::from_env())?.result)
}

impl BlockOptions {
    /// Defaults, with `max_cuts` read from `BS_SCL_MAX_CUTS` when set.
    pub fn from_env() -> BlockOptions {
        let mut o = BlockOptions::default();
        if let Some(v) = std::env::var("BS_SCL_MAX_CUTS").ok().and_then(|v| v.trim().parse().ok()) {
            o.max_cuts = v;
        }
        o
    }
}

fn solvable_result(chain: &Chain, params: &GroupParams) -> Result<SclResult> {
    let ctx = winding_context(chain, params)?;
    Ok(SclResult {
        value: SclValue::Finite(Rational::zero()),
        solver: SolverTag::Solvable,
        rho: ctx.rho,
        dv_abs: ctx.dv_abs,
        lp_stats: LpStats::default(),
        absolute_equals_relative: true,
        homology_note: "solvable group: scl vanishes".into(),
        verified: true,
        complete: true,
    })
}

/// Solves the block LP in its compact flow form.
///
/// Blocks glued along genuine cuts are exactly the disk-like pieces. For
/// each root arc `a` the model carries a flow on the states
/// (arc, winding mod `|D_v|`) restricted to arcs `>= a`, leaving and
/// re-entering `(a, 0)`; conservation holds at every other state, so the
/// flow splits into closed walks of winding `0 mod |D_v|`, one piece per
/// unit leaving the root. Turn counts enter the pairing and normalizing
/// rows, and the objective counts the units leaving each root.
pub fn solve_block(chain: &Chain, params: &GroupParams, opts: &BlockOptions) -> Result<BlockSolution> {
    if chain.is_empty() {
        return Err(SclError::EmptyChain);
    }
    let empty = |result| BlockSolution {
        result,
        turns: None,
        pieces: Vec::new(),
        weights: Vec::new(),
        objective: Rational::zero(),
    };
    let (absolute, note) = match homology_check(chain, params) {
        HomologyCheck::Obstructed { reason } => {
            let ctx = winding_context(chain, params)?;
            return Ok(empty(obstructed_result(reason, ctx.rho, ctx.dv_abs, SolverTag::Homology)));
        }
        HomologyCheck::Ok { absolute_equals_relative, note } => (absolute_equals_relative, note),
    };
    if params.is_solvable() {
        return Ok(empty(solvable_result(chain, params)?));
    }
    let ctx = winding_context_with_ceiling(chain, params, Some(opts.max_dv))?;
    let turns = enumerate_turns(chain, &ctx);
    let flow = FlowLp::build(chain, &turns, &ctx, params, opts.max_cuts)?;
    let sol = solve_seeded(&flow.model, &opts.simplex)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(SclError::Lp("block LP is infeasible".into())),
        LpStatus::Unbounded => return Err(SclError::Lp("block LP is unbounded".into())),
    }
    verify_optimality(&flow.model, &sol).map_err(|v| SclError::Lp(format!("block LP certificate failed: {v}")))?;
    let objective = sol.objective_value.clone();
    let (pieces, weights) = flow.decompose(&sol.primal, ctx.dv_abs);
    let value =
        chain.weighted_arc_count() / Rational::from_integer(4.into()) - &objective / Rational::from_integer(2.into());
    Ok(BlockSolution {
        result: SclResult {
            value: SclValue::Finite(value),
            solver: SolverTag::Block,
            rho: ctx.rho,
            dv_abs: ctx.dv_abs,
            lp_stats: LpStats {
                variables: flow.model.num_vars,
                constraints: flow.model.constraints.len(),
                pivots: sol.pivots,
                rounds: 0,
            },
            absolute_equals_relative: absolute,
            homology_note: note,
            verified: true,
            complete: true,
        },
        turns: Some(turns),
        pieces,
        weights,
        objective,
    })
}

/// One flow variable: turn `turn` taken from state `(from, w)` in the
/// flow rooted at `root`.
#[derive(Debug, Clone, Copy)]
struct FlowEdge {
    root: usize,
    turn: usize,
    from: usize,
    w: u64,
    to: usize,
    w_to: u64,
}

struct FlowLp {
    model: LPModel,
    edges: Vec<FlowEdge>,
}

impl FlowLp {
    fn build(
        chain: &Chain,
        turns: &TurnAlphabet,
        ctx: &WindingContext,
        params: &GroupParams,
        max_vars: u64,
    ) -> Result<FlowLp> {
        let dv = ctx.dv_abs;
        let na = turns.arcs.len();
        let step: Vec<u64> = turns.turns.iter().map(|tt| turn_winding(tt, &turns.arcs, ctx, params)).collect();
        let state = |a: usize, w: u64| a * dv as usize + w as usize;
        let mut edges = Vec::new();
        for root in 0..na {
            let usable = |t: usize| turns.turns[t].from >= root && turns.turns[t].to >= root;
            // States reachable from (root, 0) and reaching back to it.
            let mut fwd = vec![false; na * dv as usize];
            let mut stack = vec![(root, 0u64)];
            fwd[state(root, 0)] = true;
            while let Some((a, w)) = stack.pop() {
                for &t in turns.turns_from(a) {
                    if !usable(t) {
                        continue;
                    }
                    let nxt = (turns.turns[t].to, (w + step[t]) % dv);
                    if !fwd[state(nxt.0, nxt.1)] {
                        fwd[state(nxt.0, nxt.1)] = true;
                        stack.push(nxt);
                    }
                }
            }
            let mut into: Vec<Vec<usize>> = vec![Vec::new(); na];
            for t in 0..turns.len() {
                if usable(t) {
                    into[turns.turns[t].to].push(t);
                }
            }
            let mut bwd = vec![false; na * dv as usize];
            let mut stack = vec![(root, 0u64)];
            bwd[state(root, 0)] = true;
            while let Some((a, w)) = stack.pop() {
                for &t in &into[a] {
                    let prev = (turns.turns[t].from, (w + dv - step[t]) % dv);
                    if !bwd[state(prev.0, prev.1)] {
                        bwd[state(prev.0, prev.1)] = true;
                        stack.push(prev);
                    }
                }
            }
            for t in 0..turns.len() {
                if !usable(t) {
                    continue;
                }
                let tt = turns.turns[t];
                for w in 0..dv {
                    let w_to = (w + step[t]) % dv;
                    if fwd[state(tt.from, w)] && bwd[state(tt.to, w_to)] {
                        edges.push(FlowEdge { root, turn: t, from: tt.from, w, to: tt.to, w_to });
                    }
                }
            }
            if edges.len() as u64 > max_vars {
                return Err(SclError::Resource(format!("more than {max_vars} flow variables (ceiling)")));
            }
        }
        let mut model = LPModel::new(Sense::Max);
        model.add_vars(edges.len());
        let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
        let mut rhs: Vec<Rational> = Vec::new();
        let mut turn_rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); turns.len()];
        for t in 0..turns.len() {
            let p = turns.pair(t);
            if p > t {
                turn_rows[t].push((rows.len(), 1));
                turn_rows[p].push((rows.len(), -1));
                rows.push(Vec::new());
                rhs.push(Rational::zero());
            }
        }
        for (i, &a) in turns.loop_first_arc.iter().enumerate() {
            for &t in turns.turns_from(a) {
                turn_rows[t].push((rows.len(), 1));
            }
            rows.push(Vec::new());
            rhs.push(chain.terms[i].coeff.clone());
        }
        let mut node_rows: HashMap<(usize, usize, u64), usize> = HashMap::new();
        let mut objective = Vec::new();
        let one = Rational::one();
        for (j, e) in edges.iter().enumerate() {
            for &(r, c) in &turn_rows[e.turn] {
                rows[r].push((j, Rational::from_integer(c.into())));
            }
            for (node, sign) in [((e.root, e.from, e.w), -1i64), ((e.root, e.to, e.w_to), 1)] {
                if node.1 == e.root && node.2 == 0 {
                    continue;
                }
                let r = *node_rows.entry(node).or_insert_with(|| {
                    rows.push(Vec::new());
                    rhs.push(Rational::zero());
                    rows.len() - 1
                });
                rows[r].push((j, Rational::from_integer(sign.into())));
            }
            if e.from == e.root && e.w == 0 {
                objective.push((j, one.clone()));
            }
        }
        for (coeffs, b) in rows.into_iter().zip(rhs) {
            model.add_constraint(coeffs, Relation::Eq, b, None);
        }
        model.set_objective(objective);
        Ok(FlowLp { model, edges })
    }

    /// Splits an optimal flow into weighted pieces, one closed walk at a time.
    fn decompose(&self, x: &[Rational], dv: u64) -> (Vec<PieceVector>, Vec<Rational>) {
        let mut rest: Vec<Rational> = x.to_vec();
        let mut out_of: HashMap<(usize, usize, u64), Vec<usize>> = HashMap::new();
        for (j, e) in self.edges.iter().enumerate() {
            if x[j].is_positive() {
                out_of.entry((e.root, e.from, e.w)).or_default().push(j);
            }
        }
        let mut merged: HashMap<Vec<(usize, u32)>, Rational> = HashMap::new();
        let mut order: Vec<Vec<(usize, u32)>> = Vec::new();
        let roots: Vec<usize> = {
            let mut r: Vec<usize> = self.edges.iter().map(|e| e.root).collect();
            r.dedup();
            r
        };
        for root in roots {
            loop {
                let src = (root, root, 0u64);
                let pick = |node: &(usize, usize, u64), rest: &[Rational]| {
                    out_of.get(node).and_then(|v| v.iter().copied().find(|&j| rest[j].is_positive()))
                };
                let Some(first) = pick(&src, &rest) else { break };
                // Follow positive edges back to the root; a repeated state
                // closes a zero-value cycle that is cancelled on the spot.
                let mut path = vec![first];
                let mut pos: HashMap<(usize, usize, u64), usize> = HashMap::new();
                loop {
                    let last = path.len() - 1;
                    let e = self.edges[path[last]];
                    let node = (root, e.to, e.w_to);
                    if node == src {
                        break;
                    }
                    match pos.get(&node) {
                        Some(&k) if k != last => {
                            let cycle: Vec<usize> = path.split_off(k + 1);
                            let m = cycle.iter().map(|&j| rest[j].clone()).min().expect("nonempty cycle");
                            for &j in &cycle {
                                rest[j] -= &m;
                            }
                            pos.retain(|_, i| *i <= k);
                        }
                        _ => {
                            pos.insert(node, last);
                        }
                    }
                    let j = pick(&node, &rest).expect("conservation gives an outgoing edge");
                    path.push(j);
                }
                let m = path.iter().map(|&j| rest[j].clone()).min().expect("nonempty path");
                for &j in &path {
                    rest[j] -= &m;
                }
                let mut walk: Vec<u32> = path.iter().map(|&j| self.edges[j].turn as u32).collect();
                walk.sort_unstable();
                let piece = PieceVector::from_sorted(&walk, 0, dv);
                if !merged.contains_key(&piece.turns) {
                    order.push(piece.turns.clone());
                }
                *merged.entry(piece.turns).or_insert_with(Rational::zero) += m;
            }
        }
        let mut pieces = Vec::new();
        let mut weights = Vec::new();
        for key in order {
            let walk: Vec<u32> = key.iter().flat_map(|&(t, c)| std::iter::repeat_n(t as u32, c as usize)).collect();
            pieces.push(PieceVector::from_sorted(&walk, 0, dv));
            weights.push(merged.remove(&key).expect("recorded"));
        }
        (pieces, weights)
    }
}

/// Block-column solution of the cut LP itself.
#[derive(Debug, Clone)]
pub struct CutLpSolution {
    pub objective: Rational,
    pub blocks: Vec<Block>,
    pub weights: Vec<Rational>,
    pub stats: LpStats,
}

/// Solves the cut LP by column generation over blocks, pricing each block
/// by an exact longest-path computation. Glue rows are added as chords
/// appear, so this is practical only on small alphabets; it serves as an
/// independent check of [`solve_block`].
pub fn solve_cut_lp(chain: &Chain, params: &GroupParams, opts: &BlockOptions) -> Result<CutLpSolution> {
    if chain.is_empty() {
        return Err(SclError::EmptyChain);
    }
    let setup = block_setup(chain, params, opts)?;
    let alpha = &setup.alpha;
    let mut master = Master::new(opts.simplex.clone());
    for r in &setup.side_rhs {
        master.add_row(Relation::Eq, r.clone());
    }
    let mut glue_rows: HashMap<(u32, u32), usize> = HashMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut known: HashSet<Block> = HashSet::new();
    let mut rounds = 0u32;
    let final_solve = loop {
        rounds += 1;
        let s = master.solve()?;
        let scaled = ScaledDuals::new(&s.duals)
            .ok_or_else(|| SclError::Resource("dual denominators exceed integer pricing range".into()))?;
        let glue_duals: HashMap<(u32, u32), i128> =
            glue_rows.iter().map(|(k, &r)| (*k, scaled.y[r])).filter(|(_, y)| *y != 0).collect();
        let found = price_blocks(alpha, &setup.occ, &scaled, &glue_duals, s.phase);
        if found.is_empty() {
            if s.phase == Phase::Feasibility {
                return Err(SclError::Lp("cut LP is infeasible".into()));
            }
            break s;
        }
        let batch = (2 * master.num_rows()).max(64);
        for (_, block) in found.into_iter().take(batch) {
            if !known.insert(block.clone()) {
                return Err(SclError::Lp("pricing returned a block already in the master".into()));
            }
            let entries = block_entries(&block, alpha, &setup.occ, &mut glue_rows, &mut master);
            master.add_column(entries, block.chi());
            blocks.push(block);
        }
        if blocks.len() as u64 > opts.max_cuts {
            return Err(SclError::Resource(format!(
                "{} block columns exceed the ceiling {}",
                blocks.len(),
                opts.max_cuts
            )));
        }
    };
    let sol = master.solution().ok_or_else(|| SclError::Lp("master has no optimal solution".into()))?;
    let model = master.model();
    verify_optimality(&model, &sol).map_err(|v| SclError::Lp(format!("cut LP certificate failed: {v}")))?;
    Ok(CutLpSolution {
        objective: final_solve.value,
        blocks,
        weights: sol.primal,
        stats: LpStats {
            variables: model.num_vars,
            constraints: model.constraints.len(),
            pivots: master.pivots(),
            rounds,
        },
    })
}

fn block_entries(
    block: &Block,
    alpha: &IntervalAlphabet,
    occ: &[Vec<(usize, i64)>],
    glue_rows: &mut HashMap<(u32, u32), usize>,
    master: &mut Master,
) -> Vec<(usize, Rational)> {
    let mut acc: HashMap<usize, i64> = HashMap::new();
    for cut in block.cuts() {
        for &(r, c) in &occ[cut.ik1 as usize] {
            *acc.entry(r).or_default() += c;
        }
        if let Some((key, sign)) = chord_key(alpha, &cut) {
            let r = *glue_rows.entry(key).or_insert_with(|| master.add_row(Relation::Eq, Rational::zero()));
            *acc.entry(r).or_default() += sign;
        }
    }
    let mut out: Vec<(usize, Rational)> =
        acc.into_iter().filter(|(_, c)| *c != 0).map(|(r, c)| (r, Rational::from_integer(c.into()))).collect();
    out.sort_by_key(|(r, _)| *r);
    out
}

const UNREACHED: i128 = i128::MIN / 4;

/// Blocks of positive reduced cost, best first, at most one per `b`.
///
/// Values are reduced costs multiplied by `2 * den * |D_v|`: a dummy cut
/// contributes `2 den`, a genuine cut `2 den - den |D_v|`, an interval `I`
/// at a cut end `-2 |D_v| sum y_r a_r(I)`, and a chord its glue dual.
fn price_blocks(
    alpha: &IntervalAlphabet,
    occ: &[Vec<(usize, i64)>],
    duals: &ScaledDuals,
    glue: &HashMap<(u32, u32), i128>,
    phase: Phase,
) -> Vec<(i128, Block)> {
    let n = alpha.len();
    let d = alpha.block_len;
    let dd = d as i128;
    let (dummy, genuine) = match phase {
        Phase::Feasibility => (0, 0),
        Phase::Optimality => (2 * duals.den, 2 * duals.den - duals.den * dd),
    };
    let w: Vec<i128> =
        occ.iter().map(|o| -2 * dd * o.iter().map(|&(r, c)| duals.y[r] * c as i128).sum::<i128>()).collect();
    let glue_at = |key: (u32, u32)| glue.get(&key).copied().unwrap_or(0);
    let mut found: Vec<(i128, Block)> = (0..n as u32)
        .into_par_iter()
        .filter_map(|b| {
            // cur[j]: best value with interval j at the current position.
            let mut cur = vec![UNREACHED; n];
            let mut first_genuine = vec![false; n];
            let ncl = alpha.next_class(b);
            for j in 0..n as u32 {
                cur[j as usize] = genuine - 2 * dd * glue_at((ncl, alpha.prev_class(j))) + w[j as usize];
                first_genuine[j as usize] = true;
            }
            for &j in alpha.next(b) {
                let v = dummy + w[j as usize];
                if v > cur[j as usize] {
                    cur[j as usize] = v;
                    first_genuine[j as usize] = false;
                }
            }
            let mut back: Vec<Vec<u32>> = Vec::with_capacity(d as usize);
            for _ in 3..=d {
                let mut nxt = vec![UNREACHED; n];
                let mut from = vec![u32::MAX; n];
                for j in 0..n {
                    for &i in alpha.prev(j as u32) {
                        let v = cur[i as usize];
                        if v > nxt[j] {
                            nxt[j] = v;
                            from[j] = i;
                        }
                    }
                    if nxt[j] > UNREACHED {
                        nxt[j] += dummy + w[j];
                    }
                }
                back.push(from);
                cur = nxt;
            }
            let cnext = alpha.class_containing_as_next(b);
            let mut best: Option<(i128, u32, bool)> = None;
            for k in 0..n as u32 {
                if cur[k as usize] <= UNREACHED {
                    continue;
                }
                let base = cur[k as usize] + w[b as usize];
                let g = base + genuine + 2 * dd * glue_at((cnext, alpha.class_containing_as_prev(k)));
                let mut cand = (g, k, true);
                if alpha.consecutive(k, b) && base + dummy > g {
                    cand = (base + dummy, k, false);
                }
                if best.is_none_or(|(v, _, _)| cand.0 > v) {
                    best = Some(cand);
                }
            }
            let (value, last, genuine_last) = best?;
            if value <= 0 {
                return None;
            }
            let mut seq = vec![last];
            for from in back.iter().rev() {
                let prev = from[*seq.last().expect("nonempty") as usize];
                seq.push(prev);
            }
            seq.reverse();
            let genuine_first = first_genuine[seq[0] as usize];
            Some((value, Block { b, intervals: seq, genuine_first, genuine_last }))
        })
        .collect();
    found.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.b.cmp(&y.1.b)));
    found
}
