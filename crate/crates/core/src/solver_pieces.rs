//! Piece-enumeration LP.
//!
//! Disk-like pieces are enumerated as closed walks in the multigraph whose
//! vertices are arcs and whose edges are turn types, tracking the winding
//! modulo `|D_v|`. Each piece becomes a column of an LP with the turn-pairing
//! and normalizing rows; the optimum counts disk-like pieces per unit of
//! boundary and gives an upper bound for scl that is exact once the bound
//! on turns per piece is large enough.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bs_words::{Chain, GroupParams};
use crate::encoding::{enumerate_turns, turn_winding, winding_context, TurnAlphabet, TurnType, WindingContext};
use crate::error::{Result, SclError};
use crate::exact_lp::{solve_by_pricing, verify_optimality, LPModel, LpStatus, Relation, Sense, SimplexOptions};
use crate::solver_block::{homology_check, HomologyCheck, LpStats, SclResult, SclValue, SolverTag};
use crate::Rational;

/// Default ceiling on the number of enumerated pieces.
pub const DEFAULT_MAX_PIECES: usize = 4_000_000;

/// A piece as a multiset of turn types (indices into a [`TurnAlphabet`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PieceVector {
    /// `(turn index, multiplicity)`, sorted by turn index.
    pub turns: Vec<(usize, u32)>,
    pub winding: u64,
    pub disk_like: bool,
    pub turn_count: u32,
}

impl PieceVector {
    pub(crate) fn from_sorted(walk: &[u32], winding: u64, dv: u64) -> PieceVector {
        let mut turns: Vec<(usize, u32)> = Vec::new();
        for &t in walk {
            match turns.last_mut() {
                Some((u, c)) if *u == t as usize => *c += 1,
                _ => turns.push((t as usize, 1)),
            }
        }
        PieceVector { turns, winding, disk_like: winding.is_multiple_of(dv), turn_count: walk.len() as u32 }
    }

    pub fn count(&self, turn: usize) -> u32 {
        self.turns.iter().find(|(t, _)| *t == turn).map_or(0, |(_, c)| *c)
    }

    pub fn turn_types(&self, alpha: &TurnAlphabet) -> Vec<(TurnType, u64)> {
        self.turns.iter().map(|&(t, c)| (alpha.turns[t], c as u64)).collect()
    }
}

/// Which closed walks are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    /// Every disk-like multiset within the bound.
    Exhaustive,
    /// Only walks that are simple in (arc, winding) states. A walk that
    /// revisits a state splits into two disk-like pieces with the same total
    /// turn vector, so dropping it does not change the LP optimum.
    Irreducible,
}

#[derive(Debug, Clone)]
pub struct PieceOptions {
    pub max_turns: u32,
    pub mode: EnumerationMode,
    pub max_pieces: usize,
    pub simplex: SimplexOptions,
}

impl PieceOptions {
    pub fn new(max_turns: u32) -> PieceOptions {
        PieceOptions {
            max_turns,
            mode: EnumerationMode::Irreducible,
            max_pieces: DEFAULT_MAX_PIECES,
            simplex: SimplexOptions::default(),
        }
    }
}

/// All disk-like pieces with at most `max_turns` turns, deduplicated as multisets.
pub fn enumerate_disklike_pieces(
    chain: &Chain,
    ctx: &WindingContext,
    params: &GroupParams,
    max_turns: u32,
) -> Result<Vec<PieceVector>> {
    let alpha = enumerate_turns(chain, ctx);
    enumerate_pieces(&alpha, ctx, params, max_turns, EnumerationMode::Exhaustive, DEFAULT_MAX_PIECES)
}

/// Fewest turns needed to get from one arc to another.
fn arc_distances(alpha: &TurnAlphabet) -> Vec<Vec<u32>> {
    let n = alpha.arcs.len();
    let mut adj = vec![Vec::new(); n];
    for t in &alpha.turns {
        if !adj[t.from].contains(&t.to) {
            adj[t.from].push(t.to);
        }
    }
    (0..n)
        .map(|src| {
            let mut dist = vec![u32::MAX; n];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(a) = queue.pop_front() {
                for &b in &adj[a] {
                    if dist[b] == u32::MAX {
                        dist[b] = dist[a] + 1;
                        queue.push_back(b);
                    }
                }
            }
            dist
        })
        .collect()
}

struct Walker<'a> {
    alpha: &'a TurnAlphabet,
    c: &'a [u64],
    closing: &'a HashMap<(usize, usize, u64), Vec<usize>>,
    dist: &'a [Vec<u32>],
    dv: u64,
    max_turns: usize,
    mode: EnumerationMode,
    t0: usize,
    i0: usize,
    walk: Vec<usize>,
    visited: Vec<bool>,
    found: HashSet<Vec<u32>>,
    total: &'a AtomicUsize,
    limit: usize,
    overflow: &'a AtomicBool,
}

impl Walker<'_> {
    fn record(&mut self) {
        let mut key: Vec<u32> = self.walk.iter().map(|&t| t as u32).collect();
        key.sort_unstable();
        if self.found.insert(key) && self.total.fetch_add(1, Ordering::Relaxed) + 1 > self.limit {
            self.overflow.store(true, Ordering::Relaxed);
        }
    }

    fn state(&self, arc: usize, s: u64) -> usize {
        arc * self.dv as usize + s as usize
    }

    fn dfs(&mut self, arc: usize, s: u64) {
        if self.overflow.load(Ordering::Relaxed) {
            return;
        }
        if arc == self.i0 && s == 0 {
            self.record();
            if self.mode == EnumerationMode::Irreducible {
                return;
            }
        }
        let remaining = self.max_turns - self.walk.len();
        if remaining == 0 || self.dist[arc][self.i0] as usize > remaining {
            return;
        }
        if remaining == 1 {
            let need = (self.dv - s) % self.dv;
            let closing = self.closing;
            if let Some(ts) = closing.get(&(arc, self.i0, need)) {
                let t0 = self.t0;
                for &t in ts.iter().filter(|&&t| t >= t0) {
                    self.walk.push(t);
                    self.record();
                    self.walk.pop();
                }
            }
            return;
        }
        let alpha = self.alpha;
        for &t in alpha.turns_from(arc) {
            if t < self.t0 {
                continue;
            }
            let nt = alpha.turns[t].to;
            let ns = (s + self.c[t]) % self.dv;
            let closes = nt == self.i0 && ns == 0;
            let idx = self.state(nt, ns);
            if self.mode == EnumerationMode::Irreducible && !closes {
                if self.visited[idx] {
                    continue;
                }
                self.visited[idx] = true;
            }
            self.walk.push(t);
            self.dfs(nt, ns);
            self.walk.pop();
            if self.mode == EnumerationMode::Irreducible && !closes {
                self.visited[idx] = false;
            }
        }
    }
}

/// Enumerates disk-like pieces over a prepared alphabet.
///
/// Walks are rooted at their smallest turn index, so each multiset is
/// produced only from its own root; roots are processed in parallel.
pub fn enumerate_pieces(
    alpha: &TurnAlphabet,
    ctx: &WindingContext,
    params: &GroupParams,
    max_turns: u32,
    mode: EnumerationMode,
    max_pieces: usize,
) -> Result<Vec<PieceVector>> {
    if max_turns == 0 || alpha.is_empty() {
        return Ok(Vec::new());
    }
    let dv = ctx.dv_abs;
    if (alpha.arcs.len() as u128) * (dv as u128) > u32::MAX as u128 {
        return Err(SclError::Resource("lifted state space too large".into()));
    }
    let c: Vec<u64> = alpha.turns.iter().map(|t| turn_winding(t, &alpha.arcs, ctx, params)).collect();
    let mut closing: HashMap<(usize, usize, u64), Vec<usize>> = HashMap::new();
    for (k, t) in alpha.turns.iter().enumerate() {
        closing.entry((t.from, t.to, c[k])).or_default().push(k);
    }
    let dist = arc_distances(alpha);
    let total = AtomicUsize::new(0);
    let overflow = AtomicBool::new(false);
    let per_root: Vec<Vec<Vec<u32>>> = (0..alpha.len())
        .into_par_iter()
        .map(|t0| {
            let start = alpha.turns[t0];
            let mut w = Walker {
                alpha,
                c: &c,
                closing: &closing,
                dist: &dist,
                dv,
                max_turns: max_turns as usize,
                mode,
                t0,
                i0: start.from,
                walk: vec![t0],
                visited: vec![false; alpha.arcs.len() * dv as usize],
                found: HashSet::new(),
                total: &total,
                limit: max_pieces,
                overflow: &overflow,
            };
            let s = c[t0] % dv;
            let first = w.state(start.from, 0);
            w.visited[first] = true;
            let idx = w.state(start.to, s);
            w.visited[idx] = true;
            w.dfs(start.to, s);
            let mut out: Vec<Vec<u32>> = w.found.into_iter().collect();
            out.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            out
        })
        .collect();
    if overflow.load(Ordering::Relaxed) {
        return Err(SclError::Resource(format!("more than {max_pieces} pieces with at most {max_turns} turns")));
    }
    Ok(per_root.into_iter().flatten().map(|walk| PieceVector::from_sorted(&walk, 0, dv)).collect())
}

/// Optimal piece weights and the resulting scl value.
#[derive(Debug, Clone)]
pub struct PieceSolution {
    pub result: SclResult,
    pub alphabet: TurnAlphabet,
    pub ctx: WindingContext,
    pub max_turns: u32,
    /// Every enumerated piece, in enumeration order.
    pub pieces: Vec<PieceVector>,
    /// Optimal weight of each piece.
    pub weights: Vec<Rational>,
    /// Optimal objective: weighted number of disk-like pieces.
    pub kappa: Rational,
    /// Optimal row multipliers of the piece LP.
    pub duals: Vec<Rational>,
}

impl PieceSolution {
    /// Pieces with positive weight.
    pub fn support(&self) -> impl Iterator<Item = (&PieceVector, &Rational)> {
        self.pieces.iter().zip(&self.weights).filter(|(_, w)| w.is_positive())
    }

    /// Weighted count of each turn type.
    pub fn turn_counts(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.alphabet.len()];
        for (p, w) in self.support() {
            for &(t, c) in &p.turns {
                out[t] += w * Rational::from_integer(c.into());
            }
        }
        out
    }
}

/// The piece LP: one column per piece, maximizing the total weight.
pub fn piece_lp(chain: &Chain, alpha: &TurnAlphabet, pieces: &[PieceVector]) -> LPModel {
    let mut model = LPModel::new(Sense::Max);
    model.add_vars(pieces.len());
    let mut used = vec![false; alpha.len()];
    for p in pieces {
        for &(t, _) in &p.turns {
            used[t] = true;
        }
    }
    // Row index and sign for each turn in a pairing row.
    let mut pair_row: Vec<Option<(usize, i64)>> = vec![None; alpha.len()];
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    for t in 0..alpha.len() {
        let p = alpha.pair(t);
        if p > t && (used[t] || used[p]) {
            pair_row[t] = Some((rows.len(), 1));
            pair_row[p] = Some((rows.len(), -1));
            rows.push(Vec::new());
            rhs.push(Rational::zero());
            names.push(format!("pair{t}_{p}"));
        }
    }
    let mut norm_row: Vec<Option<usize>> = vec![None; alpha.arcs.len()];
    for (i, &a) in alpha.loop_first_arc.iter().enumerate() {
        norm_row[a] = Some(rows.len());
        rows.push(Vec::new());
        rhs.push(chain.terms[i].coeff.clone());
        names.push(format!("norm{i}"));
    }
    for (j, p) in pieces.iter().enumerate() {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for &(t, c) in &p.turns {
            if let Some((r, s)) = pair_row[t] {
                *acc.entry(r).or_default() += s * c as i64;
            }
            if let Some(r) = norm_row[alpha.turns[t].from] {
                *acc.entry(r).or_default() += c as i64;
            }
        }
        for (r, v) in acc {
            if v != 0 {
                rows[r].push((j, Rational::from_integer(v.into())));
            }
        }
    }
    for ((coeffs, b), name) in rows.into_iter().zip(rhs).zip(names) {
        model.add_constraint(coeffs, Relation::Eq, b, Some(name));
    }
    model.set_objective((0..pieces.len()).map(|j| (j, Rational::one())).collect());
    model
}

pub(crate) fn obstructed_result(reason: String, rho: u32, dv_abs: u64, solver: SolverTag) -> SclResult {
    SclResult {
        value: SclValue::Infinite,
        solver,
        rho,
        dv_abs,
        lp_stats: LpStats::default(),
        absolute_equals_relative: false,
        homology_note: reason,
        verified: true,
        complete: true,
    }
}

/// Turn bound from which the piece LP is exact: an irreducible piece visits
/// each (arc, winding) state at most once.
pub fn piece_bound_for_completeness(alpha: &TurnAlphabet, ctx: &WindingContext) -> u64 {
    alpha.arcs.len() as u64 * ctx.dv_abs
}

/// scl through the piece LP with default options.
pub fn scl_pieces(chain: &Chain, params: &GroupParams, max_turns: u32) -> Result<PieceSolution> {
    scl_pieces_with(chain, params, &PieceOptions::new(max_turns))
}

pub fn scl_pieces_with(chain: &Chain, params: &GroupParams, opts: &PieceOptions) -> Result<PieceSolution> {
    if chain.is_empty() {
        return Err(SclError::EmptyChain);
    }
    let ctx = winding_context(chain, params)?;
    let alpha = enumerate_turns(chain, &ctx);
    let (absolute, note) = match homology_check(chain, params) {
        HomologyCheck::Obstructed { reason } => {
            return Ok(PieceSolution {
                result: obstructed_result(reason, ctx.rho, ctx.dv_abs, SolverTag::Homology),
                alphabet: alpha,
                ctx,
                max_turns: opts.max_turns,
                pieces: Vec::new(),
                weights: Vec::new(),
                kappa: Rational::zero(),
                duals: Vec::new(),
            });
        }
        HomologyCheck::Ok { absolute_equals_relative, note } => (absolute_equals_relative, note),
    };
    let pieces = enumerate_pieces(&alpha, &ctx, params, opts.max_turns, opts.mode, opts.max_pieces)?;
    if pieces.is_empty() {
        return Err(SclError::InfeasibleAtBound { max_turns: opts.max_turns });
    }
    let model = piece_lp(chain, &alpha, &pieces);
    let sol = solve_by_pricing(&model, &opts.simplex)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(SclError::InfeasibleAtBound { max_turns: opts.max_turns }),
        LpStatus::Unbounded => return Err(SclError::Lp("piece LP is unbounded".into())),
    }
    verify_optimality(&model, &sol).map_err(|v| SclError::Lp(format!("piece LP certificate failed: {v}")))?;
    let kappa = sol.objective_value.clone();
    let value =
        chain.weighted_arc_count() / Rational::from_integer(4.into()) - &kappa / Rational::from_integer(2.into());
    Ok(PieceSolution {
        result: SclResult {
            value: SclValue::Finite(value),
            solver: SolverTag::Pieces,
            rho: ctx.rho,
            dv_abs: ctx.dv_abs,
            lp_stats: LpStats {
                variables: model.num_vars,
                constraints: model.constraints.len(),
                pivots: sol.pivots,
                rounds: 0,
            },
            absolute_equals_relative: absolute,
            homology_note: note,
            verified: true,
            complete: opts.max_turns as u64 >= piece_bound_for_completeness(&alpha, &ctx),
        },
        alphabet: alpha,
        ctx,
        max_turns: opts.max_turns,
        pieces,
        weights: sol.primal,
        kappa,
        duals: sol.dual,
    })
}

fn weights_degree(weights: &[Rational]) -> BigInt {
    weights.iter().filter(|w| w.is_positive()).fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
}

/// Moves to another optimal vertex with a smaller surface degree, when one
/// is found among `trials` secondary objectives over the optimal face.
///
/// The optimal face is cut out by the columns of zero reduced cost under the
/// optimal duals, plus `sum x = kappa`. Returns the degrees of the vertices
/// visited, the original one first.
pub fn reduce_degree(chain: &Chain, sol: &mut PieceSolution, trials: u32) -> Result<Vec<BigInt>> {
    let mut seen = vec![weights_degree(&sol.weights)];
    if sol.duals.is_empty() || trials == 0 {
        return Ok(seen);
    }
    let model = piece_lp(chain, &sol.alphabet, &sol.pieces);
    let face: Vec<usize> = model
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, col)| col.iter().fold(Rational::one(), |acc, (i, v)| acc - &sol.duals[*i] * v).is_zero())
        .map(|(j, _)| j)
        .collect();
    let mut local = vec![usize::MAX; model.num_vars];
    for (k, &j) in face.iter().enumerate() {
        local[j] = k;
    }
    let mut base = LPModel::new(Sense::Max);
    base.add_vars(face.len());
    for con in &model.constraints {
        let coeffs =
            con.coeffs.iter().filter(|(j, _)| local[*j] != usize::MAX).map(|(j, v)| (local[*j], v.clone())).collect();
        base.add_constraint(coeffs, con.relation, con.rhs.clone(), None);
    }
    base.add_constraint((0..face.len()).map(|k| (k, Rational::one())).collect(), Relation::Eq, sol.kappa.clone(), None);
    let mut best = seen[0].clone();
    for trial in 1..=trials as u64 {
        let mut m = base.clone();
        // Small pseudo-random integer objective; distinct per trial, fixed across runs.
        m.set_objective(
            (0..face.len())
                .map(|k| {
                    let h =
                        (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
                    let h = (h ^ (h >> 29)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
                    (k, Rational::from_integer(((h >> 40) % 7).into()))
                })
                .collect(),
        );
        let r = solve_by_pricing(&m, &SimplexOptions::default())?;
        if r.status != LpStatus::Optimal {
            return Err(SclError::Lp("optimal face LP failed".into()));
        }
        let deg = weights_degree(&r.primal);
        if deg < best {
            best = deg.clone();
            let mut w = vec![Rational::zero(); sol.pieces.len()];
            for (k, &j) in face.iter().enumerate() {
                w[j] = r.primal[k].clone();
            }
            sol.weights = w;
        }
        seen.push(deg);
    }
    Ok(seen)
}

/// A turn type in exported form, with 1-based arc numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportTurn {
    pub from: usize,
    pub wclass: u64,
    pub to: usize,
}

impl ExportTurn {
    fn new(t: &TurnType) -> ExportTurn {
        ExportTurn { from: t.from + 1, wclass: t.wclass, to: t.to + 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportPiece {
    pub turns: Vec<(ExportTurn, u32)>,
    pub multiplicity: u64,
}

/// Instances of a turn type and of its paired type in the exported surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnMatch {
    pub turn: ExportTurn,
    pub pair: ExportTurn,
    pub count: u64,
    pub pair_count: u64,
}

/// An integral surface assembled from disk-like pieces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceExport {
    pub degree: u64,
    pub pieces: Vec<ExportPiece>,
    pub matching: Vec<TurnMatch>,
    /// Over-counting Euler characteristic: pieces minus half the turns.
    #[serde(with = "crate::serde_rational")]
    pub chi_hat: Rational,
    /// `-chi_hat / (2 degree)`.
    #[serde(with = "crate::serde_rational")]
    pub scl: Rational,
    /// Every turn type has as many instances as its pair.
    pub gluing_ok: bool,
}

impl SurfaceExport {
    pub fn multiplicities(&self) -> Vec<u64> {
        self.pieces.iter().map(|p| p.multiplicity).collect()
    }
}

/// Clears denominators of the optimal weights at the least degree that is a
/// multiple of `degree_hint` (when given) and recounts the gluing condition.
pub fn export_surface(sol: &PieceSolution, degree_hint: Option<u64>) -> Result<SurfaceExport> {
    let mut n = BigInt::one();
    for (_, w) in sol.support() {
        n = n.lcm(w.denom());
    }
    if let Some(h) = degree_hint.filter(|&h| h > 0) {
        n = n.lcm(&BigInt::from(h));
    }
    let degree = n.to_u64().ok_or_else(|| SclError::Resource("surface degree exceeds 64 bits".into()))?;
    let nq = Rational::from_integer(n);
    let alpha = &sol.alphabet;
    let mut pieces = Vec::new();
    let mut counts = vec![0u64; alpha.len()];
    let (mut total_pieces, mut total_turns) = (0u64, 0u64);
    for (p, w) in sol.support() {
        let m = (w * &nq).to_integer().to_u64().ok_or_else(|| SclError::Resource("multiplicity overflow".into()))?;
        for &(t, c) in &p.turns {
            counts[t] += m * c as u64;
        }
        total_pieces += m;
        total_turns += m * p.turn_count as u64;
        pieces.push(ExportPiece {
            turns: p.turns.iter().map(|&(t, c)| (ExportTurn::new(&alpha.turns[t]), c)).collect(),
            multiplicity: m,
        });
    }
    let mut matching = Vec::new();
    let mut gluing_ok = true;
    for t in 0..alpha.len() {
        let p = alpha.pair(t);
        if p < t || (counts[t] == 0 && counts[p] == 0) {
            continue;
        }
        gluing_ok &= counts[t] == counts[p];
        matching.push(TurnMatch {
            turn: ExportTurn::new(&alpha.turns[t]),
            pair: ExportTurn::new(&alpha.turns[p]),
            count: counts[t],
            pair_count: counts[p],
        });
    }
    let chi_hat = Rational::from_integer(total_pieces.into()) - Rational::new(total_turns.into(), 2.into());
    let scl = -&chi_hat / Rational::from_integer((2 * degree).into());
    Ok(SurfaceExport { degree, pieces, matching, chi_hat, scl, gluing_ok })
}
