//! Extremal surfaces: the s-invariant test, reducedness probing, and the
//! branched surface carried by an optimal piece solution.
//!
//! The verdict is sound but not complete. Only the open face of the optimal
//! weight polyhedron that contains the solver's optimum is examined.

use std::collections::VecDeque;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bs_words::{h_value, Chain, ChainTerm, GroupParams, TightWord};
use crate::error::{Result, SclError};
use crate::exact_lp::{solve, verify_optimality, LpStatus, Relation};
use crate::solver_block::{solve_block, BlockOptions, SclValue};
use crate::solver_pieces::{piece_lp, scl_pieces, PieceSolution, PieceVector};
use crate::Rational;

/// Default largest power tried by [`reducedness_probe`] for t-balanced pairs.
pub const DEFAULT_POWER_BOUND: u32 = 6;

/// Outcome of the sufficient condition on the words of a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reasons", rename_all = "snake_case")]
pub enum SufficientCheck {
    Pass,
    Inconclusive(Vec<String>),
}

impl SufficientCheck {
    pub fn passed(&self) -> bool {
        matches!(self, SufficientCheck::Pass)
    }
}

/// `sum_j u_j r^{k_j}` over the syllables `a^{u_j} t^{eps_j}`, where `k_j` is
/// the t-exponent sum before syllable `j`.
fn level_sum(word: &TightWord, ratio: &Rational) -> Rational {
    let mut total = Rational::zero();
    let mut level = 0i32;
    for s in word.syllables() {
        if s.p != 0 {
            total += Rational::from_integer(s.p.into()) * ratio.pow(level);
        }
        level += s.eps as i32;
    }
    total
}

/// Every word has `h != 0` or `s = 0` (for `M = L`: the plain exponent sum
/// vanishes; for `M = -L`: `h` is odd or the alternating sum vanishes).
pub fn sufficient_extremal_check(chain: &Chain, params: &GroupParams) -> SufficientCheck {
    let mut reasons = Vec::new();
    for (i, term) in chain.terms.iter().enumerate() {
        let w = &term.word;
        let h = h_value(w);
        let reason = if params.big_m == params.big_l {
            let s = level_sum(w, &Rational::one());
            (!s.is_zero()).then(|| format!("word {} ({w}): M = L and the exponent sum is {s}", i + 1))
        } else if params.big_m == -params.big_l {
            if h % 2 != 0 {
                None
            } else {
                let s = level_sum(w, &-Rational::one());
                (!s.is_zero())
                    .then(|| format!("word {} ({w}): M = -L, h = {h} is even and the alternating sum is {s}", i + 1))
            }
        } else if h != 0 {
            None
        } else {
            let s = level_sum(w, &params.ratio());
            (!s.is_zero()).then(|| format!("word {} ({w}): h = 0 and s = {s}", i + 1))
        };
        reasons.extend(reason);
    }
    if reasons.is_empty() {
        SufficientCheck::Pass
    } else {
        SufficientCheck::Inconclusive(reasons)
    }
}

/// Words `i` and `j` (0-based) with `scl(p g_i + q g_j) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoInverse {
    pub i: usize,
    pub j: usize,
    pub p: u32,
    pub q: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Reducedness {
    Reduced,
    NotReduced { witness: PseudoInverse },
    Unknown { reason: String },
}

struct ProbeJob {
    i: usize,
    j: usize,
    p: u32,
    q: u32,
}

fn pair_chain(chain: &Chain, job: &ProbeJob) -> Result<Chain> {
    let term =
        |k: usize, c: u32| ChainTerm { coeff: Rational::from_integer(c.into()), word: chain.terms[k].word.clone() };
    if job.i == job.j {
        Chain::new(vec![term(job.i, job.p + job.q)])
    } else {
        Chain::new(vec![term(job.i, job.p), term(job.j, job.q)])
    }
}

/// Searches for pseudo-inverse pairs among the words of `chain`.
///
/// `g^p + g^q` is `(p+q) g`, so a word is paired with itself only through
/// `scl(g) = 0`. Pairs with nonzero `h` are tried at the single ratio forced
/// by homology; t-balanced pairs at every ratio `p/q` with `p, q <= power_bound`.
/// Such pairs cannot be ruled out beyond the bound, so they leave the result
/// `Unknown` when no witness turns up.
pub fn reducedness_probe(chain: &Chain, params: &GroupParams, power_bound: u32) -> Reducedness {
    let h: Vec<i64> = chain.terms.iter().map(|t| h_value(&t.word)).collect();
    let n = h.len();
    let mut jobs = Vec::new();
    let mut open_pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (hi, hj) = (h[i], h[j]);
            if i == j {
                if hi == 0 {
                    jobs.push(ProbeJob { i, j, p: 1, q: 1 });
                }
            } else if hi != 0 && hj != 0 {
                if hi.signum() != hj.signum() {
                    let g = hi.abs().gcd(&hj.abs());
                    jobs.push(ProbeJob { i, j, p: (hj.abs() / g) as u32, q: (hi.abs() / g) as u32 });
                }
            } else if hi == 0 && hj == 0 {
                open_pairs.push((i, j));
                for p in 1..=power_bound {
                    for q in 1..=power_bound {
                        if p.gcd(&q) == 1 {
                            jobs.push(ProbeJob { i, j, p, q });
                        }
                    }
                }
            }
        }
    }
    let opts = BlockOptions::from_env();
    let outcomes: Vec<Result<bool>> = jobs
        .par_iter()
        .map(|job| {
            let c = pair_chain(chain, job)?;
            let sol = solve_block(&c, params, &opts)?;
            Ok(matches!(sol.result.value, SclValue::Finite(ref v) if v.is_zero()))
        })
        .collect();
    let mut failures = Vec::new();
    for (job, out) in jobs.iter().zip(outcomes) {
        match out {
            Ok(true) => {
                return Reducedness::NotReduced { witness: PseudoInverse { i: job.i, j: job.j, p: job.p, q: job.q } }
            }
            Ok(false) => {}
            Err(e) => {
                failures.push(format!("words {} and {} at powers ({}, {}): {e}", job.i + 1, job.j + 1, job.p, job.q))
            }
        }
    }
    if let Some(f) = failures.first() {
        return Reducedness::Unknown { reason: format!("solver failure on {f}") };
    }
    if let Some(&(i, j)) = open_pairs.first() {
        return Reducedness::Unknown {
            reason: format!(
                "words {} and {} are both t-balanced; no pseudo-inverse powers up to {power_bound}, larger powers unchecked",
                i + 1,
                j + 1
            ),
        };
    }
    Reducedness::Reduced
}

/// A gluing between turn instances in pieces `from` and `to` (node indices).
/// Crossing from `from` to `to` changes the level by `sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingEdge {
    pub from: usize,
    pub to: usize,
    /// The turn type on the `from` side.
    pub turn: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceComponent {
    pub nodes: Vec<usize>,
    pub balanced: bool,
    /// Level of each node in `nodes`, lowest level 0, when balanced.
    pub levels: Option<Vec<i64>>,
    #[serde(with = "crate::serde_rational::option")]
    pub s_value: Option<Rational>,
}

/// The branched surface carried by the support of a piece-weight vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchedSurfaceGraph {
    /// Index into the solution's piece list for each node.
    pub pieces: Vec<usize>,
    #[serde(with = "crate::serde_rational::vec")]
    pub weights: Vec<Rational>,
    /// Sum of the windings of the arcs on each node's boundary.
    pub arc_windings: Vec<i64>,
    /// Number of turns on each node's boundary.
    pub valence: Vec<u32>,
    pub edges: Vec<GluingEdge>,
    pub component_of: Vec<usize>,
    pub components: Vec<SurfaceComponent>,
}

impl BranchedSurfaceGraph {
    pub fn is_balanced(&self) -> bool {
        self.components.iter().all(|c| c.balanced)
    }

    /// `s(Sigma, wt)` of a balanced component for other weights on the same
    /// nodes; `None` when the component is not balanced.
    pub fn s_value_with(&self, component: usize, weights: &[Rational], ratio: &Rational) -> Option<Rational> {
        let c = &self.components[component];
        let levels = c.levels.as_ref()?;
        Some(
            c.nodes
                .iter()
                .zip(levels)
                .map(|(&v, &k)| &weights[v] * Rational::from_integer(self.arc_windings[v].into()) * ratio.pow(k as i32))
                .sum(),
        )
    }
}

/// Builds the branched surface of the positive-weight pieces of `sol`.
pub fn branched_surface(sol: &PieceSolution, params: &GroupParams) -> Result<BranchedSurfaceGraph> {
    let support: Vec<usize> = (0..sol.pieces.len()).filter(|&j| sol.weights[j].is_positive()).collect();
    let pieces: Vec<&PieceVector> = support.iter().map(|&j| &sol.pieces[j]).collect();
    let weights: Vec<Rational> = support.iter().map(|&j| sol.weights[j].clone()).collect();
    let alpha = &sol.alphabet;
    if let Some(p) = pieces.iter().find(|p| !p.disk_like) {
        return Err(SclError::Invalid(format!("piece with winding {} is not disk-like", p.winding)));
    }
    let counts = sol.turn_counts();
    for t in 0..alpha.len() {
        if counts[t] != counts[alpha.pair(t)] {
            return Err(SclError::Invalid(format!(
                "gluing condition fails on turn {:?}: {} against {}",
                alpha.turns[t],
                counts[t],
                counts[alpha.pair(t)]
            )));
        }
    }
    let n = pieces.len();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); alpha.len()];
    for (v, p) in pieces.iter().enumerate() {
        for &(t, _) in &p.turns {
            holders[t].push(v);
        }
    }
    let mut edges = Vec::new();
    for t in 0..alpha.len() {
        let pt = alpha.pair(t);
        if pt < t {
            continue;
        }
        let sign = alpha.arcs[alpha.turns[t].from].eps_out;
        for &u in &holders[t] {
            for &v in &holders[pt] {
                edges.push(GluingEdge { from: u, to: v, turn: t, sign });
            }
        }
    }
    let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for e in &edges {
        adj[e.from].push((e.to, e.sign as i64));
        adj[e.to].push((e.from, -(e.sign as i64)));
    }
    let ratio = params.ratio();
    let arc_windings: Vec<i64> = pieces
        .iter()
        .map(|p| p.turns.iter().map(|&(t, c)| alpha.arcs[alpha.turns[t].to].winding * c as i64).sum())
        .collect();
    let mut component_of = vec![usize::MAX; n];
    let mut level = vec![0i64; n];
    let mut components = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut nodes = vec![start];
        let mut balanced = true;
        component_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, s) in &adj[u] {
                if component_of[v] == usize::MAX {
                    component_of[v] = id;
                    level[v] = level[u] + s;
                    nodes.push(v);
                    queue.push_back(v);
                } else if level[v] != level[u] + s {
                    balanced = false;
                }
            }
        }
        nodes.sort_unstable();
        let (levels, s_value) = if balanced {
            let low = nodes.iter().map(|&v| level[v]).min().unwrap_or(0);
            let lv: Vec<i64> = nodes.iter().map(|&v| level[v] - low).collect();
            let s = nodes
                .iter()
                .zip(&lv)
                .map(|(&v, &k)| &weights[v] * Rational::from_integer(arc_windings[v].into()) * ratio.pow(k as i32))
                .sum();
            (Some(lv), Some(s))
        } else {
            (None, None)
        };
        components.push(SurfaceComponent { nodes, balanced, levels, s_value });
    }
    Ok(BranchedSurfaceGraph {
        valence: pieces.iter().map(|p| p.turn_count).collect(),
        pieces: support,
        weights,
        arc_windings,
        edges,
        component_of,
        components,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Every word has `h != 0` or `s = 0`.
    SufficientCondition,
    /// Balanced components of the solver's face have `s = 0` at `weights`.
    BranchedSurface,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalCertificate {
    pub kind: CertificateKind,
    /// Optimal weight of every piece of the solution, in its order.
    #[serde(with = "crate::serde_rational::vec")]
    pub weights: Vec<Rational>,
    pub surface: BranchedSurfaceGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExtremalVerdict {
    Exists { certificate: Box<ExtremalCertificate> },
    Unknown { reasons: Vec<String> },
    NotReduced { witness: PseudoInverse },
}

impl ExtremalVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            ExtremalVerdict::Exists { .. } => "exists",
            ExtremalVerdict::Unknown { .. } => "unknown",
            ExtremalVerdict::NotReduced { .. } => "not_reduced",
        }
    }
}

/// A piece solution that is optimal for the full problem: the turn bound is
/// raised from `start` until the piece LP reaches the block LP's value.
/// Returns the solution and the bound used.
pub fn optimal_piece_solution(
    chain: &Chain,
    params: &GroupParams,
    start: u32,
    cap: u32,
) -> Result<(PieceSolution, u32)> {
    let exact = solve_block(chain, params, &BlockOptions::from_env())?.result;
    let target = match exact.value {
        SclValue::Finite(v) => v,
        SclValue::Infinite => return Err(SclError::Invalid(exact.homology_note)),
    };
    for bound in start.max(1)..=cap {
        match scl_pieces(chain, params, bound) {
            Ok(sol) => {
                if sol.result.value.finite() == Some(&target) {
                    return Ok((sol, bound));
                }
            }
            Err(SclError::InfeasibleAtBound { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Err(SclError::Resource(format!("the piece LP does not reach scl = {target} with at most {cap} turns per piece")))
}

/// Decides whether `chain` bounds an extremal surface, from an optimal
/// piece solution, probing reducedness with [`DEFAULT_POWER_BOUND`].
pub fn extremal_verdict(chain: &Chain, params: &GroupParams, sol: &PieceSolution) -> Result<ExtremalVerdict> {
    extremal_verdict_with(chain, params, sol, DEFAULT_POWER_BOUND)
}

pub fn extremal_verdict_with(
    chain: &Chain,
    params: &GroupParams,
    sol: &PieceSolution,
    power_bound: u32,
) -> Result<ExtremalVerdict> {
    let mut reasons = Vec::new();
    match reducedness_probe(chain, params, power_bound) {
        Reducedness::Reduced => {}
        Reducedness::NotReduced { witness } => return Ok(ExtremalVerdict::NotReduced { witness }),
        Reducedness::Unknown { reason } => {
            return Ok(ExtremalVerdict::Unknown { reasons: vec![format!("reducedness undecided: {reason}")] })
        }
    }
    let surface = branched_surface(sol, params)?;
    let sufficient = sufficient_extremal_check(chain, params);
    let exists = |kind, weights, surface| {
        Ok(ExtremalVerdict::Exists { certificate: Box::new(ExtremalCertificate { kind, weights, surface }) })
    };
    if sufficient.passed() {
        return exists(CertificateKind::SufficientCondition, sol.weights.clone(), surface);
    }
    if let SufficientCheck::Inconclusive(r) = sufficient {
        reasons.extend(r);
    }
    if params.big_m == params.big_l || params.big_m == -params.big_l {
        reasons.push("M = \u{b1}L: only the sufficient condition applies".into());
        return Ok(ExtremalVerdict::Unknown { reasons });
    }
    match reweight_to_zero_s(chain, params, sol, &surface)? {
        Some(weights) => {
            let mut full = vec![Rational::zero(); sol.pieces.len()];
            for (v, &j) in surface.pieces.iter().enumerate() {
                full[j] = weights[v].clone();
            }
            let mut reweighted = sol.clone();
            reweighted.weights = full.clone();
            let surface = branched_surface(&reweighted, params)?;
            exists(CertificateKind::BranchedSurface, full, surface)
        }
        None => {
            reasons.push("no weight in the optimal open face makes s vanish on every balanced component".into());
            Ok(ExtremalVerdict::Unknown { reasons })
        }
    }
}

/// Weights on the support, all positive, still optimal, with `s = 0` on every
/// balanced component. Maximizes the smallest weight `e`; `e > 0` keeps the
/// weights in the same open face.
fn reweight_to_zero_s(
    chain: &Chain,
    params: &GroupParams,
    sol: &PieceSolution,
    surface: &BranchedSurfaceGraph,
) -> Result<Option<Vec<Rational>>> {
    if surface.components.iter().all(|c| c.s_value.as_ref().is_none_or(|s| s.is_zero())) {
        return Ok(Some(surface.weights.clone()));
    }
    let pieces: Vec<PieceVector> = surface.pieces.iter().map(|&j| sol.pieces[j].clone()).collect();
    let n = pieces.len();
    let mut model = piece_lp(chain, &sol.alphabet, &pieces);
    let one = Rational::one();
    model.add_constraint(
        (0..n).map(|v| (v, one.clone())).collect(),
        Relation::Eq,
        sol.kappa.clone(),
        Some("optimal".into()),
    );
    let ratio = params.ratio();
    for (k, c) in surface.components.iter().enumerate() {
        if let Some(levels) = &c.levels {
            let row: Vec<(usize, Rational)> = c
                .nodes
                .iter()
                .zip(levels)
                .map(|(&v, &l)| (v, Rational::from_integer(surface.arc_windings[v].into()) * ratio.pow(l as i32)))
                .filter(|(_, a)| !a.is_zero())
                .collect();
            model.add_constraint(row, Relation::Eq, Rational::zero(), Some(format!("s{k}")));
        }
    }
    let e = model.add_var(Some("e".into()));
    for v in 0..n {
        model.add_constraint(vec![(v, one.clone()), (e, -one.clone())], Relation::Ge, Rational::zero(), None);
    }
    model.add_constraint(vec![(e, one.clone())], Relation::Le, one.clone(), None);
    model.set_objective(vec![(e, one)]);
    let lp = solve(&model)?;
    if lp.status != LpStatus::Optimal {
        return Ok(None);
    }
    verify_optimality(&model, &lp).map_err(|v| SclError::Lp(format!("reweighting certificate failed: {v}")))?;
    if !lp.objective_value.is_positive() {
        return Ok(None);
    }
    Ok(Some(lp.primal[..n].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs_words::parse_chain;
    use crate::solver_pieces::{export_surface, scl_pieces};

    fn setup(text: &str, m: i64, l: i64) -> (Chain, GroupParams) {
        let p = GroupParams::new(m, l).unwrap();
        (parse_chain(text, &p).unwrap(), p)
    }

    #[test]
    fn sufficient_check_examples() {
        let (c, p) = setup("at^2At^-1 + T", 4, 6);
        assert!(sufficient_extremal_check(&c, &p).passed());
        let (c, p) = setup("atAT", 2, 3);
        match sufficient_extremal_check(&c, &p) {
            SufficientCheck::Inconclusive(r) => assert!(r[0].contains("s = 1/3"), "{r:?}"),
            other => panic!("{other:?}"),
        }
        let (c, p) = setup("ataTAtAT", 2, 3);
        assert!(sufficient_extremal_check(&c, &p).passed());
    }

    #[test]
    fn sufficient_check_for_m_equal_plus_minus_l() {
        let (c, p) = setup("at^2At^-1 + T", 2, 2);
        assert!(sufficient_extremal_check(&c, &p).passed());
        let (c, p) = setup("a^2tAT", 3, 3);
        assert!(!sufficient_extremal_check(&c, &p).passed());
        // h = 1 is odd.
        let (c, p) = setup("a^2t + T", 3, -3);
        assert!(sufficient_extremal_check(&c, &p).passed());
        // Alternating sum 1 - (-1) = 2.
        let (c, p) = setup("atAT", 3, -3);
        assert!(!sufficient_extremal_check(&c, &p).passed());
    }

    #[test]
    fn probe_examples() {
        let (c, p) = setup("atAT", 2, 3);
        assert_eq!(reducedness_probe(&c, &p, 6), Reducedness::Reduced);
        let (c, p) = setup("atAT + taTA", 2, 3);
        match reducedness_probe(&c, &p, 2) {
            Reducedness::NotReduced { witness } => assert_eq!((witness.p, witness.q), (1, 1)),
            other => panic!("{other:?}"),
        }
        let (c, p) = setup("at^2At^-1 + tat^-2A", 2, 3);
        assert!(matches!(reducedness_probe(&c, &p, 6), Reducedness::NotReduced { .. }));
        let (c, p) = setup("at^2At^-1 + T", 4, 6);
        assert_eq!(reducedness_probe(&c, &p, 6), Reducedness::Reduced);
    }

    #[test]
    fn branched_surface_of_eg3_is_balanced() {
        let (c, p) = setup("at^2At^-2", 2, 3);
        let sol = scl_pieces(&c, &p, 4).unwrap();
        let g = branched_surface(&sol, &p).unwrap();
        assert_eq!(g.components.len(), 1);
        assert!(g.is_balanced());
        assert!(g.valence.iter().all(|&v| v >= 2));
        for e in &g.edges {
            let comp = &g.components[g.component_of[e.from]];
            let lv = comp.levels.as_ref().unwrap();
            let at = |v| lv[comp.nodes.iter().position(|&x| x == v).unwrap()];
            assert_eq!(at(e.to), at(e.from) + e.sign as i64);
        }
    }

    #[test]
    fn eg2_surface_has_an_imbalanced_component_and_exists() {
        let (c, p) = setup("at^2At^-1 + T", 4, 6);
        let sol = scl_pieces(&c, &p, 8).unwrap();
        let g = branched_surface(&sol, &p).unwrap();
        assert!(g.components.iter().any(|c| !c.balanced));
        assert!(g.valence.iter().all(|&v| v >= 2));
        let v = extremal_verdict(&c, &p, &sol).unwrap();
        assert_eq!(v.status(), "exists");
    }

    #[test]
    fn commutator_verdict_is_consistent() {
        let (c, p) = setup("atAT", 2, 3);
        let sol = scl_pieces(&c, &p, 6).unwrap();
        let v = extremal_verdict(&c, &p, &sol).unwrap();
        if let ExtremalVerdict::Exists { certificate } = &v {
            let mut s = sol.clone();
            s.weights = certificate.weights.clone();
            assert_eq!(export_surface(&s, None).unwrap().scl, Rational::new(1.into(), 12.into()));
        }
    }

    #[test]
    fn self_glued_piece_is_imbalanced() {
        let (c, p) = setup("atAT", 2, 3);
        let sol = scl_pieces(&c, &p, 6).unwrap();
        let alpha = &sol.alphabet;
        let t = (0..alpha.len()).find(|&t| alpha.turns[t].wclass == 0).unwrap();
        let pt = alpha.pair(t);
        let mut walk = vec![t as u32, pt as u32];
        walk.sort_unstable();
        let piece = PieceVector::from_sorted(&walk, 0, sol.ctx.dv_abs);
        let mut s = sol.clone();
        s.pieces = vec![piece];
        s.weights = vec![Rational::one()];
        let g = branched_surface(&s, &p).unwrap();
        assert_eq!(g.components.len(), 1);
        assert!(!g.components[0].balanced);
        assert!(g.edges.iter().all(|e| e.from == 0 && e.to == 0));
    }

    #[test]
    fn gluing_violation_is_rejected() {
        let (c, p) = setup("atAT", 2, 3);
        let mut sol = scl_pieces(&c, &p, 6).unwrap();
        let j = sol.weights.iter().position(|w| w.is_positive()).unwrap();
        sol.weights[j] *= Rational::from_integer(2.into());
        assert!(branched_surface(&sol, &p).is_err());
    }
}
