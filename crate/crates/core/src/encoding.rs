//! Combinatorial alphabet of the linear programs: winding moduli, turn
//! types with their pairing, piece windings, and the interval/cut alphabet
//! of the block formulation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bs_words::{complexity, h_value, Arc, Chain, GroupParams};
use crate::error::{Result, SclError};

/// Winding data for a chain: `dv_abs = d |m|^rho |l|^rho`, `we_mod = |m l|^rho`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingContext {
    pub rho: u32,
    pub dv_abs: u64,
    pub we_mod: u64,
    /// Generator of W0 for each arc of the chain, in `Chain::arcs` order.
    pub w0: Vec<u64>,
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

/// Builds the winding context with no ceiling beyond 64-bit overflow.
pub fn winding_context(chain: &Chain, params: &GroupParams) -> Result<WindingContext> {
    winding_context_with_ceiling(chain, params, None)
}

pub fn winding_context_with_ceiling(
    chain: &Chain,
    params: &GroupParams,
    max_dv: Option<u64>,
) -> Result<WindingContext> {
    if chain.is_empty() {
        return Err(SclError::EmptyChain);
    }
    let overflow = || SclError::Resource("winding modulus overflows 64 bits".into());
    let (d, m, l) = (params.d as u64, params.m.unsigned_abs(), params.l.unsigned_abs());
    let rho = complexity(chain);
    let we_mod =
        checked_pow(m, rho).and_then(|a| checked_pow(l, rho).and_then(|b| a.checked_mul(b))).ok_or_else(overflow)?;
    let dv_abs = we_mod.checked_mul(d).ok_or_else(overflow)?;
    if let Some(cap) = max_dv {
        if dv_abs > cap {
            return Err(SclError::Resource(format!("|D_v| = {dv_abs} exceeds the ceiling {cap}")));
        }
    }
    let mut w0 = Vec::new();
    for term in &chain.terms {
        let h = h_value(&term.word);
        for a in crate::bs_words::arcs(&term.word) {
            let (em, el) = if h >= 0 {
                (a.mu - h.unsigned_abs() as u32, a.lambda)
            } else {
                (a.mu, a.lambda - h.unsigned_abs() as u32)
            };
            let g = checked_pow(m, em)
                .and_then(|x| checked_pow(l, el).and_then(|y| x.checked_mul(y)))
                .and_then(|x| x.checked_mul(d))
                .ok_or_else(overflow)?;
            w0.push(g);
        }
    }
    let lcm = w0.iter().fold(1u64, |acc, &g| acc / gcd(acc, g) * g);
    if lcm != dv_abs {
        return Err(SclError::Invalid(format!("lcm of W0 generators is {lcm}, expected |D_v| = {dv_abs}")));
    }
    Ok(WindingContext { rho, dv_abs, we_mod, w0 })
}

/// A turn `(from, wclass, to)` between the end of one arc and the start of another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TurnType {
    pub from: usize,
    pub wclass: u64,
    pub to: usize,
}

/// The arcs of a chain together with all turn types and their pairing.
#[derive(Debug, Clone)]
pub struct TurnAlphabet {
    pub arcs: Vec<Arc>,
    pub turns: Vec<TurnType>,
    pair: Vec<usize>,
    index: HashMap<TurnType, usize>,
    from_arc: Vec<Vec<usize>>,
    succ: Vec<usize>,
    pred: Vec<usize>,
    /// First arc of each loop.
    pub loop_first_arc: Vec<usize>,
    pub we_mod: u64,
}

impl TurnAlphabet {
    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn pair(&self, t: usize) -> usize {
        self.pair[t]
    }

    pub fn index_of(&self, t: &TurnType) -> Option<usize> {
        self.index.get(t).copied()
    }

    /// Turns leaving arc `a`.
    pub fn turns_from(&self, a: usize) -> &[usize] {
        &self.from_arc[a]
    }

    pub fn succ(&self, a: usize) -> usize {
        self.succ[a]
    }

    pub fn pred(&self, a: usize) -> usize {
        self.pred[a]
    }
}

/// Turn existence rule: `eps_out(from) = -eps_in(to)`.
pub fn turn_exists(arcs: &[Arc], from: usize, to: usize) -> bool {
    arcs[from].eps_out == -arcs[to].eps_in
}

/// All turn types with winding classes in `Z/we_mod`, and the pairing
/// `(a_i, w, a_j) <-> (pred a_j, -w, succ a_i)`.
pub fn enumerate_turns(chain: &Chain, ctx: &WindingContext) -> TurnAlphabet {
    let arcs = chain.arcs();
    let offsets = chain.arc_offsets();
    let n = arcs.len();
    let mut succ = vec![0; n];
    let mut pred = vec![0; n];
    for w in 0..chain.terms.len() {
        let (lo, hi) = (offsets[w], offsets[w + 1]);
        for a in lo..hi {
            succ[a] = if a + 1 == hi { lo } else { a + 1 };
            pred[a] = if a == lo { hi - 1 } else { a - 1 };
        }
    }
    let we = ctx.we_mod;
    let mut turns = Vec::new();
    let mut from_arc = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if turn_exists(&arcs, i, j) {
                for w in 0..we {
                    from_arc[i].push(turns.len());
                    turns.push(TurnType { from: i, wclass: w, to: j });
                }
            }
        }
    }
    let index: HashMap<TurnType, usize> = turns.iter().enumerate().map(|(k, t)| (*t, k)).collect();
    let pair = turns
        .iter()
        .map(|t| {
            let p = TurnType { from: pred[t.to], wclass: (we - t.wclass) % we, to: succ[t.from] };
            index[&p]
        })
        .collect();
    TurnAlphabet {
        arcs,
        turns,
        pair,
        index,
        from_arc,
        succ,
        pred,
        loop_first_arc: offsets[..offsets.len() - 1].to_vec(),
        we_mod: we,
    }
}

fn residue(x: i128, modulus: u64) -> u64 {
    x.rem_euclid(modulus as i128) as u64
}

/// The iota-part of a turn: `M w` if the arc leaves along `t`, else `L w`, mod `|D_v|`.
pub fn turn_contribution(turn: &TurnType, arcs: &[Arc], ctx: &WindingContext, params: &GroupParams) -> u64 {
    let mult = if arcs[turn.from].eps_out > 0 { params.big_m } else { params.big_l };
    residue(mult as i128 * turn.wclass as i128, ctx.dv_abs)
}

/// Winding of the target arc plus the turn contribution, mod `|D_v|`.
pub fn turn_winding(turn: &TurnType, arcs: &[Arc], ctx: &WindingContext, params: &GroupParams) -> u64 {
    let base = residue(arcs[turn.to].winding as i128, ctx.dv_abs);
    (base + turn_contribution(turn, arcs, ctx, params)) % ctx.dv_abs
}

/// Winding of a piece given as a multiset of turns, with the setup-1 reading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceWinding {
    pub residue: u64,
    /// Winding is 0 mod |D_v| (the criterion used by the solvers).
    pub disk_like: bool,
    /// Arcs `a` in the support with the winding in W0(a).
    pub setup1_arcs: Vec<usize>,
}

pub fn piece_winding(
    turns: &[(TurnType, u64)],
    arcs: &[Arc],
    ctx: &WindingContext,
    params: &GroupParams,
) -> PieceWinding {
    let mut total: u128 = 0;
    for (t, count) in turns {
        total += turn_winding(t, arcs, ctx, params) as u128 * *count as u128;
    }
    let r = (total % ctx.dv_abs as u128) as u64;
    let mut support: Vec<usize> = turns.iter().flat_map(|(t, _)| [t.from, t.to]).collect();
    support.sort_unstable();
    support.dedup();
    let setup1_arcs = support.into_iter().filter(|&a| r.is_multiple_of(ctx.w0[a])).collect();
    PieceWinding { residue: r, disk_like: r == 0, setup1_arcs }
}

/// Where a unit interval lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Host {
    Arc(usize),
    Turn(usize),
}

/// A unit interval: position `pos` (1-based) on a host of length `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalType {
    pub host: Host,
    pub pos: u32,
    pub len: u32,
}

/// Interval alphabet with the consecutive relation and its classes.
#[derive(Debug, Clone)]
pub struct IntervalAlphabet {
    pub intervals: Vec<IntervalType>,
    /// Number of intervals in a block.
    pub block_len: u32,
    arc_first: Vec<u32>,
    turn_first: Vec<u32>,
    next: Vec<Vec<u32>>,
    prev: Vec<Vec<u32>>,
    next_class: Vec<u32>,
    prev_class: Vec<u32>,
}

impl IntervalAlphabet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn next(&self, i: u32) -> &[u32] {
        &self.next[i as usize]
    }

    pub fn prev(&self, i: u32) -> &[u32] {
        &self.prev[i as usize]
    }

    pub fn consecutive(&self, i: u32, j: u32) -> bool {
        self.next[i as usize].contains(&j)
    }

    pub fn arc_first(&self, a: usize) -> u32 {
        self.arc_first[a]
    }

    pub fn turn_first(&self, t: usize) -> u32 {
        self.turn_first[t]
    }

    /// Identifier of the set `next(i)`.
    pub fn next_class(&self, i: u32) -> u32 {
        self.next_class[i as usize]
    }

    /// Identifier of the set `prev(i)`.
    pub fn prev_class(&self, i: u32) -> u32 {
        self.prev_class[i as usize]
    }

    /// Identifier of the `next`-set that contains `j`.
    pub fn class_containing_as_next(&self, j: u32) -> u32 {
        self.next_class[self.prev[j as usize][0] as usize]
    }

    /// Identifier of the `prev`-set that contains `i`.
    pub fn class_containing_as_prev(&self, i: u32) -> u32 {
        self.prev_class[self.next[i as usize][0] as usize]
    }
}

fn representative(x: u64, modulus: u64) -> u64 {
    match x % modulus {
        0 => modulus,
        r => r,
    }
}

/// Interval alphabet with lengths in `1..=|D_v|`.
pub fn interval_alphabet(turns: &TurnAlphabet, ctx: &WindingContext, params: &GroupParams) -> IntervalAlphabet {
    interval_alphabet_scaled(turns, ctx, params, 1)
}

/// Interval alphabet with every length and the block length multiplied by `scale`.
///
/// The solver uses `scale = 2` when `|D_v| = 1` so that a block still has
/// two distinct chord positions.
pub fn interval_alphabet_scaled(
    turns: &TurnAlphabet,
    ctx: &WindingContext,
    params: &GroupParams,
    scale: u32,
) -> IntervalAlphabet {
    let dv = ctx.dv_abs;
    let arcs = &turns.arcs;
    let mut intervals = Vec::new();
    let mut arc_first = Vec::with_capacity(arcs.len());
    let push_host = |host: Host, len: u32, intervals: &mut Vec<IntervalType>| -> u32 {
        let first = intervals.len() as u32;
        for pos in 1..=len {
            intervals.push(IntervalType { host, pos, len });
        }
        first
    };
    for (i, a) in arcs.iter().enumerate() {
        let len = representative(residue(a.winding as i128, dv), dv) as u32 * scale;
        arc_first.push(push_host(Host::Arc(i), len, &mut intervals));
    }
    let mut turn_first = Vec::with_capacity(turns.len());
    for (t, tt) in turns.turns.iter().enumerate() {
        let len = representative(turn_contribution(tt, arcs, ctx, params), dv) as u32 * scale;
        turn_first.push(push_host(Host::Turn(t), len, &mut intervals));
    }
    let n = intervals.len();
    let mut next = vec![Vec::new(); n];
    let mut prev = vec![Vec::new(); n];
    for (k, iv) in intervals.iter().enumerate() {
        let succs: Vec<u32> = if iv.pos < iv.len {
            vec![k as u32 + 1]
        } else {
            match iv.host {
                Host::Arc(a) => turns.turns_from(a).iter().map(|&t| turn_first[t]).collect(),
                Host::Turn(t) => vec![arc_first[turns.turns[t].to]],
            }
        };
        for &j in &succs {
            prev[j as usize].push(k as u32);
        }
        next[k] = succs;
    }
    let classify = |sets: &Vec<Vec<u32>>| -> Vec<u32> {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        sets.iter()
            .map(|s| {
                let mut key = s.clone();
                key.sort_unstable();
                let next_id = ids.len() as u32;
                *ids.entry(key).or_insert(next_id)
            })
            .collect()
    };
    let next_class = classify(&next);
    let prev_class = classify(&prev);
    IntervalAlphabet {
        intervals,
        block_len: dv as u32 * scale,
        arc_first,
        turn_first,
        next,
        prev,
        next_class,
        prev_class,
    }
}

/// A cut `(I_b, I_k, I_{k+1}, k, genuine)`; intervals are alphabet indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CutVar {
    pub b: u32,
    pub ik: u32,
    pub ik1: u32,
    pub k: u32,
    pub genuine: bool,
}

/// Calls `f` on every cut of the alphabet, in a fixed order.
pub fn for_each_cut(alpha: &IntervalAlphabet, mut f: impl FnMut(CutVar)) {
    let n = alpha.len() as u32;
    let d = alpha.block_len;
    for b in 0..n {
        if d == 1 {
            f(CutVar { b, ik: b, ik1: b, k: 1, genuine: true });
            if alpha.consecutive(b, b) {
                f(CutVar { b, ik: b, ik1: b, k: 1, genuine: false });
            }
            continue;
        }
        for &j in alpha.next(b) {
            f(CutVar { b, ik: b, ik1: j, k: 1, genuine: false });
        }
        for j in 0..n {
            f(CutVar { b, ik: b, ik1: j, k: 1, genuine: true });
        }
        // Every interval is reachable at position 2 through a genuine cut,
        // and every interval has a predecessor, so all middle positions are live.
        for k in 2..d {
            for i in 0..n {
                for &j in alpha.next(i) {
                    f(CutVar { b, ik: i, ik1: j, k, genuine: false });
                }
            }
        }
        for i in 0..n {
            if alpha.consecutive(i, b) {
                f(CutVar { b, ik: i, ik1: b, k: d, genuine: false });
            }
            f(CutVar { b, ik: i, ik1: b, k: d, genuine: true });
        }
    }
}

/// Number of cuts `for_each_cut` would emit, computed without emitting them.
pub fn count_cuts(alpha: &IntervalAlphabet) -> u128 {
    let n = alpha.len() as u128;
    let d = alpha.block_len as u128;
    let edges: u128 = (0..alpha.len() as u32).map(|i| alpha.next(i).len() as u128).sum();
    if d == 1 {
        return n + (0..alpha.len() as u32).filter(|&b| alpha.consecutive(b, b)).count() as u128;
    }
    2 * edges + n * (2 * n + (d - 2) * edges)
}

/// All cuts, with a ceiling on their number.
pub fn generate_cuts(alpha: &IntervalAlphabet, max_cuts: u64) -> Result<Vec<CutVar>> {
    let count = count_cuts(alpha);
    if count > max_cuts as u128 {
        return Err(SclError::Resource(format!("{count} cut variables exceed the ceiling {max_cuts}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_cut(alpha, |c| out.push(c));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bs_words::parse_chain;

    fn setup(m: i64, l: i64, text: &str) -> (GroupParams, Chain, WindingContext, TurnAlphabet) {
        let p = GroupParams::new(m, l).unwrap();
        let c = parse_chain(text, &p).unwrap();
        let ctx = winding_context(&c, &p).unwrap();
        let t = enumerate_turns(&c, &ctx);
        (p, c, ctx, t)
    }

    fn turn(t: &TurnAlphabet, from: usize, w: i64, to: usize) -> usize {
        let we = t.we_mod as i64;
        t.index_of(&TurnType { from, wclass: w.rem_euclid(we) as u64, to }).unwrap()
    }

    #[test]
    fn eg3_context() {
        let (_, _, ctx, _) = setup(2, 3, "at^2At^-2");
        assert_eq!((ctx.rho, ctx.dv_abs, ctx.we_mod), (2, 36, 36));
        assert_eq!(ctx.w0, vec![4, 6, 9, 6]);
    }

    #[test]
    fn eg2_and_eg1_contexts() {
        for (m, l) in [(2, 3), (4, 6), (6, 9), (2, 2)] {
            let p = GroupParams::new(m, l).unwrap();
            let (_, _, ctx, _) = setup(m, l, "at^2At^-1 + T");
            assert_eq!(ctx.dv_abs, (p.d * (p.m * p.l).abs()) as u64);
            assert_eq!(ctx.we_mod, (p.m * p.l).unsigned_abs());
            let (_, _, ctx, _) = setup(m, l, "a t^2 + 2 T");
            assert_eq!((ctx.dv_abs, ctx.we_mod), (p.d as u64, 1));
        }
    }

    #[test]
    fn eg3_turns_and_pairing() {
        let (_, _, _, t) = setup(2, 3, "at^2At^-2");
        assert_eq!(t.len(), 8 * 36);
        for w in 0..36 {
            assert_eq!(t.pair(turn(&t, 0, w, 0)), turn(&t, 3, -w, 1));
        }
    }

    #[test]
    fn eg2_pairing() {
        let (_, _, _, t) = setup(2, 3, "at^2At^-1 + T");
        for w in 0..6 {
            assert_eq!(t.pair(turn(&t, 1, w, 0)), turn(&t, 2, -w, 2));
        }
    }

    #[test]
    fn commutator_has_only_self_turns() {
        let (_, _, _, t) = setup(2, 3, "atAT");
        assert!(t.turns.iter().all(|x| x.from == x.to));
        for (k, x) in t.turns.iter().enumerate() {
            let y = t.turns[t.pair(k)];
            assert_ne!(x.from, y.from);
        }
    }

    #[test]
    fn eg3_contributions() {
        let (p, _, ctx, t) = setup(2, 3, "at^2At^-2");
        let c = |from, w, to| turn_contribution(&t.turns[turn(&t, from, w, to)], &t.arcs, &ctx, &p);
        assert_eq!(c(0, 1, 0), 2);
        assert_eq!(c(2, -1, 2), 33);
        assert_eq!(c(1, 0, 3), 0);
    }

    #[test]
    fn eg3_piece_windings() {
        let (p, _, ctx, t) = setup(2, 3, "at^2At^-2");
        let tt = |from, w, to| t.turns[turn(&t, from, w, to)];
        let pw = piece_winding(&[(tt(1, 0, 3), 1), (tt(3, 0, 1), 1)], &t.arcs, &ctx, &p);
        assert!(pw.disk_like);
        let pw = piece_winding(&[(tt(1, 1, 3), 1), (tt(1, 2, 3), 1), (tt(3, -1, 1), 2)], &t.arcs, &ctx, &p);
        assert!(pw.disk_like);
        let pw = piece_winding(&[(tt(2, 0, 2), 1), (tt(2, -1, 2), 2)], &t.arcs, &ctx, &p);
        assert_eq!(pw.residue, 27);
        assert!(!pw.disk_like);
        assert_eq!(pw.setup1_arcs, vec![2]);
    }

    #[test]
    fn arc_lengths() {
        let (p, _, ctx, t) = setup(2, 3, "at^2At^-2");
        let a = interval_alphabet(&t, &ctx, &p);
        let lens: Vec<u32> = (0..4).map(|i| a.intervals[a.arc_first(i) as usize].len).collect();
        assert_eq!(lens, vec![1, 36, 35, 36]);
        assert!(a.len() as u64 <= 2 * 36 * 36 * 4);

        let (p, _, ctx, t) = setup(2, 3, "atAT");
        let a = interval_alphabet(&t, &ctx, &p);
        let lens: Vec<u32> = (0..2).map(|i| a.intervals[a.arc_first(i) as usize].len).collect();
        assert_eq!((lens, ctx.dv_abs), (vec![1, 5], 6));
    }

    #[test]
    fn cuts_respect_restrictions() {
        let (p, _, ctx, t) = setup(2, 3, "atAT");
        let a = interval_alphabet(&t, &ctx, &p);
        let cuts = generate_cuts(&a, u64::MAX).unwrap();
        assert_eq!(cuts.len() as u128, count_cuts(&a));
        let d = a.block_len;
        for c in &cuts {
            if c.genuine {
                assert!(c.k == 1 || c.k == d);
            } else {
                assert!(a.consecutive(c.ik, c.ik1));
            }
            if c.k == 1 {
                assert_eq!(c.ik, c.b);
            }
            if c.k == d {
                assert_eq!(c.ik1, c.b);
            }
        }
        assert!(generate_cuts(&a, 10).is_err());
    }

    #[test]
    fn unit_modulus_cuts_are_single_genuine_intervals() {
        let (p, _, ctx, t) = setup(2, 3, "a t^2 + 2 T");
        assert_eq!(ctx.dv_abs, 1);
        let a = interval_alphabet(&t, &ctx, &p);
        let cuts = generate_cuts(&a, u64::MAX).unwrap();
        assert_eq!(cuts.len(), a.len());
        assert!(cuts.iter().all(|c| c.genuine && c.k == 1 && c.ik == c.b && c.ik1 == c.b));
    }
}
