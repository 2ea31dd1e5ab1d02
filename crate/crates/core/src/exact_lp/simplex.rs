use num_traits::Zero;

use super::q::{lcm_i128, Q};
use super::{normalize_sparse, LPModel, LPSolution, LpStatus, Relation, Sense};
use crate::error::{Result, SclError};
use crate::Rational;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Hard cap on pivots across all phases of one `solve` call.
    pub max_pivots: u64,
    /// Number of improving columns examined before the best one is taken.
    pub candidate_window: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_pivots: 5_000_000, candidate_window: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

#[derive(Debug, Clone)]
struct IntCol {
    entries: Vec<(u32, i64)>,
    cost: i128,
    scale: i128,
}

#[derive(Debug, Clone)]
struct Col {
    kind: Kind,
    entries: Vec<(u32, Q)>,
    cost: Q,
    int: Option<IntCol>,
    dead: bool,
}

impl Col {
    fn new(kind: Kind, entries: Vec<(u32, Q)>, cost: Q) -> Col {
        let mut c = Col { kind, entries, cost, int: None, dead: false };
        c.refresh_int();
        c
    }

    /// Integer copy scaled by the lcm of the denominators, for fast pricing.
    fn refresh_int(&mut self) {
        self.int = (|| {
            let mut scale = self.cost.denom_i128()?;
            for (_, v) in &self.entries {
                scale = lcm_i128(scale, v.denom_i128()?)?;
            }
            let scaled = |v: &Q| -> Option<i128> { v.numer_i128()?.checked_mul(scale / v.denom_i128()?) };
            let mut entries = Vec::with_capacity(self.entries.len());
            for (i, v) in &self.entries {
                entries.push((*i, i64::try_from(scaled(v)?).ok()?));
            }
            Some(IntCol { entries, cost: scaled(&self.cost)?, scale })
        })();
    }
}

type Row = Vec<(u32, Q)>;

fn row_get(row: &Row, i: u32) -> Option<&Q> {
    row.binary_search_by_key(&i, |(k, _)| *k).ok().map(|p| &row[p].1)
}

/// `a - f * b` on sorted sparse rows.
fn row_axpy(a: &Row, f: &Q, b: &Row) -> Row {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map_or(u32::MAX, |e| e.0);
        let kb = b.get(j).map_or(u32::MAX, |e| e.0);
        if ka < kb {
            out.push(a[i].clone());
            i += 1;
        } else if kb < ka {
            out.push((kb, f.mul(&b[j].1).neg()));
            j += 1;
        } else {
            let v = a[i].1.sub_mul(f, &b[j].1);
            if !v.is_zero() {
                out.push((ka, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Revised primal simplex with an exact sparse basis inverse.
///
/// Columns and rows can be appended between calls to [`Simplex::solve`];
/// the previous basis is kept as a warm start.
#[derive(Debug, Clone)]
pub struct Simplex {
    m: usize,
    cols: Vec<Col>,
    struct_cols: Vec<usize>,
    rhs: Vec<Q>,
    relations: Vec<Relation>,
    sense: Sense,
    basis: Vec<usize>,
    pos: Vec<Option<usize>>,
    binv: Vec<Row>,
    /// Sign of the slack or artificial that was basic when each row was added.
    init_sign: Vec<i64>,
    xb: Vec<Q>,
    y: Vec<Q>,
    status: Option<LpStatus>,
    pivots: u64,
    cursor: usize,
}

impl Simplex {
    pub fn new(sense: Sense) -> Simplex {
        Simplex {
            m: 0,
            cols: Vec::new(),
            struct_cols: Vec::new(),
            rhs: Vec::new(),
            relations: Vec::new(),
            sense,
            basis: Vec::new(),
            pos: Vec::new(),
            binv: Vec::new(),
            init_sign: Vec::new(),
            xb: Vec::new(),
            y: Vec::new(),
            status: None,
            pivots: 0,
            cursor: 0,
        }
    }

    pub fn from_model(model: &LPModel) -> Simplex {
        let mut s = Simplex::new(model.sense);
        let c = model.objective_dense();
        for cj in &c {
            s.add_column(&[], cj);
        }
        for con in &model.constraints {
            s.add_row(&con.coeffs, con.relation, &con.rhs);
        }
        s
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn num_structural(&self) -> usize {
        self.struct_cols.len()
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    fn internal_cost(&self, c: &Rational) -> Q {
        let q = Q::from_rational(c);
        match self.sense {
            Sense::Max => q,
            Sense::Min => q.neg(),
        }
    }

    /// Appends a structural variable; it enters the problem nonbasic at zero.
    pub fn add_column(&mut self, coeffs: &[(usize, Rational)], cost: &Rational) -> usize {
        let entries: Vec<(u32, Q)> = normalize_sparse(coeffs.to_vec())
            .into_iter()
            .map(|(i, v)| {
                assert!(i < self.m, "column refers to an unknown row");
                (i as u32, Q::from_rational(&v))
            })
            .collect();
        let cost = self.internal_cost(cost);
        self.cols.push(Col::new(Kind::Structural, entries, cost));
        self.pos.push(None);
        self.struct_cols.push(self.cols.len() - 1);
        self.struct_cols.len() - 1
    }

    /// Appends a row over existing structural variables and keeps the basis
    /// by making the new row's slack (or an artificial) basic.
    pub fn add_row(&mut self, coeffs: &[(usize, Rational)], relation: Relation, rhs: &Rational) -> usize {
        let i = self.m as u32;
        let coeffs = normalize_sparse(coeffs.to_vec());
        let mut value = Q::from_rational(rhs);
        let mut r_b: Vec<(usize, Q)> = Vec::new();
        for (j, v) in &coeffs {
            let c = self.struct_cols[*j];
            let v = Q::from_rational(v);
            if let Some(p) = self.pos[c] {
                value = value.sub_mul(&v, &self.xb[p]);
                r_b.push((p, v.clone()));
            }
            let col = &mut self.cols[c];
            col.entries.push((i, v));
            col.refresh_int();
        }
        self.m += 1;
        self.rhs.push(Q::from_rational(rhs));
        self.relations.push(relation);
        self.y.push(Q::ZERO);

        let slack_sign = match relation {
            Relation::Le => Some(1i64),
            Relation::Ge => Some(-1i64),
            Relation::Eq => None,
        };
        let mut slack_col = None;
        if let Some(sg) = slack_sign {
            self.cols.push(Col::new(Kind::Slack, vec![(i, Q::int(sg))], Q::ZERO));
            self.pos.push(None);
            slack_col = Some(self.cols.len() - 1);
        }
        let (basic, s) = match (slack_col, slack_sign) {
            (Some(c), Some(sg)) if value.is_zero() || value.signum() as i64 == sg => (c, sg),
            _ => {
                let sg = if value.is_negative() { -1 } else { 1 };
                self.cols.push(Col::new(Kind::Artificial, vec![(i, Q::int(sg))], Q::ZERO));
                self.pos.push(None);
                (self.cols.len() - 1, sg)
            }
        };
        // New inverse row: [-r_B B^-1 / s, 1/s].
        let s_q = Q::int(s);
        let mut new_row: Row = Vec::new();
        for (p, v) in &r_b {
            new_row = row_axpy(&new_row, &v.div(&s_q), &self.binv[*p]);
        }
        new_row.push((i, s_q.clone()));
        self.binv.push(new_row);
        self.init_sign.push(s);
        self.basis.push(basic);
        self.pos[basic] = Some(self.m - 1);
        self.xb.push(value.div(&s_q));
        self.status = None;
        self.m - 1
    }

    fn phase_cost(&self, c: usize, phase: u8) -> Q {
        let col = &self.cols[c];
        match (phase, col.kind) {
            (1, Kind::Artificial) => Q::int(-1),
            (1, _) => Q::ZERO,
            (_, Kind::Structural) => col.cost.clone(),
            _ => Q::ZERO,
        }
    }

    fn compute_y(&mut self, phase: u8) {
        let mut y = vec![Q::ZERO; self.m];
        for p in 0..self.m {
            let cb = self.phase_cost(self.basis[p], phase);
            if cb.is_zero() {
                continue;
            }
            for (i, v) in &self.binv[p] {
                y[*i as usize] = y[*i as usize].add(&cb.mul(v));
            }
        }
        self.y = y;
    }

    fn reduced_cost_exact(&self, c: usize, phase: u8) -> Q {
        let col = &self.cols[c];
        let mut rc = self.phase_cost(c, phase);
        for (i, v) in &col.entries {
            let yi = &self.y[*i as usize];
            if !yi.is_zero() {
                rc = rc.sub_mul(yi, v);
            }
        }
        rc
    }

    /// Scaled integer duals `Y = D*y` with the common denominator `D`.
    fn scaled_y(&self) -> Option<(i128, Vec<i128>)> {
        let mut den: i128 = 1;
        for v in &self.y {
            den = lcm_i128(den, v.denom_i128()?)?;
        }
        let mut out = Vec::with_capacity(self.m);
        for v in &self.y {
            out.push(v.numer_i128()?.checked_mul(den / v.denom_i128()?)?);
        }
        Some((den, out))
    }

    fn eligible(&self, c: usize) -> bool {
        let col = &self.cols[c];
        !col.dead && col.kind != Kind::Artificial && self.pos[c].is_none()
    }

    /// Positive-reduced-cost test with a comparable score.
    fn price(&self, c: usize, phase: u8, sy: &Option<(i128, Vec<i128>)>) -> Option<f64> {
        let col = &self.cols[c];
        if let (Some((den, ys)), Some(ic)) = (sy, &col.int) {
            let fast = (|| {
                let base = if phase == 1 { 0 } else { ic.cost };
                let mut acc = base.checked_mul(*den)?;
                for (i, v) in &ic.entries {
                    acc = acc.checked_sub(ys[*i as usize].checked_mul(*v as i128)?)?;
                }
                Some(acc)
            })();
            if let Some(acc) = fast {
                return (acc > 0).then(|| acc as f64 / ic.scale as f64);
            }
        }
        let rc = self.reduced_cost_exact(c, phase);
        rc.is_positive().then(|| rc.to_f64())
    }

    fn choose_entering(&mut self, phase: u8, window: usize) -> Option<usize> {
        let sy = self.scaled_y();
        let n = self.cols.len();
        let mut best: Option<(f64, usize)> = None;
        let mut found = 0;
        let start = self.cursor.min(n);
        let mut last = start;
        for k in 0..n {
            let c = (start + k) % n;
            last = c;
            if !self.eligible(c) {
                continue;
            }
            if let Some(score) = self.price(c, phase, &sy) {
                if best.is_none_or(|(b, _)| score > b) {
                    best = Some((score, c));
                }
                found += 1;
                if found >= window {
                    break;
                }
            }
        }
        self.cursor = (last + 1) % n.max(1);
        best.map(|(_, c)| c)
    }

    fn ftran(&self, c: usize) -> Vec<Q> {
        let col = &self.cols[c];
        self.binv
            .iter()
            .map(|row| {
                let mut acc = Q::ZERO;
                for (i, v) in &col.entries {
                    if let Some(b) = row_get(row, *i) {
                        acc = acc.add(&b.mul(v));
                    }
                }
                acc
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, q: usize, d: &[Q], rc_q: &Q) {
        let dr = d[r].clone();
        let new_r: Row = self.binv[r].iter().map(|(i, v)| (*i, v.div(&dr))).collect();
        for p in 0..self.m {
            if p != r && !d[p].is_zero() {
                self.binv[p] = row_axpy(&self.binv[p], &d[p], &new_r);
            }
        }
        let theta = self.xb[r].div(&dr);
        if !theta.is_zero() {
            for p in 0..self.m {
                if p != r && !d[p].is_zero() {
                    self.xb[p] = self.xb[p].sub_mul(&d[p], &theta);
                }
            }
        }
        for (i, v) in &new_r {
            let yi = &mut self.y[*i as usize];
            *yi = yi.add(&rc_q.mul(v));
        }
        self.binv[r] = new_r;
        self.xb[r] = theta;
        let leaving = self.basis[r];
        self.pos[leaving] = None;
        self.basis[r] = q;
        self.pos[q] = Some(r);
        self.pivots += 1;
    }

    fn artificial_sum(&self) -> Q {
        let mut s = Q::ZERO;
        for p in 0..self.m {
            if self.cols[self.basis[p]].kind == Kind::Artificial {
                s = s.add(&self.xb[p]);
            }
        }
        s
    }

    /// Lexicographic comparison of rows `p` and `q` of `B^-1 B_0`, scaled by
    /// `1/dp` and `1/dq`; `B_0` is the slack/artificial basis the rows started with.
    fn lex_less(&self, p: usize, dp: &Q, q: usize, dq: &Q) -> bool {
        let (a, b) = (&self.binv[p], &self.binv[q]);
        let (mut i, mut j) = (0, 0);
        loop {
            let ka = a.get(i).map_or(u32::MAX, |e| e.0);
            let kb = b.get(j).map_or(u32::MAX, |e| e.0);
            let k = ka.min(kb);
            if k == u32::MAX {
                return false;
            }
            let va = if ka == k { a[i].1.mul(dq) } else { Q::ZERO };
            let vb = if kb == k { b[j].1.mul(dp) } else { Q::ZERO };
            if ka == k {
                i += 1;
            }
            if kb == k {
                j += 1;
            }
            match va.cmp(&vb) {
                std::cmp::Ordering::Equal => continue,
                ord => return (ord == std::cmp::Ordering::Less) == (self.init_sign[k as usize] > 0),
            }
        }
    }

    /// Runs one phase; returns false on unboundedness.
    ///
    /// Ties in the ratio test are broken lexicographically, which is the
    /// symbolic perturbation `b + B_0 (eps, eps^2, ...)` and rules out cycling.
    fn run_phase(&mut self, phase: u8, opts: &SimplexOptions, budget: u64) -> Result<bool> {
        self.compute_y(phase);
        loop {
            if phase == 1 && self.artificial_sum().is_zero() {
                return Ok(true);
            }
            if self.pivots >= budget {
                return Err(SclError::Resource(format!("simplex pivot limit {} reached", opts.max_pivots)));
            }
            let Some(q) = self.choose_entering(phase, opts.candidate_window.max(1)) else {
                return Ok(true);
            };
            let d = self.ftran(q);
            // Basic artificials are held at zero in phase 2 and leave first.
            let forced = (phase == 2)
                .then(|| (0..self.m).find(|&p| !d[p].is_zero() && self.cols[self.basis[p]].kind == Kind::Artificial))
                .flatten();
            let r = match forced {
                Some(p) => p,
                None => {
                    let mut leave: Option<(usize, Q)> = None;
                    for p in 0..self.m {
                        if !d[p].is_positive() {
                            continue;
                        }
                        let ratio = self.xb[p].div(&d[p]);
                        let better = match &leave {
                            None => true,
                            Some((bp, br)) => match ratio.cmp(br) {
                                std::cmp::Ordering::Less => true,
                                std::cmp::Ordering::Greater => false,
                                std::cmp::Ordering::Equal => self.lex_less(p, &d[p], *bp, &d[*bp]),
                            },
                        };
                        if better {
                            leave = Some((p, ratio));
                        }
                    }
                    match leave {
                        Some((p, _)) => p,
                        None => return Ok(false),
                    }
                }
            };
            let rc_q = self.reduced_cost_exact(q, phase);
            let leaving = self.basis[r];
            self.pivot(r, q, &d, &rc_q);
            if phase == 1 && self.cols[leaving].kind == Kind::Artificial {
                self.cols[leaving].dead = true;
            }
        }
    }

    /// Optimizes from the current basis.
    pub fn solve(&mut self, opts: &SimplexOptions) -> Result<LpStatus> {
        let budget = self.pivots.saturating_add(opts.max_pivots);
        let needs_phase1 =
            (0..self.m).any(|p| self.cols[self.basis[p]].kind == Kind::Artificial && !self.xb[p].is_zero());
        if needs_phase1 {
            self.run_phase(1, opts, budget)?;
            if !self.artificial_sum().is_zero() {
                self.status = Some(LpStatus::Infeasible);
                return Ok(LpStatus::Infeasible);
            }
            for c in 0..self.cols.len() {
                if self.cols[c].kind == Kind::Artificial && self.pos[c].is_none() {
                    self.cols[c].dead = true;
                }
            }
        }
        let status = if self.run_phase(2, opts, budget)? { LpStatus::Optimal } else { LpStatus::Unbounded };
        self.status = Some(status);
        Ok(status)
    }

    pub fn status(&self) -> Option<LpStatus> {
        self.status
    }

    /// Current values of the structural variables.
    pub fn primal(&self) -> Vec<Rational> {
        self.struct_cols
            .iter()
            .map(|&c| match self.pos[c] {
                Some(p) => self.xb[p].to_rational(),
                None => Rational::zero(),
            })
            .collect()
    }

    /// Row multipliers in the sign convention of [`LPSolution`].
    pub fn duals(&self) -> Vec<Rational> {
        self.y
            .iter()
            .map(|v| match self.sense {
                Sense::Max => v.to_rational(),
                Sense::Min => v.neg().to_rational(),
            })
            .collect()
    }

    /// Row multipliers as exact internal scalars (max convention).
    pub fn duals_q(&self) -> &[Q] {
        &self.y
    }

    /// Objective value in the model's sense.
    pub fn objective(&self) -> Rational {
        let mut acc = Q::ZERO;
        for &c in &self.struct_cols {
            if let Some(p) = self.pos[c] {
                acc = acc.add(&self.cols[c].cost.mul(&self.xb[p]));
            }
        }
        match self.sense {
            Sense::Max => acc.to_rational(),
            Sense::Min => acc.neg().to_rational(),
        }
    }

    pub fn solution(&self) -> LPSolution {
        match self.status {
            Some(LpStatus::Optimal) => LPSolution {
                status: LpStatus::Optimal,
                primal: self.primal(),
                dual: self.duals(),
                objective_value: self.objective(),
                pivots: self.pivots,
            },
            Some(st) => LPSolution {
                status: st,
                primal: Vec::new(),
                dual: Vec::new(),
                objective_value: Rational::zero(),
                pivots: self.pivots,
            },
            None => LPSolution {
                status: LpStatus::Infeasible,
                primal: Vec::new(),
                dual: Vec::new(),
                objective_value: Rational::zero(),
                pivots: self.pivots,
            },
        }
    }

    /// Right-hand side and relation of row `i`.
    pub fn row(&self, i: usize) -> (Relation, Rational) {
        (self.relations[i], self.rhs[i].to_rational())
    }
}
