//! Restricted master problem for column generation.
//!
//! The caller owns the pricing step: it reads the duals of the current
//! master, computes reduced costs over its (possibly implicit) column set
//! and appends the improving columns. The master starts in a feasibility
//! phase that minimizes artificial slack on the rows with nonzero right-hand
//! side; once that reaches zero it switches to the real objective.

use num_traits::{One, Signed, Zero};

use super::{LPModel, LPSolution, LpStatus, Relation, Sense, Simplex, SimplexOptions};
use crate::error::{Result, SclError};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Columns cost 0, artificials cost -1: maximize minus the infeasibility.
    Feasibility,
    Optimality,
}

#[derive(Debug, Clone)]
pub struct MasterSolve {
    pub phase: Phase,
    /// Objective of the current phase (minus the infeasibility in phase 1).
    pub value: Rational,
    /// Row multipliers, `value = sum duals_i * rhs_i`.
    pub duals: Vec<Rational>,
}

/// Maximization master over equality and inequality rows.
#[derive(Debug, Clone)]
pub struct Master {
    relations: Vec<Relation>,
    rhs: Vec<Rational>,
    cols: Vec<(Vec<(usize, Rational)>, Rational)>,
    phase: Phase,
    simplex: Option<Simplex>,
    pivots: u64,
    pub options: SimplexOptions,
}

impl Master {
    pub fn new(options: SimplexOptions) -> Master {
        Master {
            relations: Vec::new(),
            rhs: Vec::new(),
            cols: Vec::new(),
            phase: Phase::Feasibility,
            simplex: None,
            pivots: 0,
            options,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn pivots(&self) -> u64 {
        self.pivots + self.simplex.as_ref().map_or(0, |s| s.pivots())
    }

    pub fn column(&self, j: usize) -> &(Vec<(usize, Rational)>, Rational) {
        &self.cols[j]
    }

    /// Appends a row that no existing column touches.
    pub fn add_row(&mut self, relation: Relation, rhs: Rational) -> usize {
        let i = self.rhs.len();
        if let Some(s) = &mut self.simplex {
            if rhs.is_zero() {
                s.add_row(&[], relation, &rhs);
            } else {
                self.pivots += s.pivots();
                self.simplex = None;
            }
        }
        self.relations.push(relation);
        self.rhs.push(rhs);
        i
    }

    fn phase_cost(&self, cost: &Rational) -> Rational {
        match self.phase {
            Phase::Feasibility => Rational::zero(),
            Phase::Optimality => cost.clone(),
        }
    }

    pub fn add_column(&mut self, entries: Vec<(usize, Rational)>, cost: Rational) -> usize {
        assert!(entries.iter().all(|(i, _)| *i < self.rhs.len()), "column refers to an unknown row");
        if let Some(s) = &mut self.simplex {
            let c = match self.phase {
                Phase::Feasibility => Rational::zero(),
                Phase::Optimality => cost.clone(),
            };
            s.add_column(&entries, &c);
        }
        self.cols.push((entries, cost));
        self.cols.len() - 1
    }

    /// The current master as a plain model (real objective, no artificials).
    pub fn model(&self) -> LPModel {
        let mut m = LPModel::new(Sense::Max);
        m.add_vars(self.cols.len());
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.rhs.len()];
        for (j, (entries, _)) in self.cols.iter().enumerate() {
            for (i, v) in entries {
                rows[*i].push((j, v.clone()));
            }
        }
        for (i, coeffs) in rows.into_iter().enumerate() {
            m.add_constraint(coeffs, self.relations[i], self.rhs[i].clone(), None);
        }
        m.set_objective(self.cols.iter().enumerate().map(|(j, (_, c))| (j, c.clone())).collect());
        m
    }

    fn build(&self) -> Simplex {
        let mut m = LPModel::new(Sense::Max);
        m.add_vars(self.cols.len());
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.rhs.len()];
        for (j, (entries, _)) in self.cols.iter().enumerate() {
            for (i, v) in entries {
                rows[*i].push((j, v.clone()));
            }
        }
        let mut obj: Vec<(usize, Rational)> =
            self.cols.iter().enumerate().map(|(j, (_, c))| (j, self.phase_cost(c))).collect();
        if self.phase == Phase::Feasibility {
            for (i, b) in self.rhs.iter().enumerate() {
                if !b.is_zero() {
                    let j = m.add_var(None);
                    let sign = if b.is_positive() { Rational::one() } else { -Rational::one() };
                    rows[i].push((j, sign));
                    obj.push((j, -Rational::one()));
                }
            }
        }
        for (i, coeffs) in rows.into_iter().enumerate() {
            m.add_constraint(coeffs, self.relations[i], self.rhs[i].clone(), None);
        }
        m.set_objective(obj);
        Simplex::from_model(&m)
    }

    /// Solves the current master, moving to the optimality phase as soon
    /// as the restricted problem is feasible.
    pub fn solve(&mut self) -> Result<MasterSolve> {
        loop {
            if self.simplex.is_none() {
                self.simplex = Some(self.build());
            }
            let s = self.simplex.as_mut().expect("built above");
            let status = s.solve(&self.options)?;
            match (self.phase, status) {
                (Phase::Feasibility, LpStatus::Optimal) => {
                    let value = s.objective();
                    if value.is_zero() {
                        self.pivots += s.pivots();
                        self.simplex = None;
                        self.phase = Phase::Optimality;
                        continue;
                    }
                    return Ok(MasterSolve { phase: Phase::Feasibility, value, duals: s.duals() });
                }
                (Phase::Optimality, LpStatus::Optimal) => {
                    return Ok(MasterSolve { phase: Phase::Optimality, value: s.objective(), duals: s.duals() });
                }
                (_, LpStatus::Unbounded) => return Err(SclError::Lp("restricted master is unbounded".into())),
                (_, LpStatus::Infeasible) => {
                    return Err(SclError::Lp("restricted master lost feasibility".into()));
                }
            }
        }
    }

    /// Optimal solution of the master in the optimality phase.
    pub fn solution(&self) -> Option<LPSolution> {
        match (&self.simplex, self.phase) {
            (Some(s), Phase::Optimality) if s.status() == Some(LpStatus::Optimal) => {
                let mut sol = s.solution();
                sol.pivots = self.pivots();
                Some(sol)
            }
            _ => None,
        }
    }
}

/// Duals scaled to integers by their common denominator.
#[derive(Debug, Clone)]
pub struct ScaledDuals {
    pub den: i128,
    pub y: Vec<i128>,
}

impl ScaledDuals {
    /// `None` when the common denominator or a numerator leaves `i128`
    /// with headroom for pricing sums.
    pub fn new(duals: &[Rational]) -> Option<ScaledDuals> {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        let mut den = num_bigint::BigInt::one();
        for v in duals {
            den = den.lcm(v.denom());
        }
        let limit = num_bigint::BigInt::from(1u128 << 80);
        if den > limit {
            return None;
        }
        let mut y = Vec::with_capacity(duals.len());
        for v in duals {
            let n = v.numer() * (&den / v.denom());
            if n.abs() > limit {
                return None;
            }
            y.push(n.to_i128()?);
        }
        Some(ScaledDuals { den: den.to_i128()?, y })
    }
}

/// Integer copy of a column: `scale * column` with integer entries.
struct IntColumn {
    scale: i128,
    cost: i128,
    entries: Vec<(u32, i64)>,
}

fn int_column(entries: &[(usize, Rational)], cost: &Rational) -> Option<IntColumn> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let mut scale = cost.denom().to_i128()?;
    for (_, v) in entries {
        scale = scale.lcm(&v.denom().to_i128()?);
    }
    let conv = |v: &Rational| -> Option<i128> { v.numer().to_i128()?.checked_mul(scale / v.denom().to_i128()?) };
    let mut out = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        out.push((*i as u32, i64::try_from(conv(v)?).ok()?));
    }
    Some(IntColumn { scale, cost: conv(cost)?, entries: out })
}

/// Reduced cost of a column in the given phase, as a sign-correct score.
fn reduced_cost(
    entries: &[(usize, Rational)],
    cost: &Rational,
    int: Option<&IntColumn>,
    phase: Phase,
    duals: &[Rational],
    scaled: Option<&ScaledDuals>,
) -> Option<f64> {
    if let (Some(ic), Some(sd)) = (int, scaled) {
        let fast = (|| {
            let base = if phase == Phase::Feasibility { 0 } else { ic.cost };
            let mut acc = base.checked_mul(sd.den)?;
            for (i, v) in &ic.entries {
                acc = acc.checked_sub(sd.y[*i as usize].checked_mul(*v as i128)?)?;
            }
            Some(acc)
        })();
        if let Some(acc) = fast {
            return (acc > 0).then(|| acc as f64 / (sd.den as f64 * ic.scale as f64));
        }
    }
    let base = if phase == Phase::Feasibility { Rational::zero() } else { cost.clone() };
    let rc = entries.iter().fold(base, |acc, (i, v)| acc - &duals[*i] * v);
    use num_traits::ToPrimitive;
    rc.is_positive().then(|| rc.to_f64().unwrap_or(f64::MAX))
}

/// Solves a maximization model by pricing its columns into a small master.
///
/// Suited to models with many more columns than rows. The returned solution
/// covers every column of `model`; its optimality can be rechecked with
/// `verify_optimality` on the full model.
pub fn solve_by_pricing(model: &LPModel, options: &SimplexOptions) -> Result<LPSolution> {
    solve_by_pricing_from(model, options, &[])
}

/// [`solve_by_pricing`] with `seed` columns placed in the master up front.
pub fn solve_by_pricing_from(model: &LPModel, options: &SimplexOptions, seed: &[usize]) -> Result<LPSolution> {
    assert_eq!(model.sense, Sense::Max, "pricing driver expects a maximization model");
    let columns = model.columns();
    let costs = model.objective_dense();
    let ints: Vec<Option<IntColumn>> = columns.iter().zip(&costs).map(|(e, c)| int_column(e, c)).collect();
    let mut master = Master::new(options.clone());
    for c in &model.constraints {
        master.add_row(c.relation, c.rhs.clone());
    }
    let batch = (2 * model.constraints.len()).max(64);
    let mut in_master: Vec<Option<usize>> = vec![None; columns.len()];
    for &j in seed {
        if in_master[j].is_none() {
            in_master[j] = Some(master.add_column(columns[j].clone(), costs[j].clone()));
        }
    }
    let mut rounds = 0u32;
    loop {
        rounds += 1;
        let s = master.solve()?;
        let scaled = ScaledDuals::new(&s.duals);
        let mut cand: Vec<(f64, usize)> = (0..columns.len())
            .filter_map(|j| {
                reduced_cost(&columns[j], &costs[j], ints[j].as_ref(), s.phase, &s.duals, scaled.as_ref())
                    .map(|score| (score, j))
            })
            .collect();
        if cand.is_empty() {
            let mut primal = vec![Rational::zero(); columns.len()];
            if s.phase == Phase::Feasibility {
                return Ok(LPSolution {
                    status: LpStatus::Infeasible,
                    primal: Vec::new(),
                    dual: s.duals,
                    objective_value: Rational::zero(),
                    pivots: master.pivots(),
                });
            }
            let sol = master.solution().expect("optimality phase was just solved");
            for (j, slot) in in_master.iter().enumerate() {
                if let Some(k) = slot {
                    primal[j] = sol.primal[*k].clone();
                }
            }
            return Ok(LPSolution {
                status: LpStatus::Optimal,
                primal,
                dual: sol.dual,
                objective_value: sol.objective_value,
                pivots: sol.pivots,
            });
        }
        cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut added = 0;
        for &(_, j) in cand.iter().take(batch) {
            if in_master[j].is_some() {
                return Err(SclError::Lp(format!("column {j} priced in twice (round {rounds})")));
            }
            in_master[j] = Some(master.add_column(columns[j].clone(), costs[j].clone()));
            added += 1;
        }
        debug_assert!(added > 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    /// max x0 + x1 + x2 s.t. x0 + x1 = 2, x1 + x2 = 2 over an explicit column pool.
    #[test]
    fn pool_pricing_reaches_the_full_optimum() {
        let pool: Vec<(Vec<(usize, Rational)>, Rational)> =
            vec![(vec![(0, r(1))], r(1)), (vec![(0, r(1)), (1, r(1))], r(1)), (vec![(1, r(1))], r(1))];
        let mut m = Master::new(SimplexOptions::default());
        m.add_row(Relation::Eq, r(2));
        m.add_row(Relation::Eq, r(2));
        let mut used = vec![false; pool.len()];
        loop {
            let s = m.solve().unwrap();
            let mut added = false;
            for (j, (e, c)) in pool.iter().enumerate() {
                let cost = if s.phase == Phase::Feasibility { r(0) } else { c.clone() };
                let rc = e.iter().fold(cost, |acc, (i, v)| acc - &s.duals[*i] * v);
                if !used[j] && rc.is_positive() {
                    used[j] = true;
                    m.add_column(e.clone(), c.clone());
                    added = true;
                }
            }
            if !added {
                assert_eq!(s.phase, Phase::Optimality);
                assert_eq!(s.value, r(4));
                break;
            }
        }
        let sol = m.solution().unwrap();
        super::super::verify_optimality(&m.model(), &sol).unwrap();
    }

    #[test]
    fn pricing_driver_matches_the_direct_solve() {
        let mut model = LPModel::new(Sense::Max);
        model.add_vars(5);
        model.add_constraint(vec![(0, r(1)), (1, r(1)), (4, r(-1))], Relation::Eq, r(0), None);
        model.add_constraint(vec![(1, r(1)), (2, r(1)), (3, r(2))], Relation::Eq, r(3), None);
        model.add_constraint(vec![(0, r(1)), (3, r(1))], Relation::Le, r(2), None);
        model.set_objective((0..5).map(|j| (j, r(1 + j as i64 % 2))).collect());
        let direct = super::super::solve(&model).unwrap();
        let priced = solve_by_pricing(&model, &SimplexOptions::default()).unwrap();
        assert_eq!(direct.objective_value, priced.objective_value);
        super::super::verify_optimality(&model, &priced).unwrap();
    }

    #[test]
    fn pricing_driver_detects_infeasibility() {
        let mut model = LPModel::new(Sense::Max);
        model.add_vars(2);
        model.add_constraint(vec![(0, r(1)), (1, r(-1))], Relation::Eq, r(0), None);
        model.add_constraint(vec![(1, r(1))], Relation::Eq, r(1), None);
        model.add_constraint(vec![(0, r(1))], Relation::Le, r(0), None);
        model.set_objective(vec![(0, r(1))]);
        let s = solve_by_pricing(&model, &SimplexOptions::default()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn scaled_duals_are_exact() {
        let d = ScaledDuals::new(&[Rational::new(1.into(), 6.into()), Rational::new((-3).into(), 4.into())]).unwrap();
        assert_eq!(d.den, 12);
        assert_eq!(d.y, vec![2, -9]);
    }
}
