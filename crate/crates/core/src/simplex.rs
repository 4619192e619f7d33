//! Dense two-phase simplex. Pricing picks the most negative reduced cost and
//! falls back to Bland's rule while pivots are degenerate, which rules out
//! cycling.
//!
//! Solves `maximize c·x subject to rows (≤ | ≥ | =) rhs, x ≥ 0`. Sized for
//! desk-scale problems (a few hundred variables); the tableau is dense.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    Shape {
        row: usize,
        got: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;
pub const DEFAULT_MAX_PIVOTS: usize = 100_000;
/// Consecutive degenerate pivots before falling back to Bland's rule.
const DEGENERATE_SWITCH: usize = 50;

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        self.solve_with_limit(DEFAULT_MAX_PIVOTS)
    }

    pub fn solve_with_limit(&self, max_pivots: usize) -> Result<LpOutcome, LpError> {
        let n = self.num_vars();
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Shape {
                    row,
                    got: c.coeffs.len(),
                    expected: n,
                });
            }
        }
        let mut t = Tableau::build(self);
        let mut budget = max_pivots;

        // phase 1: minimize the sum of artificials
        if t.num_artificial > 0 {
            let mut cost = vec![0.0; t.cols];
            cost[t.artificial_start..].fill(1.0);
            t.set_cost(&cost);
            t.run(&mut budget, t.cols, max_pivots)?;
            if t.objective_value() > FEASIBILITY_EPS * (1.0 + t.rhs_scale) {
                return Ok(LpOutcome::Infeasible);
            }
            t.drive_out_artificials();
        }

        // phase 2 over structural and slack columns only
        let mut cost = vec![0.0; t.cols];
        for (j, &c) in self.objective.iter().enumerate() {
            cost[j] = -c;
        }
        t.set_cost(&cost);
        if !t.run(&mut budget, t.artificial_start, max_pivots)? {
            return Ok(LpOutcome::Unbounded);
        }
        let x = t.primal(n);
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

struct Tableau {
    /// `rows × (cols + 1)`, last entry of each row is the right-hand side.
    a: Vec<Vec<f64>>,
    /// Reduced costs (length `cols + 1`, last entry is `-objective`).
    z: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
    num_artificial: usize,
    rhs_scale: f64,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        // normalize to rhs ≥ 0
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();
        let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let num_artificial = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_start = n + num_slack;
        let cols = artificial_start + num_artificial;

        let mut a = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (n, artificial_start);
        for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
            a[i][..n].copy_from_slice(coeffs);
            a[i][cols] = *rhs;
            match rel {
                Relation::Le => {
                    a[i][slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    a[i][slack] = -1.0;
                    slack += 1;
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    a[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        let rhs_scale = rows.iter().fold(0.0f64, |acc, r| acc.max(r.2));
        Self {
            a,
            z: vec![0.0; cols + 1],
            basis,
            cols,
            artificial_start,
            num_artificial,
            rhs_scale,
        }
    }

    /// Installs a minimization cost and prices out the basic columns.
    fn set_cost(&mut self, cost: &[f64]) {
        self.z[..self.cols].copy_from_slice(cost);
        self.z[self.cols] = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.z[b];
            if cb != 0.0 {
                for (zj, aij) in self.z.iter_mut().zip(&self.a[i]) {
                    *zj -= cb * aij;
                }
            }
        }
    }

    fn objective_value(&self) -> f64 {
        -self.z[self.cols]
    }

    /// Simplex iterations over columns `< limit`: most negative reduced cost,
    /// switching to Bland's rule after a run of degenerate pivots until the
    /// objective moves again. Returns false when the problem is unbounded.
    fn run(
        &mut self,
        budget: &mut usize,
        limit: usize,
        max_pivots: usize,
    ) -> Result<bool, LpError> {
        let mut degenerate_run = 0;
        loop {
            let bland = degenerate_run >= DEGENERATE_SWITCH;
            let enter = if bland {
                (0..limit).find(|&j| self.z[j] < -PIVOT_EPS)
            } else {
                (0..limit)
                    .filter(|&j| self.z[j] < -PIVOT_EPS)
                    .min_by(|&a, &b| self.z[a].total_cmp(&self.z[b]))
            };
            let Some(enter) = enter else {
                return Ok(true);
            };
            let rhs = self.cols;
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if row[enter] > PIVOT_EPS {
                    let ratio = row[rhs] / row[enter];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(false);
            };
            if *budget == 0 {
                return Err(LpError::IterationLimit(max_pivots));
            }
            *budget -= 1;
            if ratio.abs() <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[row].clone();
        for (i, r) in self.a.iter_mut().enumerate() {
            if i != row {
                let f = r[col];
                if f != 0.0 {
                    for (v, pv) in r.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                    r[col] = 0.0;
                }
            }
        }
        let f = self.z[col];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.z[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// After phase 1, pivots zero-valued artificials out of the basis where
    /// possible; rows that cannot be pivoted are redundant and removed.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.artificial_start {
                let col = (0..self.artificial_start).find(|&j| self.a[i][j].abs() > 1e-9);
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in self.a.iter_mut() {
            for v in &mut row[self.artificial_start..self.cols] {
                *v = 0.0;
            }
        }
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.a[i][self.cols];
            }
        }
        x
    }
}
