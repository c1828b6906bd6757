//! Dense simplex for covering programs
//!
//! ```text
//! minimize  c·x   subject to  A x >= b,  x >= 0,   with c >= 0.
//! ```
//!
//! The solver runs the primal simplex on the dual packing program
//! `max b·y  s.t. Aᵀy <= c, y >= 0`, whose origin is feasible because `c >= 0`,
//! so no phase one is needed. The covering optimum `x` is read from the reduced
//! costs of the dual slack columns. Bland's rule picks both the entering and the
//! leaving variable, which rules out cycling on these highly degenerate
//! instances.

use serde::Serialize;

use super::{CutConstraintSet, EdgeWeights};
use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;
/// Tolerance of the post-solve feasibility and objective checks.
pub const LP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringProgram {
    costs: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl CoveringProgram {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if let Some(c) = costs.iter().find(|c| c.is_nan() || **c < 0.0) {
            return Err(Error::MalformedProgram(format!("cost {c} is not a nonnegative number")));
        }
        Ok(Self {
            costs,
            rows: Vec::new(),
            rhs: Vec::new(),
        })
    }

    /// Adds `row · x >= rhs`.
    pub fn add_row(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        if row.len() != self.costs.len() {
            return Err(Error::MalformedProgram(format!(
                "row has {} coefficients, program has {} variables",
                row.len(),
                self.costs.len()
            )));
        }
        if row.iter().any(|a| !a.is_finite()) || !rhs.is_finite() {
            return Err(Error::MalformedProgram("non-finite coefficient".into()));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of `A x >= b` or `x >= 0`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().zip(&self.rhs).map(|(row, b)| {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            (b - lhs).max(0.0)
        });
        let signs = x.iter().map(|v| (-v).max(0.0));
        rows.chain(signs).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub value: f64,
    /// Optimal covering variables.
    pub x: Vec<f64>,
    /// Optimal multipliers of the covering rows.
    pub dual: Vec<f64>,
    pub pivots: usize,
}

pub fn solve_covering(program: &CoveringProgram) -> Result<LpSolution> {
    let n = program.num_vars();
    let m = program.num_rows();
    if m == 0 {
        return Ok(LpSolution {
            value: 0.0,
            x: vec![0.0; n],
            dual: Vec::new(),
            pivots: 0,
        });
    }

    // Tableau rows are the n packing constraints; columns are y_0..y_{m-1},
    // slacks s_0..s_{n-1}, then the right-hand side.
    let width = m + n + 1;
    let rhs_col = m + n;
    let mut t = vec![vec![0.0; width]; n];
    for (j, row) in t.iter_mut().enumerate() {
        for (cell, a) in row.iter_mut().zip(&program.rows) {
            *cell = a[j];
        }
        row[m + j] = 1.0;
        row[rhs_col] = program.costs[j];
    }
    // Objective row holds reduced costs of `z - b·y`.
    let mut obj = vec![0.0; width];
    for (cell, b) in obj.iter_mut().zip(&program.rhs) {
        *cell = -b;
    }
    let mut basis: Vec<usize> = (m..m + n).collect();

    let mut pivots = 0;
    while let Some(enter) = (0..m + n).find(|&k| obj[k] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for r in 0..n {
            let a = t[r][enter];
            if a > PIVOT_EPS {
                let ratio = t[r][rhs_col] / a;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[r] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        // Unbounded packing program: the covering program has no feasible point.
        let Some(pr) = leave else {
            return Err(Error::Infeasible);
        };

        let pivot = t[pr][enter];
        for v in t[pr].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr {
                let f = row[enter];
                if f != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = obj[enter];
        for (v, p) in obj.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        basis[pr] = enter;

        pivots += 1;
        if pivots > MAX_PIVOTS {
            return Err(Error::PivotLimit(MAX_PIVOTS));
        }
    }

    let value = obj[rhs_col];
    let x: Vec<f64> = (0..n).map(|j| obj[m + j].max(0.0)).collect();
    let mut dual = vec![0.0; m];
    for (r, &b) in basis.iter().enumerate() {
        if b < m {
            dual[b] = t[r][rhs_col].max(0.0);
        }
    }
    Ok(LpSolution { value, x, dual, pivots })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub witness: EdgeWeights,
    /// Multiplier per constraint, in constraint order.
    pub cut_multipliers: Vec<f64>,
}

/// Minimum total pairwise ebits meeting every cut requirement.
pub fn lp_lower_bound(constraints: &CutConstraintSet) -> Result<LowerBound> {
    let n = constraints.num_parties();
    let pairs: Vec<(usize, usize)> = EdgeWeights::pairs(n).collect();
    let mut program = CoveringProgram::new(vec![1.0; pairs.len()])?;
    for (cut, required) in constraints.constraints() {
        let row = pairs
            .iter()
            .map(|&(i, j)| if cut.crosses(i, j) { 1.0 } else { 0.0 })
            .collect();
        program.add_row(row, *required)?;
    }
    let sol = solve_covering(&program)?;

    let mut witness = EdgeWeights::zeros(n);
    for (&(i, j), &w) in pairs.iter().zip(&sol.x) {
        witness.set(i, j, w)?;
    }
    if !constraints.is_satisfied_by(&witness, LP_TOL) || (witness.total() - sol.value).abs() > LP_TOL {
        return Err(Error::MalformedProgram(
            "simplex returned a witness that fails verification".into(),
        ));
    }
    Ok(LowerBound {
        value: sol.value,
        witness,
        cut_multipliers: sol.dual,
    })
}
