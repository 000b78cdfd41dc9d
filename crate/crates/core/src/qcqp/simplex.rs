//! Dense two-phase primal simplex with Bland's rule.

use serde::{Deserialize, Serialize};

const PIVOT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// `coeffs·u ≤ rhs`.
    Le,
    /// `coeffs·u = rhs`.
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub kind: RowKind,
}

/// `min cost·u` over the rows, with `u_j ≥ 0` where `nonneg[j]` and free
/// otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    pub cost: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub nonneg: Vec<bool>,
}

impl LpInstance {
    /// All variables nonnegative, no rows yet.
    pub fn new(cost: Vec<f64>) -> Self {
        let n = cost.len();
        LpInstance {
            cost,
            rows: Vec::new(),
            nonneg: vec![true; n],
        }
    }

    pub fn le(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.rows.push(LpRow { coeffs, rhs, kind: RowKind::Le });
        self
    }

    pub fn eq(mut self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.rows.push(LpRow { coeffs, rhs, kind: RowKind::Eq });
        self
    }

    /// Largest violation of a row or sign constraint at `u`.
    pub fn violation(&self, u: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for r in &self.rows {
            let lhs: f64 = r.coeffs.iter().zip(u).map(|(a, x)| a * x).sum();
            let v = match r.kind {
                RowKind::Le => (lhs - r.rhs).max(0.0),
                RowKind::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (x, &nn) in u.iter().zip(&self.nonneg) {
            if nn {
                worst = worst.max(-x);
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Unbounded,
    Infeasible,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for x in self.t[r].iter_mut() {
            *x /= p;
        }
        let pr = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&pr) {
                        *x -= f * y;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over the columns allowed by `usable`. Returns false
    /// when unbounded.
    fn run(&mut self, cost: &[f64], usable: &dyn Fn(usize) -> bool) -> bool {
        let rows = self.t.len();
        loop {
            // Reduced costs d_j = c_j − c_Bᵀ·column_j.
            let mut enter = None;
            for j in 0..self.cols {
                if !usable(j) || self.basis.contains(&j) {
                    continue;
                }
                let d = cost[j] - (0..rows).map(|i| cost[self.basis[i]] * self.t[i][j]).sum::<f64>();
                if d < -PIVOT_TOL {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..rows {
                let a = self.t[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - PIVOT_TOL
                                || (ratio <= lr + PIVOT_TOL && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }
}

pub fn solve_lp(lp: &LpInstance) -> LpOutcome {
    let n = lp.cost.len();
    // Column map: each free variable is split into u⁺ − u⁻.
    let mut split = Vec::with_capacity(n);
    let mut ncols = 0;
    for &nn in &lp.nonneg {
        split.push((ncols, if nn { None } else { Some(ncols + 1) }));
        ncols += if nn { 1 } else { 2 };
    }
    let n_slack = lp.rows.iter().filter(|r| r.kind == RowKind::Le).count();
    let m = lp.rows.len();
    let first_art = ncols + n_slack;
    let cols = first_art + m;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut slack = ncols;
    for (i, r) in lp.rows.iter().enumerate() {
        for (j, &a) in r.coeffs.iter().enumerate().take(n) {
            let (p, q) = split[j];
            t[i][p] = a;
            if let Some(q) = q {
                t[i][q] = -a;
            }
        }
        if r.kind == RowKind::Le {
            t[i][slack] = 1.0;
            slack += 1;
        }
        t[i][cols] = r.rhs;
        if r.rhs < 0.0 {
            for x in t[i].iter_mut() {
                *x = -*x;
            }
        }
        t[i][first_art + i] = 1.0;
    }
    let mut tab = Tableau {
        t,
        basis: (first_art..cols).collect(),
        cols,
    };
    let mut phase1 = vec![0.0; cols];
    for c in phase1.iter_mut().skip(first_art) {
        *c = 1.0;
    }
    tab.run(&phase1, &|_| true);
    let infeas: f64 = (0..m).filter(|&i| tab.basis[i] >= first_art).map(|i| tab.t[i][cols]).sum();
    let scale = 1.0 + lp.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
    if infeas > 1e-9 * scale {
        return LpOutcome::Infeasible;
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] >= first_art {
            if let Some(c) = (0..first_art).find(|&c| tab.t[i][c].abs() > PIVOT_TOL) {
                tab.pivot(i, c);
            }
        }
    }
    let mut cost = vec![0.0; cols];
    for (j, &cj) in lp.cost.iter().enumerate() {
        let (p, q) = split[j];
        cost[p] = cj;
        if let Some(q) = q {
            cost[q] = -cj;
        }
    }
    if !tab.run(&cost, &|j| j < first_art) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; cols];
    for i in 0..m {
        x[tab.basis[i]] = tab.t[i][cols];
    }
    let point: Vec<f64> = split
        .iter()
        .map(|&(p, q)| x[p] - q.map_or(0.0, |q| x[q]))
        .collect();
    let value = lp.cost.iter().zip(&point).map(|(c, u)| c * u).sum();
    LpOutcome::Optimal { value, point }
}
