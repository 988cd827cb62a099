//! Exact two-phase simplex over the rationals with Bland's anti-cycling rule.
//!
//! Problems in this crate have a handful of variables (barycentric weights of a
//! region, cone multipliers), so a dense tableau is adequate.

use num_traits::{One, Signed, Zero};

use crate::rational::{dot, zeros, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub rel: Relation,
    pub rhs: Q,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    nonneg: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl LinearProgram {
    /// `n` variables; `nonneg[i]` marks `x_i >= 0`, the rest are free.
    pub fn new(nonneg: Vec<bool>) -> Self {
        let n = nonneg.len();
        LinearProgram {
            nonneg,
            constraints: Vec::new(),
            objective: zeros(n),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.nonneg.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<Q>, rel: Relation, rhs: Q) -> &mut Self {
        assert_eq!(coeffs.len(), self.num_vars());
        self.constraints.push(Constraint { coeffs, rel, rhs });
        self
    }

    /// Maximized objective.
    pub fn maximize(&mut self, objective: Vec<Q>) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars());
        self.objective = objective;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        // column map: each free variable becomes (plus, minus)
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::new();
        let mut ncols = 0;
        for &nn in &self.nonneg {
            if nn {
                col_of.push((ncols, None));
                ncols += 1;
            } else {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
        let structural = ncols;
        let m = self.constraints.len();

        // normalized rows with nonnegative rhs
        let mut rows: Vec<(Vec<Q>, Relation, Q)> = Vec::with_capacity(m);
        for c in &self.constraints {
            let mut a = zeros(structural);
            for (j, v) in c.coeffs.iter().enumerate() {
                let (p, neg) = col_of[j];
                a[p] = v.clone();
                if let Some(nc) = neg {
                    a[nc] = -v.clone();
                }
            }
            let (a, rel, b) = if c.rhs.is_negative() {
                let flipped = match c.rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (a.into_iter().map(|x| -x).collect(), flipped, -c.rhs.clone())
            } else {
                (a, c.rel, c.rhs.clone())
            };
            rows.push((a, rel, b));
        }

        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let total = structural + n_slack + n_art;
        let art_start = structural + n_slack;

        let mut t = Tableau {
            a: vec![zeros(total); m],
            b: zeros(m),
            basis: vec![0; m],
            allowed: vec![true; total],
        };
        let (mut s, mut art) = (structural, art_start);
        for (i, (a, rel, b)) in rows.into_iter().enumerate() {
            t.a[i][..structural].clone_from_slice(&a);
            t.b[i] = b;
            match rel {
                Relation::Le => {
                    t.a[i][s] = Q::one();
                    t.basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    t.a[i][s] = -Q::one();
                    s += 1;
                    t.a[i][art] = Q::one();
                    t.basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t.a[i][art] = Q::one();
                    t.basis[i] = art;
                    art += 1;
                }
            }
        }

        if n_art > 0 {
            let mut cost = zeros(total);
            for c in cost.iter_mut().skip(art_start) {
                *c = -Q::one();
            }
            // phase one is bounded above by zero
            t.run(&cost);
            let value = t.objective_value(&cost);
            if value.is_negative() {
                return LpOutcome::Infeasible;
            }
            t.drive_out_artificials(art_start);
            for j in art_start..total {
                t.allowed[j] = false;
            }
        }

        let mut cost = zeros(total);
        for (j, v) in self.objective.iter().enumerate() {
            let (p, neg) = col_of[j];
            cost[p] = v.clone();
            if let Some(nc) = neg {
                cost[nc] = -v.clone();
            }
        }
        if !t.run(&cost) {
            return LpOutcome::Unbounded;
        }
        let mut full = zeros(total);
        for (i, &bv) in t.basis.iter().enumerate() {
            full[bv] = t.b[i].clone();
        }
        let x: Vec<Q> = col_of
            .iter()
            .map(|&(p, neg)| match neg {
                None => full[p].clone(),
                Some(nc) => &full[p] - &full[nc],
            })
            .collect();
        let value = dot(&self.objective, &x);
        LpOutcome::Optimal { x, value }
    }
}

struct Tableau {
    a: Vec<Vec<Q>>,
    b: Vec<Q>,
    basis: Vec<usize>,
    allowed: Vec<bool>,
}

impl Tableau {
    fn objective_value(&self, cost: &[Q]) -> Q {
        self.basis
            .iter()
            .zip(&self.b)
            .fold(Q::zero(), |acc, (&bv, b)| acc + &cost[bv] * b)
    }

    fn reduced_cost(&self, cost: &[Q], j: usize) -> Q {
        let mut r = cost[j].clone();
        for (i, &bv) in self.basis.iter().enumerate() {
            if !cost[bv].is_zero() && !self.a[i][j].is_zero() {
                r -= &cost[bv] * &self.a[i][j];
            }
        }
        r
    }

    /// Maximizes; returns false when unbounded.
    fn run(&mut self, cost: &[Q]) -> bool {
        let ncols = cost.len();
        loop {
            let entering = (0..ncols).find(|&j| {
                self.allowed[j] && !self.basis.contains(&j) && self.reduced_cost(cost, j).is_positive()
            });
            let Some(e) = entering else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.a.len() {
                if self.a[i][e].is_positive() {
                    let ratio = &self.b[i] / &self.a[i][e];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((leave, _)) = best else {
                return false;
            };
            self.pivot(leave, e);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.a[row][col].recip();
        for v in self.a[row].iter_mut() {
            *v *= &inv;
        }
        self.b[row] *= &inv;
        let prow = self.a[row].clone();
        let pb = self.b[row].clone();
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let f = self.a[i][col].clone();
            for (v, p) in self.a[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            self.b[i] -= &f * &pb;
        }
        self.basis[row] = col;
    }

    fn drive_out_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= art_start {
                match (0..art_start).find(|&j| !self.a[i][j].is_zero()) {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        // redundant equality
                        self.a.remove(i);
                        self.b.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }
}

/// Maximal uniform margin `t <= 1` such that a point satisfying the hard
/// constraints also satisfies each strict row with slack at least `t`.
/// Strict rows are given as `coeffs . x > rhs`. Returns the optimal point and
/// margin, or `None` when even the closed system is infeasible.
pub fn max_margin(
    nonneg: Vec<bool>,
    hard: &[Constraint],
    strict_gt: &[(Vec<Q>, Q)],
) -> Option<(Vec<Q>, Q)> {
    let n = nonneg.len();
    let mut flags = nonneg;
    flags.push(false);
    let mut lp = LinearProgram::new(flags);
    for c in hard {
        let mut a = c.coeffs.clone();
        a.push(Q::zero());
        lp.constrain(a, c.rel, c.rhs.clone());
    }
    for (a, rhs) in strict_gt {
        // a.x - t >= rhs
        let mut row = a.clone();
        row.push(-Q::one());
        lp.constrain(row, Relation::Ge, rhs.clone());
    }
    let mut cap = zeros(n + 1);
    cap[n] = Q::one();
    lp.constrain(cap.clone(), Relation::Le, Q::one());
    lp.maximize(cap);
    match lp.solve() {
        LpOutcome::Optimal { mut x, .. } => {
            let t = x.pop().expect("margin variable");
            Some((x, t))
        }
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("margin is capped"),
    }
}
