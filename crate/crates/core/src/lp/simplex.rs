//! Dense two-phase tableau simplex over exact rationals. Entering columns
//! follow Dantzig's rule until a run of degenerate pivots, then Bland's rule
//! for the rest of the phase, which rules out cycling.
//!
//! Every free variable `x_k` is split as `x_k⁺ − x_k⁻`; each inequality row
//! gets a slack and every row gets an artificial so that phase-one
//! multipliers (a Farkas certificate) can be read off the final tableau.

use num::{One, Signed, Zero};

use super::{LinConstraint, Relation};
use crate::rational::Rational;

pub(crate) enum SimplexResult {
    Optimal {
        point: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        direction: Vec<Rational>,
    },
    /// One multiplier per constraint, `λ_i ≥ 0` on `≥` rows, `≤ 0` on `≤`
    /// rows, with `Σ λ_i a_i = 0` and `Σ λ_i b_i > 0`.
    Infeasible {
        farkas: Vec<Rational>,
    },
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 32;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the current objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

enum PivotOutcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let support: Vec<usize> = (0..=self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Minimizes over columns `< allowed`.
    fn run(&mut self, allowed: usize) -> PivotOutcome {
        let mut degenerate = 0;
        loop {
            let entering = if degenerate < DEGENERATE_LIMIT {
                (0..allowed)
                    .filter(|&j| self.cost[j].is_negative())
                    .min_by(|&a, &b| self.cost[a].cmp(&self.cost[b]).then(a.cmp(&b)))
            } else {
                (0..allowed).find(|&j| self.cost[j].is_negative())
            };
            let Some(c) = entering else {
                return PivotOutcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, ratio)) => {
                    if ratio.is_zero() {
                        degenerate += 1;
                    } else if degenerate < DEGENERATE_LIMIT {
                        degenerate = 0;
                    }
                    self.pivot(r, c)
                }
                None => return PivotOutcome::Unbounded(c),
            }
        }
    }

    fn set_cost(&mut self, c: &[Rational]) {
        let mut cost: Vec<Rational> = c.to_vec();
        cost.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[r].iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= cb * v;
                }
            }
        }
        self.cost = cost;
    }

    fn values(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.width];
        for (r, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(r).clone();
        }
        z
    }
}

/// Minimizes `objective · x` (or just finds a feasible point when `None`).
pub(crate) fn minimize(dim: usize, constraints: &[LinConstraint], objective: Option<&[Rational]>) -> SimplexResult {
    let m = constraints.len();
    let n_slack = constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let structural = 2 * dim + n_slack;
    let width = structural + m;

    let mut rows = Vec::with_capacity(m);
    let mut flipped = Vec::with_capacity(m);
    let mut slack = 2 * dim;
    for (i, con) in constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        for (k, a) in con.coeffs.iter().enumerate() {
            if !a.is_zero() {
                row[k] = a.clone();
                row[dim + k] = -a;
            }
        }
        match con.relation {
            Relation::Ge => {
                row[slack] = -Rational::one();
                slack += 1;
            }
            Relation::Le => {
                row[slack] = Rational::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[width] = con.rhs.clone();
        let flip = con.rhs.is_negative();
        if flip {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = -&*v;
                }
            }
        }
        row[structural + i] = Rational::one();
        flipped.push(flip);
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        cost: Vec::new(),
        basis: (structural..width).collect(),
        width,
    };
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1.iter_mut().skip(structural) {
        *c = Rational::one();
    }
    tab.set_cost(&phase1);
    match tab.run(width) {
        PivotOutcome::Optimal => {}
        PivotOutcome::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
    }

    if tab.cost[width].is_negative() {
        // π_i = 1 − r_{art_i}, then undo the row flips
        let farkas = (0..m)
            .map(|i| {
                let pi = Rational::one() - &tab.cost[structural + i];
                if flipped[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect();
        return SimplexResult::Infeasible { farkas };
    }

    // drive zero-valued artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= structural {
            match (0..structural).find(|&j| !tab.rows[r][j].is_zero()) {
                Some(c) => tab.pivot(r, c),
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut cost = vec![Rational::zero(); width];
    if let Some(obj) = objective {
        for (k, c) in obj.iter().enumerate() {
            cost[k] = c.clone();
            cost[dim + k] = -c;
        }
    }
    tab.set_cost(&cost);
    let outcome = tab.run(structural);
    let z = tab.values();
    let point: Vec<Rational> = (0..dim).map(|k| &z[k] - &z[dim + k]).collect();
    match outcome {
        PivotOutcome::Optimal => SimplexResult::Optimal { point },
        PivotOutcome::Unbounded(c) => {
            let mut dz = vec![Rational::zero(); width];
            dz[c] = Rational::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                dz[b] = -&tab.rows[r][c];
            }
            let direction = (0..dim).map(|k| &dz[k] - &dz[dim + k]).collect();
            SimplexResult::Unbounded { point, direction }
        }
    }
}

/// A vertex of `{λ ≥ 0 : Σ λ_i a_i = 0, Σ λ_i b_i = 1}` for the rows
/// `a_i · x ≥ b_i`, or `None` when that set is empty (the rows are
/// feasible). Its support is an irreducible infeasible subsystem of at most
/// `dim + 1` rows.
pub(crate) fn vertex_farkas(dim: usize, rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    let m = rows.len();
    let height = dim + 1;
    let width = m + height;
    let mut table = vec![vec![Rational::zero(); width + 1]; height];
    for (i, (a, b)) in rows.iter().enumerate() {
        for (k, v) in a.iter().enumerate() {
            table[k][i] = v.clone();
        }
        table[dim][i] = b.clone();
    }
    table[dim][width] = Rational::one();
    for (r, row) in table.iter_mut().enumerate() {
        row[m + r] = Rational::one();
    }
    let mut tab = Tableau {
        rows: table,
        cost: Vec::new(),
        basis: (m..width).collect(),
        width,
    };
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1.iter_mut().skip(m) {
        *c = Rational::one();
    }
    tab.set_cost(&phase1);
    match tab.run(width) {
        PivotOutcome::Optimal => {}
        PivotOutcome::Unbounded(_) => unreachable!("phase one is bounded below by zero"),
    }
    if tab.cost[width].is_negative() {
        return None;
    }
    let mut lambda = tab.values();
    lambda.truncate(m);
    Some(lambda)
}
