//! Two-phase tableau simplex over exact rationals.
//!
//! Pipeline: equalities are eliminated by Gauss-Jordan substitution into a
//! reduced coordinate system, single-variable rows become bounds, bounded
//! variables are shifted to nonnegative ones, the rest are split, and the
//! resulting standard-form program is solved with Dantzig pricing falling
//! back to Bland's rule on long degenerate runs.

use super::{HPolytope, LpError, LpSolution, Sense};
use crate::rat::{dot, Rat};
use num_traits::Zero;

const DEGENERATE_STREAK_LIMIT: usize = 60;
const ITERATION_CAP: usize = 10_000_000;

/// Result of eliminating the equality system: the surviving variables and,
/// for each eliminated one, its affine expression over the survivors.
pub(crate) struct Reduction {
    pub dim: usize,
    pub free: Vec<usize>,
    subst: Vec<Option<(Rat, Vec<Rat>)>>,
}

impl Reduction {
    /// Reconstructs a full-dimensional point from reduced coordinates.
    pub fn lift(&self, y: &[Rat]) -> Vec<Rat> {
        debug_assert_eq!(y.len(), self.free.len());
        let mut x = vec![Rat::zero(); self.dim];
        for (k, &v) in self.free.iter().enumerate() {
            x[v] = y[k].clone();
        }
        for v in 0..self.dim {
            if let Some((c, row)) = &self.subst[v] {
                x[v] = c + dot(row, y);
            }
        }
        x
    }

    /// Rewrites `⟨coeffs, x⟩ (≤|=) rhs` over the surviving variables.
    pub fn reduce(&self, coeffs: &[Rat], rhs: &Rat) -> (Vec<Rat>, Rat) {
        let mut out: Vec<Rat> = self.free.iter().map(|&v| coeffs[v].clone()).collect();
        let mut b = rhs.clone();
        for (v, s) in self.subst.iter().enumerate() {
            if coeffs[v].is_zero() {
                continue;
            }
            if let Some((c, row)) = s {
                b -= &coeffs[v] * c;
                for (k, rk) in row.iter().enumerate() {
                    if !rk.is_zero() {
                        out[k] += &coeffs[v] * rk;
                    }
                }
            }
        }
        (out, b)
    }
}

/// Gauss-Jordan elimination of the equality system, preferring to eliminate
/// high-index variables so that low-index ones survive into the reduced
/// program.
pub(crate) fn eliminate_equalities(p: &HPolytope) -> Result<Reduction, LpError> {
    let dim = p.dim;
    let mut rows: Vec<Vec<Rat>> = p
        .equalities
        .iter()
        .map(|c| {
            let mut r = c.coeffs.clone();
            r.push(c.rhs.clone());
            r
        })
        .collect();
    let m = rows.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for col in (0..dim).rev() {
        let Some(pr) = (next_row..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, pr);
        let p0 = rows[next_row][col].clone();
        for c in 0..=dim {
            rows[next_row][c] = &rows[next_row][c] / &p0;
        }
        for r in 0..m {
            if r != next_row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in 0..=dim {
                    let delta = &f * &rows[next_row][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == m {
            break;
        }
    }
    for r in next_row..m {
        debug_assert!(rows[r][..dim].iter().all(|c| c.is_zero()));
        if !rows[r][dim].is_zero() {
            return Err(LpError::Infeasible);
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..dim).filter(|v| !pivot_cols.contains(v)).collect();
    let mut subst = vec![None; dim];
    for &(r, c) in &pivots {
        let expr: Vec<Rat> = free.iter().map(|&f| -rows[r][f].clone()).collect();
        subst[c] = Some((rows[r][dim].clone(), expr));
    }
    Ok(Reduction { dim, free, subst })
}

enum VarKind {
    Shifted { col: usize, lb: Rat },
    Mirrored { col: usize, ub: Rat },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    ncols: usize,
    art_start: usize,
    cost1: Vec<Rat>,
    cost2: Vec<Rat>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for c in 0..=self.ncols {
            self.rows[r][c] = &self.rows[r][c] / &p;
        }
        for k in 0..self.rows.len() {
            if k != r && !self.rows[k][e].is_zero() {
                let f = self.rows[k][e].clone();
                for c in 0..=self.ncols {
                    let delta = &f * &self.rows[r][c];
                    self.rows[k][c] = &self.rows[k][c] - &delta;
                }
            }
        }
        for cost in [&mut self.cost1, &mut self.cost2] {
            if !cost[e].is_zero() {
                let f = cost[e].clone();
                for c in 0..=self.ncols {
                    let delta = &f * &self.rows[r][c];
                    cost[c] = &cost[c] - &delta;
                }
            }
        }
        self.basis[r] = e;
    }

    /// Runs the simplex loop to optimality for the given phase.
    fn run(&mut self, phase1: bool) -> Result<(), LpError> {
        let entering_limit = self.art_start;
        let mut bland = false;
        let mut degenerate_streak = 0usize;
        for _ in 0..ITERATION_CAP {
            let cost = if phase1 { &self.cost1 } else { &self.cost2 };
            let entering = if bland {
                (0..entering_limit).find(|&j| cost[j] < Rat::zero())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..entering_limit {
                    if cost[j] < Rat::zero() && best.map_or(true, |b| cost[j] < cost[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][e] > Rat::zero() {
                    let ratio = &self.rows[r][self.ncols] / &self.rows[r][e];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                if phase1 {
                    unreachable!("phase-1 objective is bounded below by zero");
                }
                return Err(LpError::Unbounded);
            };
            if ratio.is_zero() {
                degenerate_streak += 1;
                if degenerate_streak > DEGENERATE_STREAK_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
                bland = false;
            }
            self.pivot(r, e);
        }
        panic!("simplex exceeded iteration cap; this is a bug");
    }

    fn objective1(&self) -> Rat {
        -self.cost1[self.ncols].clone()
    }
}

pub(crate) fn solve(objective: &[Rat], sense: Sense, p: &HPolytope) -> Result<LpSolution, LpError> {
    if objective.len() != p.dim {
        return Err(LpError::DimensionMismatch {
            expected: p.dim,
            got: objective.len(),
        });
    }
    for c in p.inequalities.iter().chain(&p.equalities) {
        if c.coeffs.len() != p.dim {
            return Err(LpError::DimensionMismatch {
                expected: p.dim,
                got: c.coeffs.len(),
            });
        }
    }

    let minimize: Vec<Rat> = match sense {
        Sense::Minimize => objective.to_vec(),
        Sense::Maximize => objective.iter().map(|c| -c.clone()).collect(),
    };

    let red = eliminate_equalities(p)?;
    let k = red.free.len();

    // Reduced inequalities; constant rows are decided on the spot.
    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for c in &p.inequalities {
        let (coeffs, rhs) = red.reduce(&c.coeffs, &c.rhs);
        if coeffs.iter().all(|x| x.is_zero()) {
            if rhs < Rat::zero() {
                return Err(LpError::Infeasible);
            }
        } else {
            rows.push((coeffs, rhs));
        }
    }
    let (obj_coeffs, neg_shift) = red.reduce(&minimize, &Rat::zero());

    if k == 0 {
        let x = red.lift(&[]);
        if !p.contains(&x) {
            return Err(LpError::Infeasible);
        }
        return Ok(LpSolution {
            value: dot(objective, &x),
            witness: x,
        });
    }
    let _ = neg_shift;

    // Single-variable rows become bounds.
    let mut lower: Vec<Option<Rat>> = vec![None; k];
    let mut upper: Vec<Option<Rat>> = vec![None; k];
    let mut general: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (coeffs, rhs) in rows {
        let nz: Vec<usize> = (0..k).filter(|&j| !coeffs[j].is_zero()).collect();
        if nz.len() == 1 {
            let j = nz[0];
            let bound = &rhs / &coeffs[j];
            if coeffs[j] > Rat::zero() {
                if upper[j].as_ref().map_or(true, |u| bound < *u) {
                    upper[j] = Some(bound);
                }
            } else if lower[j].as_ref().map_or(true, |l| bound > *l) {
                lower[j] = Some(bound);
            }
        } else {
            general.push((coeffs, rhs));
        }
    }
    for j in 0..k {
        if let (Some(l), Some(u)) = (&lower[j], &upper[j]) {
            if l > u {
                return Err(LpError::Infeasible);
            }
        }
    }

    // Variable transform to nonnegative tableau variables.
    let mut kinds: Vec<VarKind> = Vec::with_capacity(k);
    let mut ncols = 0usize;
    for j in 0..k {
        match (&lower[j], &upper[j]) {
            (Some(l), _) => {
                kinds.push(VarKind::Shifted {
                    col: ncols,
                    lb: l.clone(),
                });
                ncols += 1;
            }
            (None, Some(u)) => {
                kinds.push(VarKind::Mirrored {
                    col: ncols,
                    ub: u.clone(),
                });
                ncols += 1;
            }
            (None, None) => {
                kinds.push(VarKind::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let n_y = ncols;

    let transform_row = |coeffs: &[Rat], rhs: &Rat| -> (Vec<Rat>, Rat) {
        let mut out = vec![Rat::zero(); n_y];
        let mut b = rhs.clone();
        for j in 0..k {
            if coeffs[j].is_zero() {
                continue;
            }
            match &kinds[j] {
                VarKind::Shifted { col, lb } => {
                    b -= &coeffs[j] * lb;
                    out[*col] = coeffs[j].clone();
                }
                VarKind::Mirrored { col, ub } => {
                    b -= &coeffs[j] * ub;
                    out[*col] = -coeffs[j].clone();
                }
                VarKind::Split { pos, neg } => {
                    out[*pos] = coeffs[j].clone();
                    out[*neg] = -coeffs[j].clone();
                }
            }
        }
        (out, b)
    };

    let mut std_rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for (coeffs, rhs) in &general {
        std_rows.push(transform_row(coeffs, rhs));
    }
    // Residual upper bounds for shifted variables.
    for j in 0..k {
        if let (VarKind::Shifted { col, lb }, Some(u)) = (&kinds[j], &upper[j]) {
            let mut coeffs = vec![Rat::zero(); n_y];
            coeffs[*col] = Rat::from_integer(1.into());
            std_rows.push((coeffs, u - lb));
        }
    }
    let (obj_y, _) = transform_row(&obj_coeffs, &Rat::zero());

    // Tableau assembly: slacks per row, artificials where the slack cannot
    // serve as the starting basis.
    let m = std_rows.len();
    let mut art_cols = 0usize;
    let needs_art: Vec<bool> = std_rows.iter().map(|(_, b)| *b < Rat::zero()).collect();
    for flag in &needs_art {
        if *flag {
            art_cols += 1;
        }
    }
    let total = n_y + m + art_cols;
    let mut rows_mat: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_index = n_y + m;
    for (i, (coeffs, b)) in std_rows.into_iter().enumerate() {
        let mut row = vec![Rat::zero(); total + 1];
        let flip = needs_art[i];
        for (j, c) in coeffs.into_iter().enumerate() {
            row[j] = if flip { -c } else { c };
        }
        row[n_y + i] = if flip {
            -Rat::from_integer(1.into())
        } else {
            Rat::from_integer(1.into())
        };
        row[total] = if flip { -b } else { b };
        if flip {
            row[art_index] = Rat::from_integer(1.into());
            basis.push(art_index);
            art_index += 1;
        } else {
            basis.push(n_y + i);
        }
        rows_mat.push(row);
    }

    let mut cost1 = vec![Rat::zero(); total + 1];
    for j in n_y + m..total {
        cost1[j] = Rat::from_integer(1.into());
    }
    for (r, row) in rows_mat.iter().enumerate() {
        if basis[r] >= n_y + m {
            for c in 0..=total {
                let delta = row[c].clone();
                cost1[c] = &cost1[c] - &delta;
            }
        }
    }
    let mut cost2 = vec![Rat::zero(); total + 1];
    for (j, c) in obj_y.iter().enumerate() {
        cost2[j] = c.clone();
    }

    let mut tab = Tableau {
        rows: rows_mat,
        basis,
        ncols: total,
        art_start: n_y + m,
        cost1,
        cost2,
    };

    if art_cols > 0 {
        tab.run(true)?;
        if !tab.objective1().is_zero() {
            return Err(LpError::Infeasible);
        }
        // Drive leftover artificial basics out on any real column.
        for r in 0..tab.rows.len() {
            if tab.basis[r] >= tab.art_start {
                if let Some(e) = (0..tab.art_start).find(|&j| !tab.rows[r][j].is_zero()) {
                    tab.pivot(r, e);
                }
            }
        }
    }
    tab.run(false)?;

    let mut y = vec![Rat::zero(); n_y];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n_y {
            y[b] = tab.rows[r][tab.ncols].clone();
        }
    }
    let reduced_x: Vec<Rat> = kinds
        .iter()
        .map(|kind| match kind {
            VarKind::Shifted { col, lb } => lb + &y[*col],
            VarKind::Mirrored { col, ub } => ub - &y[*col],
            VarKind::Split { pos, neg } => &y[*pos] - &y[*neg],
        })
        .collect();
    let x = red.lift(&reduced_x);
    assert!(p.contains(&x), "simplex produced an infeasible witness");
    Ok(LpSolution {
        value: dot(objective, &x),
        witness: x,
    })
}
