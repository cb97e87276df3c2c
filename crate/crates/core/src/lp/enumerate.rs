//! Vertex enumeration by exhaustive basis enumeration: every choice of
//! `dim` active inequalities is solved as a square system and kept when it
//! is feasible. Adequate at desk scale; the candidate count is capped.

use super::simplex::eliminate_equalities;
use super::{solve_lp, solve_square, HPolytope, LinearConstraint, LpError, Sense, VPolytope};
use crate::rat::Rat;
use num_traits::{One, Zero};

pub(crate) fn enumerate_vertices_capped(
    p: &HPolytope,
    basis_cap: usize,
) -> Result<VPolytope, LpError> {
    // Boundedness (and nonemptiness) probe along every coordinate.
    for i in 0..p.dim {
        let mut obj = vec![Rat::zero(); p.dim];
        obj[i] = Rat::one();
        solve_lp(&obj, Sense::Minimize, p)?;
        solve_lp(&obj, Sense::Maximize, p)?;
    }
    if p.dim == 0 {
        return Ok(VPolytope::from_points(0, vec![vec![]]));
    }

    let red = eliminate_equalities(p)?;
    let k = red.free.len();

    let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::new();
    for c in &p.inequalities {
        let (coeffs, rhs) = red.reduce(&c.coeffs, &c.rhs);
        if coeffs.iter().all(|x| x.is_zero()) {
            if rhs < Rat::zero() {
                return Err(LpError::Infeasible);
            }
        } else {
            let norm = LinearConstraint::new(coeffs, rhs).normalized();
            if !rows.contains(&(norm.coeffs.clone(), norm.rhs.clone())) {
                rows.push((norm.coeffs, norm.rhs));
            }
        }
    }

    if k == 0 {
        let x = red.lift(&[]);
        return Ok(VPolytope::from_points(p.dim, vec![x]));
    }

    let m = rows.len();
    if m < k {
        return Err(LpError::Unbounded);
    }
    let candidates = binomial(m, k);
    if candidates > basis_cap as u128 {
        return Err(LpError::CapExceeded {
            what: "candidate bases",
            count: candidates.min(usize::MAX as u128) as usize,
            cap: basis_cap,
        });
    }

    let mut points: Vec<Vec<Rat>> = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let sys: Vec<Vec<Rat>> = combo.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs: Vec<Rat> = combo.iter().map(|&i| rows[i].1.clone()).collect();
        if let Some(y) = solve_square(&sys, &rhs) {
            let feasible = rows
                .iter()
                .all(|(a, b)| crate::rat::dot(a, &y) <= *b);
            if feasible {
                points.push(red.lift(&y));
            }
        }
        if !next_combination(&mut combo, m, k) {
            break;
        }
    }
    Ok(VPolytope::from_points(p.dim, points))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
        if out > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    out
}

fn next_combination(combo: &mut [usize], n: usize, k: usize) -> bool {
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] != i + n - k {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
