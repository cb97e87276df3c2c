//! Exact rational linear programming.
//!
//! Everything downstream (Kantorovich distances, Chebyshev faces in the
//! probability simplex, Lipschitz polytopes) runs on this module: a
//! two-phase simplex over arbitrary-precision rationals, optimal-face
//! extraction, and polytope vertex enumeration. There is no floating
//! point anywhere; ties and face extractions are exact.

mod enumerate;
mod incremental;
mod simplex;

pub use incremental::CutPolytope;

use crate::rat::{dot, format_rational, Rat};
use num_traits::Zero;
use thiserror::Error;

/// Default cap on the number of candidate bases visited by
/// [`enumerate_vertices`].
pub const DEFAULT_BASIS_CAP: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("infeasible: the polytope is empty")]
    Infeasible,
    #[error("unbounded: no finite optimum / a recession direction exists")]
    Unbounded,
    #[error("{what} count {count} exceeds configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        count: usize,
        cap: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// One linear constraint `⟨coeffs, x⟩ ≤ rhs` (or `= rhs` when stored among
/// equalities).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Self { coeffs, rhs }
    }

    /// `⟨coeffs, x⟩`
    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.coeffs, x)
    }

    pub fn holds_le(&self, x: &[Rat]) -> bool {
        self.eval(x) <= self.rhs
    }

    pub fn holds_eq(&self, x: &[Rat]) -> bool {
        self.eval(x) == self.rhs
    }

    /// Canonical positive scaling: first nonzero coefficient becomes ±1.
    pub(crate) fn normalized(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(first) => {
                let scale = if *first < Rat::zero() {
                    -first.clone()
                } else {
                    first.clone()
                };
                Self {
                    coeffs: self.coeffs.iter().map(|c| c / &scale).collect(),
                    rhs: &self.rhs / &scale,
                }
            }
        }
    }
}

impl std::fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*x{}", format_rational(c), i))
            .collect();
        write!(f, "{} <= {}", terms.join(" + "), format_rational(&self.rhs))
    }
}

/// A polyhedron in half-space form: `{x : ⟨a,x⟩ ≤ b, ⟨e,x⟩ = f}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    pub dim: usize,
    pub inequalities: Vec<LinearConstraint>,
    pub equalities: Vec<LinearConstraint>,
}

impl HPolytope {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            inequalities: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn push_le(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        assert_eq!(coeffs.len(), self.dim, "constraint length mismatch");
        self.inequalities.push(LinearConstraint::new(coeffs, rhs));
    }

    pub fn push_eq(&mut self, coeffs: Vec<Rat>, rhs: Rat) {
        assert_eq!(coeffs.len(), self.dim, "constraint length mismatch");
        self.equalities.push(LinearConstraint::new(coeffs, rhs));
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.dim
            && self.inequalities.iter().all(|c| c.holds_le(x))
            && self.equalities.iter().all(|c| c.holds_eq(x))
    }

    /// Decides emptiness by a feasibility solve.
    pub fn is_empty(&self) -> bool {
        let zero_obj = vec![Rat::zero(); self.dim];
        matches!(
            solve_lp(&zero_obj, Sense::Minimize, self),
            Err(LpError::Infeasible)
        )
    }
}

/// A polytope in vertex form; vertices are deduplicated and sorted
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<Rat>>,
}

impl VPolytope {
    pub fn from_points(dim: usize, mut points: Vec<Vec<Rat>>) -> Self {
        points.sort();
        points.dedup();
        Self {
            dim,
            vertices: points,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: Rat,
    pub witness: Vec<Rat>,
}

/// Exact optimum of a linear objective over an H-polytope.
pub fn solve_lp(objective: &[Rat], sense: Sense, p: &HPolytope) -> Result<LpSolution, LpError> {
    simplex::solve(objective, sense, p)
}

/// The face of `p` on which the objective attains its optimum, returned as
/// `p` plus the equality `⟨objective, x⟩ = v*`.
pub fn optimal_face(objective: &[Rat], sense: Sense, p: &HPolytope) -> Result<HPolytope, LpError> {
    let sol = solve_lp(objective, sense, p)?;
    let mut face = p.clone();
    face.equalities
        .push(LinearConstraint::new(objective.to_vec(), sol.value));
    Ok(face)
}

/// All extreme points of a nonempty bounded H-polytope, by exhaustive
/// enumeration of candidate active-constraint bases.
pub fn enumerate_vertices(p: &HPolytope) -> Result<VPolytope, LpError> {
    enumerate::enumerate_vertices_capped(p, DEFAULT_BASIS_CAP)
}

/// Same as [`enumerate_vertices`] with an explicit basis-count cap.
pub fn enumerate_vertices_capped(p: &HPolytope, basis_cap: usize) -> Result<VPolytope, LpError> {
    enumerate::enumerate_vertices_capped(p, basis_cap)
}

/// Solves the square system `rows · x = rhs` exactly; `None` when singular.
pub(crate) fn solve_square(rows: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for c in col..=n {
            a[col][c] = &a[col][c] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..=n {
                    let delta = &factor * &a[col][c];
                    a[r][c] = &a[r][c] - &delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}
