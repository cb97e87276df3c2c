//! Incremental halfspace cutting with an exactly maintained vertex set.
//!
//! Starting from a polytope whose vertices are known (a standard simplex, a
//! box, or a previously computed face), each added halfspace updates the
//! vertex set: surviving vertices are kept and every edge crossing the cut
//! hyperplane contributes its intersection point. Edges are recognized by
//! the combinatorial test: two vertices are adjacent iff no other vertex is
//! tight on all constraints the pair has in common. This stays exact in
//! rational arithmetic and scales to cut counts where exhaustive basis
//! enumeration does not.

use super::{HPolytope, LinearConstraint, LpError, VPolytope};
use crate::rat::{dot, Rat};
use num_traits::{One, Zero};

#[derive(Debug, Clone)]
pub struct CutPolytope {
    dim: usize,
    equalities: Vec<LinearConstraint>,
    inequalities: Vec<LinearConstraint>,
    vertices: Vec<Vec<Rat>>,
}

impl CutPolytope {
    /// The standard probability simplex `{x ≥ 0, Σx = 1}` with the unit
    /// vectors as vertices.
    pub fn standard_simplex(n: usize) -> Self {
        assert!(n >= 1);
        let mut inequalities = Vec::with_capacity(n);
        for i in 0..n {
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[i] = -Rat::one();
            inequalities.push(LinearConstraint::new(coeffs, Rat::zero()));
        }
        let equalities = vec![LinearConstraint::new(vec![Rat::one(); n], Rat::one())];
        let vertices = (0..n)
            .map(|i| {
                let mut v = vec![Rat::zero(); n];
                v[i] = Rat::one();
                v
            })
            .collect();
        let mut out = Self {
            dim: n,
            equalities,
            inequalities,
            vertices,
        };
        out.sort_vertices();
        out
    }

    /// The box `lows ≤ x ≤ highs` with its `2^dim` corners.
    pub fn bounding_box(lows: &[Rat], highs: &[Rat]) -> Self {
        let dim = lows.len();
        assert_eq!(dim, highs.len());
        assert!(lows.iter().zip(highs).all(|(l, h)| l <= h));
        let mut inequalities = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut up = vec![Rat::zero(); dim];
            up[i] = Rat::one();
            inequalities.push(LinearConstraint::new(up, highs[i].clone()));
            let mut down = vec![Rat::zero(); dim];
            down[i] = -Rat::one();
            inequalities.push(LinearConstraint::new(down, -lows[i].clone()));
        }
        let mut vertices = vec![vec![]];
        for i in 0..dim {
            let mut next = Vec::with_capacity(vertices.len() * 2);
            for v in &vertices {
                let mut a = v.clone();
                a.push(lows[i].clone());
                next.push(a);
                if highs[i] != lows[i] {
                    let mut b = v.clone();
                    b.push(highs[i].clone());
                    next.push(b);
                }
            }
            vertices = next;
        }
        let mut out = Self {
            dim,
            equalities: Vec::new(),
            inequalities,
            vertices,
        };
        out.sort_vertices();
        out
    }

    /// Rebuilds the cutting state from a face and its (trusted) exact
    /// vertex set.
    pub fn from_parts(face: &HPolytope, vertices: &VPolytope) -> Self {
        assert_eq!(face.dim, vertices.dim);
        assert!(!vertices.vertices.is_empty());
        Self {
            dim: face.dim,
            equalities: face.equalities.clone(),
            inequalities: face.inequalities.clone(),
            vertices: vertices.vertices.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn hpolytope(&self) -> HPolytope {
        HPolytope {
            dim: self.dim,
            inequalities: self.inequalities.clone(),
            equalities: self.equalities.clone(),
        }
    }

    pub fn vpolytope(&self) -> VPolytope {
        VPolytope {
            dim: self.dim,
            vertices: self.vertices.clone(),
        }
    }

    /// Intersects with `⟨coeffs, x⟩ ≤ rhs`, updating the vertex set.
    /// Globally redundant cuts are dropped from the stored description;
    /// cutting the polytope to emptiness is an error.
    pub fn cut(&mut self, constraint: LinearConstraint) -> Result<(), LpError> {
        assert_eq!(constraint.coeffs.len(), self.dim);
        let c = constraint.normalized();
        if self.inequalities.contains(&c) {
            return Ok(());
        }
        let evals: Vec<Rat> = self
            .vertices
            .iter()
            .map(|v| &c.rhs - dot(&c.coeffs, v))
            .collect();
        let mut pos = Vec::new();
        let mut zero = Vec::new();
        let mut neg = Vec::new();
        for (i, e) in evals.iter().enumerate() {
            if e.is_zero() {
                zero.push(i);
            } else if *e > Rat::zero() {
                pos.push(i);
            } else {
                neg.push(i);
            }
        }
        if neg.is_empty() {
            if !zero.is_empty() {
                self.inequalities.push(c);
            }
            return Ok(());
        }
        if pos.is_empty() && zero.is_empty() {
            return Err(LpError::Infeasible);
        }

        let active: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|v| {
                self.inequalities
                    .iter()
                    .enumerate()
                    .filter(|(_, ineq)| ineq.eval(v) == ineq.rhs)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();

        let mut new_points: Vec<Vec<Rat>> = Vec::new();
        for &u in &pos {
            for &w in &neg {
                let common = intersect_sorted(&active[u], &active[w]);
                let adjacent = (0..self.vertices.len())
                    .all(|x| x == u || x == w || !contains_sorted(&active[x], &common));
                if !adjacent {
                    continue;
                }
                // evals[u] > 0 > evals[w]; the crossing point sits at
                // t = e_u / (e_u - e_w) along the edge u -> w.
                let t = &evals[u] / (&evals[u] - &evals[w]);
                let point: Vec<Rat> = self.vertices[u]
                    .iter()
                    .zip(&self.vertices[w])
                    .map(|(a, b)| a + &t * &(b - a))
                    .collect();
                new_points.push(point);
            }
        }

        let mut kept: Vec<Vec<Rat>> = pos
            .iter()
            .chain(&zero)
            .map(|&i| self.vertices[i].clone())
            .collect();
        kept.append(&mut new_points);
        kept.sort();
        kept.dedup();
        self.vertices = kept;
        self.inequalities.push(c);
        Ok(())
    }

    fn sort_vertices(&mut self) {
        self.vertices.sort();
        self.vertices.dedup();
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn contains_sorted(superset: &[usize], subset: &[usize]) -> bool {
    let mut i = 0;
    for &s in subset {
        loop {
            if i >= superset.len() {
                return false;
            }
            match superset[i].cmp(&s) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Equal => {
                    i += 1;
                    break;
                }
                std::cmp::Ordering::Greater => return false,
            }
        }
    }
    true
}
