//! Probability measures on a finite metric space and the Kantorovich
//! metric, certified on both sides: an optimal coupling (primal) and an
//! optimal 1-Lipschitz potential (dual). The two optima must agree
//! exactly; a nonzero gap is a bug, not a tolerance question.

use crate::lp::{
    self, CutPolytope, HPolytope, LinearConstraint, LpError, Sense, VPolytope,
};
use crate::metric::FiniteMetricSpace;
use crate::rat::{dot, Rat};
use num_traits::{One, Zero};
use thiserror::Error;

/// Default cap on the number of Lipschitz-polytope vertices.
pub const DEFAULT_LIPSCHITZ_VERTEX_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("measure has {got} weights but the space has {expected} points")]
    SpaceMismatch { expected: usize, got: usize },
    #[error("weights are not a probability vector: {0}")]
    InvalidMeasure(String),
    #[error("index map entry {value} out of range {range}")]
    BadIndexMap { value: usize, range: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// An exact rational probability vector over the points of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    weights: Vec<Rat>,
}

impl Measure {
    pub fn new(weights: Vec<Rat>) -> Result<Self, TransportError> {
        if weights.iter().any(|w| *w < Rat::zero()) {
            return Err(TransportError::InvalidMeasure(
                "negative weight".to_string(),
            ));
        }
        let total: Rat = weights.iter().sum();
        if !total.is_one() {
            return Err(TransportError::InvalidMeasure(format!(
                "weights sum to {}, expected 1",
                crate::rat::format_rational(&total)
            )));
        }
        Ok(Self { weights })
    }

    /// The point mass at `x`.
    pub fn dirac(n: usize, x: usize) -> Self {
        assert!(x < n);
        let mut weights = vec![Rat::zero(); n];
        weights[x] = Rat::one();
        Self { weights }
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            weights: vec![crate::rat::rat(1, n as i64); n],
        }
    }

    pub(crate) fn from_weights_unchecked(weights: Vec<Rat>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Transport plan between two measures: nonnegative entries with the two
/// measures as marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    pub matrix: Vec<Vec<Rat>>,
}

impl Coupling {
    pub fn cost(&self, space: &FiniteMetricSpace) -> Rat {
        let mut total = Rat::zero();
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    total += v * space.dist(i, j);
                }
            }
        }
        total
    }

    pub fn row_sums(&self) -> Vec<Rat> {
        self.matrix.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<Rat> {
        let n = self.matrix.len();
        (0..n)
            .map(|j| self.matrix.iter().map(|r| r[j].clone()).sum())
            .collect()
    }
}

/// A 1-Lipschitz function on the space, normalized to vanish at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzPotential {
    pub values: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub struct KantorovichResult {
    pub value: Rat,
    pub plan: Coupling,
    pub potential: LipschitzPotential,
}

/// The Kantorovich distance between two measures on the same space, with
/// both certificates. Solves the transportation LP for the plan and the
/// dual LP over the Lipschitz polytope for the potential, and insists on a
/// zero duality gap.
pub fn kantorovich(
    space: &FiniteMetricSpace,
    mu: &Measure,
    nu: &Measure,
) -> Result<KantorovichResult, TransportError> {
    let n = space.len();
    check_len(n, mu)?;
    check_len(n, nu)?;

    // Primal: min Σ d_ij γ_ij over couplings of (mu, nu).
    let vars = n * n;
    let mut primal = HPolytope::new(vars);
    for i in 0..n {
        for j in 0..n {
            let mut c = vec![Rat::zero(); vars];
            c[i * n + j] = -Rat::one();
            primal.push_le(c, Rat::zero());
        }
    }
    for i in 0..n {
        let mut c = vec![Rat::zero(); vars];
        for j in 0..n {
            c[i * n + j] = Rat::one();
        }
        primal.push_eq(c, mu.weights[i].clone());
    }
    for j in 0..n {
        let mut c = vec![Rat::zero(); vars];
        for i in 0..n {
            c[i * n + j] = Rat::one();
        }
        primal.push_eq(c, nu.weights[j].clone());
    }
    let mut objective = vec![Rat::zero(); vars];
    for i in 0..n {
        for j in 0..n {
            objective[i * n + j] = space.dist(i, j).clone();
        }
    }
    let primal_sol = lp::solve_lp(&objective, Sense::Minimize, &primal)?;
    let plan = Coupling {
        matrix: (0..n)
            .map(|i| primal_sol.witness[i * n..(i + 1) * n].to_vec())
            .collect(),
    };

    // Dual: max ⟨f, mu - nu⟩ over the Lipschitz polytope.
    let dual_p = lipschitz_polytope(space);
    let diff: Vec<Rat> = mu
        .weights
        .iter()
        .zip(&nu.weights)
        .map(|(a, b)| a - b)
        .collect();
    let dual_sol = lp::solve_lp(&diff, Sense::Maximize, &dual_p)?;

    assert_eq!(
        primal_sol.value, dual_sol.value,
        "duality gap in the transportation problem; this is a bug"
    );

    Ok(KantorovichResult {
        value: primal_sol.value,
        plan,
        potential: LipschitzPotential {
            values: dual_sol.witness,
        },
    })
}

/// Just the Kantorovich distance, certificates discarded.
pub fn kantorovich_distance(
    space: &FiniteMetricSpace,
    mu: &Measure,
    nu: &Measure,
) -> Result<Rat, TransportError> {
    Ok(kantorovich(space, mu, nu)?.value)
}

/// Transport of a measure under an index map:
/// `weights'[j] = Σ_{map(i) = j} weights[i]`.
pub fn pushforward(
    mu: &Measure,
    map: &[usize],
    target_size: usize,
) -> Result<Measure, TransportError> {
    if map.len() != mu.len() {
        return Err(TransportError::SpaceMismatch {
            expected: mu.len(),
            got: map.len(),
        });
    }
    let mut weights = vec![Rat::zero(); target_size];
    for (i, &j) in map.iter().enumerate() {
        if j >= target_size {
            return Err(TransportError::BadIndexMap {
                value: j,
                range: target_size,
            });
        }
        weights[j] += &mu.weights[i];
    }
    Ok(Measure::from_weights_unchecked(weights))
}

/// The Lipschitz polytope `{f : |f_i - f_j| ≤ d_ij, f_0 = 0}` in
/// half-space form.
pub fn lipschitz_polytope(space: &FiniteMetricSpace) -> HPolytope {
    let n = space.len();
    let mut p = HPolytope::new(n);
    let mut pin = vec![Rat::zero(); n];
    pin[0] = Rat::one();
    p.push_eq(pin, Rat::zero());
    for i in 0..n {
        for j in i + 1..n {
            let mut c = vec![Rat::zero(); n];
            c[i] = Rat::one();
            c[j] = -Rat::one();
            p.push_le(c.clone(), space.dist(i, j).clone());
            let flipped: Vec<Rat> = c.iter().map(|x| -x.clone()).collect();
            p.push_le(flipped, space.dist(i, j).clone());
        }
    }
    p
}

/// All vertices of the Lipschitz polytope, computed by incremental
/// halfspace cutting starting from the box `|f_i| ≤ d(0,i)` (those bounds
/// are themselves Lipschitz constraints, so the description stays exact).
pub fn lipschitz_vertices(space: &FiniteMetricSpace) -> Result<VPolytope, TransportError> {
    lipschitz_vertices_capped(space, DEFAULT_LIPSCHITZ_VERTEX_CAP)
}

pub fn lipschitz_vertices_capped(
    space: &FiniteMetricSpace,
    cap: usize,
) -> Result<VPolytope, TransportError> {
    let n = space.len();
    if n == 1 {
        return Ok(VPolytope::from_points(1, vec![vec![Rat::zero()]]));
    }
    // Reduced coordinates f_1..f_{n-1} with f_0 pinned to 0.
    let lows: Vec<Rat> = (1..n).map(|i| -space.dist(0, i).clone()).collect();
    let highs: Vec<Rat> = (1..n).map(|i| space.dist(0, i).clone()).collect();
    let mut cutter = CutPolytope::bounding_box(&lows, &highs);
    for i in 1..n {
        for j in i + 1..n {
            for sign in [1i64, -1] {
                let mut c = vec![Rat::zero(); n - 1];
                c[i - 1] = crate::rat::int(sign);
                c[j - 1] = crate::rat::int(-sign);
                cutter.cut(LinearConstraint::new(c, space.dist(i, j).clone()))?;
                if cutter.vertex_count() > cap {
                    return Err(TransportError::Lp(LpError::CapExceeded {
                        what: "Lipschitz polytope vertices",
                        count: cutter.vertex_count(),
                        cap,
                    }));
                }
            }
        }
    }
    let full: Vec<Vec<Rat>> = cutter
        .vertices()
        .iter()
        .map(|v| {
            let mut w = Vec::with_capacity(n);
            w.push(Rat::zero());
            w.extend(v.iter().cloned());
            w
        })
        .collect();
    Ok(VPolytope::from_points(n, full))
}

fn check_len(n: usize, m: &Measure) -> Result<(), TransportError> {
    if m.len() != n {
        return Err(TransportError::SpaceMismatch {
            expected: n,
            got: m.len(),
        });
    }
    Ok(())
}

/// Integral `∫ f dμ` of a potential against a measure.
pub fn integrate(f: &[Rat], mu: &Measure) -> Rat {
    dot(f, mu.weights())
}
