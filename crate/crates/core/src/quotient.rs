//! The metric quotient (X^(1), d^(1)): orbits under the isometry group,
//! with the greatest pseudometric making the projection nonexpansive.
//!
//! d^(1) is computed as the shortest-path closure of the pairwise
//! orbit-minimum weight; that closure *is* the greatest pseudometric
//! dominated by the nonexpansiveness condition. The LP of the dual
//! formula is kept as an independent verification path.

use crate::isometry::{enumerate_isometries, OrbitPartition};
use crate::lp::{self, Sense};
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;
use num_traits::{One, Zero};

/// A space together with its orbit quotient and projection.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    pub base: FiniteMetricSpace,
    pub partition: OrbitPartition,
    /// The quotient space: points are orbits, metric is d^(1).
    pub space: FiniteMetricSpace,
    /// Base index -> quotient index.
    pub projection: Vec<usize>,
}

/// Builds (X^(1), d^(1)). The weight between two orbits is the minimum
/// distance over representative pairs; d^(1) is its all-pairs
/// shortest-path closure. Degeneration of the closure to zero off the
/// diagonal would contradict the metric property of d^(1) on finite
/// spaces and is asserted against.
pub fn quotient(space: &FiniteMetricSpace) -> QuotientSpace {
    let group = enumerate_isometries(space);
    let partition = group.orbits();
    let k = partition.orbits.len();
    let mut weight = vec![vec![Option::<Rat>::None; k]; k];
    for a in 0..k {
        weight[a][a] = Some(Rat::zero());
        for b in 0..k {
            if a == b {
                continue;
            }
            let mut best: Option<Rat> = None;
            for &x in &partition.orbits[a] {
                for &y in &partition.orbits[b] {
                    let d = space.dist(x, y);
                    if best.as_ref().map_or(true, |cur| d < cur) {
                        best = Some(d.clone());
                    }
                }
            }
            weight[a][b] = best;
        }
    }
    // Shortest-path closure.
    let mut dist: Vec<Vec<Rat>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| weight[a][b].clone().expect("complete weight matrix"))
                .collect()
        })
        .collect();
    for m in 0..k {
        for a in 0..k {
            for b in 0..k {
                let through = &dist[a][m] + &dist[m][b];
                if through < dist[a][b] {
                    dist[a][b] = through;
                }
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            assert!(
                a == b || dist[a][b] > Rat::zero(),
                "quotient pseudometric degenerated between distinct orbits; \
                 this indicates an isometry-enumeration bug"
            );
        }
    }
    let labels: Vec<String> = partition
        .orbits
        .iter()
        .map(|orbit| format!("[{}]", space.label(orbit[0])))
        .collect();
    let qspace = FiniteMetricSpace::validate(dist, labels)
        .expect("shortest-path closure of a symmetric positive weight is a metric");
    let projection = partition.orbit_of.clone();
    // Nonexpansiveness of the projection, exactly, for all pairs.
    for x in 0..space.len() {
        for y in 0..space.len() {
            debug_assert!(qspace.dist(projection[x], projection[y]) <= space.dist(x, y));
        }
    }
    QuotientSpace {
        base: space.clone(),
        partition,
        space: qspace,
        projection,
    }
}

/// The dual route to d^(1): maximizes `f(a) - f(b)` over functions on the
/// orbits whose lift to the base space is 1-Lipschitz. Equality with the
/// shortest-path closure is LP duality and is exercised by the tests.
pub fn quotient_dual_distance(q: &QuotientSpace, a: usize, b: usize) -> Rat {
    let k = q.space.len();
    assert!(a < k && b < k);
    if a == b {
        return Rat::zero();
    }
    let mut p = lp::HPolytope::new(k);
    // Pin f(b) = 0; the objective is shift-invariant.
    let mut pin = vec![Rat::zero(); k];
    pin[b] = Rat::one();
    p.push_eq(pin, Rat::zero());
    let n = q.base.len();
    for x in 0..n {
        for y in x + 1..n {
            let (ox, oy) = (q.projection[x], q.projection[y]);
            if ox == oy {
                continue;
            }
            let mut c = vec![Rat::zero(); k];
            c[ox] = Rat::one();
            c[oy] = -Rat::one();
            p.push_le(c.clone(), q.base.dist(x, y).clone());
            let flipped: Vec<Rat> = c.iter().map(|v| -v.clone()).collect();
            p.push_le(flipped, q.base.dist(x, y).clone());
        }
    }
    let mut objective = vec![Rat::zero(); k];
    objective[a] = Rat::one();
    objective[b] = -Rat::one();
    lp::solve_lp(&objective, Sense::Maximize, &p)
        .expect("the lifted-Lipschitz polytope is nonempty and bounded in the objective")
        .value
}

/// The iterated quotient tower X^(0), X^(1), … . A level with a trivial
/// isometry group quotients to an isometric copy of itself, so the tower
/// is constant from there on and the iteration stops.
#[derive(Debug, Clone)]
pub struct QuotientTower {
    /// X^(0), X^(1), …, terminal level.
    pub levels: Vec<FiniteMetricSpace>,
    /// Projection maps between consecutive levels.
    pub projections: Vec<Vec<usize>>,
    /// Orbit partitions between consecutive levels.
    pub partitions: Vec<OrbitPartition>,
    /// Diameter of each level.
    pub diameters: Vec<Rat>,
    pub quasi_nilpotent: bool,
}

impl QuotientTower {
    pub fn terminal(&self) -> &FiniteMetricSpace {
        self.levels.last().expect("at least one level")
    }
}

/// Decides quasi-nilpotence: iterate the quotient until a level is a
/// singleton (quasi-nilpotent) or has a trivial isometry group (not,
/// unless it is that singleton). Each nontrivial quotient strictly
/// reduces cardinality, so this ends within `n` steps.
pub fn quotient_tower(space: &FiniteMetricSpace) -> QuotientTower {
    let mut levels = vec![space.clone()];
    let mut projections = Vec::new();
    let mut partitions = Vec::new();
    let mut diameters = vec![diameter(space)];
    loop {
        let current = levels.last().expect("nonempty");
        if current.len() == 1 {
            return QuotientTower {
                levels,
                projections,
                partitions,
                diameters,
                quasi_nilpotent: true,
            };
        }
        let group = enumerate_isometries(current);
        if group.is_trivial() {
            return QuotientTower {
                levels,
                projections,
                partitions,
                diameters,
                quasi_nilpotent: false,
            };
        }
        let q = quotient(current);
        assert!(q.space.len() < current.len());
        diameters.push(diameter(&q.space));
        projections.push(q.projection);
        partitions.push(q.partition);
        levels.push(q.space);
    }
}

fn diameter(space: &FiniteMetricSpace) -> Rat {
    if space.len() == 1 {
        Rat::zero()
    } else {
        space.diameter()
    }
}
