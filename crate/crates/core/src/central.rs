//! The two distinguished measures of a finite metric space.
//!
//! `central_measure` iterates the Chebyshev-center construction inside the
//! probability simplex under the Kantorovich metric: each level's radius
//! is computed by one LP whose variables are the candidate measure, the
//! threshold, and one coupling block per vertex of the current face; the
//! argmin face is then carved out exactly with cuts obtained from the
//! vertices of the Lipschitz polytope, so it stays an honest H-polytope
//! with a maintained vertex set.
//!
//! `lambda_measure` is the second-kind central measure of a
//! quasi-nilpotent space, computed by lifting the point mass on the
//! terminal quotient level back through the tower, spreading each orbit's
//! mass uniformly over the orbit.

use crate::isometry::enumerate_isometries;
use crate::lp::{self, CutPolytope, HPolytope, LinearConstraint, LpError, Sense, VPolytope};
use crate::metric::FiniteMetricSpace;
use crate::quotient::{self, QuotientTower};
use crate::rat::{dot, rat, Rat};
use crate::transport::{
    self, kantorovich_distance, lipschitz_vertices_capped, pushforward, Measure, TransportError,
};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CentralError {
    #[error("space has {n} points, above the configured limit {max}; raise the limit explicitly to proceed")]
    TooLarge { n: usize, max: usize },
    #[error("space is not quasi-nilpotent; the quotient tower terminates in a {size}-point space")]
    NotQuasiNilpotent {
        size: usize,
        terminal: FiniteMetricSpace,
    },
    #[error("measure {which} is not invariant under the isometry group")]
    NotInvariant { which: usize },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone)]
pub struct CentralOptions {
    /// Maximum number of Chebyshev steps before reporting an inexact
    /// result.
    pub max_iter: usize,
    /// Refuse larger spaces (Lipschitz-polytope vertex counts explode).
    pub max_points: usize,
    pub lipschitz_vertex_cap: usize,
    /// Cap on the vertex count of a tower face.
    pub face_vertex_cap: usize,
}

impl Default for CentralOptions {
    fn default() -> Self {
        Self {
            max_iter: 16,
            max_points: 8,
            lipschitz_vertex_cap: transport::DEFAULT_LIPSCHITZ_VERTEX_CAP,
            face_vertex_cap: 100_000,
        }
    }
}

/// One level of the Chebyshev tower inside Prob(X): a face of the
/// probability simplex with its exact vertex set, Chebyshev radius, and
/// Kantorovich diameter.
#[derive(Debug, Clone)]
pub struct MeasureTowerLevel {
    pub face: HPolytope,
    pub vertices: VPolytope,
    pub radius: Rat,
    pub w_diameter: Rat,
}

#[derive(Debug, Clone)]
pub struct CentralMeasureResult {
    pub measure: Measure,
    pub levels: Vec<MeasureTowerLevel>,
    /// True when the terminal face is a single vertex.
    pub exact: bool,
    /// Kantorovich diameter of the terminal face; bounds the distance from
    /// the reported measure to the true central measure when not exact.
    pub residual_diameter: Rat,
}

/// `Prob(X)` in weight coordinates: `{w ≥ 0, Σw = 1}`.
pub fn prob_polytope(n: usize) -> HPolytope {
    CutPolytope::standard_simplex(n).hpolytope()
}

/// The starting tower level: the full probability simplex with Dirac
/// vertices.
pub fn initial_level(space: &FiniteMetricSpace) -> Result<MeasureTowerLevel, CentralError> {
    let cutter = CutPolytope::standard_simplex(space.len());
    level_from_cutter(space, &cutter)
}

fn level_from_cutter(
    space: &FiniteMetricSpace,
    cutter: &CutPolytope,
) -> Result<MeasureTowerLevel, CentralError> {
    let face = cutter.hpolytope();
    let vertices = cutter.vpolytope();
    let radius = if vertices.len() == 1 {
        Rat::zero()
    } else {
        face_radius(space, &face, &vertices)?
    };
    let w_diameter = w_diameter(space, &vertices)?;
    Ok(MeasureTowerLevel {
        face,
        vertices,
        radius,
        w_diameter,
    })
}

/// Chebyshev radius of a face: `min_{μ ∈ face} max_v W(μ, v)` over the
/// face's vertices, as a single LP. Each vertex contributes a coupling
/// block with marginals `μ` and `v` and cost at most `t`; couplings are
/// restricted to the support of `v` (entries outside it are forced to
/// zero by the marginal anyway), and point-mass vertices collapse to a
/// direct cost row.
fn face_radius(
    space: &FiniteMetricSpace,
    face: &HPolytope,
    vertices: &VPolytope,
) -> Result<Rat, CentralError> {
    let n = space.len();
    assert!(!vertices.is_empty());

    struct Block {
        support: Vec<usize>,
        var_base: usize,
    }
    let mut blocks: Vec<Option<Block>> = Vec::new();
    let mut nvars = n + 1; // mu, then t, then coupling blocks
    for v in &vertices.vertices {
        let support: Vec<usize> = (0..n).filter(|&j| !v[j].is_zero()).collect();
        if support.len() == 1 {
            blocks.push(None);
        } else {
            blocks.push(Some(Block {
                var_base: nvars,
                support: support.clone(),
            }));
            nvars += n * support.len();
        }
    }

    let t_var = n;
    let mut p = HPolytope::new(nvars);
    let pad = |coeffs: Vec<Rat>, total: usize| -> Vec<Rat> {
        let mut out = coeffs;
        out.resize(total, Rat::zero());
        out
    };
    for c in &face.inequalities {
        p.push_le(pad(c.coeffs.clone(), nvars), c.rhs.clone());
    }
    for c in &face.equalities {
        p.push_eq(pad(c.coeffs.clone(), nvars), c.rhs.clone());
    }
    // t >= 0
    {
        let mut c = vec![Rat::zero(); nvars];
        c[t_var] = -Rat::one();
        p.push_le(c, Rat::zero());
    }
    for (v, block) in vertices.vertices.iter().zip(&blocks) {
        match block {
            None => {
                // W(mu, delta_x) = sum_i mu_i d(i, x) <= t
                let x = (0..n).position(|j| !v[j].is_zero()).expect("point mass");
                let mut c = vec![Rat::zero(); nvars];
                for i in 0..n {
                    c[i] = space.dist(i, x).clone();
                }
                c[t_var] = -Rat::one();
                p.push_le(c, Rat::zero());
            }
            Some(block) => {
                let cols = block.support.len();
                let gvar = |i: usize, js: usize| block.var_base + i * cols + js;
                for i in 0..n {
                    for js in 0..cols {
                        let mut c = vec![Rat::zero(); nvars];
                        c[gvar(i, js)] = -Rat::one();
                        p.push_le(c, Rat::zero());
                    }
                }
                // Row sums reproduce mu.
                for i in 0..n {
                    let mut c = vec![Rat::zero(); nvars];
                    for js in 0..cols {
                        c[gvar(i, js)] = Rat::one();
                    }
                    c[i] = -Rat::one();
                    p.push_eq(c, Rat::zero());
                }
                // Column sums reproduce v on its support.
                for (js, &j) in block.support.iter().enumerate() {
                    let mut c = vec![Rat::zero(); nvars];
                    for i in 0..n {
                        c[gvar(i, js)] = Rat::one();
                    }
                    p.push_eq(c, v[j].clone());
                }
                // Transport cost bounded by t.
                let mut c = vec![Rat::zero(); nvars];
                for i in 0..n {
                    for (js, &j) in block.support.iter().enumerate() {
                        c[gvar(i, js)] = space.dist(i, j).clone();
                    }
                }
                c[t_var] = -Rat::one();
                p.push_le(c, Rat::zero());
            }
        }
    }
    let mut objective = vec![Rat::zero(); nvars];
    objective[t_var] = Rat::one();
    Ok(lp::solve_lp(&objective, Sense::Minimize, &p)?.value)
}

/// Max pairwise Kantorovich distance over a vertex set.
fn w_diameter(space: &FiniteMetricSpace, vertices: &VPolytope) -> Result<Rat, CentralError> {
    let mut best = Rat::zero();
    for (a, u) in vertices.vertices.iter().enumerate() {
        for w in &vertices.vertices[a + 1..] {
            let mu = Measure::new(u.clone())?;
            let nu = Measure::new(w.clone())?;
            let d = kantorovich_distance(space, &mu, &nu)?;
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Cuts carving the argmin face `{μ : W(μ, v) ≤ r ∀v}` out of the current
/// face: one inequality per Lipschitz-polytope vertex `f`, namely
/// `⟨f, μ⟩ ≤ r + min_v ⟨f, v⟩` (the minimum over the face's vertices is
/// the binding choice of `v`, and the vertex set of the Lipschitz
/// polytope is symmetric, so both signs are covered).
fn apply_center_cuts(
    cutter: &mut CutPolytope,
    lip_vertices: &VPolytope,
    face_vertices: &VPolytope,
    radius: &Rat,
    face_vertex_cap: usize,
) -> Result<(), CentralError> {
    for f in &lip_vertices.vertices {
        let min_over_vertices = face_vertices
            .vertices
            .iter()
            .map(|v| dot(f, v))
            .min()
            .expect("nonempty vertex set");
        let rhs = radius + &min_over_vertices;
        cutter.cut(LinearConstraint::new(f.clone(), rhs))?;
        if cutter.vertex_count() > face_vertex_cap {
            return Err(CentralError::Lp(LpError::CapExceeded {
                what: "face vertices",
                count: cutter.vertex_count(),
                cap: face_vertex_cap,
            }));
        }
    }
    Ok(())
}

/// One Chebyshev step: computes the radius of the given level, extracts
/// the argmin face, and rebuilds the next level (with its own radius and
/// Kantorovich diameter).
pub fn chebyshev_step(
    space: &FiniteMetricSpace,
    level: &MeasureTowerLevel,
) -> Result<MeasureTowerLevel, CentralError> {
    chebyshev_step_with(space, level, &CentralOptions::default())
}

pub fn chebyshev_step_with(
    space: &FiniteMetricSpace,
    level: &MeasureTowerLevel,
    options: &CentralOptions,
) -> Result<MeasureTowerLevel, CentralError> {
    let radius = face_radius(space, &level.face, &level.vertices)?;
    debug_assert_eq!(radius, level.radius);
    let lip = lipschitz_vertices_capped(space, options.lipschitz_vertex_cap)?;
    let mut cutter = CutPolytope::from_parts(&level.face, &level.vertices);
    apply_center_cuts(
        &mut cutter,
        &lip,
        &level.vertices,
        &radius,
        options.face_vertex_cap,
    )?;
    level_from_cutter(space, &cutter)
}

/// The central measure: the generalized Chebyshev center of
/// `(Prob(X), Ŵ)`, approached through the iterated center tower. When the
/// tower reaches a one-vertex face the result is exact; otherwise the
/// residual diameter bounds the remaining uncertainty, which is reported
/// honestly rather than forced.
pub fn central_measure(
    space: &FiniteMetricSpace,
    max_iter: usize,
) -> Result<CentralMeasureResult, CentralError> {
    let options = CentralOptions {
        max_iter,
        ..CentralOptions::default()
    };
    central_measure_with(space, &options)
}

pub fn central_measure_with(
    space: &FiniteMetricSpace,
    options: &CentralOptions,
) -> Result<CentralMeasureResult, CentralError> {
    assert!(options.max_iter >= 1, "max_iter must be at least 1");
    let n = space.len();
    if n > options.max_points {
        return Err(CentralError::TooLarge {
            n,
            max: options.max_points,
        });
    }
    let lip = if n == 1 {
        None
    } else {
        Some(lipschitz_vertices_capped(space, options.lipschitz_vertex_cap)?)
    };

    let mut cutter = CutPolytope::standard_simplex(n);
    let mut levels: Vec<MeasureTowerLevel> = Vec::new();
    let exact;
    loop {
        let level = level_from_cutter(space, &cutter)?;
        let is_point = level.vertices.len() == 1;
        let radius = level.radius.clone();
        let vertices = level.vertices.clone();
        levels.push(level);
        if is_point {
            exact = true;
            break;
        }
        if levels.len() - 1 >= options.max_iter {
            exact = false;
            break;
        }
        apply_center_cuts(
            &mut cutter,
            lip.as_ref().expect("more than one point"),
            &vertices,
            &radius,
            options.face_vertex_cap,
        )?;
        assert!(
            cutter.vpolytope().vertices != vertices.vertices,
            "Chebyshev step failed to shrink the face; this is a bug"
        );
    }

    let terminal = levels.last().expect("at least one level");
    let measure = Measure::new(terminal.vertices.vertices[0].clone())?;
    let residual_diameter = terminal.w_diameter.clone();
    // The diameter sequence never increases along the tower.
    for w in levels.windows(2) {
        debug_assert!(w[1].w_diameter <= w[0].w_diameter);
    }
    Ok(CentralMeasureResult {
        measure,
        levels,
        exact,
        residual_diameter,
    })
}

/// `Fix(Prob(X))` as an H-polytope: the probability simplex intersected
/// with the pushforward-invariance equalities `w_i = w_{Φ(i)}` for every
/// isometry `Φ`.
pub fn fix_polytope(space: &FiniteMetricSpace) -> HPolytope {
    let n = space.len();
    let mut p = prob_polytope(n);
    let group = enumerate_isometries(space);
    let mut seen: Vec<(usize, usize)> = Vec::new();
    for phi in group.elements() {
        for i in 0..n {
            let j = phi.apply(i);
            if i == j {
                continue;
            }
            let key = (i.min(j), i.max(j));
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let mut c = vec![Rat::zero(); n];
            c[key.0] = Rat::one();
            c[key.1] = -Rat::one();
            p.push_eq(c, Rat::zero());
        }
    }
    p
}

/// The central measure of the second kind: the unique isometry-invariant
/// measure determined by the quotient tower of a quasi-nilpotent space.
/// The point mass on the terminal singleton is lifted level by level; the
/// unique invariant preimage spreads each orbit's mass uniformly over the
/// orbit.
pub fn lambda_measure(space: &FiniteMetricSpace) -> Result<Measure, CentralError> {
    let tower = quotient_tower_checked(space)?;
    let mut weights = vec![Rat::one()];
    for step in (0..tower.partitions.len()).rev() {
        let partition = &tower.partitions[step];
        let level_size = tower.levels[step].len();
        let mut lifted = vec![Rat::zero(); level_size];
        for (orbit_id, orbit) in partition.orbits.iter().enumerate() {
            let share = &weights[orbit_id] / rat(orbit.len() as i64, 1);
            for &x in orbit {
                lifted[x] = share.clone();
            }
        }
        weights = lifted;
    }
    Ok(Measure::new(weights)?)
}

fn quotient_tower_checked(space: &FiniteMetricSpace) -> Result<QuotientTower, CentralError> {
    let tower = quotient::quotient_tower(space);
    if !tower.quasi_nilpotent {
        let terminal = tower.terminal().clone();
        return Err(CentralError::NotQuasiNilpotent {
            size: terminal.len(),
            terminal,
        });
    }
    Ok(tower)
}

/// Checks the isometric identification of invariant measures with
/// measures on the quotient: returns true iff
/// `W_X(μ1, μ2) = W_{X^(1)}(μ1∘π^{-1}, μ2∘π^{-1})` exactly.
/// Both inputs must be invariant under the isometry group.
pub fn verify_theorem_iso(
    space: &FiniteMetricSpace,
    mu1: &Measure,
    mu2: &Measure,
) -> Result<bool, CentralError> {
    let group = enumerate_isometries(space);
    for (which, mu) in [(1usize, mu1), (2, mu2)] {
        for phi in group.elements() {
            let moved = pushforward(mu, &phi.perm, space.len())?;
            if &moved != mu {
                return Err(CentralError::NotInvariant { which });
            }
        }
    }
    let upstairs = kantorovich_distance(space, mu1, mu2)?;
    let q = quotient::quotient(space);
    let nu1 = pushforward(mu1, &q.projection, q.space.len())?;
    let nu2 = pushforward(mu2, &q.projection, q.space.len())?;
    let downstairs = kantorovich_distance(&q.space, &nu1, &nu2)?;
    Ok(upstairs == downstairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;
    use crate::spaces;

    #[test]
    fn prob_polytope_vertices_are_diracs() {
        for n in 1..=3 {
            let p = prob_polytope(n);
            let verts = lp::enumerate_vertices(&p).unwrap();
            assert_eq!(verts.len(), n);
        }
    }

    #[test]
    fn two_point_central_measure_is_even_split() {
        let s = spaces::grid(2);
        let result = central_measure(&s, 16).unwrap();
        assert!(result.exact);
        assert_eq!(result.measure.weights(), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(result.levels[0].radius, rat(1, 2));
        assert_eq!(result.levels[0].w_diameter, int(1));
    }

    #[test]
    fn first_step_of_two_point_space() {
        let s = spaces::grid(2);
        let level0 = initial_level(&s).unwrap();
        assert_eq!(level0.radius, rat(1, 2));
        let level1 = chebyshev_step(&s, &level0).unwrap();
        assert_eq!(level1.vertices.vertices, vec![vec![rat(1, 2), rat(1, 2)]]);
        assert_eq!(level1.radius, int(0));
    }

    #[test]
    fn first_step_of_equilateral_three() {
        let s = spaces::equilateral(3);
        let level0 = initial_level(&s).unwrap();
        assert_eq!(level0.radius, rat(2, 3));
        let level1 = chebyshev_step(&s, &level0).unwrap();
        assert_eq!(
            level1.vertices.vertices,
            vec![vec![rat(1, 3), rat(1, 3), rat(1, 3)]]
        );
    }

    #[test]
    fn singleton_space_is_immediate() {
        let s = spaces::grid(1);
        let result = central_measure(&s, 16).unwrap();
        assert!(result.exact);
        assert_eq!(result.measure.weights(), &[int(1)]);
    }

    #[test]
    fn fix_polytope_of_grid3_is_symmetric_segment() {
        let p = fix_polytope(&spaces::grid(3));
        let verts = lp::enumerate_vertices(&p).unwrap();
        // {(a, 1-2a, a) : 0 <= a <= 1/2} has endpoints a = 0 and a = 1/2.
        assert_eq!(
            verts.vertices,
            vec![
                vec![int(0), int(1), int(0)],
                vec![rat(1, 2), int(0), rat(1, 2)]
            ]
        );
    }

    #[test]
    fn fix_polytope_of_transitive_space_is_uniform_point() {
        let p = fix_polytope(&spaces::cycle(5).unwrap());
        let verts = lp::enumerate_vertices(&p).unwrap();
        assert_eq!(verts.vertices, vec![vec![rat(1, 5); 5]]);
    }

    #[test]
    fn fix_polytope_of_rigid_space_is_whole_simplex() {
        for seed in 0..50u64 {
            let s = spaces::random_space(4, seed);
            if enumerate_isometries(&s).is_trivial() {
                let p = fix_polytope(&s);
                assert!(p.equalities.len() == 1); // just the simplex equality
                return;
            }
        }
        panic!("no rigid space found");
    }

    #[test]
    fn lambda_of_grid3_is_discrete_lebesgue() {
        let m = lambda_measure(&spaces::grid(3)).unwrap();
        assert_eq!(m.weights(), &[rat(1, 4), rat(1, 2), rat(1, 4)]);
    }

    #[test]
    fn lambda_of_transitive_space_is_uniform() {
        let m = lambda_measure(&spaces::cycle(5).unwrap()).unwrap();
        assert_eq!(m, Measure::uniform(5));
    }

    #[test]
    fn lambda_of_singleton_is_point_mass() {
        let m = lambda_measure(&spaces::grid(1)).unwrap();
        assert_eq!(m.weights(), &[int(1)]);
    }

    #[test]
    fn lambda_rejects_non_quasi_nilpotent_spaces() {
        for seed in 0..50u64 {
            let s = spaces::random_space(4, seed);
            if enumerate_isometries(&s).is_trivial() {
                match lambda_measure(&s) {
                    Err(CentralError::NotQuasiNilpotent { size, .. }) => {
                        assert_eq!(size, 4);
                        return;
                    }
                    other => panic!("expected NotQuasiNilpotent, got {other:?}"),
                }
            }
        }
        panic!("no rigid space found");
    }

    #[test]
    fn theorem_iso_on_grid3_hand_example() {
        let s = spaces::grid(3);
        let mu1 = Measure::new(vec![rat(1, 2), int(0), rat(1, 2)]).unwrap();
        let mu2 = Measure::new(vec![int(0), int(1), int(0)]).unwrap();
        assert!(verify_theorem_iso(&s, &mu1, &mu2).unwrap());
        let w = kantorovich_distance(&s, &mu1, &mu2).unwrap();
        assert_eq!(w, rat(1, 2));
        assert!(verify_theorem_iso(&s, &mu1, &mu1).unwrap());
    }

    #[test]
    fn theorem_iso_rejects_noninvariant_measures() {
        let s = spaces::grid(3);
        let lopsided = Measure::new(vec![rat(2, 3), rat(1, 3), int(0)]).unwrap();
        assert!(matches!(
            verify_theorem_iso(&s, &lopsided, &lopsided),
            Err(CentralError::NotInvariant { which: 1 })
        ));
    }

    #[test]
    fn size_guard_refuses_large_spaces() {
        let s = spaces::random_space(9, 0);
        assert!(matches!(
            central_measure(&s, 4),
            Err(CentralError::TooLarge { n: 9, max: 8 })
        ));
    }

    /// The radius LP with full n x n coupling blocks for every vertex,
    /// with no support restriction and no point-mass shortcut.
    fn full_block_radius(space: &FiniteMetricSpace, face: &HPolytope, vertices: &VPolytope) -> Rat {
        let n = space.len();
        let blocks = vertices.len();
        let nvars = n + 1 + blocks * n * n;
        let t_var = n;
        let gvar = |b: usize, i: usize, j: usize| n + 1 + b * n * n + i * n + j;
        let mut p = HPolytope::new(nvars);
        let pad = |mut coeffs: Vec<Rat>| {
            coeffs.resize(nvars, Rat::zero());
            coeffs
        };
        for c in &face.inequalities {
            p.push_le(pad(c.coeffs.clone()), c.rhs.clone());
        }
        for c in &face.equalities {
            p.push_eq(pad(c.coeffs.clone()), c.rhs.clone());
        }
        let mut t_c = vec![Rat::zero(); nvars];
        t_c[t_var] = -Rat::one();
        p.push_le(t_c, Rat::zero());
        for (b, v) in vertices.vertices.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let mut c = vec![Rat::zero(); nvars];
                    c[gvar(b, i, j)] = -Rat::one();
                    p.push_le(c, Rat::zero());
                }
            }
            for i in 0..n {
                let mut c = vec![Rat::zero(); nvars];
                for j in 0..n {
                    c[gvar(b, i, j)] = Rat::one();
                }
                c[i] = -Rat::one();
                p.push_eq(c, Rat::zero());
            }
            for j in 0..n {
                let mut c = vec![Rat::zero(); nvars];
                for i in 0..n {
                    c[gvar(b, i, j)] = Rat::one();
                }
                p.push_eq(c, v[j].clone());
            }
            let mut cost = vec![Rat::zero(); nvars];
            for i in 0..n {
                for j in 0..n {
                    cost[gvar(b, i, j)] = space.dist(i, j).clone();
                }
            }
            cost[t_var] = -Rat::one();
            p.push_le(cost, Rat::zero());
        }
        let mut objective = vec![Rat::zero(); nvars];
        objective[t_var] = Rat::one();
        lp::solve_lp(&objective, lp::Sense::Minimize, &p).unwrap().value
    }

    #[test]
    fn support_restricted_radius_lp_matches_full_blocks() {
        for s in [
            spaces::grid(3),
            spaces::cycle(4).unwrap(),
            spaces::random_space(4, 9),
        ] {
            let result = central_measure(&s, 16).unwrap();
            for level in &result.levels {
                if level.vertices.len() > 1 {
                    let full = full_block_radius(&s, &level.face, &level.vertices);
                    assert_eq!(full, level.radius);
                }
            }
        }
    }
}
