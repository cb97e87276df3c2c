//! The canonical ordering of a finite metric space: a metric on index
//! prefixes built greedily, placing at each step a point farthest (in the
//! min-distance sense) from everything placed so far and breaking the
//! remaining ties by successively maximizing the distances to the placed
//! points in order. The resulting matrix depends only on the isometry
//! class of the space; its realizations ("representations") biject with
//! the isometry group.

use crate::isometry::enumerate_isometries;
use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;
use thiserror::Error;

/// Default refusal threshold for [`canonical_metric`]; the embedding
/// search is exponential on highly symmetric spaces.
pub const DEFAULT_MAX_POINTS: usize = 10;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("space has {n} points, above the configured limit {max}; raise the limit explicitly to proceed")]
    TooLarge { n: usize, max: usize },
}

/// The canonical metric on `{0..n-1}` together with one isometric
/// realization in the space.
#[derive(Debug, Clone)]
pub struct CanonicalOrder {
    pub rho: Vec<Vec<Rat>>,
    /// Lexicographically least realization (by point index).
    pub representation: Vec<usize>,
    pub all_representations_count: usize,
}

/// The surviving embedding tuples after a construction step: exactly the
/// realizations of the current `rho` prefix.
#[derive(Debug, Clone)]
pub struct EmbeddingState {
    pub prefix_len: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl EmbeddingState {
    /// All single points: the unconstrained start of the construction.
    pub fn start(space: &FiniteMetricSpace) -> Self {
        Self {
            prefix_len: 1,
            tuples: (0..space.len()).map(|x| vec![x]).collect(),
        }
    }
}

/// All tuples realizing the given prefix metric inside the space, by
/// exhaustive backtracking. The prefix must be realizable (prefixes
/// produced by the construction always are); an empty result would
/// contradict the construction's inductive nonemptiness and panics.
pub fn embeddings(space: &FiniteMetricSpace, rho_prefix: &[Vec<Rat>]) -> Vec<Vec<usize>> {
    let m = rho_prefix.len();
    let mut out = Vec::new();
    let mut tuple: Vec<usize> = Vec::with_capacity(m);
    fn go(
        space: &FiniteMetricSpace,
        rho: &[Vec<Rat>],
        tuple: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let at = tuple.len();
        if at == rho.len() {
            out.push(tuple.clone());
            return;
        }
        for x in 0..space.len() {
            if (0..at).all(|j| space.dist(tuple[j], x) == &rho[at][j]) {
                tuple.push(x);
                go(space, rho, tuple, out);
                tuple.pop();
            }
        }
    }
    go(space, rho_prefix, &mut tuple, &mut out);
    assert!(
        !out.is_empty(),
        "no embedding realizes the prefix metric; the prefix was not realizable"
    );
    out
}

/// One construction step: over all surviving tuples and candidate points,
/// first maximize the minimum distance to the placed prefix, then filter
/// by maximizing the distance to each placed point in order. Returns the
/// new distance row and the surviving extended tuples. The row is read
/// off the survivors and must be identical across all of them; a
/// disagreement signals an implementation bug and panics.
pub fn extend(space: &FiniteMetricSpace, state: &EmbeddingState) -> (Vec<Rat>, EmbeddingState) {
    let placed = state.prefix_len;
    assert!(
        placed < space.len(),
        "extend called with every point already placed"
    );
    assert!(!state.tuples.is_empty(), "no surviving tuples; this is a bug");

    // Candidates (tuple, new point) maximizing the min distance to the
    // placed points.
    let mut best: Option<Rat> = None;
    let mut survivors: Vec<(usize, usize)> = Vec::new();
    for (ti, tuple) in state.tuples.iter().enumerate() {
        for x in 0..space.len() {
            let fval = tuple
                .iter()
                .map(|&p| space.dist(p, x).clone())
                .min()
                .expect("nonempty prefix");
            match &best {
                Some(b) if fval < *b => {}
                Some(b) if fval == *b => survivors.push((ti, x)),
                _ => {
                    best = Some(fval);
                    survivors = vec![(ti, x)];
                }
            }
        }
    }

    // Tie-breaking chain: maximize the distance to placed point j-1 at
    // stage j.
    for j in 0..placed {
        let stage_max = survivors
            .iter()
            .map(|&(ti, x)| space.dist(state.tuples[ti][j], x).clone())
            .max()
            .expect("survivors nonempty");
        survivors.retain(|&(ti, x)| space.dist(state.tuples[ti][j], x) == &stage_max);
    }

    let (t0, x0) = survivors[0];
    let row: Vec<Rat> = (0..placed)
        .map(|j| space.dist(state.tuples[t0][j], x0).clone())
        .collect();
    for &(ti, x) in &survivors {
        for j in 0..placed {
            assert_eq!(
                space.dist(state.tuples[ti][j], x),
                &row[j],
                "surviving tuples disagree on the new distance row; this is a bug"
            );
        }
    }

    let mut tuples: Vec<Vec<usize>> = survivors
        .into_iter()
        .map(|(ti, x)| {
            let mut t = state.tuples[ti].clone();
            t.push(x);
            t
        })
        .collect();
    tuples.sort();
    tuples.dedup();
    (
        row,
        EmbeddingState {
            prefix_len: placed + 1,
            tuples,
        },
    )
}

/// Runs the construction until every point is placed.
pub fn canonical_metric(space: &FiniteMetricSpace) -> Result<CanonicalOrder, SamplerError> {
    canonical_metric_with_limit(space, DEFAULT_MAX_POINTS)
}

pub fn canonical_metric_with_limit(
    space: &FiniteMetricSpace,
    max_points: usize,
) -> Result<CanonicalOrder, SamplerError> {
    let n = space.len();
    if n > max_points {
        return Err(SamplerError::TooLarge { n, max: max_points });
    }
    let mut rho: Vec<Vec<Rat>> = vec![vec![Rat::from_integer(0.into())]];
    let mut state = EmbeddingState::start(space);
    while state.prefix_len < n {
        let (row, next) = extend(space, &state);
        let k = row.len();
        for (j, d) in row.iter().enumerate() {
            rho[j].push(d.clone());
        }
        let mut new_row = row;
        new_row.push(Rat::from_integer(0.into()));
        debug_assert_eq!(new_row.len(), k + 1);
        rho.push(new_row);
        state = next;
    }
    // Every realization of the full matrix is a bijection onto the space.
    for tuple in &state.tuples {
        debug_assert_eq!(tuple.len(), n);
        let mut seen = vec![false; n];
        for &x in tuple {
            seen[x] = true;
        }
        assert!(
            seen.iter().all(|&s| s),
            "a representation failed to cover the space; this is a bug"
        );
    }
    let representation = state.tuples[0].clone();
    // The representation realizes rho exactly, which also certifies that
    // rho is a metric.
    for j in 0..n {
        for k in 0..n {
            assert_eq!(
                space.dist(representation[j], representation[k]),
                &rho[j][k],
                "representation does not realize the canonical metric; this is a bug"
            );
        }
    }
    Ok(CanonicalOrder {
        rho,
        representation,
        all_representations_count: state.tuples.len(),
    })
}

/// All isometric realizations of the canonical metric in the space, by
/// full re-enumeration (independent of the tuples carried through the
/// construction). Their count equals the order of the isometry group.
pub fn representations(space: &FiniteMetricSpace, order: &CanonicalOrder) -> Vec<Vec<usize>> {
    embeddings(space, &order.rho)
}

/// The distinguished orbit sequence: position `k` holds the orbit of the
/// `k`-th placed point, which is the same whichever representation is
/// used (asserted).
pub fn canonical_orbit_sequence(space: &FiniteMetricSpace) -> Result<Vec<usize>, SamplerError> {
    let order = canonical_metric(space)?;
    let orbits = enumerate_isometries(space).orbits();
    let all = representations(space, &order);
    let sequence: Vec<usize> = order
        .representation
        .iter()
        .map(|&x| orbits.orbit_of[x])
        .collect();
    for rep in &all {
        for (k, &x) in rep.iter().enumerate() {
            assert_eq!(
                orbits.orbit_of[x], sequence[k],
                "representations disagree on an orbit; this is a bug"
            );
        }
    }
    Ok(sequence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};
    use crate::spaces;

    #[test]
    fn two_point_canonical_metric() {
        let order = canonical_metric(&spaces::grid(2)).unwrap();
        assert_eq!(order.rho, vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
    }

    #[test]
    fn grid3_steps_follow_the_construction() {
        let g = spaces::grid(3);
        let state = EmbeddingState::start(&g);
        let (row1, state) = extend(&g, &state);
        assert_eq!(row1, vec![int(1)]);
        assert_eq!(state.tuples, vec![vec![0, 2], vec![2, 0]]);
        let (row2, state) = extend(&g, &state);
        assert_eq!(row2, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(state.tuples, vec![vec![0, 2, 1], vec![2, 0, 1]]);
    }

    #[test]
    fn grid3_canonical_order() {
        let order = canonical_metric(&spaces::grid(3)).unwrap();
        assert_eq!(order.representation, vec![0, 2, 1]);
        assert_eq!(order.all_representations_count, 2);
        assert_eq!(order.rho[0], vec![int(0), int(1), rat(1, 2)]);
        assert_eq!(order.rho[1], vec![int(1), int(0), rat(1, 2)]);
        assert_eq!(order.rho[2], vec![rat(1, 2), rat(1, 2), int(0)]);
    }

    #[test]
    fn grid5_third_step_keeps_both_mirror_tuples() {
        let g = spaces::grid(5);
        let state = EmbeddingState::start(&g);
        let (_, state) = extend(&g, &state);
        let (_, state) = extend(&g, &state);
        let (row3, state) = extend(&g, &state);
        assert_eq!(row3, vec![rat(3, 4), rat(1, 4), rat(1, 4)]);
        assert_eq!(state.tuples, vec![vec![0, 4, 2, 3], vec![4, 0, 2, 1]]);
    }

    #[test]
    fn equilateral_canonical_metric_is_equilateral() {
        let order = canonical_metric(&spaces::equilateral(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { int(0) } else { int(1) };
                assert_eq!(order.rho[i][j], expected);
            }
        }
        assert_eq!(order.all_representations_count, 6);
    }

    #[test]
    fn embeddings_examples() {
        let g = spaces::grid(3);
        // n = 0 case: all single points.
        let singles = embeddings(&g, &[vec![int(0)]]);
        assert_eq!(singles, vec![vec![0], vec![1], vec![2]]);
        // Prefix with rho(0,1) = 1: only the endpoint pairs.
        let rho = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(embeddings(&g, &rho), vec![vec![0, 2], vec![2, 0]]);
        // Equilateral: all ordered distinct pairs.
        let eq = spaces::equilateral(3);
        assert_eq!(embeddings(&eq, &rho).len(), 6);
    }

    #[test]
    fn representation_counts_equal_group_orders() {
        let cases: Vec<FiniteMetricSpace> = vec![
            spaces::grid(3),
            spaces::grid(4),
            spaces::equilateral(3),
            spaces::equilateral(4),
            spaces::cycle(4).unwrap(),
            spaces::random_space(5, 3),
        ];
        for s in cases {
            let order = canonical_metric(&s).unwrap();
            let reps = representations(&s, &order);
            let group = enumerate_isometries(&s);
            assert_eq!(reps.len(), group.len());
            assert_eq!(reps.len(), order.all_representations_count);
            // The carried-forward survivors equal the re-enumerated set.
            let rebuilt = embeddings(&s, &order.rho);
            assert_eq!(reps, rebuilt);
        }
    }

    #[test]
    fn canonical_metric_is_relabeling_invariant() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for seed in 0..8u64 {
            let s = spaces::random_space(5, seed);
            let order = canonical_metric(&s).unwrap();
            let mut sigma: Vec<usize> = (0..5).collect();
            sigma.shuffle(&mut rng);
            let relabeled = s.relabel(&sigma);
            let order2 = canonical_metric(&relabeled).unwrap();
            assert_eq!(order.rho, order2.rho);
        }
    }

    #[test]
    fn grid3_orbit_sequence() {
        let seq = canonical_orbit_sequence(&spaces::grid(3)).unwrap();
        // Endpoint orbit twice, then the midpoint orbit.
        assert_eq!(seq, vec![0, 0, 1]);
    }

    #[test]
    fn transitive_space_orbit_sequence_is_constant() {
        let seq = canonical_orbit_sequence(&spaces::cycle(5).unwrap()).unwrap();
        assert_eq!(seq, vec![0; 5]);
    }

    #[test]
    fn singleton_orbit_sequence() {
        let seq = canonical_orbit_sequence(&spaces::grid(1)).unwrap();
        assert_eq!(seq, vec![0]);
    }

    #[test]
    fn size_guard_refuses_large_spaces() {
        let s = spaces::random_space(11, 0);
        assert!(matches!(
            canonical_metric(&s),
            Err(SamplerError::TooLarge { n: 11, max: 10 })
        ));
    }

    #[test]
    fn greedy_radius_property_holds() {
        // At each step, the min distance from the new point to the placed
        // prefix equals the max of the min-distance functional.
        for seed in 0..6u64 {
            let s = spaces::random_space(5, seed);
            let mut state = EmbeddingState::start(&s);
            while state.prefix_len < s.len() {
                let (row, next) = extend(&s, &state);
                let placed_min = row.iter().min().unwrap().clone();
                // Independent recomputation of max f_n over F_n x X.
                let mut best: Option<Rat> = None;
                for tuple in &state.tuples {
                    for x in 0..s.len() {
                        let fval = tuple
                            .iter()
                            .map(|&p| s.dist(p, x).clone())
                            .min()
                            .unwrap();
                        if best.as_ref().map_or(true, |b| fval > *b) {
                            best = Some(fval);
                        }
                    }
                }
                assert_eq!(placed_min, best.unwrap());
                state = next;
            }
        }
    }
}
