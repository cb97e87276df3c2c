//! Ready-made metric spaces: grids (discretized intervals), cycles,
//! equilateral spaces, seeded random spaces, and word metrics of finite
//! groups given by Cayley tables.

use crate::metric::{FiniteMetricSpace, MetricError};
use crate::rat::{format_rational, int, rat, Rat};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpacesError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// The discretized unit interval: `n` points `k/(n-1)` with the absolute
/// value metric (a single point `0` when `n = 1`).
pub fn grid(n: usize) -> FiniteMetricSpace {
    assert!(n >= 1, "grid needs at least one point");
    let coords: Vec<Rat> = if n == 1 {
        vec![Rat::zero()]
    } else {
        (0..n).map(|k| rat(k as i64, (n - 1) as i64)).collect()
    };
    let labels = coords.iter().map(format_rational).collect();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if coords[i] >= coords[j] {
                        &coords[i] - &coords[j]
                    } else {
                        &coords[j] - &coords[i]
                    }
                })
                .collect()
        })
        .collect();
    FiniteMetricSpace::validate(matrix, labels).expect("grid is a metric space")
}

/// The `n`-cycle with arc metric `min(|i-j|, n-|i-j|)/n`.
pub fn cycle(n: usize) -> Result<FiniteMetricSpace, SpacesError> {
    if n < 3 {
        return Err(SpacesError::InvalidParams(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    let matrix: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let gap = i.abs_diff(j).min(n - i.abs_diff(j));
                    rat(gap as i64, n as i64)
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| i.to_string()).collect();
    Ok(FiniteMetricSpace::validate(matrix, labels)?)
}

/// `n` points, all pairwise distances 1.
pub fn equilateral(n: usize) -> FiniteMetricSpace {
    assert!(n >= 1);
    let matrix: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { int(0) } else { int(1) }).collect())
        .collect();
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    FiniteMetricSpace::validate(matrix, labels).expect("equilateral is a metric space")
}

/// Seeded random space: distinct points in a small integer cube under the
/// L1 distance, scaled by `1/(4n)`. The triangle inequality holds by
/// construction and identical seeds give identical spaces.
pub fn random_space(n: usize, seed: u64) -> FiniteMetricSpace {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (2 * n) as i64;
    let mut points: Vec<[i64; 3]> = Vec::with_capacity(n);
    while points.len() < n {
        let p = [
            rng.gen_range(0..=side),
            rng.gen_range(0..=side),
            rng.gen_range(0..=side),
        ];
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let scale = rat(1, (4 * n) as i64);
    let matrix: Vec<Vec<Rat>> = points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| {
                    let l1: i64 = (0..3).map(|k| (p[k] - q[k]).abs()).sum();
                    int(l1) * &scale
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    FiniteMetricSpace::validate(matrix, labels).expect("L1 distances form a metric")
}

/// Word metric of a finite group. `table[a][b]` is the product `a·b`;
/// `weights` lists generators with positive weights and must be symmetric:
/// every generator's inverse carries the same weight. The metric
/// `d(a,b) = |a^{-1}b|` is left-invariant by construction.
pub fn group_space(
    table: &[Vec<usize>],
    weights: &[(usize, Rat)],
    labels: Option<Vec<String>>,
) -> Result<FiniteMetricSpace, SpacesError> {
    let n = table.len();
    if n == 0 {
        return Err(SpacesError::InvalidParams("empty Cayley table".into()));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(SpacesError::InvalidParams(format!(
                "Cayley table row {i} has length {}, expected {n}",
                row.len()
            )));
        }
        if row.iter().any(|&x| x >= n) {
            return Err(SpacesError::InvalidParams(format!(
                "Cayley table row {i} has an entry out of range"
            )));
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| SpacesError::InvalidParams("Cayley table has no identity".into()))?;
    let inverse_of = |g: usize| -> Option<usize> { (0..n).find(|&h| table[g][h] == identity) };
    for &(g, ref w) in weights {
        if g >= n {
            return Err(SpacesError::InvalidParams(format!(
                "generator index {g} out of range"
            )));
        }
        if g == identity {
            return Err(SpacesError::InvalidParams(
                "the identity cannot be a generator".into(),
            ));
        }
        if *w <= Rat::zero() {
            return Err(SpacesError::InvalidParams(format!(
                "generator {g} has nonpositive weight"
            )));
        }
        let inv = inverse_of(g)
            .ok_or_else(|| SpacesError::InvalidParams(format!("generator {g} has no inverse")))?;
        let matched = weights.iter().any(|(h, wh)| *h == inv && wh == w);
        if !matched {
            return Err(SpacesError::InvalidParams(format!(
                "generator weights are not symmetric: inverse of {g} is {inv} and must carry the same weight"
            )));
        }
    }
    if weights.is_empty() {
        return Err(SpacesError::InvalidParams("no generators given".into()));
    }

    // Shortest weighted word lengths via Floyd-Warshall on the (right)
    // Cayley graph.
    let mut dist: Vec<Vec<Option<Rat>>> = vec![vec![None; n]; n];
    for a in 0..n {
        dist[a][a] = Some(Rat::zero());
        for &(g, ref w) in weights {
            let b = table[a][g];
            let better = match &dist[a][b] {
                None => true,
                Some(old) => *w < *old,
            };
            if better {
                dist[a][b] = Some(w.clone());
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(ik), Some(kj)) = (&dist[i][k], &dist[k][j]) {
                    let through = ik + kj;
                    let better = match &dist[i][j] {
                        None => true,
                        Some(old) => through < *old,
                    };
                    if better {
                        dist[i][j] = Some(through);
                    }
                }
            }
        }
    }
    let mut matrix = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            match &dist[i][j] {
                Some(d) => matrix[i][j] = d.clone(),
                None => {
                    return Err(SpacesError::InvalidParams(
                        "generators do not generate the group".into(),
                    ))
                }
            }
        }
    }
    let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("g{i}")).collect());
    Ok(FiniteMetricSpace::validate(matrix, labels)?)
}

/// Cayley table of the cyclic group Z_n.
pub fn cyclic_group_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// The word metric of Z_n with the standard generators `{1, n-1}` at
/// weight 1.
pub fn cyclic_group_space(n: usize) -> Result<FiniteMetricSpace, SpacesError> {
    if n < 2 {
        return Err(SpacesError::InvalidParams(format!(
            "cyclic group word metric needs n >= 2, got {n}"
        )));
    }
    let table = cyclic_group_table(n);
    let mut weights = vec![(1usize, int(1))];
    if n > 2 {
        weights.push((n - 1, int(1)));
    }
    let labels = (0..n).map(|i| format!("z{i}")).collect();
    group_space(&table, &weights, Some(labels))
}

/// Cayley table of the symmetric group S_k over permutations listed in
/// lexicographic order. Returns the table together with the permutations.
pub fn symmetric_group_table(k: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    permute_collect(&mut current, 0, &mut perms);
    perms.sort();
    let index = |p: &[usize]| perms.iter().position(|q| q == p).expect("listed");
    let table = perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| {
                    // (a·b)(i) = a(b(i))
                    let prod: Vec<usize> = (0..k).map(|i| a[b[i]]).collect();
                    index(&prod)
                })
                .collect()
        })
        .collect();
    (table, perms)
}

fn permute_collect(current: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == current.len() {
        out.push(current.clone());
        return;
    }
    for i in at..current.len() {
        current.swap(at, i);
        permute_collect(current, at + 1, out);
        current.swap(at, i);
    }
}

/// The word metric of S_k generated by the adjacent transpositions, each
/// at weight 1 (transpositions are their own inverses, so the weight set
/// is symmetric).
pub fn symmetric_group_space(k: usize) -> Result<FiniteMetricSpace, SpacesError> {
    if k < 2 {
        return Err(SpacesError::InvalidParams(format!(
            "symmetric group word metric needs k >= 2, got {k}"
        )));
    }
    let (table, perms) = symmetric_group_table(k);
    let mut weights = Vec::new();
    for t in 0..k - 1 {
        let mut perm: Vec<usize> = (0..k).collect();
        perm.swap(t, t + 1);
        let idx = perms.iter().position(|p| *p == perm).expect("listed");
        weights.push((idx, int(1)));
    }
    let labels = perms
        .iter()
        .map(|p| {
            p.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("")
        })
        .collect();
    group_space(&table, &weights, Some(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid3_matrix_matches_example() {
        let g = grid(3);
        assert_eq!(g.len(), 3);
        assert_eq!(*g.dist(0, 1), rat(1, 2));
        assert_eq!(*g.dist(0, 2), int(1));
        assert_eq!(*g.dist(1, 2), rat(1, 2));
        assert_eq!(g.labels(), &["0", "1/2", "1"]);
    }

    #[test]
    fn cycle4_distances() {
        let c = cycle(4).unwrap();
        assert_eq!(*c.dist(0, 1), rat(1, 4));
        assert_eq!(*c.dist(0, 2), rat(1, 2));
        assert_eq!(*c.dist(0, 3), rat(1, 4));
        assert!(cycle(2).is_err());
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let a = random_space(4, 7);
        let b = random_space(4, 7);
        assert_eq!(a, b);
        let c = random_space(4, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn cyclic_word_metric_is_cycle_metric_scaled() {
        let z5 = cyclic_group_space(5).unwrap();
        let c5 = cycle(5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(z5.dist(i, j), &(c5.dist(i, j) * int(5)));
            }
        }
    }

    #[test]
    fn s3_word_metric_is_valid_and_left_invariant() {
        let s3 = symmetric_group_space(3).unwrap();
        assert_eq!(s3.len(), 6);
        let (table, _) = symmetric_group_table(3);
        for c in 0..6 {
            for a in 0..6 {
                for b in 0..6 {
                    assert_eq!(s3.dist(a, b), s3.dist(table[c][a], table[c][b]));
                }
            }
        }
    }

    #[test]
    fn asymmetric_generator_weights_are_rejected() {
        let table = cyclic_group_table(5);
        let err = group_space(&table, &[(1, int(1))], None);
        assert!(err.is_err());
    }
}
