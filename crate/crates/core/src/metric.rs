//! Finite metric spaces, validated on construction, and the Chebyshev
//! radius/center apparatus: eccentricities, center sets, the iterated
//! center tower and the weak-convexity checker.

use crate::rat::{format_rational, Rat};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("matrix is not square: row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("empty matrix: a metric space needs at least one point")]
    Empty,
    #[error("label count {got} does not match matrix size {n}")]
    LabelMismatch { got: usize, n: usize },
    #[error("asymmetric at ({i},{j}): {a} vs {b}")]
    Asymmetric {
        i: usize,
        j: usize,
        a: String,
        b: String,
    },
    #[error("nonzero diagonal at {i}: {value}")]
    NonzeroDiagonal { i: usize, value: String },
    #[error("nonpositive off-diagonal distance at ({i},{j}): {value}")]
    NonpositiveOffDiagonal { i: usize, j: usize, value: String },
    #[error("triangle violation ({i},{j},{k}): d({i},{k}) = {ik} > {ij} + {jk}")]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        ik: String,
        ij: String,
        jk: String,
    },
}

/// A finite metric space: a symmetric rational distance matrix with all
/// metric axioms verified at construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<Rat>>,
    labels: Vec<String>,
}

impl FiniteMetricSpace {
    /// Checks every metric axiom and returns the space only when all hold;
    /// each failure is reported with witness indices.
    pub fn validate(matrix: Vec<Vec<Rat>>, labels: Vec<String>) -> Result<Self, MetricError> {
        let n = matrix.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
        }
        if labels.len() != n {
            return Err(MetricError::LabelMismatch {
                got: labels.len(),
                n,
            });
        }
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(MetricError::NonzeroDiagonal {
                    i,
                    value: format_rational(&matrix[i][i]),
                });
            }
            for j in 0..n {
                if matrix[i][j] != matrix[j][i] {
                    return Err(MetricError::Asymmetric {
                        i,
                        j,
                        a: format_rational(&matrix[i][j]),
                        b: format_rational(&matrix[j][i]),
                    });
                }
                if i != j && matrix[i][j] <= Rat::zero() {
                    return Err(MetricError::NonpositiveOffDiagonal {
                        i,
                        j,
                        value: format_rational(&matrix[i][j]),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][k] > &matrix[i][j] + &matrix[j][k] {
                        return Err(MetricError::TriangleViolation {
                            i,
                            j,
                            k,
                            ik: format_rational(&matrix[i][k]),
                            ij: format_rational(&matrix[i][j]),
                            jk: format_rational(&matrix[j][k]),
                        });
                    }
                }
            }
        }
        Ok(Self {
            dist: matrix,
            labels,
        })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// The relabeled copy `σ·X`: point `σ(i)` carries the geometry of `i`,
    /// so `d'(σ(i), σ(j)) = d(i, j)`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let mut dist = vec![vec![Rat::zero(); n]; n];
        let mut labels = vec![String::new(); n];
        for i in 0..n {
            labels[perm[i]] = self.labels[i].clone();
            for j in 0..n {
                dist[perm[i]][perm[j]] = self.dist[i][j].clone();
            }
        }
        Self { dist, labels }
    }

    /// Max pairwise distance within `members`; 0 for singletons.
    pub fn diameter_of(&self, members: &[usize]) -> Rat {
        assert!(!members.is_empty(), "diameter of an empty subspace");
        let mut best = Rat::zero();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if self.dist[i][j] > best {
                    best = self.dist[i][j].clone();
                }
            }
        }
        best
    }

    pub fn diameter(&self) -> Rat {
        self.diameter_of(&(0..self.len()).collect::<Vec<_>>())
    }

    /// Max distance from `x` to the points of `members`.
    pub fn eccentricity_in(&self, members: &[usize], x: usize) -> Rat {
        assert!(members.contains(&x), "eccentricity of a point outside the subspace");
        members
            .iter()
            .map(|&y| self.dist[x][y].clone())
            .max()
            .expect("nonempty subspace")
    }

    /// Chebyshev radius and center set of the subspace: the minimum
    /// eccentricity and the set of points attaining it. Ties are kept as a
    /// set, never broken.
    pub fn chebyshev_center_set(&self, members: &[usize]) -> (Rat, Vec<usize>) {
        assert!(!members.is_empty());
        let eccs: Vec<Rat> = members
            .iter()
            .map(|&x| self.eccentricity_in(members, x))
            .collect();
        let radius = eccs.iter().min().expect("nonempty subspace").clone();
        let center: Vec<usize> = members
            .iter()
            .zip(&eccs)
            .filter(|(_, e)| **e == radius)
            .map(|(&x, _)| x)
            .collect();
        (radius, center)
    }

    /// Iterates the Chebyshev center until the level repeats. Termination
    /// is by exact set equality; finite spaces stabilize in at most `n`
    /// steps.
    pub fn chebyshev_tower(&self) -> ChebyshevTower {
        let mut levels: Vec<Vec<usize>> = vec![(0..self.len()).collect()];
        let mut radii: Vec<Rat> = Vec::new();
        loop {
            let current = levels.last().expect("at least one level").clone();
            let (radius, center) = self.chebyshev_center_set(&current);
            radii.push(radius);
            if center == current {
                return ChebyshevTower {
                    levels,
                    radii,
                    stabilized: true,
                };
            }
            levels.push(center);
        }
    }

    /// Searches, for every unordered pair, for a weakly middle point: a
    /// point `z` such that for all `w` both
    /// `d(z,w) ≤ max(d(x,w), d(y,w))` and, whenever that holds with
    /// equality, `d(x,w) = d(y,w)`.
    pub fn weak_convexity_check(&self) -> WeakConvexityReport {
        let n = self.len();
        let mut failures = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                let has_middle = (0..n).any(|z| {
                    (0..n).all(|w| {
                        let max = std::cmp::max(&self.dist[x][w], &self.dist[y][w]);
                        if self.dist[z][w] > *max {
                            return false;
                        }
                        self.dist[z][w] != *max || self.dist[x][w] == self.dist[y][w]
                    })
                });
                if !has_middle {
                    failures.push((x, y));
                }
            }
        }
        let convex = failures.is_empty();
        if convex && n >= 2 {
            // A weakly convex space with more than one point must satisfy
            // r(X) < δ(X); no finite input is expected to reach this.
            let all: Vec<usize> = (0..n).collect();
            let (radius, _) = self.chebyshev_center_set(&all);
            assert!(
                radius < self.diameter(),
                "weakly convex space with r(X) = δ(X); this contradicts the radius/diameter bound"
            );
        }
        WeakConvexityReport { convex, failures }
    }

    /// True when some distance-preserving bijection maps `self` onto
    /// `other` (backtracking search).
    pub fn is_isometric_to(&self, other: &FiniteMetricSpace) -> bool {
        let n = self.len();
        if n != other.len() {
            return false;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            a: &FiniteMetricSpace,
            b: &FiniteMetricSpace,
            map: &mut [usize],
            used: &mut [bool],
            i: usize,
        ) -> bool {
            let n = a.len();
            if i == n {
                return true;
            }
            for c in 0..n {
                if used[c] {
                    continue;
                }
                if (0..i).all(|j| a.dist(i, j) == b.dist(c, map[j])) {
                    map[i] = c;
                    used[c] = true;
                    if go(a, b, map, used, i + 1) {
                        return true;
                    }
                    used[c] = false;
                }
            }
            false
        }
        go(self, other, &mut map, &mut used, 0)
    }
}

/// The iterated Chebyshev center tower `C^0 ⊋ C^1 ⊋ …` down to the first
/// level that reproduces itself.
#[derive(Debug, Clone)]
pub struct ChebyshevTower {
    /// Strictly shrinking center sets, starting from the whole space. The
    /// terminal entry satisfies `C(terminal) = terminal`.
    pub levels: Vec<Vec<usize>>,
    /// Chebyshev radius of each level.
    pub radii: Vec<Rat>,
    pub stabilized: bool,
}

impl ChebyshevTower {
    pub fn terminal(&self) -> &[usize] {
        self.levels.last().expect("at least one level")
    }

    pub fn terminal_is_singleton(&self) -> bool {
        self.terminal().len() == 1
    }
}

#[derive(Debug, Clone)]
pub struct WeakConvexityReport {
    pub convex: bool,
    /// Pairs with no weakly middle point.
    pub failures: Vec<(usize, usize)>,
}
