//! Enumeration of the full isometry group of a finite metric space and its
//! orbit structure.
//!
//! The search is a backtracking assignment of images in index order,
//! pruned by (a) matching distance multisets per point and (b) distance
//! consistency of the partial map. Candidates are tried in ascending
//! order, so the element list comes out lexicographically sorted.

use crate::metric::FiniteMetricSpace;
use crate::rat::Rat;
use std::collections::HashSet;

/// A distance-preserving permutation of the point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub perm: Vec<usize>,
}

impl Isometry {
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        // (self ∘ other)(i) = self(other(i))
        Isometry {
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Isometry {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Isometry { perm: inv }
    }
}

/// The complete isometry group, canonically sorted, identity first.
#[derive(Debug, Clone)]
pub struct IsometryGroup {
    n: usize,
    elements: Vec<Isometry>,
}

/// Orbit partition of the point set under a group: `x ~ y` iff some listed
/// isometry maps `x` to `y`. Orbits are sorted index sets, ordered by
/// their minimum element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub orbit_of: Vec<usize>,
    pub orbits: Vec<Vec<usize>>,
}

const CLOSURE_CHECK_LIMIT: usize = 2000;

/// Enumerates every distance-preserving permutation of the space.
pub fn enumerate_isometries(space: &FiniteMetricSpace) -> IsometryGroup {
    let n = space.len();
    // Sorted distance multiset per point; an isometry can only match
    // points with identical rows.
    let profiles: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = (0..n).map(|j| space.dist(i, j).clone()).collect();
            row.sort();
            row
        })
        .collect();
    let mut elements = Vec::new();
    let mut image = vec![0usize; n];
    let mut used = vec![false; n];
    search(space, &profiles, &mut image, &mut used, 0, &mut elements);

    let group = IsometryGroup { n, elements };
    if group.elements.len() <= CLOSURE_CHECK_LIMIT {
        assert!(
            group.verify_closure(),
            "isometry enumeration produced a set that is not a group"
        );
    }
    group
}

fn search(
    space: &FiniteMetricSpace,
    profiles: &[Vec<Rat>],
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    at: usize,
    out: &mut Vec<Isometry>,
) {
    let n = space.len();
    if at == n {
        out.push(Isometry {
            perm: image.clone(),
        });
        return;
    }
    for candidate in 0..n {
        if used[candidate] || profiles[at] != profiles[candidate] {
            continue;
        }
        if (0..at).any(|j| space.dist(at, j) != space.dist(candidate, image[j])) {
            continue;
        }
        image[at] = candidate;
        used[candidate] = true;
        search(space, profiles, image, used, at + 1, out);
        used[candidate] = false;
    }
}

impl IsometryGroup {
    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Isometry] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Exact closure check: contains the identity and is closed under
    /// composition and inverses.
    pub fn verify_closure(&self) -> bool {
        let set: HashSet<&[usize]> = self.elements.iter().map(|e| e.perm.as_slice()).collect();
        let identity: Vec<usize> = (0..self.n).collect();
        if !set.contains(identity.as_slice()) {
            return false;
        }
        for a in &self.elements {
            if !set.contains(a.inverse().perm.as_slice()) {
                return false;
            }
            for b in &self.elements {
                if !set.contains(a.compose(b).perm.as_slice()) {
                    return false;
                }
            }
        }
        true
    }

    pub fn orbits(&self) -> OrbitPartition {
        let n = self.n;
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut members: Vec<usize> = self
                .elements
                .iter()
                .map(|e| e.apply(x))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            members.sort();
            for &m in &members {
                orbit_of[m] = id;
            }
            orbits.push(members);
        }
        OrbitPartition { orbit_of, orbits }
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().orbits.len() == 1
    }

    /// Size of the stabilizer subgroup of `x`.
    pub fn stabilizer_size(&self, x: usize) -> usize {
        self.elements.iter().filter(|e| e.apply(x) == x).count()
    }
}
