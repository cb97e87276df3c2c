use mcenter_core::rat::{rat, Rat};
use mcenter_core::{central, spaces};

// Level-1 verification on random 3- and 4-point spaces: the grid argmin
// of the Dirac eccentricity must land inside the level-1 face, the grid
// minimum must equal the level-0 radius (when on-grid), and the level-1
// vertices must be grid-eccentricity-minimal.
fn compositions(total: i64, parts: usize) -> Vec<Vec<i64>> {
    if parts == 1 { return vec![vec![total]]; }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn main() {
    let mut checked = 0;
    for seed in 0..40u64 {
        for n in [3usize, 4] {
            let s = spaces::random_space(n, seed);
            let result = central::central_measure(&s, 16).unwrap();
            let res = 120i64;
            let mut best: Option<Rat> = None;
            let mut argmin: Vec<Vec<Rat>> = Vec::new();
            for point in compositions(res, n) {
                let mu: Vec<Rat> = point.iter().map(|&k| rat(k, res)).collect();
                let ecc = (0..n).map(|x| (0..n).map(|y| &mu[y] * s.dist(x, y)).sum::<Rat>()).max().unwrap();
                match &best {
                    Some(b) if ecc > *b => {}
                    Some(b) if ecc == *b => argmin.push(mu),
                    _ => { best = Some(ecc); argmin = vec![mu]; }
                }
            }
            let grid_min = best.unwrap();
            // Grid min can only overestimate the true radius.
            assert!(result.levels[0].radius <= grid_min, "seed {seed} n {n}");
            if result.levels[0].radius == grid_min {
                for mu in &argmin {
                    assert!(result.levels[1].face.contains(mu), "argmin escaped the face: seed {seed} n {n}");
                }
            }
            // Face vertices always satisfy eccentricity == exact radius.
            for v in &result.levels[1].vertices.vertices {
                let ecc = (0..n).map(|x| (0..n).map(|y| &v[y] * s.dist(x, y)).sum::<Rat>()).max().unwrap();
                assert_eq!(ecc, result.levels[0].radius, "vertex not radius-attaining: seed {seed} n {n}");
            }
            checked += 1;
        }
    }
    println!("stress: {checked} spaces verified against the grid oracle");
}
