//! Small graphs with known spanning-tree counts.

use std::collections::HashMap;

use bandfold::trees::{wilson, EdgeGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Spanning-tree count by the matrix-tree theorem: the determinant of the
/// Laplacian with row and column 0 removed, by fraction-free elimination.
pub fn kirchhoff(n: usize, edges: &[[usize; 2]]) -> i128 {
    let mut lap = vec![vec![0i128; n]; n];
    for &[a, b] in edges {
        lap[a][a] += 1;
        lap[b][b] += 1;
        lap[a][b] -= 1;
        lap[b][a] -= 1;
    }
    let mut m: Vec<Vec<i128>> = lap[1..].iter().map(|row| row[1..].to_vec()).collect();
    let k = n - 1;
    let mut sign = 1;
    let mut prev = 1i128;
    for i in 0..k {
        if m[i][i] == 0 {
            let Some(r) = (i + 1..k).find(|&r| m[r][i] != 0) else { return 0 };
            m.swap(i, r);
            sign = -sign;
        }
        for r in i + 1..k {
            for c in i + 1..k {
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) / prev;
            }
        }
        prev = m[i][i];
    }
    sign * m[k - 1][k - 1]
}

/// Every (n-1)-edge subset that connects all vertices.
pub fn all_spanning_trees(n: usize, edges: &[[usize; 2]]) -> Vec<Vec<usize>> {
    (0u32..1 << edges.len())
        .filter(|mask| mask.count_ones() as usize == n - 1)
        .map(|mask| (0..edges.len()).filter(|&e| mask >> e & 1 == 1).collect::<Vec<_>>())
        .filter(|set| {
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] != x {
                    p[x] = find(p, p[x]);
                }
                p[x]
            }
            set.iter().all(|&e| {
                let (a, b) = (find(&mut parent, edges[e][0]), find(&mut parent, edges[e][1]));
                parent[a] = b;
                a != b
            })
        })
        .collect()
}

pub fn small_graphs() -> Vec<(&'static str, usize, Vec<[usize; 2]>)> {
    vec![
        ("triangle", 3, vec![[0, 1], [1, 2], [2, 0]]),
        ("square", 4, vec![[0, 1], [1, 2], [2, 3], [3, 0]]),
        ("pentagon", 5, vec![[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]]),
        ("triangle with tail", 4, vec![[0, 1], [1, 2], [2, 0], [2, 3]]),
        ("diamond", 4, vec![[0, 1], [1, 2], [2, 3], [3, 0], [0, 2]]),
        ("bowtie", 5, vec![[0, 1], [1, 2], [2, 0], [2, 3], [3, 4], [4, 2]]),
        ("two squares", 6, vec![[0, 1], [1, 2], [2, 3], [3, 0], [1, 4], [4, 5], [5, 2]]),
        ("K4", 4, vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]),
    ]
}

/// Chi-square p-value of `samples` Wilson trees against the uniform distribution
/// over all spanning trees, which are enumerated and checked against the
/// matrix-tree count.
pub fn wilson_uniformity_p(n: usize, edges: &[[usize; 2]], samples: usize, seed: u64) -> f64 {
    let trees = all_spanning_trees(n, edges);
    assert_eq!(trees.len() as i128, kirchhoff(n, edges), "enumeration vs matrix-tree");
    let index: HashMap<Vec<usize>, usize> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let graph = EdgeGraph::new(n, edges.to_vec());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = vec![0usize; trees.len()];
    for _ in 0..samples {
        observed[index[&wilson(&graph, &mut rng)]] += 1;
    }
    if trees.len() == 1 {
        return 1.0;
    }
    let expected = samples as f64 / trees.len() as f64;
    let chi2: f64 = observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new((trees.len() - 1) as f64).unwrap().cdf(chi2)
}
