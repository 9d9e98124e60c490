#![allow(dead_code)]

use pinsync::network::CouplingMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on (0, 1].
pub fn weight(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Symmetric, connected: a random tree plus extra edges with probability `extra`.
pub fn symmetric_connected(rng: &mut ChaCha8Rng, m: usize, extra: f64) -> CouplingMatrix {
    let mut w = vec![vec![0.0; m]; m];
    for i in 1..m {
        let j = rng.gen_range(0..i);
        let v = weight(rng);
        w[i][j] = v;
        w[j][i] = v;
    }
    for i in 0..m {
        for j in i + 1..m {
            if w[i][j] == 0.0 && rng.gen::<f64>() < extra {
                let v = weight(rng);
                w[i][j] = v;
                w[j][i] = v;
            }
        }
    }
    CouplingMatrix::from_weighted_adjacency(&w).unwrap()
}

/// Symmetric, each pair present with probability `density` (may be disconnected).
pub fn symmetric_random(rng: &mut ChaCha8Rng, m: usize, density: f64) -> CouplingMatrix {
    let mut w = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            if rng.gen::<f64>() < density {
                let v = weight(rng);
                w[i][j] = v;
                w[j][i] = v;
            }
        }
    }
    CouplingMatrix::from_weighted_adjacency(&w).unwrap()
}

/// Directed, each ordered pair present with probability `density`.
pub fn directed_random(rng: &mut ChaCha8Rng, m: usize, density: f64) -> CouplingMatrix {
    let mut w = vec![vec![0.0; m]; m];
    for (i, row) in w.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j && rng.gen::<f64>() < density {
                *v = weight(rng);
            }
        }
    }
    CouplingMatrix::from_weighted_adjacency(&w).unwrap()
}

/// Directed and strongly connected: a cycle through a random order plus extra arcs.
pub fn directed_irreducible(rng: &mut ChaCha8Rng, m: usize, extra: f64) -> CouplingMatrix {
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut w = vec![vec![0.0; m]; m];
    for k in 0..m {
        let (from, to) = (order[k], order[(k + 1) % m]);
        if from != to {
            w[to][from] = weight(rng);
        }
    }
    for (i, row) in w.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j && *v == 0.0 && rng.gen::<f64>() < extra {
                *v = weight(rng);
            }
        }
    }
    CouplingMatrix::from_weighted_adjacency(&w).unwrap()
}

/// Undirected connectivity by breadth-first search over nonzero entries.
pub fn connected_bfs(a: &CouplingMatrix) -> bool {
    let m = a.size();
    let mut seen = vec![false; m];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..m {
            if !seen[j] && (a.get(i, j) != 0.0 || a.get(j, i) != 0.0) && i != j {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// `−Σ_{i<j} a_ij (u_i − u_j)(v_i − v_j)`.
pub fn bilinear_by_differences(a: &CouplingMatrix, u: &[f64], v: &[f64]) -> f64 {
    let m = a.size();
    let mut total = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            total -= a.get(i, j) * (u[i] - u[j]) * (v[i] - v[j]);
        }
    }
    total
}
