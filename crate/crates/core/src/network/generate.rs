use std::collections::BTreeSet;

use rand::Rng;

use super::CouplingMatrix;
use crate::error::{invalid, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkKind {
    /// Watts-Strogatz ring lattice with random rewiring.
    SmallWorld,
    /// Each off-diagonal entry (or unordered pair when symmetric) is present
    /// with probability `density`.
    RandomSparse,
    /// A prebuilt matrix, returned unchanged by [`generate`].
    Explicit(CouplingMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub kind: NetworkKind,
    pub m: usize,
    /// Ring-lattice neighbours per side (small-world).
    pub k: usize,
    pub p_rewire: f64,
    /// Fraction of nonzero off-diagonal entries (random-sparse).
    pub density: f64,
    /// Equal weights in both directions. Small-world structure is always
    /// undirected; this flag only controls whether `a_ij == a_ji`.
    pub symmetric: bool,
    pub weight_low: f64,
    pub weight_high: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn small_world(m: usize, seed: u64) -> Self {
        Self {
            kind: NetworkKind::SmallWorld,
            m,
            k: 3,
            p_rewire: 0.1,
            density: 0.2,
            symmetric: true,
            weight_low: 0.0,
            weight_high: 1.0,
            seed,
        }
    }

    pub fn random_sparse(m: usize, density: f64, seed: u64) -> Self {
        Self { kind: NetworkKind::RandomSparse, density, symmetric: false, ..Self::small_world(m, seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m", "need at least one node"));
        }
        if !(self.weight_low >= 0.0 && self.weight_low.is_finite()) {
            return Err(invalid("weight_low", format!("must be finite and >= 0, got {}", self.weight_low)));
        }
        // Equal bounds are accepted as a constant weight.
        if !(self.weight_high >= self.weight_low && self.weight_high.is_finite()) {
            return Err(invalid(
                "weight_high",
                format!("must be finite and >= weight_low ({}), got {}", self.weight_low, self.weight_high),
            ));
        }
        match &self.kind {
            NetworkKind::SmallWorld => {
                if !(0.0..=1.0).contains(&self.p_rewire) {
                    return Err(invalid("p_rewire", format!("must lie in [0, 1], got {}", self.p_rewire)));
                }
                if self.k < 1 || 2 * self.k >= self.m {
                    return Err(invalid("k", format!("need 1 <= k < m/2, got k = {} with m = {}", self.k, self.m)));
                }
            }
            NetworkKind::RandomSparse => {
                if !(self.density > 0.0 && self.density <= 1.0) {
                    return Err(invalid("density", format!("must lie in (0, 1], got {}", self.density)));
                }
            }
            NetworkKind::Explicit(a) => {
                if a.size() != self.m {
                    return Err(invalid(
                        "m",
                        format!("explicit matrix has {} nodes, config says {}", a.size(), self.m),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Builds a coupling matrix. Deterministic in `config.seed`.
pub fn generate(config: &GeneratorConfig) -> Result<CouplingMatrix> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, Stream::Network);
    let span = config.weight_high - config.weight_low;
    let weight = |rng: &mut rand_chacha::ChaCha8Rng| config.weight_low + span * rng.gen::<f64>();

    let m = config.m;
    let mut entries = Vec::new();
    match &config.kind {
        NetworkKind::Explicit(a) => return Ok(a.clone()),
        NetworkKind::SmallWorld => {
            let adjacency = watts_strogatz(m, config.k, config.p_rewire, &mut rng);
            for (i, neighbours) in adjacency.iter().enumerate() {
                for &j in neighbours.range(i + 1..) {
                    let w = weight(&mut rng);
                    let w_back = if config.symmetric { w } else { weight(&mut rng) };
                    entries.push((i, j, w));
                    entries.push((j, i, w_back));
                }
            }
        }
        NetworkKind::RandomSparse => {
            if config.symmetric {
                for i in 0..m {
                    for j in i + 1..m {
                        if rng.gen::<f64>() < config.density {
                            let w = weight(&mut rng);
                            entries.push((i, j, w));
                            entries.push((j, i, w));
                        }
                    }
                }
            } else {
                for i in 0..m {
                    for j in 0..m {
                        if i != j && rng.gen::<f64>() < config.density {
                            entries.push((i, j, weight(&mut rng)));
                        }
                    }
                }
            }
        }
    }
    CouplingMatrix::from_triplets(m, entries)
}

/// Undirected Watts-Strogatz graph as sorted neighbour sets. Each lattice
/// edge `(u, u + d)` is visited once per distance `d`, and with probability
/// `p` its far end is moved to a uniformly chosen node that is neither `u`
/// nor already adjacent to `u`.
fn watts_strogatz(m: usize, k: usize, p: f64, rng: &mut impl Rng) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); m];
    for u in 0..m {
        for d in 1..=k {
            let v = (u + d) % m;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    if p == 0.0 {
        return adj;
    }
    for d in 1..=k {
        for u in 0..m {
            let v = (u + d) % m;
            if rng.gen::<f64>() >= p {
                continue;
            }
            if !adj[u].contains(&v) || adj[u].len() >= m - 1 {
                continue;
            }
            let w = loop {
                let w = rng.gen_range(0..m);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    adj
}
