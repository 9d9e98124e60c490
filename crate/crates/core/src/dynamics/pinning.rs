use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{CouplingMatrix, NetworkStructure};
use crate::rng::{stream_rng, Stream};

/// How the single controlled node is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PinStrategy {
    /// Node with the largest total outgoing influence `Σ_{j≠i} |a_ji|`;
    /// ties go to the smallest index.
    MaxColumnSum,
    /// Uniform over all nodes, drawn from the seed.
    Random,
    /// Smallest node of the unique root component. Requires a spanning tree.
    RootScc,
    Explicit(usize),
}

pub fn select_pinned_node(
    a: &CouplingMatrix,
    strategy: PinStrategy,
    structure: &NetworkStructure,
    seed: u64,
) -> Result<usize> {
    let m = a.size();
    match strategy {
        PinStrategy::MaxColumnSum => {
            let sums = a.column_sums();
            let mut best = 0;
            for (i, &s) in sums.iter().enumerate() {
                if s > sums[best] {
                    best = i;
                }
            }
            Ok(best)
        }
        PinStrategy::Random => Ok(stream_rng(seed, Stream::PinSelection).gen_range(0..m)),
        PinStrategy::RootScc => match structure.root() {
            Some(root) => Ok(root[0]),
            None => Err(Error::NoSpanningTree { roots: structure.root_components.len() }),
        },
        PinStrategy::Explicit(i) if i < m => Ok(i),
        PinStrategy::Explicit(i) => Err(Error::IndexOutOfRange { index: i, len: m }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::analyze_structure;

    fn matrix(w: &[&[f64]]) -> CouplingMatrix {
        CouplingMatrix::from_weighted_adjacency(&w.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn select(a: &CouplingMatrix, s: PinStrategy) -> Result<usize> {
        select_pinned_node(a, s, &analyze_structure(a), 0)
    }

    #[test]
    fn max_column_sum_picks_hub() {
        let a = matrix(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 3.0], &[0.0, 3.0, 0.0]]);
        assert_eq!(select(&a, PinStrategy::MaxColumnSum).unwrap(), 1);
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let a = matrix(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        assert_eq!(select(&a, PinStrategy::MaxColumnSum).unwrap(), 0);
    }

    #[test]
    fn root_component() {
        let a = matrix(&[&[0.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(select(&a, PinStrategy::RootScc).unwrap(), 0);
        let b = matrix(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]);
        assert!(matches!(select(&b, PinStrategy::RootScc), Err(Error::NoSpanningTree { roots: 2 })));
    }

    #[test]
    fn explicit_and_random() {
        let a = matrix(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(select(&a, PinStrategy::Explicit(1)).unwrap(), 1);
        assert!(select(&a, PinStrategy::Explicit(2)).is_err());
        let s = analyze_structure(&a);
        let r1 = select_pinned_node(&a, PinStrategy::Random, &s, 42).unwrap();
        let r2 = select_pinned_node(&a, PinStrategy::Random, &s, 42).unwrap();
        assert_eq!(r1, r2);
        assert!(r1 < 2);
    }
}
