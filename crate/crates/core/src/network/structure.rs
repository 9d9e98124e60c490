use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::CouplingMatrix;
use crate::error::{invalid, Error, Result};

/// Strong-connectivity structure of the influence graph (`j -> i` iff `a_ij > 0`).
///
/// Components are numbered in topological order of the condensation, sources
/// first, ties broken by smallest member node. Node lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkStructure {
    pub components: Vec<Vec<usize>>,
    /// `component_of[node]` indexes `components`.
    pub component_of: Vec<usize>,
    /// `(from, to)` component pairs, sorted and deduplicated.
    pub condensation_edges: Vec<(usize, usize)>,
    /// Components with no incoming condensation edge.
    pub root_components: Vec<usize>,
    pub irreducible: bool,
    pub has_spanning_tree: bool,
    /// `frobenius_permutation[k]` is the old index of new node `k`. Permuting
    /// `A` this way gives a block lower-triangular matrix with irreducible
    /// (or 1x1 zero) diagonal blocks.
    pub frobenius_permutation: Vec<usize>,
}

impl NetworkStructure {
    /// The single root component, when the graph has a spanning tree.
    pub fn root(&self) -> Option<&[usize]> {
        match self.root_components.as_slice() {
            [r] => Some(&self.components[*r]),
            _ => None,
        }
    }
}

pub fn analyze_structure(a: &CouplingMatrix) -> NetworkStructure {
    let m = a.size();
    // Row i lists the nodes j with a_ij > 0, i.e. the edges j -> i reversed.
    // Strong components of the reversed graph are the same.
    let raw = tarjan(m, |i| a.row(i).map(|(j, _)| j));

    let mut sccs: Vec<Vec<usize>> = raw
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    sccs.sort_by_key(|c| c[0]);

    let mut comp = vec![0; m];
    for (c, nodes) in sccs.iter().enumerate() {
        for &v in nodes {
            comp[v] = c;
        }
    }
    let mut edges = BTreeSet::new();
    for (i, j, _) in a.off_diagonal() {
        if comp[i] != comp[j] {
            edges.insert((comp[j], comp[i]));
        }
    }

    // Kahn's algorithm, smallest-member tie break (sccs already sorted by it).
    let k = sccs.len();
    let mut indegree = vec![0usize; k];
    let mut succ = vec![Vec::new(); k];
    for &(from, to) in &edges {
        indegree[to] += 1;
        succ[from].push(to);
    }
    let roots_old: Vec<usize> = (0..k).filter(|&c| indegree[c] == 0).collect();
    let mut heap: BinaryHeap<Reverse<usize>> = roots_old.iter().map(|&c| Reverse(c)).collect();
    let mut order = Vec::with_capacity(k);
    while let Some(Reverse(c)) = heap.pop() {
        order.push(c);
        for &t in &succ[c] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                heap.push(Reverse(t));
            }
        }
    }
    debug_assert_eq!(order.len(), k, "condensation must be acyclic");

    let mut rank = vec![0; k];
    for (pos, &c) in order.iter().enumerate() {
        rank[c] = pos;
    }
    let components: Vec<Vec<usize>> = order.iter().map(|&c| sccs[c].clone()).collect();
    let component_of: Vec<usize> = comp.iter().map(|&c| rank[c]).collect();
    let condensation_edges: Vec<(usize, usize)> = {
        let mut e: Vec<_> = edges.iter().map(|&(f, t)| (rank[f], rank[t])).collect();
        e.sort_unstable();
        e
    };
    let mut root_components: Vec<usize> = roots_old.iter().map(|&c| rank[c]).collect();
    root_components.sort_unstable();
    let frobenius_permutation = components.iter().flatten().copied().collect();

    NetworkStructure {
        irreducible: components.len() == 1,
        has_spanning_tree: root_components.len() == 1,
        components,
        component_of,
        condensation_edges,
        root_components,
        frobenius_permutation,
    }
}

/// Iterative Tarjan strongly-connected-components.
fn tarjan<F, I>(n: usize, successors: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    const UNVISITED: usize = usize::MAX;
    let succ: Vec<Vec<usize>> = (0..n).map(|v| successors(v).collect()).collect();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    // (node, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut scc = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    scc.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(scc);
            }
        }
    }
    out
}

/// Adds a target node 0 that drives node `pinned` with gain `eps`. Original
/// node `i` becomes node `i + 1`. The result has root component `{0}` exactly
/// when `A` has a spanning tree rooted in the pinned node's component.
pub fn augment_master_slave(a: &CouplingMatrix, eps: f64, pinned: usize) -> Result<CouplingMatrix> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("control gain must be positive, got {eps}")));
    }
    let m = a.size();
    if pinned >= m {
        return Err(Error::IndexOutOfRange { index: pinned, len: m });
    }
    let shifted = a.off_diagonal().map(|(i, j, v)| (i + 1, j + 1, v));
    CouplingMatrix::from_triplets(m + 1, shifted.chain(std::iter::once((pinned + 1, 0, eps))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(w: &[&[f64]]) -> CouplingMatrix {
        CouplingMatrix::from_weighted_adjacency(&w.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn symmetric_pair_is_irreducible() {
        let s = analyze_structure(&matrix(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert!(s.irreducible);
        assert!(s.has_spanning_tree);
        assert_eq!(s.components, vec![vec![0, 1]]);
    }

    #[test]
    fn single_edge_rooted_at_source() {
        let s = analyze_structure(&matrix(&[&[0.0, 0.0], &[2.0, 0.0]]));
        assert!(!s.irreducible);
        assert!(s.has_spanning_tree);
        assert_eq!(s.components, vec![vec![0], vec![1]]);
        assert_eq!(s.root(), Some(&[0][..]));
        assert_eq!(s.condensation_edges, vec![(0, 1)]);
    }

    #[test]
    fn two_sources_no_spanning_tree() {
        let s = analyze_structure(&matrix(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]));
        assert!(!s.has_spanning_tree);
        assert_eq!(s.root_components.len(), 2);
        let roots: Vec<_> = s.root_components.iter().map(|&c| s.components[c].clone()).collect();
        assert_eq!(roots, vec![vec![0], vec![1]]);
    }

    #[test]
    fn frobenius_order_puts_sources_first() {
        // 2 -> 0 -> 1, and 1 <-> 3
        let s = analyze_structure(&matrix(&[
            &[0.0, 0.0, 1.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
        ]));
        assert_eq!(s.components, vec![vec![2], vec![0], vec![1, 3]]);
        assert_eq!(s.frobenius_permutation, vec![2, 0, 1, 3]);
        assert_eq!(s.root(), Some(&[2][..]));
    }

    #[test]
    fn augmentation_matches_construction() {
        let a = matrix(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let aug = augment_master_slave(&a, 0.5, 0).unwrap();
        let d = aug.to_dense();
        let expect = [[0.0, 0.0, 0.0], [0.5, -1.5, 1.0], [0.0, 1.0, -1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[(i, j)], expect[i][j]);
            }
        }
        let s = analyze_structure(&aug);
        assert!(s.has_spanning_tree);
        assert_eq!(s.root(), Some(&[0][..]));
    }

    #[test]
    fn augmentation_rejects_bad_input() {
        let a = matrix(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(augment_master_slave(&a, 0.0, 0).is_err());
        assert!(augment_master_slave(&a, 1.0, 2).is_err());
    }

    #[test]
    fn pinning_outside_root_leaves_two_roots() {
        // 0 -> 1; pinning node 1 adds 0' -> 1, so {0} and {0'} are both roots.
        let a = matrix(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let s = analyze_structure(&augment_master_slave(&a, 1.0, 1).unwrap());
        assert!(!s.has_spanning_tree);
        let s = analyze_structure(&augment_master_slave(&a, 1.0, 0).unwrap());
        assert!(s.has_spanning_tree);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 20_000;
        let a = CouplingMatrix::from_triplets(n, (1..n).map(|i| (i, i - 1, 1.0))).unwrap();
        let s = analyze_structure(&a);
        assert_eq!(s.components.len(), n);
        assert!(s.has_spanning_tree);
    }
}
