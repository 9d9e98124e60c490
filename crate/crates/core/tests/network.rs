mod common;

use std::collections::BTreeSet;

use pinsync::network::{analyze_structure, generate, CouplingMatrix, GeneratorConfig};
use proptest::prelude::*;
use rand::Rng;

fn adjacency() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..20)
        .prop_flat_map(|m| prop::collection::vec(prop::collection::vec(prop_oneof![Just(0.0), 0.0..5.0f64], m), m))
}

proptest! {
    #[test]
    fn constructed_matrices_have_zero_row_sums(w in adjacency()) {
        let a = CouplingMatrix::from_weighted_adjacency(&w).unwrap();
        prop_assert!(a.max_abs_row_sum_residual() < 1e-12);
        prop_assert!(a.off_diagonal().all(|(_, _, v)| v > 0.0));
    }

    #[test]
    fn triplet_files_round_trip(w in adjacency()) {
        let a = CouplingMatrix::from_weighted_adjacency(&w).unwrap();
        let mut buf = Vec::new();
        a.write_triplets(&mut buf).unwrap();
        let b = CouplingMatrix::read_triplets(buf.as_slice()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generated_matrices_have_zero_row_sums(m in 8usize..60, seed in any::<u64>(), density in 0.05..0.6f64) {
        let mut sw = GeneratorConfig::small_world(m, seed);
        sw.k = 1 + (seed as usize % ((m - 1) / 2));
        for cfg in [sw, GeneratorConfig::random_sparse(m, density, seed)] {
            let a = generate(&cfg).unwrap();
            prop_assert!(a.max_abs_row_sum_residual() < 1e-12);
            prop_assert!(a.off_diagonal().all(|(_, _, v)| v >= 0.0));
        }
    }
}

#[test]
fn bilinear_identity_on_symmetric_matrices() {
    let mut rng = common::rng(11);
    for _ in 0..200 {
        let m = rng.gen_range(2..=20);
        let a = common::symmetric_random(&mut rng, m, 0.4);
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let direct: f64 = u.iter().zip(a.mul_vec(&v)).map(|(x, y)| x * y).sum();
        let formula = common::bilinear_by_differences(&a, &u, &v);
        let scale = direct.abs().max(formula.abs()).max(1e-300);
        assert!((direct - formula).abs() <= 1e-10 * scale.max(1.0), "{direct} vs {formula}");
    }
}

#[test]
fn structure_is_permutation_equivariant() {
    let mut rng = common::rng(12);
    for _ in 0..100 {
        let m = rng.gen_range(1..=30);
        let a = {
            let d = rng.gen_range(0.02..0.3);
            common::directed_random(&mut rng, m, d)
        };
        let mut perm: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let b = a.permuted(&perm).unwrap();
        let sa: BTreeSet<BTreeSet<usize>> =
            analyze_structure(&a).components.into_iter().map(|c| c.into_iter().collect()).collect();
        let sb: BTreeSet<BTreeSet<usize>> =
            analyze_structure(&b).components.into_iter().map(|c| c.into_iter().map(|k| perm[k]).collect()).collect();
        assert_eq!(sa, sb);
        assert_eq!(analyze_structure(&a).has_spanning_tree, analyze_structure(&b).has_spanning_tree);
    }
}

#[test]
fn symmetric_irreducible_iff_connected() {
    let mut rng = common::rng(13);
    let (mut connected, mut split) = (0, 0);
    for _ in 0..300 {
        let m = rng.gen_range(1..=50);
        let a = {
            let d = rng.gen_range(0.0..0.15);
            common::symmetric_random(&mut rng, m, d)
        };
        let bfs = common::connected_bfs(&a);
        assert_eq!(analyze_structure(&a).irreducible, bfs);
        if bfs {
            connected += 1
        } else {
            split += 1
        }
    }
    assert!(connected > 20 && split > 20, "{connected} connected, {split} split");
}

#[test]
fn frobenius_form_is_block_lower_triangular() {
    let mut rng = common::rng(14);
    for _ in 0..100 {
        let m = rng.gen_range(1..=30);
        let a = {
            let d = rng.gen_range(0.02..0.2);
            common::directed_random(&mut rng, m, d)
        };
        let s = analyze_structure(&a);
        let b = a.permuted(&s.frobenius_permutation).unwrap();
        let comp = |k: usize| s.component_of[s.frobenius_permutation[k]];
        for (i, j, _) in b.off_diagonal() {
            assert!(comp(j) <= comp(i), "entry ({i}, {j}) lies above the block diagonal");
        }
        // Diagonal blocks are contiguous.
        for k in 1..m {
            assert!(comp(k - 1) <= comp(k));
        }
    }
}

#[test]
fn spanning_tree_iff_single_root() {
    let mut rng = common::rng(15);
    for _ in 0..200 {
        let m = rng.gen_range(1..=25);
        let a = {
            let d = rng.gen_range(0.02..0.3);
            common::directed_random(&mut rng, m, d)
        };
        let s = analyze_structure(&a);
        // Oracle: some node reaches every node along j -> i edges.
        let reaches_all = |root: usize| {
            let mut seen = vec![false; m];
            let mut stack = vec![root];
            seen[root] = true;
            while let Some(j) = stack.pop() {
                for i in 0..m {
                    if !seen[i] && i != j && a.get(i, j) > 0.0 {
                        seen[i] = true;
                        stack.push(i);
                    }
                }
            }
            seen.iter().all(|&x| x)
        };
        let oracle = (0..m).any(reaches_all);
        assert_eq!(s.has_spanning_tree, oracle);
        if let Some(root) = s.root() {
            assert!(root.iter().all(|&r| reaches_all(r)));
        }
    }
}

#[test]
fn small_world_generation_is_deterministic() {
    let cfg = GeneratorConfig::small_world(200, 42);
    assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    let other = GeneratorConfig::small_world(200, 43);
    assert_ne!(generate(&cfg).unwrap(), generate(&other).unwrap());
}
