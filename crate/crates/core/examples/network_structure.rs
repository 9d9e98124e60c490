//! Build coupling matrices and inspect their graph structure.
//!
//! `cargo run --example network_structure`

use pinsync::network::{analyze_structure, generate, CouplingMatrix, GeneratorConfig};

fn main() -> pinsync::Result<()> {
    // Weighted small-world network, 60 nodes, 6 neighbours each.
    let sw = generate(&GeneratorConfig::small_world(60, 7))?;
    let s = analyze_structure(&sw);
    println!(
        "small-world: m = {}, {} edges, symmetric = {}, irreducible = {}",
        sw.size(),
        sw.nnz_off_diagonal(),
        sw.is_symmetric(1e-12),
        s.irreducible
    );
    println!("  max |row sum| = {:.1e}", sw.max_abs_row_sum_residual());

    // Sparse directed network: usually split into several strong components.
    let rnd = generate(&GeneratorConfig::random_sparse(40, 0.03, 3))?;
    let s = analyze_structure(&rnd);
    println!(
        "random directed: {} components, {} roots, spanning tree = {}",
        s.components.len(),
        s.root_components.len(),
        s.has_spanning_tree
    );

    // A chain 0 -> 1 -> 2 feeding a 2-cycle {3, 4}. Row i lists who node i hears.
    let w = vec![
        vec![0.0, 0.0, 0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 2.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0, 1.0, 0.0],
    ];
    let a = CouplingMatrix::from_weighted_adjacency(&w)?;
    let s = analyze_structure(&a);
    println!("chain: components {:?}, root {:?}", s.components, s.root());

    // Frobenius form: block lower-triangular after reordering.
    let f = a.permuted(&s.frobenius_permutation)?;
    println!("Frobenius order {:?}:", s.frobenius_permutation);
    for i in 0..f.size() {
        let row: Vec<String> = (0..f.size()).map(|j| format!("{:5.1}", f.get(i, j) + 0.0)).collect();
        println!("  {}", row.join(" "));
    }

    // Triplet files round-trip exactly.
    let mut buf = Vec::new();
    a.write_triplets(&mut buf)?;
    print!("triplet file:\n{}", String::from_utf8_lossy(&buf));
    assert_eq!(CouplingMatrix::read_triplets(buf.as_slice())?, a);
    Ok(())
}
