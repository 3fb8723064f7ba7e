mod common;

use std::collections::HashMap;
use std::sync::OnceLock;

use bandfold::banding::{banded_dome, BandParams};
use bandfold::mesh::{MeshLevel, PolyMesh};
use bandfold::trees::{sample_cut_tree, to_connection_tree, to_cut_tree, wilson, ConnectionTree, CutTree, EdgeGraph};
use common::spanning::{kirchhoff, small_graphs, wilson_uniformity_p};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p0() -> &'static PolyMesh {
    static MESH: OnceLock<PolyMesh> = OnceLock::new();
    MESH.get_or_init(|| banded_dome(MeshLevel(0), BandParams::default()).unwrap().0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cut_connection_round_trip(seed in any::<u64>()) {
        let mesh = p0();
        let cut = sample_cut_tree(mesh, seed);
        let conn = to_connection_tree(&cut, mesh).unwrap();
        prop_assert_eq!(conn.edges().len(), mesh.num_faces() - 1);
        prop_assert_eq!(&to_cut_tree(&conn, mesh).unwrap(), &cut);
        prop_assert_eq!(&cut.complement(), &conn);
        prop_assert_eq!(&CutTree::from_json(mesh, &cut.to_json()).unwrap(), &cut);
        prop_assert_eq!(&ConnectionTree::from_json(mesh, &conn.to_json()).unwrap(), &conn);
    }
}

#[test]
fn wilson_is_uniform_on_small_graphs() {
    for (name, n, edges) in small_graphs() {
        assert!(kirchhoff(n, &edges) <= 16);
        let p = wilson_uniformity_p(n, &edges, 100_000, 2024);
        assert!(p > 0.001, "{name}: p = {p}");
    }
}
#[test]
fn triangle_trees_each_have_frequency_one_third() {
    let graph = EdgeGraph::new(3, vec![[0, 1], [1, 2], [2, 0]]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = HashMap::new();
    for _ in 0..100_000 {
        *counts.entry(wilson(&graph, &mut rng)).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 3);
    for c in counts.values() {
        assert!((*c as f64 / 1e5 - 1.0 / 3.0).abs() < 0.01);
    }
}

#[test]
fn kirchhoff_oracle_known_values() {
    // K5 has 5^3 trees; the 3x3 grid graph has 192.
    let k5: Vec<[usize; 2]> = (0..5).flat_map(|a| (a + 1..5).map(move |b| [a, b])).collect();
    assert_eq!(kirchhoff(5, &k5), 125);
    let mut grid = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let v = 3 * r + c;
            if c < 2 {
                grid.push([v, v + 1]);
            }
            if r < 2 {
                grid.push([v, v + 3]);
            }
        }
    }
    assert_eq!(kirchhoff(9, &grid), 192);
}
