use std::sync::OnceLock;

use bandfold::banding::{banded_dome, banded_tetrahedron, BandParams};
use bandfold::geom::{polygon_area, Vec2};
use bandfold::mesh::{MeshLevel, PolyMesh};
use bandfold::trees::sample_cut_tree;
use bandfold::unfold::{detect_overlap, PlanarLayout, Unfolder};
use proptest::prelude::*;

struct Fixture {
    mesh: PolyMesh,
    unfolder: Unfolder,
}

fn fixture(tetra: bool) -> &'static Fixture {
    static P0: OnceLock<Fixture> = OnceLock::new();
    static TETRA: OnceLock<Fixture> = OnceLock::new();
    let make = |mesh: PolyMesh| Fixture { unfolder: Unfolder::new(&mesh), mesh };
    if tetra {
        TETRA.get_or_init(|| make(banded_tetrahedron(BandParams::default()).unwrap().0))
    } else {
        P0.get_or_init(|| make(banded_dome(MeshLevel(0), BandParams::default()).unwrap().0))
    }
}

fn position(mesh: &PolyMesh, layout: &PlanarLayout, face: usize, vertex: usize) -> Vec2 {
    let k = mesh.faces()[face].iter().position(|&v| v == vertex).unwrap();
    layout.polygons[face].as_ref().unwrap()[k]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planar_faces_are_congruent(seed in any::<u64>(), tetra in any::<bool>()) {
        let Fixture { mesh, unfolder } = fixture(tetra);
        let tree = sample_cut_tree(mesh, seed).complement();
        let layout = unfolder.unfold(&tree, 0).unwrap();
        for f in 0..mesh.num_faces() {
            let p3 = mesh.face_points(f);
            let p2 = layout.polygons[f].as_ref().unwrap();
            let n = p3.len();
            for i in 0..n {
                let l3 = (p3[(i + 1) % n] - p3[i]).norm();
                let l2 = (p2[(i + 1) % n] - p2[i]).norm();
                prop_assert!((l2 - l3).abs() <= 1e-7 * l3, "face {} edge {}: {} vs {}", f, i, l2, l3);
                // Diagonals pin down the shape, not just the side lengths.
                let d3 = (p3[(i + 2) % n] - p3[i]).norm();
                let d2 = (p2[(i + 2) % n] - p2[i]).norm();
                prop_assert!((d2 - d3).abs() <= 1e-7 * d3);
            }
        }
    }

    #[test]
    fn shared_edges_coincide(seed in any::<u64>(), tetra in any::<bool>()) {
        let Fixture { mesh, unfolder } = fixture(tetra);
        let tree = sample_cut_tree(mesh, seed).complement();
        let layout = unfolder.unfold(&tree, 0).unwrap();
        let tol = 1e-7 * layout.scale;
        for &e in tree.edges() {
            let edge = &mesh.edges()[e];
            let [f, g] = edge.faces;
            for v in edge.vertices {
                let d = (position(mesh, &layout, f, v) - position(mesh, &layout, g, v)).norm();
                prop_assert!(d <= tol, "edge {} vertex {} off by {}", e, v, d);
            }
        }
    }

    #[test]
    fn area_is_conserved(seed in any::<u64>(), tetra in any::<bool>()) {
        let Fixture { mesh, unfolder } = fixture(tetra);
        let tree = sample_cut_tree(mesh, seed).complement();
        let layout = unfolder.unfold(&tree, 0).unwrap();
        let planar: f64 = layout.placed().map(|(_, p)| polygon_area(p)).sum();
        let spatial = mesh.surface_area();
        prop_assert!((planar - spatial).abs() <= 1e-6 * spatial);
        prop_assert!(layout.placed().all(|(_, p)| polygon_area(p) > 0.0));
    }

    #[test]
    fn root_choice_is_a_rigid_motion(seed in any::<u64>(), root in 0usize..28) {
        let Fixture { mesh, unfolder } = fixture(true);
        let tree = sample_cut_tree(mesh, seed).complement();
        let a = unfolder.unfold(&tree, 0).unwrap();
        let b = unfolder.unfold(&tree, root).unwrap();
        // The motion carrying a's copy of the root face onto b's.
        let (pa, pb) = (a.polygons[root].as_ref().unwrap(), b.polygons[root].as_ref().unwrap());
        let (da, db) = (pa[1] - pa[0], pb[1] - pb[0]);
        let angle = db.y.atan2(db.x) - da.y.atan2(da.x);
        let (s, c) = angle.sin_cos();
        let map = |p: Vec2| {
            let q = p - pa[0];
            Vec2::new(c * q.x - s * q.y, s * q.x + c * q.y) + pb[0]
        };
        for f in 0..mesh.num_faces() {
            let (fa, fb) = (a.polygons[f].as_ref().unwrap(), b.polygons[f].as_ref().unwrap());
            for (p, q) in fa.iter().zip(fb) {
                prop_assert!((map(*p) - q).norm() < 1e-7 * a.scale);
            }
        }
        prop_assert_eq!(detect_overlap(&a).overlapping, detect_overlap(&b).overlapping);
    }
}
