//! Banded geodesic domes and their random edge unfoldings.
//!
//! The crate builds convex polyhedra in which every triangle of a base mesh
//! is replaced by a "banded hexagon" (an inner hexagon ringed by six
//! quadrilaterals), samples random cut trees, unfolds the surface into the
//! plane and measures how often the unfolding overlaps.
//!
//! Module map:
//! - [`mesh`]: indexed polyhedral meshes, icosahedron and geodesic domes.
//! - [`banding`]: the banded-hexagon construction, unit labels and clusters.
//! - [`trees`]: cut trees, connection trees and the pattern detectors.
//! - [`unfold`]: planar layouts, overlap detection and SVG output.
//! - [`experiments`]: Monte Carlo harness, bound arithmetic and search.

pub mod banding;
pub mod experiments;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod trees;
pub mod unfold;

pub use banding::{band_mesh, banded_dome, banded_tetrahedron, BandParams, UnitLabeling};
pub use mesh::{build_icosahedron, geodesic_dome, MeshLevel, PolyMesh};
pub use trees::{ConnectionTree, CutTree, OverlapPattern};

pub use unfold::{detect_overlap, unfold, OverlapReport, PlanarLayout};
