//! Indexed convex polyhedral meshes.
//!
//! A [`PolyMesh`] stores vertex positions and counterclockwise (seen from
//! outside) face loops. Edges are derived once at construction and numbered
//! in order of first appearance while scanning the faces, so every id in the
//! crate is a deterministic function of construction order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{centroid3, newell_normal, Vec3};

/// Largest subdivision level accepted by [`geodesic_dome`] unless overridden.
pub const DEFAULT_MAX_LEVEL: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("face {face} has {len} vertices; at least 3 are required")]
    DegenerateFace { face: usize, len: usize },
    #[error("face {face} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange { face: usize, vertex: usize, count: usize },
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("directed edge {from}->{to} appears in more than one face")]
    InconsistentOrientation { from: usize, to: usize },
    #[error("edge {a}-{b} is bordered by only one face")]
    OpenEdge { a: usize, b: usize },
    #[error("level {level} exceeds the configured maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },
}

/// Subdivision level of a geodesic dome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MeshLevel(pub u32);

impl MeshLevel {
    pub fn get(self) -> u32 {
        self.0
    }

    /// `4^L`, the face multiplier of one level.
    pub fn scale(self) -> u64 {
        4u64.pow(self.0)
    }
}

impl From<u32> for MeshLevel {
    fn from(level: u32) -> Self {
        MeshLevel(level)
    }
}

/// An undirected mesh edge with its two incident faces.
///
/// `vertices` is sorted ascending. `faces[0]` is the face that traverses the
/// edge from `vertices[0]` to `vertices[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub faces: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct PolyMesh {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<(usize, usize), usize>,
    /// `face_edges[f][k]` is the edge between `faces[f][k]` and `faces[f][k + 1]`.
    face_edges: Vec<Vec<usize>>,
}

impl PolyMesh {
    /// Builds a closed, consistently oriented mesh from face loops.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        let count = vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, lp) in faces.iter().enumerate() {
            if lp.len() < 3 {
                return Err(MeshError::DegenerateFace { face: f, len: lp.len() });
            }
            for (k, &v) in lp.iter().enumerate() {
                if v >= count {
                    return Err(MeshError::VertexOutOfRange { face: f, vertex: v, count });
                }
                if lp[..k].contains(&v) {
                    return Err(MeshError::RepeatedVertex { face: f, vertex: v });
                }
            }
            for k in 0..lp.len() {
                let from = lp[k];
                let to = lp[(k + 1) % lp.len()];
                if directed.insert((from, to), f).is_some() {
                    return Err(MeshError::InconsistentOrientation { from, to });
                }
            }
        }

        let mut edges = Vec::with_capacity(directed.len() / 2);
        let mut edge_lookup = HashMap::with_capacity(directed.len() / 2);
        let mut face_edges = Vec::with_capacity(faces.len());
        for lp in &faces {
            let mut ids = Vec::with_capacity(lp.len());
            for k in 0..lp.len() {
                let from = lp[k];
                let to = lp[(k + 1) % lp.len()];
                let key = (from.min(to), from.max(to));
                let id = match edge_lookup.get(&key) {
                    Some(&id) => id,
                    None => {
                        let open = MeshError::OpenEdge { a: key.0, b: key.1 };
                        let forward = *directed.get(&(key.0, key.1)).ok_or(open.clone())?;
                        let backward = *directed.get(&(key.1, key.0)).ok_or(open)?;
                        let id = edges.len();
                        edges.push(Edge { vertices: [key.0, key.1], faces: [forward, backward] });
                        edge_lookup.insert(key, id);
                        id
                    }
                };
                ids.push(id);
            }
            face_edges.push(ids);
        }

        Ok(PolyMesh { vertices, faces, edges, edge_lookup, face_edges })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn face_edges(&self, face: usize) -> &[usize] {
        &self.face_edges[face]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn face_points(&self, face: usize) -> Vec<Vec3> {
        self.faces[face].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Unit outward normal (Newell) of a face.
    pub fn face_normal(&self, face: usize) -> Vec3 {
        newell_normal(&self.face_points(face)).normalize()
    }

    pub fn face_area(&self, face: usize) -> f64 {
        0.5 * newell_normal(&self.face_points(face)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.num_faces()).map(|f| self.face_area(f)).sum()
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let [a, b] = self.edges[edge].vertices;
        (self.vertices[a] - self.vertices[b]).norm()
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        // The meshes here are star-shaped around the origin; the exact
        // quadratic scan is only used for small meshes.
        if self.vertices.len() <= 2048 {
            let mut best: f64 = 0.0;
            for (i, p) in self.vertices.iter().enumerate() {
                for q in &self.vertices[i + 1..] {
                    best = best.max((p - q).norm());
                }
            }
            best
        } else {
            let c = centroid3(&self.vertices);
            2.0 * self.vertices.iter().map(|p| (p - c).norm()).fold(0.0, f64::max)
        }
    }

    /// Angular defect `2π − Σ(face angles)` at every vertex.
    pub fn vertex_curvatures(&self) -> Vec<f64> {
        let mut angle_sum = vec![0.0; self.num_vertices()];
        for lp in &self.faces {
            let n = lp.len();
            for k in 0..n {
                let prev = &self.vertices[lp[(k + n - 1) % n]];
                let here = &self.vertices[lp[k]];
                let next = &self.vertices[lp[(k + 1) % n]];
                angle_sum[lp[k]] += crate::geom::corner_angle(prev, here, next);
            }
        }
        angle_sum.into_iter().map(|s| 2.0 * std::f64::consts::PI - s).collect()
    }

    /// The face on the other side of `edge` from `face`.
    pub fn opposite_face(&self, edge: usize, face: usize) -> usize {
        let [f0, f1] = self.edges[edge].faces;
        if f0 == face {
            f1
        } else {
            f0
        }
    }

    /// Vertex adjacency lists in edge-id order, with the connecting edge id.
    pub fn vertex_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.vertices[0]].push((e.vertices[1], id));
            adj[e.vertices[1]].push((e.vertices[0], id));
        }
        adj
    }

    /// Whether every face is a triangle.
    pub fn is_triangulated(&self) -> bool {
        self.faces.iter().all(|f| f.len() == 3)
    }
}

/// Result of [`validate`]. Failures are reported, not raised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub closed_manifold: bool,
    pub euler_consistent: bool,
    pub oriented: bool,
    pub convex: bool,
    pub planar: bool,
    /// Largest distance of a face vertex from its face's least-squares plane.
    pub max_planarity_deviation: f64,
    /// Largest signed distance of a non-face vertex from a face plane
    /// (negative for a strictly convex mesh).
    pub max_convexity_distance: f64,
    pub convexity_tolerance: f64,
}

impl ValidityReport {
    pub fn all_ok(&self) -> bool {
        self.closed_manifold && self.euler_consistent && self.oriented && self.convex && self.planar
    }
}

/// Relative tolerance for the convexity test, times the mesh diameter.
pub const CONVEXITY_EPS: f64 = 1e-9;
/// Relative planarity budget, times the mesh diameter.
pub const PLANARITY_EPS: f64 = 1e-7;

/// Checks the closed-manifold, Euler, orientation, planarity and strict convexity invariants.
pub fn validate(mesh: &PolyMesh) -> ValidityReport {
    let closed_manifold = mesh.edges.iter().all(|e| e.faces[0] != e.faces[1]);
    let directed_total: usize = mesh.faces.iter().map(Vec::len).sum();
    let oriented = directed_total == 2 * mesh.num_edges();
    let euler_consistent = mesh.euler_characteristic() == 2;

    let diameter = mesh.diameter();
    let tol = CONVEXITY_EPS * diameter;
    let mut max_planarity_deviation: f64 = 0.0;
    let mut max_convexity_distance = f64::NEG_INFINITY;
    let mut in_face = vec![usize::MAX; mesh.num_vertices()];
    for (f, lp) in mesh.faces.iter().enumerate() {
        let pts = mesh.face_points(f);
        let normal = newell_normal(&pts).normalize();
        let center = centroid3(&pts);
        for p in &pts {
            max_planarity_deviation = max_planarity_deviation.max((p - center).dot(&normal).abs());
        }
        for &v in lp {
            in_face[v] = f;
        }
        for (v, p) in mesh.vertices.iter().enumerate() {
            if in_face[v] != f {
                max_convexity_distance = max_convexity_distance.max((p - center).dot(&normal));
            }
        }
    }
    let convex = max_convexity_distance < -tol;
    let planar = max_planarity_deviation <= PLANARITY_EPS * diameter;

    ValidityReport {
        closed_manifold,
        euler_consistent,
        oriented,
        convex,
        planar,
        max_planarity_deviation,
        max_convexity_distance,
        convexity_tolerance: tol,
    }
}

/// Regular icosahedron inscribed in the unit sphere.
pub fn build_icosahedron() -> PolyMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let vertices = raw.iter().map(|&(x, y, z)| Vec3::new(x, y, z).normalize()).collect();
    let faces: Vec<Vec<usize>> = [
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect();
    PolyMesh::new(vertices, faces).expect("icosahedron is a closed oriented mesh")
}

/// Regular tetrahedron inscribed in the unit sphere.
pub fn build_tetrahedron() -> PolyMesh {
    let s = 1.0 / 3f64.sqrt();
    let vertices = vec![Vec3::new(s, s, s), Vec3::new(s, -s, -s), Vec3::new(-s, s, -s), Vec3::new(-s, -s, s)];
    let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
    PolyMesh::new(vertices, faces).expect("tetrahedron is a closed oriented mesh")
}

/// Splits every triangle into four and pushes the new midpoints onto the unit sphere.
///
/// Children of face `k` are faces `4k..4k+4`: the three corner triangles
/// followed by the central one.
pub fn subdivide(mesh: &PolyMesh) -> PolyMesh {
    assert!(mesh.is_triangulated(), "subdivision expects a triangle mesh");
    let mut vertices = mesh.vertices.clone();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
        *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
            let p = ((vertices[a] + vertices[b]) * 0.5).normalize();
            vertices.push(p);
            vertices.len() - 1
        })
    };
    let mut faces = Vec::with_capacity(4 * mesh.num_faces());
    for f in &mesh.faces {
        let (a, b, c) = (f[0], f[1], f[2]);
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        faces.push(vec![a, ab, ca]);
        faces.push(vec![ab, b, bc]);
        faces.push(vec![ca, bc, c]);
        faces.push(vec![ab, bc, ca]);
    }
    PolyMesh::new(vertices, faces).expect("subdivision preserves closedness")
}

/// Level-`L` geodesic dome on the unit sphere, with the default level cap.
pub fn geodesic_dome(level: MeshLevel) -> Result<PolyMesh, MeshError> {
    geodesic_dome_with_max(level, DEFAULT_MAX_LEVEL)
}

pub fn geodesic_dome_with_max(level: MeshLevel, max: u32) -> Result<PolyMesh, MeshError> {
    if level.0 > max {
        return Err(MeshError::LevelTooLarge { level: level.0, max });
    }
    let mut mesh = build_icosahedron();
    for _ in 0..level.0 {
        mesh = subdivide(&mesh);
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosahedron_counts_and_euler() {
        let m = build_icosahedron();
        assert_eq!((m.num_faces(), m.num_edges(), m.num_vertices()), (20, 30, 12));
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn icosahedron_is_equilateral() {
        let m = build_icosahedron();
        let lengths: Vec<f64> = (0..m.num_edges()).map(|e| m.edge_length(e)).collect();
        let first = lengths[0];
        for l in &lengths {
            assert!(((l - first) / first).abs() < 1e-12);
        }
        for p in m.vertices() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedron_passes_validation() {
        let report = validate(&build_icosahedron());
        assert!(report.all_ok(), "{report:?}");
    }

    #[test]
    fn pushed_in_vertex_breaks_convexity() {
        let m = build_icosahedron();
        let mut verts = m.vertices().to_vec();
        verts[0] = Vec3::zeros();
        let dented = PolyMesh::new(verts, m.faces().to_vec()).unwrap();
        let report = validate(&dented);
        assert!(!report.convex);
        assert!(report.closed_manifold && report.oriented && report.euler_consistent);
    }

    #[test]
    fn dome_counts() {
        for level in 0..=4u32 {
            let m = geodesic_dome(MeshLevel(level)).unwrap();
            let s = 4usize.pow(level);
            assert_eq!(m.num_faces(), 20 * s);
            assert_eq!(m.num_edges(), 30 * s);
            assert_eq!(m.num_vertices(), 10 * s + 2);
            let directed: usize = m.faces().iter().map(Vec::len).sum();
            assert_eq!(directed, 2 * m.num_edges());
        }
    }

    #[test]
    fn dome_level_one_and_three() {
        let m = geodesic_dome(MeshLevel(1)).unwrap();
        assert_eq!((m.num_faces(), m.num_edges(), m.num_vertices()), (80, 120, 42));
        assert_eq!(geodesic_dome(MeshLevel(3)).unwrap().num_faces(), 1280);
    }

    #[test]
    fn dome_vertices_on_unit_sphere_and_valid() {
        let m = geodesic_dome(MeshLevel(2)).unwrap();
        for p in m.vertices() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        assert!(validate(&m).all_ok());
    }

    #[test]
    fn dome_level_cap() {
        assert_eq!(
            geodesic_dome(MeshLevel(7)).unwrap_err(),
            MeshError::LevelTooLarge { level: 7, max: DEFAULT_MAX_LEVEL }
        );
    }

    #[test]
    fn open_mesh_is_rejected() {
        let verts = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        let err = PolyMesh::new(verts, vec![vec![0, 1, 2]]).unwrap_err();
        assert!(matches!(err, MeshError::OpenEdge { .. }));
    }

    #[test]
    fn flipped_face_is_rejected() {
        let m = build_tetrahedron();
        let mut faces = m.faces().to_vec();
        faces[0].reverse();
        let err = PolyMesh::new(m.vertices().to_vec(), faces).unwrap_err();
        assert!(matches!(err, MeshError::InconsistentOrientation { .. }));
    }

    #[test]
    fn gauss_bonnet_on_icosahedron() {
        let total: f64 = build_icosahedron().vertex_curvatures().iter().sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-9);
    }
}
