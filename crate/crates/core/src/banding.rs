//! Banded-hexagon construction.
//!
//! Every base triangle becomes a *unit* of seven faces: an inner hexagon
//! `A = a_0..a_5` and six band quadrilaterals `Q_i = (a_i, a_{i+1}, b_{i+1}, b_i)`
//! reaching the rim `B = b_0..b_5`. Rim vertices with odd index are the base
//! triangle's corners; even ones are base-edge midpoints pushed radially
//! outward by `lift·R²`, and are shared with the neighbouring unit.
//!
//! Geometry of one unit, in the frame of its base triangle (outward normal
//! `n`, centroid `c`, circumradius `R`):
//!
//! * the hexagon lies in the plane parallel to the base at height
//!   `h_mid + lift·R²`, where `h_mid` is the mean height of the even rim
//!   vertices. Scaling the lift with `R²` keeps the band slope proportional
//!   to the dihedral angles of the base, so one parameter pair works at every
//!   dome level;
//! * each quad `Q_i` lies in the plane through its rim edge `b_i b_{i+1}` and
//!   the target point obtained by pulling the rim edge midpoint toward `c` by
//!   the inset fraction and lifting it to the hexagon plane;
//! * `a_i` is the intersection of the planes of `Q_{i-1}`, `Q_i` and `A`.
//!
//! All seven faces are therefore planar by construction.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{corner_angle, intersect_planes, Vec3};
use crate::mesh::{build_tetrahedron, geodesic_dome, validate, MeshError, MeshLevel, PolyMesh, ValidityReport};

/// Default cap on the curvature at any hexagon vertex, in radians.
pub const CURVATURE_CAP: f64 = 0.2;

#[derive(Debug, Error)]
pub enum BandError {
    #[error("base mesh is not a closed triangulated surface: {0}")]
    BadBase(String),
    #[error("band parameters {params} give a non-convex polyhedron")]
    NonConvexResult { params: BandParams, report: Box<ValidityReport> },
    #[error("invalid band parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Free geometric parameters of the banded hexagon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandParams {
    /// Fraction by which the hexagon is pulled from the rim toward the centroid.
    pub inset: f64,
    /// Height of the hexagon plane above the bulged rim midpoints, in units of
    /// the squared circumradius of the base triangle.
    pub lift: f64,
}

impl BandParams {
    /// Starting point of the parameter search.
    pub const SEARCH_START: BandParams = BandParams { inset: 0.15, lift: 0.01 };

    pub fn new(inset: f64, lift: f64) -> Result<Self, BandError> {
        let p = BandParams { inset, lift };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), BandError> {
        if !(self.inset > 0.0 && self.inset < 1.0) {
            return Err(BandError::InvalidParams(format!("inset {} not in (0, 1)", self.inset)));
        }
        if !(self.lift.is_finite() && self.lift >= 0.0) {
            return Err(BandError::InvalidParams(format!("lift {} must be >= 0", self.lift)));
        }
        Ok(())
    }
}

impl Default for BandParams {
    /// The pair selected by [`tune_band_params`]; a test keeps the two in sync.
    fn default() -> Self {
        BandParams { inset: 0.15, lift: 0.01 }
    }
}

impl fmt::Display for BandParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.inset, self.lift)
    }
}

impl FromStr for BandParams {
    type Err = BandError;

    /// Parses `"t,mu"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (t, mu) =
            s.split_once(',').ok_or_else(|| BandError::InvalidParams(format!("expected `t,mu`, got {s:?}")))?;
        let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| BandError::InvalidParams(format!("{x:?}: {e}")));
        BandParams::new(parse(t)?, parse(mu)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceRole {
    Hexagon,
    BandQuad(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum EdgeClass {
    /// `e_i = a_i a_{i+1}`.
    Hexagon { unit: usize, index: u8 },
    /// `u_i = a_i b_i`.
    Spoke { unit: usize, index: u8 },
    /// `r_i = b_i b_{i+1}`, shared with the neighbouring unit.
    Rim { units: [usize; 2] },
}

/// Ids of everything belonging to one banded hexagon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unit {
    /// The hexagon face.
    pub hexagon: usize,
    /// `quads[i]` is `Q_i`.
    pub quads: [usize; 6],
    pub a: [usize; 6],
    pub b: [usize; 6],
    pub hexagon_edges: [usize; 6],
    pub spokes: [usize; 6],
    pub rim_edges: [usize; 6],
    /// The base-mesh triangle this unit replaces.
    pub base_face: usize,
}

impl Unit {
    /// The seven faces: hexagon first, then `Q_0..Q_5`.
    pub fn faces(&self) -> [usize; 7] {
        let q = self.quads;
        [self.hexagon, q[0], q[1], q[2], q[3], q[4], q[5]]
    }

    /// The twelve edges whose duals join two faces of this unit.
    pub fn internal_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.hexagon_edges.iter().chain(self.spokes.iter()).copied()
    }
}

/// Per-face and per-edge role metadata of a banded mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitLabeling {
    pub unit_of_face: Vec<usize>,
    pub role_of_face: Vec<FaceRole>,
    pub edge_class: Vec<EdgeClass>,
    pub units: Vec<Unit>,
    /// Subdivision depth of the base mesh over its icosahedron, when the
    /// base is a geodesic dome. Base face `k` at depth `d` is a child of
    /// face `k / 4` at depth `d - 1`.
    pub base_depth: Option<u32>,
}

impl UnitLabeling {
    pub fn num_units(&self) -> usize {
        self.units.len()
    }
}

/// Replaces each triangle of `base` by a banded hexagon.
pub fn band_mesh(base: &PolyMesh, params: BandParams) -> Result<(PolyMesh, UnitLabeling), BandError> {
    let (mesh, labeling) = band_mesh_unchecked(base, params)?;
    let report = validate(&mesh);
    if !report.all_ok() {
        return Err(BandError::NonConvexResult { params, report: Box::new(report) });
    }
    Ok((mesh, labeling))
}

/// As [`band_mesh`] without the final validity gate. Used by the parameter
/// search and by callers that want to inspect degenerate parameter choices.
pub fn band_mesh_unchecked(base: &PolyMesh, params: BandParams) -> Result<(PolyMesh, UnitLabeling), BandError> {
    params.check()?;
    if !base.is_triangulated() {
        return Err(BandError::BadBase("base has non-triangular faces".into()));
    }
    if base.euler_characteristic() != 2 {
        return Err(BandError::BadBase(format!("Euler characteristic {} != 2", base.euler_characteristic())));
    }
    // Vertices: base corners, then one bulged midpoint per base edge, then
    // six hexagon vertices per unit.
    let mut vertices: Vec<Vec3> = base.vertices().to_vec();
    let midpoint_base = vertices.len();
    for e in base.edges() {
        let [p, q] = e.vertices;
        let (p, q) = (base.vertices()[p], base.vertices()[q]);
        let m = (p + q) * 0.5;
        // Squared circumradius of an equilateral triangle on this edge.
        let scale = (p - q).norm_squared() / 3.0;
        vertices.push(m + m.normalize() * params.lift * scale);
    }

    let mut unit_rims = Vec::with_capacity(base.num_faces());
    for (f, tri) in base.faces().iter().enumerate() {
        let edges = base.face_edges(f);
        // b_1 = corner 0, b_2 = mid(0,1), b_3 = corner 1, ...; b_0 = mid(2,0).
        let b = [midpoint_base + edges[2], tri[0], midpoint_base + edges[0], tri[1], midpoint_base + edges[1], tri[2]];
        unit_rims.push(b);
    }

    let mut faces: Vec<Vec<usize>> = Vec::with_capacity(7 * base.num_faces());
    let mut unit_vertex_ids = Vec::with_capacity(base.num_faces());
    for (f, b) in unit_rims.iter().enumerate() {
        let corners: Vec<Vec3> = base.faces()[f].iter().map(|&v| base.vertices()[v]).collect();
        let rim: [Vec3; 6] = std::array::from_fn(|i| vertices[b[i]]);
        let a_pos = hexagon_vertices(&corners, &rim, params)
            .ok_or_else(|| BandError::BadBase(format!("degenerate plane intersection in base face {f}")))?;
        let start = vertices.len();
        vertices.extend_from_slice(&a_pos);
        let a: [usize; 6] = std::array::from_fn(|i| start + i);
        unit_vertex_ids.push(a);
        faces.push(a.to_vec());
        for i in 0..6 {
            let j = (i + 1) % 6;
            faces.push(vec![a[j], a[i], b[i], b[j]]);
        }
    }

    let mesh = PolyMesh::new(vertices, faces)?;

    let mut unit_of_face = Vec::with_capacity(mesh.num_faces());
    let mut role_of_face = Vec::with_capacity(mesh.num_faces());
    for u in 0..base.num_faces() {
        unit_of_face.extend(std::iter::repeat_n(u, 7));
        role_of_face.push(FaceRole::Hexagon);
        role_of_face.extend((0..6).map(FaceRole::BandQuad));
    }

    let mut units = Vec::with_capacity(base.num_faces());
    let mut edge_class: Vec<Option<EdgeClass>> = vec![None; mesh.num_edges()];
    let mut rim_owner: HashMap<usize, usize> = HashMap::new();
    for (u, (a, b)) in unit_vertex_ids.iter().zip(&unit_rims).enumerate() {
        let edge = |p: usize, q: usize| mesh.edge_between(p, q).expect("unit edge exists");
        let hexagon_edges: [usize; 6] = std::array::from_fn(|i| edge(a[i], a[(i + 1) % 6]));
        let spokes: [usize; 6] = std::array::from_fn(|i| edge(a[i], b[i]));
        let rim_edges: [usize; 6] = std::array::from_fn(|i| edge(b[i], b[(i + 1) % 6]));
        for i in 0..6 {
            edge_class[hexagon_edges[i]] = Some(EdgeClass::Hexagon { unit: u, index: i as u8 });
            edge_class[spokes[i]] = Some(EdgeClass::Spoke { unit: u, index: i as u8 });
            match rim_owner.insert(rim_edges[i], u) {
                None => {}
                Some(other) => {
                    edge_class[rim_edges[i]] = Some(EdgeClass::Rim { units: [other, u] });
                }
            }
        }
        units.push(Unit {
            hexagon: 7 * u,
            quads: std::array::from_fn(|i| 7 * u + 1 + i),
            a: *a,
            b: *b,
            hexagon_edges,
            spokes,
            rim_edges,
            base_face: u,
        });
    }
    let edge_class = edge_class
        .into_iter()
        .enumerate()
        .map(|(id, c)| c.ok_or_else(|| BandError::BadBase(format!("edge {id} left unclassified"))))
        .collect::<Result<Vec<_>, _>>()?;

    Ok((mesh, UnitLabeling { unit_of_face, role_of_face, edge_class, units, base_depth: None }))
}

/// Hexagon vertices `a_0..a_5` of one unit.
fn hexagon_vertices(corners: &[Vec3], rim: &[Vec3; 6], params: BandParams) -> Option<[Vec3; 6]> {
    let center = (corners[0] + corners[1] + corners[2]) / 3.0;
    let normal = (corners[1] - corners[0]).cross(&(corners[2] - corners[0])).normalize();
    let circum_sq = corners.iter().map(|p| (p - center).norm_squared()).sum::<f64>() / 3.0;
    let height = |p: &Vec3| (p - center).dot(&normal);
    let mid_height = (height(&rim[0]) + height(&rim[2]) + height(&rim[4])) / 3.0;
    let hex_height = mid_height + params.lift * circum_sq;
    let hex_plane = (normal, normal.dot(&center) + hex_height);

    let quad_planes: [(Vec3, f64); 6] = std::array::from_fn(|i| {
        let p = rim[i];
        let q = rim[(i + 1) % 6];
        let m = (p + q) * 0.5;
        let flat = m - normal * height(&m);
        let target = center + (flat - center) * (1.0 - params.inset) + normal * hex_height;
        let n = (q - p).cross(&(target - p)).normalize();
        (n, n.dot(&p))
    });

    let mut out = [Vec3::zeros(); 6];
    for i in 0..6 {
        out[i] = intersect_planes([quad_planes[(i + 5) % 6], quad_planes[i], hex_plane])?;
    }
    Some(out)
}

/// Banded geodesic dome `P_L`.
pub fn banded_dome(level: MeshLevel, params: BandParams) -> Result<(PolyMesh, UnitLabeling), BandError> {
    let base = geodesic_dome(level)?;
    let (mesh, mut labeling) = band_mesh(&base, params)?;
    labeling.base_depth = Some(level.get());
    Ok((mesh, labeling))
}

/// Banded regular tetrahedron (28 faces).
pub fn banded_tetrahedron(params: BandParams) -> Result<(PolyMesh, UnitLabeling), BandError> {
    band_mesh(&build_tetrahedron(), params)
}

/// Interior angles of a unit's hexagon, indexed like `a_i`.
pub fn hexagon_angles(mesh: &PolyMesh, unit: &Unit) -> [f64; 6] {
    let p = |i: usize| mesh.vertices()[unit.a[i % 6]];
    std::array::from_fn(|i| corner_angle(&p(i + 5), &p(i), &p(i + 1)))
}

/// Dual-graph restriction of a 16-unit triangular cluster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterGraph {
    pub units: Vec<usize>,
    pub central_unit: usize,
    /// The 112 face ids of the cluster.
    pub nodes: Vec<usize>,
    /// Mesh edges whose dual arc joins two cluster faces.
    pub internal_dual_edges: Vec<usize>,
    /// Mesh edges whose dual arc leaves the cluster.
    pub boundary_crossings: Vec<usize>,
    /// Outside faces reached by the boundary crossings.
    pub outside_neighbours: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("no side-4 triangular patch of units around unit {anchor}: {reason}")]
    PatchNotFound { anchor: usize, reason: String },
}

/// Builds the cluster of the 16 units that share the anchor's grandparent
/// triangle in the subdivision hierarchy.
pub fn build_cluster_graph(
    mesh: &PolyMesh,
    labeling: &UnitLabeling,
    anchor_unit: usize,
) -> Result<ClusterGraph, ClusterError> {
    let not_found = |reason: &str| ClusterError::PatchNotFound { anchor: anchor_unit, reason: reason.to_string() };
    if anchor_unit >= labeling.num_units() {
        return Err(not_found("anchor is not a unit id"));
    }
    match labeling.base_depth {
        Some(d) if d >= 2 => {}
        Some(_) => return Err(not_found("base dome level is below 2")),
        None => return Err(not_found("base mesh carries no subdivision hierarchy")),
    }
    let base_face = labeling.units[anchor_unit].base_face;
    let first = base_face / 16 * 16;
    let units: Vec<usize> =
        (0..labeling.num_units()).filter(|&u| (first..first + 16).contains(&labeling.units[u].base_face)).collect();
    if units.len() != 16 {
        return Err(not_found("grandparent triangle does not have 16 units"));
    }
    // Center child of the center child.
    let central_base = first + 4 * 3 + 3;
    let central_unit = units
        .iter()
        .copied()
        .find(|&u| labeling.units[u].base_face == central_base)
        .ok_or_else(|| not_found("central unit missing"))?;

    let mut in_cluster = vec![false; mesh.num_faces()];
    let mut nodes = Vec::with_capacity(112);
    for &u in &units {
        for f in labeling.units[u].faces() {
            in_cluster[f] = true;
            nodes.push(f);
        }
    }
    let mut internal_dual_edges = Vec::new();
    let mut boundary_crossings = Vec::new();
    let mut outside_neighbours = Vec::new();
    for (id, e) in mesh.edges().iter().enumerate() {
        match (in_cluster[e.faces[0]], in_cluster[e.faces[1]]) {
            (true, true) => internal_dual_edges.push(id),
            (true, false) => {
                boundary_crossings.push(id);
                outside_neighbours.push(e.faces[1]);
            }
            (false, true) => {
                boundary_crossings.push(id);
                outside_neighbours.push(e.faces[0]);
            }
            (false, false) => {}
        }
    }
    Ok(ClusterGraph { units, central_unit, nodes, internal_dual_edges, boundary_crossings, outside_neighbours })
}

/// Dome levels on which [`tune_band_params`] checks convexity.
pub const TUNING_LEVELS: [u32; 3] = [0, 1, 2];

/// Candidate grid: the search start, then insets `0.05..=0.30` (step 0.05)
/// crossed with eight log-spaced lifts in `[0.002, 0.03]`, inset-major.
pub fn tuning_grid() -> Vec<BandParams> {
    let mut grid = vec![BandParams::SEARCH_START];
    for ti in 1..=6 {
        let inset = 0.05 * ti as f64;
        for k in 0..8 {
            let lift = 0.002 * 15f64.powf(k as f64 / 7.0);
            grid.push(BandParams { inset, lift });
        }
    }
    grid
}

/// Whether `params` give convex domes at the tuning levels with hexagon-vertex
/// curvature in `(0, CURVATURE_CAP)`.
pub fn params_are_convex(params: BandParams) -> bool {
    TUNING_LEVELS.iter().all(|&level| {
        let Ok(base) = geodesic_dome(MeshLevel(level)) else { return false };
        let Ok((mesh, labeling)) = band_mesh_unchecked(&base, params) else { return false };
        if !validate(&mesh).all_ok() {
            return false;
        }
        let curvature = mesh.vertex_curvatures();
        labeling.units.iter().flat_map(|u| u.a).all(|v| curvature[v] > 0.0 && curvature[v] < CURVATURE_CAP)
    })
}

/// First grid pair that is convex at levels 0–2 and for which every unit of
/// `P_0` satisfies all 36 hexagon-overlap patterns.
pub fn tune_band_params() -> Option<BandParams> {
    tuning_grid().into_iter().find(|&params| {
        params_are_convex(params)
            && banded_dome(MeshLevel(0), params)
                .map(|(mesh, labeling)| {
                    (0..labeling.num_units())
                        .all(|u| crate::unfold::verify_hexagon_overlap_property(&mesh, &labeling, u).iter().all(|&b| b))
                })
                .unwrap_or(false)
    })
}
