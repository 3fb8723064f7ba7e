//! Cut trees, connection trees and the unit-level pattern detectors.
//!
//! A cut tree is a spanning tree of the mesh vertices made of cut edges. Its
//! complement, the uncut edges, is the connection tree: read through the dual
//! graph it spans the faces. Each determines the other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::banding::{Unit, UnitLabeling};
use crate::mesh::PolyMesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("expected {expected} edges, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("edge id {0} is out of range")]
    EdgeOutOfRange(usize),
    #[error("edge {0} is listed twice")]
    DuplicateEdge(usize),
    #[error("edge {0} closes a cycle")]
    Cycle(usize),
    #[error("malformed tree document: {0}")]
    Malformed(String),
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// An undirected multigraph with numbered edges.
#[derive(Debug, Clone)]
pub struct EdgeGraph {
    pub num_nodes: usize,
    pub edges: Vec<[usize; 2]>,
    /// `adjacency[v]` lists `(neighbour, edge id)` in edge-id order.
    pub adjacency: Vec<Vec<(usize, usize)>>,
}

impl EdgeGraph {
    pub fn new(num_nodes: usize, edges: Vec<[usize; 2]>) -> Self {
        let mut adjacency = vec![Vec::new(); num_nodes];
        for (id, &[a, b]) in edges.iter().enumerate() {
            adjacency[a].push((b, id));
            adjacency[b].push((a, id));
        }
        EdgeGraph { num_nodes, edges, adjacency }
    }

    /// Vertex graph of a mesh; edge ids are the mesh's edge ids.
    pub fn primal(mesh: &PolyMesh) -> Self {
        EdgeGraph::new(mesh.num_vertices(), mesh.edges().iter().map(|e| e.vertices).collect())
    }

    /// Face adjacency graph of a mesh; edge ids are the mesh's edge ids.
    pub fn dual(mesh: &PolyMesh) -> Self {
        EdgeGraph::new(mesh.num_faces(), mesh.edges().iter().map(|e| e.faces).collect())
    }

    /// Checks that `edges` is a spanning tree and returns its membership mask.
    pub fn spanning_tree_mask(&self, edges: &[usize]) -> Result<Vec<bool>, TreeError> {
        let expected = self.num_nodes.saturating_sub(1);
        if edges.len() != expected {
            return Err(TreeError::WrongSize { expected, got: edges.len() });
        }
        let mut mask = vec![false; self.edges.len()];
        let mut uf = UnionFind::new(self.num_nodes);
        for &e in edges {
            let [a, b] = *self.edges.get(e).ok_or(TreeError::EdgeOutOfRange(e))?;
            if mask[e] {
                return Err(TreeError::DuplicateEdge(e));
            }
            mask[e] = true;
            if !uf.union(a, b) {
                return Err(TreeError::Cycle(e));
            }
        }
        Ok(mask)
    }
}

/// Spanning tree drawn uniformly at random by Wilson's loop-erased random walks.
///
/// The walk from each vertex not yet in the tree records only its latest exit
/// edge, which erases loops implicitly. Returned edge ids are sorted.
pub fn wilson<R: Rng + ?Sized>(graph: &EdgeGraph, rng: &mut R) -> Vec<usize> {
    wilson_walk(graph, rng, |v, rng| {
        let nbrs = &graph.adjacency[v];
        nbrs[rng.random_range(0..nbrs.len())]
    })
}

/// Wilson's algorithm with edge weights: trees are drawn with probability
/// proportional to the product of their edge weights.
pub fn wilson_weighted<R: Rng + ?Sized>(graph: &EdgeGraph, weights: &[f64], rng: &mut R) -> Vec<usize> {
    let totals: Vec<f64> = graph.adjacency.iter().map(|nbrs| nbrs.iter().map(|&(_, e)| weights[e]).sum()).collect();
    wilson_walk(graph, rng, |v, rng| {
        let nbrs = &graph.adjacency[v];
        let mut x = rng.random::<f64>() * totals[v];
        for &(w, e) in nbrs {
            x -= weights[e];
            if x < 0.0 {
                return (w, e);
            }
        }
        *nbrs.last().expect("walk never enters an isolated vertex")
    })
}

fn wilson_walk<R: Rng + ?Sized>(
    graph: &EdgeGraph,
    rng: &mut R,
    mut step: impl FnMut(usize, &mut R) -> (usize, usize),
) -> Vec<usize> {
    let n = graph.num_nodes;
    if n == 0 {
        return Vec::new();
    }
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    let mut next_edge = vec![usize::MAX; n];
    in_tree[0] = true;
    for start in 0..n {
        let mut u = start;
        while !in_tree[u] {
            let (w, e) = step(u, rng);
            next[u] = w;
            next_edge[u] = e;
            u = w;
        }
        u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            u = next[u];
        }
    }
    let mut edges: Vec<usize> = next_edge.into_iter().filter(|&e| e != usize::MAX).collect();
    edges.sort_unstable();
    edges
}

/// Kruskal's minimum spanning tree under i.i.d. uniform random edge weights.
pub fn random_mst<R: Rng + ?Sized>(graph: &EdgeGraph, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = (0..graph.edges.len()).map(|e| (rng.random::<f64>(), e)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut uf = UnionFind::new(graph.num_nodes);
    let mut edges: Vec<usize> = order
        .into_iter()
        .filter(|&(_, e)| {
            let [a, b] = graph.edges[e];
            uf.union(a, b)
        })
        .map(|(_, e)| e)
        .collect();
    edges.sort_unstable();
    edges
}

/// Distribution of random cut trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// Uniform spanning trees (Wilson).
    #[default]
    Wilson,
    /// Minimum spanning tree under i.i.d. uniform edge weights.
    Mst,
}

impl std::fmt::Display for Sampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sampler::Wilson => "wilson",
            Sampler::Mst => "mst",
        })
    }
}

/// Spanning tree of the mesh vertices formed by the cut edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutTree {
    edges: Vec<usize>,
    mask: Vec<bool>,
}

/// Uncut edges, whose dual arcs form a spanning tree of the faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionTree {
    edges: Vec<usize>,
    mask: Vec<bool>,
}

impl CutTree {
    pub fn new(mesh: &PolyMesh, mut edges: Vec<usize>) -> Result<Self, TreeError> {
        edges.sort_unstable();
        let mask = EdgeGraph::primal(mesh).spanning_tree_mask(&edges)?;
        Ok(CutTree { edges, mask })
    }

    /// Sorted edge ids.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn is_cut(&self, edge: usize) -> bool {
        self.mask[edge]
    }

    pub fn to_json(&self) -> String {
        TreeDoc { kind: TreeKind::Cut, edges: self.edges.clone() }.to_json()
    }

    /// Decodes and validates a tree document against `mesh`.
    pub fn from_json(mesh: &PolyMesh, text: &str) -> Result<Self, TreeError> {
        let doc = TreeDoc::parse(text)?;
        match doc.kind {
            TreeKind::Cut => CutTree::new(mesh, doc.edges),
            TreeKind::Connection => to_cut_tree(&ConnectionTree::new(mesh, doc.edges)?, mesh),
        }
    }
}

impl ConnectionTree {
    pub fn new(mesh: &PolyMesh, mut edges: Vec<usize>) -> Result<Self, TreeError> {
        edges.sort_unstable();
        let mask = EdgeGraph::dual(mesh).spanning_tree_mask(&edges)?;
        Ok(ConnectionTree { edges, mask })
    }

    /// Sorted ids of the uncut edges.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn is_uncut(&self, edge: usize) -> bool {
        self.mask[edge]
    }

    pub fn to_json(&self) -> String {
        TreeDoc { kind: TreeKind::Connection, edges: self.edges.clone() }.to_json()
    }

    pub fn from_json(mesh: &PolyMesh, text: &str) -> Result<Self, TreeError> {
        let doc = TreeDoc::parse(text)?;
        match doc.kind {
            TreeKind::Connection => ConnectionTree::new(mesh, doc.edges),
            TreeKind::Cut => to_connection_tree(&CutTree::new(mesh, doc.edges)?, mesh),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Cut,
    Connection,
}

/// JSON form of a tree: `{"kind": "cut" | "connection", "edges": [sorted ids]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub kind: TreeKind,
    pub edges: Vec<usize>,
}

impl TreeDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree documents always serialize")
    }

    pub fn parse(text: &str) -> Result<Self, TreeError> {
        serde_json::from_str(text).map_err(|e| TreeError::Malformed(e.to_string()))
    }
}

pub fn to_connection_tree(tree: &CutTree, mesh: &PolyMesh) -> Result<ConnectionTree, TreeError> {
    let complement = (0..mesh.num_edges()).filter(|&e| !tree.mask[e]).collect();
    ConnectionTree::new(mesh, complement)
}

pub fn to_cut_tree(tree: &ConnectionTree, mesh: &PolyMesh) -> Result<CutTree, TreeError> {
    let complement = (0..mesh.num_edges()).filter(|&e| !tree.mask[e]).collect();
    CutTree::new(mesh, complement)
}

/// Draws a uniform random cut tree; the same seed gives the same tree.
pub fn sample_cut_tree(mesh: &PolyMesh, seed: u64) -> CutTree {
    sample_cut_tree_with(&EdgeGraph::primal(mesh), seed, Sampler::Wilson)
}

/// Draws a cut tree from a prebuilt vertex graph with the chosen sampler.
pub fn sample_cut_tree_with(graph: &EdgeGraph, seed: u64, sampler: Sampler) -> CutTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = match sampler {
        Sampler::Wilson => wilson(graph, &mut rng),
        Sampler::Mst => random_mst(graph, &mut rng),
    };
    CutTree::from_sampled(graph, edges)
}

impl CutTree {
    /// Wraps sampler output, which is a spanning tree by construction.
    pub(crate) fn from_sampled(graph: &EdgeGraph, edges: Vec<usize>) -> Self {
        debug_assert_eq!(edges.len(), graph.num_nodes - 1);
        let mut mask = vec![false; graph.edges.len()];
        for &e in &edges {
            mask[e] = true;
        }
        CutTree { edges, mask }
    }

    /// The connection tree, without re-checking the dual spanning property.
    ///
    /// On a closed genus-0 mesh the complement of a vertex spanning tree is
    /// always a face spanning tree.
    pub fn complement(&self) -> ConnectionTree {
        let mask: Vec<bool> = self.mask.iter().map(|&c| !c).collect();
        let edges = (0..mask.len()).filter(|&e| mask[e]).collect();
        ConnectionTree { edges, mask }
    }
}

/// The unit is in the Hexagon-Overlap configuration: only `e_i` is uncut and
/// only `u_j` is cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OverlapPattern {
    pub unit: usize,
    pub uncut_hexagon_edge: u8,
    pub cut_spoke: u8,
}

pub fn detect_overlap_pattern(tree: &ConnectionTree, labeling: &UnitLabeling, unit: usize) -> Option<OverlapPattern> {
    let u = &labeling.units[unit];
    let mut uncut_hex = u.hexagon_edges.iter().enumerate().filter(|(_, &e)| tree.is_uncut(e));
    let (i, _) = uncut_hex.next()?;
    if uncut_hex.next().is_some() {
        return None;
    }
    let mut cut_spokes = u.spokes.iter().enumerate().filter(|(_, &e)| !tree.is_uncut(e));
    let (j, _) = cut_spokes.next()?;
    if cut_spokes.next().is_some() {
        return None;
    }
    // Leaf hexagon on a five-arc band path: six uncut internal edges on
    // seven faces of a tree, hence connected.
    debug_assert!(unit_faces_connected(tree, u));
    Some(OverlapPattern { unit, uncut_hexagon_edge: i as u8, cut_spoke: j as u8 })
}

/// Whether the unit's seven faces induce a connected subgraph of the connection tree.
pub fn detect_band_unit(tree: &ConnectionTree, labeling: &UnitLabeling, unit: usize) -> bool {
    unit_faces_connected(tree, &labeling.units[unit])
}

fn unit_faces_connected(tree: &ConnectionTree, unit: &Unit) -> bool {
    // Local slots: 0 = hexagon, 1 + i = Q_i.
    let mut uf = UnionFind::new(7);
    let mut joins = 0;
    for i in 0..6 {
        if tree.is_uncut(unit.hexagon_edges[i]) && uf.union(0, 1 + i) {
            joins += 1;
        }
        // u_i separates Q_{i-1} and Q_i.
        if tree.is_uncut(unit.spokes[i]) && uf.union(1 + (i + 5) % 6, 1 + i) {
            joins += 1;
        }
    }
    joins == 6
}

/// All 36 `(i, j)` patterns of a unit, `i`-major.
pub fn enumerate_unit_patterns(unit: usize) -> Vec<OverlapPattern> {
    (0..6u8).flat_map(|i| (0..6u8).map(move |j| OverlapPattern { unit, uncut_hexagon_edge: i, cut_spoke: j })).collect()
}

/// Dual arcs (mesh edge ids) of the seven-face subtree realizing a pattern:
/// the hexagon hangs from `Q_i` through `e_i` and the band is a path broken at `u_j`.
pub fn pattern_arcs(unit: &Unit, pattern: &OverlapPattern) -> Vec<usize> {
    let j = pattern.cut_spoke as usize;
    let mut arcs = vec![unit.hexagon_edges[pattern.uncut_hexagon_edge as usize]];
    arcs.extend((0..6).filter(|&k| k != j).map(|k| unit.spokes[k]));
    arcs
}

/// A full connection tree that realizes `pattern` on its unit; the rest of
/// the tree is completed by Kruskal over the remaining dual arcs in a
/// seed-shuffled order.
pub fn plant_pattern(mesh: &PolyMesh, labeling: &UnitLabeling, pattern: &OverlapPattern, seed: u64) -> ConnectionTree {
    use rand::seq::SliceRandom;

    let unit = &labeling.units[pattern.unit];
    let arcs = pattern_arcs(unit, pattern);
    let mut excluded = vec![false; mesh.num_edges()];
    for e in unit.internal_edges() {
        excluded[e] = true;
    }
    let mut uf = UnionFind::new(mesh.num_faces());
    let mut edges = Vec::with_capacity(mesh.num_faces() - 1);
    for &e in &arcs {
        let [f, g] = mesh.edges()[e].faces;
        uf.union(f, g);
        edges.push(e);
    }
    let mut rest: Vec<usize> = (0..mesh.num_edges()).filter(|&e| !excluded[e]).collect();
    rest.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for e in rest {
        let [f, g] = mesh.edges()[e].faces;
        if uf.union(f, g) {
            edges.push(e);
        }
    }
    ConnectionTree::new(mesh, edges).expect("planted tree spans the faces")
}
