//! Planar unfolding along a connection tree, overlap detection and SVG output.
//!
//! Every face is first expressed in its own 2D frame (its least-squares
//! plane, first vertex at the origin, first edge on +x). Unfolding then only
//! composes planar rigid motions: a child face is placed by the rotation and
//! translation that carries its copy of the shared edge onto the parent's.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::banding::{FaceRole, UnitLabeling};
use crate::geom::{centroid3, newell_normal, orient2d, polygon_area, Aabb2, Vec2};
use crate::mesh::PolyMesh;
use crate::trees::{enumerate_unit_patterns, pattern_arcs, ConnectionTree};

/// Overlap area threshold, relative to the squared mesh diameter.
pub const AREA_EPS: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum UnfoldError {
    #[error("root face {root} is out of range ({faces} faces)")]
    BadRoot { root: usize, faces: usize },
    #[error("the connection tree reaches {reached} of {faces} faces")]
    InvalidTree { reached: usize, faces: usize },
    #[error("layout has no faces to render")]
    EmptyLayout,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Per-face 2D polygons in local frames, reusable across many unfoldings of one mesh.
#[derive(Debug, Clone)]
pub struct Unfolder {
    local: Vec<Vec<Vec2>>,
    loops: Vec<Vec<usize>>,
    edge_faces: Vec<[usize; 2]>,
    edge_vertices: Vec<[usize; 2]>,
    diameter: f64,
}

impl Unfolder {
    pub fn new(mesh: &PolyMesh) -> Self {
        let local = (0..mesh.num_faces()).map(|f| local_polygon(mesh, f)).collect();
        Unfolder {
            local,
            loops: mesh.faces().to_vec(),
            edge_faces: mesh.edges().iter().map(|e| e.faces).collect(),
            edge_vertices: mesh.edges().iter().map(|e| e.vertices).collect(),
            diameter: mesh.diameter(),
        }
    }

    pub fn num_faces(&self) -> usize {
        self.local.len()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Unfolds the faces reachable from `root` through the given dual arcs
    /// (mesh edge ids). Faces not reached are left out of the layout.
    pub fn unfold_arcs(&self, arcs: &[usize], root: usize) -> Result<PlanarLayout, UnfoldError> {
        let faces = self.num_faces();
        if root >= faces {
            return Err(UnfoldError::BadRoot { root, faces });
        }
        let mut children: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for &e in arcs {
            let [f, g] = self.edge_faces[e];
            children.entry(f).or_default().push((g, e));
            children.entry(g).or_default().push((f, e));
        }
        for list in children.values_mut() {
            list.sort_unstable();
        }

        let mut polygons: Vec<Option<Vec<Vec2>>> = vec![None; faces];
        polygons[root] = Some(self.local[root].clone());
        // Depth-first, children in face-id order.
        let mut stack = vec![root];
        while let Some(f) = stack.pop() {
            let Some(list) = children.get(&f) else { continue };
            for &(g, e) in list.iter().rev() {
                if polygons[g].is_some() {
                    continue;
                }
                let placed = self.place_child(polygons[f].as_ref().unwrap(), f, g, e);
                polygons[g] = Some(placed);
                stack.push(g);
            }
        }
        Ok(PlanarLayout { polygons, root, arcs: arcs.to_vec(), scale: self.diameter })
    }

    /// Unfolds the whole surface; every face must be reached.
    pub fn unfold(&self, tree: &ConnectionTree, root: usize) -> Result<PlanarLayout, UnfoldError> {
        let layout = self.unfold_arcs(tree.edges(), root)?;
        let reached = layout.num_placed();
        if reached != self.num_faces() {
            return Err(UnfoldError::InvalidTree { reached, faces: self.num_faces() });
        }
        Ok(layout)
    }

    fn place_child(&self, parent_poly: &[Vec2], parent: usize, child: usize, edge: usize) -> Vec<Vec2> {
        let [p, q] = self.edge_vertices[edge];
        let pos = |face: usize, poly: &[Vec2], v: usize| {
            let k = self.loops[face].iter().position(|&x| x == v).expect("edge vertex on face");
            poly[k]
        };
        let (pp, pq) = (pos(parent, parent_poly, p), pos(parent, parent_poly, q));
        let local = &self.local[child];
        let (lp, lq) = (pos(child, local, p), pos(child, local, q));
        let target = pq - pp;
        let source = lq - lp;
        let angle = target.y.atan2(target.x) - source.y.atan2(source.x);
        let (s, c) = angle.sin_cos();
        let rotate = |v: Vec2| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y);
        let mid_local = (lp + lq) * 0.5;
        let mid_target = (pp + pq) * 0.5;
        local.iter().map(|&v| mid_target + rotate(v - mid_local)).collect()
    }
}

/// Face polygon in its own frame: least-squares plane, first vertex at the
/// origin, first edge along +x, counterclockwise.
fn local_polygon(mesh: &PolyMesh, face: usize) -> Vec<Vec2> {
    let pts = mesh.face_points(face);
    let normal = newell_normal(&pts).normalize();
    let center = centroid3(&pts);
    let project = |p: &crate::geom::Vec3| p - normal * (p - center).dot(&normal);
    let origin = project(&pts[0]);
    let x_axis = (project(&pts[1]) - origin).normalize();
    let y_axis = normal.cross(&x_axis);
    pts.iter()
        .map(|p| {
            let d = project(p) - origin;
            Vec2::new(d.dot(&x_axis), d.dot(&y_axis))
        })
        .collect()
}

/// Planar images of the faces of an unfolding.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarLayout {
    /// `polygons[f]` is face `f`'s planar loop, or `None` if not placed.
    pub polygons: Vec<Option<Vec<Vec2>>>,
    pub root: usize,
    /// Dual arcs used, as mesh edge ids.
    pub arcs: Vec<usize>,
    /// Diameter of the source mesh; sets the overlap tolerance.
    pub scale: f64,
}

impl PlanarLayout {
    pub fn num_placed(&self) -> usize {
        self.polygons.iter().filter(|p| p.is_some()).count()
    }

    pub fn placed(&self) -> impl Iterator<Item = (usize, &[Vec2])> {
        self.polygons.iter().enumerate().filter_map(|(f, p)| p.as_deref().map(|p| (f, p)))
    }

    pub fn total_area(&self) -> f64 {
        self.placed().map(|(_, p)| polygon_area(p)).sum()
    }

    pub fn area_threshold(&self) -> f64 {
        AREA_EPS * self.scale * self.scale
    }

    /// `{"root": r, "faces": {"<id>": [[x, y], ...]}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            root: usize,
            faces: BTreeMap<usize, Vec<[f64; 2]>>,
            arcs: &'a [usize],
        }
        let faces = self.placed().map(|(f, p)| (f, p.iter().map(|v| [v.x, v.y]).collect())).collect();
        serde_json::to_string(&Doc { root: self.root, faces, arcs: &self.arcs }).expect("layout serializes")
    }
}

/// Unfolds `mesh` along `tree`, starting from `root`.
pub fn unfold(mesh: &PolyMesh, tree: &ConnectionTree, root: usize) -> Result<PlanarLayout, UnfoldError> {
    Unfolder::new(mesh).unfold(tree, root)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Locality {
    /// Both faces belong to the same banded-hexagon unit.
    UnitLocal,
    NonLocal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapPair {
    pub faces: (usize, usize),
    pub area: f64,
    pub locality: Option<Locality>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub overlapping: bool,
    pub pairs: Vec<OverlapPair>,
}

impl OverlapReport {
    pub fn classify(&mut self, labeling: &UnitLabeling) {
        for pair in &mut self.pairs {
            let (f, g) = pair.faces;
            pair.locality = Some(if labeling.unit_of_face[f] == labeling.unit_of_face[g] {
                Locality::UnitLocal
            } else {
                Locality::NonLocal
            });
        }
    }

    pub fn has_unit_local(&self) -> bool {
        self.pairs.iter().any(|p| p.locality == Some(Locality::UnitLocal))
    }
}

/// All pairs of placed faces whose interiors overlap by more than the area threshold.
pub fn detect_overlap(layout: &PlanarLayout) -> OverlapReport {
    let pairs = overlapping_pairs(layout, false);
    OverlapReport { overlapping: !pairs.is_empty(), pairs }
}

/// As [`detect_overlap`], with unit-local / non-local classification.
pub fn detect_overlap_classified(layout: &PlanarLayout, labeling: &UnitLabeling) -> OverlapReport {
    let mut report = detect_overlap(layout);
    report.classify(labeling);
    report
}

/// Stops at the first overlapping pair.
pub fn has_overlap(layout: &PlanarLayout) -> bool {
    !overlapping_pairs(layout, true).is_empty()
}

fn overlapping_pairs(layout: &PlanarLayout, first_only: bool) -> Vec<OverlapPair> {
    let threshold = layout.area_threshold();
    let placed: Vec<(usize, &[Vec2], Aabb2)> = layout.placed().map(|(f, p)| (f, p, Aabb2::of(p))).collect();
    let slack = 1e-12 * layout.scale;
    let mut out = Vec::new();
    for (i, (f, pf, bf)) in placed.iter().enumerate() {
        for (g, pg, bg) in &placed[i + 1..] {
            if !bf.overlaps(bg, slack) {
                continue;
            }
            let area = convex_intersection_area(pf, pg);
            if area > threshold {
                out.push(OverlapPair { faces: (*f, *g), area, locality: None });
                if first_only {
                    return out;
                }
            }
        }
    }
    out
}

/// Whether any two of the given placed faces overlap; unplaced faces are skipped.
pub fn faces_overlap(layout: &PlanarLayout, faces: &[usize]) -> bool {
    let threshold = layout.area_threshold();
    let placed: Vec<&[Vec2]> = faces.iter().filter_map(|&f| layout.polygons[f].as_deref()).collect();
    placed.iter().enumerate().any(|(i, p)| placed[i + 1..].iter().any(|q| convex_intersection_area(p, q) > threshold))
}

/// Area of the intersection of two convex counterclockwise polygons
/// (Sutherland–Hodgman clipping).
pub fn convex_intersection_area(subject: &[Vec2], clip: &[Vec2]) -> f64 {
    let mut current: Vec<Vec2> = subject.to_vec();
    let mut next = Vec::with_capacity(subject.len() + clip.len());
    let n = clip.len();
    for k in 0..n {
        if current.is_empty() {
            return 0.0;
        }
        let a = clip[k];
        let b = clip[(k + 1) % n];
        next.clear();
        let m = current.len();
        for i in 0..m {
            let p = current[i];
            let q = current[(i + 1) % m];
            let sp = orient2d(&a, &b, &p);
            let sq = orient2d(&a, &b, &q);
            if sp >= 0.0 {
                next.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                next.push(p + (q - p) * t);
            }
        }
        std::mem::swap(&mut current, &mut next);
    }
    polygon_area(&current).max(0.0)
}

/// Unfolds only the seven faces of `unit` under each of its 36 overlap
/// patterns and reports whether each layout overlaps.
pub fn verify_hexagon_overlap_property(mesh: &PolyMesh, labeling: &UnitLabeling, unit: usize) -> Vec<bool> {
    verify_hexagon_overlap_property_with(&Unfolder::new(mesh), labeling, unit)
}

pub fn verify_hexagon_overlap_property_with(unfolder: &Unfolder, labeling: &UnitLabeling, unit: usize) -> Vec<bool> {
    let u = &labeling.units[unit];
    enumerate_unit_patterns(unit)
        .iter()
        .map(|p| {
            let arcs = pattern_arcs(u, p);
            unfolder.unfold_arcs(&arcs, u.hexagon).map(|layout| has_overlap(&layout)).unwrap_or(false)
        })
        .collect()
}

const UNIT_PALETTE: [&str; 10] =
    ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd"];

/// SVG 1.1 document for a layout: one polygon per face, filled by unit,
/// overlapping pairs circled in red.
pub fn render_svg_string(
    layout: &PlanarLayout,
    report: &OverlapReport,
    labeling: Option<&UnitLabeling>,
) -> Result<String, UnfoldError> {
    let mut bounds: Option<Aabb2> = None;
    for (_, p) in layout.placed() {
        let b = Aabb2::of(p);
        bounds = Some(bounds.map_or(b, |acc| acc.union(&b)));
    }
    let bounds = bounds.ok_or(UnfoldError::EmptyLayout)?;
    let size = bounds.max - bounds.min;
    let margin = 0.02 * size.x.max(size.y);
    let (x0, y0) = (bounds.min.x - margin, bounds.min.y - margin);
    let (w, h) = (size.x + 2.0 * margin, size.y + 2.0 * margin);
    let stroke = 0.001 * w.max(h);
    // SVG y grows downward; flip so the layout reads as in the plane.
    let fy = |y: f64| bounds.max.y + bounds.min.y - y;

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x0:.6} {y0:.6} {w:.6} {h:.6}">"#)
        .unwrap();
    writeln!(svg, r#"<g stroke="black" stroke-width="{stroke:.6}" stroke-linejoin="round">"#).unwrap();
    for (f, poly) in layout.placed() {
        let (fill, role) = match labeling {
            Some(l) => {
                let unit = l.unit_of_face[f];
                let role = match l.role_of_face[f] {
                    FaceRole::Hexagon => "hexagon".to_string(),
                    FaceRole::BandQuad(i) => format!("quad{i}"),
                };
                (UNIT_PALETTE[unit % UNIT_PALETTE.len()], role)
            }
            None => (UNIT_PALETTE[0], "face".to_string()),
        };
        let points: Vec<String> = poly.iter().map(|v| format!("{:.6},{:.6}", v.x, fy(v.y))).collect();
        writeln!(
            svg,
            r#"<polygon id="f{f}" class="{role}" fill="{fill}" fill-opacity="0.8" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
    }
    writeln!(svg, "</g>").unwrap();
    if !report.pairs.is_empty() {
        writeln!(svg, r#"<g fill="none" stroke="red" stroke-width="{:.6}">"#, 3.0 * stroke).unwrap();
        for pair in &report.pairs {
            let (Some(pf), Some(pg)) = (&layout.polygons[pair.faces.0], &layout.polygons[pair.faces.1]) else {
                continue;
            };
            let c = (centroid2(pf) + centroid2(pg)) * 0.5;
            let r = 0.02 * w.max(h);
            writeln!(svg, r#"<circle cx="{:.6}" cy="{:.6}" r="{r:.6}"/>"#, c.x, fy(c.y)).unwrap();
        }
        writeln!(svg, "</g>").unwrap();
    }
    writeln!(svg, "</svg>").unwrap();
    Ok(svg)
}

pub fn render_svg(
    layout: &PlanarLayout,
    report: &OverlapReport,
    labeling: Option<&UnitLabeling>,
    path: &Path,
) -> Result<(), UnfoldError> {
    let svg = render_svg_string(layout, report, labeling)?;
    std::fs::write(path, svg)?;
    Ok(())
}

fn centroid2(poly: &[Vec2]) -> Vec2 {
    poly.iter().fold(Vec2::zeros(), |acc, p| acc + p) / poly.len() as f64
}
