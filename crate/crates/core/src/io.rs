//! OFF meshes, labeling side-cars and the parsers behind them.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::banding::{EdgeClass, FaceRole, UnitLabeling};
use crate::geom::Vec3;
use crate::mesh::{MeshError, PolyMesh};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("OFF line {line}: {msg}")]
    Off { line: usize, msg: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("labeling: {0}")]
    Labeling(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_off(mesh: &PolyMesh) -> String {
    let mut out = String::from("OFF\n");
    out += &format!("{} {} {}\n", mesh.num_vertices(), mesh.num_faces(), mesh.num_edges());
    for p in mesh.vertices() {
        out += &format!("{:?} {:?} {:?}\n", p.x, p.y, p.z);
    }
    for face in mesh.faces() {
        out += &face.len().to_string();
        for v in face {
            out += &format!(" {v}");
        }
        out.push('\n');
    }
    out
}

/// Parses an OFF document and validates it as a closed oriented mesh.
/// `#` starts a comment; the edge count in the header is ignored.
pub fn parse_off(text: &str) -> Result<PolyMesh, IoError> {
    let mut tokens = Tokens::new(text);
    match tokens.next() {
        Some((_, "OFF")) => {}
        Some((line, t)) => return Err(off_err(line, format!("expected OFF header, got {t:?}"))),
        None => return Err(off_err(1, "empty document".into())),
    }
    let nv = tokens.parse::<usize>("vertex count")?;
    let nf = tokens.parse::<usize>("face count")?;
    tokens.parse::<usize>("edge count")?;
    // Every vertex needs three tokens and every face at least four, so larger
    // counts cannot be satisfied by the input; refuse before allocating.
    if nv.saturating_mul(3).saturating_add(nf.saturating_mul(4)) > text.len() {
        return Err(off_err(1, format!("counts {nv} vertices / {nf} faces exceed the document size")));
    }
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut xyz = [0.0; 3];
        for c in &mut xyz {
            *c = tokens.parse::<f64>("coordinate")?;
            if !c.is_finite() {
                return Err(off_err(tokens.line, "non-finite coordinate".into()));
            }
        }
        vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let k = tokens.parse::<usize>("face size")?;
        if k < 3 || k > nv {
            return Err(off_err(tokens.line, format!("face size {k} out of range")));
        }
        let face = (0..k).map(|_| tokens.parse::<usize>("vertex index")).collect::<Result<_, _>>()?;
        faces.push(face);
    }
    if let Some((line, t)) = tokens.next() {
        return Err(off_err(line, format!("trailing token {t:?}")));
    }
    Ok(PolyMesh::new(vertices, faces)?)
}

fn off_err(line: usize, msg: String) -> IoError {
    IoError::Off { line, msg }
}

/// Whitespace tokens with their 1-based line numbers, comments removed.
struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: std::str::SplitWhitespace<'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { lines: text.lines().enumerate(), current: "".split_whitespace(), line: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        loop {
            if let Some(t) = self.current.next() {
                return Some((self.line, t));
            }
            let (i, line) = self.lines.next()?;
            self.line = i + 1;
            self.current = line.split('#').next().unwrap_or("").split_whitespace();
        }
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, IoError>
    where
        T::Err: std::fmt::Display,
    {
        let (line, t) = self.next().ok_or_else(|| off_err(self.line, format!("missing {what}")))?;
        t.parse::<T>().map_err(|e| off_err(line, format!("{what} {t:?}: {e}")))
    }
}

pub fn read_off(path: &Path) -> Result<PolyMesh, IoError> {
    parse_off(&fs::read_to_string(path)?)
}

pub fn save_off(mesh: &PolyMesh, path: &Path) -> Result<(), IoError> {
    Ok(fs::write(path, write_off(mesh))?)
}

pub fn labeling_to_json(labeling: &UnitLabeling) -> String {
    serde_json::to_string(labeling).expect("labeling serializes")
}

/// Parses a labeling side-car and checks it against the mesh it describes.
pub fn parse_labeling(text: &str, mesh: &PolyMesh) -> Result<UnitLabeling, IoError> {
    let labeling: UnitLabeling = serde_json::from_str(text)?;
    check_labeling(&labeling, mesh)?;
    Ok(labeling)
}

/// Structural consistency of a labeling with its mesh: sizes match, every id
/// is in range, and each unit's faces and edges carry matching roles.
pub fn check_labeling(labeling: &UnitLabeling, mesh: &PolyMesh) -> Result<(), IoError> {
    let bad = |msg: String| Err(IoError::Labeling(msg));
    let (nf, ne, nv) = (mesh.num_faces(), mesh.num_edges(), mesh.num_vertices());
    if labeling.unit_of_face.len() != nf || labeling.role_of_face.len() != nf {
        return bad(format!("face tables do not have {nf} entries"));
    }
    if labeling.edge_class.len() != ne {
        return bad(format!("edge table does not have {ne} entries"));
    }
    if labeling.units.len() * 7 != nf {
        return bad(format!("{} units cannot cover {nf} faces", labeling.units.len()));
    }
    for (k, unit) in labeling.units.iter().enumerate() {
        let faces = unit.faces();
        let edges = unit.hexagon_edges.iter().chain(&unit.spokes).chain(&unit.rim_edges);
        if faces.iter().any(|&f| f >= nf)
            || edges.clone().any(|&e| e >= ne)
            || unit.a.iter().chain(&unit.b).any(|&v| v >= nv)
        {
            return bad(format!("unit {k} has an id out of range"));
        }
        if faces.iter().any(|&f| labeling.unit_of_face[f] != k) {
            return bad(format!("unit {k} faces are labeled with another unit"));
        }
        if labeling.role_of_face[unit.hexagon] != FaceRole::Hexagon {
            return bad(format!("unit {k} hexagon has the wrong role"));
        }
        for i in 0..6 {
            if labeling.role_of_face[unit.quads[i]] != FaceRole::BandQuad(i as u8) {
                return bad(format!("unit {k} quad {i} has the wrong role"));
            }
            let index = i as u8;
            if labeling.edge_class[unit.hexagon_edges[i]] != (EdgeClass::Hexagon { unit: k, index })
                || labeling.edge_class[unit.spokes[i]] != (EdgeClass::Spoke { unit: k, index })
            {
                return bad(format!("unit {k} edge {i} has the wrong class"));
            }
        }
    }
    Ok(())
}

pub fn read_labeling(path: &Path, mesh: &PolyMesh) -> Result<UnitLabeling, IoError> {
    parse_labeling(&fs::read_to_string(path)?, mesh)
}

pub fn save_labeling(labeling: &UnitLabeling, path: &Path) -> Result<(), IoError> {
    Ok(fs::write(path, labeling_to_json(labeling))?)
}
