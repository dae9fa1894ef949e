//! Triangle meshes and loading them from ASCII OBJ or PLY files.
//!
//! Faces with more than three vertices are fan-triangulated around their
//! first vertex. OBJ indices are 1-based in the file and converted to
//! 0-based here; anything out of range is a parse error that names the
//! offending line.

use std::fs;
use std::path::Path;

use super::ply::parse_ascii_ply;
use super::CloudError;
use crate::geom::Vec3;

/// An indexed triangle mesh. Triangle winding determines the outward face
/// normal via the right-hand rule.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Builds a mesh after checking that every index refers to a vertex.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, CloudError> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(CloudError::EmptyMesh);
        }
        for tri in &triangles {
            for &i in tri {
                if i >= vertices.len() {
                    return Err(CloudError::Parse {
                        path: String::new(),
                        line: 0,
                        msg: format!("triangle index {i} out of range for {} vertices", vertices.len()),
                    });
                }
            }
        }
        Ok(Self { vertices, triangles })
    }

    /// Area of triangle `i`.
    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangles[i];
        let ab = self.vertices[b] - self.vertices[a];
        let ac = self.vertices[c] - self.vertices[a];
        0.5 * ab.cross(&ac).norm()
    }

    /// Unit normal of triangle `i` per its winding, or `None` if the
    /// triangle has zero area.
    pub fn triangle_normal(&self, i: usize) -> Option<Vec3> {
        let [a, b, c] = self.triangles[i];
        let ab = self.vertices[b] - self.vertices[a];
        let ac = self.vertices[c] - self.vertices[a];
        let n = ab.cross(&ac);
        let len = n.norm();
        if len > 0.0 {
            Some(n / len)
        } else {
            None
        }
    }
}

/// Loads a triangle mesh from an ASCII OBJ or PLY file, deciding by the
/// `ply` magic on the first line.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriangleMesh, CloudError> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CloudError::Io { path: label.clone(), source })?;
    if text.lines().next().map(str::trim) == Some("ply") {
        parse_ply_mesh(&text, &label)
    } else {
        parse_obj(&text, &label)
    }
}

fn parse_error(path: &str, line: usize, msg: impl Into<String>) -> CloudError {
    CloudError::Parse { path: path.to_owned(), line, msg: msg.into() }
}

/// Fan-triangulates one polygon's vertex indices.
fn push_fan(indices: &[usize], out: &mut Vec<[usize; 3]>) {
    for w in 1..indices.len() - 1 {
        out.push([indices[0], indices[w], indices[w + 1]]);
    }
}

fn parse_obj(text: &str, path: &str) -> Result<TriangleMesh, CloudError> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut coord = [0.0; 3];
                for c in &mut coord {
                    *c = tok
                        .next()
                        .and_then(|t| t.parse::<f64>().ok())
                        .ok_or_else(|| parse_error(path, n, "vertex needs three numeric coordinates"))?;
                }
                vertices.push(Vec3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let mut indices = Vec::new();
                for t in tok {
                    let first = t.split('/').next().unwrap_or("");
                    let idx: i64 = first
                        .parse()
                        .map_err(|_| parse_error(path, n, format!("invalid face index `{first}`")))?;
                    if idx < 1 {
                        return Err(parse_error(path, n, format!("face index {idx} is not 1-based")));
                    }
                    let idx = idx as usize - 1;
                    if idx >= vertices.len() {
                        return Err(parse_error(
                            path,
                            n,
                            format!("face index {} out of range for {} vertices", idx + 1, vertices.len()),
                        ));
                    }
                    indices.push(idx);
                }
                if indices.len() < 3 {
                    return Err(parse_error(path, n, "face needs at least three vertices"));
                }
                push_fan(&indices, &mut triangles);
            }
            _ => {}
        }
    }

    if vertices.is_empty() || triangles.is_empty() {
        return Err(CloudError::EmptyMesh);
    }
    TriangleMesh::new(vertices, triangles)
}

fn parse_ply_mesh(text: &str, path: &str) -> Result<TriangleMesh, CloudError> {
    let ply = parse_ascii_ply(text).map_err(|e| parse_error(path, e.line, e.msg))?;

    let vertex = ply.element("vertex").ok_or(CloudError::EmptyMesh)?;
    let (ix, iy, iz) = match (vertex.scalar_index("x"), vertex.scalar_index("y"), vertex.scalar_index("z")) {
        (Some(ix), Some(iy), Some(iz)) => (ix, iy, iz),
        _ => return Err(parse_error(path, 0, "vertex element lacks x, y, z properties")),
    };
    let vertices: Vec<Vec3> = vertex.rows.iter().map(|r| Vec3::new(r[ix], r[iy], r[iz])).collect();

    let face = ply.element("face").ok_or(CloudError::EmptyMesh)?;
    if !face.has_list {
        return Err(parse_error(path, 0, "face element lacks a vertex index list property"));
    }
    let mut triangles = Vec::new();
    for row in &face.rows {
        let mut indices = Vec::with_capacity(row.len());
        for &v in row {
            if v < 0.0 || v.fract() != 0.0 || v as usize >= vertices.len() {
                return Err(parse_error(path, 0, format!("face index {v} out of range for {} vertices", vertices.len())));
            }
            indices.push(v as usize);
        }
        if indices.len() < 3 {
            return Err(parse_error(path, 0, "face needs at least three vertices"));
        }
        push_fan(&indices, &mut triangles);
    }

    if triangles.is_empty() {
        return Err(CloudError::EmptyMesh);
    }
    TriangleMesh::new(vertices, triangles)
}
