use std::fmt::Write as _;
use std::path::Path;

use super::{parse_err, IoError};
use crate::mesh::{Mesh, POSITION};
use crate::multimesh::{MultiMesh, NodeId};
use crate::scalar::Scalar;
use crate::simplex::FacetId;

/// Triangle soup as written in an OBJ file. Indices are 0-based; every face
/// corner pairs a position with an optional texture coordinate.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjDocument {
    pub positions: Vec<[f64; 3]>,
    pub texcoords: Vec<[f64; 2]>,
    pub faces: Vec<[(usize, Option<usize>); 3]>,
    /// Source line of each face (fan triangles share their polygon's line).
    pub face_lines: Vec<usize>,
}

/// Meshes read from an OBJ file: the position mesh, the UV mesh when every
/// face carries texture coordinates, and the facet pairing between them.
#[derive(Clone, Debug)]
pub struct ObjMeshes<T> {
    pub positions: Mesh<T>,
    pub uv: Option<Mesh<T>>,
    /// `(uv facet, position facet)` pairs.
    pub pairs: Vec<(FacetId, FacetId)>,
}

fn numbers<const N: usize>(line: usize, toks: &[&str], min: usize) -> Result<[f64; N], IoError> {
    if toks.len() < min {
        return Err(parse_err(line, format!("expected at least {min} coordinates")));
    }
    let mut out = [0.0; N];
    for (i, t) in toks.iter().take(N).enumerate() {
        out[i] = t.parse().map_err(|_| parse_err(line, format!("bad number `{t}`")))?;
    }
    Ok(out)
}

fn index(line: usize, tok: &str, count: usize, what: &str) -> Result<usize, IoError> {
    let i: i64 = tok.parse().map_err(|_| parse_err(line, format!("bad {what} index `{tok}`")))?;
    let resolved = if i < 0 { count as i64 + i } else { i - 1 };
    if i == 0 || resolved < 0 || resolved >= count as i64 {
        return Err(parse_err(line, format!("{what} index {i} out of range (have {count})")));
    }
    Ok(resolved as usize)
}

impl ObjDocument {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut doc = ObjDocument::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = content.split_whitespace().collect();
            let Some((&kw, rest)) = toks.split_first() else { continue };
            match kw {
                "v" => doc.positions.push(numbers(line, rest, 3)?),
                "vt" => doc.texcoords.push(numbers(line, rest, 2)?),
                "f" => {
                    if rest.len() < 3 {
                        return Err(parse_err(line, "face needs at least 3 corners"));
                    }
                    let mut corners = Vec::with_capacity(rest.len());
                    for c in rest {
                        let mut parts = c.split('/');
                        let v = index(line, parts.next().unwrap_or(""), doc.positions.len(), "position")?;
                        let vt = match parts.next() {
                            None | Some("") => None,
                            Some(t) => Some(index(line, t, doc.texcoords.len(), "texcoord")?),
                        };
                        corners.push((v, vt));
                    }
                    if corners.iter().any(|c| c.1.is_some()) != corners.iter().all(|c| c.1.is_some()) {
                        return Err(parse_err(line, "face mixes corners with and without texcoords"));
                    }
                    for k in 1..corners.len() - 1 {
                        doc.faces.push([corners[0], corners[k], corners[k + 1]]);
                        doc.face_lines.push(line);
                    }
                }
                "vn" | "vp" | "o" | "g" | "s" | "l" | "usemtl" | "mtllib" => {}
                other => return Err(parse_err(line, format!("unknown statement `{other}`"))),
            }
        }
        Ok(doc)
    }

    /// Position mesh plus, when every face has texture coordinates, the UV
    /// mesh paired facet by facet. Unreferenced vertices are dropped and the
    /// rest keep their relative order.
    pub fn to_meshes<T: Scalar>(&self) -> Result<ObjMeshes<T>, IoError> {
        if self.faces.is_empty() {
            return Err(IoError::Empty);
        }
        let with_uv = self.faces.iter().filter(|f| f[0].1.is_some()).count();
        if with_uv != 0 && with_uv != self.faces.len() {
            let i = self.faces.iter().position(|f| f[0].1.is_none()).unwrap();
            return Err(parse_err(self.face_lines[i], "face lacks texcoords while others have them"));
        }
        let positions = build(self.faces.iter().map(|f| f.map(|c| c.0)), self.positions.iter().map(|p| p.as_slice()), 3)?;
        let uv = if with_uv > 0 {
            Some(build(
                self.faces.iter().map(|f| f.map(|c| c.1.unwrap())),
                self.texcoords.iter().map(|p| p.as_slice()),
                2,
            )?)
        } else {
            None
        };
        let pairs = (0..self.faces.len() as u32).map(|i| (FacetId(i), FacetId(i))).collect();
        Ok(ObjMeshes { positions, uv, pairs })
    }

    /// Faces of a triangle mesh with positions of width 2 or 3.
    pub fn from_mesh<T: Scalar>(mesh: &Mesh<T>) -> Result<Self, IoError> {
        let (positions, table) = vertex_table(mesh, 3)?;
        let faces = mesh
            .facets()
            .map(|f| {
                let c = mesh.facet_vertices(f);
                [0, 1, 2].map(|k| (table[c[k].index()], None))
            })
            .collect::<Vec<_>>();
        Ok(ObjDocument {
            positions: positions.into_iter().map(|p| [p[0], p[1], p[2]]).collect(),
            texcoords: Vec::new(),
            face_lines: vec![0; faces.len()],
            faces,
        })
    }

    /// Root triangle mesh, with texture coordinates taken from `uv` when that
    /// child pairs with the root facet by facet.
    pub fn from_multimesh<T: Scalar>(mm: &MultiMesh<T>, uv: Option<NodeId>) -> Result<Self, IoError> {
        let root = mm.mesh(mm.root());
        let mut doc = ObjDocument::from_mesh(root)?;
        let Some(uv) = uv else { return Ok(doc) };
        let (child, map) = (mm.mesh(uv), mm.map(uv).ok_or_else(|| IoError::Unsupported("uv node is the root".into()))?);
        if child.dim() != 2 || child.num_facets() != root.num_facets() {
            return Err(IoError::Unsupported("uv node does not pair with the root".into()));
        }
        let (coords, table) = vertex_table(child, 2)?;
        doc.texcoords = coords.into_iter().map(|p| [p[0], p[1]]).collect();
        for (face, f) in doc.faces.iter_mut().zip(root.facets()) {
            let [cf] = map.anchored_on(f) else {
                return Err(IoError::Unsupported(format!("root facet {f} is not paired with exactly one uv facet")));
            };
            let cv = child.facet_vertices(*cf);
            for (corner, &p) in face.iter_mut().zip(root.facet_vertices(f)) {
                let c = cv.iter().find(|&&c| map.image_of(c) == p).expect("anchored facet covers the root corners");
                corner.1 = Some(table[c.index()]);
            }
        }
        Ok(doc)
    }

    pub fn write(&self) -> String {
        let mut s = String::new();
        for p in &self.positions {
            writeln!(s, "v {} {} {}", p[0], p[1], p[2]).unwrap();
        }
        for t in &self.texcoords {
            writeln!(s, "vt {} {}", t[0], t[1]).unwrap();
        }
        for f in &self.faces {
            s.push('f');
            for (v, vt) in f {
                match vt {
                    Some(t) => write!(s, " {}/{}", v + 1, t + 1).unwrap(),
                    None => write!(s, " {}", v + 1).unwrap(),
                }
            }
            s.push('\n');
        }
        s
    }
}

fn build<'a, T: Scalar>(
    faces: impl Iterator<Item = [usize; 3]>,
    coords: impl Iterator<Item = &'a [f64]>,
    width: usize,
) -> Result<Mesh<T>, IoError> {
    let faces: Vec<[usize; 3]> = faces.collect();
    let coords: Vec<&[f64]> = coords.collect();
    let mut local = vec![u32::MAX; coords.len()];
    for f in &faces {
        for &v in f {
            local[v] = 0;
        }
    }
    let mut data = Vec::new();
    let mut n = 0u32;
    for (i, slot) in local.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = n;
            n += 1;
            data.extend(coords[i][..width].iter().map(|&x| T::of(x)));
        }
    }
    let tris: Vec<[u32; 3]> = faces.iter().map(|f| f.map(|v| local[v])).collect();
    let mut mesh = Mesh::new(2, n as usize, &tris)?;
    mesh.add_vertex_attribute(POSITION, width, data)?;
    Ok(mesh)
}

/// Coordinates of the alive vertices padded to `width`, and the dense index
/// of every vertex slot.
fn vertex_table<T: Scalar>(mesh: &Mesh<T>, width: usize) -> Result<(Vec<Vec<f64>>, Vec<usize>), IoError> {
    if mesh.dim() != 2 {
        return Err(IoError::Unsupported(format!("OBJ holds triangle meshes, got dimension {}", mesh.dim())));
    }
    if mesh.num_facets() == 0 {
        return Err(IoError::Empty);
    }
    let w = mesh.position_width().ok_or_else(|| IoError::Unsupported("mesh has no positions".into()))?;
    let mut coords = Vec::new();
    let mut table = vec![usize::MAX; mesh.vertex_capacity()];
    for v in mesh.vertices() {
        table[v.index()] = coords.len();
        let p = mesh.position(v).unwrap();
        coords.push((0..width).map(|i| if i < w { p[i].as_f64() } else { 0.0 }).collect());
    }
    Ok((coords, table))
}

pub fn load_obj<T: Scalar>(path: impl AsRef<Path>) -> Result<ObjMeshes<T>, IoError> {
    ObjDocument::parse(&std::fs::read_to_string(path)?)?.to_meshes()
}

/// Writes the root of `mm`, with texture coordinates from node `uv`.
pub fn save_obj<T: Scalar>(mm: &MultiMesh<T>, uv: Option<NodeId>, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, ObjDocument::from_multimesh(mm, uv)?.write())?;
    Ok(())
}

pub fn save_obj_mesh<T: Scalar>(mesh: &Mesh<T>, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, ObjDocument::from_mesh(mesh)?.write())?;
    Ok(())
}
