//! Binary multimesh archive, little-endian throughout.
//!
//! ```text
//! magic "MMSH" | version u32 | generation u64 | node count u64
//! per node, in id order:
//!   name (u64 length + UTF-8) | parent u64 (u64::MAX for the root)
//!   dim u64 | generation u64
//!   vertex slots u64 | alive flag u8 per slot
//!   facet slots u64  | per slot: alive u8, dim + 1 corner ids u64
//!   vertex attribute count u64 | per attribute: name, width u64, f64 values
//!   facet attribute count u64  | same layout
//!   non-root nodes only:
//!     image id u64 per vertex slot (u64::MAX when unmapped)
//!     per facet slot: u8 flag, then when set the child dart and the parent
//!     dart, each as facet u64 followed by 4 permutation bytes
//! ```
//!
//! Tombstoned slots are kept, so ids and anchors survive unchanged.

use std::path::Path;

use super::IoError;
use crate::mesh::{Attribute, Dart, Mesh};
use crate::multimesh::{Anchor, ContainmentMap, MultiMesh, Node, NodeId};
use crate::scalar::Scalar;
use crate::simplex::{FacetId, VertexId, MAX_DIM};

pub const ARCHIVE_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"MMSH";
const NONE: u64 = u64::MAX;

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn str(&mut self, s: &str) {
        self.u64(s.len() as u64);
        self.0.extend_from_slice(s.as_bytes());
    }
    fn dart(&mut self, d: &Dart) {
        self.u64(d.facet.0 as u64);
        self.0.extend_from_slice(&d.perm);
    }
    fn attrs<T: Scalar>(&mut self, attrs: &[Attribute<T>]) {
        self.u64(attrs.len() as u64);
        for a in attrs {
            self.str(a.name());
            self.u64(a.width() as u64);
            for &x in a.data() {
                self.f64(x.as_f64());
            }
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Archive(msg.into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IoError> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| bad(format!("truncated at byte {}", self.at)))?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, IoError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, IoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, IoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, IoError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    /// A count or id that must fit in memory-sized and 32-bit id ranges.
    fn len(&mut self) -> Result<usize, IoError> {
        let n = self.u64()?;
        if n > u32::MAX as u64 || n as usize > self.bytes.len() {
            return Err(bad(format!("implausible count {n} at byte {}", self.at - 8)));
        }
        Ok(n as usize)
    }
    fn flag(&mut self) -> Result<bool, IoError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            x => Err(bad(format!("bad flag {x} at byte {}", self.at - 1))),
        }
    }
    fn str(&mut self) -> Result<String, IoError> {
        let n = self.len()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| bad("name is not UTF-8"))
    }
    fn dart(&mut self) -> Result<Dart, IoError> {
        let facet = FacetId(self.len()? as u32);
        let p = self.take(MAX_DIM + 1)?;
        Ok(Dart::new(facet, [p[0], p[1], p[2], p[3]]))
    }
    fn attrs<T: Scalar>(&mut self, slots: usize) -> Result<Vec<Attribute<T>>, IoError> {
        let n = self.len()?;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let name = self.str()?;
            let width = self.len()?;
            let data = (0..width * slots).map(|_| self.f64().map(T::of)).collect::<Result<_, _>>()?;
            out.push(Attribute::new(&name, width, data));
        }
        Ok(out)
    }
}

pub fn archive_to_bytes<T: Scalar>(mm: &MultiMesh<T>) -> Result<Vec<u8>, IoError> {
    if mm.mesh(mm.root()).num_facets() == 0 {
        return Err(IoError::Empty);
    }
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.0.extend_from_slice(&ARCHIVE_VERSION.to_le_bytes());
    w.u64(mm.generation());
    w.u64(mm.num_nodes() as u64);
    for n in mm.node_ids() {
        let node = mm.node(n)?;
        let m = node.mesh();
        w.str(&node.name);
        w.u64(node.parent().map_or(NONE, |p| p.0 as u64));
        w.u64(m.dim() as u64);
        w.u64(m.generation());
        w.u64(m.vertex_capacity() as u64);
        for i in 0..m.vertex_capacity() {
            w.u8(m.is_vertex_alive(VertexId(i as u32)) as u8);
        }
        w.u64(m.facet_capacity() as u64);
        for i in 0..m.facet_capacity() {
            let f = FacetId(i as u32);
            w.u8(m.is_facet_alive(f) as u8);
            for v in m.facet_vertices(f) {
                w.u64(v.0 as u64);
            }
        }
        w.attrs(m.vertex_attributes());
        w.attrs(m.facet_attributes());
        if let Some(map) = node.map() {
            for i in 0..m.vertex_capacity() {
                let p = map.image_of(VertexId(i as u32));
                w.u64(if p == VertexId::INVALID { NONE } else { p.0 as u64 });
            }
            for i in 0..m.facet_capacity() {
                match map.anchor(FacetId(i as u32)) {
                    Some(a) => {
                        w.u8(1);
                        w.dart(&a.child);
                        w.dart(&a.parent);
                    }
                    None => w.u8(0),
                }
            }
        }
    }
    Ok(w.0)
}

pub fn archive_from_bytes<T: Scalar>(bytes: &[u8]) -> Result<MultiMesh<T>, IoError> {
    let mut r = Reader { bytes, at: 0 };
    if r.take(4)? != MAGIC {
        return Err(bad("missing MMSH magic"));
    }
    let version = r.u32()?;
    if version != ARCHIVE_VERSION {
        return Err(IoError::Version {
            found: version,
            expected: ARCHIVE_VERSION,
        });
    }
    let generation = r.u64()?;
    let count = r.len()?;
    let mut nodes: Vec<Node<T>> = Vec::with_capacity(count);
    let mut parents = Vec::with_capacity(count);
    let mut parts = Vec::with_capacity(count);
    for i in 0..count {
        let name = r.str()?;
        let parent = match r.u64()? {
            NONE if i == 0 => None,
            p if i > 0 && (p as usize) < i => Some(NodeId(p as usize)),
            p => return Err(bad(format!("node {i} has invalid parent {p}"))),
        };
        let dim = r.len()?;
        if dim > MAX_DIM {
            return Err(bad(format!("node {i} has dimension {dim}")));
        }
        let mesh_generation = r.u64()?;
        let nv = r.len()?;
        let vertex_alive = (0..nv).map(|_| r.flag()).collect::<Result<Vec<_>, _>>()?;
        let nf = r.len()?;
        let mut facets = Vec::with_capacity(nf);
        let mut facet_alive = Vec::with_capacity(nf);
        for _ in 0..nf {
            facet_alive.push(r.flag()?);
            facets.push((0..=dim).map(|_| r.len().map(|v| VertexId(v as u32))).collect::<Result<Vec<_>, _>>()?);
        }
        let vattrs = r.attrs(nv)?;
        let fattrs = r.attrs(nf)?;
        let mesh = Mesh::from_raw_parts(dim, vertex_alive, facets, facet_alive, vattrs, fattrs, mesh_generation)?;
        let map = match parent {
            None => None,
            Some(_) => {
                let image = (0..nv)
                    .map(|_| r.u64().map(|p| if p == NONE { VertexId::INVALID } else { VertexId(p as u32) }))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut anchors = Vec::with_capacity(nf);
                for _ in 0..nf {
                    anchors.push(if r.flag()? {
                        Some(Anchor {
                            child: r.dart()?,
                            parent: r.dart()?,
                        })
                    } else {
                        None
                    });
                }
                Some(ContainmentMap::from_raw_parts(dim, image, anchors))
            }
        };
        parents.push(parent);
        parts.push((name, mesh, map));
    }
    if r.at != bytes.len() {
        return Err(bad(format!("{} trailing bytes", bytes.len() - r.at)));
    }
    for (i, (name, mesh, map)) in parts.into_iter().enumerate() {
        let children = (0..count).filter(|&c| parents[c] == Some(NodeId(i))).map(NodeId).collect();
        if let (Some(p), Some(map)) = (parents[i], &map) {
            let pm = nodes[p.0].mesh();
            if map.child_dim() > pm.dim() {
                return Err(bad(format!("node {i} is higher-dimensional than its parent")));
            }
            if let Some(e) = map.check(&mesh, pm).first() {
                return Err(bad(format!("node {i} map: {e}")));
            }
        }
        nodes.push(Node::from_parts(name, mesh, parents[i], children, map));
    }
    if nodes.is_empty() {
        return Err(bad("no nodes"));
    }
    Ok(MultiMesh::from_parts(nodes, generation))
}

pub fn save_archive<T: Scalar>(mm: &MultiMesh<T>, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, archive_to_bytes(mm)?)?;
    Ok(())
}

pub fn load_archive<T: Scalar>(path: impl AsRef<Path>) -> Result<MultiMesh<T>, IoError> {
    archive_from_bytes(&std::fs::read(path)?)
}
