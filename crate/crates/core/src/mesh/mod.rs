//! Single pure manifold simplicial meshes of dimension 0 to 3.
//!
//! Storage is an indexed facet list: every facet keeps its oriented vertex
//! tuple, and every vertex keeps the sorted list of facets incident to it.
//! Lower-dimensional simplices are never stored; they are recovered from the
//! facets on demand. Deleted facets and vertices are tombstoned and their
//! identifiers are not handed out again while the tombstone exists.

mod attributes;
mod dart;
mod link;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

pub use attributes::Attribute;
pub use dart::Dart;
pub use link::{link, link_condition};
pub use validate::{validate_simplices, Condition, ValidityReport, Violation};

use crate::error::MeshError;
use crate::scalar::{lerp, Scalar};
use crate::simplex::{FacetId, Simplex, VertexId, MAX_DIM};

/// Conventional name of the vertex embedding attribute.
pub const POSITION: &str = "position";

type Corners = [VertexId; MAX_DIM + 1];

/// Journal entry; replayed in reverse by a rollback.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Undo<T> {
    PushVertex,
    KillVertex(VertexId),
    SetVertexAttr {
        attr: usize,
        vertex: VertexId,
        old: Vec<T>,
    },
    PushFacet,
    RemoveFacet(FacetId),
    ReplaceCorner {
        facet: FacetId,
        corner: usize,
        old: VertexId,
    },
    Generation(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh<T> {
    dim: usize,
    facets: Vec<Corners>,
    facet_alive: Vec<bool>,
    vertex_alive: Vec<bool>,
    vertex_facets: Vec<Vec<FacetId>>,
    vertex_attrs: Vec<Attribute<T>>,
    facet_attrs: Vec<Attribute<T>>,
    generation: u64,
    journal: Option<Vec<Undo<T>>>,
}

impl<T: Scalar> Mesh<T> {
    pub fn empty(dim: usize) -> Result<Self, MeshError> {
        if dim > MAX_DIM {
            return Err(MeshError::Dimension(dim));
        }
        Ok(Mesh {
            dim,
            facets: Vec::new(),
            facet_alive: Vec::new(),
            vertex_alive: Vec::new(),
            vertex_facets: Vec::new(),
            vertex_attrs: Vec::new(),
            facet_attrs: Vec::new(),
            generation: 0,
            journal: None,
        })
    }

    /// Builds a mesh over vertices `0..num_vertices` from oriented facet
    /// tuples. Structural problems (wrong arity, unknown or repeated
    /// vertices) are errors; Definition-level problems such as non-manifold
    /// faces are left for [`Mesh::validate`].
    pub fn new<F>(dim: usize, num_vertices: usize, facets: &[F]) -> Result<Self, MeshError>
    where
        F: AsRef<[u32]>,
    {
        let mut mesh = Mesh::empty(dim)?;
        mesh.vertex_alive = vec![true; num_vertices];
        mesh.vertex_facets = vec![Vec::new(); num_vertices];
        for (i, f) in facets.iter().enumerate() {
            let f = f.as_ref();
            if f.len() != dim + 1 {
                return Err(MeshError::FacetArity {
                    facet: i,
                    got: f.len(),
                    expected: dim + 1,
                });
            }
            let mut corners = [VertexId::INVALID; MAX_DIM + 1];
            for (c, &v) in f.iter().enumerate() {
                if v as usize >= num_vertices {
                    return Err(MeshError::UnknownVertex { facet: i, vertex: v });
                }
                if f[..c].contains(&v) {
                    return Err(MeshError::RepeatedVertex { facet: i, vertex: v });
                }
                corners[c] = VertexId(v);
            }
            mesh.insert_facet_raw(corners);
        }
        Ok(mesh)
    }

    fn insert_facet_raw(&mut self, corners: Corners) -> FacetId {
        let id = FacetId(self.facets.len() as u32);
        self.facets.push(corners);
        self.facet_alive.push(true);
        for &v in &corners[..=self.dim] {
            insert_sorted(&mut self.vertex_facets[v.index()], id);
        }
        for a in &mut self.facet_attrs {
            let w = a.width;
            a.data.extend(std::iter::repeat_n(T::zero(), w));
        }
        id
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Incremented on every topological change.
    #[inline]
    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Number of vertex slots, alive or not.
    pub fn vertex_capacity(&self) -> usize {
        self.vertex_alive.len()
    }

    /// Number of facet slots, alive or not.
    pub fn facet_capacity(&self) -> usize {
        self.facets.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn facets(&self) -> impl Iterator<Item = FacetId> + '_ {
        self.facet_alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| FacetId(i as u32))
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_alive.iter().filter(|&&a| a).count()
    }

    pub fn num_facets(&self) -> usize {
        self.facet_alive.iter().filter(|&&a| a).count()
    }

    pub fn is_empty(&self) -> bool {
        self.num_facets() == 0
    }

    #[inline]
    pub fn is_vertex_alive(&self, v: VertexId) -> bool {
        self.vertex_alive.get(v.index()).copied().unwrap_or(false)
    }

    #[inline]
    pub fn is_facet_alive(&self, f: FacetId) -> bool {
        self.facet_alive.get(f.index()).copied().unwrap_or(false)
    }

    /// Oriented corner tuple of a facet (valid for deleted facets too).
    #[inline]
    pub fn facet_vertices(&self, f: FacetId) -> &[VertexId] {
        &self.facets[f.index()][..=self.dim]
    }

    #[inline]
    pub fn facet_simplex(&self, f: FacetId) -> Simplex {
        Simplex::new(self.facet_vertices(f)).expect("facet corners are distinct")
    }

    /// Alive facets incident to `v`, sorted by id.
    #[inline]
    pub fn vertex_facets(&self, v: VertexId) -> &[FacetId] {
        self.vertex_facets
            .get(v.index())
            .map(|x| x.as_slice())
            .unwrap_or(&[])
    }

    /// Alive facets having `s` as a face (or equal to it), sorted by id.
    pub fn facets_containing(&self, s: &Simplex) -> Vec<FacetId> {
        let Some(&pivot) = s
            .vertices()
            .iter()
            .min_by_key(|v| self.vertex_facets(**v).len())
        else {
            return Vec::new();
        };
        self.vertex_facets(pivot)
            .iter()
            .copied()
            .filter(|&f| {
                let fv = self.facet_vertices(f);
                s.vertices().iter().all(|v| fv.contains(v))
            })
            .collect()
    }

    /// Whether `s` is a simplex of the complex (a face of an alive facet, or
    /// an alive unreferenced vertex).
    pub fn contains_simplex(&self, s: &Simplex) -> bool {
        if s.dim() > self.dim {
            return false;
        }
        if s.dim() == 0 {
            return self.is_vertex_alive(s.vertices()[0]);
        }
        let Some(&pivot) = s.vertices().iter().min_by_key(|v| self.vertex_facets(**v).len()) else {
            return false;
        };
        self.vertex_facets(pivot).iter().any(|&f| {
            let fv = self.facet_vertices(f);
            s.vertices().iter().all(|v| fv.contains(v))
        })
    }

    pub fn check_alive(&self, s: &Simplex) -> Result<(), MeshError> {
        if self.contains_simplex(s) {
            Ok(())
        } else {
            Err(MeshError::StaleSimplex(*s))
        }
    }

    /// All simplices of dimension `k`, sorted.
    pub fn simplices_of_dim(&self, k: usize) -> Vec<Simplex> {
        if k > self.dim {
            return Vec::new();
        }
        if k == 0 {
            return self.vertices().map(Simplex::vertex).collect();
        }
        let set: BTreeSet<Simplex> = self
            .facets()
            .flat_map(|f| self.facet_simplex(f).faces_of_dim(k))
            .collect();
        set.into_iter().collect()
    }

    pub fn edges(&self) -> Vec<Simplex> {
        self.simplices_of_dim(1)
    }

    /// Simplex counts by dimension `[V, E, F, T]`.
    pub fn simplex_counts(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for (k, slot) in out.iter_mut().enumerate().take(self.dim + 1) {
            *slot = self.simplices_of_dim(k).len();
        }
        out
    }

    /// Alternating sum `V - E + F - T`.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplex_counts()
            .iter()
            .enumerate()
            .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Vertices adjacent to `v` through an edge.
    pub fn vertex_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self
            .vertex_facets(v)
            .iter()
            .flat_map(|&f| self.facet_vertices(f).iter().copied())
            .filter(|&w| w != v)
            .collect();
        set.into_iter().collect()
    }

    /// `(d-1)`-faces with exactly one incident facet.
    pub fn boundary_faces(&self) -> Vec<Simplex> {
        if self.dim == 0 {
            return Vec::new();
        }
        let mut count: BTreeMap<Simplex, usize> = BTreeMap::new();
        for f in self.facets() {
            for face in self.facet_simplex(f).faces_of_dim(self.dim - 1) {
                *count.entry(face).or_default() += 1;
            }
        }
        count
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(s, _)| s)
            .collect()
    }

    /// Copy with every boundary face joined to one extra vertex, returned
    /// alongside. Existing vertex and facet ids are unchanged.
    pub fn coned(&self) -> (Mesh<T>, VertexId) {
        let mut out = self.clone();
        out.journal = None;
        let boundary = self.boundary_faces();
        let attrs: Vec<Vec<T>> = self
            .vertex_attrs
            .iter()
            .map(|a| vec![T::zero(); a.width])
            .collect();
        let apex = out.push_vertex(&attrs);
        for face in boundary {
            let mut corners = face.vertices().to_vec();
            corners.push(apex);
            out.push_facet(&corners, None);
        }
        (out, apex)
    }

    /// Whether a `(d-1)`-face lies on the boundary.
    pub fn is_boundary_face(&self, face: &Simplex) -> bool {
        face.dim() + 1 == self.dim && self.facets_containing(face).len() == 1
    }

    /// Whether `s` is contained in some boundary `(d-1)`-face.
    pub fn is_on_boundary(&self, s: &Simplex) -> bool {
        if self.dim == 0 {
            return false;
        }
        self.facets_containing(s).iter().any(|&f| {
            let fs = self.facet_simplex(f);
            fs.vertices()
                .iter()
                .filter(|v| !s.contains(**v))
                .any(|&opp| self.is_boundary_face(&fs.without(opp).unwrap()))
        })
    }

    /// Connected components of facets, glued through shared `(d-1)`-faces.
    pub fn connected_components(&self) -> usize {
        let facets: Vec<FacetId> = self.facets().collect();
        let mut seen: BTreeSet<FacetId> = BTreeSet::new();
        let mut count = 0;
        for &start in &facets {
            if !seen.insert(start) {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for g in self.adjacent_facets(f) {
                    if seen.insert(g) {
                        stack.push(g);
                    }
                }
            }
        }
        count
    }

    /// Facets sharing a `(d-1)`-face with `f`.
    pub fn adjacent_facets(&self, f: FacetId) -> Vec<FacetId> {
        if self.dim == 0 {
            return Vec::new();
        }
        let fs = self.facet_simplex(f);
        let mut out: Vec<FacetId> = fs
            .faces_of_dim(self.dim - 1)
            .iter()
            .flat_map(|face| self.facets_containing(face))
            .filter(|&g| g != f)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    // ---- attributes --------------------------------------------------------

    pub fn vertex_attributes(&self) -> &[Attribute<T>] {
        &self.vertex_attrs
    }

    pub fn facet_attributes(&self) -> &[Attribute<T>] {
        &self.facet_attrs
    }

    pub fn vertex_attribute(&self, name: &str) -> Option<&Attribute<T>> {
        self.vertex_attrs.iter().find(|a| a.name == name)
    }

    pub fn facet_attribute(&self, name: &str) -> Option<&Attribute<T>> {
        self.facet_attrs.iter().find(|a| a.name == name)
    }

    /// Adds a vertex attribute; `data` holds `width` values per vertex slot.
    pub fn add_vertex_attribute(
        &mut self,
        name: &str,
        width: usize,
        data: Vec<T>,
    ) -> Result<(), MeshError> {
        if self.vertex_attribute(name).is_some() {
            return Err(MeshError::DuplicateAttribute(name.to_string()));
        }
        let expected = width * self.vertex_capacity();
        if data.len() != expected {
            return Err(MeshError::AttributeWidth {
                name: name.to_string(),
                expected,
                got: data.len(),
            });
        }
        self.vertex_attrs.push(Attribute::new(name, width, data));
        Ok(())
    }

    pub fn add_facet_attribute(
        &mut self,
        name: &str,
        width: usize,
        data: Vec<T>,
    ) -> Result<(), MeshError> {
        if self.facet_attribute(name).is_some() {
            return Err(MeshError::DuplicateAttribute(name.to_string()));
        }
        let expected = width * self.facet_capacity();
        if data.len() != expected {
            return Err(MeshError::AttributeWidth {
                name: name.to_string(),
                expected,
                got: data.len(),
            });
        }
        self.facet_attrs.push(Attribute::new(name, width, data));
        Ok(())
    }

    pub fn position_width(&self) -> Option<usize> {
        self.vertex_attribute(POSITION).map(|a| a.width)
    }

    /// Position of `v` as a slice of 2 or 3 coordinates.
    pub fn position(&self, v: VertexId) -> Option<&[T]> {
        self.vertex_attribute(POSITION).map(|a| a.get(v.index()))
    }

    pub fn position3(&self, v: VertexId) -> Option<[T; 3]> {
        let p = self.position(v)?;
        Some([p[0], p[1], if p.len() > 2 { p[2] } else { T::zero() }])
    }

    /// Journaled attribute write.
    pub fn set_vertex_attribute(
        &mut self,
        name: &str,
        v: VertexId,
        values: &[T],
    ) -> Result<(), MeshError> {
        let idx = self
            .vertex_attrs
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| MeshError::MissingAttribute(name.to_string()))?;
        self.set_vertex_attr_idx(idx, v, values)
    }

    pub(crate) fn set_vertex_attr_idx(
        &mut self,
        idx: usize,
        v: VertexId,
        values: &[T],
    ) -> Result<(), MeshError> {
        let attr = &mut self.vertex_attrs[idx];
        if values.len() != attr.width {
            return Err(MeshError::AttributeWidth {
                name: attr.name.clone(),
                expected: attr.width,
                got: values.len(),
            });
        }
        let old = attr.get(v.index()).to_vec();
        if old.as_slice() == values {
            return Ok(());
        }
        attr.get_mut(v.index()).copy_from_slice(values);
        if let Some(j) = &mut self.journal {
            j.push(Undo::SetVertexAttr {
                attr: idx,
                vertex: v,
                old,
            });
        }
        Ok(())
    }

    pub fn set_position(&mut self, v: VertexId, p: &[T]) -> Result<(), MeshError> {
        self.set_vertex_attribute(POSITION, v, p)
    }

    /// Interpolated attribute values between `a` and `b` (`t = 0` gives `a`).
    pub(crate) fn interpolated_attrs(&self, a: VertexId, b: VertexId, t: T) -> Vec<Vec<T>> {
        self.vertex_attrs
            .iter()
            .map(|attr| {
                attr.get(a.index())
                    .iter()
                    .zip(attr.get(b.index()))
                    .map(|(&x, &y)| lerp(x, y, t))
                    .collect()
            })
            .collect()
    }

    // ---- journaled mutation primitives -------------------------------------

    pub(crate) fn push_vertex(&mut self, attrs: &[Vec<T>]) -> VertexId {
        let id = VertexId(self.vertex_alive.len() as u32);
        self.vertex_alive.push(true);
        self.vertex_facets.push(Vec::new());
        for (k, a) in self.vertex_attrs.iter_mut().enumerate() {
            match attrs.get(k) {
                Some(vals) if vals.len() == a.width => a.data.extend_from_slice(vals),
                _ => {
                    let w = a.width;
                    a.data.extend(std::iter::repeat_n(T::zero(), w));
                }
            }
        }
        self.log(Undo::PushVertex);
        id
    }

    pub(crate) fn kill_vertex(&mut self, v: VertexId) {
        debug_assert!(self.vertex_facets[v.index()].is_empty());
        self.vertex_alive[v.index()] = false;
        self.log(Undo::KillVertex(v));
    }

    /// Appends a facet, copying facet attributes from `like` when given.
    pub(crate) fn push_facet(&mut self, corners: &[VertexId], like: Option<FacetId>) -> FacetId {
        let mut c = [VertexId::INVALID; MAX_DIM + 1];
        c[..corners.len()].copy_from_slice(corners);
        let id = self.insert_facet_raw(c);
        if let Some(src) = like {
            for a in &mut self.facet_attrs {
                let vals = a.get(src.index()).to_vec();
                a.get_mut(id.index()).copy_from_slice(&vals);
            }
        }
        self.log(Undo::PushFacet);
        id
    }

    pub(crate) fn remove_facet(&mut self, f: FacetId) {
        debug_assert!(self.facet_alive[f.index()]);
        self.facet_alive[f.index()] = false;
        let corners = self.facets[f.index()];
        for &v in &corners[..=self.dim] {
            remove_sorted(&mut self.vertex_facets[v.index()], f);
        }
        self.log(Undo::RemoveFacet(f));
    }

    pub(crate) fn replace_corner(&mut self, f: FacetId, corner: usize, new: VertexId) {
        let old = self.facets[f.index()][corner];
        remove_sorted(&mut self.vertex_facets[old.index()], f);
        self.facets[f.index()][corner] = new;
        insert_sorted(&mut self.vertex_facets[new.index()], f);
        self.log(Undo::ReplaceCorner {
            facet: f,
            corner,
            old,
        });
    }

    pub(crate) fn bump_generation(&mut self) {
        let old = self.generation;
        self.generation += 1;
        self.log(Undo::Generation(old));
    }

    #[inline]
    fn log(&mut self, u: Undo<T>) {
        if let Some(j) = &mut self.journal {
            j.push(u);
        }
    }

    pub(crate) fn begin_journal(&mut self) {
        debug_assert!(self.journal.is_none(), "nested mesh journal");
        self.journal = Some(Vec::new());
    }

    pub(crate) fn take_journal(&mut self) -> Vec<Undo<T>> {
        self.journal.take().unwrap_or_default()
    }

    pub(crate) fn is_journaling(&self) -> bool {
        self.journal.is_some()
    }

    /// Current journal length, for a partial [`Mesh::rewind`].
    pub(crate) fn journal_mark(&self) -> usize {
        self.journal.as_ref().map_or(0, Vec::len)
    }

    /// Undoes journaled entries past `mark` while keeping the journal open.
    pub(crate) fn rewind(&mut self, mark: usize) {
        let mut journal = self.journal.take().expect("rewind needs a journal");
        let tail = journal.split_off(mark);
        self.undo(tail);
        self.journal = Some(journal);
    }

    /// Replays journal entries in reverse; the journal must be off.
    pub(crate) fn undo(&mut self, entries: Vec<Undo<T>>) {
        debug_assert!(self.journal.is_none());
        for e in entries.into_iter().rev() {
            match e {
                Undo::PushVertex => {
                    self.vertex_alive.pop();
                    let adj = self.vertex_facets.pop();
                    debug_assert!(adj.map(|a| a.is_empty()).unwrap_or(true));
                    for a in &mut self.vertex_attrs {
                        let n = a.data.len() - a.width;
                        a.data.truncate(n);
                    }
                }
                Undo::KillVertex(v) => self.vertex_alive[v.index()] = true,
                Undo::SetVertexAttr { attr, vertex, old } => {
                    self.vertex_attrs[attr].get_mut(vertex.index()).copy_from_slice(&old);
                }
                Undo::PushFacet => {
                    let f = FacetId(self.facets.len() as u32 - 1);
                    if self.facet_alive[f.index()] {
                        let corners = self.facets[f.index()];
                        for &v in &corners[..=self.dim] {
                            remove_sorted(&mut self.vertex_facets[v.index()], f);
                        }
                    }
                    self.facets.pop();
                    self.facet_alive.pop();
                    for a in &mut self.facet_attrs {
                        let n = a.data.len() - a.width;
                        a.data.truncate(n);
                    }
                }
                Undo::RemoveFacet(f) => {
                    self.facet_alive[f.index()] = true;
                    let corners = self.facets[f.index()];
                    for &v in &corners[..=self.dim] {
                        insert_sorted(&mut self.vertex_facets[v.index()], f);
                    }
                }
                Undo::ReplaceCorner { facet, corner, old } => {
                    let cur = self.facets[facet.index()][corner];
                    if self.facet_alive[facet.index()] {
                        remove_sorted(&mut self.vertex_facets[cur.index()], facet);
                        insert_sorted(&mut self.vertex_facets[old.index()], facet);
                    }
                    self.facets[facet.index()][corner] = old;
                }
                Undo::Generation(g) => self.generation = g,
            }
        }
    }

    /// Rebuilds a mesh from raw slots, used by the archive loader.
    pub(crate) fn from_raw_parts(
        dim: usize,
        vertex_alive: Vec<bool>,
        facets: Vec<Vec<VertexId>>,
        facet_alive: Vec<bool>,
        vertex_attrs: Vec<Attribute<T>>,
        facet_attrs: Vec<Attribute<T>>,
        generation: u64,
    ) -> Result<Self, MeshError> {
        let mut mesh = Mesh::empty(dim)?;
        mesh.vertex_alive = vertex_alive;
        mesh.vertex_facets = vec![Vec::new(); mesh.vertex_alive.len()];
        for (i, f) in facets.iter().enumerate() {
            if f.len() != dim + 1 {
                return Err(MeshError::FacetArity {
                    facet: i,
                    got: f.len(),
                    expected: dim + 1,
                });
            }
            let mut c = [VertexId::INVALID; MAX_DIM + 1];
            for (k, &v) in f.iter().enumerate() {
                if v.index() >= mesh.vertex_alive.len() {
                    return Err(MeshError::UnknownVertex {
                        facet: i,
                        vertex: v.0,
                    });
                }
                c[k] = v;
            }
            let id = FacetId(mesh.facets.len() as u32);
            mesh.facets.push(c);
            mesh.facet_alive.push(facet_alive[i]);
            if facet_alive[i] {
                for &v in f {
                    insert_sorted(&mut mesh.vertex_facets[v.index()], id);
                }
            }
        }
        for a in &vertex_attrs {
            if a.data.len() != a.width * mesh.vertex_alive.len() {
                return Err(MeshError::AttributeWidth {
                    name: a.name.clone(),
                    expected: a.width * mesh.vertex_alive.len(),
                    got: a.data.len(),
                });
            }
        }
        for a in &facet_attrs {
            if a.data.len() != a.width * mesh.facets.len() {
                return Err(MeshError::AttributeWidth {
                    name: a.name.clone(),
                    expected: a.width * mesh.facets.len(),
                    got: a.data.len(),
                });
            }
        }
        mesh.vertex_attrs = vertex_attrs;
        mesh.facet_attrs = facet_attrs;
        mesh.generation = generation;
        Ok(mesh)
    }

    /// Copy without tombstones: alive vertices and facets renumbered in
    /// increasing id order. Returns the old-to-new vertex table.
    pub fn compacted(&self) -> (Mesh<T>, Vec<Option<VertexId>>) {
        let mut remap = vec![None; self.vertex_capacity()];
        let mut n = 0u32;
        for v in self.vertices() {
            remap[v.index()] = Some(VertexId(n));
            n += 1;
        }
        let facets: Vec<Vec<u32>> = self
            .facets()
            .map(|f| {
                self.facet_vertices(f)
                    .iter()
                    .map(|v| remap[v.index()].unwrap().0)
                    .collect()
            })
            .collect();
        let mut out = Mesh::new(self.dim, n as usize, &facets).expect("alive facets are structural");
        for a in &self.vertex_attrs {
            let data = self
                .vertices()
                .flat_map(|v| a.get(v.index()).to_vec())
                .collect();
            out.add_vertex_attribute(&a.name, a.width, data).unwrap();
        }
        for a in &self.facet_attrs {
            let data = self
                .facets()
                .flat_map(|f| a.get(f.index()).to_vec())
                .collect();
            out.add_facet_attribute(&a.name, a.width, data).unwrap();
        }
        (out, remap)
    }
}

pub(crate) fn insert_sorted<K: Ord + Copy>(v: &mut Vec<K>, x: K) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

pub(crate) fn remove_sorted<K: Ord + Copy>(v: &mut Vec<K>, x: K) {
    if let Ok(pos) = v.binary_search(&x) {
        v.remove(pos);
    }
}
