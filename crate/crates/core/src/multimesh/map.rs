//! Containment maps: per-child-facet anchors plus derived vertex caches.

use std::collections::BTreeSet;

use crate::error::MeshError;
use crate::mesh::{insert_sorted, remove_sorted, Dart, Mesh};
use crate::scalar::Scalar;
use crate::simplex::{FacetId, Simplex, VertexId, MAX_DIM};

/// Pair of darts encoding the map on one child facet. Slots `0..=k` of the
/// parent dart are the images of the child dart's slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Anchor {
    pub child: Dart,
    pub parent: Dart,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum MapUndo {
    Image { vertex: VertexId, old: VertexId },
    Anchor { facet: FacetId, old: Option<Anchor> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct MapLens {
    image: usize,
    anchors: usize,
    preimage: usize,
    parent_refs: usize,
}

/// Undo log of one containment map.
#[derive(Clone, Debug, PartialEq)]
pub struct MapRollback {
    pub(crate) entries: Vec<MapUndo>,
    pub(crate) lens: MapLens,
}

/// Simplicial map from a child mesh into its parent, stored as one anchor
/// per child facet. `image`, `preimage` and `parent_refs` are caches kept in
/// sync with the anchors. Equality ignores the journal and unused trailing
/// slots.
#[derive(Clone, Debug)]
pub struct ContainmentMap {
    child_dim: usize,
    anchors: Vec<Option<Anchor>>,
    image: Vec<VertexId>,
    preimage: Vec<Vec<VertexId>>,
    parent_refs: Vec<Vec<FacetId>>,
    journal: Option<Vec<MapUndo>>,
}

fn trimmed<X: PartialEq>(v: &[X], unused: impl Fn(&X) -> bool) -> &[X] {
    let n = v.iter().rposition(|x| !unused(x)).map_or(0, |i| i + 1);
    &v[..n]
}

impl PartialEq for ContainmentMap {
    fn eq(&self, o: &Self) -> bool {
        self.child_dim == o.child_dim
            && trimmed(&self.anchors, Option::is_none) == trimmed(&o.anchors, Option::is_none)
            && trimmed(&self.image, |v| *v == VertexId::INVALID) == trimmed(&o.image, |v| *v == VertexId::INVALID)
            && trimmed(&self.preimage, Vec::is_empty) == trimmed(&o.preimage, Vec::is_empty)
            && trimmed(&self.parent_refs, Vec::is_empty) == trimmed(&o.parent_refs, Vec::is_empty)
    }
}

impl ContainmentMap {
    fn empty(child_dim: usize) -> Self {
        ContainmentMap {
            child_dim,
            anchors: Vec::new(),
            image: Vec::new(),
            preimage: Vec::new(),
            parent_refs: Vec::new(),
            journal: None,
        }
    }

    /// Builds the map of a child whose facets pair one-to-one with parent
    /// facets. `pairs[i] = (child facet, parent facet)`; corner `j` of the
    /// child facet corresponds to corner `j` of the parent facet.
    pub fn from_facet_bijection<T: Scalar>(
        parent: &Mesh<T>,
        child: &Mesh<T>,
        pairs: &[(FacetId, FacetId)],
    ) -> Result<Self, MeshError> {
        if child.dim() > parent.dim() {
            return Err(MeshError::DimensionOrder {
                child: child.dim(),
                parent: parent.dim(),
            });
        }
        if parent.num_facets() != child.num_facets() || pairs.len() != child.num_facets() {
            return Err(MeshError::FacetCountMismatch {
                parent: parent.num_facets(),
                child: child.num_facets(),
            });
        }
        let mut map = ContainmentMap::empty(child.dim());
        let mut seen_parent = BTreeSet::new();
        let mut seen_child = BTreeSet::new();
        for &(cf, pf) in pairs {
            if !child.is_facet_alive(cf) || !parent.is_facet_alive(pf) {
                return Err(MeshError::StaleFacet(if child.is_facet_alive(cf) { pf } else { cf }));
            }
            if !seen_parent.insert(pf) || !seen_child.insert(cf) {
                return Err(MeshError::Construction {
                    witness: child.facet_simplex(cf),
                    reason: "facet paired twice".into(),
                });
            }
            let cv = child.facet_vertices(cf);
            let pv = parent.facet_vertices(pf);
            if cv.len() != pv.len() {
                return Err(MeshError::DimensionOrder {
                    child: child.dim(),
                    parent: parent.dim(),
                });
            }
            for (&c, &p) in cv.iter().zip(pv) {
                let cur = map.image_of(c);
                if cur != VertexId::INVALID && cur != p {
                    return Err(MeshError::Construction {
                        witness: Simplex::vertex(c),
                        reason: format!("child vertex paired with both {cur} and {p}"),
                    });
                }
                map.set_image(c, p);
            }
        }
        for &(cf, _) in pairs {
            map.seat(child, parent, cf)?;
        }
        map.check_faces(child, parent)?;
        Ok(map)
    }

    /// Builds a child `k`-mesh from tagged parent `k`-simplices. Child vertex
    /// `i` is the `i`-th smallest parent vertex used by the tags; the child
    /// inherits all parent vertex attributes. Facets follow the tag order and
    /// keep the parent facet orientation when `k` equals the parent dimension.
    pub fn from_tags<T: Scalar>(
        parent: &Mesh<T>,
        k: usize,
        tagged: &[Simplex],
    ) -> Result<(Mesh<T>, Self), MeshError> {
        if k > parent.dim() {
            return Err(MeshError::DimensionOrder {
                child: k,
                parent: parent.dim(),
            });
        }
        let mut used = BTreeSet::new();
        for s in tagged {
            if s.dim() != k {
                return Err(MeshError::Construction {
                    witness: *s,
                    reason: format!("tagged simplex is not of dimension {k}"),
                });
            }
            if !parent.contains_simplex(s) {
                return Err(MeshError::StaleSimplex(*s));
            }
            used.extend(s.vertices().iter().copied());
        }
        let parent_of: Vec<VertexId> = used.into_iter().collect();
        let local = |v: VertexId| VertexId(parent_of.binary_search(&v).unwrap() as u32);
        let mut facets: Vec<Vec<u32>> = Vec::with_capacity(tagged.len());
        for s in tagged {
            let order: Vec<VertexId> = if k == parent.dim() {
                let f = parent.facets_containing(s)[0];
                parent.facet_vertices(f).to_vec()
            } else {
                s.vertices().to_vec()
            };
            facets.push(order.into_iter().map(|v| local(v).0).collect());
        }
        let mut child = Mesh::new(k, parent_of.len(), &facets)?;
        let report = child.validate();
        if let Some(v) = report.violations.first() {
            return Err(MeshError::Construction {
                witness: Simplex::new(
                    &v.witness
                        .vertices()
                        .iter()
                        .map(|&x| parent_of[x.index()])
                        .collect::<Vec<_>>(),
                )
                .unwrap_or(v.witness),
                reason: format!("tagged set is not a valid {k}-mesh ({:?})", v.condition),
            });
        }
        for attr in parent.vertex_attributes() {
            let data = parent_of
                .iter()
                .flat_map(|v| attr.get(v.index()).to_vec())
                .collect();
            child.add_vertex_attribute(attr.name(), attr.width(), data)?;
        }
        let mut map = ContainmentMap::empty(k);
        for (i, &p) in parent_of.iter().enumerate() {
            map.set_image(VertexId(i as u32), p);
        }
        let fs: Vec<FacetId> = child.facets().collect();
        for f in fs {
            map.seat(&child, parent, f)?;
        }
        Ok((child, map))
    }

    /// Rebuilds a map from its vertex image table and anchor slots, used by
    /// the archive loader. Caches are derived; nothing is checked.
    pub(crate) fn from_raw_parts(child_dim: usize, image: Vec<VertexId>, anchors: Vec<Option<Anchor>>) -> Self {
        let mut map = ContainmentMap::empty(child_dim);
        for (i, p) in image.into_iter().enumerate() {
            if p != VertexId::INVALID {
                map.set_image(VertexId(i as u32), p);
            }
        }
        for (i, a) in anchors.into_iter().enumerate() {
            if a.is_some() {
                map.set_anchor(FacetId(i as u32), a);
            }
        }
        map
    }

    pub fn child_dim(&self) -> usize {
        self.child_dim
    }

    pub fn anchor(&self, f: FacetId) -> Option<&Anchor> {
        self.anchors.get(f.index()).and_then(|a| a.as_ref())
    }

    /// Parent vertex of a child vertex, `VertexId::INVALID` if unmapped.
    pub fn image_of(&self, v: VertexId) -> VertexId {
        self.image.get(v.index()).copied().unwrap_or(VertexId::INVALID)
    }

    /// Child vertices mapped onto parent vertex `p`, sorted.
    pub fn preimage_of(&self, p: VertexId) -> &[VertexId] {
        self.preimage.get(p.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Child facets whose anchors sit on parent facet `f`.
    pub fn anchored_on(&self, f: FacetId) -> &[FacetId] {
        self.parent_refs.get(f.index()).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `Φ(σ)` for a child simplex.
    pub fn map_simplex(&self, s: &Simplex) -> Option<Simplex> {
        let mut img = [VertexId::INVALID; MAX_DIM + 1];
        for (slot, &v) in img.iter_mut().zip(s.vertices()) {
            *slot = self.image_of(v);
        }
        let img = &img[..s.vertices().len()];
        if img.contains(&VertexId::INVALID) {
            return None;
        }
        Simplex::new(img)
    }

    /// All child simplices `τ` with `Φ(τ) = s`.
    pub fn preimage_simplices<T: Scalar>(&self, child: &Mesh<T>, s: &Simplex) -> Vec<Simplex> {
        let mut out = Vec::new();
        if s.dim() > self.child_dim {
            return out;
        }
        let first = s.vertices()[0];
        for &u in self.preimage_of(first) {
            if !child.is_vertex_alive(u) {
                continue;
            }
            for &f in child.vertex_facets(u) {
                let mut sub = [VertexId::INVALID; MAX_DIM + 1];
                let mut len = 0;
                for &v in child.facet_vertices(f) {
                    if s.contains(self.image_of(v)) {
                        sub[len] = v;
                        len += 1;
                    }
                }
                if len == s.vertices().len() && sub[..len].contains(&u) {
                    if let Some(t) = Simplex::new(&sub[..len]) {
                        if self.map_simplex(&t) == Some(*s) {
                            out.push(t);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Child edges `(u, w)` with `Φ(u) = a` and `Φ(w) = b`, sorted.
    pub fn preimage_edges<T: Scalar>(
        &self,
        child: &Mesh<T>,
        a: VertexId,
        b: VertexId,
    ) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for &u in self.preimage_of(a) {
            if !child.is_vertex_alive(u) {
                continue;
            }
            for w in child.vertex_neighbors(u) {
                if self.image_of(w) == b {
                    out.push((u, w));
                }
            }
        }
        out.sort();
        out
    }

    /// Maps a child dart to the parent dart with the same tuple images by
    /// replaying the switch path from the anchor of its facet.
    pub fn transport_anchor<T: Scalar>(
        &self,
        child: &Mesh<T>,
        parent: &Mesh<T>,
        d: &Dart,
    ) -> Result<Dart, MeshError> {
        if !child.is_dart_alive(d) {
            return Err(MeshError::StaleFacet(d.facet));
        }
        let anchor = self.anchor(d.facet).ok_or(MeshError::BrokenAnchor(d.facet))?;
        if !parent.is_dart_alive(&anchor.parent) {
            return Err(MeshError::BrokenAnchor(d.facet));
        }
        let mut out = anchor.parent;
        for level in anchor.child.switch_path(d, self.child_dim) {
            out = parent.switch(&out, level)?;
        }
        Ok(out)
    }

    /// Child darts whose transported parent dart has the same slots
    /// `0..=k` as `pd`.
    pub fn transport_down<T: Scalar>(
        &self,
        child: &Mesh<T>,
        parent: &Mesh<T>,
        pd: &Dart,
    ) -> Vec<Dart> {
        let k = self.child_dim;
        let lead: Vec<VertexId> = parent.dart_vertices(pd)[..=k].to_vec();
        let Some(target) = Simplex::new(&lead) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for t in self.preimage_simplices(child, &target) {
            for f in child.facets_containing(&t) {
                let order: Vec<VertexId> = lead
                    .iter()
                    .map(|&p| {
                        *child
                            .facet_vertices(f)
                            .iter()
                            .find(|&&v| self.image_of(v) == p)
                            .expect("facet maps onto the target")
                    })
                    .collect();
                if let Some(d) = child.dart_from_vertices(f, &order) {
                    out.push(d);
                }
            }
        }
        out.sort();
        out
    }

    /// Whether `a` is a valid anchor: both darts alive and the first `k + 1`
    /// parent slots are the images of the child slots.
    pub fn is_valid_anchor<T: Scalar>(&self, child: &Mesh<T>, parent: &Mesh<T>, a: &Anchor) -> bool {
        is_consistent_pair(child, parent, a, |v| self.image_of(v))
    }

    // ---- journaled mutation -------------------------------------------------

    pub(crate) fn begin_journal(&mut self) -> MapLens {
        debug_assert!(self.journal.is_none());
        self.journal = Some(Vec::new());
        self.lens()
    }

    fn lens(&self) -> MapLens {
        MapLens {
            image: self.image.len(),
            anchors: self.anchors.len(),
            preimage: self.preimage.len(),
            parent_refs: self.parent_refs.len(),
        }
    }

    pub(crate) fn mark(&self) -> (usize, MapLens) {
        (self.journal.as_ref().map_or(0, Vec::len), self.lens())
    }

    pub(crate) fn finish_journal(&mut self, lens: MapLens) -> MapRollback {
        MapRollback {
            entries: self.journal.take().unwrap_or_default(),
            lens,
        }
    }

    pub(crate) fn rewind(&mut self, mark: (usize, MapLens)) {
        let mut journal = self.journal.take().expect("rewind needs a journal");
        let tail = journal.split_off(mark.0);
        self.undo(tail, mark.1);
        self.journal = Some(journal);
    }

    pub(crate) fn undo(&mut self, entries: Vec<MapUndo>, lens: MapLens) {
        let journal = self.journal.take();
        for e in entries.into_iter().rev() {
            match e {
                MapUndo::Image { vertex, old } => self.set_image(vertex, old),
                MapUndo::Anchor { facet, old } => self.set_anchor(facet, old),
            }
        }
        self.image.truncate(lens.image);
        self.anchors.truncate(lens.anchors);
        self.preimage.truncate(lens.preimage);
        self.parent_refs.truncate(lens.parent_refs);
        self.journal = journal;
    }

    pub(crate) fn set_image(&mut self, v: VertexId, p: VertexId) {
        if self.image.len() <= v.index() {
            self.image.resize(v.index() + 1, VertexId::INVALID);
        }
        let old = self.image[v.index()];
        if old == p {
            return;
        }
        if old != VertexId::INVALID {
            remove_sorted(&mut self.preimage[old.index()], v);
        }
        if p != VertexId::INVALID {
            if self.preimage.len() <= p.index() {
                self.preimage.resize(p.index() + 1, Vec::new());
            }
            insert_sorted(&mut self.preimage[p.index()], v);
        }
        self.image[v.index()] = p;
        if let Some(j) = &mut self.journal {
            j.push(MapUndo::Image { vertex: v, old });
        }
    }

    pub(crate) fn set_anchor(&mut self, f: FacetId, a: Option<Anchor>) {
        if self.anchors.len() <= f.index() {
            self.anchors.resize(f.index() + 1, None);
        }
        let old = self.anchors[f.index()];
        if old == a {
            return;
        }
        if let Some(o) = old {
            remove_sorted(&mut self.parent_refs[o.parent.facet.index()], f);
        }
        if let Some(n) = a {
            let pf = n.parent.facet.index();
            if self.parent_refs.len() <= pf {
                self.parent_refs.resize(pf + 1, Vec::new());
            }
            insert_sorted(&mut self.parent_refs[pf], f);
        }
        self.anchors[f.index()] = a;
        if let Some(j) = &mut self.journal {
            j.push(MapUndo::Anchor { facet: f, old });
        }
    }

    /// (Re)builds the anchor of child facet `f` from the vertex images, on
    /// the smallest alive parent facet containing the image simplex.
    pub(crate) fn seat<T: Scalar>(
        &mut self,
        child: &Mesh<T>,
        parent: &Mesh<T>,
        f: FacetId,
    ) -> Result<(), MeshError> {
        let cd = child.dart_from_vertices(f, &[]).ok_or(MeshError::StaleFacet(f))?;
        let imgs: Vec<VertexId> = child.dart_vertices(&cd).iter().map(|&v| self.image_of(v)).collect();
        let broken = || MeshError::Construction {
            witness: child.facet_simplex(f),
            reason: "image is not a simplex of the parent".into(),
        };
        if imgs.iter().any(|v| !parent.is_vertex_alive(*v)) {
            return Err(broken());
        }
        let target = Simplex::new(&imgs).ok_or_else(broken)?;
        let pf = *parent.facets_containing(&target).first().ok_or_else(broken)?;
        let pd = parent.dart_from_vertices(pf, &imgs).expect("parent facet contains image");
        self.set_anchor(f, Some(Anchor { child: cd, parent: pd }));
        Ok(())
    }

    fn check_faces<T: Scalar>(&self, child: &Mesh<T>, parent: &Mesh<T>) -> Result<(), MeshError> {
        for f in child.facets() {
            for face in child.facet_simplex(f).faces() {
                let img = self.map_simplex(&face);
                if !img.is_some_and(|s| parent.contains_simplex(&s)) {
                    return Err(MeshError::Construction {
                        witness: face,
                        reason: "face relation not preserved".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Consistency problems of this map, described as text; empty when the
    /// map is a valid dimension-preserving simplicial map with fresh caches.
    pub fn check<T: Scalar>(&self, child: &Mesh<T>, parent: &Mesh<T>) -> Vec<String> {
        let mut errs = Vec::new();
        if child.dim() > parent.dim() {
            errs.push(format!("child dimension {} above parent {}", child.dim(), parent.dim()));
        }
        for v in child.vertices() {
            let p = self.image_of(v);
            if !parent.is_vertex_alive(p) {
                errs.push(format!("child vertex {v} maps to dead parent vertex {p}"));
            } else if !self.preimage_of(p).contains(&v) {
                errs.push(format!("preimage cache of {p} misses {v}"));
            }
        }
        for (p, list) in self.preimage.iter().enumerate() {
            for &v in list {
                if self.image_of(v).index() != p {
                    errs.push(format!("stale preimage entry {v} under v{p}"));
                }
            }
        }
        for (i, a) in self.anchors.iter().enumerate() {
            let f = FacetId(i as u32);
            match a {
                Some(a) if !child.is_facet_alive(f) => {
                    errs.push(format!("anchor kept for dead child facet {f}"));
                    let _ = a;
                }
                Some(a) => {
                    if a.child.facet != f {
                        errs.push(format!("anchor of {f} names facet {}", a.child.facet));
                    } else if !self.is_valid_anchor(child, parent, a) {
                        errs.push(format!("anchor of {f} is inconsistent"));
                    } else if !self.anchored_on(a.parent.facet).contains(&f) {
                        errs.push(format!("back reference of {f} missing"));
                    }
                }
                None if child.is_facet_alive(f) => errs.push(format!("child facet {f} has no anchor")),
                None => {}
            }
        }
        for f in child.facets() {
            if f.index() >= self.anchors.len() {
                errs.push(format!("child facet {f} has no anchor"));
            }
            for face in child.facet_simplex(f).faces().into_iter().chain([child.facet_simplex(f)]) {
                match self.map_simplex(&face) {
                    Some(s) if s.dim() == face.dim() && parent.contains_simplex(&s) => {}
                    _ => errs.push(format!("face {face} of {f} has no image in the parent")),
                }
            }
        }
        for (pf, list) in self.parent_refs.iter().enumerate() {
            for &f in list {
                if self.anchor(f).map(|a| a.parent.facet.index()) != Some(pf) {
                    errs.push(format!("stale back reference {f} on parent facet f{pf}"));
                }
            }
        }
        errs
    }
}

fn is_consistent_pair<T: Scalar>(
    child: &Mesh<T>,
    parent: &Mesh<T>,
    a: &Anchor,
    image: impl Fn(VertexId) -> VertexId,
) -> bool {
    if !child.is_dart_alive(&a.child) || !parent.is_dart_alive(&a.parent) {
        return false;
    }
    let k = child.dim();
    let cv = child.dart_vertices(&a.child);
    let pv = parent.dart_vertices(&a.parent);
    (0..=k).all(|j| image(cv[j]) == pv[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn s(ix: &[u32]) -> Simplex {
        Simplex::from_indices(ix).unwrap()
    }

    #[test]
    fn single_triangle_bijection_anchor() {
        // Edge e_i is opposite vertex v_i.
        let parent: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        let child: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        let map = ContainmentMap::from_facet_bijection(&parent, &child, &[(FacetId(0), FacetId(0))]).unwrap();
        // ({v1, e0, f1}): slot 0 is v1, slot 1 is e0 = {v1, v2}.
        let a = Anchor {
            child: child.dart_from_vertices(FacetId(0), &[v(1), v(2)]).unwrap(),
            parent: parent.dart_from_vertices(FacetId(0), &[v(1), v(2)]).unwrap(),
        };
        assert!(map.is_valid_anchor(&child, &parent, &a));
        let wrong = Anchor {
            child: a.child,
            parent: parent.dart_from_vertices(FacetId(0), &[v(2), v(1)]).unwrap(),
        };
        assert!(!map.is_valid_anchor(&child, &parent, &wrong));
        assert!(map.check(&child, &parent).is_empty());
    }

    #[test]
    fn tagged_top_edges_anchors() {
        let parent: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        // e1 = {v0, v2}, e2 = {v0, v1}
        let (child, map) = ContainmentMap::from_tags(&parent, 1, &[s(&[0, 2]), s(&[0, 1])]).unwrap();
        assert_eq!(child.num_facets(), 2);
        assert_eq!(map.map_simplex(&child.facet_simplex(FacetId(0))), Some(s(&[0, 2])));
        assert_eq!(map.map_simplex(&child.facet_simplex(FacetId(1))), Some(s(&[0, 1])));
        let a0 = Anchor {
            child: child.dart_from_vertices(FacetId(0), &[v(2)]).unwrap(),
            parent: parent.dart_from_vertices(FacetId(0), &[v(2), v(0)]).unwrap(),
        };
        let a1 = Anchor {
            child: child.dart_from_vertices(FacetId(1), &[v(0)]).unwrap(),
            parent: parent.dart_from_vertices(FacetId(0), &[v(0), v(1)]).unwrap(),
        };
        assert!(map.is_valid_anchor(&child, &parent, &a0));
        assert!(map.is_valid_anchor(&child, &parent, &a1));
        assert!(map.check(&child, &parent).is_empty());
    }

    #[test]
    fn equality_ignores_unused_slots() {
        let parent: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        let map = ContainmentMap::from_facet_bijection(&parent, &parent, &[(FacetId(0), FacetId(0))]).unwrap();
        let mut padded = map.clone();
        padded.image.push(VertexId::INVALID);
        padded.preimage.push(Vec::new());
        padded.anchors.push(None);
        assert_eq!(padded, map);
        padded.set_image(v(2), v(1));
        assert_ne!(padded, map);
    }

    #[test]
    fn boundary_loop_of_square() {
        let parent: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let tags = parent.boundary_faces();
        let (child, map) = ContainmentMap::from_tags(&parent, 1, &tags).unwrap();
        assert_eq!(child.euler_characteristic(), 0);
        assert!(child.validate().is_valid());
        for f in child.facets() {
            assert!(tags.contains(&map.map_simplex(&child.facet_simplex(f)).unwrap()));
        }
    }

    #[test]
    fn invalid_tags_rejected() {
        let parent: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        // Three edges at vertex 0 plus one more: vertex 0 has valence 3.
        let err = ContainmentMap::from_tags(&parent, 1, &[s(&[0, 1]), s(&[0, 2]), s(&[0, 3])]);
        assert!(matches!(err, Err(MeshError::Construction { .. })));
    }

    #[test]
    fn inconsistent_bijection_rejected() {
        let parent: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let child: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [1, 2, 3]]).unwrap();
        let err = ContainmentMap::from_facet_bijection(
            &parent,
            &child,
            &[(FacetId(0), FacetId(0)), (FacetId(1), FacetId(1))],
        );
        assert!(matches!(err, Err(MeshError::Construction { .. })));
        let short: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        assert!(matches!(
            ContainmentMap::from_facet_bijection(&parent, &short, &[(FacetId(0), FacetId(0))]),
            Err(MeshError::FacetCountMismatch { .. })
        ));
    }

    #[test]
    fn transport_round_trip_over_all_darts() {
        let parent: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        let (child, map) =
            ContainmentMap::from_tags(&parent, 2, &[s(&[0, 1, 2]), s(&[0, 2, 3])]).unwrap();
        for f in child.facets() {
            let anchor = *map.anchor(f).unwrap();
            assert_eq!(map.transport_anchor(&child, &parent, &anchor.child).unwrap(), anchor.parent);
            for d in child.darts_of(&child.facet_simplex(f)).unwrap() {
                let pd = map.transport_anchor(&child, &parent, &d).unwrap();
                let cv: Vec<VertexId> = child.dart_vertices(&d).iter().map(|&x| map.image_of(x)).collect();
                assert_eq!(parent.dart_vertices(&pd), cv);
                assert!(map.transport_down(&child, &parent, &pd).contains(&d));
                // one vertex switch away from the anchor
                let one = child.switch(&anchor.child, 0).unwrap();
                let p1 = map.transport_anchor(&child, &parent, &one).unwrap();
                assert_eq!(p1, parent.switch(&anchor.parent, 0).unwrap());
            }
        }
    }
}
