//! Local topological operations on one mesh: edge split, edge collapse and
//! the split-then-collapse swap, together with journaled rollback.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::MeshError;
use crate::geometry;
use crate::mesh::{link_condition, Mesh, Undo};
use crate::scalar::Scalar;
use crate::simplex::{FacetId, Simplex, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Split,
    Collapse,
    Swap,
    /// Attribute-only move of one vertex; never propagated.
    Smooth,
}

/// Where attribute values of a new or surviving vertex come from, as a
/// parameter along the operated edge: `0` is the first endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Placement {
    Keep,
    Midpoint,
    Lerp(f64),
}

impl Placement {
    pub fn parameter(self) -> f64 {
        match self {
            Placement::Keep => 0.0,
            Placement::Midpoint => 0.5,
            Placement::Lerp(t) => t,
        }
    }
}

/// A split facet `σ` and its two halves: `a_side` keeps endpoint `a`,
/// `b_side = σ \ {a} ∪ {c}` keeps endpoint `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitPair {
    pub old: FacetId,
    pub a_side: FacetId,
    pub b_side: FacetId,
}

/// What one local operation did to a mesh.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationRecord {
    pub kind: OpKind,
    /// Operated edge `(a, b)` as requested; for collapses `a` survives.
    pub edge: [VertexId; 2],
    /// The inserted vertex `c` of a split.
    pub new_vertex: Option<VertexId>,
    pub deleted_facets: Vec<FacetId>,
    pub created_facets: Vec<FacetId>,
    /// Facets kept under their id whose corner `b` was rewritten to `a`.
    pub modified_facets: Vec<FacetId>,
    pub split_pairs: Vec<SplitPair>,
    /// `(d-1)`-faces where the operated region meets the rest of the mesh.
    pub boundary_faces: BTreeSet<Simplex>,
    /// Old vertex to new vertex for every vertex of the affected facets.
    pub vertex_correspondence: BTreeMap<VertexId, VertexId>,
}

impl OperationRecord {
    fn new(kind: OpKind, edge: [VertexId; 2]) -> Self {
        OperationRecord {
            kind,
            edge,
            new_vertex: None,
            deleted_facets: Vec::new(),
            created_facets: Vec::new(),
            modified_facets: Vec::new(),
            split_pairs: Vec::new(),
            boundary_faces: BTreeSet::new(),
            vertex_correspondence: BTreeMap::new(),
        }
    }

    /// Record of moving vertex `v`; its star is listed as modified.
    pub fn smoothed<T: Scalar>(mesh: &Mesh<T>, v: VertexId) -> Self {
        let mut rec = OperationRecord::new(OpKind::Smooth, [v, v]);
        rec.modified_facets = mesh.vertex_facets(v).to_vec();
        rec
    }

    /// Live edge endpoints, the new vertex, and the vertices of every facet
    /// created or modified by the operation.
    pub fn touched_vertices<T: Scalar>(&self, mesh: &Mesh<T>) -> BTreeSet<VertexId> {
        let mut out: BTreeSet<VertexId> = self
            .created_facets
            .iter()
            .chain(&self.modified_facets)
            .filter(|f| mesh.is_facet_alive(**f))
            .flat_map(|&f| mesh.facet_vertices(f).to_vec())
            .collect();
        out.extend(self.edge.iter().chain(&self.new_vertex).copied().filter(|&v| mesh.is_vertex_alive(v)));
        out
    }
}

/// Everything needed to undo a sequence of operations on one mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Rollback<T> {
    pub(crate) generation: u64,
    pub(crate) start_generation: u64,
    pub(crate) entries: Vec<Undo<T>>,
}

impl<T> Rollback<T> {
    /// Generation of the mesh right after the recorded operations.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<T: Scalar> Mesh<T> {
    /// Starts recording mutations for a later [`rollback`].
    pub fn begin_rollback(&mut self) {
        self.begin_journal();
    }

    pub fn finish_rollback(&mut self, start_generation: u64) -> Rollback<T> {
        Rollback {
            generation: self.generation(),
            start_generation,
            entries: self.take_journal(),
        }
    }

    /// Runs `f` while journaling and returns its result with the rollback.
    pub fn recorded<R, E>(
        &mut self,
        f: impl FnOnce(&mut Mesh<T>) -> Result<R, E>,
    ) -> Result<(R, Rollback<T>), E> {
        let start = self.generation();
        self.begin_rollback();
        match f(self) {
            Ok(r) => Ok((r, self.finish_rollback(start))),
            Err(e) => {
                let rb = self.finish_rollback(start);
                self.undo(rb.entries);
                Err(e)
            }
        }
    }
}

/// Restores the state captured before the recorded operations.
pub fn rollback<T: Scalar>(mesh: &mut Mesh<T>, rb: &Rollback<T>) -> Result<(), MeshError> {
    if rb.generation != mesh.generation() {
        return Err(MeshError::StaleRollback {
            recorded: rb.generation,
            current: mesh.generation(),
        });
    }
    mesh.undo(rb.entries.clone());
    debug_assert_eq!(mesh.generation(), rb.start_generation);
    Ok(())
}

fn edge_of<T: Scalar>(mesh: &Mesh<T>, a: VertexId, b: VertexId) -> Result<Simplex, MeshError> {
    let e = Simplex::new(&[a, b]).ok_or(MeshError::NotAnEdge(Simplex::vertex(a)))?;
    mesh.check_alive(&e)?;
    Ok(e)
}

fn boundary_of_region<T: Scalar>(mesh: &Mesh<T>, region: &[FacetId]) -> BTreeSet<Simplex> {
    if mesh.dim() == 0 {
        return BTreeSet::new();
    }
    let mut count: BTreeMap<Simplex, usize> = BTreeMap::new();
    for &f in region {
        for face in mesh.facet_simplex(f).faces_of_dim(mesh.dim() - 1) {
            *count.entry(face).or_default() += 1;
        }
    }
    count.into_iter().filter(|&(_, n)| n == 1).map(|(s, _)| s).collect()
}

/// Splits edge `(a, b)`: every facet `σ ⊇ ab` is replaced by
/// `σ \ {b} ∪ {c}` and `σ \ {a} ∪ {c}` with a new vertex `c` whose attributes
/// are interpolated from `a` towards `b`.
pub fn edge_split<T: Scalar>(
    mesh: &mut Mesh<T>,
    a: VertexId,
    b: VertexId,
    placement: Placement,
) -> Result<OperationRecord, MeshError> {
    let e = edge_of(mesh, a, b)?;
    let star = mesh.facets_containing(&e);
    let mut rec = OperationRecord::new(OpKind::Split, [a, b]);
    rec.boundary_faces = boundary_of_region(mesh, &star);
    for &f in &star {
        for &v in mesh.facet_vertices(f) {
            rec.vertex_correspondence.insert(v, v);
        }
    }
    let attrs = mesh.interpolated_attrs(a, b, T::of(placement.parameter()));
    let c = mesh.push_vertex(&attrs);
    rec.new_vertex = Some(c);
    for &f in &star {
        let corners = mesh.facet_vertices(f).to_vec();
        let a_side: Vec<VertexId> = corners.iter().map(|&v| if v == b { c } else { v }).collect();
        let b_side: Vec<VertexId> = corners.iter().map(|&v| if v == a { c } else { v }).collect();
        mesh.remove_facet(f);
        let fa = mesh.push_facet(&a_side, Some(f));
        let fb = mesh.push_facet(&b_side, Some(f));
        rec.deleted_facets.push(f);
        rec.created_facets.extend([fa, fb]);
        rec.split_pairs.push(SplitPair {
            old: f,
            a_side: fa,
            b_side: fb,
        });
    }
    mesh.bump_generation();
    debug_assert!(
        mesh.validate_local(&[a, b, c]).is_valid() || !cfg!(debug_assertions),
        "split broke validity: {}",
        mesh.validate_local(&[a, b, c])
    );
    Ok(rec)
}

/// Collapses edge `(a, b)` onto `a` after checking the link condition.
pub fn edge_collapse<T: Scalar>(
    mesh: &mut Mesh<T>,
    a: VertexId,
    b: VertexId,
    placement: Placement,
) -> Result<OperationRecord, MeshError> {
    let e = edge_of(mesh, a, b)?;
    if !link_condition(mesh, &e) {
        return Err(MeshError::LinkCondition(e));
    }
    let rec = collapse_unchecked(mesh, a, b, placement)?;
    debug_assert!(
        mesh.validate_local(&[a]).is_valid(),
        "collapse broke validity: {}",
        mesh.validate_local(&[a])
    );
    Ok(rec)
}

/// Collapse without the link-condition guard. The result may violate
/// validity; used to evaluate what a collapse would do.
pub fn collapse_unchecked<T: Scalar>(
    mesh: &mut Mesh<T>,
    a: VertexId,
    b: VertexId,
    placement: Placement,
) -> Result<OperationRecord, MeshError> {
    let e = edge_of(mesh, a, b)?;
    let star = mesh.facets_containing(&e);
    let mut rec = OperationRecord::new(OpKind::Collapse, [a, b]);
    rec.boundary_faces = boundary_of_region(mesh, &star);
    let ring: Vec<FacetId> = mesh
        .vertex_facets(b)
        .iter()
        .copied()
        .filter(|f| !star.contains(f))
        .collect();
    for &f in star.iter().chain(&ring).chain(mesh.vertex_facets(a)) {
        for &v in mesh.facet_vertices(f) {
            rec.vertex_correspondence.insert(v, v);
        }
    }
    rec.vertex_correspondence.insert(b, a);
    let t = placement.parameter();
    if t != 0.0 {
        let attrs = mesh.interpolated_attrs(a, b, T::of(t));
        for (k, vals) in attrs.iter().enumerate() {
            mesh.set_vertex_attr_idx(k, a, vals)?;
        }
    }
    for &f in &star {
        mesh.remove_facet(f);
        rec.deleted_facets.push(f);
    }
    for &f in &ring {
        let corner = mesh
            .facet_vertices(f)
            .iter()
            .position(|&v| v == b)
            .expect("ring facet contains b");
        mesh.replace_corner(f, corner, a);
        rec.modified_facets.push(f);
    }
    mesh.kill_vertex(b);
    mesh.bump_generation();
    Ok(rec)
}

/// Vertices opposite to `e` in its star: the 0-simplices of `lk(e)`.
pub fn opposite_vertices<T: Scalar>(mesh: &Mesh<T>, e: &Simplex) -> Vec<VertexId> {
    let set: BTreeSet<VertexId> = mesh
        .facets_containing(e)
        .iter()
        .flat_map(|&f| mesh.facet_vertices(f).to_vec())
        .filter(|v| !e.contains(*v))
        .collect();
    set.into_iter().collect()
}

/// Whether the edge can be swapped at all: it must be interior.
pub fn is_swappable<T: Scalar>(mesh: &Mesh<T>, e: &Simplex) -> bool {
    mesh.dim() >= 2 && mesh.contains_simplex(e) && !mesh.is_on_boundary(e)
}

/// Orders swap targets: best minimum facet quality after collapsing the split
/// vertex onto the target first, ties (and meshes without positions) by id.
pub(crate) fn rank_swap_targets<T: Scalar>(
    mesh: &Mesh<T>,
    split_vertex: VertexId,
    candidates: &[VertexId],
) -> Vec<VertexId> {
    let mut scored: Vec<(f64, VertexId)> = candidates
        .iter()
        .map(|&o| {
            let q = predicted_min_quality(mesh, split_vertex, o).unwrap_or(0.0);
            (q, o)
        })
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    scored.into_iter().map(|(_, v)| v).collect()
}

fn predicted_min_quality<T: Scalar>(mesh: &Mesh<T>, moved: VertexId, onto: VertexId) -> Option<f64> {
    let width = mesh.position_width()?;
    let mut worst = f64::INFINITY;
    for &f in mesh.vertex_facets(moved) {
        let corners = mesh.facet_vertices(f);
        if corners.contains(&onto) {
            continue;
        }
        let pts: Vec<Vec<T>> = corners
            .iter()
            .map(|&v| mesh.position(if v == moved { onto } else { v }).unwrap().to_vec())
            .collect();
        worst = worst.min(geometry::simplex_quality(&pts, width).as_f64());
    }
    Some(worst)
}

/// Edge swap realised as a split of `(a, b)` followed by collapsing the new
/// vertex onto an opposite vertex. In a triangle mesh this is the 2-2 flip.
/// On failure the mesh is left untouched, also inside an open rollback.
pub fn swap<T: Scalar>(
    mesh: &mut Mesh<T>,
    a: VertexId,
    b: VertexId,
) -> Result<OperationRecord, MeshError> {
    let e = edge_of(mesh, a, b)?;
    if !is_swappable(mesh, &e) {
        return Err(MeshError::Precondition(e, "boundary edge cannot be swapped"));
    }
    let opposite = opposite_vertices(mesh, &e);
    let nested = mesh.is_journaling();
    if !nested {
        mesh.begin_rollback();
    }
    let mark = mesh.journal_mark();
    let result = (|| {
        let split = edge_split(mesh, a, b, Placement::Midpoint)?;
        let m = split.new_vertex.unwrap();
        for o in rank_swap_targets(mesh, m, &opposite) {
            let sub = Simplex::edge(o, m);
            if !link_condition(mesh, &sub) {
                continue;
            }
            let col = edge_collapse(mesh, o, m, Placement::Keep)?;
            return Ok(compose_swap(mesh, [a, b], split, col));
        }
        Err(MeshError::LinkCondition(e))
    })();
    if result.is_err() {
        mesh.rewind(mark);
    }
    if !nested {
        mesh.take_journal();
    }
    result
}

fn compose_swap<T: Scalar>(
    mesh: &Mesh<T>,
    edge: [VertexId; 2],
    split: OperationRecord,
    collapse: OperationRecord,
) -> OperationRecord {
    let mut rec = OperationRecord::new(OpKind::Swap, edge);
    rec.deleted_facets = split.deleted_facets.clone();
    rec.created_facets = split
        .created_facets
        .iter()
        .copied()
        .filter(|f| mesh.is_facet_alive(*f))
        .collect();
    rec.boundary_faces = split.boundary_faces.clone();
    rec.vertex_correspondence = split.vertex_correspondence.clone();
    rec.new_vertex = None;
    let _ = collapse;
    rec
}
