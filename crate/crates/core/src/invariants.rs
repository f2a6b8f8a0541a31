//! Declarative predicates evaluated around propagated operations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::envelope::Envelope;
use crate::error::MeshError;
use crate::geometry::signed_measure;
use crate::mesh::Mesh;
use crate::multimesh::{MultiMesh, NodeId, Propagation};
use crate::ops::OperationRecord;
use crate::scalar::Scalar;
use crate::simplex::{FacetId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Evaluated on the unmodified meshes with no records.
    Before,
    /// Evaluated once all nodes and maps have been updated; failure rolls
    /// back every node.
    After,
}

type Predicate<T> = dyn Fn(&Mesh<T>, &[&OperationRecord]) -> bool + Send + Sync;

/// A named predicate over one node's mesh and the records of the
/// operations performed on it.
#[derive(Clone)]
pub struct Invariant<T> {
    pub name: String,
    pub scope: NodeId,
    pub phase: Phase,
    predicate: Arc<Predicate<T>>,
}

impl<T> fmt::Debug for Invariant<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Invariant")
            .field("name", &self.name)
            .field("scope", &self.scope)
            .field("phase", &self.phase)
            .finish()
    }
}

impl<T: Scalar> Invariant<T> {
    pub fn new(
        name: impl Into<String>,
        scope: NodeId,
        phase: Phase,
        predicate: impl Fn(&Mesh<T>, &[&OperationRecord]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Invariant {
            name: name.into(),
            scope,
            phase,
            predicate: Arc::new(predicate),
        }
    }

    pub fn evaluate(&self, mesh: &Mesh<T>, records: &[&OperationRecord]) -> bool {
        (self.predicate)(mesh, records)
    }

    /// Every tet around the changes keeps a positive signed volume.
    pub fn positive_volume(scope: NodeId) -> Self {
        Self::new("positive_volume", scope, Phase::After, |m, recs| {
            facets_around(m, recs).all(|f| facet_measure(m, f).is_some_and(|v| v > T::zero()))
        })
    }

    /// Every triangle around the changes keeps a positive signed area in
    /// the 2D position attribute.
    pub fn no_uv_inversion(scope: NodeId) -> Self {
        Self::new("no_uv_inversion", scope, Phase::After, |m, recs| {
            facets_around(m, recs).all(|f| facet_measure(m, f).is_some_and(|v| v > T::zero()))
        })
    }

    /// Vertices, edge midpoints and facet centroids around the changes stay
    /// within the envelope.
    pub fn envelope(scope: NodeId, env: Envelope) -> Self {
        Self::new("envelope", scope, Phase::After, move |m, recs| {
            if env.eps() == f64::INFINITY {
                return true;
            }
            facets_around(m, recs).all(|f| {
                let pts: Vec<[f64; 3]> = m
                    .facet_vertices(f)
                    .iter()
                    .map(|&v| m.position3(v).map_or([f64::NAN; 3], |p| p.map(|x| x.as_f64())))
                    .collect();
                sample_points(&pts).into_iter().all(|p| env.contains(p))
            })
        })
    }
}

/// Corners, edge midpoints and the centroid of a simplex.
fn sample_points(pts: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let avg = |ix: &[usize]| {
        let mut out = [0.0; 3];
        for &i in ix {
            for (o, x) in out.iter_mut().zip(pts[i]) {
                *o += x / ix.len() as f64;
            }
        }
        out
    };
    let mut out = pts.to_vec();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            out.push(avg(&[i, j]));
        }
    }
    if pts.len() > 2 {
        out.push(avg(&(0..pts.len()).collect::<Vec<_>>()));
    }
    out
}

/// Facets incident to vertices touched by `recs`; every facet when there
/// are no records.
fn facets_around<'a, T: Scalar>(m: &'a Mesh<T>, recs: &[&OperationRecord]) -> Box<dyn Iterator<Item = FacetId> + 'a> {
    if recs.is_empty() {
        return Box::new(m.facets());
    }
    let verts: BTreeSet<VertexId> = recs.iter().flat_map(|r| r.touched_vertices(m)).collect();
    let facets: BTreeSet<FacetId> = verts.iter().flat_map(|&v| m.vertex_facets(v).iter().copied()).collect();
    Box::new(facets.into_iter())
}

fn facet_measure<T: Scalar>(m: &Mesh<T>, f: FacetId) -> Option<T> {
    let width = m.position_width()?;
    let pts: Vec<Vec<T>> = m.facet_vertices(f).iter().map(|&v| m.position(v).unwrap().to_vec()).collect();
    Some(signed_measure(&pts, width))
}

fn all_positive<T: Scalar>(mesh: &Mesh<T>, dim: usize, width: usize) -> Result<bool, MeshError> {
    match mesh.position_width() {
        None => Err(MeshError::MissingAttribute(crate::mesh::POSITION.into())),
        Some(w) if w != width => Err(MeshError::AttributeWidth {
            name: crate::mesh::POSITION.into(),
            expected: width,
            got: w,
        }),
        Some(_) if mesh.dim() != dim => Err(MeshError::Dimension(mesh.dim())),
        Some(_) => Ok(mesh.facets().all(|f| facet_measure(mesh, f).is_some_and(|v| v > T::zero()))),
    }
}

/// Whether every tet of a 3-mesh has positive signed volume with corners in
/// stored order.
pub fn positive_volume<T: Scalar>(mesh: &Mesh<T>) -> Result<bool, MeshError> {
    all_positive(mesh, 3, 3)
}

/// Whether every triangle of a 2-mesh with 2D positions has positive signed
/// area with corners in stored order.
pub fn no_uv_inversion<T: Scalar>(mesh: &Mesh<T>) -> Result<bool, MeshError> {
    all_positive(mesh, 2, 2)
}

/// Registered invariants of a multimesh.
#[derive(Clone, Debug, Default)]
pub struct InvariantSet<T> {
    list: Vec<Invariant<T>>,
}

impl<T: Scalar> InvariantSet<T> {
    pub fn new() -> Self {
        InvariantSet { list: Vec::new() }
    }

    pub fn register(&mut self, inv: Invariant<T>) {
        self.list.push(inv);
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Invariant<T>> {
        self.list.iter()
    }

    /// Conjunction of the invariants of `phase`. In the after phase each
    /// invariant sees only the records of its node and is skipped when that
    /// node did not change.
    pub fn check(&self, mm: &MultiMesh<T>, prop: &Propagation, phase: Phase) -> bool {
        self.list.iter().filter(|inv| inv.phase == phase).all(|inv| {
            let recs: Vec<&OperationRecord> = prop.records(inv.scope).collect();
            if phase == Phase::After && recs.is_empty() {
                return true;
            }
            inv.evaluate(mm.mesh(inv.scope), &recs)
        })
    }

    /// Names of invariants failing on their whole node.
    pub fn failing(&self, mm: &MultiMesh<T>) -> Vec<String> {
        self.list
            .iter()
            .filter(|inv| !inv.evaluate(mm.mesh(inv.scope), &[]))
            .map(|inv| inv.name.clone())
            .collect()
    }
}

/// Conjunction of all registered invariants of `phase` over the records of
/// one propagation attempt.
pub fn check_invariants<T: Scalar>(mm: &MultiMesh<T>, invariants: &InvariantSet<T>, prop: &Propagation, phase: Phase) -> bool {
    invariants.check(mm, prop, phase)
}
