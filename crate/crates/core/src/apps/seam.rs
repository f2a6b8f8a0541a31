use super::edge_length;
use crate::error::MeshError;
use crate::invariants::{Invariant, InvariantSet};
use crate::mesh::Mesh;
use crate::multimesh::{EdgeOp, MultiMesh, NodeId};
use crate::ops::Placement;
use crate::scalar::Scalar;
use crate::scheduler::{Candidate, Pass, PassStats, Scheduler};
use crate::simplex::{FacetId, VertexId};

/// Position mesh as root with the UV mesh (2D positions) as its only
/// child, paired facet by facet.
pub fn seam_multimesh<T: Scalar>(
    positions: Mesh<T>,
    uv: Mesh<T>,
    pairs: &[(FacetId, FacetId)],
) -> Result<(MultiMesh<T>, NodeId), MeshError> {
    let mut mm = MultiMesh::new(positions);
    let node = mm.add_child_from_bijection(mm.root(), "uv", uv, pairs)?;
    Ok((mm, node))
}

pub fn seam_scheduler<'a, T: Scalar>(uv: NodeId) -> Scheduler<'a, T> {
    let mut set = InvariantSet::new();
    set.register(Invariant::no_uv_inversion(uv));
    Scheduler::new(set)
}

/// Collapse for root edge `{a, b}`: the endpoint with more UV copies stays
/// in place, otherwise both meet at the midpoint.
pub fn seam_survivor<T: Scalar>(mm: &MultiMesh<T>, uv: NodeId, a: VertexId, b: VertexId) -> (EdgeOp, VertexId, VertexId) {
    let map = mm.map(uv).expect("uv node has a map");
    let (na, nb) = (map.preimage_of(a).len(), map.preimage_of(b).len());
    match na.cmp(&nb) {
        std::cmp::Ordering::Greater => (EdgeOp::Collapse(Placement::Keep), a, b),
        std::cmp::Ordering::Less => (EdgeOp::Collapse(Placement::Keep), b, a),
        std::cmp::Ordering::Equal => (EdgeOp::Collapse(Placement::Midpoint), a, b),
    }
}

/// Shortest-edge collapse on the root until at most `target_faces` root
/// facets remain or no collapse is accepted any more.
pub fn seam_decimate<T: Scalar>(mm: &mut MultiMesh<T>, uv: NodeId, target_faces: usize, sched: &mut Scheduler<'_, T>) -> PassStats {
    let root = mm.root();
    let mut total = PassStats::default();
    loop {
        let mut pass = Pass::new(root, move |mm: &MultiMesh<T>, a, b| {
            let (op, a, b) = seam_survivor(mm, uv, a, b);
            Some(Candidate {
                score: edge_length(mm.mesh(root), a, b),
                op,
                a,
                b,
            })
        })
        .with_stop(move |mm| mm.mesh(root).num_facets() <= target_faces);
        let stats = sched.run_pass(mm, &mut pass);
        total.merge(&stats);
        if stats.accepted == 0 || mm.mesh(root).num_facets() <= target_faces {
            return total;
        }
    }
}
