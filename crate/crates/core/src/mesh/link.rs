use std::collections::BTreeSet;

use super::Mesh;
use crate::scalar::Scalar;
use crate::simplex::{Simplex, VertexId};

/// Simplices `τ` disjoint from `s` with `τ ∪ s` in the complex.
pub fn link<T: Scalar>(mesh: &Mesh<T>, s: &Simplex) -> BTreeSet<Simplex> {
    let mut out = BTreeSet::new();
    for f in mesh.facets_containing(s) {
        let rest: Vec<VertexId> = mesh
            .facet_vertices(f)
            .iter()
            .copied()
            .filter(|v| !s.contains(*v))
            .collect();
        if let Some(r) = Simplex::new(&rest) {
            out.extend(r.closure());
        }
    }
    out
}

/// Link in the complex with its boundary coned to a vertex at infinity
/// (`VertexId::INVALID`).
fn coned_link<T: Scalar>(mesh: &Mesh<T>, s: &Simplex) -> BTreeSet<Simplex> {
    let mut out = link(mesh, s);
    let dim = mesh.dim();
    if dim == 0 {
        return out;
    }
    let omega = Simplex::vertex(VertexId::INVALID);
    for f in mesh.facets_containing(s) {
        let fs = mesh.facet_simplex(f);
        for face in fs.faces_of_dim(dim - 1) {
            if !s.is_subset_of(&face) || !mesh.is_boundary_face(&face) {
                continue;
            }
            out.insert(omega);
            let rest: Vec<VertexId> = face
                .vertices()
                .iter()
                .copied()
                .filter(|v| !s.contains(*v))
                .collect();
            if let Some(r) = Simplex::new(&rest) {
                for t in r.closure() {
                    out.insert(t.union(&omega).expect("at most d vertices plus infinity"));
                }
            }
        }
    }
    out
}

/// Whether collapsing `edge` keeps the mesh a manifold of the same topology:
/// `lk(a) ∩ lk(b) = lk(ab)`, evaluated with the boundary coned to a vertex at
/// infinity so that an interior edge joining two boundary vertices fails.
pub fn link_condition<T: Scalar>(mesh: &Mesh<T>, edge: &Simplex) -> bool {
    if edge.dim() != 1 || !mesh.contains_simplex(edge) {
        return false;
    }
    let a = Simplex::vertex(edge.vertices()[0]);
    let b = Simplex::vertex(edge.vertices()[1]);
    let la = coned_link(mesh, &a);
    let lb = coned_link(mesh, &b);
    let lab = coned_link(mesh, edge);
    let common: BTreeSet<Simplex> = la.intersection(&lb).copied().collect();
    common == lab
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[u32]) -> Simplex {
        Simplex::from_indices(ix).unwrap()
    }

    fn tet_boundary() -> Mesh<f64> {
        Mesh::new(2, 4, &[[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn links_of_tetrahedron_boundary() {
        let m = tet_boundary();
        let la: BTreeSet<Simplex> = [s(&[1]), s(&[2]), s(&[3]), s(&[1, 2]), s(&[1, 3]), s(&[2, 3])]
            .into_iter()
            .collect();
        assert_eq!(link(&m, &s(&[0])), la);
        let lab: BTreeSet<Simplex> = [s(&[2]), s(&[3])].into_iter().collect();
        assert_eq!(link(&m, &s(&[0, 1])), lab);
    }

    #[test]
    fn link_in_one_mesh() {
        let m: Mesh<f64> = Mesh::new(1, 2, &[[0, 1]]).unwrap();
        assert_eq!(link(&m, &s(&[0])), [s(&[1])].into_iter().collect());
    }

    #[test]
    fn tetrahedron_boundary_edges_fail() {
        let m = tet_boundary();
        for e in m.edges() {
            assert!(!link_condition(&m, &e), "{e:?}");
        }
    }

    #[test]
    fn path_edges() {
        let m: Mesh<f64> = Mesh::new(1, 3, &[[0, 1], [1, 2]]).unwrap();
        assert!(link_condition(&m, &s(&[0, 1])));
        // A lone edge would collapse to a point.
        let lone: Mesh<f64> = Mesh::new(1, 2, &[[0, 1]]).unwrap();
        assert!(!link_condition(&lone, &s(&[0, 1])));
        // Triangle loop: collapsing creates a doubled edge.
        let tri: Mesh<f64> = Mesh::new(1, 3, &[[0, 1], [1, 2], [2, 0]]).unwrap();
        assert!(!link_condition(&tri, &s(&[0, 1])));
    }

    #[test]
    fn interior_edge_between_boundary_vertices_fails() {
        // Quad split by the diagonal 0-2: both endpoints on the boundary.
        let m: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [0, 2, 3]]).unwrap();
        assert!(!link_condition(&m, &s(&[0, 2])));
        // A boundary edge of the quad collapses fine.
        assert!(link_condition(&m, &s(&[0, 1])));
    }
}
