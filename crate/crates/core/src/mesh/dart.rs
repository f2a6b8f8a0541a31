//! Darts: nested simplex tuples `(σ0 ⊂ σ1 ⊂ … ⊂ σd)` inside one facet.
//!
//! A dart is stored as a facet plus an ordering of the facet's corners; slot
//! `j` of the tuple is the set of the first `j + 1` ordered corners. Switching
//! slot `k < d` swaps ordered positions `k` and `k + 1`; switching slot `d`
//! crosses the `(d-1)`-face formed by the first `d` corners into the
//! neighbouring facet.

use std::fmt;

use super::Mesh;
use crate::error::MeshError;
use crate::scalar::Scalar;
use crate::simplex::{FacetId, Simplex, VertexId, MAX_DIM};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub facet: FacetId,
    /// `perm[j]` is the facet corner placed at ordered position `j`.
    pub perm: [u8; MAX_DIM + 1],
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dart({:?}, {:?})", self.facet, self.perm)
    }
}

const IDENTITY: [u8; MAX_DIM + 1] = [0, 1, 2, 3];

impl Dart {
    pub fn new(facet: FacetId, perm: [u8; MAX_DIM + 1]) -> Self {
        Dart { facet, perm }
    }

    /// Adjacent transpositions (switch levels) turning `self.perm` into
    /// `target.perm`, for darts of the same facet.
    pub fn switch_path(&self, target: &Dart, dim: usize) -> Vec<usize> {
        let n = dim + 1;
        let mut cur = self.perm;
        let mut path = Vec::new();
        for pos in 0..n {
            let want = target.perm[pos];
            let mut at = (pos..n).find(|&i| cur[i] == want).expect("same facet corners");
            while at > pos {
                cur.swap(at - 1, at);
                path.push(at - 1);
                at -= 1;
            }
        }
        path
    }
}

impl<T: Scalar> Mesh<T> {
    /// The dart of `facet` whose leading corners are `lead` in that order;
    /// remaining corners follow in increasing vertex order.
    pub fn dart_from_vertices(&self, facet: FacetId, lead: &[VertexId]) -> Option<Dart> {
        if !self.is_facet_alive(facet) {
            return None;
        }
        let fv = self.facet_vertices(facet);
        let mut perm = IDENTITY;
        let mut used = [false; MAX_DIM + 1];
        for (j, v) in lead.iter().enumerate() {
            let c = fv.iter().position(|x| x == v)?;
            if used[c] {
                return None;
            }
            used[c] = true;
            perm[j] = c as u8;
        }
        let mut rest: Vec<usize> = (0..fv.len()).filter(|&c| !used[c]).collect();
        rest.sort_by_key(|&c| fv[c]);
        for (j, c) in rest.into_iter().enumerate() {
            perm[lead.len() + j] = c as u8;
        }
        Some(Dart { facet, perm })
    }

    pub fn is_dart_alive(&self, d: &Dart) -> bool {
        self.is_facet_alive(d.facet)
    }

    /// Corner vertices in dart order.
    pub fn dart_vertices(&self, d: &Dart) -> Vec<VertexId> {
        let fv = self.facet_vertices(d.facet);
        (0..=self.dim()).map(|j| fv[d.perm[j] as usize]).collect()
    }

    #[inline]
    pub fn dart_vertex(&self, d: &Dart, slot: usize) -> VertexId {
        self.facet_vertices(d.facet)[d.perm[slot] as usize]
    }

    /// The simplex at tuple slot `slot`.
    pub fn dart_simplex(&self, d: &Dart, slot: usize) -> Simplex {
        let order = self.dart_vertices(d);
        Simplex::new(&order[..=slot]).expect("distinct corners")
    }

    /// Full simplex tuple of a dart.
    pub fn dart_tuple(&self, d: &Dart) -> Vec<Simplex> {
        (0..=self.dim()).map(|j| self.dart_simplex(d, j)).collect()
    }

    pub fn switch(&self, d: &Dart, level: usize) -> Result<Dart, MeshError> {
        let dim = self.dim();
        if level > dim {
            return Err(MeshError::SwitchLevel { level, dim });
        }
        if !self.is_facet_alive(d.facet) {
            return Err(MeshError::StaleFacet(d.facet));
        }
        if level < dim {
            let mut perm = d.perm;
            perm.swap(level, level + 1);
            return Ok(Dart {
                facet: d.facet,
                perm,
            });
        }
        let order = self.dart_vertices(d);
        let face = Simplex::new(&order[..dim]).ok_or(MeshError::SwitchLevel { level, dim })?;
        let other = self
            .facets_containing(&face)
            .into_iter()
            .find(|&g| g != d.facet)
            .ok_or(MeshError::Boundary { level, face })?;
        Ok(self
            .dart_from_vertices(other, &order[..dim])
            .expect("neighbour contains the shared face"))
    }

    /// All darts whose slot `dim(s)` is `s`, sorted.
    pub fn darts_of(&self, s: &Simplex) -> Result<Vec<Dart>, MeshError> {
        if s.dim() > self.dim() || !self.contains_simplex(s) {
            return Err(MeshError::StaleSimplex(*s));
        }
        let k = s.dim();
        let n = self.dim() + 1;
        let mut out = Vec::new();
        for f in self.facets_containing(s) {
            let fv = self.facet_vertices(f);
            let inside: Vec<u8> = (0..n as u8).filter(|&c| s.contains(fv[c as usize])).collect();
            let outside: Vec<u8> = (0..n as u8).filter(|&c| !s.contains(fv[c as usize])).collect();
            for head in permutations(&inside) {
                for tail in permutations(&outside) {
                    let mut perm = IDENTITY;
                    perm[..=k].copy_from_slice(&head);
                    perm[k + 1..n].copy_from_slice(&tail);
                    out.push(Dart { facet: f, perm });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// The dart of `s` with the lexicographically smallest simplex tuple.
    pub fn canonical_dart(&self, s: &Simplex) -> Result<Dart, MeshError> {
        let darts = self.darts_of(s)?;
        Ok(darts
            .into_iter()
            .min_by_key(|d| self.dart_tuple(d))
            .expect("alive simplex has a dart"))
    }
}

fn permutations(items: &[u8]) -> Vec<Vec<u8>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[u32]) -> Simplex {
        Simplex::from_indices(ix).unwrap()
    }

    // a=0, b=1, c=2, d=3
    fn two_triangles() -> Mesh<f64> {
        Mesh::new(2, 4, &[[0, 1, 2], [1, 0, 3]]).unwrap()
    }

    #[test]
    fn switch_examples() {
        let m: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        let d = m.dart_from_vertices(FacetId(0), &[VertexId(0), VertexId(1)]).unwrap();
        assert_eq!(m.dart_tuple(&d), vec![s(&[0]), s(&[0, 1]), s(&[0, 1, 2])]);
        let d0 = m.switch(&d, 0).unwrap();
        assert_eq!(m.dart_tuple(&d0), vec![s(&[1]), s(&[0, 1]), s(&[0, 1, 2])]);
        let d1 = m.switch(&d, 1).unwrap();
        assert_eq!(m.dart_tuple(&d1), vec![s(&[0]), s(&[0, 2]), s(&[0, 1, 2])]);
        assert!(matches!(m.switch(&d, 2), Err(MeshError::Boundary { .. })));
        assert!(matches!(m.switch(&d, 3), Err(MeshError::SwitchLevel { .. })));
    }

    #[test]
    fn switch_across_shared_edge() {
        let m = two_triangles();
        let d = m.dart_from_vertices(FacetId(0), &[VertexId(0), VertexId(1)]).unwrap();
        let d2 = m.switch(&d, 2).unwrap();
        assert_eq!(m.dart_tuple(&d2), vec![s(&[0]), s(&[0, 1]), s(&[0, 1, 3])]);
        assert_eq!(m.switch(&d2, 2).unwrap(), d);
    }

    #[test]
    fn switch_is_a_fixed_point_free_involution() {
        let m = two_triangles();
        for f in m.facets() {
            for d in m.darts_of(&m.facet_simplex(f)).unwrap() {
                for k in 0..=2 {
                    if let Ok(e) = m.switch(&d, k) {
                        assert_ne!(e, d);
                        assert_eq!(m.switch(&e, k).unwrap(), d);
                    }
                }
            }
        }
    }

    #[test]
    fn dart_counts() {
        // Interior vertex of a 6-triangle fan: 6 facets x 2 edge choices.
        let fan: Vec<[u32; 3]> = (0..6).map(|i| [0, 1 + i, 1 + (i + 1) % 6]).collect();
        let m: Mesh<f64> = Mesh::new(2, 7, &fan).unwrap();
        assert_eq!(m.darts_of(&s(&[0])).unwrap().len(), 12);
        let single: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2]]).unwrap();
        assert_eq!(single.darts_of(&s(&[0, 1])).unwrap().len(), 2);
        assert_eq!(single.darts_of(&s(&[0, 1, 2])).unwrap().len(), 6);
        assert!(matches!(single.darts_of(&s(&[0, 5])), Err(MeshError::StaleSimplex(_))));
    }

    #[test]
    fn canonical_dart_is_sorted_order() {
        let m = two_triangles();
        let d = m.canonical_dart(&s(&[0, 1])).unwrap();
        assert_eq!(m.dart_tuple(&d), vec![s(&[0]), s(&[0, 1]), s(&[0, 1, 2])]);
    }

    #[test]
    fn switch_path_reaches_target() {
        let m: Mesh<f64> = Mesh::new(3, 4, &[[0, 1, 2, 3]]).unwrap();
        let all = m.darts_of(&s(&[0, 1, 2, 3])).unwrap();
        assert_eq!(all.len(), 24);
        for a in &all {
            for b in &all {
                let mut cur = *a;
                for lvl in a.switch_path(b, 3) {
                    cur = m.switch(&cur, lvl).unwrap();
                }
                assert_eq!(cur, *b);
            }
        }
    }
}
