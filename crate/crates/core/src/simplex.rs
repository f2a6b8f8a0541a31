//! Vertex and facet handles and the vertex-set simplex type.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest supported mesh dimension.
pub const MAX_DIM: usize = 3;

/// Handle of a vertex inside one mesh.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    /// Placeholder for unused slots; also used as the vertex at infinity when
    /// coning a boundary.
    pub const INVALID: VertexId = VertexId(u32::MAX);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::INVALID {
            write!(f, "v∞")
        } else {
            write!(f, "v{}", self.0)
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Handle of a facet (top-dimensional simplex) inside one mesh.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FacetId(pub u32);

impl FacetId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for FacetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

impl fmt::Display for FacetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A simplex as a set of vertices, stored sorted so that set equality is
/// value equality.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    len: u8,
    verts: [VertexId; MAX_DIM + 1],
}

impl Simplex {
    /// Builds a simplex from distinct vertices in any order. Returns `None`
    /// for an empty slice, more than four vertices, or repeated vertices.
    pub fn new(vertices: &[VertexId]) -> Option<Simplex> {
        if vertices.is_empty() || vertices.len() > MAX_DIM + 1 {
            return None;
        }
        let mut verts = [VertexId::INVALID; MAX_DIM + 1];
        verts[..vertices.len()].copy_from_slice(vertices);
        verts[..vertices.len()].sort_unstable();
        if verts[..vertices.len()].windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Simplex {
            len: vertices.len() as u8,
            verts,
        })
    }

    pub fn vertex(v: VertexId) -> Simplex {
        Simplex::new(&[v]).unwrap()
    }

    /// Panics if `a == b`.
    pub fn edge(a: VertexId, b: VertexId) -> Simplex {
        Simplex::new(&[a, b]).expect("edge endpoints must differ")
    }

    pub fn from_indices(indices: &[u32]) -> Option<Simplex> {
        let v: Vec<VertexId> = indices.iter().map(|&i| VertexId(i)).collect();
        Simplex::new(&v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    #[inline]
    pub fn vertices(&self) -> &[VertexId] {
        &self.verts[..self.len as usize]
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices().binary_search(&v).is_ok()
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Simplex) -> bool {
        self.vertices().iter().all(|&v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.vertices().iter().all(|&v| !other.contains(v))
    }

    /// Union of two simplices, `None` if it exceeds four vertices.
    pub fn union(&self, other: &Simplex) -> Option<Simplex> {
        let mut all: Vec<VertexId> = self.vertices().to_vec();
        for &v in other.vertices() {
            if !self.contains(v) {
                all.push(v);
            }
        }
        Simplex::new(&all)
    }

    /// The simplex with `v` removed; `None` if that leaves nothing.
    pub fn without(&self, v: VertexId) -> Option<Simplex> {
        let mut verts = [VertexId::INVALID; MAX_DIM + 1];
        let mut len = 0;
        for &x in self.vertices() {
            if x != v {
                verts[len] = x;
                len += 1;
            }
        }
        (len > 0).then_some(Simplex { len: len as u8, verts })
    }

    /// Replaces `old` by `new`, `None` if `new` is already present.
    pub fn replace(&self, old: VertexId, new: VertexId) -> Option<Simplex> {
        let mut verts = [VertexId::INVALID; MAX_DIM + 1];
        for (slot, &x) in verts.iter_mut().zip(self.vertices()) {
            *slot = if x == old { new } else { x };
        }
        Simplex::new(&verts[..self.len as usize])
    }

    /// All nonempty proper subsets.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.len as u32;
        (1..(1u32 << n) - 1)
            .map(|mask| self.subset(mask))
            .collect()
    }

    /// Nonempty subsets including the simplex itself.
    pub fn closure(&self) -> Vec<Simplex> {
        let n = self.len as u32;
        (1..(1u32 << n)).map(|mask| self.subset(mask)).collect()
    }

    /// Faces of exactly dimension `k`.
    pub fn faces_of_dim(&self, k: usize) -> Vec<Simplex> {
        let n = self.len as u32;
        (1..(1u32 << n))
            .filter(|m| m.count_ones() as usize == k + 1)
            .map(|mask| self.subset(mask))
            .collect()
    }

    fn subset(&self, mask: u32) -> Simplex {
        let mut verts = [VertexId::INVALID; MAX_DIM + 1];
        let mut len = 0;
        for (i, &v) in self.vertices().iter().enumerate() {
            if mask & (1 << i) != 0 {
                verts[len] = v;
                len += 1;
            }
        }
        Simplex {
            len: len as u8,
            verts,
        }
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v:?}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[u32]) -> Simplex {
        Simplex::from_indices(ix).unwrap()
    }

    #[test]
    fn canonical_order_and_dimension() {
        let a = s(&[3, 1, 2]);
        assert_eq!(a, s(&[1, 2, 3]));
        assert_eq!(a.dim(), 2);
        assert_eq!(a.vertices(), &[VertexId(1), VertexId(2), VertexId(3)]);
        assert!(Simplex::from_indices(&[1, 1]).is_none());
        assert!(Simplex::from_indices(&[]).is_none());
        assert!(Simplex::from_indices(&[0, 1, 2, 3, 4]).is_none());
    }

    #[test]
    fn faces_of_triangle() {
        let f = s(&[0, 1, 2]).faces();
        assert_eq!(f.len(), 6);
        assert!(f.contains(&s(&[0, 2])));
        assert!(!f.contains(&s(&[0, 1, 2])));
        assert_eq!(s(&[0, 1, 2, 3]).faces_of_dim(2).len(), 4);
    }

    #[test]
    fn set_operations() {
        let t = s(&[0, 1, 2]);
        assert_eq!(t.without(VertexId(1)), Some(s(&[0, 2])));
        assert_eq!(t.replace(VertexId(0), VertexId(5)), Some(s(&[1, 2, 5])));
        assert_eq!(t.replace(VertexId(0), VertexId(1)), None);
        assert!(s(&[0, 2]).is_subset_of(&t));
        assert!(s(&[3, 4]).is_disjoint(&t));
        assert_eq!(s(&[0]).union(&s(&[4])), Some(s(&[0, 4])));
    }
}
