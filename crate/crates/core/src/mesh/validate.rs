//! Validity checks for pure manifold simplicial complexes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::Mesh;
use crate::scalar::Scalar;
use crate::simplex::{Simplex, VertexId};

/// Which requirement a simplex violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// A face of a simplex is missing from the complex.
    Closure,
    /// Two distinct simplices share their whole vertex set.
    Intersection,
    /// A lower-dimensional simplex is not a face of any facet.
    Pure,
    /// A `(d-1)`-simplex bounds more than two facets.
    Manifold,
    /// The link of a vertex is neither a `(d-1)`-sphere nor a `(d-1)`-ball
    /// (pinched vertices, bowties, fused fans).
    VertexLink,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Simplex,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} violated at {}", self.condition, self.witness)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }

    fn push(&mut self, condition: Condition, witness: Simplex) {
        self.violations.push(Violation { condition, witness });
    }

    fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks an explicit simplex set as a `dim`-complex: closure, purity and the
/// manifold condition on `(dim-1)`-simplices. Simplices of dimension above
/// `dim` are reported as closure violations of the complex's dimension.
pub fn validate_simplices(dim: usize, simplices: &[Simplex]) -> ValidityReport {
    let set: BTreeSet<Simplex> = simplices.iter().copied().collect();
    let mut report = ValidityReport::default();
    for s in &set {
        if s.dim() > dim {
            report.push(Condition::Closure, *s);
            continue;
        }
        for f in s.faces() {
            if !set.contains(&f) {
                report.push(Condition::Closure, f);
            }
        }
        if s.dim() < dim && !set.iter().any(|t| t.dim() == dim && s.is_subset_of(t)) {
            report.push(Condition::Pure, *s);
        }
    }
    if dim > 0 {
        let mut cofaces: BTreeMap<Simplex, usize> = BTreeMap::new();
        for t in set.iter().filter(|t| t.dim() == dim) {
            for f in t.faces_of_dim(dim - 1) {
                *cofaces.entry(f).or_default() += 1;
            }
        }
        for (f, n) in cofaces {
            if n > 2 {
                report.push(Condition::Manifold, f);
            }
        }
    }
    report.finish()
}

impl<T: Scalar> Mesh<T> {
    /// Full validity report; empty iff the mesh is a pure manifold complex
    /// whose vertex links are spheres or balls.
    pub fn validate(&self) -> ValidityReport {
        let verts: Vec<VertexId> = self.vertices().collect();
        self.validate_around(&verts, true)
    }

    /// Checks restricted to the stars of `vertices`.
    pub fn validate_local(&self, vertices: &[VertexId]) -> ValidityReport {
        self.validate_around(vertices, false)
    }

    fn validate_around(&self, vertices: &[VertexId], global: bool) -> ValidityReport {
        let mut report = ValidityReport::default();
        let dim = self.dim();
        let facets: BTreeSet<_> = if global {
            self.facets().collect()
        } else {
            vertices
                .iter()
                .filter(|v| self.is_vertex_alive(**v))
                .flat_map(|&v| self.vertex_facets(v).iter().copied())
                .collect()
        };
        let mut seen: BTreeMap<Simplex, usize> = BTreeMap::new();
        for &f in &facets {
            let s = self.facet_simplex(f);
            for &v in s.vertices() {
                if !self.is_vertex_alive(v) {
                    report.push(Condition::Closure, Simplex::vertex(v));
                }
            }
            *seen.entry(s).or_default() += 1;
        }
        for (s, n) in &seen {
            if *n > 1 || (!global && self.facets_containing(s).len() > 1) {
                report.push(Condition::Intersection, *s);
            }
        }
        if dim > 0 && global {
            let mut cofaces: HashMap<Simplex, usize> = HashMap::new();
            for &f in &facets {
                for face in self.facet_simplex(f).faces_of_dim(dim - 1) {
                    *cofaces.entry(face).or_default() += 1;
                }
            }
            let mut over: Vec<Simplex> = cofaces.into_iter().filter(|&(_, n)| n > 2).map(|(f, _)| f).collect();
            over.sort();
            for face in over {
                report.push(Condition::Manifold, face);
            }
        } else if dim > 0 {
            let faces: BTreeSet<Simplex> = facets
                .iter()
                .flat_map(|&f| self.facet_simplex(f).faces_of_dim(dim - 1))
                .collect();
            for face in faces {
                if self.facets_containing(&face).len() > 2 {
                    report.push(Condition::Manifold, face);
                }
            }
        }
        for &v in vertices {
            if !self.is_vertex_alive(v) {
                continue;
            }
            let star = self.vertex_facets(v);
            if star.is_empty() {
                if dim > 0 {
                    report.push(Condition::Pure, Simplex::vertex(v));
                }
                continue;
            }
            if dim == 0 {
                continue;
            }
            let lk: Vec<Simplex> = star
                .iter()
                .filter_map(|&f| self.facet_simplex(f).without(v))
                .collect();
            if !is_ball_or_sphere(dim - 1, &lk) {
                report.push(Condition::VertexLink, Simplex::vertex(v));
            }
        }
        report.finish()
    }
}

/// Whether the pure `m`-complex spanned by `facets` is a combinatorial
/// `m`-ball or `m`-sphere (`m <= 2`).
pub(crate) fn is_ball_or_sphere(m: usize, facets: &[Simplex]) -> bool {
    if facets.is_empty() {
        return false;
    }
    let mut sorted = facets.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    if m == 0 {
        return facets.len() <= 2;
    }
    if m == 1 {
        return is_path_or_cycle(facets);
    }
    let mut ridges: Vec<(Simplex, usize)> = facets
        .iter()
        .enumerate()
        .flat_map(|(i, f)| f.faces_of_dim(m - 1).into_iter().map(move |g| (g, i)))
        .collect();
    ridges.sort_unstable();
    // union-find over facets glued along shared ridges
    let mut root: Vec<usize> = (0..facets.len()).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let (mut boundary, mut n_ridges) = (false, 0i64);
    for run in ridges.chunk_by(|a, b| a.0 == b.0) {
        n_ridges += 1;
        match run.len() {
            1 => boundary = true,
            2 => {
                let (x, y) = (find(&mut root, run[0].1), find(&mut root, run[1].1));
                root[x] = y;
            }
            _ => return false,
        }
    }
    let mut verts: Vec<VertexId> = facets.iter().flat_map(|f| f.vertices().iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    let mut lk = Vec::new();
    for &v in &verts {
        lk.clear();
        lk.extend(facets.iter().filter(|f| f.contains(v)).filter_map(|f| f.without(v)));
        if !is_ball_or_sphere(m - 1, &lk) {
            return false;
        }
    }
    let r0 = find(&mut root, 0);
    if (1..facets.len()).any(|i| find(&mut root, i) != r0) {
        return false;
    }
    let mut chi = verts.len() as i64;
    for k in 1..m - 1 {
        let mut faces: Vec<Simplex> = facets.iter().flat_map(|f| f.faces_of_dim(k)).collect();
        faces.sort_unstable();
        faces.dedup();
        chi += if k % 2 == 0 { faces.len() as i64 } else { -(faces.len() as i64) };
    }
    chi += if (m - 1) % 2 == 0 { n_ridges } else { -n_ridges };
    chi += if m % 2 == 0 { facets.len() as i64 } else { -(facets.len() as i64) };
    if boundary {
        chi == 1
    } else {
        chi == 1 + if m % 2 == 0 { 1 } else { -1 }
    }
}

/// Distinct edges forming one path or one cycle.
fn is_path_or_cycle(edges: &[Simplex]) -> bool {
    let mut degree: Vec<(VertexId, usize)> = Vec::with_capacity(edges.len() + 1);
    for e in edges {
        for &v in e.vertices() {
            match degree.iter_mut().find(|(w, _)| *w == v) {
                Some((_, n)) => *n += 1,
                None => degree.push((v, 1)),
            }
        }
    }
    if degree.iter().any(|&(_, n)| n > 2) {
        return false;
    }
    let mut reached = vec![false; edges.len()];
    let mut frontier = edges[0].vertices().to_vec();
    reached[0] = true;
    let mut count = 1;
    while let Some(v) = frontier.pop() {
        for (i, e) in edges.iter().enumerate() {
            if !reached[i] && e.contains(v) {
                reached[i] = true;
                count += 1;
                frontier.extend(e.vertices().iter().copied().filter(|&w| w != v));
            }
        }
    }
    count == edges.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[u32]) -> Simplex {
        Simplex::from_indices(ix).unwrap()
    }

    #[test]
    fn tetrahedron_boundary_is_valid() {
        let m: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]]).unwrap();
        assert!(m.validate().is_valid());
    }

    #[test]
    fn three_triangles_on_one_edge() {
        let m: Mesh<f64> = Mesh::new(2, 5, &[[0, 1, 2], [0, 1, 3], [0, 1, 4]]).unwrap();
        let r = m.validate();
        assert!(r.violations.contains(&Violation {
            condition: Condition::Manifold,
            witness: s(&[0, 1])
        }));
    }

    #[test]
    fn dangling_edge_is_impure() {
        let mut simplices = s(&[0, 1, 2]).closure();
        simplices.extend(s(&[2, 3]).closure());
        let r = validate_simplices(2, &simplices);
        assert!(r.violations.contains(&Violation {
            condition: Condition::Pure,
            witness: s(&[2, 3])
        }));
        assert!(!r.has(Condition::Manifold));
    }

    #[test]
    fn missing_face_breaks_closure() {
        let r = validate_simplices(1, &[s(&[0, 1]), s(&[0])]);
        assert!(r.has(Condition::Closure));
    }

    #[test]
    fn isolated_vertex_is_impure() {
        let m: Mesh<f64> = Mesh::new(2, 4, &[[0, 1, 2]]).unwrap();
        assert!(m.validate().has(Condition::Pure));
    }

    #[test]
    fn duplicate_facets_flagged() {
        let m: Mesh<f64> = Mesh::new(2, 3, &[[0, 1, 2], [0, 2, 1]]).unwrap();
        assert!(m.validate().has(Condition::Intersection));
    }

    #[test]
    fn bowtie_vertex_flagged() {
        let m: Mesh<f64> = Mesh::new(2, 5, &[[0, 1, 2], [0, 3, 4]]).unwrap();
        let r = m.validate();
        assert_eq!(
            r.violations,
            vec![Violation {
                condition: Condition::VertexLink,
                witness: s(&[0])
            }]
        );
    }

    #[test]
    fn ball_and_sphere_recognition() {
        let disk: Vec<Simplex> = (0..5).map(|i| s(&[i, (i + 1) % 6])).collect();
        assert!(is_ball_or_sphere(1, &disk));
        let cycle: Vec<Simplex> = (0..6).map(|i| s(&[i, (i + 1) % 6])).collect();
        assert!(is_ball_or_sphere(1, &cycle));
        let two_paths = vec![s(&[0, 1]), s(&[2, 3])];
        assert!(!is_ball_or_sphere(1, &two_paths));
        let tet = vec![s(&[0, 1, 2]), s(&[0, 1, 3]), s(&[0, 2, 3]), s(&[1, 2, 3])];
        assert!(is_ball_or_sphere(2, &tet));
        assert!(is_ball_or_sphere(2, &tet[..3]));
    }
}
