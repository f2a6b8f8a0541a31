//! Sampled ε-envelope around a reference surface or curve, backed by an
//! axis-aligned bounding box tree.

use crate::error::MeshError;
use crate::geometry::{closest_point_triangle, dist2, dot, sub};
use crate::mesh::Mesh;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Prim {
    Segment([f64; 3], [f64; 3]),
    Triangle([f64; 3], [f64; 3], [f64; 3]),
}

impl Prim {
    fn points(&self) -> Vec<[f64; 3]> {
        match *self {
            Prim::Segment(a, b) => vec![a, b],
            Prim::Triangle(a, b, c) => vec![a, b, c],
        }
    }

    fn closest(&self, p: [f64; 3]) -> [f64; 3] {
        match *self {
            Prim::Segment(a, b) => closest_point_segment(p, a, b),
            Prim::Triangle(a, b, c) => closest_point_triangle(p, a, b, c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Aabb {
    lo: [f64; 3],
    hi: [f64; 3],
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            lo: [f64::INFINITY; 3],
            hi: [f64::NEG_INFINITY; 3],
        }
    }

    fn grow(&mut self, p: [f64; 3]) {
        for i in 0..3 {
            self.lo[i] = self.lo[i].min(p[i]);
            self.hi[i] = self.hi[i].max(p[i]);
        }
    }

    fn dist2(&self, p: [f64; 3]) -> f64 {
        (0..3)
            .map(|i| {
                let d = (self.lo[i] - p[i]).max(p[i] - self.hi[i]).max(0.0);
                d * d
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    prims: Vec<Prim>,
    nodes: Vec<Node>,
    eps: f64,
}

impl Envelope {
    /// Envelope of the facets of a 1- or 2-mesh with positions of width 2
    /// or 3 (padded with zeros).
    pub fn from_mesh<T: Scalar>(mesh: &Mesh<T>, eps: f64) -> Result<Self, MeshError> {
        if mesh.position_width().is_none() {
            return Err(MeshError::MissingAttribute(crate::mesh::POSITION.into()));
        }
        let point = |v| {
            let p = mesh.position(v).expect("position");
            let mut out = [0.0; 3];
            for (o, x) in out.iter_mut().zip(p) {
                *o = x.as_f64();
            }
            out
        };
        let prims: Vec<Prim> = mesh
            .facets()
            .filter_map(|f| {
                let vs = mesh.facet_vertices(f);
                match vs.len() {
                    2 => Some(Prim::Segment(point(vs[0]), point(vs[1]))),
                    3 => Some(Prim::Triangle(point(vs[0]), point(vs[1]), point(vs[2]))),
                    _ => None,
                }
            })
            .collect();
        if prims.is_empty() {
            return Err(MeshError::Dimension(mesh.dim()));
        }
        Ok(Self::build(prims, eps))
    }

    fn build(mut prims: Vec<Prim>, eps: f64) -> Self {
        let mut nodes = Vec::new();
        let n = prims.len();
        build_node(&mut prims, 0, n, &mut nodes);
        Envelope { prims, nodes, eps }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn closest_point(&self, p: [f64; 3]) -> [f64; 3] {
        let mut best = (f64::INFINITY, p);
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            if self.nodes[i].bounds().dist2(p) >= best.0 {
                continue;
            }
            match self.nodes[i] {
                Node::Leaf { start, end, .. } => {
                    for prim in &self.prims[start..end] {
                        let q = prim.closest(p);
                        let d = dist2(&q, &p);
                        if d < best.0 {
                            best = (d, q);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let (near, far) = if self.nodes[left].bounds().dist2(p) <= self.nodes[right].bounds().dist2(p) {
                        (left, right)
                    } else {
                        (right, left)
                    };
                    stack.push(far);
                    stack.push(near);
                }
            }
        }
        best.1
    }

    pub fn distance(&self, p: [f64; 3]) -> f64 {
        dist2(&self.closest_point(p), &p).sqrt()
    }

    /// Whether `p` lies within `eps` of the reference.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        self.eps == f64::INFINITY || self.distance(p) <= self.eps
    }
}

fn build_node(prims: &mut [Prim], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let mut bounds = Aabb::empty();
    for p in &prims[start..end] {
        for q in p.points() {
            bounds.grow(q);
        }
    }
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, end });
        return id;
    }
    let axis = (0..3)
        .max_by(|&a, &b| (bounds.hi[a] - bounds.lo[a]).total_cmp(&(bounds.hi[b] - bounds.lo[b])))
        .unwrap();
    let centre = |p: &Prim| p.points().iter().map(|q| q[axis]).sum::<f64>();
    prims[start..end].sort_by(|x, y| centre(x).total_cmp(&centre(y)));
    let mid = (start + end) / 2;
    nodes.push(Node::Leaf { bounds, start, end });
    let left = build_node(prims, start, mid, nodes);
    let right = build_node(prims, mid, end, nodes);
    nodes[id] = Node::Inner { bounds, left, right };
    id
}

fn closest_point_segment(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    let ab = sub(&b, &a);
    let len2 = dot(&ab, &ab);
    if len2 == 0.0 {
        return a;
    }
    let t = (dot(&sub(&p, &a), &ab) / len2).clamp(0.0, 1.0);
    [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn distance_matches_brute_force() {
        let sphere: Mesh<f64> = shapes::icosphere(2);
        let env = Envelope::from_mesh(&sphere, 0.01).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let p = [1.3 * t.cos(), 0.9 * t.sin(), 0.4 * (2.0 * t).sin()];
            let brute = env
                .prims
                .iter()
                .map(|q| dist2(&q.closest(p), &p))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            assert!((env.distance(p) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn vertices_are_inside_and_far_points_outside() {
        let sphere: Mesh<f64> = shapes::icosphere(1);
        let env = Envelope::from_mesh(&sphere, 1e-9).unwrap();
        for v in sphere.vertices() {
            assert!(env.contains(sphere.position3(v).unwrap()));
        }
        assert!(!env.contains([0.0, 0.0, 0.0]));
        let loose = Envelope::from_mesh(&sphere, f64::INFINITY).unwrap();
        assert!(loose.contains([1e9, 0.0, 0.0]));
    }

    #[test]
    fn segments_of_a_curve() {
        let mut m: Mesh<f64> = Mesh::new(1, 3, &[[0u32, 1], [1, 2]]).unwrap();
        m.add_vertex_attribute(crate::mesh::POSITION, 2, vec![0.0, 0.0, 1.0, 0.0, 1.0, 1.0]).unwrap();
        let env = Envelope::from_mesh(&m, 0.1).unwrap();
        assert!((env.distance([0.5, 0.5, 0.0]) - 0.5).abs() < 1e-12);
        assert!(env.contains([1.05, 0.5, 0.0]));
    }
}
