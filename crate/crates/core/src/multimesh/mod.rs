//! A tree of meshes linked by containment maps.

mod map;
mod propagate;

use std::fmt;

pub use map::{Anchor, ContainmentMap, MapRollback};
pub use propagate::{EdgeOp, NodeOp, Propagation};

use crate::error::MeshError;
use crate::mesh::{Mesh, ValidityReport};
use crate::ops::Rollback;
use crate::scalar::Scalar;
use crate::simplex::{FacetId, Simplex, VertexId};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node<T> {
    pub name: String,
    mesh: Mesh<T>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    /// Map into the parent mesh; `None` for the root.
    map: Option<ContainmentMap>,
}

impl<T> Node<T> {
    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn map(&self) -> Option<&ContainmentMap> {
        self.map.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiMesh<T> {
    nodes: Vec<Node<T>>,
    generation: u64,
    txn: Option<Txn>,
}

#[derive(Clone, Debug, PartialEq)]
struct Txn {
    start_generation: u64,
    mesh_starts: Vec<u64>,
    lens: Vec<Option<map::MapLens>>,
}

/// Undo information for every node and map touched by a sequence of
/// multimesh operations.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiRollback<T> {
    generation: u64,
    start_generation: u64,
    meshes: Vec<Rollback<T>>,
    maps: Vec<Option<MapRollback>>,
}

impl<T> MultiRollback<T> {
    pub fn generation(&self) -> u64 {
        self.generation
    }
}

/// Per-node validity and map consistency.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiReport {
    pub nodes: Vec<(NodeId, ValidityReport)>,
    pub maps: Vec<(NodeId, Vec<String>)>,
}

impl MultiReport {
    pub fn is_valid(&self) -> bool {
        self.nodes.iter().all(|(_, r)| r.is_valid()) && self.maps.iter().all(|(_, m)| m.is_empty())
    }
}

impl fmt::Display for MultiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, r) in &self.nodes {
            writeln!(f, "{n}: {}", r.to_string().replace('\n', "; "))?;
        }
        for (n, errs) in &self.maps {
            if errs.is_empty() {
                writeln!(f, "{n} map: consistent")?;
            } else {
                for e in errs {
                    writeln!(f, "{n} map: {e}")?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) type Marks = Vec<(usize, Option<(usize, map::MapLens)>)>;

impl<T: Scalar> MultiMesh<T> {
    pub fn new(root: Mesh<T>) -> Self {
        MultiMesh {
            nodes: vec![Node {
                name: "root".into(),
                mesh: root,
                parent: None,
                children: Vec::new(),
                map: None,
            }],
            generation: 0,
            txn: None,
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn node(&self, n: NodeId) -> Result<&Node<T>, MeshError> {
        self.nodes.get(n.0).ok_or(MeshError::UnknownNode(n.0))
    }

    pub fn mesh(&self, n: NodeId) -> &Mesh<T> {
        &self.nodes[n.0].mesh
    }

    pub fn map(&self, n: NodeId) -> Option<&ContainmentMap> {
        self.nodes[n.0].map.as_ref()
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.nodes[n.0].parent
    }

    pub fn children(&self, n: NodeId) -> &[NodeId] {
        &self.nodes[n.0].children
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    /// Nodes in pre-order from the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root()];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.children(n).iter().rev());
        }
        out
    }

    /// `n` followed by its ancestors up to the root.
    pub fn root_path(&self, n: NodeId) -> Vec<NodeId> {
        let mut out = vec![n];
        let mut cur = n;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Attaches `mesh` below `parent` using a prebuilt map.
    pub fn add_child(
        &mut self,
        parent: NodeId,
        name: impl Into<String>,
        mesh: Mesh<T>,
        map: ContainmentMap,
    ) -> Result<NodeId, MeshError> {
        let pm = &self.node(parent)?.mesh;
        if mesh.dim() > pm.dim() {
            return Err(MeshError::DimensionOrder {
                child: mesh.dim(),
                parent: pm.dim(),
            });
        }
        let errs = map.check(&mesh, pm);
        if let Some(e) = errs.first() {
            return Err(MeshError::Invariant(e.clone()));
        }
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            name: name.into(),
            mesh,
            parent: Some(parent),
            children: Vec::new(),
            map: Some(map),
        });
        self.nodes[parent.0].children.push(id);
        Ok(id)
    }

    /// Builds and attaches a child from tagged `k`-simplices of `parent`.
    pub fn add_child_from_tags(
        &mut self,
        parent: NodeId,
        name: impl Into<String>,
        k: usize,
        tagged: &[Simplex],
    ) -> Result<NodeId, MeshError> {
        let (mesh, map) = ContainmentMap::from_tags(&self.node(parent)?.mesh, k, tagged)?;
        self.add_child(parent, name, mesh, map)
    }

    /// Attaches `child`, whose facets pair with those of `parent`.
    pub fn add_child_from_bijection(
        &mut self,
        parent: NodeId,
        name: impl Into<String>,
        child: Mesh<T>,
        pairs: &[(FacetId, FacetId)],
    ) -> Result<NodeId, MeshError> {
        let map = ContainmentMap::from_facet_bijection(&self.node(parent)?.mesh, &child, pairs)?;
        self.add_child(parent, name, child, map)
    }

    /// Attribute-only mutation of a node; connectivity is unaffected.
    pub fn set_vertex_attribute(
        &mut self,
        n: NodeId,
        name: &str,
        v: VertexId,
        values: &[T],
    ) -> Result<(), MeshError> {
        self.nodes
            .get_mut(n.0)
            .ok_or(MeshError::UnknownNode(n.0))?
            .mesh
            .set_vertex_attribute(name, v, values)
    }

    pub fn add_vertex_attribute(
        &mut self,
        n: NodeId,
        name: &str,
        width: usize,
        data: Vec<T>,
    ) -> Result<(), MeshError> {
        self.nodes
            .get_mut(n.0)
            .ok_or(MeshError::UnknownNode(n.0))?
            .mesh
            .add_vertex_attribute(name, width, data)
    }

    pub(crate) fn mesh_mut(&mut self, n: NodeId) -> &mut Mesh<T> {
        &mut self.nodes[n.0].mesh
    }

    pub(crate) fn split_parent_child(&mut self, child: NodeId) -> (&Mesh<T>, &mut Mesh<T>, &mut ContainmentMap) {
        let parent = self.parent(child).expect("child node");
        assert!(parent.0 < child.0, "parents precede children");
        let (lo, hi) = self.nodes.split_at_mut(child.0);
        let c = &mut hi[0];
        (&lo[parent.0].mesh, &mut c.mesh, c.map.as_mut().expect("child has a map"))
    }

    pub(crate) fn parts_mut(&mut self, child: NodeId) -> (&Mesh<T>, &Mesh<T>, &mut ContainmentMap) {
        let (p, c, m) = self.split_parent_child(child);
        (p, &*c, m)
    }

    // ---- simplex mapping ----------------------------------------------------

    /// Composed image of `s` in the ancestor `target`.
    pub fn map_up(&self, node: NodeId, s: &Simplex, target: NodeId) -> Result<Simplex, MeshError> {
        self.node(node)?;
        self.node(target)?;
        if !self.mesh(node).contains_simplex(s) {
            return Err(MeshError::StaleSimplex(*s));
        }
        let mut cur = *s;
        let mut n = node;
        while n != target {
            let p = self.parent(n).ok_or(MeshError::NotAncestor {
                node: node.0,
                target: target.0,
            })?;
            cur = self
                .map(n)
                .and_then(|m| m.map_simplex(&cur))
                .ok_or(MeshError::StaleSimplex(cur))?;
            n = p;
        }
        Ok(cur)
    }

    /// Maps an ordered vertex list to an ancestor vertex by vertex.
    pub(crate) fn map_vertices_up(&self, node: NodeId, vs: &[VertexId], target: NodeId) -> Vec<VertexId> {
        let mut cur = vs.to_vec();
        let mut n = node;
        while n != target {
            let m = self.map(n).expect("non-root node");
            for v in &mut cur {
                *v = m.image_of(*v);
            }
            n = self.parent(n).expect("target is an ancestor");
        }
        cur
    }

    /// All simplices of the descendant `target` whose composed image is `s`.
    pub fn map_down(&self, node: NodeId, s: &Simplex, target: NodeId) -> Result<Vec<Simplex>, MeshError> {
        self.node(node)?;
        let path = self.root_path(self.node(target).map(|_| target)?);
        let Some(pos) = path.iter().position(|&x| x == node) else {
            return Err(MeshError::NotAncestor {
                node: target.0,
                target: node.0,
            });
        };
        if !self.mesh(node).contains_simplex(s) {
            return Err(MeshError::StaleSimplex(*s));
        }
        let mut cur = vec![*s];
        for i in (0..pos).rev() {
            let child = path[i];
            let m = self.map(child).expect("non-root");
            let mut next: Vec<Simplex> = cur
                .iter()
                .flat_map(|t| m.preimage_simplices(self.mesh(child), t))
                .collect();
            next.sort();
            next.dedup();
            cur = next;
        }
        Ok(cur)
    }

    /// Maps through the lowest common ancestor of `src` and `dst`.
    pub fn map_between(&self, src: NodeId, s: &Simplex, dst: NodeId) -> Result<Vec<Simplex>, MeshError> {
        let up = self.root_path(src);
        let dst_path = self.root_path(dst);
        let lca = *up
            .iter()
            .find(|n| dst_path.contains(n))
            .expect("common root");
        let top = self.map_up(src, s, lca)?;
        self.map_down(lca, &top, dst)
    }

    // ---- validation ---------------------------------------------------------

    pub fn validate(&self) -> MultiReport {
        let mut report = MultiReport::default();
        for n in self.node_ids() {
            report.nodes.push((n, self.mesh(n).validate()));
            if let (Some(p), Some(m)) = (self.parent(n), self.map(n)) {
                report.maps.push((n, m.check(self.mesh(n), self.mesh(p))));
            }
        }
        report
    }

    // ---- transactions -------------------------------------------------------

    pub fn in_transaction(&self) -> bool {
        self.txn.is_some()
    }

    pub fn begin(&mut self) {
        assert!(self.txn.is_none(), "nested multimesh transaction");
        let start_generation = self.generation;
        let mut lens = Vec::with_capacity(self.nodes.len());
        let mut mesh_starts = Vec::with_capacity(self.nodes.len());
        for node in &mut self.nodes {
            mesh_starts.push(node.mesh.generation());
            node.mesh.begin_rollback();
            lens.push(node.map.as_mut().map(|m| m.begin_journal()));
        }
        self.txn = Some(Txn {
            start_generation,
            mesh_starts,
            lens,
        });
    }

    pub fn commit(&mut self) -> MultiRollback<T> {
        let txn = self.txn.take().expect("open transaction");
        let mut meshes = Vec::new();
        let mut maps = Vec::new();
        for ((node, lens), start) in self.nodes.iter_mut().zip(txn.lens).zip(txn.mesh_starts) {
            meshes.push(node.mesh.finish_rollback(start));
            maps.push(node.map.as_mut().map(|m| m.finish_journal(lens.expect("child map"))));
        }
        MultiRollback {
            generation: self.generation,
            start_generation: txn.start_generation,
            meshes,
            maps,
        }
    }

    /// Discards everything since `begin`.
    pub fn abort(&mut self) {
        let rb = self.commit();
        self.apply_rollback(rb);
    }

    pub(crate) fn marks(&self) -> Marks {
        self.nodes
            .iter()
            .map(|n| (n.mesh.journal_mark(), n.map.as_ref().map(|m| m.mark())))
            .collect()
    }

    pub(crate) fn rewind(&mut self, marks: Marks, generation: u64) {
        for (node, (mm, map_mark)) in self.nodes.iter_mut().zip(marks) {
            node.mesh.rewind(mm);
            if let (Some(m), Some(mark)) = (node.map.as_mut(), map_mark) {
                m.rewind(mark);
            }
        }
        self.generation = generation;
    }

    /// Runs `f` inside a transaction. On error everything is undone;
    /// otherwise the rollback of all changes is returned.
    pub fn recorded<R>(
        &mut self,
        f: impl FnOnce(&mut MultiMesh<T>) -> Result<R, MeshError>,
    ) -> Result<(R, MultiRollback<T>), MeshError> {
        self.begin();
        match f(self) {
            Ok(r) => Ok((r, self.commit())),
            Err(e) => {
                self.abort();
                Err(e)
            }
        }
    }

    /// Restores the state before the recorded operations.
    pub fn rollback(&mut self, rb: &MultiRollback<T>) -> Result<(), MeshError> {
        if self.txn.is_some() || rb.generation != self.generation || rb.meshes.len() != self.nodes.len() {
            return Err(MeshError::StaleRollback {
                recorded: rb.generation,
                current: self.generation,
            });
        }
        for (node, r) in self.nodes.iter().zip(&rb.meshes) {
            if r.generation() != node.mesh.generation() {
                return Err(MeshError::StaleRollback {
                    recorded: r.generation(),
                    current: node.mesh.generation(),
                });
            }
        }
        self.apply_rollback(rb.clone());
        Ok(())
    }

    fn apply_rollback(&mut self, rb: MultiRollback<T>) {
        for ((node, r), m) in self.nodes.iter_mut().zip(rb.meshes).zip(rb.maps) {
            crate::ops::rollback(&mut node.mesh, &r).expect("generation checked");
            if let (Some(map), Some(m)) = (node.map.as_mut(), m) {
                map.undo(m.entries, m.lens);
            }
        }
        self.generation = rb.start_generation;
    }

    pub(crate) fn bump_generation(&mut self) {
        self.generation += 1;
    }

    pub(crate) fn from_parts(nodes: Vec<Node<T>>, generation: u64) -> Self {
        MultiMesh {
            nodes,
            generation,
            txn: None,
        }
    }
}

impl<T> Node<T> {
    pub(crate) fn from_parts(
        name: String,
        mesh: Mesh<T>,
        parent: Option<NodeId>,
        children: Vec<NodeId>,
        map: Option<ContainmentMap>,
    ) -> Self {
        Node {
            name,
            mesh,
            parent,
            children,
            map,
        }
    }
}
