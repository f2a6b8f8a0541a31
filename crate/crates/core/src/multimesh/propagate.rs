//! Synchronised operations across all nodes of a multimesh.
//!
//! An operation requested on any node is mapped to the root and executed
//! there; each child then repeats it on every preimage of the parent's
//! operated edges, in pre-order, and finally re-seats the anchors touched by
//! either side.

use std::collections::{BTreeMap, BTreeSet};

use super::{MultiMesh, NodeId};
use crate::error::MeshError;
use crate::mesh::link_condition;
use crate::ops::{
    collapse_unchecked, edge_split, is_swappable, opposite_vertices, rank_swap_targets, OpKind,
    OperationRecord, Placement,
};
use crate::scalar::Scalar;
use crate::simplex::{FacetId, Simplex, VertexId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeOp {
    Split(Placement),
    /// Collapse onto the first vertex of the requested edge.
    Collapse(Placement),
    Swap,
}

/// One local operation executed on one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOp {
    pub node: NodeId,
    pub record: OperationRecord,
}

/// Every local operation performed by one propagated operation, in
/// execution order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Propagation {
    pub ops: Vec<NodeOp>,
}

impl Propagation {
    pub fn records(&self, node: NodeId) -> impl Iterator<Item = &OperationRecord> {
        self.ops.iter().filter(move |o| o.node == node).map(|o| &o.record)
    }

    /// Nodes that changed, sorted.
    pub fn touched_nodes(&self) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self.ops.iter().map(|o| o.node).collect();
        set.into_iter().collect()
    }

    /// Vertex created on `node` by splitting the edge `{a, b}`.
    pub fn split_vertex(&self, node: NodeId, a: VertexId, b: VertexId) -> Option<VertexId> {
        self.records(node)
            .find(|r| r.kind == OpKind::Split && (r.edge == [a, b] || r.edge == [b, a]))
            .and_then(|r| r.new_vertex)
    }
}

impl<T: Scalar> MultiMesh<T> {
    /// Multimesh link condition of edge `{a, b}` of `node`: the edge is
    /// mapped to the root, then the single-mesh condition is checked there
    /// and recursively on every preimage edge in every descendant. When a
    /// node holds several preimage edges, their collapses run one after the
    /// other, so each later one is checked again on the intermediate mesh.
    pub fn link_condition(&self, node: NodeId, a: VertexId, b: VertexId) -> bool {
        if a == b || !self.mesh(node).contains_simplex(&Simplex::edge(a, b)) {
            return false;
        }
        let up = self.map_vertices_up(node, &[a, b], self.root());
        let mut several = false;
        if !self.link_rec(self.root(), up[0], up[1], &mut several) {
            return false;
        }
        !several || self.clone().run(node, EdgeOp::Collapse(Placement::Keep), a, b, true).is_ok()
    }

    fn link_rec(&self, n: NodeId, a: VertexId, b: VertexId, several: &mut bool) -> bool {
        if !link_condition(self.mesh(n), &Simplex::edge(a, b)) {
            return false;
        }
        for &c in self.children(n) {
            let m = self.map(c).expect("child map");
            let edges = m.preimage_edges(self.mesh(c), a, b);
            *several |= edges.len() > 1;
            for (u, w) in edges {
                if !self.link_rec(c, u, w, several) {
                    return false;
                }
            }
        }
        true
    }

    /// Performs `op` on edge `(a, b)` of `node` and on all related simplices
    /// of every other node. Collapses are gated by the multimesh link
    /// condition; the result is checked for validity around the changes. On
    /// error nothing is modified.
    pub fn propagate(&mut self, node: NodeId, op: EdgeOp, a: VertexId, b: VertexId) -> Result<Propagation, MeshError> {
        self.guarded(|mm| match op {
            EdgeOp::Swap => mm.swap_inner(node, a, b),
            _ => mm.run(node, op, a, b, true),
        })
    }

    /// Like [`MultiMesh::propagate`] without the link condition and without
    /// the validity check, so the result may be invalid. Errors only when
    /// the maps cannot be rebuilt, in which case nothing is modified.
    pub fn propagate_unchecked(
        &mut self,
        node: NodeId,
        op: EdgeOp,
        a: VertexId,
        b: VertexId,
    ) -> Result<Propagation, MeshError> {
        self.guarded(|mm| match op {
            EdgeOp::Swap => mm.swap_inner(node, a, b),
            _ => mm.run(node, op, a, b, false),
        })
    }

    pub fn split_edge(&mut self, node: NodeId, a: VertexId, b: VertexId) -> Result<Propagation, MeshError> {
        self.propagate(node, EdgeOp::Split(Placement::Midpoint), a, b)
    }

    pub fn collapse_edge(
        &mut self,
        node: NodeId,
        a: VertexId,
        b: VertexId,
        placement: Placement,
    ) -> Result<Propagation, MeshError> {
        self.propagate(node, EdgeOp::Collapse(placement), a, b)
    }

    pub fn swap_edge(&mut self, node: NodeId, a: VertexId, b: VertexId) -> Result<Propagation, MeshError> {
        self.propagate(node, EdgeOp::Swap, a, b)
    }

    fn guarded(
        &mut self,
        f: impl FnOnce(&mut MultiMesh<T>) -> Result<Propagation, MeshError>,
    ) -> Result<Propagation, MeshError> {
        let own = !self.in_transaction();
        if own {
            self.begin();
        }
        let marks = self.marks();
        let generation = self.generation();
        let result = f(self);
        if result.is_err() {
            self.rewind(marks, generation);
        }
        if own {
            self.commit();
        }
        result
    }

    fn swap_inner(&mut self, node: NodeId, a: VertexId, b: VertexId) -> Result<Propagation, MeshError> {
        let e = Simplex::new(&[a, b]).ok_or(MeshError::NotAnEdge(Simplex::vertex(a)))?;
        self.mesh(node).check_alive(&e)?;
        if !is_swappable(self.mesh(node), &e) {
            return Err(MeshError::Precondition(e, "boundary edge cannot be swapped"));
        }
        let opposite = opposite_vertices(self.mesh(node), &e);
        let mut prop = self.run(node, EdgeOp::Split(Placement::Midpoint), a, b, true)?;
        let m = prop.split_vertex(node, a, b).expect("split creates a vertex");
        for o in rank_swap_targets(self.mesh(node), m, &opposite) {
            let marks = self.marks();
            let generation = self.generation();
            match self.run(node, EdgeOp::Collapse(Placement::Keep), o, m, true) {
                Ok(col) => {
                    prop.ops.extend(col.ops);
                    return Ok(prop);
                }
                Err(MeshError::Invariant(_) | MeshError::LinkCondition(_)) => self.rewind(marks, generation),
                Err(err) => return Err(err),
            }
        }
        Err(MeshError::LinkCondition(e))
    }

    fn run(&mut self, node: NodeId, op: EdgeOp, a: VertexId, b: VertexId, checked: bool) -> Result<Propagation, MeshError> {
        self.node(node)?;
        let e = Simplex::new(&[a, b]).ok_or(MeshError::NotAnEdge(Simplex::vertex(a)))?;
        self.mesh(node).check_alive(&e)?;
        let root = self.root();
        let up = self.map_vertices_up(node, &[a, b], root);
        let (ra, rb) = (up[0], up[1]);
        let root_edge = Simplex::new(&up).ok_or(MeshError::StaleSimplex(e))?;
        self.mesh(root).check_alive(&root_edge)?;
        let placement = match op {
            EdgeOp::Split(p) | EdgeOp::Collapse(p) => p,
            EdgeOp::Swap => unreachable!("swaps are split + collapse"),
        };
        let is_collapse = matches!(op, EdgeOp::Collapse(_));
        if is_collapse && checked && !self.link_rec(root, ra, rb, &mut false) {
            return Err(MeshError::LinkCondition(e));
        }
        let rec = if is_collapse {
            collapse_unchecked(self.mesh_mut(root), ra, rb, placement)?
        } else {
            edge_split(self.mesh_mut(root), ra, rb, placement)?
        };
        let mut prop = Propagation {
            ops: vec![NodeOp { node: root, record: rec }],
        };
        for n in self.preorder().into_iter().skip(1) {
            let p = self.parent(n).expect("non-root");
            let parent_ops: Vec<OperationRecord> = prop.records(p).cloned().collect();
            if parent_ops.is_empty() {
                continue;
            }
            let mut child_ops = Vec::new();
            let mut moved = BTreeSet::new();
            for pop in &parent_ops {
                self.restrict(n, pop, placement, checked, &mut child_ops, &mut moved)?;
            }
            self.update_anchors(n, &parent_ops, &child_ops, &moved)?;
            prop.ops.extend(child_ops.into_iter().map(|record| NodeOp { node: n, record }));
        }
        if checked {
            self.check_after(&prop)?;
        }
        self.bump_generation();
        Ok(prop)
    }

    /// Repeats the parent operation `pop` on every preimage edge of node `n`.
    fn restrict(
        &mut self,
        n: NodeId,
        pop: &OperationRecord,
        placement: Placement,
        checked: bool,
        out: &mut Vec<OperationRecord>,
        moved: &mut BTreeSet<VertexId>,
    ) -> Result<(), MeshError> {
        let [pa, pb] = pop.edge;
        let (_, child, map) = self.split_parent_child(n);
        let edges = map.preimage_edges(child, pa, pb);
        match pop.kind {
            OpKind::Split => {
                let pc = pop.new_vertex.expect("split record");
                for (u, w) in edges {
                    let rec = edge_split(child, u, w, placement)?;
                    map.set_image(rec.new_vertex.expect("split record"), pc);
                    out.push(rec);
                }
            }
            OpKind::Collapse => {
                let mut merged: BTreeMap<VertexId, VertexId> = BTreeMap::new();
                let find = |m: &BTreeMap<VertexId, VertexId>, mut x: VertexId| {
                    while let Some(&y) = m.get(&x) {
                        x = y;
                    }
                    x
                };
                for (u, w) in edges {
                    let (u, w) = (find(&merged, u), find(&merged, w));
                    if u == w || !child.contains_simplex(&Simplex::edge(u, w)) {
                        continue;
                    }
                    if checked && !out.is_empty() && !link_condition(child, &Simplex::edge(u, w)) {
                        return Err(MeshError::LinkCondition(Simplex::edge(u, w)));
                    }
                    let rec = collapse_unchecked(child, u, w, placement)?;
                    map.set_image(w, VertexId::INVALID);
                    merged.insert(w, u);
                    out.push(rec);
                }
                for v in map.preimage_of(pb).to_vec() {
                    if child.is_vertex_alive(v) {
                        map.set_image(v, pa);
                        moved.insert(v);
                    }
                }
            }
            OpKind::Swap | OpKind::Smooth => unreachable!("only splits and collapses are restricted"),
        }
        Ok(())
    }

    fn update_anchors(
        &mut self,
        n: NodeId,
        parent_ops: &[OperationRecord],
        child_ops: &[OperationRecord],
        moved: &BTreeSet<VertexId>,
    ) -> Result<(), MeshError> {
        let (parent, child, map) = self.parts_mut(n);
        let mut affected: BTreeSet<FacetId> = BTreeSet::new();
        for rec in child_ops {
            for &f in &rec.deleted_facets {
                map.set_anchor(f, None);
            }
        }
        for rec in child_ops {
            affected.extend(rec.created_facets.iter().chain(&rec.modified_facets));
        }
        for rec in parent_ops {
            for &pf in rec.deleted_facets.iter().chain(&rec.modified_facets) {
                affected.extend(map.anchored_on(pf));
            }
        }
        for &v in moved {
            affected.extend(child.vertex_facets(v));
        }
        for f in affected {
            if child.is_facet_alive(f) {
                map.seat(child, parent, f)
                    .map_err(|_| MeshError::Invariant(format!("containment map of {n}")))?;
            }
        }
        Ok(())
    }

    fn check_after(&self, prop: &Propagation) -> Result<(), MeshError> {
        let mut touched: BTreeMap<NodeId, BTreeSet<VertexId>> = BTreeMap::new();
        for op in &prop.ops {
            let set = touched.entry(op.node).or_default();
            set.extend(op.record.vertex_correspondence.values());
            set.extend(op.record.new_vertex);
        }
        for (n, verts) in touched {
            let verts: Vec<VertexId> = verts.into_iter().collect();
            let report = self.mesh(n).validate_local(&verts);
            if !report.is_valid() {
                return Err(MeshError::Invariant(format!("validity of {n}: {report}")));
            }
        }
        Ok(())
    }
}
