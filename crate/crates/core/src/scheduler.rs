//! Priority-driven passes of propagated operations with invariant
//! enforcement.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::MeshError;
use crate::invariants::{InvariantSet, Phase};
use crate::multimesh::{EdgeOp, MultiMesh, NodeId, NodeOp, Propagation};
use crate::ops::OperationRecord;
use crate::scalar::Scalar;
use crate::simplex::{Simplex, VertexId};

/// Counters of one or more passes. `attempted` always equals the sum of
/// `accepted` and the three rejection counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassStats {
    pub attempted: usize,
    pub accepted: usize,
    pub rejected_link: usize,
    pub rejected_invariant: usize,
    pub rejected_other: usize,
    /// Queue entries dropped because their edge changed after scoring.
    pub stale: usize,
}

impl PassStats {
    pub fn is_consistent(&self) -> bool {
        self.attempted == self.accepted + self.rejected_link + self.rejected_invariant + self.rejected_other
    }

    pub fn merge(&mut self, o: &PassStats) {
        self.attempted += o.attempted;
        self.accepted += o.accepted;
        self.rejected_link += o.rejected_link;
        self.rejected_invariant += o.rejected_invariant;
        self.rejected_other += o.rejected_other;
        self.stale += o.stale;
    }
}

/// An operation proposed for an edge; lower scores run first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub score: f64,
    pub op: EdgeOp,
    /// Oriented endpoints; for collapses `a` survives.
    pub a: VertexId,
    pub b: VertexId,
}

type Propose<'a, T> = dyn FnMut(&MultiMesh<T>, VertexId, VertexId) -> Option<Candidate> + 'a;
type Stop<'a, T> = dyn FnMut(&MultiMesh<T>) -> bool + 'a;

/// One pass over the edges of a node.
pub struct Pass<'a, T> {
    pub node: NodeId,
    propose: Box<Propose<'a, T>>,
    stop: Box<Stop<'a, T>>,
    pub max_attempts: Option<usize>,
}

impl<'a, T: Scalar> Pass<'a, T> {
    /// `propose(mm, a, b)` scores edge `{a, b}` with `a < b`, or returns
    /// `None` when the edge is not a candidate.
    pub fn new(node: NodeId, propose: impl FnMut(&MultiMesh<T>, VertexId, VertexId) -> Option<Candidate> + 'a) -> Self {
        Pass {
            node,
            propose: Box::new(propose),
            stop: Box::new(|_| false),
            max_attempts: None,
        }
    }

    pub fn with_stop(mut self, stop: impl FnMut(&MultiMesh<T>) -> bool + 'a) -> Self {
        self.stop = Box::new(stop);
        self
    }

    pub fn with_max_attempts(mut self, n: usize) -> Self {
        self.max_attempts = Some(n);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Accepted(Propagation),
    RejectedLink,
    RejectedInvariant,
    RejectedOther(MeshError),
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    cand: Candidate,
    edge: Simplex,
    stamp: u64,
}

impl Entry {
    fn key(&self) -> (f64, Simplex) {
        (self.cand.score, self.edge)
    }
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Entry {
    // reversed: the heap pops the smallest (score, edge)
    fn cmp(&self, o: &Self) -> Ordering {
        let (s, e) = self.key();
        let (t, f) = o.key();
        t.total_cmp(&s).then_with(|| f.cmp(&e)).then_with(|| o.stamp.cmp(&self.stamp))
    }
}

type Observer<'a, T> = dyn FnMut(&MultiMesh<T>, &Propagation) + 'a;

/// Runs passes and single operations under a set of invariants.
pub struct Scheduler<'a, T> {
    pub invariants: InvariantSet<T>,
    observers: Vec<Box<Observer<'a, T>>>,
}

impl<'a, T: Scalar> Scheduler<'a, T> {
    pub fn new(invariants: InvariantSet<T>) -> Self {
        Scheduler {
            invariants,
            observers: Vec::new(),
        }
    }

    /// Calls `f` after every accepted operation or move.
    pub fn observe(&mut self, f: impl FnMut(&MultiMesh<T>, &Propagation) + 'a) {
        self.observers.push(Box::new(f));
    }

    /// Attempts one propagated operation. Collapses are refused up front
    /// when the multimesh link condition fails; after-phase invariant
    /// failures roll every node back.
    pub fn attempt(&mut self, mm: &mut MultiMesh<T>, node: NodeId, op: EdgeOp, a: VertexId, b: VertexId) -> Outcome {
        if matches!(op, EdgeOp::Collapse(_)) && !mm.link_condition(node, a, b) {
            return Outcome::RejectedLink;
        }
        if !self.invariants.check(mm, &Propagation::default(), Phase::Before) {
            return Outcome::RejectedInvariant;
        }
        match mm.recorded(|mm| mm.propagate(node, op, a, b)) {
            Err(MeshError::LinkCondition(_)) => Outcome::RejectedLink,
            Err(e) => Outcome::RejectedOther(e),
            Ok((prop, rb)) => {
                if !self.invariants.check(mm, &prop, Phase::After) {
                    mm.rollback(&rb).expect("fresh rollback");
                    return Outcome::RejectedInvariant;
                }
                for f in &mut self.observers {
                    f(mm, &prop);
                }
                Outcome::Accepted(prop)
            }
        }
    }

    /// Moves vertices (attribute `name` only) as one step; rolled back when
    /// an after-phase invariant fails. Returns whether the move was kept.
    pub fn try_move(&mut self, mm: &mut MultiMesh<T>, name: &str, moves: &[(NodeId, VertexId, Vec<T>)]) -> bool {
        let res = mm.recorded(|mm| {
            let mut prop = Propagation::default();
            for (n, v, p) in moves {
                mm.set_vertex_attribute(*n, name, *v, p)?;
                prop.ops.push(NodeOp {
                    node: *n,
                    record: OperationRecord::smoothed(mm.mesh(*n), *v),
                });
            }
            Ok(prop)
        });
        let Ok((prop, rb)) = res else { return false };
        if !self.invariants.check(mm, &prop, Phase::After) {
            mm.rollback(&rb).expect("fresh rollback");
            return false;
        }
        for f in &mut self.observers {
            f(mm, &prop);
        }
        true
    }

    /// Pops candidates by `(score, edge)` until the queue is empty, the stop
    /// criterion holds or the attempt budget is spent. Edges whose
    /// endpoints changed since scoring are rescored instead of executed.
    pub fn run_pass(&mut self, mm: &mut MultiMesh<T>, pass: &mut Pass<'_, T>) -> PassStats {
        let mut stats = PassStats::default();
        let node = pass.node;
        if mm.node(node).is_err() {
            return stats;
        }
        let mut stamps: Vec<u64> = vec![0; mm.mesh(node).vertex_capacity()];
        let mut tick = 0u64;
        let mut heap = BinaryHeap::new();
        for e in mm.mesh(node).edges() {
            push(&mut heap, pass, mm, e, tick);
        }
        while let Some(entry) = heap.pop() {
            if (pass.stop)(mm) || pass.max_attempts.is_some_and(|m| stats.attempted >= m) {
                break;
            }
            let [a, b] = [entry.edge.vertices()[0], entry.edge.vertices()[1]];
            let fresh = mm.mesh(node).contains_simplex(&entry.edge)
                && stamps.get(a.index()).copied().unwrap_or(u64::MAX) <= entry.stamp
                && stamps.get(b.index()).copied().unwrap_or(u64::MAX) <= entry.stamp;
            if !fresh {
                stats.stale += 1;
                continue;
            }
            stats.attempted += 1;
            let c = entry.cand;
            match self.attempt(mm, node, c.op, c.a, c.b) {
                Outcome::Accepted(prop) => {
                    stats.accepted += 1;
                    tick += 1;
                    let mesh = mm.mesh(node);
                    stamps.resize(mesh.vertex_capacity(), 0);
                    let mut touched = BTreeSet::new();
                    for r in prop.records(node) {
                        touched.extend(r.touched_vertices(mesh));
                        touched.extend(r.new_vertex);
                        touched.extend(r.edge);
                    }
                    for &v in &touched {
                        stamps[v.index()] = tick;
                    }
                    let mut edges = BTreeSet::new();
                    for &v in touched.iter().filter(|v| mesh.is_vertex_alive(**v)) {
                        for w in mesh.vertex_neighbors(v) {
                            edges.insert(Simplex::edge(v, w));
                        }
                    }
                    for e in edges {
                        push(&mut heap, pass, mm, e, tick);
                    }
                }
                Outcome::RejectedLink => stats.rejected_link += 1,
                Outcome::RejectedInvariant => stats.rejected_invariant += 1,
                Outcome::RejectedOther(_) => stats.rejected_other += 1,
            }
        }
        stats
    }
}

fn push<T: Scalar>(heap: &mut BinaryHeap<Entry>, pass: &mut Pass<'_, T>, mm: &MultiMesh<T>, e: Simplex, stamp: u64) {
    let [a, b] = [e.vertices()[0], e.vertices()[1]];
    if let Some(cand) = (pass.propose)(mm, a, b) {
        heap.push(Entry { cand, edge: e, stamp });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::Invariant;
    use crate::mesh::Mesh;
    use crate::ops::Placement;
    use crate::shapes;

    fn edge_length(mm: &MultiMesh<f64>, n: NodeId, a: VertexId, b: VertexId) -> f64 {
        let m = mm.mesh(n);
        crate::geometry::dist2(m.position(a).unwrap(), m.position(b).unwrap()).sqrt()
    }

    fn shortest_collapse(target: usize) -> Pass<'static, f64> {
        Pass::new(NodeId(0), |mm, a, b| {
            Some(Candidate {
                score: edge_length(mm, NodeId(0), a, b),
                op: EdgeOp::Collapse(Placement::Midpoint),
                a,
                b,
            })
        })
        .with_stop(move |mm| mm.mesh(NodeId(0)).num_facets() <= target)
    }

    #[test]
    fn empty_mesh_gives_zero_statistics() {
        let mut mm = MultiMesh::new(Mesh::<f64>::empty(2).unwrap());
        let mut s = Scheduler::new(InvariantSet::new());
        assert_eq!(s.run_pass(&mut mm, &mut shortest_collapse(0)), PassStats::default());
    }

    #[test]
    fn shortest_edge_collapse_halves_icosphere() {
        let mut mm = MultiMesh::new(shapes::icosphere::<f64>(2));
        let f = mm.mesh(mm.root()).num_facets();
        let mut s = Scheduler::new(InvariantSet::new());
        let stats = s.run_pass(&mut mm, &mut shortest_collapse(f / 2));
        assert!(stats.accepted > 0);
        assert!(stats.is_consistent());
        // one collapse removes two triangles
        assert!(mm.mesh(mm.root()).num_facets() <= f / 2 + 2);
        assert!(mm.validate().is_valid());
    }

    #[test]
    fn failing_invariant_rejects_everything() {
        let mut mm = MultiMesh::new(shapes::icosphere::<f64>(1));
        let before = mm.clone();
        let mut set = InvariantSet::new();
        set.register(Invariant::new("never", NodeId(0), Phase::After, |_, _| false));
        let mut s = Scheduler::new(set);
        let stats = s.run_pass(&mut mm, &mut shortest_collapse(0));
        assert_eq!(stats.accepted, 0);
        assert!(stats.rejected_invariant > 0);
        assert!(stats.is_consistent());
        for n in mm.node_ids() {
            assert_eq!(mm.mesh(n).facets().collect::<Vec<_>>(), before.mesh(n).facets().collect::<Vec<_>>());
            assert_eq!(mm.mesh(n).vertex_attributes(), before.mesh(n).vertex_attributes());
        }
    }

    #[test]
    fn passes_are_deterministic() {
        let run = || {
            let mut mm = MultiMesh::new(shapes::icosphere::<f64>(2));
            let mut log = Vec::new();
            let mut s = Scheduler::new(InvariantSet::new());
            s.observe(|_, p| log.push(p.ops[0].record.edge));
            s.run_pass(&mut mm, &mut shortest_collapse(100));
            drop(s);
            log
        };
        let first = run();
        assert!(!first.is_empty());
        assert_eq!(first, run());
    }

    #[test]
    fn inverting_move_is_rolled_back() {
        let mut m: Mesh<f64> = Mesh::new(3, 5, &[[0u32, 1, 2, 3], [4, 1, 3, 2]]).unwrap();
        let p = vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        m.add_vertex_attribute(crate::mesh::POSITION, 3, p).unwrap();
        let mut mm = MultiMesh::new(m);
        let mut set = InvariantSet::new();
        set.register(Invariant::positive_volume(NodeId(0)));
        let mut s = Scheduler::new(set);
        let before = mm.mesh(NodeId(0)).vertex_attributes().to_vec();
        let bad = vec![(NodeId(0), VertexId(1), vec![-0.1, 0.0, 0.0])];
        assert!(!s.try_move(&mut mm, crate::mesh::POSITION, &bad));
        assert_eq!(mm.mesh(NodeId(0)).vertex_attributes(), before.as_slice());
        let good = vec![(NodeId(0), VertexId(1), vec![0.9, 0.05, 0.0])];
        assert!(s.try_move(&mut mm, crate::mesh::POSITION, &good));
        assert_eq!(mm.mesh(NodeId(0)).position(VertexId(1)).unwrap(), &[0.9, 0.05, 0.0]);
    }
}
