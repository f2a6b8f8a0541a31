//! Random multimesh generator and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use multimesh::mesh::POSITION;
use multimesh::ops::{collapse_unchecked, edge_collapse, edge_split, swap, Placement};
use multimesh::shapes;
use multimesh::{EdgeOp, FacetId, Mesh, MultiMesh, NodeId, Simplex, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Random valid 2- or 3-mesh with at most `max_facets` facets.
pub fn random_root(rng: &mut Rng8, dim: usize, max_facets: usize) -> Mesh<f64> {
    loop {
        let mut m = base_shape(rng, dim);
        remove_random_facets(rng, &mut m);
        randomize(rng, &mut m, 12);
        if m.num_facets() > 0 && m.num_facets() <= max_facets && m.validate().is_valid() {
            return m.compacted().0;
        }
    }
}

fn base_shape(rng: &mut Rng8, dim: usize) -> Mesh<f64> {
    if dim == 3 {
        let n = if rng.gen_bool(0.5) { 1 } else { 2 };
        return shapes::tet_cube(n, false);
    }
    match rng.gen_range(0..4) {
        0 => shapes::grid(rng.gen_range(1..5), rng.gen_range(1..4), 1.0, 1.0),
        1 => shapes::icosphere(0),
        2 => shapes::torus_uv(rng.gen_range(3..6), rng.gen_range(3..5), 2.0, 0.7).positions,
        _ => {
            // annulus: grid with the central quad removed
            let m: Mesh<f64> = shapes::grid(3, 3, 1.0, 1.0);
            let keep: Vec<FacetId> = m.facets().filter(|&f| !is_centre(&m, f)).collect();
            submesh(&m, &keep)
        }
    }
}

fn is_centre(m: &Mesh<f64>, f: FacetId) -> bool {
    m.facet_vertices(f).iter().all(|&v| {
        let p = m.position(v).unwrap();
        (0.3..=0.7).contains(&p[0]) && (0.3..=0.7).contains(&p[1])
    })
}

/// Mesh made of the listed facets only (vertex ids kept, unused ones dead
/// after compaction).
pub fn submesh(m: &Mesh<f64>, keep: &[FacetId]) -> Mesh<f64> {
    let facets: Vec<Vec<u32>> = keep
        .iter()
        .map(|&f| m.facet_vertices(f).iter().map(|v| v.0).collect())
        .collect();
    let used: BTreeSet<u32> = facets.iter().flatten().copied().collect();
    let remap: BTreeMap<u32, u32> = used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let facets: Vec<Vec<u32>> = facets.iter().map(|f| f.iter().map(|v| remap[v]).collect()).collect();
    let mut out = Mesh::new(m.dim(), used.len(), &facets).unwrap();
    if let Some(w) = m.position_width() {
        let data = used
            .iter()
            .flat_map(|&v| m.position(VertexId(v)).unwrap().to_vec())
            .collect();
        out.add_vertex_attribute(POSITION, w, data).unwrap();
    }
    out
}

fn remove_random_facets(rng: &mut Rng8, m: &mut Mesh<f64>) {
    let k = rng.gen_range(0..3);
    for _ in 0..k {
        let facets: Vec<FacetId> = m.facets().collect();
        let f = *facets.choose(rng).unwrap();
        let keep: Vec<FacetId> = facets.into_iter().filter(|&g| g != f).collect();
        let cand = submesh(m, &keep);
        if cand.num_facets() > 0 && cand.validate().is_valid() {
            *m = cand;
        }
    }
}

/// Random accepted single-mesh operations.
pub fn randomize(rng: &mut Rng8, m: &mut Mesh<f64>, steps: usize) {
    for _ in 0..steps {
        let edges = m.edges();
        let e = *edges.choose(rng).unwrap();
        let [a, b] = [e.vertices()[0], e.vertices()[1]];
        let _ = match rng.gen_range(0..3) {
            0 if m.num_facets() < 60 => edge_split(m, a, b, Placement::Midpoint).map(|_| ()),
            1 if m.num_facets() > 4 => edge_collapse(m, a, b, Placement::Midpoint).map(|_| ()),
            _ => swap(m, a, b).map(|_| ()),
        };
    }
}

/// Random connected facet subset grown by breadth-first search.
pub fn facet_patch(rng: &mut Rng8, m: &Mesh<f64>) -> Vec<Simplex> {
    let facets: Vec<FacetId> = m.facets().collect();
    let start = *facets.choose(rng).unwrap();
    let target = rng.gen_range(1..=facets.len().max(1));
    let mut seen = BTreeSet::from([start]);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        if seen.len() >= target {
            break;
        }
        let mut adj = m.adjacent_facets(f);
        adj.shuffle(rng);
        for g in adj {
            if seen.len() < target && seen.insert(g) {
                queue.push_back(g);
            }
        }
    }
    seen.into_iter().map(|f| m.facet_simplex(f)).collect()
}

/// Random simple edge path (or cycle) following mesh edges.
pub fn edge_path(rng: &mut Rng8, m: &Mesh<f64>) -> Vec<Simplex> {
    let verts: Vec<VertexId> = m.vertices().collect();
    let mut cur = *verts.choose(rng).unwrap();
    let start = cur;
    let len = rng.gen_range(1..9);
    let mut visited = BTreeSet::from([cur]);
    let mut edges = Vec::new();
    for _ in 0..len {
        let nbrs: Vec<VertexId> = m.vertex_neighbors(cur).into_iter().filter(|v| !visited.contains(v)).collect();
        let Some(&next) = nbrs.choose(rng) else { break };
        edges.push(Simplex::edge(cur, next));
        visited.insert(next);
        cur = next;
    }
    if edges.len() >= 2 && rng.gen_bool(0.3) && m.contains_simplex(&Simplex::edge(cur, start)) {
        edges.push(Simplex::edge(cur, start));
    }
    edges
}

/// Child whose facets pair with the parent's, with vertices duplicated
/// along a random path of cut edges.
fn seam_child(rng: &mut Rng8, m: &Mesh<f64>) -> Option<(Mesh<f64>, Vec<(FacetId, FacetId)>)> {
    if m.dim() != 2 {
        return None;
    }
    let cuts: BTreeSet<Simplex> = edge_path(rng, m).into_iter().collect();
    let facets: Vec<FacetId> = m.facets().collect();
    let index: BTreeMap<FacetId, usize> = facets.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut corner_vertex: BTreeMap<(FacetId, VertexId), u32> = BTreeMap::new();
    let mut next = 0u32;
    let mut positions = Vec::new();
    for v in m.vertices() {
        let star = m.vertex_facets(v).to_vec();
        let mut class: BTreeMap<FacetId, FacetId> = star.iter().map(|&f| (f, f)).collect();
        fn root(c: &BTreeMap<FacetId, FacetId>, mut f: FacetId) -> FacetId {
            while c[&f] != f {
                f = c[&f];
            }
            f
        }
        for (i, &f) in star.iter().enumerate() {
            for &g in &star[i + 1..] {
                let shared: Vec<VertexId> = m
                    .facet_vertices(f)
                    .iter()
                    .copied()
                    .filter(|x| m.facet_vertices(g).contains(x))
                    .collect();
                if shared.len() == 2 && !cuts.contains(&Simplex::new(&shared).unwrap()) {
                    let (rf, rg) = (root(&class, f), root(&class, g));
                    if rf != rg {
                        class.insert(rf.max(rg), rf.min(rg));
                    }
                }
            }
        }
        let mut ids: BTreeMap<FacetId, u32> = BTreeMap::new();
        for &f in &star {
            let r = root(&class, f);
            let id = *ids.entry(r).or_insert_with(|| {
                next += 1;
                positions.extend(m.position(v).unwrap().iter().copied());
                next - 1
            });
            corner_vertex.insert((f, v), id);
        }
    }
    let child_facets: Vec<Vec<u32>> = facets
        .iter()
        .map(|&f| m.facet_vertices(f).iter().map(|&v| corner_vertex[&(f, v)]).collect())
        .collect();
    let mut child = Mesh::new(2, next as usize, &child_facets).ok()?;
    child.add_vertex_attribute(POSITION, m.position_width().unwrap(), positions).ok()?;
    if !child.validate().is_valid() {
        return None;
    }
    let pairs = facets.iter().map(|&f| (FacetId(index[&f] as u32), f)).collect();
    Some((child, pairs))
}

/// Random multimesh with `1..=max_children` extra nodes below a random root.
pub fn random_multimesh(rng: &mut Rng8, max_root_facets: usize, max_children: usize) -> MultiMesh<f64> {
    let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
    let root = random_root(rng, dim, max_root_facets);
    let mut mm = MultiMesh::new(root);
    let want = rng.gen_range(1..=max_children);
    let mut attempts = 0;
    while mm.num_nodes() < want + 1 && attempts < 50 {
        attempts += 1;
        let nodes: Vec<NodeId> = mm.node_ids().filter(|&n| mm.mesh(n).dim() >= 1).collect();
        let parent = *nodes.choose(rng).unwrap();
        let pm = mm.mesh(parent).clone();
        let name = format!("n{}", mm.num_nodes());
        let _ = match rng.gen_range(0..4) {
            0 if pm.dim() >= 2 => {
                let b = pm.boundary_faces();
                if b.is_empty() {
                    continue;
                }
                mm.add_child_from_tags(parent, name, pm.dim() - 1, &b)
            }
            1 => {
                let patch = facet_patch(rng, &pm);
                mm.add_child_from_tags(parent, name, pm.dim(), &patch)
            }
            2 if pm.dim() >= 2 => {
                let path = edge_path(rng, &pm);
                if path.is_empty() {
                    continue;
                }
                mm.add_child_from_tags(parent, name, 1, &path)
            }
            _ => match seam_child(rng, &pm) {
                Some((child, pairs)) => mm.add_child_from_bijection(parent, name, child, &pairs),
                None => continue,
            },
        };
    }
    mm
}

/// Collapse `(a, b)` of `node` on a copy without any guard, then validate
/// every node and map. Every node's collapses are also replayed on the node
/// with its boundary coned to an extra vertex, which must stay valid apart
/// from the link of that extra vertex.
pub fn collapse_oracle(mm: &MultiMesh<f64>, node: NodeId, a: VertexId, b: VertexId) -> bool {
    let mut copy = mm.clone();
    let Ok(prop) = copy.propagate_unchecked(node, EdgeOp::Collapse(Placement::Keep), a, b) else {
        return false;
    };
    if !copy.validate().is_valid() {
        return false;
    }
    for n in mm.node_ids() {
        let (mut coned, apex) = mm.mesh(n).coned();
        for rec in prop.records(n) {
            let [x, y] = rec.edge;
            if collapse_unchecked(&mut coned, x, y, Placement::Keep).is_err() {
                return false;
            }
        }
        let report = coned.validate();
        if report.violations.iter().any(|v| v.witness != Simplex::vertex(apex)) {
            return false;
        }
    }
    true
}

/// All edges of all nodes as `(node, a, b)`.
pub fn all_edges(mm: &MultiMesh<f64>) -> Vec<(NodeId, VertexId, VertexId)> {
    let mut out = Vec::new();
    for n in mm.node_ids() {
        for e in mm.mesh(n).edges() {
            out.push((n, e.vertices()[0], e.vertices()[1]));
        }
    }
    out
}

/// A random propagated operation on a random node's random edge.
pub fn random_op(rng: &mut Rng8, mm: &MultiMesh<f64>) -> Option<(NodeId, EdgeOp, VertexId, VertexId)> {
    let nodes: Vec<NodeId> = mm.node_ids().filter(|&n| mm.mesh(n).num_facets() > 0 && mm.mesh(n).dim() >= 1).collect();
    let n = *nodes.choose(rng)?;
    let edges = mm.mesh(n).edges();
    let e = edges.choose(rng)?;
    let (mut a, mut b) = (e.vertices()[0], e.vertices()[1]);
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut a, &mut b);
    }
    let big = mm.mesh(mm.root()).num_facets() > 100;
    let op = match rng.gen_range(0..10) {
        0..=2 if !big => EdgeOp::Split(Placement::Midpoint),
        0..=5 => EdgeOp::Collapse(if rng.gen_bool(0.5) { Placement::Keep } else { Placement::Midpoint }),
        _ => EdgeOp::Swap,
    };
    Some((n, op, a, b))
}

/// Map invariants beyond `MultiMesh::validate`: face preservation, the
/// round trip `σ ∈ map_down(map_up(σ))`, and path independence of anchor
/// transport, on the facets of `focus` (all facets when `None`).
pub fn map_invariants(
    rng: &mut Rng8,
    mm: &MultiMesh<f64>,
    focus: Option<&BTreeMap<NodeId, BTreeSet<FacetId>>>,
) -> Vec<String> {
    let mut errs = Vec::new();
    for n in mm.node_ids() {
        let Some(p) = mm.parent(n) else { continue };
        let (child, parent, map) = (mm.mesh(n), mm.mesh(p), mm.map(n).unwrap());
        let facets: Vec<FacetId> = match focus {
            Some(f) => f.get(&n).map(|s| s.iter().copied().filter(|&x| child.is_facet_alive(x)).collect()).unwrap_or_default(),
            None => child.facets().collect(),
        };
        let mut checked = BTreeSet::new();
        for f in facets {
            let s = child.facet_simplex(f);
            let Ok(img) = mm.map_up(n, &s, p) else {
                errs.push(format!("{n}: facet {f} has no image"));
                continue;
            };
            let faces_of_img: BTreeSet<Simplex> = img.faces().into_iter().collect();
            let img_of_faces: BTreeSet<Simplex> = s.faces().iter().map(|t| mm.map_up(n, t, p).unwrap()).collect();
            if faces_of_img != img_of_faces {
                errs.push(format!("{n}: face preservation fails on {s}"));
            }
            for t in s.faces().into_iter().chain([s]) {
                if !checked.insert(t) {
                    continue;
                }
                let up = mm.map_up(n, &t, p).unwrap();
                if !mm.map_down(p, &up, n).unwrap().contains(&t) {
                    errs.push(format!("{n}: round trip fails on {t}"));
                }
            }
            let up = mm.map_up(n, &s, mm.root()).unwrap();
            if !mm.map_down(mm.root(), &up, n).unwrap().contains(&s) {
                errs.push(format!("{n}: round trip through the root fails on {s}"));
            }
            let anchor = *map.anchor(f).unwrap();
            let k = child.dim();
            for d in child.darts_of(&s).unwrap() {
                let direct = map.transport_anchor(child, parent, &d).unwrap();
                let mut cur = anchor.child;
                let mut pd = anchor.parent;
                for _ in 0..rng.gen_range(0..6) {
                    if k == 0 {
                        break;
                    }
                    let lvl = rng.gen_range(0..k);
                    cur = child.switch(&cur, lvl).unwrap();
                    pd = parent.switch(&pd, lvl).unwrap();
                }
                for lvl in cur.switch_path(&d, k) {
                    pd = parent.switch(&pd, lvl).unwrap();
                }
                if parent.dart_vertices(&pd)[..=k] != parent.dart_vertices(&direct)[..=k] {
                    errs.push(format!("{n}: transport depends on the path for {d:?}"));
                }
                let want: Vec<VertexId> = child.dart_vertices(&d).iter().map(|&v| map.image_of(v)).collect();
                if parent.dart_vertices(&direct)[..=k] != want[..] {
                    errs.push(format!("{n}: transported dart has wrong slots for {d:?}"));
                }
            }
        }
    }
    errs
}

/// Bit-level dump of connectivity, attributes, images and anchors of every
/// node, for exact before/after comparisons.
pub fn snapshot(mm: &MultiMesh<f64>) -> Vec<u64> {
    let mut out = vec![mm.generation(), mm.num_nodes() as u64];
    for n in mm.node_ids() {
        let m = mm.mesh(n);
        out.extend([m.generation(), m.vertex_capacity() as u64, m.facet_capacity() as u64]);
        for f in 0..m.facet_capacity() {
            let f = FacetId(f as u32);
            out.push(m.is_facet_alive(f) as u64);
            out.extend(m.facet_vertices(f).iter().map(|v| v.0 as u64));
        }
        for v in 0..m.vertex_capacity() {
            let v = VertexId(v as u32);
            out.push(m.is_vertex_alive(v) as u64);
            out.push(m.vertex_facets(v).len() as u64);
            out.extend(m.vertex_facets(v).iter().map(|f| f.0 as u64));
        }
        for a in m.vertex_attributes().iter().chain(m.facet_attributes()) {
            out.extend(a.name().bytes().map(u64::from));
            out.push(a.width() as u64);
            out.push(a.data().len() as u64);
            out.extend(a.data().iter().map(|x| x.to_bits()));
        }
        if let Some(map) = mm.map(n) {
            for v in 0..m.vertex_capacity() {
                out.push(map.image_of(VertexId(v as u32)).0 as u64);
            }
            for f in 0..m.facet_capacity() {
                match map.anchor(FacetId(f as u32)) {
                    Some(a) => {
                        out.push(1);
                        for d in [a.child, a.parent] {
                            out.push(d.facet.0 as u64);
                            out.extend(d.perm.iter().map(|&p| p as u64));
                        }
                    }
                    None => out.push(0),
                }
            }
        }
    }
    out
}
