use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{edge_length, flip_gain, RemeshStats};
use crate::envelope::Envelope;
use crate::error::MeshError;
use crate::geometry::{cross, dot, sub};
use crate::invariants::{Invariant, InvariantSet};
use crate::mesh::{Mesh, POSITION};
use crate::multimesh::{EdgeOp, MultiMesh, NodeId};
use crate::ops::{opposite_vertices, Placement};
use crate::scalar::Scalar;
use crate::scheduler::{Candidate, Pass, Scheduler};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddedParams {
    pub target_length: f64,
    pub iterations: usize,
    /// Envelope tolerance around the input surface; infinite disables it.
    pub envelope_eps: f64,
    pub smoothing_weight: f64,
    pub seed: u64,
}

impl EmbeddedParams {
    pub fn new(target_length: f64) -> Self {
        EmbeddedParams {
            target_length,
            iterations: 5,
            envelope_eps: f64::INFINITY,
            smoothing_weight: 0.5,
            seed: 0,
        }
    }
}

/// Tet mesh as root with its boundary triangles as the `surface` child.
pub fn embedded_multimesh<T: Scalar>(tets: Mesh<T>) -> Result<(MultiMesh<T>, NodeId), MeshError> {
    if tets.dim() != 3 {
        return Err(MeshError::Dimension(tets.dim()));
    }
    let boundary = tets.boundary_faces();
    let mut mm = MultiMesh::new(tets);
    let surface = mm.add_child_from_tags(mm.root(), "surface", 2, &boundary)?;
    Ok((mm, surface))
}

/// Positive tet volumes on the root, plus the envelope around the current
/// surface when `eps` is finite.
pub fn embedded_scheduler<'a, T: Scalar>(mm: &MultiMesh<T>, surface: NodeId, eps: f64) -> Result<Scheduler<'a, T>, MeshError> {
    let mut set = InvariantSet::new();
    set.register(Invariant::positive_volume(mm.root()));
    if eps.is_finite() {
        set.register(Invariant::envelope(surface, Envelope::from_mesh(mm.mesh(surface), eps)?));
    }
    Ok(Scheduler::new(set))
}

/// Isotropic remeshing of the surface child; every operation is carried
/// out on the tet mesh as well.
pub fn embedded_remesh<T: Scalar>(
    mm: &mut MultiMesh<T>,
    surface: NodeId,
    params: &EmbeddedParams,
    sched: &mut Scheduler<'_, T>,
) -> Result<RemeshStats, MeshError> {
    let reference = Envelope::from_mesh(mm.mesh(surface), params.envelope_eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let hi = params.target_length * 4.0 / 3.0;
    let lo = params.target_length * 4.0 / 5.0;
    let mut stats = RemeshStats::default();
    for _ in 0..params.iterations {
        let mut split = Pass::new(surface, move |mm: &MultiMesh<T>, a, b| {
            let len = edge_length(mm.mesh(surface), a, b);
            (len > hi).then_some(Candidate {
                score: -len,
                op: EdgeOp::Split(Placement::Midpoint),
                a,
                b,
            })
        });
        stats.split.merge(&sched.run_pass(mm, &mut split));

        let mut collapse = Pass::new(surface, move |mm: &MultiMesh<T>, a, b| {
            let m = mm.mesh(surface);
            let len = edge_length(m, a, b);
            (len < lo && collapse_keeps_short(m, a, b, hi)).then_some(Candidate {
                score: len,
                op: EdgeOp::Collapse(Placement::Midpoint),
                a,
                b,
            })
        });
        stats.collapse.merge(&sched.run_pass(mm, &mut collapse));

        let mut swap = Pass::new(surface, move |mm: &MultiMesh<T>, a, b| {
            let gain = valence_gain(mm.mesh(surface), a, b)?;
            (gain > 0).then_some(Candidate {
                score: -(gain as f64),
                op: EdgeOp::Swap,
                a,
                b,
            })
        });
        stats.swap.merge(&sched.run_pass(mm, &mut swap));

        smooth(mm, surface, params.smoothing_weight, &reference, &mut rng, sched, &mut stats);
        stats.iterations += 1;
    }
    Ok(stats)
}

/// Whether collapsing `{a, b}` to its midpoint keeps every edge at the
/// merged vertex no longer than `hi`.
pub(super) fn collapse_keeps_short<T: Scalar>(m: &Mesh<T>, a: VertexId, b: VertexId, hi: f64) -> bool {
    let (Some(pa), Some(pb)) = (m.position(a), m.position(b)) else {
        return false;
    };
    let mid: Vec<T> = pa.iter().zip(pb).map(|(&x, &y)| (x + y) * T::half()).collect();
    m.vertex_neighbors(a)
        .into_iter()
        .chain(m.vertex_neighbors(b))
        .filter(|&w| w != a && w != b)
        .all(|w| crate::geometry::dist2(&mid, m.position(w).unwrap()).as_f64().sqrt() <= hi)
}

/// Valence improvement of flipping interior edge `{a, b}` of a triangle
/// mesh; boundary vertices aim at valence 4.
pub(super) fn valence_gain<T: Scalar>(m: &Mesh<T>, a: VertexId, b: VertexId) -> Option<i64> {
    let e = Simplex::edge(a, b);
    let opp = opposite_vertices(m, &e);
    if m.dim() != 2 || opp.len() != 2 || m.contains_simplex(&Simplex::edge(opp[0], opp[1])) {
        return None;
    }
    let ring = [a, b, opp[0], opp[1]];
    let deg = ring.map(|v| m.vertex_neighbors(v).len());
    if deg[0] <= 3 || deg[1] <= 3 {
        return None;
    }
    let target = ring.map(|v| if m.is_on_boundary(&Simplex::vertex(v)) { 4 } else { 6 });
    Some(flip_gain(deg, target))
}

fn smooth<T: Scalar>(
    mm: &mut MultiMesh<T>,
    surface: NodeId,
    weight: f64,
    reference: &Envelope,
    rng: &mut ChaCha8Rng,
    sched: &mut Scheduler<'_, T>,
    stats: &mut RemeshStats,
) {
    let root = mm.root();
    let mut order: Vec<VertexId> = mm.mesh(surface).vertices().collect();
    order.shuffle(rng);
    for v in order {
        let Some(target) = tangential_target(mm, surface, v, weight) else { continue };
        let p = reference.closest_point(target);
        let p: Vec<T> = p.iter().map(|&x| T::of(x)).collect();
        let image = mm.map(surface).expect("surface map").image_of(v);
        let moves = [(root, image, p.clone()), (surface, v, p)];
        if sched.try_move(mm, POSITION, &moves) {
            stats.moves_accepted += 1;
        } else {
            stats.moves_rejected += 1;
        }
    }
}

/// `p + w (I - n nᵀ)(c - p)` with `c` the neighbour centroid and `n` the
/// area-weighted outward normal.
fn tangential_target<T: Scalar>(mm: &MultiMesh<T>, surface: NodeId, v: VertexId, w: f64) -> Option<[f64; 3]> {
    let m = mm.mesh(surface);
    let p3 = |u: VertexId| m.position3(u).map(|p| p.map(|x| x.as_f64()));
    let p = p3(v)?;
    let nbrs = m.vertex_neighbors(v);
    if nbrs.is_empty() {
        return None;
    }
    let mut c = [0.0; 3];
    for &u in &nbrs {
        let q = p3(u)?;
        for i in 0..3 {
            c[i] += q[i] / nbrs.len() as f64;
        }
    }
    let mut n = [0.0; 3];
    for &f in m.vertex_facets(v) {
        let fn_ = outward_normal(mm, surface, f)?;
        for i in 0..3 {
            n[i] += fn_[i];
        }
    }
    let len = dot(&n, &n).sqrt();
    let d = sub(&c, &p);
    let t = if len > 0.0 {
        let n = n.map(|x| x / len);
        let k = dot(&d, &n);
        [d[0] - k * n[0], d[1] - k * n[1], d[2] - k * n[2]]
    } else {
        d
    };
    Some([p[0] + w * t[0], p[1] + w * t[1], p[2] + w * t[2]])
}

/// Area-weighted normal of a surface triangle pointing away from the tet
/// behind it.
fn outward_normal<T: Scalar>(mm: &MultiMesh<T>, surface: NodeId, f: crate::simplex::FacetId) -> Option<[f64; 3]> {
    let m = mm.mesh(surface);
    let root = mm.mesh(mm.root());
    let map = mm.map(surface)?;
    let vs = m.facet_vertices(f);
    let pts: Vec<[f64; 3]> = vs.iter().map(|&u| m.position3(u).map(|p| p.map(|x| x.as_f64()))).collect::<Option<_>>()?;
    let mut n = cross(&sub(&pts[1], &pts[0]), &sub(&pts[2], &pts[0]));
    let img = map.map_simplex(&m.facet_simplex(f))?;
    let tet = *root.facets_containing(&img).first()?;
    let o = *root.facet_vertices(tet).iter().find(|u| !img.contains(**u))?;
    let po = root.position3(o)?.map(|x| x.as_f64());
    if dot(&n, &sub(&po, &pts[0])) > 0.0 {
        n = n.map(|x| -x);
    }
    Some(n.map(|x| x * 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::mean_edge_length;
    use crate::invariants::positive_volume;
    use crate::shapes;

    #[test]
    fn infinite_length_means_no_splits() {
        let (mut mm, surface) = embedded_multimesh(shapes::tet_cube::<f64>(3, true)).unwrap();
        let mut sched = embedded_scheduler(&mm, surface, f64::INFINITY).unwrap();
        let mut params = EmbeddedParams::new(f64::INFINITY);
        params.iterations = 1;
        let stats = embedded_remesh(&mut mm, surface, &params, &mut sched).unwrap();
        assert_eq!(stats.split.attempted, 0);
        assert_eq!(positive_volume(mm.mesh(mm.root())), Ok(true));
    }

    #[test]
    fn small_ball_remesh_stays_valid() {
        let (mut mm, surface) = embedded_multimesh(shapes::tet_cube::<f64>(4, true)).unwrap();
        let l = mean_edge_length(mm.mesh(surface));
        let mut sched = embedded_scheduler(&mm, surface, 0.05).unwrap();
        let mut params = EmbeddedParams::new(l);
        params.iterations = 2;
        let stats = embedded_remesh(&mut mm, surface, &params, &mut sched).unwrap();
        assert!(stats.total().accepted > 0 && stats.total().is_consistent());
        assert_eq!(positive_volume(mm.mesh(mm.root())), Ok(true));
        assert!(mm.validate().is_valid());
        let map = mm.map(surface).unwrap();
        for v in mm.mesh(surface).vertices() {
            assert_eq!(mm.mesh(surface).position(v), mm.mesh(mm.root()).position(map.image_of(v)));
        }
    }
}
