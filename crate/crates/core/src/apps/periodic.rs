use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::embedded::{collapse_keeps_short, valence_gain};
use super::{edge_length, RemeshStats};
use crate::error::MeshError;
use crate::invariants::{Invariant, InvariantSet, Phase};
use crate::mesh::{Mesh, POSITION};
use crate::multimesh::{EdgeOp, MultiMesh, NodeId};
use crate::ops::Placement;
use crate::scalar::Scalar;
use crate::scheduler::{Candidate, Pass, Scheduler};
use crate::simplex::{FacetId, Simplex, VertexId};

const LEFT: u8 = 1;
const RIGHT: u8 = 2;
const BOTTOM: u8 = 4;
const TOP: u8 = 8;

/// Axis-aligned periodic tile `[origin, origin + period]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tile {
    pub origin: [f64; 2],
    pub period: [f64; 2],
    pub tol: f64,
}

impl Tile {
    /// Tile spanned by the bounding box of a mesh's 2D positions.
    pub fn of_mesh<T: Scalar>(m: &Mesh<T>, period: [f64; 2], tol: f64) -> Result<Self, MeshError> {
        if m.position_width() != Some(2) {
            return Err(MeshError::MissingAttribute(POSITION.into()));
        }
        let mut origin = [f64::INFINITY; 2];
        for v in m.vertices() {
            let p = m.position(v).unwrap();
            origin[0] = origin[0].min(p[0].as_f64());
            origin[1] = origin[1].min(p[1].as_f64());
        }
        Ok(Tile { origin, period, tol })
    }

    /// Bit set of the tile sides a point lies on.
    fn sides(&self, p: [f64; 2]) -> u8 {
        let near = |x: f64, y: f64| (x - y).abs() <= self.tol;
        let mut s = 0;
        if near(p[0], self.origin[0]) {
            s |= LEFT;
        }
        if near(p[0], self.origin[0] + self.period[0]) {
            s |= RIGHT;
        }
        if near(p[1], self.origin[1]) {
            s |= BOTTOM;
        }
        if near(p[1], self.origin[1] + self.period[1]) {
            s |= TOP;
        }
        s
    }

    fn sides_of<T: Scalar>(&self, m: &Mesh<T>, v: VertexId) -> u8 {
        self.sides(pos2(m, v))
    }
}

fn pos2<T: Scalar>(m: &Mesh<T>, v: VertexId) -> [f64; 2] {
    let p = m.position(v).expect("2D positions");
    [p[0].as_f64(), p[1].as_f64()]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicParams {
    pub target_length: f64,
    pub iterations: usize,
    pub smoothing_weight: f64,
    pub seed: u64,
}

impl PeriodicParams {
    pub fn new(target_length: f64) -> Self {
        PeriodicParams {
            target_length,
            iterations: 5,
            smoothing_weight: 0.5,
            seed: 0,
        }
    }
}

/// Torus root obtained by identifying opposite sides of `tile`, with the
/// tile itself as the child `tile`. The root carries connectivity only.
pub fn periodic_multimesh<T: Scalar>(tile: Mesh<T>, period: [f64; 2], tol: f64) -> Result<(MultiMesh<T>, NodeId, Tile), MeshError> {
    if tile.dim() != 2 {
        return Err(MeshError::Dimension(tile.dim()));
    }
    let tile = tile.compacted().0;
    let geom = Tile::of_mesh(&tile, period, tol)?;
    let n = tile.vertex_capacity();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let verts: Vec<VertexId> = tile.vertices().collect();
    for (from, to, axis) in [(LEFT, RIGHT, 0usize), (BOTTOM, TOP, 1)] {
        for &v in &verts {
            let s = geom.sides_of(&tile, v);
            if s & (from | to) == 0 {
                continue;
            }
            let p = pos2(&tile, v);
            let mut q = p;
            q[axis] += if s & from != 0 { period[axis] } else { -period[axis] };
            let twin = verts.iter().copied().find(|&w| {
                let r = pos2(&tile, w);
                (r[0] - q[0]).abs() <= tol && (r[1] - q[1]).abs() <= tol
            });
            let Some(w) = twin else {
                return Err(MeshError::Construction {
                    witness: Simplex::vertex(v),
                    reason: "boundary vertex has no periodic partner".into(),
                });
            };
            let (a, b) = (find(&mut parent, v.index()), find(&mut parent, w.index()));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut class = vec![u32::MAX; n];
    let mut count = 0u32;
    for &v in &verts {
        let r = find(&mut parent, v.index());
        if class[r] == u32::MAX {
            class[r] = count;
            count += 1;
        }
        class[v.index()] = class[r];
    }
    let facets: Vec<Vec<u32>> = tile
        .facets()
        .map(|f| tile.facet_vertices(f).iter().map(|v| class[v.index()]).collect())
        .collect();
    let root: Mesh<T> = Mesh::new(2, count as usize, &facets)?;
    let report = root.validate();
    if let Some(bad) = report.violations.first() {
        return Err(MeshError::Construction {
            witness: bad.witness,
            reason: format!("identified tile is not a valid torus: {report}"),
        });
    }
    let pairs: Vec<(FacetId, FacetId)> = tile.facets().zip(root.facets()).collect();
    let mut mm = MultiMesh::new(root);
    let node = mm.add_child_from_bijection(mm.root(), "tile", tile, &pairs)?;
    Ok((mm, node, geom))
}

/// Whether every boundary vertex lies on a tile side and opposite sides
/// carry the same vertices up to the period translation.
pub fn tile_congruent<T: Scalar>(m: &Mesh<T>, tile: &Tile) -> bool {
    let mut on: [Vec<[f64; 2]>; 4] = Default::default();
    for e in m.boundary_faces() {
        for &v in e.vertices() {
            let s = tile.sides_of(m, v);
            if s == 0 {
                return false;
            }
            for (i, side) in [LEFT, RIGHT, BOTTOM, TOP].into_iter().enumerate() {
                if s & side != 0 {
                    on[i].push(pos2(m, v));
                }
            }
        }
    }
    for side in &mut on {
        side.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        side.dedup();
    }
    let matches = |from: &[[f64; 2]], to: &[[f64; 2]], shift: [f64; 2]| {
        from.iter().all(|p| {
            to.iter()
                .any(|q| (p[0] + shift[0] - q[0]).abs() <= tile.tol && (p[1] + shift[1] - q[1]).abs() <= tile.tol)
        })
    };
    let [px, py] = tile.period;
    matches(&on[0], &on[1], [px, 0.0])
        && matches(&on[1], &on[0], [-px, 0.0])
        && matches(&on[2], &on[3], [0.0, py])
        && matches(&on[3], &on[2], [0.0, -py])
}

/// No inverted tile triangles and a tileable boundary.
pub fn periodic_scheduler<'a, T: Scalar>(tile_node: NodeId, tile: Tile) -> Scheduler<'a, T> {
    let mut set = InvariantSet::new();
    set.register(Invariant::no_uv_inversion(tile_node));
    set.register(Invariant::new("tile_congruence", tile_node, Phase::After, move |m, _| {
        tile_congruent(m, &tile)
    }));
    Scheduler::new(set)
}

/// Collapse for tile edge `{a, b}` that keeps the tile outline: side
/// vertices stay in place, corners never move, and edges joining two
/// different sides are left alone.
fn periodic_collapse<T: Scalar>(m: &Mesh<T>, tile: &Tile, a: VertexId, b: VertexId) -> Option<(EdgeOp, VertexId, VertexId)> {
    let (sa, sb) = (tile.sides_of(m, a), tile.sides_of(m, b));
    let corner = |s: u8| s.count_ones() > 1;
    let keep = EdgeOp::Collapse(Placement::Keep);
    match (sa, sb) {
        (0, 0) => Some((EdgeOp::Collapse(Placement::Midpoint), a, b)),
        (_, 0) => Some((keep, a, b)),
        (0, _) => Some((keep, b, a)),
        _ if sa & sb == 0 || !m.is_boundary_face(&Simplex::edge(a, b)) => None,
        _ if corner(sa) && corner(sb) => None,
        _ if corner(sa) => Some((keep, a, b)),
        _ if corner(sb) => Some((keep, b, a)),
        _ => Some((EdgeOp::Collapse(Placement::Midpoint), a, b)),
    }
}

/// Isotropic remeshing driven on the tile; boundary edges are split and
/// collapsed together with their periodic twins through the torus root.
pub fn periodic2d_remesh<T: Scalar>(
    mm: &mut MultiMesh<T>,
    tile_node: NodeId,
    tile: &Tile,
    params: &PeriodicParams,
    sched: &mut Scheduler<'_, T>,
) -> Result<RemeshStats, MeshError> {
    let tile = *tile;
    let root = mm.root();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let hi = params.target_length * 4.0 / 3.0;
    let lo = params.target_length * 4.0 / 5.0;
    let mut stats = RemeshStats::default();
    for _ in 0..params.iterations {
        let mut split = Pass::new(tile_node, move |mm: &MultiMesh<T>, a, b| {
            let len = edge_length(mm.mesh(tile_node), a, b);
            (len > hi).then_some(Candidate {
                score: -len,
                op: EdgeOp::Split(Placement::Midpoint),
                a,
                b,
            })
        });
        stats.split.merge(&sched.run_pass(mm, &mut split));

        let mut collapse = Pass::new(tile_node, move |mm: &MultiMesh<T>, a, b| {
            let m = mm.mesh(tile_node);
            let len = edge_length(m, a, b);
            if len >= lo || !collapse_keeps_short(m, a, b, hi) {
                return None;
            }
            let (op, a, b) = periodic_collapse(m, &tile, a, b)?;
            Some(Candidate { score: len, op, a, b })
        });
        stats.collapse.merge(&sched.run_pass(mm, &mut collapse));

        let mut swap = Pass::new(tile_node, move |mm: &MultiMesh<T>, a, b| {
            let m = mm.mesh(tile_node);
            if m.is_on_boundary(&Simplex::edge(a, b)) {
                return None;
            }
            let map = mm.map(tile_node)?;
            let (ra, rb) = (map.image_of(a), map.image_of(b));
            if map.preimage_edges(m, ra, rb).len() != 1 {
                return None;
            }
            let gain = valence_gain(mm.mesh(root), ra, rb)?;
            (gain > 0).then_some(Candidate {
                score: -(gain as f64),
                op: EdgeOp::Swap,
                a,
                b,
            })
        });
        stats.swap.merge(&sched.run_pass(mm, &mut swap));

        let mut order: Vec<VertexId> = mm
            .mesh(tile_node)
            .vertices()
            .filter(|&v| tile.sides_of(mm.mesh(tile_node), v) == 0)
            .collect();
        order.shuffle(&mut rng);
        for v in order {
            let m = mm.mesh(tile_node);
            let nbrs = m.vertex_neighbors(v);
            if nbrs.is_empty() {
                continue;
            }
            let p = pos2(m, v);
            let mut c = [0.0; 2];
            for &u in &nbrs {
                let q = pos2(m, u);
                c[0] += q[0] / nbrs.len() as f64;
                c[1] += q[1] / nbrs.len() as f64;
            }
            let w = params.smoothing_weight;
            let target = vec![T::of(p[0] + w * (c[0] - p[0])), T::of(p[1] + w * (c[1] - p[1]))];
            if sched.try_move(mm, POSITION, &[(tile_node, v, target)]) {
                stats.moves_accepted += 1;
            } else {
                stats.moves_rejected += 1;
            }
        }
        stats.iterations += 1;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn square_tile_gives_a_torus() {
        let (mm, tile, _) = periodic_multimesh(shapes::grid::<f64>(3, 3, 1.0, 1.0), [1.0, 1.0], 1e-9).unwrap();
        let root = mm.mesh(mm.root());
        assert_eq!(root.euler_characteristic(), 0);
        assert!(root.boundary_faces().is_empty());
        assert_eq!(root.num_facets(), mm.mesh(tile).num_facets());
        assert_eq!(root.num_vertices(), 9);
    }

    #[test]
    fn unmatched_boundary_vertex_is_rejected() {
        let mut m: Mesh<f64> = shapes::grid(3, 3, 1.0, 1.0);
        let v = m.vertices().find(|&v| m.position(v).unwrap() == [1.0, 1.0 / 3.0]).unwrap();
        m.set_position(v, &[1.0, 0.4]).unwrap();
        let err = periodic_multimesh(m, [1.0, 1.0], 1e-9).unwrap_err();
        assert!(matches!(err, MeshError::Construction { .. }));
    }

    #[test]
    fn left_split_mirrors_on_the_right() {
        let (mut mm, tile_node, tile) = periodic_multimesh(shapes::grid::<f64>(3, 3, 1.0, 1.0), [1.0, 1.0], 1e-9).unwrap();
        let m = mm.mesh(tile_node);
        let at = |x: f64, y: f64| m.vertices().find(|&v| m.position(v).unwrap() == [x, y]).unwrap();
        let (a, b) = (at(0.0, 1.0 / 3.0), at(0.0, 2.0 / 3.0));
        let prop = mm.split_edge(tile_node, a, b).unwrap();
        assert_eq!(prop.records(tile_node).count(), 2);
        let m = mm.mesh(tile_node);
        let mid = 0.5 * (1.0 / 3.0 + 2.0 / 3.0);
        for x in [0.0, 1.0] {
            assert!(m.vertices().any(|v| m.position(v).unwrap() == [x, mid]));
        }
        assert!(tile_congruent(m, &tile));
        assert_eq!(mm.mesh(mm.root()).euler_characteristic(), 0);
    }

    #[test]
    fn coarsening_keeps_tile_and_torus() {
        let (mut mm, tile_node, tile) = periodic_multimesh(shapes::grid::<f64>(8, 8, 1.0, 1.0), [1.0, 1.0], 1e-9).unwrap();
        let mut sched = periodic_scheduler(tile_node, tile);
        let mut params = PeriodicParams::new(0.25);
        params.iterations = 3;
        let stats = periodic2d_remesh(&mut mm, tile_node, &tile, &params, &mut sched).unwrap();
        assert!(stats.collapse.accepted > 0);
        assert!(tile_congruent(mm.mesh(tile_node), &tile));
        assert_eq!(mm.mesh(mm.root()).euler_characteristic(), 0);
        assert_eq!(mm.mesh(mm.root()).num_facets(), mm.mesh(tile_node).num_facets());
        assert!(mm.validate().is_valid());
    }
}
