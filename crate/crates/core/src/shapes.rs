//! Procedural test shapes with position attributes.

use std::collections::BTreeMap;

use crate::geometry::signed_measure;
use crate::mesh::{Mesh, POSITION};
use crate::scalar::Scalar;
use crate::simplex::FacetId;

fn with_positions<T: Scalar>(dim: usize, width: usize, pos: &[f64], facets: &[Vec<u32>]) -> Mesh<T> {
    let n = pos.len() / width;
    let mut m = Mesh::new(dim, n, facets).expect("generator builds valid facets");
    m.add_vertex_attribute(POSITION, width, pos.iter().map(|&x| T::of(x)).collect())
        .expect("fresh mesh");
    m
}

/// `nx × ny` quads over `[0, sx] × [0, sy]`, each split into two
/// counter-clockwise triangles; 2D positions.
pub fn grid<T: Scalar>(nx: usize, ny: usize, sx: f64, sy: f64) -> Mesh<T> {
    let (pos, facets) = grid_parts(nx, ny, sx, sy);
    with_positions(2, 2, &pos, &facets)
}

fn grid_parts(nx: usize, ny: usize, sx: f64, sy: f64) -> (Vec<f64>, Vec<Vec<u32>>) {
    let id = |i: usize, j: usize| (j * (nx + 1) + i) as u32;
    let mut pos = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            pos.push(sx * i as f64 / nx as f64);
            pos.push(sy * j as f64 / ny as f64);
        }
    }
    let mut facets = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                facets.push(vec![a, b, c]);
                facets.push(vec![a, c, d]);
            } else {
                facets.push(vec![a, b, d]);
                facets.push(vec![b, c, d]);
            }
        }
    }
    (pos, facets)
}

/// Unit icosphere with `level` rounds of 4-to-1 subdivision, outward facing.
pub fn icosphere<T: Scalar>(level: usize) -> Mesh<T> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pos: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut tris: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: u32, b: u32, pos: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (pos[a as usize], pos[b as usize]);
                pos.push([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0]);
                (pos.len() - 1) as u32
            })
        };
        for [a, b, c] in tris {
            let ab = midpoint(a, b, &mut pos);
            let bc = midpoint(b, c, &mut pos);
            let ca = midpoint(c, a, &mut pos);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let flat: Vec<f64> = pos
        .iter()
        .flat_map(|p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            [p[0] / r, p[1] / r, p[2] / r]
        })
        .collect();
    let facets: Vec<Vec<u32>> = tris.iter().map(|t| t.to_vec()).collect();
    with_positions(2, 3, &flat, &facets)
}

/// Kuhn triangulation of an `n³` cube grid over `[-1, 1]³` (six tets per
/// cell, positively oriented). With `ball` the points are pushed radially
/// onto the unit ball.
pub fn tet_cube<T: Scalar>(n: usize, ball: bool) -> Mesh<T> {
    let id = |i: usize, j: usize, k: usize| ((k * (n + 1) + j) * (n + 1) + i) as u32;
    let mut pos: Vec<[f64; 3]> = Vec::new();
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                let p = [i, j, k].map(|c| -1.0 + 2.0 * c as f64 / n as f64);
                pos.push(if ball { cube_to_ball(p) } else { p });
            }
        }
    }
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for p in perms {
                    let mut c = [i, j, k];
                    let mut t = vec![id(c[0], c[1], c[2])];
                    for axis in p {
                        c[axis] += 1;
                        t.push(id(c[0], c[1], c[2]));
                    }
                    let pts: Vec<Vec<f64>> = t.iter().map(|&v| pos[v as usize].to_vec()).collect();
                    if signed_measure(&pts, 3) < 0.0 {
                        t.swap(2, 3);
                    }
                    tets.push(t);
                }
            }
        }
    }
    let flat: Vec<f64> = pos.iter().flatten().copied().collect();
    with_positions(3, 3, &flat, &tets)
}

fn cube_to_ball(p: [f64; 3]) -> [f64; 3] {
    let inf = p.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let two = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    if two == 0.0 {
        return p;
    }
    let s = inf / two;
    [p[0] * s, p[1] * s, p[2] * s]
}

/// A position mesh, a UV mesh with 2D positions, and the facet pairing
/// between them (corner `j` of UV facet `i` belongs to corner `j` of
/// position facet `i`).
pub struct Textured<T> {
    pub positions: Mesh<T>,
    pub uv: Mesh<T>,
    pub pairs: Vec<(FacetId, FacetId)>,
}

fn textured<T: Scalar>(pos: &[f64], pos_tris: &[Vec<u32>], uv: &[f64], uv_tris: &[Vec<u32>]) -> Textured<T> {
    let positions = with_positions(2, 3, pos, pos_tris);
    let uvm = with_positions(2, 2, uv, uv_tris);
    let pairs = (0..pos_tris.len() as u32).map(|i| (FacetId(i), FacetId(i))).collect();
    Textured {
        positions,
        uv: uvm,
        pairs,
    }
}

/// Torus parametrised over a `nu × nv` grid with one chart whose boundary
/// runs along the two generating loops: `2 nu nv` triangles, two seam loops.
pub fn torus_uv<T: Scalar>(nu: usize, nv: usize, big_r: f64, small_r: f64) -> Textured<T> {
    let mut pos = Vec::new();
    for j in 0..nv {
        for i in 0..nu {
            let (u, v) = (
                std::f64::consts::TAU * i as f64 / nu as f64,
                std::f64::consts::TAU * j as f64 / nv as f64,
            );
            pos.extend([
                (big_r + small_r * v.cos()) * u.cos(),
                (big_r + small_r * v.cos()) * u.sin(),
                small_r * v.sin(),
            ]);
        }
    }
    let (uv, uv_tris) = grid_parts(nu, nv, 1.0, 1.0);
    let pid = |i: usize, j: usize| ((j % nv) * nu + (i % nu)) as u32;
    let pos_tris: Vec<Vec<u32>> = uv_tris
        .iter()
        .map(|t| {
            t.iter()
                .map(|&g| {
                    let (i, j) = (g as usize % (nu + 1), g as usize / (nu + 1));
                    pid(i, j)
                })
                .collect()
        })
        .collect();
    textured(&pos, &pos_tris, &uv, &uv_tris)
}

/// Cube surface over `[0, 1]³` with an `n × n` grid per face (`n` even),
/// cut along its equator into two square charts.
pub fn seam_cube<T: Scalar>(n: usize) -> Textured<T> {
    assert!(n >= 2 && n % 2 == 0, "seam cube needs an even resolution");
    let mut pos_index: BTreeMap<[i64; 3], u32> = BTreeMap::new();
    let mut pos: Vec<f64> = Vec::new();
    let mut uv_index: BTreeMap<(bool, [i64; 3]), u32> = BTreeMap::new();
    let mut uv: Vec<f64> = Vec::new();
    let mut pos_tris = Vec::new();
    let mut uv_tris = Vec::new();
    let ni = n as i64;
    // (origin, axis u, axis v) with u × v pointing outward
    let faces: [([i64; 3], [i64; 3], [i64; 3]); 6] = [
        ([0, 0, ni], [1, 0, 0], [0, 1, 0]),
        ([0, ni, 0], [1, 0, 0], [0, -1, 0]),
        ([0, 0, 0], [1, 0, 0], [0, 0, 1]),
        ([ni, 0, 0], [0, 1, 0], [0, 0, 1]),
        ([ni, ni, 0], [-1, 0, 0], [0, 0, 1]),
        ([0, ni, 0], [0, -1, 0], [0, 0, 1]),
    ];
    let half = ni / 2;
    let mut vertex = |g: [i64; 3], upper: bool| -> (u32, u32) {
        let p = *pos_index.entry(g).or_insert_with(|| {
            pos.extend(g.iter().map(|&c| c as f64 / n as f64));
            (pos.len() / 3 - 1) as u32
        });
        let q = *uv_index.entry((upper, g)).or_insert_with(|| {
            let [u, v] = cap_uv(g, ni, upper);
            uv.extend([u, v]);
            (uv.len() / 2 - 1) as u32
        });
        (p, q)
    };
    for (o, du, dv) in faces {
        let at = |i: i64, j: i64| [0, 1, 2].map(|k| o[k] + du[k] * i + dv[k] * j);
        for j in 0..ni {
            for i in 0..ni {
                let quad = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
                let zmid = quad.iter().map(|g| g[2]).sum::<i64>();
                let upper = zmid > 4 * half;
                let tris = if (i + j) % 2 == 0 {
                    [[0, 1, 2], [0, 2, 3]]
                } else {
                    [[0, 1, 3], [1, 2, 3]]
                };
                for t in tris {
                    let (mut pt, mut ut) = (Vec::new(), Vec::new());
                    for c in t {
                        let (p, q) = vertex(quad[c], upper);
                        pt.push(p);
                        ut.push(q);
                    }
                    pos_tris.push(pt);
                    uv_tris.push(ut);
                }
            }
        }
    }
    textured(&pos, &pos_tris, &uv, &uv_tris)
}

/// Concentric-square unfolding of the upper (`z ≥ 1/2`) or lower cap.
fn cap_uv(g: [i64; 3], n: i64, upper: bool) -> [f64; 2] {
    let h = n as f64 / 2.0;
    let (x, y, z) = (g[0] as f64 - h, g[1] as f64 - h, g[2] as f64 - h);
    let rho = x.abs().max(y.abs());
    let dist = if upper { h - z } else { h + z };
    let t = if rho < h || dist == 0.0 { rho } else { h + dist };
    let s = if rho == 0.0 { 0.0 } else { t / rho };
    let (u, v) = (x * s / (2.0 * h), y * s / (2.0 * h));
    if upper {
        [u, v]
    } else {
        [3.0 - u, v]
    }
}
