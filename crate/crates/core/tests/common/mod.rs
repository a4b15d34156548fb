#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simpers::complex::{SimplicialComplex, VertexMap};
use simpers::engine::{ElementaryOp, Filtration};
use simpers::simplex::{Simplex, VertexId};
use simpers::tda::PointCloud;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closure of a few random simplices of dimension at most `max_dim` on
/// `n` vertices, kept under `cap` simplices.
pub fn random_complex(r: &mut ChaCha8Rng, n: u32, max_dim: usize, cap: usize) -> SimplicialComplex {
    let mut k = SimplicialComplex::with_max_dim(max_dim);
    let verts: Vec<VertexId> = (0..n).collect();
    for v in &verts {
        k.insert(Simplex::vertex(*v)).unwrap();
    }
    for _ in 0..12 * n {
        let size = r.gen_range(2..=max_dim + 1);
        let chosen: Vec<VertexId> = verts
            .choose_multiple(r, size.min(n as usize))
            .copied()
            .collect();
        let s = Simplex::new(chosen).unwrap();
        let missing = s.faces().iter().filter(|f| !k.contains(f)).count();
        if k.len() + missing > cap {
            continue;
        }
        k.insert_with_faces(&s).unwrap();
    }
    k
}

/// A random order of `k` in which faces come first, with non-decreasing
/// integer grades and frequent ties.
pub fn random_inclusion_filtration(r: &mut ChaCha8Rng, k: &SimplicialComplex) -> Filtration {
    let mut left: Vec<Simplex> = k.sorted();
    let mut placed = SimplicialComplex::with_max_dim(k.max_dim());
    let mut grade = 0.0;
    let mut ops = Vec::new();
    while !left.is_empty() {
        let ready: Vec<usize> = (0..left.len())
            .filter(|&i| left[i].dim() == 0 || left[i].facets().all(|f| placed.contains(&f)))
            .collect();
        let i = *ready.choose(r).unwrap();
        let s = left.swap_remove(i);
        if r.gen_bool(0.7) {
            grade += r.gen_range(1..=3) as f64;
        }
        placed.insert(s.clone()).unwrap();
        ops.push(ElementaryOp::insert(s, grade));
    }
    Filtration::new(ops)
}

/// Interleaved inserts and collapses with at most `len` ops. Inserts stay
/// within `max_dim`; collapses pick either an edge or any two live vertices.
pub fn random_mixed_filtration(r: &mut ChaCha8Rng, len: usize, max_dim: usize) -> Filtration {
    let mut k = SimplicialComplex::with_max_dim(max_dim);
    let mut next: VertexId = 0;
    let mut grade = 0.0;
    let mut ops = Vec::new();
    while ops.len() < len {
        if r.gen_bool(0.6) {
            grade += 1.0;
        }
        let live = k.vertices();
        let roll: f64 = r.gen();
        if live.len() < 3 || roll < 0.15 {
            let s = Simplex::vertex(next);
            next += 1;
            k.insert(s.clone()).unwrap();
            ops.push(ElementaryOp::insert(s, grade));
        } else if roll < 0.75 {
            let all = k.sorted();
            for _ in 0..20 {
                let base = all.choose(r).unwrap();
                let w = *live.choose(r).unwrap();
                if base.dim() >= max_dim || base.contains(w) {
                    continue;
                }
                let s = base.with_vertex(w);
                if !k.contains(&s) && s.facets().all(|f| k.contains(&f)) {
                    k.insert(s.clone()).unwrap();
                    ops.push(ElementaryOp::insert(s, grade));
                    break;
                }
            }
        } else {
            let mut edges: Vec<Simplex> = k.simplices_of_dim(1).cloned().collect();
            edges.sort();
            let (u, v) = if !edges.is_empty() && r.gen_bool(0.6) {
                let e = edges.choose(r).unwrap();
                let (a, b) = (e.vertices()[0], e.vertices()[1]);
                if r.gen_bool(0.5) {
                    (a, b)
                } else {
                    (b, a)
                }
            } else {
                let pair: Vec<VertexId> = live.choose_multiple(r, 2).copied().collect();
                (pair[0], pair[1])
            };
            k = k.image(&VertexMap::collapse(u, v));
            ops.push(ElementaryOp::collapse(u, v, grade));
        }
    }
    Filtration::new(ops)
}

/// `n` points on a circle of radius `radius` with random angles.
pub fn circle(r: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let t: f64 = r.gen_range(0.0..TAU);
            vec![radius * t.cos(), radius * t.sin()]
        })
        .collect()
}

pub fn circle_cloud(seed: u64, n: usize) -> PointCloud {
    PointCloud::new(circle(&mut rng(seed), n, 1.0)).unwrap()
}

/// Two concentric circles of radius 1 and 2 sharing `n` points.
pub fn annulus_cloud(seed: u64, n: usize) -> PointCloud {
    let mut r = rng(seed);
    let mut pts = circle(&mut r, n / 2, 1.0);
    pts.extend(circle(&mut r, n - n / 2, 2.0));
    PointCloud::new(pts).unwrap()
}

pub fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
