//! Point-cloud filtrations: nets, Rips and GIC construction, and replay of
//! the generated filtrations through the engine.

mod common;

use std::collections::BTreeSet;

use rand::Rng;

use common::{annulus_cloud, circle_cloud, rng};
use simpers::engine::{run, Engine, EngineOptions, OpKind};
use simpers::oracle::reduce_persistence;
use simpers::simplex::Simplex;
use simpers::tda::{
    delta_net, exact_rips_filtration, gic, gic_filtration, rips, sparse_rips_filtration, Generated,
    NetHierarchy, PointCloud, RipsParams,
};

fn random_cloud(seed: u64, n: usize, dim: usize) -> PointCloud {
    let mut r = rng(seed);
    PointCloud::new(
        (0..n)
            .map(|_| (0..dim).map(|_| r.gen_range(0.0..1.0)).collect())
            .collect(),
    )
    .unwrap()
}

fn brute_rips(cloud: &PointCloud, r: f64, max_dim: usize) -> BTreeSet<Simplex> {
    let n = cloud.len();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > max_dim + 1 {
            continue;
        }
        let vs: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if vs
            .iter()
            .all(|&a| vs.iter().all(|&b| cloud.distance(a, b) <= r))
        {
            out.insert(Simplex::new(vs.iter().map(|&v| v as u32)).unwrap());
        }
    }
    out
}

#[test]
fn rips_matches_brute_force_cliques() {
    let cloud = random_cloud(21, 20, 2);
    for r in [0.0, 0.1, 0.2, 0.3, 0.45] {
        let k = rips(&cloud, &cloud.all_indices(), r, 3);
        let got: BTreeSet<Simplex> = k.iter().cloned().collect();
        assert_eq!(got, brute_rips(&cloud, r, 3), "r = {r}");
    }
}

#[test]
fn nets_cover_and_separate() {
    let cloud = random_cloud(22, 60, 3);
    let all = cloud.all_indices();
    for delta in [0.0, 0.05, 0.2, 0.5, 3.0] {
        let net = delta_net(&cloud, &all, delta);
        for &v in &all {
            assert!(net.iter().any(|&w| cloud.distance(v, w) <= delta));
        }
        for (i, &a) in net.iter().enumerate() {
            for &b in &net[i + 1..] {
                assert!(cloud.distance(a, b) > delta);
            }
        }
    }
    assert_eq!(delta_net(&cloud, &all, 3.0), vec![0]);
    assert_eq!(delta_net(&cloud, &all, 0.5 * cloud.min_distance()), all);
}

#[test]
fn hierarchy_maps_compose() {
    let cloud = circle_cloud(23, 40);
    let p = RipsParams {
        alpha: 0.05,
        eps: 0.8,
        steps: 6,
        max_dim: 2,
    };
    let h = NetHierarchy::build(&cloud, &p);
    h.check(&cloud).unwrap();
    for k in 0..h.steps() {
        for v in 0..cloud.len() {
            let w = h.compose(k, v);
            assert!(h.level(k + 1).contains(&w));
            let step = if k == 0 {
                h.project(0, v)
            } else {
                h.project(k, h.compose(k - 1, v))
            };
            assert_eq!(w, step);
        }
        // net points map to themselves
        for &w in h.level(k + 1) {
            assert_eq!(h.project(k, w), w);
        }
    }
}

#[test]
fn exact_filtration_grades_at_first_scale() {
    let cloud = PointCloud::new(vec![vec![0.0], vec![1.2], vec![3.0]]).unwrap();
    let p = RipsParams {
        alpha: 1.0,
        eps: 0.5,
        steps: 3,
        max_dim: 2,
    };
    let f = exact_rips_filtration(&cloud, &p).unwrap();
    assert!(f.is_inclusion_only());
    let edge = |a, b| Simplex::edge(a, b);
    let grade_of = |s: &Simplex| {
        f.ops()
            .iter()
            .find(|o| o.kind == OpKind::Insert(s.clone()))
            .unwrap()
            .grade
    };
    assert_eq!(grade_of(&edge(0, 1)), 1.5);
    assert_eq!(grade_of(&edge(1, 2)), 2.25);
    assert_eq!(grade_of(&edge(0, 2)), 3.375);
}

#[test]
fn circle_has_one_long_loop() {
    let n = 12;
    let pts = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let cloud = PointCloud::new(pts).unwrap();
    let p = RipsParams {
        alpha: 0.4,
        eps: 0.25,
        steps: RipsParams::steps_to_cover(0.4, 0.25, 2.0),
        max_dim: 2,
    };
    let f = exact_rips_filtration(&cloud, &p).unwrap();
    let d = reduce_persistence(&f, false).unwrap();
    let loops: Vec<f64> = d.in_dim(1).map(|q| (q.death / q.birth).ln()).collect();
    assert_eq!(loops.len(), 1, "{d:?}");
    assert!(loops[0] > 0.5);
    assert_eq!(run(&f, EngineOptions::default(), false).unwrap(), d);
}

/// Replays `g` and compares the engine complex with each stage complex at
/// the last op of that stage's grade.
fn check_stages(g: &Generated) {
    let mut e = Engine::new(EngineOptions {
        lenient: false,
        max_dim: 2,
    });
    let ops = g.filtration.ops();
    let mut stage = 0;
    for (i, op) in ops.iter().enumerate() {
        e.apply(op).unwrap();
        let last_of_grade = ops.get(i + 1).is_none_or(|next| next.grade != op.grade);
        if last_of_grade {
            while stage < g.stages.len() && g.stages[stage].grade < op.grade {
                stage += 1;
            }
            assert_eq!(g.stages[stage].grade, op.grade);
            assert_eq!(
                *e.complex(),
                g.stages[stage].complex,
                "stage at grade {}",
                op.grade
            );
        }
    }
}

#[test]
fn sparse_stages_equal_rips_of_the_net() {
    for (seed, eps) in [(31, 1.0), (32, 0.5), (33, 0.2)] {
        let cloud = annulus_cloud(seed, 30);
        let alpha = 0.9 * cloud.min_distance();
        let p = RipsParams {
            alpha,
            eps,
            steps: RipsParams::steps_to_cover(alpha, eps, cloud.diameter()),
            max_dim: 2,
        };
        let g = sparse_rips_filtration(&cloud, &p).unwrap();
        for (k, st) in g.stages.iter().enumerate() {
            assert_eq!(
                st.complex,
                rips(&cloud, g.hierarchy.level(k), p.scale(k), 2)
            );
        }
        check_stages(&g);
    }
}

#[test]
fn gic_stages_equal_direct_construction() {
    let cloud = circle_cloud(34, 30);
    let alpha = 0.9 * cloud.min_distance();
    let p = RipsParams {
        alpha,
        eps: 0.5,
        steps: RipsParams::steps_to_cover(alpha, 0.5, cloud.diameter()) + 1,
        max_dim: 2,
    };
    let g = gic_filtration(&cloud, &p).unwrap();
    assert_eq!(g.stages.len(), p.steps);
    for (k, st) in g.stages.iter().enumerate() {
        let nu: Vec<usize> = (0..cloud.len())
            .map(|v| g.hierarchy.compose(k, v))
            .collect();
        assert_eq!(st.complex, gic(&cloud, p.scale(k), &nu, 2));
        assert_eq!(st.grade, p.scale(k + 1));
        let target = rips(&cloud, g.hierarchy.level(k + 1), p.scale(k + 1), 2);
        assert!(st.complex.is_subcomplex_of(&target));
    }
    check_stages(&g);
}

#[test]
fn no_collapses_without_subsampling() {
    // with eps = 0 the nets are the whole cloud and the sparse filtration
    // has the exact filtration's diagram
    let cloud = random_cloud(35, 12, 2);
    let p = RipsParams {
        alpha: 0.9 * cloud.min_distance(),
        eps: 0.0,
        steps: 0,
        max_dim: 2,
    };
    let g = sparse_rips_filtration(&cloud, &p).unwrap();
    assert!(g.filtration.is_inclusion_only());
    let eps_pos = RipsParams {
        eps: 0.01,
        steps: 3,
        ..p
    };
    let g = sparse_rips_filtration(&cloud, &eps_pos).unwrap();
    assert!(g.filtration.is_inclusion_only());
    let exact = exact_rips_filtration(&cloud, &eps_pos).unwrap();
    let opts = EngineOptions {
        lenient: false,
        max_dim: 2,
    };
    assert_eq!(
        run(&g.filtration, opts, false).unwrap(),
        run(&exact, opts, false).unwrap()
    );
}

#[test]
fn gic_of_injective_assignment_is_the_clique_complex() {
    let cloud = random_cloud(36, 15, 2);
    let id: Vec<usize> = cloud.all_indices();
    for r in [0.1, 0.3, 0.6] {
        assert_eq!(gic(&cloud, r, &id, 2), rips(&cloud, &id, r, 2));
    }
}

#[test]
fn stage_edges_per_vertex_stay_bounded() {
    // the sparsified filtration keeps the number of edges per live vertex
    // roughly independent of the sample size
    let mut ratios = Vec::new();
    for n in [40, 80, 160] {
        let cloud = circle_cloud(37, n);
        let alpha = 0.9 * cloud.min_distance();
        let p = RipsParams {
            alpha,
            eps: 1.0,
            steps: RipsParams::steps_to_cover(alpha, 1.0, cloud.diameter()),
            max_dim: 1,
        };
        let g = sparse_rips_filtration(&cloud, &p).unwrap();
        let worst = g
            .stages
            .iter()
            .map(|s| s.complex.count(1) as f64 / s.complex.count(0) as f64)
            .fold(0.0, f64::max);
        ratios.push(worst);
    }
    assert!(ratios.iter().all(|&r| r < 20.0), "{ratios:?}");
    assert!(ratios[2] <= 2.0 * ratios[0] + 1.0, "{ratios:?}");
}
