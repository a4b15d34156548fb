//! Point-cloud filtrations: greedy nets, Rips complexes, the exact Rips
//! filtration, the sparsified Rips filtration connected by vertex
//! collapses, and the graph-induced-complex filtration.
//!
//! All scales come from a geometric schedule `alpha * (1 + eps)^k`. Net
//! level `k + 1` is a greedy `(alpha eps^2 / 2)(1 + eps)^(k - 1)`-net of
//! level `k`, and each level maps onto the next by nearest point.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::complex::{SimplicialComplex, VertexMap};
use crate::engine::{ElementaryOp, Filtration};
use crate::simplex::{Simplex, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TdaError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("point {index} has {got} coordinates, expected {expected}")]
    Ragged {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("stage {stage}: image of {simplex:?} is not in the next complex")]
    ImageNotInTarget { stage: usize, simplex: Simplex },
}

/// Points in Euclidean space, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, TdaError> {
        let dim = points.first().ok_or(TdaError::EmptyCloud)?.len();
        if dim == 0 {
            return Err(TdaError::Ragged {
                index: 0,
                got: 0,
                expected: 1,
            });
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (index, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(TdaError::Ragged {
                    index,
                    got: p.len(),
                    expected: dim,
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(TdaError::NonFinite(index));
            }
            coords.extend(p);
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }

    /// Smallest distance between two distinct indices; infinite for one point.
    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let mut d = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                d = d.min(self.distance(i, j));
            }
        }
        d
    }

    fn diameter_of(&self, s: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }
}

/// Parameters shared by the three filtration generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsParams {
    pub alpha: f64,
    pub eps: f64,
    /// Number of scale steps `m`; scales run from `alpha` to `alpha (1+eps)^m`.
    pub steps: usize,
    pub max_dim: usize,
}

impl RipsParams {
    pub fn validate(&self) -> Result<(), TdaError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(TdaError::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(TdaError::InvalidParameter(format!(
                "eps must lie in [0, 1], got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// `alpha (1 + eps)^k`.
    pub fn scale(&self, k: usize) -> f64 {
        self.alpha * (1.0 + self.eps).powi(k as i32)
    }

    /// Radius of the net taking level `k` to level `k + 1`.
    pub fn net_radius(&self, k: usize) -> f64 {
        self.alpha * self.eps * self.eps / 2.0 * (1.0 + self.eps).powi(k as i32 - 1)
    }

    /// Smallest number of steps whose last scale reaches `diameter`.
    pub fn steps_to_cover(alpha: f64, eps: f64, diameter: f64) -> usize {
        let mut m = 0;
        while alpha * (1.0 + eps).powi(m as i32) < diameter {
            m += 1;
        }
        m
    }
}

/// Greedy farthest-point net of `subset`, seeded at its lowest index. Every
/// point of `subset` ends within `delta` of the net and net points are
/// pairwise more than `delta` apart. Returned indices are ascending.
pub fn delta_net(cloud: &PointCloud, subset: &[usize], delta: f64) -> Vec<usize> {
    let Some(&seed) = subset.iter().min() else {
        return Vec::new();
    };
    let mut chosen = vec![seed];
    let mut nearest: Vec<f64> = subset.iter().map(|&v| cloud.distance(v, seed)).collect();
    loop {
        // farthest remaining point, lowest index on ties
        let mut best: Option<(f64, usize, usize)> = None;
        for (pos, (&v, &d)) in subset.iter().zip(&nearest).enumerate() {
            let better = match best {
                None => true,
                Some((bd, bv, _)) => d > bd || (d == bd && v < bv),
            };
            if better {
                best = Some((d, v, pos));
            }
        }
        let Some((d, v, _)) = best else { break };
        if d <= delta {
            break;
        }
        chosen.push(v);
        for (pos, &w) in subset.iter().enumerate() {
            nearest[pos] = nearest[pos].min(cloud.distance(w, v));
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Nearest point of `targets` to `v`, lowest index on ties.
fn nearest_in(cloud: &PointCloud, targets: &[usize], v: usize) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for &t in targets {
        let d = cloud.distance(v, t);
        if d < best.0 || (d == best.0 && t < best.1) {
            best = (d, t);
        }
    }
    best.1
}

/// Nested nets `V_0 ⊇ V_1 ⊇ ... ⊇ V_m` with nearest-point maps between
/// consecutive levels.
#[derive(Debug, Clone, PartialEq)]
pub struct NetHierarchy {
    levels: Vec<Vec<usize>>,
    radii: Vec<f64>,
    // maps[k][v] = π_k(v) for v in V_k
    maps: Vec<Vec<Option<usize>>>,
}

impl NetHierarchy {
    pub fn build(cloud: &PointCloud, params: &RipsParams) -> Self {
        let mut levels = vec![cloud.all_indices()];
        let mut radii = Vec::new();
        let mut maps = Vec::new();
        for k in 0..params.steps {
            let delta = params.net_radius(k);
            let cur = &levels[k];
            let next = delta_net(cloud, cur, delta);
            let mut map = vec![None; cloud.len()];
            let in_next: BTreeSet<usize> = next.iter().copied().collect();
            for &v in cur {
                map[v] = Some(if in_next.contains(&v) {
                    v
                } else {
                    nearest_in(cloud, &next, v)
                });
            }
            radii.push(delta);
            maps.push(map);
            levels.push(next);
        }
        NetHierarchy {
            levels,
            radii,
            maps,
        }
    }

    /// Number of maps `m`.
    pub fn steps(&self) -> usize {
        self.maps.len()
    }

    pub fn level(&self, k: usize) -> &[usize] {
        &self.levels[k]
    }

    /// Radius used to build level `k + 1` from level `k`.
    pub fn radius(&self, k: usize) -> f64 {
        self.radii[k]
    }

    /// `π_k(v)` for `v` in level `k`.
    pub fn project(&self, k: usize, v: usize) -> usize {
        self.maps[k][v].expect("vertex belongs to level k")
    }

    /// `π̂_k(v) = π_k ∘ ... ∘ π_0 (v)` for any point `v`.
    pub fn compose(&self, k: usize, v: usize) -> usize {
        (0..=k).fold(v, |x, i| self.project(i, x))
    }

    /// `π_k` as a vertex map on level `k`.
    pub fn vertex_map(&self, k: usize) -> VertexMap {
        self.levels[k]
            .iter()
            .map(|&v| (v as VertexId, self.project(k, v) as VertexId))
            .collect()
    }

    /// Coverage, separation and nesting at every level.
    pub fn check(&self, cloud: &PointCloud) -> Result<(), String> {
        for k in 0..self.steps() {
            let (cur, next, delta) = (&self.levels[k], &self.levels[k + 1], self.radii[k]);
            if next.len() > cur.len() || next.iter().any(|v| cur.binary_search(v).is_err()) {
                return Err(format!("level {} is not a subset of level {k}", k + 1));
            }
            for &v in cur {
                let p = self.project(k, v);
                if cloud.distance(v, p) > delta {
                    return Err(format!(
                        "level {k}: point {v} is farther than {delta} from its image {p}"
                    ));
                }
            }
            for (i, &a) in next.iter().enumerate() {
                for &b in &next[i + 1..] {
                    if cloud.distance(a, b) <= delta {
                        return Err(format!(
                            "level {}: points {a} and {b} are within {delta}",
                            k + 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Cliques of size `1..=max_size` in the graph on `vertices` (ascending)
/// given by `adjacent`, each as an ascending list.
fn cliques<F>(vertices: &[usize], max_size: usize, adjacent: F) -> Vec<Vec<usize>>
where
    F: Fn(usize, usize) -> bool,
{
    fn grow<F: Fn(usize, usize) -> bool>(
        current: &mut Vec<usize>,
        candidates: &[usize],
        max_size: usize,
        adjacent: &F,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(current.clone());
        if current.len() == max_size {
            return;
        }
        for (i, &c) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&d| adjacent(c, d))
                .collect();
            current.push(c);
            grow(current, &next, max_size, adjacent, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if max_size == 0 {
        return out;
    }
    for (i, &v) in vertices.iter().enumerate() {
        let cand: Vec<usize> = vertices[i + 1..]
            .iter()
            .copied()
            .filter(|&w| adjacent(v, w))
            .collect();
        grow(&mut vec![v], &cand, max_size, &adjacent, &mut out);
    }
    out
}

fn to_simplex(vs: &[usize]) -> Simplex {
    Simplex::new(vs.iter().map(|&v| v as VertexId)).expect("distinct vertices")
}

fn complex_of(max_dim: usize, mut simplices: Vec<Simplex>) -> SimplicialComplex {
    simplices.sort();
    simplices.dedup();
    let mut k = SimplicialComplex::with_max_dim(max_dim);
    for s in simplices {
        k.insert(s).expect("clique families are face-closed");
    }
    k
}

/// Rips complex of `subset` at scale `r`, truncated at `max_dim`.
pub fn rips(cloud: &PointCloud, subset: &[usize], r: f64, max_dim: usize) -> SimplicialComplex {
    let mut vs = subset.to_vec();
    vs.sort_unstable();
    vs.dedup();
    let cl = cliques(&vs, max_dim + 1, |a, b| cloud.distance(a, b) <= r);
    complex_of(max_dim, cl.iter().map(|c| to_simplex(c)).collect())
}

/// Graph induced complex: images under `nu` of the cliques of the `r`-Rips
/// graph on all points whose vertices have distinct images. `nu` is indexed
/// by point.
pub fn gic(cloud: &PointCloud, r: f64, nu: &[usize], max_dim: usize) -> SimplicialComplex {
    let n = cloud.len();
    let mut out: BTreeSet<Simplex> = BTreeSet::new();
    fn grow(
        cloud: &PointCloud,
        r: f64,
        nu: &[usize],
        members: &mut Vec<usize>,
        candidates: &[usize],
        max_size: usize,
        out: &mut BTreeSet<Simplex>,
    ) {
        out.insert(to_simplex(
            &members.iter().map(|&m| nu[m]).collect::<Vec<_>>(),
        ));
        if members.len() == max_size {
            return;
        }
        for (i, &c) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&d| nu[d] != nu[c] && cloud.distance(c, d) <= r)
                .collect();
            members.push(c);
            grow(cloud, r, nu, members, &next, max_size, out);
            members.pop();
        }
    }
    for v in 0..n {
        let cand: Vec<usize> = (v + 1..n)
            .filter(|&w| nu[w] != nu[v] && cloud.distance(v, w) <= r)
            .collect();
        grow(cloud, r, nu, &mut vec![v], &cand, max_dim + 1, &mut out);
    }
    complex_of(max_dim, out.into_iter().collect())
}

/// One end-of-stage complex of a generated filtration.
#[derive(Debug, Clone)]
pub struct Stage {
    pub grade: f64,
    pub complex: SimplicialComplex,
}

/// A generated filtration together with its net hierarchy and the complex
/// expected at the end of each stage.
#[derive(Debug, Clone)]
pub struct Generated {
    pub filtration: Filtration,
    pub hierarchy: NetHierarchy,
    pub stages: Vec<Stage>,
}

/// Inclusion-only filtration of `Rips^{alpha (1+eps)^k}(V)`, `k = 0..=m`;
/// each simplex is graded at the first scale containing it.
pub fn exact_rips_filtration(
    cloud: &PointCloud,
    params: &RipsParams,
) -> Result<Filtration, TdaError> {
    params.validate()?;
    let top = params.scale(params.steps);
    let all = cloud.all_indices();
    let cl = cliques(&all, params.max_dim + 1, |a, b| cloud.distance(a, b) <= top);
    let mut graded: Vec<(usize, Simplex)> = cl
        .iter()
        .map(|c| {
            let d = cloud.diameter_of(c);
            let k = (0..=params.steps)
                .find(|&k| d <= params.scale(k))
                .expect("within top scale");
            (k, to_simplex(c))
        })
        .collect();
    graded.sort();
    Ok(Filtration::new(
        graded
            .into_iter()
            .map(|(k, s)| ElementaryOp::insert(s, params.scale(k)))
            .collect(),
    ))
}

/// Appends collapses along `map` for every vertex of `level` that it moves,
/// then inserts of everything in `target` missing from the image of
/// `current`. Returns an error if the image is not contained in `target`.
fn push_transition(
    ops: &mut Filtration,
    stage: usize,
    current: &SimplicialComplex,
    map: &VertexMap,
    level: &[usize],
    target: &SimplicialComplex,
    grade: f64,
) -> Result<(), TdaError> {
    for &w in level {
        let w = w as VertexId;
        let p = map.apply(w);
        if p != w {
            ops.push(ElementaryOp::collapse(p, w, grade));
        }
    }
    for s in current.iter() {
        let img = map.apply_simplex(s);
        if !target.contains(&img) {
            return Err(TdaError::ImageNotInTarget {
                stage,
                simplex: s.clone(),
            });
        }
    }
    let image = current.image(map);
    for s in target.sorted() {
        if !image.contains(&s) {
            ops.push(ElementaryOp::insert(s, grade));
        }
    }
    Ok(())
}

/// `Rips^alpha(V_0) -> Rips^{alpha(1+eps)}(V_1) -> ... -> Rips^{alpha(1+eps)^m}(V_m)`,
/// realised as collapses along the nearest-point maps followed by inserts,
/// stage `k` graded at `alpha (1+eps)^k`.
pub fn sparse_rips_filtration(
    cloud: &PointCloud,
    params: &RipsParams,
) -> Result<Generated, TdaError> {
    params.validate()?;
    let hierarchy = NetHierarchy::build(cloud, params);
    let mut filtration = Filtration::default();
    let first = rips(cloud, hierarchy.level(0), params.scale(0), params.max_dim);
    for s in first.sorted() {
        filtration.push(ElementaryOp::insert(s, params.scale(0)));
    }
    let mut stages = vec![Stage {
        grade: params.scale(0),
        complex: first,
    }];
    for k in 0..params.steps {
        let grade = params.scale(k + 1);
        let current = &stages[k].complex;
        let map = hierarchy.vertex_map(k);
        // every edge must land on an edge of the next scale
        for e in current.simplices_of_dim(1) {
            let (a, b) = (e.vertices()[0] as usize, e.vertices()[1] as usize);
            let (pa, pb) = (hierarchy.project(k, a), hierarchy.project(k, b));
            if cloud.distance(pa, pb) > grade {
                return Err(TdaError::ImageNotInTarget {
                    stage: k,
                    simplex: e.clone(),
                });
            }
        }
        let target = rips(cloud, hierarchy.level(k + 1), grade, params.max_dim);
        push_transition(
            &mut filtration,
            k,
            current,
            &map,
            hierarchy.level(k),
            &target,
            grade,
        )?;
        stages.push(Stage {
            grade,
            complex: target,
        });
    }
    Ok(Generated {
        filtration,
        hierarchy,
        stages,
    })
}

/// `G^alpha(V_0, V_1) -> G^{alpha(1+eps)}(V_0, V_2) -> ... -> G^{alpha(1+eps)^{m-1}}(V_0, V_m)`.
/// The complex built on `V_{k+1}` is graded at `alpha (1+eps)^{k+1}`, the
/// same grade as the sparsified Rips complex on `V_{k+1}`.
pub fn gic_filtration(cloud: &PointCloud, params: &RipsParams) -> Result<Generated, TdaError> {
    params.validate()?;
    let hierarchy = NetHierarchy::build(cloud, params);
    let mut filtration = Filtration::default();
    let mut stages: Vec<Stage> = Vec::new();
    for k in 0..params.steps {
        let grade = params.scale(k + 1);
        let nu: Vec<usize> = (0..cloud.len()).map(|v| hierarchy.compose(k, v)).collect();
        let target = gic(cloud, params.scale(k), &nu, params.max_dim);
        match stages.last() {
            None => {
                for s in target.sorted() {
                    filtration.push(ElementaryOp::insert(s, grade));
                }
            }
            Some(prev) => {
                let map = hierarchy.vertex_map(k);
                push_transition(
                    &mut filtration,
                    k,
                    &prev.complex,
                    &map,
                    hierarchy.level(k),
                    &target,
                    grade,
                )?;
            }
        }
        stages.push(Stage {
            grade,
            complex: target,
        });
    }
    Ok(Generated {
        filtration,
        hierarchy,
        stages,
    })
}
