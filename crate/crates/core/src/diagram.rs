//! Persistence diagrams, log-scale transform and bottleneck distance.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("cannot take the logarithm of nonpositive coordinate {0}")]
    NonpositiveCoordinate(f64),
    #[error("dimension {dim}: {left} essential classes vs {right}")]
    EssentialCountMismatch {
        dim: usize,
        left: usize,
        right: usize,
    },
}

/// One point of a diagram. Essential classes have `death == f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn finite(dim: usize, birth: f64, death: f64) -> Self {
        DiagramPoint { dim, birth, death }
    }

    pub fn essential(dim: usize, birth: f64) -> Self {
        DiagramPoint {
            dim,
            birth,
            death: f64::INFINITY,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn sort_key(&self) -> (usize, f64, f64) {
        (self.dim, self.birth, self.death)
    }
}

/// A multiset of diagram points kept sorted by `(dim, birth, death)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn new(mut points: Vec<DiagramPoint>) -> Self {
        points.sort_by(|a, b| {
            let (a, b) = (a.sort_key(), b.sort_key());
            a.0.cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.total_cmp(&b.2))
        });
        PersistenceDiagram { points }
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dims(&self) -> BTreeSet<usize> {
        self.points.iter().map(|p| p.dim).collect()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(move |p| p.dim == dim)
    }

    pub fn essential_count(&self, dim: usize) -> usize {
        self.in_dim(dim).filter(|p| p.is_essential()).count()
    }

    /// Drops points born and dying at the same grade.
    pub fn without_zero_persistence(&self) -> Self {
        PersistenceDiagram {
            points: self
                .points
                .iter()
                .filter(|p| p.birth != p.death)
                .copied()
                .collect(),
        }
    }

    /// Restricts to the given dimensions.
    pub fn restrict_dims(&self, dims: &BTreeSet<usize>) -> Self {
        PersistenceDiagram {
            points: self
                .points
                .iter()
                .filter(|p| dims.contains(&p.dim))
                .copied()
                .collect(),
        }
    }

    /// Natural logarithm of every coordinate; infinite deaths stay infinite.
    pub fn log_scale(&self) -> Result<Self, DiagramError> {
        let mut pts = Vec::with_capacity(self.points.len());
        for p in &self.points {
            for c in [p.birth, p.death] {
                if c <= 0.0 {
                    return Err(DiagramError::NonpositiveCoordinate(c));
                }
            }
            pts.push(DiagramPoint {
                dim: p.dim,
                birth: p.birth.ln(),
                death: if p.is_essential() {
                    f64::INFINITY
                } else {
                    p.death.ln()
                },
            });
        }
        Ok(PersistenceDiagram::new(pts))
    }
}

/// Bottleneck distances per dimension and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct Bottleneck {
    pub per_dim: BTreeMap<usize, f64>,
    pub max: f64,
}

/// Bottleneck distance between two diagrams, dimension by dimension, after
/// removing zero-persistence points. Essential points only match essential
/// points (cost: birth difference); finite points match finite points under
/// the L∞ cost or go to the diagonal at half their persistence.
pub fn bottleneck(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
) -> Result<Bottleneck, DiagramError> {
    let a = a.without_zero_persistence();
    let b = b.without_zero_persistence();
    let dims: BTreeSet<usize> = a.dims().union(&b.dims()).copied().collect();
    let mut per_dim = BTreeMap::new();
    for d in dims {
        per_dim.insert(d, bottleneck_in_dim(&a, &b, d)?);
    }
    let max = per_dim.values().copied().fold(0.0, f64::max);
    Ok(Bottleneck { per_dim, max })
}

/// Bottleneck distance restricted to one dimension.
pub fn bottleneck_in_dim(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    dim: usize,
) -> Result<f64, DiagramError> {
    let split = |d: &PersistenceDiagram| {
        let mut ess = Vec::new();
        let mut fin = Vec::new();
        for p in d.in_dim(dim).filter(|p| p.birth != p.death) {
            if p.is_essential() {
                ess.push(p.birth);
            } else {
                fin.push((p.birth, p.death));
            }
        }
        ess.sort_by(f64::total_cmp);
        (ess, fin)
    };
    let (ea, fa) = split(a);
    let (eb, fb) = split(b);
    if ea.len() != eb.len() {
        return Err(DiagramError::EssentialCountMismatch {
            dim,
            left: ea.len(),
            right: eb.len(),
        });
    }
    // Sorted order is optimal for matching points on a line.
    let essential = ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(essential.max(finite_bottleneck(&fa, &fb)))
}

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

fn finite_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut cand: Vec<f64> = vec![0.0];
    cand.extend(a.iter().chain(b).map(|p| (p.1 - p.0) / 2.0));
    for &p in a {
        for &q in b {
            cand.push(linf(p, q));
        }
    }
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    // The largest candidate is always feasible (everything to the diagonal
    // or some full matching); binary search for the smallest feasible one.
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matching_exists(a, b, cand[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cand[lo]
}

/// Perfect-matching test on the diagonal-augmented bipartite graph.
/// Left: points of `a`, then diagonal copies of `b`. Right: points of `b`,
/// then diagonal copies of `a`.
fn matching_exists(a: &[(f64, f64)], b: &[(f64, f64)], t: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    let size = n + m;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, &p) in a.iter().enumerate() {
        for (j, &q) in b.iter().enumerate() {
            if linf(p, q) <= t {
                adj[i].push(j);
            }
        }
        if (p.1 - p.0) / 2.0 <= t {
            adj[i].push(m + i);
        }
    }
    for (j, &q) in b.iter().enumerate() {
        let left = n + j;
        if (q.1 - q.0) / 2.0 <= t {
            adj[left].push(j);
        }
        adj[left].extend((0..n).map(|i| m + i));
    }
    let mut match_right: Vec<Option<usize>> = vec![None; size];
    for l in 0..size {
        let mut seen = vec![false; size];
        if !augment(l, &adj, &mut match_right, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    match_right: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let free = match match_right[r] {
            None => true,
            Some(other) => augment(other, adj, match_right, seen),
        };
        if free {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}
