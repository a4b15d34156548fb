//! Independent ground truth: Z2 ranks, Betti numbers, cycle bases and the
//! standard column-reduction persistence algorithm for inclusion-only
//! filtrations. Nothing here touches annotations.

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::engine::{Filtration, OpKind};
use crate::simplex::Simplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("op {0} is a collapse; the oracle only handles insertions")]
    NotInclusionOnly(usize),
    #[error("op {index}: face {face:?} of {simplex:?} was not inserted earlier")]
    MissingFace {
        index: usize,
        simplex: Simplex,
        face: Simplex,
    },
    #[error("op {index}: {simplex:?} inserted twice")]
    Duplicate { index: usize, simplex: Simplex },
}

/// Rank over Z2 of a dense bit matrix given as rows of 64-bit words.
pub fn rank_z2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let words = rows.first().map_or(0, Vec::len);
    for col in 0..words * 64 {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn bit_rows(vectors: &[Vec<usize>], ncols: usize) -> Vec<Vec<u64>> {
    let words = ncols.div_ceil(64).max(1);
    vectors
        .iter()
        .map(|v| {
            let mut row = vec![0u64; words];
            for &i in v {
                row[i / 64] ^= 1 << (i % 64);
            }
            row
        })
        .collect()
}

fn index_dim(k: &SimplicialComplex, p: usize) -> (Vec<Simplex>, HashMap<Simplex, usize>) {
    let mut list: Vec<Simplex> = k.simplices_of_dim(p).cloned().collect();
    list.sort();
    let idx = list
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    (list, idx)
}

/// Rank of the boundary map from `p`-chains to `(p-1)`-chains.
fn boundary_rank(k: &SimplicialComplex, p: usize) -> usize {
    if p == 0 || k.count(p) == 0 {
        return 0;
    }
    let (_, faces) = index_dim(k, p - 1);
    let cols: Vec<Vec<usize>> = k
        .simplices_of_dim(p)
        .map(|s| s.facets().map(|f| faces[&f]).collect())
        .collect();
    rank_z2(bit_rows(&cols, faces.len()))
}

/// Betti numbers `b_0..=b_max_dim` over Z2.
pub fn betti_numbers(k: &SimplicialComplex, max_dim: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=max_dim + 1).map(|p| boundary_rank(k, p)).collect();
    (0..=max_dim)
        .map(|p| k.count(p) - ranks[p] - ranks[p + 1])
        .collect()
}

/// `a += b` for sorted index lists over Z2.
fn add_sorted(a: &mut Vec<usize>, b: &[usize]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] > b[j] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

/// Left-to-right column reduction. Returns the reduced columns and, when
/// requested, the matching columns of V.
fn reduce(mut cols: Vec<Vec<usize>>, track: bool) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut v: Vec<Vec<usize>> = if track {
        (0..cols.len()).map(|j| vec![j]).collect()
    } else {
        Vec::new()
    };
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for j in 0..cols.len() {
        while let Some(&low) = cols[j].last() {
            match owner.get(&low) {
                Some(&i) => {
                    let ci = cols[i].clone();
                    add_sorted(&mut cols[j], &ci);
                    if track {
                        let vi = v[i].clone();
                        add_sorted(&mut v[j], &vi);
                    }
                }
                None => {
                    owner.insert(low, j);
                    break;
                }
            }
        }
    }
    (cols, v)
}

/// A pair by filtration index; `death == None` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexPair {
    pub dim: usize,
    pub birth: usize,
    pub death: Option<usize>,
}

/// Index pairs of an inclusion-only filtration, plus the grade of each op.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub pairs: Vec<IndexPair>,
    pub grades: Vec<f64>,
}

impl Reduction {
    pub fn diagram(&self, keep_zero: bool) -> PersistenceDiagram {
        let pts = self
            .pairs
            .iter()
            .filter_map(|p| {
                let b = self.grades[p.birth];
                match p.death {
                    None => Some(DiagramPoint::essential(p.dim, b)),
                    Some(d) if keep_zero || self.grades[d] != b => {
                        Some(DiagramPoint::finite(p.dim, b, self.grades[d]))
                    }
                    Some(_) => None,
                }
            })
            .collect();
        PersistenceDiagram::new(pts)
    }
}

/// Standard persistence pairing of a face-ordered, inclusion-only filtration.
pub fn reduce_filtration(f: &Filtration) -> Result<Reduction, OracleError> {
    let mut index: HashMap<Simplex, usize> = HashMap::new();
    let mut cols = Vec::with_capacity(f.len());
    let mut dims = Vec::with_capacity(f.len());
    let mut grades = Vec::with_capacity(f.len());
    for (i, op) in f.ops().iter().enumerate() {
        let OpKind::Insert(s) = &op.kind else {
            return Err(OracleError::NotInclusionOnly(i));
        };
        let mut col = Vec::new();
        for face in s.facets() {
            match index.get(&face) {
                Some(&j) => col.push(j),
                None => {
                    return Err(OracleError::MissingFace {
                        index: i,
                        simplex: s.clone(),
                        face,
                    })
                }
            }
        }
        if index.insert(s.clone(), i).is_some() {
            return Err(OracleError::Duplicate {
                index: i,
                simplex: s.clone(),
            });
        }
        col.sort_unstable();
        cols.push(col);
        dims.push(s.dim());
        grades.push(op.grade);
    }
    let (reduced, _) = reduce(cols, false);
    let mut death_of = vec![None; reduced.len()];
    let mut is_death = vec![false; reduced.len()];
    for (j, c) in reduced.iter().enumerate() {
        if let Some(&low) = c.last() {
            death_of[low] = Some(j);
            is_death[j] = true;
        }
    }
    let pairs = (0..reduced.len())
        .filter(|&j| !is_death[j])
        .map(|j| IndexPair {
            dim: dims[j],
            birth: j,
            death: death_of[j],
        })
        .collect();
    Ok(Reduction { pairs, grades })
}

/// Grade-valued diagram from the reduction algorithm.
pub fn reduce_persistence(
    f: &Filtration,
    keep_zero: bool,
) -> Result<PersistenceDiagram, OracleError> {
    Ok(reduce_filtration(f)?.diagram(keep_zero))
}

/// Cycles whose classes form a basis of `H_p(K)`.
pub fn cycle_basis(k: &SimplicialComplex, p: usize) -> Vec<Vec<Simplex>> {
    let (ps, pidx) = index_dim(k, p);
    if ps.is_empty() {
        return Vec::new();
    }
    let boundary_cols: Vec<Vec<usize>> = if p == 0 {
        vec![Vec::new(); ps.len()]
    } else {
        let (_, fidx) = index_dim(k, p - 1);
        ps.iter()
            .map(|s| {
                let mut c: Vec<usize> = s.facets().map(|f| fidx[&f]).collect();
                c.sort_unstable();
                c
            })
            .collect()
    };
    let (reduced, v) = reduce(boundary_cols, true);
    let (cofaces, _) = index_dim(k, p + 1);
    let co_cols: Vec<Vec<usize>> = cofaces
        .iter()
        .map(|s| {
            let mut c: Vec<usize> = s.facets().map(|f| pidx[&f]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let (co_reduced, _) = reduce(co_cols, false);
    let killed: std::collections::HashSet<usize> = co_reduced
        .iter()
        .filter_map(|c| c.last().copied())
        .collect();
    (0..ps.len())
        .filter(|&j| reduced[j].is_empty() && !killed.contains(&j))
        .map(|j| v[j].iter().map(|&i| ps[i].clone()).collect())
        .collect()
}

/// Rank of the given `p`-chains in `Z_p / B_p`; chains must be cycles.
pub fn homology_rank(k: &SimplicialComplex, p: usize, chains: &[Vec<Simplex>]) -> usize {
    let (_, pidx) = index_dim(k, p);
    let boundaries: Vec<Vec<usize>> = k
        .simplices_of_dim(p + 1)
        .map(|s| s.facets().map(|f| pidx[&f]).collect())
        .collect();
    let cycles: Vec<Vec<usize>> = chains
        .iter()
        .map(|c| c.iter().map(|s| pidx[s]).collect())
        .collect();
    let n = pidx.len();
    let base = rank_z2(bit_rows(&boundaries, n));
    let mut all = boundaries;
    all.extend(cycles);
    rank_z2(bit_rows(&all, n)) - base
}
