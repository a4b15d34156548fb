//! Coning: simulating an elementary collapse by inclusions.
//!
//! For a collapse `(u, v) -> u` of `K`, the coned complex is
//! `K ∪ (u * closure(star v))`. It contains the collapsed complex, and the
//! inclusion of the collapsed complex into it is a homology isomorphism.
//! The engine never builds it; it serves as a cross-check.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::complex::{ComplexError, SimplicialComplex, VertexMap};
use crate::simplex::{Simplex, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConingError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("vertex map sends {0:?} outside the target complex")]
    NotSimplicial(Simplex),
}

#[derive(Debug, Clone)]
pub struct ConingResult {
    pub khat: SimplicialComplex,
    /// Cone simplices that were not already in `K`.
    pub added: BTreeSet<Simplex>,
}

pub fn cone_complex(
    k: &SimplicialComplex,
    u: VertexId,
    v: VertexId,
) -> Result<ConingResult, ConingError> {
    for x in [u, v] {
        if !k.has_vertex(x) {
            return Err(ComplexError::NotInComplex(Simplex::vertex(x)).into());
        }
    }
    let star = k.star_of(&Simplex::vertex(v))?;
    let closed = k.closure(star.iter())?;
    let mut khat = SimplicialComplex::with_max_dim(k.max_dim() + 1);
    for s in k.sorted() {
        khat.insert(s)?;
    }
    let mut added = BTreeSet::new();
    for s in closed.sorted() {
        let c = s.with_vertex(u);
        if !k.contains(&c) {
            added.insert(c);
        }
    }
    for s in &added {
        khat.insert(s.clone())?;
    }
    Ok(ConingResult { khat, added })
}

fn check_simplicial(
    k1: &SimplicialComplex,
    k2: &SimplicialComplex,
    f: &VertexMap,
) -> Result<(), ConingError> {
    match k1.iter().find(|s| !k2.contains(&f.apply_simplex(s))) {
        Some(s) => Err(ConingError::NotSimplicial(s.clone())),
        None => Ok(()),
    }
}

/// Whether `f(σ) ∪ g(σ)` is a simplex of `k2` for every `σ` of `k1`.
pub fn is_contiguous(
    k1: &SimplicialComplex,
    k2: &SimplicialComplex,
    f: &VertexMap,
    g: &VertexMap,
) -> Result<bool, ConingError> {
    check_simplicial(k1, k2, f)?;
    check_simplicial(k1, k2, g)?;
    Ok(k1
        .iter()
        .all(|s| k2.contains(&f.apply_simplex(s).union(&g.apply_simplex(s)))))
}
