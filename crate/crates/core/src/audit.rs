//! Consistency audits of engine state against the oracle.

use std::collections::HashMap;

use thiserror::Error;

use crate::annotation::AnnotationMatrix;
use crate::complex::{SimplicialComplex, VertexMap};
use crate::coning::{cone_complex, is_contiguous};
use crate::oracle::{betti_numbers, cycle_basis, rank_z2};
use crate::simplex::{Simplex, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{invariant}: {detail}")]
pub struct AuditFailure {
    pub invariant: &'static str,
    pub detail: String,
}

fn fail(invariant: &'static str, detail: String) -> AuditFailure {
    AuditFailure { invariant, detail }
}

/// Checks that `ann` is a valid annotation of `k`: one row per simplex,
/// only active elements referenced, element count equal to the Betti
/// number, coboundaries vanish, and the annotations of a homology basis
/// form a full-rank matrix.
pub fn audit_annotation(k: &SimplicialComplex, ann: &AnnotationMatrix) -> Result<(), AuditFailure> {
    let top = k.dim().unwrap_or(0).max(ann.dims().saturating_sub(1));
    for p in 0..=top {
        let rows = ann.rows_of_dim(p).count();
        if rows != k.count(p) {
            return Err(fail(
                "row-coverage",
                format!("dimension {p}: {rows} rows for {} simplices", k.count(p)),
            ));
        }
        for s in k.simplices_of_dim(p) {
            let row = ann
                .row(s)
                .map_err(|_| fail("row-coverage", format!("no row for {s:?}")))?;
            if let Some(bad) = row.ones().iter().find(|&&e| {
                ann.timestamp(crate::annotation::ElementId { dim: p, serial: e })
                    .is_none()
            }) {
                return Err(fail(
                    "active-elements",
                    format!("{s:?} references retired element {bad}"),
                ));
            }
        }
    }
    let betti = betti_numbers(k, top);
    for (p, &b) in betti.iter().enumerate().take(top + 1) {
        let g = ann.element_count(p);
        if g != b {
            return Err(fail(
                "element-count",
                format!("dimension {p}: {g} elements, Betti number {b}"),
            ));
        }
    }
    for p in 0..top {
        for t in k.simplices_of_dim(p + 1) {
            let facets: Vec<Simplex> = t.facets().collect();
            let w = ann
                .annotation_of_chain(facets.iter())
                .map_err(|e| fail("row-coverage", e.to_string()))?;
            if !w.is_zero() {
                return Err(fail(
                    "cocycle",
                    format!("boundary of {t:?} annotates to {:?}", w.ones()),
                ));
            }
        }
    }
    for (p, &g) in betti.iter().enumerate().take(top + 1) {
        if g == 0 {
            continue;
        }
        let col: HashMap<u64, usize> = ann
            .elements(p)
            .enumerate()
            .map(|(i, (id, _))| (id.serial, i))
            .collect();
        let cycles = cycle_basis(k, p);
        let words = g.div_ceil(64);
        let rows: Vec<Vec<u64>> = cycles
            .iter()
            .map(|z| {
                let a = ann
                    .annotation_of_chain(z.iter())
                    .expect("rows checked above");
                let mut r = vec![0u64; words];
                for e in a.ones() {
                    let i = col[e];
                    r[i / 64] ^= 1 << (i % 64);
                }
                r
            })
            .collect();
        let rank = rank_z2(rows);
        if rank != g {
            return Err(fail(
                "full-rank",
                format!("dimension {p}: cycle-basis annotations have rank {rank} < {g}"),
            ));
        }
    }
    Ok(())
}

/// After the transfers of a collapse `(u, v) -> u`: every simplex containing
/// both vertices has a zero row, and every mirror pair has equal rows.
pub fn check_transfer(
    k: &SimplicialComplex,
    ann: &AnnotationMatrix,
    u: VertexId,
    v: VertexId,
) -> Result<(), AuditFailure> {
    for s in k.iter() {
        if !s.contains(v) {
            continue;
        }
        let row = ann
            .row(s)
            .map_err(|_| fail("row-coverage", format!("no row for {s:?}")))?;
        if s.contains(u) {
            if !row.is_zero() {
                return Err(fail(
                    "vanishing-zero",
                    format!("{s:?} annotates to {:?}", row.ones()),
                ));
            }
        } else {
            let mirror = s
                .without_vertex(v)
                .map_or_else(|| Simplex::vertex(u), |r| r.with_vertex(u));
            if let Ok(m) = ann.row(&mirror) {
                if m != row {
                    return Err(fail(
                        "mirror-equal",
                        format!("{s:?} = {:?} but {mirror:?} = {:?}", row.ones(), m.ones()),
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the coning cross-checks for one collapse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConingChecks {
    pub image_in_cone: bool,
    pub betti_equal: bool,
    pub inclusion_contiguous: bool,
    pub projection_contiguous: bool,
}

impl ConingChecks {
    pub fn all(&self) -> bool {
        self.image_in_cone
            && self.betti_equal
            && self.inclusion_contiguous
            && self.projection_contiguous
    }
}

/// Coning cross-checks for the collapse `(u, v) -> u` of `k`: the image
/// lies in the cone, both have the same Betti numbers, the inclusion of `k`
/// is contiguous to the collapse, and the projection of the cone onto the
/// image is contiguous to the identity.
pub fn check_coning(
    k: &SimplicialComplex,
    u: VertexId,
    v: VertexId,
) -> Result<ConingChecks, AuditFailure> {
    let cone = cone_complex(k, u, v).map_err(|e| fail("coning", e.to_string()))?;
    let f = VertexMap::collapse(u, v);
    let image = k.image(&f);
    let id = VertexMap::identity();
    let top = cone.khat.dim().unwrap_or(0);
    let inclusion_contiguous = is_contiguous(k, &cone.khat, &id, &f).unwrap_or(false);
    let projection_contiguous = is_contiguous(&cone.khat, &cone.khat, &f, &id).unwrap_or(false);
    Ok(ConingChecks {
        image_in_cone: image.is_subcomplex_of(&cone.khat),
        betti_equal: betti_numbers(&cone.khat, top) == betti_numbers(&image, top),
        inclusion_contiguous,
        projection_contiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Engine;
    use crate::simplex;

    #[test]
    fn audit_detects_corruption() {
        let mut e = Engine::default();
        for s in [
            simplex![0],
            simplex![1],
            simplex![2],
            simplex![0, 1],
            simplex![1, 2],
            simplex![0, 2],
        ] {
            e.step_insert(&s, 1.0).unwrap();
        }
        audit_annotation(e.complex(), e.annotations()).unwrap();
        let (id, _) = e.annotations().elements(1).next().unwrap();
        e.annotations_mut().clear_column(1, id.serial);
        let err = audit_annotation(e.complex(), e.annotations()).unwrap_err();
        assert_eq!(err.invariant, "full-rank");
    }

    #[test]
    fn coning_checks_on_hollow_triangle() {
        let k =
            SimplicialComplex::from_simplices(3, [simplex![0, 1], simplex![1, 2], simplex![0, 2]])
                .unwrap();
        assert!(check_coning(&k, 0, 1).unwrap().all());
    }
}
