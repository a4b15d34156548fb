//! Persistence for sequences of elementary inclusions and vertex collapses.
//!
//! The engine keeps a valid annotation for the current complex. An insertion
//! either creates an element (its boundary annotates to zero) or kills the
//! youngest element in its boundary annotation. A collapse `(u, v) -> u`
//! first inserts whatever the link condition needs, then transfers the
//! annotation of every vanishing simplex onto the cofaces of its `u`-side
//! facet, and finally deletes the vanishing simplices and renames `v` to `u`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::annotation::{AnnotationError, AnnotationMatrix, ElementId, Timestamp};
use crate::complex::{ComplexError, Renamed, SimplicialComplex, VertexMap, DEFAULT_MAX_DIM};
use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::simplex::{Simplex, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("vertex {0} is not alive")]
    DeadVertex(VertexId),
    #[error("cannot collapse vertex {0} onto itself")]
    SameVertex(VertexId),
    #[error("vertex {0} was collapsed away and cannot be reused")]
    RetiredVertex(VertexId),
    #[error("grade {grade} is below the previous grade {previous}")]
    GradeDecreasing { previous: f64, grade: f64 },
    #[error("grade must be a number, got {0}")]
    BadGrade(f64),
    #[error("{simplex:?} exceeds the maximum dimension {max_dim}")]
    DimensionTooLarge { simplex: Simplex, max_dim: usize },
    #[error("vertex map sends {0:?} outside the target complex")]
    NotSimplicial(Simplex),
    #[error("vertex map is not normalized at vertex {0}: targets must be fixed points")]
    UnnormalizedMap(VertexId),
}

/// An engine error tagged with the index of the filtration op that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("op {index}: {source}")]
pub struct RunError {
    pub index: usize,
    #[source]
    pub source: EngineError,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpKind {
    Insert(Simplex),
    /// `remove` is identified with `keep`; `remove` is retired.
    Collapse {
        keep: VertexId,
        remove: VertexId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryOp {
    pub kind: OpKind,
    pub grade: f64,
}

impl ElementaryOp {
    pub fn insert(s: Simplex, grade: f64) -> Self {
        ElementaryOp {
            kind: OpKind::Insert(s),
            grade,
        }
    }

    pub fn collapse(keep: VertexId, remove: VertexId, grade: f64) -> Self {
        ElementaryOp {
            kind: OpKind::Collapse { keep, remove },
            grade,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Filtration {
    ops: Vec<ElementaryOp>,
}

impl Filtration {
    pub fn new(ops: Vec<ElementaryOp>) -> Self {
        Filtration { ops }
    }

    pub fn ops(&self) -> &[ElementaryOp] {
        &self.ops
    }

    pub fn push(&mut self, op: ElementaryOp) {
        self.ops.push(op);
    }

    pub fn extend<I: IntoIterator<Item = ElementaryOp>>(&mut self, ops: I) {
        self.ops.extend(ops);
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_inclusion_only(&self) -> bool {
        self.ops
            .iter()
            .all(|op| matches!(op.kind, OpKind::Insert(_)))
    }

    /// For an inclusion-only filtration: inserts missing faces right before
    /// the simplex needing them, at its grade, and drops repeated inserts of
    /// faces that were added this way.
    pub fn expand_faces(&self) -> Filtration {
        let mut seen: HashSet<Simplex> = HashSet::new();
        let mut out = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            match &op.kind {
                OpKind::Insert(s) => {
                    for f in s.faces() {
                        if f != *s && seen.insert(f.clone()) {
                            out.push(ElementaryOp::insert(f, op.grade));
                        }
                    }
                    seen.insert(s.clone());
                    out.push(op.clone());
                }
                OpKind::Collapse { .. } => out.push(op.clone()),
            }
        }
        Filtration { ops: out }
    }
}

/// A persistence pair in terms of timestamps. `death == None` marks an
/// essential class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: Timestamp,
    pub death: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Birth {
        dim: usize,
        element: ElementId,
        at: Timestamp,
    },
    Death(PersistencePair),
}

/// What a collapse did, for reporting and audits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollapseReport {
    /// Simplices inserted so that the link condition holds.
    pub repair: Vec<Simplex>,
    pub events: Vec<Event>,
    /// Simplices containing both vertices, deleted by the collapse.
    pub vanishing: Vec<Simplex>,
    pub renamed: Vec<Renamed>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Auto-insert missing faces instead of failing.
    pub lenient: bool,
    /// Largest dimension accepted from the input. Link-condition repairs may
    /// transiently reach one more.
    pub max_dim: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            lenient: false,
            max_dim: DEFAULT_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    opts: EngineOptions,
    complex: SimplicialComplex,
    ann: AnnotationMatrix,
    seq: u64,
    last_grade: Option<f64>,
    retired: HashSet<VertexId>,
    pairs: Vec<PersistencePair>,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new(EngineOptions::default())
    }
}

impl Engine {
    pub fn new(opts: EngineOptions) -> Self {
        Engine {
            opts,
            complex: SimplicialComplex::with_max_dim(opts.max_dim + 1),
            ann: AnnotationMatrix::new(),
            seq: 0,
            last_grade: None,
            retired: HashSet::new(),
            pairs: Vec::new(),
        }
    }

    pub fn options(&self) -> EngineOptions {
        self.opts
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn annotations(&self) -> &AnnotationMatrix {
        &self.ann
    }

    /// Mutable access for fault-injection in audits.
    #[doc(hidden)]
    pub fn annotations_mut(&mut self) -> &mut AnnotationMatrix {
        &mut self.ann
    }

    /// Finite pairs produced so far.
    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn is_retired(&self, v: VertexId) -> bool {
        self.retired.contains(&v)
    }

    fn tick(&mut self, grade: f64) -> Result<Timestamp, EngineError> {
        if grade.is_nan() {
            return Err(EngineError::BadGrade(grade));
        }
        if let Some(prev) = self.last_grade {
            if grade < prev {
                return Err(EngineError::GradeDecreasing {
                    previous: prev,
                    grade,
                });
            }
        }
        self.last_grade = Some(grade);
        self.seq += 1;
        Ok(Timestamp {
            grade,
            seq: self.seq,
        })
    }

    fn check_grade(&self, grade: f64) -> Result<(), EngineError> {
        match self.last_grade {
            Some(prev) if grade < prev => Err(EngineError::GradeDecreasing {
                previous: prev,
                grade,
            }),
            _ if grade.is_nan() => Err(EngineError::BadGrade(grade)),
            _ => Ok(()),
        }
    }

    /// Applies one filtration op. In lenient mode missing faces of an insert
    /// are inserted first at the same grade.
    pub fn apply(&mut self, op: &ElementaryOp) -> Result<Vec<Event>, EngineError> {
        match &op.kind {
            OpKind::Insert(s) => {
                if self.opts.lenient {
                    let mut events = Vec::new();
                    for f in s.faces() {
                        if f != *s && !self.complex.contains(&f) {
                            events.push(self.step_insert(&f, op.grade)?);
                        }
                    }
                    events.push(self.step_insert(s, op.grade)?);
                    Ok(events)
                } else {
                    Ok(vec![self.step_insert(s, op.grade)?])
                }
            }
            OpKind::Collapse { keep, remove } => {
                Ok(self.step_collapse(*keep, *remove, op.grade)?.events)
            }
        }
    }

    /// Elementary inclusion of `s` at `grade`.
    pub fn step_insert(&mut self, s: &Simplex, grade: f64) -> Result<Event, EngineError> {
        if s.dim() > self.opts.max_dim {
            return Err(EngineError::DimensionTooLarge {
                simplex: s.clone(),
                max_dim: self.opts.max_dim,
            });
        }
        if let Some(&v) = s.vertices().iter().find(|v| self.retired.contains(v)) {
            return Err(EngineError::RetiredVertex(v));
        }
        self.insert_unchecked(s, grade)
    }

    fn insert_unchecked(&mut self, s: &Simplex, grade: f64) -> Result<Event, EngineError> {
        self.check_grade(grade)?;
        self.complex.insert(s.clone())?;
        self.ann.insert_row(s.clone())?;
        let t = self.tick(grade)?;
        let p = s.dim();
        let w = self.ann.boundary_annotation(s)?;
        if w.is_zero() {
            let element = self.ann.add_element(p, s, t)?;
            Ok(Event::Birth {
                dim: p,
                element,
                at: t,
            })
        } else {
            let (_, born) = self.ann.kill_element(p - 1, &w)?;
            let pair = PersistencePair {
                dim: p - 1,
                birth: born,
                death: Some(t),
            };
            self.pairs.push(pair);
            Ok(Event::Death(pair))
        }
    }

    /// Elementary collapse of `(keep, remove)` onto `keep`.
    pub fn step_collapse(
        &mut self,
        keep: VertexId,
        remove: VertexId,
        grade: f64,
    ) -> Result<CollapseReport, EngineError> {
        self.step_collapse_inspect(keep, remove, grade, |_, _| {})
    }

    /// Like [`step_collapse`](Self::step_collapse), calling `inspect` once the
    /// annotation transfers are done and before anything is deleted.
    pub fn step_collapse_inspect<F>(
        &mut self,
        keep: VertexId,
        remove: VertexId,
        grade: f64,
        inspect: F,
    ) -> Result<CollapseReport, EngineError>
    where
        F: FnOnce(&SimplicialComplex, &AnnotationMatrix),
    {
        if keep == remove {
            return Err(EngineError::SameVertex(keep));
        }
        for v in [keep, remove] {
            if !self.complex.has_vertex(v) {
                return Err(EngineError::DeadVertex(v));
            }
        }
        self.check_grade(grade)?;

        let mut report = CollapseReport::default();
        let lc = self.complex.link_condition(keep, remove)?;
        for s in &lc.repair {
            let e = self.insert_unchecked(s, grade)?;
            report.events.push(e);
        }
        report.repair = lc.repair;

        let edge = Simplex::edge(keep, remove);
        let vanishing: Vec<Simplex> = self.complex.star_of(&edge)?.into_iter().collect();
        for sigma in &vanishing {
            let tau = sigma
                .without_vertex(remove)
                .expect("vanishing simplex has two vertices");
            self.ann.transfer(&self.complex, sigma, &tau)?;
        }
        inspect(&self.complex, &self.ann);

        for sigma in vanishing.iter().rev() {
            self.complex.remove(sigma)?;
            let row = self.ann.remove_row(sigma)?;
            debug_assert!(
                row.is_zero(),
                "vanishing simplex {sigma:?} kept a nonzero annotation"
            );
        }
        let renamed = self.complex.rename_vertex(remove, keep)?;
        for r in &renamed {
            if r.merged {
                let row = self.ann.remove_row(&r.old)?;
                debug_assert_eq!(&row, self.ann.row(&r.new)?, "mirror rows differ");
            } else {
                self.ann.rename_row(&r.old, r.new.clone())?;
            }
        }
        self.retired.insert(remove);
        self.tick(grade)?;
        report.vanishing = vanishing;
        report.renamed = renamed;
        Ok(report)
    }

    /// Active elements become essential pairs; returns every pair.
    pub fn finish(self) -> Vec<PersistencePair> {
        let mut out = self.pairs;
        let mut essential: Vec<PersistencePair> = (0..self.ann.dims())
            .flat_map(|p| {
                self.ann.elements(p).map(move |(_, t)| PersistencePair {
                    dim: p,
                    birth: t,
                    death: None,
                })
            })
            .collect();
        essential.sort_by_key(|p| p.birth.seq);
        out.extend(essential);
        out
    }

    /// Runs a whole filtration and returns every pair.
    pub fn run(f: &Filtration, opts: EngineOptions) -> Result<Vec<PersistencePair>, RunError> {
        let mut e = Engine::new(opts);
        for (index, op) in f.ops().iter().enumerate() {
            e.apply(op).map_err(|source| RunError { index, source })?;
        }
        Ok(e.finish())
    }
}

/// Grade-valued diagram of a list of pairs. Unless `keep_zero` is set, pairs
/// born and killed at the same grade are dropped.
pub fn diagram_of_pairs(pairs: &[PersistencePair], keep_zero: bool) -> PersistenceDiagram {
    let pts = pairs
        .iter()
        .filter_map(|p| match p.death {
            None => Some(DiagramPoint::essential(p.dim, p.birth.grade)),
            Some(d) if keep_zero || d.grade != p.birth.grade => {
                Some(DiagramPoint::finite(p.dim, p.birth.grade, d.grade))
            }
            Some(_) => None,
        })
        .collect();
    PersistenceDiagram::new(pts)
}

/// Runs `f` and returns its grade-valued diagram.
pub fn run(
    f: &Filtration,
    opts: EngineOptions,
    keep_zero: bool,
) -> Result<PersistenceDiagram, RunError> {
    Ok(diagram_of_pairs(&Engine::run(f, opts)?, keep_zero))
}

/// Decomposes the simplicial map `K -> K'` induced by `vmap` into elementary
/// ops: collapses onto each target with more than one preimage (targets and
/// sources ascending), then inserts for `K' \ f(K)` in dimension order.
///
/// Every target must be a fixed point of `vmap`, so surviving vertices keep
/// their identifiers.
pub fn decompose_map(
    k: &SimplicialComplex,
    vmap: &VertexMap,
    target: &SimplicialComplex,
    grade: f64,
) -> Result<Vec<ElementaryOp>, EngineError> {
    for s in k.iter() {
        if !target.contains(&vmap.apply_simplex(s)) {
            return Err(EngineError::NotSimplicial(s.clone()));
        }
    }
    let mut classes: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for v in k.vertices() {
        classes.entry(vmap.apply(v)).or_default().push(v);
    }
    let mut moved: BTreeSet<VertexId> = BTreeSet::new();
    for (&w, sources) in &classes {
        if !sources.contains(&w) {
            return Err(EngineError::UnnormalizedMap(sources[0]));
        }
        moved.extend(sources.iter().copied().filter(|&s| s != w));
    }
    let mut ops = Vec::new();
    for (&w, sources) in &classes {
        for &s in sources.iter().filter(|&&s| s != w) {
            ops.push(ElementaryOp::collapse(w, s, grade));
        }
    }
    let image = k.image(vmap);
    for s in target.sorted() {
        if image.contains(&s) {
            continue;
        }
        if let Some(&v) = s.vertices().iter().find(|v| moved.contains(v)) {
            return Err(EngineError::UnnormalizedMap(v));
        }
        ops.push(ElementaryOp::insert(s, grade));
    }
    Ok(ops)
}
