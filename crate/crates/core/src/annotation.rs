//! Per-dimension annotation matrices over Z2.
//!
//! Each active element (column) stands for a cocycle of a cohomology basis
//! and carries the timestamp of its creation. Every simplex has a row: the
//! sparse set of elements on which its annotation is 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::SimplicialComplex;
use crate::simplex::{Simplex, SimplexError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnotationError {
    #[error("no annotation row for {0:?}")]
    UnknownSimplex(Simplex),
    #[error("row for {0:?} already exists")]
    DuplicateRow(Simplex),
    #[error("cannot kill an element with a zero vector")]
    ZeroVector,
    #[error("{tau:?} is not a codimension-1 face of {sigma:?}")]
    NotAFace { sigma: Simplex, tau: Simplex },
    #[error("chain mixes dimensions {0} and {1}")]
    MixedDimensions(usize, usize),
    #[error("dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

/// Identifies one annotation element. Serials grow per dimension and are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementId {
    pub dim: usize,
    pub serial: u64,
}

/// When something happened: the filtration grade plus a global sequence
/// number that strictly increases with every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timestamp {
    pub grade: f64,
    pub seq: u64,
}

/// Sparse Z2 vector: sorted element serials with bit 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Z2Vec(Vec<u64>);

impl Z2Vec {
    pub fn zero() -> Self {
        Z2Vec(Vec::new())
    }

    pub fn unit(serial: u64) -> Self {
        Z2Vec(vec![serial])
    }

    pub fn from_serials<I: IntoIterator<Item = u64>>(it: I) -> Self {
        let mut v = Z2Vec::zero();
        for s in it {
            v.add(&Z2Vec::unit(s));
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, serial: u64) -> bool {
        self.0.binary_search(&serial).is_ok()
    }

    /// Serials with bit 1, ascending.
    pub fn ones(&self) -> &[u64] {
        &self.0
    }

    /// `self += other` over Z2 (symmetric difference).
    pub fn add(&mut self, other: &Z2Vec) {
        if other.0.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.0 = out;
    }

    fn clear_bit(&mut self, serial: u64) {
        if let Ok(pos) = self.0.binary_search(&serial) {
            self.0.remove(pos);
        }
    }
}

#[derive(Debug, Clone, Default)]
struct DimAnnotation {
    elements: BTreeMap<u64, Timestamp>,
    rows: HashMap<Simplex, Z2Vec>,
    next_serial: u64,
}

/// Annotation rows for every simplex of a complex, grouped by dimension.
#[derive(Debug, Clone, Default)]
pub struct AnnotationMatrix {
    dims: Vec<DimAnnotation>,
}

impl AnnotationMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    fn dim_mut(&mut self, p: usize) -> &mut DimAnnotation {
        while self.dims.len() <= p {
            self.dims.push(DimAnnotation::default());
        }
        &mut self.dims[p]
    }

    /// Highest dimension that has ever held a row or element.
    pub fn dims(&self) -> usize {
        self.dims.len()
    }

    pub fn has_row(&self, s: &Simplex) -> bool {
        self.dims
            .get(s.dim())
            .is_some_and(|d| d.rows.contains_key(s))
    }

    /// Adds an all-zero row for a freshly inserted simplex.
    pub fn insert_row(&mut self, s: Simplex) -> Result<(), AnnotationError> {
        let d = self.dim_mut(s.dim());
        if d.rows.contains_key(&s) {
            return Err(AnnotationError::DuplicateRow(s));
        }
        d.rows.insert(s, Z2Vec::zero());
        Ok(())
    }

    pub fn remove_row(&mut self, s: &Simplex) -> Result<Z2Vec, AnnotationError> {
        self.dims
            .get_mut(s.dim())
            .and_then(|d| d.rows.remove(s))
            .ok_or_else(|| AnnotationError::UnknownSimplex(s.clone()))
    }

    /// Moves a row to a new key (vertex renaming).
    pub fn rename_row(&mut self, old: &Simplex, new: Simplex) -> Result<(), AnnotationError> {
        let row = self.remove_row(old)?;
        let d = self.dim_mut(new.dim());
        if d.rows.contains_key(&new) {
            return Err(AnnotationError::DuplicateRow(new));
        }
        d.rows.insert(new, row);
        Ok(())
    }

    pub fn row(&self, s: &Simplex) -> Result<&Z2Vec, AnnotationError> {
        self.dims
            .get(s.dim())
            .and_then(|d| d.rows.get(s))
            .ok_or_else(|| AnnotationError::UnknownSimplex(s.clone()))
    }

    /// Overwrites a row. Used by dump loading and by negative-control tests.
    pub fn set_row(&mut self, s: &Simplex, v: Z2Vec) -> Result<(), AnnotationError> {
        let slot = self
            .dims
            .get_mut(s.dim())
            .and_then(|d| d.rows.get_mut(s))
            .ok_or_else(|| AnnotationError::UnknownSimplex(s.clone()))?;
        *slot = v;
        Ok(())
    }

    pub fn rows_of_dim(&self, p: usize) -> impl Iterator<Item = (&Simplex, &Z2Vec)> {
        self.dims.get(p).into_iter().flat_map(|d| d.rows.iter())
    }

    /// Active elements of dimension `p`, oldest serial first.
    pub fn elements(&self, p: usize) -> impl Iterator<Item = (ElementId, Timestamp)> + '_ {
        self.dims.get(p).into_iter().flat_map(move |d| {
            d.elements
                .iter()
                .map(move |(&serial, &t)| (ElementId { dim: p, serial }, t))
        })
    }

    pub fn element_count(&self, p: usize) -> usize {
        self.dims.get(p).map_or(0, |d| d.elements.len())
    }

    pub fn timestamp(&self, id: ElementId) -> Option<Timestamp> {
        self.dims.get(id.dim)?.elements.get(&id.serial).copied()
    }

    /// Sum of the rows of a same-dimension chain.
    pub fn annotation_of_chain<'a, I>(&self, chain: I) -> Result<Z2Vec, AnnotationError>
    where
        I: IntoIterator<Item = &'a Simplex>,
    {
        let mut acc = Z2Vec::zero();
        let mut dim = None;
        for s in chain {
            match dim {
                None => dim = Some(s.dim()),
                Some(p) if p != s.dim() => {
                    return Err(AnnotationError::MixedDimensions(p, s.dim()))
                }
                _ => {}
            }
            acc.add(self.row(s)?);
        }
        Ok(acc)
    }

    /// Annotation of the boundary of `s` (zero for a vertex).
    pub fn boundary_annotation(&self, s: &Simplex) -> Result<Z2Vec, AnnotationError> {
        let facets: Vec<Simplex> = s.facets().collect();
        self.annotation_of_chain(facets.iter())
    }

    /// Creates a new element in dimension `p`, set only on `marked`. All
    /// earlier entries of the marked row are cleared.
    pub fn add_element(
        &mut self,
        p: usize,
        marked: &Simplex,
        t: Timestamp,
    ) -> Result<ElementId, AnnotationError> {
        if marked.dim() != p || !self.has_row(marked) {
            return Err(AnnotationError::UnknownSimplex(marked.clone()));
        }
        let d = self.dim_mut(p);
        let serial = d.next_serial;
        d.next_serial += 1;
        d.elements.insert(serial, t);
        *d.rows.get_mut(marked).expect("row checked") = Z2Vec::unit(serial);
        Ok(ElementId { dim: p, serial })
    }

    /// Forces the class annotated by `w` to zero: picks the youngest element
    /// set in `w`, adds `w` to every row holding that element, and retires it.
    pub fn kill_element(
        &mut self,
        p: usize,
        w: &Z2Vec,
    ) -> Result<(ElementId, Timestamp), AnnotationError> {
        let d = self.dims.get_mut(p).ok_or(AnnotationError::ZeroVector)?;
        let (serial, t) = w
            .ones()
            .iter()
            .map(|s| (*s, d.elements[s]))
            .max_by_key(|(_, t)| t.seq)
            .ok_or(AnnotationError::ZeroVector)?;
        for row in d.rows.values_mut() {
            if row.get(serial) {
                row.add(w);
                debug_assert!(!row.get(serial));
            }
        }
        d.elements.remove(&serial);
        Ok((ElementId { dim: p, serial }, t))
    }

    /// Adds the row of `sigma` to every codimension-1 coface of its facet
    /// `tau`, `sigma` included (which therefore becomes zero).
    pub fn transfer(
        &mut self,
        complex: &SimplicialComplex,
        sigma: &Simplex,
        tau: &Simplex,
    ) -> Result<(), AnnotationError> {
        if tau.dim() + 1 != sigma.dim() || !tau.is_face_of(sigma) {
            return Err(AnnotationError::NotAFace {
                sigma: sigma.clone(),
                tau: tau.clone(),
            });
        }
        let a = self.row(sigma)?.clone();
        if a.is_zero() {
            return Ok(());
        }
        let d = &mut self.dims[sigma.dim()];
        for c in complex.cofaces_unordered(tau) {
            let row = d
                .rows
                .get_mut(c)
                .ok_or_else(|| AnnotationError::UnknownSimplex(c.clone()))?;
            row.add(&a);
        }
        Ok(())
    }

    /// One line per element (`e dim serial grade seq`) then one line per
    /// simplex (`vertices | serial:bit ...` over all active elements of its
    /// dimension), sorted.
    pub fn dump(&self) -> String {
        let mut out = String::from("# simpann v1\n");
        for p in 0..self.dims.len() {
            for (id, t) in self.elements(p) {
                let _ = writeln!(out, "e {} {} {} {}", p, id.serial, t.grade, t.seq);
            }
        }
        for p in 0..self.dims.len() {
            let mut rows: Vec<(&Simplex, &Z2Vec)> = self.rows_of_dim(p).collect();
            rows.sort_by(|a, b| a.0.cmp(b.0));
            for (s, r) in rows {
                let _ = write!(out, "{s} |");
                for (id, _) in self.elements(p) {
                    let _ = write!(out, " {}:{}", id.serial, u8::from(r.get(id.serial)));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parses the format written by [`dump`](Self::dump).
    pub fn from_dump(text: &str) -> Result<Self, AnnotationError> {
        let mut m = AnnotationMatrix::new();
        let err = |line: usize, msg: &str| AnnotationError::Dump {
            line,
            msg: msg.to_string(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if let Some(rest) = l.strip_prefix("e ") {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.len() != 4 {
                    return Err(err(line, "element line needs dim serial grade seq"));
                }
                let p: usize = f[0].parse().map_err(|_| err(line, "bad dimension"))?;
                let serial: u64 = f[1].parse().map_err(|_| err(line, "bad serial"))?;
                let grade: f64 = f[2].parse().map_err(|_| err(line, "bad grade"))?;
                let seq: u64 = f[3].parse().map_err(|_| err(line, "bad seq"))?;
                let d = m.dim_mut(p);
                d.elements.insert(serial, Timestamp { grade, seq });
                d.next_serial = d.next_serial.max(serial + 1);
                continue;
            }
            let (verts, bits) = l.split_once('|').ok_or_else(|| err(line, "missing '|'"))?;
            let vs: Vec<u32> = verts
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(line, "bad vertex")))
                .collect::<Result<_, _>>()?;
            let s = Simplex::new(vs).map_err(|e: SimplexError| err(line, &e.to_string()))?;
            let mut row = Z2Vec::zero();
            for tok in bits.split_whitespace() {
                let (a, b) = tok
                    .split_once(':')
                    .ok_or_else(|| err(line, "expected serial:bit"))?;
                let serial: u64 = a.parse().map_err(|_| err(line, "bad serial"))?;
                match b {
                    "0" => {}
                    "1" => row.add(&Z2Vec::unit(serial)),
                    _ => return Err(err(line, "bit must be 0 or 1")),
                }
            }
            let p = s.dim();
            let d = m.dim_mut(p);
            if d.rows.insert(s, row).is_some() {
                return Err(err(line, "duplicate simplex"));
            }
        }
        Ok(m)
    }

    /// Drops `serial` from every row of dimension `p` without touching the
    /// element table. Only meant for building corrupted fixtures.
    #[doc(hidden)]
    pub fn clear_column(&mut self, p: usize, serial: u64) {
        if let Some(d) = self.dims.get_mut(p) {
            for r in d.rows.values_mut() {
                r.clear_bit(serial);
            }
        }
    }
}
