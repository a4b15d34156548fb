//! Simplicial complex store with star, closure, link and link-condition queries.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::simplex::{Simplex, VertexId};

pub const DEFAULT_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("cannot insert {simplex:?}: face {face:?} is missing")]
    MissingFace { simplex: Simplex, face: Simplex },
    #[error("{0:?} is already in the complex")]
    Duplicate(Simplex),
    #[error("{0:?} is not in the complex")]
    NotInComplex(Simplex),
    #[error("{simplex:?} has dimension above the supported maximum {max_dim}")]
    DimensionTooLarge { simplex: Simplex, max_dim: usize },
    #[error("{0:?} still has cofaces and cannot be removed")]
    HasCofaces(Simplex),
    #[error("renaming {from} to {to} would collapse {simplex:?}")]
    InvalidMerge {
        simplex: Simplex,
        from: VertexId,
        to: VertexId,
    },
}

/// A simplicial map given by its vertex map. Vertices without an entry map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexMap(BTreeMap<VertexId, VertexId>);

impl VertexMap {
    pub fn identity() -> Self {
        VertexMap(BTreeMap::new())
    }

    /// The elementary collapse sending `from` onto `to`.
    pub fn collapse(to: VertexId, from: VertexId) -> Self {
        let mut m = BTreeMap::new();
        m.insert(from, to);
        VertexMap(m)
    }

    pub fn set(&mut self, from: VertexId, to: VertexId) {
        if from == to {
            self.0.remove(&from);
        } else {
            self.0.insert(from, to);
        }
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.0.get(&v).copied().unwrap_or(v)
    }

    pub fn apply_simplex(&self, s: &Simplex) -> Simplex {
        s.map(|v| self.apply(v))
    }

    /// Composition `self ∘ first`.
    pub fn after(&self, first: &VertexMap) -> VertexMap {
        let mut out = VertexMap::identity();
        let keys: BTreeSet<VertexId> = first.0.keys().chain(self.0.keys()).copied().collect();
        for v in keys {
            out.set(v, self.apply(first.apply(v)));
        }
        out
    }
}

impl FromIterator<(VertexId, VertexId)> for VertexMap {
    fn from_iter<I: IntoIterator<Item = (VertexId, VertexId)>>(iter: I) -> Self {
        let mut m = VertexMap::identity();
        for (a, b) in iter {
            m.set(a, b);
        }
        m
    }
}

/// Result of [`SimplicialComplex::link_condition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkCondition {
    pub satisfied: bool,
    /// Simplices whose insertion (in this order) makes the condition hold.
    pub repair: Vec<Simplex>,
}

/// One simplex moved by [`SimplicialComplex::rename_vertex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renamed {
    pub old: Simplex,
    pub new: Simplex,
    /// `new` already existed, so `old` was absorbed into it.
    pub merged: bool,
}

/// A face-closed set of simplices, stored per dimension, with an index of
/// codimension-1 cofaces kept in step with every mutation.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    max_dim: usize,
    // by_dim[p]: p-simplex -> its codimension-1 cofaces
    by_dim: Vec<HashMap<Simplex, Vec<Simplex>>>,
}

impl Default for SimplicialComplex {
    fn default() -> Self {
        Self::new()
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|s| other.contains(s))
    }
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::with_max_dim(DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(max_dim: usize) -> Self {
        SimplicialComplex {
            max_dim,
            by_dim: Vec::new(),
        }
    }

    /// Builds the closure of the given simplices.
    pub fn from_simplices<I: IntoIterator<Item = Simplex>>(
        max_dim: usize,
        simplices: I,
    ) -> Result<Self, ComplexError> {
        let mut k = Self::with_max_dim(max_dim);
        for s in simplices {
            k.insert_with_faces(&s)?;
        }
        Ok(k)
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Highest dimension present, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        (0..self.by_dim.len())
            .rev()
            .find(|&p| !self.by_dim[p].is_empty())
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self, p: usize) -> usize {
        self.by_dim.get(p).map_or(0, HashMap::len)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.by_dim.get(s.dim()).is_some_and(|m| m.contains_key(s))
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.contains(&Simplex::vertex(v))
    }

    /// Unordered iteration over all simplices.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flat_map(|m| m.keys())
    }

    /// Unordered iteration over the `p`-simplices.
    pub fn simplices_of_dim(&self, p: usize) -> impl Iterator<Item = &Simplex> {
        self.by_dim.get(p).into_iter().flat_map(|m| m.keys())
    }

    /// All simplices in dimension-then-lexicographic order.
    pub fn sorted(&self) -> Vec<Simplex> {
        let mut v: Vec<Simplex> = self.iter().cloned().collect();
        v.sort();
        v
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self.simplices_of_dim(0).map(|s| s.vertices()[0]).collect();
        v.sort_unstable();
        v
    }

    /// Codimension-1 cofaces of `s`, sorted.
    pub fn cofaces(&self, s: &Simplex) -> Result<Vec<Simplex>, ComplexError> {
        let mut c = self
            .by_dim
            .get(s.dim())
            .and_then(|m| m.get(s))
            .ok_or_else(|| ComplexError::NotInComplex(s.clone()))?
            .clone();
        c.sort();
        Ok(c)
    }

    pub(crate) fn cofaces_unordered(&self, s: &Simplex) -> &[Simplex] {
        self.by_dim
            .get(s.dim())
            .and_then(|m| m.get(s))
            .map_or(&[], Vec::as_slice)
    }

    pub fn insert(&mut self, s: Simplex) -> Result<(), ComplexError> {
        let p = s.dim();
        if p > self.max_dim {
            return Err(ComplexError::DimensionTooLarge {
                simplex: s,
                max_dim: self.max_dim,
            });
        }
        if self.contains(&s) {
            return Err(ComplexError::Duplicate(s));
        }
        let missing = s.facets().find(|f| !self.contains(f));
        if let Some(face) = missing {
            return Err(ComplexError::MissingFace { simplex: s, face });
        }
        for f in s.facets() {
            self.by_dim[p - 1]
                .get_mut(&f)
                .expect("facet present")
                .push(s.clone());
        }
        while self.by_dim.len() <= p {
            self.by_dim.push(HashMap::new());
        }
        self.by_dim[p].insert(s, Vec::new());
        Ok(())
    }

    /// Inserts `s` together with any missing faces; returns what was added,
    /// faces first. Inserting an existing simplex adds nothing.
    pub fn insert_with_faces(&mut self, s: &Simplex) -> Result<Vec<Simplex>, ComplexError> {
        if s.dim() > self.max_dim {
            return Err(ComplexError::DimensionTooLarge {
                simplex: s.clone(),
                max_dim: self.max_dim,
            });
        }
        let mut added = Vec::new();
        for f in s.faces() {
            if !self.contains(&f) {
                self.insert(f.clone())?;
                added.push(f);
            }
        }
        Ok(added)
    }

    /// Removes a simplex that has no cofaces.
    pub fn remove(&mut self, s: &Simplex) -> Result<(), ComplexError> {
        let p = s.dim();
        match self.by_dim.get(p).and_then(|m| m.get(s)) {
            None => return Err(ComplexError::NotInComplex(s.clone())),
            Some(c) if !c.is_empty() => return Err(ComplexError::HasCofaces(s.clone())),
            Some(_) => {}
        }
        self.by_dim[p].remove(s);
        for f in s.facets() {
            let list = self.by_dim[p - 1].get_mut(&f).expect("facet present");
            let pos = list.iter().position(|c| c == s).expect("coface indexed");
            list.swap_remove(pos);
        }
        Ok(())
    }

    fn check_all_present<'a, I>(&self, xs: I) -> Result<(), ComplexError>
    where
        I: IntoIterator<Item = &'a Simplex>,
    {
        for x in xs {
            if !self.contains(x) {
                return Err(ComplexError::NotInComplex(x.clone()));
            }
        }
        Ok(())
    }

    /// Every simplex having some member of `xs` as a face.
    pub fn star<'a, I>(&self, xs: I) -> Result<BTreeSet<Simplex>, ComplexError>
    where
        I: IntoIterator<Item = &'a Simplex>,
    {
        let xs: Vec<&Simplex> = xs.into_iter().collect();
        self.check_all_present(xs.iter().copied())?;
        let mut out = BTreeSet::new();
        let mut stack: Vec<Simplex> = xs.into_iter().cloned().collect();
        while let Some(s) = stack.pop() {
            if out.contains(&s) {
                continue;
            }
            stack.extend(self.cofaces_unordered(&s).iter().cloned());
            out.insert(s);
        }
        Ok(out)
    }

    /// Cofaces of a single simplex, itself included.
    pub fn star_of(&self, s: &Simplex) -> Result<BTreeSet<Simplex>, ComplexError> {
        self.star(std::iter::once(s))
    }

    /// The smallest subcomplex containing `xs`.
    pub fn closure<'a, I>(&self, xs: I) -> Result<SimplicialComplex, ComplexError>
    where
        I: IntoIterator<Item = &'a Simplex>,
    {
        let mut all = BTreeSet::new();
        for x in xs {
            if !self.contains(x) {
                return Err(ComplexError::NotInComplex(x.clone()));
            }
            all.extend(x.faces());
        }
        let mut k = SimplicialComplex::with_max_dim(self.max_dim);
        for s in all {
            k.insert(s)?;
        }
        Ok(k)
    }

    /// `closure(star X) \ star(closure X)`.
    pub fn link<'a, I>(&self, xs: I) -> Result<BTreeSet<Simplex>, ComplexError>
    where
        I: IntoIterator<Item = &'a Simplex>,
    {
        let xs: Vec<&Simplex> = xs.into_iter().collect();
        let st = self.star(xs.iter().copied())?;
        let closed_star = self.closure(st.iter())?;
        let closed_x = self.closure(xs.iter().copied())?;
        let st_closed = self.star(closed_x.iter())?;
        Ok(closed_star
            .iter()
            .filter(|s| !st_closed.contains(*s))
            .cloned()
            .collect())
    }

    /// Link of a vertex: `{τ : v ∉ τ, τ ∪ {v} ∈ K}`.
    fn vertex_link(&self, v: VertexId) -> Result<HashSet<Simplex>, ComplexError> {
        Ok(self
            .star_of(&Simplex::vertex(v))?
            .into_iter()
            .filter_map(|s| s.without_vertex(v))
            .collect())
    }

    /// Checks whether `(u, v)` satisfies the link condition: the edge `{u,v}`
    /// is present and `Lk u ∩ Lk v = Lk {u,v}`. The returned repair list is
    /// sorted by dimension, ties broken lexicographically; every entry contains
    /// both `u` and `v`.
    pub fn link_condition(&self, u: VertexId, v: VertexId) -> Result<LinkCondition, ComplexError> {
        assert_ne!(u, v, "link condition needs two distinct vertices");
        let lu = self.vertex_link(u)?;
        let lv = self.vertex_link(v)?;
        let uv = Simplex::edge(u, v);
        let mut repair = Vec::new();
        if !self.contains(&uv) {
            repair.push(uv.clone());
        }
        let mut extra: Vec<Simplex> = lu
            .intersection(&lv)
            .map(|t| t.union(&uv))
            .filter(|s| !self.contains(s))
            .collect();
        extra.sort();
        repair.extend(extra);
        Ok(LinkCondition {
            satisfied: repair.is_empty(),
            repair,
        })
    }

    /// Replaces `from` by `to` in every simplex. Simplices whose renamed form
    /// already exists are absorbed. Fails if some simplex contains both.
    pub fn rename_vertex(
        &mut self,
        from: VertexId,
        to: VertexId,
    ) -> Result<Vec<Renamed>, ComplexError> {
        let from_v = Simplex::vertex(from);
        if !self.contains(&from_v) {
            return Err(ComplexError::NotInComplex(from_v));
        }
        if !self.has_vertex(to) {
            return Err(ComplexError::NotInComplex(Simplex::vertex(to)));
        }
        let moving: Vec<Simplex> = self.star_of(&from_v)?.into_iter().collect();
        if let Some(bad) = moving.iter().find(|s| s.contains(to)) {
            return Err(ComplexError::InvalidMerge {
                simplex: bad.clone(),
                from,
                to,
            });
        }
        for s in moving.iter().rev() {
            self.remove(s)?;
        }
        let mut out = Vec::with_capacity(moving.len());
        for old in moving {
            let new = old
                .without_vertex(from)
                .map_or_else(|| Simplex::vertex(to), |r| r.with_vertex(to));
            let merged = self.contains(&new);
            if !merged {
                self.insert(new.clone())?;
            }
            out.push(Renamed { old, new, merged });
        }
        Ok(out)
    }

    /// The simplicial image `f(K)`.
    pub fn image(&self, f: &VertexMap) -> SimplicialComplex {
        let mut k = SimplicialComplex::with_max_dim(self.max_dim);
        let mut imgs: Vec<Simplex> = self.iter().map(|s| f.apply_simplex(s)).collect();
        imgs.sort();
        imgs.dedup();
        for s in imgs {
            k.insert(s).expect("image of a complex is face-closed");
        }
        k
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Exhaustive check of face closure and of the coface index.
    pub fn check_invariants(&self) -> Result<(), String> {
        for s in self.iter() {
            for f in s.faces() {
                if !self.contains(&f) {
                    return Err(format!("{s:?} present but face {f:?} missing"));
                }
            }
            if s.dim() > self.max_dim {
                return Err(format!("{s:?} exceeds max dimension {}", self.max_dim));
            }
        }
        let mut expected: HashMap<&Simplex, BTreeSet<&Simplex>> = HashMap::new();
        for s in self.iter() {
            expected.entry(s).or_default();
        }
        for s in self.iter() {
            for f in s.facets() {
                let key = self.by_dim[f.dim()]
                    .get_key_value(&f)
                    .expect("face present")
                    .0;
                expected.get_mut(key).expect("face indexed").insert(s);
            }
        }
        for (p, m) in self.by_dim.iter().enumerate() {
            for (s, cof) in m {
                if s.dim() != p {
                    return Err(format!("{s:?} stored under dimension {p}"));
                }
                let got: BTreeSet<&Simplex> = cof.iter().collect();
                if got.len() != cof.len() || got != expected[s] {
                    return Err(format!("coface index of {s:?} is stale"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex;

    fn closed_triangle() -> SimplicialComplex {
        SimplicialComplex::from_simplices(3, [simplex![0, 1, 2]]).unwrap()
    }

    fn hollow_triangle() -> SimplicialComplex {
        SimplicialComplex::from_simplices(3, [simplex![0, 1], simplex![1, 2], simplex![0, 2]])
            .unwrap()
    }

    #[test]
    fn insert_basics() {
        let mut k = SimplicialComplex::new();
        k.insert(simplex![0]).unwrap();
        assert_eq!(k.len(), 1);
        assert!(matches!(
            k.insert(simplex![0, 1]),
            Err(ComplexError::MissingFace { face, .. }) if face == simplex![1]
        ));
        k.insert(simplex![1]).unwrap();
        k.insert(simplex![0, 1]).unwrap();
        assert_eq!(k.len(), 3);
        assert_eq!(k.cofaces(&simplex![0]).unwrap(), vec![simplex![0, 1]]);
        assert_eq!(
            k.insert(simplex![0, 1]),
            Err(ComplexError::Duplicate(simplex![0, 1]))
        );
        k.check_invariants().unwrap();
    }

    #[test]
    fn dimension_cap() {
        let mut k = SimplicialComplex::with_max_dim(1);
        assert!(matches!(
            k.insert_with_faces(&simplex![0, 1, 2]),
            Err(ComplexError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn star_examples() {
        // closed triangle {v=0,w=1,x=2} plus isolated u=3
        let mut k = closed_triangle();
        k.insert(simplex![3]).unwrap();
        let st = k.star_of(&simplex![0]).unwrap();
        let want: BTreeSet<_> = [
            simplex![0],
            simplex![0, 1],
            simplex![0, 2],
            simplex![0, 1, 2],
        ]
        .into();
        assert_eq!(st, want);
        let st = k.star_of(&simplex![0, 1]).unwrap();
        assert_eq!(st, [simplex![0, 1], simplex![0, 1, 2]].into());
        assert!(k.star_of(&simplex![7]).is_err());
    }

    #[test]
    fn closure_examples() {
        let k = closed_triangle();
        assert_eq!(k.closure([&simplex![0, 1, 2]]).unwrap().len(), 7);
        assert_eq!(
            k.closure([&simplex![1]]).unwrap().sorted(),
            vec![simplex![1]]
        );
        let st = k.star_of(&simplex![0]).unwrap();
        assert_eq!(k.closure(st.iter()).unwrap(), k);
    }

    #[test]
    fn link_examples() {
        let k = closed_triangle();
        let lk = k.link([&simplex![0]]).unwrap();
        assert_eq!(lk, [simplex![1], simplex![2], simplex![1, 2]].into());
        assert!(k
            .link([&simplex![0], &simplex![1], &simplex![2]])
            .unwrap()
            .is_empty());
        let h = hollow_triangle();
        assert_eq!(
            h.link([&simplex![0]]).unwrap(),
            [simplex![1], simplex![2]].into()
        );
    }

    #[test]
    fn link_condition_examples() {
        let k = closed_triangle();
        let lc = k.link_condition(0, 1).unwrap();
        assert!(lc.satisfied);
        assert!(lc.repair.is_empty());

        let h = hollow_triangle();
        let lc = h.link_condition(0, 1).unwrap();
        assert!(!lc.satisfied);
        assert_eq!(lc.repair, vec![simplex![0, 1, 2]]);

        let two = SimplicialComplex::from_simplices(3, [simplex![0], simplex![1]]).unwrap();
        assert_eq!(
            two.link_condition(0, 1).unwrap().repair,
            vec![simplex![0, 1]]
        );
    }

    #[test]
    fn rename_examples() {
        let mut k = SimplicialComplex::from_simplices(3, [simplex![0], simplex![1]]).unwrap();
        let r = k.rename_vertex(1, 0).unwrap();
        assert_eq!(k.sorted(), vec![simplex![0]]);
        assert!(r[0].merged);

        // u=0, v=1, w=2, x=3: after the vanishing simplices are gone,
        // {v,w},{v,x} become {u,w},{u,x}; the mirror {v,w} merges.
        let mut k =
            SimplicialComplex::from_simplices(3, [simplex![0, 2], simplex![1, 2], simplex![1, 3]])
                .unwrap();
        k.rename_vertex(1, 0).unwrap();
        assert_eq!(
            k.sorted(),
            vec![
                simplex![0],
                simplex![2],
                simplex![3],
                simplex![0, 2],
                simplex![0, 3]
            ]
        );
        k.check_invariants().unwrap();

        let mut bad = SimplicialComplex::from_simplices(3, [simplex![0, 1]]).unwrap();
        assert!(matches!(
            bad.rename_vertex(1, 0),
            Err(ComplexError::InvalidMerge { .. })
        ));
    }

    #[test]
    fn remove_requires_maximal() {
        let mut k = closed_triangle();
        assert!(matches!(
            k.remove(&simplex![0, 1]),
            Err(ComplexError::HasCofaces(_))
        ));
        k.remove(&simplex![0, 1, 2]).unwrap();
        k.remove(&simplex![0, 1]).unwrap();
        k.check_invariants().unwrap();
        assert_eq!(k.len(), 5);
    }

    #[test]
    fn vertex_map_composition() {
        let f = VertexMap::collapse(0, 1);
        let g = VertexMap::collapse(2, 0);
        let h = g.after(&f);
        assert_eq!(h.apply(1), 2);
        assert_eq!(h.apply(0), 2);
        assert_eq!(h.apply(5), 5);
    }
}
