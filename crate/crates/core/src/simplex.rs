//! Simplices as canonical, sorted vertex sets.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Vertex identifier. Identifiers of collapsed-away vertices are never reused.
pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("a simplex needs at least one vertex")]
    Empty,
    #[error("vertex {0} appears more than once")]
    RepeatedVertex(VertexId),
}

/// A nonempty set of vertices stored in strictly ascending order.
///
/// Simplices order first by dimension and then lexicographically by vertex
/// sequence, so sorting a collection of simplices always yields a
/// faces-before-cofaces order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Builds a simplex from vertices in any order.
    pub fn new<I: IntoIterator<Item = VertexId>>(vertices: I) -> Result<Self, SimplexError> {
        let mut v: Vec<VertexId> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(SimplexError::Empty);
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(SimplexError::RepeatedVertex(w[0]));
        }
        Ok(Simplex(v))
    }

    pub fn vertex(v: VertexId) -> Self {
        Simplex(vec![v])
    }

    pub fn edge(a: VertexId, b: VertexId) -> Self {
        assert_ne!(a, b, "edge endpoints must differ");
        if a < b {
            Simplex(vec![a, b])
        } else {
            Simplex(vec![b, a])
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().all(|v| other.contains(*v))
    }

    /// The codimension-1 faces. Empty for a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }

    /// All nonempty faces, including the simplex itself, in dimension order.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out: Vec<Simplex> = (1u64..(1u64 << n))
            .map(|mask| {
                Simplex(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect();
        out.sort();
        out
    }

    pub fn with_vertex(&self, v: VertexId) -> Simplex {
        match self.0.binary_search(&v) {
            Ok(_) => self.clone(),
            Err(pos) => {
                let mut w = self.0.clone();
                w.insert(pos, v);
                Simplex(w)
            }
        }
    }

    /// Removes `v`; `None` if that would leave the simplex empty.
    pub fn without_vertex(&self, v: VertexId) -> Option<Simplex> {
        let mut w = self.0.clone();
        if let Ok(pos) = w.binary_search(&v) {
            w.remove(pos);
        }
        if w.is_empty() {
            None
        } else {
            Some(Simplex(w))
        }
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut w: Vec<VertexId> = self.0.iter().chain(other.0.iter()).copied().collect();
        w.sort_unstable();
        w.dedup();
        Simplex(w)
    }

    /// Image under a vertex map; repeated images are merged.
    pub fn map<F: Fn(VertexId) -> VertexId>(&self, f: F) -> Simplex {
        let mut w: Vec<VertexId> = self.0.iter().map(|&v| f(v)).collect();
        w.sort_unstable();
        w.dedup();
        Simplex(w)
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Shorthand used throughout the tests: `simplex![0, 1, 2]`.
#[macro_export]
macro_rules! simplex {
    ($($v:expr),+ $(,)?) => {
        $crate::simplex::Simplex::new([$($v as $crate::simplex::VertexId),+]).expect("valid simplex")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let s = Simplex::new([3, 1, 2]).unwrap();
        assert_eq!(s.vertices(), &[1, 2, 3]);
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Simplex::new([]), Err(SimplexError::Empty));
        assert_eq!(
            Simplex::new([1, 2, 1]),
            Err(SimplexError::RepeatedVertex(1))
        );
    }

    #[test]
    fn faces_and_facets() {
        let s = simplex![0, 1, 2];
        assert_eq!(s.faces().len(), 7);
        let f: Vec<_> = s.facets().collect();
        assert_eq!(f, vec![simplex![1, 2], simplex![0, 2], simplex![0, 1]]);
        assert_eq!(simplex![4].facets().count(), 0);
    }

    #[test]
    fn ordering_is_dimension_first() {
        let mut v = vec![simplex![0, 1], simplex![5], simplex![0, 1, 2], simplex![0]];
        v.sort();
        assert_eq!(
            v,
            vec![simplex![0], simplex![5], simplex![0, 1], simplex![0, 1, 2]]
        );
    }

    #[test]
    fn map_merges() {
        let s = simplex![1, 2, 3];
        assert_eq!(s.map(|v| if v == 2 { 1 } else { v }), simplex![1, 3]);
    }
}
