//! Persistence diagrams for filtrations whose consecutive complexes are
//! connected by simplicial maps, not only inclusions.
//!
//! Every simplicial map is decomposed into elementary inclusions and
//! elementary vertex collapses. The [`engine`] keeps a Z2 annotation (a
//! cohomology basis written as one bit vector per simplex) and updates it
//! under each elementary op, reporting births and deaths as it goes.
//!
//! ```
//! use simpers::engine::{run, ElementaryOp, EngineOptions, Filtration};
//! use simpers::simplex;
//!
//! let f = Filtration::new(vec![
//!     ElementaryOp::insert(simplex![0], 1.0),
//!     ElementaryOp::insert(simplex![1], 2.0),
//!     ElementaryOp::collapse(0, 1, 3.0),
//! ]);
//! let d = run(&f, EngineOptions::default(), false).unwrap();
//! assert_eq!(d.len(), 2);
//! ```
//!
//! The [`tda`] module builds Rips, sparsified Rips and graph induced complex
//! filtrations of point clouds; [`oracle`] and [`audit`] provide independent
//! checks used by the test suite and by `simpers validate`.

pub mod annotation;
pub mod audit;
pub mod cli;
pub mod complex;
pub mod coning;
pub mod diagram;
pub mod engine;
pub mod oracle;
pub mod simplex;
pub mod tda;

pub use annotation::{AnnotationMatrix, ElementId, Timestamp, Z2Vec};
pub use complex::{SimplicialComplex, VertexMap};
pub use diagram::{bottleneck, DiagramPoint, PersistenceDiagram};
pub use engine::{
    ElementaryOp, Engine, EngineError, EngineOptions, Filtration, OpKind, PersistencePair,
};
pub use simplex::{Simplex, VertexId};
