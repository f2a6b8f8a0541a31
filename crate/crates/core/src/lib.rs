//! Trees of simplicial meshes of mixed dimension linked by containment maps.

pub mod apps;
pub mod envelope;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod io;
pub mod mesh;
pub mod multimesh;
pub mod ops;
pub mod scalar;
pub mod scheduler;
pub mod shapes;
pub mod simplex;

pub use envelope::Envelope;
pub use error::MeshError;
pub use invariants::{check_invariants, Invariant, InvariantSet, Phase};
pub use mesh::{Dart, Mesh, ValidityReport};
pub use multimesh::{ContainmentMap, EdgeOp, MultiMesh, NodeId, Propagation};
pub use ops::{OpKind, OperationRecord, Placement, Rollback};
pub use scalar::Scalar;
pub use scheduler::{Candidate, Pass, PassStats, Scheduler};
pub use simplex::{FacetId, Simplex, VertexId};

pub type Mesh64 = Mesh<f64>;
pub type Mesh32 = Mesh<f32>;
pub type MultiMesh64 = MultiMesh<f64>;
pub type MultiMesh32 = MultiMesh<f32>;
