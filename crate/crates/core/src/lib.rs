//! Exact simulation of interval exchange transformations with flips:
//! evaluation, signed Rauzy induction, component classification, orbit
//! tools and example constructions.

pub mod classify;
pub mod construct;
pub mod iet;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod orbits;
pub mod perm;
pub mod rauzy;
pub mod scalar;

pub use classify::{
    check_component_bound, classify, classify_iet, decompose, recombine, BlockDecomposition, Caps, ClassifyError,
    Component, ComponentKind, ComponentReport,
};
pub use construct::{cone_sample, construct_theorem_c, ConstructError, Construction, ConstructionSpec, Expected};
pub use iet::{Direction, Iet, IetError, Interval, Location, OneSidedLimitPoint, Side};
pub use io::{IetFile, IoError};
pub use matrix::IntMatrix;
pub use orbits::{
    first_return, orbit, periodic_components_oracle, rigid_partition, saddle_connections, support_distance,
    FirstReturn, OracleCaps, OracleReport, OrbitError, PeriodicComponent, RigidPartition, SaddleConnection,
};
pub use perm::{PermError, SignedPermutation};
pub use rauzy::{
    finite_expansion, forward_set, rauzy_map, rauzy_matrix, rauzy_step, rauzy_type, RauzyError, RauzyStepRecord,
    RauzyTrajectory, RauzyType, StepKind,
};
pub use scalar::{Basis, Scalar, ScalarError, ScalarRepr};
