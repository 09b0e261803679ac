//! Three-dimensional body-and-cad frameworks.

mod constraint;
mod frame;
mod geometry;
mod rows;

use thiserror::Error;

pub use constraint::{CadConstraint, ConstraintKind, Geometry};
pub use frame::{build_primitive_frame, Body, CadFramework, PrimitiveFrame};
pub use geometry::{Direction3, LineGeom, Num, PlaneGeom, Point3, Vec3};
pub use rows::{
    angular_row, blind_row, complement_pair, contract, point_point_coincidence_rows, Flavor, PrimitiveConstraint, Twist,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CadError {
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("vectors are parallel, so their angle gives no angular row")]
    ParallelVectors,
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("constraint `{constraint}`: {reason}")]
    Malformed { constraint: String, reason: String },
    #[error("constraint `{0}` references an unknown body")]
    UnknownBody(String),
    #[error("constraint `{0}` joins a body to itself")]
    SameBody(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("framework has no bodies")]
    NoBodies,
}
