//! Geometric core for single-view, fiber-level eyebrow reconstruction.
//!
//! An eyebrow is a set of fibers grown from roots on the brow-bone surface
//! through a 3D orientation field until an ending policy stops them:
//!
//! 1. [`rootfinder`] turns a root density map into 3D roots (threshold,
//!    DBSCAN for the cluster count, K-Means for the centers, lifting onto
//!    the head mesh through the camera).
//! 2. [`growth`] steps fibers through an [`OrientationField`] with direction
//!    smoothing and a pluggable [`growth::EndingPolicy`].
//! 3. [`metrics`] scores a reconstruction against ground truth (NDE, DCD,
//!    MLE, FDO and voxel IoU).
//! 4. [`synthgen`] produces deterministic synthetic ground-truth cases.
//! 5. [`io`] reads and writes every artifact format.
//!
//! Coordinates are head-normalized: the face width spans `[-1, 1]`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod camera;
pub mod density;
pub mod encoding;
pub mod error;
pub mod field;
pub mod geom;
pub mod growth;
pub mod io;
pub mod mesh;
pub mod metrics;
pub mod rootfinder;
pub mod synthgen;

pub use camera::{Camera, Projection};
pub use density::DensityMap;
pub use encoding::positional_encoding;
pub use error::{Error, Result};
pub use field::{ArcField, ConstantField, OrientationField, SwirlField, VoxelGridField};
pub use geom::{arc_length, resample_fiber, Fiber, FiberSet, Point2, Point3, RootSet, UnitVec3, Vec3};
pub use mesh::TriMesh;

/// Growth step `s̄` in head-normalized units.
pub const DEFAULT_STEP: f64 = 0.014;

/// Number of points per fiber in the reference eyebrow data.
pub const FIBER_POINT_COUNT: usize = 20;
