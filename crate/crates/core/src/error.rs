use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate projection: camera-space depth {depth:e} is too close to zero")]
    DegenerateProjection { depth: f64 },
    #[error("point ({x}, {y}, {z}) lies outside the field domain")]
    OutOfDomain { x: f64, y: f64, z: f64 },
    #[error("interpolated field direction vanished and no non-zero neighbor exists")]
    DegenerateField,
    #[error("region mask selects no triangle")]
    EmptyRegion,
    #[error("fiber has {points} point(s), at least 2 required")]
    TooShort { points: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("k = {k} exceeds the number of points ({points})")]
    KTooLarge { k: usize, points: usize },
    #[error("every surface sample lies behind the camera")]
    AllSamplesBehindCamera,
    #[error("root {index} lies outside the field domain")]
    RootOutOfDomain { index: usize },
    #[error("no roots to grow")]
    EmptyRoots,
    #[error("mesh is not watertight: {edges} edge(s) not shared by exactly two triangles")]
    NotWatertight { edges: usize },
    #[error("length table has no entry for root {index}")]
    MissingRoot { index: usize },
    #[error("empty {what}")]
    EmptySet { what: &'static str },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("both voxel volumes are empty")]
    BothEmpty,
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}
