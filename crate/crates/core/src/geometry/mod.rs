//! Closed curves and surfaces carrying the differential data that kernel
//! assembly needs: positions, outward normals, curvature and quadrature
//! weights.

mod contour;
mod mesh;
mod nodes;
mod rounded;

pub use contour::{Contour2D, Harmonic, ShapeSpec};
pub use mesh::{make_ellipsoid_mesh, make_sphere_mesh, SurfaceMesh3D};
pub use nodes::NodeSet2D;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension `{name}` must be positive and finite, got {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },
    #[error("corner radius {radius} cannot round a {width} x {height} rectangle")]
    UnroundableCorner {
        radius: f64,
        width: f64,
        height: f64,
    },
    #[error("contour is not a simple, positively oriented smooth curve: {0}")]
    InvalidContour(String),
    #[error("node count {0} must be even and at least 16")]
    TooFewNodes(usize),
    #[error("parameter {0} outside [0, 2pi)")]
    ParameterOutOfRange(f64),
    #[error("mesh is not closed: edge ({0}, {1}) is shared by {2} triangles")]
    OpenMesh(usize, usize, usize),
    #[error("mesh is not consistently oriented at edge ({0}, {1})")]
    NonOrientable(usize, usize),
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("triangle {0} references a missing vertex")]
    BadIndex(usize),
    #[error("mesh orientation is inward (signed volume {0})")]
    InwardOrientation(f64),
}

#[inline]
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
