//! Forced crystalline curvature flow of coordinate polyrectangles in a
//! chessboard medium, and the homogenized motion obtained as the cell size
//! goes to zero.

pub mod calibrability;
pub mod cracking;
pub mod effective;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod medium;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` instantiation of [`medium::ChessboardMedium`].
pub type Medium = medium::ChessboardMedium<f64>;

/// `f64` instantiation of [`geometry::Polyrectangle`].
pub type Polyrectangle = geometry::Polyrectangle<f64>;
