//! Exact orbit computations for finite groups of Lie type acting on the
//! singular points of quadratic modules, with a spinor toolkit and a
//! verification front end.

pub mod cases;
pub mod error;
pub mod field;
pub mod groups;
pub mod matrix;
pub mod orbitscan;
pub mod poly;
pub mod quadform;
pub mod spinor;
pub mod verify;

pub use error::{OrbitaError, Result};
pub use field::{Field, FieldElement, FieldSpec};
pub use matrix::{canonical_point, Matrix, PointKey, ProjectivePoint, Spectrum};
pub use poly::Poly;
pub use quadform::{QuadraticForm, QuadricType};
