//! Differential 1-forms on Euclidean pieces glued along affine
//! diffeomorphisms.

pub mod cli;
pub mod equal;
pub mod expr;
pub mod fibre;
pub mod forms;
pub mod linalg;
pub mod map;
pub mod metric;
pub mod parse;
pub mod poly;
pub mod scalar;
pub mod scene;
pub mod space;
