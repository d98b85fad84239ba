//! Exact construction and verification of the Picard-Fuchs system of the
//! Kummer surface family `K(p, q, r)`.

pub mod algebra;
pub mod series;
pub mod operator;
pub mod gkz;
pub mod pfaffian;
pub mod geometry;
pub mod transport;
pub mod report;
