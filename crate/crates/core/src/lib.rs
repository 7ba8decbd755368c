//! Multidimensional cluster-error-correcting codes.

pub mod bits;
pub mod codec;
pub mod coloring;
pub mod component;
pub mod field;
pub mod lee;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod shape;
