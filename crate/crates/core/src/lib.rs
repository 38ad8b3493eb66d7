//! Secant intersection graphs of Hermitian unitals and certificates for
//! monochromatic-triangle lower bounds on their edge colourings.

pub mod blocks;
pub mod certificate;
pub mod certify;
pub mod field;
pub mod geometry;
pub mod graph;
pub mod intersection;
pub mod search;
pub mod triangles;

pub use certificate::{Certificate, Outcome};
pub use field::{Elem, Field};
pub use geometry::{ProjectivePlane, UnitalIncidence};
pub use graph::Graph;
pub use intersection::IntersectionGraph;
pub use triangles::TriangleFamily;
