//! Exact subspace algebra, dimension counts and float metrics on
//! Grassmannians.

mod counts;
pub mod linalg;
mod metric;
mod subspace;

pub use counts::{exceptional_locus_dim, grassmann_dim, schubert_dim};
pub use metric::{slab_membership, AffinePlane, Metric, Slab};
pub use subspace::{proj_dim, Subspace};
