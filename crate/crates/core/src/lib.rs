//! Exceptional-set estimates for orthogonal projections.
//!
//! The crate is layered bottom-up: [`ratmath`] supplies exact rationals,
//! [`grassmann`] exact subspace algebra and metrics, [`bounds`] and
//! [`lowerbounds`] the upper and lower bound engines for `T(a,s)`,
//! [`brascamplieb`] Brascamp-Lieb exponents over finite subspace families,
//! and [`discretized`] the delta-discretized simulators.

pub mod bounds;
pub mod brascamplieb;
pub mod discretized;
pub mod error;
pub mod grassmann;
pub mod lowerbounds;
pub mod ratmath;

pub use bounds::{BoundValue, Problem, Source};
pub use discretized::{GridExample, PointSet};
pub use error::{Error, Result};
pub use grassmann::{AffinePlane, Metric, Slab, Subspace};
pub use ratmath::{parse_rational, rat, Rational};
