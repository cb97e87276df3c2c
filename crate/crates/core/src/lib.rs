//! Exact computations over finite metric spaces: Chebyshev centers and
//! their towers, isometry groups and metric quotients, the Kantorovich
//! metric, central measures of the first and second kind, and the
//! canonical dense-subset ordering.
//!
//! All arithmetic is exact rational; there is no floating point anywhere
//! in the crate.

pub mod central;
pub mod io;
pub mod isometry;
pub mod lp;
pub mod metric;
pub mod quotient;
pub mod rat;
pub mod sampler;
pub mod spaces;
pub mod transport;

pub use metric::FiniteMetricSpace;
pub use rat::Rat;
pub use transport::Measure;
