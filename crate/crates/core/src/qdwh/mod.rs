//! QDWH iteration for the matrix sign function: weights, a dense reference
//! implementation, the HODLR driver, and accuracy metrics.

mod dense;
mod hodlr;
mod metrics;
mod params;

pub use dense::{dense_qdwh, dense_qdwh_with, DenseQdwh, QrMode};
pub use hodlr::{hqdwh, HqdwhOptions, IterationInfo, ProjectorResult};
pub use metrics::{error_metrics, ErrorMetrics};
pub use params::{l_update, qdwh_params, Weights};
