use serde::Serialize;
use specproj::qdwh::{ErrorMetrics, IterationInfo};

/// JSON document written by `project` and `verify`; field order is stable.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub input: InputInfo,
    pub parameters: Parameters,
    pub iterations: usize,
    pub history: Vec<IterationInfo>,
    pub totals: Totals,
    pub errors: Option<ErrorMetrics>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub file: String,
    pub n: usize,
    pub b: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Parameters {
    pub n_min: usize,
    pub eps: f64,
    pub delta: f64,
    pub shift: f64,
    pub alpha: f64,
    pub l0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub wall_ms: f64,
    pub max_rank: usize,
    pub memory_bytes: usize,
    pub trace: f64,
}

pub const RANKSCAN_HEADER: &str = "gap,eps,max_rank,e_id,e_trace,e_sp,decay_margin";
pub const BENCH_HEADER: &str = "n,b,wall_ms,memory_bytes,max_rank";
