//! Solve traces and their JSON form.

use crate::cost::CostSnapshot;
use serde::{Deserialize, Serialize};

/// The configuration echoed into a trace. Ground-truth tensors are never
/// serialized; only scalar knobs appear here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "lowercase")]
pub enum TraceConfig {
    Sgd {
        rank: usize,
        iters: usize,
        eta: f64,
        zeta0: f64,
        zeta1: f64,
        tau: f64,
        rank_tol: f64,
        /// eta within the convergence-guarantee range and tau tied to it.
        theorem_mode: bool,
    },
    Tnn {
        lambda: f64,
        rho: f64,
        iters: usize,
    },
}

/// One iteration row. Ground-truth-dependent fields are present only on
/// instrumented runs. `zeta` is the sparse threshold in effect (for the
/// nuclear-norm baseline: lambda over the current penalty).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IterRecord {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_inf_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_inf_s: Option<f64>,
    pub zeta: f64,
    pub ms: f64,
    pub cost: CostSnapshot,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_violations: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rse_final: Option<f64>,
    /// Steps actually taken (early stop can end below the configured count).
    pub iters: usize,
    pub wall_ms: f64,
}

/// Per-iteration instrumentation of one solve. Row k = 0 describes the
/// initialization; row k describes the state after step k.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SgdTrace {
    pub config: TraceConfig,
    pub iterations: Vec<IterRecord>,
    pub result: TraceResult,
}

impl SgdTrace {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Final relative-error sequence, for rate fits; empty without truth.
    pub fn rse_series(&self) -> Vec<(usize, f64)> {
        self.iterations
            .iter()
            .filter_map(|r| r.rse.map(|v| (r.k, v)))
            .collect()
    }
}
