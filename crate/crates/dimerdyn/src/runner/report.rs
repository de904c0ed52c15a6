//! The JSON comparison report emitted next to the CSV frames.

use serde::Serialize;

use crate::qhd::TimeScales;

use super::detect::{Detection, DetectionConfig};

#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub omega: f64,
    pub gap: f64,
    pub detuning: f64,
    pub coupling: f64,
    pub alpha_bar_re: f64,
    pub alpha_bar_im: f64,
    pub n_max: usize,
    pub nbar: f64,
}

/// γ₀ under each convention plus the measured second moment.
#[derive(Debug, Clone, Serialize)]
pub struct GammaEcho {
    pub operator: f64,
    pub eq21: f64,
    pub doubled: f64,
    pub gamma2_operator: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateTable {
    pub omega1: f64,
    pub omega2: f64,
    pub omega2_imaginary: bool,
    pub t_plus_inv: f64,
    pub t_minus_inv: f64,
    pub time_scales: TimeScales,
}

/// Closure-vs-exact deviation for one γ convention.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionDeviation {
    pub convention: String,
    pub max_abs_dsz_in_window: Option<f64>,
    pub max_abs_dsz_overall: f64,
}

/// How far the two correlator forms drift from pure imaginarity over the run.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelatorEcho {
    pub max_abs_re_manuscript: f64,
    pub max_abs_re_symmetrized: f64,
    pub max_abs_im_symmetrized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationEcho {
    pub n_max: usize,
    pub max_tail_mass: f64,
    pub warning: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleEcho {
    pub times: Vec<f64>,
    pub max_state_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub params: ParamsEcho,
    pub gamma: GammaEcho,
    pub selected_convention: String,
    /// Validity window t* = 1/(2πg); absent for g = 0.
    pub window_t_star: Option<f64>,
    pub deviations: Vec<ConventionDeviation>,
    pub detection: Detection,
    pub detection_config: DetectionConfig,
    /// 2π√γ₀/g with the operator γ₀; absent for g = 0.
    pub predicted_revival_time: Option<f64>,
    pub rates: RateTable,
    pub correlator: CorrelatorEcho,
    pub truncation: TruncationEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<OracleEcho>,
}
