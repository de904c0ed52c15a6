//! JSON run configuration. Unknown keys are rejected so a typo fails fast
//! instead of silently running the default.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::JcmParams;
use crate::qhd::GammaConvention;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Compare,
    Observables,
    Wavepacket,
    Sweep,
    Rates,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::Compare => "compare",
            Scenario::Observables => "observables",
            Scenario::Wavepacket => "wavepacket",
            Scenario::Sweep => "sweep",
            Scenario::Rates => "rates",
        }
    }
}

/// ᾱ as a plain real number or an explicit [re, im] pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum AlphaBar {
    Real(f64),
    Complex([f64; 2]),
}

impl AlphaBar {
    pub fn value(self) -> Complex64 {
        match self {
            AlphaBar::Real(re) => Complex64::new(re, 0.0),
            AlphaBar::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if self.t_end.is_nan() || self.t_start.is_nan() || self.t_end <= self.t_start {
            return Err(Error::Config(format!(
                "t_end = {} must exceed t_start = {}",
                self.t_end, self.t_start
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::Config("n_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.n_samples;
        (0..n)
            .map(|k| {
                self.t_start + (self.t_end - self.t_start) * k as f64 / (n - 1) as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitFlags {
    pub frames: bool,
    pub report: bool,
    pub wavepacket: bool,
    /// Cross-check the block propagator against the dense oracle at a few
    /// sample times (guarded by DIMERDYN_MAX_DIM).
    pub oracle_check: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags {
            frames: true,
            report: true,
            wavepacket: false,
            oracle_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSweep {
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub steps: usize,
}

impl Default for RatesSweep {
    fn default() -> Self {
        RatesSweep {
            alpha_start: 0.2,
            alpha_end: 10.0,
            steps: 197,
        }
    }
}

fn default_omega() -> f64 {
    1.0
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_convention() -> GammaConvention {
    GammaConvention::Doubled
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default = "default_omega")]
    pub omega: f64,
    pub coupling: f64,
    #[serde(default)]
    pub detuning: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
    pub alpha_bar: AlphaBar,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub time: Option<TimeGrid>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub emit: EmitFlags,
    #[serde(default = "default_convention")]
    pub gamma_convention: GammaConvention,
    /// Slice times for the wavepacket scenario; defaults to five equally
    /// spaced slices across the run.
    #[serde(default)]
    pub wavepacket_times: Option<Vec<f64>>,
    /// ᾱ values for the sweep scenario.
    #[serde(default)]
    pub sweep_alpha: Option<Vec<f64>>,
    /// ᾱ range for the rates scenario.
    #[serde(default)]
    pub rates_sweep: Option<RatesSweep>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = &self.time {
            t.validate()?;
        }
        if let (Some(d), Some(g)) = (self.detuning, self.gap) {
            if (g - (self.omega + d)).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "gap = {g} inconsistent with omega + detuning = {}",
                    self.omega + d
                )));
            }
        }
        if self.scenario == Scenario::Sweep
            && self.sweep_alpha.as_ref().is_none_or(|v| v.is_empty())
        {
            return Err(Error::Config(
                "sweep scenario needs a non-empty sweep_alpha list".into(),
            ));
        }
        Ok(())
    }

    pub fn detuning_value(&self) -> f64 {
        match (self.detuning, self.gap) {
            (Some(d), _) => d,
            (None, Some(g)) => g - self.omega,
            (None, None) => 0.0,
        }
    }

    pub fn jcm_params(&self) -> Result<JcmParams> {
        let alpha = self.alpha_bar.value();
        match self.n_max {
            Some(n) => JcmParams::with_cutoff(
                self.omega,
                self.detuning_value(),
                self.coupling,
                alpha,
                n,
            ),
            None => JcmParams::new(self.omega, self.detuning_value(), self.coupling, alpha),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses() {
        let cfg = RunConfig::from_json(
            r#"{"scenario": "compare", "coupling": 0.25, "alpha_bar": 3.0}"#,
        )
        .unwrap();
        assert_eq!(cfg.scenario, Scenario::Compare);
        assert_eq!(cfg.omega, 1.0);
        assert_eq!(cfg.detuning_value(), 0.0);
        assert_eq!(cfg.gamma_convention, GammaConvention::Doubled);
    }

    #[test]
    fn unknown_keys_rejected() {
        let res = RunConfig::from_json(
            r#"{"scenario": "compare", "coupling": 0.25, "alpha_bar": 3.0, "couplnig": 1.0}"#,
        );
        assert!(res.is_err());
    }

    #[test]
    fn inconsistent_gap_rejected() {
        let res = RunConfig::from_json(
            r#"{"scenario": "compare", "coupling": 0.25, "alpha_bar": 3.0,
                "detuning": 0.1, "gap": 1.3}"#,
        );
        assert!(res.is_err());
    }

    #[test]
    fn bad_time_grid_rejected() {
        let res = RunConfig::from_json(
            r#"{"scenario": "compare", "coupling": 0.25, "alpha_bar": 3.0,
                "time": {"t_start": 1.0, "t_end": 0.5, "n_samples": 100}}"#,
        );
        assert!(res.is_err());
    }

    #[test]
    fn complex_alpha_accepted() {
        let cfg = RunConfig::from_json(
            r#"{"scenario": "observables", "coupling": 0.1, "alpha_bar": [1.0, 0.5]}"#,
        )
        .unwrap();
        let a = cfg.alpha_bar.value();
        assert_eq!((a.re, a.im), (1.0, 0.5));
    }

    #[test]
    fn sweep_requires_values() {
        let res = RunConfig::from_json(
            r#"{"scenario": "sweep", "coupling": 0.25, "alpha_bar": 3.0}"#,
        );
        assert!(res.is_err());
    }
}
