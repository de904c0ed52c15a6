//! Collapse and revival detection on an inversion time series.
//!
//! The oscillation envelope is proxied by the rolling max−min over a window
//! of two carrier periods. Collapse is the first time the envelope drops
//! below `collapse_fraction` of its initial value; revival is the first local
//! maximum of the smoothed envelope after it next exceeds
//! `revival_fraction` (the 30% crossing itself sits on the rising flank of
//! the revival lobe, well before the lobe peak that the period formula
//! predicts).

use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DetectionConfig {
    /// Rolling-window length in time units (about two carrier periods).
    pub window: f64,
    pub collapse_fraction: f64,
    pub revival_fraction: f64,
}

impl DetectionConfig {
    /// Window from the inversion carrier frequency (rad/time).
    pub fn for_carrier(carrier: f64) -> Self {
        let period = if carrier > 0.0 {
            2.0 * std::f64::consts::PI / carrier
        } else {
            1.0
        };
        DetectionConfig {
            window: 2.0 * period,
            collapse_fraction: 0.1,
            revival_fraction: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Detection {
    pub collapse_time: Option<f64>,
    pub revival_time: Option<f64>,
    pub initial_amplitude: f64,
}

/// Detect collapse and revival times of an oscillating series on a uniform
/// grid. Series without a collapse (constant, too short, or never quiet)
/// report `None` for both fields.
pub fn detect_collapse_revival(
    times: &[f64],
    series: &[f64],
    cfg: &DetectionConfig,
) -> Detection {
    let none = Detection {
        collapse_time: None,
        revival_time: None,
        initial_amplitude: 0.0,
    };
    if times.len() != series.len() || times.len() < 4 {
        return none;
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let half = ((cfg.window / dt / 2.0).round() as usize).max(1);
    if times.len() < 2 * half + 1 {
        return none;
    }

    let amp: Vec<f64> = (0..times.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(times.len() - 1);
            let w = &series[lo..=hi];
            let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
            max - min
        })
        .collect();

    let initial = amp[half];
    let collapse_idx = (half..amp.len()).find(|&i| amp[i] < cfg.collapse_fraction * initial);
    let Some(ci) = collapse_idx else {
        return Detection {
            collapse_time: None,
            revival_time: None,
            initial_amplitude: initial,
        };
    };

    // smooth the envelope before peak-walking so carrier ripple does not
    // stall the ascent
    let smooth: Vec<f64> = (0..amp.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(amp.len() - 1);
            amp[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect();

    let crossing = (ci..amp.len()).find(|&i| amp[i] > cfg.revival_fraction * initial);
    let revival = crossing.map(|start| {
        let mut k = start;
        while k + 1 < smooth.len() && smooth[k + 1] >= smooth[k] {
            k += 1;
        }
        times[k]
    });

    Detection {
        collapse_time: Some(times[ci]),
        revival_time: revival,
        initial_amplitude: initial,
    }
}
