//! Scenario orchestration: run a configuration, emit deterministic CSV time
//! series and a JSON report.

pub mod config;
pub mod detect;
pub mod output;
pub mod report;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exact::{
    build_rwa_hamiltonian, evolve_brute, evolve_exact, measure_with_gamma, QhdMoments,
};
use crate::model::{initial_state, JcmParams};
use crate::observables::{
    correlator_beta_r, frame_from_moments, validate_frame, MomentSet, ObservableFrame,
};
use crate::qhd::{
    convention_constants, inversion_analytic, product_initial_qhd, qhd_propagate, rates,
    time_scales, Frequency, GammaConvention, QhdConstants,
};
use crate::wavepacket::{default_grid, wavepacket_density};

pub use config::{RunConfig, Scenario};
pub use detect::{detect_collapse_revival, Detection, DetectionConfig};
pub use report::ComparisonReport;

use output::FrameRow;
use report::{
    ConventionDeviation, CorrelatorEcho, GammaEcho, OracleEcho, ParamsEcho, RateTable,
    TruncationEcho,
};

/// Everything a finished run hands back to the caller (the CLI prints a
/// digest; tests inspect the full report).
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub report: Option<ComparisonReport>,
}

/// Execute one configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::Compare | Scenario::Observables | Scenario::Wavepacket => simulate(cfg),
        Scenario::Sweep => run_sweep(cfg),
        Scenario::Rates => run_rates(cfg),
    }
}

/// Inversion carrier frequency used for envelope windows: 2g√n̄ of the exact
/// dynamics (falls back to ω when the coupling or displacement vanishes).
fn carrier_frequency(params: &JcmParams) -> f64 {
    let nbar = params.nbar();
    if params.coupling > 0.0 && nbar > 0.25 {
        2.0 * params.coupling * nbar.sqrt()
    } else {
        params.omega
    }
}

/// Default time grid: up to three revival periods for compare/observables,
/// one for wavepacket runs, sampled at least 20 points per vibrational
/// period and 40 per inversion period.
fn default_time_grid(params: &JcmParams, scenario: Scenario) -> config::TimeGrid {
    let gamma_op = params.nbar() + 0.5;
    let t_rev = if params.coupling > 0.0 {
        2.0 * std::f64::consts::PI * gamma_op.sqrt() / params.coupling
    } else {
        20.0 * 2.0 * std::f64::consts::PI / params.omega
    };
    let t_end = match scenario {
        Scenario::Wavepacket => 1.05 * t_rev,
        _ => 3.0 * t_rev,
    };
    let dt_vib = 2.0 * std::f64::consts::PI / params.omega / 20.0;
    let dt_inv = 2.0 * std::f64::consts::PI / carrier_frequency(params) / 40.0;
    let dt = dt_vib.min(dt_inv);
    let n_samples = ((t_end / dt).ceil() as usize + 1).max(2);
    config::TimeGrid {
        t_start: 0.0,
        t_end,
        n_samples,
    }
}

struct ConventionRun {
    convention: GammaConvention,
    constants: QhdConstants,
    /// Matrix-exponential route, evaluated on the full grid.
    sz_matrix: Vec<f64>,
    /// Closed-form route on the full grid.
    sz_analytic: Vec<f64>,
}

fn run_convention(
    conv: GammaConvention,
    m0: &MomentSet,
    q0: &QhdMoments,
    params: &JcmParams,
    times: &[f64],
) -> ConventionRun {
    let constants = convention_constants(m0, q0, params, conv);
    let x0 = product_initial_qhd(m0.s_z, &constants);
    let frames = qhd_propagate(&x0, &constants, times);
    let sz_matrix = frames.iter().map(|f| f.sz_re()).collect();
    let sz_analytic = times
        .iter()
        .map(|&t| inversion_analytic(t, &constants, m0.s_z))
        .collect();
    ConventionRun {
        convention: conv,
        constants,
        sz_matrix,
        sz_analytic,
    }
}

fn simulate(cfg: &RunConfig) -> Result<RunOutcome> {
    let params = cfg.jcm_params()?;
    let s0 = initial_state(&params)?;
    let h = build_rwa_hamiltonian(&params)?;
    let grid = match cfg.time {
        Some(t) => t,
        None => default_time_grid(&params, cfg.scenario),
    };
    grid.validate()?;
    let times = grid.times();

    let prop = evolve_exact(&h, &s0, &times)?;
    if prop.max_tail_mass > 1e-4 {
        return Err(Error::LeakageEscalated {
            leak: prop.max_tail_mass,
        });
    }
    if prop.tail_warning() {
        eprintln!(
            "warning: truncation tail mass reached {:.3e} (threshold 1e-6)",
            prop.max_tail_mass
        );
    }

    let moments: Vec<(MomentSet, QhdMoments)> = prop
        .states
        .iter()
        .zip(&times)
        .map(|(s, &t)| measure_with_gamma(s, t))
        .collect();
    let (m0, q0) = moments[0];
    m0.validate()?;

    let mut frames: Vec<ObservableFrame> = Vec::with_capacity(moments.len());
    let mut corr_echo = CorrelatorEcho {
        max_abs_re_manuscript: 0.0,
        max_abs_re_symmetrized: 0.0,
        max_abs_im_symmetrized: 0.0,
    };
    for (m, _) in &moments {
        m.validate()?;
        let frame = frame_from_moments(m, params.omega, params.gap);
        validate_frame(&frame, params.omega, params.gap)?;
        let corr = correlator_beta_r(m);
        corr_echo.max_abs_re_manuscript = corr_echo.max_abs_re_manuscript.max(corr.manuscript.re.abs());
        corr_echo.max_abs_re_symmetrized = corr_echo.max_abs_re_symmetrized.max(corr.symmetrized.re.abs());
        corr_echo.max_abs_im_symmetrized = corr_echo.max_abs_im_symmetrized.max(corr.symmetrized.im.abs());
        frames.push(frame);
    }

    let conventions = [
        GammaConvention::Operator,
        GammaConvention::Eq21,
        GammaConvention::Doubled,
    ];
    let runs: Vec<ConventionRun> = conventions
        .iter()
        .map(|&c| run_convention(c, &m0, &q0, &params, &times))
        .collect();
    let selected = runs
        .iter()
        .position(|r| r.convention == cfg.gamma_convention)
        .expect("selected convention always present");

    let sz_exact: Vec<f64> = moments.iter().map(|(m, _)| m.s_z).collect();
    let t_star = if params.coupling > 0.0 {
        Some(1.0 / (2.0 * std::f64::consts::PI * params.coupling))
    } else {
        None
    };

    let deviations: Vec<ConventionDeviation> = runs
        .iter()
        .map(|r| {
            let mut max_in = f64::NEG_INFINITY;
            let mut max_all = 0.0_f64;
            for (i, &t) in times.iter().enumerate() {
                let d = (r.sz_matrix[i] - sz_exact[i]).abs();
                max_all = max_all.max(d);
                if t_star.is_some_and(|w| t < w) {
                    max_in = max_in.max(d);
                }
            }
            ConventionDeviation {
                convention: r.convention.label().to_string(),
                max_abs_dsz_in_window: if max_in.is_finite() { Some(max_in) } else { None },
                max_abs_dsz_overall: max_all,
            }
        })
        .collect();

    let det_cfg = DetectionConfig::for_carrier(carrier_frequency(&params));
    let detection = detect_collapse_revival(&times, &sz_exact, &det_cfg);

    let gamma_echo = GammaEcho {
        operator: m0.gamma,
        eq21: m0.n_occ,
        doubled: 2.0 * m0.n_occ,
        gamma2_operator: q0.gamma_sq,
    };
    let predicted_revival = if params.coupling > 0.0 {
        Some(2.0 * std::f64::consts::PI * m0.gamma.sqrt() / params.coupling)
    } else {
        None
    };

    let sel = &runs[selected];
    let r = rates(&sel.constants);
    let rate_table = RateTable {
        omega1: r.omega1,
        omega2: r.omega2.magnitude(),
        omega2_imaginary: matches!(r.omega2, Frequency::Imaginary(_)),
        t_plus_inv: r.t_plus_inv,
        t_minus_inv: r.t_minus_inv,
        time_scales: time_scales(params.omega, params.coupling, m0.gamma),
    };

    let oracle_check = if cfg.emit.oracle_check {
        Some(oracle_distances(&h, &prop, &times)?)
    } else {
        None
    };

    let report = ComparisonReport {
        scenario: cfg.scenario.label().to_string(),
        params: ParamsEcho {
            omega: params.omega,
            gap: params.gap,
            detuning: params.detuning,
            coupling: params.coupling,
            alpha_bar_re: params.alpha_bar.re,
            alpha_bar_im: params.alpha_bar.im,
            n_max: params.n_max,
            nbar: params.nbar(),
        },
        gamma: gamma_echo,
        selected_convention: cfg.gamma_convention.label().to_string(),
        window_t_star: t_star,
        deviations,
        detection,
        detection_config: det_cfg,
        predicted_revival_time: predicted_revival,
        rates: rate_table,
        correlator: corr_echo,
        truncation: TruncationEcho {
            n_max: params.n_max,
            max_tail_mass: prop.max_tail_mass,
            warning: prop.tail_warning(),
        },
        oracle_check,
    };

    if cfg.emit.frames {
        let rows: Vec<FrameRow<'_>> = frames
            .iter()
            .enumerate()
            .map(|(i, frame)| FrameRow {
                frame,
                sz_exact: sz_exact[i],
                sz_qhd: sel.sz_matrix[i],
                sz_analytic: sel.sz_analytic[i],
            })
            .collect();
        output::write_frames_csv(&cfg.out_dir.join("frames.csv"), &rows)?;
    }

    if cfg.scenario == Scenario::Wavepacket || cfg.emit.wavepacket {
        emit_wavepacket_slices(cfg, &params, &h, &s0, &times)?;
    }

    if cfg.emit.report {
        output::write_json(&cfg.out_dir.join("report.json"), &report)?;
    }

    Ok(RunOutcome {
        out_dir: cfg.out_dir.clone(),
        report: Some(report),
    })
}

fn oracle_distances(
    h: &crate::exact::RwaHamiltonian,
    prop: &crate::exact::PropagationResult,
    times: &[f64],
) -> Result<OracleEcho> {
    let n = times.len();
    let picks: Vec<usize> = [n / 5, 2 * n / 5, 3 * n / 5, 4 * n / 5, n - 1]
        .into_iter()
        .filter(|&i| i < n)
        .collect();
    let s0 = &prop.states[0];
    let mut max_d = 0.0_f64;
    let mut used = Vec::new();
    for &i in &picks {
        // state at times[i] but evolved from t = times[0]
        let t = times[i] - times[0];
        let brute = evolve_brute(h, s0, t)?;
        let d: f64 = brute
            .amplitudes()
            .iter()
            .zip(prop.states[i].amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        max_d = max_d.max(d);
        used.push(times[i]);
    }
    Ok(OracleEcho {
        times: used,
        max_state_distance: max_d,
    })
}

#[derive(serde::Serialize)]
struct SliceManifestEntry {
    index: usize,
    t: f64,
    file: String,
}

fn emit_wavepacket_slices(
    cfg: &RunConfig,
    params: &JcmParams,
    h: &crate::exact::RwaHamiltonian,
    s0: &crate::model::StateVector,
    times: &[f64],
) -> Result<()> {
    let t_end = *times.last().unwrap();
    let slice_times: Vec<f64> = match &cfg.wavepacket_times {
        Some(ts) => ts.clone(),
        None => (0..5).map(|k| t_end * k as f64 / 4.0).collect(),
    };
    let grid = default_grid(params.alpha_bar.norm());
    let run = evolve_exact(h, s0, &slice_times)?;
    let mut manifest = Vec::new();
    for (idx, (state, &t)) in run.states.iter().zip(&slice_times).enumerate() {
        let slice = wavepacket_density(state, &grid, t)?;
        let file = format!("wavepacket_{idx:03}.csv");
        output::write_wavepacket_csv(&cfg.out_dir.join(&file), &slice)?;
        manifest.push(SliceManifestEntry { index: idx, t, file });
    }
    output::write_json(&cfg.out_dir.join("wavepacket_slices.json"), &manifest)?;
    Ok(())
}

#[derive(serde::Serialize)]
struct SweepEntry {
    alpha: f64,
    out_dir: String,
    max_abs_dsz_in_window: Option<f64>,
    collapse_time: Option<f64>,
    revival_time: Option<f64>,
    t_plus_inv: f64,
    t_minus_inv: f64,
}

fn run_sweep(cfg: &RunConfig) -> Result<RunOutcome> {
    let alphas = cfg.sweep_alpha.clone().unwrap_or_default();
    // sub-runs execute concurrently, each writing to its own subdirectory;
    // the summary merge below stays single-threaded
    let mut results: Vec<(f64, Result<RunOutcome>)> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = alphas
            .iter()
            .map(|&alpha| {
                let mut sub = cfg.clone();
                sub.scenario = Scenario::Compare;
                sub.alpha_bar = config::AlphaBar::Real(alpha);
                sub.sweep_alpha = None;
                sub.out_dir = cfg.out_dir.join(format!("sweep_alpha_{alpha}"));
                (alpha, scope.spawn(move || simulate(&sub)))
            })
            .collect();
        for (alpha, handle) in handles {
            results.push((alpha, handle.join().expect("sweep thread panicked")));
        }
    });
    let mut entries = Vec::new();
    for (alpha, result) in results {
        let outcome = result?;
        let report = outcome.report.expect("simulate always builds a report");
        let sel = report
            .deviations
            .iter()
            .find(|d| d.convention == report.selected_convention)
            .expect("selected convention deviation present");
        entries.push(SweepEntry {
            alpha,
            out_dir: outcome.out_dir.display().to_string(),
            max_abs_dsz_in_window: sel.max_abs_dsz_in_window,
            collapse_time: report.detection.collapse_time,
            revival_time: report.detection.revival_time,
            t_plus_inv: report.rates.t_plus_inv,
            t_minus_inv: report.rates.t_minus_inv,
        });
    }
    entries.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).unwrap());
    output::write_json(&cfg.out_dir.join("sweep_summary.json"), &entries)?;
    Ok(RunOutcome {
        out_dir: cfg.out_dir.clone(),
        report: None,
    })
}

#[derive(serde::Serialize)]
struct RatesReport {
    /// Largest swept ᾱ at which the two rates still coincide (1e-12).
    branch_point_alpha: Option<f64>,
    alpha_start: f64,
    alpha_end: f64,
    steps: usize,
}

/// Rate sweep over ᾱ with γ₀ = ᾱ² (the reading under which the branches
/// split exactly at ᾱ = 1).
fn run_rates(cfg: &RunConfig) -> Result<RunOutcome> {
    let sweep = cfg.rates_sweep.unwrap_or_default();
    let delta = cfg.detuning_value();
    let g = cfg.coupling;
    let mut lines = String::from(
        "alpha,gamma0,omega1,omega2_real,omega2_imag,t_plus_inv,t_minus_inv,sub_quantum\n",
    );
    let mut branch: Option<f64> = None;
    for k in 0..sweep.steps {
        let alpha = sweep.alpha_start
            + (sweep.alpha_end - sweep.alpha_start) * k as f64 / (sweep.steps - 1) as f64;
        let gamma0 = alpha * alpha;
        let c = QhdConstants::new(gamma0, gamma0 * gamma0 + gamma0, delta, g)?;
        let r = rates(&c);
        let (w2_re, w2_im) = match r.omega2 {
            Frequency::Real(w) => (w, 0.0),
            Frequency::Imaginary(y) => (0.0, y),
        };
        if (r.t_plus_inv - r.t_minus_inv).abs() < 1e-12 {
            branch = Some(alpha);
        }
        lines.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            output::fmt_float(alpha),
            output::fmt_float(gamma0),
            output::fmt_float(r.omega1),
            output::fmt_float(w2_re),
            output::fmt_float(w2_im),
            output::fmt_float(r.t_plus_inv),
            output::fmt_float(r.t_minus_inv),
            r.sub_quantum,
        ));
    }
    write_text(&cfg.out_dir.join("rates.csv"), &lines)?;
    output::write_json(
        &cfg.out_dir.join("rates_report.json"),
        &RatesReport {
            branch_point_alpha: branch,
            alpha_start: sweep.alpha_start,
            alpha_end: sweep.alpha_end,
            steps: sweep.steps,
        },
    )?;
    Ok(RunOutcome {
        out_dir: cfg.out_dir.clone(),
        report: None,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}
