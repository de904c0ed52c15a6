//! Shared fixtures for the integration suites: the two reference parameter
//! sets (weak coupling / large amplitude and strong coupling / small
//! amplitude) and a canned exact run with measured moments.
#![allow(dead_code)]

use dimerdyn::exact::{
    build_rwa_hamiltonian, evolve_exact, measure_with_gamma, PropagationResult, QhdMoments,
    RwaHamiltonian,
};
use dimerdyn::model::{initial_state, JcmParams, StateVector};
use dimerdyn::observables::MomentSet;
use num_complex::Complex64;

pub struct ReferenceRun {
    pub params: JcmParams,
    pub hamiltonian: RwaHamiltonian,
    pub initial: StateVector,
    pub times: Vec<f64>,
    pub propagation: PropagationResult,
    pub moments: Vec<(MomentSet, QhdMoments)>,
}

impl ReferenceRun {
    pub fn sz_exact(&self) -> Vec<f64> {
        self.moments.iter().map(|(m, _)| m.s_z).collect()
    }
}

pub fn jcm(g: f64, nbar: f64, delta: f64) -> JcmParams {
    JcmParams::new(1.0, delta, g, Complex64::new(nbar.sqrt(), 0.0)).unwrap()
}

/// Weak coupling, large amplitude: g = 0.025, ⟨a†a⟩₀ = 49, δ = 0.
pub fn params_weak() -> JcmParams {
    jcm(0.025, 49.0, 0.0)
}

/// Strong coupling, small amplitude: g = 0.25, ⟨a†a⟩₀ = 9, δ = 0.
pub fn params_strong() -> JcmParams {
    jcm(0.25, 9.0, 0.0)
}

pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect()
}

pub fn reference_run(params: JcmParams, t_end: f64, n_samples: usize) -> ReferenceRun {
    let initial = initial_state(&params).unwrap();
    let hamiltonian = build_rwa_hamiltonian(&params).unwrap();
    let times = uniform_grid(t_end, n_samples);
    let propagation = evolve_exact(&hamiltonian, &initial, &times).unwrap();
    let moments = propagation
        .states
        .iter()
        .zip(&times)
        .map(|(s, &t)| measure_with_gamma(s, t))
        .collect();
    ReferenceRun {
        params,
        hamiltonian,
        initial,
        times,
        propagation,
        moments,
    }
}

/// Revival period 2π√γ₀/g with the operator γ₀ = n̄ + 1/2.
pub fn predicted_revival(params: &JcmParams) -> f64 {
    2.0 * std::f64::consts::PI * (params.nbar() + 0.5).sqrt() / params.coupling
}
