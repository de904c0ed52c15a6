//! Model parameters, the physical-to-dimensionless reduction, the product
//! basis, and initial-state construction.
//!
//! The dimer is a pair of electronic levels `i = 0, 1` coupled to one harmonic
//! mode. Completing the square on each surface turns the physical parameters
//! into the dimensionless set used everywhere else: vibrational frequency ω,
//! electronic gap Ω, detuning δ = Ω − ω, coupling g, and the coherent
//! displacement ᾱ that doubles as the reorganization shift between the two
//! surface minima. ħ = 1 throughout.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Physical (unit-bearing) parameters of the two-surface dimer model.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalDimerParams {
    /// Bare electronic energies ε_i^(0) for i = 0, 1.
    pub bare_energies: [f64; 2],
    /// Energy gradients ∂ε_i/∂q at the reference geometry.
    pub energy_gradients: [f64; 2],
    /// Effective mass of the vibrational coordinate.
    pub mass: f64,
    /// Harmonic frequency of the mode.
    pub vib_frequency: f64,
    /// Coupling gradient ∂J/∂q between the two electronic states.
    pub coupling_gradient: f64,
}

impl PhysicalDimerParams {
    pub fn validate(&self) -> Result<()> {
        if self.mass.is_nan() || self.mass <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if self.vib_frequency.is_nan() || self.vib_frequency <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "vibrational frequency must be positive, got {}",
                self.vib_frequency
            )));
        }
        Ok(())
    }
}

/// Dimensionless model parameters of the rotating-wave dimer.
///
/// `detuning` is stored redundantly and must equal `gap - omega` exactly;
/// the constructor enforces this.
#[derive(Debug, Clone, Copy)]
pub struct JcmParams {
    /// Vibrational frequency ω (unit of time in dimensionless runs).
    pub omega: f64,
    /// Electronic gap Ω.
    pub gap: f64,
    /// Detuning δ = Ω − ω.
    pub detuning: f64,
    /// Electron-vibrational coupling g ≥ 0.
    pub coupling: f64,
    /// Initial coherent displacement ᾱ (complex allowed; the reference runs
    /// use real ᾱ ≥ 0, i.e. zero initial momentum).
    pub alpha_bar: Complex64,
    /// Fock cutoff; the basis holds n = 0..=n_max.
    pub n_max: usize,
}

impl JcmParams {
    /// Build a parameter set from (ω, δ, g, ᾱ), with the gap derived as ω + δ
    /// and the cutoff chosen by [`default_fock_cutoff`].
    pub fn new(omega: f64, detuning: f64, coupling: f64, alpha_bar: Complex64) -> Result<Self> {
        let n_max = default_fock_cutoff(alpha_bar.norm());
        Self::with_cutoff(omega, detuning, coupling, alpha_bar, n_max)
    }

    pub fn with_cutoff(
        omega: f64,
        detuning: f64,
        coupling: f64,
        alpha_bar: Complex64,
        n_max: usize,
    ) -> Result<Self> {
        let gap = omega + detuning;
        let p = JcmParams {
            omega,
            gap,
            // re-derived from the stored gap so the redundancy check holds
            // bit-exactly
            detuning: gap - omega,
            coupling,
            alpha_bar,
            n_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.detuning != self.gap - self.omega {
            return Err(Error::InvalidParameter(format!(
                "detuning {} != gap - omega = {}",
                self.detuning,
                self.gap - self.omega
            )));
        }
        if self.coupling.is_nan() || self.coupling < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling must be >= 0, got {}",
                self.coupling
            )));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter(
                "n_max must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Mean phonon number |ᾱ|² of the initial coherent state.
    pub fn nbar(&self) -> f64 {
        self.alpha_bar.norm_sqr()
    }

    /// Dimension of the truncated product basis, 2(n_max + 1).
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

/// Default Fock cutoff `ceil(|ᾱ|² + 8|ᾱ| + 10)`.
///
/// The Poisson tail of a coherent state beyond `n_max - 5` stays below 1e-8
/// for |ᾱ|² ≤ 100 with this rule; construction re-checks the actual tail.
pub fn default_fock_cutoff(alpha_abs: f64) -> usize {
    (alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0).ceil() as usize
}

/// Reduce physical dimer parameters to the dimensionless set.
///
/// Completing the square on each surface gives the renormalized energies
/// `E_i = ε_i^(0) + (ε_i')²/(2mω²)` and equilibrium shifts
/// `q_i = ε_i'/(mω²)`; the gap is Ω = E_1 − E_0, the displacement
/// ᾱ = (q_1 − q_0)·√(mω/2) (zero momentum offset), and the coupling
/// g = √(1/(2mω))·∂J/∂q.
pub fn reduce_physical_model(p: &PhysicalDimerParams) -> Result<JcmParams> {
    p.validate()?;
    let m = p.mass;
    let w = p.vib_frequency;
    let renorm = |i: usize| {
        let grad = p.energy_gradients[i];
        p.bare_energies[i] + grad * grad / (2.0 * m * w * w)
    };
    let gap = renorm(1) - renorm(0);
    let q = |i: usize| p.energy_gradients[i] / (m * w * w);
    let shift = q(1) - q(0);
    let alpha_bar = Complex64::new(shift * (m * w / 2.0).sqrt(), 0.0);
    let coupling = (1.0 / (2.0 * m * w)).sqrt() * p.coupling_gradient;
    JcmParams::new(w, gap - w, coupling.abs(), alpha_bar)
}

/// Label (electronic level, Fock number) of one product-basis state, with the
/// flat index `k = 2n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    pub electronic: usize,
    pub fock: usize,
}

impl BasisIndex {
    pub fn flatten(&self) -> usize {
        2 * self.fock + self.electronic
    }

    pub fn unflatten(k: usize) -> Self {
        BasisIndex {
            electronic: k % 2,
            fock: k / 2,
        }
    }
}

/// Complex amplitudes c_{i,n} over the product basis
/// |electronic i⟩ ⊗ |Fock n⟩, stored flat at `k = 2n + i`.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n_max: usize,
}

impl StateVector {
    /// Wrap raw amplitudes; enforces unit norm (1e-12) and the
    /// truncation-tail guard (mass above `n_max - 5` below 1e-8).
    pub fn new(amps: Vec<Complex64>, n_max: usize) -> Result<Self> {
        if amps.len() != 2 * (n_max + 1) {
            return Err(Error::InvalidParameter(format!(
                "amplitude length {} != 2(n_max+1) = {}",
                amps.len(),
                2 * (n_max + 1)
            )));
        }
        let s = StateVector { amps, n_max };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state norm {norm} deviates from 1 by more than 1e-12"
            )));
        }
        let tail = s.tail_mass();
        if tail >= 1e-8 {
            let nbar = s.mean_phonon_number();
            return Err(Error::Truncation {
                n_max,
                nbar,
                tail,
                suggested: default_fock_cutoff(nbar.sqrt()),
            });
        }
        Ok(s)
    }

    pub(crate) fn from_parts_unchecked(amps: Vec<Complex64>, n_max: usize) -> Self {
        StateVector { amps, n_max }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude c_{i,n}.
    pub fn amplitude(&self, electronic: usize, fock: usize) -> Complex64 {
        self.amps[2 * fock + electronic]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability mass in the top five Fock levels (truncation monitor).
    pub fn tail_mass(&self) -> f64 {
        let lo = self.n_max.saturating_sub(4);
        (lo..=self.n_max)
            .flat_map(|n| [self.amplitude(0, n), self.amplitude(1, n)])
            .map(|c| c.norm_sqr())
            .sum()
    }

    pub fn mean_phonon_number(&self) -> f64 {
        (0..=self.n_max)
            .map(|n| {
                n as f64 * (self.amplitude(0, n).norm_sqr() + self.amplitude(1, n).norm_sqr())
            })
            .sum()
    }
}

/// Coherent-state amplitudes `c_n = exp(−|ᾱ|²/2)·ᾱⁿ/√(n!)` on the truncated
/// Fock ladder, evaluated with log-domain factorials.
///
/// Errors with a suggested cutoff when the neglected tail would exceed 1e-8.
pub fn coherent_amplitudes(alpha_bar: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    let nbar = alpha_bar.norm_sqr();
    let r = alpha_bar.norm();
    let theta = alpha_bar.arg();
    let mut c = Vec::with_capacity(n_max + 1);
    let mut log_fact = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let log_mag = if r == 0.0 && n > 0 {
            f64::NEG_INFINITY
        } else if n == 0 {
            -nbar / 2.0
        } else {
            -nbar / 2.0 + n as f64 * r.ln() - 0.5 * log_fact
        };
        let mag = log_mag.exp();
        let phase = n as f64 * theta;
        c.push(Complex64::from_polar(mag, phase));
    }
    // the amplitudes are exact on 0..=n_max; the neglected mass is 1 - Σ|c_n|²
    let captured: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let top5: f64 = c
        .iter()
        .skip(n_max.saturating_sub(4))
        .map(|z| z.norm_sqr())
        .sum();
    let tail = (1.0 - captured) + top5;
    if tail >= 1e-8 {
        return Err(Error::Truncation {
            n_max,
            nbar,
            tail,
            suggested: default_fock_cutoff(r),
        });
    }
    Ok(c)
}

/// Initial state of the reference runs: electronic level 0 ⊗ coherent state ᾱ.
///
/// A product state, so ⟨S_z⟩ = −1/2 and the cross operators ⟨α̂⟩, ⟨β̂⟩ vanish.
pub fn initial_state(params: &JcmParams) -> Result<StateVector> {
    params.validate()?;
    let osc = coherent_amplitudes(params.alpha_bar, params.n_max)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); params.dim()];
    let captured: f64 = osc.iter().map(|z| z.norm_sqr()).sum();
    let renorm = captured.sqrt();
    for (n, cn) in osc.iter().enumerate() {
        amps[2 * n] = cn / renorm;
    }
    StateVector::new(amps, params.n_max)
}

/// Exact ⟨γ̂⟩ and ⟨γ̂²⟩ on the truncated basis, with
/// γ̂ = a†a + S₊S₋ + 1/2 (diagonal in the product basis).
///
/// Both are integrals of motion of the rotating-wave Hamiltonian, so the
/// values at construction are conserved under exact evolution.
pub fn gamma_constants(state: &StateVector) -> (f64, f64) {
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    for n in 0..=state.n_max() {
        for i in 0..2 {
            let w = state.amplitude(i, n).norm_sqr();
            let gamma = n as f64 + i as f64 + 0.5;
            g1 += gamma * w;
            g2 += gamma * gamma * w;
        }
    }
    (g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn coherent_level0(nbar: f64) -> StateVector {
        let alpha = Complex64::new(nbar.sqrt(), 0.0);
        let params = JcmParams::new(1.0, 0.0, 0.25, alpha).unwrap();
        initial_state(&params).unwrap()
    }

    #[test]
    fn reduce_uncoupled_limit_gives_zero_g() {
        let p = PhysicalDimerParams {
            bare_energies: [0.0, 1.0],
            energy_gradients: [0.2, 0.7],
            mass: 2.0,
            vib_frequency: 0.5,
            coupling_gradient: 0.0,
        };
        let jcm = reduce_physical_model(&p).unwrap();
        assert_eq!(jcm.coupling, 0.0);
    }

    #[test]
    fn reduce_symmetric_surfaces_give_zero_shift() {
        let p = PhysicalDimerParams {
            bare_energies: [0.0, 2.0],
            energy_gradients: [0.3, 0.3],
            mass: 1.5,
            vib_frequency: 2.0,
            coupling_gradient: 0.1,
        };
        let jcm = reduce_physical_model(&p).unwrap();
        assert_eq!(jcm.alpha_bar, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn reduce_hand_evaluated_example() {
        // m = ω = 1, ε0 = 0, ε1 = 1, ε0' = 0, ε1' = 1, ∂J/∂q = 0.1:
        // E1 = 1 + 1/2, q1 = 1, ᾱ = √(1/2), g = 0.1·√(1/2)
        let p = PhysicalDimerParams {
            bare_energies: [0.0, 1.0],
            energy_gradients: [0.0, 1.0],
            mass: 1.0,
            vib_frequency: 1.0,
            coupling_gradient: 0.1,
        };
        let jcm = reduce_physical_model(&p).unwrap();
        assert_relative_eq!(jcm.gap, 1.5, epsilon = 1e-15);
        assert_relative_eq!(jcm.coupling, 0.1 * std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(
            jcm.alpha_bar.re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_eq!(jcm.alpha_bar.im, 0.0);
    }

    #[test]
    fn reduce_rejects_nonpositive_mass() {
        let p = PhysicalDimerParams {
            bare_energies: [0.0, 1.0],
            energy_gradients: [0.0, 1.0],
            mass: 0.0,
            vib_frequency: 1.0,
            coupling_gradient: 0.1,
        };
        assert!(reduce_physical_model(&p).is_err());
    }

    #[test]
    fn coherent_vacuum_is_unit_spike() {
        let c = coherent_amplitudes(Complex64::new(0.0, 0.0), 12).unwrap();
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        assert!(c[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coherent_mean_phonon_number_matches_nbar() {
        for nbar in [9.0, 49.0] {
            let s = coherent_level0(nbar);
            assert_relative_eq!(s.mean_phonon_number(), nbar, epsilon = 1e-8);
        }
    }

    #[test]
    fn coherent_small_cutoff_errors_with_suggestion() {
        let err = coherent_amplitudes(Complex64::new(3.0, 0.0), 10).unwrap_err();
        match err {
            Error::Truncation { suggested, .. } => assert_eq!(suggested, 43),
            other => panic!("expected truncation error, got {other}"),
        }
    }

    #[test]
    fn initial_state_moments() {
        let s = coherent_level0(9.0);
        // all population on level 0
        let p1: f64 = (0..=s.n_max()).map(|n| s.amplitude(1, n).norm_sqr()).sum();
        assert!(p1 == 0.0);
        assert_relative_eq!(s.mean_phonon_number(), 9.0, epsilon = 1e-8);
    }

    #[test]
    fn gamma_constants_on_vacuum_level0() {
        let alpha = Complex64::new(0.0, 0.0);
        let params = JcmParams::new(1.0, 0.0, 0.1, alpha).unwrap();
        let s = initial_state(&params).unwrap();
        let (g1, g2) = gamma_constants(&s);
        assert_relative_eq!(g1, 0.5, epsilon = 1e-14);
        assert_relative_eq!(g2, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn gamma_constants_on_coherent_level0() {
        // Poisson moments: ⟨n⟩ = 9, ⟨n²⟩ = 81 + 9, so γ₀ = 9.5 and
        // ⟨γ²⟩ = ⟨n²⟩ + ⟨n⟩ + 1/4 = 99.25
        let s = coherent_level0(9.0);
        let (g1, g2) = gamma_constants(&s);
        assert_relative_eq!(g1, 9.5, epsilon = 1e-7);
        assert_relative_eq!(g2, 99.25, epsilon = 1e-5);
    }

    #[test]
    fn gamma_constants_alpha7() {
        let s = coherent_level0(49.0);
        let (g1, _) = gamma_constants(&s);
        assert_relative_eq!(g1, 49.5, epsilon = 1e-6);
    }

    #[test]
    fn gamma_constants_on_fock_eigenstate() {
        // |n=5⟩ ⊗ level 1: γ̂ eigenstate with eigenvalue 6.5
        let n_max = 12;
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * (n_max + 1)];
        amps[2 * 5 + 1] = Complex64::new(1.0, 0.0);
        let s = StateVector::new(amps, n_max).unwrap();
        let (g1, g2) = gamma_constants(&s);
        assert_eq!(g1, 6.5);
        assert_eq!(g2, 42.25);
    }

    #[test]
    fn flat_index_round_trip() {
        for n in 0..40 {
            for i in 0..2 {
                let b = BasisIndex {
                    electronic: i,
                    fock: n,
                };
                assert_eq!(BasisIndex::unflatten(b.flatten()), b);
            }
        }
    }

    #[test]
    fn gap_invariant_under_energy_origin_shift() {
        let base = PhysicalDimerParams {
            bare_energies: [0.3, 1.7],
            energy_gradients: [0.1, 0.9],
            mass: 1.2,
            vib_frequency: 0.8,
            coupling_gradient: 0.2,
        };
        let shifted = PhysicalDimerParams {
            bare_energies: [0.3 + 5.0, 1.7 + 5.0],
            ..base
        };
        let a = reduce_physical_model(&base).unwrap();
        let b = reduce_physical_model(&shifted).unwrap();
        assert_relative_eq!(a.gap, b.gap, epsilon = 1e-12);
    }
}
