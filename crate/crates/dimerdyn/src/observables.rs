//! Derived observables: dispersions, sum-uncertainty quantities, energy
//! partitions, Bloch vector, fidelity, and the electron-vibrational
//! correlator.
//!
//! Everything is ladder-moment arithmetic in the dimensionless convention
//! ħ = m = ω = 1; physical-unit scaling happens in the CLI layer. The energy
//! partitions come in two algebraically independent routes (ladder moments
//! and dispersion sums, the two representations of the energy tables) and the
//! frame validator holds them against each other.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Raw first/second moments of one time sample.
#[derive(Debug, Clone, Copy)]
pub struct MomentSet {
    pub t: f64,
    /// ⟨a⟩.
    pub a: Complex64,
    /// ⟨a²⟩.
    pub a_sq: Complex64,
    /// ⟨a†a⟩.
    pub n_occ: f64,
    /// ⟨S₊⟩ (⟨S₋⟩ is its conjugate).
    pub s_plus: Complex64,
    /// ⟨S₊S₋⟩, the excited-state population.
    pub s_plus_s_minus: f64,
    /// ⟨S_z⟩ = ⟨S₊S₋⟩ − 1/2.
    pub s_z: f64,
    /// ⟨α̂⟩ = ⟨a†S₋ + aS₊⟩ (Hermitian, real).
    pub alpha: f64,
    /// ⟨β̂⟩ = ⟨a†S₋ − aS₊⟩ (anti-Hermitian, purely imaginary).
    pub beta: Complex64,
    /// ⟨γ̂⟩ = ⟨a†a + S₊S₋ + 1/2⟩.
    pub gamma: f64,
}

impl MomentSet {
    /// ⟨S₋S₊⟩ from completeness, 1 − ⟨S₊S₋⟩.
    pub fn s_minus_s_plus(&self) -> f64 {
        1.0 - self.s_plus_s_minus
    }

    /// Structural sanity of a measured moment set.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Err(Error::FrameInvariant { t: self.t, what });
        if !(-1e-12..=1.0 + 1e-12).contains(&self.s_plus_s_minus) {
            return fail(format!("⟨S₊S₋⟩ = {} outside [0, 1]", self.s_plus_s_minus));
        }
        if (self.s_z - (self.s_plus_s_minus - 0.5)).abs() > 1e-12 {
            return fail("⟨S_z⟩ != ⟨S₊S₋⟩ - 1/2".into());
        }
        if self.a.norm_sqr() > self.n_occ + 1e-12 {
            return fail(format!(
                "|⟨a⟩|² = {} exceeds ⟨a†a⟩ = {}",
                self.a.norm_sqr(),
                self.n_occ
            ));
        }
        Ok(())
    }
}

/// Coordinate and momentum dispersions (units ħ/(2mω) = 1/2) and their
/// quarter-sum, the purely quantum vibrational energy in quanta of ω.
///
/// The cross term 2⟨a†a⟩ + 1 − 2⟨a†⟩⟨a⟩ evolves slowly; the ladder term
/// 2Re(⟨a²⟩ − ⟨a⟩²) oscillates quickly and enters σ_q and σ_p with opposite
/// signs, so it cancels in the sum.
pub fn vibrational_dispersions(m: &MomentSet) -> (f64, f64, f64) {
    let cross = 2.0 * m.n_occ + 1.0 - 2.0 * m.a.norm_sqr();
    let ladder = 2.0 * (m.a_sq - m.a * m.a).re;
    let sigma_q = 0.5 * (cross + ladder);
    let sigma_p = 0.5 * (cross - ladder);
    (sigma_q, sigma_p, 0.5 * (sigma_q + sigma_p))
}

/// Total, semiclassical, and purely quantum vibrational energies:
/// E_total = ω(⟨a†a⟩ + 1/2), E_semicl = ω⟨a†⟩⟨a⟩, E_quant = difference.
pub fn vibrational_energies(m: &MomentSet, omega: f64) -> (f64, f64, f64) {
    let total = omega * (m.n_occ + 0.5);
    let semicl = omega * m.a.norm_sqr();
    (total, semicl, total - semicl)
}

/// Electronic dispersions σ_Sx, σ_Sy and their sum 1/2 − ⟨S₊⟩⟨S₋⟩.
///
/// The squares ⟨S₊⟩², ⟨S₋⟩² are the ladder fringes; they cancel in the sum.
pub fn electronic_dispersions(m: &MomentSet) -> (f64, f64, f64) {
    let cross = 1.0 - 2.0 * m.s_plus.norm_sqr();
    let ladder = 2.0 * (m.s_plus * m.s_plus).re;
    let sigma_sx = 0.25 * (cross - ladder);
    let sigma_sy = 0.25 * (cross + ladder);
    (sigma_sx, sigma_sy, 0.5 - m.s_plus.norm_sqr())
}

/// Total, quasiclassical, and purely quantum electronic energies:
/// E_total = Ω⟨S₊S₋⟩, E_quasicl = Ω⟨S₊⟩⟨S₋⟩, E_quant = difference (≥ 0).
pub fn electronic_energies(m: &MomentSet, gap: f64) -> (f64, f64, f64) {
    let total = gap * m.s_plus_s_minus;
    let quasicl = gap * m.s_plus.norm_sqr();
    (total, quasicl, total - quasicl)
}

/// Bloch vector, its squared length and horizontal component, and the
/// reduced-qubit purity Trρ².
#[derive(Debug, Clone, Copy)]
pub struct BlochFidelity {
    pub r: [f64; 3],
    pub r_sq: f64,
    pub r_xy_sq: f64,
    pub fidelity: f64,
}

/// R = (⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩), R² = 1/4 + ⟨S₊⟩⟨S₋⟩ − ⟨S₊S₋⟩⟨S₋S₊⟩, and
/// Trρ² = 1 + 2⟨S₊⟩⟨S₋⟩ − 2⟨S₊S₋⟩⟨S₋S₊⟩ = 1/2 + 2R².
pub fn bloch_and_fidelity(m: &MomentSet) -> BlochFidelity {
    let pops = m.s_plus_s_minus * m.s_minus_s_plus();
    let horiz = m.s_plus.norm_sqr();
    BlochFidelity {
        r: [m.s_plus.re, m.s_plus.im, m.s_z],
        r_sq: 0.25 + horiz - pops,
        r_xy_sq: horiz,
        fidelity: 1.0 + 2.0 * horiz - 2.0 * pops,
    }
}

/// Electron-vibrational correlator i⟨β_r⟩: the non-factorizable part of ⟨β̂⟩.
///
/// `manuscript` subtracts ⟨a⟩⟨S₊⟩ + ⟨a†⟩⟨S₊⟩ as published; `symmetrized`
/// subtracts the factorized β̂ itself, ⟨a†⟩⟨S₋⟩ − ⟨a⟩⟨S₊⟩, and is purely
/// imaginary for every state.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatorBetaR {
    pub manuscript: Complex64,
    pub symmetrized: Complex64,
}

pub fn correlator_beta_r(m: &MomentSet) -> CorrelatorBetaR {
    let prod = m.a * m.s_plus;
    CorrelatorBetaR {
        manuscript: m.beta - prod - m.a.conj() * m.s_plus,
        symmetrized: m.beta - prod.conj() + prod,
    }
}

/// One time sample of the full derived-observable set.
#[derive(Debug, Clone, Copy)]
pub struct ObservableFrame {
    pub t: f64,
    pub sigma_q: f64,
    pub sigma_p: f64,
    /// (σ_q + σ_p)/2 = purely quantum vibrational energy in quanta of ω.
    pub sum_vib: f64,
    pub e_vib_total: f64,
    pub e_vib_semicl: f64,
    pub e_vib_quant: f64,
    pub sigma_sx: f64,
    pub sigma_sy: f64,
    /// σ_Sx + σ_Sy = 1/2 − ⟨S₊⟩⟨S₋⟩.
    pub sum_el: f64,
    pub e_el_total: f64,
    pub e_el_quasicl: f64,
    pub e_el_quant: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
    pub r_sq: f64,
    pub r_xy_sq: f64,
    pub fidelity: f64,
    /// Im of the symmetrized correlator (the purely imaginary magnitude).
    pub corr_beta: f64,
    /// Residual of the manuscript correlator form, kept for reporting.
    pub corr_beta_manuscript: Complex64,
}

/// Assemble the full frame from one moment set.
pub fn frame_from_moments(m: &MomentSet, omega: f64, gap: f64) -> ObservableFrame {
    let (sigma_q, sigma_p, sum_vib) = vibrational_dispersions(m);
    let (evt, evc, evq) = vibrational_energies(m, omega);
    let (sigma_sx, sigma_sy, sum_el) = electronic_dispersions(m);
    let (eet, eec, eeq) = electronic_energies(m, gap);
    let bf = bloch_and_fidelity(m);
    let corr = correlator_beta_r(m);
    ObservableFrame {
        t: m.t,
        sigma_q,
        sigma_p,
        sum_vib,
        e_vib_total: evt,
        e_vib_semicl: evc,
        e_vib_quant: evq,
        sigma_sx,
        sigma_sy,
        sum_el,
        e_el_total: eet,
        e_el_quasicl: eec,
        e_el_quant: eeq,
        r_x: bf.r[0],
        r_y: bf.r[1],
        r_z: bf.r[2],
        r_sq: bf.r_sq,
        r_xy_sq: bf.r_xy_sq,
        fidelity: bf.fidelity,
        corr_beta: corr.symmetrized.im,
        corr_beta_manuscript: corr.manuscript,
    }
}

/// Invariant suite every emitted frame must pass: the two-route energy
/// partitions, the uncertainty bounds, and the purity relations.
pub fn validate_frame(f: &ObservableFrame, omega: f64, gap: f64) -> Result<()> {
    let fail = |what: String| Err(Error::FrameInvariant { t: f.t, what });
    let scale = omega.abs().max(1.0);

    // Table I identities through independent routes
    if (f.e_vib_total - f.e_vib_semicl - f.e_vib_quant).abs() > 1e-10 * scale {
        return fail("vibrational energy partition broken".into());
    }
    if (f.e_vib_quant - omega * f.sum_vib).abs() > 1e-10 * scale {
        return fail(format!(
            "dispersion-sum route {} != ladder route {} for E_vib_quant",
            omega * f.sum_vib,
            f.e_vib_quant
        ));
    }
    if (f.e_el_total - f.e_el_quasicl - f.e_el_quant).abs() > 1e-10 * gap.abs().max(1.0) {
        return fail("electronic energy partition broken".into());
    }
    if (f.e_el_quasicl - gap * (0.5 - f.sum_el)).abs() > 1e-10 * gap.abs().max(1.0) {
        return fail("dispersion route for E_el_quasicl broken".into());
    }

    // uncertainty bounds
    if f.sum_vib - 0.5 < -1e-12 {
        return fail(format!("vibrational uncertainty sum {} < 1/2", f.sum_vib));
    }
    if f.e_el_quant < -1e-12 * gap.abs().max(1.0) {
        return fail(format!("electronic quantum energy {} < 0", f.e_el_quant));
    }

    // purity relations
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&f.fidelity) {
        return fail(format!("fidelity {} outside [1/2, 1]", f.fidelity));
    }
    if !(-1e-12..=0.25 + 1e-12).contains(&f.r_sq) {
        return fail(format!("R² = {} outside [0, 1/4]", f.r_sq));
    }
    if (f.fidelity - (0.5 + 2.0 * f.r_sq)).abs() > 1e-10 {
        return fail("Trρ² != 1/2 + 2R²".into());
    }
    Ok(())
}
