//! Coordinate-space reconstruction of the vibrational wavepacket.
//!
//! ψ_i(q) = Σ_n c_{i,n} φ_n(q) with the real normalized oscillator
//! eigenfunctions φ_n in the mω/ħ = 1 convention, evaluated by the stable
//! upward recurrence
//! φ_{n+1} = √(2/(n+1)) q φ_n − √(n/(n+1)) φ_{n−1}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::StateVector;

/// Densities |ψ₀(q)|², |ψ₁(q)|² and their sum on a coordinate grid.
#[derive(Debug, Clone)]
pub struct WavepacketSlice {
    pub t: f64,
    pub q: Vec<f64>,
    pub density_level0: Vec<f64>,
    pub density_level1: Vec<f64>,
    pub total: Vec<f64>,
}

impl WavepacketSlice {
    /// Trapezoid integral of the total density over the grid.
    pub fn total_mass(&self) -> f64 {
        trapezoid(&self.q, &self.total)
    }

    /// Local maxima of the total density with at least the given prominence
    /// (absolute density units), returned as grid positions.
    pub fn prominent_maxima(&self, prominence: f64) -> Vec<f64> {
        let y = &self.total;
        let mut out = Vec::new();
        for i in 1..y.len() - 1 {
            if !(y[i] >= y[i - 1] && y[i] > y[i + 1]) {
                continue;
            }
            // walk outwards to the separating valleys
            let mut j = i;
            while j > 0 && y[j - 1] <= y[i] {
                j -= 1;
            }
            let left_min = y[j..=i].iter().cloned().fold(f64::INFINITY, f64::min);
            let mut k = i;
            while k < y.len() - 1 && y[k + 1] <= y[i] {
                k += 1;
            }
            let right_min = y[i..=k].iter().cloned().fold(f64::INFINITY, f64::min);
            if y[i] - left_min.max(right_min) >= prominence {
                out.push(self.q[i]);
            }
        }
        out
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (ys[0] + ys[1]) * (xs[1] - xs[0]))
        .sum()
}

/// Default grid: 801 points covering [−√2|ᾱ| − 6, √2|ᾱ| + 6].
pub fn default_grid(alpha_abs: f64) -> Vec<f64> {
    let half = std::f64::consts::SQRT_2 * alpha_abs + 6.0;
    let n = 801;
    (0..n)
        .map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect()
}

/// Oscillator eigenfunctions φ_0..φ_n_max at one point.
fn hermite_functions(n_max: usize, q: f64, buf: &mut Vec<f64>) {
    buf.clear();
    let phi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    buf.push(phi0);
    if n_max == 0 {
        return;
    }
    buf.push(std::f64::consts::SQRT_2 * q * phi0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * q * buf[n] - (nf / (nf + 1.0)).sqrt() * buf[n - 1];
        buf.push(next);
    }
}

/// Project the state onto the coordinate grid per electronic channel.
///
/// Fails for cutoffs beyond the recurrence stability guard (n > 600) or when
/// the grid does not capture unit probability to 1e-6.
pub fn wavepacket_density(s: &StateVector, grid: &[f64], t: f64) -> Result<WavepacketSlice> {
    let n_max = s.n_max();
    if n_max > 600 {
        return Err(Error::RecurrenceOverflow(n_max));
    }
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let mut density0 = Vec::with_capacity(grid.len());
    let mut density1 = Vec::with_capacity(grid.len());
    let mut phi = Vec::with_capacity(n_max + 1);
    for &q in grid {
        hermite_functions(n_max, q, &mut phi);
        let mut psi0 = Complex64::new(0.0, 0.0);
        let mut psi1 = Complex64::new(0.0, 0.0);
        for (n, &p) in phi.iter().enumerate() {
            psi0 += s.amplitude(0, n) * p;
            psi1 += s.amplitude(1, n) * p;
        }
        density0.push(psi0.norm_sqr());
        density1.push(psi1.norm_sqr());
    }
    let total: Vec<f64> = density0
        .iter()
        .zip(&density1)
        .map(|(a, b)| a + b)
        .collect();
    let slice = WavepacketSlice {
        t,
        q: grid.to_vec(),
        density_level0: density0,
        density_level1: density1,
        total,
    };
    let mass = slice.total_mass();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "grid captures probability {mass}, not 1 ± 1e-6; widen or refine the grid"
        )));
    }
    Ok(slice)
}
