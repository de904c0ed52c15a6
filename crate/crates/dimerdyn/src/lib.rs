//! Dynamics of a two-level electronic system coupled to one quantized
//! vibrational mode, in the rotating-wave approximation.
//!
//! Two engines evolve the same model:
//!
//! * [`exact`] — block-spectral propagation on the truncated product basis,
//!   exact at arbitrary time, plus a dense eigendecomposition oracle;
//! * [`qhd`] — the six-variable moment closure obtained by truncating the
//!   Heisenberg hierarchy over (α̂, β̂, γ̂) at first order in γ̂, solved both
//!   in closed form and by matrix exponential.
//!
//! [`observables`] derives dispersions, energy partitions, the Bloch vector,
//! purity, and the electron-vibrational correlator from measured moments;
//! [`wavepacket`] reconstructs the coordinate-space density; [`runner`] wires
//! everything into reproducible CSV/JSON scenarios behind the `dimerdyn` CLI.
//!
//! ```
//! use dimerdyn::model::{initial_state, JcmParams};
//! use dimerdyn::exact::{build_rwa_hamiltonian, evolve_exact, measure};
//! use num_complex::Complex64;
//!
//! // strong coupling, nine quanta in the mode, resonant
//! let params = JcmParams::new(1.0, 0.0, 0.25, Complex64::new(3.0, 0.0))?;
//! let state = initial_state(&params)?;
//! let h = build_rwa_hamiltonian(&params)?;
//! let run = evolve_exact(&h, &state, &[0.0, 1.0, 2.0])?;
//! let inversion = measure(&run.states[2], 2.0).s_z;
//! assert!(inversion > -0.5 && inversion < 0.5);
//! # Ok::<(), dimerdyn::Error>(())
//! ```

pub mod error;
pub mod exact;
pub mod model;
pub mod observables;
pub mod qhd;
pub mod runner;
pub mod wavepacket;

pub use error::{Error, Result};

// The book chapters double as doctests so the guide cannot drift from the
// API; `cargo test` compiles every fenced snippet in book/src.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/closure.md")]
    mod closure {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/uncertainty.md")]
    mod uncertainty {}
    #[doc = include_str!("../../../book/src/wavepacket.md")]
    mod wavepacket {}
}
