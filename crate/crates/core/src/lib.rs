//! Link model for subcarrier-wave quantum key distribution.
//!
//! A strong carrier is phase-modulated at Alice to create weak sidebands whose
//! phase carries the bit. Bob re-modulates, filters out the carrier and counts
//! clicks on a single-photon detector. This crate follows the light through
//! that pipeline and turns it into the numbers that matter for a link budget:
//!
//! * [`wigner`]: d-function rows that give the sideband amplitudes, and their Bessel limit.
//! * [`states`]: multimode coherent states, fibre loss, demodulation, photon numbers, overlaps.
//! * [`detection`]: click probabilities for SNSPD and APD detector models.
//! * [`bsee`]: the error-and-erasure channel seen by Alice and Bob, QBER and capacity.
//! * [`attack`]: Eve's collective beam-splitting attack and its Holevo bound.
//! * [`keyrate`]: secure key rate per protocol, optimal modulation depth, BB84 comparison.
//! * [`montecarlo`]: window-by-window simulation used to cross-check the analytic channel.
//! * [`config`] and [`sweep`]: run configuration and the CSV tables behind the `scw-qkd` binary.

pub mod attack;
pub mod bsee;
pub mod config;
pub mod detection;
pub mod error;
pub mod keyrate;
pub mod montecarlo;
pub mod params;
pub mod states;
pub mod sweep;
pub mod wigner;

pub use error::{Error, Result};
pub use params::{Phase, SystemParams};
pub use wigner::{DMode, SidebandCount};
