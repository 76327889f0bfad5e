//! Collective beam-splitting attack.
//!
//! Eve replaces the fibre by a lossless line and a beam splitter of
//! transmittance `η(L)` at its input, keeping the reflected light of every
//! window in a quantum memory. Her Holevo information about Alice's bit follows
//! from the overlap of the two reflected states she has to tell apart.

use crate::error::Result;
use crate::keyrate::binary_entropy;
use crate::params::{Phase, SystemParams};
use crate::states::{alice_state, attenuate, channel_loss_fraction, SidebandState};

/// Holevo information per sifted bit, with the eigenvalues of Eve's mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoBound {
    pub chi: f64,
    /// `|⟨ψ_E(0)|ψ_E(π)⟩|`
    pub overlap: f64,
    /// Eigenvalues `½(1 ± |ψ|)` of the equal mixture of the two states.
    pub eigenvalues: (f64, f64),
}

impl HolevoBound {
    /// Bound for an equiprobable pair of pure states with overlap modulus `overlap`.
    pub fn from_overlap(overlap: f64) -> Self {
        let overlap = overlap.clamp(0.0, 1.0);
        let low = 0.5 * (1.0 - overlap);
        let high = 0.5 * (1.0 + overlap);
        HolevoBound {
            chi: binary_entropy(low).expect("eigenvalue lies in [0, 1/2]"),
            overlap,
            eigenvalues: (high, low),
        }
    }
}

/// Light reflected to Eve: Alice's state scaled by `√(1 - η(L))`.
pub fn eve_state(p: &SystemParams, phi_a: Phase, length_km: f64) -> Result<SidebandState> {
    let reflect = channel_loss_fraction(p.xi_db_per_km, length_km)?;
    attenuate(&alice_state(p, phi_a)?, reflect)
}

/// Shifts the `k`-th sideband by `πk/2`, mapping the {π/2, 3π/2} basis onto {0, π}.
pub fn rotate_basis(s: &SidebandState) -> SidebandState {
    s.phase_ramp(std::f64::consts::FRAC_PI_2)
}

/// Angle `β₋` with `cos β₋ = cos²β + sin²β cos(φ₁ - φ₂)`.
pub fn beta_minus(beta: f64, phase_difference: f64) -> f64 {
    let half = (beta.sin() * (0.5 * phase_difference).sin()).abs().min(1.0);
    2.0 * half.asin()
}

/// Overlap of Eve's states, `exp[-μ0 (1 - η(L)) (1 - d_{00}(β₋))]`.
pub fn eve_overlap(p: &SystemParams, phi1: Phase, phi2: Phase, length_km: f64) -> Result<f64> {
    p.validate()?;
    let reflect = channel_loss_fraction(p.xi_db_per_km, length_km)?;
    let angle = beta_minus(p.beta()?, phi1.radians() - phi2.radians());
    let d = p.dfunction().d00(angle)?;
    Ok((-p.mu0 * reflect * (1.0 - d)).exp())
}

/// Holevo bound of the beam-splitting attack; identical for B92 and BB84-OSD.
pub fn holevo_cbs(p: &SystemParams, length_km: f64) -> Result<HolevoBound> {
    Ok(HolevoBound::from_overlap(eve_overlap(p, Phase::ZERO, Phase::PI, length_km)?))
}
