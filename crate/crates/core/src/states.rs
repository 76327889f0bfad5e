//! Multimode coherent states along Alice's modulator, the fibre, Bob's
//! modulator and the carrier filter.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Phase, SystemParams};
use crate::wigner::SidebandCount;

/// Coherent amplitudes of the `2S+1` modes `ω + kΩ`, `k = -S..=S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandState {
    sidebands: SidebandCount,
    amplitudes: Vec<Complex64>,
}

impl SidebandState {
    pub fn vacuum(sidebands: SidebandCount) -> Self {
        SidebandState {
            sidebands,
            amplitudes: vec![Complex64::new(0.0, 0.0); sidebands.modes()],
        }
    }

    /// Builds a state from amplitudes ordered `k = -S..=S`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len().is_multiple_of(2) {
            return Err(Error::invalid("amplitudes", "need an odd number of modes (2S+1)"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes", "amplitudes must be finite"));
        }
        let sidebands = SidebandCount::new((amplitudes.len() / 2) as u32)?;
        Ok(SidebandState { sidebands, amplitudes })
    }

    pub fn sidebands(&self) -> SidebandCount {
        self.sidebands
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn get(&self, k: i64) -> Complex64 {
        let s = self.sidebands.get() as i64;
        if k < -s || k > s {
            return Complex64::new(0.0, 0.0);
        }
        self.amplitudes[(k + s) as usize]
    }

    /// `(k, α_k)` pairs from `k = -S` upwards.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let s = self.sidebands.get() as i64;
        self.amplitudes.iter().enumerate().map(move |(i, &a)| (i as i64 - s, a))
    }

    pub fn total_photons(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mean photon number on all sidebands, carrier excluded.
    pub fn sideband_photons(&self) -> f64 {
        self.iter().filter(|(k, _)| *k != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn upper_sideband_photons(&self) -> f64 {
        self.iter().filter(|(k, _)| *k > 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn lower_sideband_photons(&self) -> f64 {
        self.iter().filter(|(k, _)| *k < 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn carrier_photons(&self) -> f64 {
        self.get(0).norm_sqr()
    }

    /// Multiplies the `k`-th amplitude by `e^{iθk}`.
    pub fn phase_ramp(&self, theta: f64) -> SidebandState {
        let amplitudes = self
            .iter()
            .map(|(k, a)| a * Complex64::from_polar(1.0, theta * k as f64))
            .collect();
        SidebandState { sidebands: self.sidebands, amplitudes }
    }

    fn scaled(&self, factor: f64) -> SidebandState {
        SidebandState {
            sidebands: self.sidebands,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }
}

fn modulated(p: &SystemParams, beta: f64, scale: f64, phase: f64) -> Result<SidebandState> {
    let row = p.dfunction().row(beta)?;
    let amplitudes = row
        .iter()
        .map(|(k, d)| Complex64::from_polar(scale * d, -phase * k as f64))
        .collect();
    Ok(SidebandState { sidebands: p.sidebands, amplitudes })
}

/// State leaving Alice's modulator for microwave phase `phi_a`.
pub fn alice_state(p: &SystemParams, phi_a: Phase) -> Result<SidebandState> {
    p.validate()?;
    modulated(p, p.beta()?, p.mu0.sqrt(), p.theta1 + phi_a.radians())
}

fn check_length(length_km: f64) -> Result<()> {
    if !length_km.is_finite() || length_km < 0.0 {
        return Err(Error::invalid("length_km", format!("fibre length must be finite and >= 0, got {length_km}")));
    }
    Ok(())
}

/// Fibre transmittance `10^{-ξL/10}`.
pub fn channel_transmittance(xi_db_per_km: f64, length_km: f64) -> Result<f64> {
    check_length(length_km)?;
    Ok(10f64.powf(-xi_db_per_km * length_km / 10.0))
}

/// `1 - η(L)`, the fraction a beam splitter at the fibre input diverts.
pub fn channel_loss_fraction(xi_db_per_km: f64, length_km: f64) -> Result<f64> {
    check_length(length_km)?;
    Ok(-(-xi_db_per_km * length_km / 10.0 * std::f64::consts::LN_10).exp_m1())
}

/// Linear loss: every amplitude multiplied by `√η`.
pub fn attenuate(s: &SidebandState, eta: f64) -> Result<SidebandState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid("eta", format!("transmittance must lie in [0, 1], got {eta}")));
    }
    Ok(s.scaled(eta.sqrt()))
}

/// d-function argument after Bob's modulator, for compensated phase difference
/// `psi = φ_A - φ_B`: `cos β' = cos²β - sin²β cos ψ`.
///
/// Evaluated through `sin(β'/2) = |sin β cos(ψ/2)|`, which is the same angle
/// without the cancellation `arccos` suffers near `β' = 0`.
pub fn beta_prime(beta: f64, psi: f64) -> f64 {
    let mut c = (0.5 * psi).cos();
    // cos(π/2) in floating point is 6e-17, not zero; opposite phases must cancel exactly
    if c.abs() < 4.0 * f64::EPSILON {
        c = 0.0;
    }
    let half = (beta.sin() * c).abs().min(1.0);
    2.0 * half.asin()
}

/// State reaching Bob's detector for phases `phi_a`, `phi_b` after `length_km`
/// of fibre, with the carrier attenuated by the filter.
pub fn bob_state(p: &SystemParams, phi_a: Phase, phi_b: Phase, length_km: f64) -> Result<SidebandState> {
    p.validate()?;
    let eta = channel_transmittance(p.xi_db_per_km, length_km)?;
    let beta = beta_prime(p.beta()?, phi_a.radians() - phi_b.radians());
    let scale = (p.mu0 * eta * p.eta_b).sqrt();
    let mut state = modulated(p, beta, scale, p.theta3 + phi_a.radians() + phi_b.radians())?;
    let s = p.sidebands.get() as usize;
    state.amplitudes[s] *= p.carrier_suppression.sqrt();
    Ok(state)
}

/// Mean photon number at Bob's detector,
/// `μ0 η(L) η_B (1 - (1 - ϑ) d_{00}(β')²)`.
pub fn mean_photons_at_detector(p: &SystemParams, phi_a: Phase, phi_b: Phase, length_km: f64) -> Result<f64> {
    p.validate()?;
    let eta = channel_transmittance(p.xi_db_per_km, length_km)?;
    let beta = beta_prime(p.beta()?, phi_a.radians() - phi_b.radians());
    let d = p.dfunction().d00(beta)?;
    Ok(p.mu0 * eta * p.eta_b * (1.0 - (1.0 - p.carrier_suppression) * d * d))
}

/// `⟨a|b⟩` for multimode coherent states, the product of single-mode overlaps
/// `exp(-(|α|² + |β|²)/2 + α*β)`.
pub fn overlap(a: &SidebandState, b: &SidebandState) -> Result<Complex64> {
    if a.amplitudes.len() != b.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            left: a.amplitudes.len(),
            right: b.amplitudes.len(),
        });
    }
    let exponent: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| -0.5 * (x.norm_sqr() + y.norm_sqr()) + x.conj() * y)
        .sum();
    Ok(exponent.exp())
}
