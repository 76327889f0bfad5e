use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::wigner::{beta_from_modulation, DFunction, DMode, SidebandCount};

/// Microwave phase applied by Alice or Bob, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Phase(pub f64);

impl Phase {
    pub const ZERO: Phase = Phase(0.0);
    pub const HALF_PI: Phase = Phase(PI / 2.0);
    pub const PI: Phase = Phase(PI);
    pub const THREE_HALF_PI: Phase = Phase(3.0 * PI / 2.0);

    pub fn radians(self) -> f64 {
        self.0
    }

    /// This phase shifted by `delta` radians (phase instability).
    pub fn offset(self, delta: f64) -> Phase {
        Phase(self.0 + delta)
    }

    /// Basis of a protocol phase: 0 for {0, π}, 1 for {π/2, 3π/2}.
    pub fn basis(self) -> u8 {
        let quarter = (self.0 / (PI / 2.0)).round() as i64;
        quarter.rem_euclid(2) as u8
    }

    /// Bit value encoded by a protocol phase: 0 for {0, π/2}, 1 for {π, 3π/2}.
    pub fn bit(self) -> u8 {
        let quarter = (self.0 / (PI / 2.0)).round() as i64;
        (quarter.rem_euclid(4) / 2) as u8
    }
}

/// Full description of the link: source, modulators, fibre, Bob's module, timing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Mean carrier photon number per transmission window.
    pub mu0: f64,
    /// Modulation index of Alice's phase modulator.
    pub m: f64,
    pub sidebands: SidebandCount,
    /// Transmission window duration `T`, seconds.
    pub window_s: f64,
    /// Repetition rate `ν_S = 1/T`, Hz.
    pub rep_rate_hz: f64,
    /// Worst-case phase mismatch between Alice and Bob, radians.
    pub delta_phi: f64,
    /// Transmittance of Bob's module.
    pub eta_b: f64,
    /// Residual carrier transmission after spectral filtering.
    pub carrier_suppression: f64,
    /// Fibre loss, dB/km.
    pub xi_db_per_km: f64,
    pub theta1: f64,
    pub theta3: f64,
    pub phi0: f64,
    pub mode: DMode,
}

impl Default for SystemParams {
    /// The SNSPD/APD operating point: T = 10 ns, μ0 = 4, m = 0.319, Δφ = 5°,
    /// 6.4 dB loss in Bob's module, ϑ = 1e-3, ξ = 0.18 dB/km.
    fn default() -> Self {
        SystemParams {
            mu0: 4.0,
            m: 0.319,
            sidebands: SidebandCount::default(),
            window_s: 10e-9,
            rep_rate_hz: 100e6,
            delta_phi: 5f64.to_radians(),
            eta_b: 10f64.powf(-0.64),
            carrier_suppression: 1e-3,
            xi_db_per_km: 0.18,
            theta1: 0.0,
            theta3: 0.0,
            phi0: 0.0,
            mode: DMode::Asymptotic,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite, got {v}")))
            }
        };
        for (name, v) in [
            ("mu0", self.mu0),
            ("m", self.m),
            ("window_s", self.window_s),
            ("rep_rate_hz", self.rep_rate_hz),
            ("delta_phi", self.delta_phi),
            ("eta_b", self.eta_b),
            ("carrier_suppression", self.carrier_suppression),
            ("xi_db_per_km", self.xi_db_per_km),
            ("theta1", self.theta1),
            ("theta3", self.theta3),
            ("phi0", self.phi0),
        ] {
            finite(name, v)?;
        }
        if self.mu0 < 0.0 {
            return Err(Error::invalid("mu0", "mean photon number must be >= 0"));
        }
        if self.m < 0.0 {
            return Err(Error::invalid("m", "modulation index must be >= 0"));
        }
        if self.window_s <= 0.0 {
            return Err(Error::invalid("window_s", "window must be positive"));
        }
        if ((self.rep_rate_hz * self.window_s) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "rep_rate_hz",
                format!("repetition rate must equal 1/T (got {} Hz for T = {} s)", self.rep_rate_hz, self.window_s),
            ));
        }
        if !(0.0..PI / 2.0).contains(&self.delta_phi) {
            return Err(Error::invalid("delta_phi", "phase instability must lie in [0, pi/2)"));
        }
        if !(self.eta_b > 0.0 && self.eta_b <= 1.0) {
            return Err(Error::invalid("eta_b", "Bob's transmittance must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.carrier_suppression) {
            return Err(Error::invalid("carrier_suppression", "must lie in [0, 1]"));
        }
        if self.xi_db_per_km < 0.0 {
            return Err(Error::invalid("xi_db_per_km", "fibre loss must be >= 0"));
        }
        Ok(())
    }

    /// d-function argument of Alice's modulator.
    pub fn beta(&self) -> Result<f64> {
        beta_from_modulation(self.m, self.sidebands)
    }

    pub fn dfunction(&self) -> DFunction {
        DFunction::new(self.sidebands, self.mode)
    }

    /// Fibre length corresponding to a channel loss in dB.
    pub fn length_for_loss(&self, loss_db: f64) -> f64 {
        if self.xi_db_per_km == 0.0 {
            0.0
        } else {
            loss_db / self.xi_db_per_km
        }
    }

    pub fn with_mode(mut self, mode: DMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_modulation(mut self, m: f64) -> Self {
        self.m = m;
        self
    }
}
