//! Run configuration read from TOML.
//!
//! Field names follow [`SystemParams`] except where the lab convention is a
//! different unit: Bob's module loss is given in dB (`eta_b_db`) and the phase
//! instability in degrees (`delta_phi_deg`). `configs/default.toml` ships the
//! reference operating point.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detection::{DetectorModel, DetectorPreset, Gate};
use crate::error::{Error, Result};
use crate::keyrate::{EcModel, Protocol};
use crate::params::SystemParams;
use crate::wigner::{DMode, SidebandCount};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub mu0: f64,
    pub m: f64,
    pub sidebands: u32,
    pub window_s: f64,
    pub rep_rate_hz: f64,
    pub delta_phi_deg: f64,
    /// Loss of Bob's module, `-10 lg η_B`.
    pub eta_b_db: f64,
    pub carrier_suppression: f64,
    pub xi_db_per_km: f64,
    #[serde(default)]
    pub theta1: f64,
    #[serde(default)]
    pub theta3: f64,
    #[serde(default)]
    pub phi0: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        let p = SystemParams::default();
        SystemSection {
            mu0: p.mu0,
            m: p.m,
            sidebands: p.sidebands.get(),
            window_s: p.window_s,
            rep_rate_hz: p.rep_rate_hz,
            delta_phi_deg: 5.0,
            eta_b_db: 6.4,
            carrier_suppression: p.carrier_suppression,
            xi_db_per_km: p.xi_db_per_km,
            theta1: 0.0,
            theta3: 0.0,
            phi0: 0.0,
        }
    }
}

/// Either a named preset with optional overrides, or a fully explicit model.
///
/// `gate_s = 0` selects free-running counting over the whole window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<DetectorPreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dark_rate_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_s: Option<f64>,
}

impl DetectorSection {
    pub fn preset(preset: DetectorPreset) -> Self {
        DetectorSection {
            preset: Some(preset),
            ..Default::default()
        }
    }

    pub fn model(&self) -> Result<DetectorModel> {
        let mut model = match self.preset {
            Some(p) => p.model(),
            None => DetectorModel {
                efficiency: self
                    .efficiency
                    .ok_or_else(|| Error::Config("detector: set `preset` or `efficiency`".into()))?,
                dark_rate_hz: self
                    .dark_rate_hz
                    .ok_or_else(|| Error::Config("detector: set `preset` or `dark_rate_hz`".into()))?,
                gate: Gate::Continuous,
            },
        };
        if let Some(e) = self.efficiency {
            model.efficiency = e;
        }
        if let Some(r) = self.dark_rate_hz {
            model.dark_rate_hz = r;
        }
        match self.gate_s {
            Some(0.0) => model.gate = Gate::Continuous,
            Some(g) => model.gate = Gate::Gated(g),
            None => {}
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    LossDb,
    LengthKm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            variable: SweepVariable::LossDb,
            start: 0.0,
            stop: 50.0,
            steps: 51,
        }
    }
}

/// One point of a sweep; both coordinates are always known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub loss_db: f64,
    pub length_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub windows: u64,
    pub length_km: f64,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        MonteCarloSection {
            windows: 1_000_000,
            length_km: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: DMode,
    #[serde(default = "default_protocols")]
    pub protocols: Vec<Protocol>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default = "default_detector")]
    pub detector: DetectorSection,
    #[serde(default)]
    pub ec: EcModel,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub montecarlo: MonteCarloSection,
}

fn default_protocols() -> Vec<Protocol> {
    vec![Protocol::B92, Protocol::Bb84Osd]
}

fn default_seed() -> u64 {
    1
}

fn default_detector() -> DetectorSection {
    DetectorSection::preset(DetectorPreset::Snspd)
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: DMode::default(),
            protocols: default_protocols(),
            seed: default_seed(),
            output: None,
            system: SystemSection::default(),
            detector: default_detector(),
            ec: EcModel::default(),
            sweep: SweepSection::default(),
            montecarlo: MonteCarloSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        let s = &self.system;
        let p = SystemParams {
            mu0: s.mu0,
            m: s.m,
            sidebands: SidebandCount::new(s.sidebands)?,
            window_s: s.window_s,
            rep_rate_hz: s.rep_rate_hz,
            delta_phi: s.delta_phi_deg.to_radians(),
            eta_b: 10f64.powf(-s.eta_b_db / 10.0),
            carrier_suppression: s.carrier_suppression,
            xi_db_per_km: s.xi_db_per_km,
            theta1: s.theta1,
            theta3: s.theta3,
            phi0: s.phi0,
            mode: self.mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn detector_model(&self) -> Result<DetectorModel> {
        let d = self.detector.model()?;
        d.validate(self.system.window_s)?;
        Ok(d)
    }

    /// First requested protocol; the one used by single-protocol commands.
    pub fn primary_protocol(&self) -> Protocol {
        self.protocols[0]
    }

    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let sw = &self.sweep;
        let xi = self.system.xi_db_per_km;
        (0..sw.steps)
            .map(|i| {
                let x = if i + 1 == sw.steps {
                    sw.stop
                } else {
                    sw.start + (sw.stop - sw.start) * i as f64 / (sw.steps - 1) as f64
                };
                match sw.variable {
                    SweepVariable::LossDb => SweepPoint {
                        loss_db: x,
                        length_km: if xi > 0.0 { x / xi } else { 0.0 },
                    },
                    SweepVariable::LengthKm => SweepPoint {
                        loss_db: x * xi,
                        length_km: x,
                    },
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.system_params()?;
        self.detector_model()?;
        self.ec.validate()?;
        if self.protocols.is_empty() {
            return Err(Error::Config("`protocols` must name at least one protocol".into()));
        }
        if self.protocols.contains(&Protocol::Bb84TwoDetector) {
            return Err(Error::UnsupportedProtocol("bb84-two-detector"));
        }
        let sw = &self.sweep;
        if !(sw.start.is_finite() && sw.stop.is_finite() && sw.start >= 0.0) {
            return Err(Error::Config("sweep bounds must be finite and >= 0".into()));
        }
        if sw.start >= sw.stop {
            return Err(Error::Config(format!("sweep needs start < stop, got {} and {}", sw.start, sw.stop)));
        }
        if sw.steps < 2 {
            return Err(Error::Config(format!("sweep needs at least 2 steps, got {}", sw.steps)));
        }
        if sw.variable == SweepVariable::LossDb && self.system.xi_db_per_km <= 0.0 {
            return Err(Error::Config("a loss sweep needs xi_db_per_km > 0".into()));
        }
        if self.montecarlo.windows == 0 {
            return Err(Error::Config("montecarlo.windows must be >= 1".into()));
        }
        if !(self.montecarlo.length_km.is_finite() && self.montecarlo.length_km >= 0.0) {
            return Err(Error::Config("montecarlo.length_km must be finite and >= 0".into()));
        }
        Ok(())
    }
}
