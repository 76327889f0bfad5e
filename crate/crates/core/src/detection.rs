//! Single-photon detector models and the per-window click probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Detector gating regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "regime", content = "gate_s")]
pub enum Gate {
    /// Free-running: the counting interval is the whole window `T`.
    Continuous,
    /// Gated with the given gate duration in seconds.
    Gated(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Quantum efficiency `η_D`.
    pub efficiency: f64,
    /// Dark count rate, Hz.
    pub dark_rate_hz: f64,
    pub gate: Gate,
}

/// Named detector presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorPreset {
    Snspd,
    Apd,
}

impl DetectorPreset {
    pub fn model(self) -> DetectorModel {
        match self {
            DetectorPreset::Snspd => DetectorModel::SNSPD,
            DetectorPreset::Apd => DetectorModel::APD,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DetectorPreset::Snspd => "snspd",
            DetectorPreset::Apd => "apd",
        }
    }
}

impl std::str::FromStr for DetectorPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "snspd" => Ok(DetectorPreset::Snspd),
            "apd" => Ok(DetectorPreset::Apd),
            other => Err(Error::invalid("detector", format!("unknown preset `{other}` (expected snspd or apd)"))),
        }
    }
}

impl DetectorModel {
    /// Superconducting nanowire detector: η_D = 0.2, 20 Hz dark counts, free-running.
    pub const SNSPD: DetectorModel = DetectorModel {
        efficiency: 0.2,
        dark_rate_hz: 20.0,
        gate: Gate::Continuous,
    };

    /// Avalanche photodiode: η_D = 0.125, 400 Hz dark counts, 4 ns gate.
    pub const APD: DetectorModel = DetectorModel {
        efficiency: 0.125,
        dark_rate_hz: 400.0,
        gate: Gate::Gated(4e-9),
    };

    pub fn validate(&self, window_s: f64) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::invalid("efficiency", format!("must lie in (0, 1], got {}", self.efficiency)));
        }
        if !self.dark_rate_hz.is_finite() || self.dark_rate_hz < 0.0 {
            return Err(Error::invalid("dark_rate_hz", format!("must be finite and >= 0, got {}", self.dark_rate_hz)));
        }
        if let Gate::Gated(dt) = self.gate {
            if !(dt > 0.0 && dt <= window_s) {
                return Err(Error::invalid("gate_s", format!("gate must lie in (0, T = {window_s}], got {dt}")));
            }
        }
        Ok(())
    }

    /// Counting interval `Δt` for a window of length `window_s`.
    pub fn counting_interval(&self, window_s: f64) -> f64 {
        match self.gate {
            Gate::Continuous => window_s,
            Gate::Gated(dt) => dt,
        }
    }
}

/// Click probability in one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickProbability {
    pub value: f64,
    /// The linear formula exceeded 1 and was clamped; the `n_ph ≪ 1` regime it
    /// assumes does not hold here.
    pub clamped: bool,
}

/// `(η_D n_ph / T + γ_dark) Δt`, clamped to 1.
///
/// Signal and dark counts both scale with `Δt`, so a gated detector sees the
/// signal reduced by `Δt/T`.
pub fn click_probability(n_ph: f64, detector: &DetectorModel, window_s: f64) -> Result<ClickProbability> {
    if !n_ph.is_finite() || n_ph < 0.0 {
        return Err(Error::invalid("n_ph", format!("mean photon number must be finite and >= 0, got {n_ph}")));
    }
    if window_s.is_nan() || window_s <= 0.0 {
        return Err(Error::invalid("window_s", "window must be positive"));
    }
    detector.validate(window_s)?;
    let dt = detector.counting_interval(window_s);
    let raw = (detector.efficiency * n_ph / window_s + detector.dark_rate_hz) * dt;
    Ok(if raw > 1.0 {
        ClickProbability { value: 1.0, clamped: true }
    } else {
        ClickProbability { value: raw, clamped: false }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: f64 = 10e-9;

    #[test]
    fn dark_only() {
        let p = click_probability(0.0, &DetectorModel::SNSPD, T).unwrap();
        assert!((p.value - 2e-7).abs() < 1e-22);
        let p = click_probability(0.0, &DetectorModel::APD, T).unwrap();
        assert!((p.value - 1.6e-6).abs() < 1e-21);
    }

    #[test]
    fn signal_plus_dark() {
        let p = click_probability(0.1, &DetectorModel::SNSPD, T).unwrap();
        assert!((p.value - 0.0200002).abs() < 1e-15);
        assert!(!p.clamped);
    }

    #[test]
    fn clamps_outside_weak_regime() {
        let p = click_probability(20.0, &DetectorModel::SNSPD, T).unwrap();
        assert_eq!(p.value, 1.0);
        assert!(p.clamped);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(click_probability(-1e-3, &DetectorModel::SNSPD, T).is_err());
        let bad_gate = DetectorModel { gate: Gate::Gated(20e-9), ..DetectorModel::APD };
        assert!(click_probability(0.1, &bad_gate, T).is_err());
        let bad_eff = DetectorModel { efficiency: 0.0, ..DetectorModel::SNSPD };
        assert!(click_probability(0.1, &bad_eff, T).is_err());
    }

    #[test]
    fn presets_by_name() {
        assert_eq!("SNSPD".parse::<DetectorPreset>().unwrap().model(), DetectorModel::SNSPD);
        assert_eq!("apd".parse::<DetectorPreset>().unwrap().model(), DetectorModel::APD);
        assert!("pmt".parse::<DetectorPreset>().is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(a in 0.0f64..10.0, b in 0.0f64..10.0, eff in 0.01f64..1.0, dark in 0.0f64..1e6) {
            let d = DetectorModel { efficiency: eff, dark_rate_hz: dark, gate: Gate::Continuous };
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let pl = click_probability(lo, &d, T).unwrap().value;
            let ph = click_probability(hi, &d, T).unwrap().value;
            prop_assert!(pl <= ph);
            prop_assert!((0.0..=1.0).contains(&pl) && (0.0..=1.0).contains(&ph));
            if !click_probability(lo, &d, T).unwrap().clamped {
                prop_assert!((pl - (eff * lo + dark * T)).abs() < 1e-12);
            }
        }
    }
}
