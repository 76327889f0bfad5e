//! Binary symmetric error-and-erasure channel between Alice and Bob.

use crate::detection::{click_probability, DetectorModel};
use crate::error::{Error, Result};
use crate::keyrate::binary_entropy;
use crate::params::{Phase, SystemParams};
use crate::states::mean_photons_at_detector;

/// `E = P(0|1) = P(1|0)` and `G = P(2|0) = P(2|1)`, output 2 being "no click".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BseeChannel {
    pub error: f64,
    pub erasure: f64,
}

fn xlog2x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

impl BseeChannel {
    pub fn new(error: f64, erasure: f64) -> Result<Self> {
        if !(error >= 0.0 && erasure >= 0.0) {
            return Err(Error::invalid("error/erasure", format!("need E >= 0 and G >= 0, got E = {error}, G = {erasure}")));
        }
        if error + erasure > 1.0 + 1e-15 {
            return Err(Error::invalid("error/erasure", format!("E + G = {} exceeds 1", error + erasure)));
        }
        Ok(BseeChannel { error, erasure })
    }

    /// Equivalent cascade of a binary symmetric channel with flip probability
    /// `q` followed by an erasure channel with erasure probability `g`.
    pub fn from_cascade(q: f64, g: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&g) {
            return Err(Error::invalid("q/g", "cascade parameters must be probabilities"));
        }
        BseeChannel::new(q * (1.0 - g), g)
    }

    /// `P(y|x)` with rows `x = 0, 1` and columns `y = 0, 1, 2`.
    pub fn transition_matrix(&self) -> [[f64; 3]; 2] {
        let (e, g) = (self.error, self.erasure);
        let ok = 1.0 - e - g;
        [[ok, e, g], [e, ok, g]]
    }

    pub fn qber(&self) -> Result<f64> {
        qber(self)
    }

    pub fn capacity(&self) -> f64 {
        capacity(self)
    }
}

/// Conditional error rate on conclusive outcomes, `Q = E / (1 - G)`.
pub fn qber(c: &BseeChannel) -> Result<f64> {
    let conclusive = 1.0 - c.erasure;
    if conclusive <= 0.0 {
        return Err(Error::UndefinedQber);
    }
    Ok(c.error / conclusive)
}

/// `C = 1 - G - (1-G)log₂(1-G) + E log₂E + (1-G-E) log₂(1-G-E)`.
pub fn capacity(c: &BseeChannel) -> f64 {
    let (e, g) = (c.error, c.erasure);
    let ok = (1.0 - g - e).max(0.0);
    1.0 - g - xlog2x(1.0 - g) + xlog2x(e) + xlog2x(ok)
}

/// Capacity through the cascade, `(1 - h(Q))(1 - G)`.
pub fn cascade_capacity(c: &BseeChannel) -> f64 {
    match qber(c) {
        Ok(q) => (1.0 - binary_entropy(q.min(1.0)).unwrap_or(0.0)) * (1.0 - c.erasure),
        Err(_) => 0.0,
    }
}

/// Click probabilities behind a channel: on the phase-matched pair and the
/// phase-opposite pair, both with the phase instability applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelClicks {
    /// Click probability when Bob's phase equals Alice's (`1 - E - G`).
    pub matched: f64,
    /// Click probability when the phases are opposite (`E`).
    pub opposite: f64,
    /// Either probability hit the clamp at 1.
    pub clamped: bool,
}

pub fn clicks_from_system(p: &SystemParams, d: &DetectorModel, length_km: f64) -> Result<ChannelClicks> {
    p.validate()?;
    let n_opposite = mean_photons_at_detector(p, Phase::ZERO, Phase::PI.offset(p.delta_phi), length_km)?;
    let n_matched = mean_photons_at_detector(p, Phase::ZERO, Phase::ZERO.offset(p.delta_phi), length_km)?;
    let opposite = click_probability(n_opposite, d, p.window_s)?;
    let matched = click_probability(n_matched, d, p.window_s)?;
    Ok(ChannelClicks {
        matched: matched.value,
        opposite: opposite.value,
        clamped: matched.clamped || opposite.clamped,
    })
}

/// `E = P_det(0, π+Δφ)` and `1 - E - G = P_det(0, Δφ)`.
pub fn channel_from_system(p: &SystemParams, d: &DetectorModel, length_km: f64) -> Result<BseeChannel> {
    let clicks = clicks_from_system(p, d, length_km)?;
    let erasure = 1.0 - clicks.opposite - clicks.matched;
    if erasure < 0.0 {
        return Err(Error::invalid(
            "mu0",
            format!(
                "click probabilities {} + {} exceed 1; the weak-signal detector model does not apply",
                clicks.matched, clicks.opposite
            ),
        ));
    }
    BseeChannel::new(clicks.opposite, erasure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn qber_arithmetic() {
        assert_eq!(qber(&BseeChannel::new(0.0, 0.5).unwrap()).unwrap(), 0.0);
        assert!((qber(&BseeChannel::new(0.05, 0.9).unwrap()).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(qber(&BseeChannel::new(0.0, 1.0).unwrap()), Err(Error::UndefinedQber));
    }

    #[test]
    fn cascade_reproduces_transition_matrix() {
        for (e, g) in [(0.01, 0.3), (0.0, 0.9), (0.2, 0.1), (0.004, 0.99)] {
            let c = BseeChannel::new(e, g).unwrap();
            let back = BseeChannel::from_cascade(c.qber().unwrap(), g).unwrap();
            let (a, b) = (c.transition_matrix(), back.transition_matrix());
            for x in 0..2 {
                for y in 0..3 {
                    assert!((a[x][y] - b[x][y]).abs() < 1e-15);
                }
                assert!((a[x].iter().sum::<f64>() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn capacity_special_cases() {
        assert_eq!(capacity(&BseeChannel::new(0.0, 0.0).unwrap()), 1.0);
        for g in [0.1, 0.5, 0.97] {
            assert!((capacity(&BseeChannel::new(0.0, g).unwrap()) - (1.0 - g)).abs() < 1e-15);
            // h(0.11) = 0.49992... so the capacity is about half the unerased fraction
            let c = capacity(&BseeChannel::new(0.11 * (1.0 - g), g).unwrap());
            assert!((c - 0.50008 * (1.0 - g)).abs() < 1e-5);
        }
        assert!(capacity(&BseeChannel::new(0.0, 1.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_channels() {
        assert!(BseeChannel::new(-0.1, 0.2).is_err());
        assert!(BseeChannel::new(0.6, 0.6).is_err());
    }

    #[test]
    fn ideal_system_has_no_errors() {
        let p = SystemParams { delta_phi: 0.0, carrier_suppression: 0.0, ..SystemParams::default() };
        let d = DetectorModel { dark_rate_hz: 0.0, ..DetectorModel::SNSPD };
        for l in [0.0, 50.0, 150.0] {
            let c = channel_from_system(&p, &d, l).unwrap();
            assert_eq!(c.error, 0.0);
            assert_eq!(c.qber().unwrap(), 0.0);
        }
    }

    #[test]
    fn no_light_means_no_conclusive_events() {
        let p = SystemParams { mu0: 0.0, ..SystemParams::default() };
        let d = DetectorModel { dark_rate_hz: 0.0, ..DetectorModel::SNSPD };
        let c = channel_from_system(&p, &d, 10.0).unwrap();
        assert_eq!(c.erasure, 1.0);
        assert_eq!(c.qber(), Err(Error::UndefinedQber));
        let p = SystemParams { mu0: 1e-9, ..p };
        assert!(channel_from_system(&p, &d, 10.0).unwrap().erasure > 1.0 - 1e-9);
    }

    #[test]
    fn operating_point_qber_is_sub_percent_and_rising() {
        let p = SystemParams::default();
        let d = DetectorModel::SNSPD;
        let q0 = channel_from_system(&p, &d, 0.0).unwrap().qber().unwrap();
        assert!(q0 > 0.001 && q0 < 0.01);
        let q_far = channel_from_system(&p, &d, 45.0 / 0.18).unwrap().qber().unwrap();
        assert!(q_far > 10.0 * q0);
    }

    #[test]
    fn channel_monotone_in_length() {
        let p = SystemParams::default();
        for d in [DetectorModel::SNSPD, DetectorModel::APD] {
            let mut prev = channel_from_system(&p, &d, 0.0).unwrap();
            for i in 1..=60 {
                let c = channel_from_system(&p, &d, i as f64 * 5.0).unwrap();
                assert!(c.erasure >= prev.erasure);
                assert!(c.qber().unwrap() >= prev.qber().unwrap());
                prev = c;
            }
        }
    }

    proptest! {
        #[test]
        fn capacity_factorises(e in 0.0f64..1.0, g in 0.0f64..0.999) {
            let e = e * (1.0 - g);
            let c = BseeChannel::new(e, g).unwrap();
            prop_assert!((capacity(&c) - cascade_capacity(&c)).abs() < 1e-12);
        }

        #[test]
        fn qber_invariant_under_common_scaling(e in 0.0f64..0.5, g in 0.0f64..0.5, s in 0.01f64..1.0) {
            let c = BseeChannel::new(e, g).unwrap();
            let scaled = BseeChannel::new(e * s, 1.0 - (1.0 - g) * s).unwrap();
            prop_assert!((c.qber().unwrap() - scaled.qber().unwrap()).abs() < 1e-12);
        }
    }
}
