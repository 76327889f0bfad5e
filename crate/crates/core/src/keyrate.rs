//! Secure key rate under the beam-splitting attack, optimal modulation depth and
//! the one-detector versus two-detector BB84 comparison.

use serde::{Deserialize, Serialize};

use crate::attack::holevo_cbs;
use crate::bsee::channel_from_system;
use crate::detection::DetectorModel;
use crate::error::{Error, Result};
use crate::params::{Phase, SystemParams};
use crate::states::bob_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    B92,
    /// BB84 where Bob decodes one state per basis on a single detector.
    Bb84Osd,
    /// BB84 with one detector per sideband group; only used in the rate comparison.
    Bb84TwoDetector,
}

impl Protocol {
    /// Fraction of windows kept after basis reconciliation.
    pub fn sifting_factor(self) -> f64 {
        match self {
            Protocol::B92 => 1.0,
            Protocol::Bb84Osd | Protocol::Bb84TwoDetector => 0.5,
        }
    }

    /// Phases Alice and Bob draw from.
    pub fn phases(self) -> &'static [Phase] {
        const TWO: [Phase; 2] = [Phase::ZERO, Phase::PI];
        const FOUR: [Phase; 4] = [Phase::ZERO, Phase::HALF_PI, Phase::PI, Phase::THREE_HALF_PI];
        match self {
            Protocol::B92 => &TWO,
            Protocol::Bb84Osd | Protocol::Bb84TwoDetector => &FOUR,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::B92 => "b92",
            Protocol::Bb84Osd => "bb84-osd",
            Protocol::Bb84TwoDetector => "bb84-two-detector",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "b92" => Ok(Protocol::B92),
            "bb84-osd" => Ok(Protocol::Bb84Osd),
            "bb84-two-detector" => Ok(Protocol::Bb84TwoDetector),
            other => Err(Error::invalid("protocol", format!("unknown protocol `{other}`"))),
        }
    }
}

/// Error-correction leakage `f_EC · h(Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcModel {
    pub f_ec: f64,
}

impl Default for EcModel {
    fn default() -> Self {
        EcModel { f_ec: 1.0 }
    }
}

impl EcModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_ec.is_finite() && self.f_ec >= 1.0) {
            return Err(Error::invalid("f_ec", format!("error-correction inefficiency must be >= 1, got {}", self.f_ec)));
        }
        Ok(())
    }

    pub fn leak(&self, qber: f64) -> Result<f64> {
        Ok(self.f_ec * binary_entropy(qber)?)
    }
}

/// `h(x) = -x log₂x - (1-x) log₂(1-x)` with `0 log₂0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("probability must lie in [0, 1], got {x}")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// Why a rate came out as it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateStatus {
    Positive,
    /// Error correction plus Eve's information use up every accepted bit.
    FlooredToZero,
    /// Bob never gets a conclusive outcome, so the QBER is undefined.
    NoClicks,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRatePoint {
    pub length_km: f64,
    pub loss_db: f64,
    /// NaN when there are no conclusive events.
    pub qber: f64,
    pub error: f64,
    pub erasure: f64,
    pub chi: f64,
    /// Probability of accepting a bit per window, `(1 - G) f`.
    pub accept_prob: f64,
    /// Secure key rate, bits per second.
    pub rate_bps: f64,
    pub status: RateStatus,
}

/// Devetak-Winter rate `ν_S (1-G) f [1 - f_EC h(Q) - χ]`, floored at zero.
pub fn secure_rate(
    p: &SystemParams,
    d: &DetectorModel,
    proto: Protocol,
    ec: &EcModel,
    length_km: f64,
) -> Result<KeyRatePoint> {
    if proto == Protocol::Bb84TwoDetector {
        return Err(Error::UnsupportedProtocol("bb84-two-detector"));
    }
    ec.validate()?;
    let channel = channel_from_system(p, d, length_km)?;
    let chi = holevo_cbs(p, length_km)?.chi;
    let accept_prob = (1.0 - channel.erasure) * proto.sifting_factor();
    let mut point = KeyRatePoint {
        length_km,
        loss_db: p.xi_db_per_km * length_km,
        qber: f64::NAN,
        error: channel.error,
        erasure: channel.erasure,
        chi,
        accept_prob,
        rate_bps: 0.0,
        status: RateStatus::NoClicks,
    };
    let qber = match channel.qber() {
        Ok(q) => q,
        Err(Error::UndefinedQber) => return Ok(point),
        Err(e) => return Err(e),
    };
    point.qber = qber;
    let bracket = 1.0 - ec.leak(qber.min(1.0))? - chi;
    if bracket > 0.0 && accept_prob > 0.0 {
        point.rate_bps = p.rep_rate_hz * accept_prob * bracket;
        point.status = RateStatus::Positive;
    } else {
        point.status = RateStatus::FlooredToZero;
    }
    Ok(point)
}

/// [`secure_rate`] at a channel loss in dB rather than a length.
pub fn secure_rate_at_loss(
    p: &SystemParams,
    d: &DetectorModel,
    proto: Protocol,
    ec: &EcModel,
    loss_db: f64,
) -> Result<KeyRatePoint> {
    let length_km = length_for_loss(p, loss_db)?;
    let mut point = secure_rate(p, d, proto, ec, length_km)?;
    point.loss_db = loss_db;
    Ok(point)
}

pub(crate) fn length_for_loss(p: &SystemParams, loss_db: f64) -> Result<f64> {
    if !(loss_db.is_finite() && loss_db >= 0.0) {
        return Err(Error::invalid("loss_db", format!("loss must be finite and >= 0, got {loss_db}")));
    }
    if p.xi_db_per_km <= 0.0 {
        return Err(Error::invalid("xi_db_per_km", "a loss sweep needs a positive fibre loss coefficient"));
    }
    Ok(loss_db / p.xi_db_per_km)
}

/// Mean photon number on all of Alice's sidebands, `μ0 (1 - d_{00}(β)²)`.
pub fn sideband_mu(p: &SystemParams) -> Result<f64> {
    p.validate()?;
    let d = p.dfunction().d00(p.beta()?)?;
    Ok(p.mu0 * (1.0 - d * d))
}

/// Modulation-depth search: log-spaced grid, then golden-section refinement
/// around the best grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumSearch {
    pub m_min: f64,
    pub m_max: f64,
    pub grid_points: usize,
    /// Relative tolerance on `m` for the refinement.
    pub rel_tol: f64,
}

impl Default for OptimumSearch {
    fn default() -> Self {
        OptimumSearch {
            m_min: 1e-3,
            m_max: 1.5,
            grid_points: 200,
            rel_tol: 1e-4,
        }
    }
}

impl OptimumSearch {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_points.max(2);
        let (lo, hi) = (self.m_min.ln(), self.m_max.ln());
        (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalModulation {
    /// Sideband photon number at the optimum.
    pub mu: f64,
    pub m: f64,
    pub rate_bps: f64,
    /// Best point of the coarse grid before refinement.
    pub grid_m: f64,
    pub grid_rate_bps: f64,
}

/// Modulation index (and sideband photon number) that maximises the key rate
/// at `length_km`. Returns [`Error::NoPositiveRate`] when no grid point gives a
/// positive rate.
pub fn optimal_mu(
    p: &SystemParams,
    d: &DetectorModel,
    proto: Protocol,
    ec: &EcModel,
    length_km: f64,
) -> Result<OptimalModulation> {
    optimal_mu_with(p, d, proto, ec, length_km, &OptimumSearch::default())
}

pub fn optimal_mu_with(
    p: &SystemParams,
    d: &DetectorModel,
    proto: Protocol,
    ec: &EcModel,
    length_km: f64,
    search: &OptimumSearch,
) -> Result<OptimalModulation> {
    let rate = |m: f64| -> Result<f64> { Ok(secure_rate(&p.with_modulation(m), d, proto, ec, length_km)?.rate_bps) };
    let grid = search.grid();
    let rates = grid.iter().map(|&m| rate(m)).collect::<Result<Vec<_>>>()?;
    let (best, &best_rate) = rates
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is not empty");
    if best_rate <= 0.0 {
        return Err(Error::NoPositiveRate {
            loss_db: p.xi_db_per_km * length_km,
        });
    }

    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (rate(x1)?, rate(x2)?);
    while hi - lo > search.rel_tol * 0.5 * (hi + lo) {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = rate(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = rate(x1)?;
        }
    }
    let (mut m, mut k) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if best_rate > k {
        m = grid[best];
        k = best_rate;
    }
    Ok(OptimalModulation {
        mu: sideband_mu(&p.with_modulation(m))?,
        m,
        rate_bps: k,
        grid_m: grid[best],
        grid_rate_bps: best_rate,
    })
}

/// Sideband photon number per detector in two-detector BB84,
/// `μ_s' = μ_s + ½(√μ̄ - √(μ̄ - 2μ_s))²`.
pub fn bb84_two_detector_mu(mu_s: f64, mu_bar: f64) -> Result<f64> {
    if !(mu_s.is_finite() && mu_bar.is_finite()) || mu_s < 0.0 || 2.0 * mu_s > mu_bar {
        return Err(Error::invalid(
            "mu_s",
            format!("need 0 <= 2 mu_s <= mu_bar, got mu_s = {mu_s}, mu_bar = {mu_bar}"),
        ));
    }
    let gap = mu_bar.sqrt() - (mu_bar - 2.0 * mu_s).sqrt();
    Ok(mu_s + 0.5 * gap * gap)
}

/// Photon budget and count rates of BB84-OSD against two-detector BB84.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bb84Comparison {
    pub length_km: f64,
    /// Photons on the upper sidebands after constructive demodulation.
    pub mu_s: f64,
    pub mu_s_lower: f64,
    /// Carrier photons after constructive demodulation.
    pub mu_bar_c: f64,
    /// Carrier photons after destructive demodulation (all light on the carrier).
    pub mu_bar: f64,
    /// `μ̄ - (μ̄_c + 2μ_s)`.
    pub conservation_residual: f64,
    pub mu_s_prime: f64,
    /// Total count rate of two-detector BB84, `2 η_B μ_s'` per window.
    pub rate_bb84: f64,
    /// Count rate of the single BB84-OSD detector, `2 η_B μ_s` per window.
    pub rate_osd: f64,
    /// `rate_bb84 / rate_osd - 1`.
    pub relative_difference: f64,
    /// `μ_s/μ̄ <= 0.05`, where the two count rates are expected to coincide.
    pub low_modulation: bool,
}

pub const LOW_MODULATION_RATIO: f64 = 0.05;

pub fn compare_bb84_variants(p: &SystemParams, length_km: f64) -> Result<Bb84Comparison> {
    // demodulated field before Bob's losses and the carrier filter, no phase error
    let ideal = SystemParams {
        eta_b: 1.0,
        carrier_suppression: 1.0,
        ..*p
    };
    let constructive = bob_state(&ideal, Phase::ZERO, Phase::ZERO, length_km)?;
    let destructive = bob_state(&ideal, Phase::PI, Phase::ZERO, length_km)?;
    let mu_s = constructive.upper_sideband_photons();
    let mu_bar_c = constructive.carrier_photons();
    let mu_bar = destructive.carrier_photons();
    let conservation_residual = mu_bar - (mu_bar_c + 2.0 * mu_s);
    let mu_s_prime = bb84_two_detector_mu(mu_s, mu_bar.max(2.0 * mu_s))?;
    let rate_bb84 = 2.0 * p.eta_b * mu_s_prime;
    let rate_osd = 2.0 * p.eta_b * mu_s;
    let relative_difference = if rate_osd > 0.0 { rate_bb84 / rate_osd - 1.0 } else { 0.0 };
    Ok(Bb84Comparison {
        length_km,
        mu_s,
        mu_s_lower: constructive.lower_sideband_photons(),
        mu_bar_c,
        mu_bar,
        conservation_residual,
        mu_s_prime,
        rate_bb84,
        rate_osd,
        relative_difference,
        low_modulation: mu_bar > 0.0 && mu_s / mu_bar <= LOW_MODULATION_RATIO,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::{bessel_j, DMode, SidebandCount};

    fn p() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        let direct = -0.11 * f64::ln(0.11) / f64::ln(2.0) - 0.89 * f64::ln(0.89) / f64::ln(2.0);
        assert!((binary_entropy(0.11).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(0.11).unwrap() - 0.49992).abs() < 1e-5);
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
    }

    #[test]
    fn protocol_factors() {
        assert_eq!(Protocol::B92.sifting_factor(), 1.0);
        assert_eq!(Protocol::Bb84Osd.sifting_factor(), 0.5);
        assert_eq!(Protocol::Bb84TwoDetector.sifting_factor(), 0.5);
        assert_eq!("BB84_OSD".parse::<Protocol>().unwrap(), Protocol::Bb84Osd);
        assert!("e91".parse::<Protocol>().is_err());
    }

    #[test]
    fn b92_doubles_bb84_osd() {
        for d in [DetectorModel::SNSPD, DetectorModel::APD] {
            for l in [0.0, 20.0, 100.0, 180.0, 240.0, 400.0] {
                let a = secure_rate(&p(), &d, Protocol::B92, &EcModel::default(), l).unwrap();
                let b = secure_rate(&p(), &d, Protocol::Bb84Osd, &EcModel::default(), l).unwrap();
                assert_eq!(a.rate_bps, 2.0 * b.rate_bps);
            }
        }
    }

    #[test]
    fn floor_when_bracket_negative() {
        let ec = EcModel { f_ec: 1.0 };
        let pt = secure_rate(&p(), &DetectorModel::APD, Protocol::B92, &ec, 300.0).unwrap();
        assert!(pt.chi + pt.qber.min(1.0) > 0.0);
        assert!(pt.chi + binary_entropy(pt.qber).unwrap() >= 1.0);
        assert_eq!(pt.rate_bps, 0.0);
        assert_eq!(pt.status, RateStatus::FlooredToZero);
    }

    #[test]
    fn no_clicks_flag() {
        let dark = DetectorModel { dark_rate_hz: 0.0, ..DetectorModel::SNSPD };
        let pt = secure_rate(&SystemParams { mu0: 0.0, ..p() }, &dark, Protocol::B92, &EcModel::default(), 10.0).unwrap();
        assert_eq!(pt.status, RateStatus::NoClicks);
        assert_eq!(pt.rate_bps, 0.0);
        assert!(pt.qber.is_nan());
    }

    #[test]
    fn ideal_link_pays_only_erasures_and_holevo() {
        let ideal = SystemParams { delta_phi: 0.0, carrier_suppression: 0.0, ..p() };
        let dark = DetectorModel { dark_rate_hz: 0.0, ..DetectorModel::SNSPD };
        for l in [1.0, 50.0, 200.0] {
            let pt = secure_rate(&ideal, &dark, Protocol::Bb84Osd, &EcModel::default(), l).unwrap();
            let expect = ideal.rep_rate_hz * 0.5 * (1.0 - pt.erasure) * (1.0 - pt.chi);
            assert!((pt.rate_bps - expect).abs() < 1e-9 * expect);
            assert_eq!(pt.qber, 0.0);
        }
    }

    #[test]
    fn two_detector_protocol_is_analysis_only() {
        let r = secure_rate(&p(), &DetectorModel::SNSPD, Protocol::Bb84TwoDetector, &EcModel::default(), 1.0);
        assert!(matches!(r, Err(Error::UnsupportedProtocol(_))));
    }

    #[test]
    fn rejects_bad_ec() {
        let r = secure_rate(&p(), &DetectorModel::SNSPD, Protocol::B92, &EcModel { f_ec: 0.9 }, 1.0);
        assert!(r.is_err());
    }

    #[test]
    fn sideband_mu_values() {
        assert_eq!(sideband_mu(&p().with_modulation(0.0)).unwrap(), 0.0);
        let j0 = bessel_j(0, 0.319).unwrap();
        assert!((sideband_mu(&p()).unwrap() - 4.0 * (1.0 - j0 * j0)).abs() < 1e-14);
        assert!((sideband_mu(&p()).unwrap() - 0.1997).abs() < 1e-4);
        let exact = SystemParams { sidebands: SidebandCount::new(1000).unwrap(), mode: DMode::Exact, ..p() };
        assert!((sideband_mu(&exact).unwrap() - sideband_mu(&p()).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn two_detector_photon_number() {
        assert_eq!(bb84_two_detector_mu(0.0, 4.0).unwrap(), 0.0);
        assert!(bb84_two_detector_mu(2.1, 4.0).is_err());
        assert!(bb84_two_detector_mu(-0.1, 4.0).is_err());
        for ratio in [1e-4, 1e-3, 5e-3, 1e-2] {
            let mu_bar = 4.0;
            let mu_s = ratio * mu_bar;
            let excess = bb84_two_detector_mu(mu_s, mu_bar).unwrap() - mu_s;
            let approx = mu_s * mu_s / (2.0 * mu_bar);
            assert!((excess / approx - 1.0).abs() < 0.1);
        }
        // at the boundary all carrier light is gone: μ_s' = μ_s + μ̄/2
        assert!((bb84_two_detector_mu(2.0, 4.0).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn comparison_conserves_photons() {
        for mode in [DMode::Exact, DMode::Asymptotic] {
            let c = compare_bb84_variants(&p().with_mode(mode), 0.0).unwrap();
            assert!(c.conservation_residual.abs() < 1e-12);
            assert!((c.mu_s - c.mu_s_lower).abs() < 1e-12);
            assert!((c.mu_bar - p().mu0).abs() < 1e-12);
            // μ_s' evaluated by hand
            let gap = c.mu_bar.sqrt() - (c.mu_bar - 2.0 * c.mu_s).sqrt();
            assert!((c.mu_s_prime - (c.mu_s + 0.5 * gap * gap)).abs() < 1e-15);
            let first_order = c.mu_s / (2.0 * c.mu_bar);
            assert!((c.relative_difference / first_order - 1.0).abs() < 0.15);
            assert!(!c.low_modulation);
        }
    }

    #[test]
    fn comparison_converges_for_weak_modulation() {
        let mut prev = f64::INFINITY;
        for m in [0.3, 0.1, 0.03, 0.01, 0.001] {
            let c = compare_bb84_variants(&p().with_modulation(m), 10.0).unwrap();
            assert!(c.relative_difference >= 0.0 && c.relative_difference < prev);
            prev = c.relative_difference;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn optimum_dominates_grid() {
        let search = OptimumSearch::default();
        let length = 30.0 / 0.18;
        let opt = optimal_mu(&p(), &DetectorModel::SNSPD, Protocol::Bb84Osd, &EcModel::default(), length).unwrap();
        for m in search.grid() {
            let k = secure_rate(&p().with_modulation(m), &DetectorModel::SNSPD, Protocol::Bb84Osd, &EcModel::default(), length)
                .unwrap()
                .rate_bps;
            assert!(opt.rate_bps >= k);
        }
        assert!((opt.mu - 0.2).abs() < 0.05);
    }

    #[test]
    fn no_positive_rate_is_reported() {
        let r = optimal_mu(&p(), &DetectorModel::APD, Protocol::Bb84Osd, &EcModel::default(), 60.0 / 0.18);
        assert!(matches!(r, Err(Error::NoPositiveRate { .. })));
    }
}
