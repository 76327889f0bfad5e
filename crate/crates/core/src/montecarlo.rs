//! Window-by-window simulation of the protocol, used as an independent check
//! of the analytic error-and-erasure channel.
//!
//! Each window draws Alice's and Bob's phases, turns the mean photon number at
//! the detector into a click probability and samples one Bernoulli trial.
//! Sifted windows split into phase-matched pairs, which estimate the click
//! probability `1 - E - G`, and phase-opposite pairs, which estimate `E`.
//!
//! Work is cut into fixed-size chunks; chunk `i` draws from the ChaCha8 stream
//! `i` of the session seed, so results do not depend on the thread count.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bsee::{channel_from_system, BseeChannel};
use crate::detection::{click_probability, DetectorModel};
use crate::error::{Error, Result};
use crate::keyrate::Protocol;
use crate::params::SystemParams;
use crate::states::mean_photons_at_detector;

const CHUNK: u64 = 1 << 16;

/// Passing threshold on |z| for [`validate_against_analytic`].
pub const Z_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub params: SystemParams,
    pub detector: DetectorModel,
    pub protocol: Protocol,
    pub length_km: f64,
    pub windows: u64,
    pub seed: u64,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.detector.validate(self.params.window_s)?;
        if self.windows == 0 {
            return Err(Error::invalid("windows", "need at least one window"));
        }
        if self.protocol == Protocol::Bb84TwoDetector {
            return Err(Error::UnsupportedProtocol("bb84-two-detector"));
        }
        if !(self.length_km.is_finite() && self.length_km >= 0.0) {
            return Err(Error::invalid("length_km", "fibre length must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Empirical estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

fn proportion(hits: u64, trials: u64) -> Estimate {
    if trials == 0 {
        return Estimate { value: f64::NAN, std_err: f64::NAN };
    }
    let p = hits as f64 / trials as f64;
    Estimate {
        value: p,
        std_err: (p * (1.0 - p) / trials as f64).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Counts {
    sifted: u64,
    matched: u64,
    matched_clicks: u64,
    opposite: u64,
    opposite_clicks: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts {
            sifted: self.sifted + o.sifted,
            matched: self.matched + o.matched,
            matched_clicks: self.matched_clicks + o.matched_clicks,
            opposite: self.opposite + o.opposite,
            opposite_clicks: self.opposite_clicks + o.opposite_clicks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionStats {
    pub windows: u64,
    /// Windows kept after basis reconciliation.
    pub sifted: u64,
    /// Sifted windows with a click.
    pub conclusive: u64,
    /// Conclusive windows where Bob's bit differs from Alice's.
    pub errors: u64,
    /// Sifted windows with equal phases, and how many of them clicked.
    pub matched_windows: u64,
    pub matched_clicks: u64,
    /// Sifted windows with opposite phases; every click here is an error.
    pub opposite_windows: u64,
    pub e_hat: Estimate,
    pub g_hat: Estimate,
    pub q_hat: Estimate,
}

impl SessionStats {
    pub fn sifted_fraction(&self) -> f64 {
        self.sifted as f64 / self.windows as f64
    }

    fn from_counts(windows: u64, c: Counts) -> Self {
        let e = proportion(c.opposite_clicks, c.opposite);
        let ok = proportion(c.matched_clicks, c.matched);
        let conclusive = c.matched_clicks + c.opposite_clicks;
        SessionStats {
            windows,
            sifted: c.sifted,
            conclusive,
            errors: c.opposite_clicks,
            matched_windows: c.matched,
            matched_clicks: c.matched_clicks,
            opposite_windows: c.opposite,
            e_hat: e,
            g_hat: Estimate {
                value: 1.0 - e.value - ok.value,
                std_err: (e.std_err.powi(2) + ok.std_err.powi(2)).sqrt(),
            },
            q_hat: proportion(c.opposite_clicks, conclusive),
        }
    }
}

/// Click probability for every (Alice phase, Bob phase) pair of the protocol.
fn click_table(cfg: &SessionConfig) -> Result<Vec<Vec<f64>>> {
    let phases = cfg.protocol.phases();
    phases
        .iter()
        .map(|&a| {
            phases
                .iter()
                .map(|&b| {
                    let n = mean_photons_at_detector(&cfg.params, a, b.offset(cfg.params.delta_phi), cfg.length_km)?;
                    Ok(click_probability(n, &cfg.detector, cfg.params.window_s)?.value)
                })
                .collect()
        })
        .collect()
}

fn run_chunk(cfg: &SessionConfig, table: &[Vec<f64>], index: u64, windows: u64) -> Counts {
    let phases = cfg.protocol.phases();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let mut c = Counts::default();
    for _ in 0..windows {
        let a = rng.random_range(0..phases.len());
        let b = rng.random_range(0..phases.len());
        let click = rng.random::<f64>() < table[a][b];
        let sifted = match cfg.protocol {
            Protocol::B92 => true,
            _ => phases[a].basis() == phases[b].basis(),
        };
        if !sifted {
            continue;
        }
        c.sifted += 1;
        if phases[a].bit() == phases[b].bit() {
            c.matched += 1;
            c.matched_clicks += click as u64;
        } else {
            c.opposite += 1;
            c.opposite_clicks += click as u64;
        }
    }
    c
}

/// Simulates `cfg.windows` transmission windows. Deterministic for a fixed seed.
pub fn simulate_session(cfg: &SessionConfig) -> Result<SessionStats> {
    cfg.validate()?;
    let table = click_table(cfg)?;
    let chunks = cfg.windows.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let n = CHUNK.min(cfg.windows - i * CHUNK);
            run_chunk(cfg, &table, i, n)
        })
        .reduce(Counts::default, |a, b| a + b);
    Ok(SessionStats::from_counts(cfg.windows, counts))
}

/// One estimated quantity against its analytic value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub name: &'static str,
    pub estimate: f64,
    pub analytic: f64,
    /// Standard error under the analytic value.
    pub std_err: f64,
    pub z: f64,
}

impl Comparison {
    fn new(name: &'static str, estimate: f64, analytic: f64, std_err: f64) -> Self {
        let z = if std_err > 0.0 {
            (estimate - analytic) / std_err
        } else if estimate == analytic {
            0.0
        } else {
            f64::INFINITY
        };
        Comparison { name, estimate, analytic, std_err, z }
    }

    pub fn passed(&self) -> bool {
        self.z.abs() < Z_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub config: SessionConfig,
    pub stats: SessionStats,
    pub analytic: BseeChannel,
    pub comparisons: [Comparison; 3],
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.comparisons.iter().all(Comparison::passed)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["quantity", "estimate", "analytic", "std_err", "z", "pass"])?;
        for c in &self.comparisons {
            w.write_record([
                c.name.to_string(),
                crate::sweep::fmt_num(c.estimate),
                crate::sweep::fmt_num(c.analytic),
                crate::sweep::fmt_num(c.std_err),
                crate::sweep::fmt_num(c.z),
                c.passed().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.stats;
        writeln!(
            f,
            "monte-carlo validation: protocol={} length_km={} windows={} seed={}",
            self.config.protocol, self.config.length_km, s.windows, self.config.seed
        )?;
        writeln!(
            f,
            "counts: sifted={} conclusive={} errors={} sifted_fraction={:.6}",
            s.sifted,
            s.conclusive,
            s.errors,
            s.sifted_fraction()
        )?;
        for c in &self.comparisons {
            writeln!(
                f,
                "{}: estimate={:.9e} analytic={:.9e} std_err={:.3e} z={:+.3} {}",
                c.name,
                c.estimate,
                c.analytic,
                c.std_err,
                c.z,
                if c.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Runs a session and compares `E`, `G` and `Q` with the analytic channel.
pub fn validate_against_analytic(cfg: &SessionConfig) -> Result<ValidationReport> {
    let stats = simulate_session(cfg)?;
    let analytic = channel_from_system(&cfg.params, &cfg.detector, cfg.length_km)?;
    let ok = 1.0 - analytic.error - analytic.erasure;
    let se_e = (analytic.error * (1.0 - analytic.error) / stats.opposite_windows as f64).sqrt();
    let se_ok = (ok * (1.0 - ok) / stats.matched_windows as f64).sqrt();
    let q = analytic.qber().unwrap_or(f64::NAN);
    let se_q = (q * (1.0 - q) / stats.conclusive as f64).sqrt();
    let comparisons = [
        Comparison::new("E", stats.e_hat.value, analytic.error, se_e),
        Comparison::new("G", stats.g_hat.value, analytic.erasure, (se_e * se_e + se_ok * se_ok).sqrt()),
        Comparison::new("Q", stats.q_hat.value, q, se_q),
    ];
    Ok(ValidationReport {
        config: *cfg,
        stats,
        analytic,
        comparisons,
    })
}
