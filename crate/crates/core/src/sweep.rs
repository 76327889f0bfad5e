//! CSV tables behind the command-line tool.
//!
//! Sweep points are evaluated in parallel and written in sweep order. Numbers
//! are printed in scientific notation with twelve significant digits.

use std::io::Write;

use rayon::prelude::*;

use crate::bsee::channel_from_system;
use crate::config::{RunConfig, SweepPoint};
use crate::error::{Error, Result};
use crate::keyrate::{compare_bb84_variants, optimal_mu, secure_rate};
use crate::montecarlo::{validate_against_analytic, SessionConfig, ValidationReport};

/// Formats a number for CSV output.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Numeric column by header name; text cells come back as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[i] {
                    Cell::Num(x) => *x,
                    Cell::Text(_) => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn text_column(&self, name: &str) -> Option<Vec<String>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].render()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

fn evaluate<F>(cfg: &RunConfig, header: Vec<String>, row: F) -> Result<Table>
where
    F: Fn(&SweepPoint) -> Result<Vec<Cell>> + Sync + Send,
{
    let rows = cfg.sweep_points().par_iter().map(row).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(header);
    table.rows = rows;
    Ok(table)
}

/// Rows `loss_db, length_km, E, G, Q`. `Q` is NaN where Bob never clicks.
pub fn qber_curve(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.system_params()?;
    let d = cfg.detector_model()?;
    let header = ["loss_db", "length_km", "E", "G", "Q"].map(String::from).to_vec();
    evaluate(cfg, header, |pt| {
        let c = channel_from_system(&p, &d, pt.length_km)?;
        let q = match c.qber() {
            Ok(q) => q,
            Err(Error::UndefinedQber) => f64::NAN,
            Err(e) => return Err(e),
        };
        Ok(vec![pt.loss_db.into(), pt.length_km.into(), c.error.into(), c.erasure.into(), q.into()])
    })
}

/// Rows `loss_db, length_km, Q, G, chi` followed by one `K_<protocol>` column
/// per requested protocol, in bits per second.
pub fn keyrate_curve(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.system_params()?;
    let d = cfg.detector_model()?;
    let mut header: Vec<String> = ["loss_db", "length_km", "Q", "G", "chi"].map(String::from).to_vec();
    header.extend(cfg.protocols.iter().map(|proto| format!("K_{proto}")));
    evaluate(cfg, header, |pt| {
        let mut row: Vec<Cell> = Vec::with_capacity(5 + cfg.protocols.len());
        for (i, &proto) in cfg.protocols.iter().enumerate() {
            let k = secure_rate(&p, &d, proto, &cfg.ec, pt.length_km)?;
            if i == 0 {
                row.extend([pt.loss_db, pt.length_km, k.qber, k.erasure, k.chi].map(Cell::from));
            }
            row.push(k.rate_bps.into());
        }
        Ok(row)
    })
}

/// Rows `loss_db, length_km, mu_star, m_star, K_star, K_fixed, status` for the
/// first requested protocol. `K_fixed` is the rate at the configured `m`.
pub fn optimal_mu_curve(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.system_params()?;
    let d = cfg.detector_model()?;
    let proto = cfg.primary_protocol();
    let header = ["loss_db", "length_km", "mu_star", "m_star", "K_star", "K_fixed", "status"]
        .map(String::from)
        .to_vec();
    evaluate(cfg, header, |pt| {
        let fixed = secure_rate(&p, &d, proto, &cfg.ec, pt.length_km)?.rate_bps;
        let (mu, m, k, status) = match optimal_mu(&p, &d, proto, &cfg.ec, pt.length_km) {
            Ok(o) => (o.mu, o.m, o.rate_bps, "positive"),
            Err(Error::NoPositiveRate { .. }) => (f64::NAN, f64::NAN, 0.0, "no-positive-rate"),
            Err(e) => return Err(e),
        };
        Ok(vec![
            pt.loss_db.into(),
            pt.length_km.into(),
            mu.into(),
            m.into(),
            k.into(),
            fixed.into(),
            status.into(),
        ])
    })
}

/// Rows comparing BB84-OSD with two-detector BB84 at each sweep point.
pub fn compare_bb84(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.system_params()?;
    let header = [
        "loss_db",
        "length_km",
        "mu_s",
        "mu_s_lower",
        "mu_bar_c",
        "mu_bar",
        "conservation_residual",
        "mu_s_prime",
        "count_rate_bb84",
        "count_rate_osd",
        "relative_difference",
        "low_modulation",
    ]
    .map(String::from)
    .to_vec();
    evaluate(cfg, header, |pt| {
        let c = compare_bb84_variants(&p, pt.length_km)?;
        Ok(vec![
            pt.loss_db.into(),
            pt.length_km.into(),
            c.mu_s.into(),
            c.mu_s_lower.into(),
            c.mu_bar_c.into(),
            c.mu_bar.into(),
            c.conservation_residual.into(),
            c.mu_s_prime.into(),
            c.rate_bb84.into(),
            c.rate_osd.into(),
            c.relative_difference.into(),
            if c.low_modulation { "true" } else { "false" }.into(),
        ])
    })
}

pub fn session_config(cfg: &RunConfig) -> Result<SessionConfig> {
    Ok(SessionConfig {
        params: cfg.system_params()?,
        detector: cfg.detector_model()?,
        protocol: cfg.primary_protocol(),
        length_km: cfg.montecarlo.length_km,
        windows: cfg.montecarlo.windows,
        seed: cfg.seed,
    })
}

/// Monte Carlo session against the analytic channel for the first protocol.
pub fn validate(cfg: &RunConfig) -> Result<ValidationReport> {
    validate_against_analytic(&session_config(cfg)?)
}

/// Commands exposed by the `scw-qkd` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    QberCurve,
    KeyrateCurve,
    OptimalMu,
    Validate,
    CompareBb84,
}

/// Runs `command`, writing CSV to `out` and any human-readable report to
/// `report`. A Monte Carlo run outside 3σ writes its output and then returns
/// [`Error::ValidationFailed`].
pub fn run<W: Write, R: Write>(command: Command, cfg: &RunConfig, out: W, mut report: R) -> Result<()> {
    let table = match command {
        Command::QberCurve => qber_curve(cfg)?,
        Command::KeyrateCurve => keyrate_curve(cfg)?,
        Command::OptimalMu => optimal_mu_curve(cfg)?,
        Command::CompareBb84 => compare_bb84(cfg)?,
        Command::Validate => {
            let r = validate(cfg)?;
            r.write_csv(out)?;
            writeln!(report, "{r}")?;
            if !r.passed() {
                let worst = r
                    .comparisons
                    .iter()
                    .max_by(|a, b| a.z.abs().total_cmp(&b.z.abs()))
                    .expect("three comparisons");
                return Err(Error::ValidationFailed(format!("{} off by {:.2} standard errors", worst.name, worst.z)));
            }
            return Ok(());
        }
    };
    table.write_csv(out)
}
