//! Simulates a session window by window and compares E, G and Q with the analytic channel.
//!
//! Run with `cargo run --release --example monte_carlo_validation -- [windows] [seed]`.

use scw_qkd::detection::DetectorModel;
use scw_qkd::keyrate::Protocol;
use scw_qkd::montecarlo::{validate_against_analytic, SessionConfig};
use scw_qkd::SystemParams;

fn main() -> scw_qkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let windows = args.next().map_or(1_000_000, |a| a.parse().expect("windows must be an integer"));
    let seed = args.next().map_or(2024, |a| a.parse().expect("seed must be an integer"));

    for protocol in [Protocol::B92, Protocol::Bb84Osd] {
        let cfg = SessionConfig {
            params: SystemParams::default(),
            detector: DetectorModel::SNSPD,
            protocol,
            length_km: 20.0,
            windows,
            seed,
        };
        let report = validate_against_analytic(&cfg)?;
        println!("{report}\n");
    }
    Ok(())
}
