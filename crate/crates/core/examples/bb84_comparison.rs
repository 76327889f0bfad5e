//! Photon budget of BB84-OSD against BB84 with two detectors, across modulation depths.

use scw_qkd::keyrate::compare_bb84_variants;
use scw_qkd::SystemParams;

fn main() -> scw_qkd::Result<()> {
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>12} {:>10} {:>6}",
        "m", "mu_s", "mu_bar", "mu_s'", "residual", "rel_diff", "low"
    );
    for m in [0.05, 0.1, 0.2, 0.319, 0.5, 0.8, 1.2] {
        let p = SystemParams::default().with_modulation(m);
        let c = compare_bb84_variants(&p, 0.0)?;
        println!(
            "{m:>6} {:>10.6} {:>10.6} {:>10.6} {:>12.3e} {:>10.6} {:>6}",
            c.mu_s, c.mu_bar, c.mu_s_prime, c.conservation_residual, c.relative_difference, c.low_modulation
        );
    }
    Ok(())
}
