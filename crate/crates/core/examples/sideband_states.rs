//! Follows one transmission window from Alice's modulator to Bob's detector.

use scw_qkd::keyrate::sideband_mu;
use scw_qkd::states::{alice_state, bob_state, mean_photons_at_detector};
use scw_qkd::{DMode, Phase, SystemParams};

fn main() -> scw_qkd::Result<()> {
    let p = SystemParams::default().with_mode(DMode::Exact);
    let length_km = 50.0;

    for phase in [Phase::ZERO, Phase::HALF_PI, Phase::PI, Phase::THREE_HALF_PI] {
        let a = alice_state(&p, phase)?;
        println!(
            "alice phi={:.4}: total={:.12} carrier={:.6} sidebands={:.6}",
            phase.radians(),
            a.total_photons(),
            a.carrier_photons(),
            a.sideband_photons()
        );
    }
    println!("sideband photon number mu = {:.6}", sideband_mu(&p)?);

    for (label, phi_b) in [("matched", Phase::ZERO), ("opposite", Phase::PI)] {
        let b = bob_state(&p, Phase::ZERO, phi_b.offset(p.delta_phi), length_km)?;
        let n = mean_photons_at_detector(&p, Phase::ZERO, phi_b.offset(p.delta_phi), length_km)?;
        println!(
            "bob {label:>8} at {length_km} km: sidebands={:.6e} carrier={:.6e} detector={:.6e}",
            b.sideband_photons(),
            b.carrier_photons(),
            n
        );
    }
    Ok(())
}
