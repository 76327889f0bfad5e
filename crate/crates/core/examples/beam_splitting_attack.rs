//! Eve's Holevo information under the collective beam-splitting attack.

use scw_qkd::attack::{eve_overlap, holevo_cbs};
use scw_qkd::states::channel_loss_fraction;
use scw_qkd::{Phase, SystemParams};

fn main() -> scw_qkd::Result<()> {
    let p = SystemParams::default();
    println!("{:>8} {:>10} {:>12} {:>12}", "L_km", "tapped", "overlap", "chi");
    for length_km in [0.0, 1.0, 5.0, 20.0, 50.0, 100.0, 200.0, 500.0] {
        let h = holevo_cbs(&p, length_km)?;
        println!(
            "{length_km:>8} {:>10.6} {:>12.8} {:>12.8}",
            channel_loss_fraction(p.xi_db_per_km, length_km)?,
            h.overlap,
            h.chi
        );
    }

    // every photon in Eve's hands
    let all = SystemParams { xi_db_per_km: 1e6, ..p };
    println!("chi with the whole beam tapped: {:.6}", holevo_cbs(&all, 1.0)?.chi);
    println!(
        "overlap of the two bit states at 50 km: {:.8}",
        eve_overlap(&p, Phase::ZERO, Phase::PI, 50.0)?
    );
    Ok(())
}
