//! Secure key rate of B92 and BB84-OSD against loss, and where each detector gives out.

use scw_qkd::detection::DetectorModel;
use scw_qkd::keyrate::{secure_rate_at_loss, EcModel, Protocol};
use scw_qkd::SystemParams;

fn main() -> scw_qkd::Result<()> {
    let p = SystemParams::default();
    let ec = EcModel::default();

    for (name, d) in [("snspd", DetectorModel::SNSPD), ("apd", DetectorModel::APD)] {
        println!("{name}:");
        println!("{:>8} {:>10} {:>12} {:>14} {:>14}", "loss_dB", "Q", "chi", "K_b92", "K_bb84_osd");
        for loss_db in (0..=45).step_by(3) {
            let b92 = secure_rate_at_loss(&p, &d, Protocol::B92, &ec, loss_db as f64)?;
            let osd = secure_rate_at_loss(&p, &d, Protocol::Bb84Osd, &ec, loss_db as f64)?;
            println!(
                "{loss_db:>8} {:>10.4e} {:>12.6} {:>14.6e} {:>14.6e}",
                b92.qber, b92.chi, b92.rate_bps, osd.rate_bps
            );
        }

        let mut loss_db = 0.0;
        while secure_rate_at_loss(&p, &d, Protocol::B92, &ec, loss_db)?.rate_bps > 0.0 {
            loss_db += 0.1;
        }
        println!("{name} rate reaches zero near {loss_db:.1} dB ({:.0} km)\n", p.length_for_loss(loss_db));
    }
    Ok(())
}
