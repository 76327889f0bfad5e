//! Modulation depth that maximises the key rate at each loss.

use scw_qkd::detection::DetectorModel;
use scw_qkd::keyrate::{optimal_mu, secure_rate, EcModel, Protocol};
use scw_qkd::{Error, SystemParams};

fn main() -> scw_qkd::Result<()> {
    let p = SystemParams::default();
    let d = DetectorModel::SNSPD;
    let ec = EcModel::default();

    println!("{:>8} {:>10} {:>10} {:>14} {:>14}", "loss_dB", "mu*", "m*", "K*", "K(m=0.319)");
    for loss_db in [0.0, 10.0, 20.0, 25.0, 30.0, 35.0, 38.0, 40.0, 41.0, 42.0] {
        let length_km = p.length_for_loss(loss_db);
        let fixed = secure_rate(&p, &d, Protocol::B92, &ec, length_km)?.rate_bps;
        match optimal_mu(&p, &d, Protocol::B92, &ec, length_km) {
            Ok(o) => println!("{loss_db:>8} {:>10.5} {:>10.5} {:>14.6e} {fixed:>14.6e}", o.mu, o.m, o.rate_bps),
            Err(Error::NoPositiveRate { .. }) => println!("{loss_db:>8} {:>10} {:>10} {:>14} {fixed:>14.6e}", "-", "-", "0"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
