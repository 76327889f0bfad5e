//! QBER against channel loss for both detector presets.

use scw_qkd::bsee::channel_from_system;
use scw_qkd::detection::DetectorModel;
use scw_qkd::SystemParams;

fn main() -> scw_qkd::Result<()> {
    let p = SystemParams::default();
    println!("{:>8} {:>14} {:>14}", "loss_dB", "Q_snspd", "Q_apd");
    for loss_db in (0..=50).step_by(5) {
        let length_km = p.length_for_loss(loss_db as f64);
        let q = |d: &DetectorModel| -> scw_qkd::Result<f64> { channel_from_system(&p, d, length_km)?.qber() };
        println!(
            "{loss_db:>8} {:>14.6e} {:>14.6e}",
            q(&DetectorModel::SNSPD)?,
            q(&DetectorModel::APD)?
        );
    }
    Ok(())
}
