use proptest::prelude::*;
use scw_qkd::attack::holevo_cbs;
use scw_qkd::bsee::channel_from_system;
use scw_qkd::detection::DetectorModel;
use scw_qkd::keyrate::{optimal_mu, secure_rate, secure_rate_at_loss, EcModel, Protocol};
use scw_qkd::SystemParams;

#[test]
fn refined_optimum_matches_dense_grid() {
    let p = SystemParams::default();
    let d = DetectorModel::SNSPD;
    let ec = EcModel::default();
    for loss_db in [20.0, 30.0, 38.0] {
        let length_km = p.length_for_loss(loss_db);
        let found = optimal_mu(&p, &d, Protocol::B92, &ec, length_km).unwrap();
        let (best_m, best_k) = (1..=3000)
            .map(|i| {
                let m = i as f64 * 5e-4;
                (m, secure_rate(&p.with_modulation(m), &d, Protocol::B92, &ec, length_km).unwrap().rate_bps)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(found.rate_bps >= best_k * (1.0 - 1e-6), "{loss_db} dB: {} < {best_k}", found.rate_bps);
        assert!((found.m - best_m).abs() < 2e-3, "{loss_db} dB: m* {} vs grid {best_m}", found.m);
    }
}

#[test]
fn rate_equals_hand_assembled_formula() {
    let p = SystemParams::default();
    let d = DetectorModel::SNSPD;
    let length_km = 60.0;
    let c = channel_from_system(&p, &d, length_km).unwrap();
    let chi = holevo_cbs(&p, length_km).unwrap().chi;
    let q = c.error / (1.0 - c.erasure);
    let h = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
    let expect = p.rep_rate_hz * (1.0 - c.erasure) * 0.5 * (1.0 - h - chi);
    let got = secure_rate(&p, &d, Protocol::Bb84Osd, &EcModel::default(), length_km).unwrap().rate_bps;
    assert!((got - expect).abs() <= 1e-9 * expect);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubling_holds_everywhere(
        mu0 in 0.5f64..8.0,
        m in 0.01f64..1.2,
        loss_db in 0.0f64..60.0,
        f_ec in 1.0f64..1.3,
        apd in any::<bool>(),
    ) {
        let p = SystemParams { mu0, m, ..SystemParams::default() };
        let d = if apd { DetectorModel::APD } else { DetectorModel::SNSPD };
        let ec = EcModel { f_ec };
        let a = secure_rate_at_loss(&p, &d, Protocol::B92, &ec, loss_db).unwrap();
        let b = secure_rate_at_loss(&p, &d, Protocol::Bb84Osd, &ec, loss_db).unwrap();
        prop_assert_eq!(a.rate_bps, 2.0 * b.rate_bps);
        prop_assert!(a.rate_bps >= 0.0);
    }

    #[test]
    fn qber_and_chi_grow_with_loss(m in 0.05f64..1.0, l1 in 0.0f64..300.0, dl in 0.1f64..50.0) {
        let p = SystemParams { m, ..SystemParams::default() };
        let d = DetectorModel::SNSPD;
        let q = |l: f64| channel_from_system(&p, &d, l).unwrap().qber().unwrap();
        prop_assert!(q(l1 + dl) >= q(l1));
        let chi = |l: f64| holevo_cbs(&p, l).unwrap().chi;
        prop_assert!(chi(l1 + dl) >= chi(l1));
    }
}
