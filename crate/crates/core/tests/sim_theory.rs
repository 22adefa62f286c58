use cimsr::coopsim::{run_monte_carlo, BerEstimate, ChannelKind, StopClass, StopRule, SystemConfig, SystemKind};
use cimsr::theory::{evaluate, TheoryOptions, TheoryPoint};

fn config(m_c: u32, channel: ChannelKind) -> SystemConfig {
    SystemConfig::standard(SystemKind::CimSrDcskCc, m_c, channel).unwrap()
}

fn run(cfg: &SystemConfig, snr: f64, stop: StopRule, seed: u64) -> (BerEstimate, TheoryPoint) {
    let est = run_monte_carlo(cfg, &[snr], stop, seed).unwrap().remove(0);
    let th = evaluate(&cfg.clone().with_es_n0_db(snr), &TheoryOptions::default()).unwrap();
    (est, th)
}

fn z(observed: f64, p: f64, n: u64) -> f64 {
    (observed - p) / (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn awgn_system_ber_agrees() {
    let stop = StopRule::new(200, 2_000_000).with_class(StopClass::Total);
    for (m_c, snr) in [(1, 17.0), (1, 18.0), (2, 18.0)] {
        let (est, th) = run(&config(m_c, ChannelKind::Awgn), snr, stop, 21);
        let zz = z(est.ber.total, th.p_sys, est.bits_sent.total);
        assert!(zz.abs() < 3.0, "m_c={m_c} {snr} dB: sim {} theory {} z {zz}", est.ber.total, th.p_sys);
    }
}

#[test]
fn awgn_modulated_ber_agrees() {
    let stop = StopRule::new(200, 2_000_000);
    for snr in [16.0, 17.0] {
        let (est, th) = run(&config(1, ChannelKind::Awgn), snr, stop, 5);
        let zz = z(est.ber.modulated, th.p_mod, est.bits_sent.modulated);
        assert!(zz.abs() < 3.0, "{snr} dB: sim {} theory {} z {zz}", est.ber.modulated, th.p_mod);
    }
}

#[test]
fn rayleigh_relay_and_index_rates_agree() {
    let stop = StopRule::new(200, 1_000_000);
    for snr in [15.0, 18.0] {
        let (est, th) = run(&config(1, ChannelKind::rayleigh_three_path()), snr, stop, 9);
        let zd = z(est.relay_error_rate(), th.p_df, est.frames);
        let ze = z(est.index_symbol_error_rate(), th.p_ed, est.frames);
        assert!(zd.abs() < 3.0, "{snr} dB relay: z {zd}");
        assert!(ze.abs() < 3.0, "{snr} dB index: z {ze}");
    }
}

#[test]
fn case_frequencies_follow_products() {
    let stop = StopRule { min_errors: u64::MAX, max_frames: 20_000, class: StopClass::Total, batch_frames: 1000 };
    let (est, th) = run(&config(1, ChannelKind::Awgn), 15.0, stop, 7);
    assert_eq!(est.frames, 20_000);
    for (k, (&count, &p)) in est.case_counts.iter().zip(&th.case_probs).enumerate() {
        let zz = z(count as f64 / est.frames as f64, p, est.frames);
        assert!(zz.abs() < 3.0, "case {}: {count} frames vs p {p}, z {zz}", k + 1);
    }
}

#[test]
fn simulated_ber_falls_with_snr() {
    let stop = StopRule::new(100, 500_000).with_class(StopClass::Total);
    let cfg = config(2, ChannelKind::Awgn);
    let est = run_monte_carlo(&cfg, &[12.0, 15.0, 18.0], stop, 1).unwrap();
    assert!(est.windows(2).all(|w| w[1].ber.total < w[0].ber.total));
}

#[test]
fn very_low_snr_is_random_guessing() {
    let stop = StopRule { min_errors: u64::MAX, max_frames: 4000, class: StopClass::Total, batch_frames: 1000 };
    let cfg = config(2, ChannelKind::Awgn);
    let est = run_monte_carlo(&cfg, &[-30.0], stop, 2).unwrap().remove(0);
    assert!((0.45..=0.55).contains(&est.ber.modulated), "{}", est.ber.modulated);
    assert!((est.index_symbol_error_rate() - 0.75).abs() < 0.03);
}

#[test]
fn mixing_identity_on_counters() {
    let stop = StopRule::new(50, 100_000);
    for m_c in 1..=3 {
        let cfg = config(m_c, ChannelKind::Awgn);
        for est in run_monte_carlo(&cfg, &[14.0, 17.0], stop, 4).unwrap() {
            let mc = f64::from(m_c);
            let mixed = (mc * est.ber.index + est.ber.modulated) / (mc + 1.0);
            assert!((mixed - est.ber.total).abs() < 1e-12);
        }
    }
}
