use polar_perm::sim::run_sweep;
use polar_perm::{
    cyclic_shift_set, BpConfig, CrcSpec, DecoderSpec, PolarCode, SimConfig, Termination,
};

#[test]
fn iterations_fall_with_snr() {
    let crc = CrcSpec::CRC8_LTE;
    let code = PolarCode::construct(128, 64, 0.0).unwrap();
    let bp = BpConfig {
        termination: Termination::Crc(crc),
        ..BpConfig::default()
    };
    let mut cfg = SimConfig::new(code, Some(crc), DecoderSpec::Pbp(cyclic_shift_set(7)), bp);
    cfg.ebno_start = 1.0;
    cfg.ebno_stop = 4.0;
    cfg.ebno_step = 1.0;
    cfg.min_frame_errors = 40;
    cfg.max_frames = 4000;
    cfg.seed = 5;
    let rows = run_sweep(&cfg).unwrap();
    for w in rows.windows(2) {
        // Allow sampling noise; the decrease between 1 dB steps is far larger.
        assert!(w[1].avg_iterations <= w[0].avg_iterations * 1.1, "{rows:?}");
        assert!(w[1].fer <= w[0].fer * 1.5);
    }
    for r in &rows {
        assert!(r.bit_errors <= r.frames * 56);
        assert!(r.avg_perms_attempted >= 1.0 && r.avg_perms_attempted <= 7.0);
    }
    assert!(rows[0].avg_iterations > 2.0 * rows[3].avg_iterations);
}

#[test]
fn sc_and_bp_agree_on_noiseless_sweep() {
    for decoder in [DecoderSpec::Bp, DecoderSpec::Sc, DecoderSpec::Psc(cyclic_shift_set(5))] {
        let code = PolarCode::construct(32, 20, 1.0).unwrap();
        let mut cfg = SimConfig::new(code, None, decoder, BpConfig::default());
        cfg.noiseless = true;
        cfg.max_frames = 500;
        cfg.ebno_start = -2.0;
        cfg.ebno_stop = 0.0;
        cfg.ebno_step = 1.0;
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.frame_errors == 0 && r.frames == 500));
    }
}
