//! FER/BER/latency sweep for several decoders on P(128,64)+CRC-8, as CSV.

use polar_perm::sim::{csv_string, run_sweep};
use polar_perm::{cyclic_shift_set, BpConfig, CrcSpec, DecoderSpec, PolarCode, SimConfig, Termination};

fn main() -> polar_perm::Result<()> {
    let crc = CrcSpec::CRC8_LTE;
    let code = PolarCode::construct(128, 64, 0.0)?;
    let bp = BpConfig {
        termination: Termination::Crc(crc),
        ..BpConfig::default()
    };
    for (name, decoder) in [
        ("bp", DecoderSpec::Bp),
        ("sc", DecoderSpec::Sc),
        ("pbp-cs", DecoderSpec::Pbp(cyclic_shift_set(7))),
        ("psc-cs", DecoderSpec::Psc(cyclic_shift_set(7))),
    ] {
        let mut cfg = SimConfig::new(code.clone(), Some(crc), decoder, bp);
        cfg.ebno_start = 1.0;
        cfg.ebno_stop = 3.0;
        cfg.ebno_step = 0.5;
        cfg.min_frame_errors = 50;
        println!("# {name}\n{}", csv_string(&run_sweep(&cfg)?));
    }
    Ok(())
}
