//! Compare identity BP, PBP-B (selected permutations) and PBP-R (random
//! permutations) on P(128,64) with an 8-bit CRC.
//!
//!     cargo run --release --example ensemble_gain -- [ebno_db] [min_errors] [crc|crc-gmatrix]

use polar_perm::channel::frame_rng;
use polar_perm::sim::run_point;
use polar_perm::{
    random_perm_set, search_permutations, BpConfig, CrcSpec, DecoderSpec, PolarCode, SearchConfig,
    SimConfig, Termination,
};

fn main() -> polar_perm::Result<()> {
    let mut args = std::env::args().skip(1);
    let ebno: f64 = args.next().map_or(3.0, |s| s.parse().expect("ebno_db"));
    let min_errors: u64 = args.next().map_or(100, |s| s.parse().expect("min_errors"));
    let combined = args.next().is_some_and(|s| s == "crc-gmatrix");
    let seed = 2024;

    let crc = CrcSpec::CRC8_LTE;
    let code = PolarCode::construct(128, 64, 0.0)?;
    let bp = BpConfig {
        termination: if combined {
            Termination::CrcAndGMatrix(crc)
        } else {
            Termination::Crc(crc)
        },
        ..BpConfig::default()
    };

    let search = SearchConfig {
        k: 4,
        m: 8,
        ebno_db: ebno,
        frames: 500,
        seed,
        bp,
        max_attempts: 10_000_000,
    };
    let best = search_permutations(&code, Some(crc), &search, &mut |_, _| {})?;
    println!("selected permutations:");
    for (p, s) in best.perms.iter().zip(&best.scores) {
        println!("  [{p}] score {s:.3}");
    }
    let random = random_perm_set(code.log_len(), 8, &mut frame_rng(seed, u64::MAX - 1, 0))?;

    for (name, decoder) in [
        ("BP", DecoderSpec::Bp),
        ("PBP-B8", DecoderSpec::Pbp(best.perms.clone())),
        ("PBP-R8", DecoderSpec::Pbp(random)),
    ] {
        let mut cfg = SimConfig::new(code.clone(), Some(crc), decoder, bp);
        cfg.min_frame_errors = min_errors;
        cfg.seed = seed;
        let r = run_point(&cfg, 0, ebno)?;
        let (lo, hi) = r.fer_interval(0.90);
        println!(
            "{name:7} FER {:.4e} [{lo:.3e}, {hi:.3e}]  errors {}/{}  I_avg {:.2} (sequential {:.2})",
            r.fer, r.frame_errors, r.frames, r.avg_iterations, r.avg_iterations_sequential
        );
    }
    Ok(())
}
