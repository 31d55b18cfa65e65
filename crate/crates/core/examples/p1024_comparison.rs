//! PBP-B10 against the ten cyclic shifts on P(1024,512) without CRC.
//! Several hours on one core.
//!
//!     cargo run --release --example p1024_comparison -- [ebno_db] [min_errors] [k]

use polar_perm::sim::run_point;
use polar_perm::{cyclic_shift_set, search_permutations, BpConfig, DecoderSpec, PolarCode, SearchConfig, SimConfig};

fn main() -> polar_perm::Result<()> {
    let mut args = std::env::args().skip(1);
    let ebno: f64 = args.next().map_or(3.5, |s| s.parse().expect("ebno_db"));
    let min_errors: u64 = args.next().map_or(50, |s| s.parse().expect("min_errors"));
    let k: usize = args.next().map_or(4, |s| s.parse().expect("k"));

    let code = PolarCode::construct(1024, 512, 0.0)?;
    let bp = BpConfig::default();
    let search = SearchConfig { k, m: 10, ebno_db: ebno, frames: 1000, seed: 9, bp, max_attempts: 100_000_000 };
    let best = search_permutations(&code, None, &search, &mut |found, tried| {
        eprint!("\rfailures {found}/1000 after {tried} frames");
    })?;
    eprintln!();
    for (p, s) in best.perms.iter().zip(&best.scores) {
        println!("[{p}] score {s:.3}");
    }
    for (name, decoder) in [
        ("BP", DecoderSpec::Bp),
        ("PBP-B10", DecoderSpec::Pbp(best.perms.clone())),
        ("PBP-CS", DecoderSpec::Pbp(cyclic_shift_set(10))),
    ] {
        let mut cfg = SimConfig::new(code.clone(), None, decoder, bp);
        cfg.min_frame_errors = min_errors;
        cfg.seed = 9;
        let r = run_point(&cfg, 0, ebno)?;
        let (lo, hi) = r.fer_interval(0.90);
        println!("{name:8} FER {:.3e} [{lo:.3e}, {hi:.3e}] ({}/{}), I_avg {:.2}", r.fer, r.frame_errors, r.frames, r.avg_iterations);
    }
    Ok(())
}
