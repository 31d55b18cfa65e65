//! Select the identity plus the seven best layer orders for P(64,32)+CRC-8
//! and write them to a permutation file.
//!
//!     cargo run --release --example search_permutations -- [out_path]

use polar_perm::{search_permutations, BpConfig, CrcSpec, PolarCode, SearchConfig, Termination};

fn main() -> polar_perm::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "perms_p64.txt".into());
    let crc = CrcSpec::CRC8_LTE;
    let code = PolarCode::construct(64, 32, 0.0)?;
    let cfg = SearchConfig {
        k: 4,
        m: 8,
        ebno_db: 2.5,
        frames: 500,
        seed: 1,
        bp: BpConfig {
            termination: Termination::Crc(crc),
            ..BpConfig::default()
        },
        max_attempts: 10_000_000,
    };
    let set = search_permutations(&code, Some(crc), &cfg, &mut |found, tried| {
        eprint!("\r{found}/{} failures in {tried} frames", cfg.frames);
    })?;
    eprintln!();
    for (p, s) in set.perms.iter().zip(&set.scores) {
        println!("[{p}] fixes {:.1}% of identity failures", 100.0 * s);
    }
    set.save(&out)?;
    println!("written to {out}");
    Ok(())
}
