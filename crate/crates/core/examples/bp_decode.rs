//! Decode one noisy P(256,128) frame with BP under each stopping rule and
//! check-node rule.

use polar_perm::channel::AwgnChannel;
use polar_perm::selection::generate_frame;
use polar_perm::{BpConfig, BpDecoder, CheckRule, CrcSpec, PolarCode, Termination};

fn main() -> polar_perm::Result<()> {
    let crc = CrcSpec::CRC8_LTE;
    let code = PolarCode::construct(256, 128, 0.0)?;
    let channel = AwgnChannel::from_ebno(3.0, code.rate())?;
    let (word, llrs) = generate_frame(&code, Some(crc), &channel, 11, 0, 0)?;

    for termination in [Termination::GMatrix, Termination::Crc(crc), Termination::None] {
        for rule in [CheckRule::Exact, CheckRule::scaled_min_sum()] {
            let mut dec = BpDecoder::new(code.len(), BpConfig { max_iterations: 200, termination, rule })?;
            let r = dec.decode(&llrs, &code)?;
            let ok = code.extract_message(&r.u_hat)? == word;
            println!("{termination:?} {rule:?}: {} iterations, early stop {}, correct {ok}", r.iterations_used, r.terminated_early);
        }
    }
    Ok(())
}
