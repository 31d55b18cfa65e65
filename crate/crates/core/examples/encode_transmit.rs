//! Build P(8,5), encode a message and push it through an AWGN channel.

use polar_perm::channel::frame_rng;
use polar_perm::{AwgnChannel, CrcSpec, PolarCode};

fn main() -> polar_perm::Result<()> {
    let code = PolarCode::construct(8, 5, 0.0)?;
    println!("frozen: {:?}", code.frozen_indices().collect::<Vec<_>>());
    println!("info:   {:?}", code.info_positions());

    let message = [1, 0, 1, 1, 0];
    let u = code.insert_message(&message)?;
    let x = code.encode(&message)?;
    println!("u = {u:?}\nx = {x:?}");

    let channel = AwgnChannel::from_ebno(2.0, code.rate())?;
    let llrs = channel.transmit(&x, &mut frame_rng(1, 0, 0));
    println!("sigma = {:.4}", channel.sigma());
    for (bit, l) in x.iter().zip(&llrs) {
        println!("  x={bit}  llr={l:+.3}");
    }

    // CRC bits take the last positions of the information set.
    let crc = CrcSpec::CRC24_5G;
    let big = PolarCode::construct(1024, 512, 0.0)?;
    let payload = vec![1u8; 512 - crc.degree()];
    let word = crc.attach(&payload);
    let cw = big.encode(&word)?;
    println!("P(1024,512)+CRC24: {} payload bits, codeword weight {}", payload.len(), cw.iter().filter(|&&b| b == 1).count());
    Ok(())
}
