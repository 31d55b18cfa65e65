//! SC and BP side by side on P(128,64): FER over a few thousand frames.

use polar_perm::channel::AwgnChannel;
use polar_perm::selection::generate_frame;
use polar_perm::{BpConfig, BpDecoder, PolarCode, ScDecoder};

fn main() -> polar_perm::Result<()> {
    let code = PolarCode::construct(128, 64, 0.0)?;
    let mut sc = ScDecoder::new(128);
    let mut bp = BpDecoder::new(128, BpConfig::default())?;
    for ebno in [1.0, 2.0, 3.0] {
        let channel = AwgnChannel::from_ebno(ebno, code.rate())?;
        let (mut sc_err, mut bp_err) = (0, 0);
        let frames = 3000;
        for t in 0..frames {
            let (word, llrs) = generate_frame(&code, None, &channel, 3, 0, t)?;
            let s = sc.decode(&llrs, &code)?;
            sc_err += usize::from(code.extract_message(&s.u_hat)? != word);
            let b = bp.decode(&llrs, &code)?;
            bp_err += usize::from(code.extract_message(&b.u_hat)? != word);
        }
        println!(
            "{ebno} dB: SC FER {:.4}  BP FER {:.4}",
            sc_err as f64 / frames as f64,
            bp_err as f64 / frames as f64
        );
    }
    Ok(())
}
