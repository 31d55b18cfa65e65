//! BPSK over AWGN and channel LLRs.
//!
//! Bits map to symbols `s = 1 - 2x`, the receiver sees `y = s + z` with
//! `z ~ N(0, σ²)` and computes `LLR = 2y / σ²` (positive favours bit 0).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// Noise standard deviation for a given Eb/N0 (dB) and code rate.
pub fn ebno_to_sigma(ebno_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(invalid(format!("rate {rate} outside (0, 1]")));
    }
    if !ebno_db.is_finite() {
        return Err(invalid("Eb/N0 must be finite"));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebno_db / 10.0))).sqrt())
}

/// Random stream for one frame of a simulation.
///
/// The stream is a pure function of `(seed, point, frame)`: the seed and the
/// sweep-point index form the ChaCha key and the frame index selects the
/// stream, so frames can be generated in any order or on any thread.
pub fn frame_rng(seed: u64, point: u64, frame: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(frame);
    rng
}

/// Uniform random bits.
pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.random::<bool>() as u8).collect()
}

/// BPSK/AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnChannel {
    sigma: f64,
    noiseless: bool,
}

impl AwgnChannel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma {sigma} must be positive and finite")));
        }
        Ok(AwgnChannel {
            sigma,
            noiseless: false,
        })
    }

    pub fn from_ebno(ebno_db: f64, rate: f64) -> Result<Self> {
        Self::new(ebno_to_sigma(ebno_db, rate)?)
    }

    /// Same LLR scaling, but `z ≡ 0`.
    pub fn noiseless(mut self) -> Self {
        self.noiseless = true;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_noiseless(&self) -> bool {
        self.noiseless
    }

    /// Received samples `y = (1 - 2x) + z`.
    pub fn receive<R: Rng + ?Sized>(&self, x: &[u8], rng: &mut R) -> Vec<f64> {
        x.iter()
            .map(|&b| {
                let s = 1.0 - 2.0 * f64::from(b & 1);
                if self.noiseless {
                    s
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    s + self.sigma * z
                }
            })
            .collect()
    }

    /// Channel LLRs `2y / σ²` for codeword `x`.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &[u8], rng: &mut R) -> Vec<f64> {
        let scale = 2.0 / (self.sigma * self.sigma);
        let mut y = self.receive(x, rng);
        for v in &mut y {
            *v *= scale;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sigma_conversion() {
        assert_abs_diff_eq!(ebno_to_sigma(0.0, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ebno_to_sigma(0.0, 1.0).unwrap(),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        // 10^0.30103 ≈ 2 → σ² ≈ 1/2
        assert_abs_diff_eq!(ebno_to_sigma(3.0103, 0.5).unwrap(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-4);
        assert!(ebno_to_sigma(0.0, 0.0).is_err());
        assert!(ebno_to_sigma(0.0, -1.0).is_err());
        assert!(ebno_to_sigma(0.0, 1.5).is_err());
    }

    #[test]
    fn noiseless_llr_signs_follow_bits() {
        let ch = AwgnChannel::new(0.8).unwrap().noiseless();
        let x = [0u8, 1, 1, 0, 1, 0, 0, 0];
        let llr = ch.transmit(&x, &mut frame_rng(1, 0, 0));
        for (&b, &l) in x.iter().zip(&llr) {
            assert_eq!(l > 0.0, b == 0);
            assert_abs_diff_eq!(l.abs(), 2.0 / 0.64, epsilon = 1e-12);
        }
    }

    #[test]
    fn all_zero_noiseless_is_constant() {
        let ch = AwgnChannel::new(0.5).unwrap().noiseless();
        let llr = ch.transmit(&[0; 16], &mut frame_rng(0, 0, 0));
        assert!(llr.iter().all(|&l| l == 8.0));
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let ch = AwgnChannel::new(1.0).unwrap();
        let a = ch.transmit(&[0; 32], &mut frame_rng(9, 2, 17));
        let b = ch.transmit(&[0; 32], &mut frame_rng(9, 2, 17));
        let c = ch.transmit(&[0; 32], &mut frame_rng(9, 2, 18));
        let d = ch.transmit(&[0; 32], &mut frame_rng(9, 3, 17));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn llr_mean_and_sample_variance() {
        // E[2y/σ²] = 2/σ² = 2 at σ = 1; Var(y) = σ² = 1.
        let ch = AwgnChannel::new(1.0).unwrap();
        let trials = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut y_sum = 0.0;
        let mut y_sq = 0.0;
        for t in 0..trials {
            let mut rng = frame_rng(42, 0, t);
            let l = ch.transmit(&[0], &mut rng)[0];
            sum += l;
            sum_sq += l * l;
            let y = l / 2.0;
            y_sum += y;
            y_sq += y * y;
        }
        let n = trials as f64;
        let mean = sum / n;
        let std_err = ((sum_sq / n - mean * mean) / n).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * std_err, "mean {mean} ± {std_err}");
        let y_mean = y_sum / n;
        let var = y_sq / n - y_mean * y_mean;
        // Var of the sample variance ≈ 2σ⁴/n → std ≈ 0.0045.
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(AwgnChannel::new(0.0).is_err());
        assert!(AwgnChannel::new(f64::NAN).is_err());
    }
}
