//! Bit-serial CRC over GF(2).
//!
//! Plain polynomial division: zero initial register, no reflection, no final
//! XOR. The CRC bits follow the payload, so `payload ++ crc` is a multiple of
//! the generator polynomial.

use crate::error::{invalid, Result};

/// A CRC generator polynomial.
///
/// `poly` holds every coefficient including the leading `x^degree` term, bit
/// `j` being the coefficient of `x^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrcSpec {
    degree: u32,
    poly: u64,
}

impl CrcSpec {
    /// `x^24 + x^23 + x^21 + x^20 + x^17 + x^15 + x^13 + x^12 + x^8 + x^4 + x^2 + x + 1`,
    /// the 24-bit CRC used with polar codes in 5G NR.
    pub const CRC24_5G: CrcSpec = CrcSpec {
        degree: 24,
        poly: 0x1B2_B117,
    };

    /// `x^8 + x^7 + x^4 + x^3 + x + 1`, the LTE 8-bit CRC.
    pub const CRC8_LTE: CrcSpec = CrcSpec {
        degree: 8,
        poly: 0x19B,
    };

    /// Builds a spec from the full polynomial; the degree is its highest set bit.
    pub fn from_poly(poly: u64) -> Result<Self> {
        if poly < 2 {
            return Err(invalid("CRC polynomial must have degree >= 1"));
        }
        let degree = 63 - poly.leading_zeros();
        Ok(CrcSpec { degree, poly })
    }

    /// Parses a hex polynomial such as `0x1B2B117` or `19b`.
    pub fn from_hex(text: &str) -> Result<Self> {
        let digits = text
            .trim()
            .trim_start_matches("0x")
            .trim_start_matches("0X");
        let poly = u64::from_str_radix(digits, 16)
            .map_err(|_| invalid(format!("bad CRC polynomial {text:?}")))?;
        Self::from_poly(poly)
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    /// Coefficients from `x^degree` down to `x^0`.
    pub fn coefficients(&self) -> Vec<u8> {
        (0..=self.degree)
            .rev()
            .map(|j| ((self.poly >> j) & 1) as u8)
            .collect()
    }

    /// Remainder of `bits(x) * x^degree` modulo the generator.
    pub fn remainder(&self, bits: &[u8]) -> u64 {
        let top = 1u64 << (self.degree - 1);
        let mask = (top << 1) - 1;
        let low = self.poly & mask;
        let mut reg = 0u64;
        for &b in bits {
            let feedback = ((reg & top) != 0) ^ (b & 1 == 1);
            reg = (reg << 1) & mask;
            if feedback {
                reg ^= low;
            }
        }
        reg
    }

    /// Returns `payload` followed by its `degree` CRC bits, most significant first.
    pub fn attach(&self, payload: &[u8]) -> Vec<u8> {
        let rem = self.remainder(payload);
        let mut out = Vec::with_capacity(payload.len() + self.degree());
        out.extend(payload.iter().map(|b| b & 1));
        out.extend((0..self.degree).rev().map(|j| ((rem >> j) & 1) as u8));
        out
    }

    /// True iff `bits` (payload followed by CRC) is divisible by the generator.
    pub fn check(&self, bits: &[u8]) -> bool {
        if bits.len() <= self.degree() {
            return false;
        }
        let (payload, crc) = bits.split_at(bits.len() - self.degree());
        let rem = self.remainder(payload);
        crc.iter()
            .enumerate()
            .all(|(j, &b)| ((rem >> (self.degree() - 1 - j)) & 1) as u8 == (b & 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Long division over GF(2) on explicit coefficient vectors.
    fn divides(bits: &[u8], spec: &CrcSpec) -> bool {
        let g = spec.coefficients();
        let mut r = bits.to_vec();
        for i in 0..=(r.len() - g.len()) {
            if r[i] == 1 {
                for (j, &c) in g.iter().enumerate() {
                    r[i + j] ^= c;
                }
            }
        }
        r.iter().all(|&b| b == 0)
    }

    #[test]
    fn crc24_polynomial_terms() {
        let exps: Vec<u32> = (0..=24)
            .filter(|j| (CrcSpec::CRC24_5G.poly() >> j) & 1 == 1)
            .collect();
        assert_eq!(exps, vec![0, 1, 2, 4, 8, 12, 13, 15, 17, 20, 21, 23, 24]);
        let c = CrcSpec::CRC24_5G.coefficients();
        assert_eq!(c.len(), 25);
        assert_eq!((c[0], c[24]), (1, 1));
    }

    #[test]
    fn hex_parsing() {
        assert_eq!(CrcSpec::from_hex("0x1B2B117").unwrap(), CrcSpec::CRC24_5G);
        assert_eq!(CrcSpec::from_hex("19b").unwrap(), CrcSpec::CRC8_LTE);
        assert!(CrcSpec::from_hex("1").is_err());
        assert!(CrcSpec::from_hex("zz").is_err());
    }

    #[test]
    fn zero_payload_gives_zero_crc() {
        let out = CrcSpec::CRC24_5G.attach(&[0; 40]);
        assert_eq!(out, vec![0; 64]);
    }

    #[test]
    fn attached_word_is_multiple_of_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [CrcSpec::CRC24_5G, CrcSpec::CRC8_LTE] {
            for len in [1, 7, 56, 488] {
                let p: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
                let w = spec.attach(&p);
                assert_eq!(w.len(), len + spec.degree());
                assert_eq!(&w[..len], &p[..]);
                assert!(divides(&w, &spec));
                assert!(spec.check(&w));
            }
        }
    }

    #[test]
    fn single_bit_flips_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p: Vec<u8> = (0..488).map(|_| rng.random_range(0..2)).collect();
        let w = CrcSpec::CRC24_5G.attach(&p);
        for i in 0..w.len() {
            let mut c = w.clone();
            c[i] ^= 1;
            assert!(!CrcSpec::CRC24_5G.check(&c), "flip at {i}");
        }
    }

    #[test]
    fn too_short_input_fails_check() {
        assert!(!CrcSpec::CRC8_LTE.check(&[0; 8]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn attach_then_check(p in proptest::collection::vec(0u8..=1, 1..600)) {
                let w = CrcSpec::CRC24_5G.attach(&p);
                prop_assert_eq!(w.len(), p.len() + 24);
                prop_assert!(CrcSpec::CRC24_5G.check(&w));
            }

            #[test]
            fn bursts_up_to_degree_detected(
                p in proptest::collection::vec(0u8..=1, 100..300),
                start_frac in 0.0f64..1.0,
                burst_len in 1usize..=24,
                inner in any::<u32>(),
            ) {
                let spec = CrcSpec::CRC24_5G;
                let mut w = spec.attach(&p);
                let start = ((w.len() - burst_len) as f64 * start_frac) as usize;
                // Burst pattern: first and last bit set, interior arbitrary.
                for j in 0..burst_len {
                    let on = j == 0 || j == burst_len - 1 || (inner >> (j % 32)) & 1 == 1;
                    if on {
                        w[start + j] ^= 1;
                    }
                }
                prop_assert!(!spec.check(&w));
            }
        }
    }
}
