//! Polar code description and encoding.
//!
//! A code `P(N, K)` is fully described by its block length `N = 2^n` and the
//! set of frozen positions of the message word `u`. Frozen bits are always 0.
//! Encoding computes `x = u G^{⊗n}` over GF(2) with `G = [[1, 0], [1, 1]]`,
//! using the in-place butterfly rather than an explicit matrix product.

use std::fs;
use std::path::Path;

use crate::error::{check_len, invalid, Error, Result};

/// A polar code: block length and frozen set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarCode {
    n: usize,
    frozen: Vec<bool>,
    info_positions: Vec<usize>,
}

impl PolarCode {
    /// Builds a code from an explicit frozen mask (`true` = frozen).
    pub fn from_frozen_mask(frozen: Vec<bool>) -> Result<Self> {
        let len = frozen.len();
        if !len.is_power_of_two() {
            return Err(invalid(format!("block length {len} is not a power of two")));
        }
        let info_positions: Vec<usize> = (0..len).filter(|&i| !frozen[i]).collect();
        if info_positions.is_empty() {
            return Err(invalid("code has no information positions (K = 0)"));
        }
        Ok(PolarCode {
            n: len.trailing_zeros() as usize,
            frozen,
            info_positions,
        })
    }

    /// Builds a code of length `len` with the listed positions frozen.
    pub fn from_frozen_indices(len: usize, indices: &[usize]) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(invalid(format!("block length {len} is not a power of two")));
        }
        let mut frozen = vec![false; len];
        for &i in indices {
            if i >= len {
                return Err(invalid(format!("frozen index {i} out of range for N = {len}")));
            }
            if frozen[i] {
                return Err(invalid(format!("duplicate frozen index {i}")));
            }
            frozen[i] = true;
        }
        Self::from_frozen_mask(frozen)
    }

    /// Constructs `P(len, k)` by freezing the `len - k` bit channels with the
    /// largest Bhattacharyya parameters.
    ///
    /// The recursion starts from `z = exp(-R * 10^(design_ebno_db / 10))` with
    /// `R = k / len`, and walks the bits of the channel index from the most
    /// significant one down, mapping a 0 bit to `2z - z^2` and a 1 bit to `z^2`.
    /// Ties freeze the lower index.
    pub fn construct(len: usize, k: usize, design_ebno_db: f64) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(invalid(format!("block length {len} is not a power of two")));
        }
        if k == 0 || k > len {
            return Err(invalid(format!("K = {k} out of range for N = {len}")));
        }
        if !design_ebno_db.is_finite() {
            return Err(invalid("design Eb/N0 must be finite"));
        }
        let z = bhattacharyya_parameters(len, k as f64 / len as f64, design_ebno_db);
        let mut order: Vec<usize> = (0..len).collect();
        // Largest z first; the stable sort keeps ascending index among equals.
        order.sort_by(|&a, &b| z[b].total_cmp(&z[a]));
        let mut frozen = vec![false; len];
        for &i in &order[..len - k] {
            frozen[i] = true;
        }
        Self::from_frozen_mask(frozen)
    }

    /// Reads a frozen-set file: one decimal frozen index per line.
    ///
    /// Blank lines are ignored. Out-of-range and duplicate indices are
    /// format errors.
    pub fn load_frozen_set(len: usize, path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::parse_frozen_set(len, &text)
    }

    /// Parses the contents of a frozen-set file.
    pub fn parse_frozen_set(len: usize, text: &str) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(invalid(format!("block length {len} is not a power of two")));
        }
        let mut frozen = vec![false; len];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let format_err = |msg: String| Error::Format {
                line: lineno + 1,
                msg,
            };
            let idx: usize = line
                .parse()
                .map_err(|_| format_err(format!("not an index: {line:?}")))?;
            if idx >= len {
                return Err(format_err(format!("index {idx} out of range for N = {len}")));
            }
            if frozen[idx] {
                return Err(format_err(format!("duplicate index {idx}")));
            }
            frozen[idx] = true;
        }
        Self::from_frozen_mask(frozen)
    }

    /// Renders the frozen set in the one-index-per-line file format.
    pub fn frozen_set_to_string(&self) -> String {
        let mut out = String::new();
        for i in self.frozen_indices() {
            out.push_str(&i.to_string());
            out.push('\n');
        }
        out
    }

    /// `n = log2(N)`, the number of factor-graph layers.
    pub fn log_len(&self) -> usize {
        self.n
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    /// Number of non-frozen positions `K` (CRC bits included).
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.len() as f64
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn frozen_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.frozen[i])
    }

    /// Information positions in ascending order.
    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    /// Places `payload` on the information positions, zeros elsewhere.
    pub fn insert_message(&self, payload: &[u8]) -> Result<Vec<u8>> {
        check_len(self.k(), payload.len())?;
        let mut u = vec![0u8; self.len()];
        for (&pos, &bit) in self.info_positions.iter().zip(payload) {
            u[pos] = bit & 1;
        }
        Ok(u)
    }

    /// Reads the information positions of `u` in ascending order.
    pub fn extract_message(&self, u: &[u8]) -> Result<Vec<u8>> {
        check_len(self.len(), u.len())?;
        Ok(self.info_positions.iter().map(|&pos| u[pos]).collect())
    }

    /// Inserts `payload` and encodes it.
    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        let mut u = self.insert_message(payload)?;
        polar_transform_in_place(&mut u);
        Ok(u)
    }
}

/// Bhattacharyya parameters of the `len` synthetic channels for a BPSK/AWGN
/// channel at the given design point.
pub fn bhattacharyya_parameters(len: usize, rate: f64, design_ebno_db: f64) -> Vec<f64> {
    let mut z = vec![(-rate * 10f64.powf(design_ebno_db / 10.0)).exp()];
    while z.len() < len {
        // Each existing channel splits into a (minus, plus) pair; the newest
        // transform lands on the least significant bit of the index.
        z = z
            .iter()
            .flat_map(|&v| [2.0 * v - v * v, v * v])
            .collect();
    }
    z
}

/// Returns `bits · G^{⊗n}` over GF(2).
///
/// # Panics
///
/// Panics if the length is not a power of two.
pub fn polar_transform(bits: &[u8]) -> Vec<u8> {
    let mut out = bits.to_vec();
    polar_transform_in_place(&mut out);
    out
}

/// In-place butterfly form of [`polar_transform`].
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let len = bits.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut stride = 1;
    while stride < len {
        for block in bits.chunks_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        stride *= 2;
    }
}
