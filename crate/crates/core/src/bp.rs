//! Belief-propagation decoding on the polar factor graph.
//!
//! The graph has `n + 1` node columns: column 0 is the message side `u`,
//! column `n` the channel side `x`. Layer `l` sits between columns `l` and
//! `l + 1` and holds the processing elements joining rows `i` and `i + 2^l`
//! (bit `l` of `i` clear). Each node carries a right-to-left message `L` and
//! a left-to-right message `R`.
//!
//! One iteration is a right-to-left sweep over layers `n-1..=0` updating `L`,
//! then a left-to-right sweep over layers `0..n` updating `R`.

use crate::crc::CrcSpec;
use crate::error::{check_len, invalid, Result};
use crate::polar_code::{polar_transform_in_place, PolarCode};

/// Saturation magnitude for every stored message.
pub const CLIP: f64 = 40.0;

pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Scaling factor of the optional min-sum rule.
pub const MIN_SUM_SCALE: f64 = 0.9375;

#[inline]
fn clip(v: f64) -> f64 {
    v.clamp(-CLIP, CLIP)
}

/// Exact LLR-domain check-node combination `2 atanh(tanh(a/2) tanh(b/2))`,
/// clipped to `±CLIP`.
///
/// Evaluated as `sign(a) sign(b) min(|a|, |b|) + ln(1 + e^{-|a+b|}) - ln(1 + e^{-|a-b|})`,
/// which stays accurate where `tanh` saturates.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    let signed = if (a < 0.0) != (b < 0.0) { -m } else { m };
    let corr = (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    clip(signed + corr)
}

/// Scaled min-sum approximation of [`boxplus`].
#[inline]
pub fn min_sum(a: f64, b: f64, scale: f64) -> f64 {
    let m = scale * a.abs().min(b.abs());
    clip(if (a < 0.0) != (b < 0.0) { -m } else { m })
}

/// Check-node update rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckRule {
    Exact,
    MinSum { scale: f64 },
}

impl CheckRule {
    pub fn scaled_min_sum() -> Self {
        CheckRule::MinSum {
            scale: MIN_SUM_SCALE,
        }
    }

    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            CheckRule::Exact => boxplus(a, b),
            CheckRule::MinSum { scale } => min_sum(a, b, scale),
        }
    }
}

/// Early-termination condition evaluated after every iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Re-encoded `û` must equal the hard decision on the channel column.
    GMatrix,
    /// The `K` information bits of `û` must pass the CRC.
    Crc(CrcSpec),
    /// Both of the above: a CRC-passing word that is not yet a consistent
    /// codeword keeps iterating. Far fewer false stops with short CRCs.
    CrcAndGMatrix(CrcSpec),
    /// Always run the full iteration budget.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    pub max_iterations: usize,
    pub termination: Termination,
    pub rule: CheckRule,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            termination: Termination::GMatrix,
            rule: CheckRule::Exact,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("maximum iteration count must be at least 1"));
        }
        Ok(())
    }
}

/// Message arrays of one BP decoder, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct BpState {
    n: usize,
    len: usize,
    left: Vec<f64>,
    right: Vec<f64>,
    iteration: usize,
}

impl BpState {
    /// Zeroed state for block length `len` (a power of two).
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "length {len} is not a power of two");
        let n = len.trailing_zeros() as usize;
        BpState {
            n,
            len,
            left: vec![0.0; (n + 1) * len],
            right: vec![0.0; (n + 1) * len],
            iteration: 0,
        }
    }

    /// Loads channel LLRs into column `n` of `L` and frozen priors into
    /// column 0 of `R`; every other message is reset to 0.
    pub fn init(&mut self, llrs: &[f64], code: &PolarCode) -> Result<()> {
        check_len(self.len, code.len())?;
        check_len(self.len, llrs.len())?;
        self.init_with_mask(llrs, code.frozen_mask());
        Ok(())
    }

    pub(crate) fn init_with_mask(&mut self, llrs: &[f64], frozen: &[bool]) {
        let len = self.len;
        self.left.fill(0.0);
        self.right.fill(0.0);
        for (dst, &v) in self.left[self.n * len..].iter_mut().zip(llrs) {
            *dst = clip(v);
        }
        for (dst, &f) in self.right[..len].iter_mut().zip(frozen) {
            *dst = if f { CLIP } else { 0.0 };
        }
        self.iteration = 0;
    }

    /// One full right-to-left then left-to-right sweep.
    pub fn iterate(&mut self, rule: CheckRule) {
        match rule {
            CheckRule::Exact => self.sweep(boxplus),
            CheckRule::MinSum { scale } => self.sweep(move |a, b| min_sum(a, b, scale)),
        }
        self.iteration += 1;
    }

    #[inline(always)]
    fn sweep<F: Fn(f64, f64) -> f64>(&mut self, f: F) {
        let len = self.len;
        for l in (0..self.n).rev() {
            let s = 1usize << l;
            let (lo, hi) = self.left.split_at_mut((l + 1) * len);
            let lcol = &mut lo[l * len..];
            let lnext = &hi[..len];
            let rcol = &self.right[l * len..(l + 1) * len];
            for base in (0..len).step_by(2 * s) {
                for i in base..base + s {
                    let j = i + s;
                    lcol[i] = f(lnext[i], rcol[j] + lnext[j]);
                    lcol[j] = clip(f(lnext[i], rcol[i]) + lnext[j]);
                }
            }
        }
        for l in 0..self.n {
            let s = 1usize << l;
            let (lo, hi) = self.right.split_at_mut((l + 1) * len);
            let rcol = &lo[l * len..];
            let rnext = &mut hi[..len];
            let lnext = &self.left[(l + 1) * len..(l + 2) * len];
            for base in (0..len).step_by(2 * s) {
                for i in base..base + s {
                    let j = i + s;
                    rnext[i] = f(rcol[i], lnext[j] + rcol[j]);
                    rnext[j] = clip(f(rcol[i], lnext[i]) + rcol[j]);
                }
            }
        }
    }

    /// `û_i = 0` iff `R[0][i] + L[0][i] >= 0`.
    pub fn hard_decision_u(&self) -> Vec<u8> {
        let mut out = vec![0; self.len];
        self.hard_decision_u_into(&mut out);
        out
    }

    /// `x̂_i = 0` iff `R[n][i] + L[n][i] >= 0`.
    pub fn hard_decision_x(&self) -> Vec<u8> {
        let mut out = vec![0; self.len];
        self.hard_decision_x_into(&mut out);
        out
    }

    pub(crate) fn hard_decision_u_into(&self, out: &mut [u8]) {
        decide(self.left(0), self.right(0), out);
    }

    pub(crate) fn hard_decision_x_into(&self, out: &mut [u8]) {
        decide(self.left(self.n), self.right(self.n), out);
    }

    /// Right-to-left messages of node column `col`.
    pub fn left(&self, col: usize) -> &[f64] {
        &self.left[col * self.len..(col + 1) * self.len]
    }

    /// Left-to-right messages of node column `col`.
    pub fn right(&self, col: usize) -> &[f64] {
        &self.right[col * self.len..(col + 1) * self.len]
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn log_len(&self) -> usize {
        self.n
    }
}

fn decide(l: &[f64], r: &[f64], out: &mut [u8]) {
    for ((o, &a), &b) in out.iter_mut().zip(l).zip(r) {
        *o = u8::from(a + b < 0.0);
    }
}

/// True iff `û G^{⊗n} = x̂`.
pub fn gmatrix_check(u_hat: &[u8], x_hat: &[u8]) -> bool {
    if u_hat.len() != x_hat.len() {
        return false;
    }
    let mut enc = u_hat.to_vec();
    polar_transform_in_place(&mut enc);
    enc == x_hat
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpResult {
    pub u_hat: Vec<u8>,
    pub x_hat: Vec<u8>,
    pub iterations_used: usize,
    pub terminated_early: bool,
}

/// Reusable BP decoder.
#[derive(Debug, Clone)]
pub struct BpDecoder {
    state: BpState,
    config: BpConfig,
    u_buf: Vec<u8>,
    x_buf: Vec<u8>,
    info_buf: Vec<u8>,
}

impl BpDecoder {
    pub fn new(len: usize, config: BpConfig) -> Result<Self> {
        config.validate()?;
        if !len.is_power_of_two() {
            return Err(invalid(format!("block length {len} is not a power of two")));
        }
        Ok(BpDecoder {
            state: BpState::new(len),
            config,
            u_buf: vec![0; len],
            x_buf: vec![0; len],
            info_buf: Vec::new(),
        })
    }

    pub fn config(&self) -> &BpConfig {
        &self.config
    }

    pub fn state(&self) -> &BpState {
        &self.state
    }

    /// Decodes one frame. With CRC termination the CRC covers the `K`
    /// information bits of `û` in ascending position order.
    pub fn decode(&mut self, llrs: &[f64], code: &PolarCode) -> Result<BpResult> {
        check_len(self.state.len, code.len())?;
        check_len(self.state.len, llrs.len())?;
        Ok(self.decode_masked(llrs, code.frozen_mask(), code.info_positions()))
    }

    /// Decodes with an explicit frozen mask; `info_order` lists the positions
    /// of `û` that carry the CRC-protected word, in transmission order.
    pub(crate) fn decode_masked(
        &mut self,
        llrs: &[f64],
        frozen: &[bool],
        info_order: &[usize],
    ) -> BpResult {
        let cfg = self.config;
        self.state.init_with_mask(llrs, frozen);
        for it in 1..=cfg.max_iterations {
            self.state.iterate(cfg.rule);
            if self.terminated(info_order) {
                return self.result(it, true);
            }
        }
        self.result(cfg.max_iterations, false)
    }

    fn terminated(&mut self, info_order: &[usize]) -> bool {
        match self.config.termination {
            Termination::None => false,
            Termination::GMatrix => self.gmatrix_ok(),
            Termination::Crc(spec) => self.crc_ok(spec, info_order),
            Termination::CrcAndGMatrix(spec) => {
                self.crc_ok(spec, info_order) && self.gmatrix_ok()
            }
        }
    }

    fn gmatrix_ok(&mut self) -> bool {
        self.state.hard_decision_u_into(&mut self.u_buf);
        self.state.hard_decision_x_into(&mut self.x_buf);
        polar_transform_in_place(&mut self.u_buf);
        self.u_buf == self.x_buf
    }

    fn crc_ok(&mut self, spec: CrcSpec, info_order: &[usize]) -> bool {
        self.state.hard_decision_u_into(&mut self.u_buf);
        self.info_buf.clear();
        self.info_buf
            .extend(info_order.iter().map(|&p| self.u_buf[p]));
        spec.check(&self.info_buf)
    }

    fn result(&self, iterations_used: usize, terminated_early: bool) -> BpResult {
        BpResult {
            u_hat: self.state.hard_decision_u(),
            x_hat: self.state.hard_decision_x(),
            iterations_used,
            terminated_early,
        }
    }
}

/// One-shot convenience wrapper around [`BpDecoder`].
pub fn bp_decode(llrs: &[f64], code: &PolarCode, config: BpConfig) -> Result<BpResult> {
    BpDecoder::new(code.len(), config)?.decode(llrs, code)
}
