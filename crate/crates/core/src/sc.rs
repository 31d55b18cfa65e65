//! Successive-cancellation decoding.
//!
//! Recursive depth-first traversal. For a node of length `m` with child
//! halves `a` (first) and `b` (second), `x = [v_a ⊕ v_b, v_b]`, so the first
//! child sees `f(llr_lo, llr_hi)` and the second `g = llr_hi + (1 - 2 v_a) llr_lo`.

use crate::bp::{boxplus, CheckRule};
use crate::error::{check_len, Result};
use crate::polar_code::PolarCode;

#[derive(Debug, Clone, PartialEq)]
pub struct ScResult {
    pub u_hat: Vec<u8>,
    /// `|LLR|` of bit `N - 1` when it was decided.
    pub last_bit_abs_llr: f64,
}

/// Reusable SC decoder.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    rule: CheckRule,
    // One scratch LLR vector per tree depth: alpha[d] has length N >> d.
    alpha: Vec<Vec<f64>>,
    x_buf: Vec<u8>,
}

impl ScDecoder {
    /// Min-sum `f`, the default.
    pub fn new(len: usize) -> Self {
        Self::with_rule(len, CheckRule::MinSum { scale: 1.0 })
    }

    /// Uses `rule` for the `f` update; `CheckRule::Exact` gives the exact
    /// boxplus shared with the BP decoder.
    pub fn with_rule(len: usize, rule: CheckRule) -> Self {
        assert!(len.is_power_of_two(), "length {len} is not a power of two");
        let n = len.trailing_zeros() as usize;
        ScDecoder {
            rule,
            alpha: (0..=n).map(|d| vec![0.0; len >> d]).collect(),
            x_buf: vec![0; len],
        }
    }

    pub fn decode(&mut self, llrs: &[f64], code: &PolarCode) -> Result<ScResult> {
        check_len(self.x_buf.len(), code.len())?;
        check_len(self.x_buf.len(), llrs.len())?;
        Ok(self.decode_masked(llrs, code.frozen_mask()))
    }

    pub(crate) fn decode_masked(&mut self, llrs: &[f64], frozen: &[bool]) -> ScResult {
        let len = frozen.len();
        self.alpha[0].copy_from_slice(llrs);
        let mut u_hat = vec![0u8; len];
        let mut last = 0.0;
        let mut x = std::mem::take(&mut self.x_buf);
        self.node(0, frozen, &mut u_hat, &mut x, &mut last);
        self.x_buf = x;
        ScResult {
            u_hat,
            last_bit_abs_llr: last,
        }
    }

    /// Decodes the subtree at `depth` whose LLRs are in `alpha[depth]`;
    /// writes its bit decisions to `u` and re-encoded bits to `x`.
    fn node(&mut self, depth: usize, frozen: &[bool], u: &mut [u8], x: &mut [u8], last: &mut f64) {
        let m = frozen.len();
        if m == 1 {
            let l = self.alpha[depth][0];
            let bit = if frozen[0] { 0 } else { u8::from(l < 0.0) };
            u[0] = bit;
            x[0] = bit;
            *last = l.abs();
            return;
        }
        let half = m / 2;
        let rule = self.rule;
        let (parent, child) = self.alpha.split_at_mut(depth + 1);
        let (p, c) = (&parent[depth], &mut child[0]);
        for j in 0..half {
            c[j] = check(rule, p[j], p[j + half]);
        }
        let (fa, fb) = frozen.split_at(half);
        let (ua, ub) = u.split_at_mut(half);
        let (xa, xb) = x.split_at_mut(half);
        self.node(depth + 1, fa, ua, xa, last);

        let (parent, child) = self.alpha.split_at_mut(depth + 1);
        let (p, c) = (&parent[depth], &mut child[0]);
        for j in 0..half {
            let lo = p[j];
            c[j] = if xa[j] == 0 { p[j + half] + lo } else { p[j + half] - lo };
        }
        self.node(depth + 1, fb, ub, xb, last);

        for (a, &b) in xa.iter_mut().zip(xb.iter()) {
            *a ^= b;
        }
    }

}

#[inline]
fn check(rule: CheckRule, a: f64, b: f64) -> f64 {
        match rule {
            CheckRule::Exact => boxplus(a, b),
            CheckRule::MinSum { scale } => {
                let m = scale * a.abs().min(b.abs());
                if (a < 0.0) != (b < 0.0) {
                    -m
                } else {
                    m
                }
            }
        }
}

/// One-shot min-sum SC decode.
pub fn sc_decode(llrs: &[f64], code: &PolarCode) -> Result<ScResult> {
    ScDecoder::new(code.len()).decode(llrs, code)
}
