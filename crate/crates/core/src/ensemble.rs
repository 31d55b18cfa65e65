//! Decoding over a predetermined, ordered set of bit-index permutations.
//!
//! Members are tried in priority order. For BP, the first member whose
//! decoder meets the early-termination condition wins; if none does, the
//! identity member's final estimate is returned. For SC every member runs
//! and a CRC or the last-bit reliability picks the result.

use rayon::prelude::*;

use crate::bp::{BpConfig, BpDecoder, BpResult, Termination};
use crate::crc::CrcSpec;
use crate::error::{check_len, invalid, Result};
use crate::permutations::{IndexMap, LayerPermutation};
use crate::polar_code::PolarCode;
use crate::sc::ScDecoder;

/// One permuted view of the code.
#[derive(Debug, Clone)]
pub struct Member {
    pub perm: LayerPermutation,
    pub map: IndexMap,
    frozen: Vec<bool>,
    // Positions of û_π holding the original information bits, in original order.
    info_order: Vec<usize>,
}

impl Member {
    pub fn new(code: &PolarCode, perm: &LayerPermutation) -> Result<Self> {
        if perm.num_layers() != code.log_len() {
            return Err(invalid(format!(
                "permutation {perm} has {} layers, code has {}",
                perm.num_layers(),
                code.log_len()
            )));
        }
        let map = perm.index_map();
        let frozen = map.permute(code.frozen_mask())?;
        let info_order = code
            .info_positions()
            .iter()
            .map(|&i| map.forward()[i])
            .collect();
        Ok(Member {
            perm: perm.clone(),
            map,
            frozen,
            info_order,
        })
    }

    /// BP on the permuted frame; `scratch` receives the permuted LLRs.
    /// The result stays in the permuted domain.
    pub fn decode_bp(&self, bp: &mut BpDecoder, llrs: &[f64], scratch: &mut [f64]) -> BpResult {
        self.map.permute_into(llrs, scratch);
        bp.decode_masked(scratch, &self.frozen, &self.info_order)
    }

    /// Information bits (original order) of a permuted-domain estimate.
    pub fn info_bits(&self, u_pi: &[u8]) -> Vec<u8> {
        self.info_order.iter().map(|&p| u_pi[p]).collect()
    }
}

/// Precomputed index maps and permuted frozen sets for an ordered
/// permutation list. Immutable, so one plan can serve many decoders.
#[derive(Debug, Clone)]
pub struct EnsemblePlan {
    code: PolarCode,
    members: Vec<Member>,
}

impl EnsemblePlan {
    /// `perms` must be non-empty, start with the identity and match the
    /// code's layer count.
    pub fn new(code: &PolarCode, perms: &[LayerPermutation]) -> Result<Self> {
        let first = perms
            .first()
            .ok_or_else(|| invalid("permutation set is empty"))?;
        if !first.is_identity() {
            return Err(invalid("permutation set must start with the identity"));
        }
        let members = perms
            .iter()
            .map(|p| Member::new(code, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(EnsemblePlan {
            code: code.clone(),
            members,
        })
    }

    pub fn code(&self) -> &PolarCode {
        &self.code
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Runs BP on member `j` and returns the result in the permuted domain.
    pub fn decode_member(&self, bp: &mut BpDecoder, llrs: &[f64], j: usize) -> BpResult {
        let mut y = vec![0.0; llrs.len()];
        self.members[j].decode_bp(bp, llrs, &mut y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleResult {
    pub u_hat: Vec<u8>,
    /// Index of the member whose result was selected; `None` means no member
    /// qualified and the identity result was used.
    pub winning_perm: Option<usize>,
    /// Iterations summed over every attempted member.
    pub total_iterations: usize,
    /// Largest iteration count among attempted members: the latency when
    /// members run side by side but the result must follow priority order.
    pub parallel_iterations: usize,
    pub perms_attempted: usize,
    pub terminated_early: bool,
}

/// Permuted BP decoder.
#[derive(Debug, Clone)]
pub struct PbpDecoder<'a> {
    plan: &'a EnsemblePlan,
    bp: BpDecoder,
    y: Vec<f64>,
}

impl<'a> PbpDecoder<'a> {
    pub fn new(plan: &'a EnsemblePlan, config: BpConfig) -> Result<Self> {
        let len = plan.code.len();
        Ok(PbpDecoder {
            plan,
            bp: BpDecoder::new(len, config)?,
            y: vec![0.0; len],
        })
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Result<EnsembleResult> {
        check_len(self.y.len(), llrs.len())?;
        let mut total = 0;
        let mut longest = 0;
        let mut fallback = None;
        for (j, m) in self.plan.members.iter().enumerate() {
            let res = m.decode_bp(&mut self.bp, llrs, &mut self.y);
            total += res.iterations_used;
            longest = longest.max(res.iterations_used);
            if res.terminated_early {
                return Ok(EnsembleResult {
                    u_hat: m.map.unpermute(&res.u_hat)?,
                    winning_perm: Some(j),
                    total_iterations: total,
                    parallel_iterations: longest,
                    perms_attempted: j + 1,
                    terminated_early: true,
                });
            }
            if j == 0 {
                fallback = Some(res.u_hat);
            }
        }
        Ok(EnsembleResult {
            u_hat: fallback.expect("plan has an identity member"),
            winning_perm: None,
            total_iterations: total,
            parallel_iterations: longest,
            perms_attempted: self.plan.len(),
            terminated_early: false,
        })
    }
}

/// Runs every member concurrently and reports what sequential decoding
/// would have returned.
pub fn pbp_decode_parallel(
    plan: &EnsemblePlan,
    config: BpConfig,
    llrs: &[f64],
) -> Result<EnsembleResult> {
    check_len(plan.code.len(), llrs.len())?;
    config.validate()?;
    let results: Vec<BpResult> = (0..plan.len())
        .into_par_iter()
        .map_init(
            || BpDecoder::new(plan.code.len(), config).expect("validated config"),
            |bp, j| plan.decode_member(bp, llrs, j),
        )
        .collect();
    let winner = results.iter().position(|r| r.terminated_early);
    let attempted = winner.map_or(results.len(), |w| w + 1);
    let prefix = &results[..attempted];
    let chosen = winner.unwrap_or(0);
    Ok(EnsembleResult {
        u_hat: plan.members[chosen].map.unpermute(&results[chosen].u_hat)?,
        winning_perm: winner,
        total_iterations: prefix.iter().map(|r| r.iterations_used).sum(),
        parallel_iterations: prefix.iter().map(|r| r.iterations_used).max().unwrap_or(0),
        perms_attempted: attempted,
        terminated_early: winner.is_some(),
    })
}

/// One-shot permuted BP decode.
pub fn pbp_decode(plan: &EnsemblePlan, config: BpConfig, llrs: &[f64]) -> Result<EnsembleResult> {
    PbpDecoder::new(plan, config)?.decode(llrs)
}

/// Candidate produced by one SC member, in original index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScCandidate {
    pub u_hat: Vec<u8>,
    pub last_bit_abs_llr: f64,
}

/// Permuted SC decoder.
#[derive(Debug, Clone)]
pub struct PscDecoder<'a> {
    plan: &'a EnsemblePlan,
    sc: ScDecoder,
    crc: Option<CrcSpec>,
    y: Vec<f64>,
}

impl<'a> PscDecoder<'a> {
    pub fn new(plan: &'a EnsemblePlan, crc: Option<CrcSpec>) -> Self {
        let len = plan.code.len();
        PscDecoder {
            plan,
            sc: ScDecoder::new(len),
            crc,
            y: vec![0.0; len],
        }
    }

    pub fn with_decoder(mut self, sc: ScDecoder) -> Self {
        self.sc = sc;
        self
    }

    /// All member candidates, in priority order.
    pub fn candidates(&mut self, llrs: &[f64]) -> Result<Vec<ScCandidate>> {
        check_len(self.y.len(), llrs.len())?;
        let mut out = Vec::with_capacity(self.plan.len());
        for m in &self.plan.members {
            m.map.permute_into(llrs, &mut self.y);
            let r = self.sc.decode_masked(&self.y, &m.frozen);
            out.push(ScCandidate {
                u_hat: m.map.unpermute(&r.u_hat)?,
                last_bit_abs_llr: r.last_bit_abs_llr,
            });
        }
        Ok(out)
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Result<EnsembleResult> {
        let cands = self.candidates(llrs)?;
        select_sc_candidate(&self.plan.code, self.crc, cands)
    }
}

/// Picks among SC candidates: with a CRC, the first passing one (identity
/// with `winning_perm = None` if none passes); without, the largest
/// last-bit reliability, ties to the lower index.
pub fn select_sc_candidate(
    code: &PolarCode,
    crc: Option<CrcSpec>,
    mut cands: Vec<ScCandidate>,
) -> Result<EnsembleResult> {
    if cands.is_empty() {
        return Err(invalid("no SC candidates"));
    }
    let attempted = cands.len();
    let winner = match crc {
        Some(spec) => {
            let mut w = None;
            for (j, c) in cands.iter().enumerate() {
                if spec.check(&code.extract_message(&c.u_hat)?) {
                    w = Some(j);
                    break;
                }
            }
            w
        }
        None => {
            let mut best = 0;
            for (j, c) in cands.iter().enumerate().skip(1) {
                if c.last_bit_abs_llr > cands[best].last_bit_abs_llr {
                    best = j;
                }
            }
            Some(best)
        }
    };
    let chosen = winner.unwrap_or(0);
    Ok(EnsembleResult {
        u_hat: cands.swap_remove(chosen).u_hat,
        winning_perm: winner,
        total_iterations: 0,
        parallel_iterations: 0,
        perms_attempted: attempted,
        terminated_early: winner.is_some() && crc.is_some(),
    })
}

/// One-shot permuted SC decode.
pub fn psc_decode(
    plan: &EnsemblePlan,
    crc: Option<CrcSpec>,
    llrs: &[f64],
) -> Result<EnsembleResult> {
    PscDecoder::new(plan, crc).decode(llrs)
}

/// Termination condition the ensemble members use for a given CRC setting.
pub fn default_termination(crc: Option<CrcSpec>) -> Termination {
    match crc {
        Some(spec) => Termination::Crc(spec),
        None => Termination::GMatrix,
    }
}
