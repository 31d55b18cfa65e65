//! Offline construction of a small set of high-value permutations.
//!
//! 1. Collect frames on which BP over the original graph fails.
//! 2. For every candidate layer order, count how many of those frames it
//!    decodes to the transmitted word.
//! 3. Keep the identity plus the `M - 1` best candidates.

use std::path::Path;

use rayon::prelude::*;

use crate::bp::{BpConfig, BpDecoder};
use crate::channel::{frame_rng, random_bits, AwgnChannel};
use crate::crc::CrcSpec;
use crate::ensemble::Member;
use crate::error::{invalid, Error, Result};
use crate::permutations::{form_permutation_set, LayerPermutation, PermFile};
use crate::polar_code::PolarCode;

/// Sweep-point index reserved for failure collection streams, so they never
/// coincide with simulation streams.
pub const SELECTION_STREAM: u64 = u64::MAX;

const BATCH: usize = 64;

/// A received frame on which identity BP failed.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureFrame {
    pub frame_index: u64,
    pub llrs: Vec<f64>,
    /// The `K` transmitted information bits (CRC included).
    pub word: Vec<u8>,
}

/// Generates the transmitted word and channel LLRs for frame `t`.
pub fn generate_frame(
    code: &PolarCode,
    crc: Option<CrcSpec>,
    channel: &AwgnChannel,
    seed: u64,
    point: u64,
    t: u64,
) -> Result<(Vec<u8>, Vec<f64>)> {
    let payload_len = payload_len(code, crc)?;
    let mut rng = frame_rng(seed, point, t);
    let payload = random_bits(&mut rng, payload_len);
    let word = match crc {
        Some(spec) => spec.attach(&payload),
        None => payload,
    };
    let x = code.encode(&word)?;
    let llrs = channel.transmit(&x, &mut rng);
    Ok((word, llrs))
}

/// Payload bits per frame: `K` minus the CRC length.
pub fn payload_len(code: &PolarCode, crc: Option<CrcSpec>) -> Result<usize> {
    let deg = crc.map_or(0, |c| c.degree());
    if code.k() <= deg {
        return Err(invalid(format!(
            "K = {} leaves no room for a {deg}-bit CRC",
            code.k()
        )));
    }
    Ok(code.k() - deg)
}

/// Collects `count` frames that identity BP decodes wrongly.
///
/// Frames are drawn from streams `(seed, SELECTION_STREAM, t)` for
/// `t = 0, 1, ...` and examined in batches; the result is independent of
/// thread count. `progress(found, attempted)` runs after every batch.
#[allow(clippy::too_many_arguments)]
pub fn collect_failure_frames(
    code: &PolarCode,
    crc: Option<CrcSpec>,
    ebno_db: f64,
    count: usize,
    seed: u64,
    bp: BpConfig,
    max_attempts: u64,
    progress: &mut dyn FnMut(usize, u64),
) -> Result<Vec<FailureFrame>> {
    bp.validate()?;
    let channel = AwgnChannel::from_ebno(ebno_db, code.rate())?;
    collect_failures_on(code, crc, &channel, count, seed, bp, max_attempts, progress)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn collect_failures_on(
    code: &PolarCode,
    crc: Option<CrcSpec>,
    channel: &AwgnChannel,
    count: usize,
    seed: u64,
    bp: BpConfig,
    max_attempts: u64,
    progress: &mut dyn FnMut(usize, u64),
) -> Result<Vec<FailureFrame>> {
    payload_len(code, crc)?;
    let mut found = Vec::with_capacity(count);
    let mut next = 0u64;
    while found.len() < count {
        if next >= max_attempts {
            return Err(Error::AttemptsExhausted {
                attempts: next,
                found: found.len(),
                wanted: count,
            });
        }
        let end = (next + BATCH as u64).min(max_attempts);
        let batch: Vec<Option<FailureFrame>> = (next..end)
            .into_par_iter()
            .map_init(
                || BpDecoder::new(code.len(), bp).expect("validated config"),
                |dec, t| -> Result<Option<FailureFrame>> {
                    let (word, llrs) = generate_frame(code, crc, channel, seed, SELECTION_STREAM, t)?;
                    let res = dec.decode(&llrs, code)?;
                    let ok = code.extract_message(&res.u_hat)? == word;
                    Ok((!ok).then_some(FailureFrame {
                        frame_index: t,
                        llrs,
                        word,
                    }))
                },
            )
            .collect::<Result<_>>()?;
        for f in batch.into_iter().flatten() {
            if found.len() < count {
                found.push(f);
            }
        }
        next = end;
        progress(found.len(), next);
    }
    Ok(found)
}

/// Fraction of `failures` each permutation decodes to the transmitted word.
pub fn score_permutations(
    perms: &[LayerPermutation],
    failures: &[FailureFrame],
    code: &PolarCode,
    bp: BpConfig,
) -> Result<Vec<f64>> {
    Ok(success_counts(perms, failures, code, bp)?
        .into_iter()
        .map(|c| c as f64 / failures.len() as f64)
        .collect())
}

/// Number of failure frames each permutation decodes correctly.
pub fn success_counts(
    perms: &[LayerPermutation],
    failures: &[FailureFrame],
    code: &PolarCode,
    bp: BpConfig,
) -> Result<Vec<usize>> {
    if failures.is_empty() {
        return Err(invalid("cannot score permutations on an empty failure set"));
    }
    bp.validate()?;
    let members = perms
        .iter()
        .map(|p| Member::new(code, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(members
        .par_iter()
        .map_init(
            || {
                (
                    BpDecoder::new(code.len(), bp).expect("validated config"),
                    vec![0.0; code.len()],
                )
            },
            |(dec, y), m| {
                failures
                    .iter()
                    .filter(|f| {
                        let r = m.decode_bp(dec, &f.llrs, y);
                        m.info_bits(&r.u_hat) == f.word
                    })
                    .count()
            },
        )
        .collect())
}

/// Provenance of a ranked set.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionMeta {
    pub n: usize,
    pub k: usize,
    pub scoring_ebno_db: f64,
    pub frames_scored: usize,
    pub seed: u64,
}

/// Identity followed by the best-scoring permutations, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPermSet {
    pub perms: Vec<LayerPermutation>,
    pub scores: Vec<f64>,
    pub meta: SelectionMeta,
}

impl RankedPermSet {
    pub fn m(&self) -> usize {
        self.perms.len()
    }

    /// Keeps the first `m` entries.
    pub fn truncated(&self, m: usize) -> RankedPermSet {
        let m = m.min(self.perms.len());
        RankedPermSet {
            perms: self.perms[..m].to_vec(),
            scores: self.scores[..m].to_vec(),
            meta: self.meta.clone(),
        }
    }

    pub fn to_perm_file(&self) -> PermFile {
        PermFile {
            n: self.meta.n,
            k: self.meta.k,
            extra: vec![
                ("ebno".into(), self.meta.scoring_ebno_db.to_string()),
                ("frames".into(), self.meta.frames_scored.to_string()),
                ("seed".into(), self.meta.seed.to_string()),
            ],
            perms: self.perms.clone(),
            scores: self.scores.iter().map(|&s| Some(s)).collect(),
        }
    }

    /// Reads a permutation file. Missing scores or metadata default to 0.
    pub fn from_perm_file(file: &PermFile) -> Result<Self> {
        if file.perms.first().is_none_or(|p| !p.is_identity()) {
            return Err(invalid("ranked permutation set must start with the identity"));
        }
        let parse_num = |key: &str| -> Result<Option<f64>> {
            file.extra_value(key)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| invalid(format!("bad {key} value {v:?}")))
                })
                .transpose()
        };
        let seed = file
            .extra_value("seed")
            .map(|v| v.parse::<u64>().map_err(|_| invalid(format!("bad seed {v:?}"))))
            .transpose()?
            .unwrap_or(0);
        Ok(RankedPermSet {
            perms: file.perms.clone(),
            scores: file.scores.iter().map(|s| s.unwrap_or(0.0)).collect(),
            meta: SelectionMeta {
                n: file.n,
                k: file.k,
                scoring_ebno_db: parse_num("ebno")?.unwrap_or(f64::NAN),
                frames_scored: parse_num("frames")?.unwrap_or(0.0) as usize,
                seed,
            },
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_perm_file().save(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_perm_file(&PermFile::load(path)?)
    }
}

/// Identity first, then the `m - 1` highest-scoring non-identity
/// permutations. Equal scores keep their order in `perms`.
pub fn select_top(
    perms: &[LayerPermutation],
    scores: &[f64],
    m: usize,
    meta: SelectionMeta,
) -> Result<RankedPermSet> {
    if perms.len() != scores.len() {
        return Err(invalid("one score per permutation required"));
    }
    if m == 0 {
        return Err(invalid("M must be at least 1"));
    }
    let n = perms.first().map_or(meta.n, |p| p.num_layers());
    let identity = LayerPermutation::identity(n);
    let identity_score = perms
        .iter()
        .position(|p| p.is_identity())
        .map_or(0.0, |i| scores[i]);
    let mut order: Vec<usize> = (0..perms.len()).filter(|&i| !perms[i].is_identity()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut out_perms = vec![identity];
    let mut out_scores = vec![identity_score];
    for &i in order.iter().take(m - 1) {
        out_perms.push(perms[i].clone());
        out_scores.push(scores[i]);
    }
    Ok(RankedPermSet {
        perms: out_perms,
        scores: out_scores,
        meta,
    })
}

/// Parameters of a full permutation search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Number of trailing layers permuted; the search space has `k!` entries.
    pub k: usize,
    pub m: usize,
    pub ebno_db: f64,
    pub frames: usize,
    pub seed: u64,
    pub bp: BpConfig,
    pub max_attempts: u64,
}

/// Collect failures, score the `k!` candidates and keep the best `m`.
pub fn search_permutations(
    code: &PolarCode,
    crc: Option<CrcSpec>,
    cfg: &SearchConfig,
    progress: &mut dyn FnMut(usize, u64),
) -> Result<RankedPermSet> {
    let n = code.log_len();
    let candidates = form_permutation_set(n, cfg.k)?;
    let failures = collect_failure_frames(
        code,
        crc,
        cfg.ebno_db,
        cfg.frames,
        cfg.seed,
        cfg.bp,
        cfg.max_attempts,
        progress,
    )?;
    let scores = score_permutations(&candidates, &failures, code, cfg.bp)?;
    select_top(
        &candidates,
        &scores,
        cfg.m,
        SelectionMeta {
            n,
            k: cfg.k,
            scoring_ebno_db: cfg.ebno_db,
            frames_scored: cfg.frames,
            seed: cfg.seed,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::Termination;
    use crate::permutations::cyclic_shift_set;

    fn meta() -> SelectionMeta {
        SelectionMeta {
            n: 3,
            k: 3,
            scoring_ebno_db: 2.5,
            frames_scored: 100,
            seed: 7,
        }
    }

    fn small_setup() -> (PolarCode, CrcSpec, BpConfig) {
        let code = PolarCode::construct(64, 32, 2.0).unwrap();
        let spec = CrcSpec::CRC8_LTE;
        let bp = BpConfig {
            max_iterations: 60,
            termination: Termination::Crc(spec),
            ..BpConfig::default()
        };
        (code, spec, bp)
    }

    #[test]
    fn select_top_rules() {
        let perms = form_permutation_set(3, 3).unwrap();
        let scores = [0.0, 0.1, 0.5, 0.3, 0.5, 0.2];
        let one = select_top(&perms, &scores, 1, meta()).unwrap();
        assert_eq!(one.perms, vec![LayerPermutation::identity(3)]);

        let all = select_top(&perms, &scores, 10, meta()).unwrap();
        assert_eq!(all.m(), 6);
        // Ties keep enumeration order: index 2 before index 4.
        assert_eq!(all.perms[1], perms[2]);
        assert_eq!(all.perms[2], perms[4]);
        assert_eq!(all.scores, vec![0.0, 0.5, 0.5, 0.3, 0.2, 0.1]);
        for w in all.scores[1..].windows(2) {
            assert!(w[0] >= w[1]);
        }

        // Identity not among the candidates: it is prepended anyway.
        let top = select_top(&perms[1..], &scores[1..], 6, meta()).unwrap();
        assert!(top.perms[0].is_identity());
        assert_eq!(top.m(), 6);
        assert_eq!(top.scores[0], 0.0);

        assert!(select_top(&perms, &scores[1..], 3, meta()).is_err());
        assert!(select_top(&perms, &scores, 0, meta()).is_err());
    }

    #[test]
    fn ranked_set_file_round_trip() {
        let perms = form_permutation_set(3, 3).unwrap();
        let scores = [0.0, 0.1, 1.0 / 3.0, 0.3, 0.7, 0.2];
        let set = select_top(&perms, &scores, 4, meta()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("perms.txt");
        set.save(&path).unwrap();
        let back = RankedPermSet::load(&path).unwrap();
        assert_eq!(back, set);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("n=3 k=3 ebno=2.5 frames=100 seed=7\n"));
    }

    #[test]
    fn ranked_set_requires_identity_first() {
        let f = PermFile::parse("n=3 k=3\n0 2 1\n0 1 2\n").unwrap();
        assert!(RankedPermSet::from_perm_file(&f).is_err());
        let f = PermFile::parse("n=3 k=3\n0 1 2\n0 2 1\n").unwrap();
        let s = RankedPermSet::from_perm_file(&f).unwrap();
        assert_eq!(s.scores, vec![0.0, 0.0]);
        assert_eq!(s.truncated(1).m(), 1);
    }

    #[test]
    fn zero_count_returns_empty() {
        let (code, spec, bp) = small_setup();
        let f = collect_failure_frames(&code, Some(spec), 1.0, 0, 1, bp, 10, &mut |_, _| {}).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn noiseless_channel_exhausts_attempts() {
        let (code, spec, bp) = small_setup();
        let ch = AwgnChannel::from_ebno(1.0, code.rate()).unwrap().noiseless();
        let err = collect_failures_on(&code, Some(spec), &ch, 1, 1, bp, 200, &mut |_, _| {}).unwrap_err();
        assert!(matches!(err, Error::AttemptsExhausted { attempts: 200, found: 0, .. }));
    }

    #[test]
    fn failures_fail_again_and_identity_scores_zero() {
        let (code, spec, bp) = small_setup();
        let mut calls = 0;
        let failures =
            collect_failure_frames(&code, Some(spec), 1.0, 30, 5, bp, 100_000, &mut |_, _| calls += 1).unwrap();
        assert_eq!(failures.len(), 30);
        assert!(calls > 0);
        for w in failures.windows(2) {
            assert!(w[0].frame_index < w[1].frame_index);
        }
        let mut dec = BpDecoder::new(64, bp).unwrap();
        for f in &failures {
            let r = dec.decode(&f.llrs, &code).unwrap();
            assert_ne!(code.extract_message(&r.u_hat).unwrap(), f.word);
        }
        let perms = cyclic_shift_set(6);
        let scores = score_permutations(&perms, &failures, &code, bp).unwrap();
        assert_eq!(scores[0], 0.0);
        assert!(scores.iter().all(|&s| (0.0..=1.0).contains(&s)));
        let counts = success_counts(&perms, &failures, &code, bp).unwrap();
        for (c, s) in counts.iter().zip(&scores) {
            assert_eq!(*c as f64 / 30.0, *s);
        }
        assert!(score_permutations(&perms, &[], &code, bp).is_err());
    }

    #[test]
    fn search_is_deterministic() {
        let (code, spec, bp) = small_setup();
        let cfg = SearchConfig {
            k: 3,
            m: 4,
            ebno_db: 1.0,
            frames: 20,
            seed: 3,
            bp,
            max_attempts: 100_000,
        };
        let a = search_permutations(&code, Some(spec), &cfg, &mut |_, _| {}).unwrap();
        let b = search_permutations(&code, Some(spec), &cfg, &mut |_, _| {}).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 4);
        assert!(a.perms[0].is_identity());
    }
}
