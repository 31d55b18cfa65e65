//! Monte-Carlo FER/BER simulation.
//!
//! Every frame draws its payload and noise from the stream
//! `(seed, point index, frame index)`. Frames run in fixed-size batches and
//! are tallied in frame order, so a run stops at exactly the same frame no
//! matter how many worker threads execute it.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bp::{BpConfig, BpDecoder};
use crate::channel::AwgnChannel;
use crate::crc::CrcSpec;
use crate::ensemble::{EnsemblePlan, PbpDecoder, PscDecoder};
use crate::error::{invalid, Result};
use crate::permutations::LayerPermutation;
use crate::polar_code::PolarCode;
use crate::sc::ScDecoder;
use crate::selection::{generate_frame, payload_len};

pub const CSV_HEADER: &str =
    "ebno_db,frames,frame_errors,bit_errors,fer,ber,avg_iterations,avg_latency_timesteps,avg_perms_attempted";

const BATCH: u64 = 256;

/// Which decoder a simulation runs.
#[derive(Debug, Clone, PartialEq)]
pub enum DecoderSpec {
    Bp,
    Sc,
    /// Permuted BP over an ordered list starting with the identity.
    Pbp(Vec<LayerPermutation>),
    /// Permuted SC; with a CRC configured the CRC selects the candidate.
    Psc(Vec<LayerPermutation>),
}

/// How ensemble iterations turn into `avg_iterations`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LatencyModel {
    /// Sum over attempted members (one decoder reused).
    Sequential,
    /// Maximum over attempted members (members run side by side).
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: PolarCode,
    pub crc: Option<CrcSpec>,
    pub decoder: DecoderSpec,
    pub bp: BpConfig,
    pub ebno_start: f64,
    pub ebno_stop: f64,
    pub ebno_step: f64,
    pub min_frame_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub latency_model: LatencyModel,
    /// Replace the AWGN noise with zeros (functional checks).
    pub noiseless: bool,
}

impl SimConfig {
    /// Defaults: single point at 2 dB, 100 frame errors, 10^6 frame cap.
    pub fn new(code: PolarCode, crc: Option<CrcSpec>, decoder: DecoderSpec, bp: BpConfig) -> Self {
        SimConfig {
            code,
            crc,
            decoder,
            bp,
            ebno_start: 2.0,
            ebno_stop: 2.0,
            ebno_step: 0.5,
            min_frame_errors: 100,
            max_frames: 1_000_000,
            seed: 0,
            latency_model: LatencyModel::default(),
            noiseless: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ebno_start.is_finite() && self.ebno_stop.is_finite()) {
            return Err(invalid("Eb/N0 bounds must be finite"));
        }
        if self.ebno_start > self.ebno_stop {
            return Err(invalid("Eb/N0 start exceeds stop"));
        }
        if !self.ebno_step.is_finite() || self.ebno_step <= 0.0 {
            return Err(invalid("Eb/N0 step must be positive"));
        }
        if self.min_frame_errors == 0 {
            return Err(invalid("min_frame_errors must be at least 1"));
        }
        if self.max_frames == 0 {
            return Err(invalid("max_frames must be at least 1"));
        }
        self.bp.validate()?;
        payload_len(&self.code, self.crc)?;
        if let DecoderSpec::Pbp(p) | DecoderSpec::Psc(p) = &self.decoder {
            EnsemblePlan::new(&self.code, p)?;
        }
        Ok(())
    }

    /// Eb/N0 grid, ascending, each point rounded to 1e-9 dB.
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.ebno_stop - self.ebno_start) / self.ebno_step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = self.ebno_start + i as f64 * self.ebno_step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

/// Aggregated outcome at one Eb/N0.
#[derive(Debug, Clone, PartialEq)]
pub struct FerRecord {
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    /// `I_avg` under the configured latency model.
    pub avg_iterations: f64,
    pub avg_iterations_sequential: f64,
    pub avg_iterations_parallel: f64,
    /// `2 n I_avg` time steps.
    pub avg_latency_timesteps: f64,
    pub avg_perms_attempted: f64,
}

impl FerRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.ebno_db,
            self.frames,
            self.frame_errors,
            self.bit_errors,
            self.fer,
            self.ber,
            self.avg_iterations,
            self.avg_latency_timesteps,
            self.avg_perms_attempted
        )
    }

    /// Two-sided Clopper-Pearson interval on the FER.
    pub fn fer_interval(&self, confidence: f64) -> (f64, f64) {
        clopper_pearson(self.frame_errors, self.frames, confidence)
    }
}

/// Latency in time steps of a BP decoder with `n` layers: `2 n I_avg`.
pub fn latency_timesteps(n: usize, avg_iterations: f64) -> f64 {
    2.0 * n as f64 * avg_iterations
}

/// Exact binomial confidence interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(k <= n && n > 0, "need 0 <= k <= n, n > 0");
    let alpha = 1.0 - confidence;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0)
            .expect("valid shape")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("valid shape")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameOutcome {
    frame_error: bool,
    bit_errors: u64,
    iters_sequential: u64,
    iters_parallel: u64,
    perms: u64,
}

enum Worker<'a> {
    Bp(BpDecoder),
    Sc(ScDecoder),
    Pbp(PbpDecoder<'a>),
    Psc(PscDecoder<'a>),
}

impl Worker<'_> {
    fn decode(&mut self, code: &PolarCode, llrs: &[f64]) -> Result<(Vec<u8>, u64, u64, u64)> {
        Ok(match self {
            Worker::Bp(d) => {
                let r = d.decode(llrs, code)?;
                let it = r.iterations_used as u64;
                (r.u_hat, it, it, 1)
            }
            Worker::Sc(d) => (d.decode(llrs, code)?.u_hat, 0, 0, 1),
            Worker::Pbp(d) => {
                let r = d.decode(llrs)?;
                (
                    r.u_hat,
                    r.total_iterations as u64,
                    r.parallel_iterations as u64,
                    r.perms_attempted as u64,
                )
            }
            Worker::Psc(d) => {
                let r = d.decode(llrs)?;
                (r.u_hat, 0, 0, r.perms_attempted as u64)
            }
        })
    }
}

/// Runs one Eb/N0 point. `point` selects the random stream family.
pub fn run_point(config: &SimConfig, point: u64, ebno_db: f64) -> Result<FerRecord> {
    config.validate()?;
    let plan = match &config.decoder {
        DecoderSpec::Pbp(p) | DecoderSpec::Psc(p) => Some(EnsemblePlan::new(&config.code, p)?),
        _ => None,
    };
    let code = &config.code;
    let payload = payload_len(code, config.crc)?;
    let mut channel = AwgnChannel::from_ebno(ebno_db, code.rate())?;
    if config.noiseless {
        channel = channel.noiseless();
    }
    let make_worker = || -> Result<Worker<'_>> {
        Ok(match &config.decoder {
            DecoderSpec::Bp => Worker::Bp(BpDecoder::new(code.len(), config.bp)?),
            DecoderSpec::Sc => Worker::Sc(ScDecoder::new(code.len())),
            DecoderSpec::Pbp(_) => Worker::Pbp(PbpDecoder::new(plan.as_ref().unwrap(), config.bp)?),
            DecoderSpec::Psc(_) => Worker::Psc(PscDecoder::new(plan.as_ref().unwrap(), config.crc)),
        })
    };

    let mut frames = 0u64;
    let mut frame_errors = 0u64;
    let mut bit_errors = 0u64;
    let mut iters_seq = 0u64;
    let mut iters_par = 0u64;
    let mut perms = 0u64;
    'outer: while frames < config.max_frames {
        let end = (frames + BATCH).min(config.max_frames);
        let outcomes: Vec<FrameOutcome> = (frames..end)
            .into_par_iter()
            .map_init(
                || make_worker().expect("validated config"),
                |worker, t| -> Result<FrameOutcome> {
                    let (word, llrs) = generate_frame(code, config.crc, &channel, config.seed, point, t)?;
                    let (u_hat, seq, par, attempted) = worker.decode(code, &llrs)?;
                    let decoded = code.extract_message(&u_hat)?;
                    let errs = decoded[..payload]
                        .iter()
                        .zip(&word[..payload])
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                    Ok(FrameOutcome {
                        frame_error: errs > 0,
                        bit_errors: errs,
                        iters_sequential: seq,
                        iters_parallel: par,
                        perms: attempted,
                    })
                },
            )
            .collect::<Result<_>>()?;
        for o in outcomes {
            frames += 1;
            frame_errors += u64::from(o.frame_error);
            bit_errors += o.bit_errors;
            iters_seq += o.iters_sequential;
            iters_par += o.iters_parallel;
            perms += o.perms;
            if frame_errors >= config.min_frame_errors {
                break 'outer;
            }
        }
    }

    let f = frames as f64;
    let avg_seq = iters_seq as f64 / f;
    let avg_par = iters_par as f64 / f;
    let avg_iterations = match config.latency_model {
        LatencyModel::Sequential => avg_seq,
        LatencyModel::Parallel => avg_par,
    };
    Ok(FerRecord {
        ebno_db,
        frames,
        frame_errors,
        bit_errors,
        fer: frame_errors as f64 / f,
        ber: bit_errors as f64 / (f * payload as f64),
        avg_iterations,
        avg_iterations_sequential: avg_seq,
        avg_iterations_parallel: avg_par,
        avg_latency_timesteps: latency_timesteps(code.log_len(), avg_iterations),
        avg_perms_attempted: perms as f64 / f,
    })
}

/// One record per grid point, ascending Eb/N0.
pub fn run_sweep(config: &SimConfig) -> Result<Vec<FerRecord>> {
    run_sweep_with(config, &mut |_| {})
}

/// [`run_sweep`] with a callback after each point.
pub fn run_sweep_with(config: &SimConfig, on_point: &mut dyn FnMut(&FerRecord)) -> Result<Vec<FerRecord>> {
    config.validate()?;
    let mut out = Vec::new();
    for (i, ebno) in config.grid().into_iter().enumerate() {
        let rec = run_point(config, i as u64, ebno)?;
        on_point(&rec);
        out.push(rec);
    }
    Ok(out)
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn csv_string(records: &[FerRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

pub fn emit_csv(records: &[FerRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, csv_string(records))?;
    Ok(())
}

/// Lowest grid point at which identity BP reaches `target_fer` or below,
/// estimated with `min_errors` errors or `max_frames` frames per point.
/// Falls back to the last grid point.
#[allow(clippy::too_many_arguments)]
pub fn find_operating_point(
    code: &PolarCode,
    crc: Option<CrcSpec>,
    bp: BpConfig,
    grid: &[f64],
    target_fer: f64,
    min_errors: u64,
    max_frames: u64,
    seed: u64,
) -> Result<f64> {
    let last = *grid.last().ok_or_else(|| invalid("empty Eb/N0 grid"))?;
    let mut cfg = SimConfig::new(code.clone(), crc, DecoderSpec::Bp, bp);
    cfg.min_frame_errors = min_errors;
    cfg.max_frames = max_frames;
    cfg.seed = seed;
    for (i, &ebno) in grid.iter().enumerate() {
        let rec = run_point(&cfg, i as u64, ebno)?;
        if rec.fer <= target_fer {
            return Ok(ebno);
        }
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::Termination;
    use crate::permutations::cyclic_shift_set;
    use approx::assert_abs_diff_eq;

    fn config(decoder: DecoderSpec) -> SimConfig {
        let code = PolarCode::construct(64, 32, 2.0).unwrap();
        let spec = CrcSpec::CRC8_LTE;
        let bp = BpConfig {
            max_iterations: 50,
            termination: Termination::Crc(spec),
            ..BpConfig::default()
        };
        let mut c = SimConfig::new(code, Some(spec), decoder, bp);
        c.min_frame_errors = 10;
        c.max_frames = 3000;
        c.seed = 12;
        c
    }

    #[test]
    fn grid_points() {
        let mut c = config(DecoderSpec::Bp);
        c.ebno_start = 1.0;
        c.ebno_stop = 2.0;
        c.ebno_step = 0.1;
        let g = c.grid();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 1.3);
        assert_eq!(g[10], 2.0);
        c.ebno_stop = 1.0;
        assert_eq!(c.grid(), vec![1.0]);
    }

    #[test]
    fn validation() {
        let mut c = config(DecoderSpec::Bp);
        c.ebno_start = 3.0;
        c.ebno_stop = 2.0;
        assert!(c.validate().is_err());
        let mut c = config(DecoderSpec::Bp);
        c.ebno_step = 0.0;
        assert!(c.validate().is_err());
        let mut c = config(DecoderSpec::Bp);
        c.min_frame_errors = 0;
        assert!(c.validate().is_err());
        let mut perms = cyclic_shift_set(6);
        perms.swap(0, 1);
        assert!(config(DecoderSpec::Pbp(perms)).validate().is_err());
    }

    #[test]
    fn noiseless_runs_to_frame_cap() {
        for d in [
            DecoderSpec::Bp,
            DecoderSpec::Sc,
            DecoderSpec::Pbp(cyclic_shift_set(6)),
            DecoderSpec::Psc(cyclic_shift_set(6)),
        ] {
            let mut c = config(d);
            c.noiseless = true;
            c.max_frames = 300;
            let r = run_point(&c, 0, 1.0).unwrap();
            assert_eq!(r.frames, 300);
            assert_eq!(r.fer, 0.0);
            assert_eq!(r.bit_errors, 0);
        }
    }

    #[test]
    fn stops_at_min_frame_errors() {
        let c = config(DecoderSpec::Bp);
        let r = run_point(&c, 0, 0.5).unwrap();
        assert_eq!(r.frame_errors, 10);
        assert!(r.frames < 3000);
        assert!(r.bit_errors <= r.frames * 24);
        assert!((0.0..=1.0).contains(&r.fer));
        assert_eq!(r.avg_latency_timesteps, 2.0 * 6.0 * r.avg_iterations);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = config(DecoderSpec::Pbp(cyclic_shift_set(6)));
        let a = with_threads(1, || run_point(&c, 0, 1.0)).unwrap().unwrap();
        let b = with_threads(3, || run_point(&c, 0, 1.0)).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn latency_arithmetic() {
        assert_eq!(latency_timesteps(10, 50.0), 1000.0);
    }

    #[test]
    fn sequential_vs_parallel_accounting() {
        let mut c = config(DecoderSpec::Pbp(cyclic_shift_set(6)));
        c.latency_model = LatencyModel::Sequential;
        let s = run_point(&c, 0, 1.0).unwrap();
        c.latency_model = LatencyModel::Parallel;
        let p = run_point(&c, 0, 1.0).unwrap();
        assert_eq!(s.avg_iterations, s.avg_iterations_sequential);
        assert_eq!(p.avg_iterations, p.avg_iterations_parallel);
        assert_eq!(s.avg_iterations_parallel, p.avg_iterations_parallel);
        assert!(s.avg_iterations_sequential >= s.avg_iterations_parallel);
    }

    #[test]
    fn csv_layout() {
        let c = config(DecoderSpec::Bp);
        let recs = run_sweep(&SimConfig {
            ebno_start: 1.0,
            ebno_stop: 2.0,
            ebno_step: 0.5,
            ..c
        })
        .unwrap();
        let text = csv_string(&recs);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[2].starts_with("1.5,"));
        for l in &lines[1..] {
            assert_eq!(l.split(',').count(), 9);
        }
    }

    #[test]
    fn clopper_pearson_reference_values() {
        // Reference values from the beta quantile definition:
        // k = 0 → upper = 1 - (α/2)^(1/n); k = n → lower = (α/2)^(1/n).
        let (lo, hi) = clopper_pearson(0, 100, 0.90);
        assert_eq!(lo, 0.0);
        assert_abs_diff_eq!(hi, 1.0 - 0.05f64.powf(0.01), epsilon = 1e-9);
        let (lo, hi) = clopper_pearson(100, 100, 0.90);
        assert_abs_diff_eq!(lo, 0.05f64.powf(0.01), epsilon = 1e-9);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(100, 10_000, 0.90);
        assert!(lo < 0.01 && 0.01 < hi);
        assert!(lo > 0.0083 && hi < 0.0119);
    }
}
