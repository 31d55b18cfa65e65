use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polar_perm::channel::{frame_rng, random_bits};
use polar_perm::ensemble::default_termination;
use polar_perm::sim::{csv_string, find_operating_point, run_sweep_with, with_threads};
use polar_perm::{
    cyclic_shift_set, random_perm_set, search_permutations, AwgnChannel, BpConfig, BpDecoder,
    CheckRule, CrcSpec, DecoderSpec, EnsemblePlan, LatencyModel, LayerPermutation, PbpDecoder,
    PolarCode, PscDecoder, RankedPermSet, ScDecoder, SearchConfig, SimConfig, Termination,
};

#[derive(Parser)]
#[command(name = "polar-perm", version, about = "Polar code decoding on permuted factor graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo FER/BER sweep, CSV output.
    Simulate(SimulateArgs),
    /// Select the best layer permutations on identity-BP failure frames.
    SearchPerms(SearchArgs),
    /// Encode one message; writes codeword bits, or channel LLRs with --ebno.
    Encode(EncodeArgs),
    /// Decode one LLR frame (one value per line); writes the payload bits.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "K")]
    k: usize,
    /// Frozen indices file; overrides the Bhattacharyya construction.
    #[arg(long)]
    frozen_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    design_ebno: f64,
    #[arg(long, value_enum, default_value_t = CrcArg::None)]
    crc: CrcArg,
    /// Custom CRC generator polynomial in hex, leading term included.
    #[arg(long, conflicts_with = "crc")]
    crc_poly: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CrcArg {
    None,
    #[value(name = "crc24-5g")]
    Crc24,
    Crc8,
}

#[derive(Args)]
struct BpArgs {
    #[arg(long, default_value_t = 200)]
    imax: usize,
    /// Defaults to crc when a CRC is configured, gmatrix otherwise.
    #[arg(long, value_enum)]
    term: Option<TermArg>,
    #[arg(long, value_enum, default_value_t = RuleArg::Exact)]
    bp_rule: RuleArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TermArg {
    Gmatrix,
    Crc,
    CrcGmatrix,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Exact,
    Minsum,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DecoderArg {
    Bp,
    Sc,
    PbpB,
    PbpR,
    PbpCs,
    PscB,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long, value_enum, default_value_t = DecoderArg::Bp)]
    decoder: DecoderArg,
    /// Ranked permutation file for pbp-b and psc-b.
    #[arg(long)]
    perms_file: Option<PathBuf>,
    /// Ensemble size, identity included.
    #[arg(long = "M")]
    m: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatencyArg {
    Sequential,
    Parallel,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    bp: BpArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    ebno_start: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    ebno_stop: f64,
    #[arg(long, default_value_t = 0.5)]
    ebno_step: f64,
    #[arg(long, default_value_t = 100)]
    min_frame_errors: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads, 0 for one per CPU.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = LatencyArg::Parallel)]
    latency_model: LatencyArg,
    /// Zero channel noise.
    #[arg(long)]
    noiseless: bool,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    bp: BpArgs,
    /// Number of permuted trailing layers.
    #[arg(long = "k", default_value_t = 4)]
    layers: usize,
    #[arg(long = "M", default_value_t = 8)]
    m: usize,
    /// Scoring Eb/N0; by default the lowest grid point where identity BP
    /// reaches FER 1e-2.
    #[arg(long, allow_negative_numbers = true)]
    ebno: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    frames: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000_000)]
    max_attempts: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Payload bits as 0/1 characters; random from --seed when absent.
    #[arg(long)]
    message: Option<PathBuf>,
    /// Pass the codeword through AWGN at this Eb/N0 and write LLRs.
    #[arg(long, allow_negative_numbers = true)]
    ebno: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    bp: BpArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CodeArgs {
    fn build(&self) -> Result<(PolarCode, Option<CrcSpec>)> {
        let code = match &self.frozen_file {
            Some(p) => {
                let code = PolarCode::load_frozen_set(self.n, p)
                    .with_context(|| format!("reading frozen set {}", p.display()))?;
                if code.k() != self.k {
                    bail!("frozen file leaves {} info bits, --K is {}", code.k(), self.k);
                }
                code
            }
            None => PolarCode::construct(self.n, self.k, self.design_ebno)?,
        };
        let crc = match (&self.crc_poly, self.crc) {
            (Some(hex), _) => Some(CrcSpec::from_hex(hex)?),
            (None, CrcArg::None) => None,
            (None, CrcArg::Crc24) => Some(CrcSpec::CRC24_5G),
            (None, CrcArg::Crc8) => Some(CrcSpec::CRC8_LTE),
        };
        Ok((code, crc))
    }
}

impl BpArgs {
    fn build(&self, crc: Option<CrcSpec>) -> Result<BpConfig> {
        let termination = match self.term {
            None => default_termination(crc),
            Some(TermArg::Gmatrix) => Termination::GMatrix,
            Some(TermArg::None) => Termination::None,
            Some(TermArg::Crc) => Termination::Crc(crc.context("--term crc needs a CRC")?),
            Some(TermArg::CrcGmatrix) => {
                Termination::CrcAndGMatrix(crc.context("--term crc-gmatrix needs a CRC")?)
            }
        };
        let rule = match self.bp_rule {
            RuleArg::Exact => CheckRule::Exact,
            RuleArg::Minsum => CheckRule::scaled_min_sum(),
        };
        let cfg = BpConfig {
            max_iterations: self.imax,
            termination,
            rule,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl EnsembleArgs {
    fn build(&self, n: usize, seed: u64) -> Result<DecoderSpec> {
        let ranked = || -> Result<Vec<LayerPermutation>> {
            let path = self.perms_file.as_ref().context("this decoder needs --perms-file")?;
            let set = RankedPermSet::load(path)
                .with_context(|| format!("reading permutations {}", path.display()))?;
            let m = self.m.unwrap_or(set.m());
            if m > set.m() {
                bail!("--M {m} exceeds the {} permutations in the file", set.m());
            }
            Ok(set.truncated(m).perms)
        };
        Ok(match self.decoder {
            DecoderArg::Bp => DecoderSpec::Bp,
            DecoderArg::Sc => DecoderSpec::Sc,
            DecoderArg::PbpB => DecoderSpec::Pbp(ranked()?),
            DecoderArg::PscB => DecoderSpec::Psc(ranked()?),
            DecoderArg::PbpCs => {
                let mut perms = cyclic_shift_set(n);
                perms.truncate(self.m.unwrap_or(n));
                DecoderSpec::Pbp(perms)
            }
            DecoderArg::PbpR => {
                let m = self.m.context("pbp-r needs --M")?;
                let mut rng = frame_rng(seed, u64::MAX - 1, 0);
                DecoderSpec::Pbp(random_perm_set(n, m, &mut rng)?)
            }
        })
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_bits(path: &Path) -> Result<Vec<u8>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => bail!("unexpected character {other:?} in bit file"),
        })
        .collect()
}

fn read_llrs(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .with_context(|| format!("line {}: bad LLR {:?}", i + 1, l.trim()))
        })
        .collect()
}

fn lines<T: ToString>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string() + "\n").collect()
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (code, crc) = args.code.build()?;
    let bp = args.bp.build(crc)?;
    let decoder = args.ensemble.build(code.log_len(), args.seed)?;
    let config = SimConfig {
        ebno_start: args.ebno_start,
        ebno_stop: args.ebno_stop,
        ebno_step: args.ebno_step,
        min_frame_errors: args.min_frame_errors,
        max_frames: args.max_frames,
        seed: args.seed,
        latency_model: match args.latency_model {
            LatencyArg::Sequential => LatencyModel::Sequential,
            LatencyArg::Parallel => LatencyModel::Parallel,
        },
        noiseless: args.noiseless,
        ..SimConfig::new(code, crc, decoder, bp)
    };
    config.validate()?;
    let records = with_threads(args.threads, || {
        run_sweep_with(&config, &mut |r| {
            eprintln!(
                "Eb/N0 {} dB: {} errors / {} frames, FER {:.3e}, I_avg {:.2}",
                r.ebno_db, r.frame_errors, r.frames, r.fer, r.avg_iterations
            );
        })
    })??;
    write_output(args.out.as_deref(), &csv_string(&records))
}

fn search(args: SearchArgs) -> Result<()> {
    let (code, crc) = args.code.build()?;
    let bp = args.bp.build(crc)?;
    with_threads(args.threads, || -> Result<()> {
        let ebno = match args.ebno {
            Some(e) => e,
            None => {
                let grid: Vec<f64> = (0..=24).map(|i| i as f64 * 0.25).collect();
                let e = find_operating_point(&code, crc, bp, &grid, 1e-2, 100, 200_000, args.seed)?;
                eprintln!("scoring at {e} dB");
                e
            }
        };
        let cfg = SearchConfig {
            k: args.layers,
            m: args.m,
            ebno_db: ebno,
            frames: args.frames,
            seed: args.seed,
            bp,
            max_attempts: args.max_attempts,
        };
        let set = search_permutations(&code, crc, &cfg, &mut |found, tried| {
            eprint!("\rfailures {found}/{} after {tried} frames", args.frames);
        })?;
        eprintln!();
        set.save(&args.out)
            .with_context(|| format!("writing {}", args.out.display()))?;
        for (p, s) in set.perms.iter().zip(&set.scores) {
            eprintln!("{p}  score={s}");
        }
        Ok(())
    })?
}

fn encode(args: EncodeArgs) -> Result<()> {
    let (code, crc) = args.code.build()?;
    let payload_len = code.k() - crc.map_or(0, |c| c.degree());
    let mut rng = frame_rng(args.seed, 0, 0);
    let payload = match &args.message {
        Some(p) => read_bits(p)?,
        None => random_bits(&mut rng, payload_len),
    };
    if payload.len() != payload_len {
        bail!("message has {} bits, expected {payload_len}", payload.len());
    }
    let word = match crc {
        Some(spec) => spec.attach(&payload),
        None => payload,
    };
    let x = code.encode(&word)?;
    let text = match args.ebno {
        Some(e) => lines(&AwgnChannel::from_ebno(e, code.rate())?.transmit(&x, &mut rng)),
        None => lines(&x),
    };
    write_output(args.out.as_deref(), &text)
}

fn decode(args: DecodeArgs) -> Result<()> {
    let (code, crc) = args.code.build()?;
    let bp = args.bp.build(crc)?;
    let llrs = read_llrs(&args.input)?;
    if llrs.len() != code.len() {
        bail!("{} LLRs read, code length is {}", llrs.len(), code.len());
    }
    let u_hat = match args.ensemble.build(code.log_len(), args.seed)? {
        DecoderSpec::Bp => {
            let r = BpDecoder::new(code.len(), bp)?.decode(&llrs, &code)?;
            eprintln!("iterations {}, early stop {}", r.iterations_used, r.terminated_early);
            r.u_hat
        }
        DecoderSpec::Sc => ScDecoder::new(code.len()).decode(&llrs, &code)?.u_hat,
        DecoderSpec::Pbp(perms) => {
            let plan = EnsemblePlan::new(&code, &perms)?;
            let r = PbpDecoder::new(&plan, bp)?.decode(&llrs)?;
            eprintln!(
                "winning permutation {:?}, iterations {}",
                r.winning_perm, r.total_iterations
            );
            r.u_hat
        }
        DecoderSpec::Psc(perms) => {
            let plan = EnsemblePlan::new(&code, &perms)?;
            let r = PscDecoder::new(&plan, crc).decode(&llrs)?;
            eprintln!("winning permutation {:?}", r.winning_perm);
            r.u_hat
        }
    };
    let word = code.extract_message(&u_hat)?;
    let payload = match crc {
        Some(spec) => {
            eprintln!("crc {}", if spec.check(&word) { "pass" } else { "fail" });
            &word[..word.len() - spec.degree()]
        }
        None => &word[..],
    };
    let text: String = payload.iter().map(|b| char::from(b'0' + b)).collect();
    write_output(args.out.as_deref(), &(text + "\n"))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::SearchPerms(a) => search(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
