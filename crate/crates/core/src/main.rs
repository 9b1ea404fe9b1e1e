use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polar_staircase::frameio::{
    pack_bits, read_llr_frame, unpack_bits, write_bit_frame, CodeConfigDoc, FrameHeader,
};
use polar_staircase::{
    complexity_estimate, decode_frame_with, encode_frame, run_sweep, AwgnParams, BurstCorruption,
    ChannelKind, CheckCombine, CodeConfig, DecodeOptions, EnergyAccounting, Ratio, SimConfig,
    SimResult, StairParams, StaircaseConfig,
};

/// Polar-staircase coding toolkit: construction, framing, decoding, and
/// Monte Carlo BLER/BER simulation.
#[derive(Parser)]
#[command(name = "polar-staircase", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a reliability ordering and emit the construction document.
    Construct(ConstructArgs),
    /// Encode a payload into a staircase frame container.
    Encode(EncodeArgs),
    /// Decode an LLR frame container back to payload bits.
    Decode(DecodeArgs),
    /// Run a Monte Carlo BLER/BER sweep.
    Simulate(SimulateArgs),
    /// Evaluate the decoding operation-count table.
    Complexity(ComplexityArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Component code length (power of two).
    #[arg(long)]
    n: usize,
    /// Component code rate, e.g. 5/6 or 0.8333; K = round(N * rate).
    #[arg(long)]
    rate: Option<String>,
    /// Explicit information length; overrides --rate.
    #[arg(long)]
    k: Option<usize>,
    /// Construction design mean LLR.
    #[arg(long)]
    design_mean: Option<f64>,
    /// Construction design point as Eb/N0 in dB at the component rate.
    #[arg(long, conflicts_with = "design_mean")]
    design_ebn0: Option<f64>,
}

impl CodeArgs {
    fn dim(&self) -> Result<usize, String> {
        if let Some(k) = self.k {
            return Ok(k);
        }
        let rate = self
            .rate
            .as_deref()
            .ok_or("either --k or --rate is required")?;
        let ratio: Ratio = rate.parse().map_err(|e| format!("{e}"))?;
        Ok((self.n as f64 * ratio.to_f64()).round() as usize)
    }

    fn design_mean(&self, k: usize) -> Result<f64, String> {
        if let Some(m) = self.design_mean {
            return Ok(m);
        }
        // Default design point: 4 dB at the component rate.
        let db = self.design_ebn0.unwrap_or(4.0);
        let awgn = AwgnParams::new(db, k as f64 / self.n as f64).map_err(|e| format!("{e}"))?;
        Ok(awgn.llr_mean())
    }

    fn build(&self) -> Result<CodeConfig, String> {
        let k = self.dim()?;
        let mean = self.design_mean(k)?;
        CodeConfig::construct(self.n, k, mean).map_err(|e| format!("{e}"))
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Stair width M.
    #[arg(long)]
    m: usize,
    /// Number of payload stairs k.
    #[arg(long)]
    stairs: usize,
    /// Append one all-known terminator stair.
    #[arg(long)]
    terminate: bool,
    /// Payload file of packed bits (LSB first), exactly k*M*(K-M) bits.
    #[arg(long, conflicts_with = "random_payload")]
    payload: Option<PathBuf>,
    /// Draw the payload from the seeded generator instead.
    #[arg(long)]
    random_payload: bool,
    /// Seed recorded in the container and used for --random-payload.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output frame container.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    /// Input LLR frame container.
    #[arg(long = "in")]
    input: PathBuf,
    /// Sliding-window iterations.
    #[arg(long, default_value_t = 4)]
    iters: u32,
    /// Use the scaled min-sum check combine instead of the exact rule.
    #[arg(long)]
    min_sum: bool,
    /// Output payload file (packed bits); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Awgn,
    Ge,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatchArg {
    Genie,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum CorruptionArg {
    Obliterate,
    Flip,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AccountingArg {
    Component,
    Net,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Stair width M; omit together with --stairs for the bare component
    /// code.
    #[arg(long, requires = "stairs")]
    m: Option<usize>,
    /// Number of payload stairs k.
    #[arg(long, requires = "m")]
    stairs: Option<usize>,
    /// Append a terminator stair.
    #[arg(long)]
    terminate: bool,
    /// Decoder iterations: sliding-window outer iterations, or SCAN sweeps
    /// for the bare component code.
    #[arg(long, default_value_t = 4)]
    iters: u32,
    #[arg(long, value_enum, default_value_t = ChannelArg::Awgn)]
    channel: ChannelArg,
    /// Eb/N0 sweep list in dB (AWGN), or the fixed Eb/N0 for the burst
    /// channel.
    #[arg(long, value_delimiter = ',', required = true)]
    ebn0: Vec<f64>,
    /// Bad-state probability sweep list for the burst channel.
    #[arg(long, value_delimiter = ',')]
    pbe: Vec<f64>,
    /// Mean burst length for the burst channel.
    #[arg(long, default_value_t = 20.0)]
    delta: f64,
    /// Burst handling: genie-aided patching or none.
    #[arg(long, value_enum, default_value_t = PatchArg::Genie)]
    patch: PatchArg,
    /// What a burst does to a symbol.
    #[arg(long, value_enum, default_value_t = CorruptionArg::Obliterate)]
    corruption: CorruptionArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    min_block_errors: u64,
    #[arg(long, default_value_t = 100_000)]
    max_trials: u64,
    /// Use the scaled min-sum check combine.
    #[arg(long)]
    min_sum: bool,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Rate used to convert Eb/N0 into noise variance.
    #[arg(long, value_enum, default_value_t = AccountingArg::Component)]
    energy_accounting: AccountingArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Number of stairs k.
    #[arg(long, default_value_t = 1)]
    stairs: u64,
    /// Stair width M.
    #[arg(long)]
    m: u64,
    /// Component code length N.
    #[arg(long)]
    n: u64,
    /// Code rate R.
    #[arg(long)]
    rate: String,
    /// Mean variable-node degree of the baseline code.
    #[arg(long)]
    dv: String,
    /// Check-node degree of the baseline code.
    #[arg(long)]
    dc: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Complexity(args) => cmd_complexity(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => {
            Ok(Box::new(File::create(p).map_err(|e| {
                format!("cannot create {}: {e}", p.display())
            })?))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

fn cmd_construct(args: ConstructArgs) -> Result<(), String> {
    let cfg = args.code.build()?;
    let doc = CodeConfigDoc::from_config(&cfg);
    let mut out = open_output(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| format!("{e}"))?;
    writeln!(out).map_err(|e| format!("{e}"))?;
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<(), String> {
    let code = args.code.build()?;
    let design_llr_mean = code.design_llr_mean();
    let (n, k) = (code.n(), code.k());
    let mut cfg = StaircaseConfig::new(code, args.m, args.stairs).map_err(|e| format!("{e}"))?;
    if args.terminate {
        cfg = cfg.with_termination();
    }
    let payload = match (&args.payload, args.random_payload) {
        (Some(path), _) => {
            let mut bytes = Vec::new();
            File::open(path)
                .map_err(|e| format!("cannot open {}: {e}", path.display()))?
                .read_to_end(&mut bytes)
                .map_err(|e| format!("{e}"))?;
            unpack_bits(&bytes, cfg.payload_len()).map_err(|e| format!("{e}"))?
        }
        (None, true) => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            (0..cfg.payload_len()).map(|_| rng.gen()).collect()
        }
        (None, false) => return Err("provide --payload FILE or --random-payload".into()),
    };
    let frame = encode_frame(&payload, &cfg).map_err(|e| format!("{e}"))?;
    let header = FrameHeader {
        code_len: n as u32,
        code_dim: k as u32,
        stair_width: args.m as u32,
        payload_stairs: args.stairs as u32,
        terminated: args.terminate,
        seed: args.seed,
        design_llr_mean,
    };
    let mut out = File::create(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    write_bit_frame(&mut out, &frame, &header).map_err(|e| format!("{e}"))?;
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), String> {
    let mut input = File::open(&args.input)
        .map_err(|e| format!("cannot open {}: {e}", args.input.display()))?;
    let (header, frame) = read_llr_frame(&mut input).map_err(|e| format!("{e}"))?;
    let code = CodeConfig::construct(
        header.code_len as usize,
        header.code_dim as usize,
        header.design_llr_mean,
    )
    .map_err(|e| format!("{e}"))?;
    let mut cfg = StaircaseConfig::new(
        code,
        header.stair_width as usize,
        header.payload_stairs as usize,
    )
    .map_err(|e| format!("{e}"))?;
    if header.terminated {
        cfg = cfg.with_termination();
    }
    let opts = if args.min_sum {
        DecodeOptions::scaled_min_sum()
    } else {
        DecodeOptions::default()
    };
    let payload = decode_frame_with(&frame, &cfg, args.iters, opts).map_err(|e| format!("{e}"))?;
    let mut out = open_output(&args.out)?;
    out.write_all(&pack_bits(&payload))
        .map_err(|e| format!("{e}"))?;
    Ok(())
}

fn write_csv(out: &mut dyn Write, results: &[SimResult]) -> io::Result<()> {
    writeln!(
        out,
        "point,trials,block_errors,bit_errors,bler,ber,ci_lo,ci_hi,seed,wall_seconds"
    )?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.3}",
            r.point,
            r.trials,
            r.block_errors,
            r.bit_errors,
            r.bler,
            r.ber,
            r.ci_lo,
            r.ci_hi,
            r.seed,
            r.wall_seconds
        )?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), String> {
    if let Some(t) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| format!("{e}"))?;
    }
    let k = args.code.dim()?;
    let design = match (args.code.design_mean, args.code.design_ebn0) {
        // No explicit design point: construct at each operating point.
        (None, None) => None,
        _ => Some(args.code.design_mean(k)?),
    };
    let (channel, sweep) = match args.channel {
        ChannelArg::Awgn => {
            if !args.pbe.is_empty() {
                return Err("--pbe applies to the burst channel only".into());
            }
            (ChannelKind::Awgn, args.ebn0.clone())
        }
        ChannelArg::Ge => {
            if args.ebn0.len() != 1 {
                return Err("the burst channel takes one fixed --ebn0".into());
            }
            if args.pbe.is_empty() {
                return Err("the burst channel sweeps --pbe".into());
            }
            (
                ChannelKind::GilbertElliott {
                    eb_n0_db: args.ebn0[0],
                    delta: args.delta,
                    corruption: match args.corruption {
                        CorruptionArg::Obliterate => BurstCorruption::Obliterate,
                        CorruptionArg::Flip => BurstCorruption::RandomFlip,
                    },
                    genie_patching: matches!(args.patch, PatchArg::Genie),
                },
                args.pbe.clone(),
            )
        }
    };
    let cfg = SimConfig {
        code_len: args.code.n,
        code_dim: k,
        staircase: args.m.map(|m| StairParams {
            stair_width: m,
            stair_count: args.stairs.expect("clap enforces the pair"),
            terminated: args.terminate,
        }),
        iters: args.iters,
        channel,
        sweep,
        min_block_errors: args.min_block_errors,
        max_trials: args.max_trials,
        seed: args.seed,
        combine: if args.min_sum {
            CheckCombine::scaled_min_sum()
        } else {
            CheckCombine::Exact
        },
        energy_accounting: match args.energy_accounting {
            AccountingArg::Component => EnergyAccounting::ComponentRate,
            AccountingArg::Net => EnergyAccounting::NetRate,
        },
        design_llr_mean: design,
    };
    let results = run_sweep(&cfg).map_err(|e| format!("{e}"))?;
    let mut out = open_output(&args.out)?;
    match args.format {
        FormatArg::Csv => write_csv(&mut out, &results).map_err(|e| format!("{e}"))?,
        FormatArg::Json => {
            serde_json::to_writer_pretty(&mut out, &results).map_err(|e| format!("{e}"))?;
            writeln!(out).map_err(|e| format!("{e}"))?;
        }
    }
    Ok(())
}

fn cmd_complexity(args: ComplexityArgs) -> Result<(), String> {
    let rate: Ratio = args.rate.parse().map_err(|e| format!("{e}"))?;
    let dv: Ratio = args.dv.parse().map_err(|e| format!("{e}"))?;
    let dc: Ratio = args.dc.parse().map_err(|e| format!("{e}"))?;
    let table = complexity_estimate(args.stairs, args.m, args.n, rate, dv, dc)
        .map_err(|e| format!("{e}"))?;
    let mut out = open_output(&args.out)?;
    match args.format {
        FormatArg::Csv => {
            writeln!(out, "scheme,sign,mult,div,add,total").map_err(|e| format!("{e}"))?;
            if let Some(p) = table.polar {
                writeln!(
                    out,
                    "polar-staircase,{},{},{},{},{}",
                    p.sign, p.mult, p.div, p.add, p.total
                )
                .map_err(|e| format!("{e}"))?;
            }
            let l = table.ldpc;
            writeln!(
                out,
                "ldpc-staircase,{},{},{},{},{}",
                l.sign, l.mult, l.div, l.add, l.total
            )
            .map_err(|e| format!("{e}"))?;
        }
        FormatArg::Json => {
            let to_json = |c: &polar_staircase::OpCounts| {
                serde_json::json!({
                    "sign": c.sign.to_string(),
                    "mult": c.mult.to_string(),
                    "div": c.div.to_string(),
                    "add": c.add.to_string(),
                    "total": c.total.to_string(),
                })
            };
            let doc = serde_json::json!({
                "polar_staircase": table.polar.as_ref().map(to_json),
                "ldpc_staircase": to_json(&table.ldpc),
            });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| format!("{e}"))?;
            writeln!(out).map_err(|e| format!("{e}"))?;
        }
    }
    Ok(())
}
