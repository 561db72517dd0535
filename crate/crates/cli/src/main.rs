//! Command-line interface for the decoding toolkit: code generation,
//! single-frame decode traces, and Monte-Carlo FER experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 configuration validation error,
//! 3 runtime error.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use osdkit::channel::{bpsk_modulate, snr_to_sigma, transmit, SnrConvention};
use osdkit::codes::{ebch_generator, load_generator, primitive_poly_string, save_generator, CodeSpec};
use osdkit::config::parse_config;
use osdkit::gf2::BinaryVector;
use osdkit::osd::osd_decode;
use osdkit::sdd::{sdd_decode_traced, PruneMode, SddParams};
use osdkit::sim::{
    compare_decoders, compare_to_csv, csv_row, run_point, SimError, CSV_HEADER,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "osdkit",
    about = "Soft-decision decoding toolkit: OSD and segmentation-discarding decoding",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a generator matrix and write it as a text file.
    Codegen(CodegenArgs),
    /// Decode one random noisy frame and print the decoding trace.
    Decode(DecodeArgs),
    /// Run the experiment described by a config file and write CSV.
    Simulate(SimulateArgs),
    /// Like simulate, with an optional SNR grid override.
    Sweep(SweepArgs),
    /// Run two experiments on identical noise and write a paired CSV.
    Compare(CompareArgs),
}

#[derive(Args)]
struct CodegenArgs {
    /// Code family (only "ebch" is constructible).
    #[arg(long, default_value = "ebch")]
    family: String,
    /// Codeword length (a power of two for ebch).
    #[arg(long)]
    n: usize,
    /// Code dimension.
    #[arg(long)]
    k: usize,
    /// Output file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    /// Generator matrix file.
    #[arg(long)]
    gen: PathBuf,
    /// Decoder: "osd" or "sdd".
    #[arg(long, default_value = "sdd")]
    decoder: String,
    /// Reprocessing order m.
    #[arg(long)]
    order: usize,
    /// Segment count (sdd).
    #[arg(long = "Q", default_value_t = 16)]
    q: usize,
    /// Boundary scale (sdd).
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
    /// Discard aggressiveness (sdd).
    #[arg(long, default_value_t = 5.0)]
    tau: f64,
    /// Pruning rules: full, no_discard, no_stop, none.
    #[arg(long, default_value = "full")]
    prune: String,
    /// SNR of the generated frame, in dB.
    #[arg(long, allow_negative_numbers = true)]
    snr: f64,
    /// SNR convention: ebn0, esn0 or snr.
    #[arg(long, default_value = "ebn0")]
    convention: String,
    /// RNG seed for the frame.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output CSV path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment config file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output CSV path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Override the config's SNR grid: start of the grid in dB.
    #[arg(long, requires = "snr_to", requires = "snr_step", allow_negative_numbers = true)]
    snr_from: Option<f64>,
    /// End of the SNR grid (inclusive), in dB.
    #[arg(long, allow_negative_numbers = true)]
    snr_to: Option<f64>,
    /// SNR grid step, in dB.
    #[arg(long)]
    snr_step: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Config for decoder A (the reference).
    #[arg(long)]
    config_a: PathBuf,
    /// Config for decoder B; must share code, SNR points and seed with A.
    #[arg(long)]
    config_b: PathBuf,
    /// Output CSV path (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match &e {
            SimError::Config(_) | SimError::ConfigLine { .. } => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Codegen(args) => run_codegen(args),
        Command::Decode(args) => run_decode(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Compare(args) => run_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run_codegen(args: CodegenArgs) -> Result<(), CliError> {
    if args.family != "ebch" {
        return Err(CliError::Config(format!(
            "unknown family '{}' (only ebch can be constructed)",
            args.family
        )));
    }
    let spec = CodeSpec::ebch(args.n, args.k);
    let g = ebch_generator(&spec).map_err(|e| CliError::Config(e.to_string()))?;
    let m_ext = args.n.trailing_zeros() as usize;
    let poly = primitive_poly_string(m_ext).unwrap_or_else(|| "?".into());
    let comments = vec![
        format!("family=ebch n={} k={}", args.n, args.k),
        format!(
            "parent BCH length {} over GF(2^{m_ext}), primitive polynomial {poly}",
            args.n - 1
        ),
        "rows: cyclic shifts of the generator polynomial, extended by an even-parity bit"
            .to_string(),
    ];
    save_generator(&args.output, &g, &comments).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!(
        "wrote ({},{}) generator to {}",
        args.n,
        args.k,
        args.output.display()
    );
    Ok(())
}

fn run_decode(args: DecodeArgs) -> Result<(), CliError> {
    let g = load_generator(&args.gen).map_err(|e| CliError::Runtime(e.to_string()))?;
    let (n, k) = (g.cols(), g.rows());
    let convention: SnrConvention = args.convention.parse().map_err(CliError::Config)?;
    let sigma = snr_to_sigma(args.snr, k as f64 / n as f64, convention);
    println!(
        "code ({n},{k}) from {}; snr {} dB ({}), sigma {:.4}; rng chacha8 seed {}",
        args.gen.display(),
        args.snr,
        convention.as_str(),
        sigma,
        args.seed
    );
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut msg = BinaryVector::zeros(k);
    for i in 0..k {
        msg.set(i, rng.gen());
    }
    let c = g.encode(&msg).expect("message matches generator");
    let r = transmit(&bpsk_modulate(&c), sigma, &mut rng);
    println!("transmitted: {c}");
    match args.decoder.as_str() {
        "osd" => {
            let out =
                osd_decode(&r, &g, args.order).map_err(|e| CliError::Runtime(e.to_string()))?;
            print_outcome(&out, &c);
        }
        "sdd" => {
            let prune: PruneMode = args.prune.parse().map_err(CliError::Config)?;
            let params =
                SddParams::new(args.order, args.q, args.lambda, args.tau).with_prune(prune);
            let (out, trace) = sdd_decode_traced(&r, &g, &params)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("phase 0: D_min = {:.6}", trace.d_phase0);
            for l in 1..=args.order {
                let betas = trace.boundaries(l);
                if betas.is_empty() {
                    continue;
                }
                println!("phase {l}: beta = {betas:?}");
                for s in trace.segments.iter().filter(|s| s.l == l) {
                    let bound = s
                        .d_lower
                        .map(|b| format!("{b:.6}"))
                        .unwrap_or_else(|| "-".into());
                    println!(
                        "  segment {:>2}: beta {:>3}, L {:.6}, D_lower {}, checked {:>5}{}",
                        s.i,
                        s.beta,
                        s.first_tep_l,
                        bound,
                        s.checked,
                        if s.discarded {
                            ", discarded rest of phase"
                        } else {
                            ""
                        }
                    );
                }
                for (_, d) in trace.improvements.iter().filter(|(pl, _)| *pl == l) {
                    println!("  improved: D_min = {d:.6}");
                }
            }
            print_outcome(&out, &c);
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown decoder '{other}' (expected osd or sdd)"
            )))
        }
    }
    Ok(())
}

fn print_outcome(out: &osdkit::DecodeOutcome, transmitted: &BinaryVector) {
    println!("decoded:     {}", out.codeword);
    println!(
        "D_min {:.6}, N_a {}, termination {}, flops {}, bops {}, discarded segments {}",
        out.d_min,
        out.n_a,
        out.termination.as_str(),
        out.counters.flops,
        out.counters.bops,
        out.counters.discarded_segments
    );
    println!(
        "frame {}",
        if &out.codeword == transmitted {
            "correct"
        } else {
            "IN ERROR"
        }
    );
}

fn read_config(path: &PathBuf) -> Result<osdkit::ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

fn write_or_print(output: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Runs every SNR point ascending, writing and flushing each CSV row as it
/// completes so an interrupted run keeps its finished points.
fn run_experiment(config: &osdkit::ExperimentConfig, output: Option<&PathBuf>) -> Result<(), CliError> {
    use std::io::Write;
    config.validate().map_err(CliError::from)?;
    let (spec, _) = config.code.build().map_err(CliError::from)?;
    let mut sink: Box<dyn Write> = match output {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let fail = |e: std::io::Error| CliError::Runtime(format!("write: {e}"));
    writeln!(sink, "{CSV_HEADER}").map_err(fail)?;
    sink.flush().map_err(fail)?;
    let mut points: Vec<(usize, f64)> = config.snr_points.iter().copied().enumerate().collect();
    points.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite SNR points"));
    let label = config.code.label();
    for (point_index, snr_db) in points {
        let p = run_point(config, snr_db, point_index)?;
        eprintln!(
            "snr {:+.2}: {} frames, fer {:.3e}, mean N_a {:.1}, {:.1}s (rng chacha8 seed {})",
            snr_db, p.frames, p.fer, p.mean_na, p.elapsed_secs, config.seed
        );
        writeln!(sink, "{}", csv_row(config, &label, spec.n, spec.k, &p)).map_err(fail)?;
        sink.flush().map_err(fail)?;
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = read_config(&args.config)?;
    run_experiment(&config, args.output.as_ref())
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut config = read_config(&args.config)?;
    if let (Some(from), Some(to), Some(step)) = (args.snr_from, args.snr_to, args.snr_step) {
        if step <= 0.0 || to < from {
            return Err(CliError::Config(
                "SNR grid requires snr_to >= snr_from and snr_step > 0".into(),
            ));
        }
        let mut points = Vec::new();
        let mut snr = from;
        while snr <= to + 1e-9 {
            points.push(snr);
            snr += step;
        }
        config.snr_points = points;
    }
    run_experiment(&config, args.output.as_ref())
}

fn run_compare(args: CompareArgs) -> Result<(), CliError> {
    let config_a = read_config(&args.config_a)?;
    let config_b = read_config(&args.config_b)?;
    let rows = compare_decoders(&config_a, &config_b)?;
    write_or_print(args.output.as_ref(), &compare_to_csv(&rows, config_a.seed))
}
