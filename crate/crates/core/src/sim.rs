//! Seeded Monte-Carlo frame-error-rate experiments: per-SNR points, sweeps,
//! and paired decoder comparisons with common random numbers.
//!
//! Every frame draws its randomness from an independent ChaCha8 stream
//! derived from `(seed, point index, frame index)`, so results are
//! bit-reproducible for a fixed configuration regardless of worker count,
//! and two runs over the same seed consume identical noise.

use crate::channel::{bpsk_modulate, snr_to_sigma, transmit, SnrConvention};
use crate::codes::{ebch_generator, load_generator, CodeError, CodeFamily, CodeSpec};
use crate::gf2::{BinaryMatrix, BinaryVector};
use crate::osd::{osd_decode, DecodeOutcome, OsdError, Termination};
use crate::sdd::{sdd_decode, SddError, SddParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

/// Errors from experiment configuration or execution.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("config: {0}")]
    Config(String),
    #[error("config line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Osd(#[from] OsdError),
    #[error(transparent)]
    Sdd(#[from] SddError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Where the generator matrix comes from.
#[derive(Debug, Clone)]
pub enum CodeSource {
    Ebch { n: usize, k: usize },
    File(PathBuf),
}

impl CodeSource {
    /// Builds or loads the generator matrix and its spec.
    pub fn build(&self) -> Result<(CodeSpec, BinaryMatrix), SimError> {
        match self {
            CodeSource::Ebch { n, k } => {
                let spec = CodeSpec::ebch(*n, *k);
                let g = ebch_generator(&spec)?;
                Ok((spec, g))
            }
            CodeSource::File(path) => {
                let g = load_generator(path)?;
                let spec = CodeSpec {
                    n: g.cols(),
                    k: g.rows(),
                    d: None,
                    family: CodeFamily::File(path.display().to_string()),
                };
                Ok((spec, g))
            }
        }
    }

    /// Short name for the CSV `code` column.
    pub fn label(&self) -> String {
        match self {
            CodeSource::Ebch { .. } => "ebch".to_string(),
            CodeSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().replace(',', "_"))
                .unwrap_or_else(|| "file".to_string()),
        }
    }
}

/// Which decoder an experiment runs.
#[derive(Debug, Clone)]
pub enum DecoderSpec {
    Osd { order: usize },
    Sdd(SddParams),
}

impl DecoderSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderSpec::Osd { .. } => "osd",
            DecoderSpec::Sdd(_) => "sdd",
        }
    }

    pub fn order(&self) -> usize {
        match self {
            DecoderSpec::Osd { order } => *order,
            DecoderSpec::Sdd(p) => p.order,
        }
    }

    fn decode(&self, r: &[f64], g: &BinaryMatrix) -> Result<DecodeOutcome, SimError> {
        match self {
            DecoderSpec::Osd { order } => Ok(osd_decode(r, g, *order)?),
            DecoderSpec::Sdd(params) => Ok(sdd_decode(r, g, params)?),
        }
    }
}

/// When to stop accumulating frames at one SNR point: after `max_frames`,
/// or once both `min_frames` and `min_frame_errors` are met.
#[derive(Debug, Clone, Copy)]
pub struct StopRule {
    pub min_frames: u64,
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frames: 0,
            min_frame_errors: 100,
            max_frames: 1_000_000,
        }
    }
}

impl StopRule {
    /// Fixed frame count, no error target.
    pub fn fixed_frames(frames: u64) -> Self {
        Self {
            min_frames: frames,
            min_frame_errors: 0,
            max_frames: frames,
        }
    }

    fn satisfied(&self, frames: u64, errors: u64) -> bool {
        frames >= self.max_frames || (frames >= self.min_frames && errors >= self.min_frame_errors)
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.max_frames == 0 {
            return Err(SimError::Config("max_frames must be positive".into()));
        }
        if self.min_frames == 0 && self.min_frame_errors == 0 {
            return Err(SimError::Config(
                "at least one of min_frames / min_frame_errors must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub code: CodeSource,
    pub decoder: DecoderSpec,
    pub snr_points: Vec<f64>,
    pub snr_convention: SnrConvention,
    pub stop: StopRule,
    pub seed: u64,
    /// Worker threads; results are identical for any value.
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.snr_points.is_empty() {
            return Err(SimError::Config("at least one SNR point required".into()));
        }
        self.stop.validate()?;
        if let DecoderSpec::Sdd(p) = &self.decoder {
            p.validate()?;
        }
        if self.workers == 0 {
            return Err(SimError::Config("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Aggregates for one SNR point.
#[derive(Debug, Clone)]
pub struct PointStats {
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub mean_na: f64,
    pub na_stddev: f64,
    pub mean_flops: f64,
    pub mean_bops: f64,
    /// Fraction of decodes ended by the stopping rule.
    pub stopped_rate: f64,
    /// Fraction of decodes that discarded at least one segment.
    pub discarded_rate: f64,
    /// Order-dependent digest of the consumed noise, for pairing checks.
    pub noise_checksum: u64,
    pub elapsed_secs: f64,
}

/// Per-SNR table for a whole experiment.
#[derive(Debug, Clone)]
pub struct SimulationStats {
    pub code_label: String,
    pub n: usize,
    pub k: usize,
    pub points: Vec<PointStats>,
    pub seed: u64,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameResult {
    error: bool,
    n_a: u64,
    flops: u64,
    bops: u64,
    stopped: bool,
    discarded: bool,
    noise_hash: u64,
}

/// Independent RNG stream for one (point, frame) pair.
fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 44) ^ frame);
    rng
}

fn fold_hash(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x100000001b3).rotate_left(17)
}

fn simulate_frame(
    g: &BinaryMatrix,
    decoder: &DecoderSpec,
    sigma: f64,
    seed: u64,
    point: usize,
    frame: u64,
) -> Result<FrameResult, SimError> {
    let k = g.rows();
    let mut rng = frame_rng(seed, point, frame);
    let mut msg = BinaryVector::zeros(k);
    for i in 0..k {
        msg.set(i, rng.gen());
    }
    let c = g.encode(&msg).expect("message length matches generator");
    let s = bpsk_modulate(&c);
    let r = transmit(&s, sigma, &mut rng);
    let mut noise_hash = 0u64;
    for (ri, si) in r.iter().zip(&s) {
        noise_hash = fold_hash(noise_hash, (ri - si).to_bits());
    }
    let out = decoder.decode(&r, g)?;
    Ok(FrameResult {
        error: out.codeword != c,
        n_a: out.n_a,
        flops: out.counters.flops,
        bops: out.counters.bops,
        stopped: out.termination == Termination::Stopped,
        discarded: out.counters.discarded_segments > 0,
        noise_hash,
    })
}

/// Frames processed per stop-rule check; batches are reduced in frame order
/// so the aggregate is scheduling-independent.
const BATCH: u64 = 1024;

struct Accumulator {
    frames: u64,
    errors: u64,
    na_sum: f64,
    na_sumsq: f64,
    flops_sum: f64,
    bops_sum: f64,
    stopped: u64,
    discarded: u64,
    checksum: u64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            frames: 0,
            errors: 0,
            na_sum: 0.0,
            na_sumsq: 0.0,
            flops_sum: 0.0,
            bops_sum: 0.0,
            stopped: 0,
            discarded: 0,
            checksum: 0,
        }
    }

    fn push(&mut self, f: &FrameResult) {
        self.frames += 1;
        self.errors += f.error as u64;
        let na = f.n_a as f64;
        self.na_sum += na;
        self.na_sumsq += na * na;
        self.flops_sum += f.flops as f64;
        self.bops_sum += f.bops as f64;
        self.stopped += f.stopped as u64;
        self.discarded += f.discarded as u64;
        self.checksum = fold_hash(self.checksum, f.noise_hash);
    }

    fn finish(self, snr_db: f64, elapsed_secs: f64) -> PointStats {
        let n = self.frames.max(1) as f64;
        let mean_na = self.na_sum / n;
        let var = (self.na_sumsq / n - mean_na * mean_na).max(0.0);
        PointStats {
            snr_db,
            frames: self.frames,
            frame_errors: self.errors,
            fer: self.errors as f64 / n,
            mean_na,
            na_stddev: var.sqrt(),
            mean_flops: self.flops_sum / n,
            mean_bops: self.bops_sum / n,
            stopped_rate: self.stopped as f64 / n,
            discarded_rate: self.discarded as f64 / n,
            noise_checksum: self.checksum,
            elapsed_secs,
        }
    }
}

fn run_batches<F>(
    stop: &StopRule,
    paired: bool,
    mut batch_fn: F,
) -> Result<(Accumulator, Accumulator), SimError>
where
    F: FnMut(u64, u64) -> Result<Vec<(FrameResult, Option<FrameResult>)>, SimError>,
{
    // The second accumulator is used by paired runs; single runs ignore it.
    let mut acc_a = Accumulator::new();
    let mut acc_b = Accumulator::new();
    let mut next_frame = 0u64;
    loop {
        // Paired runs keep going until both sides meet the error target.
        let errors = if paired {
            acc_a.errors.min(acc_b.errors)
        } else {
            acc_a.errors
        };
        if stop.satisfied(acc_a.frames, errors) {
            break;
        }
        let count = BATCH.min(stop.max_frames - next_frame);
        if count == 0 {
            break;
        }
        let results = batch_fn(next_frame, count)?;
        for (a, b) in &results {
            acc_a.push(a);
            if let Some(b) = b {
                acc_b.push(b);
            }
        }
        next_frame += count;
    }
    Ok((acc_a, acc_b))
}

/// Runs one SNR point of the experiment.
pub fn run_point(config: &ExperimentConfig, snr_db: f64, point: usize) -> Result<PointStats, SimError> {
    config.validate()?;
    let (spec, g) = config.code.build()?;
    run_point_with(config, &spec, &g, snr_db, point)
}

fn run_point_with(
    config: &ExperimentConfig,
    spec: &CodeSpec,
    g: &BinaryMatrix,
    snr_db: f64,
    point: usize,
) -> Result<PointStats, SimError> {
    let sigma = snr_to_sigma(snr_db, spec.rate(), config.snr_convention);
    let start = Instant::now();
    let decoder = &config.decoder;
    let seed = config.seed;
    let pool = make_pool(config.workers)?;
    let (acc, _) = run_batches(&config.stop, false, |first, count| {
        pool.install(|| {
            (first..first + count)
                .into_par_iter()
                .map(|f| {
                    simulate_frame(g, decoder, sigma, seed, point, f).map(|r| (r, None))
                })
                .collect::<Result<Vec<_>, _>>()
        })
    })?;
    Ok(acc.finish(snr_db, start.elapsed().as_secs_f64()))
}

fn make_pool(workers: usize) -> Result<rayon::ThreadPool, SimError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Config(format!("thread pool: {e}")))
}

/// Runs every configured SNR point, ascending, and returns the table.
pub fn sweep(config: &ExperimentConfig) -> Result<SimulationStats, SimError> {
    config.validate()?;
    let (spec, g) = config.code.build()?;
    let start = Instant::now();
    let mut points: Vec<(usize, f64)> = config.snr_points.iter().copied().enumerate().collect();
    points.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite SNR points"));
    let mut rows = Vec::with_capacity(points.len());
    for (point_index, snr_db) in points {
        rows.push(run_point_with(config, &spec, &g, snr_db, point_index)?);
    }
    Ok(SimulationStats {
        code_label: config.code.label(),
        n: spec.n,
        k: spec.k,
        points: rows,
        seed: config.seed,
        wall_secs: start.elapsed().as_secs_f64(),
    })
}

/// One side-by-side row of a paired comparison.
#[derive(Debug, Clone)]
pub struct PairedStats {
    pub snr_db: f64,
    pub frames: u64,
    pub a: PointStats,
    pub b: PointStats,
}

/// Runs two decoders over identical noise realizations (common random
/// numbers) and reports per-SNR statistics side by side.
///
/// Both configurations must agree on the code, SNR points, convention, and
/// seed; the stop rule of `config_a` governs, requiring the error target on
/// both sides before stopping.
pub fn compare_decoders(
    config_a: &ExperimentConfig,
    config_b: &ExperimentConfig,
) -> Result<Vec<PairedStats>, SimError> {
    config_a.validate()?;
    config_b.validate()?;
    let (spec_a, g_a) = config_a.code.build()?;
    let (_spec_b, g_b) = config_b.code.build()?;
    if g_a != g_b {
        return Err(SimError::Config(
            "compared experiments must use the same code".into(),
        ));
    }
    if config_a.snr_points != config_b.snr_points {
        return Err(SimError::Config(
            "compared experiments must use the same SNR points".into(),
        ));
    }
    if config_a.snr_convention != config_b.snr_convention {
        return Err(SimError::Config(
            "compared experiments must use the same SNR convention".into(),
        ));
    }
    if config_a.seed != config_b.seed {
        return Err(SimError::Config(
            "compared experiments must share the seed (common random numbers)".into(),
        ));
    }
    let mut points: Vec<(usize, f64)> = config_a.snr_points.iter().copied().enumerate().collect();
    points.sort_by(|x, y| x.1.partial_cmp(&y.1).expect("finite SNR points"));
    let pool = make_pool(config_a.workers)?;
    let mut out = Vec::with_capacity(points.len());
    for (point_index, snr_db) in points {
        let sigma = snr_to_sigma(snr_db, spec_a.rate(), config_a.snr_convention);
        let start = Instant::now();
        let seed = config_a.seed;
        let dec_a = &config_a.decoder;
        let dec_b = &config_b.decoder;
        let g = &g_a;
        let (acc_a, acc_b) = run_batches(&config_a.stop, true, |first, count| {
            pool.install(|| {
                (first..first + count)
                    .into_par_iter()
                    .map(|f| {
                        let ra = simulate_frame(g, dec_a, sigma, seed, point_index, f)?;
                        let rb = simulate_frame(g, dec_b, sigma, seed, point_index, f)?;
                        Ok((ra, Some(rb)))
                    })
                    .collect::<Result<Vec<_>, SimError>>()
            })
        })?;
        let elapsed = start.elapsed().as_secs_f64();
        let a = acc_a.finish(snr_db, elapsed);
        let b = acc_b.finish(snr_db, elapsed);
        debug_assert_eq!(a.noise_checksum, b.noise_checksum);
        if a.noise_checksum != b.noise_checksum {
            return Err(SimError::Config(
                "paired runs consumed different noise; common-random-number pairing broken".into(),
            ));
        }
        out.push(PairedStats {
            snr_db,
            frames: a.frames,
            a,
            b,
        });
    }
    Ok(out)
}

/// CSV header for sweep output.
pub const CSV_HEADER: &str = "code,n,k,decoder,order,Q,lambda,tau,snr_db,snr_convention,frames,frame_errors,fer,mean_na,mean_flops,mean_bops,stopped_rate,discarded_rate,seed";

/// One CSV row for a finished SNR point (no trailing newline).
pub fn csv_row(config: &ExperimentConfig, code_label: &str, n: usize, k: usize, p: &PointStats) -> String {
    let (q, lambda, tau) = match &config.decoder {
        DecoderSpec::Sdd(sp) => (
            sp.segments.to_string(),
            sp.lambda.to_string(),
            sp.tau.to_string(),
        ),
        DecoderSpec::Osd { .. } => (String::new(), String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        code_label,
        n,
        k,
        config.decoder.name(),
        config.decoder.order(),
        q,
        lambda,
        tau,
        p.snr_db,
        config.snr_convention.as_str(),
        p.frames,
        p.frame_errors,
        p.fer,
        p.mean_na,
        p.mean_flops,
        p.mean_bops,
        p.stopped_rate,
        p.discarded_rate,
        config.seed,
    )
}

/// Renders sweep results as CSV, one row per SNR point.
pub fn to_csv(config: &ExperimentConfig, stats: &SimulationStats) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &stats.points {
        let _ = writeln!(out, "{}", csv_row(config, &stats.code_label, stats.n, stats.k, p));
    }
    out
}

/// CSV header for paired comparison output.
pub const COMPARE_CSV_HEADER: &str =
    "snr_db,frames,fer_a,fer_b,fer_ratio,mean_na_a,mean_na_b,na_ratio,noise_checksum,seed";

/// Renders a paired comparison as CSV.
pub fn compare_to_csv(rows: &[PairedStats], seed: u64) -> String {
    let mut out = String::new();
    out.push_str(COMPARE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fer_ratio = if r.a.fer > 0.0 { r.b.fer / r.a.fer } else { f64::NAN };
        let na_ratio = if r.a.mean_na > 0.0 {
            r.b.mean_na / r.a.mean_na
        } else {
            f64::NAN
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:016x},{}",
            r.snr_db,
            r.frames,
            r.a.fer,
            r.b.fer,
            fer_ratio,
            r.a.mean_na,
            r.b.mean_na,
            na_ratio,
            r.a.noise_checksum,
            seed,
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdd::PruneMode;

    fn small_config(decoder: DecoderSpec, snr_points: Vec<f64>, frames: u64) -> ExperimentConfig {
        ExperimentConfig {
            code: CodeSource::Ebch { n: 8, k: 4 },
            decoder,
            snr_points,
            snr_convention: SnrConvention::EbN0,
            stop: StopRule::fixed_frames(frames),
            seed: 7,
            workers: 1,
        }
    }

    #[test]
    fn noiseless_point_has_zero_fer() {
        let cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![60.0], 200);
        let p = run_point(&cfg, 60.0, 0).unwrap();
        assert_eq!(p.frame_errors, 0);
        assert_eq!(p.fer, 0.0);
    }

    #[test]
    fn heavy_noise_order0_fails_mostly() {
        let cfg = small_config(DecoderSpec::Osd { order: 0 }, vec![-20.0], 500);
        let p = run_point(&cfg, -20.0, 0).unwrap();
        assert!(p.fer > 0.8, "fer = {}", p.fer);
        assert_eq!(p.mean_na, 1.0);
    }

    #[test]
    fn unpruned_mean_na_is_exact() {
        let cfg = small_config(DecoderSpec::Osd { order: 2 }, vec![0.0], 300);
        let p = run_point(&cfg, 0.0, 0).unwrap();
        // K=4, m=2: 1 + 4 + 6 candidates, independent of the channel.
        assert_eq!(p.mean_na, 11.0);
        assert_eq!(p.na_stddev, 0.0);
    }

    #[test]
    fn sweep_sorts_rows_ascending() {
        let cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![2.0, -1.0, 0.5], 50);
        let stats = sweep(&cfg).unwrap();
        let snrs: Vec<f64> = stats.points.iter().map(|p| p.snr_db).collect();
        assert_eq!(snrs, vec![-1.0, 0.5, 2.0]);
    }

    #[test]
    fn single_point_sweep_has_one_row() {
        let cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![1.0], 50);
        let stats = sweep(&cfg).unwrap();
        assert_eq!(stats.points.len(), 1);
    }

    #[test]
    fn csv_is_reproducible_across_runs_and_workers() {
        let mut cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![0.0, 2.0], 400);
        let a = to_csv(&cfg, &sweep(&cfg).unwrap());
        let b = to_csv(&cfg, &sweep(&cfg).unwrap());
        assert_eq!(a, b);
        cfg.workers = 4;
        let c = to_csv(&cfg, &sweep(&cfg).unwrap());
        assert_eq!(a, c);
        assert!(a.starts_with(CSV_HEADER));
    }

    #[test]
    fn fer_is_statistically_monotone_in_snr() {
        let cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![0.0, 2.0, 4.0], 10_000);
        let stats = sweep(&cfg).unwrap();
        let fers: Vec<f64> = stats.points.iter().map(|p| p.fer).collect();
        // Allow slack for Monte-Carlo noise; at these separations the trend
        // dominates easily.
        assert!(fers[0] > fers[1] * 0.9 && fers[1] > fers[2] * 0.9, "{fers:?}");
        assert!(fers[0] > fers[2], "{fers:?}");
    }

    #[test]
    fn compare_identical_configs_gives_identical_columns() {
        let cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![1.0], 300);
        let rows = compare_decoders(&cfg, &cfg.clone()).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.a.fer, r.b.fer);
        assert_eq!(r.a.mean_na, r.b.mean_na);
        assert_eq!(r.a.noise_checksum, r.b.noise_checksum);
    }

    #[test]
    fn compare_unpruned_sdd_matches_osd_fer_exactly() {
        let a = small_config(DecoderSpec::Osd { order: 2 }, vec![0.0], 500);
        let mut b = a.clone();
        b.decoder = DecoderSpec::Sdd(SddParams::new(2, 4, 10.0, 3.0).with_prune(PruneMode::None));
        let rows = compare_decoders(&a, &b).unwrap();
        assert_eq!(rows[0].a.fer, rows[0].b.fer);
        assert_eq!(rows[0].a.mean_na, rows[0].b.mean_na);
    }

    #[test]
    fn compare_rejects_mismatched_configs() {
        let a = small_config(DecoderSpec::Osd { order: 1 }, vec![1.0], 100);
        let mut b = a.clone();
        b.seed = 8;
        assert!(matches!(
            compare_decoders(&a, &b),
            Err(SimError::Config(_))
        ));
        let mut c = a.clone();
        c.snr_points = vec![2.0];
        assert!(compare_decoders(&a, &c).is_err());
    }

    #[test]
    fn validation_rejects_empty_and_zero() {
        let mut cfg = small_config(DecoderSpec::Osd { order: 1 }, vec![], 100);
        assert!(cfg.validate().is_err());
        cfg.snr_points = vec![1.0];
        cfg.stop = StopRule {
            min_frames: 0,
            min_frame_errors: 0,
            max_frames: 10,
        };
        assert!(cfg.validate().is_err());
    }
}
