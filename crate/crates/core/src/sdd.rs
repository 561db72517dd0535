//! Segmentation-discarding decoding: splits each reprocessing phase's test
//! error patterns into segments at adaptively chosen reliability boundaries,
//! discards unpromising segments against a distance lower bound, and stops
//! early once the first boundary leaves fewer positions than the phase
//! weight needs.

use crate::gf2::BinaryMatrix;
use crate::osd::{
    ColexPatterns, DecodeOutcome, OsdError, OrderedContext, Reprocessor, Termination,
};
use thiserror::Error;

/// Errors from segmentation-decoder setup or degenerate inputs.
#[derive(Debug, Error)]
pub enum SddError {
    #[error("invalid decoder parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error(transparent)]
    Osd(#[from] OsdError),
}

/// Which pruning rules are active. `None` disables both, making the decoder
/// equivalent to plain ordered-statistics decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneMode {
    #[default]
    Full,
    NoDiscard,
    NoStop,
    None,
}

impl PruneMode {
    pub fn discard_enabled(&self) -> bool {
        matches!(self, PruneMode::Full | PruneMode::NoStop)
    }

    pub fn stop_enabled(&self) -> bool {
        matches!(self, PruneMode::Full | PruneMode::NoDiscard)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PruneMode::Full => "full",
            PruneMode::NoDiscard => "no_discard",
            PruneMode::NoStop => "no_stop",
            PruneMode::None => "none",
        }
    }
}

impl std::str::FromStr for PruneMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(PruneMode::Full),
            "no_discard" => Ok(PruneMode::NoDiscard),
            "no_stop" => Ok(PruneMode::NoStop),
            "none" => Ok(PruneMode::None),
            other => Err(format!(
                "unknown prune mode '{other}' (expected full, no_discard, no_stop or none)"
            )),
        }
    }
}

/// Segmentation-discarding decoder parameters.
#[derive(Debug, Clone)]
pub struct SddParams {
    /// Maximum reprocessing phase (test-error-pattern weight).
    pub order: usize,
    /// Number of segments per phase.
    pub segments: usize,
    /// Boundary scale; larger values push boundaries toward reliable
    /// positions and prune harder.
    pub lambda: f64,
    /// Discard aggressiveness; larger values discard more segments.
    pub tau: f64,
    pub prune: PruneMode,
}

impl SddParams {
    pub fn new(order: usize, segments: usize, lambda: f64, tau: f64) -> Self {
        Self {
            order,
            segments,
            lambda,
            tau,
            prune: PruneMode::Full,
        }
    }

    pub fn with_prune(mut self, prune: PruneMode) -> Self {
        self.prune = prune;
        self
    }

    pub fn validate(&self) -> Result<(), SddError> {
        if self.segments < 1 {
            return Err(SddError::InvalidParams("segment count must be >= 1".into()));
        }
        if self.lambda.is_nan() || self.lambda <= 0.0 {
            return Err(SddError::InvalidParams(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if self.tau.is_nan() || self.tau < 0.0 {
            return Err(SddError::InvalidParams(format!(
                "tau must be >= 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Boundary positions for one reprocessing phase: 1-based indices with
/// `beta[0] = K+1 > beta[1] > ... > beta[Q] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentBoundaries {
    beta: Vec<usize>,
}

impl SegmentBoundaries {
    /// Validates a full boundary vector `[K+1, b_1, .., b_{Q-1}, 1]`.
    pub fn new(k: usize, beta: Vec<usize>) -> Result<Self, SddError> {
        if beta.first() != Some(&(k + 1)) || beta.last() != Some(&1) {
            return Err(SddError::InvalidParams(format!(
                "boundary vector must start at K+1 = {} and end at 1, got {beta:?}",
                k + 1
            )));
        }
        if !beta.windows(2).all(|w| w[0] > w[1]) {
            return Err(SddError::InvalidParams(format!(
                "boundary vector must be strictly decreasing, got {beta:?}"
            )));
        }
        Ok(Self { beta })
    }

    /// Number of segments Q.
    pub fn segments(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn beta(&self) -> &[usize] {
        &self.beta
    }

    /// The `(beta_i, beta_{i-1})` pair delimiting segment `i` (1-based).
    pub fn segment_bounds(&self, i: usize) -> (usize, usize) {
        (self.beta[i], self.beta[i - 1])
    }
}

/// Per-segment trace record.
#[derive(Debug, Clone)]
pub struct SegmentStats {
    /// Reprocessing phase (pattern weight).
    pub l: usize,
    /// Segment index within the phase, 1-based.
    pub i: usize,
    /// Boundary position chosen for this segment.
    pub beta: usize,
    /// Reliability sum of the segment's first pattern; 0 for empty segments.
    pub first_tep_l: f64,
    /// Distance lower bound, when one was computed.
    pub d_lower: Option<f64>,
    /// Candidates re-encoded from this segment.
    pub checked: u64,
    pub discarded: bool,
}

/// Full decode trace for the single-frame debug mode.
#[derive(Debug, Clone, Default)]
pub struct DecodeTrace {
    /// Distance of the phase-0 candidate.
    pub d_phase0: f64,
    pub segments: Vec<SegmentStats>,
    /// (phase, d_min) after each improvement.
    pub improvements: Vec<(usize, f64)>,
}

impl DecodeTrace {
    /// Boundary vector recorded for one phase.
    pub fn boundaries(&self, l: usize) -> Vec<usize> {
        self.segments
            .iter()
            .filter(|s| s.l == l)
            .map(|s| s.beta)
            .collect()
    }
}

/// Mean of the ordered reliabilities over 1-based inclusive positions
/// `[a, b]`.
pub fn mean_reliability(alpha: &[f64], a: usize, b: usize) -> Result<f64, SddError> {
    if a < 1 || b < a || b > alpha.len() {
        return Err(SddError::InvalidParams(format!(
            "empty or out-of-range position interval [{a}, {b}] over {} positions",
            alpha.len()
        )));
    }
    let slice = &alpha[a - 1..b];
    Ok(slice.iter().sum::<f64>() / slice.len() as f64)
}

/// Population standard deviation of all reliabilities.
pub fn population_std(alpha: &[f64]) -> f64 {
    let n = alpha.len() as f64;
    let mean = alpha.iter().sum::<f64>() / n;
    let var = alpha.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    var.sqrt()
}

/// Target reliability for the next boundary: the mean over positions before
/// the previous boundary, shrunk by the current best distance relative to
/// the overall mean and the scale `lambda`.
///
/// Errors when every reliability is zero (the offset is then undefined);
/// the decoder treats that input as degenerate and returns its phase-0
/// candidate instead.
pub fn boundary_target(
    alpha: &[f64],
    prev_beta: usize,
    lambda: f64,
    d_min: f64,
) -> Result<f64, SddError> {
    if prev_beta < 2 {
        return Err(SddError::InvalidParams(format!(
            "previous boundary {prev_beta} leaves no positions to search"
        )));
    }
    let overall = mean_reliability(alpha, 1, alpha.len())?;
    if overall == 0.0 {
        return Err(SddError::DegenerateInput(
            "all reliabilities are zero".into(),
        ));
    }
    let prefix = mean_reliability(alpha, 1, prev_beta - 1)?;
    Ok(prefix * d_min / (lambda * overall))
}

/// Position in `[1, search_upper-1]` whose reliability is closest to
/// `target`; ties resolve toward the larger (less reliable) index, which
/// keeps the first segment small and pruning conservative.
pub fn find_boundary(alpha: &[f64], search_upper: usize, target: f64) -> usize {
    debug_assert!(search_upper >= 2 && search_upper - 1 <= alpha.len());
    let mut best = 1;
    let mut best_gap = (alpha[0] - target).abs();
    for j in 2..search_upper {
        let gap = (alpha[j - 1] - target).abs();
        if gap <= best_gap {
            best = j;
            best_gap = gap;
        }
    }
    best
}

/// The weight-`l` patterns of segment `i`: support inside `[beta_i, K]` with
/// at least one position before the previous boundary `beta_prev`. Yields in
/// the same colex-descending order as the full-window enumeration, so the
/// first pattern attains the segment's minimum reliability sum.
pub fn segment_teps(k: usize, l: usize, beta_i: usize, beta_prev: usize) -> ColexPatterns {
    assert!(beta_i < beta_prev, "boundaries must strictly decrease");
    assert!(beta_i >= 1 && l >= 1);
    ColexPatterns::with_first_cap(beta_i, k, l, beta_prev - 1)
}

/// Distance lower bound for a segment, from its first (most promising)
/// pattern: the pattern's reliability sum inflated by the spread of the
/// reliabilities and the redundancy-to-basis mean ratio, scaled by `tau`.
pub fn discard_bound(alpha: &[f64], k: usize, first_support: &[usize], tau: f64) -> f64 {
    let l_sum: f64 = first_support.iter().map(|&p| alpha[p - 1]).sum();
    let sigma = population_std(alpha);
    let ratio = mean_ratio(alpha, k);
    bound_from(l_sum, tau, sigma, ratio)
}

/// `E_[K+1,N] / E_[1,K]`, or 0 for a rate-1 code (no redundancy part).
fn mean_ratio(alpha: &[f64], k: usize) -> f64 {
    if k >= alpha.len() {
        return 0.0;
    }
    let basis = mean_reliability(alpha, 1, k).expect("basis interval is non-empty");
    let parity =
        mean_reliability(alpha, k + 1, alpha.len()).expect("parity interval is non-empty");
    if basis == 0.0 {
        0.0
    } else {
        parity / basis
    }
}

#[inline]
fn bound_from(l_sum: f64, tau: f64, sigma: f64, ratio: f64) -> f64 {
    l_sum * (1.0 + tau * sigma * ratio)
}

/// Decodes with segmentation, discarding, and the stopping rule.
pub fn sdd_decode(r: &[f64], g: &BinaryMatrix, params: &SddParams) -> Result<DecodeOutcome, SddError> {
    decode_inner(r, g, params, None)
}

/// Like [`sdd_decode`], additionally recording a per-segment trace.
pub fn sdd_decode_traced(
    r: &[f64],
    g: &BinaryMatrix,
    params: &SddParams,
) -> Result<(DecodeOutcome, DecodeTrace), SddError> {
    let mut trace = DecodeTrace::default();
    let outcome = decode_inner(r, g, params, Some(&mut trace))?;
    Ok((outcome, trace))
}

fn decode_inner(
    r: &[f64],
    g: &BinaryMatrix,
    params: &SddParams,
    mut trace: Option<&mut DecodeTrace>,
) -> Result<DecodeOutcome, SddError> {
    params.validate()?;
    let ctx = order_received_checked(r, g)?;
    let k = ctx.k();
    let q = params.segments;
    let mut rep = Reprocessor::start(&ctx);
    if let Some(t) = trace.as_deref_mut() {
        t.d_phase0 = rep.d_min;
    }
    if params.order == 0 {
        return Ok(rep.finish(Termination::Order0));
    }
    // All-zero reliabilities leave the boundary rule undefined; the phase-0
    // candidate already has distance 0 and is returned as-is.
    if ctx.alpha_tilde.iter().all(|&a| a == 0.0) {
        return Ok(rep.finish(Termination::Order0));
    }
    let discard = params.prune.discard_enabled();
    let stop = params.prune.stop_enabled();

    // With both rules off there is nothing segmentation can influence, so
    // each phase runs as one full-window pass in plain colex order; the
    // candidate sequence is then bit-identical to plain OSD.
    if !discard && !stop {
        for l in 1..=params.order.min(k) {
            rep.counters.phases_run += 1;
            let mut it = ColexPatterns::new(1, k, l);
            while let Some(support) = it.advance() {
                rep.check_support(support);
            }
        }
        return Ok(rep.finish(Termination::Exhausted));
    }

    // Segment-independent factors of the discard bound.
    let sigma = population_std(&ctx.alpha_tilde);
    let ratio = mean_ratio(&ctx.alpha_tilde, k);

    let mut termination = Termination::Exhausted;
    'phases: for l in 1..=params.order.min(k) {
        rep.counters.phases_run += 1;
        let mut prev_beta = k + 1;
        for i in 1..=q {
            if prev_beta == 1 {
                // Earlier boundaries already reached position 1; the
                // remaining segments are empty.
                break;
            }
            let beta_i = if i == q {
                1
            } else {
                // Boundaries are recomputed at every segment with the
                // current best distance.
                let target = boundary_target(&ctx.alpha_tilde, prev_beta, params.lambda, rep.d_min)?;
                // One pass over the searchable prefix.
                let cost = (prev_beta - 1) as u64;
                rep.counters.flops += cost;
                rep.counters.seg_flops += cost;
                find_boundary(&ctx.alpha_tilde, prev_beta, target)
            };
            // Stop once the window [beta_i, K] cannot hold a weight-l
            // pattern: the current estimate is already good. The window has
            // K - beta_i + 1 positions, so the condition is beta_i > K-l+1.
            if stop && beta_i > k + 1 - l {
                termination = Termination::Stopped;
                break 'phases;
            }
            let mut it = segment_teps(k, l, beta_i, prev_beta);
            let Some(first) = it.advance() else {
                prev_beta = beta_i;
                continue;
            };
            let first_l: f64 = first.iter().map(|&p| ctx.alpha_tilde[p - 1]).sum();
            rep.counters.flops += first.len() as u64;
            let mut d_lower = None;
            if discard {
                let bound = bound_from(first_l, params.tau, sigma, ratio);
                rep.counters.flops += 1;
                rep.counters.seg_flops += 1;
                d_lower = Some(bound);
                if rep.d_min < bound {
                    // Every remaining segment of this phase is at least as
                    // unreliable; none of them is checked.
                    rep.counters.discarded_segments += (q - i + 1) as u64;
                    if let Some(t) = trace.as_deref_mut() {
                        t.segments.push(SegmentStats {
                            l,
                            i,
                            beta: beta_i,
                            first_tep_l: first_l,
                            d_lower,
                            checked: 0,
                            discarded: true,
                        });
                    }
                    continue 'phases;
                }
            }
            let mut checked = 0u64;
            let d_before = rep.d_min;
            // The peeked first pattern is checked too.
            rep.check_support(first);
            checked += 1;
            while let Some(support) = it.advance() {
                rep.check_support(support);
                checked += 1;
            }
            if let Some(t) = trace.as_deref_mut() {
                if rep.d_min < d_before {
                    t.improvements.push((l, rep.d_min));
                }
                t.segments.push(SegmentStats {
                    l,
                    i,
                    beta: beta_i,
                    first_tep_l: first_l,
                    d_lower,
                    checked,
                    discarded: false,
                });
            }
            prev_beta = beta_i;
        }
    }
    Ok(rep.finish(termination))
}

fn order_received_checked(r: &[f64], g: &BinaryMatrix) -> Result<OrderedContext, SddError> {
    Ok(crate::osd::order_received(r, g)?)
}
