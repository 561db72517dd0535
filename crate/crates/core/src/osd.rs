//! Ordered-statistics decoding machinery: reliability ordering with
//! systematic reduction, test-error-pattern enumeration, re-encoding,
//! weighted Hamming distance, and the plain order-m decoder.

use crate::channel::hard_decision;
use crate::gf2::{BinaryMatrix, BinaryVector, Gf2Error, Permutation};
use thiserror::Error;

/// Errors from decoder setup.
#[derive(Debug, Error)]
pub enum OsdError {
    #[error("received vector length {got} does not match code length {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Operation counters accumulated over one decode.
///
/// `flops` counts real comparisons and additions (sorting, distance sums,
/// boundary searches); `bops` counts binary operations, charging each
/// re-encoding at `K + K(N-K)` and Gaussian elimination per row XOR.
/// `seg_flops` is the sub-account of `flops` spent on segmentation
/// (boundary searches and discard-bound updates).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeCounters {
    pub flops: u64,
    pub bops: u64,
    pub seg_flops: u64,
    pub discarded_segments: u64,
    pub phases_run: u32,
}

impl DecodeCounters {
    /// Total charged cost of the decode.
    pub fn total(&self) -> u64 {
        self.flops + self.bops
    }
}

/// Why a decode returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Every scheduled test error pattern was checked.
    Exhausted,
    /// The boundary stopping rule fired.
    Stopped,
    /// Only phase-0 ran (order 0 or degenerate all-zero reliabilities).
    Order0,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Exhausted => "exhausted",
            Termination::Stopped => "stopped",
            Termination::Order0 => "order0",
        }
    }
}

/// Result of a decode: the selected codeword (in original index order), its
/// weighted Hamming distance, and accounting.
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub codeword: BinaryVector,
    pub d_min: f64,
    /// Number of re-encoded candidates (phase 0 included).
    pub n_a: u64,
    pub termination: Termination,
    pub counters: DecodeCounters,
}

/// Fully permuted and reduced decoding state.
///
/// `alpha_tilde` is non-increasing within the basis positions `1..K` and
/// within the redundancy positions `K+1..N`; the secondary permutation only
/// disturbs the ordering between the two parts.
#[derive(Debug, Clone)]
pub struct OrderedContext {
    pub r_tilde: Vec<f64>,
    pub alpha_tilde: Vec<f64>,
    pub y_tilde: BinaryVector,
    /// Systematic generator `[I_K | P]` over the reordered positions.
    pub g_tilde: BinaryMatrix,
    pub p1: Permutation,
    pub p2: Permutation,
    /// Cost of building this context (sorting comparisons, elimination XORs).
    setup: DecodeCounters,
}

impl OrderedContext {
    pub fn k(&self) -> usize {
        self.g_tilde.rows()
    }

    pub fn n(&self) -> usize {
        self.g_tilde.cols()
    }

    /// Hard decision restricted to the basis positions.
    pub fn y_basis(&self) -> BinaryVector {
        self.y_tilde.truncated(self.k())
    }

    /// Maps a codeword in ordered-domain indexing back to the original
    /// index order.
    pub fn to_original_order(&self, c_tilde: &BinaryVector) -> BinaryVector {
        let combined = self.p1.then(&self.p2);
        combined.inverse().apply_bits(c_tilde)
    }

    /// Maps an original-order codeword into the ordered domain.
    pub fn to_ordered_domain(&self, c: &BinaryVector) -> BinaryVector {
        self.p1.then(&self.p2).apply_bits(c)
    }
}

/// Sorts the received vector by descending reliability (stable, ties by
/// original index), permutes the generator accordingly, and reduces it to
/// systematic form over the most reliable independent positions.
pub fn order_received(r: &[f64], g: &BinaryMatrix) -> Result<OrderedContext, OsdError> {
    let n = g.cols();
    if r.len() != n {
        return Err(OsdError::LengthMismatch {
            got: r.len(),
            expected: n,
        });
    }
    let mut setup = DecodeCounters::default();
    let alpha: Vec<f64> = r.iter().map(|x| x.abs()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    let mut comparisons: u64 = 0;
    order.sort_by(|&a, &b| {
        comparisons += 1;
        alpha[b]
            .partial_cmp(&alpha[a])
            .expect("reliabilities must be finite")
            .then(a.cmp(&b))
    });
    setup.flops += comparisons;
    let p1 = Permutation::from_map(order).expect("sorted index list is a bijection");
    let g1 = g.permute_columns(&p1)?;
    let (g_tilde, p2, xor_rows) = systematic_form_counted(&g1)?;
    setup.bops += xor_rows * n as u64;
    let combined = p1.then(&p2);
    let r_tilde = combined.apply_slice(r);
    let alpha_tilde: Vec<f64> = r_tilde.iter().map(|x| x.abs()).collect();
    let y_tilde = hard_decision(&r_tilde);
    Ok(OrderedContext {
        r_tilde,
        alpha_tilde,
        y_tilde,
        g_tilde,
        p1,
        p2,
        setup,
    })
}

/// Systematic-form reduction that also reports the number of row XORs, for
/// the elimination cost counter.
fn systematic_form_counted(
    g: &BinaryMatrix,
) -> Result<(BinaryMatrix, Permutation, u64), Gf2Error> {
    let k = g.rows();
    let n = g.cols();
    let mut m = g.clone();
    let mut pivot_cols: Vec<usize> = Vec::with_capacity(k);
    let mut xors: u64 = 0;
    let mut row = 0;
    for col in 0..n {
        if row == k {
            break;
        }
        if let Some(pivot) = (row..k).find(|&r| m.get(r, col)) {
            m.swap_rows(row, pivot);
            for r in 0..k {
                if r != row && m.get(r, col) {
                    m.row_xor_assign(r, row);
                    xors += 1;
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
    }
    if row < k {
        return Err(Gf2Error::RankDeficient { pivot: row + 1 });
    }
    let mut in_basis = vec![false; n];
    for &c in &pivot_cols {
        in_basis[c] = true;
    }
    let mut map = pivot_cols;
    map.extend((0..n).filter(|&c| !in_basis[c]));
    let p = Permutation::from_map(map)?;
    let gt = m.permute_columns(&p)?;
    Ok((gt, p, xors))
}

/// A test error pattern: the 1-based basis positions to flip before
/// re-encoding. Support indices are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestErrorPattern {
    support: Vec<usize>,
}

impl TestErrorPattern {
    pub fn empty() -> Self {
        Self { support: Vec::new() }
    }

    /// Builds a pattern from 1-based positions; they must be strictly
    /// increasing and at least 1.
    pub fn new(support: Vec<usize>) -> Self {
        assert!(
            support.windows(2).all(|w| w[0] < w[1]) && support.first().is_none_or(|&f| f >= 1),
            "support must be strictly increasing 1-based indices"
        );
        Self { support }
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// 1-based positions.
    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

/// Enumerates weight-`l` supports over the 1-based window `[lo, hi]` in
/// colexicographically descending order, optionally constrained to patterns
/// whose smallest index is at most `first_cap`.
///
/// The first yielded support is `{min(first_cap, hi-l+1), hi-l+2, .., hi}`,
/// i.e. the least reliable admissible positions.
#[derive(Debug, Clone)]
pub struct ColexPatterns {
    lo: usize,
    hi: usize,
    l: usize,
    first_cap: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl ColexPatterns {
    /// Unconstrained enumeration over `[lo, hi]`.
    pub fn new(lo: usize, hi: usize, l: usize) -> Self {
        Self::with_first_cap(lo, hi, l, hi)
    }

    /// Enumeration over `[lo, hi]` restricted to supports whose first
    /// (smallest) element is `<= first_cap`. Requires `first_cap >= lo` for
    /// a non-empty stream.
    pub fn with_first_cap(lo: usize, hi: usize, l: usize, first_cap: usize) -> Self {
        assert!(lo >= 1, "window positions are 1-based");
        let infeasible = l > 0 && (hi < lo || hi - lo + 1 < l || first_cap < lo);
        Self {
            lo,
            hi,
            l,
            first_cap,
            current: Vec::new(),
            started: false,
            done: infeasible,
        }
    }

    /// Advances to the next pattern, returning its 1-based support or `None`
    /// when exhausted. The slice borrows the iterator's buffer.
    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.l == 0 {
                self.done = true;
                return Some(&self.current);
            }
            self.current = Vec::with_capacity(self.l);
            self.current.push(self.first_cap.min(self.hi - self.l + 1));
            for v in self.hi - self.l + 2..=self.hi {
                self.current.push(v);
            }
            return Some(&self.current);
        }
        if self.l == 0 {
            return None;
        }
        // Find the lowest position that can still decrease; decrement it and
        // re-maximize everything below it (capped first element included).
        let mut j = None;
        for idx in 0..self.l {
            let can = if idx == 0 {
                self.current[0] > self.lo
            } else {
                self.current[idx] > self.lo + idx
            };
            if can {
                j = Some(idx);
                break;
            }
        }
        let Some(j) = j else {
            self.done = true;
            return None;
        };
        if j == 0 {
            self.current[0] -= 1;
        } else {
            let c = self.current[j] - 1;
            self.current[j] = c;
            for t in (1..j).rev() {
                self.current[t] = c - (j - t);
            }
            self.current[0] = self.first_cap.min(c - j);
        }
        Some(&self.current)
    }
}

impl Iterator for ColexPatterns {
    type Item = TestErrorPattern;

    fn next(&mut self) -> Option<TestErrorPattern> {
        self.advance().map(|s| TestErrorPattern { support: s.to_vec() })
    }
}

/// All weight-`l` supports inside the 1-based window `[lo, hi]`, colex
/// descending. An over-narrow window yields an empty stream.
pub fn enumerate_weight_l(lo: usize, hi: usize, l: usize) -> ColexPatterns {
    ColexPatterns::new(lo, hi, l)
}

#[cfg(test)]
mod enumeration_tests {
    use super::*;

    fn collect(lo: usize, hi: usize, l: usize) -> Vec<Vec<usize>> {
        enumerate_weight_l(lo, hi, l)
            .map(|p| p.support().to_vec())
            .collect()
    }

    #[test]
    fn weight_one_descends() {
        assert_eq!(collect(1, 4, 1), vec![vec![4], vec![3], vec![2], vec![1]]);
    }

    #[test]
    fn weight_two_colex_descending() {
        assert_eq!(
            collect(1, 4, 2),
            vec![
                vec![3, 4],
                vec![2, 4],
                vec![1, 4],
                vec![2, 3],
                vec![1, 3],
                vec![1, 2]
            ]
        );
    }

    #[test]
    fn count_is_binomial() {
        fn binom(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            let mut r = 1usize;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        }
        for lo in 1..4usize {
            for hi in lo..9usize {
                for l in 0..5usize {
                    let w = hi - lo + 1;
                    assert_eq!(collect(lo, hi, l).len(), binom(w, l), "lo={lo} hi={hi} l={l}");
                }
            }
        }
    }

    #[test]
    fn too_small_window_is_empty() {
        assert!(collect(3, 4, 3).is_empty());
    }

    #[test]
    fn weight_zero_yields_single_empty() {
        let v = collect(1, 5, 0);
        assert_eq!(v, vec![Vec::<usize>::new()]);
    }
}

/// Re-encodes a test error pattern: flips the pattern into the basis hard
/// decision and multiplies by the systematic generator.
///
/// The binary-operation counter is charged the standard re-encoding cost
/// `K + K(N-K)` per call.
pub fn reencode(
    ctx: &OrderedContext,
    e: &TestErrorPattern,
    counters: &mut DecodeCounters,
) -> BinaryVector {
    let k = ctx.k();
    let n = ctx.n();
    counters.bops += (k + k * (n - k)) as u64;
    let mut msg = ctx.y_basis();
    for &pos in e.support() {
        debug_assert!((1..=k).contains(&pos));
        msg.flip(pos - 1);
    }
    ctx.g_tilde
        .encode(&msg)
        .expect("basis message length matches generator rows")
}

/// Weighted Hamming distance between a candidate (ordered domain) and the
/// hard-decision vector: the sum of reliabilities where they disagree.
pub fn whd(ctx: &OrderedContext, c: &BinaryVector, counters: &mut DecodeCounters) -> f64 {
    assert_eq!(c.len(), ctx.n(), "candidate length mismatch");
    let mut d = 0.0;
    let mut adds = 0u64;
    for (wi, (&cw, &yw)) in c.words().iter().zip(ctx.y_tilde.words()).enumerate() {
        let mut diff = cw ^ yw;
        while diff != 0 {
            let b = diff.trailing_zeros() as usize;
            d += ctx.alpha_tilde[wi * 64 + b];
            adds += 1;
            diff &= diff - 1;
        }
    }
    counters.flops += adds;
    d
}

/// Number of candidates an unpruned order-`m` decode re-encodes:
/// `sum_{l=0..m} C(K,l)`.
pub fn unpruned_candidate_count(k: usize, m: usize) -> u64 {
    let mut total = 0u64;
    let mut c = 1u64; // C(k,0)
    total += c;
    for l in 1..=m.min(k) {
        c = c * (k as u64 - l as u64 + 1) / l as u64;
        total += c;
    }
    total
}

/// Inner state shared by the plain and segmentation decoders: the running
/// best candidate over the phase-0 base codeword.
pub(crate) struct Reprocessor<'a> {
    pub ctx: &'a OrderedContext,
    pub counters: DecodeCounters,
    base: BinaryVector,
    best: BinaryVector,
    pub d_min: f64,
    pub n_a: u64,
    row_words: Vec<&'a [u64]>,
    scratch: Vec<u64>,
}

impl<'a> Reprocessor<'a> {
    /// Runs phase 0: re-encodes the basis hard decision and scores it.
    pub fn start(ctx: &'a OrderedContext) -> Self {
        let mut counters = ctx.setup;
        let base = reencode(ctx, &TestErrorPattern::empty(), &mut counters);
        let mut tmp = DecodeCounters::default();
        let d_min = whd(ctx, &base, &mut tmp);
        counters.flops += tmp.flops;
        let words = base.words().len();
        let row_words = (0..ctx.k()).map(|i| ctx.g_tilde.row_words(i)).collect();
        Self {
            ctx,
            counters,
            best: base.clone(),
            base,
            d_min,
            n_a: 1,
            row_words,
            scratch: vec![0; words],
        }
    }

    /// Re-encodes and scores one support (1-based positions), updating the
    /// running minimum. Charged exactly like [`reencode`] plus the distance
    /// additions. Returns the candidate's distance.
    pub fn check_support(&mut self, support: &[usize]) -> f64 {
        let k = self.ctx.k();
        let n = self.ctx.n();
        self.counters.bops += (k + k * (n - k)) as u64;
        self.n_a += 1;
        // c_e = c_0 xor (sum of generator rows in the support): linearity of
        // the re-encoding map.
        self.scratch.copy_from_slice(self.base.words());
        for &pos in support {
            for (s, &w) in self.scratch.iter_mut().zip(self.row_words[pos - 1]) {
                *s ^= w;
            }
        }
        let mut d = 0.0;
        let mut adds = 0u64;
        for (wi, (&cw, &yw)) in self
            .scratch
            .iter()
            .zip(self.ctx.y_tilde.words())
            .enumerate()
        {
            let mut diff = cw ^ yw;
            while diff != 0 {
                let b = diff.trailing_zeros() as usize;
                d += self.ctx.alpha_tilde[wi * 64 + b];
                adds += 1;
                diff &= diff - 1;
            }
        }
        self.counters.flops += adds + 1; // additions plus the comparison below
        if d < self.d_min {
            self.d_min = d;
            self.best.words_mut().copy_from_slice(&self.scratch);
        }
        d
    }

    /// Finishes the decode, mapping the best candidate back to the original
    /// index order.
    pub fn finish(self, termination: Termination) -> DecodeOutcome {
        let codeword = self.ctx.to_original_order(&self.best);
        DecodeOutcome {
            codeword,
            d_min: self.d_min,
            n_a: self.n_a,
            termination,
            counters: self.counters,
        }
    }
}

/// Plain order-`m` ordered-statistics decoding: checks every test error
/// pattern of weight 0..=m over the full basis, least reliable positions
/// first within each phase.
pub fn osd_decode(r: &[f64], g: &BinaryMatrix, order: usize) -> Result<DecodeOutcome, OsdError> {
    let ctx = order_received(r, g)?;
    let k = ctx.k();
    let mut rep = Reprocessor::start(&ctx);
    if order == 0 {
        return Ok(rep.finish(Termination::Order0));
    }
    for l in 1..=order.min(k) {
        rep.counters.phases_run += 1;
        let mut it = ColexPatterns::new(1, k, l);
        while let Some(support) = it.advance() {
            rep.check_support(support);
        }
    }
    Ok(rep.finish(Termination::Exhausted))
}

/// Closed-form complexity estimate for one decode: sorting, Gaussian
/// elimination, `n_a` re-encodings, and the segmentation overhead
/// `(K+1) m Q`.
pub fn complexity_estimate(n: usize, k: usize, m: usize, q: usize, n_a: f64) -> f64 {
    let n_f = n as f64;
    let k_f = k as f64;
    let min_part = k.min(n - k) as f64;
    n_f * n_f.log2() + n_f * min_part * min_part + n_a * (k_f + k_f * (n_f - k_f))
        + (k_f + 1.0) * (m as f64) * (q as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bpsk_modulate, transmit};
    use crate::codes::{ebch_generator, CodeSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ebch84() -> BinaryMatrix {
        ebch_generator(&CodeSpec::ebch(8, 4)).unwrap()
    }

    fn random_frame(g: &BinaryMatrix, sigma: f64, rng: &mut ChaCha8Rng) -> (BinaryVector, Vec<f64>) {
        let k = g.rows();
        let mut msg = BinaryVector::zeros(k);
        for i in 0..k {
            msg.set(i, rng.gen());
        }
        let c = g.encode(&msg).unwrap();
        let s = bpsk_modulate(&c);
        let r = transmit(&s, sigma, rng);
        (c, r)
    }

    #[test]
    fn order_received_identity_when_sorted() {
        // Systematic generator, r already sorted descending by magnitude.
        let g = BinaryMatrix::from_rows(&["1001", "0101"]).unwrap();
        let r = vec![2.0, -1.5, 1.0, 0.5];
        let ctx = order_received(&r, &g).unwrap();
        assert!(ctx.p1.is_identity());
        assert!(ctx.p2.is_identity());
        assert_eq!(ctx.r_tilde, r);
        assert!(ctx.y_tilde.get(1) && !ctx.y_tilde.get(0));
    }

    #[test]
    fn ordered_reliabilities_sorted_within_parts() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (_, r) = random_frame(&g, 0.9, &mut rng);
            let ctx = order_received(&r, &g).unwrap();
            let k = ctx.k();
            let a = &ctx.alpha_tilde;
            assert!(a[..k].windows(2).all(|w| w[0] >= w[1]), "basis not sorted");
            assert!(a[k..].windows(2).all(|w| w[0] >= w[1]), "parity not sorted");
        }
    }

    #[test]
    fn ordered_context_preserves_row_space() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (_, r) = random_frame(&g, 0.8, &mut rng);
        let ctx = order_received(&r, &g).unwrap();
        let permuted = g
            .permute_columns(&ctx.p1)
            .unwrap()
            .permute_columns(&ctx.p2)
            .unwrap();
        assert!(crate::gf2::row_space_equal(&permuted, &ctx.g_tilde).unwrap());
    }

    #[test]
    fn reencode_empty_is_base_candidate() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (_, r) = random_frame(&g, 0.5, &mut rng);
        let ctx = order_received(&r, &g).unwrap();
        let mut counters = DecodeCounters::default();
        let c0 = reencode(&ctx, &TestErrorPattern::empty(), &mut counters);
        assert_eq!(c0.truncated(4), ctx.y_basis());
        // One re-encoding costs exactly K + K(N-K) binary operations.
        assert_eq!(counters.bops, (4 + 4 * 4) as u64);
    }

    #[test]
    fn reencode_matches_row_sum_oracle() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (_, r) = random_frame(&g, 0.7, &mut rng);
        let ctx = order_received(&r, &g).unwrap();
        let e = TestErrorPattern::new(vec![2, 4]);
        let mut counters = DecodeCounters::default();
        let c = reencode(&ctx, &e, &mut counters);
        // Oracle: encode the flipped basis message by explicit row sums.
        let mut msg = ctx.y_basis();
        msg.flip(1);
        msg.flip(3);
        let mut expect = BinaryVector::zeros(8);
        for i in 0..4 {
            if msg.get(i) {
                expect.xor_assign(&ctx.g_tilde.row(i));
            }
        }
        assert_eq!(c, expect);
    }

    #[test]
    fn whd_of_hard_decision_is_zero() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (_, r) = random_frame(&g, 0.7, &mut rng);
        let ctx = order_received(&r, &g).unwrap();
        let mut counters = DecodeCounters::default();
        assert_eq!(whd(&ctx, &ctx.y_tilde.clone(), &mut counters), 0.0);
    }

    #[test]
    fn whd_single_flip_is_that_reliability() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (_, r) = random_frame(&g, 0.7, &mut rng);
        let ctx = order_received(&r, &g).unwrap();
        let mut c = ctx.y_tilde.clone();
        c.flip(7);
        let mut counters = DecodeCounters::default();
        let d = whd(&ctx, &c, &mut counters);
        assert_eq!(d, ctx.alpha_tilde[7]);
    }

    #[test]
    fn whd_matches_naive_loop() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let (_, r) = random_frame(&g, 1.0, &mut rng);
            let ctx = order_received(&r, &g).unwrap();
            let mut c = BinaryVector::zeros(8);
            for i in 0..8 {
                c.set(i, rng.gen());
            }
            let naive: f64 = (0..8)
                .filter(|&i| c.get(i) != ctx.y_tilde.get(i))
                .map(|i| ctx.alpha_tilde[i])
                .sum();
            let mut counters = DecodeCounters::default();
            assert_eq!(whd(&ctx, &c, &mut counters), naive);
        }
    }

    #[test]
    fn noiseless_decodes_to_transmitted() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (c, r) = random_frame(&g, 0.0, &mut rng);
        let out = osd_decode(&r, &g, 2).unwrap();
        assert_eq!(out.codeword, c);
        assert_eq!(out.d_min, 0.0);
    }

    #[test]
    fn order_zero_checks_single_candidate() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (_, r) = random_frame(&g, 1.0, &mut rng);
        let out = osd_decode(&r, &g, 0).unwrap();
        assert_eq!(out.n_a, 1);
        assert_eq!(out.termination, Termination::Order0);
    }

    #[test]
    fn candidate_count_is_exact() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (_, r) = random_frame(&g, 1.0, &mut rng);
        for m in 0..=4 {
            let out = osd_decode(&r, &g, m).unwrap();
            assert_eq!(out.n_a, unpruned_candidate_count(4, m));
        }
        assert_eq!(unpruned_candidate_count(16, 2), 137);
    }

    #[test]
    fn full_order_matches_exhaustive_ml() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let (_, r) = random_frame(&g, 1.0, &mut rng);
            let out = osd_decode(&r, &g, 4).unwrap();
            // Exhaustive oracle: minimum WHD over all 16 codewords.
            let ctx = order_received(&r, &g).unwrap();
            let mut scratch = DecodeCounters::default();
            let mut best = f64::INFINITY;
            let mut best_cw = None;
            for m in 0..16u32 {
                let mut msg = BinaryVector::zeros(4);
                for b in 0..4 {
                    if (m >> b) & 1 == 1 {
                        msg.set(b, true);
                    }
                }
                let cw = g.encode(&msg).unwrap();
                let d = whd(&ctx, &ctx.to_ordered_domain(&cw), &mut scratch);
                if d < best {
                    best = d;
                    best_cw = Some(cw);
                }
            }
            assert_eq!(out.codeword, best_cw.unwrap());
            assert!((out.d_min - best).abs() == 0.0);
        }
    }

    #[test]
    fn full_order_is_ml_on_second_small_code() {
        // Same exhaustive check on the (16,7) code at full order.
        let g = ebch_generator(&CodeSpec::ebch(16, 7)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let codewords: Vec<BinaryVector> = (0..128u32)
            .map(|m| {
                let mut msg = BinaryVector::zeros(7);
                for b in 0..7 {
                    if (m >> b) & 1 == 1 {
                        msg.set(b, true);
                    }
                }
                g.encode(&msg).unwrap()
            })
            .collect();
        for _ in 0..200 {
            let (_, r) = random_frame(&g, 1.0, &mut rng);
            let out = osd_decode(&r, &g, 7).unwrap();
            let ctx = order_received(&r, &g).unwrap();
            let mut scratch = DecodeCounters::default();
            let best = codewords
                .iter()
                .map(|cw| (whd(&ctx, &ctx.to_ordered_domain(cw), &mut scratch), cw))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                .unwrap();
            assert_eq!(&out.codeword, best.1);
        }
    }

    #[test]
    fn whd_nonincreasing_in_order() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let (_, r) = random_frame(&g, 1.2, &mut rng);
            let mut prev = f64::INFINITY;
            for m in 0..=4 {
                let out = osd_decode(&r, &g, m).unwrap();
                assert!(out.d_min <= prev);
                prev = out.d_min;
            }
        }
    }

    #[test]
    fn reported_distance_matches_recomputation() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let (_, r) = random_frame(&g, 1.0, &mut rng);
            let out = osd_decode(&r, &g, 2).unwrap();
            let ctx = order_received(&r, &g).unwrap();
            let mut scratch = DecodeCounters::default();
            let d = whd(&ctx, &ctx.to_ordered_domain(&out.codeword), &mut scratch);
            assert_eq!(d, out.d_min);
        }
    }

    #[test]
    fn complexity_estimate_formula() {
        // (128,64), m=3, Q=22, n_a=1016: term-by-term evaluation.
        let est = complexity_estimate(128, 64, 3, 22, 1016.0);
        let expect = 128.0 * (128f64).log2()
            + 128.0 * 64.0 * 64.0
            + 1016.0 * (64.0 + 64.0 * 64.0)
            + 65.0 * 3.0 * 22.0;
        assert_eq!(est, expect);
        // Segmentation overhead is negligible at this operating point.
        assert!(65.0 * 3.0 * 22.0 / est < 0.01);
        // n_a = 0, m = 0: only the sorting and elimination terms remain.
        let fixed = complexity_estimate(128, 64, 0, 0, 0.0);
        assert_eq!(fixed, 128.0 * (128f64).log2() + 128.0 * 64.0 * 64.0);
    }

    #[test]
    fn scale_invariance_of_selected_codeword() {
        let g = ebch84();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..50 {
            let (_, r) = random_frame(&g, 1.0, &mut rng);
            let out1 = osd_decode(&r, &g, 2).unwrap();
            for scale in [0.5, 2.0, 4.0] {
                let scaled: Vec<f64> = r.iter().map(|x| x * scale).collect();
                let out2 = osd_decode(&scaled, &g, 2).unwrap();
                assert_eq!(out1.codeword, out2.codeword);
                assert_eq!(out1.n_a, out2.n_a);
            }
        }
    }
}
