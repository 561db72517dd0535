//! BPSK modulation over the AWGN channel and reliability extraction.
//!
//! Symbols use the unit-energy convention `s_i = (-1)^{c_i}`, noise is real
//! Gaussian with variance `N0/2`, and the reliability of a received sample
//! is its magnitude.

use crate::gf2::BinaryVector;
use rand::Rng;
use rand_distr::StandardNormal;

/// Real-valued samples (received values or reliabilities).
pub type SoftVector = Vec<f64>;

/// How the SNR axis of an experiment is interpreted.
///
/// Benchmark tables often say only "SNR(dB)", so all three common readings
/// are supported and experiments record which one they used. For a rate-1/2
/// code, `EbN0` and `Snr` coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrConvention {
    /// SNR = Eb/N0: energy per information bit over noise density.
    EbN0,
    /// SNR = Es/N0: energy per transmitted symbol over noise density.
    EsN0,
    /// SNR = 10 log10(1/sigma^2) = Es/(N0/2): symbol energy over the total
    /// noise variance. This is the axis that reproduces the published
    /// candidate-count tables.
    Snr,
}

impl SnrConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            SnrConvention::EbN0 => "ebn0",
            SnrConvention::EsN0 => "esn0",
            SnrConvention::Snr => "snr",
        }
    }
}

impl std::str::FromStr for SnrConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ebn0" => Ok(SnrConvention::EbN0),
            "esn0" => Ok(SnrConvention::EsN0),
            "snr" => Ok(SnrConvention::Snr),
            other => Err(format!(
                "unknown SNR convention '{other}' (expected ebn0, esn0 or snr)"
            )),
        }
    }
}

/// Channel operating point: SNR, code rate, and the derived noise sigma.
#[derive(Debug, Clone)]
pub struct ChannelParams {
    pub snr_db: f64,
    pub rate: f64,
    pub convention: SnrConvention,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(snr_db: f64, rate: f64, convention: SnrConvention, seed: u64) -> Self {
        Self {
            snr_db,
            rate,
            convention,
            sigma: snr_to_sigma(snr_db, rate, convention),
            seed,
        }
    }
}

/// Maps a codeword to BPSK symbols: bit 0 -> +1, bit 1 -> -1.
pub fn bpsk_modulate(c: &BinaryVector) -> SoftVector {
    (0..c.len()).map(|i| if c.get(i) { -1.0 } else { 1.0 }).collect()
}

/// Noise standard deviation `sqrt(N0/2)` for unit-energy symbols.
///
/// Under [`SnrConvention::EbN0`], `N0 = 1 / (rate * 10^(snr/10))`; under
/// [`SnrConvention::EsN0`] the rate drops out; under [`SnrConvention::Snr`]
/// the noise variance is directly `10^(-snr/10)`.
pub fn snr_to_sigma(snr_db: f64, rate: f64, convention: SnrConvention) -> f64 {
    assert!(rate > 0.0 && rate <= 1.0, "rate must be in (0,1]");
    let snr = 10f64.powf(snr_db / 10.0);
    let variance = match convention {
        SnrConvention::EbN0 => 1.0 / (2.0 * rate * snr),
        SnrConvention::EsN0 => 1.0 / (2.0 * snr),
        SnrConvention::Snr => 1.0 / snr,
    };
    variance.sqrt()
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma` to the symbols.
/// Deterministic for a fixed RNG state.
pub fn transmit<R: Rng>(s: &[f64], sigma: f64, rng: &mut R) -> SoftVector {
    s.iter()
        .map(|&x| x + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Reliabilities: elementwise magnitude of the received samples.
pub fn reliability(r: &[f64]) -> SoftVector {
    r.iter().map(|x| x.abs()).collect()
}

/// Bitwise hard decision: bit 1 where the sample is negative.
pub fn hard_decision(r: &[f64]) -> BinaryVector {
    let mut y = BinaryVector::zeros(r.len());
    for (i, &x) in r.iter().enumerate() {
        if x < 0.0 {
            y.set(i, true);
        }
    }
    y
}
