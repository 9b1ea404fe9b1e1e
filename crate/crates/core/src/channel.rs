//! BPSK-over-AWGN with LLR output and the two-state Gilbert-Elliott burst
//! channel, with exact burst positions exposed as side information.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};

// Sub-streams derived from a transmit seed, so the noise sequence is the
// same whether or not a burst chain runs alongside it.
const NOISE_STREAM: u64 = 0;
const CHAIN_STREAM: u64 = 1;

/// Derive an independent stream seed. SplitMix64 over the xored inputs.
pub fn derive_seed(root: u64, a: u64, b: u64) -> u64 {
    let mut z =
        root ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Binary-input AWGN operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnParams {
    eb_n0_db: f64,
    rate: f64,
    sigma2: f64,
}

impl AwgnParams {
    /// `rate` is the information bits carried per transmitted channel bit,
    /// used only for the energy-per-bit accounting.
    pub fn new(eb_n0_db: f64, rate: f64) -> Result<AwgnParams> {
        if !eb_n0_db.is_finite() {
            return Err(invalid(format!("Eb/N0 must be finite, got {eb_n0_db}")));
        }
        if !rate.is_finite() || rate <= 0.0 || rate > 1.0 {
            return Err(invalid(format!("rate must lie in (0, 1], got {rate}")));
        }
        let sigma2 = 1.0 / (2.0 * rate * 10.0_f64.powf(eb_n0_db / 10.0));
        Ok(AwgnParams {
            eb_n0_db,
            rate,
            sigma2,
        })
    }

    pub fn eb_n0_db(&self) -> f64 {
        self.eb_n0_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Noise variance per BPSK symbol of unit energy.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Mean channel LLR for a transmitted zero, 2/sigma^2.
    pub fn llr_mean(&self) -> f64 {
        2.0 / self.sigma2
    }
}

/// Transmit bits over BPSK + AWGN; returns one LLR per bit.
///
/// Bit b maps to the symbol 1 - 2b; the LLR is 2y/sigma^2. Deterministic
/// given the seed.
pub fn awgn_transmit(bits: &[bool], params: &AwgnParams, seed: u64) -> Vec<f64> {
    let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, NOISE_STREAM, 0));
    let normal = Normal::new(0.0, params.sigma2.sqrt()).expect("valid sigma");
    let scale = 2.0 / params.sigma2;
    bits.iter()
        .map(|&b| {
            let symbol = if b { -1.0 } else { 1.0 };
            let y = symbol + normal.sample(&mut noise_rng);
            scale * y
        })
        .collect()
}

/// What a bad-state symbol looks like on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BurstCorruption {
    /// The signal component is obliterated: the received value is pure
    /// noise, so the symbol carries no information.
    #[default]
    Obliterate,
    /// The symbol is flipped with probability one half before the noise.
    RandomFlip,
}

/// Two-state Markov burst channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilbertElliottParams {
    delta: f64,
    p_be: f64,
    p_bb: f64,
    p_gb: f64,
}

impl GilbertElliottParams {
    /// `delta` is the mean burst length in symbols, `p_be` the stationary
    /// bad-state probability.
    pub fn new(delta: f64, p_be: f64) -> Result<GilbertElliottParams> {
        if !delta.is_finite() || delta < 1.0 {
            return Err(invalid(format!("burst length must be >= 1, got {delta}")));
        }
        if !p_be.is_finite() || !(0.0..1.0).contains(&p_be) {
            return Err(invalid(format!(
                "bad-state probability must lie in [0, 1), got {p_be}"
            )));
        }
        let p_bb = 1.0 - 1.0 / delta;
        let p_gb = p_be / ((1.0 - p_be) * delta);
        if p_gb >= 1.0 {
            return Err(invalid(format!(
                "good-to-bad probability {p_gb} >= 1; delta too short for this load"
            )));
        }
        Ok(GilbertElliottParams {
            delta,
            p_be,
            p_bb,
            p_gb,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn p_be(&self) -> f64 {
        self.p_be
    }

    /// Bad-state self-transition, 1 - 1/delta.
    pub fn p_bb(&self) -> f64 {
        self.p_bb
    }

    /// Good-to-bad transition, P_BE / ((1 - P_BE) delta).
    pub fn p_gb(&self) -> f64 {
        self.p_gb
    }

    /// Stationary bad-state probability implied by the transition pair;
    /// equals `p_be` by construction.
    pub fn stationary_bad(&self) -> f64 {
        self.p_gb / (self.p_gb + (1.0 - self.p_bb))
    }
}

/// Transmit through the Gilbert-Elliott channel.
///
/// The chain starts from its stationary distribution. Good-state symbols
/// see plain AWGN; bad-state symbols are corrupted per `corruption` and
/// their positions returned as genie side information. With `p_be = 0`
/// the output is identical to [`awgn_transmit`] under the same seed.
pub fn ge_transmit_with(
    bits: &[bool],
    awgn: &AwgnParams,
    ge: &GilbertElliottParams,
    corruption: BurstCorruption,
    seed: u64,
) -> (Vec<f64>, Vec<usize>) {
    let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, NOISE_STREAM, 0));
    let mut chain_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, CHAIN_STREAM, 0));
    let normal = Normal::new(0.0, awgn.sigma2.sqrt()).expect("valid sigma");
    let scale = 2.0 / awgn.sigma2;
    let mut bad = chain_rng.gen_bool(ge.p_be);
    let mut llrs = Vec::with_capacity(bits.len());
    let mut bursts = Vec::new();
    for (i, &b) in bits.iter().enumerate() {
        let noise = normal.sample(&mut noise_rng);
        let y = if bad {
            bursts.push(i);
            match corruption {
                BurstCorruption::Obliterate => noise,
                BurstCorruption::RandomFlip => {
                    let flip = chain_rng.gen_bool(0.5);
                    let symbol = if b ^ flip { -1.0 } else { 1.0 };
                    symbol + noise
                }
            }
        } else {
            let symbol = if b { -1.0 } else { 1.0 };
            symbol + noise
        };
        llrs.push(scale * y);
        bad = if bad {
            chain_rng.gen_bool(ge.p_bb)
        } else {
            chain_rng.gen_bool(ge.p_gb)
        };
    }
    (llrs, bursts)
}

/// [`ge_transmit_with`] under the default obliterating burst model.
pub fn ge_transmit(
    bits: &[bool],
    awgn: &AwgnParams,
    ge: &GilbertElliottParams,
    seed: u64,
) -> (Vec<f64>, Vec<usize>) {
    ge_transmit_with(bits, awgn, ge, BurstCorruption::Obliterate, seed)
}

/// Crude burst detector for sensitivity studies: flags every symbol of any
/// window whose mean |LLR| falls below the threshold. Not used by the
/// genie-aided decoding path.
pub fn detect_bursts_by_magnitude(llrs: &[f64], window: usize, threshold: f64) -> Vec<usize> {
    if window == 0 || llrs.len() < window {
        return Vec::new();
    }
    let mut flagged = vec![false; llrs.len()];
    let mut sum: f64 = llrs[..window].iter().map(|l| l.abs()).sum();
    let mut start = 0;
    loop {
        if sum / window as f64 <= threshold {
            for f in flagged[start..start + window].iter_mut() {
                *f = true;
            }
        }
        if start + window >= llrs.len() {
            break;
        }
        sum += llrs[start + window].abs() - llrs[start].abs();
        start += 1;
    }
    flagged
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i))
        .collect()
}
