//! Monte Carlo BLER/BER estimation.
//!
//! A point repeatedly draws a payload, encodes, transmits, decodes, and
//! tallies block and bit errors until the stop rule fires. Trials run in
//! fixed-size batches whose members are seeded from (root seed, point
//! index, trial index), so results are byte-identical for any thread
//! count and the stop decision lands on the same batch boundary.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    awgn_transmit, derive_seed, ge_transmit_with, AwgnParams, BurstCorruption, GilbertElliottParams,
};
use crate::codec::{scan_decode_systematic_with, DecodeOptions};
use crate::construct::CodeConfig;
use crate::error::{invalid, Result};
use crate::llr::CheckCombine;
use crate::staircase::{
    burst_patch, encode_frame, stream_index_to_pos, Frame, FrameDecoder, StaircaseConfig,
};

const TRIAL_BATCH: u64 = 64;
const PAYLOAD_STREAM: u64 = 11;
const CHANNEL_STREAM: u64 = 13;

/// Staircase geometry of a simulated scheme; absent for the bare
/// component code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StairParams {
    pub stair_width: usize,
    pub stair_count: usize,
    pub terminated: bool,
}

/// Channel selection and sweep semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    /// Sweep axis is Eb/N0 in dB.
    Awgn,
    /// Sweep axis is the bad-state probability; Eb/N0 stays fixed.
    GilbertElliott {
        eb_n0_db: f64,
        delta: f64,
        corruption: BurstCorruption,
        genie_patching: bool,
    },
}

/// Which rate converts Eb/N0 into the per-symbol noise level.
///
/// Published staircase curves quote the component code rate, leaving the
/// retransmitted overlap out of the energy accounting; the net accounting
/// charges it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergyAccounting {
    /// K/N for every scheme (the convention of the reference curves).
    #[default]
    ComponentRate,
    /// Information bits per transmitted channel bit: (K-M)/N for a
    /// staircase frame, K/N for a bare component code.
    NetRate,
}

/// Everything a sweep needs.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub code_len: usize,
    pub code_dim: usize,
    pub staircase: Option<StairParams>,
    /// Sliding-window iterations for a frame, SCAN sweeps for a bare
    /// component code.
    pub iters: u32,
    pub channel: ChannelKind,
    pub sweep: Vec<f64>,
    pub min_block_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    pub combine: CheckCombine,
    pub energy_accounting: EnergyAccounting,
    /// Construction design mean; when absent each point constructs at its
    /// own operating mean.
    pub design_llr_mean: Option<f64>,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.min_block_errors < 1 || self.max_trials < 1 {
            return Err(invalid(
                "stop rule needs min_block_errors >= 1 and max_trials >= 1",
            ));
        }
        if self.sweep.is_empty() {
            return Err(invalid("sweep axis must be non-empty"));
        }
        let increasing = self.sweep.windows(2).all(|w| w[0] < w[1]);
        let decreasing = self.sweep.windows(2).all(|w| w[0] > w[1]);
        if self.sweep.len() > 1 && !increasing && !decreasing {
            return Err(invalid("sweep axis must be strictly monotone"));
        }
        if self.iters < 1 {
            return Err(invalid("iteration count must be at least 1"));
        }
        if let ChannelKind::GilbertElliott { genie_patching, .. } = self.channel {
            if genie_patching && self.staircase.is_none() {
                return Err(invalid("burst patching requires staircase framing"));
            }
        }
        Ok(())
    }

    /// Net information bits per transmitted channel bit.
    pub fn net_rate(&self) -> f64 {
        match self.staircase {
            Some(sp) => (self.code_dim - sp.stair_width) as f64 / self.code_len as f64,
            None => self.code_dim as f64 / self.code_len as f64,
        }
    }

    /// The rate entering the Eb/N0 to noise-variance conversion.
    pub fn energy_rate(&self) -> f64 {
        match self.energy_accounting {
            EnergyAccounting::ComponentRate => self.code_dim as f64 / self.code_len as f64,
            EnergyAccounting::NetRate => self.net_rate(),
        }
    }
}

/// One estimated point.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimResult {
    pub point: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub wall_seconds: f64,
    /// Diagnostic per-stair tally: stairs observed and stairs with errors.
    pub stair_blocks: u64,
    pub stair_block_errors: u64,
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Default, Clone, Copy)]
struct TrialOutcome {
    block_error: bool,
    bit_errors: u64,
    stair_blocks: u64,
    stair_block_errors: u64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    trials: u64,
    block_errors: u64,
    bit_errors: u64,
    stair_blocks: u64,
    stair_block_errors: u64,
}

/// Batched deterministic trial loop; stops at the first batch boundary
/// where the stop rule holds.
fn run_trials<F>(min_block_errors: u64, max_trials: u64, trial: F) -> Tally
where
    F: Fn(u64) -> TrialOutcome + Sync,
{
    let mut tally = Tally::default();
    while tally.trials < max_trials && tally.block_errors < min_block_errors {
        let upto = (tally.trials + TRIAL_BATCH).min(max_trials);
        let outcomes: Vec<TrialOutcome> =
            (tally.trials..upto).into_par_iter().map(&trial).collect();
        for o in outcomes {
            tally.trials += 1;
            tally.block_errors += u64::from(o.block_error);
            tally.bit_errors += o.bit_errors;
            tally.stair_blocks += o.stair_blocks;
            tally.stair_block_errors += o.stair_block_errors;
        }
    }
    tally
}

/// Estimate one point of the sweep axis.
pub fn run_point(cfg: &SimConfig, point_index: usize) -> Result<SimResult> {
    cfg.validate()?;
    let point = *cfg
        .sweep
        .get(point_index)
        .ok_or_else(|| invalid(format!("point index {point_index} outside the sweep")))?;
    let start = Instant::now();

    let (eb_n0_db, ge): (f64, Option<(GilbertElliottParams, BurstCorruption, bool)>) =
        match cfg.channel {
            ChannelKind::Awgn => (point, None),
            ChannelKind::GilbertElliott {
                eb_n0_db,
                delta,
                corruption,
                genie_patching,
            } => (
                eb_n0_db,
                Some((
                    GilbertElliottParams::new(delta, point)?,
                    corruption,
                    genie_patching,
                )),
            ),
        };
    let awgn = AwgnParams::new(eb_n0_db, cfg.energy_rate())?;
    let design_mean = cfg.design_llr_mean.unwrap_or_else(|| awgn.llr_mean());
    let code = CodeConfig::construct(cfg.code_len, cfg.code_dim, design_mean)?;
    let opts = DecodeOptions {
        combine: cfg.combine,
        llr_max: DecodeOptions::default().llr_max,
    };

    let stair_cfg = match cfg.staircase {
        Some(sp) => {
            let base = StaircaseConfig::new(code.clone(), sp.stair_width, sp.stair_count)?;
            Some(if sp.terminated {
                base.with_termination()
            } else {
                base
            })
        }
        None => None,
    };
    let payload_bits = match &stair_cfg {
        Some(sc) => sc.payload_len(),
        None => code.k(),
    };

    let trial = |t: u64| -> TrialOutcome {
        let trial_seed = derive_seed(cfg.seed, point_index as u64, t);
        let mut payload_rng = ChaCha8Rng::seed_from_u64(derive_seed(trial_seed, PAYLOAD_STREAM, 0));
        let channel_seed = derive_seed(trial_seed, CHANNEL_STREAM, 0);
        let payload: Vec<bool> = (0..payload_bits).map(|_| payload_rng.gen()).collect();

        match &stair_cfg {
            Some(sc) => {
                let frame = encode_frame(&payload, sc).expect("validated payload length");
                let bits = frame.to_flat();
                let (llrs, bursts) = match &ge {
                    None => (awgn_transmit(&bits, &awgn, channel_seed), Vec::new()),
                    Some((gep, corruption, _)) => {
                        ge_transmit_with(&bits, &awgn, gep, *corruption, channel_seed)
                    }
                };
                let mut llr_frame = Frame::from_flat(sc.stair_width(), sc.code().n(), &llrs)
                    .expect("frame geometry");
                if let Some((_, _, true)) = &ge {
                    let positions: Vec<_> =
                        bursts.iter().map(|&i| stream_index_to_pos(i, sc)).collect();
                    llr_frame = burst_patch(&llr_frame, &positions, sc, opts.llr_max)
                        .expect("validated burst coordinates");
                }
                let mut decoder = FrameDecoder::new(&llr_frame, sc, opts).expect("frame shape");
                decoder.iterate(cfg.iters).expect("validated iters");
                let decoded = decoder.payload();
                let bit_errors = decoded
                    .iter()
                    .zip(payload.iter())
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                let per_stair = sc.stair_width() * sc.payload_per_row();
                let stair_block_errors = decoded
                    .chunks(per_stair)
                    .zip(payload.chunks(per_stair))
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                TrialOutcome {
                    block_error: bit_errors > 0,
                    bit_errors,
                    stair_blocks: sc.stair_count() as u64,
                    stair_block_errors,
                }
            }
            None => {
                let codeword =
                    crate::codec::systematic_encode(&payload, &code).expect("payload length");
                let (llrs, _) = match &ge {
                    None => (awgn_transmit(&codeword, &awgn, channel_seed), Vec::new()),
                    Some((gep, corruption, _)) => {
                        ge_transmit_with(&codeword, &awgn, gep, *corruption, channel_seed)
                    }
                };
                let state = scan_decode_systematic_with(&llrs, &code, cfg.iters, &opts)
                    .expect("validated inputs");
                let decoded = state.hard_info_decisions(&code);
                let bit_errors = decoded
                    .iter()
                    .zip(payload.iter())
                    .filter(|(a, b)| a != b)
                    .count() as u64;
                TrialOutcome {
                    block_error: bit_errors > 0,
                    bit_errors,
                    stair_blocks: 1,
                    stair_block_errors: u64::from(bit_errors > 0),
                }
            }
        }
    };

    let tally = run_trials(cfg.min_block_errors, cfg.max_trials, trial);
    let (ci_lo, ci_hi) = wilson_interval(tally.block_errors, tally.trials, 1.96);
    Ok(SimResult {
        point,
        trials: tally.trials,
        block_errors: tally.block_errors,
        bit_errors: tally.bit_errors,
        bler: tally.block_errors as f64 / tally.trials as f64,
        ber: tally.bit_errors as f64 / (tally.trials as f64 * payload_bits as f64),
        ci_lo,
        ci_hi,
        seed: cfg.seed,
        wall_seconds: start.elapsed().as_secs_f64(),
        stair_blocks: tally.stair_blocks,
        stair_block_errors: tally.stair_block_errors,
    })
}

/// Estimate every point of the sweep, in axis order.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<SimResult>> {
    cfg.validate()?;
    (0..cfg.sweep.len()).map(|i| run_point(cfg, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg() -> SimConfig {
        SimConfig {
            code_len: 8,
            code_dim: 6,
            staircase: Some(StairParams {
                stair_width: 3,
                stair_count: 2,
                terminated: false,
            }),
            iters: 2,
            channel: ChannelKind::Awgn,
            sweep: vec![4.0],
            min_block_errors: 5,
            max_trials: 200,
            seed: 99,
            combine: CheckCombine::Exact,
            energy_accounting: EnergyAccounting::NetRate,
            design_llr_mean: None,
        }
    }

    #[test]
    fn saturated_point_has_no_errors_and_hits_the_trial_cap() {
        let mut cfg = tiny_cfg();
        cfg.sweep = vec![20.0];
        cfg.max_trials = 50;
        let r = run_point(&cfg, 0).unwrap();
        assert_eq!(r.block_errors, 0);
        assert_eq!(r.bler, 0.0);
        assert_eq!(r.trials, 50);
        assert_eq!(r.ci_lo, 0.0);
        assert!(r.ci_hi > 0.0);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = tiny_cfg();
        let a = run_point(&cfg, 0).unwrap();
        let b = run_point(&cfg, 0).unwrap();
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.block_errors, b.block_errors);
        assert_eq!(a.bit_errors, b.bit_errors);
        assert_eq!(a.bler, b.bler);
        assert_eq!(a.ber, b.ber);
        assert_eq!(a.stair_block_errors, b.stair_block_errors);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = tiny_cfg();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_point(&cfg, 0).unwrap());
        let two = rayon::ThreadPoolBuilder::new()
            .num_threads(2)
            .build()
            .unwrap()
            .install(|| run_point(&cfg, 0).unwrap());
        assert_eq!(one.trials, two.trials);
        assert_eq!(one.block_errors, two.block_errors);
        assert_eq!(one.bit_errors, two.bit_errors);
    }

    #[test]
    fn component_mode_runs_and_degrades_with_noise() {
        let mut cfg = tiny_cfg();
        cfg.staircase = None;
        cfg.code_len = 64;
        cfg.code_dim = 53;
        cfg.sweep = vec![-2.0, 8.0];
        cfg.min_block_errors = 10;
        cfg.max_trials = 400;
        let noisy = run_point(&cfg, 0).unwrap();
        let clean = run_point(&cfg, 1).unwrap();
        assert!(noisy.bler > clean.bler);
    }

    #[test]
    fn ge_channel_with_patching_runs() {
        let mut cfg = tiny_cfg();
        cfg.channel = ChannelKind::GilbertElliott {
            eb_n0_db: 6.0,
            delta: 4.0,
            corruption: BurstCorruption::Obliterate,
            genie_patching: true,
        };
        cfg.sweep = vec![0.05];
        let r = run_point(&cfg, 0).unwrap();
        assert!(r.trials > 0);
    }

    #[test]
    fn patching_without_staircase_is_rejected() {
        let mut cfg = tiny_cfg();
        cfg.staircase = None;
        cfg.channel = ChannelKind::GilbertElliott {
            eb_n0_db: 6.0,
            delta: 4.0,
            corruption: BurstCorruption::Obliterate,
            genie_patching: true,
        };
        cfg.sweep = vec![0.05];
        assert!(run_point(&cfg, 0).is_err());
    }

    #[test]
    fn patched_decoding_degrades_gracefully_with_burst_load() {
        let cfg = SimConfig {
            code_len: 64,
            code_dim: 53,
            staircase: Some(StairParams {
                stair_width: 20,
                stair_count: 3,
                terminated: false,
            }),
            iters: 3,
            channel: ChannelKind::GilbertElliott {
                eb_n0_db: 8.0,
                delta: 4.0,
                corruption: BurstCorruption::Obliterate,
                genie_patching: true,
            },
            sweep: vec![0.002, 0.03],
            min_block_errors: 40,
            max_trials: 400,
            seed: 404,
            combine: CheckCombine::scaled_min_sum(),
            energy_accounting: EnergyAccounting::ComponentRate,
            design_llr_mean: None,
        };
        let results = run_sweep(&cfg).unwrap();
        assert!(
            results[0].bler < results[1].bler,
            "light load {} vs heavy load {}",
            results[0].bler,
            results[1].bler
        );
        assert!(results[1].bler < 1.0, "heavy load should not saturate here");
    }

    #[test]
    fn sweep_validation() {
        let mut cfg = tiny_cfg();
        cfg.sweep = vec![];
        assert!(run_sweep(&cfg).is_err());
        cfg.sweep = vec![4.0, 4.0];
        assert!(run_sweep(&cfg).is_err());
        cfg.sweep = vec![4.0, 5.0, 4.5];
        assert!(run_sweep(&cfg).is_err());
        cfg.sweep = vec![5.0, 4.5, 4.0];
        cfg.max_trials = 20;
        assert!(run_sweep(&cfg).is_ok());
    }

    #[test]
    fn sweep_points_equal_individual_runs() {
        let mut cfg = tiny_cfg();
        cfg.sweep = vec![3.0, 6.0];
        cfg.max_trials = 60;
        let sweep = run_sweep(&cfg).unwrap();
        for (i, r) in sweep.iter().enumerate() {
            let single = run_point(&cfg, i).unwrap();
            assert_eq!(r.trials, single.trials);
            assert_eq!(r.block_errors, single.block_errors);
            assert_eq!(r.bit_errors, single.bit_errors);
        }
    }

    #[test]
    fn wilson_contains_the_point_estimate() {
        for (e, n) in [(0u64, 10u64), (10, 10), (3, 17), (100, 1000)] {
            let (lo, hi) = wilson_interval(e, n, 1.96);
            let p = e as f64 / n as f64;
            assert!(lo <= p && p <= hi, "({e}, {n})");
        }
        assert_eq!(wilson_interval(0, 10, 1.96).0, 0.0);
        assert_eq!(wilson_interval(10, 10, 1.96).1, 1.0);
    }

    #[test]
    fn harness_interval_calibration_on_bernoulli() {
        // Estimate a known Bernoulli(p) with fixed-size runs; the Wilson
        // interval must cover p about 95% of the time.
        let p = 0.1;
        let runs = 300;
        let trials_per_run = 400u64;
        let mut covered = 0;
        for run in 0..runs {
            let tally = run_trials(u64::MAX, trials_per_run, |t| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(777, run as u64, t));
                TrialOutcome {
                    block_error: rng.gen_bool(p),
                    bit_errors: 0,
                    stair_blocks: 1,
                    stair_block_errors: 0,
                }
            });
            let (lo, hi) = wilson_interval(tally.block_errors, tally.trials, 1.96);
            if lo <= p && p <= hi {
                covered += 1;
            }
        }
        let coverage = covered as f64 / runs as f64;
        assert!(coverage > 0.90, "coverage {coverage}");
    }
}
