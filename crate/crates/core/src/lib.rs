//! Polar-staircase forward error correction.
//!
//! Systematic polar component codes with SCAN soft decoding, arranged in a
//! staircase of overlapping stairs and decoded with an iterative sliding
//! window. Includes binary-input AWGN and Gilbert-Elliott burst channel
//! models, a burst-patching preprocessor that exploits the retransmitted
//! overlap, a decoding-complexity estimator, and a reproducible Monte Carlo
//! BLER/BER harness behind the `polar-staircase` command-line tool.

pub mod channel;
pub mod codec;
pub mod complexity;
pub mod construct;
mod error;
pub mod frameio;
pub mod llr;
pub mod sim;
pub mod staircase;

pub use channel::{
    awgn_transmit, derive_seed, detect_bursts_by_magnitude, ge_transmit, ge_transmit_with,
    AwgnParams, BurstCorruption, GilbertElliottParams,
};
pub use codec::{
    is_codeword, polar_transform, scan_decode_continue, scan_decode_systematic,
    scan_decode_systematic_with, systematic_encode, DecodeOptions, SoftState,
};
pub use complexity::{complexity_estimate, ComplexityTable, OpCounts, Ratio};
pub use construct::{
    error_prob, ga_evolve, mc_density_evolution, reliability_profile, select_info_set, CodeConfig,
    ReliabilityProfile,
};
pub use error::{Error, Result};
pub use llr::{boxplus, hard_decision, CheckCombine, DEFAULT_LLR_MAX};
pub use sim::{
    run_point, run_sweep, wilson_interval, ChannelKind, EnergyAccounting, SimConfig, SimResult,
    StairParams,
};
pub use staircase::{
    burst_patch, combine_extrinsic, decode_frame, decode_frame_with, encode_frame, make_schedule,
    stream_index_to_pos, BurstPos, Frame, FrameDecoder, OverlapSchedule, StaircaseConfig,
};
