//! Systematic polar encoding and the two-stage SCAN soft decoder.
//!
//! Encoding uses the two-step method: transform the information bits with
//! zeros at the frozen slots, re-zero the frozen slots, transform again.
//! The codeword then carries the information bits unchanged at the
//! information positions.
//!
//! Decoding runs soft message passing on the polarization graph with the
//! successive-cancellation schedule, twice. Stage one works on the graph
//! whose source side is the frozen-constrained transform input and yields
//! soft estimates of it; stage two pushes those estimates (frozen slots
//! masked to zero, since their known value already entered stage one)
//! through a second copy of the graph, whose source side is then the
//! original pre-transform word: information bits at the information
//! positions, zeros at the frozen ones. The stage-two source row therefore
//! delivers both the hard decisions and the soft output handed to the
//! staircase layer.

use crate::construct::CodeConfig;
use crate::error::{invalid, Error, Result};
use crate::llr::{hard_decision, saturate, CheckCombine, DEFAULT_LLR_MAX};

/// Apply the butterfly transform in place (natural order, self-inverse).
pub fn polar_transform(bits: &mut [bool]) -> Result<()> {
    if !bits.len().is_power_of_two() || bits.is_empty() {
        return Err(invalid(format!(
            "transform length {} is not a power of two",
            bits.len()
        )));
    }
    let n = bits.len();
    let mut step = 1;
    while step < n {
        let mut base = 0;
        while base < n {
            for j in base..base + step {
                bits[j] ^= bits[j + step];
            }
            base += 2 * step;
        }
        step *= 2;
    }
    Ok(())
}

/// Systematically encode `info` (most reliable position first).
///
/// `info[j]` lands at codeword position `cfg.info_order()[j]`; the frozen
/// positions receive the matching check bits.
pub fn systematic_encode(info: &[bool], cfg: &CodeConfig) -> Result<Vec<bool>> {
    if info.len() != cfg.k() {
        return Err(Error::LengthMismatch {
            expected: cfg.k(),
            got: info.len(),
        });
    }
    let mut word = vec![false; cfg.n()];
    for (&pos, &bit) in cfg.info_order().iter().zip(info.iter()) {
        word[pos] = bit;
    }
    polar_transform(&mut word)?;
    for &pos in cfg.frozen_order() {
        word[pos] = false;
    }
    polar_transform(&mut word)?;
    Ok(word)
}

/// Check that a word is a codeword: the inverse transform must vanish on
/// every frozen position.
pub fn is_codeword(word: &[bool], cfg: &CodeConfig) -> Result<bool> {
    if word.len() != cfg.n() {
        return Err(Error::LengthMismatch {
            expected: cfg.n(),
            got: word.len(),
        });
    }
    let mut v = word.to_vec();
    polar_transform(&mut v)?;
    Ok(cfg.frozen_order().iter().all(|&pos| !v[pos]))
}

/// Decoder knobs: check-node combine rule and the saturation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeOptions {
    pub combine: CheckCombine,
    pub llr_max: f64,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            combine: CheckCombine::Exact,
            llr_max: DEFAULT_LLR_MAX,
        }
    }
}

impl DecodeOptions {
    pub fn scaled_min_sum() -> Self {
        DecodeOptions {
            combine: CheckCombine::scaled_min_sum(),
            ..Default::default()
        }
    }
}

/// The four message planes of the two-stage decoder.
///
/// Each plane has `levels + 1` rows of `N` LLRs; row 0 faces the channel,
/// row `levels` faces the source word. The planes persist across calls so
/// a decode can warm-start from the previous iteration's messages.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftState {
    levels: usize,
    width: usize,
    l1: Vec<f64>,
    r1: Vec<f64>,
    l2: Vec<f64>,
    r2: Vec<f64>,
    iteration_count: u32,
}

impl SoftState {
    pub fn new(cfg: &CodeConfig) -> SoftState {
        SoftState::with_options(cfg, &DecodeOptions::default())
    }

    pub fn with_options(cfg: &CodeConfig, opts: &DecodeOptions) -> SoftState {
        let levels = cfg.levels();
        let width = cfg.n();
        let plane = vec![0.0; (levels + 1) * width];
        let mut state = SoftState {
            levels,
            width,
            l1: plane.clone(),
            r1: plane.clone(),
            l2: plane.clone(),
            r2: plane,
            iteration_count: 0,
        };
        state.reset_source_priors(cfg, opts.llr_max);
        state
    }

    fn reset_source_priors(&mut self, cfg: &CodeConfig, llr_max: f64) {
        let row = self.levels * self.width;
        for i in 0..self.width {
            let prior = if cfg.is_info(i) { 0.0 } else { llr_max };
            self.r1[row + i] = prior;
            self.r2[row + i] = prior;
        }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn iteration_count(&self) -> u32 {
        self.iteration_count
    }

    /// Row `row` of a plane; row 0 is the channel side, row `levels` the
    /// source side.
    pub fn l1_row(&self, row: usize) -> &[f64] {
        &self.l1[row * self.width..(row + 1) * self.width]
    }

    pub fn r1_row(&self, row: usize) -> &[f64] {
        &self.r1[row * self.width..(row + 1) * self.width]
    }

    pub fn l2_row(&self, row: usize) -> &[f64] {
        &self.l2[row * self.width..(row + 1) * self.width]
    }

    pub fn r2_row(&self, row: usize) -> &[f64] {
        &self.r2[row * self.width..(row + 1) * self.width]
    }

    /// Decision statistic at a codeword position: stage-two source belief
    /// plus its prior.
    pub fn decision_llr(&self, pos: usize) -> f64 {
        let row = self.levels * self.width;
        self.l2[row + pos] + self.r2[row + pos]
    }

    /// Soft output at a position, as handed to the staircase combine.
    /// Populated for information positions once a decode has run.
    pub fn extrinsic(&self, pos: usize) -> f64 {
        self.r2[self.levels * self.width + pos]
    }

    /// Hard decisions at the information positions, most reliable first.
    pub fn hard_info_decisions(&self, cfg: &CodeConfig) -> Vec<bool> {
        cfg.info_order()
            .iter()
            .map(|&pos| hard_decision(self.decision_llr(pos)))
            .collect()
    }

    #[doc(hidden)]
    pub fn set_extrinsic_for_test(&mut self, pos: usize, value: f64) {
        let row = self.levels * self.width;
        self.r2[row + pos] = value;
    }
}

/// Decode a fresh state with default options.
pub fn scan_decode_systematic(
    channel_llrs: &[f64],
    cfg: &CodeConfig,
    iters: u32,
) -> Result<SoftState> {
    scan_decode_systematic_with(channel_llrs, cfg, iters, &DecodeOptions::default())
}

/// Decode a fresh state with explicit options.
pub fn scan_decode_systematic_with(
    channel_llrs: &[f64],
    cfg: &CodeConfig,
    iters: u32,
    opts: &DecodeOptions,
) -> Result<SoftState> {
    let mut state = SoftState::with_options(cfg, opts);
    scan_decode_continue(&mut state, channel_llrs, cfg, iters, opts)?;
    Ok(state)
}

/// Run `iters` further sweeps on an existing state with new channel LLRs.
///
/// Interior messages persist, which is what the staircase decoder relies on
/// when it revisits a stair with updated channel observations.
pub fn scan_decode_continue(
    state: &mut SoftState,
    channel_llrs: &[f64],
    cfg: &CodeConfig,
    iters: u32,
    opts: &DecodeOptions,
) -> Result<()> {
    if channel_llrs.len() != cfg.n() {
        return Err(Error::LengthMismatch {
            expected: cfg.n(),
            got: channel_llrs.len(),
        });
    }
    if state.width != cfg.n() || state.levels != cfg.levels() {
        return Err(invalid("soft state shape does not match the code"));
    }
    if iters < 1 {
        return Err(invalid("iteration count must be at least 1"));
    }
    if channel_llrs.iter().any(|l| l.is_nan()) {
        return Err(invalid("channel LLRs must not be NaN"));
    }
    let w = state.width;
    let lv = state.levels;
    let src = lv * w;

    for (slot, &l) in state.l1[..w].iter_mut().zip(channel_llrs.iter()) {
        *slot = saturate(l, opts.llr_max);
    }
    for _ in 0..iters {
        run_sweep(&mut state.l1, &mut state.r1, w, opts);
    }

    // Stage two input: stage-one source beliefs with the frozen slots
    // masked out. Their known zeros already acted through the stage-one
    // priors; the stage-two priors re-assert them on the far side.
    for i in 0..w {
        state.l2[i] = if cfg.is_info(i) {
            state.l1[src + i]
        } else {
            0.0
        };
    }
    for i in 0..w {
        state.r2[src + i] = if cfg.is_info(i) { 0.0 } else { opts.llr_max };
    }
    for _ in 0..iters {
        run_sweep(&mut state.l2, &mut state.r2, w, opts);
    }
    // Publish the soft output where the staircase combine reads it.
    for &pos in cfg.info_order() {
        state.r2[src + pos] = state.l2[src + pos];
    }
    state.iteration_count += iters;
    Ok(())
}

trait CombineRule: Copy {
    fn combine(self, a: f64, b: f64) -> f64;
}

#[derive(Clone, Copy)]
struct ExactRule;

impl CombineRule for ExactRule {
    #[inline(always)]
    fn combine(self, a: f64, b: f64) -> f64 {
        crate::llr::boxplus(a, b)
    }
}

#[derive(Clone, Copy)]
struct MinSumRule {
    scale: f64,
}

impl CombineRule for MinSumRule {
    #[inline(always)]
    fn combine(self, a: f64, b: f64) -> f64 {
        let m = a.abs().min(b.abs()) * self.scale;
        if (a < 0.0) != (b < 0.0) {
            -m
        } else {
            m
        }
    }
}

fn run_sweep(l: &mut [f64], r: &mut [f64], w: usize, opts: &DecodeOptions) {
    match opts.combine {
        CheckCombine::Exact => sweep(l, r, 0, 0, w, w, ExactRule, opts.llr_max),
        CheckCombine::ScaledMinSum { scale } => {
            sweep(l, r, 0, 0, w, w, MinSumRule { scale }, opts.llr_max)
        }
    }
}

/// One SCAN sweep over the block `[base, base + span)` between rows `row`
/// and `row + 1` and everything source-ward of it.
///
/// The order is the successive-cancellation schedule: soft-decode the
/// check-branch child, then the variable-branch child with the refreshed
/// priors, then push the priors toward the channel.
#[allow(clippy::too_many_arguments)]
fn sweep<C: CombineRule>(
    l: &mut [f64],
    r: &mut [f64],
    row: usize,
    base: usize,
    span: usize,
    w: usize,
    comb: C,
    max: f64,
) {
    if span == 1 {
        return;
    }
    let half = span / 2;
    let cur = row * w + base;
    let nxt = (row + 1) * w + base;

    for j in 0..half {
        let c = l[cur + j];
        let d = l[cur + j + half];
        let rb = r[nxt + j + half];
        l[nxt + j] = saturate(comb.combine(c, saturate(d + rb, max)), max);
    }
    sweep(l, r, row + 1, base, half, w, comb, max);

    for j in 0..half {
        let c = l[cur + j];
        let d = l[cur + j + half];
        let ra = r[nxt + j];
        l[nxt + j + half] = saturate(comb.combine(c, ra) + d, max);
    }
    sweep(l, r, row + 1, base + half, half, w, comb, max);

    for j in 0..half {
        let c = l[cur + j];
        let d = l[cur + j + half];
        let ra = r[nxt + j];
        let rb = r[nxt + j + half];
        r[cur + j] = saturate(comb.combine(ra, saturate(rb + d, max)), max);
        r[cur + j + half] = saturate(comb.combine(ra, c) + rb, max);
    }
}
