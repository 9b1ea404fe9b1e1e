//! Staircase framing over systematic polar component codes.
//!
//! Each stair is M parallel component codewords stored in reliability
//! order: columns 1..K hold the information bits by descending position
//! reliability, columns K+1..N the check bits. The last M columns of a
//! stair (its least reliable information bits plus all check bits) are
//! retransmitted as the first M columns (the most reliable information
//! positions) of the next stair, reversed and transposed, so the weakest
//! parts of every codeword get a second, well-protected copy.
//!
//! Decoding slides from the last stair to the first: each stair's channel
//! LLRs are refreshed from the originals, the successor's soft outputs are
//! added onto the overlap columns, and every row takes one warm-started
//! SCAN sweep. Burst patching runs beforehand and swaps a flagged overlap
//! observation for its duplicate from the neighbouring stair.

use crate::codec::{scan_decode_continue, DecodeOptions, SoftState};
use crate::construct::CodeConfig;
use crate::error::{invalid, Error, Result};
use crate::llr::{hard_decision, saturate};

/// Stair geometry over a component code.
#[derive(Debug, Clone)]
pub struct StaircaseConfig {
    code: CodeConfig,
    stair_width: usize,
    stair_count: usize,
    terminated: bool,
}

impl StaircaseConfig {
    /// Validates the stair-width window `N - K < M <= N/2` and `M <= K`.
    pub fn new(
        code: CodeConfig,
        stair_width: usize,
        stair_count: usize,
    ) -> Result<StaircaseConfig> {
        let (n, k) = (code.n(), code.k());
        if stair_width <= n - k || stair_width > n / 2 {
            return Err(invalid(format!(
                "stair width {stair_width} outside ({}, {}]",
                n - k,
                n / 2
            )));
        }
        if stair_width > k {
            return Err(invalid(format!(
                "stair width {stair_width} exceeds information length {k}"
            )));
        }
        if stair_count == 0 {
            return Err(invalid("stair count must be at least 1"));
        }
        Ok(StaircaseConfig {
            code,
            stair_width,
            stair_count,
            terminated: false,
        })
    }

    /// Append one all-known stair after the last payload stair, giving the
    /// final overlap block a protected second copy.
    pub fn with_termination(mut self) -> StaircaseConfig {
        self.terminated = true;
        self
    }

    pub fn code(&self) -> &CodeConfig {
        &self.code
    }

    /// M, rows per stair.
    pub fn stair_width(&self) -> usize {
        self.stair_width
    }

    /// k, payload stairs (the terminator stair not included).
    pub fn stair_count(&self) -> usize {
        self.stair_count
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// Stairs actually transmitted.
    pub fn transmitted_stairs(&self) -> usize {
        self.stair_count + usize::from(self.terminated)
    }

    /// Overlapped information bits per codeword, M - (N - K).
    pub fn overlap_info_count(&self) -> usize {
        self.stair_width - (self.code.n() - self.code.k())
    }

    /// Fresh payload bits per codeword, K - M.
    pub fn payload_per_row(&self) -> usize {
        self.code.k() - self.stair_width
    }

    /// Total payload bits, k * M * (K - M).
    pub fn payload_len(&self) -> usize {
        self.stair_count * self.stair_width * self.payload_per_row()
    }

    /// New information bits per transmitted stair bit, (K - M)/N.
    pub fn frame_rate(&self) -> f64 {
        self.payload_per_row() as f64 / self.code.n() as f64
    }

    /// Exact numerator and denominator of [`Self::frame_rate`].
    pub fn frame_rate_exact(&self) -> (usize, usize) {
        (self.payload_per_row(), self.code.n())
    }
}

/// Where the overlap lives and how it maps between adjacent stairs.
///
/// Donor slot `t` of donor row `j` (stair column N-M+1+t) reappears in the
/// next stair at row `t`, receiver column M-j: the block is transposed
/// with the donor rows reversed.
#[derive(Debug, Clone)]
pub struct OverlapSchedule {
    stair_width: usize,
    col_to_pos: Vec<usize>,
    donor_positions: Vec<usize>,
    receiver_positions: Vec<usize>,
}

impl OverlapSchedule {
    pub fn stair_width(&self) -> usize {
        self.stair_width
    }

    /// Codeword position stored in a stair column.
    pub fn col_to_pos(&self) -> &[usize] {
        &self.col_to_pos
    }

    /// Codeword positions of the M donated slots, in stair-column order:
    /// the least reliable information bits first, then the check bits.
    pub fn donor_positions(&self) -> &[usize] {
        &self.donor_positions
    }

    /// Codeword positions of the M receiving slots: the most reliable
    /// information positions.
    pub fn receiver_positions(&self) -> &[usize] {
        &self.receiver_positions
    }

    /// Donor (row, slot) -> receiver (row, column) in the next stair.
    pub fn donor_to_receiver(&self, donor_row: usize, donor_slot: usize) -> (usize, usize) {
        (donor_slot, self.stair_width - 1 - donor_row)
    }

    /// Receiver (row, column) -> donor (row, slot) in the previous stair.
    pub fn receiver_to_donor(&self, receiver_row: usize, receiver_col: usize) -> (usize, usize) {
        (self.stair_width - 1 - receiver_col, receiver_row)
    }
}

/// Build the overlap schedule for a staircase geometry.
pub fn make_schedule(cfg: &StaircaseConfig) -> OverlapSchedule {
    let code = cfg.code();
    let (n, k, m) = (code.n(), code.k(), cfg.stair_width());
    let mut col_to_pos = Vec::with_capacity(n);
    col_to_pos.extend_from_slice(code.info_order());
    col_to_pos.extend_from_slice(code.frozen_order());
    let donor_positions = col_to_pos[n - m..].to_vec();
    let receiver_positions = col_to_pos[..m].to_vec();
    debug_assert_eq!(donor_positions.len(), m);
    debug_assert_eq!(
        donor_positions.iter().filter(|&&p| code.is_info(p)).count(),
        cfg.overlap_info_count()
    );
    debug_assert_eq!(k - (n - m), cfg.overlap_info_count());
    OverlapSchedule {
        stair_width: m,
        col_to_pos,
        donor_positions,
        receiver_positions,
    }
}

/// A k-stair matrix of bits (encoder side) or LLRs (decoder side), stored
/// row-major per stair in reliability-ordered stair columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    stair_width: usize,
    width: usize,
    stairs: Vec<Vec<T>>,
}

impl<T: Copy> Frame<T> {
    pub fn from_stairs(stair_width: usize, width: usize, stairs: Vec<Vec<T>>) -> Result<Frame<T>> {
        for (i, s) in stairs.iter().enumerate() {
            if s.len() != stair_width * width {
                return Err(invalid(format!(
                    "stair {i} holds {} entries, expected {}",
                    s.len(),
                    stair_width * width
                )));
            }
        }
        Ok(Frame {
            stair_width,
            width,
            stairs,
        })
    }

    /// Rebuild from the transmission order: stair by stair, row-major.
    pub fn from_flat(stair_width: usize, width: usize, data: &[T]) -> Result<Frame<T>> {
        let per = stair_width * width;
        if per == 0 || !data.len().is_multiple_of(per) || data.is_empty() {
            return Err(invalid(format!(
                "flat frame of {} entries does not tile {stair_width} x {width} stairs",
                data.len()
            )));
        }
        Ok(Frame {
            stair_width,
            width,
            stairs: data.chunks_exact(per).map(|c| c.to_vec()).collect(),
        })
    }

    pub fn num_stairs(&self) -> usize {
        self.stairs.len()
    }

    pub fn stair_width(&self) -> usize {
        self.stair_width
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn stair(&self, s: usize) -> &[T] {
        &self.stairs[s]
    }

    pub fn get(&self, stair: usize, row: usize, col: usize) -> T {
        self.stairs[stair][row * self.width + col]
    }

    pub fn set(&mut self, stair: usize, row: usize, col: usize, value: T) {
        self.stairs[stair][row * self.width + col] = value;
    }

    /// Transmission order: stair by stair, row-major within a stair.
    pub fn to_flat(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.num_stairs() * self.stair_width * self.width);
        for s in &self.stairs {
            out.extend_from_slice(s);
        }
        out
    }

    /// Total transmitted symbols.
    pub fn len(&self) -> usize {
        self.num_stairs() * self.stair_width * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.stairs.is_empty()
    }
}

fn check_frame_shape<T: Copy>(frame: &Frame<T>, cfg: &StaircaseConfig) -> Result<()> {
    if frame.num_stairs() != cfg.transmitted_stairs()
        || frame.stair_width() != cfg.stair_width()
        || frame.width() != cfg.code().n()
    {
        return Err(invalid(format!(
            "frame shape {}x{}x{} does not match configuration {}x{}x{}",
            frame.num_stairs(),
            frame.stair_width(),
            frame.width(),
            cfg.transmitted_stairs(),
            cfg.stair_width(),
            cfg.code().n()
        )));
    }
    Ok(())
}

/// Encode a payload into a staircase frame.
///
/// Stair 1 carries zeros in its receiver columns; every later stair copies
/// the previous stair's overlap block through the schedule, appends fresh
/// payload bits in columns M+1..K, and completes each row systematically.
pub fn encode_frame(payload: &[bool], cfg: &StaircaseConfig) -> Result<Frame<bool>> {
    if payload.len() != cfg.payload_len() {
        return Err(Error::LengthMismatch {
            expected: cfg.payload_len(),
            got: payload.len(),
        });
    }
    let code = cfg.code();
    let (n, k, m) = (code.n(), code.k(), cfg.stair_width());
    let fresh = cfg.payload_per_row();
    let schedule = make_schedule(cfg);
    let mut stairs: Vec<Vec<bool>> = Vec::with_capacity(cfg.transmitted_stairs());
    let mut info = vec![false; k];
    for s in 0..cfg.transmitted_stairs() {
        let mut stair = vec![false; m * n];
        for row in 0..m {
            for (col, slot) in info.iter_mut().enumerate() {
                *slot = if col < m {
                    if s == 0 {
                        false
                    } else {
                        let (dj, dt) = schedule.receiver_to_donor(row, col);
                        stairs[s - 1][dj * n + (n - m) + dt]
                    }
                } else if s < cfg.stair_count() {
                    payload[(s * m + row) * fresh + (col - m)]
                } else {
                    false
                };
            }
            let codeword = crate::codec::systematic_encode(&info, code)?;
            for (col, &pos) in schedule.col_to_pos().iter().enumerate() {
                stair[row * n + col] = codeword[pos];
            }
        }
        stairs.push(stair);
    }
    Frame::from_stairs(m, n, stairs)
}

/// Add the successor stair's soft outputs onto a stair's overlap columns.
///
/// `stair_llrs` is one stair in stair-column order (M rows by N columns,
/// row-major); `next_states` are the successor stair's M decoder states.
pub fn combine_extrinsic(
    stair_llrs: &mut [f64],
    next_states: &[SoftState],
    schedule: &OverlapSchedule,
    llr_max: f64,
) -> Result<()> {
    let m = schedule.stair_width();
    if next_states.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: next_states.len(),
        });
    }
    if !stair_llrs.len().is_multiple_of(m) || stair_llrs.is_empty() {
        return Err(invalid("stair LLR block does not tile M rows"));
    }
    let n = stair_llrs.len() / m;
    for donor_row in 0..m {
        for donor_slot in 0..m {
            let (rr, rc) = schedule.donor_to_receiver(donor_row, donor_slot);
            let pos = schedule.col_to_pos()[rc];
            let cell = donor_row * n + (n - m) + donor_slot;
            stair_llrs[cell] = saturate(stair_llrs[cell] + next_states[rr].extrinsic(pos), llr_max);
        }
    }
    Ok(())
}

/// Iterative sliding-window decoder with persistent per-row soft states.
pub struct FrameDecoder {
    cfg: StaircaseConfig,
    schedule: OverlapSchedule,
    opts: DecodeOptions,
    originals: Vec<Vec<f64>>,
    states: Vec<Vec<SoftState>>,
    iterations_run: u32,
}

impl FrameDecoder {
    pub fn new(
        frame: &Frame<f64>,
        cfg: &StaircaseConfig,
        opts: DecodeOptions,
    ) -> Result<FrameDecoder> {
        check_frame_shape(frame, cfg)?;
        let code = cfg.code();
        let mut originals = Vec::with_capacity(frame.num_stairs());
        for s in 0..frame.num_stairs() {
            let mut stair: Vec<f64> = frame.stair(s).to_vec();
            for v in stair.iter_mut() {
                if v.is_nan() {
                    return Err(invalid("frame LLRs must not be NaN"));
                }
                *v = saturate(*v, opts.llr_max);
            }
            originals.push(stair);
        }
        let states = (0..frame.num_stairs())
            .map(|_| {
                (0..cfg.stair_width())
                    .map(|_| SoftState::with_options(code, &opts))
                    .collect()
            })
            .collect();
        Ok(FrameDecoder {
            cfg: cfg.clone(),
            schedule: make_schedule(cfg),
            opts,
            originals,
            states,
            iterations_run: 0,
        })
    }

    pub fn iterations_run(&self) -> u32 {
        self.iterations_run
    }

    /// Run `outer_iters` sliding-window sweeps (last stair to first, one
    /// warm SCAN sweep per row, overlap columns refreshed from the original
    /// observations plus the successor's current soft outputs).
    pub fn iterate(&mut self, outer_iters: u32) -> Result<()> {
        if outer_iters < 1 {
            return Err(invalid("iteration count must be at least 1"));
        }
        let code = self.cfg.code().clone();
        let (n, m) = (code.n(), self.cfg.stair_width());
        let total = self.cfg.transmitted_stairs();
        let mut work = vec![0.0f64; m * n];
        let mut chan = vec![0.0f64; n];
        for _ in 0..outer_iters {
            for stair in (0..total).rev() {
                work.copy_from_slice(&self.originals[stair]);
                if self.cfg.terminated() && stair == total - 1 {
                    // The terminator's payload columns are known zeros.
                    for row in 0..m {
                        for col in m..code.k() {
                            work[row * n + col] = self.opts.llr_max;
                        }
                    }
                }
                if stair + 1 < total {
                    let (head, tail) = self.states.split_at_mut(stair + 1);
                    let _ = head;
                    combine_extrinsic(&mut work, &tail[0], &self.schedule, self.opts.llr_max)?;
                }
                for row in 0..m {
                    for (col, &pos) in self.schedule.col_to_pos().iter().enumerate() {
                        chan[pos] = work[row * n + col];
                    }
                    scan_decode_continue(
                        &mut self.states[stair][row],
                        &chan,
                        &code,
                        1,
                        &self.opts,
                    )?;
                }
            }
            self.iterations_run += 1;
        }
        Ok(())
    }

    /// Hard decision for the bit stored at a stair cell (information
    /// columns only).
    pub fn decision_at(&self, stair: usize, row: usize, col: usize) -> bool {
        self.decision(stair, row, col)
    }

    fn decision(&self, stair: usize, row: usize, col: usize) -> bool {
        let pos = self.schedule.col_to_pos()[col];
        hard_decision(self.states[stair][row].decision_llr(pos))
    }

    /// Extract the payload from each bit's own stair.
    ///
    /// An overlapped bit also has a receiver copy in the next stair, but
    /// the donor-side decision is the better informed one: the combine
    /// step hands it the receiver stair's full belief on top of its own
    /// observation, while information never flows the other way.
    pub fn payload(&self) -> Vec<bool> {
        let code = self.cfg.code();
        let (k, m) = (code.k(), self.cfg.stair_width());
        let mut out = Vec::with_capacity(self.cfg.payload_len());
        for stair in 0..self.cfg.stair_count() {
            for row in 0..m {
                for col in m..k {
                    out.push(self.decision(stair, row, col));
                }
            }
        }
        out
    }
}

/// Decode a frame of channel LLRs with `i_max` sliding-window iterations.
pub fn decode_frame(frame: &Frame<f64>, cfg: &StaircaseConfig, i_max: u32) -> Result<Vec<bool>> {
    decode_frame_with(frame, cfg, i_max, DecodeOptions::default())
}

pub fn decode_frame_with(
    frame: &Frame<f64>,
    cfg: &StaircaseConfig,
    i_max: u32,
    opts: DecodeOptions,
) -> Result<Vec<bool>> {
    let mut decoder = FrameDecoder::new(frame, cfg, opts)?;
    decoder.iterate(i_max)?;
    Ok(decoder.payload())
}

/// A flagged burst observation: stair, row, and stair column, all 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BurstPos {
    pub stair: usize,
    pub row: usize,
    pub col: usize,
}

/// Map a transmission-stream symbol index to its frame coordinates.
pub fn stream_index_to_pos(index: usize, cfg: &StaircaseConfig) -> BurstPos {
    let n = cfg.code().n();
    let per = cfg.stair_width() * n;
    BurstPos {
        stair: index / per,
        row: (index % per) / n,
        col: index % n,
    }
}

/// Replace flagged overlap observations with their duplicates from the
/// neighbouring stair.
///
/// Receiver-side bursts (column <= M) take the previous stair's donor
/// observation; donor-side bursts (column > N-M) take the next stair's
/// receiver observation. A middle column has no duplicate and stays put,
/// as does any cell whose duplicate is itself flagged. The first stair's
/// receiver columns duplicate the known zero boundary and are pinned to
/// the saturation LLR; the last transmitted stair's donor columns have no
/// successor and stay unchanged.
pub fn burst_patch(
    frame: &Frame<f64>,
    bursts: &[BurstPos],
    cfg: &StaircaseConfig,
    llr_max: f64,
) -> Result<Frame<f64>> {
    check_frame_shape(frame, cfg)?;
    let code = cfg.code();
    let (n, m) = (code.n(), cfg.stair_width());
    let total = cfg.transmitted_stairs();
    let mut flagged = vec![false; total * m * n];
    let cell = |b: &BurstPos| (b.stair * m + b.row) * n + b.col;
    for b in bursts {
        if b.stair >= total || b.row >= m || b.col >= n {
            return Err(Error::OutOfRange(format!(
                "burst at stair {}, row {}, column {}",
                b.stair, b.row, b.col
            )));
        }
        flagged[cell(b)] = true;
    }
    let schedule = make_schedule(cfg);
    let mut out = frame.clone();
    for b in bursts {
        if b.col < m {
            if b.stair == 0 {
                out.set(b.stair, b.row, b.col, llr_max);
            } else {
                let (dj, dt) = schedule.receiver_to_donor(b.row, b.col);
                let dup = BurstPos {
                    stair: b.stair - 1,
                    row: dj,
                    col: (n - m) + dt,
                };
                if !flagged[cell(&dup)] {
                    out.set(
                        b.stair,
                        b.row,
                        b.col,
                        frame.get(dup.stair, dup.row, dup.col),
                    );
                }
            }
        } else if b.col >= n - m && b.stair + 1 < total {
            let (rr, rc) = schedule.donor_to_receiver(b.row, b.col - (n - m));
            let dup = BurstPos {
                stair: b.stair + 1,
                row: rr,
                col: rc,
            };
            if !flagged[cell(&dup)] {
                out.set(
                    b.stair,
                    b.row,
                    b.col,
                    frame.get(dup.stair, dup.row, dup.col),
                );
            }
        }
    }
    Ok(out)
}
