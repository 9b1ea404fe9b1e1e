//! On-disk formats: the binary frame container and the code-construction
//! document.
//!
//! Frame container layout, little-endian throughout:
//!
//! ```text
//! magic  b"PSC1"
//! kind   u8   0 = packed bits, 1 = f32 LLRs
//! flags  u8   bit 0: frame includes a terminator stair
//! n      u32  component code length
//! k      u32  component information length
//! m      u32  stair width
//! stairs u32  payload stairs (terminator not counted)
//! seed   u64
//! mean   f64  construction design mean
//! data   packed bits (LSB first, row-major over all transmitted stairs,
//!        zero-padded) or f32 LLRs in the same order
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::construct::CodeConfig;
use crate::error::{Error, Result};
use crate::staircase::Frame;

const MAGIC: &[u8; 4] = b"PSC1";
const KIND_BITS: u8 = 0;
const KIND_LLRS: u8 = 1;
const FLAG_TERMINATED: u8 = 1;

/// Frame container metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameHeader {
    pub code_len: u32,
    pub code_dim: u32,
    pub stair_width: u32,
    pub payload_stairs: u32,
    pub terminated: bool,
    pub seed: u64,
    pub design_llr_mean: f64,
}

impl FrameHeader {
    pub fn transmitted_stairs(&self) -> usize {
        self.payload_stairs as usize + usize::from(self.terminated)
    }
}

fn write_header(w: &mut impl Write, header: &FrameHeader, kind: u8) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[
        kind,
        if header.terminated {
            FLAG_TERMINATED
        } else {
            0
        },
    ])?;
    for v in [
        header.code_len,
        header.code_dim,
        header.stair_width,
        header.payload_stairs,
    ] {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&header.seed.to_le_bytes())?;
    w.write_all(&header.design_llr_mean.to_le_bytes())?;
    Ok(())
}

fn read_header(r: &mut impl Read, expect_kind: u8) -> Result<FrameHeader> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a frame container".into()));
    }
    let mut kind_flags = [0u8; 2];
    r.read_exact(&mut kind_flags)?;
    if kind_flags[0] != expect_kind {
        return Err(Error::Format(format!(
            "frame holds kind {} but kind {expect_kind} was requested",
            kind_flags[0]
        )));
    }
    let mut u32buf = [0u8; 4];
    let mut words = [0u32; 4];
    for w in words.iter_mut() {
        r.read_exact(&mut u32buf)?;
        *w = u32::from_le_bytes(u32buf);
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let seed = u64::from_le_bytes(u64buf);
    r.read_exact(&mut u64buf)?;
    let design_llr_mean = f64::from_le_bytes(u64buf);
    Ok(FrameHeader {
        code_len: words[0],
        code_dim: words[1],
        stair_width: words[2],
        payload_stairs: words[3],
        terminated: kind_flags[1] & FLAG_TERMINATED != 0,
        seed,
        design_llr_mean,
    })
}

/// Pack bits LSB-first into bytes, zero-padding the tail.
pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

/// Unpack exactly `len` bits from the packed form.
pub fn unpack_bits(bytes: &[u8], len: usize) -> Result<Vec<bool>> {
    if bytes.len() != len.div_ceil(8) {
        return Err(Error::Format(format!(
            "{} bytes cannot hold exactly {len} packed bits",
            bytes.len()
        )));
    }
    Ok((0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect())
}

/// Write an encoder-side frame as packed bits.
pub fn write_bit_frame(
    w: &mut impl Write,
    frame: &Frame<bool>,
    header: &FrameHeader,
) -> Result<()> {
    check_shape(
        frame.num_stairs(),
        frame.stair_width(),
        frame.width(),
        header,
    )?;
    write_header(w, header, KIND_BITS)?;
    w.write_all(&pack_bits(&frame.to_flat()))?;
    Ok(())
}

/// Read an encoder-side frame.
pub fn read_bit_frame(r: &mut impl Read) -> Result<(FrameHeader, Frame<bool>)> {
    let header = read_header(r, KIND_BITS)?;
    let total =
        header.transmitted_stairs() * header.stair_width as usize * header.code_len as usize;
    let mut bytes = vec![0u8; total.div_ceil(8)];
    r.read_exact(&mut bytes)?;
    let bits = unpack_bits(&bytes, total)?;
    let frame = Frame::from_flat(header.stair_width as usize, header.code_len as usize, &bits)?;
    Ok((header, frame))
}

/// Write a decoder-side frame as f32 LLRs.
pub fn write_llr_frame(w: &mut impl Write, frame: &Frame<f64>, header: &FrameHeader) -> Result<()> {
    check_shape(
        frame.num_stairs(),
        frame.stair_width(),
        frame.width(),
        header,
    )?;
    write_header(w, header, KIND_LLRS)?;
    for v in frame.to_flat() {
        w.write_all(&(v as f32).to_le_bytes())?;
    }
    Ok(())
}

/// Read a decoder-side frame.
pub fn read_llr_frame(r: &mut impl Read) -> Result<(FrameHeader, Frame<f64>)> {
    let header = read_header(r, KIND_LLRS)?;
    let total =
        header.transmitted_stairs() * header.stair_width as usize * header.code_len as usize;
    let mut bytes = vec![0u8; total * 4];
    r.read_exact(&mut bytes)?;
    let llrs: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let frame = Frame::from_flat(header.stair_width as usize, header.code_len as usize, &llrs)?;
    Ok((header, frame))
}

fn check_shape(stairs: usize, m: usize, n: usize, header: &FrameHeader) -> Result<()> {
    if stairs != header.transmitted_stairs()
        || m != header.stair_width as usize
        || n != header.code_len as usize
    {
        return Err(Error::Format(format!(
            "frame {stairs}x{m}x{n} does not match its header"
        )));
    }
    Ok(())
}

/// The construction document emitted by `construct`: length, dimension,
/// design point, and the full descending-reliability permutation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CodeConfigDoc {
    pub n: usize,
    pub k: usize,
    pub rate: String,
    pub design_llr_mean: f64,
    pub reliability_order: Vec<usize>,
}

impl CodeConfigDoc {
    pub fn from_config(cfg: &CodeConfig) -> CodeConfigDoc {
        CodeConfigDoc {
            n: cfg.n(),
            k: cfg.k(),
            rate: format!("{}/{}", cfg.k(), cfg.n()),
            design_llr_mean: cfg.design_llr_mean(),
            reliability_order: cfg.reliability_order(),
        }
    }

    pub fn to_config(&self) -> Result<CodeConfig> {
        CodeConfig::from_reliability_order(&self.reliability_order, self.k, self.design_llr_mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staircase::{encode_frame, StaircaseConfig};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn sample() -> (StaircaseConfig, Frame<bool>, FrameHeader) {
        let code = CodeConfig::construct(8, 6, 2.0).unwrap();
        let cfg = StaircaseConfig::new(code, 3, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(20);
        let payload: Vec<bool> = (0..cfg.payload_len()).map(|_| rng.gen()).collect();
        let frame = encode_frame(&payload, &cfg).unwrap();
        let header = FrameHeader {
            code_len: 8,
            code_dim: 6,
            stair_width: 3,
            payload_stairs: 2,
            terminated: false,
            seed: 42,
            design_llr_mean: 2.0,
        };
        (cfg, frame, header)
    }

    #[test]
    fn bit_frame_roundtrip() {
        let (_, frame, header) = sample();
        let mut buf = Vec::new();
        write_bit_frame(&mut buf, &frame, &header).unwrap();
        let (h, f) = read_bit_frame(&mut buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(f, frame);
    }

    #[test]
    fn llr_frame_roundtrip_at_f32_precision() {
        let (_, frame, header) = sample();
        let llrs: Vec<f64> = frame
            .to_flat()
            .iter()
            .map(|&b| if b { -7.25 } else { 7.25 })
            .collect();
        let llr_frame = Frame::from_flat(3, 8, &llrs).unwrap();
        let mut buf = Vec::new();
        write_llr_frame(&mut buf, &llr_frame, &header).unwrap();
        let (h, f) = read_llr_frame(&mut buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(f, llr_frame);
    }

    #[test]
    fn kind_and_magic_are_checked() {
        let (_, frame, header) = sample();
        let mut buf = Vec::new();
        write_bit_frame(&mut buf, &frame, &header).unwrap();
        assert!(read_llr_frame(&mut buf.as_slice()).is_err());
        buf[0] = b'X';
        assert!(read_bit_frame(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn pack_unpack_roundtrip() {
        let mut rng = StdRng::seed_from_u64(21);
        for len in [0usize, 1, 7, 8, 9, 100] {
            let bits: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
            let packed = pack_bits(&bits);
            assert_eq!(unpack_bits(&packed, len).unwrap(), bits);
        }
        assert!(unpack_bits(&[0u8; 2], 100).is_err());
    }

    #[test]
    fn config_doc_roundtrip() {
        let cfg = CodeConfig::construct(64, 53, 4.0).unwrap();
        let doc = CodeConfigDoc::from_config(&cfg);
        assert_eq!(doc.rate, "53/64");
        let json = serde_json::to_string(&doc).unwrap();
        let back: CodeConfigDoc = serde_json::from_str(&json).unwrap();
        let rebuilt = back.to_config().unwrap();
        assert_eq!(rebuilt.info_order(), cfg.info_order());
        assert_eq!(rebuilt.frozen_order(), cfg.frozen_order());
        assert_eq!(rebuilt.design_llr_mean(), cfg.design_llr_mean());
    }

    #[test]
    fn config_doc_rejects_bad_permutation() {
        let doc = CodeConfigDoc {
            n: 4,
            k: 2,
            rate: "2/4".into(),
            design_llr_mean: 2.0,
            reliability_order: vec![0, 0, 1, 2],
        };
        assert!(doc.to_config().is_err());
    }
}
