//! Python bindings for the polar-staircase library.

// The pymethods expansion inserts identity PyErr conversions.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use polar_staircase as ps;
use polar_staircase::frameio::CodeConfigDoc;
use polar_staircase::staircase::Frame;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One systematic polar component code.
#[pyclass(name = "PolarCode")]
struct PyPolarCode {
    cfg: ps::CodeConfig,
}

#[pymethods]
impl PyPolarCode {
    /// Construct with the Gaussian approximation at `design_llr_mean`.
    #[new]
    fn new(n: usize, k: usize, design_llr_mean: f64) -> PyResult<Self> {
        Ok(PyPolarCode {
            cfg: ps::CodeConfig::construct(n, k, design_llr_mean).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.cfg.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.cfg.k()
    }

    #[getter]
    fn rate(&self) -> f64 {
        self.cfg.rate()
    }

    /// All N positions sorted by descending reliability.
    fn reliability_order(&self) -> Vec<usize> {
        self.cfg.reliability_order()
    }

    /// Information positions, most reliable first.
    fn info_set(&self) -> Vec<usize> {
        self.cfg.info_order().to_vec()
    }

    /// Frozen positions, most reliable first.
    fn frozen_set(&self) -> Vec<usize> {
        self.cfg.frozen_order().to_vec()
    }

    /// Systematically encode `info` (listed most reliable position first).
    fn encode(&self, info: Vec<bool>) -> PyResult<Vec<bool>> {
        ps::systematic_encode(&info, &self.cfg).map_err(err)
    }

    /// SCAN-decode channel LLRs; returns (hard information bits, soft
    /// decision LLRs), both in information-set order.
    #[pyo3(signature = (llrs, iters=1, min_sum=false))]
    fn scan_decode(
        &self,
        llrs: Vec<f64>,
        iters: u32,
        min_sum: bool,
    ) -> PyResult<(Vec<bool>, Vec<f64>)> {
        let opts = if min_sum {
            ps::DecodeOptions::scaled_min_sum()
        } else {
            ps::DecodeOptions::default()
        };
        let state = ps::scan_decode_systematic_with(&llrs, &self.cfg, iters, &opts).map_err(err)?;
        let bits = state.hard_info_decisions(&self.cfg);
        let soft = self
            .cfg
            .info_order()
            .iter()
            .map(|&p| state.decision_llr(p))
            .collect();
        Ok((bits, soft))
    }

    /// JSON construction document, as emitted by the CLI.
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&CodeConfigDoc::from_config(&self.cfg)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "PolarCode(n={}, k={}, design_llr_mean={})",
            self.cfg.n(),
            self.cfg.k(),
            self.cfg.design_llr_mean()
        )
    }
}

/// A staircase of systematic polar codewords.
#[pyclass(name = "StaircaseCode")]
struct PyStaircaseCode {
    cfg: ps::StaircaseConfig,
}

#[pymethods]
impl PyStaircaseCode {
    #[new]
    #[pyo3(signature = (n, k, stair_width, stairs, design_llr_mean, terminated=false))]
    fn new(
        n: usize,
        k: usize,
        stair_width: usize,
        stairs: usize,
        design_llr_mean: f64,
        terminated: bool,
    ) -> PyResult<Self> {
        let code = ps::CodeConfig::construct(n, k, design_llr_mean).map_err(err)?;
        let mut cfg = ps::StaircaseConfig::new(code, stair_width, stairs).map_err(err)?;
        if terminated {
            cfg = cfg.with_termination();
        }
        Ok(PyStaircaseCode { cfg })
    }

    #[getter]
    fn payload_len(&self) -> usize {
        self.cfg.payload_len()
    }

    #[getter]
    fn frame_rate(&self) -> f64 {
        self.cfg.frame_rate()
    }

    #[getter]
    fn overlap_info_count(&self) -> usize {
        self.cfg.overlap_info_count()
    }

    /// Transmitted symbols per frame.
    #[getter]
    fn frame_len(&self) -> usize {
        self.cfg.transmitted_stairs() * self.cfg.stair_width() * self.cfg.code().n()
    }

    /// Encode a payload; returns the frame bits in transmission order.
    fn encode(&self, payload: Vec<bool>) -> PyResult<Vec<bool>> {
        Ok(ps::encode_frame(&payload, &self.cfg)
            .map_err(err)?
            .to_flat())
    }

    /// Decode channel LLRs (transmission order) with the sliding window.
    /// Burst symbol indices, when given, are patched from their duplicate
    /// observations first.
    #[pyo3(signature = (llrs, iters=4, min_sum=false, bursts=None))]
    fn decode(
        &self,
        llrs: Vec<f64>,
        iters: u32,
        min_sum: bool,
        bursts: Option<Vec<usize>>,
    ) -> PyResult<Vec<bool>> {
        let opts = if min_sum {
            ps::DecodeOptions::scaled_min_sum()
        } else {
            ps::DecodeOptions::default()
        };
        let mut frame =
            Frame::from_flat(self.cfg.stair_width(), self.cfg.code().n(), &llrs).map_err(err)?;
        if let Some(bursts) = bursts {
            let positions: Vec<_> = bursts
                .iter()
                .map(|&i| ps::stream_index_to_pos(i, &self.cfg))
                .collect();
            frame = ps::burst_patch(&frame, &positions, &self.cfg, opts.llr_max).map_err(err)?;
        }
        ps::decode_frame_with(&frame, &self.cfg, iters, opts).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "StaircaseCode(n={}, k={}, stair_width={}, stairs={}, terminated={})",
            self.cfg.code().n(),
            self.cfg.code().k(),
            self.cfg.stair_width(),
            self.cfg.stair_count(),
            self.cfg.terminated()
        )
    }
}

/// Per-subchannel mean LLRs after `levels` polarization steps.
#[pyfunction]
fn ga_reliability(levels: usize, design_llr_mean: f64) -> PyResult<Vec<f64>> {
    ps::ga_evolve(levels, design_llr_mean).map_err(err)
}

/// Transmit bits over BPSK + AWGN; returns channel LLRs.
#[pyfunction]
fn awgn_llrs(bits: Vec<bool>, eb_n0_db: f64, rate: f64, seed: u64) -> PyResult<Vec<f64>> {
    let params = ps::AwgnParams::new(eb_n0_db, rate).map_err(err)?;
    Ok(ps::awgn_transmit(&bits, &params, seed))
}

/// Transmit through the Gilbert-Elliott burst channel; returns
/// (channel LLRs, burst symbol indices).
#[pyfunction]
fn gilbert_elliott_llrs(
    bits: Vec<bool>,
    eb_n0_db: f64,
    rate: f64,
    delta: f64,
    p_be: f64,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<usize>)> {
    let awgn = ps::AwgnParams::new(eb_n0_db, rate).map_err(err)?;
    let ge = ps::GilbertElliottParams::new(delta, p_be).map_err(err)?;
    Ok(ps::ge_transmit(&bits, &awgn, &ge, seed))
}

/// Decoding operation counts for both schemes at one frame geometry.
/// Rational inputs accept "5/6", "3.33", or plain integers.
#[pyfunction]
fn complexity(
    py: Python<'_>,
    stairs: u64,
    stair_width: u64,
    code_len: u64,
    rate: &str,
    d_v: &str,
    d_c: &str,
) -> PyResult<PyObject> {
    let rate: ps::Ratio = rate.parse().map_err(err)?;
    let d_v: ps::Ratio = d_v.parse().map_err(err)?;
    let d_c: ps::Ratio = d_c.parse().map_err(err)?;
    let table =
        ps::complexity_estimate(stairs, stair_width, code_len, rate, d_v, d_c).map_err(err)?;
    let as_dict = |c: &ps::OpCounts| -> PyResult<PyObject> {
        let d = PyDict::new_bound(py);
        d.set_item("sign", c.sign.to_string())?;
        d.set_item("mult", c.mult.to_string())?;
        d.set_item("div", c.div.to_string())?;
        d.set_item("add", c.add.to_string())?;
        d.set_item("total", c.total.to_string())?;
        Ok(d.into())
    };
    let out = PyDict::new_bound(py);
    match table.polar {
        Some(p) => out.set_item("polar_staircase", as_dict(&p)?)?,
        None => out.set_item("polar_staircase", py.None())?,
    }
    out.set_item("ldpc_staircase", as_dict(&table.ldpc)?)?;
    Ok(out.into())
}

/// One Monte Carlo point; returns a dict mirroring the CLI's CSV columns.
#[pyfunction]
#[pyo3(signature = (n, k, ebn0_db, iters, seed, stair_width=None, stairs=None,
                    min_block_errors=10, max_trials=1000, min_sum=true))]
#[allow(clippy::too_many_arguments)]
fn simulate_awgn_point(
    py: Python<'_>,
    n: usize,
    k: usize,
    ebn0_db: f64,
    iters: u32,
    seed: u64,
    stair_width: Option<usize>,
    stairs: Option<usize>,
    min_block_errors: u64,
    max_trials: u64,
    min_sum: bool,
) -> PyResult<PyObject> {
    let cfg = ps::SimConfig {
        code_len: n,
        code_dim: k,
        staircase: match (stair_width, stairs) {
            (Some(m), Some(s)) => Some(ps::StairParams {
                stair_width: m,
                stair_count: s,
                terminated: false,
            }),
            (None, None) => None,
            _ => {
                return Err(PyValueError::new_err(
                    "stair_width and stairs come together",
                ))
            }
        },
        iters,
        channel: ps::ChannelKind::Awgn,
        sweep: vec![ebn0_db],
        min_block_errors,
        max_trials,
        seed,
        combine: if min_sum {
            ps::CheckCombine::scaled_min_sum()
        } else {
            ps::CheckCombine::Exact
        },
        energy_accounting: ps::EnergyAccounting::ComponentRate,
        design_llr_mean: None,
    };
    let r = ps::run_point(&cfg, 0).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("point", r.point)?;
    d.set_item("trials", r.trials)?;
    d.set_item("block_errors", r.block_errors)?;
    d.set_item("bit_errors", r.bit_errors)?;
    d.set_item("bler", r.bler)?;
    d.set_item("ber", r.ber)?;
    d.set_item("ci_lo", r.ci_lo)?;
    d.set_item("ci_hi", r.ci_hi)?;
    d.set_item("seed", r.seed)?;
    d.set_item("wall_seconds", r.wall_seconds)?;
    Ok(d.into())
}

#[pymodule]
#[pyo3(name = "polar_staircase")]
fn bindings(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolarCode>()?;
    m.add_class::<PyStaircaseCode>()?;
    m.add_function(wrap_pyfunction!(ga_reliability, m)?)?;
    m.add_function(wrap_pyfunction!(awgn_llrs, m)?)?;
    m.add_function(wrap_pyfunction!(gilbert_elliott_llrs, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_awgn_point, m)?)?;
    Ok(())
}
