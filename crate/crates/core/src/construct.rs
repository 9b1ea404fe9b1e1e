//! Subchannel reliability estimation and information-set selection.
//!
//! The production constructor tracks the mean LLR of each polarized
//! subchannel with the Gaussian approximation: the variable-node branch
//! doubles the mean, the check-node branch applies
//! `phi_inv(1 - (1 - phi(m))^2)`. A sampled density-evolution oracle
//! ([`mc_density_evolution`]) runs the exact check-node combine on Gaussian
//! channel draws and is used to validate the approximation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};
use crate::llr::boxplus;

/// Largest supported polarization depth (N = 2^20).
pub const MAX_LEVELS: usize = 20;

/// Switch point between the two analytic pieces of the GA check function.
const PHI_SWITCH: f64 = 10.0;

/// GA check function `phi(x) ~ 1 - E[tanh(L/2)]` for `L ~ N(x, 2x)`.
///
/// Two-piece analytic approximation: `exp(-0.4527 x^0.86 + 0.0218)` below
/// the switch point, the asymptotic `sqrt(pi/x) e^{-x/4} (1 - 10/(7x))`
/// above it.
fn phi(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        1.0
    } else if x < PHI_SWITCH {
        (0.0218 - 0.4527 * x.powf(0.86)).exp().min(1.0)
    } else {
        (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
    }
}

/// Inverse of [`phi`] on (0, 1].
fn phi_inv(y: f64) -> f64 {
    debug_assert!(y > 0.0 && y <= 1.0);
    if y >= 1.0 {
        return 0.0;
    }
    let y_switch = phi(PHI_SWITCH - f64::EPSILON * PHI_SWITCH);
    if y > y_switch {
        return ((0.0218 - y.ln()) / 0.4527).powf(1.0 / 0.86);
    }
    // Bisection on the asymptotic piece; -x/4 dominates so the bracket
    // below always straddles the root.
    let mut lo = PHI_SWITCH;
    let mut hi = (-y.ln() + 20.0) * 6.0;
    debug_assert!(phi(hi) < y);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// GA image of the check-node density combine.
fn check_mean(m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    // Deep asymptotic regime where phi underflows: phi(z) = 2 phi(m)
    // solves to z ~ m - 4 ln 2.
    if m > 2800.0 {
        return m - 4.0 * std::f64::consts::LN_2;
    }
    let p = phi(m);
    let y = p * (2.0 - p);
    if y >= 1.0 {
        0.0
    } else if y <= 0.0 {
        m - 4.0 * std::f64::consts::LN_2
    } else {
        phi_inv(y)
    }
}

fn validate_design_mean(design_llr_mean: f64) -> Result<()> {
    if !design_llr_mean.is_finite() || design_llr_mean <= 0.0 {
        return Err(invalid(format!(
            "design LLR mean must be positive and finite, got {design_llr_mean}"
        )));
    }
    Ok(())
}

fn validate_levels(levels: usize) -> Result<()> {
    if levels > MAX_LEVELS {
        return Err(invalid(format!(
            "level count {levels} exceeds the supported maximum {MAX_LEVELS}"
        )));
    }
    Ok(())
}

/// Evolve the channel mean through `levels` polarization levels.
///
/// Returns the 2^levels per-subchannel mean LLRs in natural order: the
/// check branch lands at even offsets of each pair, the variable branch
/// (exactly doubled mean) at odd offsets.
pub fn ga_evolve(levels: usize, design_llr_mean: f64) -> Result<Vec<f64>> {
    validate_design_mean(design_llr_mean)?;
    validate_levels(levels)?;
    let mut means = vec![design_llr_mean];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(means.len() * 2);
        for &m in &means {
            next.push(check_mean(m));
            next.push(2.0 * m);
        }
        means = next;
    }
    Ok(means)
}

/// Probability that a Gaussian LLR with mean `m` and variance `2m` is negative.
pub fn error_prob(mean: f64) -> Result<f64> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(invalid(format!(
            "mean must be non-negative and finite, got {mean}"
        )));
    }
    Ok(0.5 * libm::erfc((mean / 2.0).sqrt() / std::f64::consts::SQRT_2))
}

/// Per-subchannel GA means and incorrect-message probabilities.
#[derive(Debug, Clone)]
pub struct ReliabilityProfile {
    design_llr_mean: f64,
    means: Vec<f64>,
    p_err: Vec<f64>,
}

impl ReliabilityProfile {
    pub fn design_llr_mean(&self) -> f64 {
        self.design_llr_mean
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn p_err(&self) -> &[f64] {
        &self.p_err
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

/// Run [`ga_evolve`] and attach error probabilities.
pub fn reliability_profile(levels: usize, design_llr_mean: f64) -> Result<ReliabilityProfile> {
    let means = ga_evolve(levels, design_llr_mean)?;
    let p_err = means
        .iter()
        .map(|&m| error_prob(m))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReliabilityProfile {
        design_llr_mean,
        means,
        p_err,
    })
}

/// One component polar code: length, dimension, and the reliability-ordered
/// information/frozen index sets (0-based positions).
#[derive(Debug, Clone)]
pub struct CodeConfig {
    len: usize,
    dim: usize,
    levels: usize,
    info_order: Vec<usize>,
    frozen_order: Vec<usize>,
    is_info: Vec<bool>,
    design_llr_mean: f64,
}

impl CodeConfig {
    /// Code length N.
    pub fn n(&self) -> usize {
        self.len
    }

    /// Information length K.
    pub fn k(&self) -> usize {
        self.dim
    }

    /// log2(N).
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Realized rate K/N.
    pub fn rate(&self) -> f64 {
        self.dim as f64 / self.len as f64
    }

    /// Information positions, most reliable first.
    pub fn info_order(&self) -> &[usize] {
        &self.info_order
    }

    /// Frozen positions, most reliable first.
    pub fn frozen_order(&self) -> &[usize] {
        &self.frozen_order
    }

    pub fn is_info(&self, pos: usize) -> bool {
        self.is_info[pos]
    }

    pub fn design_llr_mean(&self) -> f64 {
        self.design_llr_mean
    }

    /// Full descending-reliability permutation of all N positions.
    pub fn reliability_order(&self) -> Vec<usize> {
        let mut order = self.info_order.clone();
        order.extend_from_slice(&self.frozen_order);
        order
    }

    /// GA construction at the given design point.
    pub fn construct(n: usize, k: usize, design_llr_mean: f64) -> Result<CodeConfig> {
        if !n.is_power_of_two() || n == 0 {
            return Err(invalid(format!("code length {n} is not a power of two")));
        }
        let levels = n.trailing_zeros() as usize;
        let profile = reliability_profile(levels, design_llr_mean)?;
        select_info_set(&profile, k)
    }

    /// Rebuild a config from an explicit descending-reliability permutation.
    pub fn from_reliability_order(
        order: &[usize],
        k: usize,
        design_llr_mean: f64,
    ) -> Result<CodeConfig> {
        let n = order.len();
        if !n.is_power_of_two() || n == 0 {
            return Err(invalid(format!(
                "permutation length {n} is not a power of two"
            )));
        }
        if k == 0 || k > n {
            return Err(invalid(format!(
                "information length {k} out of range 1..={n}"
            )));
        }
        let mut seen = vec![false; n];
        for &pos in order {
            if pos >= n || seen[pos] {
                return Err(Error::Format(format!(
                    "reliability order is not a permutation of 0..{n}"
                )));
            }
            seen[pos] = true;
        }
        let info_order = order[..k].to_vec();
        let frozen_order = order[k..].to_vec();
        let mut is_info = vec![false; n];
        for &pos in &info_order {
            is_info[pos] = true;
        }
        Ok(CodeConfig {
            len: n,
            dim: k,
            levels: n.trailing_zeros() as usize,
            info_order,
            frozen_order,
            is_info,
            design_llr_mean,
        })
    }
}

/// Split a reliability profile into information and frozen sets.
///
/// The K positions with the largest means form the information set; both
/// sets are ordered by descending mean with ascending-index tie-break.
pub fn select_info_set(profile: &ReliabilityProfile, k: usize) -> Result<CodeConfig> {
    let n = profile.len();
    if k == 0 || k > n {
        return Err(invalid(format!(
            "information length {k} out of range 1..={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        profile.means[b]
            .total_cmp(&profile.means[a])
            .then(a.cmp(&b))
    });
    let info_order = order[..k].to_vec();
    let frozen_order = order[k..].to_vec();
    let mut is_info = vec![false; n];
    for &pos in &info_order {
        is_info[pos] = true;
    }
    Ok(CodeConfig {
        len: n,
        dim: k,
        levels: n.trailing_zeros() as usize,
        info_order,
        frozen_order,
        is_info,
        design_llr_mean: profile.design_llr_mean,
    })
}

/// Sampled density evolution: empirical incorrect-message probability per
/// subchannel under the all-zero assumption.
///
/// Draws channel LLRs from `N(m, 2m)` and pushes them through the exact
/// f/g combines of the polarization recursion. Deterministic given `seed`.
pub fn mc_density_evolution(
    levels: usize,
    design_llr_mean: f64,
    samples: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    validate_design_mean(design_llr_mean)?;
    validate_levels(levels)?;
    if samples < 10_000 {
        return Err(invalid(format!(
            "sample count {samples} is below the minimum 10000"
        )));
    }
    let n = 1usize << levels;
    let normal = Normal::new(design_llr_mean, (2.0 * design_llr_mean).sqrt())
        .expect("validated mean yields a valid normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut neg = vec![0u64; n];
    let mut buf = vec![0.0f64; n];
    for _ in 0..samples {
        for x in buf.iter_mut() {
            *x = normal.sample(&mut rng);
        }
        de_split(&mut buf);
        for (count, &l) in neg.iter_mut().zip(buf.iter()) {
            if l < 0.0 {
                *count += 1;
            }
        }
    }
    Ok(neg.iter().map(|&c| c as f64 / samples as f64).collect())
}

/// One genie-aided polarization split: first half check-combined, second
/// half variable-combined, then recurse.
fn de_split(buf: &mut [f64]) {
    let len = buf.len();
    if len <= 1 {
        return;
    }
    let half = len / 2;
    for j in 0..half {
        let a = buf[j];
        let b = buf[j + half];
        buf[j] = boxplus(a, b);
        buf[j + half] = a + b;
    }
    let (lo, hi) = buf.split_at_mut(half);
    de_split(lo);
    de_split(hi);
}
