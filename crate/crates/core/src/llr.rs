//! LLR message primitives shared by the decoder and the construction oracles.
//!
//! The check-node combine is the tanh-domain rule
//! `f(a, b) = 2 atanh(tanh(a/2) tanh(b/2))`, evaluated here in the
//! numerically robust Jacobian form
//! `sign(a) sign(b) min(|a|, |b|) + log1p(e^-|a+b|) - log1p(e^-|a-b|)`.

/// Default saturation bound for stored LLRs.
pub const DEFAULT_LLR_MAX: f64 = 60.0;

/// Which check-node combine the decoder uses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CheckCombine {
    /// Exact tanh-domain rule.
    #[default]
    Exact,
    /// Scaled min-sum: `scale * sign(a) sign(b) min(|a|, |b|)`.
    ScaledMinSum { scale: f64 },
}

impl CheckCombine {
    /// Standard scaled min-sum with the usual 15/16 scale.
    pub fn scaled_min_sum() -> Self {
        CheckCombine::ScaledMinSum { scale: 0.9375 }
    }

    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            CheckCombine::Exact => boxplus(a, b),
            CheckCombine::ScaledMinSum { scale } => min_sum(a, b) * scale,
        }
    }
}

/// Exact check-node combine of two LLRs.
///
/// Two evaluation paths cover each other's weak spot: the tanh product is
/// accurate for small magnitudes where the Jacobian form cancels
/// catastrophically, and the Jacobian form is accurate for large
/// magnitudes where atanh saturates.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if m < 1.0 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    } else {
        let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
        sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
    }
}

#[inline]
fn min_sum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

/// Clip an LLR to the saturation window.
#[inline]
pub fn saturate(x: f64, llr_max: f64) -> f64 {
    x.clamp(-llr_max, llr_max)
}

/// Map a soft value to a bit: non-negative LLRs decide 0, the tie included.
#[inline]
pub fn hard_decision(llr: f64) -> bool {
    llr < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference tanh-domain form, kept independent of the production path.
    fn boxplus_tanh(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn boxplus_matches_tanh_form() {
        let vals = [-7.3, -2.0, -0.4, 0.0, 0.9, 2.0, 5.5, 19.0];
        for &a in &vals {
            for &b in &vals {
                let exact = boxplus(a, b);
                let reference = boxplus_tanh(a, b);
                assert!(
                    (exact - reference).abs() <= 5e-9 * (1.0 + reference.abs()),
                    "boxplus({a}, {b}) = {exact}, tanh form {reference}"
                );
            }
        }
    }

    #[test]
    fn boxplus_with_saturated_input_passes_through() {
        for &a in &[-3.0, 0.0, 7.0] {
            assert!((boxplus(a, DEFAULT_LLR_MAX) - a).abs() < 1e-9);
            assert!((boxplus(a, -DEFAULT_LLR_MAX) + a).abs() < 1e-9);
        }
    }

    #[test]
    fn boxplus_with_erased_input_is_zero() {
        for &a in &[-11.0, -0.5, 0.0, 2.0, 60.0] {
            assert_eq!(boxplus(a, 0.0), 0.0);
        }
    }

    #[test]
    fn boxplus_two_two_fixture() {
        // Direct numeric evaluation of 2 atanh(tanh(1)^2).
        let expected = 2.0 * (1.0_f64.tanh().powi(2)).atanh();
        assert!((boxplus(2.0, 2.0) - expected).abs() < 1e-12);
        assert!((expected - 1.325_002_747_357_864_3).abs() < 1e-12);
    }

    #[test]
    fn scaled_min_sum_combine() {
        let c = CheckCombine::scaled_min_sum();
        assert!((c.combine(4.0, -2.0) + 0.9375 * 2.0).abs() < 1e-15);
        assert!((c.combine(-4.0, -2.0) - 0.9375 * 2.0).abs() < 1e-15);
        assert_eq!(c.combine(3.0, 0.0), 0.0);
    }

    #[test]
    fn hard_decision_convention() {
        assert!(!hard_decision(3.7));
        assert!(hard_decision(-0.001));
        assert!(!hard_decision(0.0));
    }

    #[test]
    fn saturate_clips_both_sides() {
        assert_eq!(saturate(100.0, 60.0), 60.0);
        assert_eq!(saturate(-100.0, 60.0), -60.0);
        assert_eq!(saturate(1.5, 60.0), 1.5);
    }
}
