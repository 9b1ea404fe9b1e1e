//! Decoding operation-count estimator for a k-stair frame, evaluated in
//! exact rational arithmetic so integral inputs never drift.
//!
//! Polar rows assume one SCAN sweep per component codeword; the LDPC rows
//! cover the belief-propagation baseline they are compared against.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Exact rational with a reduced i128 representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl Ratio {
    pub fn new(num: i128, den: i128) -> Result<Ratio> {
        if den == 0 {
            return Err(invalid("rational with zero denominator"));
        }
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Ok(Ratio {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(n: i128) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::ops::Mul for Ratio {
    type Output = Ratio;

    fn mul(self, other: Ratio) -> Ratio {
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        Ratio {
            num: (self.num / g1) * (other.num / g2),
            den: (self.den / g2) * (other.den / g1),
        }
    }
}

impl std::ops::Add for Ratio {
    type Output = Ratio;

    fn add(self, other: Ratio) -> Ratio {
        let g = gcd(self.den, other.den).max(1);
        let den = self.den / g * other.den;
        let num = self.num * (other.den / g) + other.num * (self.den / g);
        let g2 = gcd(num, den).max(1);
        Ratio {
            num: num / g2,
            den: den / g2,
        }
    }
}

impl std::ops::Sub for Ratio {
    type Output = Ratio;

    fn sub(self, other: Ratio) -> Ratio {
        self + Ratio {
            num: -other.num,
            den: other.den,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = Error;

    /// Accepts `p/q`, plain integers, and terminating decimals (`3.33`).
    fn from_str(s: &str) -> Result<Ratio> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: i128 = p
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad rational {s}")))?;
            let den: i128 = q
                .trim()
                .parse()
                .map_err(|_| invalid(format!("bad rational {s}")))?;
            return Ratio::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.chars().any(|c| !c.is_ascii_digit()) {
                return Err(invalid(format!("bad decimal {s}")));
            }
            let negative = int.trim_start().starts_with('-');
            let int: i128 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse()
                    .map_err(|_| invalid(format!("bad decimal {s}")))?
            };
            let digits: i128 = frac
                .parse()
                .map_err(|_| invalid(format!("bad decimal {s}")))?;
            let scale = 10i128.pow(frac.len() as u32);
            let num = int * scale + if negative { -digits } else { digits };
            return Ratio::new(num, scale);
        }
        let n: i128 = s.parse().map_err(|_| invalid(format!("bad integer {s}")))?;
        Ok(Ratio::integer(n))
    }
}

/// One scheme's operation counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub sign: Ratio,
    pub mult: Ratio,
    pub div: Ratio,
    pub add: Ratio,
    pub total: Ratio,
}

/// Both schemes' rows, evaluated at one geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityTable {
    /// Present only when the code length is a power of two.
    pub polar: Option<OpCounts>,
    pub ldpc: OpCounts,
}

/// Evaluate the operation-count formulas for a k-stair frame of M rows of
/// length-N component codes.
///
/// Polar: sign 6kMN log N, mult 2kMN log N, div 0, add 2kMN log N + kM^2,
/// total 10kMN log N + kM^2. LDPC at the same geometry: sign
/// kMN(1-R)(d_c+1), mult kMN(1-R)(d_c-1), div kMN(1-R)d_c, add
/// 2kMN d_v + kM^2, total 5kMN d_v + kM^2.
pub fn complexity_estimate(
    stairs: u64,
    stair_width: u64,
    code_len: u64,
    rate: Ratio,
    d_v: Ratio,
    d_c: Ratio,
) -> Result<ComplexityTable> {
    if stair_width == 0 || code_len == 0 {
        return Err(invalid("stair width and code length must be positive"));
    }
    if !rate.is_positive() || (rate - Ratio::integer(1)).is_positive() {
        return Err(invalid(format!("rate must lie in (0, 1], got {rate}")));
    }
    if !d_v.is_positive() || !d_c.is_positive() {
        return Err(invalid("variable and check degrees must be positive"));
    }
    let k = Ratio::integer(stairs as i128);
    let kmn = k * Ratio::integer(stair_width as i128) * Ratio::integer(code_len as i128);
    let km2 = k * Ratio::integer((stair_width as i128) * (stair_width as i128));

    let polar = if code_len.is_power_of_two() {
        let log_n = Ratio::integer(code_len.trailing_zeros() as i128);
        let kmn_log = kmn * log_n;
        Some(OpCounts {
            sign: kmn_log * Ratio::integer(6),
            mult: kmn_log * Ratio::integer(2),
            div: Ratio::integer(0),
            add: kmn_log * Ratio::integer(2) + km2,
            total: kmn_log * Ratio::integer(10) + km2,
        })
    } else {
        None
    };

    let redundancy = kmn * (Ratio::integer(1) - rate);
    let ldpc = OpCounts {
        sign: redundancy * (d_c + Ratio::integer(1)),
        mult: redundancy * (d_c - Ratio::integer(1)),
        div: redundancy * d_c,
        add: kmn * Ratio::integer(2) * d_v + km2,
        total: kmn * Ratio::integer(5) * d_v + km2,
    };

    Ok(ComplexityTable { polar, ldpc })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Ratio {
        s.parse().unwrap()
    }

    #[test]
    fn ratio_parsing_and_display() {
        assert_eq!(r("5/6"), Ratio::new(5, 6).unwrap());
        assert_eq!(r("3.33"), Ratio::new(333, 100).unwrap());
        assert_eq!(r("20"), Ratio::integer(20));
        assert_eq!(r("-0.5"), Ratio::new(-1, 2).unwrap());
        assert_eq!(format!("{}", r("10/4")), "5/2");
        assert_eq!(format!("{}", r("8/4")), "2");
        assert!("x".parse::<Ratio>().is_err());
        assert!(Ratio::new(1, 0).is_err());
    }

    #[test]
    fn ratio_arithmetic_is_exact() {
        let a = r("5/6");
        let b = r("1/6");
        assert_eq!(a + b, Ratio::integer(1));
        assert_eq!(a * r("6/5"), Ratio::integer(1));
        assert_eq!(Ratio::integer(1) - a, b);
    }

    #[test]
    fn polar_total_fixture() {
        let t = complexity_estimate(1, 300, 1024, r("5/6"), r("3.33"), r("20")).unwrap();
        let polar = t.polar.unwrap();
        assert_eq!(polar.total, Ratio::integer(30_810_000));
        assert_eq!(polar.sign, Ratio::integer(6 * 300 * 1024 * 10));
        assert_eq!(polar.mult, Ratio::integer(2 * 300 * 1024 * 10));
        assert_eq!(polar.div, Ratio::integer(0));
        assert_eq!(polar.add, Ratio::integer(2 * 300 * 1024 * 10 + 300 * 300));
    }

    #[test]
    fn ldpc_total_fixture() {
        // d_v = 3.33, N = 2016, M = 600, k = 1, R = 5/6.
        let t = complexity_estimate(1, 600, 2016, r("5/6"), r("3.33"), r("20")).unwrap();
        assert!(t.polar.is_none());
        assert_eq!(t.ldpc.total, Ratio::integer(20_499_840));
        let base = Ratio::integer(600 * 2016) * r("1/6");
        assert_eq!(t.ldpc.sign, base * Ratio::integer(21));
        assert_eq!(t.ldpc.mult, base * Ratio::integer(19));
        assert_eq!(t.ldpc.div, base * Ratio::integer(20));
        assert_eq!(
            t.ldpc.add,
            Ratio::integer(2 * 600 * 2016) * r("3.33") + Ratio::integer(600 * 600)
        );
    }

    #[test]
    fn zero_stairs_degenerate() {
        let t = complexity_estimate(0, 300, 1024, r("5/6"), r("3.33"), r("20")).unwrap();
        let polar = t.polar.unwrap();
        for v in [polar.sign, polar.mult, polar.div, polar.add, polar.total] {
            assert_eq!(v, Ratio::integer(0));
        }
        for v in [
            t.ldpc.sign,
            t.ldpc.mult,
            t.ldpc.div,
            t.ldpc.add,
            t.ldpc.total,
        ] {
            assert_eq!(v, Ratio::integer(0));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(complexity_estimate(1, 0, 1024, r("5/6"), r("3.33"), r("20")).is_err());
        assert!(complexity_estimate(1, 300, 0, r("5/6"), r("3.33"), r("20")).is_err());
        assert!(complexity_estimate(1, 300, 1024, r("0"), r("3.33"), r("20")).is_err());
        assert!(complexity_estimate(1, 300, 1024, r("7/6"), r("3.33"), r("20")).is_err());
        assert!(complexity_estimate(1, 300, 1024, r("5/6"), r("0"), r("20")).is_err());
        assert!(complexity_estimate(1, 300, 1024, r("5/6"), r("3.33"), r("-1")).is_err());
    }
}
